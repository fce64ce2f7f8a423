mod common;

use std::f64::consts::PI;

use bo_core::experiments::{
    hilbert_check_level, moment_free_line_data, run_hilbert_convergence_study, HilbertTestFunction,
};
use bo_core::grid::{Difference, GridFunction, GridSpec};
use bo_core::hilbert::{hilbert_line, hilbert_line_on, hilbert_periodic, HilbertPath, PeriodicHilbertKernel};
use bo_core::BoError;
use common::*;
use proptest::prelude::*;

fn odd_n_and_values() -> impl Strategy<Value = (usize, Vec<f64>, Vec<f64>)> {
    (1usize..60).prop_flat_map(|m| {
        let n = 2 * m + 1;
        (
            Just(n),
            prop::collection::vec(-3.0f64..3.0, n),
            prop::collection::vec(-3.0f64..3.0, n),
        )
    })
}

proptest! {
    #[test]
    fn kernel_matches_inverse_dft_of_multiplier(m in 1usize..200) {
        let n = 2 * m + 1;
        let k = PeriodicHilbertKernel::new(n).unwrap();
        let oracle = kernel_from_multiplier(n);
        prop_assert!(max_diff(k.weights(), &oracle) < 1e-12);
        for (i, c) in k.multiplier().iter().enumerate() {
            prop_assert_eq!(c.re, 0.0);
            prop_assert_eq!(c.im, multiplier_im(n, i));
        }
    }

    #[test]
    fn periodic_paths_agree_with_dense_convolution((n, u, _v) in odd_n_and_values()) {
        let k = PeriodicHilbertKernel::new(n).unwrap();
        let g = GridSpec::periodic(n, 3.0).unwrap();
        let uf = GridFunction::new(g, u.clone()).unwrap();
        let dense = matvec(&hilbert_matrix(n), &u);
        let scale = inf(&u).max(f64::MIN_POSITIVE);
        for path in [HilbertPath::Direct, HilbertPath::Spectral] {
            let h = hilbert_periodic(&uf, &k, path).unwrap();
            prop_assert!(max_diff(h.values(), &dense) < 1e-11 * scale);
        }
    }

    #[test]
    fn periodic_skew_and_norm((n, u, v) in odd_n_and_values()) {
        let k = PeriodicHilbertKernel::new(n).unwrap();
        let g = GridSpec::periodic(n, 2.0).unwrap();
        let (uf, vf) = (GridFunction::new(g, u).unwrap(), GridFunction::new(g, v).unwrap());
        let hu = hilbert_periodic(&uf, &k, HilbertPath::Spectral).unwrap();
        let hv = hilbert_periodic(&vf, &k, HilbertPath::Spectral).unwrap();
        let skew = hu.inner(&vf).unwrap() + uf.inner(&hv).unwrap();
        prop_assert!(skew.abs() <= 1e-12 * uf.l2_norm() * vf.l2_norm());
        prop_assert!(hu.l2_norm() <= uf.l2_norm() * (1.0 + 1e-13));
        let mean = uf.mean();
        let centred = GridFunction::new(g, uf.values().iter().map(|x| x - mean).collect()).unwrap();
        let hc = hilbert_periodic(&centred, &k, HilbertPath::Spectral).unwrap();
        prop_assert!((hc.l2_norm() - centred.l2_norm()).abs() <= 1e-12 * centred.l2_norm());
        let lap = uf.second_difference().unwrap();
        let hl = hilbert_periodic(&lap, &k, HilbertPath::Direct).unwrap();
        prop_assert!((hl.l2_norm() - lap.l2_norm()).abs() <= 1e-12 * lap.l2_norm().max(f64::MIN_POSITIVE));
    }

    #[test]
    fn periodic_commutes_with_differences((n, u, _v) in odd_n_and_values()) {
        let k = PeriodicHilbertKernel::new(n).unwrap();
        let uf = GridFunction::new(GridSpec::periodic(n, 5.0).unwrap(), u).unwrap();
        for d in [Difference::Forward, Difference::Backward] {
            let a = hilbert_periodic(&uf.difference(d).unwrap(), &k, HilbertPath::Spectral).unwrap();
            let b = hilbert_periodic(&uf, &k, HilbertPath::Spectral).unwrap().difference(d).unwrap();
            prop_assert!(max_diff(a.values(), b.values()) < 1e-11 * a.inf_norm().max(1.0));
        }
    }

    #[test]
    fn line_matches_defining_sum(u in prop::collection::vec(-2.0f64..2.0, 1..60)) {
        let n = u.len();
        let uf = GridFunction::new(GridSpec::line(n, 0.1, 0.0).unwrap(), u.clone()).unwrap();
        let h = hilbert_line(&uf).unwrap();
        let oracle = line_hilbert(&u, -(n as i64)..2 * n as i64);
        prop_assert_eq!(h.len(), 3 * n);
        prop_assert!(max_diff(h.values(), &oracle) < 1e-13 * inf(&u).max(1.0) * n as f64);
    }

    #[test]
    fn line_skew_symmetry(u in prop::collection::vec(-2.0f64..2.0, 40), v in prop::collection::vec(-2.0f64..2.0, 40)) {
        let g = GridSpec::line(40, 0.25, -5.0).unwrap();
        let (uf, vf) = (GridFunction::new(g, u).unwrap(), GridFunction::new(g, v).unwrap());
        let hu = hilbert_line_on(&uf, &g).unwrap();
        let hv = hilbert_line_on(&vf, &g).unwrap();
        let skew = hu.inner(&vf).unwrap() + uf.inner(&hv).unwrap();
        prop_assert!(skew.abs() <= 1e-12 * uf.l2_norm() * vf.l2_norm());
    }

    #[test]
    fn line_commutes_with_differences(u in prop::collection::vec(-2.0f64..2.0, 30)) {
        // Support ends well inside the output window so both sides see the
        // same zero-extended data.
        let mut padded = vec![0.0; 2];
        padded.extend(u);
        padded.extend([0.0; 2]);
        let g = GridSpec::line(padded.len(), 0.5, 0.0).unwrap();
        let uf = GridFunction::new(g, padded).unwrap();
        let wide = g.padded(40, 40).unwrap();
        let a = hilbert_line_on(&uf.difference(Difference::Forward).unwrap(), &wide).unwrap();
        let hu = hilbert_line_on(&uf, &wide.padded(1, 1).unwrap()).unwrap();
        let dhu = hu.difference(Difference::Forward).unwrap();
        // drop the extra point on each side of the widened output
        let b = &dhu.values()[1..dhu.len() - 1];
        prop_assert!(max_diff(a.values(), b) < 1e-12 * a.inf_norm().max(1.0));
    }
}

#[test]
fn n3_kernel_values() {
    let k = PeriodicHilbertKernel::new(3).unwrap();
    let s = 1.0 / 3f64.sqrt();
    assert!(max_diff(k.weights(), &[0.0, s, -s]) < 1e-15);
}

#[test]
fn cosine_rotates_to_sine() {
    let n = 63;
    let k = PeriodicHilbertKernel::new(n).unwrap();
    let g = GridSpec::periodic(n, 1.0).unwrap();
    let u = GridFunction::new(g, (0..n).map(|j| (2.0 * PI * j as f64 / n as f64).cos()).collect()).unwrap();
    let want: Vec<f64> = (0..n).map(|j| (2.0 * PI * j as f64 / n as f64).sin()).collect();
    for path in [HilbertPath::Direct, HilbertPath::Spectral] {
        let h = hilbert_periodic(&u, &k, path).unwrap();
        assert!(max_diff(h.values(), &want) < 1e-13);
    }
}

#[test]
fn impulse_response() {
    let mut u = vec![0.0; 7];
    u[3] = 1.0;
    let g = GridSpec::line(7, 1.0, -3.0).unwrap();
    let h = hilbert_line_on(&GridFunction::new(g, u).unwrap(), &g).unwrap();
    let v = h.values();
    assert_eq!(v[3], 0.0);
    assert!((v[4] - 2.0 / PI).abs() < 1e-15 && (v[2] + 2.0 / PI).abs() < 1e-15);
    assert_eq!(v[5], 0.0);
    assert!((v[6] - 2.0 / (3.0 * PI)).abs() < 1e-15);
}

#[test]
fn wrong_topology_and_size_are_rejected() {
    let k = PeriodicHilbertKernel::new(5).unwrap();
    let line = GridFunction::zeros(GridSpec::line(5, 1.0, 0.0).unwrap());
    assert!(matches!(
        hilbert_periodic(&line, &k, HilbertPath::Direct),
        Err(BoError::WrongTopology { .. })
    ));
    let per = GridFunction::zeros(GridSpec::periodic(7, 1.0).unwrap());
    assert!(hilbert_periodic(&per, &k, HilbertPath::Spectral).is_err());
    assert!(hilbert_line(&per).is_err());
    assert!(PeriodicHilbertKernel::new(4).is_err());
    assert!(PeriodicHilbertKernel::new(1).is_err());
}

#[test]
fn moment_free_data_preserves_norm() {
    let mut r = rng(7);
    for n in [101, 401, 1001] {
        let g = GridSpec::line_interval(n, -10.0, 10.0).unwrap();
        let u = moment_free_line_data(&mut r, &g).unwrap();
        let h = hilbert_line(&u).unwrap();
        assert!((h.l2_norm() - u.l2_norm()).abs() < 1e-10 * u.l2_norm(), "n = {n}");
    }
}

#[test]
fn lorentzian_pointwise_against_pv_quadrature() {
    let phi = |x: f64| 1.0 / (1.0 + x * x);
    let n = 8001; // dx = 0.05 on [-200, 200]
    let g = GridSpec::line_interval(n, -200.0, 200.0).unwrap();
    let h = hilbert_line_on(&GridFunction::from_fn(g, phi).unwrap(), &g).unwrap();
    for x in [-40.0, -3.0, -1.0, -0.5, 0.0, 0.25, 1.0, 2.5, 10.0, 75.0] {
        let j = ((x + 200.0) / g.spacing()).round() as usize;
        let oracle = pv_hilbert(&phi, g.x(j), 1e5, 1e-12);
        assert!(
            (oracle - g.x(j) / (1.0 + g.x(j) * g.x(j))).abs() < 1e-8,
            "oracle at {x}"
        );
        assert!(
            (h.values()[j] - oracle).abs() < 1e-5,
            "x = {x}: {} vs {oracle}",
            h.values()[j]
        );
    }
}

#[test]
fn l2_convergence_to_continuous_transform() {
    let levels = run_hilbert_convergence_study(&[0.2, 0.1, 0.05], HilbertTestFunction::Lorentzian, 200.0).unwrap();
    for w in levels.windows(2) {
        assert!(w[1].l2_error < w[0].l2_error);
        assert!(w[0].l2_error / w[1].l2_error >= 1.5, "{levels:?}");
    }
    let zero = run_hilbert_convergence_study(&[0.2, 0.1], HilbertTestFunction::Zero, 200.0).unwrap();
    assert!(zero.iter().all(|l| l.l2_error == 0.0));
}

#[test]
fn check_level_defects_are_small() {
    let row = hilbert_check_level(401, 20.0, HilbertTestFunction::Lorentzian, None).unwrap();
    assert!(row.skewness_defect < 1e-10 && row.norm_defect < 1e-10, "{row:?}");
    let bad = PeriodicHilbertKernel::new(401).unwrap().with_corrupted_weight(3, 1e-4);
    let row = hilbert_check_level(401, 20.0, HilbertTestFunction::Lorentzian, Some(&bad)).unwrap();
    assert!(row.skewness_defect.max(row.norm_defect) > 1e-10, "{row:?}");
}

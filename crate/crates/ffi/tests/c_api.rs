use std::ffi::{c_char, CStr};
use std::ptr;

use bo_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as c_char; 512];
    unsafe { bo_last_error_message(buf.as_mut_ptr(), buf.len()) };
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

#[test]
fn kernel_paths_agree() {
    let n = 31;
    let mut k = ptr::null_mut();
    assert_eq!(unsafe { bo_kernel_new(n, &mut k) }, BoStatus::Ok);
    let u: Vec<f64> = (0..n)
        .map(|j| (0.3 * j as f64).sin() + 0.1 * (j as f64).cos())
        .collect();
    let mut a = vec![0.0; n];
    let mut b = vec![0.0; n];
    unsafe {
        assert_eq!(
            bo_hilbert_periodic(k, BoHilbertPath::Spectral, u.as_ptr(), a.as_mut_ptr(), n),
            BoStatus::Ok
        );
        assert_eq!(
            bo_hilbert_periodic(k, BoHilbertPath::Direct, u.as_ptr(), b.as_mut_ptr(), n),
            BoStatus::Ok
        );
        bo_kernel_free(k);
    }
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-12);
    }
}

#[test]
fn even_kernel_size_is_rejected() {
    let mut k = ptr::null_mut();
    assert_eq!(unsafe { bo_kernel_new(32, &mut k) }, BoStatus::InvalidArgument);
    assert!(k.is_null());
    assert!(last_error().contains("odd"), "{}", last_error());
}

#[test]
fn null_and_length_errors() {
    let mut k = ptr::null_mut();
    unsafe {
        assert_eq!(bo_kernel_new(7, ptr::null_mut()), BoStatus::NullPointer);
        assert_eq!(bo_kernel_new(7, &mut k), BoStatus::Ok);
        let u = [0.0; 5];
        let mut out = [0.0; 5];
        assert_eq!(
            bo_hilbert_periodic(k, BoHilbertPath::Spectral, u.as_ptr(), out.as_mut_ptr(), 5),
            BoStatus::LengthMismatch
        );
        assert_eq!(
            bo_hilbert_periodic(k, BoHilbertPath::Spectral, ptr::null(), out.as_mut_ptr(), 7),
            BoStatus::NullPointer
        );
        bo_kernel_free(k);
        bo_kernel_free(ptr::null_mut());
    }
}

#[test]
fn line_transform_impulse() {
    let mut u = [0.0; 5];
    u[2] = 1.0;
    let mut out = [0.0; 15];
    assert_eq!(
        unsafe { bo_hilbert_line(u.as_ptr(), 5, out.as_mut_ptr(), 15) },
        BoStatus::Ok
    );
    // impulse at padded index 7: H(e_0)_j = 2 / (pi j) for odd j
    assert!((out[8] - 2.0 / std::f64::consts::PI).abs() < 1e-15);
    assert_eq!(out[9], 0.0);
    assert_eq!(
        unsafe { bo_hilbert_line(u.as_ptr(), 5, out.as_mut_ptr(), 14) },
        BoStatus::LengthMismatch
    );
}

#[test]
fn solver_tracks_one_soliton() {
    let n = 129;
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(bo_solver_new(n, -15.0, 15.0, &mut s), BoStatus::Ok);
        assert_eq!(bo_solver_len(s), n);
        let mut x = vec![0.0; n];
        assert_eq!(bo_solver_coordinates(s, x.as_mut_ptr(), n), BoStatus::Ok);
        let mut u = vec![0.0; n];
        assert_eq!(
            bo_one_soliton_sample(0.25, 15.0, 0.0, x.as_ptr(), u.as_mut_ptr(), n),
            BoStatus::Ok
        );
        assert_eq!(bo_solver_set_state(s, u.as_ptr(), n, 0.0), BoStatus::Ok);

        let mut step = BoStepInfo::default();
        assert_eq!(bo_solver_step(s, 0.01, &mut step), BoStatus::Ok);
        assert!(step.iterations >= 1 && step.max_contraction_ratio < 1.0);

        let mut info = BoEvolveInfo::default();
        assert_eq!(bo_solver_evolve(s, 3.99, &mut info), BoStatus::Ok);
        assert!((bo_solver_time(s) - 4.0).abs() < 1e-12);
        assert!(info.relative_l2_drift < 1e-9);

        let mut got = vec![0.0; n];
        let mut exact = vec![0.0; n];
        assert_eq!(bo_solver_get_state(s, got.as_mut_ptr(), n), BoStatus::Ok);
        bo_one_soliton_sample(0.25, 15.0, 4.0, x.as_ptr(), exact.as_mut_ptr(), n);
        let err = got.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-3, "{err}");
        bo_solver_free(s);
    }
}

#[test]
fn failed_step_leaves_state_alone() {
    let n = 33;
    let mut s = ptr::null_mut();
    unsafe {
        bo_solver_new(n, -15.0, 15.0, &mut s);
        let u: Vec<f64> = (0..n).map(|j| 5.0 * (j as f64 * 0.7).sin()).collect();
        bo_solver_set_state(s, u.as_ptr(), n, 0.0);
        assert_eq!(bo_solver_set_fixed_point(s, 1e-14, 2, 2.0), BoStatus::Ok);
        let status = bo_solver_step(s, 0.5, ptr::null_mut());
        assert!(
            matches!(status, BoStatus::NoConvergence | BoStatus::Divergence),
            "{status:?}"
        );
        assert!(!last_error().is_empty());
        let mut got = vec![0.0; n];
        bo_solver_get_state(s, got.as_mut_ptr(), n);
        assert_eq!(got, u);
        assert_eq!(bo_solver_time(s), 0.0);
        assert_eq!(bo_solver_set_fixed_point(s, -1.0, 2, 2.0), BoStatus::InvalidArgument);
        let nan = vec![f64::NAN; n];
        assert_eq!(bo_solver_set_state(s, nan.as_ptr(), n, 0.0), BoStatus::NonFinite);
        bo_solver_free(s);
    }
}

#[test]
fn status_strings() {
    for st in [BoStatus::Ok, BoStatus::BlowUp, BoStatus::Panic] {
        let s = unsafe { CStr::from_ptr(bo_status_string(st)) };
        assert!(!s.to_bytes().is_empty());
    }
}

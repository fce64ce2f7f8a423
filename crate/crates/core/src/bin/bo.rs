use std::process::ExitCode;

fn main() -> ExitCode {
    bo_core::cli::main()
}

use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(wreathbench::cli::run(std::env::args_os()))
}

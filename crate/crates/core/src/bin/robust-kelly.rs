use std::process::ExitCode;

fn main() -> ExitCode {
    robust_kelly::cli::main_with(std::env::args_os())
}

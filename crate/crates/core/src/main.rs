use std::process::ExitCode;

fn main() -> ExitCode {
    sievekit::cli::main_with_args(std::env::args_os())
}

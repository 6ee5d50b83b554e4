use std::process::ExitCode;

fn main() -> ExitCode {
    homsim::main_with_args(std::env::args_os())
}

use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(trilock::cli::run(std::env::args()) as u8)
}

use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(apollonian::cli::run(std::env::args()) as u8)
}

use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(tvbound::cli::run())
}

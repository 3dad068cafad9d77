use std::process::ExitCode;

fn main() -> ExitCode {
    let jobs = std::env::var(mutest::cli::JOBS_ENV).ok();
    ExitCode::from(mutest::cli::run(std::env::args_os(), jobs.as_deref()))
}

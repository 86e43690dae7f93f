use std::process::ExitCode;

fn main() -> ExitCode {
    lbist::cli::run()
}

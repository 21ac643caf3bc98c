use std::process::ExitCode;

fn main() -> ExitCode {
    let mut stdout = std::io::stdout().lock();
    let report = nht::cli::run_command(std::env::args_os(), &mut stdout);
    if report.exit_code != nht::cli::EXIT_OK || !report.diagnostics.is_empty() {
        eprintln!("{report}");
    }
    ExitCode::from(report.exit_code as u8)
}

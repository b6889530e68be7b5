use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let out = greenhom_cli::run(std::env::args_os());
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    if !out.stderr.is_empty() {
        let _ = writeln!(std::io::stderr(), "{}", out.stderr.trim_end());
    }
    ExitCode::from(out.code)
}

use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let env = std::env::var(horocomb_cli::TOLERANCE_ENV).ok();
    let out = horocomb_cli::run(std::env::args_os(), env.as_deref());
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    let _ = std::io::stdout().flush();
    ExitCode::from(out.code as u8)
}

use std::io::Write;

fn main() {
    let mut err = std::io::stderr();
    if let Err(e) = xxz_pin_cli::config::init_threads() {
        let _ = writeln!(err, "error: {e}");
        std::process::exit(e.exit_code());
    }
    let mut out = std::io::stdout().lock();
    let code = xxz_pin_cli::run(std::env::args(), &mut out, &mut err);
    let _ = out.flush();
    std::process::exit(code);
}

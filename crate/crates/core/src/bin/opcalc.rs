use std::io::Write;

fn main() {
    if let Err(e) = opcalc::cli::init_threads() {
        eprintln!("error: {e}");
        std::process::exit(opcalc::cli::exit_code(&e));
    }
    let out = opcalc::cli::run(std::env::args_os());
    let stream: &mut dyn Write = if out.code == 0 || out.code == 1 { &mut std::io::stdout() } else { &mut std::io::stderr() };
    let _ = stream.write_all(out.output.as_bytes());
    std::process::exit(out.code);
}

use std::io::Write;

fn main() {
    let (code, out) = nijenhuis_cli::run(std::env::args_os());
    let stream = if code == nijenhuis_cli::EXIT_INPUT { 2 } else { 1 };
    if stream == 2 {
        let _ = std::io::stderr().write_all(out.as_bytes());
    } else {
        let _ = std::io::stdout().write_all(out.as_bytes());
    }
    std::process::exit(code);
}

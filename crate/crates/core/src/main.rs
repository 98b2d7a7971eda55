use std::io::Write;

fn main() {
    let result = twobridge::cli::run(std::env::args_os());
    let mut stdout = std::io::stdout().lock();
    // A closed pipe is not worth a panic.
    let _ = stdout.write_all(result.rendered.as_bytes());
    let _ = stdout.flush();
    std::process::exit(result.exit_code());
}

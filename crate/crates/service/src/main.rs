use std::io;

fn main() {
    let stdin = io::stdin();
    let code = dispo_service::cli::run_cli(
        std::env::args_os(),
        dispo_service::cli::Io {
            stdin: &mut stdin.lock(),
            stdout: &mut io::stdout(),
            stderr: &mut io::stderr(),
        },
    );
    std::process::exit(code);
}

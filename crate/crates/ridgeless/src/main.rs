use clap::Parser;
use ridgeless::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let code = match run(
        &cli,
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    ) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    };
    std::process::exit(code);
}

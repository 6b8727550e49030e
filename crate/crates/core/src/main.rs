use clap::Parser;

use rzcond::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("error: {}", e.diagnostic());
        std::process::exit(e.exit_code());
    }
}

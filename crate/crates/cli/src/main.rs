use clap::Parser;

use knowref_cli::args::Cli;
use knowref_cli::{exit_code, run};

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("error: {err:#}");
        std::process::exit(exit_code(&err));
    }
}

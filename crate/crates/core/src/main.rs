use clap::Parser;

use casimir_lab::cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}

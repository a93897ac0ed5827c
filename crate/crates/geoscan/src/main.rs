use clap::Parser;
use geoscan::cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}

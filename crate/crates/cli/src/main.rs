use clap::Parser;
use magtorus_cli::{run, Args};

fn main() {
    std::process::exit(run(&Args::parse()));
}

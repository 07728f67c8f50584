use clap::Parser;

use scanforge::cli::{self, Invocation};

fn main() {
    let invocation = Invocation::parse();
    std::process::exit(cli::run(invocation));
}

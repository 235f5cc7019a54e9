use clap::Parser;
use multirate::{run, Cli};

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("multirate: {e}");
        std::process::exit(e.exit_code());
    }
}

use std::io::Write;

use clap::Parser;
use skewmorph::cli_reports::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let mut out = std::io::stdout().lock();
    let code = run(cli, &mut out);
    let _ = out.flush();
    std::process::exit(code);
}

use clap::Parser;
use xkit::cli::{self, Cli};

fn main() {
    // Clap's own exit code convention (2 on usage errors) clashes with the
    // report convention, where 2 means a verification suite failed; map
    // usage errors to 1 by hand.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            std::process::exit(if err.use_stderr() { 1 } else { 0 });
        }
    };
    std::process::exit(cli::run(cli));
}

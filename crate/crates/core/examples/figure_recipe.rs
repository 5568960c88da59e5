//! Runs a bundled recipe into a directory given on the command line.
//!
//!     cargo run --example figure_recipe -- fig6b out/
use creutz_ladder::sweep::{list_recipes, run_recipe};
use std::path::PathBuf;

fn main() -> creutz_ladder::Result<()> {
    let mut args = std::env::args().skip(1);
    let Some(name) = args.next() else {
        for r in list_recipes() {
            println!("{:<6} {}", r.name, r.description);
        }
        return Ok(());
    };
    let out = args.next().map(PathBuf::from).unwrap_or_else(|| PathBuf::from("out"));
    for f in run_recipe(&name, &out)?.files {
        println!("{}", f.display());
    }
    Ok(())
}

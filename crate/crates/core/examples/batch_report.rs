//! Runs every subcommand programmatically and writes reports to a directory.

use aniso::report::{run_subcommand, Command, RunConfig};

fn main() -> aniso::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "aniso-example-out".into());
    let mut cfg = RunConfig::default();
    cfg.seed = 11;
    cfg.measures.points_per_decade = 2;
    for cmd in [Command::Dilation, Command::Quasinorm, Command::Oscillatory, Command::Measures, Command::Extrapolate] {
        let outcome = run_subcommand(cmd, &cfg, out.as_ref())?;
        let failing: Vec<&str> = outcome.summary.failing().iter().map(|c| c.name.as_str()).collect();
        println!("{:<12} pass {} {:?} -> {}", cmd.name(), outcome.summary.pass, failing, outcome.summary_path.display());
    }
    Ok(())
}

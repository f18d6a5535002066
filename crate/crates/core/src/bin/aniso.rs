use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use aniso::report::{beta_from_q, beta_from_qs, exit_status, run_subcommand, Command, RunConfig};
use aniso::{Error, Result};

/// Environment variable naming the default output directory.
const OUT_ENV: &str = "ANISO_OUT_DIR";

#[derive(Parser)]
#[command(name = "aniso", version, about = "Batch checks for anisotropic dilation tools")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Spectral calculus of the dilation group.
    Dilation(Opts),
    /// Lyapunov form, quasi-norm and polar coordinates.
    Quasinorm(Opts),
    /// Decay sweeps of oscillatory integrals and the phase partition.
    Oscillatory(Opts),
    /// Fourier decay of the dyadic rough-kernel measures.
    Measures(Opts),
    /// Level-set decomposition and the extrapolation series.
    Extrapolate(Opts),
    /// Print the default configuration as JSON.
    Defaults,
}

#[derive(Args)]
struct Opts {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Generator matrix as a JSON array of rows, overriding the config.
    #[arg(long)]
    matrix: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, group = "base")]
    beta: Option<f64>,
    /// Dyadic base 2^{q'} with q' the dual exponent of q.
    #[arg(long, group = "base", value_name = "Q")]
    beta_from_q: Option<f64>,
    /// Dyadic base 2^{q' s'}.
    #[arg(long, group = "base", num_args = 2, value_names = ["Q", "S"])]
    beta_from_qs: Option<Vec<f64>>,
}

impl Opts {
    fn resolve(&self) -> Result<(RunConfig, PathBuf)> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
                RunConfig::from_json(&text)?
            }
            None => RunConfig::default(),
        };
        if let Some(m) = &self.matrix {
            cfg.matrix = serde_json::from_str(m).map_err(|e| Error::Config(format!("--matrix: {e}")))?;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(tol) = self.tol {
            cfg.tol = tol;
        }
        if let Some(b) = self.beta {
            cfg.beta = Some(b);
        }
        if let Some(q) = self.beta_from_q {
            cfg.beta = Some(beta_from_q(q)?);
            cfg.exponents.q = q;
        }
        if let Some(qs) = &self.beta_from_qs {
            cfg.beta = Some(beta_from_qs(qs[0], qs[1])?);
            cfg.exponents.q = qs[0];
            cfg.exponents.s = qs[1];
        }
        cfg.validate()?;
        let out = self
            .out
            .clone()
            .or_else(|| cfg.output_dir.as_ref().map(PathBuf::from))
            .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("aniso-out"));
        Ok((cfg, out))
    }
}

fn run(cmd: Command, opts: &Opts) -> Result<bool> {
    let (cfg, out) = opts.resolve()?;
    let outcome = run_subcommand(cmd, &cfg, &out)?;
    let s = &outcome.summary;
    for c in &s.checks {
        let mark = if c.pass { "ok  " } else { "FAIL" };
        println!("{mark} {:<32} {:.3e} (limit {:.3e})", c.name, c.value, c.limit);
    }
    for n in &s.notes {
        println!("note: {n}");
    }
    println!("summary: {}", outcome.summary_path.display());
    if !s.pass {
        let names: Vec<&str> = s.failing().iter().map(|c| c.name.as_str()).collect();
        eprintln!("failing checks: {}", names.join(", "));
    }
    Ok(s.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, opts) = match &cli.command {
        Cmd::Dilation(o) => (Command::Dilation, o),
        Cmd::Quasinorm(o) => (Command::Quasinorm, o),
        Cmd::Oscillatory(o) => (Command::Oscillatory, o),
        Cmd::Measures(o) => (Command::Measures, o),
        Cmd::Extrapolate(o) => (Command::Extrapolate, o),
        Cmd::Defaults => {
            match RunConfig::default().to_json() {
                Ok(text) => println!("{text}"),
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            }
            return ExitCode::SUCCESS;
        }
    };
    match run(cmd, opts) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_status(&e))
        }
    }
}

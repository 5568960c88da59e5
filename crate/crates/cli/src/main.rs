use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgAction, Parser, Subcommand};
use creutz_ladder::diagnostics::{classify_states, symmetry_report};
use creutz_ladder::model::build_realspace;
use creutz_ladder::spectra::diagonalize;
use creutz_ladder::sweep::{self, list_recipes, run_recipe, Quantity, RunSummary, SweepConfig};
use creutz_ladder::topology::{awn, z2_closed_form};
use creutz_ladder::LadderError;

/// Spectra, topology and skin-effect diagnostics for the non-Hermitian Creutz ladder.
#[derive(Parser, Debug)]
#[command(name = "creutz", version)]
struct Cli {
    /// TOML sweep config.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory; relative `output_path` values resolve against it.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// No-op: nothing in the pipeline draws random numbers.
    #[arg(long, global = true, action = ArgAction::SetTrue)]
    seedless: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// OBC spectrum with per-state class, IPR, imbalance and |β| columns.
    Spectrum,
    /// Grid sweep of awn, z2, ti, hybrid_winding or pt_threshold.
    Phase,
    /// β quartets of every OBC eigenvalue.
    Gbz,
    /// Analytic edge, compact or gain-loss shifted mode profiles.
    Modes,
    /// Regime, symmetry residuals, invariants and state classes as JSON.
    Diagnose,
    /// Run a bundled figure recipe.
    Recipe { name: String },
    /// List bundled recipes with their parameter provenance.
    ListRecipes,
}

enum Failure {
    Config(String),
    Numerical(String),
}

impl From<LadderError> for Failure {
    fn from(e: LadderError) -> Self {
        if e.is_config() || matches!(e, LadderError::Io(_)) {
            Failure::Config(e.to_string())
        } else {
            Failure::Numerical(e.to_string())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: --threads: {e}");
            return ExitCode::from(1);
        }
    }
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("config error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("numerical failure: {m}");
            ExitCode::from(2)
        }
    }
}

fn load(cli: &Cli) -> Result<SweepConfig, Failure> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Failure::Config("this command needs --config <path>".into()))?;
    Ok(SweepConfig::from_file(path)?)
}

fn with_quantity(mut cfg: SweepConfig, q: Quantity) -> Result<SweepConfig, Failure> {
    cfg.quantity = q;
    cfg.validate()?;
    Ok(cfg)
}

fn report(summary: &RunSummary) {
    for f in &summary.files {
        println!("{}", f.display());
    }
    if summary.failed_cells > 0 {
        log::warn!("{} grid cells failed and were written as NaN", summary.failed_cells);
    }
}

fn dispatch(cli: &Cli) -> Result<(), Failure> {
    let out = cli.out.as_path();
    match &cli.command {
        Command::Spectrum => report(&sweep::run(&with_quantity(load(cli)?, Quantity::Spectrum)?, out)?),
        Command::Gbz => report(&sweep::run(&with_quantity(load(cli)?, Quantity::Gbz)?, out)?),
        Command::Modes => report(&sweep::run(&with_quantity(load(cli)?, Quantity::ZeroModes)?, out)?),
        Command::Phase => {
            let cfg = load(cli)?;
            if !cfg.quantity.is_grid() {
                return Err(Failure::Config(format!(
                    "quantity: '{}' is not a grid quantity; use the matching subcommand",
                    cfg.quantity.as_str()
                )));
            }
            report(&sweep::run(&cfg, out)?);
        }
        Command::Diagnose => diagnose(&load(cli)?, out)?,
        Command::Recipe { name } => report(&run_recipe(name, out)?),
        Command::ListRecipes => {
            for r in list_recipes() {
                println!("{:<6} {}", r.name, r.description);
                for (k, v) in &r.provenance {
                    println!("         {k}: {v}");
                }
            }
        }
    }
    Ok(())
}

fn diagnose(cfg: &SweepConfig, out: &Path) -> Result<(), Failure> {
    let p = cfg.base_params.open();
    let s = diagonalize(&build_realspace(&p))?;
    let loc = classify_states(&p, &s)?;
    let mut counts = std::collections::BTreeMap::<&str, usize>::new();
    for st in &loc.per_state {
        *counts.entry(st.class.as_str()).or_default() += 1;
    }
    let sym: Vec<_> = symmetry_report(&p)
        .into_iter()
        .map(|r| {
            serde_json::json!({ "kind": r.kind.name(), "residual": r.residual, "expected": r.expected })
        })
        .collect();
    let gamma_awn = if p.eta_antisymmetric() { awn(&p, cfg.grid_k(), cfg.grid_phi()).ok().map(|w| w.value) } else { None };
    let value = serde_json::json!({
        "params": p,
        "regime": format!("{:?}", p.regime()),
        "symmetries": sym,
        "awn": gamma_awn,
        "z2": if p.is_p_symmetric() { z2_closed_form(&p).ok() } else { None },
        "total_imbalance": loc.total_imbalance,
        "biorth_residual": s.biorth_residual,
        "class_counts": counts,
    });
    let text = serde_json::to_string_pretty(&value).map_err(|e| Failure::Numerical(e.to_string()))?;
    println!("{text}");
    std::fs::create_dir_all(out).map_err(|e| Failure::Config(format!("{}: {e}", out.display())))?;
    let path = out.join("diagnose.json");
    std::fs::write(&path, text + "\n").map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    Ok(())
}

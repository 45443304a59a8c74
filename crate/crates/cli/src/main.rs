use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fsdlab::levi::{fsd, TestFunction, CATALOG_IDS};
use fsdlab::orders::counterexample_search;
use fsdlab::spectra::{eigh, CVector, C64};
use fsdlab_cli::config::{parse_dims, ConfigError, Format, RunConfig};
use fsdlab_cli::runner::run_and_render;
use fsdlab_cli::suites::{describe, SUITE_IDS};

#[derive(Parser)]
#[command(name = "fsdlab", version, about = "Numerical verification lab for normalized determinants and Levi forms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites and print a report.
    Run {
        /// TOML configuration file; flags override its fields.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Comma-separated dimensions, e.g. 2,4,8.
        #[arg(long)]
        dims: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
        /// Suite id or `all`; repeatable.
        #[arg(long = "suite")]
        suites: Vec<String>,
        #[arg(long)]
        format: Option<Format>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Levi form and FSD of a catalog function at one point.
    Fsd {
        kind: String,
        #[arg(long, default_value_t = 4)]
        n: usize,
        /// Comma-separated complex coordinates, e.g. "1,i,0.5-2i".
        #[arg(long)]
        point: Option<String>,
        /// Comma-separated weights for the weighted family.
        #[arg(long)]
        weights: Option<String>,
    },
    /// Random search for chaotically but not Loewner ordered pairs.
    Search {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    ListSuites,
    ListCatalog,
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn usage(e: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(2)
}

fn build_config(
    config: Option<PathBuf>,
    seed: Option<u64>,
    dims: Option<String>,
    trials: Option<usize>,
    suites: Vec<String>,
    format: Option<Format>,
    out: Option<PathBuf>,
) -> Result<RunConfig, ConfigError> {
    let mut cfg = match config {
        Some(path) => RunConfig::load(&path)?,
        None => RunConfig::default(),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(d) = dims {
        cfg.dims = parse_dims(&d)?;
    }
    if let Some(t) = trials {
        cfg.trials = t;
    }
    if !suites.is_empty() {
        cfg.suites = suites;
    }
    if let Some(f) = format {
        cfg.format = f;
    }
    if out.is_some() {
        cfg.output = out;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn parse_point(s: &str) -> Result<CVector, String> {
    let coords: Vec<C64> = s
        .split(',')
        .map(|t| t.trim().parse::<C64>().map_err(|_| format!("bad complex number {t:?}")))
        .collect::<Result<_, _>>()?;
    Ok(CVector::from_vec(coords))
}

fn cmd_fsd(kind: &str, n: usize, point: Option<String>, weights: Option<String>) -> Result<(), String> {
    let f = match weights {
        Some(w) => {
            if kind != "weighted" {
                return Err("--weights only applies to the weighted family".into());
            }
            let w: Vec<f64> = w
                .split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|_| format!("bad weight {t:?}")))
                .collect::<Result<_, _>>()?;
            TestFunction::weighted(w).map_err(|e| e.to_string())?
        }
        None => TestFunction::from_id(kind, n).map_err(|e| e.to_string())?,
    };
    let z = match point {
        Some(p) => parse_point(&p)?,
        None => CVector::zeros(f.dim()),
    };
    if z.len() != f.dim() {
        return Err(format!("point has {} coordinates, the function lives in dimension {}", z.len(), f.dim()));
    }
    let levi = f.levi_analytic(&z).map_err(|e| e.to_string())?;
    let d = eigh(&levi).map_err(|e| e.to_string())?;
    let value = fsd(&f, &z).map_err(|e| e.to_string())?;
    let mut out = String::new();
    let _ = writeln!(out, "function    {} (n = {})", f.id(), f.dim());
    let _ = writeln!(out, "fsd         {value:.12e}");
    let _ = writeln!(out, "lambda_min  {:.12e}", d.min());
    let _ = writeln!(out, "lambda_max  {:.12e}", d.max());
    if let Some(c) = f.truncation_caveat() {
        let _ = writeln!(out, "caveat      {c}");
    }
    emit(&out);
    Ok(())
}

fn cmd_search(dim: usize, trials: usize, seed: u64) -> Result<(), String> {
    let rep = counterexample_search(dim, trials, seed).map_err(|e| e.to_string())?;
    let mut out = format!("dim {dim}, trials {}, hits {}, hit rate {:.4}\n", rep.trials, rep.hits, rep.hit_rate());
    for (i, p) in rep.pairs.iter().enumerate() {
        let label = if i == 0 { "classic pair" } else { "hit" };
        let _ = writeln!(
            out,
            "{label:>12}: chaotic margin {:.4e}, loewner margin {:.4e}",
            p.chaotic_margin, p.loewner_margin
        );
    }
    emit(&out);
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Run { config, seed, dims, trials, suites, format, out } => {
            let cfg = match build_config(config, seed, dims, trials, suites, format, out) {
                Ok(c) => c,
                Err(e) => return usage(e),
            };
            let (report, text, _) = match run_and_render(&cfg) {
                Ok(r) => r,
                Err(e) => return usage(e),
            };
            if cfg.output.is_none() {
                emit(&format!("{text}\n"));
            }
            let s = &report.summary;
            eprintln!(
                "{} pass, {} fail, {} hypothesis-violated, {} undetermined",
                s.pass, s.fail, s.hypothesis_violated, s.undetermined
            );
            if report.failed() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Command::Fsd { kind, n, point, weights } => match cmd_fsd(&kind, n, point, weights) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => usage(e),
        },
        Command::Search { dim, trials, seed } => match cmd_search(dim, trials, seed) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => usage(e),
        },
        Command::ListSuites => {
            emit(&SUITE_IDS.iter().map(|id| format!("{id:<24} {}\n", describe(id))).collect::<String>());
            ExitCode::SUCCESS
        }
        Command::ListCatalog => {
            emit(&CATALOG_IDS.iter().map(|id| format!("{id}\n")).collect::<String>());
            ExitCode::SUCCESS
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use parrep::lemmas::run_suite;
use parrep::{run_config, ExperimentConfig, LemmaSuite};

#[derive(Parser)]
#[command(name = "parrep", version, about = "Parallel repetition reduction experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the exact lemma suites.
    Lemmas {
        /// raz, flooding, hppw, forgetfulness or all.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Write per-check records (JSON lines) here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a reduction experiment from a TOML config.
    Reduce {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print bound tables.
    Bounds {
        /// public, three, or an informal variant (public-threshold, three-threshold, ...).
        #[arg(long, default_value = "public")]
        variant: String,
        /// Comma-separated values of k.
        #[arg(long, value_delimiter = ',', default_values_t = [10usize, 100, 1000, 10000])]
        grid: Vec<usize>,
    },
    /// Run the seeded per-module property sweeps.
    Props {
        #[arg(long)]
        module: Option<String>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn lemmas(suite: &str, seed: u64, out: Option<PathBuf>) -> Result<bool> {
    let suites = match suite {
        "all" => vec![LemmaSuite::Raz, LemmaSuite::Flooding, LemmaSuite::Hppw, LemmaSuite::Forgetfulness],
        s => vec![s.parse()?],
    };
    let mut ok = true;
    let mut lines = String::new();
    for s in suites {
        let r = run_suite(s, None, seed)?;
        println!(
            "{:<14} {} {}/{} max(lhs-bound) = {:.3e}",
            format!("{s:?}").to_lowercase(),
            if r.all_pass() { "PASS" } else { "FAIL" },
            r.passed,
            r.checks,
            r.max_excess
        );
        ok &= r.all_pass();
        for rec in &r.records {
            lines.push_str(&serde_json::to_string(rec)?);
            lines.push('\n');
        }
    }
    if let Some(path) = out {
        std::fs::write(path, lines)?;
    }
    Ok(ok)
}

fn reduce(config: PathBuf, seed: Option<u64>, trials: Option<u64>, out: Option<PathBuf>) -> Result<bool> {
    let mut cfg = ExperimentConfig::load(&config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(t) = trials {
        cfg.trials = t;
    }
    if out.is_some() {
        cfg.output = out;
    }
    let res = run_config(&cfg)?;
    println!("{}", serde_json::to_string_pretty(&res.summary)?);
    eprintln!("wall clock: {:.2?}", res.wall_clock);
    Ok(res.summary.pass())
}

fn bounds(variant: &str, grid: &[usize]) -> Result<bool> {
    let rows = parrep::bounds::bound_table(variant, grid)?;
    println!("{:>8} {:>8} {:>3} {:>6} {:>14} {:>8} {:>8}", "k", "t", "m", "eps/s", "value", "vacuous", "precond");
    for r in &rows {
        println!(
            "{:>8} {:>8} {:>3} {:>6.2} {:>14.6e} {:>8} {:>8}",
            r.k, r.t, r.m, r.soundness, r.raw, r.vacuous, r.precondition
        );
    }
    if rows.iter().any(|r| r.note.is_some()) {
        println!("(unit-constant informal bound: the O(.) constant is fixed to 1)");
    }
    Ok(true)
}

fn props(module: Option<&str>, seed: u64) -> Result<bool> {
    let reports = parrep::props::run_props(module, seed)?;
    for r in &reports {
        println!("{:<11} {} {}/{} {}", r.module, if r.pass() { "PASS" } else { "FAIL" }, r.passed, r.cases, r.property);
    }
    Ok(reports.iter().all(|r| r.pass()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Lemmas { suite, seed, out } => lemmas(&suite, seed, out),
        Command::Reduce { config, seed, trials, out } => reduce(config, seed, trials, out),
        Command::Bounds { variant, grid } => bounds(&variant, &grid),
        Command::Props { module, seed } => props(module.as_deref(), seed),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

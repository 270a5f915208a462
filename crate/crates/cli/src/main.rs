//! `aniso`: command-line front end for the anisotropic bootstrap
//! percolation toolkit.

mod commands;
mod output;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::parser::ValueSource;
use clap::{ArgMatches, CommandFactory, FromArgMatches, Parser, Subcommand};

use settings::{Settings, UsageError};

const OUT_ENV: &str = "ANISO_OUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "aniso", version, about = "Anisotropic bootstrap percolation experiments")]
struct Cli {
    /// `key = value` settings file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory [default: $ANISO_OUT_DIR, else ./aniso-out].
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify an N_r^{a1..ad} family and describe its stable set.
    Classify(FamilyArgs),
    /// Close a grid file under its family.
    Closure(GridArgs),
    /// Estimate the critical length for each p.
    LcScan(LcArgs),
    /// Strong component statistics of the centre site.
    ClusterStats(ClusterArgs),
    /// Fill probability from a seeded lower-corner block.
    Growth(GrowthArgs),
    /// Aizenman-Lebowitz witness blocks for a grid file.
    AlCheck(AlArgs),
    /// Probability that the closure has a strong component of diameter ≥ k.
    DiamTail(TailArgs),
    /// Fit critical lengths against the scaling models.
    Fit(FitArgs),
}

#[derive(clap::Args, Debug)]
struct FamilyArgs {
    /// Exponents a1,..,ad (nondecreasing).
    #[arg(long)]
    a: Option<String>,
    /// Threshold r.
    #[arg(long)]
    r: Option<String>,
    /// Dimension, checked against the length of a.
    #[arg(long)]
    d: Option<String>,
}

#[derive(clap::Args, Debug)]
struct GridArgs {
    /// Grid file: header `d L1..Ld geometry`, then `a1..ad r`, then sites.
    #[arg(long)]
    grid: Option<String>,
}

#[derive(clap::Args, Debug)]
struct LcArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Comma-separated probabilities.
    #[arg(long)]
    p: Option<String>,
    /// Trials per batch of each probe [default: 400].
    #[arg(long)]
    trials: Option<String>,
    /// Trial budget per probe [default: 4 × trials].
    #[arg(long)]
    max_trials: Option<String>,
    /// Largest length tried while doubling [default: 65536].
    #[arg(long)]
    max_length: Option<String>,
    /// cube or torus [default: cube].
    #[arg(long)]
    geometry: Option<String>,
    #[arg(long)]
    seed: Option<String>,
}

#[derive(clap::Args, Debug)]
struct ClusterArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Side length N of the grid.
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    p: Option<String>,
    /// [default: 1000]
    #[arg(long)]
    trials: Option<String>,
    /// Diameter cutoff [default: p^-(r - a_max + eps)].
    #[arg(long)]
    cutoff: Option<String>,
    /// [default: 0.1]
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    seed: Option<String>,
}

#[derive(clap::Args, Debug)]
struct GrowthArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Side length L.
    #[arg(long)]
    l: Option<String>,
    /// Seed block sides, one per axis.
    #[arg(long)]
    block: Option<String>,
    #[arg(long)]
    p: Option<String>,
    /// [default: 200]
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    seed: Option<String>,
}

#[derive(clap::Args, Debug)]
struct AlArgs {
    #[arg(long)]
    grid: Option<String>,
    /// Scales to witness [default: 1..=diam].
    #[arg(long)]
    k: Option<String>,
    /// block or slab [default: block].
    #[arg(long)]
    mode: Option<String>,
    /// Slab width l (slab mode).
    #[arg(long)]
    width: Option<String>,
}

#[derive(clap::Args, Debug)]
struct TailArgs {
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long)]
    l: Option<String>,
    /// Diameter threshold.
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    p: Option<String>,
    /// [default: 1000]
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    seed: Option<String>,
}

#[derive(clap::Args, Debug)]
struct FitArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// CSV with `p` and `lc` columns, such as lc-scan's lc.csv.
    #[arg(long)]
    points: Option<String>,
    /// Probabilities, paired with --lc when no points file is given.
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    lc: Option<String>,
    /// pure_power, power_log2 or both [default: both].
    #[arg(long)]
    model: Option<String>,
}

/// Values given explicitly on the command line, keyed by long flag name.
fn flag_settings(def: &clap::Command, m: &ArgMatches) -> Settings {
    let mut s = Settings::default();
    for arg in def.get_arguments() {
        let id = arg.get_id().as_str();
        if id == "config" || id == "out" || m.value_source(id) != Some(ValueSource::CommandLine) {
            continue;
        }
        if let Ok(Some(raw)) = m.try_get_raw(id) {
            let vals: Vec<String> = raw.map(|v| v.to_string_lossy().into_owned()).collect();
            s.set(id, vals.join(","));
        }
    }
    s
}

fn execute() -> Result<String> {
    let def = Cli::command();
    let matches = def.clone().get_matches();
    let cli = Cli::from_arg_matches(&matches)?;
    let (name, sub) = matches.subcommand().expect("subcommand is required");

    let mut file = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
            Settings::parse(&text)?
        }
        None => Settings::default(),
    };
    if let Some(cmd) = file.remove("command") {
        if cmd != name {
            return Err(UsageError(format!("config is for `{cmd}`, not `{name}`")).into());
        }
    }
    let file_out = file.remove("out");
    let mut settings = file.overridden_by(flag_settings(def.find_subcommand(name).expect("known subcommand"), sub));

    let out = cli
        .out
        .or_else(|| file_out.map(PathBuf::from))
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("aniso-out"));
    std::fs::create_dir_all(&out).with_context(|| format!("creating output directory {}", out.display()))?;

    let start = Instant::now();
    let (files, summary) = commands::run(name, &mut settings, &out)?;
    output::write_manifest(&out, name, &settings, start.elapsed(), &files)?;
    Ok(summary)
}

fn main() -> ExitCode {
    match execute() {
        Ok(summary) => {
            if !summary.is_empty() {
                println!("{summary}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;

use vcc_cli::config::{parse_pairs, RunConfig};
use vcc_cli::run::run;
use vcc_core::experiments::list_recipes;

/// Monte Carlo experiments for vector coded caching in downlink MU-MIMO.
#[derive(Debug, Parser)]
#[command(name = "vcc", version)]
struct Cli {
    /// Start from a preset (see --list-recipes).
    #[arg(long)]
    recipe: Option<String>,
    /// Flat key=value file applied after the recipe.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one key; repeatable, applied after the config file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// CSV output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// User-location draws.
    #[arg(long)]
    locations: Option<usize>,
    /// Fading draws per location.
    #[arg(long)]
    fadings: Option<usize>,
    /// Print the presets and exit.
    #[arg(long)]
    list_recipes: bool,
}

fn resolve(cli: &Cli) -> Result<RunConfig> {
    let file_pairs = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            parse_pairs(&text, false).with_context(|| format!("parsing {}", path.display()))?
        }
        None => Vec::new(),
    };
    let recipe = cli
        .recipe
        .clone()
        .or_else(|| {
            file_pairs
                .iter()
                .find(|(k, _)| k == "recipe")
                .map(|(_, v)| v.clone())
        })
        .filter(|r| r != "none");
    let mut config = match &recipe {
        Some(name) => RunConfig::from_recipe(name)?,
        None => RunConfig::default(),
    };
    config.apply_all(&file_pairs)?;
    for item in &cli.set {
        let (k, v) = item
            .split_once('=')
            .with_context(|| format!("--set expects KEY=VALUE, got `{item}`"))?;
        config.apply(k.trim(), v.trim())?;
    }
    if let Some(seed) = cli.seed {
        config.apply("seed", &seed.to_string())?;
    }
    if let Some(n) = cli.locations {
        config.apply("locations", &n.to_string())?;
    }
    if let Some(n) = cli.fadings {
        config.apply("fadings", &n.to_string())?;
    }
    config.validate()?;
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.list_recipes {
        print!("{}", list_recipes());
        return ExitCode::SUCCESS;
    }
    match execute(&cli) {
        Ok(clean) if clean => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

/// Returns whether every invariant held.
fn execute(cli: &Cli) -> Result<bool> {
    let config = resolve(cli)?;
    let context = config
        .recipe
        .as_deref()
        .unwrap_or("custom scenario")
        .to_string();
    let outcome = run(&config, cli.workers).with_context(|| format!("running {context}"))?;
    match &cli.out {
        Some(path) => {
            std::fs::write(path, &outcome.csv)
                .with_context(|| format!("writing {}", path.display()))?;
            print!("{}", outcome.summary);
        }
        None => print!("{}", outcome.csv),
    }
    for v in &outcome.violations {
        eprintln!("invariant violated: {v}");
    }
    Ok(outcome.violations.is_empty())
}

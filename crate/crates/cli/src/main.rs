//! `flrw-blowup`: exponents, lifespan bounds, region diagrams, special
//! functions and blow-up simulations from the command line.
//!
//! Exit codes: 0 success, 1 domain or validation error, 2 usage error.

mod commands;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use flrw_blowup::config::RunConfig;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::output::Out;

#[derive(Debug, Parser)]
#[command(name = "flrw-blowup", version, about)]
struct Cli {
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Suppress stdout.
    #[arg(long, global = true)]
    quiet: bool,
    /// Recorded in the manifest; every computation is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// `key = value` file, or a JSON config or manifest.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    model: ModelArgs,
    #[command(subcommand)]
    command: Command,
}

/// Overrides applied on top of `--config`.
#[derive(Debug, Args)]
struct ModelArgs {
    #[arg(long, global = true)]
    n: Option<u32>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    mu: Option<f64>,
    #[arg(long, global = true)]
    p: Option<f64>,
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    /// Support radius of the data.
    #[arg(long = "R", alias = "radius", global = true)]
    radius: Option<f64>,
    /// `ut` or `grad`.
    #[arg(long, global = true)]
    nonlinearity: Option<String>,
    /// Equation-of-state constant; fixes alpha and mu.
    #[arg(long, global = true, allow_hyphen_values = true)]
    w: Option<f64>,
    #[arg(long, global = true)]
    dr: Option<f64>,
    #[arg(long = "t-max", global = true)]
    t_max: Option<f64>,
    #[arg(long, global = true)]
    cfl: Option<f64>,
    #[arg(long, global = true)]
    threshold: Option<f64>,
    #[arg(long = "confirm-factor", global = true)]
    confirm_factor: Option<f64>,
    #[arg(long = "dt-cap", global = true)]
    dt_cap: Option<f64>,
    /// `standard`, `position` or `velocity`.
    #[arg(long, global = true)]
    profile: Option<String>,
    /// Drop the nonlinear term.
    #[arg(long, global = true)]
    linear: bool,
}

impl ModelArgs {
    fn apply(&self, cfg: &mut RunConfig) -> flrw_blowup::Result<()> {
        let nums = [
            ("alpha", self.alpha),
            ("mu", self.mu),
            ("p", self.p),
            ("epsilon", self.epsilon),
            ("R", self.radius),
            ("w", self.w),
            ("dr", self.dr),
            ("t_max", self.t_max),
            ("cfl", self.cfl),
            ("threshold", self.threshold),
            ("confirm_factor", self.confirm_factor),
            ("dt_cap", self.dt_cap),
        ];
        if let Some(n) = self.n {
            cfg.set("n", &n.to_string())?;
        }
        for (k, v) in nums {
            if let Some(v) = v {
                cfg.set(k, &format!("{v:?}"))?;
            }
        }
        if let Some(s) = &self.nonlinearity {
            cfg.set("nonlinearity", s)?;
        }
        if let Some(s) = &self.profile {
            cfg.set("profile", s)?;
        }
        if self.linear {
            cfg.linear = true;
        }
        Ok(())
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Critical exponents for (n, alpha, mu) or (n, w).
    Exponents(ExponentsArgs),
    /// Every lifespan bound at one parameter point.
    Bounds(BoundsArgs),
    /// Region diagram: grid.csv and curves.csv.
    Regions(RegionsArgs),
    /// Modified Bessel function K_nu and its identity residuals.
    Bessel(BesselArgs),
    /// Test-function checks on a (t, |x|) lattice.
    #[command(name = "testfn-check")]
    TestfnCheck(TestfnArgs),
    /// Kato-lemma iteration, bound and ODE oracle.
    Kato(KatoArgs),
    /// One blow-up simulation.
    Simulate(SimulateArgs),
    /// Lifespan scaling sweep over epsilon.
    Sweep(SweepArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Exponents(_) => "exponents",
            Command::Bounds(_) => "bounds",
            Command::Regions(_) => "regions",
            Command::Bessel(_) => "bessel",
            Command::TestfnCheck(_) => "testfn-check",
            Command::Kato(_) => "kato",
            Command::Simulate(_) => "simulate",
            Command::Sweep(_) => "sweep",
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ExponentsArgs {
    /// Print JSON instead of a table.
    #[arg(long)]
    #[serde(default)]
    pub json: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BoundsArgs {}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct RegionsArgs {
    /// Diagram number, 1 to 7.
    #[arg(long)]
    pub figure: Option<u8>,
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long)]
    pub np: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BesselArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub nu: Option<f64>,
    /// Comma-separated arguments.
    #[arg(long, value_delimiter = ',')]
    pub t: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct TestfnArgs {
    /// Also evaluate the weighted test function with this q.
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<f64>,
    /// Comma-separated sample times.
    #[arg(long, value_delimiter = ',')]
    pub t: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct KatoArgs {
    /// `first`, `second`, `second-log` or `second-logq`.
    #[arg(long)]
    pub order: Option<String>,
    /// Comma-separated `key=value` list over p, a, b, c, q, r, mu, A0, A1,
    /// R, T0, T1, F0, dF0.
    #[arg(long)]
    pub params: Option<String>,
    /// Margin in the divergence test.
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Blow-up level of the ODE oracle.
    #[arg(long = "oracle-threshold")]
    pub oracle_threshold: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SimulateArgs {}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SweepArgs {
    /// Comma-separated, strictly decreasing.
    #[arg(long, value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,
    /// Horizon as a multiple of the predicted bound.
    #[arg(long)]
    pub slack: Option<f64>,
    /// Minimum number of steps up to the expected lifespan.
    #[arg(long = "min-steps")]
    pub min_steps: Option<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    command: String,
    seed: u64,
    config: RunConfig,
    args: Value,
}

/// A loaded `--config`: plain run parameters or a previous manifest.
struct Loaded {
    config: RunConfig,
    seed: Option<u64>,
    saved: Option<(String, Value)>,
}

fn load_config(path: Option<&Path>) -> Result<Loaded> {
    let Some(path) = path else {
        return Ok(Loaded { config: RunConfig::default(), seed: None, saved: None });
    };
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if text.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        if v.get("config").is_some() {
            let m: Manifest = serde_json::from_value(v).with_context(|| format!("reading manifest {}", path.display()))?;
            return Ok(Loaded { config: m.config, seed: Some(m.seed), saved: Some((m.command, m.args)) });
        }
    }
    Ok(Loaded { config: RunConfig::parse(&text)?, seed: None, saved: None })
}

/// Fills options left unset on the command line from a saved manifest of
/// the same command.
fn merge<A: Serialize + DeserializeOwned>(args: &A, saved: Option<&Value>) -> Result<A> {
    let mut v = serde_json::to_value(args)?;
    if let (Some(Value::Object(saved)), Value::Object(cur)) = (saved, &mut v) {
        for (k, x) in saved {
            if cur.get(k).is_none_or(Value::is_null) {
                cur.insert(k.clone(), x.clone());
            }
        }
    }
    Ok(serde_json::from_value(v)?)
}

fn run(cli: Cli) -> Result<()> {
    let loaded = load_config(cli.config.as_deref())?;
    let mut cfg = loaded.config;
    cli.model.apply(&mut cfg)?;
    let cfg = cfg.resolved()?;
    let name = cli.command.name();
    let saved = loaded.saved.as_ref().filter(|(c, _)| c == name).map(|(_, a)| a);
    let seed = cli.seed.or(loaded.seed).unwrap_or(0);
    let out = Out::new(&cli.out, cli.quiet)?;

    macro_rules! dispatch {
        ($a:expr, $f:path) => {{
            let args = merge($a, saved)?;
            let manifest = Manifest { command: name.into(), seed, config: cfg.clone(), args: serde_json::to_value(&args)? };
            out.json("manifest.json", &manifest)?;
            $f(&cfg, &args, &out)
        }};
    }
    match &cli.command {
        Command::Exponents(a) => dispatch!(a, commands::exponents),
        Command::Bounds(a) => dispatch!(a, commands::bounds),
        Command::Regions(a) => dispatch!(a, commands::regions),
        Command::Bessel(a) => dispatch!(a, commands::bessel),
        Command::TestfnCheck(a) => dispatch!(a, commands::testfn_check),
        Command::Kato(a) => dispatch!(a, commands::kato),
        Command::Simulate(a) => dispatch!(a, commands::simulate),
        Command::Sweep(a) => dispatch!(a, commands::sweep),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

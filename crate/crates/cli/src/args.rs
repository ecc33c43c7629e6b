use std::fs;

use clap::{Args, Parser, Subcommand, ValueEnum};
use jamlim_core::{
    BoundaryCondition, Configuration, LocalEvent, Norm, ParkingScheme, Site, DEFAULT_BUDGET,
};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const BUDGET_ENV: &str = "JAMLIM_BUDGET";

#[derive(Debug, Parser)]
#[command(
    name = "jamlim",
    version,
    about = "Perfect simulation of jamming limits of lattice parking processes"
)]
pub struct Cli {
    /// Worker threads for replica farms (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// Emit CSV instead of JSON.
    #[arg(long, global = true)]
    pub csv: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the finite parking process on a window or box.
    Park(ParkArgs),
    /// Exact infinite-volume sample on a window.
    SampleWindow(SampleWindowArgs),
    /// Armour size and reach per replica.
    ArmourStats(ArmourStatsArgs),
    /// Occupation density estimates.
    Density(DensityArgs),
    /// Two-point correlations of the jamming limit.
    Correlation(CorrelationArgs),
    /// Exact series bounds on the 1D nearest-neighbour density.
    #[command(name = "bounds-1d")]
    Bounds1d(Bounds1dArgs),
    /// Armour tail bound.
    TailBound(TailBoundArgs),
    /// Limit vs finite-box probabilities of a local event.
    Discrepancy(DiscrepancyArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ModelArgs {
    /// Lattice dimension (taken from the file for file schemes).
    #[arg(long)]
    pub d: Option<usize>,

    /// Interaction radius (taken from the file for file schemes).
    #[arg(long)]
    pub nu: Option<u64>,

    /// nn-l1, nn-linf or file:PATH.
    #[arg(long, default_value = "nn-l1")]
    pub scheme: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SeedArgs {
    /// Base seed, decimal or 0x-hex.
    #[arg(long, default_value = "0")]
    pub seed: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BudgetArgs {
    /// Armour exploration budget in sites.
    #[arg(long)]
    pub budget: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ParkArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub seed: SeedArgs,
    /// null, ones or file:PATH.
    #[arg(long, default_value = "null")]
    pub bc: String,
    /// Target window `a..b,c..d`, one range per axis.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "n")]
    pub window: Option<String>,
    /// Park on the box of this radius instead of a window.
    #[arg(long)]
    pub n: Option<u64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SampleWindowArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub seed: SeedArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub budget: BudgetArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub window: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ArmourStatsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub seed: SeedArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub budget: BudgetArgs,
    #[arg(long, default_value_t = 10)]
    pub replicas: usize,
    /// Seed window (default: the origin).
    #[arg(long, allow_hyphen_values = true)]
    pub window: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DensityMethod {
    Box,
    Ergodic,
    Perfect,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DensityArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub seed: SeedArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub budget: BudgetArgs,
    #[arg(long, value_enum, default_value = "perfect")]
    pub method: DensityMethod,
    /// Box radii, comma separated (box and ergodic methods).
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<u64>,
    #[arg(long, default_value_t = 1000)]
    pub replicas: usize,
    /// Boundary for the box method: null, ones or file:PATH.
    #[arg(long, default_value = "null")]
    pub bc: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CorrelationArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub seed: SeedArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub budget: BudgetArgs,
    /// Sites, comma separated; coordinates within a site joined by ':'.
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
    #[arg(long, default_value_t = 10_000)]
    pub replicas: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Bounds1dArgs {
    #[arg(long, default_value_t = 2)]
    pub order: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TailBoundArgs {
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    #[arg(long, default_value_t = 1)]
    pub nu: u64,
    /// Orders, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<u64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DiscrepancyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub seed: SeedArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub budget: BudgetArgs,
    /// Radius of the event box.
    #[arg(long, default_value_t = 0)]
    pub m: u64,
    /// Finite box radii, comma separated; each must exceed m.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<u64>,
    /// origin, all or pattern:BITS (row-major over the event box).
    #[arg(long, default_value = "origin")]
    pub event: String,
    #[arg(long, default_value_t = 10_000)]
    pub replicas: usize,
}

pub fn parse_seed(text: &str) -> Result<u64, CliError> {
    let t = text.trim();
    let parsed = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => t.parse(),
    };
    parsed.map_err(|_| CliError::Usage(format!("bad seed {text:?}: expected decimal or 0x-hex")))
}

/// Resolved budget: flag, then the environment, then the default.
pub fn resolve_budget(flag: Option<usize>) -> Result<usize, CliError> {
    if let Some(b) = flag {
        return Ok(b);
    }
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("bad {BUDGET_ENV} value {v:?}"))),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

pub fn load_scheme(model: &ModelArgs) -> Result<ParkingScheme, CliError> {
    let scheme = match model.scheme.as_str() {
        "nn-l1" | "nn-linf" => {
            let norm = if model.scheme == "nn-l1" {
                Norm::L1
            } else {
                Norm::Linf
            };
            ParkingScheme::nn_exclusion(model.d.unwrap_or(1), model.nu.unwrap_or(1), norm)?
        }
        other => {
            let Some(path) = other.strip_prefix("file:") else {
                return Err(CliError::Usage(format!(
                    "unknown scheme {other:?}: expected nn-l1, nn-linf or file:<path>"
                )));
            };
            let text = read(path)?;
            ParkingScheme::from_json(&text)?
        }
    };
    if let Some(d) = model.d.filter(|&d| d != scheme.dim()) {
        return Err(jamlim_core::Error::DimensionMismatch {
            expected: scheme.dim(),
            found: d,
        }
        .into());
    }
    if let Some(nu) = model.nu.filter(|&nu| nu != scheme.nu()) {
        return Err(CliError::Usage(format!(
            "--nu {nu} disagrees with the scheme file (nu = {})",
            scheme.nu()
        )));
    }
    Ok(scheme)
}

/// On-disk boundary: explicit spins plus the value beyond them.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoundaryFile {
    d: usize,
    sites: Vec<Site>,
    spins: Vec<u8>,
    #[serde(default)]
    ambient: u8,
}

pub fn load_boundary(choice: &str, d: usize) -> Result<BoundaryCondition, CliError> {
    let bc = match choice {
        "null" => BoundaryCondition::Null,
        "ones" => BoundaryCondition::Ones,
        other => {
            let Some(path) = other.strip_prefix("file:") else {
                return Err(CliError::Usage(format!(
                    "unknown boundary {other:?}: expected null, ones or file:<path>"
                )));
            };
            let file: BoundaryFile = serde_json::from_str(&read(path)?)
                .map_err(|e| CliError::Usage(format!("malformed boundary file {path}: {e}")))?;
            if file.ambient > 1 {
                return Err(CliError::Usage("boundary ambient must be 0 or 1".into()));
            }
            let mut config = Configuration::new(file.d, file.sites, file.spins)?;
            config.ambient = file.ambient;
            BoundaryCondition::explicit(config)
        }
    };
    if let Some(cfg) = bc.configuration() {
        if cfg.d != d {
            return Err(jamlim_core::Error::DimensionMismatch {
                expected: d,
                found: cfg.d,
            }
            .into());
        }
    }
    Ok(bc)
}

fn read(path: &str) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {path}: {e}")))
}

/// `a..b,c..d` with one inclusive range per axis, expanded row-major.
pub fn parse_window(text: &str, d: usize) -> Result<Vec<Site>, CliError> {
    let bad = || {
        CliError::Usage(format!(
            "bad window {text:?}: expected a..b per axis, comma separated"
        ))
    };
    let mut ranges = Vec::new();
    for part in text.split(',') {
        let (a, b) = part.trim().split_once("..").ok_or_else(bad)?;
        let a: i64 = a.trim().parse().map_err(|_| bad())?;
        let b: i64 = b.trim().parse().map_err(|_| bad())?;
        if a > b {
            return Err(CliError::Usage(format!("empty range {a}..{b} in window")));
        }
        ranges.push((a, b));
    }
    if ranges.len() != d {
        return Err(jamlim_core::Error::DimensionMismatch {
            expected: d,
            found: ranges.len(),
        }
        .into());
    }
    let mut sites = vec![Vec::new()];
    for &(a, b) in &ranges {
        sites = sites
            .into_iter()
            .flat_map(|prefix| {
                (a..=b).map(move |c| {
                    let mut next = prefix.clone();
                    next.push(c);
                    next
                })
            })
            .collect();
    }
    Ok(sites.into_iter().map(Site::new).collect())
}

/// Comma-separated sites with `:`-joined coordinates, e.g. `2,4` or `1:0,2:2`.
pub fn parse_sites(text: &str, d: usize) -> Result<Vec<Site>, CliError> {
    text.split(',')
        .map(|part| {
            let coords: Vec<i64> = part
                .split(':')
                .map(|c| c.trim().parse())
                .collect::<Result<_, _>>()
                .map_err(|_| CliError::Usage(format!("bad site {part:?}")))?;
            if coords.len() != d {
                return Err(jamlim_core::Error::DimensionMismatch {
                    expected: d,
                    found: coords.len(),
                }
                .into());
            }
            Ok(Site::new(coords))
        })
        .collect()
}

pub fn parse_event(text: &str, m: u64, d: usize) -> Result<LocalEvent, CliError> {
    match text {
        "origin" => Ok(LocalEvent::OriginOccupied),
        "all" => Ok(LocalEvent::Always),
        other => {
            let bits = other.strip_prefix("pattern:").ok_or_else(|| {
                CliError::Usage(format!(
                    "unknown event {other:?}: expected origin, all or pattern:<bits>"
                ))
            })?;
            let cells = ((2 * m + 1) as usize).pow(d as u32);
            let spins: Vec<u8> = bits
                .bytes()
                .map(|b| match b {
                    b'0' => Ok(0),
                    b'1' => Ok(1),
                    _ => Err(CliError::Usage(format!(
                        "pattern {bits:?} must be 0/1 digits"
                    ))),
                })
                .collect::<Result<_, _>>()?;
            if spins.len() != cells {
                return Err(CliError::Usage(format!(
                    "pattern has {} cells, the event box has {cells}",
                    spins.len()
                )));
            }
            Ok(LocalEvent::Pattern(spins))
        }
    }
}

//! Monte Carlo and ergodic estimators over replica farms, plus the analytic
//! tail and correlation bounds they are compared against.
//!
//! Replica `r` uses the field with seed `seed0 + r` (wrapping). Every
//! per-replica observable is an integer count, so accumulation is exact and
//! results do not depend on execution order or on the rayon pool size.

use rayon::prelude::*;
use serde::Serialize;

use crate::armour::{perfect_site, perfect_window, perfect_window_with_armour};
use crate::error::{Error, Result};
use crate::field::{LatticeBox, Site, UniformField};
use crate::scheme::ParkingScheme;
use crate::simulate::{park_box, BoundaryCondition};

/// Seed of replica `r` in a farm started at `seed0`.
pub fn replica_seed(seed0: u64, r: usize) -> u64 {
    seed0.wrapping_add(r as u64)
}

/// Mean with standard error and a normal 95% interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub replicas: usize,
    pub ci95: (f64, f64),
}

impl Estimate {
    /// From per-replica integer counts, each divided by `denom`.
    pub fn from_counts(counts: &[u64], denom: u64) -> Result<Self> {
        let sum: u128 = counts.iter().map(|&c| u128::from(c)).sum();
        let sumsq: u128 = counts.iter().map(|&c| u128::from(c) * u128::from(c)).sum();
        Self::from_sums(counts.len(), sum, sumsq, denom)
    }

    fn from_sums(replicas: usize, sum: u128, sumsq: u128, denom: u64) -> Result<Self> {
        if replicas < 2 {
            return Err(Error::TooFewReplicas {
                needed: 2,
                found: replicas,
            });
        }
        let r = replicas as u128;
        let scale = denom as f64;
        let mean = sum as f64 / (r as f64 * scale);
        // R Σc² − (Σc)² is exact and nonnegative
        let spread = r * sumsq - sum * sum;
        let var = spread as f64 / (r as f64 * (r - 1) as f64) / (scale * scale);
        let std_error = (var / r as f64).sqrt();
        Ok(Estimate {
            mean,
            std_error,
            replicas,
            ci95: (mean - 1.96 * std_error, mean + 1.96 * std_error),
        })
    }

    /// Deterministic value carried in the same shape (zero error).
    pub fn exact(value: f64, replicas: usize) -> Self {
        Estimate {
            mean: value,
            std_error: 0.0,
            replicas,
            ci95: (value, value),
        }
    }
}

/// Run `job` on each replica seed in parallel, keeping replica order and
/// reporting the lowest-indexed failure.
fn farm<T, F>(seed0: u64, replicas: usize, job: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync,
{
    let out: Vec<Result<T>> = (0..replicas)
        .into_par_iter()
        .map(|r| job(replica_seed(seed0, r)))
        .collect();
    out.into_iter().collect()
}

fn need_replicas(replicas: usize) -> Result<()> {
    if replicas < 2 {
        return Err(Error::TooFewReplicas {
            needed: 2,
            found: replicas,
        });
    }
    Ok(())
}

/// `ρ_n` averaged over independent fields.
pub fn density_box(
    seed0: u64,
    n: u64,
    scheme: &ParkingScheme,
    bc: &BoundaryCondition,
    replicas: usize,
) -> Result<Estimate> {
    need_replicas(replicas)?;
    let d = scheme.dim();
    let counts = farm(seed0, replicas, |seed| {
        let f = UniformField::new(seed, d)?;
        Ok(park_box(&f, n, scheme, bc)?.occupied_count())
    })?;
    Estimate::from_counts(&counts, LatticeBox::centered(d, n).len() as u64)
}

/// Spatial average of the infinite-volume configuration over `Λ_n` for one
/// field: a single perfect sample of the whole box.
pub fn density_ergodic(seed: u64, n: u64, scheme: &ParkingScheme, budget: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "ergodic average needs n >= 1".into(),
        ));
    }
    let f = UniformField::new(seed, scheme.dim())?;
    let window = LatticeBox::centered(scheme.dim(), n).sites();
    let cfg = perfect_window(&f, &window, scheme, budget)?;
    Ok(cfg.occupied_count() as f64 / window.len() as f64)
}

/// Monte Carlo mean of the perfect spin at `x`.
pub fn density_perfect_at(
    seed0: u64,
    x: &Site,
    scheme: &ParkingScheme,
    replicas: usize,
    budget: usize,
) -> Result<Estimate> {
    need_replicas(replicas)?;
    let spins = farm(seed0, replicas, |seed| {
        let f = UniformField::new(seed, scheme.dim())?;
        Ok(u64::from(perfect_site(&f, x, scheme, budget)?))
    })?;
    Estimate::from_counts(&spins, 1)
}

/// Unbiased estimate of `ρ = E P(0)`.
pub fn density_perfect(
    seed0: u64,
    scheme: &ParkingScheme,
    replicas: usize,
    budget: usize,
) -> Result<Estimate> {
    density_perfect_at(seed0, &Site::origin(scheme.dim()), scheme, replicas, budget)
}

/// `base^n / (n + shift)!`, exact to a few ulps for moderate `n` and
/// computed in log space when the direct product would overflow.
fn power_over_factorial(base: f64, n: u64, shift: u64) -> f64 {
    let log_value = n as f64 * base.ln() - ln_factorial(n + shift);
    if n <= 10_000 {
        let mut acc = 1.0f64;
        for k in 1..=n {
            acc *= base / (k + shift) as f64;
            if !acc.is_finite() {
                return log_value.exp();
            }
        }
        return acc;
    }
    log_value.exp()
}

fn ln_factorial(n: u64) -> f64 {
    if n < 256 {
        return (2..=n).map(|k| (k as f64).ln()).sum();
    }
    // Stirling series, error below 1e-16 relative at this size
    let x = n as f64 + 1.0;
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * x)
        - 1.0 / (360.0 * x.powi(3))
        + 1.0 / (1260.0 * x.powi(5))
}

fn lattice_base(d: usize, nu: u64) -> f64 {
    ((2 * nu + 1) as f64).powi(d as i32)
}

/// `(2ν+1)^{dn} / (n+1)!`, the bound on `P(A({0}) ⊄ Λ_{nν})`.
pub fn tail_bound(n: u64, d: usize, nu: u64) -> f64 {
    power_over_factorial(lattice_base(d, nu), n, 1)
}

/// `(2ν+1)^{dn} / n!`.
pub fn loose_tail_bound(n: u64, d: usize, nu: u64) -> f64 {
    power_over_factorial(lattice_base(d, nu), n, 0)
}

/// Order `n = ⌊|x|/2ν⌋ − 2` of the correlation bound at distance `|x|`,
/// when it is defined.
pub fn correlation_order(x_sup: u64, nu: u64) -> Option<u64> {
    (x_sup / (2 * nu)).checked_sub(2)
}

/// `|Cov(P_0, P_x)| ≤ 2 (2ν+1)^{dn}/n!`, `None` where the bound is vacuous.
pub fn covariance_bound(x_sup: u64, d: usize, nu: u64) -> Option<f64> {
    correlation_order(x_sup, nu).map(|n| 2.0 * loose_tail_bound(n, d, nu))
}

/// The covariance bound divided by `σ_0²`.
pub fn correlation_bound(x_sup: u64, d: usize, nu: u64, sigma0_sq: f64) -> Option<f64> {
    covariance_bound(x_sup, d, nu).map(|c| c / sigma0_sq)
}

/// Bound on `P(A(Λ_m) ⊄ Λ_n)`: `(2m+1)^d (2ν+1)^{dk}/k!` with `k = ⌈(n−m)/ν⌉`.
pub fn local_tail_bound(m: u64, n: u64, d: usize, nu: u64) -> f64 {
    let k = (n.saturating_sub(m)).div_ceil(nu);
    ((2 * m + 1) as f64).powi(d as i32) * loose_tail_bound(k, d, nu)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub x: Site,
    pub replicas: usize,
    /// Marginal of `P(0)` from the joint draws.
    pub p0: Estimate,
    pub px: Estimate,
    pub cov_hat: f64,
    pub sigma0_sq_hat: f64,
    pub sigmax_sq_hat: f64,
    /// `None` when a variance vanishes.
    pub rho_hat: Option<f64>,
    /// Large-sample standard error `(1 − r²)/√(R − 1)`.
    pub rho_std_error: Option<f64>,
    /// Correlation bound with the estimated `σ_0²`; `None` when not applicable.
    pub bound: Option<f64>,
    pub degenerate: bool,
}

/// Joint perfect samples of `(P(0), P(x))`, one armour per replica.
pub fn correlation(
    seed0: u64,
    x: &Site,
    scheme: &ParkingScheme,
    replicas: usize,
    budget: usize,
) -> Result<CorrelationReport> {
    need_replicas(replicas)?;
    let d = scheme.dim();
    if x.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: x.dim(),
        });
    }
    if x.is_origin() {
        return Err(Error::InvalidArgument("correlation needs x != 0".into()));
    }
    let window = [Site::origin(d), x.clone()];
    let pairs = farm(seed0, replicas, |seed| {
        let f = UniformField::new(seed, d)?;
        let cfg = perfect_window(&f, &window, scheme, budget)?;
        Ok((u64::from(cfg.spins[0]), u64::from(cfg.spins[1])))
    })?;
    let (a, b): (Vec<u64>, Vec<u64>) = pairs.iter().copied().unzip();
    let s0: i128 = a.iter().map(|&v| v as i128).sum();
    let sx: i128 = b.iter().map(|&v| v as i128).sum();
    let s0x: i128 = pairs.iter().map(|&(u, v)| (u * v) as i128).sum();
    let r = replicas as i128;
    // spins are 0/1, so Σ P² = Σ P
    let num_cov = r * s0x - s0 * sx;
    let num_v0 = r * s0 - s0 * s0;
    let num_vx = r * sx - sx * sx;
    let norm = (r * (r - 1)) as f64;
    let sigma0_sq_hat = num_v0 as f64 / norm;
    let degenerate = num_v0 == 0 || num_vx == 0;
    let rho_hat =
        (!degenerate).then(|| num_cov as f64 / ((num_v0 as f64) * (num_vx as f64)).sqrt());
    let rho_std_error = rho_hat.map(|rho| (1.0 - rho * rho) / ((replicas - 1) as f64).sqrt());
    let bound = if degenerate {
        None
    } else {
        correlation_bound(x.sup_norm(), d, scheme.nu(), sigma0_sq_hat)
    };
    Ok(CorrelationReport {
        x: x.clone(),
        replicas,
        p0: Estimate::from_counts(&a, 1)?,
        px: Estimate::from_counts(&b, 1)?,
        cov_hat: num_cov as f64 / norm,
        sigma0_sq_hat,
        sigmax_sq_hat: num_vx as f64 / norm,
        rho_hat,
        rho_std_error,
        bound,
        degenerate,
    })
}

/// Cylinder events on `Λ_m`, evaluated on spins in row-major order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LocalEvent {
    Always,
    /// `P(0) = 1`.
    OriginOccupied,
    /// The restriction equals this exact pattern.
    Pattern(Vec<u8>),
}

impl LocalEvent {
    pub fn holds(&self, spins: &[u8]) -> bool {
        match self {
            LocalEvent::Always => true,
            LocalEvent::OriginOccupied => spins[spins.len() / 2] == 1,
            LocalEvent::Pattern(p) => p.as_slice() == spins,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscrepancyRow {
    pub n: u64,
    /// `μ̂(L)` from perfect windows.
    pub limit: Estimate,
    /// `μ̂_n(L)` from boxes of radius `n`.
    pub finite: Estimate,
    /// `|μ̂(L) − μ̂_n(L)|`.
    pub abs_diff: f64,
    /// `√(se_limit² + se_finite²)`.
    pub std_error: f64,
    /// Per-seed frequency of `1_L(P) ≠ 1_L(P_n)` under the shared field.
    pub disagreement: Estimate,
    /// Bound on the disagreement probability from the armour tail.
    pub bound: f64,
}

/// Discrepancy between limit and finite-box probabilities of a cylinder
/// event on `Λ_m`, for each box radius in `ns`.
pub fn local_discrepancy<L>(
    seed0: u64,
    event: &L,
    m: u64,
    ns: &[u64],
    scheme: &ParkingScheme,
    replicas: usize,
    budget: usize,
) -> Result<Vec<DiscrepancyRow>>
where
    L: Fn(&[u8]) -> bool + Sync,
{
    need_replicas(replicas)?;
    if ns.is_empty() || ns.iter().any(|&n| n <= m) {
        return Err(Error::InvalidArgument(format!(
            "box radii must all exceed m = {m}"
        )));
    }
    let d = scheme.dim();
    let inner = LatticeBox::centered(d, m);
    let window = inner.sites();
    let outcomes = farm(seed0, replicas, |seed| {
        let f = UniformField::new(seed, d)?;
        let (limit, _) = perfect_window_with_armour(&f, &window, scheme, budget)?;
        let in_limit = event(&limit.spins);
        let mut finite = Vec::with_capacity(ns.len());
        let mut buf = vec![0u8; window.len()];
        for &n in ns {
            let cfg = park_box(&f, n, scheme, &BoundaryCondition::Null)?;
            let frame = LatticeBox::centered(d, n);
            for (slot, s) in buf.iter_mut().zip(&window) {
                *slot = cfg.spins[frame.index_of(s.coords()).expect("inner box lies inside")];
            }
            finite.push(event(&buf));
        }
        Ok((in_limit, finite))
    })?;

    let limit_counts: Vec<u64> = outcomes.iter().map(|(l, _)| u64::from(*l)).collect();
    let limit = Estimate::from_counts(&limit_counts, 1)?;
    ns.iter()
        .enumerate()
        .map(|(k, &n)| {
            let finite_counts: Vec<u64> = outcomes.iter().map(|(_, f)| u64::from(f[k])).collect();
            let disagree: Vec<u64> = outcomes
                .iter()
                .map(|(l, f)| u64::from(*l != f[k]))
                .collect();
            let finite = Estimate::from_counts(&finite_counts, 1)?;
            Ok(DiscrepancyRow {
                n,
                limit,
                finite,
                abs_diff: (limit.mean - finite.mean).abs(),
                std_error: limit.std_error.hypot(finite.std_error),
                disagreement: Estimate::from_counts(&disagree, 1)?,
                bound: local_tail_bound(m, n, d, scheme.nu()),
            })
        })
        .collect()
}

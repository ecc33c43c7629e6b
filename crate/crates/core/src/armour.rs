//! Armours and the perfect sampler.
//!
//! The armour `A(X)` is the set of sites reachable from `X` by strictly
//! decreasing paths with steps of sup-norm at most `ν`. It is everything that
//! can influence the fate of `X`, so parking on `A(X)` alone gives exact
//! infinite-volume spins on `X`.
//!
//! Decreasing steps compare raw field values strictly; a tie ends a path.

use rustc_hash::FxHashSet;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{window_offsets, Coords, Site, UniformField};
use crate::scheme::ParkingScheme;
use crate::simulate::{park, BoundaryCondition, Configuration};

/// Default cap on armour size before exploration aborts.
pub const DEFAULT_BUDGET: usize = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Armour {
    pub seeds: Vec<Site>,
    /// Seeds first, then discovery order.
    pub sites: Vec<Site>,
    /// `max |a - x|_sup` over armour sites `a` and seeds `x`.
    pub max_radius_seen: u64,
    /// Field evaluations performed during exploration.
    pub explored: u64,
}

impl Armour {
    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// Sup-norm reach from the origin: the least `n` with `A ⊆ Λ_n`.
    pub fn reach(&self) -> u64 {
        self.sites.iter().map(Site::sup_norm).max().unwrap_or(0)
    }

    pub fn within_box(&self, n: u64) -> bool {
        self.reach() <= n
    }

    pub fn contains(&self, x: &Site) -> bool {
        self.sites.contains(x)
    }
}

/// Breadth-first closure of `seeds` under `y → z` with `|z - y|_sup ≤ ν`,
/// `z ≠ y` and `ω(z) < ω(y)`.
pub fn armour(field: &UniformField, seeds: &[Site], nu: u64, budget: usize) -> Result<Armour> {
    if seeds.is_empty() {
        return Err(Error::EmptySet);
    }
    if nu == 0 {
        return Err(Error::ZeroRadius);
    }
    for x in seeds {
        field.check_dim(x)?;
    }
    let d = field.dim();
    let steps: Vec<Site> = window_offsets(d, nu)
        .into_iter()
        .filter(|o| !o.is_origin())
        .collect();

    let mut visited: FxHashSet<Site> = FxHashSet::default();
    let mut sites: Vec<Site> = Vec::with_capacity(seeds.len());
    let mut values: Vec<f64> = Vec::with_capacity(seeds.len());
    for x in seeds {
        if visited.insert(x.clone()) {
            sites.push(x.clone());
            values.push(field.value_at(x.coords()));
        }
    }
    let mut explored = sites.len() as u64;
    if sites.len() > budget {
        return Err(Error::BudgetExceeded { budget, explored });
    }

    let mut head = 0;
    let mut scratch = Coords::new();
    while head < sites.len() {
        let vy = values[head];
        for step in &steps {
            scratch.clear();
            scratch.extend(
                sites[head]
                    .coords()
                    .iter()
                    .zip(step.coords())
                    .map(|(a, b)| a + b),
            );
            if visited.contains(scratch.as_slice()) {
                continue;
            }
            explored += 1;
            let vz = field.value_at(&scratch);
            if vz < vy {
                let z = Site::from_coords(scratch.clone());
                visited.insert(z.clone());
                sites.push(z);
                values.push(vz);
                if sites.len() > budget {
                    return Err(Error::BudgetExceeded { budget, explored });
                }
            }
        }
        head += 1;
    }

    let max_radius_seen = max_radius(&sites, seeds);
    Ok(Armour {
        seeds: seeds.to_vec(),
        sites,
        max_radius_seen,
        explored,
    })
}

/// `max_{a, x} |a - x|_sup`, via the bounding box of the seeds.
fn max_radius(sites: &[Site], seeds: &[Site]) -> u64 {
    let d = seeds[0].dim();
    let mut lo = vec![i64::MAX; d];
    let mut hi = vec![i64::MIN; d];
    for x in seeds {
        for (k, &c) in x.coords().iter().enumerate() {
            lo[k] = lo[k].min(c);
            hi[k] = hi[k].max(c);
        }
    }
    sites
        .iter()
        .filter_map(|a| {
            a.coords()
                .iter()
                .enumerate()
                .map(|(k, &c)| c.abs_diff(lo[k]).max(c.abs_diff(hi[k])))
                .max()
        })
        .max()
        .unwrap_or(0)
}

fn check_scheme(field: &UniformField, scheme: &ParkingScheme) -> Result<()> {
    if scheme.dim() != field.dim() {
        return Err(Error::DimensionMismatch {
            expected: field.dim(),
            found: scheme.dim(),
        });
    }
    Ok(())
}

/// Exact sample of the infinite-volume spin at `x`.
pub fn perfect_site(
    field: &UniformField,
    x: &Site,
    scheme: &ParkingScheme,
    budget: usize,
) -> Result<u8> {
    check_scheme(field, scheme)?;
    let arm = armour(field, std::slice::from_ref(x), scheme.nu(), budget)?;
    let cfg = park(field, &arm.sites, scheme, &BoundaryCondition::Null)?;
    // seeds come first in the armour listing
    Ok(cfg.spins[0])
}

/// Exact joint sample of the infinite-volume configuration on `window`,
/// from one parking run over `A(window)`. Also returns the armour.
pub fn perfect_window_with_armour(
    field: &UniformField,
    window: &[Site],
    scheme: &ParkingScheme,
    budget: usize,
) -> Result<(Configuration, Armour)> {
    check_scheme(field, scheme)?;
    let arm = armour(field, window, scheme.nu(), budget)?;
    let cfg = park(field, &arm.sites, scheme, &BoundaryCondition::Null)?;
    // `armour` lists deduplicated seeds first, so positions line up unless
    // the window had repeats
    let restricted = if arm.sites[..window.len().min(arm.len())] == *window {
        Configuration {
            d: cfg.d,
            sites: window.to_vec(),
            spins: cfg.spins[..window.len()].to_vec(),
            ambient: 0,
        }
    } else {
        cfg.restrict(window)?
    };
    Ok((restricted, arm))
}

pub fn perfect_window(
    field: &UniformField,
    window: &[Site],
    scheme: &ParkingScheme,
    budget: usize,
) -> Result<Configuration> {
    perfect_window_with_armour(field, window, scheme, budget).map(|(c, _)| c)
}

//! Finite parking processes: arrivals in increasing field order, each site
//! adsorbing iff its `ν`-window is admissible at arrival time.

use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{arrival_cmp, Coords, LatticeBox, Site, UniformField};
use crate::scheme::{ParkingScheme, Window};

/// Spins on a finite support. Sites outside the support read as `ambient`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Configuration {
    pub d: usize,
    pub sites: Vec<Site>,
    pub spins: Vec<u8>,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub ambient: u8,
}

fn is_zero(v: &u8) -> bool {
    *v == 0
}

impl Configuration {
    pub fn new(d: usize, sites: Vec<Site>, spins: Vec<u8>) -> Result<Self> {
        if sites.len() != spins.len() {
            return Err(Error::InvalidArgument(format!(
                "{} sites but {} spins",
                sites.len(),
                spins.len()
            )));
        }
        if let Some(s) = sites.iter().find(|s| s.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: s.dim(),
            });
        }
        if spins.iter().any(|&v| v > 1) {
            return Err(Error::InvalidArgument("spins must be 0 or 1".into()));
        }
        Ok(Configuration {
            d,
            sites,
            spins,
            ambient: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn occupied_count(&self) -> u64 {
        self.spins.iter().map(|&v| u64::from(v)).sum()
    }

    pub fn occupied(&self) -> Vec<Site> {
        self.iter()
            .filter(|(_, v)| *v == 1)
            .map(|(s, _)| s.clone())
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Site, u8)> {
        self.sites.iter().zip(self.spins.iter().copied())
    }

    pub fn to_map(&self) -> FxHashMap<Site, u8> {
        self.iter().map(|(s, v)| (s.clone(), v)).collect()
    }

    /// Spin at `x`, `ambient` outside the support.
    pub fn spin(&self, x: &Site) -> u8 {
        self.iter()
            .find(|(s, _)| *s == x)
            .map(|(_, v)| v)
            .unwrap_or(self.ambient)
    }

    /// Restriction to `sub`, which must lie inside the support.
    pub fn restrict(&self, sub: &[Site]) -> Result<Configuration> {
        let map = self.to_map();
        let spins = sub
            .iter()
            .map(|s| {
                map.get(s).copied().ok_or_else(|| {
                    Error::InvalidArgument(format!("site {s} is outside the configuration support"))
                })
            })
            .collect::<Result<Vec<u8>>>()?;
        Ok(Configuration {
            d: self.d,
            sites: sub.to_vec(),
            spins,
            ambient: self.ambient,
        })
    }
}

/// Spins assumed outside the target set.
#[derive(Clone, Debug, Default)]
pub enum BoundaryCondition {
    #[default]
    Null,
    Ones,
    Explicit(ExplicitBoundary),
}

#[derive(Clone, Debug)]
pub struct ExplicitBoundary {
    config: Configuration,
    index: FxHashMap<Site, u8>,
}

impl BoundaryCondition {
    /// Boundary given by a configuration; its `ambient` applies beyond its
    /// support.
    pub fn explicit(config: Configuration) -> Self {
        let index = config.to_map();
        BoundaryCondition::Explicit(ExplicitBoundary { config, index })
    }

    pub fn name(&self) -> &'static str {
        match self {
            BoundaryCondition::Null => "null",
            BoundaryCondition::Ones => "ones",
            BoundaryCondition::Explicit(_) => "explicit",
        }
    }

    pub fn is_null(&self) -> bool {
        matches!(self, BoundaryCondition::Null)
    }

    pub fn configuration(&self) -> Option<&Configuration> {
        match self {
            BoundaryCondition::Explicit(e) => Some(&e.config),
            _ => None,
        }
    }

    #[inline]
    fn spin_at(&self, coords: &[i64]) -> u8 {
        match self {
            BoundaryCondition::Null => 0,
            BoundaryCondition::Ones => 1,
            BoundaryCondition::Explicit(e) => {
                e.index.get(coords).copied().unwrap_or(e.config.ambient)
            }
        }
    }

    fn check_dim(&self, d: usize) -> Result<()> {
        match self {
            BoundaryCondition::Explicit(e) if e.config.d != d => Err(Error::DimensionMismatch {
                expected: d,
                found: e.config.d,
            }),
            _ => Ok(()),
        }
    }

    /// Boundary spins on the `ν`-collar of `target`: the sites outside
    /// `target` within sup-distance `ν` of it, in sorted order.
    pub fn collar(&self, target: &[Site], nu: u64) -> Configuration {
        let d = target.first().map_or(1, Site::dim);
        let inside: FxHashSet<&Site> = target.iter().collect();
        let offsets = LatticeBox::centered(d, nu).sites();
        let mut ring: Vec<Site> = target
            .iter()
            .flat_map(|x| offsets.iter().map(move |o| x.translate(o)))
            .filter(|y| !inside.contains(y))
            .collect::<FxHashSet<Site>>()
            .into_iter()
            .collect();
        ring.sort();
        let spins = ring.iter().map(|s| self.spin_at(s.coords())).collect();
        Configuration {
            d,
            sites: ring,
            spins,
            ambient: 0,
        }
    }
}

/// The arrival engine. `index` maps coordinates to a position in `sites`
/// when they belong to the target set.
fn run_arrivals<I>(
    field: &UniformField,
    sites: &[Site],
    index: I,
    scheme: &ParkingScheme,
    bc: &BoundaryCondition,
) -> Vec<u8>
where
    I: Fn(&[i64]) -> Option<usize>,
{
    let values: Vec<f64> = sites.iter().map(|s| field.value_at(s.coords())).collect();
    let mut order: Vec<usize> = (0..sites.len()).collect();
    order.sort_unstable_by(|&a, &b| arrival_cmp(values[a], &sites[a], values[b], &sites[b]));

    let offsets = scheme.offsets();
    let mut spins = vec![0u8; sites.len()];
    let mut scratch: Coords = Coords::new();
    for &i in &order {
        let x = sites[i].coords();
        let admitted = scheme.admits_by(|k| {
            scratch.clear();
            scratch.extend(x.iter().zip(offsets[k].coords()).map(|(a, b)| a + b));
            match index(&scratch) {
                Some(j) => spins[j],
                None => bc.spin_at(&scratch),
            }
        });
        if admitted {
            spins[i] = 1;
        }
    }
    spins
}

fn validate(field: &UniformField, target: &[Site], scheme: &ParkingScheme) -> Result<()> {
    if target.is_empty() {
        return Err(Error::EmptySet);
    }
    if scheme.dim() != field.dim() {
        return Err(Error::DimensionMismatch {
            expected: field.dim(),
            found: scheme.dim(),
        });
    }
    for x in target {
        field.check_dim(x)?;
    }
    Ok(())
}

/// Index over an arbitrary finite site set; rejects duplicates.
pub(crate) fn site_index(target: &[Site]) -> Result<FxHashMap<Site, usize>> {
    let mut index = FxHashMap::default();
    index.reserve(target.len());
    for (i, s) in target.iter().enumerate() {
        if index.insert(s.clone(), i).is_some() {
            return Err(Error::InvalidArgument(format!(
                "duplicate site {s} in target set"
            )));
        }
    }
    Ok(index)
}

/// Parking process on an arbitrary finite set `X`, with `bc` read outside
/// `X`. The result is the jamming limit restricted to `X`, in the order of
/// `target`.
pub fn park(
    field: &UniformField,
    target: &[Site],
    scheme: &ParkingScheme,
    bc: &BoundaryCondition,
) -> Result<Configuration> {
    validate(field, target, scheme)?;
    bc.check_dim(field.dim())?;
    let index = site_index(target)?;
    let spins = run_arrivals(field, target, |c| index.get(c).copied(), scheme, bc);
    Ok(Configuration {
        d: field.dim(),
        sites: target.to_vec(),
        spins,
        ambient: 0,
    })
}

/// Parking process on the box `Λ_n`. Sites are in row-major order.
pub fn park_box(
    field: &UniformField,
    n: u64,
    scheme: &ParkingScheme,
    bc: &BoundaryCondition,
) -> Result<Configuration> {
    let frame = LatticeBox::centered(field.dim(), n);
    let sites = frame.sites();
    validate(field, &sites, scheme)?;
    bc.check_dim(field.dim())?;
    let spins = run_arrivals(field, &sites, |c| frame.index_of(c), scheme, bc);
    Ok(Configuration {
        d: field.dim(),
        sites,
        spins,
        ambient: 0,
    })
}

/// The window around `x`: `config` on its support, `bc` elsewhere.
pub fn window_at(
    config: &Configuration,
    x: &Site,
    scheme: &ParkingScheme,
    bc: &BoundaryCondition,
) -> Result<Window> {
    let map = config.to_map();
    window_from_map(&map, x, scheme, bc)
}

fn window_from_map(
    map: &FxHashMap<Site, u8>,
    x: &Site,
    scheme: &ParkingScheme,
    bc: &BoundaryCondition,
) -> Result<Window> {
    let cells = scheme
        .offsets()
        .iter()
        .map(|o| {
            let y = x.translate(o);
            map.get(&y)
                .copied()
                .unwrap_or_else(|| bc.spin_at(y.coords()))
        })
        .collect();
    Window::new(scheme.dim(), scheme.nu(), cells)
}

/// True iff no vacant site of `config` would be admitted: the terminal
/// state of a decreasing scheme.
pub fn is_jammed(
    config: &Configuration,
    scheme: &ParkingScheme,
    bc: &BoundaryCondition,
) -> Result<bool> {
    let map = config.to_map();
    for (x, v) in config.iter() {
        if v == 0 && scheme.admits(&window_from_map(&map, x, scheme, bc)?)? {
            return Ok(false);
        }
    }
    Ok(true)
}

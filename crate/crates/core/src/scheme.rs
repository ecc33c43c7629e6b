//! Parking schemes: which local windows `Λ_ν^(d)` let an arriving particle
//! adsorb.
//!
//! Two representations share one type. An exclusion mask lists the offsets
//! that must be vacant; it covers every hard-core exclusion at any `d` and
//! `ν`. A truth table lists admissible windows explicitly and so covers
//! arbitrary (also non-decreasing) schemes, but only for windows of at most
//! 64 cells.
//!
//! Window cells are numbered row-major over `Λ_ν^(d)`: first axis slowest,
//! each axis running `-ν..=ν`. In one dimension with `ν = 1` the cells are
//! `(-1, 0, +1)`.

use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::field::{window_offsets, LatticeBox, Site};

/// Largest truth-table window (cells), bounded by the `u64` encoding.
pub const MAX_TABLE_CELLS: usize = 64;

/// Largest number of free (non-center) cells `is_decreasing` will enumerate.
pub const MAX_ENUMERATED_CELLS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    L1,
    Linf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeKind {
    Mask,
    Table,
}

#[derive(Clone, Debug)]
enum Rule {
    /// Indices into `offsets` that must be vacant.
    Mask(Vec<usize>),
    /// Admissible windows as bit patterns, bit `k` = cell `k`.
    Table(FxHashSet<u64>),
}

/// The admissibility set `S_ν^(d)`.
#[derive(Clone, Debug)]
pub struct ParkingScheme {
    dim: usize,
    nu: u64,
    offsets: Vec<Site>,
    center: usize,
    rule: Rule,
}

/// A spin window over `Λ_ν^(d)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Window {
    dim: usize,
    nu: u64,
    cells: Vec<u8>,
}

impl Window {
    pub fn new(dim: usize, nu: u64, cells: Vec<u8>) -> Result<Self> {
        let expected = window_len(dim, nu);
        if cells.len() != expected {
            return Err(Error::WindowShape {
                expected,
                found: cells.len(),
            });
        }
        if cells.iter().any(|&c| c > 1) {
            return Err(Error::InvalidArgument("window cells must be 0 or 1".into()));
        }
        Ok(Window { dim, nu, cells })
    }

    pub fn empty(dim: usize, nu: u64) -> Self {
        Window {
            dim,
            nu,
            cells: vec![0; window_len(dim, nu)],
        }
    }

    /// Window with exactly the listed offsets occupied.
    pub fn with_occupied(dim: usize, nu: u64, occupied: &[Site]) -> Result<Self> {
        let mut w = Self::empty(dim, nu);
        let frame = LatticeBox::centered(dim, nu);
        for s in occupied {
            let idx = frame
                .index_of(s.coords())
                .filter(|_| s.dim() == dim)
                .ok_or_else(|| {
                    Error::InvalidArgument(format!("offset {s} lies outside the window"))
                })?;
            w.cells[idx] = 1;
        }
        Ok(w)
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    fn bits(&self) -> u64 {
        self.cells
            .iter()
            .enumerate()
            .fold(0u64, |acc, (k, &c)| acc | (u64::from(c) << k))
    }
}

fn window_len(dim: usize, nu: u64) -> usize {
    ((2 * nu + 1) as usize).pow(dim as u32)
}

fn check_shape(dim: usize, nu: u64) -> Result<()> {
    if dim == 0 {
        return Err(Error::ZeroDimension);
    }
    if nu == 0 {
        return Err(Error::ZeroRadius);
    }
    Ok(())
}

impl ParkingScheme {
    fn build(dim: usize, nu: u64, rule: Rule) -> Self {
        let offsets = window_offsets(dim, nu);
        let center = offsets.len() / 2;
        ParkingScheme {
            dim,
            nu,
            offsets,
            center,
            rule,
        }
    }

    /// Exclusion mask from a list of offsets in `Λ_ν \ {0}`.
    pub fn from_mask(dim: usize, nu: u64, mask: &[Site]) -> Result<Self> {
        check_shape(dim, nu)?;
        let frame = LatticeBox::centered(dim, nu);
        let mut idx = Vec::with_capacity(mask.len());
        for m in mask {
            if m.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: m.dim(),
                });
            }
            if m.is_origin() {
                return Err(Error::InvalidScheme(
                    "mask may not contain the center".into(),
                ));
            }
            let k = frame.index_of(m.coords()).ok_or_else(|| {
                Error::InvalidScheme(format!("mask offset {m} lies outside radius {nu}"))
            })?;
            idx.push(k);
        }
        idx.sort_unstable();
        idx.dedup();
        Ok(Self::build(dim, nu, Rule::Mask(idx)))
    }

    /// Truth table from admissible windows. Center cells are forced to 0;
    /// the all-vacant window must be present.
    pub fn from_table(dim: usize, nu: u64, windows: &[Window]) -> Result<Self> {
        check_shape(dim, nu)?;
        let len = window_len(dim, nu);
        if len > MAX_TABLE_CELLS {
            return Err(Error::WindowTooLarge {
                cells: len,
                limit: MAX_TABLE_CELLS,
            });
        }
        let center = len / 2;
        let mut table = FxHashSet::default();
        for w in windows {
            if w.dim != dim || w.nu != nu {
                return Err(Error::WindowShape {
                    expected: len,
                    found: w.cells.len(),
                });
            }
            table.insert(w.bits() & !(1u64 << center));
        }
        if !table.contains(&0) {
            return Err(Error::InvalidScheme(
                "table must admit the all-vacant window".into(),
            ));
        }
        Ok(Self::build(dim, nu, Rule::Table(table)))
    }

    /// Hard-core exclusion of every offset within `‖m‖ ≤ ν` in the given norm.
    pub fn nn_exclusion(dim: usize, nu: u64, norm: Norm) -> Result<Self> {
        check_shape(dim, nu)?;
        let mask: Vec<Site> = window_offsets(dim, nu)
            .into_iter()
            .filter(|m| !m.is_origin())
            .filter(|m| match norm {
                Norm::Linf => true,
                Norm::L1 => m.coords().iter().map(|c| c.unsigned_abs()).sum::<u64>() <= nu,
            })
            .collect();
        Self::from_mask(dim, nu, &mask)
    }

    /// No constraint beyond a vacant center: every arrival adsorbs.
    pub fn unconstrained(dim: usize, nu: u64) -> Result<Self> {
        Self::from_mask(dim, nu, &[])
    }

    /// The maximal truth table (all center-vacant windows).
    pub fn full_table(dim: usize, nu: u64) -> Result<Self> {
        check_shape(dim, nu)?;
        let len = window_len(dim, nu);
        if len - 1 > MAX_ENUMERATED_CELLS {
            return Err(Error::WindowTooLarge {
                cells: len - 1,
                limit: MAX_ENUMERATED_CELLS,
            });
        }
        let center = len / 2;
        let table = (0u64..1 << len)
            .filter(|b| b & (1 << center) == 0)
            .collect();
        Ok(Self::build(dim, nu, Rule::Table(table)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nu(&self) -> u64 {
        self.nu
    }

    pub fn kind(&self) -> SchemeKind {
        match self.rule {
            Rule::Mask(_) => SchemeKind::Mask,
            Rule::Table(_) => SchemeKind::Table,
        }
    }

    /// Offsets of `Λ_ν^(d)` in cell order.
    pub fn offsets(&self) -> &[Site] {
        &self.offsets
    }

    /// Mask offsets, for mask schemes.
    pub fn mask(&self) -> Option<Vec<Site>> {
        match &self.rule {
            Rule::Mask(idx) => Some(idx.iter().map(|&k| self.offsets[k].clone()).collect()),
            Rule::Table(_) => None,
        }
    }

    pub fn admits(&self, w: &Window) -> Result<bool> {
        if w.dim != self.dim || w.nu != self.nu {
            return Err(Error::WindowShape {
                expected: self.offsets.len(),
                found: w.cells.len(),
            });
        }
        if w.cells[self.center] != 0 {
            return Err(Error::OccupiedCenter);
        }
        Ok(self.admits_by(|k| w.cells[k]))
    }

    /// Admissibility with cells read lazily; `spin(k)` is the spin of cell
    /// `k`. Mask schemes only read masked cells, and stop at the first
    /// occupied one.
    #[inline]
    pub(crate) fn admits_by(&self, mut spin: impl FnMut(usize) -> u8) -> bool {
        match &self.rule {
            Rule::Mask(idx) => idx.iter().all(|&k| spin(k) == 0),
            Rule::Table(table) => {
                let mut bits = 0u64;
                for k in 0..self.offsets.len() {
                    if k != self.center && spin(k) != 0 {
                        bits |= 1 << k;
                    }
                }
                table.contains(&bits)
            }
        }
    }

    /// Whether the admissible set is closed under removing particles.
    pub fn is_decreasing(&self) -> Result<bool> {
        let table = match &self.rule {
            Rule::Mask(_) => return Ok(true),
            Rule::Table(t) => t,
        };
        let free = self.offsets.len() - 1;
        if free > MAX_ENUMERATED_CELLS {
            return Err(Error::WindowTooLarge {
                cells: free,
                limit: MAX_ENUMERATED_CELLS,
            });
        }
        // closure under single removals implies closure under all η1 ≤ η2
        Ok(table.iter().all(|&bits| {
            (0..self.offsets.len())
                .filter(|k| bits & (1 << k) != 0)
                .all(|k| table.contains(&(bits & !(1 << k))))
        }))
    }

    pub fn to_file(&self) -> SchemeFile {
        match &self.rule {
            Rule::Mask(idx) => SchemeFile {
                d: self.dim,
                nu: self.nu,
                kind: SchemeKind::Mask,
                mask: Some(
                    idx.iter()
                        .map(|&k| self.offsets[k].coords().to_vec())
                        .collect(),
                ),
                table: None,
            },
            Rule::Table(t) => {
                let mut rows: Vec<String> = t
                    .iter()
                    .map(|bits| {
                        (0..self.offsets.len())
                            .map(|k| if bits & (1 << k) != 0 { '1' } else { '0' })
                            .collect()
                    })
                    .collect();
                rows.sort();
                SchemeFile {
                    d: self.dim,
                    nu: self.nu,
                    kind: SchemeKind::Table,
                    mask: None,
                    table: Some(rows),
                }
            }
        }
    }

    pub fn from_file(file: &SchemeFile) -> Result<Self> {
        match file.kind {
            SchemeKind::Mask => {
                let mask = file
                    .mask
                    .as_ref()
                    .ok_or_else(|| Error::InvalidScheme("mask scheme without \"mask\"".into()))?;
                let sites: Vec<Site> = mask.iter().map(|m| Site::new(m.iter().copied())).collect();
                Self::from_mask(file.d, file.nu, &sites)
            }
            SchemeKind::Table => {
                let rows = file
                    .table
                    .as_ref()
                    .ok_or_else(|| Error::InvalidScheme("table scheme without \"table\"".into()))?;
                check_shape(file.d, file.nu)?;
                let len = window_len(file.d, file.nu);
                let windows = rows
                    .iter()
                    .map(|row| {
                        let cells = row
                            .chars()
                            .map(|c| match c {
                                '0' => Ok(0),
                                '1' => Ok(1),
                                other => Err(Error::InvalidScheme(format!(
                                    "table rows are bitstrings, found {other:?}"
                                ))),
                            })
                            .collect::<Result<Vec<u8>>>()?;
                        if cells.len() != len {
                            return Err(Error::WindowShape {
                                expected: len,
                                found: cells.len(),
                            });
                        }
                        Window::new(file.d, file.nu, cells)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Self::from_table(file.d, file.nu, &windows)
            }
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: SchemeFile =
            serde_json::from_str(text).map_err(|e| Error::InvalidScheme(e.to_string()))?;
        Self::from_file(&file)
    }

    pub fn canonical_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("scheme file serializes")
    }

    /// SHA-256 of the canonical JSON, hex encoded.
    pub fn hash_hex(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }
}

/// On-disk scheme description.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeFile {
    pub d: usize,
    pub nu: u64,
    pub kind: SchemeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mask: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<String>>,
}

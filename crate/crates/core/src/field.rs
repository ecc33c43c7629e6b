//! Lattice addressing and the counter-based uniform field.
//!
//! A [`UniformField`] assigns every site of `Z^d` an i.i.d. uniform value in
//! `(0,1)` without storing anything: the value is a pure function of
//! `(seed, d, coords)`. This is what lets the armour exploration wander an
//! unbounded lattice.
//!
//! Mixing scheme (stable within a release):
//!
//! ```text
//! h0     = mix(seed + GOLDEN * d)
//! h(k+1) = mix(h(k) ^ mix(coord_k + GOLDEN * (k + 1)))
//! value  = ((h_d >> 12) + 0.5) / 2^52
//! ```
//!
//! where `mix` is the SplitMix64 finalizer. Values are odd multiples of
//! `2^-53`, all exactly representable, so never 0 or 1.

use std::borrow::Borrow;
use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

pub(crate) type Coords = SmallVec<[i64; 4]>;

/// A lattice site in `Z^d`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Site(Coords);

impl Site {
    pub fn new(coords: impl IntoIterator<Item = i64>) -> Self {
        Site(coords.into_iter().collect())
    }

    pub fn origin(d: usize) -> Self {
        Site(smallvec::smallvec![0; d])
    }

    /// The site `k * e_1`, i.e. `k` steps along the first axis.
    pub fn on_axis(d: usize, k: i64) -> Self {
        let mut s = Self::origin(d);
        s.0[0] = k;
        s
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_origin(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// `max_i |x_i - y_i|`. Exact for all `i64` coordinates.
    pub fn sup_dist(&self, other: &Site) -> u64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a.abs_diff(*b))
            .max()
            .unwrap_or(0)
    }

    /// Sup-norm distance to the origin.
    pub fn sup_norm(&self) -> u64 {
        self.0.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn translate(&self, delta: &Site) -> Site {
        debug_assert_eq!(self.dim(), delta.dim());
        Site(
            self.0
                .iter()
                .zip(delta.0.iter())
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub(crate) fn from_coords(coords: Coords) -> Self {
        Site(coords)
    }
}

impl Borrow<[i64]> for Site {
    fn borrow(&self) -> &[i64] {
        &self.0
    }
}

impl fmt::Debug for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// An axis-aligned box `B(center, radius)` in the sup-norm. With the origin
/// as center this is `Λ_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeBox {
    center: Site,
    radius: u64,
}

impl LatticeBox {
    pub fn new(center: Site, radius: u64) -> Self {
        LatticeBox { center, radius }
    }

    /// The box `Λ_n` centred at the origin of `Z^d`.
    pub fn centered(d: usize, radius: u64) -> Self {
        Self::new(Site::origin(d), radius)
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    pub fn radius(&self) -> u64 {
        self.radius
    }

    pub fn center(&self) -> &Site {
        &self.center
    }

    pub fn side(&self) -> u64 {
        2 * self.radius + 1
    }

    /// Number of sites, `(2n+1)^d`.
    pub fn len(&self) -> usize {
        (self.side() as usize).pow(self.dim() as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, x: &Site) -> bool {
        x.dim() == self.dim() && self.center.sup_dist(x) <= self.radius
    }

    /// Row-major position of `coords` (first axis slowest), if inside.
    pub fn index_of(&self, coords: &[i64]) -> Option<usize> {
        let side = self.side() as i64;
        let r = self.radius as i64;
        let mut idx = 0usize;
        for (c, o) in coords.iter().zip(self.center.coords()) {
            let rel = c - o + r;
            if rel < 0 || rel >= side {
                return None;
            }
            idx = idx * side as usize + rel as usize;
        }
        Some(idx)
    }

    /// All sites in row-major order, consistent with [`LatticeBox::index_of`].
    pub fn sites(&self) -> Vec<Site> {
        let d = self.dim();
        let side = self.side() as usize;
        let r = self.radius as i64;
        let mut out = Vec::with_capacity(self.len());
        let mut rel = vec![0usize; d];
        for _ in 0..self.len() {
            out.push(Site(
                rel.iter()
                    .zip(self.center.coords())
                    .map(|(&k, &o)| o + k as i64 - r)
                    .collect(),
            ));
            for axis in (0..d).rev() {
                rel[axis] += 1;
                if rel[axis] < side {
                    break;
                }
                rel[axis] = 0;
            }
        }
        out
    }
}

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Map a 64-bit word to `(0,1)`: top 52 bits, centred in their bucket.
#[inline]
pub(crate) fn word_to_unit(w: u64) -> f64 {
    ((w >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
}

/// The i.i.d. uniform field `ω` over `Z^d`, realised lazily.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct UniformField {
    seed: u64,
    dim: usize,
    base: u64,
}

impl UniformField {
    pub fn new(seed: u64, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        let base = mix64(seed.wrapping_add(GOLDEN.wrapping_mul(dim as u64)));
        Ok(UniformField { seed, dim, base })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn check_dim(&self, x: &Site) -> Result<()> {
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.dim(),
            });
        }
        Ok(())
    }

    /// `ω(x)`, strictly inside `(0,1)`.
    pub fn value(&self, x: &Site) -> Result<f64> {
        self.check_dim(x)?;
        Ok(self.value_at(x.coords()))
    }

    /// Unchecked variant for hot loops; caller guarantees the dimension.
    #[inline]
    pub(crate) fn value_at(&self, coords: &[i64]) -> f64 {
        let mut h = self.base;
        for (k, &c) in coords.iter().enumerate() {
            let salt = GOLDEN.wrapping_mul(k as u64 + 1);
            h = mix64(h ^ mix64((c as u64).wrapping_add(salt)));
        }
        word_to_unit(h)
    }

    /// Strict total order used to schedule arrivals: by value, ties broken
    /// by lexicographic coordinate order.
    pub fn less(&self, x: &Site, y: &Site) -> Result<bool> {
        self.check_dim(x)?;
        self.check_dim(y)?;
        if x == y {
            return Err(Error::SameSite);
        }
        let (vx, vy) = (self.value_at(x.coords()), self.value_at(y.coords()));
        Ok(arrival_cmp(vx, x, vy, y) == Ordering::Less)
    }
}

/// Arrival order between two already-evaluated sites.
#[inline]
pub(crate) fn arrival_cmp(vx: f64, x: &Site, vy: f64, y: &Site) -> Ordering {
    vx.total_cmp(&vy).then_with(|| x.cmp(y))
}

/// All offsets of `Λ_ν^(d)` in row-major order (first axis slowest).
pub(crate) fn window_offsets(d: usize, nu: u64) -> Vec<Site> {
    LatticeBox::centered(d, nu).sites()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_is_deterministic_and_in_open_unit_interval() {
        let f = UniformField::new(42, 2).unwrap();
        let x = Site::new([3, -7]);
        let a = f.value(&x).unwrap();
        assert_eq!(a.to_bits(), f.value(&x).unwrap().to_bits());
        assert!(a > 0.0 && a < 1.0);
        assert!(word_to_unit(0) > 0.0);
        assert!(word_to_unit(u64::MAX) < 1.0);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let f = UniformField::new(1, 2).unwrap();
        assert_eq!(
            f.value(&Site::new([1])),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 1
            })
        );
        assert!(UniformField::new(1, 0).is_err());
    }

    #[test]
    fn empirical_moments_over_a_million_sites() {
        let f = UniformField::new(2024, 3).unwrap();
        let n = 1_000_000i64;
        let (mut s, mut s2) = (0.0f64, 0.0f64);
        for k in 0..n {
            // spread the probes over a 3D block
            let v = f.value_at(&[k % 100, (k / 100) % 100, k / 10_000]);
            s += v;
            s2 += v * v;
        }
        let mean = s / n as f64;
        let var = s2 / n as f64 - mean * mean;
        assert!((0.4985..=0.5015).contains(&mean), "mean {mean}");
        // sd of the sample variance of U(0,1) is sqrt(1/180 /n) ~ 7.5e-5
        assert!((var - 1.0 / 12.0).abs() < 5.0 * 7.5e-5, "var {var}");
    }

    #[test]
    fn distinct_seeds_give_distinct_values() {
        let f1 = UniformField::new(7, 1).unwrap();
        let f2 = UniformField::new(8, 1).unwrap();
        let differ = (0..10_000)
            .filter(|&k| f1.value_at(&[k]) != f2.value_at(&[k]))
            .count();
        assert!(differ >= 9_900);
    }

    #[test]
    fn less_orders_by_value_then_lexicographically() {
        let f = UniformField::new(3, 1).unwrap();
        let (a, b) = (Site::new([0]), Site::new([1]));
        let (va, vb) = (f.value(&a).unwrap(), f.value(&b).unwrap());
        assert_eq!(f.less(&a, &b).unwrap(), va < vb);
        assert_eq!(f.less(&a, &a), Err(Error::SameSite));
        // tie-break on equal values
        assert_eq!(arrival_cmp(0.5, &a, 0.5, &b), Ordering::Less);
        assert_eq!(arrival_cmp(0.2, &b, 0.5, &a), Ordering::Less);
    }

    #[test]
    fn box_indexing_matches_site_listing() {
        let b = LatticeBox::new(Site::new([2, -1]), 2);
        let sites = b.sites();
        assert_eq!(sites.len(), 25);
        assert_eq!(b.len(), 25);
        for (i, s) in sites.iter().enumerate() {
            assert_eq!(b.index_of(s.coords()), Some(i));
            assert!(b.contains(s));
        }
        assert_eq!(b.index_of(&[5, -1]), None);
        assert_eq!(LatticeBox::centered(3, 0).sites(), vec![Site::origin(3)]);
    }

    #[test]
    fn sup_dist_handles_extreme_coordinates() {
        let a = Site::new([i64::from(i32::MIN), 0]);
        let b = Site::new([i64::from(i32::MAX), 5]);
        assert_eq!(a.sup_dist(&b), u32::MAX as u64);
    }
}

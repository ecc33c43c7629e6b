//! Exact series for one-dimensional nearest-neighbour exclusion.
//!
//! Let `l` and `r` be the distances from the origin to the nearest local
//! minimum of the field on each side. `p(i, j) = P(l = i, r = j)` has a
//! closed form, and the origin is occupied in the jamming limit exactly when
//! both distances are even:
//!
//! ```text
//! ρ = Σ_{i,j ≥ 0} p(2i, 2j)
//! ```
//!
//! Truncating the even-even sum gives lower bounds; subtracting truncated
//! sums over the remaining parity classes from 1 gives upper bounds.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Largest segment the exhaustive order enumerator accepts.
pub const MAX_SEGMENT: usize = 10;

fn factorial_f64(n: u64) -> f64 {
    (2..=n).fold(1.0, |acc, k| acc * k as f64)
}

fn factorial_big(n: u64) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `p(i, j)` in floating point.
pub fn p(i: u64, j: u64) -> f64 {
    let s = (i + j) as f64;
    let (fi, fj) = (factorial_f64(i), factorial_f64(j));
    let (fi1, fj1) = (fi * (i + 1) as f64, fj * (j + 1) as f64);
    let first = (i * j) as f64 / ((s + 3.0) * fi1 * fj1);
    let second = 2.0 / ((s + 3.0) * (s + 2.0) * (s + 1.0) * fi * fj);
    let third = (i as f64 / (fi1 * fj) + j as f64 / (fj1 * fi)) / ((s + 3.0) * (s + 2.0));
    first + second + third
}

/// `p(i, j)` as an exact rational.
pub fn p_exact(i: u64, j: u64) -> BigRational {
    let big = |v: u64| BigInt::from(v);
    let s = i + j;
    let (fi, fj) = (factorial_big(i), factorial_big(j));
    let (fi1, fj1) = (&fi * big(i + 1), &fj * big(j + 1));
    let first = BigRational::new(big(i * j), big(s + 3) * &fi1 * &fj1);
    let second = BigRational::new(big(2), big(s + 3) * big(s + 2) * big(s + 1) * &fi * &fj);
    let third = (BigRational::new(big(i), &fi1 * &fj) + BigRational::new(big(j), &fj1 * &fi))
        / BigRational::from_integer(big(s + 3) * big(s + 2));
    first + second + third
}

/// Truncated bounds on `ρ` at order `N`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeriesBounds {
    pub order: u64,
    /// `Σ_{0≤i,j≤N} p(2i, 2j)`.
    pub lower: f64,
    /// `1 − Σ` of the odd-parity classes, each truncated one parity step
    /// behind the even-even block.
    pub upper: f64,
    /// Mass of every `p(i, j)` used, i.e. `Σ_{0≤i,j≤2N} p(i, j)`.
    pub mass_accounted: f64,
}

fn block(rows: impl Fn(u64) -> u64, cols: impl Fn(u64) -> u64, ni: u64, nj: u64) -> f64 {
    let mut acc = 0.0;
    for a in 0..ni {
        for b in 0..nj {
            acc += p(rows(a), cols(b));
        }
    }
    acc
}

/// Lower and upper bounds on `ρ` from the truncated series.
///
/// The complementary classes are `(even, odd)` with `i ≤ N, j ≤ N−1`,
/// `(odd, even)` with `i ≤ N−1, j ≤ N` and `(odd, odd)` with `i, j ≤ N−1`;
/// at `N = 2` this is the classical index pattern, larger `N` extend it.
pub fn rho_bounds(order: u64) -> SeriesBounds {
    let even = |k: u64| 2 * k;
    let odd = |k: u64| 2 * k + 1;
    let n = order;
    let lower = block(even, even, n + 1, n + 1);
    let complement =
        block(even, odd, n + 1, n) + block(odd, even, n, n + 1) + block(odd, odd, n, n);
    SeriesBounds {
        order,
        lower,
        upper: 1.0 - complement,
        mass_accounted: lower + complement,
    }
}

/// `Σ_{0≤i,j≤N} p(i, j)`.
pub fn total_mass(order: u64) -> f64 {
    block(|k| k, |k| k, order + 1, order + 1)
}

/// Exact `Σ_{0≤i,j≤N} p(i, j)`.
pub fn total_mass_exact(order: u64) -> BigRational {
    let mut acc = BigRational::zero();
    for i in 0..=order {
        for j in 0..=order {
            acc += p_exact(i, j);
        }
    }
    acc
}

/// Expected jamming density of nearest-neighbour exclusion on a path of `k`
/// sites with vacant surroundings, averaged over all `k!` arrival orders.
pub fn brute_force_rho_segment_exact(k: usize) -> Result<Ratio<u64>> {
    if k == 0 {
        return Err(Error::EmptySet);
    }
    if k > MAX_SEGMENT {
        return Err(Error::InvalidArgument(format!(
            "segment length {k} exceeds the enumeration limit {MAX_SEGMENT}"
        )));
    }
    let mut order: Vec<usize> = (0..k).collect();
    let mut total = 0u64;
    let mut orders = 0u64;
    loop {
        let mut occupied = vec![false; k];
        for &s in &order {
            let left = s > 0 && occupied[s - 1];
            let right = s + 1 < k && occupied[s + 1];
            if !left && !right {
                occupied[s] = true;
            }
        }
        total += occupied.iter().filter(|&&o| o).count() as u64;
        orders += 1;
        if !next_permutation(&mut order) {
            break;
        }
    }
    Ok(Ratio::new(total, orders * k as u64))
}

pub fn brute_force_rho_segment(k: usize) -> Result<f64> {
    let r = brute_force_rho_segment_exact(k)?;
    Ok(*r.numer() as f64 / *r.denom() as f64)
}

/// `p(i, j)` by brute force: the fraction of the `(i+j+3)!` relative orders
/// of `ω_{-i-1}, …, ω_{j+1}` in which the field descends strictly for exactly
/// `i` steps to the left of the origin and `j` steps to the right.
pub fn p_by_enumeration(i: usize, j: usize) -> Result<Ratio<u64>> {
    let len = i + j + 3;
    if len > MAX_SEGMENT {
        return Err(Error::InvalidArgument(format!(
            "p({i}, {j}) needs {len} sites, the enumeration limit is {MAX_SEGMENT}"
        )));
    }
    // rank[k] is the relative value at site k - i - 1, so the origin is at i + 1
    let origin = i + 1;
    let mut rank: Vec<usize> = (0..len).collect();
    let (mut hits, mut orders) = (0u64, 0u64);
    loop {
        let left = (0..i).all(|k| rank[origin - k] > rank[origin - k - 1])
            && rank[origin - i - 1] > rank[origin - i];
        let right = (0..j).all(|k| rank[origin + k] > rank[origin + k + 1])
            && rank[origin + j + 1] > rank[origin + j];
        hits += u64::from(left && right);
        orders += 1;
        if !next_permutation(&mut rank) {
            break;
        }
    }
    Ok(Ratio::new(hits, orders))
}

/// Lexicographic successor; false after the last permutation.
fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = v.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = v
        .iter()
        .rposition(|&x| x > v[i])
        .expect("pivot has a successor");
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

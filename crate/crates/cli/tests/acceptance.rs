//! Acceptance suite. Runs every exit criterion at its fixed tolerance and
//! prints one PASS/FAIL line per criterion; exits nonzero if any fail.
//!
//! `cargo test -p jamlim --test acceptance [-- <filter>]`

use std::panic::{self, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use jamlim_core::exact1d::total_mass;
use jamlim_core::{
    armour, correlation, density_ergodic, density_perfect, local_discrepancy, p_by_enumeration,
    p_exact, park_box, perfect_site, perfect_window_with_armour, replica_seed, rho_bounds,
    tail_bound, BoundaryCondition, LatticeBox, LocalEvent, Norm, ParkingScheme, Site, UniformField,
    DEFAULT_BUDGET,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

/// Reference density of 1D nearest-neighbour exclusion, four decimals.
const RHO_1D: f64 = 0.4324;

struct Outcome {
    pass: bool,
    detail: String,
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Outcome,
}

fn nn(d: usize) -> ParkingScheme {
    ParkingScheme::nn_exclusion(d, 1, Norm::L1).unwrap()
}

fn round4(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

fn exact_bounds() -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_jamlim"))
        .args(["bounds-1d", "--order", "2"])
        .output()
        .expect("binary runs");
    if !out.status.success() {
        return Outcome {
            pass: false,
            detail: format!("exit {:?}", out.status.code()),
        };
    }
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let lower = round4(v["result"]["lower"].as_f64().unwrap());
    let upper = round4(v["result"]["upper"].as_f64().unwrap());
    Outcome {
        pass: lower == 0.4304 && upper == 0.4339,
        detail: format!("lower {lower:.4} (want 0.4304), upper {upper:.4} (want 0.4339)"),
    }
}

fn series_oracle() -> Outcome {
    let mut mismatches = Vec::new();
    let mut checked = 0;
    for s in 0..=4u64 {
        for i in 0..=s {
            let j = s - i;
            let counted = p_by_enumeration(i as usize, j as usize).unwrap();
            let counted = BigRational::new(
                BigInt::from(*counted.numer()),
                BigInt::from(*counted.denom()),
            );
            checked += 1;
            if p_exact(i, j) != counted {
                mismatches.push(format!("p({i},{j})"));
            }
        }
    }
    let mass = total_mass(20);
    Outcome {
        pass: mismatches.is_empty() && mass >= 1.0 - 1e-6,
        detail: format!(
            "{checked} terms, mismatches {mismatches:?}; 1 - total_mass(20) = {:.2e}",
            1.0 - mass
        ),
    }
}

fn density_reproduction() -> Outcome {
    let e = density_perfect(0, &nn(1), 100_000, DEFAULT_BUDGET).unwrap();
    let b = rho_bounds(8);
    let (lo, hi) = (b.lower - 3.0 * e.std_error, b.upper + 3.0 * e.std_error);
    Outcome {
        pass: (e.mean - RHO_1D).abs() <= 0.005 && lo <= e.mean && e.mean <= hi,
        detail: format!(
            "mean {:.5} +- {:.5}, series window [{lo:.5}, {hi:.5}]",
            e.mean, e.std_error
        ),
    }
}

fn ergodic_average() -> Outcome {
    let s = nn(1);
    let seeds = [1u64, 2, 3, 4, 5];
    let at = |n: u64| -> Vec<f64> {
        seeds
            .iter()
            .map(|&seed| density_ergodic(seed, n, &s, DEFAULT_BUDGET).unwrap())
            .collect()
    };
    let spread = |v: &[f64]| {
        v.iter().cloned().fold(f64::MIN, f64::max) - v.iter().cloned().fold(f64::MAX, f64::min)
    };
    let mid = at(10_000);
    let (small, large) = (at(1_000), at(100_000));
    let worst = mid.iter().map(|v| (v - RHO_1D).abs()).fold(0.0, f64::max);
    Outcome {
        pass: worst <= 0.01 && spread(&large) < spread(&small),
        detail: format!(
            "max |avg - {RHO_1D}| at 1e4 = {worst:.5}; spread 1e3 {:.5}, 1e5 {:.5}",
            spread(&small),
            spread(&large)
        ),
    }
}

fn coupling_exactness() -> Outcome {
    let mut parts = Vec::new();
    let mut violations = 0usize;
    for (d, seeds) in [(1usize, 1000u64), (2, 200)] {
        let s = nn(d);
        let origin = Site::origin(d);
        let (checks, bad): (usize, usize) = (0..seeds)
            .into_par_iter()
            .map(|seed| {
                let f = UniformField::new(seed, d).unwrap();
                let reach = armour(&f, std::slice::from_ref(&origin), 1, DEFAULT_BUDGET)
                    .unwrap()
                    .reach();
                let exact = perfect_site(&f, &origin, &s, DEFAULT_BUDGET).unwrap();
                let mut radii: Vec<u64> = (0..=8).collect();
                radii.push(reach);
                radii.push(reach + 3);
                let mut out = (0, 0);
                for n in radii.into_iter().filter(|&n| n >= reach) {
                    let boxed = park_box(&f, n, &s, &BoundaryCondition::Null).unwrap();
                    let centre = LatticeBox::centered(d, n)
                        .index_of(origin.coords())
                        .unwrap();
                    out.0 += 1;
                    out.1 += usize::from(boxed.spins[centre] != exact);
                }
                out
            })
            .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
        violations += bad;
        parts.push(format!(
            "d={d}: {seeds} seeds, {checks} boxes, {bad} violations"
        ));
    }
    Outcome {
        pass: violations == 0,
        detail: parts.join("; "),
    }
}

fn boundary_invariance() -> Outcome {
    let mut parts = Vec::new();
    let mut violations = 0usize;
    for d in [1usize, 2] {
        let s = nn(d);
        let window = LatticeBox::centered(d, 1).sites();
        let bad: usize = (0..200u64)
            .into_par_iter()
            .map(|seed| {
                let f = UniformField::new(seed, d).unwrap();
                let (exact, arm) =
                    perfect_window_with_armour(&f, &window, &s, DEFAULT_BUDGET).unwrap();
                [arm.reach(), arm.reach() + 2]
                    .into_iter()
                    .filter(|&n| {
                        let boxed = park_box(&f, n + s.nu(), &s, &BoundaryCondition::Ones).unwrap();
                        boxed.restrict(&window).unwrap() != exact
                    })
                    .count()
            })
            .sum();
        violations += bad;
        parts.push(format!("d={d}: 200 seeds, {bad} violations"));
    }
    Outcome {
        pass: violations == 0,
        detail: parts.join("; "),
    }
}

fn tail_frequency() -> Outcome {
    const SEEDS: usize = 100_000;
    let origin = [Site::origin(1)];
    let reaches: Vec<u64> = (0..SEEDS)
        .into_par_iter()
        .map(|r| {
            let f = UniformField::new(replica_seed(0, r), 1).unwrap();
            armour(&f, &origin, 1, DEFAULT_BUDGET).unwrap().reach()
        })
        .collect();
    let mut pass = true;
    let mut parts = Vec::new();
    for n in 1..=4u64 {
        let freq = reaches.iter().filter(|&&r| r > n).count() as f64 / SEEDS as f64;
        let se = (freq * (1.0 - freq) / SEEDS as f64).sqrt();
        let bound = tail_bound(n, 1, 1);
        pass &= freq <= bound + 3.0 * se;
        parts.push(format!("n={n}: {freq:.5} vs {bound:.5}"));
    }
    Outcome {
        pass,
        detail: parts.join(", "),
    }
}

fn correlation_decay() -> Outcome {
    let s = nn(1);
    let reports: Vec<_> = [2i64, 8, 10, 12]
        .iter()
        .map(|&x| correlation(0, &Site::new([x]), &s, 100_000, DEFAULT_BUDGET).unwrap())
        .collect();
    let mut pass = true;
    let mut parts = Vec::new();
    for r in &reports[1..] {
        let (rho, se) = (r.rho_hat.unwrap(), r.rho_std_error.unwrap());
        let bound = r.bound.unwrap();
        pass &= rho.abs() - 3.0 * se <= bound;
        parts.push(format!("x={}: |rho| {:.4} <= {bound:.3}", r.x, rho.abs()));
    }
    let (near, far) = (&reports[0], &reports[3]);
    let gap = near.rho_hat.unwrap().abs() - far.rho_hat.unwrap().abs();
    let sigma = near
        .rho_std_error
        .unwrap()
        .hypot(far.rho_std_error.unwrap());
    pass &= gap > 3.0 * sigma;
    parts.push(format!(
        "|rho(2)| - |rho(12)| = {gap:.4} ({:.1} sigma)",
        gap / sigma
    ));
    Outcome {
        pass,
        detail: parts.join(", "),
    }
}

fn local_discrepancy_check() -> Outcome {
    let s = nn(1);
    let n = 6u64;
    let rows = local_discrepancy(
        0,
        &|spins: &[u8]| LocalEvent::OriginOccupied.holds(spins),
        0,
        &[n],
        &s,
        100_000,
        DEFAULT_BUDGET,
    )
    .unwrap();
    let r = &rows[0];
    let bound = tail_bound(n.div_ceil(s.nu()), 1, s.nu());
    let dis = &r.disagreement;
    let dis_se = dis
        .std_error
        .max((bound * (1.0 - bound) / dis.replicas as f64).sqrt());
    Outcome {
        pass: r.abs_diff < 3.0 * r.std_error && dis.mean <= bound + 3.0 * dis_se,
        detail: format!(
            "|diff| {:.5} vs 3 sigma {:.5}; disagreement {:.5} vs tail bound {bound:.5}",
            r.abs_diff,
            3.0 * r.std_error,
            dis.mean
        ),
    }
}

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            id: 1,
            name: "exact 1D bounds",
            limit: Some(Duration::from_secs(1)),
            run: exact_bounds,
        },
        Criterion {
            id: 2,
            name: "series oracle",
            limit: Some(Duration::from_secs(10)),
            run: series_oracle,
        },
        Criterion {
            id: 3,
            name: "density reproduction",
            limit: Some(Duration::from_secs(60)),
            run: density_reproduction,
        },
        Criterion {
            id: 4,
            name: "ergodic average",
            limit: Some(Duration::from_secs(120)),
            run: ergodic_average,
        },
        Criterion {
            id: 5,
            name: "coupling exactness",
            limit: None,
            run: coupling_exactness,
        },
        Criterion {
            id: 6,
            name: "boundary invariance",
            limit: None,
            run: boundary_invariance,
        },
        Criterion {
            id: 7,
            name: "armour tail bound",
            limit: Some(Duration::from_secs(60)),
            run: tail_frequency,
        },
        Criterion {
            id: 8,
            name: "correlation decay",
            limit: Some(Duration::from_secs(120)),
            run: correlation_decay,
        },
        Criterion {
            id: 9,
            name: "local discrepancy",
            limit: None,
            run: local_discrepancy_check,
        },
    ];
    let filters: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    let mut ran = 0;
    for c in &criteria {
        if !filters.is_empty() && !filters.iter().any(|f| c.name.contains(f.as_str())) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(c.run));
        let elapsed = start.elapsed();
        let mut outcome = result.unwrap_or_else(|_| Outcome {
            pass: false,
            detail: "panicked".into(),
        });
        if let Some(limit) = c.limit.filter(|&l| elapsed > l) {
            outcome.pass = false;
            outcome
                .detail
                .push_str(&format!("; over the {}s limit", limit.as_secs()));
        }
        let tag = if outcome.pass { "PASS" } else { "FAIL" };
        println!(
            "{tag} [{}] {}: {} ({:.2}s)",
            c.id,
            c.name,
            outcome.detail,
            elapsed.as_secs_f64()
        );
        failed += usize::from(!outcome.pass);
    }
    println!("acceptance: {} passed, {failed} failed", ran - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

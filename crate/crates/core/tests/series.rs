use jamlim_core::exact1d::brute_force_rho_segment;
use jamlim_core::{p_by_enumeration, p_exact, rho_bounds, total_mass};
use num_bigint::BigInt;
use num_rational::BigRational;

fn to_big(r: num_rational::Ratio<u64>) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

#[test]
fn closed_form_matches_linear_extension_counts() {
    for s in 0..=4u64 {
        for i in 0..=s {
            let j = s - i;
            let counted = to_big(p_by_enumeration(i as usize, j as usize).unwrap());
            assert_eq!(p_exact(i, j), counted, "p({i},{j})");
        }
    }
}

#[test]
fn even_even_series_converges_to_the_closed_form_density() {
    let rho = (1.0 - (-2.0f64).exp()) / 2.0;
    let b = rho_bounds(12);
    assert!((b.lower - rho).abs() < 1e-14);
    assert!((b.upper - rho).abs() < 1e-12);
    assert!(1.0 - total_mass(20) < 1e-6);
}

#[test]
fn segments_approach_the_infinite_line_density() {
    // interior sites dominate as the segment grows; end effects push the
    // finite average above rho and decay like 1/k
    let rho = rho_bounds(8).lower;
    let mut prev_gap = f64::INFINITY;
    for k in [4usize, 6, 8, 10] {
        let gap = brute_force_rho_segment(k).unwrap() - rho;
        assert!(gap > 0.0 && gap < prev_gap, "k = {k}");
        prev_gap = gap;
    }
}

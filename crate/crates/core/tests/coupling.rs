//! Exact per-seed identities between finite parking and the perfect sampler.

use jamlim_core::{
    armour, park, park_box, perfect_site, perfect_window, perfect_window_with_armour,
    BoundaryCondition, LatticeBox, Norm, ParkingScheme, Site, UniformField, Window,
};

const BUDGET: usize = 1_000_000;

fn schemes() -> Vec<ParkingScheme> {
    // a non-exclusion rule: admit unless two or more neighbours are occupied
    let lenient: Vec<Window> = (0u8..4)
        .flat_map(|l| {
            (0u8..4).filter_map(move |r| {
                let cells = vec![l >> 1, l & 1, 0, r >> 1, r & 1];
                let occupied = cells.iter().filter(|&&c| c == 1).count();
                (occupied < 2).then_some(cells)
            })
        })
        .map(|cells| Window::new(1, 2, cells).unwrap())
        .collect();
    vec![
        ParkingScheme::nn_exclusion(1, 1, Norm::L1).unwrap(),
        ParkingScheme::nn_exclusion(1, 2, Norm::L1).unwrap(),
        ParkingScheme::nn_exclusion(2, 1, Norm::L1).unwrap(),
        ParkingScheme::nn_exclusion(2, 1, Norm::Linf).unwrap(),
        ParkingScheme::from_table(1, 2, &lenient).unwrap(),
    ]
}

fn central_window(d: usize, m: u64) -> Vec<Site> {
    LatticeBox::centered(d, m).sites()
}

#[test]
fn armour_stability_under_parking_on_any_box_containing_it() {
    for scheme in schemes() {
        let d = scheme.dim();
        for seed in 0..300 {
            let f = UniformField::new(seed, d).unwrap();
            let arm = armour(&f, &[Site::origin(d)], scheme.nu(), BUDGET).unwrap();
            let on_armour = park(&f, &arm.sites, &scheme, &BoundaryCondition::Null).unwrap();
            for n in [arm.reach(), arm.reach() + 2] {
                let boxed = park_box(&f, n, &scheme, &BoundaryCondition::Null).unwrap();
                assert_eq!(
                    boxed.restrict(&arm.sites).unwrap(),
                    on_armour,
                    "seed {seed}"
                );
            }
        }
    }
}

#[test]
fn box_limit_is_reached_at_the_armour_radius() {
    for scheme in schemes() {
        let d = scheme.dim();
        let window = central_window(d, 1);
        for seed in 0..200 {
            let f = UniformField::new(seed, d).unwrap();
            let (exact, arm) = perfect_window_with_armour(&f, &window, &scheme, BUDGET).unwrap();
            let n0 = arm.reach();
            for n in n0..n0 + 3 {
                let boxed = park_box(&f, n, &scheme, &BoundaryCondition::Null).unwrap();
                assert_eq!(
                    boxed.restrict(&window).unwrap(),
                    exact,
                    "seed {seed}, n {n}"
                );
            }
        }
    }
}

#[test]
fn ones_boundary_does_not_change_the_limit() {
    for scheme in schemes() {
        let d = scheme.dim();
        let nu = scheme.nu();
        let window = central_window(d, 1);
        for seed in 0..200 {
            let f = UniformField::new(seed, d).unwrap();
            let (exact, arm) = perfect_window_with_armour(&f, &window, &scheme, BUDGET).unwrap();
            let n = arm.reach();
            let boxed = park_box(&f, n + nu, &scheme, &BoundaryCondition::Ones).unwrap();
            assert_eq!(boxed.restrict(&window).unwrap(), exact, "seed {seed}");
        }
    }
}

#[test]
fn ones_boundary_matters_without_the_collar() {
    // sanity: the collar is needed, the boundary does bite at the box edge
    let scheme = ParkingScheme::nn_exclusion(1, 1, Norm::L1).unwrap();
    let differs = (0..200).any(|seed| {
        let f = UniformField::new(seed, 1).unwrap();
        let a = park_box(&f, 3, &scheme, &BoundaryCondition::Null).unwrap();
        let b = park_box(&f, 3, &scheme, &BoundaryCondition::Ones).unwrap();
        a != b
    });
    assert!(differs);
}

#[test]
fn window_sampler_agrees_with_site_sampler() {
    for scheme in schemes() {
        let d = scheme.dim();
        let window = central_window(d, 1);
        for seed in 0..100 {
            let f = UniformField::new(seed, d).unwrap();
            let joint = perfect_window(&f, &window, &scheme, BUDGET).unwrap();
            for (x, v) in joint.iter() {
                assert_eq!(v, perfect_site(&f, x, &scheme, BUDGET).unwrap());
            }
        }
    }
}

#[test]
fn limit_configuration_is_admissible_and_locally_jammed() {
    // inside the window, every occupied site has no occupied excluded neighbour
    let scheme = ParkingScheme::nn_exclusion(2, 1, Norm::Linf).unwrap();
    let window = central_window(2, 3);
    for seed in 0..50 {
        let f = UniformField::new(seed, 2).unwrap();
        let cfg = perfect_window(&f, &window, &scheme, BUDGET).unwrap();
        let occ = cfg.occupied();
        for (k, a) in occ.iter().enumerate() {
            for b in &occ[k + 1..] {
                assert!(a.sup_dist(b) > 1, "seed {seed}: {a} and {b}");
            }
        }
    }
}

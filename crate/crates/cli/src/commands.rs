use jamlim_core::exact1d::total_mass;
use jamlim_core::simulate::is_jammed;
use jamlim_core::{
    armour, correlation, density_box, density_ergodic, density_perfect, local_discrepancy, park,
    park_box, perfect_window_with_armour, replica_seed, rho_bounds, tail_bound, Configuration,
    Estimate, ParkingScheme, Site, UniformField,
};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{
    load_boundary, load_scheme, parse_event, parse_seed, parse_sites, parse_window, resolve_budget,
    ArmourStatsArgs, Bounds1dArgs, Command, CorrelationArgs, DensityArgs, DensityMethod,
    DiscrepancyArgs, ParkArgs, SampleWindowArgs, SeedArgs, TailBoundArgs,
};
use crate::report::{Output, RunManifest, SweepRow, Table};
use crate::CliError;

/// Label the upper bound carries: our extension of the N = 2 index pattern.
const UPPER_PATTERN: &str =
    "1 - [sum p(2i,2j+1), i<=N, j<=N-1] - [sum p(2i+1,2j), i<=N-1, j<=N] - [sum p(2i+1,2j+1), i,j<=N-1]";

pub fn run(cmd: &Command) -> Result<Output, CliError> {
    match cmd {
        Command::Park(a) => run_park(a),
        Command::SampleWindow(a) => run_sample_window(a),
        Command::ArmourStats(a) => run_armour_stats(a),
        Command::Density(a) => run_density(a),
        Command::Correlation(a) => run_correlation(a),
        Command::Bounds1d(a) => run_bounds_1d(a),
        Command::TailBound(a) => run_tail_bound(a),
        Command::Discrepancy(a) => run_discrepancy(a),
    }
}

struct Ctx {
    manifest: RunManifest,
    seed0: u64,
}

fn context(
    name: &str,
    args: &impl Serialize,
    seed: &SeedArgs,
    scheme: Option<&ParkingScheme>,
    budget: Option<usize>,
) -> Result<Ctx, CliError> {
    let seed0 = parse_seed(&seed.seed)?;
    let mut params = serde_json::to_value(args).map_err(|e| CliError::Io(e.to_string()))?;
    if let (Some(b), Value::Object(map)) = (budget, &mut params) {
        map.insert("budget".into(), json!(b));
    }
    let mut manifest = RunManifest::new(name, params);
    manifest.seed0 = Some(seed0);
    manifest.seed = Some(seed.seed.clone());
    manifest.scheme_hash = scheme.map(ParkingScheme::hash_hex);
    Ok(Ctx { manifest, seed0 })
}

fn site_label(x: &Site) -> String {
    let parts: Vec<String> = x.coords().iter().map(i64::to_string).collect();
    parts.join(":")
}

fn site_table(cfg: &Configuration) -> Table {
    let rows = cfg
        .iter()
        .map(|(s, v)| vec![site_label(s), v.to_string()])
        .collect();
    Table::Custom(vec!["site".into(), "spin".into()], rows)
}

fn estimate_row(label: String, e: &Estimate, bound: Option<f64>, seed0: u64) -> SweepRow {
    SweepRow {
        n_or_x: label,
        mean: Some(e.mean),
        std_error: Some(e.std_error),
        ci_low: Some(e.ci95.0),
        ci_high: Some(e.ci95.1),
        bound,
        replicas: Some(e.replicas),
        seed0: Some(seed0),
    }
}

fn plain(manifest: RunManifest, result: Value, table: Table) -> Output {
    Output {
        manifest,
        result,
        table,
        note: None,
        degenerate: false,
    }
}

fn run_park(a: &ParkArgs) -> Result<Output, CliError> {
    let scheme = load_scheme(&a.model)?;
    let d = scheme.dim();
    let bc = load_boundary(&a.bc, d)?;
    let ctx = context("park", a, &a.seed, Some(&scheme), None)?;
    let field = UniformField::new(ctx.seed0, d)?;
    let cfg = match (&a.window, a.n) {
        (Some(w), None) => park(&field, &parse_window(w, d)?, &scheme, &bc)?,
        (None, Some(n)) => park_box(&field, n, &scheme, &bc)?,
        _ => {
            return Err(CliError::Usage(
                "park needs exactly one of --window or --n".into(),
            ))
        }
    };
    let result = json!({
        "bc": bc.name(),
        "sites": cfg.len(),
        "occupied_count": cfg.occupied_count(),
        "density": cfg.occupied_count() as f64 / cfg.len() as f64,
        "jammed": is_jammed(&cfg, &scheme, &bc)?,
        "occupied": cfg.occupied(),
    });
    Ok(plain(ctx.manifest, result, site_table(&cfg)))
}

fn run_sample_window(a: &SampleWindowArgs) -> Result<Output, CliError> {
    let scheme = load_scheme(&a.model)?;
    let budget = resolve_budget(a.budget.budget)?;
    let ctx = context("sample-window", a, &a.seed, Some(&scheme), Some(budget))?;
    let window = parse_window(&a.window, scheme.dim())?;
    let field = UniformField::new(ctx.seed0, scheme.dim())?;
    let (cfg, arm) = perfect_window_with_armour(&field, &window, &scheme, budget)?;
    let result = json!({
        "window": cfg.sites,
        "spins": cfg.spins,
        "occupied_count": cfg.occupied_count(),
        "armour_size": arm.len(),
        "max_radius_seen": arm.max_radius_seen,
        "reach": arm.reach(),
        "explored": arm.explored,
    });
    Ok(plain(ctx.manifest, result, site_table(&cfg)))
}

#[derive(Serialize)]
struct ArmourRow {
    seed: u64,
    size: usize,
    max_radius_seen: u64,
    explored: u64,
}

fn run_armour_stats(a: &ArmourStatsArgs) -> Result<Output, CliError> {
    let scheme = load_scheme(&a.model)?;
    let budget = resolve_budget(a.budget.budget)?;
    let ctx = context("armour-stats", a, &a.seed, Some(&scheme), Some(budget))?;
    let d = scheme.dim();
    let seeds = match &a.window {
        Some(w) => parse_window(w, d)?,
        None => vec![Site::origin(d)],
    };
    let rows: Vec<ArmourRow> = (0..a.replicas)
        .into_par_iter()
        .map(|r| {
            let seed = replica_seed(ctx.seed0, r);
            let arm = armour(&UniformField::new(seed, d)?, &seeds, scheme.nu(), budget)?;
            Ok(ArmourRow {
                seed,
                size: arm.len(),
                max_radius_seen: arm.max_radius_seen,
                explored: arm.explored,
            })
        })
        .collect::<jamlim_core::Result<_>>()?;
    let header = ["seed", "size", "max_radius_seen", "explored"]
        .map(String::from)
        .to_vec();
    let table = rows
        .iter()
        .map(|r| {
            vec![
                r.seed.to_string(),
                r.size.to_string(),
                r.max_radius_seen.to_string(),
                r.explored.to_string(),
            ]
        })
        .collect();
    Ok(plain(
        ctx.manifest,
        json!(rows),
        Table::Custom(header, table),
    ))
}

fn run_density(a: &DensityArgs) -> Result<Output, CliError> {
    let scheme = load_scheme(&a.model)?;
    let budget = resolve_budget(a.budget.budget)?;
    let ctx = context("density", a, &a.seed, Some(&scheme), Some(budget))?;
    let seed0 = ctx.seed0;
    let mut rows = Vec::new();
    let mut table = Vec::new();
    match a.method {
        DensityMethod::Box => {
            let bc = load_boundary(&a.bc, scheme.dim())?;
            need_radii(&a.n)?;
            for &n in &a.n {
                let e = density_box(seed0, n, &scheme, &bc, a.replicas)?;
                rows.push(json!({"n": n, "estimate": e}));
                table.push(estimate_row(n.to_string(), &e, None, seed0));
            }
        }
        DensityMethod::Ergodic => {
            need_radii(&a.n)?;
            for &n in &a.n {
                let v = density_ergodic(seed0, n, &scheme, budget)?;
                rows.push(json!({"n": n, "value": v}));
                table.push(SweepRow {
                    n_or_x: n.to_string(),
                    mean: Some(v),
                    seed0: Some(seed0),
                    ..Default::default()
                });
            }
        }
        DensityMethod::Perfect => {
            if !a.n.is_empty() {
                return Err(CliError::Usage(
                    "--n is not used by --method perfect".into(),
                ));
            }
            let e = density_perfect(seed0, &scheme, a.replicas, budget)?;
            rows.push(json!({"n": "inf", "estimate": e}));
            table.push(estimate_row("inf".into(), &e, None, seed0));
        }
    }
    let result = json!({"method": a.method, "rows": rows});
    Ok(plain(ctx.manifest, result, Table::Sweep(table)))
}

fn need_radii(ns: &[u64]) -> Result<(), CliError> {
    if ns.is_empty() {
        return Err(CliError::Usage("this method needs --n".into()));
    }
    Ok(())
}

fn run_correlation(a: &CorrelationArgs) -> Result<Output, CliError> {
    let scheme = load_scheme(&a.model)?;
    let budget = resolve_budget(a.budget.budget)?;
    let ctx = context("correlation", a, &a.seed, Some(&scheme), Some(budget))?;
    let xs = parse_sites(&a.x, scheme.dim())?;
    let mut reports = Vec::new();
    let mut table = Vec::new();
    for x in &xs {
        let r = correlation(ctx.seed0, x, &scheme, a.replicas, budget)?;
        let ci = |k: f64| {
            r.rho_hat
                .zip(r.rho_std_error)
                .map(|(m, s)| m + k * 1.96 * s)
        };
        table.push(SweepRow {
            n_or_x: site_label(x),
            mean: r.rho_hat,
            std_error: r.rho_std_error,
            ci_low: ci(-1.0),
            ci_high: ci(1.0),
            bound: r.bound,
            replicas: Some(r.replicas),
            seed0: Some(ctx.seed0),
        });
        reports.push(r);
    }
    let degenerate = reports.iter().any(|r| r.degenerate);
    let note = degenerate.then(|| "degenerate variance: correlation undefined".to_string());
    Ok(Output {
        manifest: ctx.manifest,
        result: json!(reports),
        table: Table::Sweep(table),
        note,
        degenerate,
    })
}

fn run_bounds_1d(a: &Bounds1dArgs) -> Result<Output, CliError> {
    let b = rho_bounds(a.order);
    let params = serde_json::to_value(a).map_err(|e| CliError::Io(e.to_string()))?;
    let mass = total_mass(a.order);
    let result = json!({
        "N": b.order,
        "lower": b.lower,
        "upper": b.upper,
        "total_mass": mass,
        "mass_accounted": b.mass_accounted,
        "upper_pattern": UPPER_PATTERN,
    });
    let header = ["N", "lower", "upper", "total_mass", "mass_accounted"]
        .map(String::from)
        .to_vec();
    let row = vec![
        b.order.to_string(),
        b.lower.to_string(),
        b.upper.to_string(),
        mass.to_string(),
        b.mass_accounted.to_string(),
    ];
    Ok(Output {
        manifest: RunManifest::new("bounds-1d", params),
        result,
        table: Table::Custom(header, vec![row]),
        note: Some(format!(
            "N={}: {:.4} <= rho <= {:.4}",
            b.order, b.lower, b.upper
        )),
        degenerate: false,
    })
}

fn run_tail_bound(a: &TailBoundArgs) -> Result<Output, CliError> {
    if a.d == 0 || a.nu == 0 {
        return Err(CliError::Usage("--d and --nu must be at least 1".into()));
    }
    let params = serde_json::to_value(a).map_err(|e| CliError::Io(e.to_string()))?;
    let mut rows = Vec::new();
    let mut table = Vec::new();
    for &n in &a.n {
        let v = tail_bound(n, a.d, a.nu);
        rows.push(json!({"n": n, "bound": v}));
        table.push(SweepRow {
            n_or_x: n.to_string(),
            bound: Some(v),
            ..Default::default()
        });
    }
    Ok(plain(
        RunManifest::new("tail-bound", params),
        json!(rows),
        Table::Sweep(table),
    ))
}

fn run_discrepancy(a: &DiscrepancyArgs) -> Result<Output, CliError> {
    let scheme = load_scheme(&a.model)?;
    let budget = resolve_budget(a.budget.budget)?;
    let ctx = context("discrepancy", a, &a.seed, Some(&scheme), Some(budget))?;
    let event = parse_event(&a.event, a.m, scheme.dim())?;
    let rows = local_discrepancy(
        ctx.seed0,
        &|s: &[u8]| event.holds(s),
        a.m,
        &a.n,
        &scheme,
        a.replicas,
        budget,
    )?;
    let table = rows
        .iter()
        .map(|r| SweepRow {
            n_or_x: r.n.to_string(),
            mean: Some(r.abs_diff),
            std_error: Some(r.std_error),
            ci_low: Some(r.abs_diff - 1.96 * r.std_error),
            ci_high: Some(r.abs_diff + 1.96 * r.std_error),
            bound: Some(r.bound),
            replicas: Some(a.replicas),
            seed0: Some(ctx.seed0),
        })
        .collect();
    let result = json!({
        "event": a.event,
        "m": a.m,
        "rows": rows,
    });
    Ok(plain(ctx.manifest, result, Table::Sweep(table)))
}

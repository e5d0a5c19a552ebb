//! Subcommand implementations.

use anyhow::{bail, Context, Result};
use serde_json::json;

use targetzone::acceptance::{run_all, AcceptanceConfig};
use targetzone::{
    convergence_study, mc_objective, simulate_paths, solve_hjb_eps, solve_hopf_cole,
    solve_singular, ClosedForm64, Grid64, InventoryConvention, ModelParams64, SimConfig,
    Strategy64, Surface64,
};

use crate::config::{Format, Resolved};
use crate::output::{float, opt_float, write_file, Csv};
use crate::svg;

/// Parses a strategy spec: `zero`, `constant:<a>`, `closed-form`,
/// `scaled:<factor>` (of the closed form) or `regularized` (kernel width
/// from `--eps`, inner sampling sized to resolve it).
pub fn parse_strategy(spec: &str, resolved: &Resolved) -> Result<Strategy64> {
    let spec = spec.trim();
    if let Some(rest) = spec.strip_prefix("constant:") {
        return Ok(Strategy64::Constant(
            rest.parse().context("bad constant speed")?,
        ));
    }
    if let Some(rest) = spec.strip_prefix("scaled:") {
        return Ok(Strategy64::Scaled {
            factor: rest.parse().context("bad scale factor")?,
            inner: Box::new(Strategy64::ClosedFormOptimal),
        });
    }
    match spec {
        "zero" => Ok(Strategy64::Zero),
        "closed-form" => Ok(Strategy64::ClosedFormOptimal),
        "regularized" => {
            let params = resolved.params;
            let sigma2 = params.sigma() * params.sigma();
            // inner step count honoring dt <= eps/(4 sigma^2) with margin two
            let n_steps = ((8.0 * sigma2 * params.horizon() / resolved.eps).ceil() as usize).max(100);
            let mc = SimConfig::with_default_band(
                n_steps,
                2_000,
                resolved.seed ^ 0x9e37,
                params.sigma(),
                params.horizon(),
            )?;
            Ok(Strategy64::RegularizedOptimal {
                eps: resolved.eps,
                mc,
            })
        }
        other => bail!(
            "unknown strategy {other:?} (expected zero, constant:<a>, closed-form, scaled:<f>, regularized)"
        ),
    }
}

fn parse_convention(spec: &str) -> Result<InventoryConvention> {
    match spec {
        "pushing" => Ok(InventoryConvention::Pushing),
        "band" => Ok(InventoryConvention::Band),
        other => bail!("unknown inventory convention {other:?} (expected pushing or band)"),
    }
}

fn default_z_max(params: &ModelParams64) -> f64 {
    params.barrier() + 6.0 * params.sigma() * params.horizon().sqrt()
}

/// `value`: exact value function and optimal speed on a grid.
pub fn cmd_value(resolved: &Resolved, nt: usize, nz: usize, z_max: Option<f64>) -> Result<()> {
    let params = resolved.params;
    let cf = ClosedForm64::new(params)?;
    let z_max = z_max.unwrap_or_else(|| default_z_max(&params));
    let grid = Grid64::new(params.barrier(), z_max, nz, nt, params.horizon())?;

    if resolved.wants(Format::Csv) {
        let mut csv = Csv::new(&["t", "z", "U", "dUdz", "v_star"]);
        for k in 0..=nt {
            let t = grid.t_at(k);
            for j in 0..nz {
                let z = grid.z_at(j);
                let du = if t > 0.0 { Some(cf.du_dz(t, z)?) } else { None };
                let v = if t < params.horizon() {
                    Some(cf.v_star(t, z)?)
                } else {
                    None
                };
                csv.row(&[
                    float(t),
                    float(z),
                    float(cf.value_u(t, z)?),
                    opt_float(du),
                    opt_float(v),
                ]);
            }
        }
        let path = write_file(&resolved.out, "value.csv", &csv.into_string())?;
        println!("wrote {}", path.display());
    }

    if resolved.wants(Format::Svg) {
        let u = Surface64::tabulate(grid, |t, z| {
            if t == 0.0 {
                0.0
            } else {
                cf.value_u(t, z).unwrap()
            }
        })?;
        let path = write_file(
            &resolved.out,
            "value_u.svg",
            &svg::heatmap(&u, "value function U(t, z)"),
        )?;
        println!("wrote {}", path.display());
        // the optimal speed is undefined at t = horizon; stop one row short
        let v_grid = Grid64::new(
            params.barrier(),
            z_max,
            nz,
            nt.max(2) - 1,
            params.horizon() * (nt.max(2) - 1) as f64 / nt.max(2) as f64,
        )?;
        let v = Surface64::tabulate(v_grid, |t, z| cf.v_star(t, z).unwrap())?;
        let path = write_file(
            &resolved.out,
            "v_star.svg",
            &svg::heatmap(&v, "optimal speed v*(t, z)"),
        )?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

/// `strategy`: tabulates a named strategy on a grid (rows stop short of the
/// horizon, where feedback speeds need not be defined).
pub fn cmd_strategy(
    resolved: &Resolved,
    kind: &str,
    nt: usize,
    nz: usize,
    z_max: Option<f64>,
) -> Result<()> {
    let params = resolved.params;
    let strategy = parse_strategy(kind, resolved)?;
    let z_max = z_max.unwrap_or_else(|| default_z_max(&params));
    let dz = (z_max - params.barrier()) / (nz - 1) as f64;
    let dt = params.horizon() / nt as f64;
    let mut csv = Csv::new(&["t", "z", "v"]);
    for k in 0..nt {
        let t = dt * k as f64;
        for j in 0..nz {
            let z = params.barrier() + dz * j as f64;
            csv.row(&[float(t), float(z), float(strategy.eval(&params, t, z)?)]);
        }
    }
    let path = write_file(&resolved.out, "strategy.csv", &csv.into_string())?;
    println!("wrote {}", path.display());
    Ok(())
}

/// `simulate`: Monte Carlo objective for one strategy, JSON summary plus
/// optional per-path CSV.
pub fn cmd_simulate(
    resolved: &Resolved,
    kind: &str,
    convention: &str,
    per_path: bool,
) -> Result<()> {
    let params = resolved.params;
    let strategy = parse_strategy(kind, resolved)?;
    let convention = parse_convention(convention)?;
    let mc = resolved.sim_config()?;
    let est = mc_objective(&params, &strategy, &mc, convention)?;
    let target = ClosedForm64::new(params)?.value_u(params.horizon(), params.s0())?;
    let summary = json!({
        "strategy": strategy.label(),
        "convention": match convention { InventoryConvention::Pushing => "pushing", InventoryConvention::Band => "band" },
        "mean": est.mean,
        "std_error": est.std_error,
        "n_paths": est.n_paths,
        "n_steps": mc.n_steps,
        "band_eps": mc.band_eps,
        "seed": mc.seed,
        "params": {
            "sigma": params.sigma(),
            "gamma": params.gamma(),
            "kappa": params.kappa(),
            "c": params.barrier(),
            "s0": params.s0(),
            "horizon": params.horizon(),
            "beta": params.beta(),
        },
        "value_function_target": target,
        "z_score_vs_target": est.z_score(target),
    });
    let text = serde_json::to_string_pretty(&summary)?;
    if resolved.wants(Format::Json) {
        let path = write_file(&resolved.out, "simulate.json", &format!("{text}\n"))?;
        println!("wrote {}", path.display());
    }
    println!("{text}");
    if per_path {
        let records = simulate_paths(&params, &strategy, &mc)?;
        let mut csv = Csv::new(&[
            "path_index",
            "terminal_s",
            "pushing",
            "band_local_time",
            "cost",
            "payoff",
        ]);
        for (i, r) in records.iter().enumerate() {
            csv.row(&[
                i.to_string(),
                float(r.terminal_s),
                float(r.pushing),
                float(r.band_local_time),
                float(r.cost),
                float(r.payoff(convention)),
            ]);
        }
        let path = write_file(&resolved.out, "paths.csv", &csv.into_string())?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

/// `ueps`: Feynman-Kac estimates of the smoothed value function against the
/// closed form on a z-grid.
pub fn cmd_ueps(resolved: &Resolved, t: Option<f64>, nz: usize, z_max: Option<f64>) -> Result<()> {
    let params = resolved.params;
    let t = t.unwrap_or_else(|| params.horizon());
    let cf = ClosedForm64::new(params)?;
    let rv = targetzone::RegularizedValue64::new(params, resolved.eps, resolved.sim_config()?)?;
    let z_max = z_max.unwrap_or_else(|| default_z_max(&params));
    let dz = (z_max - params.barrier()) / (nz - 1) as f64;
    let mut csv = Csv::new(&[
        "eps",
        "z",
        "U_eps",
        "std_error",
        "U_closed_form",
        "abs_error",
    ]);
    for j in 0..nz {
        let z = params.barrier() + dz * j as f64;
        let est = rv.u_eps_mc(t, z)?;
        let exact = cf.value_u(t, z)?;
        csv.row(&[
            float(resolved.eps),
            float(z),
            float(est.mean),
            float(est.std_error),
            float(exact),
            float((est.mean - exact).abs()),
        ]);
    }
    let path = write_file(&resolved.out, "ueps.csv", &csv.into_string())?;
    println!("wrote {}", path.display());
    Ok(())
}

/// `pde`: one finite-difference solve with optional closed-form comparison.
pub fn cmd_pde(
    resolved: &Resolved,
    equation: &str,
    nt: usize,
    nz: usize,
    z_max: Option<f64>,
    compare: bool,
) -> Result<()> {
    let params = resolved.params;
    let z_max = z_max.unwrap_or_else(|| default_z_max(&params));
    let grid = Grid64::new(params.barrier(), z_max, nz, nt, params.horizon())?;
    let (surface, stem) = match equation {
        "hjb-eps" => (solve_hjb_eps(&params, resolved.eps, &grid)?, "pde_hjb_eps"),
        "hopf-cole" => {
            let sol = solve_hopf_cole(&params, resolved.eps, &grid)?;
            (sol.u, "pde_hopf_cole")
        }
        "singular" => (solve_singular(&params, &grid)?, "pde_singular"),
        other => bail!("unknown equation {other:?} (expected hjb-eps, hopf-cole or singular)"),
    };

    if resolved.wants(Format::Csv) {
        let mut csv = Csv::new(&["t", "z", "value"]);
        for k in 0..=nt {
            for j in 0..nz {
                csv.row(&[
                    float(grid.t_at(k)),
                    float(grid.z_at(j)),
                    float(surface.value(k, j)),
                ]);
            }
        }
        let path = write_file(&resolved.out, &format!("{stem}.csv"), &csv.into_string())?;
        println!("wrote {}", path.display());
    }
    if resolved.wants(Format::Svg) {
        let path = write_file(
            &resolved.out,
            &format!("{stem}.svg"),
            &svg::heatmap(&surface, &format!("{equation} solution")),
        )?;
        println!("wrote {}", path.display());
    }

    if compare {
        let cf = ClosedForm64::new(params)?;
        let mut csv = Csv::new(&["t", "z", "value", "closed_form", "abs_error"]);
        let mut sup = 0.0f64;
        let stride_k = (nt / 50).max(1);
        let stride_j = (nz / 60).max(1);
        for k in (0..=nt).step_by(stride_k) {
            let t = grid.t_at(k);
            for j in (0..nz).step_by(stride_j) {
                let z = grid.z_at(j);
                let exact = if t == 0.0 { 0.0 } else { cf.value_u(t, z)? };
                let err = (surface.value(k, j) - exact).abs();
                sup = sup.max(err);
                csv.row(&[
                    float(t),
                    float(z),
                    float(surface.value(k, j)),
                    float(exact),
                    float(err),
                ]);
            }
        }
        let path = write_file(
            &resolved.out,
            &format!("{stem}_compare.csv"),
            &csv.into_string(),
        )?;
        println!("wrote {}", path.display());
        println!(
            "sup |numeric - closed form| over sampled nodes = {}",
            float(sup)
        );
    }
    Ok(())
}

/// `converge`: eps sweep of the smoothed value function.
pub fn cmd_converge(
    resolved: &Resolved,
    eps_list: &str,
    t: Option<f64>,
    z_list: Option<&str>,
) -> Result<()> {
    let params = resolved.params;
    let t = t.unwrap_or_else(|| params.horizon());
    let eps_list: Vec<f64> = eps_list
        .split(',')
        .map(|e| e.trim().parse().context("bad eps value"))
        .collect::<Result<_>>()?;
    let z_grid: Vec<f64> = match z_list {
        Some(spec) => spec
            .split(',')
            .map(|z| z.trim().parse().context("bad z value"))
            .collect::<Result<_>>()?,
        None => {
            let c = params.barrier();
            let w = params.sigma() * params.horizon().sqrt();
            vec![
                c,
                c + 0.25 * w,
                c + 0.5 * w,
                c + w,
                c + 1.5 * w,
                c + 2.0 * w,
                c + 3.0 * w,
            ]
        }
    };
    let table = convergence_study(&params, &eps_list, t, &z_grid, &resolved.sim_config()?)?;
    let mut csv = Csv::new(&[
        "eps",
        "z",
        "U_eps",
        "std_error",
        "U_closed_form",
        "abs_error",
    ]);
    for p in &table.points {
        csv.row(&[
            float(p.eps),
            float(p.z),
            float(p.u_eps),
            float(p.std_error),
            float(p.u_exact),
            float(p.abs_error),
        ]);
    }
    let path = write_file(&resolved.out, "converge.csv", &csv.into_string())?;
    println!("wrote {}", path.display());
    for row in &table.rows {
        println!(
            "eps {:>10}: sup |U_eps - U| = {}, inner rms = {}",
            float(row.eps),
            float(row.sup_error),
            float(row.inner_rms)
        );
    }
    if table.rows.len() > 1 {
        println!(
            "sup errors strictly decreasing: {}; inner-RMS log-log slopes: {:?}",
            table.sup_errors_strictly_decreasing(),
            table.rate_slopes()
        );
    }
    Ok(())
}

/// `compare`: payoff ranking of a strategy list; the closed-form optimum
/// should rank first within noise.
pub fn cmd_compare(resolved: &Resolved, strategies: &str, convention: &str) -> Result<()> {
    let params = resolved.params;
    let convention = parse_convention(convention)?;
    let mc = resolved.sim_config()?;
    let specs: Vec<&str> = strategies.split(',').map(str::trim).collect();
    if specs.len() < 2 {
        bail!("compare needs at least two strategies");
    }
    let mut rows = Vec::new();
    for spec in specs {
        let strategy = parse_strategy(spec, resolved)?;
        let est = mc_objective(&params, &strategy, &mc, convention)?;
        rows.push((strategy.label(), est));
    }
    rows.sort_by(|a, b| b.1.mean.partial_cmp(&a.1.mean).unwrap());
    let mut csv = Csv::new(&["rank", "strategy", "mean_payoff", "std_error", "n_paths"]);
    println!(
        "{:<4} {:<24} {:>14} {:>14}",
        "rank", "strategy", "mean", "std error"
    );
    for (rank, (label, est)) in rows.iter().enumerate() {
        println!(
            "{:<4} {:<24} {:>14.6} {:>14.6}",
            rank + 1,
            label,
            est.mean,
            est.std_error
        );
        csv.row(&[
            (rank + 1).to_string(),
            label.clone(),
            float(est.mean),
            float(est.std_error),
            est.n_paths.to_string(),
        ]);
    }
    let path = write_file(&resolved.out, "compare.csv", &csv.into_string())?;
    println!("wrote {}", path.display());
    Ok(())
}

/// `accept`: the acceptance suite; returns an error when a criterion fails
/// so the process exits nonzero.
pub fn cmd_accept(resolved: &Resolved, quick: bool) -> Result<()> {
    let config = if quick {
        AcceptanceConfig::quick(resolved.seed)
    } else {
        AcceptanceConfig {
            seed: resolved.seed,
            ..AcceptanceConfig::default()
        }
    };
    let reports = run_all(&config);
    for r in &reports {
        println!("{}", r.line());
    }
    let passed = reports.iter().filter(|r| r.passed).count();
    println!("{passed}/{} criteria passed", reports.len());
    if resolved.wants(Format::Json) {
        let body = json!({
            "quick": quick,
            "seed": config.seed,
            "criteria": reports.iter().map(|r| json!({
                "id": r.id,
                "name": r.name,
                "passed": r.passed,
                "detail": r.detail,
                "runtime_ms": r.runtime_ms as u64,
            })).collect::<Vec<_>>(),
            "all_passed": passed == reports.len(),
        });
        let path = write_file(
            &resolved.out,
            "accept.json",
            &format!("{}\n", serde_json::to_string_pretty(&body)?),
        )?;
        println!("wrote {}", path.display());
    }
    if passed != reports.len() {
        bail!("{} acceptance criteria failed", reports.len() - passed);
    }
    Ok(())
}

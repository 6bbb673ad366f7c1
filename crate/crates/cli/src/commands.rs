//! Command implementations: each builds a result table, the parameter map
//! for the JSON envelope, and any requested plot.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde_json::{json, Value};

use qgraph::lattice::{
    band_structure, dirac_points, fermi_surface, p_sigma_estimate, BandSet, Branch, EdgeKind,
    LatticeModel,
};
use qgraph::star::{bound_states, s_matrix, VertexCoupling};

use crate::coupling::CouplingArgs;
use crate::output::{Cell, Table};
use crate::svg::Document;
use crate::CliError;

fn branch_name(branch: Branch) -> &'static str {
    match branch {
        Branch::Positive => "positive",
        Branch::Negative => "negative",
    }
}

fn edge_name(kind: EdgeKind) -> &'static str {
    match kind {
        EdgeKind::Center => "center",
        EdgeKind::Corner => "corner",
    }
}

fn lib(e: qgraph::Error) -> CliError {
    CliError::from_library(e)
}

pub fn symmetry(coupling: &CouplingArgs) -> Result<(Table, Value), CliError> {
    let u = coupling.build()?;
    let report = u.symmetry_report();
    let mut table = Table::new(&["time_reversal", "pt_symmetric", "parity_fixed_edges"]);
    let edges = report
        .parity_fixed_edges
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(";");
    table.push(vec![
        Cell::Bool(report.time_reversal),
        Cell::Bool(report.pt_symmetric),
        Cell::Str(edges),
    ]);
    Ok((table, coupling.describe()))
}

pub fn smatrix(coupling: &CouplingArgs, ell: f64, k: f64) -> Result<(Table, Value), CliError> {
    let u = coupling.build()?;
    let vc = VertexCoupling::circulant(u, ell).map_err(lib)?;
    let sm = s_matrix(&vc, k).map_err(lib)?;
    let n = sm.s.dim();
    let mut table = Table::new(&["row", "col", "re", "im"]);
    for i in 0..n {
        for j in 0..n {
            let z = sm.s.get(i, j);
            table.push(vec![
                Cell::Int(i as i64 + 1),
                Cell::Int(j as i64 + 1),
                Cell::Num(z.re),
                Cell::Num(z.im),
            ]);
        }
    }
    let mut params = coupling.describe();
    params["ell"] = json!(ell);
    params["k"] = json!(k);
    Ok((table, params))
}

pub fn bound_states_cmd(coupling: &CouplingArgs, ell: f64) -> Result<(Table, Value), CliError> {
    let u = coupling.build()?;
    let vc = VertexCoupling::circulant(u, ell).map_err(lib)?;
    let states = bound_states(&vc).map_err(lib)?;
    let mut table = Table::new(&["kind", "kappa", "energy"]);
    for (kappa, energy) in states.kappas.iter().zip(&states.energies) {
        table.push(vec![
            Cell::Str("bound".into()),
            Cell::Num(*kappa),
            Cell::Num(*energy),
        ]);
    }
    for kappa in &states.antibound_kappas {
        // antibound states are reported by their kappa value alone
        table.push(vec![
            Cell::Str("antibound".into()),
            Cell::Num(*kappa),
            Cell::Empty,
        ]);
    }
    let mut params = coupling.describe();
    params["ell"] = json!(ell);
    Ok((table, params))
}

pub struct BandsConfig {
    pub mu: Option<f64>,
    pub ell: f64,
    pub k_min: f64,
    pub k_max: f64,
    pub branch: String,
    pub grid: usize,
    pub tol: f64,
    pub mu_grid: Option<usize>,
    pub mu_min: f64,
    pub mu_max: f64,
}

fn branches_of(name: &str) -> Result<Vec<Branch>, CliError> {
    match name {
        "positive" => Ok(vec![Branch::Positive]),
        "negative" => Ok(vec![Branch::Negative]),
        "both" => Ok(vec![Branch::Positive, Branch::Negative]),
        other => Err(CliError::Validation(format!(
            "unknown branch {other:?}; expected positive | negative | both"
        ))),
    }
}

/// Scan range for the negative branch: bands sit near tan(mu/2) and
/// tan(mu/2 + pi/4), the latter diverging toward mu = pi/2, so the default
/// window follows the roots up to a hard cap.
fn negative_range(mu: f64, k_min: f64) -> (f64, f64) {
    let hi = if mu > 0.0 && mu < PI / 2.0 {
        (1.5 * (0.5 * mu + PI / 4.0).tan()).clamp(5.0, 1e4)
    } else {
        5.0
    };
    (k_min, hi)
}

fn bands_for(m: &LatticeModel, branch: Branch, cfg: &BandsConfig) -> Result<BandSet, CliError> {
    let range = match branch {
        Branch::Positive => (cfg.k_min, cfg.k_max),
        Branch::Negative => negative_range(m.mu(), cfg.k_min),
    };
    band_structure(m, branch, range, cfg.grid, cfg.tol).map_err(lib)
}

fn push_band_rows(table: &mut Table, mu: f64, ell: f64, branch: Branch, set: &BandSet) {
    for b in &set.intervals {
        table.push(vec![
            Cell::Num(mu),
            Cell::Num(ell),
            Cell::Str(branch_name(branch).into()),
            Cell::Num(b.lo),
            Cell::Num(b.hi),
            Cell::Str(edge_name(b.edge_lo).into()),
            Cell::Str(edge_name(b.edge_hi).into()),
        ]);
    }
    for &x in &set.flat_points {
        table.push(vec![
            Cell::Num(mu),
            Cell::Num(ell),
            Cell::Str(branch_name(branch).into()),
            Cell::Num(x),
            Cell::Num(x),
            Cell::Str("flat".into()),
            Cell::Str("flat".into()),
        ]);
    }
}

pub fn bands(cfg: &BandsConfig) -> Result<(Table, Value, Option<String>), CliError> {
    let branches = branches_of(&cfg.branch)?;
    let mut table = Table::new(&["mu", "ell", "branch", "k_lo", "k_hi", "edge_lo", "edge_hi"]);

    let params = json!({
        "mu": cfg.mu,
        "ell": cfg.ell,
        "k_min": cfg.k_min,
        "k_max": cfg.k_max,
        "branch": cfg.branch,
        "grid": cfg.grid,
        "tol": cfg.tol,
        "mu_grid": cfg.mu_grid,
        "mu_min": cfg.mu_grid.map(|_| cfg.mu_min),
        "mu_max": cfg.mu_grid.map(|_| cfg.mu_max),
    });

    if let Some(mu_grid) = cfg.mu_grid {
        // phase sweep: data-parallel over the mu axis, assembled in order
        if mu_grid < 2 {
            return Err(CliError::Validation("--mu-grid must be >= 2".into()));
        }
        let mus: Vec<f64> = (0..=mu_grid)
            .map(|i| cfg.mu_min + (cfg.mu_max - cfg.mu_min) * i as f64 / mu_grid as f64)
            .collect();
        let per_mu: Vec<Result<Vec<(Branch, BandSet)>, CliError>> = mus
            .par_iter()
            .map(|&mu| {
                let m = LatticeModel::new(mu, cfg.ell).map_err(lib)?;
                branches
                    .iter()
                    .map(|&br| bands_for(&m, br, cfg).map(|set| (br, set)))
                    .collect()
            })
            .collect();
        let mut collected: Vec<(f64, Vec<(Branch, BandSet)>)> = Vec::with_capacity(mus.len());
        for (mu, sets) in mus.iter().zip(per_mu) {
            collected.push((*mu, sets?));
        }
        // plot window: clip the negative branch to the deepest band found
        let y_min = collected
            .iter()
            .flat_map(|(_, sets)| sets.iter())
            .filter(|(br, _)| *br == Branch::Negative)
            .flat_map(|(_, set)| set.intervals.iter())
            .map(|b| -b.hi)
            .fold(0.0f64, f64::min);
        let mut svg = Document::new((cfg.mu_min, cfg.mu_max), (y_min.min(-1e-6), cfg.k_max));
        let step = (cfg.mu_max - cfg.mu_min) / mu_grid as f64;
        for (mu, sets) in &collected {
            for (br, set) in sets {
                push_band_rows(&mut table, *mu, cfg.ell, *br, set);
                let sign = if *br == Branch::Positive { 1.0 } else { -1.0 };
                let color = if *br == Branch::Positive {
                    "#4a78b8"
                } else {
                    "#b85c4a"
                };
                for b in &set.intervals {
                    let (lo, hi) = if sign > 0.0 {
                        (b.lo, b.hi)
                    } else {
                        (-b.hi, -b.lo)
                    };
                    svg.rect(mu - 0.5 * step, lo, step, hi, color);
                }
                for &x in &set.flat_points {
                    svg.circle(
                        *mu,
                        sign * x,
                        0.004 * (cfg.mu_max - cfg.mu_min).max(1e-9),
                        "#000000",
                    );
                }
            }
        }
        svg.line(cfg.mu_min, 0.0, cfg.mu_max, 0.0, 0.002, "#888888");
        return Ok((table, params, Some(svg.render())));
    }

    let mu = cfg
        .mu
        .ok_or_else(|| CliError::Validation("--mu is required without --mu-grid".into()))?;
    let m = LatticeModel::new(mu, cfg.ell).map_err(lib)?;
    // single-phase diagram: bands on a momentum axis, the negative branch
    // drawn leftward of zero as -kappa
    let x_min = if branches.contains(&Branch::Negative) {
        -negative_range(mu, cfg.k_min).1
    } else {
        0.0
    };
    let mut svg = Document::new((x_min, cfg.k_max), (-1.0, 1.0));
    for &br in &branches {
        let set = bands_for(&m, br, cfg)?;
        push_band_rows(&mut table, mu, cfg.ell, br, &set);
        let color = if br == Branch::Positive {
            "#4a78b8"
        } else {
            "#b85c4a"
        };
        for b in &set.intervals {
            let (lo, hi) = match br {
                Branch::Positive => (b.lo, b.hi),
                Branch::Negative => (-b.hi, -b.lo),
            };
            svg.rect(lo, -0.3, hi - lo, 0.3, color);
        }
        let sign = if br == Branch::Positive { 1.0 } else { -1.0 };
        for &x in &set.flat_points {
            svg.circle(sign * x, 0.0, 0.006 * (cfg.k_max - x_min), "#000000");
        }
    }
    Ok((table, params, Some(svg.render())))
}

pub fn fermi(
    mu: f64,
    ell: f64,
    k: f64,
    grid: usize,
) -> Result<(Table, Value, Option<String>), CliError> {
    let m = LatticeModel::new(mu, ell).map_err(lib)?;
    let fs = fermi_surface(&m, k, grid).map_err(lib)?;
    let mut table = Table::new(&["theta1", "theta2"]);
    let mut svg = Document::new((-PI, PI), (-PI, PI));
    svg.line(-PI, -PI, PI, -PI, 0.01, "#888888");
    svg.line(PI, -PI, PI, PI, 0.01, "#888888");
    svg.line(PI, PI, -PI, PI, 0.01, "#888888");
    svg.line(-PI, PI, -PI, -PI, 0.01, "#888888");
    for p in &fs.points {
        table.push(vec![Cell::Num(p.theta1), Cell::Num(p.theta2)]);
        svg.circle(p.theta1, p.theta2, 0.015, "#4a78b8");
    }
    let params = json!({ "mu": mu, "ell": ell, "k": k, "grid": grid });
    Ok((table, params, Some(svg.render())))
}

pub fn psigma(mu: f64, ell: f64, k_max: f64, grid: usize) -> Result<(Table, Value), CliError> {
    let m = LatticeModel::new(mu, ell).map_err(lib)?;
    let p = p_sigma_estimate(&m, k_max, grid).map_err(lib)?;
    let mut table = Table::new(&["mu", "ell", "k_max", "energy_window", "p_sigma"]);
    table.push(vec![
        Cell::Num(mu),
        Cell::Num(ell),
        Cell::Num(k_max),
        Cell::Num(k_max * k_max),
        Cell::Num(p),
    ]);
    let params = json!({ "mu": mu, "ell": ell, "k_max": k_max, "grid": grid });
    Ok((table, params))
}

pub fn dirac(
    ell: f64,
    mu_min: f64,
    mu_max: f64,
    k_min: f64,
    k_max: f64,
    grid: usize,
) -> Result<(Table, Value), CliError> {
    let points = dirac_points(ell, (mu_min, mu_max), (k_min, k_max), grid).map_err(lib)?;
    let mut table = Table::new(&["mu", "k", "location"]);
    for p in &points {
        table.push(vec![
            Cell::Num(p.mu),
            Cell::Num(p.k),
            Cell::Str(edge_name(p.location).into()),
        ]);
    }
    let params = json!({
        "ell": ell, "mu_min": mu_min, "mu_max": mu_max,
        "k_min": k_min, "k_max": k_max, "grid": grid,
    });
    Ok((table, params))
}

//! Quick closed-form checks of every module, run by the `self-test` command.

use std::f64::consts::PI;

use crate::config::Config;
use crate::field::ScalarField2D;
use crate::metric::{gauss_curvature, metric_factor, power_law_metric};
use crate::observables::fields::winding_number;
use crate::observables::integrals::{energy_density_reduced, flux_selfdual, total_curvature};
use crate::observables::{decay_fit, reconstruct_fields, FitWindow};
use crate::params::{make_grid, validate, Grid2D, PhysicalParams, RadialGrid, RadialGridSpec};
use crate::planar::{build_background, linear_poisson_solve, monotone_solve, SolveOptions};
use crate::radial::properties::scaled_near_origin;
use crate::radial::series::local_series_u;
use crate::radial::{
    fixed_point_t, integrate_u, shoot_u, shoot_v, verify_radial_properties, CheckStatus, RadialMetric, RadialModel,
    RadialOptions, RadialProfile, ShootOptions, ShotClass, VEquation,
};

pub struct SelfTestResult {
    pub name: &'static str,
    pub outcome: Result<(), String>,
}

type Check = fn() -> Result<(), String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

const CHECKS: &[(&str, Check)] = &[
    ("params: 4piGN = 1 passes with delta = 2", params_boundary),
    ("params: flat limit has delta 0", params_flat),
    ("params: 4piGN = 2 is rejected", params_reject),
    ("grid: spacing 40/256 at R = 20, n = 257", grid_spacing),
    ("grid: vortex outside the margin is rejected", grid_margin),
    ("grid: n = 2 is rejected", grid_small),
    ("metric: G = 0 gives g0", metric_flat),
    ("metric: vacuum gives exp(-4 pi G)", metric_vacuum),
    ("metric: single vortex at r = 1", metric_single),
    ("metric: power law values", metric_power_law),
    ("curvature: constant eta is flat", curvature_flat),
    ("curvature: round sphere has K = 1", curvature_sphere),
    ("background: source values at the vortex", background_values),
    ("background: supersolution is u = 0", background_super),
    ("linear solve: zero right side", linear_zero),
    ("planar: no vortices gives u = 0", planar_vacuum),
    ("series: u / r^N -> a", series_leading),
    ("shooting: free equation crosses at a^(-1/N)", shooting_free),
    ("shooting: no bracket for the free equation", shooting_no_bracket_u),
    ("shooting: no bracket for the gauge equation with u = 0", shooting_no_bracket_v),
    ("fixed point: converged v is reproduced", fixed_point_rerun),
    ("properties: N = 1 origin slope is outside hypothesis", properties_n1),
    ("properties: u = r/(1+r) violates the origin scaling", properties_counterexample),
    ("fields: vacuum", fields_vacuum),
    ("fields: winding number 1", fields_winding),
    ("integrals: vacuum flux, energy and curvature vanish", integrals_vacuum),
    ("integrals: deficit angle is 8 pi^2 G N", integrals_deficit),
    ("decay: r^-2", decay_square),
    ("decay: perturbed 5 r^-3", decay_perturbed),
    ("cli: empty sweep is header only", cli_empty_sweep),
    ("cli: inadmissible config exits with 2", cli_validation),
];

pub fn run_self_test() -> Vec<SelfTestResult> {
    CHECKS
        .iter()
        .map(|(name, f)| SelfTestResult { name, outcome: f() })
        .collect()
}

fn params_boundary() -> Result<(), String> {
    let r = validate(&PhysicalParams::centered(1.0, 1.0 / (8.0 * PI), 1.0, 2));
    ensure(r.passed && (r.delta - 2.0).abs() < 1e-12, format!("{r:?}"))
}

fn params_flat() -> Result<(), String> {
    let r = validate(&PhysicalParams::centered(1.0, 0.0, 1.0, 3));
    ensure(r.passed && r.delta == 0.0 && r.deficit_angle == 0.0, format!("{r:?}"))
}

fn params_reject() -> Result<(), String> {
    ensure(!validate(&PhysicalParams::centered(1.0, 1.0 / (2.0 * PI), 1.0, 1)).passed, "accepted")
}

fn grid_spacing() -> Result<(), String> {
    let g = make_grid(20.0, 257, &[[0.0, 0.0]]).map_err(err)?;
    ensure(g.h == 40.0 / 256.0, format!("h = {}", g.h))
}

fn grid_margin() -> Result<(), String> {
    ensure(make_grid(20.0, 257, &[[15.0, 0.0]]).is_err(), "accepted")
}

fn grid_small() -> Result<(), String> {
    ensure(make_grid(10.0, 2, &[]).is_err(), "accepted")
}

fn metric_flat() -> Result<(), String> {
    let grid = Grid2D::new(4.0, 17).map_err(err)?;
    let p = PhysicalParams::new(1.0, 0.0, 1.7, vec![]);
    let u = ScalarField2D::from_fn(grid, |x, y| -(x * x + y * y).exp().recip());
    let m = metric_factor(&u, &p).map_err(err)?;
    ensure(m.values.data.iter().all(|&e| e == 1.7), "not constant")
}

fn metric_vacuum() -> Result<(), String> {
    let grid = Grid2D::new(4.0, 17).map_err(err)?;
    let g = 0.01;
    let m = metric_factor(&ScalarField2D::zeros(grid), &PhysicalParams::new(1.0, g, 1.0, vec![])).map_err(err)?;
    let want = (-4.0 * PI * g).exp();
    ensure(m.values.data.iter().all(|&e| (e - want).abs() < 1e-14), "wrong value")
}

fn metric_single() -> Result<(), String> {
    let grid = Grid2D::new(4.0, 81).map_err(err)?;
    let g = 0.02;
    let p = PhysicalParams::centered(1.0, g, 1.0, 1);
    let bg = build_background(&p.points, grid);
    let m = metric_factor(&bg.u0, &p).map_err(err)?;
    let (i, j) = grid.node_at(1.0, 0.0).ok_or("no node at (1, 0)")?;
    let want = (0.5 * (-0.5f64).exp()).powf(4.0 * PI * g);
    ensure((m.values.at(i, j) - want).abs() < 1e-12, format!("{} vs {want}", m.values.at(i, j)))
}

fn metric_power_law() -> Result<(), String> {
    ensure(power_law_metric(3.0, 1.3, 0.0) == 1.3, "delta = 0")?;
    ensure((power_law_metric(4.0, 1.0, 0.5) - 0.5).abs() < 1e-15, "r = 4")
}

fn curvature_flat() -> Result<(), String> {
    let grid = Grid2D::new(2.0, 17).map_err(err)?;
    let k = gauss_curvature(&ScalarField2D::constant(grid, 0.3));
    ensure(k.sup_norm() < 1e-12, "nonzero")
}

fn curvature_sphere() -> Result<(), String> {
    let grid = Grid2D::new(2.0, 161).map_err(err)?;
    let eta = ScalarField2D::from_fn(grid, |x, y| -2.0 * (1.0 + 0.25 * (x * x + y * y)).ln());
    let k = gauss_curvature(&eta);
    let mut worst: f64 = 0.0;
    for j in 1..grid.n - 1 {
        for i in 1..grid.n - 1 {
            worst = worst.max((k.at(i, j) - 1.0).abs());
        }
    }
    ensure(worst < 1e-3, format!("max |K - 1| = {worst}"))
}

fn background_values() -> Result<(), String> {
    let grid = Grid2D::new(4.0, 41).map_err(err)?;
    let one = build_background(&[[0.0, 0.0]], grid);
    let three = build_background(&[[0.0, 0.0]; 3], grid);
    let (i, j) = one.vortex_nodes[0];
    ensure(one.g.at(i, j) == 4.0 && three.g.at(i, j) == 12.0, "g(0)")?;
    let (a, b) = grid.node_at(1.0, 0.0).ok_or("no node")?;
    ensure((three.u0.at(a, b) - 3.0 * 0.5f64.ln()).abs() < 1e-14, "u0 linearity")
}

fn background_super() -> Result<(), String> {
    let grid = Grid2D::new(4.0, 41).map_err(err)?;
    let bg = build_background(&[[0.0, 0.0], [1.0, 1.0]], grid);
    ensure(bg.compose_u(&bg.supersolution()).sup_norm() == 0.0, "u0 + v+ != 0")
}

fn linear_zero() -> Result<(), String> {
    let grid = Grid2D::new(1.0, 33).map_err(err)?;
    let w = linear_poisson_solve(&ScalarField2D::zeros(grid), &ScalarField2D::constant(grid, 1.0)).map_err(err)?;
    ensure(w.sup_norm() == 0.0, "nonzero")
}

fn planar_vacuum() -> Result<(), String> {
    let grid = Grid2D::new(5.0, 33).map_err(err)?;
    let p = PhysicalParams::new(1.0, 0.0, 1.0, vec![]);
    let sol = monotone_solve(&build_background(&[], grid), &p, &SolveOptions::default(), None).map_err(err)?;
    ensure(sol.v.sup_norm() == 0.0, format!("sup |v| = {}", sol.v.sup_norm()))
}

fn flat_model(n: usize, lambda: f64) -> RadialModel {
    RadialModel {
        n,
        lambda,
        metric: RadialMetric::PowerLaw { g0: 1.0, delta: 0.0 },
        v_equation: VEquation::Reduced,
    }
}

fn radial_grid() -> Result<RadialGrid, String> {
    RadialGrid::graded(&RadialGridSpec::default()).map_err(err)
}

fn series_leading() -> Result<(), String> {
    let grid = radial_grid()?;
    let (u, _) = local_series_u(1.0, 1e-4, &flat_model(2, 1.0), &RadialProfile::default_v(&grid));
    ensure((u / 1e-8 - 1.0).abs() < 1e-6, format!("u / r^2 = {}", u / 1e-8))
}

fn shooting_free() -> Result<(), String> {
    let grid = radial_grid()?;
    let zero = RadialProfile::from_fn(&grid, |_| (0.0, 0.0));
    let out = integrate_u(4.0, &zero, &flat_model(2, 0.0)).map_err(err)?;
    ensure(out.class == ShotClass::A2, format!("{:?}", out.class))?;
    ensure((out.exit_r - 0.5).abs() < 1e-6, format!("exit at {}", out.exit_r))
}

fn shooting_no_bracket_u() -> Result<(), String> {
    let grid = radial_grid()?;
    let zero = RadialProfile::from_fn(&grid, |_| (0.0, 0.0));
    ensure(shoot_u(&zero, &flat_model(2, 0.0), &ShootOptions::default()).is_err(), "bracket found")
}

fn shooting_no_bracket_v() -> Result<(), String> {
    let grid = radial_grid()?;
    let zero = RadialProfile::from_fn(&grid, |_| (0.0, 0.0));
    ensure(shoot_v(&zero, &flat_model(2, 1.0), &ShootOptions::default()).is_err(), "bracket found")
}

fn fixed_point_rerun() -> Result<(), String> {
    let grid = radial_grid()?;
    let p = PhysicalParams::centered(1.0, 0.0, 1.0, 2);
    let opts = RadialOptions::default();
    let first = fixed_point_t(&p, &grid, None, &opts).map_err(err)?;
    let again = fixed_point_t(&p, &grid, Some(&first.v), &opts).map_err(err)?;
    ensure(again.outer_iters == 1 && again.v.sup_diff(&first.v) < opts.tol, format!("{} iterations", again.outer_iters))
}

fn properties_n1() -> Result<(), String> {
    let grid = radial_grid()?;
    let sol = fixed_point_t(&PhysicalParams::centered(1.0, 0.0, 1.0, 1), &grid, None, &RadialOptions::default())
        .map_err(err)?;
    let r = verify_radial_properties(&sol);
    ensure(r.status("origin_slopes") == Some(CheckStatus::OutsideHypothesis), format!("{:?}", r.status("origin_slopes")))
}

fn properties_counterexample() -> Result<(), String> {
    let grid = radial_grid()?;
    let u = RadialProfile::from_fn(&grid, |r| (r / (1.0 + r), 1.0 / (1.0 + r).powi(2)));
    let (ok, _) = scaled_near_origin(&u, 2.0, 0.1);
    ensure(!ok, "not flagged")
}

fn fields_vacuum() -> Result<(), String> {
    let grid = Grid2D::new(5.0, 33).map_err(err)?;
    let f = reconstruct_fields(&ScalarField2D::zeros(grid), &[]).map_err(err)?;
    ensure(
        f.phi_re.data.iter().all(|&x| x == 1.0)
            && f.phi_im.sup_norm() == 0.0
            && f.a1.sup_norm() == 0.0
            && f.a2.sup_norm() == 0.0
            && f.f12.sup_norm() == 0.0,
        "not vacuum",
    )
}

fn fields_winding() -> Result<(), String> {
    let grid = Grid2D::new(8.0, 201).map_err(err)?;
    let bg = build_background(&[[0.0, 0.0]], grid);
    let f = reconstruct_fields(&bg.u0, &[[0.0, 0.0]]).map_err(err)?;
    let w = winding_number(&f, [0.0, 0.0], 4.0, 400);
    ensure((w - 1.0).abs() < 1e-12, format!("winding {w}"))
}

fn integrals_vacuum() -> Result<(), String> {
    let grid = Grid2D::new(5.0, 33).map_err(err)?;
    let u = ScalarField2D::zeros(grid);
    let e = ScalarField2D::constant(grid, 1.0);
    let f = reconstruct_fields(&u, &[]).map_err(err)?;
    ensure(flux_selfdual(&f.exp_u, &e).value == 0.0, "flux")?;
    ensure(energy_density_reduced(&f, &u, &e).integrate() == 0.0, "energy")?;
    ensure(f.j12.integrate() == 0.0, "current")?;
    ensure(total_curvature(&e).total.value == 0.0, "curvature")
}

fn integrals_deficit() -> Result<(), String> {
    let p = PhysicalParams::centered(1.0, 0.003, 1.0, 3);
    ensure((p.deficit_angle() - 8.0 * PI * PI * 0.003 * 3.0).abs() < 1e-15, "deficit")
}

fn decay_square() -> Result<(), String> {
    let r: Vec<f64> = (0..40).map(|k| 10f64.powf(k as f64 / 20.0)).collect();
    let f: Vec<f64> = r.iter().map(|x| x.powi(-2)).collect();
    let fit = decay_fit(&r, &f, &FitWindow::default()).map_err(err)?;
    ensure((fit.exponent - 2.0).abs() < 0.01 && fit.half_width() < 0.01, format!("{fit:?}"))
}

fn decay_perturbed() -> Result<(), String> {
    let r: Vec<f64> = (0..60).map(|k| 2.0 * 10f64.powf(k as f64 / 30.0)).collect();
    let f: Vec<f64> = r.iter().map(|x| 5.0 * x.powi(-3) * (1.0 + 0.01 * x.sin())).collect();
    let fit = decay_fit(&r, &f, &FitWindow::default()).map_err(err)?;
    ensure(fit.contains(3.0), format!("{fit:?}"))
}

fn cli_empty_sweep() -> Result<(), String> {
    let cfg = Config::from_json(r#"{"lambda": 1, "G": 0, "g0": 1, "points": [[0, 0]], "grid": {"R": 10, "n": 65}}"#)
        .map_err(err)?;
    let csv = crate::cli::sweep_csv(&cfg, &[], "G", &[]);
    ensure(csv == format!("{}\n", crate::cli::sweep_header()), csv)
}

fn cli_validation() -> Result<(), String> {
    let cfg = Config::from_json(r#"{"lambda": 1, "G": 0.5, "g0": 1, "points": [[0, 0]], "grid": {"R": 10, "n": 65}}"#)
        .map_err(err)?;
    let e = crate::runner::run_planar(&cfg).err().ok_or("accepted")?;
    ensure(crate::cli::exit_code(&e) == 2, format!("{e}"))
}

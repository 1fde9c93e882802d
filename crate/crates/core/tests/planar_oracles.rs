//! Planar solutions against symmetry, the radial profile and the self-dual
//! integrals.

use std::f64::consts::PI;

use gl_vortex::observables::integrals::{phi_abs_on_ray, planar_observables};
use gl_vortex::observables::reconstruct_fields;
use gl_vortex::params::{make_grid, PhysicalParams, RadialGrid, RadialGridSpec};
use gl_vortex::planar::{build_background, monotone_solve, PlanarSolution, SolveOptions};
use gl_vortex::radial::{fixed_point_t, RadialOptions};

fn solve(p: &PhysicalParams, half: f64, n: usize) -> PlanarSolution {
    let grid = make_grid(half, n, &p.points).unwrap();
    let bg = build_background(&p.points, grid);
    monotone_solve(&bg, p, &SolveOptions::default(), None).unwrap()
}

#[test]
fn mirror_symmetric_pair() {
    let p = PhysicalParams::new(1.0, 0.0, 1.0, vec![[-2.0, 0.0], [2.0, 0.0]]);
    let s = solve(&p, 16.0, 257);
    let n = s.u.grid.n;
    let mut worst: f64 = 0.0;
    for j in 0..n {
        for i in 0..n {
            let a = s.u.at(i, j);
            worst = worst.max((a - s.u.at(n - 1 - i, j)).abs());
            worst = worst.max((a - s.u.at(i, n - 1 - j)).abs());
        }
    }
    assert!(worst < 1e-9, "{worst}");
    let f = reconstruct_fields(&s.u, &p.points).unwrap();
    let o = planar_observables(&s.u, &s.metric.values, &p, &f).unwrap();
    assert!((o.flux.value - 4.0 * PI).abs() < 0.01 * 4.0 * PI, "{}", o.flux.value);
    assert!((o.energy.value - 2.0 * PI).abs() < 0.02 * 2.0 * PI, "{}", o.energy.value);
}

#[test]
fn single_vortex_matches_radial_profile() {
    let p = PhysicalParams::centered(1.0, 0.0, 1.0, 1);
    let s = solve(&p, 16.0, 257);
    let f = reconstruct_fields(&s.u, &p.points).unwrap();
    let rs = fixed_point_t(&p, &RadialGrid::graded(&RadialGridSpec::default()).unwrap(), None, &RadialOptions::default())
        .unwrap();
    let radii: Vec<f64> = (5..=60).map(|k| 0.1 * k as f64).collect();
    for angle in [0.0, 0.7, 2.0] {
        let on_ray = phi_abs_on_ray(&f, angle, &radii);
        for (k, &r) in radii.iter().enumerate() {
            let d = (on_ray[k] - rs.u.eval(r, 1.0).0).abs();
            assert!(d < 5e-3, "angle {angle} r {r}: {d}");
        }
    }
}

#[test]
fn translated_vortex_keeps_integrals() {
    let at0 = PhysicalParams::centered(1.0, 0.0, 1.0, 1);
    let off = PhysicalParams::new(1.0, 0.0, 1.0, vec![[1.25, -2.5]]);
    let mut out = Vec::new();
    for p in [&at0, &off] {
        let s = solve(p, 16.0, 257);
        let f = reconstruct_fields(&s.u, &p.points).unwrap();
        out.push(planar_observables(&s.u, &s.metric.values, p, &f).unwrap());
    }
    assert!((out[0].flux.value - out[1].flux.value).abs() < 1e-3);
    assert!((out[0].energy.value - out[1].energy.value).abs() < 1e-2);
}

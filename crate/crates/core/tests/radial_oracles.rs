//! Radial solutions against closed forms and an independent first-order
//! integration.

use std::f64::consts::PI;

use gl_vortex::metric::RadialMetricMode;
use gl_vortex::observables::radial_observables;
use gl_vortex::params::{PhysicalParams, RadialGrid, RadialGridSpec};
use gl_vortex::radial::{fixed_point_t, RadialOptions, RadialSolution, VEquation};

fn grid() -> RadialGrid {
    RadialGrid::graded(&RadialGridSpec::default()).unwrap()
}

fn solve(n: usize, delta: f64, opts: &RadialOptions) -> RadialSolution {
    let g = if delta > 0.0 { PhysicalParams::g_for_delta(delta, n) } else { 0.0 };
    let p = PhysicalParams::centered(1.0, g, 1.0, n);
    fixed_point_t(&p, &grid(), None, opts).unwrap()
}

/// Self-dual pair `u' = N(1-v)u/r`, `v' = r(1-u^2)/(2N)` shot on `a` with
/// fixed-step RK4 in `t = ln r`; returns the `a` separating "u reaches 1"
/// from "v reaches 1".
fn first_order_slope(n: usize) -> f64 {
    let nf = n as f64;
    let rhs = |t: f64, s: [f64; 2]| {
        let r2 = (2.0 * t).exp();
        [nf * (1.0 - s[1]) * s[0], r2 * (1.0 - s[0] * s[0]) / (2.0 * nf)]
    };
    let u_wins = |a: f64| -> bool {
        let h = 1e-3;
        let r0: f64 = 1e-4;
        let mut t = r0.ln();
        let mut s = [a * r0.powi(n as i32), r0 * r0 / (4.0 * nf)];
        while t < 15f64.ln() {
            let k1 = rhs(t, s);
            let k2 = rhs(t + h / 2.0, [s[0] + h / 2.0 * k1[0], s[1] + h / 2.0 * k1[1]]);
            let k3 = rhs(t + h / 2.0, [s[0] + h / 2.0 * k2[0], s[1] + h / 2.0 * k2[1]]);
            let k4 = rhs(t + h, [s[0] + h * k3[0], s[1] + h * k3[1]]);
            for c in 0..2 {
                s[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
            }
            t += h;
            if s[0] >= 1.0 {
                return true;
            }
            if s[1] >= 1.0 {
                return false;
            }
        }
        s[0] > s[1]
    };
    let (mut lo, mut hi) = (1e-3, 10.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if u_wins(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn flat_gauge_slope_is_one_over_4n() {
    for n in [1, 2] {
        let s = solve(n, 0.0, &RadialOptions::default());
        let b = 1.0 / (4.0 * n as f64);
        assert!((s.b_star - b).abs() < 1e-6 * b, "N={n}: {} vs {b}", s.b_star);
    }
}

#[test]
fn full_form_power_law_gauge_slope() {
    // with e^eta = r^-delta the self-dual relation gives v ~ r^(2-delta) / (2N(2-delta))
    let opts = RadialOptions {
        v_equation: VEquation::FullEulerLagrange,
        metric_mode: RadialMetricMode::PurePowerLaw,
        ..Default::default()
    };
    let s = solve(2, 0.25, &opts);
    assert!((s.b_star - 1.0 / 7.0).abs() < 1e-5, "{}", s.b_star);
}

#[test]
fn matter_slope_matches_first_order_integration() {
    for n in [1, 2] {
        let s = solve(n, 0.0, &RadialOptions::default());
        let oracle = first_order_slope(n);
        assert!((s.a_star - oracle).abs() < 1e-5 * oracle, "N={n}: {} vs {oracle}", s.a_star);
    }
}

#[test]
fn flat_profiles_satisfy_first_order_relations() {
    let s = solve(2, 0.0, &RadialOptions::default());
    let x = s.grid().nodes.clone();
    for (k, &r) in x.iter().enumerate().filter(|(_, &r)| (0.01..20.0).contains(&r)) {
        let (u, du, v, dv) = (s.u.values[k], s.u.derivs[k], s.v.values[k], s.v.derivs[k]);
        assert!((du - 2.0 * (1.0 - v) * u / r).abs() < 1e-6, "r={r}");
        assert!((dv - r * (1.0 - u * u) / 4.0).abs() < 1e-6, "r={r}");
    }
}

#[test]
fn flat_energy_and_flux() {
    for n in [1, 2] {
        let s = solve(n, 0.0, &RadialOptions::default());
        let o = radial_observables(&s);
        let nf = n as f64;
        assert!((o.energy.value - PI * nf).abs() < 1e-3 * PI * nf, "N={n}: {}", o.energy.value);
        assert!((o.flux - 2.0 * PI * nf).abs() < 1e-5, "N={n}: {}", o.flux);
    }
}

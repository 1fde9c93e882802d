//! Starting values near the origin.

use super::model::{RadialModel, VEquation};
use super::profile::RadialProfile;
use crate::quad::adaptive_simpson;

/// `(u, u')` at small `r` for shooting parameter `a`: `a r^N` plus one Picard
/// pass of the variation-of-constants form with `a s^N` under the integral.
pub fn local_series_u(a: f64, r: f64, model: &RadialModel, v: &RadialProfile) -> (f64, f64) {
    let (u, du) = leading_u(a, r, model.n);
    let (cu, cdu) = series_u_correction(a, r, model, v);
    (u + cu, du + cdu)
}

/// The Picard correction to `(u, u')` on its own.
pub fn series_u_correction(a: f64, r: f64, model: &RadialModel, v: &RadialProfile) -> (f64, f64) {
    let n = model.n as i32;
    let nf = model.nf();
    let bracket = |s: f64| {
        let (vv, _) = v.eval(s, model.v_power());
        let (e, _) = model.metric.eval(s);
        let u0 = a * s.powi(n);
        nf * nf * (vv * vv - 2.0 * vv) / (s * s) + 0.5 * model.lambda * e * (u0 * u0 - 1.0)
    };
    let guard = |s: f64, f: &dyn Fn(f64) -> f64| if s <= 0.0 { 0.0 } else { f(s) };
    let ku = |s: f64| (r.powi(n) * s - s.powi(2 * n + 1) / r.powi(n)) * bracket(s);
    let kd = |s: f64| (r.powi(n - 1) * s + s.powi(2 * n + 1) / r.powi(n + 1)) * bracket(s);
    let scale = (bracket(r).abs() * r.powi(n + 2)).max(f64::MIN_POSITIVE);
    let iu = adaptive_simpson(&|s| guard(s, &ku), 0.0, r, 1e-12 * scale);
    let id = adaptive_simpson(&|s| guard(s, &kd), 0.0, r, 1e-12 * scale / r);
    (a / (2.0 * nf) * iu, 0.5 * a * id)
}

/// Leading part `a r^N` alone (the uncorrected start).
pub fn leading_u(a: f64, r: f64, n: usize) -> (f64, f64) {
    let n = n as i32;
    (a * r.powi(n), n as f64 * a * r.powi(n - 1))
}

/// `(v, v')` at small `r` for shooting parameter `b`: `b r^p` with `p` the
/// model's leading power, plus one Picard pass of
/// `v = b r^2 + 1/2 int_0^r (r^2/s - s) u^2 (v - 1) e^eta ds` for the reduced
/// equation.
pub fn local_series_v(b: f64, r: f64, model: &RadialModel, u: &RadialProfile) -> (f64, f64) {
    let p = model.v_power();
    let lead = (b * r.powf(p), p * b * r.powf(p - 1.0));
    if model.v_equation == VEquation::FullEulerLagrange {
        return lead;
    }
    let src = |s: f64| {
        if s <= 0.0 {
            return 0.0;
        }
        let (uu, _) = u.eval(s, model.nf());
        let (e, _) = model.metric.eval(s);
        uu * uu * (b * s * s - 1.0) * e
    };
    let scale = (src(r).abs() * r * r).max(f64::MIN_POSITIVE);
    let iv = adaptive_simpson(
        &|s| {
            if s <= 0.0 {
                0.0
            } else {
                (r * r / s - s) * src(s)
            }
        },
        0.0,
        r,
        1e-12 * scale,
    );
    let id = adaptive_simpson(
        &|s| if s <= 0.0 { 0.0 } else { r / s * src(s) },
        0.0,
        r,
        1e-12 * scale / r,
    );
    (lead.0 + 0.5 * iv, lead.1 + id)
}

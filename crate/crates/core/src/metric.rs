//! Gravitational conformal factor `e^eta`, its Gauss curvature, and the
//! radial metric profiles used by the radially symmetric solver.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Result, VortexError};
use crate::field::ScalarField2D;
use crate::params::PhysicalParams;
use crate::planar::background::{build_background, BackgroundPair};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MetricSource {
    /// Evaluated from the matter field `u`.
    SelfConsistent,
    /// `g0 r^{-delta}`.
    PowerLaw { delta: f64, g0: f64 },
}

/// Samples of `e^eta` (strictly positive).
#[derive(Debug, Clone)]
pub struct MetricField {
    pub values: ScalarField2D,
    pub source: MetricSource,
}

impl MetricField {
    /// `eta = ln e^eta`.
    pub fn eta(&self) -> ScalarField2D {
        self.values.map(f64::ln)
    }
}

/// `e^eta = g0 (e^{u - e^u} prod_s |x - p_s|^{-2})^{4 pi G}` evaluated from a
/// sampled `u` on the params' vortex set.
///
/// Nodes that coincide with a vortex must carry the regularized value of `u`
/// produced by [`BackgroundPair::compose_u`].
pub fn metric_factor(u: &ScalarField2D, params: &PhysicalParams) -> Result<MetricField> {
    let bg = build_background(&params.points, u.grid);
    let v = u.zip_map(&bg.u0, |a, b| a - b);
    metric_from_v(&v, &bg, params)
}

/// Metric factor through the regularized identity
/// `e^eta = g0 exp(4 pi G (v + rho - e^{u0 + v}))`, exact algebra on the
/// defining formula with `u = u0 + v`; no singular factor is ever formed.
pub fn metric_from_v(
    v: &ScalarField2D,
    bg: &BackgroundPair,
    params: &PhysicalParams,
) -> Result<MetricField> {
    let grid = v.grid;
    let mut values = ScalarField2D::zeros(grid);
    if params.g_newton == 0.0 {
        values.data.fill(params.g0);
    } else {
        let c = 4.0 * PI * params.g_newton;
        for k in 0..grid.len() {
            let eu = bg.p.data[k] * v.data[k].exp();
            values.data[k] = params.g0 * (c * (v.data[k] + bg.rho.data[k] - eu)).exp();
        }
    }
    for (k, &val) in values.data.iter().enumerate() {
        if !(val.is_finite() && val > 0.0) {
            return Err(VortexError::NonFiniteMetric {
                i: k % grid.n,
                j: k / grid.n,
                value: val,
            });
        }
    }
    Ok(MetricField {
        values,
        source: MetricSource::SelfConsistent,
    })
}

/// `K = -1/2 e^{-eta} Laplacian(eta)` nodewise (five-point stencil, one-sided
/// second differences on the boundary ring).
pub fn gauss_curvature(eta: &ScalarField2D) -> ScalarField2D {
    let lap = eta.laplacian();
    eta.zip_map(&lap, |e, l| -0.5 * (-e).exp() * l)
}

/// Radial metric realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RadialMetricMode {
    /// `g0 r^{-delta}` on all of `(0, inf)`.
    #[default]
    PurePowerLaw,
    /// `g0 (u^2 e^{-u^2} r^{-2N})^{4 pi G}` from the current radial `u`.
    SelfConsistent,
}

/// Matter-field state at one radius, as needed by the self-consistent mode.
#[derive(Debug, Clone, Copy)]
pub struct RadialMatterState {
    /// `|phi|` at this radius.
    pub u: f64,
    /// `u / r^N`, finite as `r -> 0`.
    pub u_over_rn: f64,
}

/// `e^{eta(r)}` for the chosen mode. The self-consistent mode needs the
/// matter state at `r`.
pub fn radial_metric_profile(
    r: f64,
    params: &PhysicalParams,
    mode: RadialMetricMode,
    state: Option<RadialMatterState>,
) -> Result<f64> {
    if !(r > 0.0) {
        return Err(VortexError::Domain(format!(
            "radius must be positive, got {r}"
        )));
    }
    match mode {
        RadialMetricMode::PurePowerLaw => Ok(power_law_metric(r, params.g0, params.delta())),
        RadialMetricMode::SelfConsistent => {
            let s = state.ok_or_else(|| {
                VortexError::Domain("self-consistent metric needs the current u".into())
            })?;
            Ok(self_consistent_metric(s, params))
        }
    }
}

#[inline]
pub fn power_law_metric(r: f64, g0: f64, delta: f64) -> f64 {
    if delta == 0.0 {
        g0
    } else {
        g0 * r.powf(-delta)
    }
}

/// `g0 (u / r^N)^{8 pi G} e^{-4 pi G u^2}`.
#[inline]
pub fn self_consistent_metric(state: RadialMatterState, params: &PhysicalParams) -> f64 {
    let c = 4.0 * PI * params.g_newton;
    if c == 0.0 {
        return params.g0;
    }
    params.g0 * (2.0 * c * state.u_over_rn.ln() - c * state.u * state.u).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Grid2D;

    #[test]
    fn flat_metric_is_constant() {
        let grid = Grid2D::new(4.0, 17).unwrap();
        let params = PhysicalParams::new(1.0, 0.0, 2.5, vec![[0.0, 0.0]]);
        let u = ScalarField2D::from_fn(grid, |x, y| -(-(x * x + y * y)).exp());
        let m = metric_factor(&u, &params).unwrap();
        assert!(m.values.data.iter().all(|&v| v == 2.5));
    }

    #[test]
    fn vacuum_metric() {
        let grid = Grid2D::new(4.0, 9).unwrap();
        let g = 0.01;
        let params = PhysicalParams::new(1.0, g, 1.0, vec![]);
        let m = metric_factor(&ScalarField2D::zeros(grid), &params).unwrap();
        let expected = (-4.0 * PI * g).exp();
        assert!(m.values.data.iter().all(|&v| (v - expected).abs() < 1e-15));
    }

    #[test]
    fn single_vortex_direct_substitution() {
        let grid = Grid2D::new(4.0, 9).unwrap();
        let g = 0.02;
        let params = PhysicalParams::new(1.0, g, 1.0, vec![[0.0, 0.0]]);
        let bg = build_background(&params.points, grid);
        // u = ln(r^2/(1+r^2)) is exactly u0, i.e. v = 0
        let u = bg.u0.clone();
        let m = metric_factor(&u, &params).unwrap();
        let expected = (0.5 * (-0.5f64).exp()).powf(4.0 * PI * g);
        assert!((m.values.at(5, 4) - expected).abs() < 1e-14);
        // finite and positive at the vortex node itself
        assert!(m.values.at(4, 4) > 0.0 && m.values.at(4, 4).is_finite());
        assert!(m.values.min() > 0.0);
    }

    #[test]
    fn metric_matches_defining_formula_off_vortex() {
        let grid = Grid2D::new(4.0, 33).unwrap();
        let g = 0.015;
        let pts = vec![[0.3, 0.2], [-0.7, 0.0]];
        let params = PhysicalParams::new(1.0, g, 1.3, pts.clone());
        let bg = build_background(&pts, grid);
        let v = ScalarField2D::from_fn(grid, |x, y| 0.3 * (-(x * x + y * y)).exp());
        let m = metric_from_v(&v, &bg, &params).unwrap();
        for j in 0..grid.n {
            for i in 0..grid.n {
                let (x, y) = (grid.coord(i), grid.coord(j));
                let u = bg.u0.at(i, j) + v.at(i, j);
                let prod: f64 = pts
                    .iter()
                    .map(|p| (x - p[0]).powi(2) + (y - p[1]).powi(2))
                    .product();
                let direct = 1.3 * ((u - u.exp()).exp() / prod).powf(4.0 * PI * g);
                assert!((m.values.at(i, j) / direct - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn curvature_of_constant_is_zero() {
        let grid = Grid2D::new(3.0, 31).unwrap();
        let k = gauss_curvature(&ScalarField2D::constant(grid, 0.7));
        assert!(k.sup_norm() < 1e-12);
    }

    #[test]
    fn round_sphere_has_unit_curvature() {
        let mut errs = Vec::new();
        for n in [81, 161] {
            let grid = Grid2D::new(2.0, n).unwrap();
            let eta =
                ScalarField2D::from_fn(grid, |x, y| -2.0 * (1.0 + (x * x + y * y) / 4.0).ln());
            let k = gauss_curvature(&eta);
            let mut err: f64 = 0.0;
            for j in 1..n - 1 {
                for i in 1..n - 1 {
                    err = err.max((k.at(i, j) - 1.0).abs());
                }
            }
            errs.push(err);
        }
        assert!(errs[0] < 5e-3, "{errs:?}");
        // second order
        assert!(errs[0] / errs[1] > 3.5, "{errs:?}");
    }

    #[test]
    fn radial_profiles() {
        let flat = PhysicalParams::centered(1.0, 0.0, 1.7, 2);
        assert_eq!(
            radial_metric_profile(3.0, &flat, RadialMetricMode::PurePowerLaw, None).unwrap(),
            1.7
        );
        let p = PhysicalParams::centered(1.0, PhysicalParams::g_for_delta(0.5, 2), 1.0, 2);
        let v = radial_metric_profile(4.0, &p, RadialMetricMode::PurePowerLaw, None).unwrap();
        assert!((v - 0.5).abs() < 1e-14);
        assert!(radial_metric_profile(0.0, &p, RadialMetricMode::PurePowerLaw, None).is_err());
        assert!(radial_metric_profile(1.0, &p, RadialMetricMode::SelfConsistent, None).is_err());
    }

    #[test]
    fn self_consistent_series_limits() {
        // Oracle: with u = a r^N the defining formula reads
        // g0 (a^2 r^{2N} e^{-a^2 r^{2N}} r^{-2N})^{4 pi G} -> g0 a^{8 pi G} as r -> 0,
        // and for u -> 1 it tends to g0 e^{-4 pi G} r^{-8 pi G N}.
        let n = 2usize;
        let g = PhysicalParams::g_for_delta(0.25, n);
        let p = PhysicalParams::centered(1.0, g, 1.2, n);
        let a: f64 = 0.7;
        for &r in &[1e-3f64, 1e-2] {
            let u = a * r.powi(n as i32);
            let state = RadialMatterState { u, u_over_rn: a };
            let val = radial_metric_profile(r, &p, RadialMetricMode::SelfConsistent, Some(state))
                .unwrap();
            let direct = 1.2 * (u * u * (-u * u).exp() * r.powi(-2 * n as i32)).powf(4.0 * PI * g);
            assert!((val / direct - 1.0).abs() < 1e-12);
            assert!((val / (1.2 * a.powf(8.0 * PI * g)) - 1.0).abs() < 1e-6);
        }
        let r: f64 = 50.0;
        let state = RadialMatterState {
            u: 1.0,
            u_over_rn: r.powi(-(n as i32)),
        };
        let val = self_consistent_metric(state, &p);
        let far = 1.2 * (-4.0 * PI * g).exp() * r.powf(-p.delta());
        assert!((val / far - 1.0).abs() < 1e-12);
    }
}

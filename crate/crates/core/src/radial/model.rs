//! Right-hand sides of the radial system and the metric seen by it.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::profile::RadialProfile;
use crate::metric::{
    power_law_metric, self_consistent_metric, RadialMatterState, RadialMetricMode,
};
use crate::params::PhysicalParams;

/// Form of the gauge-field equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum VEquation {
    /// `v'' - v'/r = u^2 (v - 1) e^eta`.
    #[default]
    Reduced,
    /// Euler-Lagrange equation of the radial energy including the metric
    /// gradient: `v'' - v'/r - eta' v' = u^2 (v - 1) e^eta`.
    FullEulerLagrange,
}

/// `e^eta` and `eta'` as functions of `r`.
#[derive(Debug, Clone)]
pub enum RadialMetric {
    PowerLaw {
        g0: f64,
        delta: f64,
    },
    /// Self-consistent metric frozen from a matter profile `u`; `a0` is the
    /// limit of `u / r^N` at the origin.
    FromMatter {
        u: RadialProfile,
        a0: f64,
        n: usize,
        params: PhysicalParams,
    },
}

impl RadialMetric {
    pub fn new_power_law(params: &PhysicalParams) -> Self {
        Self::PowerLaw {
            g0: params.g0,
            delta: params.delta(),
        }
    }

    pub fn from_matter(u: &RadialProfile, params: &PhysicalParams) -> Self {
        let n = params.vortex_number();
        let a0 = u.values[0] / u.grid.nodes[0].powi(n as i32);
        Self::FromMatter {
            u: u.clone(),
            a0,
            n,
            params: params.clone(),
        }
    }

    pub fn mode(&self) -> RadialMetricMode {
        match self {
            Self::PowerLaw { .. } => RadialMetricMode::PurePowerLaw,
            Self::FromMatter { .. } => RadialMetricMode::SelfConsistent,
        }
    }

    /// Exponent of the far-field decay `e^eta ~ r^-delta`.
    pub fn far_delta(&self) -> f64 {
        match self {
            Self::PowerLaw { delta, .. } => *delta,
            Self::FromMatter { params, .. } => params.delta(),
        }
    }

    /// `(e^eta, eta')` at `r > 0`.
    pub fn eval(&self, r: f64) -> (f64, f64) {
        match self {
            Self::PowerLaw { g0, delta } => (power_law_metric(r, *g0, *delta), -delta / r),
            Self::FromMatter { u, a0, n, params } => {
                let c = 4.0 * PI * params.g_newton;
                let nf = *n as f64;
                let (uu, du, q, log_slope) = if r <= u.grid.r_min {
                    let uu = a0 * r.powi(*n as i32);
                    (uu, nf * uu / r, *a0, 0.0)
                } else if r >= u.grid.r_max {
                    (1.0, 0.0, r.powi(-(*n as i32)), -nf / r)
                } else {
                    let (uu, du) = u.eval(r, nf);
                    (uu, du, uu / r.powi(*n as i32), du / uu - nf / r)
                };
                let e = self_consistent_metric(
                    RadialMatterState {
                        u: uu,
                        u_over_rn: q,
                    },
                    params,
                );
                (e, c * (2.0 * log_slope - 2.0 * uu * du))
            }
        }
    }
}

/// Everything the radial right-hand sides need.
#[derive(Debug, Clone)]
pub struct RadialModel {
    pub n: usize,
    pub lambda: f64,
    pub metric: RadialMetric,
    pub v_equation: VEquation,
}

impl RadialModel {
    pub fn nf(&self) -> f64 {
        self.n as f64
    }

    /// `u''` from the matter equation.
    #[inline]
    pub fn u_second(&self, r: f64, u: f64, du: f64, v: f64, e_eta: f64) -> f64 {
        let nf = self.nf();
        -du / r
            + nf * nf * (v - 1.0) * (v - 1.0) * u / (r * r)
            + 0.5 * self.lambda * (u * u - 1.0) * u * e_eta
    }

    /// `v''` from the gauge equation.
    #[inline]
    pub fn v_second(&self, r: f64, v: f64, dv: f64, u: f64, e_eta: f64, eta_prime: f64) -> f64 {
        let base = dv / r + u * u * (v - 1.0) * e_eta;
        match self.v_equation {
            VEquation::Reduced => base,
            VEquation::FullEulerLagrange => base + eta_prime * dv,
        }
    }

    /// Leading power of `v` at the origin: 2, or `2 - delta` for the full
    /// equation in a conical metric.
    pub fn v_power(&self) -> f64 {
        match (self.v_equation, &self.metric) {
            (VEquation::FullEulerLagrange, RadialMetric::PowerLaw { delta, .. }) => 2.0 - delta,
            _ => 2.0,
        }
    }
}

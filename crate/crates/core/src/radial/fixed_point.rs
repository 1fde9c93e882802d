//! Damped fixed-point iteration `v -> T(v)`, where `T` shoots the matter
//! profile against `v` and then the gauge profile against the result.

use serde::{Deserialize, Serialize};

use super::model::{RadialMetric, RadialModel, VEquation};
use super::profile::RadialProfile;
use super::shooting::{residual_u, residual_v, shoot_u, shoot_v, ShootOptions, ShootStats};
use crate::error::{Result, VortexError};
use crate::metric::RadialMetricMode;
use crate::params::{PhysicalParams, RadialGrid};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadialOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub omega: f64,
    pub metric_mode: RadialMetricMode,
    pub v_equation: VEquation,
    pub shoot: ShootOptions,
}

impl Default for RadialOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 200,
            omega: 1.0,
            metric_mode: RadialMetricMode::PurePowerLaw,
            v_equation: VEquation::Reduced,
            shoot: ShootOptions::default(),
        }
    }
}

/// Serializable summary of a radial solve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadialTelemetry {
    pub a_star: f64,
    pub b_star: f64,
    pub outer_iters: usize,
    pub residual_u: f64,
    pub residual_v: f64,
    pub changes: Vec<f64>,
    pub omega: f64,
    pub shoot_u: ShootStats,
    pub shoot_v: ShootStats,
}

#[derive(Debug, Clone)]
pub struct RadialSolution {
    pub params: PhysicalParams,
    pub u: RadialProfile,
    pub v: RadialProfile,
    pub a_star: f64,
    pub b_star: f64,
    pub outer_iters: usize,
    pub metric_mode: RadialMetricMode,
    /// Model of the last pass; `u` and `v` satisfy its equations.
    pub model: RadialModel,
    pub telemetry: RadialTelemetry,
}

impl RadialSolution {
    pub fn grid(&self) -> &RadialGrid {
        &self.u.grid
    }

    /// `2 pi N (v(r_max) - v(r_min))`.
    pub fn flux(&self) -> f64 {
        let n = self.model.nf();
        2.0 * std::f64::consts::PI * n * (self.v.values[self.v.len() - 1] - self.v.values[0])
    }

    /// `e^eta` at the grid nodes.
    pub fn metric_values(&self) -> Vec<f64> {
        self.grid()
            .nodes
            .iter()
            .map(|&r| self.model.metric.eval(r).0)
            .collect()
    }
}

fn initial_u(grid: &RadialGrid, n: usize) -> RadialProfile {
    let nf = n as f64;
    RadialProfile::from_fn(grid, |r| {
        let q = r * r / (1.0 + r * r);
        let u = q.powf(0.5 * nf);
        (u, nf * u / (r * (1.0 + r * r)))
    })
}

/// Runs the damped iteration from `v_init` (defaults to `r^2/(1+r^2)`).
pub fn fixed_point_t(
    params: &PhysicalParams,
    grid: &RadialGrid,
    v_init: Option<&RadialProfile>,
    opts: &RadialOptions,
) -> Result<RadialSolution> {
    let n = params.vortex_number();
    if n == 0 {
        return Err(VortexError::InvalidParams(
            "radial solve needs N >= 1".into(),
        ));
    }
    if !(params.lambda > 0.0) {
        return Err(VortexError::InvalidParams(format!(
            "lambda = {} must be positive",
            params.lambda
        )));
    }
    if !(opts.omega > 0.0 && opts.omega <= 1.0) {
        return Err(VortexError::InvalidParams(format!(
            "omega = {} outside (0, 1]",
            opts.omega
        )));
    }
    let mut v = match v_init {
        Some(p) => p.clone(),
        None => RadialProfile::default_v(grid),
    };
    let mut u_prev = initial_u(grid, n);
    let mut omega = opts.omega;
    let mut changes: Vec<f64> = Vec::new();
    let mut rises = 0;
    for iter in 1..=opts.max_iter {
        let metric = match opts.metric_mode {
            RadialMetricMode::PurePowerLaw => RadialMetric::new_power_law(params),
            RadialMetricMode::SelfConsistent => RadialMetric::from_matter(&u_prev, params),
        };
        let model = RadialModel {
            n,
            lambda: params.lambda,
            metric,
            v_equation: opts.v_equation,
        };
        let (a, u, su) = shoot_u(&v, &model, &opts.shoot)?;
        let (b, tv, sv) = shoot_v(&u, &model, &opts.shoot)?;
        let mut change = tv.sup_diff(&v);
        if opts.metric_mode == RadialMetricMode::SelfConsistent {
            change = change.max(u.sup_diff(&u_prev));
        }
        if changes.last().is_some_and(|&c| change > c) {
            rises += 1;
            if rises >= 2 {
                omega *= 0.5;
                rises = 0;
            }
        } else {
            rises = 0;
        }
        changes.push(change);
        if change < opts.tol {
            let residual_u = residual_u(&u, &tv, &model);
            let residual_v = residual_v(&u, &tv, &model);
            return Ok(RadialSolution {
                params: params.clone(),
                telemetry: RadialTelemetry {
                    a_star: a,
                    b_star: b,
                    outer_iters: iter,
                    residual_u,
                    residual_v,
                    changes,
                    omega,
                    shoot_u: su,
                    shoot_v: sv,
                },
                u,
                v: tv,
                a_star: a,
                b_star: b,
                outer_iters: iter,
                metric_mode: opts.metric_mode,
                model,
            });
        }
        v = v.blend(&tv, omega);
        u_prev = u;
    }
    let last = changes.last().copied().unwrap_or(f64::NAN);
    let tail = &changes[changes.len().saturating_sub(6)..];
    let oscillating = tail.windows(2).any(|w| w[1] > w[0]);
    Err(VortexError::NoConvergence {
        iterations: opts.max_iter,
        last_change: last,
        hint: if oscillating {
            format!("; changes oscillate, try omega < {omega}")
        } else {
            String::new()
        },
    })
}

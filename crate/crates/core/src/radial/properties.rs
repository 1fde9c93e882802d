//! Qualitative properties of converged radial solutions.

use serde::{Deserialize, Serialize};

use super::fixed_point::RadialSolution;
use super::profile::RadialProfile;
use crate::observables::decay::{decay_fit, FitWindow, PowerFit};

/// Upper end of the near-origin window for the `r^-N u`, `r^-2 v` checks.
pub const R_SMALL: f64 = 0.1;
/// Tail samples used for the exponent fits: `1 - f` between these.
pub const TAIL_WINDOW: [f64; 2] = [1e-8, 1e-2];
const SIGN_SLACK: f64 = 1e-12;
const MONOTONE_SLACK: f64 = 1e-10;
const ORIGIN_SLOPE_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// The statement assumes `N > 1`.
    OutsideHypothesis,
    /// Fit intervals straddle a bound.
    Inconclusive,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PropertyCheck {
    pub name: String,
    pub status: CheckStatus,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PropertyReport {
    pub checks: Vec<PropertyCheck>,
    pub alpha: Option<PowerFit>,
    pub beta: Option<PowerFit>,
}

impl PropertyReport {
    /// No check failed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn status(&self, name: &str) -> Option<CheckStatus> {
        self.checks
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.status)
    }

    pub fn violations(&self) -> Vec<&PropertyCheck> {
        self.checks
            .iter()
            .filter(|c| c.status == CheckStatus::Fail)
            .collect()
    }
}

fn check(name: &str, ok: bool, detail: String) -> PropertyCheck {
    PropertyCheck {
        name: name.into(),
        status: if ok {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        },
        detail,
    }
}

/// Range and monotonicity: `0 <= f <= 1`, `f' >= -1e-10`.
pub fn range_and_monotone(p: &RadialProfile) -> (bool, String) {
    let lo = p.values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = p.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let dmin = p.derivs.iter().cloned().fold(f64::INFINITY, f64::min);
    let ok = lo >= -SIGN_SLACK && hi <= 1.0 + SIGN_SLACK && dmin >= -MONOTONE_SLACK;
    (ok, format!("min {lo:e}, max {hi}, min slope {dmin:e}"))
}

/// Derivative at the origin extrapolated by the quadratic through the first
/// three samples of `f'`.
pub fn origin_slope(p: &RadialProfile) -> f64 {
    let x = &p.grid.nodes;
    let d = &p.derivs;
    let (x0, x1, x2) = (x[0], x[1], x[2]);
    // Lagrange basis at 0
    let l0 = x1 * x2 / ((x0 - x1) * (x0 - x2));
    let l1 = x0 * x2 / ((x1 - x0) * (x1 - x2));
    let l2 = x0 * x1 / ((x2 - x0) * (x2 - x1));
    l0 * d[0] + l1 * d[1] + l2 * d[2]
}

/// `f / r^p` on `(0, r_small]`: bounded (log-slope near the origin above
/// -0.1) and non-increasing.
pub fn scaled_near_origin(p: &RadialProfile, power: f64, r_small: f64) -> (bool, String) {
    let x = &p.grid.nodes;
    let q: Vec<f64> = x
        .iter()
        .zip(&p.values)
        .take_while(|(r, _)| **r <= r_small)
        .map(|(r, f)| f / r.powf(power))
        .collect();
    if q.len() < 3 {
        return (false, "too few nodes below r_small".into());
    }
    let log_slope = (q[1] / q[0]).ln() / (x[1] / x[0]).ln();
    let bounded = q.iter().all(|v| v.is_finite()) && log_slope > -0.1;
    let rises = q.windows(2).filter(|w| w[1] > w[0] * (1.0 + 1e-9)).count();
    (
        bounded && rises == 0,
        format!(
            "f/r^{power} from {} to {}, log-slope at origin {log_slope:.3}, {rises} rises",
            q[0],
            q[q.len() - 1]
        ),
    )
}

/// Power-law fit of `1 - f` where it lies inside [`TAIL_WINDOW`] and the
/// profile comes from integration.
pub fn tail_fit(p: &RadialProfile) -> Result<PowerFit, String> {
    let (mut r, mut w) = (Vec::new(), Vec::new());
    for (k, &x) in p.grid.nodes.iter().enumerate() {
        let gap = 1.0 - p.values[k];
        if x <= p.trusted_until && (TAIL_WINDOW[0]..=TAIL_WINDOW[1]).contains(&gap) {
            r.push(x);
            w.push(gap);
        }
    }
    let window = FitWindow {
        min_samples: 20,
        min_ratio: 1.5,
        monotone_slack: 1e-9,
    };
    decay_fit(&r, &w, &window).map_err(|e| e.to_string())
}

pub fn verify_radial_properties(sol: &RadialSolution) -> PropertyReport {
    let n = sol.model.n;
    let delta = sol.model.metric.far_delta();
    let mut checks = Vec::new();

    let (ou, du) = range_and_monotone(&sol.u);
    let (ov, dv) = range_and_monotone(&sol.v);
    checks.push(check(
        "bounds_and_monotone",
        ou && ov,
        format!("u: {du}; v: {dv}"),
    ));

    let su = origin_slope(&sol.u);
    let sv = origin_slope(&sol.v);
    let detail = format!("u'(0) ~ {su:e}, v'(0) ~ {sv:e}");
    if n > 1 {
        checks.push(check(
            "origin_slopes",
            su.abs() < ORIGIN_SLOPE_TOL && sv.abs() < ORIGIN_SLOPE_TOL,
            detail,
        ));
    } else {
        checks.push(PropertyCheck {
            name: "origin_slopes".into(),
            status: CheckStatus::OutsideHypothesis,
            detail: format!("outside hypothesis N>1 (N = 1, u'(0) = a); {detail}"),
        });
    }

    let (qu, du) = scaled_near_origin(&sol.u, n as f64, R_SMALL);
    let (qv, dv) = scaled_near_origin(&sol.v, sol.model.v_power(), R_SMALL);
    checks.push(check(
        "scaled_near_origin",
        qu && qv,
        format!("u: {du}; v: {dv}"),
    ));

    let alpha = tail_fit(&sol.u);
    let beta = tail_fit(&sol.v);
    let tail = match (&alpha, &beta) {
        (Ok(a), Ok(b)) => {
            let detail = format!(
                "alpha in [{:.3}, {:.3}], beta in [{:.3}, {:.3}], delta {delta}",
                a.interval[0], a.interval[1], b.interval[0], b.interval[1]
            );
            let sure = a.interval[0] > 1.0
                && b.interval[0] > 0.0
                && a.interval[1] < 2.0 + 2.0 * b.interval[0] - delta;
            let refuted = a.interval[1] <= 1.0
                || b.interval[1] <= 0.0
                || a.interval[0] >= 2.0 + 2.0 * b.interval[1] - delta;
            PropertyCheck {
                name: "tail_exponents".into(),
                status: if sure {
                    CheckStatus::Pass
                } else if refuted {
                    CheckStatus::Fail
                } else {
                    CheckStatus::Inconclusive
                },
                detail,
            }
        }
        (a, b) => check(
            "tail_exponents",
            false,
            format!(
                "fit failed: u {}, v {}",
                a.as_ref().err().map_or("ok", |s| s.as_str()),
                b.as_ref().err().map_or("ok", |s| s.as_str())
            ),
        ),
    };
    checks.push(tail);

    PropertyReport {
        checks,
        alpha: alpha.ok(),
        beta: beta.ok(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{RadialGrid, RadialGridSpec};

    fn grid() -> RadialGrid {
        RadialGrid::graded(&RadialGridSpec::default()).unwrap()
    }

    #[test]
    fn linear_start_is_unbounded_after_scaling() {
        // u = r/(1+r) with N = 2: u/r^2 = 1/(r(1+r)) blows up at the origin
        let p = RadialProfile::from_fn(&grid(), |r| (r / (1.0 + r), 1.0 / (1.0 + r).powi(2)));
        let (ok, detail) = scaled_near_origin(&p, 2.0, R_SMALL);
        assert!(!ok, "{detail}");
        let q = RadialProfile::from_fn(&grid(), |r| {
            (r * r / (1.0 + r * r), 2.0 * r / (1.0 + r * r).powi(2))
        });
        assert!(scaled_near_origin(&q, 2.0, R_SMALL).0);
    }

    #[test]
    fn origin_slope_of_quadratic_start() {
        let p = RadialProfile::from_fn(&grid(), |r| (0.3 * r * r, 0.6 * r));
        assert!(origin_slope(&p).abs() < 1e-15);
        let lin = RadialProfile::from_fn(&grid(), |r| (0.3 * r, 0.3));
        assert!((origin_slope(&lin) - 0.3).abs() < 1e-12);
    }

    #[test]
    fn range_check_flags_decrease() {
        let p = RadialProfile::from_fn(&grid(), |r| ((-r).exp(), -(-r).exp()));
        assert!(!range_and_monotone(&p).0);
    }
}

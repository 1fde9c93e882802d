//! Report of every observable, as JSON and as one CSV row.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::decay::PowerFit;
use super::integrals::PlanarObservables;
use super::radial::RadialObservables;
use crate::params::PhysicalParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolutionKind {
    Planar,
    Radial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct DecayEntries {
    pub b_u: Option<PowerFit>,
    pub b_grad: Option<PowerFit>,
    #[serde(rename = "b_F12")]
    pub b_f12: Option<PowerFit>,
}

/// Quadrature error estimate of each entry (`None` where not applicable).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct ErrorEntries {
    pub flux: Option<f64>,
    pub energy: Option<f64>,
    pub total_curvature: Option<f64>,
    pub current_flux: Option<f64>,
}

/// Second routes to the same quantities and the consistency diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct CrossChecks {
    /// `2 pi N` for the upper-sign system.
    pub flux_target: f64,
    /// Planar: `int F12` from the curl of `A`; radial: the quadrature of
    /// `2 pi N int v' dr`.
    pub flux_second_route: Option<f64>,
    pub boundary_circulation: Option<f64>,
    pub energy_defining: Option<f64>,
    pub current_flux_identity: Option<f64>,
    pub energy_minus_flux: Option<f64>,
    pub twice_energy_minus_flux: Option<f64>,
    /// Which energy identity the measured current flux matches.
    pub current_flux_branch: Option<String>,
    pub curvature_tail: Option<f64>,
    pub metric_log_slope: Option<f64>,
    pub dphi_discrepancy: Option<f64>,
    pub j12_discrepancy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableReport {
    pub kind: SolutionKind,
    pub n: usize,
    pub lambda: f64,
    #[serde(rename = "G")]
    pub g_newton: f64,
    pub g0: f64,
    pub delta: f64,
    pub flux: f64,
    pub energy: f64,
    pub total_curvature: Option<f64>,
    pub deficit_angle: f64,
    pub current_flux: Option<f64>,
    pub decay: DecayEntries,
    pub errors: ErrorEntries,
    pub checks: CrossChecks,
    pub notes: Vec<String>,
}

/// Relative tolerance used to name the matching current-flux identity.
const BRANCH_TOL: f64 = 0.03;

impl ObservableReport {
    pub fn from_planar(params: &PhysicalParams, o: &PlanarObservables) -> Self {
        let n = params.vortex_number();
        let scale = (PI * n as f64).max(1.0);
        let direct = o.current.direct.value;
        let branch = if (direct - o.current.twice_energy_minus_flux).abs() <= BRANCH_TOL * scale {
            "2E - flux"
        } else if (direct - o.current.energy_minus_flux).abs() <= BRANCH_TOL * scale {
            "E - flux"
        } else {
            "neither"
        };
        Self {
            kind: SolutionKind::Planar,
            n,
            lambda: params.lambda,
            g_newton: params.g_newton,
            g0: params.g0,
            delta: params.delta(),
            flux: o.flux.value,
            energy: o.energy.value,
            total_curvature: Some(o.curvature.total.value),
            deficit_angle: o.deficit_angle,
            current_flux: Some(direct),
            decay: DecayEntries {
                b_u: o.decay.b_u,
                b_grad: o.decay.b_grad,
                b_f12: o.decay.b_f12,
            },
            errors: ErrorEntries {
                flux: Some(o.flux.error),
                energy: Some(o.energy.error),
                total_curvature: Some(o.curvature.total.error),
                current_flux: Some(o.current.direct.error),
            },
            checks: CrossChecks {
                flux_target: 2.0 * PI * n as f64,
                flux_second_route: Some(o.flux_curl.value),
                boundary_circulation: Some(o.boundary_circulation),
                energy_defining: Some(o.energy_defining.value),
                current_flux_identity: Some(o.current.identity.value),
                energy_minus_flux: Some(o.current.energy_minus_flux),
                twice_energy_minus_flux: Some(o.current.twice_energy_minus_flux),
                current_flux_branch: Some(branch.to_string()),
                curvature_tail: Some(o.curvature.tail),
                metric_log_slope: Some(o.metric_slope),
                dphi_discrepancy: Some(o.dphi_discrepancy),
                j12_discrepancy: Some(o.j12_discrepancy),
            },
            notes: o.decay.notes.clone(),
        }
    }

    pub fn from_radial(params: &PhysicalParams, o: &RadialObservables, alpha: Option<PowerFit>, beta: Option<PowerFit>) -> Self {
        let n = params.vortex_number();
        Self {
            kind: SolutionKind::Radial,
            n,
            lambda: params.lambda,
            g_newton: params.g_newton,
            g0: params.g0,
            delta: params.delta(),
            flux: o.flux,
            energy: o.energy.value,
            total_curvature: None,
            deficit_angle: params.deficit_angle(),
            current_flux: None,
            decay: DecayEntries {
                b_u: alpha,
                b_grad: None,
                b_f12: beta,
            },
            errors: ErrorEntries {
                flux: Some((o.flux_quadrature - o.flux).abs()),
                energy: Some(o.energy.error),
                ..ErrorEntries::default()
            },
            checks: CrossChecks {
                flux_target: 2.0 * PI * n as f64,
                flux_second_route: Some(o.flux_quadrature),
                ..CrossChecks::default()
            },
            notes: vec!["radial decay entries: b_u is the fit of 1 - u, b_F12 the fit of 1 - v".into()],
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn csv_header() -> &'static str {
        "kind,N,lambda,G,g0,delta,flux,flux_err,energy,energy_err,total_curvature,total_curvature_err,deficit_angle,current_flux,current_flux_err,b_u,b_u_lo,b_u_hi,b_grad,b_grad_lo,b_grad_hi,b_F12,b_F12_lo,b_F12_hi"
    }

    /// One CSV line matching [`Self::csv_header`]; absent entries are empty.
    pub fn csv_row(&self) -> String {
        let opt = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
        let fit = |f: &Option<PowerFit>| match f {
            Some(p) => format!("{:e},{:e},{:e}", p.exponent, p.interval[0], p.interval[1]),
            None => ",,".into(),
        };
        let kind = match self.kind {
            SolutionKind::Planar => "planar",
            SolutionKind::Radial => "radial",
        };
        [
            kind.to_string(),
            self.n.to_string(),
            format!("{:e}", self.lambda),
            format!("{:e}", self.g_newton),
            format!("{:e}", self.g0),
            format!("{:e}", self.delta),
            format!("{:e}", self.flux),
            opt(self.errors.flux),
            format!("{:e}", self.energy),
            opt(self.errors.energy),
            opt(self.total_curvature),
            opt(self.errors.total_curvature),
            format!("{:e}", self.deficit_angle),
            opt(self.current_flux),
            opt(self.errors.current_flux),
            fit(&self.decay.b_u),
            fit(&self.decay.b_grad),
            fit(&self.decay.b_f12),
        ]
        .join(",")
    }
}

//! Solve-and-measure pipelines shared by the command line, sweeps and tests.

use serde_json::{json, Value};

use crate::config::Config;
use crate::error::Result;
use crate::observables::integrals::{field_strength, planar_observables, PlanarObservables};
use crate::observables::{radial_observables, reconstruct_fields, GaugeFields, ObservableReport, RadialObservables};
use crate::params::PhysicalParams;
use crate::planar::{build_background, monotone_solve, PlanarSolution};
use crate::radial::{fixed_point_t, verify_radial_properties, PropertyReport, RadialSolution};

pub struct PlanarRun {
    pub params: PhysicalParams,
    pub solution: PlanarSolution,
    pub fields: GaugeFields,
    pub observables: PlanarObservables,
    pub report: ObservableReport,
}

impl PlanarRun {
    /// Solver diagnostics as JSON.
    pub fn telemetry(&self) -> Value {
        let s = &self.solution;
        json!({
            "outer_iters": s.outer_iters,
            "inner_iters": s.telemetry.inner_iters,
            "outer_changes": s.telemetry.outer_changes,
            "linear_cycles": s.telemetry.linear_cycles,
            "max_increase": s.telemetry.max_increase,
            "max_u_iterates": s.telemetry.max_u_iterates,
            "max_u_start": s.telemetry.max_u_start,
            "max_u": s.u.max(),
            "pde_residual": s.pde_residual(),
            "truncation_residual": s.truncation_residual(),
            "dphi_discrepancy": self.fields.dphi_discrepancy,
            "j12_discrepancy": self.fields.j12_discrepancy,
        })
    }

    /// `F12 = -1/2 e^eta (e^u - 1)` at the nodes.
    pub fn f12(&self) -> crate::field::ScalarField2D {
        field_strength(&self.fields.exp_u, &self.solution.metric.values)
    }
}

pub fn run_planar(cfg: &Config) -> Result<PlanarRun> {
    let params = cfg.params();
    params.ensure_valid()?;
    let grid = cfg.grid2d()?;
    let bg = build_background(&params.points, grid);
    let solution = monotone_solve(&bg, &params, &cfg.planar_options(), None)?;
    let fields = reconstruct_fields(&solution.u, &params.points)?;
    let observables = planar_observables(&solution.u, &solution.metric.values, &params, &fields)?;
    let report = ObservableReport::from_planar(&params, &observables);
    Ok(PlanarRun {
        params,
        solution,
        fields,
        observables,
        report,
    })
}

pub struct RadialRun {
    pub params: PhysicalParams,
    pub solution: RadialSolution,
    pub properties: PropertyReport,
    pub observables: RadialObservables,
    pub report: ObservableReport,
}

impl RadialRun {
    /// `{a_star, b_star, outer_iters, residual_u, residual_v, alpha_fit,
    /// beta_fit}` followed by the remaining diagnostics.
    pub fn telemetry(&self) -> Value {
        let t = &self.solution.telemetry;
        json!({
            "a_star": t.a_star,
            "b_star": t.b_star,
            "outer_iters": t.outer_iters,
            "residual_u": t.residual_u,
            "residual_v": t.residual_v,
            "alpha_fit": self.properties.alpha,
            "beta_fit": self.properties.beta,
            "changes": t.changes,
            "omega": t.omega,
            "shoot_u": t.shoot_u,
            "shoot_v": t.shoot_v,
            "properties": self.properties,
        })
    }
}

pub fn run_radial(cfg: &Config) -> Result<RadialRun> {
    let params = cfg.params();
    params.ensure_valid()?;
    cfg.check_radial_points()?;
    let grid = cfg.radial_grid()?;
    let solution = fixed_point_t(&params, &grid, None, &cfg.radial_options())?;
    let properties = verify_radial_properties(&solution);
    let observables = radial_observables(&solution);
    let report = ObservableReport::from_radial(&params, &observables, properties.alpha, properties.beta);
    Ok(RadialRun {
        params,
        solution,
        properties,
        observables,
        report,
    })
}

/// Planar when the config has a `grid` section, radial otherwise.
pub fn run_report(cfg: &Config) -> Result<ObservableReport> {
    if cfg.grid.is_some() {
        Ok(run_planar(cfg)?.report)
    } else {
        Ok(run_radial(cfg)?.report)
    }
}

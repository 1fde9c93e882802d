//! Flux and energy of a radial solution.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::integrals::Estimate;
use crate::quad::{trapezoid, trapezoid_coarse};
use crate::radial::profile::differentiate;
use crate::radial::RadialSolution;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialObservables {
    /// `2 pi N (v(r_max) - v(r_min))`.
    pub flux: f64,
    /// `2 pi N int v' dr` by end-corrected trapezoid on the derivative
    /// samples.
    pub flux_quadrature: f64,
    pub energy: Estimate,
}

/// `2 pi N int_{r_min}^{r_max} v' dr` by the trapezoid with the first two
/// endpoint corrections on every cell; `v''` comes from the equation and its
/// second derivative from finite differences.
pub fn radial_flux_quadrature(sol: &RadialSolution) -> f64 {
    let x = &sol.grid().nodes;
    let m = &sol.model;
    let second: Vec<f64> = x
        .iter()
        .enumerate()
        .map(|(k, &r)| {
            let (e, de) = m.metric.eval(r);
            m.v_second(r, sol.v.values[k], sol.v.derivs[k], sol.u.values[k], e, de)
        })
        .collect();
    let fourth = differentiate(x, &differentiate(x, &second));
    let g = &sol.v.derivs;
    let mut total = 0.0;
    for k in 0..x.len() - 1 {
        let h = x[k + 1] - x[k];
        total += 0.5 * h * (g[k] + g[k + 1]) + h * h / 12.0 * (second[k] - second[k + 1])
            - h.powi(4) / 720.0 * (fourth[k] - fourth[k + 1]);
    }
    2.0 * PI * m.nf() * total
}

/// Energy density of the radial ansatz, already multiplied by `2 pi r`.
pub fn radial_energy_integrand(sol: &RadialSolution) -> Vec<f64> {
    let m = &sol.model;
    let nf = m.nf();
    sol.grid()
        .nodes
        .iter()
        .enumerate()
        .map(|(k, &r)| {
            let (u, du) = (sol.u.values[k], sol.u.derivs[k]);
            let (v, dv) = (sol.v.values[k], sol.v.derivs[k]);
            let (e, _) = m.metric.eval(r);
            let dens = 0.5
                * (du * du
                    + nf * nf * (dv / r).powi(2) / e
                    + nf * nf * u * u * (v - 1.0).powi(2) / (r * r)
                    + 0.25 * m.lambda * (u * u - 1.0).powi(2) * e);
            2.0 * PI * r * dens
        })
        .collect()
}

/// Trapezoid from the origin (where the weighted density vanishes) over the
/// grid, with a Richardson estimate from every second node.
pub fn radial_energy(sol: &RadialSolution) -> Estimate {
    let mut x = vec![0.0];
    x.extend_from_slice(&sol.grid().nodes);
    let mut y = vec![0.0];
    y.extend(radial_energy_integrand(sol));
    let fine = trapezoid(&x, &y);
    let coarse = trapezoid_coarse(&x, &y);
    Estimate::new(fine, (fine - coarse).abs() / 3.0)
}

pub fn radial_observables(sol: &RadialSolution) -> RadialObservables {
    RadialObservables {
        flux: sol.flux(),
        flux_quadrature: radial_flux_quadrature(sol),
        energy: radial_energy(sol),
    }
}

//! Quantized integrals and decay rates of a planar solution.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::decay::{decay_fit, FitWindow, PowerFit};
use super::fields::{bilinear, kinetic_density, GaugeFields};
use crate::error::Result;
use crate::field::ScalarField2D;
use crate::params::PhysicalParams;

/// Annulus `[ANNULUS.0 R, ANNULUS.1 R]` for the decay fits.
pub const DECAY_ANNULUS: (f64, f64) = (0.5, 0.9);
/// Annulus used for the far-field slope of `eta`.
pub const ETA_ANNULUS: (f64, f64) = (0.6, 0.9);

/// Value with a quadrature error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn new(value: f64, error: f64) -> Self {
        Self { value, error }
    }

    fn from_field(f: &ScalarField2D) -> Self {
        let (value, error) = f.integrate_with_error();
        Self { value, error }
    }
}

/// Self-dual flux `-1/2 int e^eta (e^u - 1)`; the integrand is bounded, so no
/// excision is needed.
pub fn flux_selfdual(exp_u: &ScalarField2D, e_eta: &ScalarField2D) -> Estimate {
    Estimate::from_field(&field_strength(exp_u, e_eta))
}

/// `F12 = -1/2 e^eta (e^u - 1)` pointwise.
pub fn field_strength(exp_u: &ScalarField2D, e_eta: &ScalarField2D) -> ScalarField2D {
    exp_u.zip_map(e_eta, |eu, e| 0.5 * e * (1.0 - eu))
}

/// `int F12` with `F12` the curl of the reconstructed potential.
pub fn flux_from_curl(fields: &GaugeFields) -> Estimate {
    Estimate::from_field(&fields.f12)
}

/// Circulation of `A` along the boundary of the square (counterclockwise).
pub fn boundary_circulation(fields: &GaugeFields) -> f64 {
    let g = fields.a1.grid;
    let n = g.n;
    let edge = |f: &dyn Fn(usize) -> f64| {
        let mut s = 0.0;
        for k in 0..n - 1 {
            s += 0.5 * (f(k) + f(k + 1));
        }
        s * g.h
    };
    let bottom = edge(&|k| fields.a1.at(k, 0));
    let right = edge(&|k| fields.a2.at(n - 1, k));
    let top = edge(&|k| fields.a1.at(k, n - 1));
    let left = edge(&|k| fields.a2.at(0, k));
    bottom + right - top - left
}

/// Energy density `H e^eta` in the reduced self-dual form
/// `1/4 e^eta (e^u - 1)^2 + 1/4 e^u |grad u|^2` (coupling 1).
pub fn energy_density_reduced(fields: &GaugeFields, u: &ScalarField2D, e_eta: &ScalarField2D) -> ScalarField2D {
    let bg = &fields.background;
    let v = u.zip_map(&bg.u0, |a, b| a - b);
    let kin = kinetic_density(u, &v, bg, &fields.exp_u);
    let mut out = ScalarField2D::zeros(u.grid);
    for k in 0..out.data.len() {
        let eu = fields.exp_u.data[k];
        out.data[k] = 0.25 * e_eta.data[k] * (eu - 1.0).powi(2) + 0.25 * kin.data[k];
    }
    out
}

/// Energy density `H e^eta` from the defining form
/// `1/2 e^-eta F12^2 + 1/2 (|D1 phi|^2 + |D2 phi|^2) + lambda/8 e^eta (|phi|^2 - 1)^2`.
pub fn energy_density_defining(fields: &GaugeFields, e_eta: &ScalarField2D, lambda: f64) -> ScalarField2D {
    let mut out = ScalarField2D::zeros(e_eta.grid);
    for k in 0..out.data.len() {
        let e = e_eta.data[k];
        let f = fields.f12.data[k];
        let m2 = fields.phi_re.data[k].powi(2) + fields.phi_im.data[k].powi(2);
        out.data[k] = 0.5 * f * f / e + 0.5 * fields.dphi_sq.data[k] + lambda / 8.0 * e * (m2 - 1.0).powi(2);
    }
    out
}

/// Total curvature with its far-field tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureEstimate {
    /// `int K e^eta` over the interior nodes.
    pub interior: Estimate,
    /// Contribution outside the square of the fitted model
    /// `eta = c + s ln r + q / r^2`.
    pub tail: f64,
    /// Fitted `s`.
    pub eta_slope: f64,
    /// Fitted `q`.
    pub eta_q: f64,
    /// `interior + tail`, with both error bars added.
    pub total: Estimate,
}

/// `int K e^eta = -1/2 int Laplacian eta` over the interior, plus the model
/// tail beyond the square.
pub fn total_curvature(e_eta: &ScalarField2D) -> CurvatureEstimate {
    let eta = e_eta.map(f64::ln);
    let g = eta.grid;
    let interior_sum = |stride: usize| {
        let h = g.h * stride as f64;
        let mut rows = Vec::new();
        let mut j = stride;
        while j + stride < g.n {
            let mut row = Vec::new();
            let mut i = stride;
            while i + stride < g.n {
                let lap = (eta.at(i - stride, j) + eta.at(i + stride, j) + eta.at(i, j - stride)
                    + eta.at(i, j + stride)
                    - 4.0 * eta.at(i, j))
                    / (h * h);
                row.push(-0.5 * lap);
                i += stride;
            }
            rows.push(crate::field::pairwise_sum(&row));
            j += stride;
        }
        crate::field::pairwise_sum(&rows) * h * h
    };
    let fine = interior_sum(1);
    let coarse = interior_sum(2);
    let interior = Estimate::new(fine, (fine - coarse).abs() / 3.0);

    let (s, q) = fit_eta_far_field(&eta);
    let r = g.half_extent;
    // flux of grad(q / r^2) through the square is -q (4 + 2 pi) / r^2; the
    // log term has the same flux through the square as at infinity
    let tail = -0.5 * q * (4.0 + 2.0 * PI) / (r * r);
    let total = Estimate::new(fine + tail, interior.error + tail.abs());
    CurvatureEstimate {
        interior,
        tail,
        eta_slope: s,
        eta_q: q,
        total,
    }
}

/// Least-squares fit of `eta = c + s ln r + q / r^2` on the far annulus.
fn fit_eta_far_field(eta: &ScalarField2D) -> (f64, f64) {
    let g = eta.grid;
    let (lo, hi) = (ETA_ANNULUS.0 * g.half_extent, ETA_ANNULUS.1 * g.half_extent);
    let mut ata = [[0.0f64; 3]; 3];
    let mut atb = [0.0f64; 3];
    for j in 0..g.n {
        for i in 0..g.n {
            let r = g.coord(i).hypot(g.coord(j));
            if r < lo || r > hi {
                continue;
            }
            let row = [1.0, r.ln(), 1.0 / (r * r)];
            for a in 0..3 {
                for b in 0..3 {
                    ata[a][b] += row[a] * row[b];
                }
                atb[a] += row[a] * eta.at(i, j);
            }
        }
    }
    match solve3(ata, atb) {
        Some(x) => (x[1], x[2]),
        None => (0.0, 0.0),
    }
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for c in 0..3 {
        let p = (c..3).max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs()))?;
        if a[p][c].abs() < 1e-300 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..3 {
            let f = a[r][c] / a[c][c];
            for k in c..3 {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = [0.0; 3];
    for c in (0..3).rev() {
        let s: f64 = (c + 1..3).map(|k| a[c][k] * x[k]).sum();
        x[c] = (b[c] - s) / a[c][c];
    }
    Some(x)
}

/// Log-log slope of `e^eta` on the `[0.6 R, 0.9 R]` annulus (plain
/// least squares over the nodes).
pub fn metric_log_slope(e_eta: &ScalarField2D) -> f64 {
    let g = e_eta.grid;
    let (lo, hi) = (ETA_ANNULUS.0 * g.half_extent, ETA_ANNULUS.1 * g.half_extent);
    let (mut n, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for j in 0..g.n {
        for i in 0..g.n {
            let r = g.coord(i).hypot(g.coord(j));
            if r < lo || r > hi {
                continue;
            }
            let (x, y) = (r.ln(), e_eta.at(i, j).ln());
            n += 1.0;
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Radially binned magnitudes of `f` on the decay annulus, one bin per grid
/// spacing: `(mean r, mean |f|)`.
pub fn radial_bins(f: &ScalarField2D, center: [f64; 2]) -> (Vec<f64>, Vec<f64>) {
    let g = f.grid;
    let (lo, hi) = (DECAY_ANNULUS.0 * g.half_extent, DECAY_ANNULUS.1 * g.half_extent);
    let nbins = ((hi - lo) / g.h).floor() as usize;
    let mut acc = vec![(0.0, 0.0, 0usize); nbins];
    for j in 0..g.n {
        for i in 0..g.n {
            let r = (g.coord(i) - center[0]).hypot(g.coord(j) - center[1]);
            if r < lo || r >= hi {
                continue;
            }
            let b = (((r - lo) / g.h) as usize).min(nbins - 1);
            acc[b].0 += r;
            acc[b].1 += f.at(i, j).abs();
            acc[b].2 += 1;
        }
    }
    acc.into_iter()
        .filter(|a| a.2 > 0)
        .map(|(r, v, c)| (r / c as f64, v / c as f64))
        .unzip()
}

/// Fitted decay exponents; `None` entries carry the reason in `notes`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct DecayReport {
    /// `1 - |phi|^2`.
    pub b_u: Option<PowerFit>,
    /// `|D phi|`.
    pub b_grad: Option<PowerFit>,
    pub b_f12: Option<PowerFit>,
    pub notes: Vec<String>,
}

/// Decay fits on the `[0.5 R, 0.9 R]` annulus about the origin.
pub fn decay_fits(fields: &GaugeFields, e_eta: &ScalarField2D) -> DecayReport {
    let window = FitWindow {
        min_ratio: 1.5,
        ..FitWindow::default()
    };
    let one_minus = fields.exp_u.map(|eu| 1.0 - eu);
    let grad = fields.dphi_sq_selfdual.map(|x| (0.5 * x).sqrt());
    let f12 = field_strength(&fields.exp_u, e_eta);
    let mut notes = Vec::new();
    let mut fit = |name: &str, f: &ScalarField2D| -> Option<PowerFit> {
        let (r, vals) = radial_bins(f, [0.0, 0.0]);
        match decay_fit(&r, &vals, &window) {
            Ok(p) => Some(p),
            Err(e) => {
                notes.push(format!("{name}: {e}"));
                None
            }
        }
    };
    let b_u = fit("b_u", &one_minus);
    let b_grad = fit("b_grad", &grad);
    let b_f12 = fit("b_f12", &f12);
    DecayReport {
        b_u,
        b_grad,
        b_f12,
        notes,
    }
}

/// The current flux next to the values the energy identities predict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurrentFlux {
    /// Quadrature of `J12 = curl J`.
    pub direct: Estimate,
    /// Quadrature of the commutator form of `J12`.
    pub identity: Estimate,
    /// `E - flux`, from reading the energy as `int F12 + J12`.
    pub energy_minus_flux: f64,
    /// `2 E - flux`, from `H e^eta = 1/2 (F12 + J12)`.
    pub twice_energy_minus_flux: f64,
}

pub fn current_flux(fields: &GaugeFields, energy: f64, flux: f64) -> CurrentFlux {
    CurrentFlux {
        direct: Estimate::from_field(&fields.j12),
        identity: Estimate::from_field(&fields.j12_identity),
        energy_minus_flux: energy - flux,
        twice_energy_minus_flux: 2.0 * energy - flux,
    }
}

/// `|phi|` along a ray from the origin, by bilinear interpolation of
/// `sqrt(e^u)`.
pub fn phi_abs_on_ray(fields: &GaugeFields, angle: f64, radii: &[f64]) -> Vec<f64> {
    let m = fields.exp_u.map(f64::sqrt);
    radii
        .iter()
        .map(|&r| bilinear(&m, r * angle.cos(), r * angle.sin()))
        .collect()
}

/// Everything the planar report needs that is independent of formatting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarObservables {
    pub flux: Estimate,
    pub flux_curl: Estimate,
    pub boundary_circulation: f64,
    pub energy: Estimate,
    pub energy_defining: Estimate,
    pub curvature: CurvatureEstimate,
    pub deficit_angle: f64,
    pub metric_slope: f64,
    pub current: CurrentFlux,
    pub decay: DecayReport,
    pub dphi_discrepancy: f64,
    pub j12_discrepancy: f64,
}

/// Evaluates every planar observable of a solution `(u, e^eta)`.
pub fn planar_observables(
    u: &ScalarField2D,
    e_eta: &ScalarField2D,
    params: &PhysicalParams,
    fields: &GaugeFields,
) -> Result<PlanarObservables> {
    let flux = flux_selfdual(&fields.exp_u, e_eta);
    let energy = Estimate::from_field(&energy_density_reduced(fields, u, e_eta));
    let energy_defining = Estimate::from_field(&energy_density_defining(fields, e_eta, params.lambda));
    Ok(PlanarObservables {
        flux,
        flux_curl: flux_from_curl(fields),
        boundary_circulation: boundary_circulation(fields),
        energy,
        energy_defining,
        curvature: total_curvature(e_eta),
        deficit_angle: params.deficit_angle(),
        metric_slope: metric_log_slope(e_eta),
        current: current_flux(fields, energy.value, flux.value),
        decay: decay_fits(fields, e_eta),
        dphi_discrepancy: fields.dphi_discrepancy,
        j12_discrepancy: fields.j12_discrepancy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables::fields::reconstruct_fields;
    use crate::params::Grid2D;

    #[test]
    fn vacuum_integrals_vanish() {
        let grid = Grid2D::new(6.0, 65).unwrap();
        let u = ScalarField2D::zeros(grid);
        let e = ScalarField2D::constant(grid, 1.0);
        let f = reconstruct_fields(&u, &[]).unwrap();
        assert_eq!(flux_selfdual(&f.exp_u, &e).value, 0.0);
        assert_eq!(energy_density_reduced(&f, &u, &e).integrate(), 0.0);
        assert_eq!(total_curvature(&e).total.value, 0.0);
        assert_eq!(boundary_circulation(&f), 0.0);
    }

    #[test]
    fn curvature_of_exact_log_metric() {
        // eta = -d/2 ln(1 + r^2): int K e^eta over the plane is pi d
        let d = 0.5;
        let grid = Grid2D::new(20.0, 257).unwrap();
        let e = ScalarField2D::from_fn(grid, |x, y| (1.0 + x * x + y * y).powf(-0.5 * d));
        let c = total_curvature(&e);
        assert!((c.total.value - PI * d).abs() < 1e-4, "{c:?}");
        assert!((c.eta_slope + d).abs() < 1e-3);
        assert!((metric_log_slope(&e) + d).abs() < 5e-3);
    }

    #[test]
    fn solve3_identity() {
        let x = solve3([[2.0, 0.0, 1.0], [0.0, 3.0, 0.0], [1.0, 0.0, 1.0]], [3.0, 3.0, 2.0]).unwrap();
        for v in x {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }
}

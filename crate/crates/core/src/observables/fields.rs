//! Higgs field, gauge potential, field strength and current rebuilt from a
//! planar solution `u`.
//!
//! With `phi = exp(u/2 + i Theta)`, `Theta = sum_s arg(z - p_s)`, the gauge
//! potential is `A1 = 1/2 d2 u + d1 Theta`, `A2 = -1/2 d1 u + d2 Theta`. Writing
//! `u = u0 + v` the singular parts cancel and
//! `A1 = 1/2 d2 v - sum_s (y - y_s) / (1 + |x - p_s|^2)`,
//! `A2 = -1/2 d1 v + sum_s (x - x_s) / (1 + |x - p_s|^2)`,
//! which is smooth at the vortices and is what gets sampled.

use crate::error::{Result, VortexError};
use crate::field::ScalarField2D;
use crate::planar::background::{build_background, BackgroundPair};

/// Sup-norm tolerance for the two `|D phi|^2` evaluations.
pub const BRANCH_CUT_TOL: f64 = 1e-4;
/// Nodes within this many (Chebyshev) steps of a vortex, or closer than
/// `CHECK_RADIUS`, are left out of the pointwise cross-checks.
pub const CHECK_EXCLUSION: usize = 3;
pub const CHECK_RADIUS: f64 = 0.5;
/// Beyond this distance from every vortex `grad u` is differenced directly;
/// closer in it is `grad v` plus the closed-form `grad u0`.
const DIRECT_GRADIENT_DISTANCE: f64 = 2.0;

#[derive(Debug, Clone)]
pub struct GaugeFields {
    pub phi_re: ScalarField2D,
    pub phi_im: ScalarField2D,
    pub a1: ScalarField2D,
    pub a2: ScalarField2D,
    /// `d1 A2 - d2 A1` by centered differences.
    pub f12: ScalarField2D,
    /// `d1 J2 - d2 J1` with `J_k = -Im(phi conj(D_k phi))`.
    pub j12: ScalarField2D,
    /// `|D1 phi|^2 + |D2 phi|^2` from the covariant derivatives.
    pub dphi_sq: ScalarField2D,
    /// `1/2 e^u |grad u|^2`, the same quantity through the self-dual form.
    pub dphi_sq_selfdual: ScalarField2D,
    /// `i (D1 phi conj(D2 phi) - conj(D1 phi) D2 phi) - |phi|^2 F12`.
    pub j12_identity: ScalarField2D,
    /// `e^u`, exactly zero at on-node vortices.
    pub exp_u: ScalarField2D,
    /// Sup of `|dphi_sq - dphi_sq_selfdual|` over the checked nodes.
    pub dphi_discrepancy: f64,
    /// Sup of `|j12 - j12_identity|` over the checked nodes.
    pub j12_discrepancy: f64,
    pub background: BackgroundPair,
}

impl GaugeFields {
    /// True for nodes used in pointwise comparisons: three away from the
    /// boundary and outside the vortex exclusion.
    pub fn checked_node(&self, i: usize, j: usize) -> bool {
        let g = self.exp_u.grid;
        let (x, y) = (g.coord(i), g.coord(j));
        i >= 3
            && j >= 3
            && i + 4 <= g.n
            && j + 4 <= g.n
            && !self.background.within_nodes(i, j, CHECK_EXCLUSION)
            && self
                .background
                .points
                .iter()
                .all(|p| (x - p[0]).hypot(y - p[1]) >= CHECK_RADIUS)
    }

    /// `|phi|` at every node.
    pub fn phi_abs(&self) -> ScalarField2D {
        self.phi_re.zip_map(&self.phi_im, f64::hypot)
    }
}

/// Rebuilds the gauge fields from `u` (regularized at on-node vortices, as
/// produced by the planar solver) and the vortex points.
pub fn reconstruct_fields(u: &ScalarField2D, points: &[[f64; 2]]) -> Result<GaugeFields> {
    let grid = u.grid;
    let bg = build_background(points, grid);
    let v = u.zip_map(&bg.u0, |a, b| a - b);
    let exp_u = bg.exp_u(&v);

    let mut phi_re = ScalarField2D::zeros(grid);
    let mut phi_im = ScalarField2D::zeros(grid);
    let mut a1 = ScalarField2D::zeros(grid);
    let mut a2 = ScalarField2D::zeros(grid);
    let (dv1, dv2) = v.gradient();
    for j in 0..grid.n {
        let y = grid.coord(j);
        for i in 0..grid.n {
            let x = grid.coord(i);
            let k = grid.idx(i, j);
            let modulus = exp_u.data[k].sqrt();
            let (mut c, mut s) = (1.0, 0.0);
            let (mut t1, mut t2) = (0.0, 0.0);
            for p in points {
                let (dx, dy) = (x - p[0], y - p[1]);
                let d = dx.hypot(dy);
                if d > 0.0 {
                    let (pc, ps) = (dx / d, dy / d);
                    (c, s) = (c * pc - s * ps, c * ps + s * pc);
                }
                let q = 1.0 + dx * dx + dy * dy;
                t1 -= dy / q;
                t2 += dx / q;
            }
            phi_re.data[k] = modulus * c;
            phi_im.data[k] = modulus * s;
            a1.data[k] = 0.5 * dv2.data[k] + t1;
            a2.data[k] = -0.5 * dv1.data[k] + t2;
        }
    }

    let f12 = curl(&a1, &a2);
    let (dr1, dr2) = phi_re.gradient();
    let (di1, di2) = phi_im.gradient();
    let mut dphi_sq = ScalarField2D::zeros(grid);
    let mut j1 = ScalarField2D::zeros(grid);
    let mut j2 = ScalarField2D::zeros(grid);
    let mut j12_identity = ScalarField2D::zeros(grid);
    for k in 0..grid.len() {
        let (pr, pi) = (phi_re.data[k], phi_im.data[k]);
        // D_k phi = d_k phi - i A_k phi
        let d1 = (dr1.data[k] + a1.data[k] * pi, di1.data[k] - a1.data[k] * pr);
        let d2 = (dr2.data[k] + a2.data[k] * pi, di2.data[k] - a2.data[k] * pr);
        dphi_sq.data[k] = d1.0 * d1.0 + d1.1 * d1.1 + d2.0 * d2.0 + d2.1 * d2.1;
        // J_k = -Im(phi conj(D_k phi))
        j1.data[k] = -(pi * d1.0 - pr * d1.1);
        j2.data[k] = -(pi * d2.0 - pr * d2.1);
        // i (z - conj z) = -2 Im z with z = D1 phi conj(D2 phi)
        let im_z = d1.1 * d2.0 - d1.0 * d2.1;
        j12_identity.data[k] = -2.0 * im_z - (pr * pr + pi * pi) * f12.data[k];
    }
    let j12 = curl(&j1, &j2);
    let dphi_sq_selfdual = kinetic_density(u, &v, &bg, &exp_u).map(|x| 0.5 * x);

    let mut fields = GaugeFields {
        phi_re,
        phi_im,
        a1,
        a2,
        f12,
        j12,
        dphi_sq,
        dphi_sq_selfdual,
        j12_identity,
        exp_u,
        dphi_discrepancy: 0.0,
        j12_discrepancy: 0.0,
        background: bg,
    };
    let (mut dd, mut dj) = (0.0f64, 0.0f64);
    for j in 0..grid.n {
        for i in 0..grid.n {
            if !fields.checked_node(i, j) {
                continue;
            }
            let k = grid.idx(i, j);
            dd = dd.max((fields.dphi_sq.data[k] - fields.dphi_sq_selfdual.data[k]).abs());
            dj = dj.max((fields.j12.data[k] - fields.j12_identity.data[k]).abs());
        }
    }
    fields.dphi_discrepancy = dd;
    fields.j12_discrepancy = dj;
    if !(dd <= BRANCH_CUT_TOL) {
        return Err(VortexError::BranchCutArtifact { discrepancy: dd });
    }
    Ok(fields)
}

/// `d1 b - d2 a`.
pub fn curl(a: &ScalarField2D, b: &ScalarField2D) -> ScalarField2D {
    let (_, da2) = a.gradient();
    let (db1, _) = b.gradient();
    db1.zip_map(&da2, |x, y| x - y)
}

/// `grad u` at every node: direct differences of `u` far from the vortices,
/// `grad v + grad u0` near them. Zero at on-node vortices.
pub fn grad_u(
    u: &ScalarField2D,
    v: &ScalarField2D,
    bg: &BackgroundPair,
) -> (ScalarField2D, ScalarField2D) {
    let grid = u.grid;
    let (du1, du2) = u.gradient();
    let (dv1, dv2) = v.gradient();
    let mut g1 = ScalarField2D::zeros(grid);
    let mut g2 = ScalarField2D::zeros(grid);
    for j in 0..grid.n {
        let y = grid.coord(j);
        for i in 0..grid.n {
            let x = grid.coord(i);
            let k = grid.idx(i, j);
            if bg.is_vortex_node(i, j) {
                continue;
            }
            let dist = bg
                .points
                .iter()
                .map(|p| (x - p[0]).hypot(y - p[1]))
                .fold(f64::INFINITY, f64::min);
            if dist >= DIRECT_GRADIENT_DISTANCE {
                g1.data[k] = du1.data[k];
                g2.data[k] = du2.data[k];
                continue;
            }
            let (mut s1, mut s2) = (dv1.data[k], dv2.data[k]);
            for p in &bg.points {
                let (dx, dy) = (x - p[0], y - p[1]);
                let d2 = dx * dx + dy * dy;
                // grad ln(d^2 / (1 + d^2)) = 2 (x - p) (1/d^2 - 1/(1 + d^2))
                let w = 2.0 * (1.0 / d2 - 1.0 / (1.0 + d2));
                s1 += w * dx;
                s2 += w * dy;
            }
            g1.data[k] = s1;
            g2.data[k] = s2;
        }
    }
    (g1, g2)
}

/// `e^u |grad u|^2`, bounded at the vortices. At an on-node simple vortex the
/// value is the limit `4 e^v prod_{other s} |x - p_s|^2 / (1 + |x - p_s|^2)`;
/// at a multiple one it is zero.
pub fn kinetic_density(
    u: &ScalarField2D,
    v: &ScalarField2D,
    bg: &BackgroundPair,
    exp_u: &ScalarField2D,
) -> ScalarField2D {
    let grid = u.grid;
    let (g1, g2) = grad_u(u, v, bg);
    let mut out = ScalarField2D::zeros(grid);
    for j in 0..grid.n {
        for i in 0..grid.n {
            let k = grid.idx(i, j);
            if !bg.is_vortex_node(i, j) {
                out.data[k] = exp_u.data[k] * (g1.data[k].powi(2) + g2.data[k].powi(2));
                continue;
            }
            let (x, y) = (grid.coord(i), grid.coord(j));
            let mut on_node = 0;
            let mut rest = 1.0;
            for p in &bg.points {
                let d2 = (x - p[0]).powi(2) + (y - p[1]).powi(2);
                if d2 < 0.25 * grid.h * grid.h {
                    on_node += 1;
                } else {
                    rest *= d2 / (1.0 + d2);
                }
            }
            if on_node == 1 {
                out.data[k] = 4.0 * v.data[k].exp() * rest;
            }
        }
    }
    out
}

/// Winding number of `phi` along the circle of radius `radius` about `center`,
/// from the phase increments between `samples` equally spaced bilinear samples.
pub fn winding_number(fields: &GaugeFields, center: [f64; 2], radius: f64, samples: usize) -> f64 {
    let mut total = 0.0;
    let mut prev: Option<f64> = None;
    for s in 0..=samples {
        let t = 2.0 * std::f64::consts::PI * s as f64 / samples as f64;
        let (x, y) = (center[0] + radius * t.cos(), center[1] + radius * t.sin());
        let re = bilinear(&fields.phi_re, x, y);
        let im = bilinear(&fields.phi_im, x, y);
        let arg = im.atan2(re);
        if let Some(p) = prev {
            let mut d = arg - p;
            while d > std::f64::consts::PI {
                d -= 2.0 * std::f64::consts::PI;
            }
            while d < -std::f64::consts::PI {
                d += 2.0 * std::f64::consts::PI;
            }
            total += d;
        }
        prev = Some(arg);
    }
    total / (2.0 * std::f64::consts::PI)
}

/// Bilinear interpolation inside the grid.
pub fn bilinear(f: &ScalarField2D, x: f64, y: f64) -> f64 {
    let g = f.grid;
    let fx = ((x + g.half_extent) / g.h).clamp(0.0, (g.n - 1) as f64 - 1e-9);
    let fy = ((y + g.half_extent) / g.h).clamp(0.0, (g.n - 1) as f64 - 1e-9);
    let (i, j) = (fx.floor() as usize, fy.floor() as usize);
    let (tx, ty) = (fx - i as f64, fy - j as f64);
    (1.0 - tx) * (1.0 - ty) * f.at(i, j)
        + tx * (1.0 - ty) * f.at(i + 1, j)
        + (1.0 - tx) * ty * f.at(i, j + 1)
        + tx * ty * f.at(i + 1, j + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Grid2D;

    #[test]
    fn vacuum() {
        let grid = Grid2D::new(5.0, 33).unwrap();
        let f = reconstruct_fields(&ScalarField2D::zeros(grid), &[]).unwrap();
        assert!(f.phi_re.data.iter().all(|&x| x == 1.0));
        assert_eq!(f.phi_im.sup_norm(), 0.0);
        assert_eq!(f.a1.sup_norm() + f.a2.sup_norm(), 0.0);
        assert_eq!(f.f12.sup_norm(), 0.0);
    }

    #[test]
    fn single_vortex_winds_once() {
        let grid = Grid2D::new(8.0, 201).unwrap();
        let bg = build_background(&[[0.0, 0.0]], grid);
        // any u with the right singularity; v = 0
        let f = reconstruct_fields(&bg.u0, &[[0.0, 0.0]]).unwrap();
        let w = winding_number(&f, [0.0, 0.0], 4.0, 400);
        assert!((w - 1.0).abs() < 1e-12, "{w}");
        let w2 = winding_number(&f, [3.0, 3.0], 1.0, 400);
        assert!(w2.abs() < 1e-12);
    }

    #[test]
    fn gauge_potential_is_regular_at_vortex() {
        let grid = Grid2D::new(4.0, 101).unwrap();
        let pts = [[0.0, 0.0], [1.0, 0.6]];
        let bg = build_background(&pts, grid);
        let f = reconstruct_fields(&bg.u0, &pts).unwrap();
        assert!(f.a1.data.iter().chain(&f.a2.data).all(|x| x.is_finite()));
        // with v = 0, F12 = g / 2
        let (i, j) = bg.vortex_nodes[0];
        assert!((f.f12.at(i, j) - 0.5 * bg.g.at(i, j)).abs() < 1e-2);
    }

    #[test]
    fn kinetic_limit_at_simple_vortex() {
        let grid = Grid2D::new(4.0, 81).unwrap();
        let bg = build_background(&[[0.0, 0.0]], grid);
        let v = ScalarField2D::constant(grid, 0.3);
        let u = bg.compose_u(&v);
        let eu = bg.exp_u(&v);
        let k = kinetic_density(&u, &v, &bg, &eu);
        let (i, j) = bg.vortex_nodes[0];
        let centre = k.at(i, j);
        assert!((centre - 4.0 * 0.3f64.exp()).abs() < 1e-12);
        // continuous with its neighbours
        assert!((k.at(i + 1, j) - centre).abs() < 0.05 * centre);
    }
}

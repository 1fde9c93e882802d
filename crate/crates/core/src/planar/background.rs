//! Background function carrying the logarithmic vortex singularities.
//!
//! `u0 = sum_s ln(|x - p_s|^2 / (1 + |x - p_s|^2))` and
//! `g = sum_s 4 / (1 + |x - p_s|^2)^2`, so that `Laplacian u0 = 4 pi sum_s delta_{p_s} - g`
//! with `int g = 4 pi N`. The working unknown is `v = u - u0`.

use std::f64::consts::PI;

use crate::field::ScalarField2D;
use crate::params::Grid2D;

/// Squared distance below which a vortex is treated as sitting on a node.
const ON_NODE_EPS2: f64 = 1e-24;

#[derive(Debug, Clone)]
pub struct BackgroundPair {
    pub points: Vec<[f64; 2]>,
    /// `u0` with finite regularized values at on-node vortices.
    pub u0: ScalarField2D,
    /// `exp(u0)`; exactly zero at on-node vortices.
    pub p: ScalarField2D,
    /// Smooth source with total mass `4 pi N`.
    pub g: ScalarField2D,
    /// Source of the discrete equation: `-Lap_h u0` at interior nodes farther
    /// than `R/4` from every vortex, `g` elsewhere. In the far field `u` is
    /// exponentially small and the `O(h^2)` gap between `-Lap_h u0` and `g`
    /// would otherwise push it above zero; there the discrete equation for
    /// `u` is the plain five-point scheme and obeys the maximum principle.
    pub g_h: ScalarField2D,
    /// `rho = -sum_s ln(1 + |x - p_s|^2)`, the smooth remainder of `u0 - sum ln|x - p_s|^2`.
    pub rho: ScalarField2D,
    /// Nearest node of each vortex (in `points` order).
    pub vortex_nodes: Vec<(usize, usize)>,
}

impl BackgroundPair {
    pub fn grid(&self) -> Grid2D {
        self.u0.grid
    }

    /// True when `(i, j)` is within the 3x3 patch around any vortex.
    pub fn near_vortex(&self, i: usize, j: usize) -> bool {
        self.vortex_nodes
            .iter()
            .any(|&(vi, vj)| vi.abs_diff(i) <= 1 && vj.abs_diff(j) <= 1)
    }

    /// True when `(i, j)` is within `radius` nodes (Chebyshev) of any vortex.
    pub fn within_nodes(&self, i: usize, j: usize, radius: usize) -> bool {
        self.vortex_nodes
            .iter()
            .any(|&(vi, vj)| vi.abs_diff(i) <= radius && vj.abs_diff(j) <= radius)
    }

    pub fn is_vortex_node(&self, i: usize, j: usize) -> bool {
        self.p.at(i, j) == 0.0
    }

    /// The supersolution `v+ = -u0`, i.e. `u = 0`, with the regularized
    /// values at on-node vortices.
    pub fn supersolution(&self) -> ScalarField2D {
        self.u0.map(|x| -x)
    }

    /// `u = u0 + v` (regularized at on-node vortices).
    pub fn compose_u(&self, v: &ScalarField2D) -> ScalarField2D {
        self.u0.zip_map(v, |a, b| a + b)
    }

    /// `exp(u) = exp(u0) exp(v)`, exactly zero at on-node vortices.
    pub fn exp_u(&self, v: &ScalarField2D) -> ScalarField2D {
        self.p.zip_map(v, |p, v| p * v.exp())
    }
}

/// Value standing in for `ln|x - p|^2` at a node that coincides with `p`:
/// the lattice Green's function offset `ln h^2 - pi`.
pub fn regularized_log(h: f64) -> f64 {
    (h * h).ln() - PI
}

pub fn build_background(points: &[[f64; 2]], grid: Grid2D) -> BackgroundPair {
    let n = grid.n;
    let mut u0 = ScalarField2D::zeros(grid);
    let mut p = ScalarField2D::constant(grid, 1.0);
    let mut g = ScalarField2D::zeros(grid);
    let mut rho = ScalarField2D::zeros(grid);
    let reg = regularized_log(grid.h);
    for j in 0..n {
        let y = grid.coord(j);
        for i in 0..n {
            let x = grid.coord(i);
            let k = j * n + i;
            for s in points {
                let d2 = (x - s[0]).powi(2) + (y - s[1]).powi(2);
                let l = (1.0 + d2).ln();
                rho.data[k] -= l;
                g.data[k] += 4.0 / (1.0 + d2).powi(2);
                if d2 < ON_NODE_EPS2 {
                    u0.data[k] += reg - l;
                    p.data[k] = 0.0;
                } else {
                    u0.data[k] += d2.ln() - l;
                    p.data[k] *= d2 / (1.0 + d2);
                }
            }
        }
    }
    let vortex_nodes = points
        .iter()
        .map(|s| {
            let fi = ((s[0] + grid.half_extent) / grid.h)
                .round()
                .clamp(0.0, (n - 1) as f64);
            let fj = ((s[1] + grid.half_extent) / grid.h)
                .round()
                .clamp(0.0, (n - 1) as f64);
            (fi as usize, fj as usize)
        })
        .collect();
    let mut bg = BackgroundPair {
        points: points.to_vec(),
        g_h: g.clone(),
        u0,
        p,
        g,
        rho,
        vortex_nodes,
    };
    let far2 = (0.25 * grid.half_extent).powi(2);
    for j in 1..n - 1 {
        let y = grid.coord(j);
        for i in 1..n - 1 {
            let x = grid.coord(i);
            let far = points
                .iter()
                .all(|s| (x - s[0]).powi(2) + (y - s[1]).powi(2) > far2);
            if far {
                let l = bg.u0.laplacian_at(i, j);
                bg.g_h.set(i, j, -l);
            }
        }
    }
    bg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_vortex_values() {
        let grid = Grid2D::new(4.0, 9).unwrap();
        let bg = build_background(&[[0.0, 0.0]], grid);
        assert_eq!(bg.g.at(4, 4), 4.0);
        assert_eq!(bg.p.at(4, 4), 0.0);
        assert!(bg.is_vortex_node(4, 4));
        assert!((bg.u0.at(4, 4) - regularized_log(1.0)).abs() < 1e-15);
        // r = 1 at (5, 4)
        assert!((bg.u0.at(5, 4) - 0.5f64.ln()).abs() < 1e-15);
        assert!((bg.rho.at(5, 4) + 2f64.ln()).abs() < 1e-15);
        assert_eq!(bg.vortex_nodes, vec![(4, 4)]);
        assert!(bg.near_vortex(5, 5) && !bg.near_vortex(6, 4));
    }

    #[test]
    fn coincident_points_add_linearly() {
        let grid = Grid2D::new(4.0, 9).unwrap();
        let one = build_background(&[[0.0, 0.0]], grid);
        let three = build_background(&[[0.0, 0.0]; 3], grid);
        assert_eq!(three.g.at(4, 4), 12.0);
        for k in 0..grid.len() {
            if one.p.data[k] > 0.0 {
                assert!((three.u0.data[k] - 3.0 * one.u0.data[k]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn supersolution_gives_zero_u() {
        let grid = Grid2D::new(4.0, 17).unwrap();
        let bg = build_background(&[[0.5, 0.0], [-0.5, 0.25]], grid);
        let vp = bg.supersolution();
        assert_eq!(bg.compose_u(&vp).sup_norm(), 0.0);
        for k in 0..grid.len() {
            assert_eq!(vp.data[k], -bg.u0.data[k]);
        }
    }

    #[test]
    fn discrete_source_is_consistent() {
        let grid = Grid2D::new(10.0, 201).unwrap();
        let bg = build_background(&[[0.05, -0.02]], grid);
        let mut m: f64 = 0.0;
        for j in 0..grid.n {
            for i in 0..grid.n {
                let r = grid.coord(i).hypot(grid.coord(j));
                if r > 2.6 {
                    m = m.max((bg.g_h.at(i, j) - bg.g.at(i, j)).abs());
                }
            }
        }
        assert!(m < 10.0 * grid.h * grid.h, "{m}");
        assert_eq!(bg.g_h.at(100, 100), bg.g.at(100, 100));
    }

    #[test]
    fn source_mass_matches_square_integral() {
        // Oracle: the inner y-integral of 4/(a^2 + y^2)^2 over [-R, R] is
        // closed form, the outer x-integral is done by adaptive Simpson.
        let r = 20.0;
        let inner = |x: f64| {
            let a2 = 1.0 + x * x;
            let a = a2.sqrt();
            4.0 * (r / (a2 * (a2 + r * r)) + (r / a).atan() / (a2 * a))
        };
        let exact = crate::quad::adaptive_simpson(&inner, -r, r, 1e-13);
        let grid = Grid2D::new(r, 513).unwrap();
        let bg = build_background(&[[0.0, 0.0]], grid);
        let mass = bg.g.integrate();
        assert!(((mass - exact) / exact).abs() < 1e-6, "{mass} vs {exact}");
        // the part of the plane outside the square carries less than the
        // complement of the inscribed disk, 4 pi / (1 + R^2)
        assert!(4.0 * PI - exact > 0.0 && 4.0 * PI - exact < 4.0 * PI / (1.0 + r * r));
    }
}

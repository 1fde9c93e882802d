//! Real fields sampled on a uniform square grid, with the finite-difference
//! stencils and quadratures used throughout the planar solver.

use crate::params::Grid2D;

/// Row-major samples: index `j * n + i` is the node `(x_i, y_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField2D {
    pub grid: Grid2D,
    pub data: Vec<f64>,
}

impl ScalarField2D {
    pub fn zeros(grid: Grid2D) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: Grid2D, value: f64) -> Self {
        Self {
            grid,
            data: vec![value; grid.len()],
        }
    }

    pub fn from_fn(grid: Grid2D, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let mut data = Vec::with_capacity(grid.len());
        for j in 0..grid.n {
            let y = grid.coord(j);
            for i in 0..grid.n {
                data.push(f(grid.coord(i), y));
            }
        }
        Self { grid, data }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        debug_assert_eq!(self.grid, other.grid);
        Self {
            grid: self.grid,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.grid.n + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let n = self.grid.n;
        self.data[j * n + i] = value;
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn sup_norm(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn sup_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Five-point Laplacian at interior nodes; one-sided second differences on
    /// the boundary ring.
    pub fn laplacian(&self) -> Self {
        let g = self.grid;
        let n = g.n;
        let inv_h2 = 1.0 / (g.h * g.h);
        let mut out = Self::zeros(g);
        let f = &self.data;
        for j in 0..n {
            for i in 0..n {
                let dxx = second_difference(i, n, |k| f[j * n + k]);
                let dyy = second_difference(j, n, |k| f[k * n + i]);
                out.data[j * n + i] = (dxx + dyy) * inv_h2;
            }
        }
        out
    }

    /// Five-point Laplacian at one interior node.
    #[inline]
    pub fn laplacian_at(&self, i: usize, j: usize) -> f64 {
        let n = self.grid.n;
        let f = &self.data;
        let c = j * n + i;
        (f[c - 1] + f[c + 1] + f[c - n] + f[c + n] - 4.0 * f[c]) / (self.grid.h * self.grid.h)
    }

    /// Fourth-order Laplacian (width-5 cross) at nodes at least two away from
    /// the boundary; `None` elsewhere.
    pub fn laplacian4_at(&self, i: usize, j: usize) -> Option<f64> {
        let n = self.grid.n;
        if i < 2 || j < 2 || i + 2 >= n || j + 2 >= n {
            return None;
        }
        let f = &self.data;
        let c = j * n + i;
        let d = |a: f64, b: f64, cc: f64, dd: f64| -(a + dd) + 16.0 * (b + cc);
        let sx = d(f[c - 2], f[c - 1], f[c + 1], f[c + 2]);
        let sy = d(f[c - 2 * n], f[c - n], f[c + n], f[c + 2 * n]);
        Some((sx + sy - 60.0 * f[c]) / (12.0 * self.grid.h * self.grid.h))
    }

    /// Gradient by fourth-order central differences in the deep interior,
    /// second-order central on the first interior ring and second-order
    /// one-sided on the boundary.
    pub fn gradient(&self) -> (Self, Self) {
        let g = self.grid;
        let n = g.n;
        let mut gx = Self::zeros(g);
        let mut gy = Self::zeros(g);
        let f = &self.data;
        for j in 0..n {
            for i in 0..n {
                gx.data[j * n + i] = first_difference(i, n, g.h, |k| f[j * n + k]);
                gy.data[j * n + i] = first_difference(j, n, g.h, |k| f[k * n + i]);
            }
        }
        (gx, gy)
    }

    /// Trapezoidal rule over the full square.
    pub fn integrate(&self) -> f64 {
        self.integrate_stride(1)
    }

    /// Trapezoidal rule on the sub-grid of every `stride`-th node; requires
    /// `(n - 1) % stride == 0`.
    pub fn integrate_stride(&self, stride: usize) -> f64 {
        let g = self.grid;
        let n = g.n;
        assert!((n - 1).is_multiple_of(stride), "stride must divide n - 1");
        let m = (n - 1) / stride;
        let w = |k: usize| if k == 0 || k == m { 0.5 } else { 1.0 };
        let mut rows = Vec::with_capacity(m + 1);
        for jj in 0..=m {
            let j = jj * stride;
            let row: Vec<f64> = (0..=m)
                .map(|ii| w(ii) * self.data[j * n + ii * stride])
                .collect();
            rows.push(w(jj) * pairwise_sum(&row));
        }
        let hh = g.h * stride as f64;
        pairwise_sum(&rows) * hh * hh
    }

    /// Trapezoidal integral with a Richardson error estimate from the
    /// half-resolution sub-grid; `(value, error)`.
    pub fn integrate_with_error(&self) -> (f64, f64) {
        let fine = self.integrate();
        if !(self.grid.n - 1).is_multiple_of(2) || self.grid.n < 5 {
            return (fine, f64::NAN);
        }
        let coarse = self.integrate_stride(2);
        (fine, (fine - coarse).abs() / 3.0)
    }

    /// Plain sum over nodes with `keep(i, j)` true, times `h^2`.
    pub fn integrate_where(&self, keep: impl Fn(usize, usize) -> bool) -> f64 {
        let g = self.grid;
        let mut rows = Vec::with_capacity(g.n);
        for j in 0..g.n {
            let row: Vec<f64> = (0..g.n)
                .filter(|&i| keep(i, j))
                .map(|i| self.at(i, j))
                .collect();
            rows.push(pairwise_sum(&row));
        }
        pairwise_sum(&rows) * g.h * g.h
    }
}

/// Unscaled second difference along one axis.
#[inline]
fn second_difference(k: usize, n: usize, f: impl Fn(usize) -> f64) -> f64 {
    if k == 0 {
        2.0 * f(0) - 5.0 * f(1) + 4.0 * f(2) - f(3)
    } else if k + 1 == n {
        2.0 * f(n - 1) - 5.0 * f(n - 2) + 4.0 * f(n - 3) - f(n - 4)
    } else {
        f(k - 1) - 2.0 * f(k) + f(k + 1)
    }
}

#[inline]
fn first_difference(k: usize, n: usize, h: f64, f: impl Fn(usize) -> f64) -> f64 {
    if k == 0 {
        (-3.0 * f(0) + 4.0 * f(1) - f(2)) / (2.0 * h)
    } else if k + 1 == n {
        (3.0 * f(n - 1) - 4.0 * f(n - 2) + f(n - 3)) / (2.0 * h)
    } else if k == 1 || k + 2 == n {
        (f(k + 1) - f(k - 1)) / (2.0 * h)
    } else {
        (f(k - 2) - 8.0 * f(k - 1) + 8.0 * f(k + 1) - f(k + 2)) / (12.0 * h)
    }
}

/// Pairwise (tree) summation; the order is fixed by the input length only.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 16 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

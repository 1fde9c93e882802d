//! Radial profiles sampled on a graded grid.

use serde::{Deserialize, Serialize};

use super::ode::hermite;
use crate::params::RadialGrid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub grid: RadialGrid,
    pub values: Vec<f64>,
    pub derivs: Vec<f64>,
    /// Largest radius reproduced by direct integration; beyond it the
    /// profile is an asymptotic continuation.
    pub trusted_until: f64,
}

impl RadialProfile {
    pub fn from_fn(grid: &RadialGrid, f: impl Fn(f64) -> (f64, f64)) -> Self {
        let (values, derivs) = grid.nodes.iter().map(|&r| f(r)).unzip();
        Self {
            grid: grid.clone(),
            values,
            derivs,
            trusted_until: grid.r_max,
        }
    }

    /// Default fixed-point start `r^2 / (1 + r^2)`.
    pub fn default_v(grid: &RadialGrid) -> Self {
        Self::from_fn(grid, |r| {
            let q = 1.0 + r * r;
            (r * r / q, 2.0 * r / (q * q))
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.grid.nodes
    }

    /// Cubic Hermite value and derivative at `r`. Below `r_min` the profile
    /// continues as `c r^p` matched to the first node; above `r_max` it is
    /// held constant.
    pub fn eval(&self, r: f64, small_power: f64) -> (f64, f64) {
        let x = &self.grid.nodes;
        if r <= x[0] {
            let c = self.values[0] / x[0].powf(small_power);
            return (
                c * r.powf(small_power),
                small_power * c * r.powf(small_power - 1.0),
            );
        }
        let last = x.len() - 1;
        if r >= x[last] {
            return (self.values[last], 0.0);
        }
        let k = self.grid.locate(r);
        let (x0, x1) = (x[k], x[k + 1]);
        let (y0, y1) = (self.values[k], self.values[k + 1]);
        let (d0, d1) = (self.derivs[k], self.derivs[k + 1]);
        let val = hermite(x0, y0, d0, x1, y1, d1, r);
        // derivative of the Hermite cubic
        let h = x1 - x0;
        let t = (r - x0) / h;
        let dval = (6.0 * t * t - 6.0 * t) / h * y0
            + (3.0 * t * t - 4.0 * t + 1.0) * d0
            + (-6.0 * t * t + 6.0 * t) / h * y1
            + (3.0 * t * t - 2.0 * t) * d1;
        (val, dval)
    }

    /// Nodewise derivative of the stored derivative samples: five-point
    /// finite differences on the nonuniform grid (fourth order).
    pub fn second_derivs(&self) -> Vec<f64> {
        differentiate(&self.grid.nodes, &self.derivs)
    }

    /// `max_k |self_k - other_k|` on a shared grid.
    pub fn sup_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// `(1 - w) self + w other`.
    pub fn blend(&self, other: &Self, w: f64) -> Self {
        let mix = |a: &[f64], b: &[f64]| {
            a.iter()
                .zip(b)
                .map(|(x, y)| (1.0 - w) * x + w * y)
                .collect()
        };
        Self {
            grid: self.grid.clone(),
            values: mix(&self.values, &other.values),
            derivs: mix(&self.derivs, &other.derivs),
            trusted_until: self.trusted_until.min(other.trusted_until),
        }
    }
}

/// Fornberg weights for the first derivative at `x0` on nodes `xs`.
pub fn fornberg_first(x0: f64, xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    // c[j][k]: weight of node j for derivative order k
    let mut c = vec![[0.0f64; 2]; n];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(1);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.iter().map(|w| w[1]).collect()
}

/// Derivative of samples `y` on nodes `x` with centered five-point stencils
/// (shifted at the ends).
pub fn differentiate(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    assert!(n >= 5);
    (0..n)
        .map(|k| {
            let s = k.saturating_sub(2).min(n - 5);
            let w = fornberg_first(x[k], &x[s..s + 5]);
            w.iter().zip(&y[s..s + 5]).map(|(a, b)| a * b).sum()
        })
        .collect()
}

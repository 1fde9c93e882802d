//! Physical parameters, vortex configurations and computational grids.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Result, VortexError};

/// Slack on the admissibility bound `4 pi G N <= 1` absorbing rounding in
/// inputs such as `G = 1/(8 pi)`.
const ADMISSIBILITY_SLACK: f64 = 1e-12;

/// Physical parameters of one configuration.
///
/// The vortex number is the length of `points`; a vortex of multiplicity `m`
/// is written as `m` coincident entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub lambda: f64,
    #[serde(rename = "G")]
    pub g_newton: f64,
    pub g0: f64,
    pub points: Vec<[f64; 2]>,
}

impl PhysicalParams {
    pub fn new(lambda: f64, g_newton: f64, g0: f64, points: Vec<[f64; 2]>) -> Self {
        Self {
            lambda,
            g_newton,
            g0,
            points,
        }
    }

    /// `N` copies of the origin.
    pub fn centered(lambda: f64, g_newton: f64, g0: f64, n: usize) -> Self {
        Self::new(lambda, g_newton, g0, vec![[0.0, 0.0]; n])
    }

    pub fn vortex_number(&self) -> usize {
        self.points.len()
    }

    /// `delta = 8 pi G N`, the exponent of the asymptotic metric decay.
    pub fn delta(&self) -> f64 {
        8.0 * PI * self.g_newton * self.vortex_number() as f64
    }

    /// Conical deficit angle `8 pi^2 G N` of the far-field metric.
    pub fn deficit_angle(&self) -> f64 {
        PI * self.delta()
    }

    /// Newton constant that gives a prescribed `delta` for this vortex number.
    pub fn g_for_delta(delta: f64, n: usize) -> f64 {
        if n == 0 {
            0.0
        } else {
            delta / (8.0 * PI * n as f64)
        }
    }

    /// Returns `Err` carrying the failed checks when `validate` does not pass.
    pub fn ensure_valid(&self) -> Result<ValidationReport> {
        let report = validate(self);
        if report.passed {
            Ok(report)
        } else {
            Err(VortexError::InvalidParams(report.failure_summary()))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub checks: Vec<Check>,
    /// `8 pi G N`
    pub delta: f64,
    /// `8 pi^2 G N`
    pub deficit_angle: f64,
    /// `4 pi G N`, the quantity bounded by one.
    pub admissibility: f64,
    /// The radial analysis assumes `N > 1`; reported, never a failure.
    pub radial_hypothesis_n: bool,
    /// The radial analysis assumes `0 < delta <= 1`; `delta = 0` is the flat limit.
    pub radial_hypothesis_delta: bool,
}

impl ValidationReport {
    pub fn failure_summary(&self) -> String {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{}: {}", c.name, c.detail))
            .collect::<Vec<_>>()
            .join("; ")
    }
}

/// Checks the admissibility constraints. Pure; never errors.
pub fn validate(params: &PhysicalParams) -> ValidationReport {
    let n = params.vortex_number();
    let admissibility = 4.0 * PI * params.g_newton * n as f64;
    let finite = params.lambda.is_finite()
        && params.g_newton.is_finite()
        && params.g0.is_finite()
        && params
            .points
            .iter()
            .all(|p| p[0].is_finite() && p[1].is_finite());
    let checks = vec![
        Check {
            name: "finite",
            passed: finite,
            detail: "all parameters and points must be finite".into(),
        },
        Check {
            name: "lambda",
            passed: params.lambda > 0.0,
            detail: format!("lambda = {} must be > 0", params.lambda),
        },
        Check {
            name: "g0",
            passed: params.g0 > 0.0,
            detail: format!("g0 = {} must be > 0", params.g0),
        },
        Check {
            name: "G",
            passed: params.g_newton >= 0.0,
            detail: format!("G = {} must be >= 0", params.g_newton),
        },
        Check {
            name: "admissibility",
            passed: admissibility <= 1.0 + ADMISSIBILITY_SLACK,
            detail: format!("4 pi G N = {admissibility} must be <= 1"),
        },
    ];
    let delta = params.delta();
    ValidationReport {
        passed: checks.iter().all(|c| c.passed),
        checks,
        delta,
        deficit_angle: params.deficit_angle(),
        admissibility,
        radial_hypothesis_n: n > 1,
        radial_hypothesis_delta: delta <= 1.0 + ADMISSIBILITY_SLACK,
    }
}

/// Uniform square grid on `[-R, R]^2` with `n` nodes per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    pub half_extent: f64,
    pub n: usize,
    pub h: f64,
}

impl Grid2D {
    /// Grid without the vortex margin check.
    pub fn new(half_extent: f64, n: usize) -> Result<Self> {
        if n < 3 || n.is_multiple_of(2) {
            return Err(VortexError::InvalidGrid(format!(
                "n = {n} must be odd and >= 3"
            )));
        }
        if !(half_extent > 0.0 && half_extent.is_finite()) {
            return Err(VortexError::InvalidGrid(format!(
                "half extent R = {half_extent} must be positive"
            )));
        }
        Ok(Self {
            half_extent,
            n,
            h: 2.0 * half_extent / (n - 1) as f64,
        })
    }

    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        -self.half_extent + i as f64 * self.h
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.n + i
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Nodes on the outer ring `i, j in {0, n-1}`.
    #[inline]
    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i + 1 == self.n || j + 1 == self.n
    }

    /// Nearest grid index to a coordinate, if it lies on a node.
    pub fn node_at(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        let fi = (x + self.half_extent) / self.h;
        let fj = (y + self.half_extent) / self.h;
        let (i, j) = (fi.round(), fj.round());
        let on = (fi - i).abs() < 1e-9 && (fj - j).abs() < 1e-9;
        (on && i >= 0.0 && j >= 0.0 && (i as usize) < self.n && (j as usize) < self.n)
            .then_some((i as usize, j as usize))
    }
}

/// Builds the planar grid and checks that every vortex lies inside
/// `[-R/2, R/2]^2`.
pub fn make_grid(half_extent: f64, n: usize, points: &[[f64; 2]]) -> Result<Grid2D> {
    let grid = Grid2D::new(half_extent, n)?;
    let half = 0.5 * half_extent;
    for p in points {
        if p[0].abs() >= half || p[1].abs() >= half {
            return Err(VortexError::VortexTooCloseToBoundary {
                x: p[0],
                y: p[1],
                half,
            });
        }
    }
    Ok(grid)
}

/// Graded mesh on `[r_min, r_max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub r_min: f64,
    pub r_max: f64,
    pub nodes: Vec<f64>,
}

/// Construction knobs for [`RadialGrid::graded`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RadialGridSpec {
    pub r_min: f64,
    pub r_max: f64,
    /// Geometric growth ratio of consecutive spacings near `r_min` and in the far tail.
    pub ratio: f64,
    /// Spacing cap in the core region.
    pub h_max: f64,
    /// Radius beyond which the spacing may grow geometrically again.
    pub r_far: f64,
}

impl Default for RadialGridSpec {
    fn default() -> Self {
        Self {
            r_min: 1e-3,
            r_max: 1e3,
            ratio: 1.02,
            h_max: 0.05,
            r_far: 60.0,
        }
    }
}

impl RadialGrid {
    /// Geometric grading from `r_min` until the spacing reaches `h_max`, uniform
    /// spacing up to `r_far`, then geometric again to `r_max`.
    pub fn graded(spec: &RadialGridSpec) -> Result<Self> {
        let RadialGridSpec {
            r_min,
            r_max,
            ratio,
            h_max,
            r_far,
        } = *spec;
        if !(r_min > 0.0 && r_max.is_finite() && r_max / r_min >= 1e3) {
            return Err(VortexError::InvalidGrid(format!(
                "need r_min > 0 and r_max / r_min >= 1e3 (got {r_min}, {r_max})"
            )));
        }
        if !(ratio > 1.0 && h_max > 0.0) {
            return Err(VortexError::InvalidGrid(format!(
                "need ratio > 1 and h_max > 0 (got {ratio}, {h_max})"
            )));
        }
        let mut nodes = vec![r_min];
        let mut r = r_min;
        let mut step = r_min * (ratio - 1.0);
        while r < r_max {
            step *= ratio;
            if r < r_far {
                step = step.min(h_max);
            }
            r += step;
            if r > r_max || r_max - r < 0.25 * step {
                r = r_max;
            }
            nodes.push(r);
        }
        Self::from_nodes(nodes)
    }

    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 8 {
            return Err(VortexError::InvalidGrid(
                "need at least 8 radial nodes".into(),
            ));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(VortexError::InvalidGrid(
                "radial nodes must be strictly increasing".into(),
            ));
        }
        let (r_min, r_max) = (nodes[0], *nodes.last().unwrap());
        if !(r_min > 0.0 && r_max / r_min >= 1e3) {
            return Err(VortexError::InvalidGrid(format!(
                "need r_min > 0 and r_max / r_min >= 1e3 (got {r_min}, {r_max})"
            )));
        }
        Ok(Self {
            r_min,
            r_max,
            nodes,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Index `i` with `nodes[i] <= r < nodes[i + 1]`, clamped to the valid range.
    pub fn locate(&self, r: f64) -> usize {
        let n = self.nodes.len();
        match self.nodes.binary_search_by(|x| x.total_cmp(&r)) {
            Ok(i) => i.min(n - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(n - 2),
        }
    }
}

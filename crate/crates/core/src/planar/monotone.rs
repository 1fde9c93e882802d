//! Monotone iteration for `Lap v = e^eta (e^{u0 + v} - 1) + g` with the
//! metric lagged between outer passes.

use serde::{Deserialize, Serialize};

use crate::error::{Result, VortexError};
use crate::field::ScalarField2D;
use crate::metric::{metric_from_v, MetricField};
use crate::params::PhysicalParams;

use super::background::BackgroundPair;
use super::multigrid::Multigrid;

/// Allowed nodewise increase of an inner iterate.
pub const MONOTONE_SLACK: f64 = 1e-12;
const KAPPA_MARGIN: f64 = 1.05;
const LINEAR_TOL: f64 = 1e-12;
const POLISH_STEPS: usize = 8;
const POLISH_FACTOR: f64 = 1e-5;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_outer: usize,
    pub max_inner: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_outer: 50,
            max_inner: 500,
        }
    }
}

/// Per-solve diagnostics.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SolveTelemetry {
    pub inner_iters: Vec<usize>,
    pub outer_changes: Vec<f64>,
    pub linear_cycles: usize,
    /// Largest nodewise increase seen between consecutive inner iterates.
    pub max_increase: f64,
    /// Largest `u` over every iterate after the starting supersolution.
    pub max_u_iterates: f64,
    /// Largest `u` of the starting supersolution.
    pub max_u_start: f64,
    /// Largest violation of a supplied lower barrier (0 when none given).
    pub barrier_violation: f64,
    pub damping: f64,
}

#[derive(Debug, Clone)]
pub struct PlanarSolution {
    pub params: PhysicalParams,
    pub background: BackgroundPair,
    pub v: ScalarField2D,
    pub u: ScalarField2D,
    pub metric: MetricField,
    /// Sup-norm of every inner correction, in order.
    pub residual_history: Vec<f64>,
    pub outer_iters: usize,
    pub telemetry: SolveTelemetry,
}

impl PlanarSolution {
    /// `e^u`, exactly zero at on-node vortices.
    pub fn exp_u(&self) -> ScalarField2D {
        self.background.exp_u(&self.v)
    }

    /// Sup of the five-point residual `Lap_h v - F(v)` over interior nodes
    /// outside the 3x3 vortex patches.
    pub fn pde_residual(&self) -> f64 {
        let f = rhs_field(&self.v, &self.background, &self.metric.values);
        let grid = self.v.grid;
        let mut m: f64 = 0.0;
        for j in 1..grid.n - 1 {
            for i in 1..grid.n - 1 {
                if self.background.near_vortex(i, j) {
                    continue;
                }
                m = m.max((self.v.laplacian_at(i, j) - f.at(i, j)).abs());
            }
        }
        m
    }

    /// Sup of `Lap v - F(v)` with `Lap` the fourth-order stencil, i.e. the
    /// residual of the discrete solution in the continuous equation up to
    /// `O(h^4)`. Nodes within two of the boundary are skipped.
    pub fn truncation_residual(&self) -> f64 {
        let f = rhs_field_exact(&self.v, &self.background, &self.metric.values);
        let grid = self.v.grid;
        let mut m: f64 = 0.0;
        for j in 0..grid.n {
            for i in 0..grid.n {
                if let Some(l) = self.v.laplacian4_at(i, j) {
                    m = m.max((l - f.at(i, j)).abs());
                }
            }
        }
        m
    }

    /// Certificate bound `10 tol (1 + |e^eta|_inf)`.
    pub fn residual_bound(&self, tol: f64) -> f64 {
        10.0 * tol * (1.0 + self.metric.values.max())
    }
}

/// `F(v) = e^eta (P e^v - 1) + g_h`, the right side of the discrete equation.
pub fn rhs_field(v: &ScalarField2D, bg: &BackgroundPair, e_eta: &ScalarField2D) -> ScalarField2D {
    rhs_with_source(v, bg, e_eta, &bg.g_h)
}

/// As [`rhs_field`] with the exact source `g`.
pub fn rhs_field_exact(
    v: &ScalarField2D,
    bg: &BackgroundPair,
    e_eta: &ScalarField2D,
) -> ScalarField2D {
    rhs_with_source(v, bg, e_eta, &bg.g)
}

fn rhs_with_source(
    v: &ScalarField2D,
    bg: &BackgroundPair,
    e_eta: &ScalarField2D,
    g: &ScalarField2D,
) -> ScalarField2D {
    let mut out = ScalarField2D::zeros(v.grid);
    for k in 0..v.data.len() {
        out.data[k] = e_eta.data[k] * (bg.p.data[k] * v.data[k].exp() - 1.0) + g.data[k];
    }
    out
}

/// Metric of `u = 0`. Since `u - e^u` peaks at `u = 0` this is the
/// pointwise largest metric over all `u`, which makes the first outer pass
/// a supersolution of every later one.
pub fn maximal_metric(bg: &BackgroundPair, params: &PhysicalParams) -> Result<MetricField> {
    metric_from_v(&bg.supersolution(), bg, params)
}

/// Discrete supersolution `-u0 + psi` for the maximal metric. `psi >= 0`
/// absorbs the part of the five-point Laplacian of `-u0` near vortices that
/// exceeds `F(-u0)`; screening by `e^eta` uses `e^psi - 1 >= psi` and keeps
/// `psi` local.
pub fn discrete_supersolution(
    bg: &BackgroundPair,
    params: &PhysicalParams,
) -> Result<ScalarField2D> {
    let vp = bg.supersolution();
    let grid = vp.grid;
    let metric = maximal_metric(bg, params)?;
    let f = rhs_field(&vp, bg, &metric.values);
    let mut d = ScalarField2D::zeros(grid);
    let mut any = false;
    for j in 1..grid.n - 1 {
        for i in 1..grid.n - 1 {
            let excess = vp.laplacian_at(i, j) - f.at(i, j);
            if excess > 0.0 {
                d.set(i, j, -excess);
                any = true;
            }
        }
    }
    if !any {
        return Ok(vp);
    }
    let screen = metric
        .values
        .zip_map(&bg.p, |e, p| if p > 0.0 { e } else { 0.0 });
    let mut psi = ScalarField2D::zeros(grid);
    Multigrid::new(&screen).solve(&mut psi, &d, LINEAR_TOL)?;
    Ok(vp.zip_map(&psi, |a, b| a + b.max(0.0)))
}

/// Runs the lagged-metric monotone scheme from the discrete supersolution.
/// Dirichlet data `u = 0` on the boundary ring. `barrier`, when given, is a
/// lower bound for `u` checked on every iterate.
pub fn monotone_solve(
    bg: &BackgroundPair,
    params: &PhysicalParams,
    opts: &SolveOptions,
    barrier: Option<&ScalarField2D>,
) -> Result<PlanarSolution> {
    params.ensure_valid()?;
    if (params.lambda - 1.0).abs() > 1e-12 {
        return Err(VortexError::InvalidParams(format!(
            "the planar solver handles the self-dual coupling lambda = 1 only, got {}",
            params.lambda
        )));
    }
    if !(opts.tol > 0.0) || opts.max_outer == 0 || opts.max_inner == 0 {
        return Err(VortexError::InvalidParams(
            "tol, max_outer and max_inner must be positive".into(),
        ));
    }
    let mut tel = SolveTelemetry {
        damping: 1.0,
        max_u_iterates: f64::NEG_INFINITY,
        ..Default::default()
    };
    let mut v = discrete_supersolution(bg, params)?;
    tel.max_u_start = bg.compose_u(&v).max();
    let mut history = Vec::new();
    let mut last_change = f64::INFINITY;

    for outer in 1..=opts.max_outer {
        let metric = if outer == 1 {
            maximal_metric(bg, params)?
        } else {
            metric_from_v(&v, bg, params)?
        };
        let v_start = v.clone();
        let mut inner = 0;
        loop {
            if inner == opts.max_inner {
                return Err(VortexError::NoConvergence {
                    iterations: inner,
                    last_change: history.last().copied().unwrap_or(f64::NAN),
                    hint: " in the inner loop; raise max_inner".into(),
                });
            }
            inner += 1;
            let change = inner_step(&mut v, bg, &metric, barrier, &mut tel)?;
            history.push(change);
            if change < opts.tol {
                break;
            }
        }
        tel.inner_iters.push(inner);
        let change = v.sup_diff(&v_start);
        tel.outer_changes.push(change);
        if change < opts.tol {
            // descent from above stops O(tol) above the discrete solution;
            // a few cheap steps close the gap so the sign of u is meaningful
            let metric = metric_from_v(&v, bg, params)?;
            let mut prev = f64::INFINITY;
            for _ in 0..POLISH_STEPS {
                let c = inner_step(&mut v, bg, &metric, barrier, &mut tel)?;
                history.push(c);
                if c < POLISH_FACTOR * opts.tol || c >= prev {
                    break;
                }
                prev = c;
            }
            let metric = metric_from_v(&v, bg, params)?;
            let u = bg.compose_u(&v);
            return Ok(PlanarSolution {
                params: params.clone(),
                background: bg.clone(),
                v,
                u,
                metric,
                residual_history: history,
                outer_iters: outer,
                telemetry: tel,
            });
        }
        if change > last_change {
            // oscillating metric update: under-relax the outer pass
            tel.damping *= 0.5;
            let w = tel.damping;
            v = v_start.zip_map(&v, |a, b| a + w * (b - a));
        }
        last_change = change;
    }
    Err(VortexError::NoConvergence {
        iterations: opts.max_outer,
        last_change,
        hint: " in the outer metric loop; raise max_outer".into(),
    })
}

/// One correction `(Lap_h - kappa) delta = F(v) - Lap_h v`, `v += delta`;
/// returns `sup |delta|`.
fn inner_step(
    v: &mut ScalarField2D,
    bg: &BackgroundPair,
    metric: &MetricField,
    barrier: Option<&ScalarField2D>,
    tel: &mut SolveTelemetry,
) -> Result<f64> {
    let grid = v.grid;
    let n = grid.n;
    let mut kappa = ScalarField2D::zeros(grid);
    let f = rhs_field(v, bg, &metric.values);
    let mut rhs = ScalarField2D::zeros(grid);
    for j in 1..n - 1 {
        for i in 1..n - 1 {
            let k = j * n + i;
            rhs.data[k] = f.data[k] - v.laplacian_at(i, j);
            kappa.data[k] = KAPPA_MARGIN * metric.values.data[k] * bg.p.data[k] * v.data[k].exp();
        }
    }
    let mut delta = ScalarField2D::zeros(grid);
    let stats = Multigrid::new(&kappa).solve(&mut delta, &rhs, LINEAR_TOL)?;
    tel.linear_cycles += stats.cycles;
    let (k_max, inc) =
        delta
            .data
            .iter()
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, (k, &d)| if d > acc.1 { (k, d) } else { acc },
            );
    tel.max_increase = tel.max_increase.max(inc);
    if inc > MONOTONE_SLACK {
        return Err(VortexError::MonotonicityViolation {
            increase: inc,
            node: k_max,
        });
    }
    for k in 0..v.data.len() {
        v.data[k] += delta.data[k];
    }
    let u = bg.compose_u(v);
    tel.max_u_iterates = tel.max_u_iterates.max(u.max());
    if let Some(b) = barrier {
        let viol = b
            .data
            .iter()
            .zip(&u.data)
            .fold(0.0f64, |m, (lo, uu)| m.max(lo - uu));
        tel.barrier_violation = tel.barrier_violation.max(viol);
    }
    Ok(delta.sup_norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::make_grid;
    use crate::planar::build_background;

    fn solve(points: Vec<[f64; 2]>, g: f64, r: f64, n: usize) -> PlanarSolution {
        let params = PhysicalParams::new(1.0, g, 1.0, points);
        let grid = make_grid(r, n, &params.points).unwrap();
        let bg = build_background(&params.points, grid);
        monotone_solve(&bg, &params, &SolveOptions::default(), None).unwrap()
    }

    #[test]
    fn no_vortices_gives_zero() {
        let s = solve(vec![], 0.0, 5.0, 33);
        assert_eq!(s.v.sup_norm(), 0.0);
        assert_eq!(s.outer_iters, 1);
    }

    #[test]
    fn supersolution_is_discrete_supersolution() {
        let params = PhysicalParams::new(1.0, 0.01, 1.0, vec![[0.0, 0.0], [1.3, -0.4]]);
        let grid = make_grid(8.0, 65, &params.points).unwrap();
        let bg = build_background(&params.points, grid);
        let vs = discrete_supersolution(&bg, &params).unwrap();
        let m = maximal_metric(&bg, &params).unwrap();
        let f = rhs_field(&vs, &bg, &m.values);
        for j in 1..grid.n - 1 {
            for i in 1..grid.n - 1 {
                assert!(vs.laplacian_at(i, j) - f.at(i, j) <= 1e-9);
            }
        }
        // smooth-part residual of u = 0 away from the vortex patches is zero
        let v0 = bg.supersolution();
        let f0 = rhs_field(&v0, &bg, &m.values);
        for k in 0..grid.len() {
            if bg.p.data[k] > 0.0 {
                assert!((f0.data[k] - bg.g_h.data[k]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn single_vortex_small_domain() {
        let s = solve(vec![[0.0, 0.0]], 0.0, 8.0, 65);
        assert!(s.u.max() <= 0.0);
        assert!(s.pde_residual() < s.residual_bound(1e-8));
        assert!(s.telemetry.max_increase <= MONOTONE_SLACK);
        // boundary carries u = 0
        assert_eq!(s.u.at(0, 10), 0.0);
        // radial symmetry on the lattice
        assert!((s.u.at(40, 32) - s.u.at(32, 40)).abs() < 1e-10);
    }

    #[test]
    fn lambda_other_than_one_rejected() {
        let params = PhysicalParams::new(2.0, 0.0, 1.0, vec![[0.0, 0.0]]);
        let grid = make_grid(8.0, 33, &params.points).unwrap();
        let bg = build_background(&params.points, grid);
        assert!(monotone_solve(&bg, &params, &SolveOptions::default(), None).is_err());
    }

    #[test]
    fn curved_solution_is_monotone_and_negative() {
        let g = PhysicalParams::g_for_delta(0.5, 2);
        let s = solve(vec![[0.5, 0.0], [-0.5, 0.0]], g, 8.0, 65);
        assert!(s.u.max() <= 0.0);
        assert!(s.outer_iters > 1);
        assert!(s.pde_residual() < s.residual_bound(1e-8));
    }

    #[test]
    fn too_few_outer_passes_reports_no_convergence() {
        let params = PhysicalParams::new(
            1.0,
            PhysicalParams::g_for_delta(0.5, 1),
            1.0,
            vec![[0.0, 0.0]],
        );
        let grid = make_grid(8.0, 33, &params.points).unwrap();
        let bg = build_background(&params.points, grid);
        let opts = SolveOptions {
            max_outer: 1,
            ..Default::default()
        };
        assert!(matches!(
            monotone_solve(&bg, &params, &opts, None),
            Err(VortexError::NoConvergence { .. })
        ));
    }
}

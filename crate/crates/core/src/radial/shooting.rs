//! Shooting in the initial slope parameter for the matter profile `u`
//! (parameter `a`, `u ~ a r^N`) and the gauge profile `v` (parameter `b`,
//! `v ~ b r^2`).

use serde::{Deserialize, Serialize};

use super::model::{RadialModel, VEquation};
use super::ode::{integrate, Flow, OdeOptions, State, Step};
use super::profile::RadialProfile;
use super::series::{local_series_u, local_series_v};
use crate::error::{Result, VortexError};
use crate::params::RadialGrid;

/// Bracketing trajectories are trusted while they differ by less than this
/// fraction of the remaining distance to 1 (and of the slope).
const SPLIT_REL: f64 = 1e-3;
/// The forward solution is matched to the backward tail once `1 - f` falls
/// below this.
const MATCH_GAP: f64 = 1e-2;
/// Decay (in e-folds) assumed between the matching node and the start of the
/// backward tail integration.
const TAIL_EFOLDS: f64 = 70.0;
const EXPAND_LIMIT: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShotClass {
    A1,
    A2,
    A3,
    B1,
    B2,
    B3,
}

impl ShotClass {
    /// Turned back while inside `(0, 1)`.
    pub fn is_low(self) -> bool {
        matches!(self, Self::A1 | Self::B1)
    }

    /// Reached 1.
    pub fn is_high(self) -> bool {
        matches!(self, Self::A2 | Self::B2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootingOutcome {
    pub class: ShotClass,
    pub exit_r: f64,
    /// `(f, f')` at `exit_r`.
    pub state: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Component {
    U,
    V,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShootOptions {
    pub bracket: [f64; 2],
    /// Bisection stops when `hi - lo <= bisect_tol * hi` or no midpoint is
    /// representable.
    pub bisect_tol: f64,
    pub tail_tol: f64,
    pub rtol: f64,
}

impl Default for ShootOptions {
    fn default() -> Self {
        Self {
            bracket: [1e-2, 10.0],
            bisect_tol: 1e-15,
            tail_tol: 0.02,
            rtol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShootStats {
    pub param: f64,
    pub lo: f64,
    pub hi: f64,
    pub iterations: usize,
    /// Bisection steps until `hi - lo < 1e-12`.
    pub iterations_to_1e12: Option<usize>,
    pub exit_lo: f64,
    pub exit_hi: f64,
    /// Node where the forward solution hands over to the inward tail.
    pub match_r: f64,
}

struct Shot<'a> {
    comp: Component,
    model: &'a RadialModel,
    other: &'a RadialProfile,
    grid: &'a RadialGrid,
    ode: OdeOptions,
}

impl Shot<'_> {
    fn start(&self, p: f64) -> State {
        let r = self.grid.r_min;
        let (f, df) = match self.comp {
            Component::U => local_series_u(p, r, self.model, self.other),
            Component::V => local_series_v(p, r, self.model, self.other),
        };
        [f, df]
    }

    fn rhs(&self, r: f64, y: &State) -> State {
        let m = self.model;
        let (e, de) = m.metric.eval(r);
        match self.comp {
            Component::U => {
                let (v, _) = self.other.eval(r, m.v_power());
                [y[1], m.u_second(r, y[0], y[1], v, e)]
            }
            Component::V => {
                let (u, _) = self.other.eval(r, m.nf());
                [y[1], m.v_second(r, y[0], y[1], u, e, de)]
            }
        }
    }

    /// Right side for `w = 1 - f`, written so that tiny `w` keeps its
    /// relative precision.
    fn tail_rhs(&self, r: f64, y: &State) -> State {
        let m = self.model;
        let (e, de) = m.metric.eval(r);
        let (w, dw) = (y[0], y[1]);
        match self.comp {
            Component::U => {
                let (v, _) = self.other.eval(r, m.v_power());
                let z = 1.0 - v;
                let nf = m.nf();
                let d2 = -dw / r - nf * nf * z * z * (1.0 - w) / (r * r)
                    + 0.5 * m.lambda * e * w * (2.0 - w) * (1.0 - w);
                [dw, d2]
            }
            Component::V => {
                let (u, _) = self.other.eval(r, m.nf());
                let mut d2 = dw / r + u * u * w * e;
                if m.v_equation == VEquation::FullEulerLagrange {
                    d2 += de * dw;
                }
                [dw, d2]
            }
        }
    }

    /// Local decay rate of the linearized tail.
    fn tail_rate(&self, r: f64) -> f64 {
        let (e, _) = self.model.metric.eval(r);
        match self.comp {
            Component::U => (self.model.lambda * e).sqrt(),
            Component::V => e.sqrt(),
        }
    }

    /// Response of `w` to the coupling source `F = N^2 (1 - v)^2 / r^2` of
    /// the matter equation, as `(w_f, w_f')`: with `F ~ e^{-k r}` locally,
    /// `w_f = F / (m^2 - k^2)`. Zero when the source decays faster than the
    /// homogeneous tail, since it can then never dominate.
    fn forced_part(&self, r: f64) -> (f64, f64) {
        if self.comp == Component::V {
            return (0.0, 0.0);
        }
        let m = self.model;
        let source = |x: f64| {
            let (v, _) = self.other.eval(x, m.v_power());
            m.nf() * m.nf() * (1.0 - v).powi(2) / (x * x)
        };
        let f = source(r);
        if f <= 0.0 {
            return (0.0, 0.0);
        }
        let h = 1e-4 * r;
        let k = -(source(r + h).ln() - source(r - h).ln()) / (2.0 * h);
        let rate = self.tail_rate(r);
        if !(k.is_finite() && k < rate) {
            return (0.0, 0.0);
        }
        let w = f / (rate * rate - k * k);
        (w, -k * w)
    }

    /// Integrates `w = 1 - f` inward from node `b` down to node `s` with
    /// `(w, w')(r_b) = c (1, -m) + (w_f, w_f')`; returns `(w, w')` at nodes
    /// `s..=b`.
    fn tail_backward(&self, s: usize, b: usize, c: f64) -> Result<Vec<State>> {
        let nodes = &self.grid.nodes;
        let rb = nodes[b];
        let (wf, dwf) = self.forced_part(rb);
        let y0 = [c + wf, -c * self.tail_rate(rb) + dwf];
        let stops: Vec<f64> = nodes[s..b].iter().rev().map(|r| -r).collect();
        let mut out = vec![[0.0; 2]; b - s + 1];
        out[b - s] = y0;
        let mut next = b;
        integrate(
            |x, y| {
                let d = self.tail_rhs(-x, y);
                [-d[0], -d[1]]
            },
            -rb,
            y0,
            -nodes[s],
            &stops,
            &OdeOptions {
                atol: f64::MIN_POSITIVE,
                ..self.ode
            },
            |st: &Step| {
                while next > s && -nodes[next - 1] <= st.r1 {
                    next -= 1;
                    if -nodes[next] == st.r1 {
                        out[next - s] = st.y1;
                    }
                }
                Flow::Continue
            },
        )?;
        Ok(out)
    }

    fn classes(&self) -> (ShotClass, ShotClass, ShotClass) {
        match self.comp {
            Component::U => (ShotClass::A1, ShotClass::A2, ShotClass::A3),
            Component::V => (ShotClass::B1, ShotClass::B2, ShotClass::B3),
        }
    }

    /// Integrates one trajectory. With `record`, node samples up to the exit
    /// are returned.
    fn run(&self, p: f64, record: bool) -> Result<(ShootingOutcome, Vec<State>)> {
        let (low, high, through) = self.classes();
        let y0 = self.start(p);
        let r0 = self.grid.r_min;
        let mut samples = Vec::new();
        if y0[0] >= 1.0 {
            return Ok((
                ShootingOutcome {
                    class: high,
                    exit_r: r0,
                    state: y0,
                },
                samples,
            ));
        }
        if record {
            samples.push(y0);
        }
        let nodes = &self.grid.nodes;
        let mut next = 1;
        let mut outcome = None;
        let stops: &[f64] = nodes;
        integrate(
            |r, y| self.rhs(r, y),
            r0,
            y0,
            self.grid.r_max,
            stops,
            &self.ode,
            |s: &Step| {
                // the crossing of 1 wins ties with a turning point
                if s.y1[0] >= 1.0 {
                    let r = if s.y0[0] < 1.0 {
                        s.locate(0, 1.0)
                    } else {
                        s.r0
                    };
                    outcome = Some((high, r, [s.hermite(0, r), s.hermite(1, r)]));
                    return Flow::Stop;
                }
                if s.y1[1] < 0.0 || s.y1[0] <= 0.0 {
                    let r = if s.y0[1] >= 0.0 && s.y1[1] < 0.0 {
                        s.locate(1, 0.0)
                    } else {
                        s.r1
                    };
                    outcome = Some((low, r, [s.hermite(0, r), s.hermite(1, r)]));
                    return Flow::Stop;
                }
                if record {
                    while next < nodes.len() && nodes[next] <= s.r1 {
                        if nodes[next] == s.r1 {
                            samples.push(s.y1);
                        }
                        next += 1;
                    }
                }
                Flow::Continue
            },
        )?;
        let out = match outcome {
            Some((class, exit_r, state)) => ShootingOutcome {
                class,
                exit_r,
                state,
            },
            None => {
                let state = samples.last().copied().unwrap_or(y0);
                ShootingOutcome {
                    class: through,
                    exit_r: self.grid.r_max,
                    state,
                }
            }
        };
        Ok((out, samples))
    }

    fn classify(&self, p: f64) -> Result<ShootingOutcome> {
        Ok(self.run(p, false)?.0)
    }

    fn shoot(&self, opts: &ShootOptions) -> Result<(f64, RadialProfile, ShootStats)> {
        let [mut lo, mut hi] = opts.bracket;
        if !(lo > 0.0 && hi > lo) {
            return Err(VortexError::InvalidParams(format!(
                "bad bracket [{lo}, {hi}]"
            )));
        }
        let mut c_lo = self.classify(lo)?;
        while !c_lo.class.is_low() {
            lo /= 10.0;
            if lo < 1.0 / EXPAND_LIMIT {
                return Err(VortexError::BracketNotFound {
                    lo: 1.0 / EXPAND_LIMIT,
                    hi,
                    reason: format!(
                        "no turning trajectory; smallest parameter gives {:?}",
                        c_lo.class
                    ),
                });
            }
            c_lo = self.classify(lo)?;
        }
        let mut c_hi = self.classify(hi)?;
        while c_hi.class.is_low() {
            hi *= 10.0;
            if hi > EXPAND_LIMIT {
                return Err(VortexError::BracketNotFound {
                    lo,
                    hi: EXPAND_LIMIT,
                    reason: "no trajectory reaches 1".into(),
                });
            }
            c_hi = self.classify(hi)?;
        }
        let mut iterations = 0;
        let mut to_1e12 = None;
        loop {
            if to_1e12.is_none() && hi - lo < 1e-12 {
                to_1e12 = Some(iterations);
            }
            if hi - lo <= opts.bisect_tol * hi {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            iterations += 1;
            let c = self.classify(mid)?;
            if c.class.is_low() {
                lo = mid;
                c_lo = c;
            } else {
                hi = mid;
                c_hi = c;
            }
        }
        let (_, tr_lo) = self.run(lo, true)?;
        let (_, tr_hi) = self.run(hi, true)?;
        let (profile, match_r) = self.assemble(&tr_lo, &tr_hi, opts.tail_tol)?;
        let stats = ShootStats {
            param: 0.5 * (lo + hi),
            lo,
            hi,
            iterations,
            iterations_to_1e12: to_1e12,
            exit_lo: c_lo.exit_r,
            exit_hi: c_hi.exit_r,
            match_r,
        };
        Ok((stats.param, profile, stats))
    }

    /// Averages the bracketing trajectories until `1 - f` is small or they
    /// separate, then continues with the decaying tail integrated inward
    /// from far out and scaled to match.
    fn assemble(&self, lo: &[State], hi: &[State], tail_tol: f64) -> Result<(RadialProfile, f64)> {
        let nodes = &self.grid.nodes;
        let last = nodes.len() - 1;
        let common = lo.len().min(hi.len());
        let mut values = Vec::with_capacity(nodes.len());
        let mut derivs = Vec::with_capacity(nodes.len());
        let mut end = common;
        for k in 0..common {
            let f = 0.5 * (lo[k][0] + hi[k][0]);
            let d = 0.5 * (lo[k][1] + hi[k][1]);
            let w = 1.0 - f;
            if (lo[k][0] - hi[k][0]).abs() > SPLIT_REL * w
                || (lo[k][1] - hi[k][1]).abs() > SPLIT_REL * d.abs()
            {
                end = k;
                break;
            }
            values.push(f);
            derivs.push(d);
            if w <= MATCH_GAP {
                end = k + 1;
                break;
            }
        }
        let not_reached = |k: usize, value: f64| VortexError::TailNotReached {
            r: nodes[k],
            value,
            needed: 1.0 - tail_tol,
        };
        if end < 2 {
            return Err(not_reached(0, lo.first().map_or(0.0, |y| y[0])));
        }
        let s = end - 1;
        values.truncate(end);
        derivs.truncate(end);
        let ws = 1.0 - values[s];
        if ws > tail_tol {
            return Err(not_reached(s, values[s]));
        }
        if s == last {
            return Ok((
                RadialProfile {
                    grid: self.grid.clone(),
                    values,
                    derivs,
                    trusted_until: nodes[last],
                },
                nodes[s],
            ));
        }
        // far end of the inward integration: stop before the homogeneous
        // decay sinks under the forced response
        let mut b = s;
        let mut efolds = 0.0;
        while b < last
            && efolds < TAIL_EFOLDS
            && ws * (-efolds).exp() > 1e3 * self.forced_part(nodes[b]).0
        {
            efolds += 0.5
                * (self.tail_rate(nodes[b]) + self.tail_rate(nodes[b + 1]))
                * (nodes[b + 1] - nodes[b]);
            b += 1;
        }
        let b = b.max(s + 1);
        // the matched value is nearly affine in the homogeneous amplitude
        let mut c = ws * (-efolds).exp();
        let mut tail = self.tail_backward(s, b, c)?;
        let mut slope = {
            let probe = self.tail_backward(s, b, 2.0 * c)?;
            (probe[0][0] - tail[0][0]) / c
        };
        for _ in 0..20 {
            let miss = ws - tail[0][0];
            if miss.abs() <= 1e-11 * ws {
                break;
            }
            if !(slope.is_finite() && slope > 0.0) {
                if miss.abs() <= 1e-8 * ws {
                    break;
                }
                return Err(not_reached(s, values[s]));
            }
            let next = c + miss / slope;
            let t = self.tail_backward(s, b, next)?;
            slope = (t[0][0] - tail[0][0]) / (next - c);
            c = next;
            tail = t;
        }
        for t in &tail[1..] {
            values.push(1.0 - t[0]);
            derivs.push(-t[1]);
        }
        let rb = nodes[b];
        let wb = tail[b - s][0];
        let mut decay = 0.0;
        for k in b + 1..=last {
            decay += 0.5
                * (self.tail_rate(nodes[k - 1]) + self.tail_rate(nodes[k]))
                * (nodes[k] - nodes[k - 1]);
            let w = wb * (-decay).exp();
            values.push(1.0 - w);
            derivs.push(w * self.tail_rate(nodes[k]));
        }
        Ok((
            RadialProfile {
                grid: self.grid.clone(),
                values,
                derivs,
                trusted_until: rb,
            },
            nodes[s],
        ))
    }
}

fn shot<'a>(
    comp: Component,
    model: &'a RadialModel,
    other: &'a RadialProfile,
    rtol: f64,
) -> Shot<'a> {
    Shot {
        comp,
        model,
        other,
        grid: &other.grid,
        ode: OdeOptions {
            rtol,
            ..Default::default()
        },
    }
}

/// Classifies the matter trajectory with parameter `a` against a fixed gauge
/// profile.
pub fn integrate_u(a: f64, v: &RadialProfile, model: &RadialModel) -> Result<ShootingOutcome> {
    shot(Component::U, model, v, OdeOptions::default().rtol).classify(a)
}

/// Classifies the gauge trajectory with parameter `b` against a fixed matter
/// profile.
pub fn integrate_v(b: f64, u: &RadialProfile, model: &RadialModel) -> Result<ShootingOutcome> {
    shot(Component::V, model, u, OdeOptions::default().rtol).classify(b)
}

/// Bisection on `a` between the turning and the crossing classes; returns
/// `a*` and the matter profile on the grid of `v`.
pub fn shoot_u(
    v: &RadialProfile,
    model: &RadialModel,
    opts: &ShootOptions,
) -> Result<(f64, RadialProfile, ShootStats)> {
    shot(Component::U, model, v, opts.rtol).shoot(opts)
}

/// As [`shoot_u`] for the gauge profile given `u`.
pub fn shoot_v(
    u: &RadialProfile,
    model: &RadialModel,
    opts: &ShootOptions,
) -> Result<(f64, RadialProfile, ShootStats)> {
    shot(Component::V, model, u, opts.rtol).shoot(opts)
}

/// Sup over interior nodes of the matter-equation residual with `u''` from
/// differentiating the stored `u'`.
pub fn residual_u(u: &RadialProfile, v: &RadialProfile, model: &RadialModel) -> f64 {
    let d2 = u.second_derivs();
    let x = u.nodes();
    (2..x.len() - 2).fold(0.0, |m, k| {
        let (e, _) = model.metric.eval(x[k]);
        let res = d2[k] - model.u_second(x[k], u.values[k], u.derivs[k], v.values[k], e);
        m.max(res.abs())
    })
}

/// As [`residual_u`] for the gauge equation.
pub fn residual_v(u: &RadialProfile, v: &RadialProfile, model: &RadialModel) -> f64 {
    let d2 = v.second_derivs();
    let x = v.nodes();
    (2..x.len() - 2).fold(0.0, |m, k| {
        let (e, de) = model.metric.eval(x[k]);
        let res = d2[k] - model.v_second(x[k], v.values[k], v.derivs[k], u.values[k], e, de);
        m.max(res.abs())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::RadialGridSpec;
    use crate::radial::model::{RadialMetric, VEquation};

    fn model(delta: f64, lambda: f64, n: usize) -> RadialModel {
        RadialModel {
            n,
            lambda,
            metric: RadialMetric::PowerLaw { g0: 1.0, delta },
            v_equation: VEquation::Reduced,
        }
    }

    fn grid() -> RadialGrid {
        RadialGrid::graded(&RadialGridSpec::default()).unwrap()
    }

    #[test]
    fn trichotomy_small_and_large() {
        let v = RadialProfile::default_v(&grid());
        let m = model(0.5, 1.0, 2);
        assert_eq!(integrate_u(1e-2, &v, &m).unwrap().class, ShotClass::A1);
        assert_eq!(integrate_u(10.0, &v, &m).unwrap().class, ShotClass::A2);
    }

    #[test]
    fn free_equation_crosses_at_closed_form_radius() {
        let g = grid();
        let zero = RadialProfile::from_fn(&g, |_| (0.0, 0.0));
        let m = model(0.0, 0.0, 2);
        // u = a r^2 solves the free equation exactly
        let a: f64 = 0.04;
        let out = integrate_u(a, &zero, &m).unwrap();
        assert_eq!(out.class, ShotClass::A2);
        assert!((out.exit_r - a.powf(-0.5)).abs() < 1e-8 * a.powf(-0.5));
        assert!(matches!(
            shoot_u(&zero, &m, &ShootOptions::default()),
            Err(VortexError::BracketNotFound { .. })
        ));
    }

    #[test]
    fn gauge_without_matter_has_no_bracket() {
        let g = grid();
        let zero = RadialProfile::from_fn(&g, |_| (0.0, 0.0));
        let m = model(0.0, 1.0, 2);
        let out = integrate_v(4.0, &zero, &m).unwrap();
        assert_eq!(out.class, ShotClass::B2);
        assert!((out.exit_r - 0.5).abs() < 1e-8);
        assert!(shoot_v(&zero, &m, &ShootOptions::default()).is_err());
    }

    #[test]
    fn classification_is_deterministic() {
        let v = RadialProfile::default_v(&grid());
        let m = model(0.25, 1.0, 2);
        let a = integrate_u(0.7, &v, &m).unwrap();
        let b = integrate_u(0.7, &v, &m).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn shoot_u_brackets_and_reaches_tail() {
        let v = RadialProfile::default_v(&grid());
        let m = model(0.5, 1.0, 2);
        let (a, u, stats) = shoot_u(&v, &m, &ShootOptions::default()).unwrap();
        assert!(stats.lo < a && a < stats.hi);
        assert!(stats.iterations_to_1e12.unwrap() < 60);
        assert!(*u.values.last().unwrap() > 0.98);
        assert!(u.derivs.iter().all(|&d| d >= -1e-10));
        assert!(u.trusted_until > 10.0, "{}", u.trusted_until);
    }
}

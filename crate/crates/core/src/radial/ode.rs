//! Dormand-Prince 5(4) for two-component first-order systems, with optional
//! landing on prescribed abscissae and a per-step observer.

use crate::error::{Result, VortexError};

pub type State = [f64; 2];

/// One accepted step: endpoints and slopes, enough for cubic Hermite
/// reconstruction of each component.
#[derive(Debug, Clone, Copy)]
pub struct Step {
    pub r0: f64,
    pub y0: State,
    pub f0: State,
    pub r1: f64,
    pub y1: State,
    pub f1: State,
}

impl Step {
    /// Cubic Hermite interpolant of component `c` at `r`.
    pub fn hermite(&self, c: usize, r: f64) -> f64 {
        hermite(
            self.r0, self.y0[c], self.f0[c], self.r1, self.y1[c], self.f1[c], r,
        )
    }

    /// Root of component `c` minus `level` inside the step, by bisection on
    /// the Hermite interpolant; assumes a sign change between the ends.
    pub fn locate(&self, c: usize, level: f64) -> f64 {
        let g = |r: f64| self.hermite(c, r) - level;
        let (mut a, mut b) = (self.r0, self.r1);
        let ga = g(a);
        for _ in 0..100 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if (g(m) > 0.0) == (ga > 0.0) {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }
}

pub fn hermite(x0: f64, y0: f64, d0: f64, x1: f64, y1: f64, d1: f64, x: f64) -> f64 {
    let h = x1 - x0;
    let t = (x - x0) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
}

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-20,
            max_steps: 2_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flow {
    Continue,
    Stop,
}

#[derive(Debug, Clone, Copy)]
pub struct OdeEnd {
    pub r: f64,
    pub y: State,
    pub steps: usize,
    pub stopped: bool,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[inline]
fn axpy(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (c, k) in terms {
        out[0] += h * c * k[0];
        out[1] += h * c * k[1];
    }
    out
}

/// Integrates `y' = f(r, y)` from `r0` to `r_end` (> r0). Steps are clipped
/// so that every abscissa in `stops` (increasing) is hit exactly. The
/// observer sees every accepted step and may stop the integration.
pub fn integrate(
    mut f: impl FnMut(f64, &State) -> State,
    r0: f64,
    y0: State,
    r_end: f64,
    stops: &[f64],
    opts: &OdeOptions,
    mut observer: impl FnMut(&Step) -> Flow,
) -> Result<OdeEnd> {
    let mut r = r0;
    let mut y = y0;
    let mut k1 = f(r, &y);
    let mut h = 1e-3 * r0.abs().max(1e-6);
    let mut stop_idx = stops.partition_point(|&s| s <= r0);
    let mut steps = 0;
    let fail = |r: f64, y: &State, reason: &str| VortexError::StepFailure {
        r,
        u: y[0],
        du: y[1],
        reason: reason.into(),
    };
    while r < r_end {
        if steps >= opts.max_steps {
            return Err(fail(r, &y, "step budget exhausted"));
        }
        let target = if stop_idx < stops.len() {
            stops[stop_idx].min(r_end)
        } else {
            r_end
        };
        let mut hh = h;
        let mut landing = false;
        if r + hh >= target {
            hh = target - r;
            landing = true;
        }
        if hh < 1e-14 * r.abs().max(1e-300) && !landing {
            return Err(fail(r, &y, "step size underflow"));
        }
        let k2 = f(r + C2 * hh, &axpy(&y, hh, &[(A21, &k1)]));
        let k3 = f(r + C3 * hh, &axpy(&y, hh, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(
            r + C4 * hh,
            &axpy(&y, hh, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
        );
        let k5 = f(
            r + C5 * hh,
            &axpy(&y, hh, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            r + hh,
            &axpy(
                &y,
                hh,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            ),
        );
        let y1 = axpy(
            &y,
            hh,
            &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
        );
        let r1 = if landing { target } else { r + hh };
        let k7 = f(r1, &y1);
        let mut err2 = 0.0;
        for c in 0..2 {
            let e =
                hh * (E1 * k1[c] + E3 * k3[c] + E4 * k4[c] + E5 * k5[c] + E6 * k6[c] + E7 * k7[c]);
            let sc = opts.atol + opts.rtol * y[c].abs().max(y1[c].abs());
            err2 += (e / sc).powi(2);
        }
        let err = (0.5 * err2).sqrt();
        if !err.is_finite() || !y1[0].is_finite() || !y1[1].is_finite() {
            h = 0.25 * hh;
            if h < 1e-14 * r.abs().max(1e-300) {
                return Err(fail(r, &y, "non-finite state"));
            }
            continue;
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        if err <= 1.0 {
            steps += 1;
            let step = Step {
                r0: r,
                y0: y,
                f0: k1,
                r1,
                y1,
                f1: k7,
            };
            r = r1;
            y = y1;
            k1 = k7;
            if landing && stop_idx < stops.len() && r >= stops[stop_idx] {
                stop_idx += 1;
            }
            // a clipped step says nothing about the natural size
            if !landing || factor < 1.0 {
                h = hh * factor;
            }
            if observer(&step) == Flow::Stop {
                return Ok(OdeEnd {
                    r,
                    y,
                    steps,
                    stopped: true,
                });
            }
        } else {
            h = hh * factor.min(1.0);
        }
    }
    Ok(OdeEnd {
        r,
        y,
        steps,
        stopped: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator() {
        let end = integrate(
            |_, y| [y[1], -y[0]],
            0.0,
            [0.0, 1.0],
            10.0,
            &[],
            &OdeOptions {
                atol: 1e-14,
                ..Default::default()
            },
            |_| Flow::Continue,
        )
        .unwrap();
        assert!((end.y[0] - 10f64.sin()).abs() < 1e-8, "{:?}", end);
        assert!((end.y[1] - 10f64.cos()).abs() < 1e-8);
    }

    #[test]
    fn lands_on_stops_and_observer_stops() {
        let stops = [0.5, 1.0, 1.7];
        let mut seen = Vec::new();
        let end = integrate(
            |_, y| [y[0], 0.0],
            0.1,
            [1.0, 0.0],
            3.0,
            &stops,
            &OdeOptions::default(),
            |s| {
                seen.push(s.r1);
                if s.r1 >= 1.7 {
                    Flow::Stop
                } else {
                    Flow::Continue
                }
            },
        )
        .unwrap();
        for s in stops {
            assert!(seen.contains(&s));
        }
        assert!(end.stopped && end.r == 1.7);
        assert!((end.y[0] - (1.6f64).exp()).abs() < 1e-8);
    }

    #[test]
    fn euler_equation_power_solution() {
        // u'' + u'/r - 4u/r^2 = 0 has u = r^2 exactly
        let end = integrate(
            |r, y| [y[1], -y[1] / r + 4.0 * y[0] / (r * r)],
            1e-3,
            [1e-6, 2e-3],
            10.0,
            &[],
            &OdeOptions::default(),
            |_| Flow::Continue,
        )
        .unwrap();
        assert!((end.y[0] / 100.0 - 1.0).abs() < 1e-8);
    }

    #[test]
    fn hermite_locates_root() {
        let step = Step {
            r0: 0.0,
            y0: [-1.0, 0.0],
            f0: [2.0, 0.0],
            r1: 1.0,
            y1: [1.0, 0.0],
            f1: [2.0, 0.0],
        };
        assert!((step.locate(0, 0.0) - 0.5).abs() < 1e-14);
    }
}

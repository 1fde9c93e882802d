//! Power-law fits of decaying tails.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Result, VortexError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    /// `b` in `|f| ~ r^-b`.
    pub exponent: f64,
    /// 95% interval for `b`.
    pub interval: [f64; 2],
    pub samples: usize,
    pub r_range: [f64; 2],
}

impl PowerFit {
    pub fn half_width(&self) -> f64 {
        0.5 * (self.interval[1] - self.interval[0])
    }

    pub fn contains(&self, b: f64) -> bool {
        self.interval[0] <= b && b <= self.interval[1]
    }
}

/// Requirements on the sample set of [`decay_fit`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitWindow {
    pub min_samples: usize,
    /// Minimum `r_last / r_first`.
    pub min_ratio: f64,
    /// Relative growth of `|f|` tolerated between neighbours.
    pub monotone_slack: f64,
}

impl Default for FitWindow {
    fn default() -> Self {
        Self {
            min_samples: 20,
            min_ratio: 10.0,
            monotone_slack: 1e-9,
        }
    }
}

/// Least-squares slope of `ln|f|` against `ln r` for samples sorted by `r`.
pub fn decay_fit(r: &[f64], f: &[f64], window: &FitWindow) -> Result<PowerFit> {
    let n = r.len();
    if n != f.len() {
        return Err(VortexError::InsufficientTail(format!(
            "{} radii for {} values",
            n,
            f.len()
        )));
    }
    if n < window.min_samples.max(3) {
        return Err(VortexError::InsufficientTail(format!(
            "{n} samples, need {}",
            window.min_samples
        )));
    }
    if r[n - 1] / r[0] < window.min_ratio {
        return Err(VortexError::InsufficientTail(format!(
            "samples span r in [{}, {}], need a ratio of {}",
            r[0],
            r[n - 1],
            window.min_ratio
        )));
    }
    for k in 1..n {
        if r[k] <= r[k - 1] {
            return Err(VortexError::InsufficientTail("radii not increasing".into()));
        }
        if f[k].abs() > f[k - 1].abs() * (1.0 + window.monotone_slack) || f[k] == 0.0 {
            return Err(VortexError::NonMonotoneTail(format!(
                "|f| = {:e} at r = {} after {:e} at r = {}",
                f[k].abs(),
                r[k],
                f[k - 1].abs(),
                r[k - 1]
            )));
        }
    }
    let xs: Vec<f64> = r.iter().map(|x| x.ln()).collect();
    let ys: Vec<f64> = f.iter().map(|y| y.abs().ln()).collect();
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let sse: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - my - slope * (x - mx)).powi(2))
        .sum();
    let se = (sse / (nf - 2.0) / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, nf - 2.0)
        .map_err(|e| VortexError::Domain(e.to_string()))?
        .inverse_cdf(0.975);
    Ok(PowerFit {
        exponent: -slope,
        interval: [-slope - t * se, -slope + t * se],
        samples: n,
        r_range: [r[0], r[n - 1]],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn radii() -> Vec<f64> {
        (0..60).map(|k| 2.0 * 1.05f64.powi(k)).collect()
    }

    #[test]
    fn exact_power() {
        let r = radii();
        let f: Vec<f64> = r.iter().map(|x| x.powi(-2)).collect();
        let fit = decay_fit(&r, &f, &FitWindow::default()).unwrap();
        assert!((fit.exponent - 2.0).abs() < 1e-12);
        assert!(fit.half_width() < 0.01);
    }

    #[test]
    fn perturbed_power() {
        let r = radii();
        let f: Vec<f64> = r
            .iter()
            .map(|x| 5.0 * x.powi(-3) * (1.0 + 0.01 * x.sin()))
            .collect();
        let fit = decay_fit(&r, &f, &FitWindow::default()).unwrap();
        assert!(fit.contains(3.0), "{fit:?}");
        assert!(fit.half_width() < 0.02);
    }

    #[test]
    fn rejects_growth_and_short_windows() {
        let r = radii();
        let mut f: Vec<f64> = r.iter().map(|x| x.powi(-2)).collect();
        f[30] *= 1.5;
        assert!(matches!(
            decay_fit(&r, &f, &FitWindow::default()),
            Err(VortexError::NonMonotoneTail(_))
        ));
        let short = &r[..10];
        let g: Vec<f64> = short.iter().map(|x| 1.0 / x).collect();
        assert!(matches!(
            decay_fit(short, &g, &FitWindow::default()),
            Err(VortexError::InsufficientTail(_))
        ));
    }
}

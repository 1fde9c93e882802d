//! One-dimensional quadrature helpers.

/// Adaptive Simpson quadrature to absolute tolerance `tol`.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 48)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * tol {
        return left + right + diff / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Composite trapezoid on a non-uniform mesh.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]))
        .sum()
}

/// Trapezoid on every second node, used for Richardson error estimates.
pub fn trapezoid_coarse(x: &[f64], y: &[f64]) -> f64 {
    let xs: Vec<f64> = x.iter().step_by(2).copied().collect();
    let ys: Vec<f64> = y.iter().step_by(2).copied().collect();
    let mut total = trapezoid(&xs, &ys);
    if (x.len() - 1) % 2 == 1 {
        let k = x.len() - 1;
        total += 0.5 * (x[k] - x[k - 1]) * (y[k] + y[k - 1]);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_polynomial_and_singular() {
        let v = adaptive_simpson(&|x: f64| x * x * x - x, 0.0, 2.0, 1e-14);
        assert!((v - 2.0).abs() < 1e-13);
        // integrable endpoint singularity s^{-1/2}
        let v = adaptive_simpson(
            &|x: f64| if x > 0.0 { x.powf(-0.5) } else { 0.0 },
            0.0,
            1.0,
            1e-10,
        );
        assert!((v - 2.0).abs() < 1e-4);
    }

    #[test]
    fn trapezoid_linear_exact() {
        let x = [0.0, 0.1, 0.5, 2.0];
        let y: Vec<f64> = x.iter().map(|t| 3.0 * t + 1.0).collect();
        assert!((trapezoid(&x, &y) - 8.0).abs() < 1e-14);
        assert!((trapezoid_coarse(&x, &y) - 8.0).abs() < 1e-14);
    }
}

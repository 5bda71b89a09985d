//! Small numerical helpers shared by the solvers.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

use crate::error::{Error, Result};

/// Absolute tolerance for adaptive quadrature of continuous pieces.
pub const QUAD_TOL: f64 = 1e-9;

/// Bisection for a root of a nondecreasing function on `[lo, hi]`.
///
/// Returns the midpoint of the final bracket. If `f` does not change sign the
/// endpoint with the smaller absolute value is returned.
pub fn bisect_increasing<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64
where
    F: FnMut(f64) -> f64,
{
    let f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo >= 0.0 {
        return lo;
    }
    if f_hi <= 0.0 {
        return hi;
    }
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Gauss-Legendre rule with `points` nodes; exact for polynomials of degree
/// `2 * points - 1`.
pub fn gauss_legendre(points: usize) -> GaussLegendre {
    GaussLegendre::new(NonZeroUsize::new(points.max(1)).expect("nonzero"))
}

/// Adaptive (double-exponential) quadrature on a finite interval with a hard
/// convergence check.
pub fn integrate_adaptive<F>(f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if b <= a {
        return Ok(0.0);
    }
    let out = quadrature::double_exponential::integrate(f, a, b, tol);
    if !out.integral.is_finite() || out.error_estimate > tol {
        return Err(Error::Quadrature {
            residual: out.error_estimate,
            tolerance: tol,
        });
    }
    Ok(out.integral)
}

/// `count` evenly spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let step = (b - a) / (count - 1) as f64;
            (0..count)
                .map(|i| if i + 1 == count { b } else { a + step * i as f64 })
                .collect()
        }
    }
}

/// Least-squares slope of `ys` against `xs`.
pub fn ols_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisection_finds_sqrt_two() {
        let root = bisect_increasing(|x| x * x - 2.0, 0.0, 2.0, 1e-14);
        assert!((root - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn gauss_legendre_is_exact_on_polynomials() {
        let rule = gauss_legendre(4);
        let v = rule.integrate(0.0, 2.0, |x| x.powi(7) - 3.0 * x.powi(2));
        assert!((v - (256.0 / 8.0 - 8.0)).abs() < 1e-12);
    }

    #[test]
    fn adaptive_quadrature_integrates_smooth_function() {
        let v = integrate_adaptive(|x: f64| x.exp(), 0.0, 1.0, 1e-10).unwrap();
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-10);
    }

    #[test]
    fn linspace_hits_both_ends() {
        let xs = linspace(0.0, 1.0, 5);
        assert_eq!(xs, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn slope_of_line() {
        let xs = [1.0, 2.0, 3.0];
        let ys = [2.0, 0.0, -2.0];
        assert!((ols_slope(&xs, &ys) + 2.0).abs() < 1e-15);
    }
}

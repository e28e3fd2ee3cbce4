//! Scalar root finding on a sign-changing bracket.

use crate::error::{Error, Result};

/// Bisection to absolute tolerance `tol` in `x`.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> Result<f64> {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if (fa < 0.0) == (fb < 0.0) || fa.is_nan() || fb.is_nan() {
        return Err(Error::Bracket(format!("f({a}) = {fa:e} and f({b}) = {fb:e} have the same sign")));
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= tol || m <= a.min(b) || m >= a.max(b) {
            return Ok(m);
        }
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Newton's method kept inside a shrinking bracket; falls back to bisection when a
/// Newton step leaves the bracket or `use_newton(x)` is false.
pub fn safeguarded_newton<F, D, U>(mut f: F, mut df: D, use_newton: U, mut a: f64, mut b: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
    D: FnMut(f64) -> f64,
    U: Fn(f64) -> bool,
{
    let fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if (fa < 0.0) == (fb < 0.0) || fa.is_nan() || fb.is_nan() {
        return Err(Error::Bracket(format!("f({a}) = {fa:e} and f({b}) = {fb:e} have the same sign")));
    }
    let neg_at_a = fa < 0.0;
    let mut x = 0.5 * (a + b);
    for _ in 0..300 {
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if (fx < 0.0) == neg_at_a {
            a = x;
        } else {
            b = x;
        }
        let mut next = 0.5 * (a + b);
        if use_newton(x) {
            let d = df(x);
            if d != 0.0 && d.is_finite() {
                let candidate = x - fx / d;
                if candidate > a.min(b) && candidate < a.max(b) {
                    next = candidate;
                }
            }
        }
        if (next - x).abs() <= tol || (b - a).abs() <= tol {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisection_finds_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn newton_with_guard() {
        let r = safeguarded_newton(|x| x.powi(3) - x - 2.0, |x| 3.0 * x * x - 1.0, |_| true, 1.0, 2.0, 1e-15).unwrap();
        assert!((r.powi(3) - r - 2.0).abs() < 1e-13);
    }

    #[test]
    fn bad_bracket() {
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-10).is_err());
    }
}

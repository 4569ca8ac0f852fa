//! Bracketed scalar root finding: bisection safeguarding Newton steps.
//!
//! Every caller in this crate works with a function that is strictly
//! monotone on the bracket, so a sign change pins down a unique root. The
//! solver keeps the bracket valid at every step and only accepts a Newton
//! iterate when it lands strictly inside the current bracket.

use crate::error::{Error, Result};

pub(crate) const MAX_ITER: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    /// Function value at `x`.
    pub fx: f64,
    pub iterations: usize,
}

impl Root {
    pub fn residual(&self) -> f64 {
        self.fx.abs()
    }
}

fn same_sign(a: f64, b: f64) -> bool {
    (a < 0.0) == (b < 0.0)
}

/// Root of `f` on `[lo, hi]`. `f` returns the value and its derivative; the
/// derivative is ignored when `use_newton` is false.
pub(crate) fn newton_bisect<F>(
    what: &'static str,
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    use_newton: bool,
) -> Result<Root>
where
    F: FnMut(f64) -> (f64, f64),
{
    let (mut f_lo, _) = f(lo);
    if f_lo == 0.0 {
        return Ok(Root { x: lo, fx: 0.0, iterations: 0 });
    }
    let (mut f_hi, _) = f(hi);
    if f_hi == 0.0 {
        return Ok(Root { x: hi, fx: 0.0, iterations: 0 });
    }
    if !(f_lo.is_finite() && f_hi.is_finite()) || same_sign(f_lo, f_hi) {
        return Err(Error::Bracket { what, lo, hi, f_lo, f_hi });
    }

    let mut best = if f_lo.abs() < f_hi.abs() {
        Root { x: lo, fx: f_lo, iterations: 0 }
    } else {
        Root { x: hi, fx: f_hi, iterations: 0 }
    };
    let mut x = 0.5 * (lo + hi);
    for it in 1..=MAX_ITER {
        let (fx, dfx) = f(x);
        if !fx.is_finite() {
            return Err(Error::Convergence { what, iterations: it, residual: fx });
        }
        if fx.abs() <= best.fx.abs() {
            best = Root { x, fx, iterations: it };
        }
        best.iterations = it;
        if fx == 0.0 {
            return Ok(best);
        }
        if same_sign(fx, f_lo) {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
            f_hi = fx;
        }
        let width = hi - lo;
        if width.abs() <= 4.0 * f64::EPSILON * lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE) {
            return Ok(best);
        }

        let mid = 0.5 * (lo + hi);
        let mut next = mid;
        if use_newton && dfx.is_finite() && dfx != 0.0 {
            let cand = x - fx / dfx;
            if cand > lo.min(hi) && cand < lo.max(hi) {
                if (cand - x).abs() <= 2.0 * f64::EPSILON * x.abs() {
                    // Newton has stalled at the floating point resolution.
                    let (fc, _) = f(cand);
                    if fc.abs() < best.fx.abs() {
                        best = Root { x: cand, fx: fc, iterations: it };
                    }
                    return Ok(best);
                }
                next = cand;
            }
        }
        if next == x {
            next = mid;
        }
        x = next;
    }
    let _ = f_hi;
    Ok(best)
}

/// Convenience wrapper: plain bisection on `f`.
pub(crate) fn bisect<F>(what: &'static str, mut f: F, lo: f64, hi: f64) -> Result<Root>
where
    F: FnMut(f64) -> f64,
{
    newton_bisect(what, |x| (f(x), f64::NAN), lo, hi, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_two_both_modes() {
        let r = newton_bisect("sqrt", |x| (x * x - 2.0, 2.0 * x), 0.0, 2.0, true).unwrap();
        assert!((r.x - 2f64.sqrt()).abs() < 1e-15);
        let b = bisect("sqrt", |x| x * x - 2.0, 0.0, 2.0).unwrap();
        assert!((b.x - 2f64.sqrt()).abs() < 1e-15);
        assert!(r.iterations < b.iterations);
    }

    #[test]
    fn decreasing_function() {
        let r = newton_bisect("dec", |x| (1.0 - x * x * x, -3.0 * x * x), 0.0, 3.0, true).unwrap();
        assert!((r.x - 1.0).abs() < 1e-15);
    }

    #[test]
    fn no_sign_change_is_a_bracket_error() {
        let e = bisect("none", |x| x * x + 1.0, -1.0, 1.0).unwrap_err();
        assert!(matches!(e, Error::Bracket { .. }));
    }

    #[test]
    fn endpoint_root() {
        let r = bisect("end", |x| x - 1.0, 1.0, 2.0).unwrap();
        assert_eq!(r.x, 1.0);
        assert_eq!(r.iterations, 0);
    }
}

//! The function `H_r(z) = r z^(r-1) - (r-1) z^r` on `[1, inf)` and its
//! inverse `omega_r` on the decreasing branch, together with the quantities
//! built directly on top of them.
//!
//! `H_r` decreases from `H_r(1) = 1` through `H_r(r/(r-1)) = 0` to `-inf`, so
//! `omega_r(s)` is well defined for every `s <= 1`. The negative part of the
//! branch is needed for the small-mass limit probe.

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::exponents::Exponents;
use crate::roots;

/// Default absolute residual tolerance for `omega` (scaled by `max(1, |s|)`).
pub const DEFAULT_TOL: f64 = 1e-12;

/// Below this distance from `s = 1` the inverse is found by bisection only.
const NEAR_ONE: f64 = 1e-8;

/// Result of inverting `H_r` at `argument`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OmegaBranch {
    pub argument: f64,
    pub value: f64,
    /// `|H_r(value) - argument|`
    pub residual: f64,
    pub iterations: usize,
}

#[inline]
pub(crate) fn h_raw(r: f64, z: f64) -> f64 {
    z.powf(r - 1.0) * (r - (r - 1.0) * z)
}

#[inline]
fn h_raw_derivative(r: f64, z: f64) -> f64 {
    r * (r - 1.0) * z.powf(r - 2.0) * (1.0 - z)
}

fn check_exponent(r: f64) -> Result<()> {
    if r.is_finite() && r > 1.0 {
        Ok(())
    } else {
        Err(domain("exponent r", r, "(1, inf)"))
    }
}

/// `H_r(z)` for `z >= 1`.
pub fn h_function(r: f64, z: f64) -> Result<f64> {
    check_exponent(r)?;
    if !(z >= 1.0) || !z.is_finite() {
        return Err(domain("H_r", z, "[1, inf)"));
    }
    Ok(h_raw(r, z))
}

/// Inverse of `H_r` on `[1, inf)`: the unique `t >= 1` with `H_r(t) = s`.
pub fn omega(r: f64, s: f64, tol: f64) -> Result<OmegaBranch> {
    check_exponent(r)?;
    if !(s <= 1.0) || !s.is_finite() {
        return Err(domain("omega_r", s, "(-inf, 1]"));
    }
    if s == 1.0 {
        return Ok(OmegaBranch { argument: s, value: 1.0, residual: 0.0, iterations: 0 });
    }

    let mut lo = 1.0;
    let mut hi = r / (r - 1.0);
    if s < 0.0 {
        while h_raw(r, hi) > s {
            lo = hi;
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(Error::Convergence {
                    what: "omega bracket expansion",
                    iterations: 0,
                    residual: s,
                });
            }
        }
    }

    let newton = 1.0 - s >= NEAR_ONE;
    let root = roots::newton_bisect(
        "omega",
        |t| (h_raw(r, t) - s, h_raw_derivative(r, t)),
        lo,
        hi,
        newton,
    )?;
    let residual = root.residual();
    if residual > tol * s.abs().max(1.0) {
        return Err(Error::Convergence { what: "omega", iterations: root.iterations, residual });
    }
    Ok(OmegaBranch { argument: s, value: root.x, residual, iterations: root.iterations })
}

/// `omega_r(s)` at the default tolerance, value only.
pub(crate) fn omega_value(r: f64, s: f64) -> Result<f64> {
    omega(r, s, DEFAULT_TOL).map(|b| b.value)
}

/// `omega_r'(s) = 1 / (r (r-1) omega^(r-2) (1 - omega))`, valid for `s < 1`.
pub fn omega_derivative(r: f64, s: f64) -> Result<f64> {
    if !(s < 1.0) {
        return Err(domain("omega_r'", s, "(-inf, 1)"));
    }
    let w = omega_value(r, s)?;
    Ok(1.0 / (r * (r - 1.0) * w.powf(r - 2.0) * (1.0 - w)))
}

/// `a(s2) = omega_q(s2)^q / s2 - 1`, non-negative and zero only at `s2 = 1`.
pub fn a_of_s2(e: &Exponents, s2: f64) -> Result<f64> {
    if !(s2 > 0.0 && s2 <= 1.0) {
        return Err(domain("a(s2)", s2, "(0, 1]"));
    }
    let w = omega_value(e.q(), s2)?;
    Ok(w.powf(e.q()) / s2 - 1.0)
}

/// Derivative of [`a_of_s2`]; negative on `(0, 1)` and unbounded as `s2 -> 1`.
pub fn a_prime(e: &Exponents, s2: f64) -> Result<f64> {
    if !(s2 > 0.0 && s2 < 1.0) {
        return Err(domain("a'(s2)", s2, "(0, 1)"));
    }
    let q = e.q();
    let w = omega_value(q, s2)?;
    Ok((-w / ((q - 1.0) * (w - 1.0)) - w.powf(q) / s2) / s2)
}

/// Closed-form two-variable Bellman value `F * omega_p(f^p / F)^p`.
pub fn bellman_two_variable(e: &Exponents, f: f64, big_f: f64) -> Result<f64> {
    let p = e.p();
    if !(f > 0.0) || !f.is_finite() {
        return Err(domain("bellman f", f, "(0, inf)"));
    }
    let fp = f.powf(p);
    if !(fp <= big_f) || !big_f.is_finite() {
        return Err(domain("bellman F", big_f, "[f^p, inf)"));
    }
    Ok(big_f * omega_value(p, fp / big_f)?.powf(p))
}

/// `alpha * omega_p(ell / alpha)^p`, which tends to `-ell / (p - 1)` as
/// `alpha -> 0+`.
pub fn lemma14_limit_probe(e: &Exponents, ell: f64, alpha: f64) -> Result<f64> {
    if !(ell <= 0.0) {
        return Err(domain("probe ell", ell, "(-inf, 0]"));
    }
    if !(alpha > 0.0) {
        return Err(domain("probe alpha", alpha, "(0, inf)"));
    }
    let p = e.p();
    let s = ell / alpha;
    let w = omega(p, s, DEFAULT_TOL)?.value;
    Ok(alpha * w.powf(p))
}

/// `omega_q(lambda^(q-1)) - omega_p(lambda^(p-1))`, positive on `[0, 1)`.
pub fn lemma15_gap(e: &Exponents, lambda: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(domain("gap lambda", lambda, "[0, 1)"));
    }
    let wq = omega_value(e.q(), lambda.powf(e.q() - 1.0))?;
    let wp = omega_value(e.p(), lambda.powf(e.p() - 1.0))?;
    Ok(wq - wp)
}

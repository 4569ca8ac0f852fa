//! The sharp constant `t(s1, s2)`.
//!
//! `t0 = t(0)` solves `phi(t0) = h(s1, s2)` on `[1, y0]`. When the derivative
//! `t'(0)` is positive the constant is `t0` itself; otherwise it is the
//! greatest `t` in `[1, t0]` at which the obstruction `F_{s1,s2}(t)` is `<= 0`.

use std::fmt;

use serde::Serialize;

use crate::domain::SPoint;
use crate::error::{domain, Error, Result};
use crate::exponents::Exponents;
use crate::roots;
use crate::special::{a_of_s2, omega_value};

/// Numerical knobs of the sharp-constant evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SharpConfig {
    /// Residual tolerance for every scalar root.
    pub tol: f64,
    /// Relative band around `t0^(p-q) = E` reported as a zero derivative.
    pub zero_band: f64,
    /// Number of points of the descending scan for the obstruction root.
    pub grid: usize,
    /// `|omega_p(s1) - omega_q(s2)|` below which the closed form is used.
    pub matched_tol: f64,
}

impl Default for SharpConfig {
    fn default() -> Self {
        SharpConfig { tol: 1e-12, zero_band: 1e-10, grid: 512, matched_tol: 1e-9 }
    }
}

impl SharpConfig {
    pub fn with_tol(tol: f64) -> Self {
        SharpConfig { tol, ..Default::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Branch {
    T0Branch,
    FRootBranch,
    Matched,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::T0Branch => "T0_BRANCH",
            Branch::FRootBranch => "F_ROOT_BRANCH",
            Branch::Matched => "MATCHED",
        }
    }
}

/// Sign of `t'(0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Sign {
    Neg,
    Zero,
    Pos,
}

impl Sign {
    pub fn as_str(&self) -> &'static str {
        match self {
            Sign::Neg => "NEG",
            Sign::Zero => "ZERO",
            Sign::Pos => "POS",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SharpResult {
    pub t0: f64,
    pub t: f64,
    pub branch: Branch,
    pub tprime0_sign: Sign,
    pub residual_phi: f64,
    #[serde(rename = "residual_F")]
    pub residual_f: f64,
    pub iterations: usize,
}

/// Samples `(t1, tau(t1), F(t1))` on a uniform grid of `[1, t0]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FProfile {
    pub t0: f64,
    pub rows: Vec<(f64, f64, f64)>,
}

#[inline]
pub(crate) fn phi_raw(e: &Exponents, y: f64) -> f64 {
    y.powf(e.p()) - e.ratio_pq() * y.powf(e.p() - e.q())
}

/// `phi(y) = y^p - (p/(p-q)) y^(p-q)`.
pub fn phi(e: &Exponents, y: f64) -> Result<f64> {
    if !(y > 0.0) || !y.is_finite() {
        return Err(domain("phi", y, "(0, inf)"));
    }
    Ok(phi_raw(e, y))
}

/// `h(s1, s2) = s1 - (p/(p-q)) s1/s2`, which lies in `(-q/(p-q), 0)` on `D`.
pub fn h_bilinear(e: &Exponents, pt: &SPoint) -> f64 {
    pt.s1() - e.ratio_pq() * pt.ratio()
}

pub(crate) fn t0_root(e: &Exponents, h: f64, tol: f64) -> Result<roots::Root> {
    let (p, q) = (e.p(), e.q());
    let floor = -q / (p - q);
    if !(h > floor && h < 0.0) {
        return Err(domain("branch equation right-hand side", h, "(-q/(p-q), 0)"));
    }
    let root = roots::newton_bisect(
        "t0",
        |y| {
            let ypq = y.powf(p - q);
            let f = ypq * (y.powf(q) - e.ratio_pq()) - h;
            let df = p * ypq / y * (y.powf(q) - 1.0);
            (f, df)
        },
        1.0,
        e.y0(),
        true,
    )?;
    if root.residual() > tol * h.abs().max(1.0) {
        return Err(Error::Convergence { what: "t0", iterations: root.iterations, residual: root.residual() });
    }
    Ok(root)
}

/// Root of `phi(t) = h(s1, s2)` on `[1, y0]`.
pub fn solve_t0(e: &Exponents, pt: &SPoint, tol: f64) -> Result<f64> {
    Ok(t0_root(e, h_bilinear(e, pt), tol)?.x)
}

/// Quantities of one point that every evaluation of `tau` and `F` reuses.
#[derive(Debug, Clone, Copy)]
struct Obstruction {
    p: f64,
    q: f64,
    s1: f64,
    ratio: f64,
    /// `(p - q) s1 a(s2)`
    shift: f64,
}

impl Obstruction {
    fn new(e: &Exponents, pt: &SPoint) -> Result<Self> {
        let alpha = a_of_s2(e, pt.s2())?;
        Ok(Obstruction {
            p: e.p(),
            q: e.q(),
            s1: pt.s1(),
            ratio: pt.ratio(),
            shift: (e.p() - e.q()) * pt.s1() * alpha,
        })
    }

    fn denominator(&self, t1: f64) -> Result<f64> {
        let d = t1.powf(self.p - self.q) - self.ratio;
        if !(d > 0.0) {
            return Err(Error::Singularity { t1 });
        }
        Ok(d)
    }

    fn tau(&self, t1: f64) -> Result<f64> {
        let d = self.denominator(t1)?;
        Ok((self.p - self.q) / self.p * (t1.powf(self.p) - self.s1) / d)
    }

    fn f(&self, t1: f64) -> Result<f64> {
        let d = self.denominator(t1)?;
        let tau = (self.p - self.q) / self.p * (t1.powf(self.p) - self.s1) / d;
        // tau(t0) = 1 up to rounding
        let tau = if tau > 1.0 && tau <= 1.0 + 1e-12 { 1.0 } else { tau };
        if !(tau > 0.0 && tau <= 1.0) {
            return Err(domain("tau", tau, "(0, 1]"));
        }
        let w = omega_value(self.q, tau)?;
        let (p, q) = (self.p, self.q);
        Ok(q * w.powf(q - 1.0) * (p - (p - 1.0) * w) * d - self.shift)
    }
}

fn check_t1(t1: f64) -> Result<()> {
    if t1 >= 1.0 && t1.is_finite() {
        Ok(())
    } else {
        Err(domain("t1", t1, "[1, t0]"))
    }
}

/// `tau(t1) = ((p-q)/p) (t1^p - s1) / (t1^(p-q) - s1/s2)`.
pub fn tau(e: &Exponents, pt: &SPoint, t1: f64) -> Result<f64> {
    check_t1(t1)?;
    let ob = Obstruction { p: e.p(), q: e.q(), s1: pt.s1(), ratio: pt.ratio(), shift: 0.0 };
    ob.tau(t1)
}

/// The obstruction `F_{s1,s2}(t1)`.
pub fn f_obstruction(e: &Exponents, pt: &SPoint, t1: f64) -> Result<f64> {
    check_t1(t1)?;
    Obstruction::new(e, pt)?.f(t1)
}

/// `E(s1, s2) = ((p-q)/q) s1 a(s2) + s1/s2`.
pub fn e_threshold(e: &Exponents, pt: &SPoint) -> Result<f64> {
    let alpha = a_of_s2(e, pt.s2())?;
    Ok((e.p() - e.q()) / e.q() * pt.s1() * alpha + pt.ratio())
}

fn sign_from(e: &Exponents, t0: f64, big_e: f64, band: f64) -> Sign {
    let d = t0.powf(e.p() - e.q()) - big_e;
    if d.abs() <= band * big_e.abs().max(1.0) {
        Sign::Zero
    } else if d > 0.0 {
        Sign::Neg
    } else {
        Sign::Pos
    }
}

/// Sign of `t'(0)`: negative iff `t0^(p-q) > E(s1, s2)`, zero within
/// `band * max(1, E)`.
pub fn tprime0_sign(e: &Exponents, pt: &SPoint, band: f64) -> Result<Sign> {
    tprime0_sign_by(e, pt, band, e_threshold)
}

/// [`tprime0_sign`] with a caller-supplied evaluator for `E`.
pub fn tprime0_sign_by<G>(e: &Exponents, pt: &SPoint, band: f64, threshold: G) -> Result<Sign>
where
    G: Fn(&Exponents, &SPoint) -> Result<f64>,
{
    let t0 = solve_t0(e, pt, SharpConfig::default().tol)?;
    Ok(sign_from(e, t0, threshold(e, pt)?, band))
}

/// The sharp constant with default configuration and root tolerance `tol`.
pub fn sharp_t(e: &Exponents, pt: &SPoint, tol: f64) -> Result<SharpResult> {
    sharp_t_with(e, pt, &SharpConfig::with_tol(tol))
}

pub fn sharp_t_with(e: &Exponents, pt: &SPoint, cfg: &SharpConfig) -> Result<SharpResult> {
    let h = h_bilinear(e, pt);
    let root = t0_root(e, h, cfg.tol)?;
    let t0 = root.x;
    let big_e = e_threshold(e, pt)?;
    let sign = sign_from(e, t0, big_e, cfg.zero_band);
    let ob = Obstruction::new(e, pt)?;
    let mut result = SharpResult {
        t0,
        t: t0,
        branch: Branch::FRootBranch,
        tprime0_sign: sign,
        residual_phi: root.residual(),
        residual_f: 0.0,
        iterations: root.iterations,
    };

    let wp = omega_value(e.p(), pt.s1())?;
    let wq = omega_value(e.q(), pt.s2())?;
    if (wp - wq).abs() <= cfg.matched_tol {
        result.t = wp;
        result.branch = Branch::Matched;
        result.residual_f = ob.f(wp)?.abs();
        return Ok(result);
    }
    match sign {
        Sign::Pos => {
            result.branch = Branch::T0Branch;
            return Ok(result);
        }
        Sign::Zero => return Ok(result),
        Sign::Neg => {}
    }

    let n = cfg.grid.max(2);
    let step = (t0 - 1.0) / (n - 1) as f64;
    let mut upper = (t0, ob.f(t0)?);
    if upper.1 <= 0.0 {
        result.residual_f = upper.1.abs();
        return Ok(result);
    }
    for k in 1..n {
        let t = if k == n - 1 { 1.0 } else { t0 - step * k as f64 };
        let ft = ob.f(t)?;
        if ft <= 0.0 {
            let (x, fx, iters) = last_nonpositive(&ob, (t, ft), upper)?;
            result.t = x;
            result.residual_f = fx.abs();
            result.iterations += iters;
            return Ok(result);
        }
        upper = (t, ft);
    }
    Err(Error::Inconsistency(format!(
        "F > 0 on all of [1, t0 = {t0}] at (s1 = {}, s2 = {})",
        pt.s1(),
        pt.s2()
    )))
}

/// Shrinks `[lo, hi]` with `F(lo) <= 0 < F(hi)` to adjacent doubles and
/// returns the `F <= 0` end.
fn last_nonpositive(ob: &Obstruction, lo: (f64, f64), hi: (f64, f64)) -> Result<(f64, f64, usize)> {
    let (mut lo, mut hi) = (lo, hi);
    for it in 1..=roots::MAX_ITER {
        let mid = 0.5 * (lo.0 + hi.0);
        if mid <= lo.0 || mid >= hi.0 {
            return Ok((lo.0, lo.1, it));
        }
        let fm = ob.f(mid)?;
        if fm <= 0.0 {
            lo = (mid, fm);
        } else {
            hi = (mid, fm);
        }
    }
    Ok((lo.0, lo.1, roots::MAX_ITER))
}

/// `(t1, tau, F)` at `n` uniformly spaced points of `[1, t0]`.
pub fn f_profile(e: &Exponents, pt: &SPoint, n: usize, tol: f64) -> Result<FProfile> {
    let t0 = solve_t0(e, pt, tol)?;
    let ob = Obstruction::new(e, pt)?;
    let n = n.max(2);
    let rows = (0..n)
        .map(|k| {
            let t1 = if k == n - 1 { t0 } else { 1.0 + (t0 - 1.0) * k as f64 / (n - 1) as f64 };
            Ok((t1, ob.tau(t1)?, ob.f(t1)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FProfile { t0, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::validate_spoint;
    use crate::special::h_function;
    use approx::assert_relative_eq;

    fn e2() -> Exponents {
        Exponents::new(2.0, 1.5).unwrap()
    }

    fn matched(e: &Exponents, gamma: f64) -> SPoint {
        validate_spoint(e, h_function(e.p(), gamma).unwrap(), h_function(e.q(), gamma).unwrap()).unwrap()
    }

    #[test]
    fn phi_examples() {
        for e in Exponents::presets() {
            assert_relative_eq!(phi(&e, 1.0).unwrap(), -e.q() / (e.p() - e.q()), epsilon = 1e-14);
            assert!(phi(&e, e.y0()).unwrap().abs() < 1e-13);
        }
        assert_eq!(phi(&e2(), 1.0).unwrap(), -3.0);
        assert!(phi(&e2(), 0.0).is_err());
    }

    #[test]
    fn h_bilinear_examples() {
        let e = e2();
        let pt = validate_spoint(&e, 0.5, 0.9).unwrap();
        assert_relative_eq!(h_bilinear(&e, &pt), 0.5 - 4.0 * 0.5 / 0.9, epsilon = 1e-15);
        let near = validate_spoint(&e, 0.5, 1.0 - 1e-12).unwrap();
        assert_relative_eq!(h_bilinear(&e, &near), -3.0 * 0.5, epsilon = 1e-10);
        let s1: f64 = 0.3;
        let low = validate_spoint(&e, s1, s1.powf(0.5)).unwrap();
        assert_relative_eq!(h_bilinear(&e, &low), s1 - 4.0 * s1.powf(0.5 / 1.0), epsilon = 1e-14);
    }

    #[test]
    fn t0_examples() {
        let e = e2();
        let pt = validate_spoint(&e, 0.5, 0.9).unwrap();
        let t0 = solve_t0(&e, &pt, 1e-12).unwrap();
        assert!(t0 > 1.0 && t0 < e.y0());
        assert!((phi_raw(&e, t0) - h_bilinear(&e, &pt)).abs() <= 1e-12);
        // h close to its lower limit pushes t0 to 1
        let corner = validate_spoint(&e, 1.0 - 1e-9, 1.0 - 1e-10).unwrap();
        assert!(solve_t0(&e, &corner, 1e-12).unwrap() < 1.001);
        // h close to 0 pushes t0 to y0
        let tiny = validate_spoint(&e, 1e-12, 1e-6).unwrap();
        assert!((solve_t0(&e, &tiny, 1e-12).unwrap() - e.y0()).abs() < 1e-3);
    }

    #[test]
    fn tau_and_obstruction_at_matched_point() {
        let e = e2();
        let pt = matched(&e, 1.2);
        assert!(tau(&e, &pt, 1.2).unwrap() < 1.0);
        assert!(f_obstruction(&e, &pt, 1.2).unwrap().abs() < 1e-9);
        let t0 = solve_t0(&e, &pt, 1e-12).unwrap();
        assert!((tau(&e, &pt, t0).unwrap() - 1.0).abs() < 1e-9);
        assert!(tau(&e, &pt, 1.0 + 1e-6).unwrap() > 0.0);
        assert!(tau(&e, &pt, 0.5).is_err());
    }

    #[test]
    fn e_threshold_examples() {
        let e = e2();
        let pt = validate_spoint(&e, 0.5, 0.9).unwrap();
        let want = 0.5 / 3.0 * a_of_s2(&e, 0.9).unwrap() + 0.5 / 0.9;
        assert_relative_eq!(e_threshold(&e, &pt).unwrap(), want, epsilon = 1e-15);
        assert!(e_threshold(&e, &pt).unwrap() > pt.ratio());
        let near = validate_spoint(&e, 0.5, 1.0 - 1e-13).unwrap();
        assert_relative_eq!(e_threshold(&e, &near).unwrap(), 0.5, epsilon = 1e-5);
    }

    #[test]
    fn matched_point_gives_closed_form() {
        let e = e2();
        let pt = matched(&e, 1.2);
        assert_eq!(tprime0_sign(&e, &pt, 1e-10).unwrap(), Sign::Neg);
        let r = sharp_t(&e, &pt, 1e-12).unwrap();
        assert_eq!(r.branch, Branch::Matched);
        assert!((r.t - 1.2).abs() < 1e-8);
        assert!(r.t < r.t0);
        // same answer when the closed form is switched off
        let cfg = SharpConfig { matched_tol: -1.0, ..Default::default() };
        let scan = sharp_t_with(&e, &pt, &cfg).unwrap();
        assert_eq!(scan.branch, Branch::FRootBranch);
        assert!((scan.t - 1.2).abs() < 1e-8, "{scan:?}");
    }

    #[test]
    fn positive_sign_returns_t0() {
        // near the lower boundary with s1 close to 1 the derivative is positive
        let e = e2();
        let s1: f64 = 0.95;
        let pt = validate_spoint(&e, s1, s1.sqrt() + 1e-4).unwrap();
        assert_eq!(tprime0_sign(&e, &pt, 1e-10).unwrap(), Sign::Pos);
        let r = sharp_t(&e, &pt, 1e-12).unwrap();
        assert_eq!(r.branch, Branch::T0Branch);
        assert_eq!(r.t, r.t0);
        assert!(r.residual_phi <= 1e-12);
    }

    #[test]
    fn negative_sign_root_sits_on_sign_change() {
        let e = e2();
        let pt = validate_spoint(&e, 0.5, 0.9).unwrap();
        let r = sharp_t(&e, &pt, 1e-12).unwrap();
        assert_eq!(r.tprime0_sign, Sign::Neg);
        assert!(f_obstruction(&e, &pt, r.t0).unwrap() > 0.0);
        assert!(r.t >= 1.0 && r.t < r.t0 && r.t0 < e.y0());
        assert!(f_obstruction(&e, &pt, r.t).unwrap() <= 0.0);
        assert!(f_obstruction(&e, &pt, r.t + 1e-9).unwrap() > 0.0);
    }

    #[test]
    fn profile_ends_at_tau_one() {
        let e = Exponents::new(3.0, 2.0).unwrap();
        let pt = validate_spoint(&e, 0.4, 0.8).unwrap();
        let prof = f_profile(&e, &pt, 64, 1e-12).unwrap();
        assert_eq!(prof.rows.len(), 64);
        assert!((prof.rows.last().unwrap().1 - 1.0).abs() < 1e-9);
        assert!(prof.rows.iter().all(|r| r.1 > 0.0 && r.1 <= 1.0 + 1e-12));
    }
}

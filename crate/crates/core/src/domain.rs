//! The admissible parameter domain `D = {0 < s1^(q-1) <= s2^(p-1) < 1}`, the
//! map from integral moments to `(s1, s2)`, and the mass `kappa` that makes
//! the two inverse branches agree.

use serde::Serialize;

use crate::error::{domain, DomainConstraint, Error, Result};
use crate::exponents::Exponents;
use crate::roots;
use crate::special::{h_raw, omega_value};

/// A validated point of `D`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SPoint {
    s1: f64,
    s2: f64,
}

impl SPoint {
    #[inline]
    pub fn s1(&self) -> f64 {
        self.s1
    }

    #[inline]
    pub fn s2(&self) -> f64 {
        self.s2
    }

    /// `s1 / s2`; always below 1 inside `D`.
    #[inline]
    pub fn ratio(&self) -> f64 {
        self.s1 / self.s2
    }
}

/// Lower boundary of the `s2`-fiber of `D` over `s1`.
#[inline]
pub fn lower_boundary(e: &Exponents, s1: f64) -> f64 {
    s1.powf(e.boundary_exponent())
}

/// Checks membership of `(s1, s2)` in `D`.
pub fn validate_spoint(e: &Exponents, s1: f64, s2: f64) -> Result<SPoint> {
    let reject = |violated| Err(Error::OutsideDomain { s1, s2, violated });
    if !(s1 > 0.0 && s1 < 1.0) {
        return reject(DomainConstraint::S1Range);
    }
    if !(s2 > 0.0 && s2 < 1.0) {
        return reject(DomainConstraint::S2Range);
    }
    if s1.powf(e.q() - 1.0) > s2.powf(e.p() - 1.0) {
        return reject(DomainConstraint::Ordering);
    }
    Ok(SPoint { s1, s2 })
}

/// Integral data of a non-negative function on `(0, kappa]`: `f = int h`,
/// `a = int h^q`, `big_f = int h^p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentData {
    pub f: f64,
    pub a: f64,
    pub big_f: f64,
    pub kappa: f64,
}

impl MomentData {
    /// Moments on the full unit mass.
    pub fn new(f: f64, a: f64, big_f: f64) -> Result<Self> {
        Self::with_mass(f, a, big_f, 1.0)
    }

    /// Checks positivity, `kappa in (0, 1]` and excludes the constant function,
    /// for which `a = f^q kappa^(1-q)`.
    pub fn with_mass(f: f64, a: f64, big_f: f64, kappa: f64) -> Result<Self> {
        for (what, v) in [("moment f", f), ("moment A", a), ("moment F", big_f)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(domain(what, v, "(0, inf)"));
            }
        }
        if !(kappa > 0.0 && kappa <= 1.0) {
            return Err(domain("mass kappa", kappa, "(0, 1]"));
        }
        Ok(MomentData { f, a, big_f, kappa })
    }

    /// `f^p / (kappa^(p-1) F)`, not validated.
    pub fn s1_raw(&self, e: &Exponents) -> f64 {
        self.f.powf(e.p()) / (self.kappa.powf(e.p() - 1.0) * self.big_f)
    }

    /// `f^q / (kappa^(q-1) A)`, not validated.
    pub fn s2_raw(&self, e: &Exponents) -> f64 {
        self.f.powf(e.q()) / (self.kappa.powf(e.q() - 1.0) * self.a)
    }

    /// The strict moment condition `f^q < A < f^((p-q)/(p-1)) F^((q-1)/(p-1))`,
    /// with `A = f^q` reported as degenerate.
    pub fn check_condition(&self, e: &Exponents) -> Result<()> {
        let (p, q) = (e.p(), e.q());
        let lower = self.f.powf(q);
        if (self.a - lower).abs() <= 1e-14 * lower.max(self.a) {
            return Err(Error::DegenerateMoments);
        }
        let upper = self.f.powf((p - q) / (p - 1.0)) * self.big_f.powf((q - 1.0) / (p - 1.0));
        if !(lower < self.a && self.a < upper) {
            return Err(Error::MomentCondition {
                detail: format!("f^q = {lower}, A = {}, upper = {upper}", self.a),
            });
        }
        Ok(())
    }
}

/// `(s1, s2)` of the moments at their own mass, validated against `D`.
pub fn moments_to_spoint(e: &Exponents, m: &MomentData) -> Result<SPoint> {
    validate_spoint(e, m.s1_raw(e), m.s2_raw(e))
}

fn kappa_bracket(e: &Exponents, f: f64, big_f: f64) -> f64 {
    (f.powf(e.p()) / big_f).powf(1.0 / (e.p() - 1.0))
}

fn check_kappa(e: &Exponents, f: f64, big_f: f64, kappa: f64, closed: bool) -> Result<()> {
    let lo = kappa_bracket(e, f, big_f);
    let ok = if closed {
        kappa >= lo * (1.0 - 1e-15) && kappa <= 1.0
    } else {
        kappa > lo && kappa < 1.0
    };
    if ok && f > 0.0 && big_f > 0.0 {
        Ok(())
    } else {
        Err(domain("kappa", kappa, "[(f^p/F)^(1/(p-1)), 1]"))
    }
}

#[inline]
fn g_raw(e: &Exponents, f: f64, big_f: f64, kappa: f64) -> (f64, f64) {
    let (p, q) = (e.p(), e.q());
    let s = (f.powf(p) / (kappa.powf(p - 1.0) * big_f)).min(1.0);
    let w = omega_value(p, s).unwrap_or(1.0);
    let g = kappa.powf(q - 1.0) * h_raw(q, w);
    let dg = (q - 1.0) * (p - q) / p * kappa.powf(q - 2.0) * w.powf(q);
    (g, dg)
}

/// `g(kappa) = kappa^(q-1) H_q(omega_p(f^p / (kappa^(p-1) F)))`.
pub fn g_of_kappa(e: &Exponents, f: f64, big_f: f64, kappa: f64) -> Result<f64> {
    check_kappa(e, f, big_f, kappa, true)?;
    Ok(g_raw(e, f, big_f, kappa).0)
}

/// `g'(kappa) = ((q-1)(p-q)/p) kappa^(q-2) omega_p(...)^q`.
pub fn g_prime(e: &Exponents, f: f64, big_f: f64, kappa: f64) -> Result<f64> {
    check_kappa(e, f, big_f, kappa, false)?;
    Ok(g_raw(e, f, big_f, kappa).1)
}

/// Output of [`solve_kappa`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KappaSolution {
    pub kappa: f64,
    pub s1: f64,
    pub s2: f64,
    pub omega_p: f64,
    pub omega_q: f64,
    /// `|g(kappa) - f^q / A|`
    pub residual: f64,
    pub iterations: usize,
}

/// The unique mass `kappa in ((f^q/A)^(1/(q-1)), 1)` at which
/// `omega_q(f^q / (kappa^(q-1) A)) = omega_p(f^p / (kappa^(p-1) F))`.
pub fn solve_kappa(e: &Exponents, f: f64, a: f64, big_f: f64, tol: f64) -> Result<KappaSolution> {
    let m = MomentData::new(f, a, big_f)?;
    m.check_condition(e)?;
    let (p, q) = (e.p(), e.q());
    let target = f.powf(q) / a;
    let wq = omega_value(q, target)?;
    let wp = omega_value(p, f.powf(p) / big_f)?;
    if !(wq > wp) {
        return Err(Error::NoMatchingKappa { omega_q: wq, omega_p: wp });
    }

    let lo = target.powf(1.0 / (q - 1.0));
    let root = roots::newton_bisect(
        "kappa",
        |k| {
            let (g, dg) = g_raw(e, f, big_f, k);
            (g - target, dg)
        },
        lo,
        1.0,
        true,
    )?;
    if root.residual() > tol * target.max(1.0) {
        return Err(Error::Convergence {
            what: "kappa",
            iterations: root.iterations,
            residual: root.residual(),
        });
    }
    let kappa = root.x;
    let sub = MomentData { kappa, ..m };
    let (s1, s2) = (sub.s1_raw(e), sub.s2_raw(e));
    Ok(KappaSolution {
        kappa,
        s1,
        s2,
        omega_p: omega_value(p, s1)?,
        omega_q: omega_value(q, s2.min(1.0))?,
        residual: root.residual(),
        iterations: root.iterations,
    })
}

/// Moments with `f = 1` whose matching mass is `kappa` and whose common branch
/// value is `gamma in (1, p/(p-1))`.
pub fn forward_moments(e: &Exponents, gamma: f64, kappa: f64) -> Result<MomentData> {
    if !(gamma > 1.0 && gamma < e.p_conjugate()) {
        return Err(domain("gamma", gamma, "(1, p/(p-1))"));
    }
    if !(kappa > 0.0 && kappa <= 1.0) {
        return Err(domain("mass kappa", kappa, "(0, 1]"));
    }
    let (p, q) = (e.p(), e.q());
    let big_f = 1.0 / (kappa.powf(p - 1.0) * h_raw(p, gamma));
    let a = 1.0 / (kappa.powf(q - 1.0) * h_raw(q, gamma));
    MomentData::new(1.0, a, big_f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn e2() -> Exponents {
        Exponents::new(2.0, 1.5).unwrap()
    }

    #[test]
    fn spoint_examples() {
        let e = e2();
        assert!(validate_spoint(&e, 0.96, 0.985901).is_ok());
        let err = validate_spoint(&e, 0.96, 0.9).unwrap_err();
        assert!(matches!(err, Error::OutsideDomain { violated: DomainConstraint::Ordering, .. }));
        let err = validate_spoint(&e, 0.5, 1.0).unwrap_err();
        assert!(matches!(err, Error::OutsideDomain { violated: DomainConstraint::S2Range, .. }));
        assert!(validate_spoint(&e, 0.0, 0.5).is_err());
        assert!(validate_spoint(&e, f64::NAN, 0.5).is_err());
    }

    #[test]
    fn moment_examples() {
        let e = e2();
        let m = MomentData::new(1.0, 1.0, 1.0).unwrap();
        assert!(moments_to_spoint(&e, &m).is_err());
        assert_eq!(m.check_condition(&e), Err(Error::DegenerateMoments));

        let m = MomentData::new(1.0, 1.2, 2.0).unwrap();
        let sp = moments_to_spoint(&e, &m).unwrap();
        assert_eq!(sp.s1(), 0.5);
        assert_relative_eq!(sp.s2(), 1.0 / 1.2, epsilon = 1e-15);
        assert!(m.check_condition(&e).is_ok());

        // halving the mass doubles s1 and scales s2 by 2^(q-1)
        let half = MomentData::with_mass(1.0, 1.6, 4.0, 0.5).unwrap();
        let full = MomentData::new(1.0, 1.6, 4.0).unwrap();
        assert_relative_eq!(half.s1_raw(&e), 2.0 * full.s1_raw(&e), epsilon = 1e-15);
        assert_relative_eq!(half.s2_raw(&e), 2f64.sqrt() * full.s2_raw(&e), epsilon = 1e-15);
        assert!(moments_to_spoint(&e, &half).is_ok());

        assert!(MomentData::with_mass(1.0, 1.2, 2.0, 0.0).is_err());
        assert!(MomentData::new(-1.0, 1.2, 2.0).is_err());
        let bad = MomentData::new(1.0, 1.5, 2.0).unwrap();
        assert!(matches!(bad.check_condition(&e), Err(Error::MomentCondition { .. })));
    }

    #[test]
    fn g_endpoints_and_monotonicity() {
        let e = e2();
        let (f, big_f) = (1.0, 2.0);
        let lo = kappa_bracket(&e, f, big_f);
        assert_relative_eq!(g_of_kappa(&e, f, big_f, lo).unwrap(), (0.5f64).powf(0.5), epsilon = 1e-12);
        let w = omega_value(2.0, 0.5).unwrap();
        assert_relative_eq!(g_of_kappa(&e, f, big_f, 1.0).unwrap(), h_raw(1.5, w), epsilon = 1e-15);
        let mut prev = g_of_kappa(&e, f, big_f, lo).unwrap();
        for i in 1..=50 {
            let k = lo + (1.0 - lo) * i as f64 / 50.0;
            let g = g_of_kappa(&e, f, big_f, k).unwrap();
            assert!(g > prev);
            prev = g;
        }
        assert!(g_of_kappa(&e, f, big_f, 0.1).is_err());
        assert!(g_of_kappa(&e, f, big_f, 1.1).is_err());
    }

    #[test]
    fn g_prime_matches_finite_differences() {
        for e in Exponents::presets() {
            let (f, big_f, k, h) = (1.0, 2.0, 0.9, 1e-6);
            let fd = (g_of_kappa(&e, f, big_f, k + h).unwrap() - g_of_kappa(&e, f, big_f, k - h).unwrap())
                / (2.0 * h);
            let an = g_prime(&e, f, big_f, k).unwrap();
            assert!(an > 0.0);
            assert_relative_eq!(an, fd, max_relative = 1e-6);
        }
        assert!(g_prime(&e2(), 1.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn kappa_examples() {
        let e = e2();
        // A = 1.18 sits just on the wrong side of the solvability condition
        let err = solve_kappa(&e, 1.0, 1.18, 2.0, 1e-12).unwrap_err();
        assert!(matches!(err, Error::NoMatchingKappa { .. }));

        let sol = solve_kappa(&e, 1.0, 1.25, 2.0, 1e-12).unwrap();
        let lo = (1.0f64 / 1.25).powf(2.0);
        assert!(sol.kappa > lo && sol.kappa < 1.0);
        assert!(sol.residual <= 1e-12);
        assert!((sol.omega_p - sol.omega_q).abs() < 1e-8);

        assert_eq!(solve_kappa(&e, 1.0, 1.0, 2.0, 1e-12), Err(Error::DegenerateMoments));
    }

    #[test]
    fn kappa_round_trip() {
        for e in Exponents::presets() {
            for &(gamma, kappa) in &[(1.2, 0.9), (1.05, 0.5), (1.01, 0.99)] {
                if gamma >= e.p_conjugate() {
                    continue;
                }
                let m = forward_moments(&e, gamma, kappa).unwrap();
                let sol = solve_kappa(&e, m.f, m.a, m.big_f, 1e-12).unwrap();
                assert!((sol.kappa - kappa).abs() < 1e-8, "{e:?} {gamma} {kappa} {sol:?}");
                assert!((sol.omega_p - gamma).abs() < 1e-8);
            }
        }
    }
}

//! Threshold curves of the domain and its classification.
//!
//! `theta` is concave with `theta(0+) < 0` and `theta(1) = 0`; its interior
//! root `delta` starts the curve `s2'(s1)` on which `t0 = omega_p(s1)`. The
//! curve `s2''(s1)` solves `h(s2) = s1^(-q)` and bounds the set `X` where the
//! sharp constant equals `t0`.

use std::collections::HashMap;
use std::io::Write;
use std::sync::RwLock;

use rayon::prelude::*;
use serde::Serialize;

use crate::domain::{lower_boundary, validate_spoint, SPoint};
use crate::error::{domain, Error, Result};
use crate::exponents::Exponents;
use crate::roots;
use crate::sharp::{phi_raw, sharp_t_with, t0_root, Branch, SharpConfig, Sign};
use crate::special::{a_of_s2, omega_value, DEFAULT_TOL};

/// Points this close to `s2'` or `s2''` are reported as lying on the curve.
pub const CURVE_BAND: f64 = 1e-9;

/// Below this `s2` the threshold `h(s2)` is reported as `+inf`.
pub const H_FLOOR: f64 = 1e-300;

const DELTA_SCAN: usize = 256;

/// `theta(s1) = phi(omega_p(s1)) - s1 + (p/(p-q)) s1^((p-q)/(p-1))`.
pub fn theta(e: &Exponents, s1: f64) -> Result<f64> {
    if !(s1 > 0.0 && s1 <= 1.0) {
        return Err(domain("theta", s1, "(0, 1]"));
    }
    let w = omega_value(e.p(), s1)?;
    Ok(phi_raw(e, w) - s1 + e.ratio_pq() * s1.powf((e.p() - e.q()) / (e.p() - 1.0)))
}

/// The interior root of `theta`.
pub fn solve_delta(e: &Exponents, tol: f64) -> Result<f64> {
    let mut lo = f64::NAN;
    let mut hi = f64::NAN;
    let mut prev = 0.0;
    for k in 1..DELTA_SCAN {
        let s = k as f64 / DELTA_SCAN as f64;
        if theta(e, s)? > 0.0 {
            lo = prev;
            hi = s;
            break;
        }
        prev = s;
    }
    if hi.is_nan() {
        return Err(Error::Convergence { what: "delta scan", iterations: DELTA_SCAN, residual: f64::NAN });
    }
    if lo == 0.0 {
        lo = hi / DELTA_SCAN as f64;
        while theta(e, lo)? > 0.0 {
            lo *= 1e-3;
        }
    }
    let root = roots::bisect("delta", |s| theta(e, s).unwrap_or(f64::NAN), lo, hi)?;
    if root.residual() > tol {
        return Err(Error::Convergence { what: "delta", iterations: root.iterations, residual: root.residual() });
    }
    Ok(root.x)
}

type MemoKey = (u64, u64, u64);

static DELTA_MEMO: RwLock<Option<HashMap<MemoKey, f64>>> = RwLock::new(None);

/// [`solve_delta`] memoized per `(p, q, tol)` for the life of the process.
pub fn delta_cached(e: &Exponents, tol: f64) -> Result<f64> {
    let key = (e.p().to_bits(), e.q().to_bits(), tol.to_bits());
    if let Some(d) = DELTA_MEMO.read().ok().and_then(|m| m.as_ref().and_then(|m| m.get(&key).copied())) {
        return Ok(d);
    }
    let d = solve_delta(e, tol)?;
    if let Ok(mut m) = DELTA_MEMO.write() {
        m.get_or_insert_with(HashMap::new).insert(key, d);
    }
    Ok(d)
}

fn s2_prime_unchecked(e: &Exponents, s1: f64) -> Result<f64> {
    let w = omega_value(e.p(), s1)?;
    Ok(e.ratio_pq() * s1 / (s1 - phi_raw(e, w)))
}

/// `s2'(s1) = (p/(p-q)) s1 / (s1 - phi(omega_p(s1)))` for `s1 in [delta, 1)`.
pub fn s2_prime_of(e: &Exponents, s1: f64) -> Result<f64> {
    let delta = delta_cached(e, DEFAULT_TOL)?;
    if !(s1 >= delta && s1 < 1.0) {
        return Err(domain("s2'", s1, "[delta, 1)"));
    }
    s2_prime_unchecked(e, s1)
}

fn ln_h_threshold(e: &Exponents, s2: f64) -> Result<f64> {
    let (p, q) = (e.p(), e.q());
    let a = a_of_s2(e, s2)?;
    Ok(p * ((p - q) / q * a + 1.0 / s2).ln() - (p - q) * (p / q * a + 1.0).ln())
}

/// `h(s2) = ((p-q)/q a + 1/s2)^p / ((p/q) a + 1)^(p-q)`, strictly decreasing
/// from `+inf` to `h(1) = 1`.
pub fn h_threshold(e: &Exponents, s2: f64) -> Result<f64> {
    if !(s2 > 0.0 && s2 <= 1.0) {
        return Err(domain("h(s2)", s2, "(0, 1]"));
    }
    if s2 < H_FLOOR {
        return Ok(f64::INFINITY);
    }
    Ok(ln_h_threshold(e, s2)?.exp())
}

/// The `s2''` in `(0, 1)` with `h(s2'') = s1^(-q)`.
pub fn s2_double_prime(e: &Exponents, s1: f64, tol: f64) -> Result<f64> {
    if !(s1 > 0.0 && s1 < 1.0) {
        return Err(domain("s2''", s1, "(0, 1)"));
    }
    let target = -e.q() * s1.ln();
    let ln_lo = H_FLOOR.ln();
    let root = roots::bisect(
        "s2''",
        |u| ln_h_threshold(e, u.exp()).map(|l| l - target).unwrap_or(f64::NAN),
        ln_lo,
        0.0,
    )?;
    let s2 = root.x.exp();
    // |h / target - 1| ~ |ln h - ln target|; the slope of ln h blows up at
    // s2 = 1, so only flag residuals the bracket could still have reduced
    if root.residual() > tol && root.iterations >= roots::MAX_ITER {
        return Err(Error::Convergence { what: "s2''", iterations: root.iterations, residual: root.residual() });
    }
    Ok(s2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TheoremRegion {
    BelowDelta,
    AboveS2prime,
    Between,
    OnS2prime,
}

impl TheoremRegion {
    pub fn as_str(&self) -> &'static str {
        match self {
            TheoremRegion::BelowDelta => "BELOW_DELTA",
            TheoremRegion::AboveS2prime => "ABOVE_S2PRIME",
            TheoremRegion::Between => "BETWEEN",
            TheoremRegion::OnS2prime => "ON_S2PRIME",
        }
    }
}

/// Membership in `X = {s2 < s2''(s1)}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum XTag {
    XRegion,
    NotX,
    OnS2doubleprime,
}

impl XTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            XTag::XRegion => "X_REGION",
            XTag::NotX => "NOT_X",
            XTag::OnS2doubleprime => "ON_S2DOUBLEPRIME",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Cmp {
    Less,
    Equal,
    Greater,
}

impl Cmp {
    fn of(a: f64, b: f64, band: f64) -> Cmp {
        if (a - b).abs() <= band {
            Cmp::Equal
        } else if a < b {
            Cmp::Less
        } else {
            Cmp::Greater
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Comparisons {
    /// `None` below `delta`, where `s2'` is undefined.
    pub s2_vs_s2_prime: Option<Cmp>,
    pub s2_vs_s2_double_prime: Cmp,
    pub omega_p_vs_t0: Cmp,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionReport {
    pub s1: f64,
    pub s2: f64,
    pub delta: f64,
    pub theorem_region: TheoremRegion,
    pub x_region: XTag,
    pub s2_prime: Option<f64>,
    pub s2_double_prime: f64,
    pub t0: f64,
    pub omega_p: f64,
    pub comparisons: Comparisons,
}

impl RegionReport {
    /// Combined tag such as `BETWEEN+X_REGION`.
    pub fn classification(&self) -> String {
        format!("{}+{}", self.theorem_region.as_str(), self.x_region.as_str())
    }
}

/// Everything about the fiber over `s1` that does not depend on `s2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fiber {
    pub s1: f64,
    pub delta: f64,
    pub lower: f64,
    pub s2_prime: Option<f64>,
    pub s2_double_prime: f64,
    pub omega_p: f64,
}

impl Fiber {
    pub fn new(e: &Exponents, s1: f64, tol: f64) -> Result<Self> {
        let delta = delta_cached(e, tol)?;
        let s2_prime = if s1 >= delta { Some(s2_prime_unchecked(e, s1)?) } else { None };
        Ok(Fiber {
            s1,
            delta,
            lower: lower_boundary(e, s1),
            s2_prime,
            s2_double_prime: s2_double_prime(e, s1, tol)?,
            omega_p: omega_value(e.p(), s1)?,
        })
    }

    /// Whether some admissible `s2` in this fiber lies in `X`.
    pub fn x_nonempty(&self) -> bool {
        self.s2_double_prime > self.lower
    }

    pub fn classify(&self, e: &Exponents, s2: f64, tol: f64) -> Result<RegionReport> {
        let pt = validate_spoint(e, self.s1, s2)?;
        let t0 = t0_root(e, crate::sharp::h_bilinear(e, &pt), tol)?.x;
        let vs_prime = self.s2_prime.map(|sp| Cmp::of(s2, sp, CURVE_BAND));
        let theorem_region = match vs_prime {
            None => TheoremRegion::BelowDelta,
            Some(Cmp::Equal) => TheoremRegion::OnS2prime,
            Some(Cmp::Greater) => TheoremRegion::AboveS2prime,
            Some(Cmp::Less) => TheoremRegion::Between,
        };
        let vs_dprime = Cmp::of(s2, self.s2_double_prime, CURVE_BAND);
        let x_region = match vs_dprime {
            Cmp::Less => XTag::XRegion,
            Cmp::Equal => XTag::OnS2doubleprime,
            Cmp::Greater => XTag::NotX,
        };
        Ok(RegionReport {
            s1: self.s1,
            s2,
            delta: self.delta,
            theorem_region,
            x_region,
            s2_prime: self.s2_prime,
            s2_double_prime: self.s2_double_prime,
            t0,
            omega_p: self.omega_p,
            comparisons: Comparisons {
                s2_vs_s2_prime: vs_prime,
                s2_vs_s2_double_prime: vs_dprime,
                omega_p_vs_t0: Cmp::of(self.omega_p, t0, CURVE_BAND),
            },
        })
    }
}

/// Region report for one point.
pub fn classify(e: &Exponents, pt: &SPoint, tol: f64) -> Result<RegionReport> {
    Fiber::new(e, pt.s1(), tol)?.classify(e, pt.s2(), tol)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtlasRow {
    pub s1: f64,
    pub s2: f64,
    pub t0: f64,
    pub t: f64,
    pub branch: Branch,
    pub tprime0_sign: Sign,
    pub classification: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveRow {
    pub s1: f64,
    pub delta_flag: bool,
    pub s2_prime: Option<f64>,
    pub s2_double_prime: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Atlas {
    pub delta: f64,
    pub resolution: usize,
    pub rows: Vec<AtlasRow>,
    pub curves: Vec<CurveRow>,
    /// Rows on the lower boundary `s2 = s1^((q-1)/(p-1))`.
    pub boundary: Vec<AtlasRow>,
}

/// Cell-centred grid coordinate `(k + 1/2) / resolution`.
#[inline]
pub fn grid_coord(k: usize, resolution: usize) -> f64 {
    (k as f64 + 0.5) / resolution as f64
}

fn atlas_row(e: &Exponents, fiber: &Fiber, s2: f64, cfg: &SharpConfig) -> Result<AtlasRow> {
    let pt = validate_spoint(e, fiber.s1, s2)?;
    let report = fiber.classify(e, s2, cfg.tol)?;
    let r = sharp_t_with(e, &pt, cfg)?;
    Ok(AtlasRow {
        s1: fiber.s1,
        s2,
        t0: r.t0,
        t: r.t,
        branch: r.branch,
        tprime0_sign: r.tprime0_sign,
        classification: report.classification(),
    })
}

/// Smallest `s2 >= s1^((q-1)/(p-1))` that passes validation.
fn boundary_s2(e: &Exponents, s1: f64) -> f64 {
    let mut s2 = lower_boundary(e, s1);
    while validate_spoint(e, s1, s2).is_err() && s2 < 1.0 {
        s2 = s2.next_up();
    }
    s2
}

/// Atlas of `D` on a `resolution x resolution` cell-centred grid.
pub fn emit_atlas(e: &Exponents, resolution: usize, cfg: &SharpConfig) -> Result<Atlas> {
    if resolution < 2 {
        return Err(domain("resolution", resolution as f64, "[2, inf)"));
    }
    let delta = delta_cached(e, cfg.tol)?;
    let fibers = (0..resolution)
        .into_par_iter()
        .map(|i| Fiber::new(e, grid_coord(i, resolution), cfg.tol))
        .collect::<Result<Vec<_>>>()?;

    let per_fiber = fibers
        .par_iter()
        .map(|fiber| {
            let mut rows = Vec::new();
            for j in 0..resolution {
                let s2 = grid_coord(j, resolution);
                if validate_spoint(e, fiber.s1, s2).is_ok() {
                    rows.push(atlas_row(e, fiber, s2, cfg)?);
                }
            }
            let b = boundary_s2(e, fiber.s1);
            let boundary = if b < 1.0 { Some(atlas_row(e, fiber, b, cfg)?) } else { None };
            Ok((rows, boundary))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    let mut boundary = Vec::new();
    for (r, b) in per_fiber {
        rows.extend(r);
        boundary.extend(b);
    }

    let mut curves = Vec::with_capacity(resolution + 1);
    curves.push(CurveRow {
        s1: delta,
        delta_flag: true,
        s2_prime: Some(s2_prime_unchecked(e, delta)?),
        s2_double_prime: s2_double_prime(e, delta, cfg.tol)?,
    });
    curves.extend(fibers.iter().map(|f| CurveRow {
        s1: f.s1,
        delta_flag: false,
        s2_prime: f.s2_prime,
        s2_double_prime: f.s2_double_prime,
    }));

    Ok(Atlas { delta, resolution, rows, curves, boundary })
}

/// Point counts per combined classification tag, without computing `t`.
pub fn region_counts(e: &Exponents, resolution: usize, tol: f64) -> Result<HashMap<String, usize>> {
    let per_fiber = (0..resolution)
        .into_par_iter()
        .map(|i| {
            let fiber = Fiber::new(e, grid_coord(i, resolution), tol)?;
            let mut counts: HashMap<String, usize> = HashMap::new();
            for j in 0..resolution {
                let s2 = grid_coord(j, resolution);
                if validate_spoint(e, fiber.s1, s2).is_ok() {
                    *counts.entry(fiber.classify(e, s2, tol)?.classification()).or_default() += 1;
                }
            }
            Ok(counts)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut total = HashMap::new();
    for c in per_fiber {
        for (k, v) in c {
            *total.entry(k).or_default() += v;
        }
    }
    Ok(total)
}

/// Round-trip decimal with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

pub const ATLAS_HEADER: &str = "s1,s2,t0,t,branch,tprime0_sign,classification";
pub const CURVE_HEADER: &str = "s1,delta_flag,s2_prime,s2_double_prime";

pub fn write_rows_csv<W: Write>(rows: &[AtlasRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{ATLAS_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            fmt_f64(r.s1),
            fmt_f64(r.s2),
            fmt_f64(r.t0),
            fmt_f64(r.t),
            r.branch,
            r.tprime0_sign,
            r.classification
        )?;
    }
    Ok(())
}

pub fn write_curves_csv<W: Write>(rows: &[CurveRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{CURVE_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{}",
            fmt_f64(r.s1),
            u8::from(r.delta_flag),
            fmt_opt(r.s2_prime),
            fmt_f64(r.s2_double_prime)
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sharp::{h_bilinear, solve_t0};
    use approx::assert_relative_eq;

    fn e2() -> Exponents {
        Exponents::new(2.0, 1.5).unwrap()
    }

    // reference values from an independent bracketed solver
    const DELTA_2_15: f64 = 0.46977835222537523;
    const DELTA_3_2: f64 = 0.34314575050761986;
    const DELTA_15_12: f64 = 0.6145536567425707;

    #[test]
    fn theta_limits() {
        for e in Exponents::presets() {
            assert!(theta(&e, 1.0).unwrap().abs() < 1e-14);
            let (p, q) = (e.p(), e.q());
            let pc = e.p_conjugate();
            let lim = pc.powf(p - q) * (pc.powf(q) - p / (p - q));
            assert!(lim < 0.0);
            assert!((theta(&e, 1e-14).unwrap() - lim).abs() < 1e-4);
        }
        assert!(theta(&e2(), 0.5).unwrap() > 0.0);
        assert!(theta(&e2(), 0.3).unwrap() < 0.0);
    }

    #[test]
    fn delta_values() {
        let want = [DELTA_2_15, DELTA_3_2, DELTA_15_12];
        for (e, w) in Exponents::presets().iter().zip(want) {
            let d = solve_delta(e, 1e-12).unwrap();
            assert_relative_eq!(d, w, epsilon = 1e-12);
            assert!(theta(e, d / 2.0).unwrap() < 0.0);
            assert!(theta(e, (d + 1.0) / 2.0).unwrap() > 0.0);
            assert_relative_eq!(s2_prime_of(e, d).unwrap(), lower_boundary(e, d), epsilon = 1e-10);
        }
        // (3, 2) has the closed form 6 - 4 sqrt 2
        assert_relative_eq!(DELTA_3_2, 6.0 - 4.0 * 2f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn s2_prime_examples() {
        let e = e2();
        assert_relative_eq!(s2_prime_of(&e, 0.9).unwrap(), 0.9583074321632759, epsilon = 1e-12);
        assert!(s2_prime_of(&e, 1.0 - 1e-10).unwrap() > 1.0 - 1e-4);
        assert!(s2_prime_of(&e, 0.1).is_err());
        for s1 in [0.5, 0.7, 0.95] {
            let sp = s2_prime_of(&e, s1).unwrap();
            let pt = validate_spoint(&e, s1, sp).unwrap();
            let w = omega_value(2.0, s1).unwrap();
            assert!((h_bilinear(&e, &pt) - phi_raw(&e, w)).abs() < 1e-10);
            assert!((solve_t0(&e, &pt, 1e-12).unwrap() - w).abs() < 1e-8);
        }
    }

    #[test]
    fn h_threshold_examples() {
        let e = e2();
        assert!((h_threshold(&e, 1.0).unwrap() - 1.0).abs() < 1e-14);
        assert_relative_eq!(h_threshold(&e, 0.5).unwrap(), 5.428964952248713, max_relative = 1e-12);
        assert!(h_threshold(&e, 1e-200).unwrap() > 1e100);
        assert_eq!(h_threshold(&e, 1e-310).unwrap(), f64::INFINITY);
        let mut prev = f64::INFINITY;
        for k in 1..=200 {
            let h = h_threshold(&e, k as f64 / 200.0).unwrap();
            assert!(h < prev);
            prev = h;
        }
    }

    #[test]
    fn s2_double_prime_examples() {
        let e = e2();
        assert_relative_eq!(s2_double_prime(&e, 0.9, 1e-12).unwrap(), 0.9554954614512964, epsilon = 1e-12);
        assert_relative_eq!(s2_double_prime(&e, 0.5, 1e-12).unwrap(), 0.6823058591520502, epsilon = 1e-12);
        let near = s2_double_prime(&e, 1.0 - 1e-9, 1e-12).unwrap();
        assert!(near > 1.0 - 1e-6 && near < 1.0);
        for e in Exponents::presets() {
            let s1: f64 = 0.99;
            assert!(s2_double_prime(&e, s1, 1e-12).unwrap() > lower_boundary(&e, s1));
        }
    }

    #[test]
    fn classification_matches_theorem() {
        let e = e2();
        let d = DELTA_2_15;
        let below = classify(&e, &validate_spoint(&e, 0.3, 0.8).unwrap(), 1e-12).unwrap();
        assert_eq!(below.theorem_region, TheoremRegion::BelowDelta);
        assert!(below.omega_p < below.t0);

        let s1 = 0.9;
        let sp = s2_prime_of(&e, s1).unwrap();
        let lo = lower_boundary(&e, s1);
        let between = classify(&e, &validate_spoint(&e, s1, 0.5 * (lo + sp)).unwrap(), 1e-12).unwrap();
        assert_eq!(between.theorem_region, TheoremRegion::Between);
        assert_eq!(between.comparisons.omega_p_vs_t0, Cmp::Greater);
        let above = classify(&e, &validate_spoint(&e, s1, 0.5 * (sp + 1.0)).unwrap(), 1e-12).unwrap();
        assert_eq!(above.theorem_region, TheoremRegion::AboveS2prime);
        assert_eq!(above.comparisons.omega_p_vs_t0, Cmp::Less);
        let on = classify(&e, &validate_spoint(&e, s1, sp).unwrap(), 1e-12).unwrap();
        assert_eq!(on.theorem_region, TheoremRegion::OnS2prime);
        assert!(s1 > d);

        let x = classify(&e, &validate_spoint(&e, s1, 0.5 * (lo + 0.9554954614512964)).unwrap(), 1e-12).unwrap();
        assert_eq!(x.x_region, XTag::XRegion);
        assert_eq!(x.classification(), "BETWEEN+X_REGION");
        let pt = validate_spoint(&e, x.s1, x.s2).unwrap();
        let r = sharp_t_with(&e, &pt, &SharpConfig::default()).unwrap();
        assert_eq!(r.branch, Branch::T0Branch);
        assert!(r.t0 < x.omega_p);
    }

    #[test]
    fn tiny_atlas() {
        let e = e2();
        let a = emit_atlas(&e, 2, &SharpConfig::default()).unwrap();
        assert_eq!(a.rows.len(), 1);
        assert_eq!((a.rows[0].s1, a.rows[0].s2), (0.25, 0.75));
        assert!(a.curves[0].delta_flag);
        assert_eq!(a.curves.len(), 3);
        assert!(emit_atlas(&e, 1, &SharpConfig::default()).is_err());
    }

    #[test]
    fn csv_is_deterministic() {
        let e = e2();
        let render = || {
            let a = emit_atlas(&e, 12, &SharpConfig::default()).unwrap();
            let mut buf = Vec::new();
            write_rows_csv(&a.rows, &mut buf).unwrap();
            write_curves_csv(&a.curves, &mut buf).unwrap();
            buf
        };
        let first = render();
        assert_eq!(first, render());
        let text = String::from_utf8(first).unwrap();
        assert!(text.starts_with(ATLAS_HEADER));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn fmt_round_trips() {
        for x in [0.1, 1.0 / 3.0, 6.0 - 4.0 * 2f64.sqrt(), 1e-300, 123456.789] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }
}

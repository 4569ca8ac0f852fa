//! Randomized property suite over the whole library: inverse functions, the
//! mass solver, the sharp constant and the region curves. Each property is
//! checked on seeded samples and keeps the first counterexample it meets.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::domain::{forward_moments, g_of_kappa, g_prime, lower_boundary, solve_kappa, validate_spoint, SPoint};
use crate::error::Result;
use crate::exponents::Exponents;
use crate::region::{self, Fiber, XTag};
use crate::sharp::{self, Branch, SharpConfig, Sign};
use crate::special::{self, a_of_s2, a_prime, h_function, omega, omega_derivative, omega_value};

/// Deliberate defects for checking that the suite catches them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Evaluate the sign threshold as `s1/s2 - ((p-q)/q) s1 a(s2)`.
    FlipE,
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaConfig {
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    /// Half-width of the band around `s2''` excluded from the sign test.
    pub threshold_band: f64,
    pub fault: Option<Fault>,
}

impl Default for LemmaConfig {
    fn default() -> Self {
        LemmaConfig { samples: 1000, seed: crate::oracle::DEFAULT_SEED, tol: special::DEFAULT_TOL, threshold_band: 1e-7, fault: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub inputs: BTreeMap<&'static str, f64>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyResult {
    pub name: &'static str,
    pub passed: bool,
    pub checked: usize,
    pub failures: usize,
    pub counterexample: Option<Counterexample>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PresetReport {
    pub p: f64,
    pub q: f64,
    pub properties: Vec<PropertyResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub all_passed: bool,
    pub presets: Vec<PresetReport>,
}

impl SuiteReport {
    pub fn failures(&self) -> impl Iterator<Item = (&PresetReport, &PropertyResult)> {
        self.presets.iter().flat_map(|p| p.properties.iter().filter(|r| !r.passed).map(move |r| (p, r)))
    }
}

struct Check {
    name: &'static str,
    checked: usize,
    failures: usize,
    counterexample: Option<Counterexample>,
}

impl Check {
    fn new(name: &'static str) -> Self {
        Check { name, checked: 0, failures: 0, counterexample: None }
    }

    fn record(&mut self, ok: bool, inputs: &[(&'static str, f64)], note: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures += 1;
            if self.counterexample.is_none() {
                self.counterexample = Some(Counterexample { inputs: inputs.iter().copied().collect(), note: note() });
            }
        }
    }

    /// Runs `body`; an error counts as a failure with its message as the note.
    fn run(&mut self, inputs: &[(&'static str, f64)], body: impl FnOnce() -> Result<(bool, String)>) {
        match body() {
            Ok((ok, note)) => self.record(ok, inputs, || note),
            Err(err) => self.record(false, inputs, || err.to_string()),
        }
    }

    fn finish(self) -> PropertyResult {
        PropertyResult {
            name: self.name,
            passed: self.failures == 0 && self.checked > 0,
            checked: self.checked,
            failures: self.failures,
            counterexample: self.counterexample,
        }
    }
}

/// Uniform point of `D`: `s1` uniform on `(0, 1)`, then `s2` uniform on the fiber.
pub fn random_point(e: &Exponents, rng: &mut ChaCha8Rng) -> (f64, f64) {
    loop {
        let s1: f64 = rng.random_range(1e-6..1.0);
        let lo = lower_boundary(e, s1);
        let s2 = rng.random_range(lo..1.0);
        if validate_spoint(e, s1, s2).is_ok() {
            return (s1, s2);
        }
    }
}

/// `E` with the fault applied, if any.
fn threshold(fault: Option<Fault>) -> impl Fn(&Exponents, &SPoint) -> Result<f64> {
    move |e, pt| match fault {
        None => sharp::e_threshold(e, pt),
        Some(Fault::FlipE) => {
            let alpha = a_of_s2(e, pt.s2())?;
            Ok(pt.ratio() - (e.p() - e.q()) / e.q() * pt.s1() * alpha)
        }
    }
}

/// All property names, in report order.
pub const PROPERTIES: [&str; 20] = [
    "omega_round_trip",
    "omega_extended_round_trip",
    "omega_decreasing",
    "omega_derivative_matches_differences",
    "a_nonnegative_decreasing",
    "branch_gap_positive",
    "limit_probe_converges",
    "g_increasing",
    "g_prime_matches_differences",
    "kappa_round_trip",
    "kappa_duality",
    "t0_round_trip",
    "tau_at_t0",
    "matched_obstruction_vanishes",
    "matched_sharp_constant",
    "branch_consistency",
    "delta_and_s2_prime",
    "sign_matches_threshold",
    "x_inside_y_and_nonempty",
    "x_derivative_signs",
];

/// Runs every property for each exponent pair.
pub fn run_suite(exps: &[Exponents], cfg: &LemmaConfig) -> SuiteReport {
    let presets: Vec<PresetReport> = exps
        .iter()
        .enumerate()
        .map(|(i, e)| PresetReport { p: e.p(), q: e.q(), properties: run_preset(e, cfg, i as u64) })
        .collect();
    SuiteReport { all_passed: presets.iter().all(|p| p.properties.iter().all(|r| r.passed)), presets }
}

fn run_preset(e: &Exponents, cfg: &LemmaConfig, preset: u64) -> Vec<PropertyResult> {
    use rayon::prelude::*;
    (0..PROPERTIES.len())
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(preset * 64 + k as u64);
            let mut c = Check::new(PROPERTIES[k]);
            property(k, e, cfg, &mut rng, &mut c);
            c.finish()
        })
        .collect()
}

fn property(k: usize, e: &Exponents, cfg: &LemmaConfig, rng: &mut ChaCha8Rng, c: &mut Check) {
    let (p, q) = (e.p(), e.q());
    let n = cfg.samples;
    let tol = cfg.tol;
    match k {
        0 => {
            for _ in 0..n {
                let r = if rng.random_bool(0.5) { p } else { q };
                let t = rng.random_range(1.0..r / (r - 1.0));
                c.run(&[("r", r), ("t", t)], || {
                    let back = omega(r, h_function(r, t)?, tol)?.value;
                    Ok(((back - t).abs() <= 1e-10, format!("omega(H(t)) = {back}")))
                });
            }
        }
        1 => {
            for _ in 0..n {
                let r = if rng.random_bool(0.5) { p } else { q };
                let s = rng.random_range(-50.0..=1.0);
                c.run(&[("r", r), ("s", s)], || {
                    let h = h_function(r, omega(r, s, tol)?.value)?;
                    Ok(((h - s).abs() <= 1e-10 * s.abs().max(1.0), format!("H(omega(s)) = {h}")))
                });
            }
        }
        2 => {
            for r in [p, q] {
                let mut prev = f64::NEG_INFINITY;
                for j in 0..n {
                    let s = 1.0 - 51.0 * (n - j) as f64 / n as f64;
                    c.run(&[("r", r), ("s", s)], || {
                        let w = omega_value(r, s)?;
                        let ok = j == 0 || w < prev;
                        let note = format!("omega = {w}, previous {prev}");
                        prev = w;
                        Ok((ok, note))
                    });
                }
            }
        }
        3 => {
            for _ in 0..n {
                let r = if rng.random_bool(0.5) { p } else { q };
                let s = rng.random_range(-10.0..0.99);
                c.run(&[("r", r), ("s", s)], || {
                    let h = 1e-6 * s.abs().max(1e-2);
                    let fd = (omega_value(r, s + h)? - omega_value(r, s - h)?) / (2.0 * h);
                    let d = omega_derivative(r, s)?;
                    Ok(((d - fd).abs() <= 1e-6 * fd.abs(), format!("derivative {d}, difference {fd}")))
                });
            }
        }
        4 => {
            c.run(&[("s2", 1.0)], || {
                let a = a_of_s2(e, 1.0)?;
                Ok((a == 0.0, format!("a(1) = {a}")))
            });
            for _ in 0..n {
                let s2 = rng.random_range(1e-6..1.0);
                c.run(&[("s2", s2)], || {
                    let (a, da) = (a_of_s2(e, s2)?, a_prime(e, s2)?);
                    Ok((a > 0.0 && da < 0.0, format!("a = {a}, a' = {da}")))
                });
            }
        }
        5 => {
            for j in 0..1000 {
                let lambda = j as f64 / 1000.0;
                c.run(&[("lambda", lambda)], || {
                    let g = special::lemma15_gap(e, lambda)?;
                    Ok((g > 0.0, format!("gap = {g}")))
                });
            }
        }
        6 => {
            for ell in [-0.5, -1.0, -2.0] {
                let limit = -ell / (p - 1.0);
                let mut prev = f64::INFINITY;
                for j in 1..=5 {
                    let alpha = 10f64.powi(-j);
                    c.run(&[("ell", ell), ("alpha", alpha)], || {
                        let err = (special::lemma14_limit_probe(e, ell, alpha)? - limit).abs();
                        let ok = err < prev;
                        let note = format!("error {err}, previous {prev}");
                        prev = err;
                        Ok((ok, note))
                    });
                }
            }
        }
        7 | 8 => {
            for _ in 0..n {
                let big_f = rng.random_range(1.0..20.0f64);
                let lo = (1.0 / big_f).powf(1.0 / (p - 1.0));
                let margin = 1e-3 * (1.0 - lo);
                let k1 = rng.random_range(lo + margin..1.0 - margin);
                let k2 = rng.random_range(lo + margin..1.0 - margin);
                let inputs = [("f", 1.0), ("F", big_f), ("kappa1", k1), ("kappa2", k2)];
                if k == 7 {
                    c.run(&inputs, || {
                        let (g1, g2) = (g_of_kappa(e, 1.0, big_f, k1)?, g_of_kappa(e, 1.0, big_f, k2)?);
                        Ok(((k1 < k2) == (g1 < g2) || k1 == k2, format!("g(kappa1) = {g1}, g(kappa2) = {g2}")))
                    });
                } else {
                    c.run(&inputs, || {
                        let h = (1e-6 * k1).min(0.5 * margin);
                        let fd = (g_of_kappa(e, 1.0, big_f, k1 + h)? - g_of_kappa(e, 1.0, big_f, k1 - h)?) / (2.0 * h);
                        let d = g_prime(e, 1.0, big_f, k1)?;
                        Ok((d > 0.0 && (d - fd).abs() <= 1e-6 * d, format!("g' = {d}, difference {fd}")))
                    });
                }
            }
        }
        9 => {
            for _ in 0..n {
                let gamma = rng.random_range(1.0..e.p_conjugate());
                let kappa = rng.random_range(0.05..1.0);
                c.run(&[("gamma", gamma), ("kappa", kappa)], || {
                    let m = forward_moments(e, gamma, kappa)?;
                    let sol = solve_kappa(e, m.f, m.a, m.big_f, tol)?;
                    // kappa sits above both candidate lower ends of its interval
                    let lo_q = (1.0 / m.a).powf(1.0 / (e.q() - 1.0));
                    let lo_p = (1.0 / m.big_f).powf(1.0 / (e.p() - 1.0));
                    let inside = sol.kappa > lo_q.max(lo_p) && sol.kappa <= 1.0;
                    let ok = inside && (sol.kappa - kappa).abs() <= 1e-8 && (sol.omega_p - sol.omega_q).abs() <= 1e-8;
                    Ok((ok, format!("kappa = {}, omega_p = {}, omega_q = {}", sol.kappa, sol.omega_p, sol.omega_q)))
                });
            }
        }
        10 => {
            for _ in 0..n {
                // f = 1 and A strictly inside the moment condition
                let big_f = rng.random_range(1.01..20.0f64);
                let a_hi = big_f.powf((q - 1.0) / (p - 1.0));
                let a = 1.0 + (a_hi - 1.0) * rng.random_range(0.01..0.99);
                c.run(&[("f", 1.0), ("A", a), ("F", big_f)], || {
                    let hypothesis = omega_value(q, 1.0 / a)? > omega_value(p, 1.0 / big_f)?;
                    // g increasing: a root exists iff g(1) exceeds f^q/A
                    let reachable = g_of_kappa(e, 1.0, big_f, 1.0)? > 1.0 / a;
                    let solved = solve_kappa(e, 1.0, a, big_f, tol);
                    let ok = hypothesis == reachable && solved.is_ok() == hypothesis;
                    Ok((ok, format!("hypothesis {hypothesis}, g(1) > f^q/A {reachable}, solver {solved:?}")))
                });
            }
        }
        11 | 12 => {
            for _ in 0..n {
                let (s1, s2) = random_point(e, rng);
                c.run(&[("s1", s1), ("s2", s2)], || {
                    let pt = validate_spoint(e, s1, s2)?;
                    let t0 = sharp::solve_t0(e, &pt, tol)?;
                    if k == 11 {
                        let (ph, h) = (sharp::phi(e, t0)?, sharp::h_bilinear(e, &pt));
                        Ok(((ph - h).abs() <= 1e-10 * h.abs().max(1.0), format!("t0 = {t0}, phi = {ph}, h = {h}")))
                    } else {
                        let tau = sharp::tau(e, &pt, t0)?;
                        Ok(((tau - 1.0).abs() <= 1e-9, format!("t0 = {t0}, tau = {tau}")))
                    }
                });
            }
        }
        13 | 14 => {
            for _ in 0..n {
                let gamma = rng.random_range(1.0..e.p_conjugate());
                c.run(&[("gamma", gamma)], || {
                    let pt = validate_spoint(e, h_function(p, gamma)?, h_function(q, gamma)?)?;
                    if k == 13 {
                        let fv = sharp::f_obstruction(e, &pt, gamma)?;
                        Ok((fv.abs() <= 1e-9, format!("F(gamma) = {fv}")))
                    } else {
                        let r = sharp::sharp_t(e, &pt, tol)?;
                        let ok = (r.t - gamma).abs() <= 1e-8 && gamma < r.t0;
                        Ok((ok, format!("t = {}, t0 = {}", r.t, r.t0)))
                    }
                });
            }
        }
        15 => {
            let scfg = SharpConfig::with_tol(tol);
            for _ in 0..n {
                let (s1, s2) = random_point(e, rng);
                c.run(&[("s1", s1), ("s2", s2)], || {
                    let pt = validate_spoint(e, s1, s2)?;
                    let r = sharp::sharp_t_with(e, &pt, &scfg)?;
                    let mut ok = r.t >= 1.0 && r.t <= r.t0;
                    match (r.tprime0_sign, r.branch) {
                        (_, Branch::Matched) => {}
                        (Sign::Pos, _) | (Sign::Zero, _) => ok &= r.t == r.t0,
                        (Sign::Neg, _) => {
                            let below = sharp::f_obstruction(e, &pt, (r.t - 1e-7).max(1.0))?;
                            ok &= sharp::f_obstruction(e, &pt, r.t)? <= 0.0 && below <= 0.0;
                            if r.t + 1e-7 < r.t0 {
                                ok &= sharp::f_obstruction(e, &pt, r.t + 1e-7)? > 0.0;
                            }
                        }
                    }
                    Ok((ok, format!("{r:?}")))
                });
            }
        }
        16 => {
            let delta = match region::solve_delta(e, tol) {
                Ok(d) => d,
                Err(err) => return c.record(false, &[], || err.to_string()),
            };
            let grid: Vec<f64> = (0..512).map(|j| (j as f64 + 0.5) / 512.0).collect();
            let mut theta = Vec::with_capacity(grid.len());
            for &s1 in &grid {
                let th = region::theta(e, s1);
                theta.push(*th.as_ref().unwrap_or(&f64::NAN));
                c.run(&[("s1", s1), ("delta", delta)], || {
                    let th = th?;
                    let ok = (s1 - delta).abs() < 1e-9 || (th > 0.0) == (s1 > delta);
                    Ok((ok, format!("theta = {th}")))
                });
            }
            for (j, w) in theta.windows(3).enumerate() {
                let d2 = w[0] - 2.0 * w[1] + w[2];
                c.record(d2 < 0.0, &[("s1", grid[j + 1])], || format!("second difference {d2}"));
            }
            for _ in 0..n {
                let s1 = rng.random_range(delta..1.0);
                c.run(&[("s1", s1), ("delta", delta)], || {
                    let s2p = region::s2_prime_of(e, s1)?;
                    let pt = validate_spoint(e, s1, s2p)?;
                    let wp = omega_value(p, s1)?;
                    let (h, ph) = (sharp::h_bilinear(e, &pt), sharp::phi(e, wp)?);
                    let t0 = sharp::solve_t0(e, &pt, tol)?;
                    let ok = (h - ph).abs() <= 1e-10 && (t0 - wp).abs() <= 1e-8;
                    Ok((ok, format!("s2' = {s2p}, h = {h}, phi(omega_p) = {ph}, t0 = {t0}, omega_p = {wp}")))
                });
            }
        }
        17 => {
            let th = threshold(cfg.fault);
            for _ in 0..n {
                let (s1, s2) = random_point(e, rng);
                let s2dd = match region::s2_double_prime(e, s1, tol) {
                    Ok(v) => v,
                    Err(err) => {
                        c.record(false, &[("s1", s1), ("s2", s2)], || err.to_string());
                        continue;
                    }
                };
                if (s2 - s2dd).abs() < cfg.threshold_band {
                    continue;
                }
                c.run(&[("s1", s1), ("s2", s2), ("s2_double_prime", s2dd)], || {
                    let pt = validate_spoint(e, s1, s2)?;
                    let sign = sharp::tprime0_sign_by(e, &pt, SharpConfig::default().zero_band, &th)?;
                    let ok = match sign {
                        Sign::Neg => s2 > s2dd,
                        Sign::Pos => s2 < s2dd,
                        Sign::Zero => false,
                    };
                    Ok((ok, format!("sign {sign}, s2 {} s2''", if s2 > s2dd { ">" } else { "<" })))
                });
            }
        }
        18 => {
            let mut any_x = false;
            for j in 0..n.max(64) {
                let s1 = (j as f64 + 0.5) / n.max(64) as f64;
                c.run(&[("s1", s1)], || {
                    let fib = Fiber::new(e, s1, tol)?;
                    any_x |= fib.x_nonempty();
                    let ok = match fib.s2_prime {
                        Some(sp) if fib.x_nonempty() => fib.s2_double_prime <= sp,
                        _ => true,
                    };
                    Ok((ok, format!("{fib:?}")))
                });
            }
            c.record(any_x, &[], || "no fiber meets X".to_string());
        }
        19 => {
            let want = (n / 10).max(10);
            let mut found = 0;
            for _ in 0..200 * want {
                if found == want {
                    break;
                }
                let s1 = rng.random_range(1e-3..1.0);
                let Ok(fib) = Fiber::new(e, s1, tol) else { continue };
                if !fib.x_nonempty() {
                    continue;
                }
                let s2 = rng.random_range(fib.lower..fib.s2_double_prime);
                let Ok(rep) = fib.classify(e, s2, tol) else { continue };
                if rep.x_region != XTag::XRegion {
                    continue;
                }
                found += 1;
                c.run(&[("s1", s1), ("s2", s2)], || x_partials(e, s1, s2, fib.lower, tol));
            }
            c.record(found == want, &[], || format!("sampled {found} of {want} X points"));
        }
        _ => unreachable!("property index {k}"),
    }
}

/// Central-difference signs of `t0` at an X point.
fn x_partials(e: &Exponents, s1: f64, s2: f64, lower: f64, tol: f64) -> Result<(bool, String)> {
    let t0 = |a: f64, b: f64| -> Result<f64> { sharp::solve_t0(e, &validate_spoint(e, a, b)?, tol) };
    let h2 = (1e-6 * s2).min(0.25 * (s2 - lower));
    let d2 = (t0(s1, s2 + h2)? - t0(s1, s2 - h2)?) / (2.0 * h2);
    // keep s1 + h1 inside D: s1^(q-1) <= s2^(p-1)
    let s1_max = s2.powf(e.boundary_exponent().recip());
    let h1 = (1e-6 * s1).min(0.25 * (s1_max - s1)).min(0.25 * s1);
    let d1 = (t0(s1 + h1, s2)? - t0(s1 - h1, s2)?) / (2.0 * h1);
    Ok((d1 < 0.0 && d2 > 0.0, format!("dt0/ds1 = {d1}, dt0/ds2 = {d2}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(fault: Option<Fault>) -> LemmaConfig {
        LemmaConfig { samples: 60, fault, ..LemmaConfig::default() }
    }

    #[test]
    fn suite_passes_on_presets() {
        let rep = run_suite(&Exponents::presets(), &small(None));
        let bad: Vec<_> = rep.failures().map(|(p, r)| (p.p, p.q, r.clone())).collect();
        assert!(rep.all_passed, "{bad:#?}");
        assert_eq!(rep.presets[0].properties.len(), PROPERTIES.len());
    }

    #[test]
    fn flipped_threshold_is_caught() {
        let rep = run_suite(&Exponents::presets()[..1], &small(Some(Fault::FlipE)));
        assert!(!rep.all_passed);
        let names: Vec<_> = rep.failures().map(|(_, r)| r.name).collect();
        assert_eq!(names, ["sign_matches_threshold"]);
        let again = run_suite(&Exponents::presets()[..1], &small(Some(Fault::FlipE)));
        assert_eq!(rep, again);
    }
}

//! Brute-force lower bounds for the supremum of the Hardy functional over
//! non-increasing step functions with prescribed moments.
//!
//! Each trial draws a random heavy-tailed non-increasing start, maps it onto
//! the constraint set, climbs the augmented Lagrangian with projection onto
//! the non-increasing cone, and restores exact feasibility. Only candidates
//! whose relative moment residuals stay within the feasibility tolerance are
//! counted.

mod pava;
mod quadrature;
mod search;

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::domain::{moments_to_spoint, MomentData};
use crate::error::{domain, Error, Result};
use crate::exponents::Exponents;
use crate::sharp::{sharp_t_with, SharpConfig, SharpResult};
use crate::special::omega_value;

pub use search::AscentConfig;
use search::Constraints;

pub const DEFAULT_SEED: u64 = 1;

/// Largest ratio of consecutive edges a geometric mesh may use.
pub const MAX_CELL_RATIO: f64 = 2.0;

/// How `(0, kappa]` is cut into cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Mesh {
    /// `n` cells of width `kappa / n`.
    Uniform,
    /// Edges `kappa * r^(n-j)` for `j = 1..n`, with `r^(n-1) = floor` unless
    /// that makes neighbouring edges differ by more than [`MAX_CELL_RATIO`].
    Geometric { floor: f64 },
}

impl Default for Mesh {
    fn default() -> Self {
        Mesh::Geometric { floor: 1e-60 }
    }
}

impl Mesh {
    pub fn edges(&self, n: usize, kappa: f64) -> Vec<f64> {
        let mut e = Vec::with_capacity(n + 1);
        e.push(0.0);
        match *self {
            _ if n == 1 => e.push(kappa),
            Mesh::Uniform => e.extend((1..=n).map(|j| kappa * j as f64 / n as f64)),
            Mesh::Geometric { floor } => {
                let m = (n - 1) as f64;
                let floor = floor.max(MAX_CELL_RATIO.powf(-m));
                e.extend((1..=n).map(|j| kappa * floor.powf((n - j) as f64 / m)));
            }
        }
        e
    }
}

/// A non-negative, non-increasing step function on `(0, kappa]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepFn {
    kappa: f64,
    mesh: Mesh,
    edges: Vec<f64>,
    values: Vec<f64>,
}

impl StepFn {
    pub fn new(kappa: f64, values: Vec<f64>, mesh: Mesh) -> Result<Self> {
        if !(kappa > 0.0 && kappa <= 1.0) {
            return Err(domain("step function mass", kappa, "(0, 1]"));
        }
        if values.is_empty() {
            return Err(Error::Infeasible("step function without cells".into()));
        }
        if let Some(&bad) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(domain("cell value", bad, "[0, inf)"));
        }
        if values.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::Infeasible("cell values must be non-increasing".into()));
        }
        let edges = mesh.edges(values.len(), kappa);
        Ok(StepFn { kappa, mesh, edges, values })
    }

    /// Equal-width cells.
    pub fn uniform(kappa: f64, values: Vec<f64>) -> Result<Self> {
        Self::new(kappa, values, Mesh::Uniform)
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn mesh(&self) -> Mesh {
        self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn widths(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// `int h^r`.
    pub fn moment(&self, r: f64) -> f64 {
        search::moment(&self.values, &self.widths(), r)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "cell_index,value")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(w, "{i},{}", crate::region::fmt_f64(*v))?;
        }
        Ok(())
    }
}

/// `int_0^kappa ((1/t) int_0^t h)^p dt`.
pub fn hardy_functional(s: &StepFn, p: f64) -> f64 {
    quadrature::functional(&s.values, &s.edges, p)
}

/// [`hardy_functional`] for non-negative cell values in any order.
pub fn hardy_functional_unsorted(kappa: f64, values: &[f64], mesh: Mesh, p: f64) -> Result<f64> {
    if values.is_empty() || values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::Infeasible("cell values must be finite and non-negative".into()));
    }
    Ok(quadrature::functional(values, &mesh.edges(values.len(), kappa), p))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleConfig {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub mesh: Mesh,
    /// Largest accepted relative moment residual.
    pub feasibility_tol: f64,
    pub ascent: AscentConfig,
}

impl OracleConfig {
    pub fn new(n: usize, trials: usize, seed: u64) -> Self {
        OracleConfig { n, trials, seed, mesh: Mesh::default(), feasibility_tol: 1e-6, ascent: AscentConfig::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    /// Largest functional value among feasible candidates.
    pub best_ratio: f64,
    /// `best_ratio` divided by the prescribed `int h^p`.
    pub normalized_ratio: f64,
    pub bound: f64,
    /// `bound - best_ratio`
    pub gap: f64,
    pub relative_gap: f64,
    /// Relative moment residuals of the best candidate, in constraint order.
    pub constraint_residuals: Vec<f64>,
    pub trials: usize,
    pub feasible_candidates: usize,
    pub seed: u64,
    pub n: usize,
    pub violation: bool,
    /// Sharp constant behind the bound, three-constraint mode only.
    pub sharp: Option<SharpResult>,
    #[serde(skip)]
    pub best_candidate: StepFn,
}

/// Relative excess over the bound tolerated before flagging a violation.
pub const VIOLATION_TOL: f64 = 1e-6;

const CLIMB_STEPS: usize = 200;

struct Problem<'a> {
    p: f64,
    q: Option<f64>,
    kappa: f64,
    edges: Vec<f64>,
    widths: Vec<f64>,
    mids: Vec<f64>,
    cons: Constraints,
    cfg: &'a OracleConfig,
}

struct Candidate {
    value: f64,
    values: Vec<f64>,
    residuals: Vec<f64>,
}

struct TrialOutcome {
    best: Option<Candidate>,
    feasible: usize,
}

impl Problem<'_> {
    fn new<'a>(p: f64, q: Option<f64>, kappa: f64, targets: Vec<f64>, cfg: &'a OracleConfig) -> Problem<'a> {
        let edges = cfg.mesh.edges(cfg.n, kappa);
        let widths: Vec<f64> = edges.windows(2).map(|w| w[1] - w[0]).collect();
        let mids = edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        let exps = match q {
            Some(q) => vec![1.0, q, p],
            None => vec![1.0, p],
        };
        Problem { p, q, kappa, edges, widths, mids, cons: Constraints { exps, targets }, cfg }
    }

    fn polish(&self, v: &[f64]) -> Option<Vec<f64>> {
        let t = &self.cons.targets;
        match self.q {
            None => search::polish_two(v, &self.widths, self.p, t[0], t[1]),
            Some(q) => search::polish_three(v, &self.widths, q, self.p, [t[0], t[1], t[2]]),
        }
    }

    /// Feasible start for a trial: reshape the random start, or for three
    /// constraints fall back to a logistic step with a scanned cut.
    fn feasible_start(&self, v: &[f64], rng: &mut ChaCha8Rng) -> Option<Vec<f64>> {
        if let Some(u) = self.polish(v) {
            return Some(u);
        }
        let q = self.q?;
        let t = &self.cons.targets;
        (0..4)
            .find_map(|_| {
                let sharpness = rng.random_range(2f64.ln()..400f64.ln()).exp();
                search::polish_step(&self.mids, sharpness, &self.widths, q, self.p, [t[0], t[1], t[2]])
            })
            .or_else(|| search::polish_two_level(&self.edges, &self.widths, self.p, &self.cons))
    }

    fn random_start(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let a = rng.random_range(0.02..0.98 / self.p);
        // two-level starts only help when a third moment pins the shape
        let family = rng.random_range(0..if self.q.is_some() { 4u8 } else { 2 });
        let shift = rng.random_range(0.0..2.0);
        let cut = self.kappa * rng.random_range(1e-3f64.ln()..0.9f64.ln()).exp();
        let high = rng.random_range(1.5f64..20.0);
        let sharpness = rng.random_range(0.5f64.ln()..60f64.ln()).exp();
        let mut v: Vec<f64> = self
            .mids
            .iter()
            .map(|&t| {
                let t = t * rng.random_range(-0.2f64..0.2).exp();
                match family {
                    0 => t.powf(-a),
                    1 => t.powf(-a) + shift,
                    2 => {
                        if t < cut {
                            high
                        } else {
                            1.0
                        }
                    }
                    _ => 1.0 / (1.0 + (t / cut).powf(sharpness)),
                }
            })
            .collect();
        v.sort_by(|x, y| y.total_cmp(x));
        v
    }

    fn consider(&self, v: Vec<f64>, out: &mut TrialOutcome) {
        if v.iter().any(|x| !(x.is_finite() && *x >= 0.0)) || v.windows(2).any(|w| w[1] > w[0]) {
            return;
        }
        let residuals = self.cons.residuals(&v, &self.widths);
        if residuals.iter().any(|r| !(r.abs() <= self.cfg.feasibility_tol)) {
            return;
        }
        out.feasible += 1;
        let value = search::value(&v, &self.edges, self.p);
        if out.best.as_ref().is_none_or(|b| value > b.value) {
            out.best = Some(Candidate { value, values: v, residuals });
        }
    }

    fn trial(&self, index: usize) -> TrialOutcome {
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        rng.set_stream(index as u64);
        let mut out = TrialOutcome { best: None, feasible: 0 };
        let start = self.random_start(&mut rng);
        let Some(polished) = self.feasible_start(&start, &mut rng) else {
            return out;
        };
        self.consider(polished.clone(), &mut out);
        if self.cfg.n >= 2 && self.cfg.ascent.outer > 0 {
            let up = search::ascend(polished, &self.edges, &self.widths, self.p, &self.cons, self.cfg.ascent);
            let fixed = search::restore(up.clone(), &self.widths, self.p, &self.cons).or_else(|| self.polish(&up));
            if let Some(v) = fixed {
                self.consider(v, &mut out);
            }
            if let Some(b) = out.best.take() {
                let v = search::climb(b.values.clone(), &self.edges, &self.widths, self.p, &self.cons, CLIMB_STEPS);
                out.best = Some(b);
                self.consider(v, &mut out);
            }
        }
        out
    }

    fn run(&self, bound: f64, sharp: Option<SharpResult>) -> Result<OracleReport> {
        let outcomes: Vec<TrialOutcome> = (0..self.cfg.trials).into_par_iter().map(|i| self.trial(i)).collect();
        let feasible = outcomes.iter().map(|o| o.feasible).sum();
        let best = outcomes
            .into_iter()
            .filter_map(|o| o.best)
            .reduce(|a, b| if b.value > a.value { b } else { a })
            .ok_or_else(|| {
                Error::Infeasible(format!(
                    "no candidate met the moment constraints within {} on {} cells after {} trials",
                    self.cfg.feasibility_tol, self.cfg.n, self.cfg.trials
                ))
            })?;
        let scale = *self.cons.targets.last().unwrap();
        let gap = bound - best.value;
        Ok(OracleReport {
            best_ratio: best.value,
            normalized_ratio: best.value / scale,
            bound,
            gap,
            relative_gap: gap / bound,
            constraint_residuals: best.residuals,
            trials: self.cfg.trials,
            feasible_candidates: feasible,
            seed: self.cfg.seed,
            n: self.cfg.n,
            violation: best.value > bound * (1.0 + VIOLATION_TOL),
            sharp,
            best_candidate: StepFn::new(self.kappa, best.values, self.cfg.mesh)?,
        })
    }
}

fn check_run(cfg: &OracleConfig) -> Result<()> {
    if cfg.n == 0 {
        return Err(domain("cells", 0.0, "[1, inf)"));
    }
    if cfg.trials == 0 {
        return Err(domain("trials", 0.0, "[1, inf)"));
    }
    Ok(())
}

/// Maximize `J(h)` on `(0, 1]` subject to `int h = f`, `int h^p = big_f`.
/// The bound is the closed form `F omega_p(f^p / F)^p`.
pub fn maximize_two_constraints(p: f64, f: f64, big_f: f64, n: usize, trials: usize, seed: u64) -> Result<OracleReport> {
    maximize_two_constraints_with(p, f, big_f, &OracleConfig::new(n, trials, seed))
}

pub fn maximize_two_constraints_with(p: f64, f: f64, big_f: f64, cfg: &OracleConfig) -> Result<OracleReport> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(domain("exponent p", p, "(1, inf)"));
    }
    if !(f > 0.0 && f.is_finite()) {
        return Err(domain("moment f", f, "(0, inf)"));
    }
    if !(big_f >= f.powf(p) && big_f.is_finite()) {
        return Err(domain("moment F", big_f, "[f^p, inf)"));
    }
    check_run(cfg)?;
    let bound = big_f * omega_value(p, (f.powf(p) / big_f).min(1.0))?.powf(p);
    Problem::new(p, None, 1.0, vec![f, big_f], cfg).run(bound, None)
}

/// Maximize `J(h)` on `(0, kappa]` subject to all three moments of `m`.
/// The bound is `t(s1, s2)^p F`.
pub fn maximize_three_constraints(e: &Exponents, m: &MomentData, n: usize, trials: usize, seed: u64) -> Result<OracleReport> {
    maximize_three_constraints_with(e, m, &OracleConfig::new(n, trials, seed))
}

pub fn maximize_three_constraints_with(e: &Exponents, m: &MomentData, cfg: &OracleConfig) -> Result<OracleReport> {
    check_run(cfg)?;
    let pt = moments_to_spoint(e, m)?;
    let sharp = sharp_t_with(e, &pt, &SharpConfig::default())?;
    let bound = sharp.t.powf(e.p()) * m.big_f;
    Problem::new(e.p(), Some(e.q()), m.kappa, vec![m.f, m.a, m.big_f], cfg).run(bound, Some(sharp))
}

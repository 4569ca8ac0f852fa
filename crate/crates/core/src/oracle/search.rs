//! Feasibility polishing, augmented Lagrangian ascent and feasibility
//! restoration for non-increasing cell values under moment constraints
//! `sum_i w_i v_i^e_k = target_k`.

use super::pava::project_nonincreasing;
use super::quadrature::{functional, functional_and_gradient, pow};

/// Moment constraints: exponents and targets.
#[derive(Debug, Clone)]
pub(crate) struct Constraints {
    pub exps: Vec<f64>,
    pub targets: Vec<f64>,
}

impl Constraints {
    pub fn residuals(&self, v: &[f64], w: &[f64]) -> Vec<f64> {
        self.exps
            .iter()
            .zip(&self.targets)
            .map(|(&e, &t)| moment(v, w, e) / t - 1.0)
            .collect()
    }

    pub fn max_residual(&self, v: &[f64], w: &[f64]) -> f64 {
        self.residuals(v, w).iter().fold(0.0, |m, r| m.max(r.abs()))
    }

    /// Row `k` of the scaled constraint Jacobian.
    fn jacobian_row(&self, k: usize, v: &[f64], w: &[f64], out: &mut [f64]) {
        let (e, t) = (self.exps[k], self.targets[k]);
        for i in 0..v.len() {
            out[i] = e * w[i] * pow(v[i], e - 1.0) / t;
        }
    }
}

pub(crate) fn moment(v: &[f64], w: &[f64], e: f64) -> f64 {
    v.iter().zip(w).map(|(&x, &wi)| wi * pow(x, e)).sum()
}

/// Gaussian elimination with partial pivoting for the tiny systems here.
fn solve_small(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

fn bisect_increasing<F: FnMut(f64) -> Option<f64>>(mut f: F, mut lo: f64, mut hi: f64) -> Option<f64> {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Two constraints `(1, p)`: the transform `u = a v^b` matching both targets.
pub(crate) fn polish_two(v: &[f64], w: &[f64], p: f64, f: f64, big_f: f64) -> Option<Vec<f64>> {
    let mass: f64 = w.iter().sum();
    let vmax = v.iter().cloned().fold(0.0, f64::max);
    if !(vmax > 0.0) {
        return None;
    }
    let want = big_f / pow(f, p);
    let floor = pow(mass, 1.0 - p);
    if want <= floor * (1.0 + 1e-12) {
        // only the constant function is feasible
        return Some(vec![f / mass; v.len()]);
    }
    let g: Vec<f64> = v.iter().map(|x| x / vmax).collect();
    let ratio = |b: f64| {
        let (mut s1, mut sp) = (0.0, 0.0);
        for (&x, &wi) in g.iter().zip(w) {
            let y = if x > 0.0 { x.powf(b) } else { 0.0 };
            s1 += wi * y;
            sp += wi * pow(y, p);
        }
        (s1, sp)
    };
    let log_excess = |b: f64| {
        let (s1, sp) = ratio(b);
        let d = sp.ln() - p * s1.ln() - want.ln();
        d.is_finite().then_some(d)
    };
    let mut hi = 1.0;
    while log_excess(hi)? < 0.0 {
        hi *= 2.0;
        if hi > 1e6 {
            return None;
        }
    }
    let b = bisect_increasing(log_excess, 0.0, hi)?;
    let (s1, _) = ratio(b);
    let a = f / s1;
    let u: Vec<f64> = g.iter().map(|&x| if x > 0.0 { a * x.powf(b) } else { 0.0 }).collect();
    Some(u)
}

/// Affine map `u = a (g - mean g) + f/mass` with `a >= 0` chosen so that
/// `sum w u^p = big_f`; `None` if `u` would turn negative.
fn fit_affine(g: &[f64], w: &[f64], p: f64, f: f64, big_f: f64) -> Option<Vec<f64>> {
    let mass: f64 = w.iter().sum();
    let mean = g.iter().zip(w).map(|(x, wi)| x * wi).sum::<f64>() / mass;
    let x: Vec<f64> = g.iter().map(|v| v - mean).collect();
    let c0 = f / mass;
    let spread = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if spread == 0.0 {
        return None;
    }
    let excess = |a: f64| Some(x.iter().zip(w).map(|(xi, wi)| wi * pow((a * xi + c0).abs(), p)).sum::<f64>() - big_f);
    if excess(0.0)? > 0.0 {
        return None;
    }
    let mut hi = 1.0 / spread;
    while excess(hi)? < 0.0 {
        hi *= 2.0;
        if !hi.is_finite() {
            return None;
        }
    }
    let a = bisect_increasing(excess, 0.0, hi)?;
    let u: Vec<f64> = x.iter().map(|xi| a * xi + c0).collect();
    (u.iter().cloned().fold(f64::INFINITY, f64::min) >= 0.0).then_some(u)
}

/// Three constraints `(1, q, p)`: `u = a (g_s - mean) + c` for a one-parameter
/// family of shapes `g_s`, with `(a, c)` fixing the first and last moment and
/// `s` found by scanning `grid` for a sign change of the middle residual.
pub(crate) fn polish_family<G>(shape: G, grid: &[f64], w: &[f64], q: f64, p: f64, targets: [f64; 3]) -> Option<Vec<f64>>
where
    G: Fn(f64) -> Vec<f64>,
{
    let [f, a_t, big_f] = targets;
    let mid_residual = |s: f64| fit_affine(&shape(s), w, p, f, big_f).map(|u| moment(&u, w, q) / a_t - 1.0);
    let mut prev: Option<(f64, f64)> = None;
    for &s in grid {
        let Some(r) = mid_residual(s) else {
            prev = None;
            continue;
        };
        if r == 0.0 {
            return fit_affine(&shape(s), w, p, f, big_f);
        }
        if let Some((ps, pr)) = prev {
            if (pr < 0.0) != (r < 0.0) {
                let sgn = if pr < 0.0 { 1.0 } else { -1.0 };
                let root = bisect_increasing(|x| mid_residual(x).map(|r| sgn * r), ps, s)?;
                return fit_affine(&shape(root), w, p, f, big_f);
            }
        }
        prev = Some((s, r));
    }
    None
}

/// Log-spaced grid of `n` points on `[lo, hi]`.
pub(crate) fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp()).collect()
}

/// [`polish_family`] over powers `(v / max v)^b`, `b in [1e-3, 50]`.
pub(crate) fn polish_three(v: &[f64], w: &[f64], q: f64, p: f64, targets: [f64; 3]) -> Option<Vec<f64>> {
    let vmax = v.iter().cloned().fold(0.0, f64::max);
    if !(vmax > 0.0) {
        return None;
    }
    let g: Vec<f64> = v.iter().map(|x| x / vmax).collect();
    let shape = |b: f64| -> Vec<f64> { g.iter().map(|&x| if x > 0.0 { x.powf(b) } else { 0.0 }).collect() };
    polish_family(shape, &log_grid(1e-3, 50.0, 200), w, q, p, targets)
}

/// [`polish_family`] over logistic steps `1 / (1 + (t / c)^k)` with the cut
/// `c` scanned across the cell midpoints `mids`.
pub(crate) fn polish_step(mids: &[f64], sharpness: f64, w: &[f64], q: f64, p: f64, targets: [f64; 3]) -> Option<Vec<f64>> {
    let kappa = *mids.last()?;
    let shape = |c: f64| -> Vec<f64> { mids.iter().map(|&t| 1.0 / (1.0 + (t / c).powf(sharpness))).collect() };
    polish_family(shape, &log_grid(kappa * 1e-4, kappa * 1.5, 200), w, q, p, targets)
}

/// Levels `(H, L)` of `H 1_(0,c] + L 1_(c,kappa]` with first moment `f` and
/// `p`-th moment `big_f`; needs `0 < c < kappa` and `big_f <= f^p c^(1-p)`.
fn two_levels(c: f64, kappa: f64, p: f64, f: f64, big_f: f64) -> Option<(f64, f64)> {
    let low = |h: f64| ((f - h * c) / (kappa - c)).max(0.0);
    let excess = |h: f64| Some(pow(h, p) * c + pow(low(h), p) * (kappa - c) - big_f);
    let h = bisect_increasing(excess, f / kappa, f / c)?;
    Some((h, low(h)))
}

/// Three constraints `(1, q, p)` on `(0, edges[n]]`: the two-level function
/// meeting all three moments, with its cut averaged into one cell and then
/// restored onto the constraints.
pub(crate) fn polish_two_level(edges: &[f64], w: &[f64], p: f64, cons: &Constraints) -> Option<Vec<f64>> {
    let (q, [f, a_t, big_f]) = (cons.exps[1], [cons.targets[0], cons.targets[1], cons.targets[2]]);
    let kappa = *edges.last()?;
    let c_max = (pow(f, p) / big_f).powf(1.0 / (p - 1.0)).min(kappa) * (1.0 - 1e-12);
    let resid = |c: f64| two_levels(c, kappa, p, f, big_f).map(|(h, l)| (pow(h, q) * c + pow(l, q) * (kappa - c)) / a_t - 1.0);
    let grid = log_grid(kappa * 1e-6, c_max, 400);
    let mut cut = None;
    for pair in grid.windows(2) {
        let (r0, r1) = (resid(pair[0])?, resid(pair[1])?);
        if (r0 < 0.0) != (r1 < 0.0) {
            let sgn = if r0 < 0.0 { 1.0 } else { -1.0 };
            cut = bisect_increasing(|c| resid(c).map(|r| sgn * r), pair[0], pair[1]);
            break;
        }
    }
    let c = cut?;
    let (h, l) = two_levels(c, kappa, p, f, big_f)?;
    let v: Vec<f64> = edges
        .windows(2)
        .zip(w)
        .map(|(e, wi)| {
            if e[1] <= c {
                h
            } else if e[0] >= c {
                l
            } else {
                (h * (c - e[0]) + l * (e[1] - c)) / wi
            }
        })
        .collect();
    restore(v, w, p, cons)
}

/// Budget of the augmented Lagrangian ascent.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct AscentConfig {
    pub outer: usize,
    pub inner: usize,
}

impl Default for AscentConfig {
    fn default() -> Self {
        AscentConfig { outer: 40, inner: 30 }
    }
}

struct Lagrangian<'a> {
    edges: &'a [f64],
    w: &'a [f64],
    p: f64,
    cons: &'a Constraints,
    scale: f64,
    lam: Vec<f64>,
    mu: f64,
}

struct Eval {
    val: f64,
    grad: Vec<f64>,
    res: Vec<f64>,
}

impl Lagrangian<'_> {
    fn eval(&self, v: &[f64]) -> Eval {
        let n = v.len();
        let mut grad = vec![0.0; n];
        let j = functional_and_gradient(v, self.edges, self.p, &mut grad);
        let res = self.cons.residuals(v, self.w);
        let mut val = j / self.scale;
        for g in grad.iter_mut() {
            *g /= self.scale;
        }
        let mut row = vec![0.0; n];
        for k in 0..res.len() {
            val -= self.lam[k] * res[k] + 0.5 * self.mu * res[k] * res[k];
            self.cons.jacobian_row(k, v, self.w, &mut row);
            let coef = self.lam[k] + self.mu * res[k];
            for i in 0..n {
                grad[i] -= coef * row[i];
            }
        }
        Eval { val, grad, res }
    }
}

fn metric(v: &[f64], w: &[f64], p: f64, nu: f64, scale: f64) -> Vec<f64> {
    v.iter().zip(w).map(|(&x, &wi)| wi * (x + nu).powf(p - 2.0) / scale).collect()
}

/// Least-squares multipliers `lam` minimizing `|dJ - G^T lam|` in the metric.
fn initial_multipliers(v: &[f64], w: &[f64], edges: &[f64], p: f64, cons: &Constraints, m: &[f64], scale: f64) -> Vec<f64> {
    let n = v.len();
    let k = cons.exps.len();
    let mut dj = vec![0.0; n];
    functional_and_gradient(v, edges, p, &mut dj);
    let rows: Vec<Vec<f64>> = (0..k)
        .map(|r| {
            let mut row = vec![0.0; n];
            cons.jacobian_row(r, v, w, &mut row);
            row
        })
        .collect();
    let a = (0..k)
        .map(|r| (0..k).map(|c| (0..n).map(|i| rows[r][i] * rows[c][i] / m[i]).sum()).collect())
        .collect();
    let b = (0..k).map(|r| (0..n).map(|i| rows[r][i] * dj[i] / scale / m[i]).sum()).collect();
    solve_small(a, b).unwrap_or_else(|| vec![0.0; k])
}

/// Projected ascent on the augmented Lagrangian of `J / scale`.
pub(crate) fn ascend(v0: Vec<f64>, edges: &[f64], w: &[f64], p: f64, cons: &Constraints, cfg: AscentConfig) -> Vec<f64> {
    let scale = *cons.targets.last().unwrap();
    let mass: f64 = w.iter().sum();
    let nu = 1e-3 * cons.targets[0] / mass;
    let mut v = v0;
    let m = metric(&v, w, p, nu, scale);
    let mut lag = Lagrangian {
        edges,
        w,
        p,
        cons,
        scale,
        lam: initial_multipliers(&v, w, edges, p, cons, &m, scale),
        mu: 100.0,
    };
    let mut eta = 0.05;
    let mut cur = lag.eval(&v);
    let mut prev_res = cur.res.iter().fold(0.0f64, |a, r| a.max(r.abs()));
    let mut trial = Vec::with_capacity(v.len());
    let mut proj = Vec::with_capacity(v.len());
    for _ in 0..cfg.outer {
        for _ in 0..cfg.inner {
            let m = metric(&v, w, p, nu, scale);
            let next = loop {
                trial.clear();
                trial.extend(v.iter().zip(&cur.grad).zip(&m).map(|((x, g), mi)| x + eta * g / mi));
                project_nonincreasing(&trial, &m, &mut proj);
                let cand: Vec<f64> = proj.iter().map(|x| x.max(0.0)).collect();
                let ev = lag.eval(&cand);
                if ev.val >= cur.val || eta < 1e-14 {
                    break (cand, ev);
                }
                eta *= 0.5;
            };
            if next.1.val < cur.val {
                break;
            }
            v = next.0;
            cur = next.1;
            eta *= 1.5;
        }
        for (l, r) in lag.lam.iter_mut().zip(&cur.res) {
            *l += lag.mu * r;
        }
        let res = cur.res.iter().fold(0.0f64, |a, r| a.max(r.abs()));
        if res < 1e-10 {
            break;
        }
        if res > 0.25 * prev_res {
            lag.mu = (lag.mu * 2.0).min(1e6);
        }
        prev_res = res;
        cur = lag.eval(&v);
    }
    v
}

/// Newton steps on the constraints along the minimum-norm direction of the
/// ascent metric; `None` if the result leaves the non-increasing cone.
pub(crate) fn restore(mut v: Vec<f64>, w: &[f64], p: f64, cons: &Constraints) -> Option<Vec<f64>> {
    let n = v.len();
    let k = cons.exps.len();
    let mass: f64 = w.iter().sum();
    let nu = 1e-3 * cons.targets[0] / mass;
    for _ in 0..20 {
        let r = cons.residuals(&v, w);
        if r.iter().all(|x| x.abs() < 1e-13) {
            return Some(v);
        }
        let m = metric(&v, w, p, nu, 1.0);
        let rows: Vec<Vec<f64>> = (0..k)
            .map(|i| {
                let mut row = vec![0.0; n];
                cons.jacobian_row(i, &v, w, &mut row);
                row
            })
            .collect();
        let a = (0..k)
            .map(|r_| (0..k).map(|c| (0..n).map(|i| rows[r_][i] * rows[c][i] / m[i]).sum()).collect())
            .collect();
        let c = solve_small(a, r.iter().map(|x| -x).collect())?;
        for i in 0..n {
            v[i] += (0..k).map(|j| c[j] * rows[j][i]).sum::<f64>() / m[i];
        }
        if v.iter().any(|&x| x < 0.0) || v.windows(2).any(|p| p[1] > p[0]) {
            return None;
        }
    }
    (cons.max_residual(&v, w) < 1e-9).then_some(v)
}

/// Feasible-path ascent from a feasible `v`: step along the gradient of `J`
/// with the constraint normals removed, project onto the cone, restore.
/// Only improving feasible points are kept.
pub(crate) fn climb(mut v: Vec<f64>, edges: &[f64], w: &[f64], p: f64, cons: &Constraints, iters: usize) -> Vec<f64> {
    let n = v.len();
    let k = cons.exps.len();
    let scale = *cons.targets.last().unwrap();
    let mass: f64 = w.iter().sum();
    let nu = 1e-3 * cons.targets[0] / mass;
    let mut cur = functional(&v, edges, p);
    let mut eta = f64::NAN;
    let mut dj = vec![0.0; n];
    let mut rows = vec![vec![0.0; n]; k];
    let mut proj = Vec::with_capacity(n);
    for _ in 0..iters {
        functional_and_gradient(&v, edges, p, &mut dj);
        let m = metric(&v, w, p, nu, scale);
        for (r, row) in rows.iter_mut().enumerate() {
            cons.jacobian_row(r, &v, w, row);
        }
        let a = (0..k)
            .map(|r| (0..k).map(|c| (0..n).map(|i| rows[r][i] * rows[c][i] / m[i]).sum()).collect())
            .collect();
        let b = (0..k).map(|r| (0..n).map(|i| rows[r][i] * dj[i] / m[i]).sum()).collect();
        let Some(c) = solve_small(a, b) else { break };
        let d: Vec<f64> = (0..n).map(|i| (dj[i] - (0..k).map(|j| c[j] * rows[j][i]).sum::<f64>()) / m[i]).collect();
        let top = d.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        if !(top > 0.0 && top.is_finite()) {
            break;
        }
        if eta.is_nan() {
            eta = 0.05 * v[0] / top;
        }
        let mut moved = false;
        while eta * top > 1e-14 * v[0] {
            let trial: Vec<f64> = v.iter().zip(&d).map(|(x, di)| x + eta * di).collect();
            project_nonincreasing(&trial, &m, &mut proj);
            let cand: Vec<f64> = proj.iter().map(|x| x.max(0.0)).collect();
            if let Some(u) = restore(cand, w, p, cons) {
                let val = functional(&u, edges, p);
                if val > cur {
                    v = u;
                    cur = val;
                    eta *= 1.5;
                    moved = true;
                    break;
                }
            }
            eta *= 0.5;
        }
        if !moved {
            break;
        }
    }
    v
}

/// `J` for already validated data.
pub(crate) fn value(v: &[f64], edges: &[f64], p: f64) -> f64 {
    functional(v, edges, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geometric(n: usize) -> (Vec<f64>, Vec<f64>) {
        let mut e = vec![0.0];
        e.extend((1..=n).map(|j| 1e-12f64.powf((n - j) as f64 / (n - 1) as f64)));
        let w = e.windows(2).map(|x| x[1] - x[0]).collect();
        (e, w)
    }

    #[test]
    fn small_solver() {
        let x = solve_small(vec![vec![0.0, 2.0], vec![1.0, 1.0]], vec![4.0, 3.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 2.0).abs() < 1e-15);
        assert!(solve_small(vec![vec![1.0, 1.0], vec![1.0, 1.0]], vec![1.0, 2.0]).is_none());
    }

    #[test]
    fn two_constraint_polish_hits_targets() {
        let (e, w) = geometric(64);
        let v: Vec<f64> = e.windows(2).map(|x| (0.5 * (x[0] + x[1])).powf(-0.3)).collect();
        let u = polish_two(&v, &w, 2.0, 1.0, 4.0).unwrap();
        let cons = Constraints { exps: vec![1.0, 2.0], targets: vec![1.0, 4.0] };
        assert!(cons.max_residual(&u, &w) < 1e-10);
        assert!(u.windows(2).all(|x| x[0] >= x[1]));
    }

    #[test]
    fn three_constraint_polish_hits_targets() {
        let (e, w) = geometric(64);
        let h: Vec<f64> = e.windows(2).map(|x| (0.5 * (x[0] + x[1])).powf(-0.3) + 0.5).collect();
        let (q, p) = (1.5, 2.0);
        let targets = [moment(&h, &w, 1.0), moment(&h, &w, q), moment(&h, &w, p)];
        let start: Vec<f64> = e.windows(2).map(|x| (0.5 * (x[0] + x[1])).powf(-0.2)).collect();
        let u = polish_three(&start, &w, q, p, targets).unwrap();
        let cons = Constraints { exps: vec![1.0, q, p], targets: targets.to_vec() };
        assert!(cons.max_residual(&u, &w) < 1e-9, "{:?}", cons.residuals(&u, &w));
        let restored = restore(u, &w, p, &cons).unwrap();
        assert!(cons.max_residual(&restored, &w) < 1e-12);
    }

    #[test]
    fn two_level_polish_reaches_indicator_data() {
        let n = 100;
        let e: Vec<f64> = (0..=n).map(|j| 0.6 * j as f64 / n as f64).collect();
        let w: Vec<f64> = e.windows(2).map(|x| x[1] - x[0]).collect();
        // 1 up to 0.57, then 0.05
        let h: Vec<f64> = (0..n).map(|i| if i < 95 { 1.0 } else { 0.05 }).collect();
        let (q, p) = (2.0, 3.0);
        let cons = Constraints { exps: vec![1.0, q, p], targets: vec![moment(&h, &w, 1.0), moment(&h, &w, q), moment(&h, &w, p)] };
        let u = polish_two_level(&e, &w, p, &cons).unwrap();
        assert!(cons.max_residual(&u, &w) < 1e-9);
        assert!(u.windows(2).all(|x| x[1] <= x[0]) && u[n - 1] >= 0.0);
    }

    #[test]
    fn ascent_does_not_lose_value() {
        let (e, w) = geometric(48);
        let v: Vec<f64> = e.windows(2).map(|x| (0.5 * (x[0] + x[1])).powf(-0.2)).collect();
        let u = polish_two(&v, &w, 2.0, 1.0, 4.0).unwrap();
        let cons = Constraints { exps: vec![1.0, 2.0], targets: vec![1.0, 4.0] };
        let before = value(&u, &e, 2.0);
        let up = ascend(u, &e, &w, 2.0, &cons, AscentConfig::default());
        let up = restore(up, &w, 2.0, &cons).unwrap();
        assert!(value(&up, &e, 2.0) >= before * (1.0 - 1e-9));
    }
}

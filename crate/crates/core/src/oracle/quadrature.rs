//! Per-cell Gauss-Legendre evaluation of the Hardy functional
//! `J(h) = int_0^kappa ((1/t) int_0^t h)^p dt` for step functions.
//!
//! On cell `[a, b]` with value `v` and prefix integral `P` the average is
//! `v + c/t` with `c = P - v a`. The first cell has `c = 0`, so its
//! contribution `v^p b` is exact.

const NODES: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329_0,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];

const WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_3,
    0.222_381_034_453_374_5,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362_0,
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

#[inline]
pub(crate) fn pow(x: f64, e: f64) -> f64 {
    if e == 1.0 {
        x
    } else if e == 2.0 {
        x * x
    } else {
        x.powf(e)
    }
}

/// `J` for cell values `v` on `edges` (`edges.len() == v.len() + 1`,
/// `edges[0] == 0`).
pub(crate) fn functional(v: &[f64], edges: &[f64], p: f64) -> f64 {
    let mut prefix = v[0] * edges[1];
    let mut total = pow(v[0], p) * edges[1];
    for j in 1..v.len() {
        let (a, b) = (edges[j], edges[j + 1]);
        let c = prefix - v[j] * a;
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        let mut cell = 0.0;
        for k in 0..8 {
            let t = mid + half * NODES[k];
            cell += WEIGHTS[k] * pow(v[j] + c / t, p);
        }
        total += half * cell;
        prefix += v[j] * (b - a);
    }
    total
}

/// `J` and its gradient with respect to the cell values.
pub(crate) fn functional_and_gradient(v: &[f64], edges: &[f64], p: f64, grad: &mut [f64]) -> f64 {
    let n = v.len();
    let mut dc = vec![0.0; n];
    let mut prefix = v[0] * edges[1];
    let mut total = pow(v[0], p) * edges[1];
    grad[0] = p * pow(v[0], p - 1.0) * edges[1];
    for j in 1..n {
        let (a, b) = (edges[j], edges[j + 1]);
        let c = prefix - v[j] * a;
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        let (mut cell, mut dv, mut dcj) = (0.0, 0.0, 0.0);
        for k in 0..8 {
            let t = mid + half * NODES[k];
            let m = v[j] + c / t;
            let m1 = pow(m, p - 1.0);
            cell += WEIGHTS[k] * m * m1;
            let g = WEIGHTS[k] * p * m1;
            dv += g * (1.0 - a / t);
            dcj += g / t;
        }
        total += half * cell;
        grad[j] = half * dv;
        dc[j] = half * dcj;
        prefix += v[j] * (b - a);
    }
    // c_j depends on every earlier value through the prefix integral
    let mut suffix = 0.0;
    for i in (0..n).rev() {
        grad[i] += (edges[i + 1] - edges[i]) * suffix;
        suffix += dc[i];
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(n: usize) -> Vec<f64> {
        (0..=n).map(|i| i as f64 / n as f64).collect()
    }

    #[test]
    fn weights_integrate_polynomials() {
        let s: f64 = WEIGHTS.iter().sum();
        assert!((s - 2.0).abs() < 1e-15);
        let m14: f64 = NODES.iter().zip(WEIGHTS).map(|(x, w)| w * x.powi(14)).sum();
        assert!((m14 - 2.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn constant_function() {
        let v = vec![2.0; 10];
        assert!((functional(&v, &uniform(10), 2.0) - 4.0).abs() < 1e-13);
        assert!((functional(&[2.0], &uniform(1), 2.0) - 4.0).abs() < 1e-15);
    }

    #[test]
    fn two_level_matches_closed_form() {
        // h = 2 on (0, 1/2], 1 on (1/2, 1], p = 2: average is 2 then 1 + 1/(2t)
        // int_{1/2}^1 (1 + 1/(2t))^2 dt = 1/2 + ln 2 + 1/4
        let want = 4.0 * 0.5 + 0.75 + std::f64::consts::LN_2;
        let got = functional(&[2.0, 1.0], &uniform(2), 2.0);
        assert!((got - want).abs() < 1e-7, "{got} {want}");
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let edges: Vec<f64> = (0..=6).map(|i| if i == 0 { 0.0 } else { 0.5f64.powi(6 - i) }).collect();
        let v = [5.0, 3.0, 2.5, 1.0, 0.7, 0.1];
        for p in [1.5, 2.0, 3.0] {
            let mut g = vec![0.0; 6];
            functional_and_gradient(&v, &edges, p, &mut g);
            for i in 0..6 {
                let h = 1e-6;
                let mut up = v;
                let mut dn = v;
                up[i] += h;
                dn[i] -= h;
                let fd = (functional(&up, &edges, p) - functional(&dn, &edges, p)) / (2.0 * h);
                assert!((g[i] - fd).abs() <= 1e-6 * fd.abs().max(1.0), "p={p} i={i} {} {fd}", g[i]);
            }
        }
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The exponent pair `(p, q)` with `1 < q < p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Exponents {
    p: f64,
    q: f64,
}

impl Exponents {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !(p.is_finite() && q.is_finite() && 1.0 < q && q < p) {
            return Err(Error::Exponents { p, q });
        }
        Ok(Exponents { p, q })
    }

    /// The three pairs used throughout the test suites.
    pub fn presets() -> [Exponents; 3] {
        [
            Exponents { p: 2.0, q: 1.5 },
            Exponents { p: 3.0, q: 2.0 },
            Exponents { p: 1.5, q: 1.2 },
        ]
    }

    #[inline]
    pub fn p(&self) -> f64 {
        self.p
    }

    #[inline]
    pub fn q(&self) -> f64 {
        self.q
    }

    /// `p / (p - q)`
    #[inline]
    pub fn ratio_pq(&self) -> f64 {
        self.p / (self.p - self.q)
    }

    /// `(q - 1) / (p - 1)`, the exponent of the lower boundary curve of the domain.
    #[inline]
    pub fn boundary_exponent(&self) -> f64 {
        (self.q - 1.0) / (self.p - 1.0)
    }

    /// Conjugate `r / (r - 1)` of the larger exponent.
    #[inline]
    pub fn p_conjugate(&self) -> f64 {
        self.p / (self.p - 1.0)
    }

    #[inline]
    pub fn q_conjugate(&self) -> f64 {
        self.q / (self.q - 1.0)
    }

    /// Zero of `phi` beyond 1: `(p / (p - q))^(1/q)`.
    #[inline]
    pub fn y0(&self) -> f64 {
        self.ratio_pq().powf(1.0 / self.q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_pairs() {
        assert!(Exponents::new(2.0, 1.5).is_ok());
        assert!(Exponents::new(1.5, 2.0).is_err());
        assert!(Exponents::new(2.0, 2.0).is_err());
        assert!(Exponents::new(2.0, 1.0).is_err());
        assert!(Exponents::new(f64::INFINITY, 2.0).is_err());
        assert!(Exponents::new(f64::NAN, 1.5).is_err());
    }

    #[test]
    fn derived_constants() {
        let e = Exponents::new(2.0, 1.5).unwrap();
        assert_eq!(e.ratio_pq(), 4.0);
        assert_eq!(e.boundary_exponent(), 0.5);
        assert_eq!(e.p_conjugate(), 2.0);
        assert_eq!(e.q_conjugate(), 3.0);
        // y0 > p/(p-1) > 1
        assert!(e.y0() > e.p_conjugate());
        for e in Exponents::presets() {
            assert!(e.y0() > e.p_conjugate() && e.p_conjugate() > 1.0);
        }
    }
}

use std::fmt;

use thiserror::Error;

/// Which inequality of the admissible domain a point violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainConstraint {
    /// `0 < s1 < 1`
    S1Range,
    /// `0 < s2 < 1`
    S2Range,
    /// `s1^(q-1) <= s2^(p-1)`
    Ordering,
}

impl fmt::Display for DomainConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainConstraint::S1Range => write!(f, "0 < s1 < 1"),
            DomainConstraint::S2Range => write!(f, "0 < s2 < 1 (s2^(p-1) < 1)"),
            DomainConstraint::Ordering => write!(f, "s1^(q-1) <= s2^(p-1)"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid exponents p = {p}, q = {q}: need 1 < q < p, both finite")]
    Exponents { p: f64, q: f64 },

    #[error("{what}: argument {value} outside {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("point (s1 = {s1}, s2 = {s2}) rejected: {violated} fails")]
    OutsideDomain {
        s1: f64,
        s2: f64,
        violated: DomainConstraint,
    },

    #[error("degenerate moments: A = f^q (constant function), the strict moment condition fails")]
    DegenerateMoments,

    #[error("moment condition f^q < A < f^((p-q)/(p-1)) F^((q-1)/(p-1)) fails: {detail}")]
    MomentCondition { detail: String },

    #[error(
        "no mass kappa matches the branches: omega_q(f^q/A) = {omega_q} <= omega_p(f^p/F) = {omega_p}; \
         such a kappa exists only when omega_q(f^q/A) > omega_p(f^p/F)"
    )]
    NoMatchingKappa { omega_q: f64, omega_p: f64 },

    #[error("{what} failed to converge after {iterations} iterations (residual {residual:e})")]
    Convergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("{what}: no sign change on [{lo}, {hi}] (f(lo) = {f_lo}, f(hi) = {f_hi})")]
    Bracket {
        what: &'static str,
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("tau denominator t1^(p-q) - s1/s2 vanishes or changes sign at t1 = {t1}")]
    Singularity { t1: f64 },

    #[error("numerical inconsistency: {0}")]
    Inconsistency(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(what: &'static str, value: f64, domain: &'static str) -> Error {
    Error::Domain {
        what,
        value,
        domain,
    }
}

//! Sharp constants for the Hardy-type inequality under three integral
//! constraints, the threshold curves that split its parameter domain, and a
//! brute-force step-function oracle that checks them.

pub mod cli;
pub mod domain;
pub mod error;
pub mod exponents;
pub mod lemmas;
pub mod oracle;
mod roots;
pub mod region;
pub mod sharp;
pub mod special;

pub use domain::{MomentData, SPoint};
pub use error::{Error, Result};
pub use exponents::Exponents;

//! Sharp constant `t(s1, s2)` at a few points of the domain, with the branch
//! that produced it.
//!
//! ```text
//! cargo run --example sharp_constant
//! ```

use sharp_hardy::domain::validate_spoint;
use sharp_hardy::sharp::sharp_t;
use sharp_hardy::special::{h_function, DEFAULT_TOL};
use sharp_hardy::Exponents;

fn main() -> sharp_hardy::Result<()> {
    let e = Exponents::new(2.0, 1.5)?;
    let matched = h_function(1.5, 1.2)?;
    for (s1, s2) in [(0.96, matched), (0.5, 0.9), (0.3, 0.6), (0.9, 0.99)] {
        let pt = validate_spoint(&e, s1, s2)?;
        let r = sharp_t(&e, &pt, DEFAULT_TOL)?;
        println!(
            "s1={s1:<6} s2={s2:<20} t0={:.12} t={:.12} {} t'(0) {}",
            r.t0, r.t, r.branch, r.tprime0_sign
        );
    }
    Ok(())
}

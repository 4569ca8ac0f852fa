//! Search for near-extremal non-increasing step functions with three
//! prescribed moments and compare against `t^p F`.
//!
//! ```text
//! cargo run --release --example three_constraint_oracle
//! ```

use sharp_hardy::oracle::maximize_three_constraints;
use sharp_hardy::{Exponents, MomentData};

fn main() -> sharp_hardy::Result<()> {
    let e = Exponents::new(3.0, 2.0)?;
    let m = MomentData::new(1.0, 1.2, 1.6)?;
    let r = maximize_three_constraints(&e, &m, 400, 8, 2024)?;
    let sharp = r.sharp.as_ref().expect("three-constraint reports carry t");
    println!("t = {:.12} ({})", sharp.t, sharp.branch);
    println!("best {:.9} / bound {:.9}, relative gap {:.3e}", r.best_ratio, r.bound, r.relative_gap);
    println!("residuals {:?}, {} feasible candidates", r.constraint_residuals, r.feasible_candidates);
    let head: Vec<String> = r.best_candidate.values().iter().take(5).map(|v| format!("{v:.4}")).collect();
    println!("leading cells {}", head.join(" "));
    Ok(())
}

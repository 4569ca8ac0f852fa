//! Brute-force the two-constraint problem on refining meshes and watch the
//! gap to the closed form shrink.
//!
//! ```text
//! cargo run --release --example two_constraint_oracle
//! ```

use sharp_hardy::oracle::maximize_two_constraints;

fn main() -> sharp_hardy::Result<()> {
    let (p, f, big_f) = (2.0, 1.0, 4.0);
    for n in [100, 200, 400, 800] {
        let r = maximize_two_constraints(p, f, big_f, n, 4, 7)?;
        println!("n={n:<4} best={:.9} bound={:.9} gap={:.3e}", r.best_ratio, r.bound, r.gap);
    }
    Ok(())
}

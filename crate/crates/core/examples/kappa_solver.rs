//! Recover the support length `kappa` from raw moments `(f, A, F)`.
//!
//! ```text
//! cargo run --example kappa_solver
//! ```

use sharp_hardy::domain::{forward_moments, solve_kappa};
use sharp_hardy::special::DEFAULT_TOL;
use sharp_hardy::Exponents;

fn main() -> sharp_hardy::Result<()> {
    let e = Exponents::new(2.0, 1.5)?;
    for (gamma, kappa) in [(1.1, 1.0), (1.3, 0.9), (1.9, 0.25)] {
        let m = forward_moments(&e, gamma, kappa)?;
        let sol = solve_kappa(&e, m.f, m.a, m.big_f, DEFAULT_TOL)?;
        println!(
            "A={:.6} F={:.6} -> kappa={:.15} (true {kappa}) omega_p={:.12} in {} steps",
            m.a, m.big_f, sol.kappa, sol.omega_p, sol.iterations
        );
    }
    // the matching hypothesis fails here and the solver says why
    if let Err(err) = solve_kappa(&e, 1.0, 1.18, 2.0, DEFAULT_TOL) {
        println!("A=1.18 F=2: {err}");
    }
    Ok(())
}

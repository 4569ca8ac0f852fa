//! Evaluate `omega_r`, the inverse of `H_r(z) = r z^(r-1) - (r-1) z^r`,
//! on both sides of `s = 0`.
//!
//! ```text
//! cargo run --example inverse_functions
//! ```

use sharp_hardy::special::{h_function, omega, omega_derivative, DEFAULT_TOL};

fn main() -> sharp_hardy::Result<()> {
    let r = 2.0;
    println!("{:>8} {:>22} {:>12} {:>6}", "s", "omega_2(s)", "|H - s|", "iters");
    for s in [1.0, 0.75, 0.5, 0.1, 0.0, -1.0, -10.0, -1e4] {
        let w = omega(r, s, DEFAULT_TOL)?;
        let back = h_function(r, w.value)?;
        println!("{s:>8} {:>22.16} {:>12.2e} {:>6}", w.value, (back - s).abs(), w.iterations);
    }
    // omega is decreasing with derivative 1 / H'(omega)
    println!("omega_2'(0.5) = {:.12}", omega_derivative(r, 0.5)?);
    Ok(())
}

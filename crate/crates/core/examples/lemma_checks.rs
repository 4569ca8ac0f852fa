//! Run the randomized property suite on the preset exponent pairs.
//!
//! ```text
//! cargo run --release --example lemma_checks
//! ```

use sharp_hardy::lemmas::{run_suite, LemmaConfig};
use sharp_hardy::Exponents;

fn main() {
    let cfg = LemmaConfig { samples: 300, ..LemmaConfig::default() };
    let report = run_suite(&Exponents::presets(), &cfg);
    for preset in &report.presets {
        let passed = preset.properties.iter().filter(|r| r.passed).count();
        println!("p={} q={}: {passed}/{} properties hold", preset.p, preset.q, preset.properties.len());
    }
    for (preset, prop) in report.failures() {
        println!("FAILED {} at p={} q={}: {:?}", prop.name, preset.p, preset.q, prop.counterexample);
    }
    std::process::exit(if report.all_passed { 0 } else { 1 });
}

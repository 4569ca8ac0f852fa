//! Classify a grid over the domain and write the atlas and curve tables to
//! the system temp directory.
//!
//! ```text
//! cargo run --example region_atlas -- 120
//! ```

use std::fs::File;
use std::io::BufWriter;

use sharp_hardy::region::{emit_atlas, region_counts, write_curves_csv, write_rows_csv};
use sharp_hardy::sharp::SharpConfig;
use sharp_hardy::special::DEFAULT_TOL;
use sharp_hardy::Exponents;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let res: usize = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(80);
    let e = Exponents::new(3.0, 2.0)?;
    let atlas = emit_atlas(&e, res, &SharpConfig::default())?;
    println!("delta = {:.15}", atlas.delta);

    let dir = std::env::temp_dir();
    write_rows_csv(&atlas.rows, BufWriter::new(File::create(dir.join("atlas.csv"))?))?;
    write_curves_csv(&atlas.curves, BufWriter::new(File::create(dir.join("atlas.curves.csv"))?))?;
    println!("{} rows, {} curve samples in {}", atlas.rows.len(), atlas.curves.len(), dir.display());

    let mut counts: Vec<_> = region_counts(&e, res, DEFAULT_TOL)?.into_iter().collect();
    counts.sort();
    for (tag, n) in counts {
        println!("{tag:<24} {n}");
    }
    Ok(())
}

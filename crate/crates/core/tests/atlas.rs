use sharp_hardy::domain::{lower_boundary, validate_spoint};
use sharp_hardy::region::{self, emit_atlas, region_counts, write_curves_csv, write_rows_csv};
use sharp_hardy::sharp::{Branch, SharpConfig};
use sharp_hardy::Exponents;

const TOL: f64 = 1e-12;

#[test]
fn counts_stable_under_doubling() {
    for e in Exponents::presets() {
        let coarse = region_counts(&e, 200, TOL).unwrap();
        let fine = region_counts(&e, 400, TOL).unwrap();
        for (tag, &c) in &coarse {
            let c = c as f64;
            let f = *fine.get(tag).unwrap_or(&0) as f64 / 4.0;
            let diff = (f - c).abs();
            if c >= 500.0 {
                assert!(diff <= 0.02 * c, "({}, {}) {tag}: {c} vs {f}", e.p(), e.q());
            } else {
                // thin regions: lattice error scales with the boundary length
                assert!(diff <= 3.0 * c.sqrt(), "({}, {}) {tag}: {c} vs {f}", e.p(), e.q());
            }
        }
        assert!(fine.keys().all(|k| coarse.contains_key(k)));
    }
}

#[test]
fn atlas_is_deterministic_and_ordered() {
    let e = Exponents::new(2.0, 1.5).unwrap();
    let cfg = SharpConfig::default();
    let a = emit_atlas(&e, 60, &cfg).unwrap();
    let b = emit_atlas(&e, 60, &cfg).unwrap();
    assert_eq!(a, b);
    assert!(a.rows.windows(2).all(|w| (w[0].s1, w[0].s2) < (w[1].s1, w[1].s2)));

    let (mut x, mut y) = (Vec::new(), Vec::new());
    write_rows_csv(&a.rows, &mut x).unwrap();
    write_rows_csv(&b.rows, &mut y).unwrap();
    assert_eq!(x, y);
    let text = String::from_utf8(x).unwrap();
    let first = text.lines().nth(1).unwrap();
    let s1: f64 = first.split(',').next().unwrap().parse().unwrap();
    assert_eq!(s1, a.rows[0].s1);
}

#[test]
fn every_row_is_inside_the_domain() {
    let cfg = SharpConfig::default();
    for e in Exponents::presets() {
        let atlas = emit_atlas(&e, 40, &cfg).unwrap();
        for r in &atlas.rows {
            assert!(validate_spoint(&e, r.s1, r.s2).is_ok());
            assert!(1.0 <= r.t && r.t <= r.t0);
        }
    }
}

#[test]
fn minimal_resolution() {
    let e = Exponents::new(2.0, 1.5).unwrap();
    let cfg = SharpConfig::default();
    let atlas = emit_atlas(&e, 2, &cfg).unwrap();
    assert!(atlas.rows.iter().all(|r| validate_spoint(&e, r.s1, r.s2).is_ok()));
    assert_eq!(atlas.curves.len(), 3);
    assert!(emit_atlas(&e, 1, &cfg).is_err());
}

#[test]
fn boundary_rows_hug_the_lower_curve() {
    let cfg = SharpConfig::default();
    for e in Exponents::presets() {
        let atlas = emit_atlas(&e, 50, &cfg).unwrap();
        assert_eq!(atlas.boundary.len(), 50);
        for r in &atlas.boundary {
            let lo = lower_boundary(&e, r.s1);
            assert!(r.s2 >= lo && r.s2 - lo <= 1e-12, "{} {} {lo}", r.s1, r.s2);
            assert!(validate_spoint(&e, r.s1, r.s2).is_ok());
        }
    }
}

#[test]
fn curve_table_starts_at_delta() {
    let e = Exponents::new(3.0, 2.0).unwrap();
    let atlas = emit_atlas(&e, 30, &SharpConfig::default()).unwrap();
    assert_eq!(atlas.curves.len(), 31);
    let head = atlas.curves[0];
    assert!(head.delta_flag && head.s1 == atlas.delta);
    assert!(atlas.curves[1..].iter().all(|c| !c.delta_flag));
    for c in &atlas.curves[1..] {
        assert_eq!(c.s2_prime.is_some(), c.s1 >= atlas.delta);
    }
    let mut out = Vec::new();
    write_curves_csv(&atlas.curves, &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert_eq!(text.lines().count(), 32);
    // below delta the s2' column is empty
    assert!(text.lines().nth(2).unwrap().contains(",,"));
}

#[test]
fn x_region_shows_up_in_the_atlas() {
    let cfg = SharpConfig::default();
    for e in Exponents::presets() {
        let atlas = emit_atlas(&e, 100, &cfg).unwrap();
        let x: Vec<_> = atlas.rows.iter().filter(|r| r.classification.ends_with("+X_REGION")).collect();
        assert!(!x.is_empty(), "({}, {})", e.p(), e.q());
        for r in x {
            assert_eq!(r.branch, Branch::T0Branch);
            assert_eq!(r.t, r.t0);
            assert!(r.s2 < region::s2_double_prime(&e, r.s1, TOL).unwrap());
        }
    }
}

#[test]
fn x_fibers_nonempty_near_one() {
    for e in Exponents::presets() {
        for s1 in [0.99, 0.995, 0.999, 0.9999] {
            let fiber = region::Fiber::new(&e, s1, TOL).unwrap();
            assert!(fiber.x_nonempty(), "({}, {}) s1 = {s1}", e.p(), e.q());
        }
    }
}

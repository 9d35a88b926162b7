#[path = "oracles/failure_bound_grid.rs"]
mod grid;

use rsra_core::analysis::{failure_bound, BoundExponent, BoundInputs};

fn significant_digits_match(a: f64, b: f64, digits: i32) -> bool {
    (a - b).abs() <= 0.5 * 10f64.powi(1 - digits) * b.abs()
}

#[test]
fn failure_bound_matches_high_precision() {
    for (n, m, d, gc, use_d, expected) in grid::FAILURE_BOUND_GRID {
        let exponent = if use_d {
            BoundExponent::D
        } else {
            BoundExponent::DMinusOne
        };
        let v = failure_bound(BoundInputs { n, m, d, gc }, exponent).unwrap();
        assert!(
            significant_digits_match(v.raw, expected, 12),
            "({n}, {m}, {d}, {gc}, {use_d}): {} vs {expected}",
            v.raw
        );
        assert!((v.ln_raw - expected.ln()).abs() < 1e-11 * expected.ln().abs().max(1.0));
    }
}

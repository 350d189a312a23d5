//! Benchmark fixtures.

use hasse::{QuadraticField, QuaternionAlgebraQ};

/// Log-spaced thresholds 10^lo ..= 10^hi.
pub fn thresholds(lo: u32, hi: u32, count: usize) -> Vec<u64> {
    (0..count)
        .map(|i| {
            let e = lo as f64 + (hi - lo) as f64 * i as f64 / (count - 1).max(1) as f64;
            10f64.powf(e).round() as u64
        })
        .collect()
}

pub fn algebra(s: &str) -> QuaternionAlgebraQ {
    s.parse().expect("valid ramification set")
}

pub fn field(d: i64) -> QuadraticField {
    hasse::fields::make_field(d).expect("fundamental discriminant")
}

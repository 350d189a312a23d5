//! Floating point helpers shared by the analytic code.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

/// Neumaier compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Natural log of an arbitrarily large positive integer.
pub fn big_ln(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("finite").ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("finite");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Ratio a/b of two big integers as f64, for values of comparable size.
pub fn big_ratio(a: &BigUint, b: &BigUint) -> f64 {
    let bits = a.bits().max(b.bits());
    let shift = bits.saturating_sub(64);
    let fa = (a >> shift).to_f64().expect("finite");
    let fb = (b >> shift).to_f64().expect("finite");
    fa / fb
}

/// Converts a natural logarithm to base 10.
pub fn ln_to_log10(ln: f64) -> f64 {
    ln / std::f64::consts::LN_10
}

/// A positive real that may be far outside f64 range, kept as log10 and,
/// once even that overflows, as log10(log10).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Magnitude {
    pub log10: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log10_log10: Option<f64>,
}

impl Magnitude {
    pub fn from_ln(ln: f64) -> Self {
        let log10 = ln_to_log10(ln);
        let log10_log10 = (log10.is_infinite() || log10 > 1e300).then(|| ln.log10() - std::f64::consts::LN_10.log10());
        Self { log10, log10_log10 }
    }

    /// From ln(ln(value)), for doubly exponential bounds.
    pub fn from_ln_ln(ln_ln: f64) -> Self {
        if ln_ln < 690.0 {
            return Self::from_ln(ln_ln.exp());
        }
        let log10_ln = ln_to_log10(ln_ln);
        Self { log10: f64::INFINITY, log10_log10: Some(log10_ln - std::f64::consts::LN_10.log10()) }
    }

    /// The plain value when it fits in an f64.
    pub fn value(&self) -> Option<f64> {
        (self.log10 < 308.0).then(|| 10f64.powf(self.log10))
    }

    /// A key that orders magnitudes of values ≥ 1 (and all smaller ones below).
    pub fn order_key(&self) -> (u8, f64) {
        match self.log10_log10 {
            Some(ll) if self.log10.is_infinite() => (2, ll),
            _ => (1, self.log10),
        }
    }

    pub fn le(&self, other: &Self) -> bool {
        let (a, b) = (self.order_key(), other.order_key());
        a.0 < b.0 || (a.0 == b.0 && a.1 <= b.1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::new();
        s.add(1e16);
        for _ in 0..1000 {
            s.add(1.0);
        }
        s.add(-1e16);
        assert_eq!(s.value(), 1000.0);
    }

    #[test]
    fn big_ln_matches_f64_for_moderate_values() {
        let x = BigUint::from(10u32).pow(300);
        assert!((big_ln(&x) - 300.0 * 10f64.ln()).abs() < 1e-9);
        let y = BigUint::from(3u32).pow(5000);
        assert!((big_ln(&y) - 5000.0 * 3f64.ln()).abs() < 1e-8);
    }

    #[test]
    fn magnitudes() {
        let m = Magnitude::from_ln(1.0);
        assert!((m.value().unwrap() - std::f64::consts::E).abs() < 1e-12);
        let big = Magnitude::from_ln_ln(130.0);
        assert!(big.value().is_none());
        assert!((big.log10 - 130f64.exp() / std::f64::consts::LN_10).abs() / big.log10 < 1e-12);
        let huge = Magnitude::from_ln_ln(1e4);
        assert!(huge.log10.is_infinite());
        assert!(big.le(&huge) && !huge.le(&big) && m.le(&big));
    }
}

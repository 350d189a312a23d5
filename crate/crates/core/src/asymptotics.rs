//! Leading constants of the counting asymptotics, as truncated Euler products,
//! and count/prediction ratios for census tables.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::arith::{divisors, dirichlet_l, factorize, kronecker_symbol, mobius, primes_up_to, ramanujan_sum};
use crate::brauer::QuaternionAlgebraQ;
use crate::census::{check_independent, nonempty_subsets, product_character, CountTable};
use crate::error::{Error, Result};
use crate::fields::{make_field, QuadraticField};
use crate::numeric::CompensatedSum;

/// A truncated product with a bound on the truncation error of the value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EulerProductValue {
    pub value: f64,
    pub cutoff: u64,
    pub tail_estimate: f64,
}

impl EulerProductValue {
    fn zero(cutoff: u64) -> Self {
        Self { value: 0.0, cutoff, tail_estimate: 0.0 }
    }
}

fn least_prime_factor(n: u64) -> u64 {
    factorize(n).first().map_or(1, |&(p, _)| p)
}

fn ln_factorial(k: u64) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}

/// δ_{m,n} over ℚ (κ = 1). Zero exactly when ℓ ∤ m, ℓ the least prime of n.
pub fn delta_mn(m: u32, n: u32, cutoff: u64) -> Result<EulerProductValue> {
    if n < 2 || m == 0 || n % m != 0 {
        return Err(Error::Domain(format!("need m | n with n ≥ 2, got m={m}, n={n}")));
    }
    if cutoff < 2 {
        return Err(Error::Domain("cutoff must be at least 2".into()));
    }
    let l = least_prime_factor(n as u64);
    if m as u64 % l != 0 {
        return Ok(EulerProductValue::zero(cutoff));
    }
    let lf = l as f64;
    let n2 = (n as f64).powi(2);
    // exponents (1 − 1/d)/(1 − 1/ℓ) for the local indices d > ℓ
    let higher: Vec<(u64, f64)> = divisors(m as u64)
        .into_iter()
        .filter(|&d| d > l)
        .map(|d| (d, (1.0 - 1.0 / d as f64) / (1.0 - 1.0 / lf)))
        .collect();
    let e_min = higher.iter().map(|&(_, e)| e).fold(2.0f64, f64::min);
    let primes = primes_up_to(cutoff);
    let ln_prefix = -(m as f64).ln() - ln_factorial(l - 2) - (l as f64 - 2.0) * (n2 * (1.0 - 1.0 / lf)).ln()
        + if m % 2 == 0 { 2f64.ln() } else { 0.0 };

    let mut total = CompensatedSum::new();
    let mut abs_total = 0.0;
    let mut weight_sum = 0.0;
    for j in (0..m as i64).filter(|j| j % l as i64 == 0) {
        let coeffs: Vec<(i64, f64)> = higher.iter().map(|&(d, e)| (ramanujan_sum(d, j), e)).collect();
        let a = (lf - 1.0).powi(2) + coeffs.iter().map(|&(c, _)| c.unsigned_abs() as f64).sum::<f64>();
        weight_sum = f64::max(weight_sum, a);
        let mut log = CompensatedSum::new();
        let mut negative = false;
        for &p in &primes {
            let pf = p as f64;
            let mut f = 1.0 + (lf - 1.0) / pf;
            for &(c, e) in &coeffs {
                f += c as f64 * pf.powf(-e);
            }
            if f == 0.0 {
                log = CompensatedSum::new();
                log.add(f64::NEG_INFINITY);
                break;
            }
            negative ^= f < 0.0;
            log.add(f.abs().ln() + (lf - 1.0) * (-1.0 / pf).ln_1p());
        }
        let v = (log.value() + ln_prefix).exp();
        let v = if negative { -v } else { v };
        total.add(v);
        abs_total += v.abs();
    }
    // Σ_{p>P} a/p^e ≤ a·P^{1−e}/(e − 1) bounds the log-tail of each product.
    let pf = cutoff as f64;
    let log_tail = weight_sum * pf.powf(1.0 - e_min) / (e_min - 1.0);
    Ok(EulerProductValue { value: total.value(), cutoff, tail_estimate: abs_total * log_tail.exp_m1() })
}

/// δ_n = Σ_{m|n} μ(n/m) δ_{m,n}, which must come out positive.
pub fn delta_n(n: u32, cutoff: u64) -> Result<EulerProductValue> {
    if n < 2 {
        return Err(Error::Domain(format!("need n ≥ 2, got {n}")));
    }
    let mut value = CompensatedSum::new();
    let mut tail = 0.0;
    for m in divisors(n as u64) {
        let mu = mobius(n as u64 / m);
        if mu == 0 {
            continue;
        }
        let d = delta_mn(m as u32, n, cutoff)?;
        value.add(mu as f64 * d.value);
        tail += d.tail_estimate;
    }
    let out = EulerProductValue { value: value.value(), cutoff, tail_estimate: tail };
    if out.value <= 0.0 {
        return Err(Error::InvariantViolation(format!("delta_{n} = {} is not positive", out.value)));
    }
    Ok(out)
}

/// Lower bound (6/π²)/2^{#Ram(B)} for the density of quadratic fields embedding in B.
pub fn embed_quads_lower_bound(b: &QuaternionAlgebraQ) -> f64 {
    6.0 / (PI * PI) / 2f64.powi(b.ram().len() as i32)
}

/// Constant δ with #{B ⊇ L, |disc B| ≤ x} ~ δ·x^{1/2}/(log x)^{1/2}.
pub fn embed_constant_r1(l: &QuadraticField, cutoff: u64) -> Result<EulerProductValue> {
    let d = l.disc();
    let r1 = if l.is_real() { 0.0 } else { 1.0 };
    let l1 = dirichlet_l(d, 1)?.value;
    let mut log = CompensatedSum::new();
    for p in primes_up_to(cutoff) {
        let chi = kronecker_symbol(d, p);
        let pf = p as f64;
        if chi != 1 {
            log.add(0.5 * (-1.0 / (pf * pf)).ln_1p());
        }
        if chi == 0 {
            log.add(0.5 * (1.0 / pf).ln_1p());
        }
    }
    let prefix = 2f64.powf(r1 - 0.5) / PI.sqrt() / l1.sqrt();
    let value = prefix * log.value().exp();
    let tail = value * (0.5 / cutoff as f64).exp_m1();
    Ok(EulerProductValue { value, cutoff, tail_estimate: tail })
}

/// Constant δ with #{B ⊇ L_1, …, L_r} ~ δ·x^{1/2}/(log x)^{1 − 1/2^r}.
pub fn embed_constant_general(fields: &[QuadraticField], cutoff: u64) -> Result<EulerProductValue> {
    if fields.is_empty() {
        return Err(Error::Domain("at least one field is required".into()));
    }
    check_independent(fields)?;
    let r = fields.len();
    let w = 1.0 / 2f64.powi(r as i32);
    let discs: Vec<i64> = fields.iter().map(|l| l.disc()).collect();
    let r1 = if fields.iter().all(|l| !l.is_real()) { 1.0 } else { 0.0 };

    // (character discriminant, exponent (−1)^{|T|}/2^r); T = ∅ is the trivial character
    let mut chars: Vec<(i64, f64)> = vec![(1, w)];
    let mut log = CompensatedSum::new();
    for t in nonempty_subsets(r) {
        let sub: Vec<i64> = t.iter().map(|&i| discs[i]).collect();
        let dt = product_character(&sub).ok_or(Error::DependentDiscriminants)?;
        let e = if t.len() % 2 == 0 { w } else { -w };
        log.add(e * dirichlet_l(dt, 1)?.value.ln());
        chars.push((dt, e));
    }
    for p in primes_up_to(cutoff) {
        let pf = p as f64;
        if discs.iter().all(|&d| kronecker_symbol(d, p) != 1) {
            log.add((1.0 / pf).ln_1p());
        }
        for &(dt, e) in &chars {
            let chi = if dt == 1 { 1 } else { kronecker_symbol(dt, p) };
            if chi != 0 {
                log.add(e * (-(chi as f64) / pf).ln_1p());
            }
        }
    }
    let prefix = 2f64.powf(r1 - w) / gamma(w);
    let value = prefix * log.value().exp();
    let tail = value * (1.0 / cutoff as f64).exp_m1();
    Ok(EulerProductValue { value, cutoff, tail_estimate: tail })
}

/// Which asymptotic a census is compared against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Model {
    Division { n: u32 },
    Embed { fields: Vec<i64> },
    Quads { ram: QuaternionAlgebraQ },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictionRow {
    pub x: u64,
    pub count: u64,
    pub predicted: f64,
    pub ratio: f64,
}

/// Main term of the model at x, given its constant.
fn main_term(model: &Model, constant: f64, x: f64) -> Result<f64> {
    Ok(match model {
        Model::Division { n } => {
            let l = least_prime_factor(*n as u64) as f64;
            let e = 1.0 / ((*n as f64).powi(2) * (1.0 - 1.0 / l));
            constant * x.powf(e) * x.ln().powf(l - 2.0)
        }
        Model::Embed { fields } => {
            let w = 1.0 / 2f64.powi(fields.len() as i32);
            constant * x.sqrt() / x.ln().powf(1.0 - w)
        }
        Model::Quads { .. } => constant * x,
    })
}

pub fn model_constant(model: &Model, cutoff: u64) -> Result<f64> {
    Ok(match model {
        Model::Division { n } => delta_n(*n, cutoff)?.value,
        Model::Embed { fields } => {
            let fields: Vec<QuadraticField> = fields.iter().map(|&d| make_field(d)).collect::<Result<_>>()?;
            embed_constant_general(&fields, cutoff)?.value
        }
        Model::Quads { ram } => embed_quads_lower_bound(ram),
    })
}

/// count / predicted at every threshold above 1 (the main terms vanish at x = 1).
pub fn prediction_report(table: &CountTable, model: &Model, cutoff: u64) -> Result<Vec<PredictionRow>> {
    let c = model_constant(model, cutoff)?;
    table
        .rows()
        .filter(|&(x, _)| x > 1)
        .map(|(x, count)| {
            let predicted = main_term(model, c, x as f64)?;
            Ok(PredictionRow { x, count, predicted, ratio: count as f64 / predicted })
        })
        .collect()
}

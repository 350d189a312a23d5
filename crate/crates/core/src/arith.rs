//! Elementary number theory kernels: symbols, sieves, Pell equations,
//! Ramanujan sums, Chebyshev's θ, Dirichlet L-values and class numbers.

use std::f64::consts::PI;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{big_ln, big_ratio, CompensatedSum};

/// Default memory budget for [`sieve`], in bytes.
pub const DEFAULT_SIEVE_BUDGET: u64 = 1 << 31;

/// Kronecker symbol (a/n) for n ≥ 0.
pub fn kronecker_symbol(a: i64, n: u64) -> i8 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut result = 1i8;
    let mut n = n as u128;
    let tz = n.trailing_zeros();
    if tz > 0 {
        if a % 2 == 0 {
            return 0;
        }
        if tz % 2 == 1 {
            let r = a.rem_euclid(8);
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        n >>= tz;
    }
    let mut a = (a as i128).rem_euclid(n as i128) as u128;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Möbius function, Euler totient and derived flags for 1..=limit.
#[derive(Debug, Clone)]
pub struct SieveTable {
    limit: u64,
    mu: Vec<i8>,
    phi: Vec<u32>,
    primes: Vec<u64>,
}

impl SieveTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn mu(&self, n: u64) -> i8 {
        self.mu[n as usize]
    }

    pub fn phi(&self, n: u64) -> u64 {
        self.phi[n as usize] as u64
    }

    pub fn is_squarefree(&self, n: u64) -> bool {
        n >= 1 && self.mu[n as usize] != 0
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn is_prime(&self, n: u64) -> bool {
        n >= 2 && self.primes.binary_search(&n).is_ok()
    }

    /// Whether d is a fundamental discriminant; needs |d| ≤ limit.
    pub fn is_fundamental(&self, d: i64) -> bool {
        let sf = |m: i64| self.is_squarefree(m.unsigned_abs());
        match d.rem_euclid(4) {
            1 => sf(d),
            0 => {
                let m = d / 4;
                matches!(m.rem_euclid(4), 2 | 3) && sf(m)
            }
            _ => false,
        }
    }
}

/// Linear sieve up to `limit` with the default memory budget.
pub fn sieve(limit: u64) -> Result<SieveTable> {
    sieve_with_budget(limit, DEFAULT_SIEVE_BUDGET)
}

pub fn sieve_with_budget(limit: u64, budget_bytes: u64) -> Result<SieveTable> {
    if limit == 0 {
        return Err(Error::Domain("sieve limit must be at least 1".into()));
    }
    let need = limit.saturating_add(1).saturating_mul(6);
    if need > budget_bytes || limit > u32::MAX as u64 {
        return Err(Error::Resource(format!(
            "sieve up to {limit} needs about {need} bytes, budget is {budget_bytes}"
        )));
    }
    let n = limit as usize;
    let mut mu = vec![0i8; n + 1];
    let mut phi = vec![0u32; n + 1];
    let mut composite = vec![false; n + 1];
    let mut primes: Vec<u64> = Vec::new();
    mu[1] = 1;
    phi[1] = 1;
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            mu[i] = -1;
            phi[i] = (i - 1) as u32;
        }
        for &p in &primes {
            let p = p as usize;
            let ip = i * p;
            if ip > n {
                break;
            }
            composite[ip] = true;
            if i % p == 0 {
                mu[ip] = 0;
                phi[ip] = phi[i] * p as u32;
                break;
            }
            mu[ip] = -mu[i];
            phi[ip] = phi[i] * (p as u32 - 1);
        }
    }
    Ok(SieveTable { limit, mu, phi, primes })
}

/// Primes up to `n` by the sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut is_p = vec![true; n + 1];
    is_p[0] = false;
    is_p[1] = false;
    let mut i = 2;
    while i * i <= n {
        if is_p[i] {
            let mut j = i * i;
            while j <= n {
                is_p[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    is_p.iter()
        .enumerate()
        .filter_map(|(k, &b)| b.then_some(k as u64))
        .collect()
}

/// Trial-division factorization.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            return false;
        }
        p += 1;
    }
    true
}

pub fn mobius(n: u64) -> i64 {
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

pub fn is_squarefree(n: u64) -> bool {
    n >= 1 && factorize(n).iter().all(|&(_, e)| e == 1)
}

/// Divisors of n in ascending order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut ds = vec![1u64];
    for (p, e) in factorize(n) {
        let len = ds.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                ds.push(ds[i] * pk);
            }
        }
    }
    ds.sort_unstable();
    ds
}

pub fn is_fundamental_discriminant(d: i64) -> bool {
    match d.rem_euclid(4) {
        1 => is_squarefree(d.unsigned_abs()),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m.unsigned_abs())
        }
        _ => false,
    }
}

/// Discriminant of ℚ(√m) for a squarefree m ≠ 0.
pub fn fundamental_discriminant_of(m: i64) -> i64 {
    if m.rem_euclid(4) == 1 {
        m
    } else {
        4 * m
    }
}

/// Squarefree part of a nonzero integer, keeping the sign.
pub fn squarefree_part(n: i64) -> i64 {
    let core: u64 = factorize(n.unsigned_abs())
        .iter()
        .filter(|&&(_, e)| e % 2 == 1)
        .map(|&(p, _)| p)
        .product();
    if n < 0 {
        -(core as i64)
    } else {
        core as i64
    }
}

/// Number of squarefree integers in [1, x].
pub fn count_squarefree(x: u64) -> u64 {
    if x == 0 {
        return 0;
    }
    let r = x.isqrt();
    let table = sieve(r.max(1)).expect("square root of a u64 fits the budget");
    let mut total: i128 = 0;
    for d in 1..=r {
        let m = table.mu(d);
        if m != 0 {
            total += m as i128 * (x / (d * d)) as i128;
        }
    }
    total as u64
}

/// Ramanujan sum c_q(j) by Hölder's closed form.
pub fn ramanujan_sum(q: u64, j: i64) -> i64 {
    assert!(q >= 1, "ramanujan_sum needs q >= 1");
    let g = if j == 0 { q } else { q.gcd(&j.unsigned_abs()) };
    let r = q / g;
    mobius(r) * (euler_phi(q) / euler_phi(r)) as i64
}

/// θ(x) = Σ_{p ≤ x} log p.
pub fn chebyshev_theta(x: f64) -> f64 {
    if x < 2.0 {
        return 0.0;
    }
    primes_up_to(x.floor() as u64)
        .iter()
        .map(|&p| (p as f64).ln())
        .collect::<CompensatedSum>()
        .value()
}

/// θ(n) for every integer 0 ≤ n ≤ limit.
pub fn chebyshev_theta_table(limit: u64) -> Vec<f64> {
    let primes = primes_up_to(limit);
    let mut out = vec![0.0; limit as usize + 1];
    let mut acc = CompensatedSum::new();
    let mut next = primes.iter().peekable();
    for n in 0..=limit {
        if next.peek() == Some(&&n) {
            acc.add((n as f64).ln());
            next.next();
        }
        out[n as usize] = acc.value();
    }
    out
}

/// Fundamental solution of t² − Δu² = ±4.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PellSolution {
    pub disc: i64,
    pub t: BigUint,
    pub u: BigUint,
    /// Norm of the fundamental unit (t + u√Δ)/2.
    pub norm: i8,
    pub t1: BigUint,
    pub u1: BigUint,
}

impl PellSolution {
    /// log of the fundamental unit (t + u√Δ)/2.
    pub fn regulator(&self) -> f64 {
        unit_log(&self.t, &self.u, self.disc)
    }

    /// log of the norm-one unit (t₁ + u₁√Δ)/2.
    pub fn norm_one_log(&self) -> f64 {
        unit_log(&self.t1, &self.u1, self.disc)
    }
}

/// log((t + u√Δ)/2) for a unit with t, u > 0.
pub(crate) fn unit_log(t: &BigUint, u: &BigUint, disc: i64) -> f64 {
    let sd = (disc as f64).sqrt();
    if t.bits() < 60 && u.bits() < 60 {
        let t = t.to_f64().unwrap();
        let u = u.to_f64().unwrap();
        return ((t + u * sd) / 2.0).ln();
    }
    let ratio = big_ratio(u, t) * sd;
    big_ln(t) + ratio.ln_1p() - std::f64::consts::LN_2
}

/// Fundamental unit via the continued fraction of the reduced quadratic
/// irrational attached to the ring of integers.
pub fn pell_fundamental(disc: i64) -> Result<PellSolution> {
    if disc <= 1 || !is_fundamental_discriminant(disc) {
        return Err(Error::NotFundamental(disc));
    }
    let odd = disc.rem_euclid(4) == 1;
    // θ = (P + √D)/Q with Q | D − P².
    let (d, mut p_k, mut q_k): (i128, i128, i128) = if odd {
        (disc as i128, -1, 2)
    } else {
        ((disc / 4) as i128, 0, 1)
    };
    let c = (disc as i128 - 1) / 4;
    let s = (d as u128).isqrt() as i128;
    let norm_of = |p: &BigInt, q: &BigInt| -> BigInt {
        if odd {
            p * p + p * q - BigInt::from(c) * q * q
        } else {
            p * p - BigInt::from(d) * q * q
        }
    };
    let (mut p_prev, mut p_cur) = (BigInt::zero(), BigInt::one());
    let (mut q_prev, mut q_cur) = (BigInt::one(), BigInt::zero());
    for _ in 0..10_000_000u64 {
        debug_assert!(q_k > 0);
        let a = Integer::div_floor(&(p_k + s), &q_k);
        let p_next = BigInt::from(a) * &p_cur + &p_prev;
        let q_next = BigInt::from(a) * &q_cur + &q_prev;
        p_prev = std::mem::replace(&mut p_cur, p_next);
        q_prev = std::mem::replace(&mut q_cur, q_next);
        let nrm = norm_of(&p_cur, &q_cur);
        if nrm.abs().is_one() {
            let norm = if nrm.sign() == Sign::Minus { -1 } else { 1 };
            let (t, u) = if odd {
                (BigInt::from(2) * &p_cur + &q_cur, q_cur.clone())
            } else {
                (BigInt::from(2) * &p_cur, q_cur.clone())
            };
            let t = t.to_biguint().expect("positive trace");
            let u = u.to_biguint().expect("positive coefficient");
            let (t1, u1) = if norm == 1 {
                (t.clone(), u.clone())
            } else {
                ((&t * &t + BigUint::from(disc as u64) * &u * &u) / 2u32, &t * &u)
            };
            return Ok(PellSolution { disc, t, u, norm, t1, u1 });
        }
        p_k = a * q_k - p_k;
        q_k = (d - p_k * p_k) / q_k;
    }
    Err(Error::InternalInconsistency(format!(
        "continued fraction for {disc} did not reach a unit"
    )))
}

/// A real number with an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LValue {
    pub value: f64,
    pub abs_error: f64,
}

fn check_agree(what: &str, a: f64, b: f64, tol: f64) -> Result<()> {
    if (a - b).abs() > tol {
        return Err(Error::InternalInconsistency(format!(
            "{what}: methods disagree, {a} vs {b}"
        )));
    }
    Ok(())
}

/// L(s, χ_Δ) for s ∈ {1, 2}, each computed two ways.
pub fn dirichlet_l(disc: i64, s: u32) -> Result<LValue> {
    if disc == 1 || !is_fundamental_discriminant(disc) {
        return Err(Error::NotFundamental(disc));
    }
    match s {
        1 => l_at_one(disc),
        2 => l_at_two(disc),
        _ => Err(Error::Domain(format!("s = {s} is not supported, use 1 or 2"))),
    }
}

fn character(disc: i64) -> Vec<i8> {
    let f = disc.unsigned_abs();
    (0..f).map(|a| kronecker_symbol(disc, a)).collect()
}

fn l_at_one(disc: i64) -> Result<LValue> {
    let f = disc.unsigned_abs();
    let chi = character(disc);
    if disc < 0 {
        let h = class_number_imaginary(disc)? as f64;
        let w = match disc {
            -3 => 6.0,
            -4 => 4.0,
            _ => 2.0,
        };
        let cnf = 2.0 * PI * h / (w * (f as f64).sqrt());
        let s: CompensatedSum = (1..f).map(|a| chi[a as usize] as f64 * a as f64).collect();
        let finite = -PI * s.value() / (f as f64).powf(1.5);
        check_agree("L(1) for negative discriminant", cnf, finite, 1e-8)?;
        Ok(LValue { value: cnf, abs_error: 1e-14 + (cnf - finite).abs() })
    } else {
        let s: CompensatedSum = (1..f)
            .filter(|&a| chi[a as usize] != 0)
            .map(|a| chi[a as usize] as f64 * (PI * a as f64 / f as f64).sin().ln())
            .collect();
        let value = -s.value() / (f as f64).sqrt();
        let reg = pell_fundamental(disc)?.regulator();
        let h = (f as f64).sqrt() * value / (2.0 * reg);
        let rounding = f as f64 * 4.0 * f64::EPSILON;
        if h < 0.5 || (h - h.round()).abs() > 1e-6 * h.max(1.0) {
            return Err(Error::InternalInconsistency(format!(
                "class number from L(1, χ_{disc}) is {h}, not an integer"
            )));
        }
        let exact = 2.0 * h.round() * reg / (f as f64).sqrt();
        check_agree("L(1) for positive discriminant", value, exact, 1e-8)?;
        Ok(LValue { value, abs_error: rounding + (value - exact).abs() })
    }
}

/// Hurwitz ζ(2, q) for 0 < q ≤ 1 by Euler–Maclaurin with a shift of 10.
fn hurwitz_zeta2(q: f64) -> f64 {
    // B_2, B_4, ..., B_16
    const B: [f64; 8] = [
        1.0 / 6.0,
        -1.0 / 30.0,
        1.0 / 42.0,
        -1.0 / 30.0,
        5.0 / 66.0,
        -691.0 / 2730.0,
        7.0 / 6.0,
        -3617.0 / 510.0,
    ];
    let n = 10.0;
    let mut acc = CompensatedSum::new();
    for k in 0..10 {
        let v = k as f64 + q;
        acc.add(1.0 / (v * v));
    }
    let z = n + q;
    acc.add(1.0 / z + 1.0 / (2.0 * z * z));
    let mut zp = z * z * z;
    for b in B {
        acc.add(b / zp);
        zp *= z * z;
    }
    acc.value()
}

/// ζ(2k) for k ≥ 1.
fn zeta_even(k: u32) -> f64 {
    if k == 1 {
        return PI * PI / 6.0;
    }
    let s = 2 * k as i32;
    let n = 200.0f64;
    let mut acc = CompensatedSum::new();
    for m in (1..200).rev() {
        acc.add((m as f64).powi(-s));
    }
    let sf = s as f64;
    acc.add(n.powi(1 - s) / (sf - 1.0) + n.powi(-s) / 2.0 + sf * n.powi(-s - 1) / 12.0);
    acc.value()
}

/// Clausen function Cl₂(θ) for θ ∈ [0, 2π].
pub fn clausen2(theta: f64) -> f64 {
    let tau = 2.0 * PI;
    if theta <= 0.0 || theta >= tau {
        return 0.0;
    }
    if theta > PI {
        return -clausen2(tau - theta);
    }
    let mut acc = CompensatedSum::new();
    acc.add(theta - theta * theta.ln());
    let r2 = (theta / tau) * (theta / tau);
    let mut pow = theta * r2;
    for n in 1..60u32 {
        let nn = 2.0 * n as f64;
        let term = 2.0 * zeta_even(n) * pow / (nn * (nn + 1.0));
        acc.add(term);
        if term.abs() < 1e-18 {
            break;
        }
        pow *= r2;
    }
    acc.value()
}

fn l_at_two(disc: i64) -> Result<LValue> {
    let f = disc.unsigned_abs();
    let ff = f as f64;
    let chi = character(disc);
    let hz: CompensatedSum = (1..f)
        .filter(|&a| chi[a as usize] != 0)
        .map(|a| chi[a as usize] as f64 * hurwitz_zeta2(a as f64 / ff))
        .collect();
    let hurwitz = hz.value() / (ff * ff);
    let poly: CompensatedSum = (1..f)
        .filter(|&a| chi[a as usize] != 0)
        .map(|a| {
            let th = 2.0 * PI * a as f64 / ff;
            if disc > 0 {
                -chi[a as usize] as f64 * th * (2.0 * PI - th) / 4.0
            } else {
                chi[a as usize] as f64 * clausen2(th)
            }
        })
        .collect();
    let gauss = poly.value() / ff.sqrt();
    check_agree("L(2)", hurwitz, gauss, 1e-8)?;
    Ok(LValue { value: hurwitz, abs_error: ff * 8.0 * f64::EPSILON + (hurwitz - gauss).abs() })
}

/// Class number of a negative fundamental discriminant by counting reduced forms.
pub fn class_number_imaginary(disc: i64) -> Result<u64> {
    if disc >= 0 || !is_fundamental_discriminant(disc) {
        return Err(Error::NotFundamental(disc));
    }
    let d = -disc;
    let mut h = 0u64;
    let mut a: i64 = 1;
    while 3 * a * a <= d {
        for b in -a + 1..=a {
            if (b - disc).rem_euclid(2) != 0 {
                continue;
            }
            let num = b * b - disc;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (b < 0 && c == a) {
                continue;
            }
            h += 1;
        }
        a += 1;
    }
    Ok(h)
}

/// Dedekind ζ_k(2) for k = ℚ (Δ = 1) or a quadratic field.
pub fn zeta_k_at_2(disc: i64) -> Result<f64> {
    let z2 = PI * PI / 6.0;
    if disc == 1 {
        return Ok(z2);
    }
    Ok(z2 * dirichlet_l(disc, 2)?.value)
}

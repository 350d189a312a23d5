//! Effective rigidity: the explicit bound formulas with their unknown
//! constants as parameters, and the experiments that separate algebras
//! and fields by their quadratic subfields.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{chebyshev_theta, chebyshev_theta_table, factorize, is_fundamental_discriminant, is_prime, kronecker_symbol};
use crate::brauer::{descends, embeds, is_restriction, QuaternionAlgebraL, QuaternionAlgebraQ};
use crate::census::{nonempty_subsets, product_character, squarefree_products};
use crate::error::{Error, Result};
use crate::fields::{make_field, splitting, PlaceQ, QuadraticField, SplittingType};
use crate::numeric::Magnitude;

/// A bound evaluated at explicit inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub bound_name: String,
    pub symbolic: String,
    pub inputs: BTreeMap<String, f64>,
    pub value: Magnitude,
}

impl BoundReport {
    fn new(name: &str, symbolic: &str, inputs: &[(&str, f64)], value: Magnitude) -> Self {
        Self {
            bound_name: name.to_string(),
            symbolic: symbolic.to_string(),
            inputs: inputs.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
            value,
        }
    }
}

fn need(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Domain(msg()))
    }
}

/// 64^{n³}·d^n·e^{2n(21x/log³x + x)}.
pub fn recognizing_bound(n_k: u32, d_k: u64, x: f64) -> Result<BoundReport> {
    need(x > 2.0, || format!("x must exceed 2, got {x}"))?;
    need(n_k >= 1 && d_k >= 1, || "n_k and d_k must be positive".into())?;
    let n = n_k as f64;
    let lx = x.ln();
    let ln = n.powi(3) * 64f64.ln() + n * (d_k as f64).ln() + 2.0 * n * (21.0 * x / lx.powi(3) + x);
    Ok(BoundReport::new(
        "recognizing",
        "64^(n_k^3) * d_k^n_k * exp(2 n_k (21 x / log(x)^3 + x))",
        &[("n_k", n), ("d_k", d_k as f64), ("x", x)],
        Magnitude::from_ln(ln),
    ))
}

/// 32^{n²}·B(Ω)·(∏_{p≤x} p)^{2n}, with the primorial as e^{θ(x)}.
pub fn grunwald_wang_conductor_bound(n_k: u32, b_omega: f64, x: f64) -> Result<BoundReport> {
    need(x > 2.0, || format!("x must exceed 2, got {x}"))?;
    need(b_omega > 0.0, || "B(Omega) must be positive".into())?;
    let n = n_k as f64;
    let ln = n * n * 32f64.ln() + b_omega.ln() + 2.0 * n * chebyshev_theta(x);
    Ok(BoundReport::new(
        "gw",
        "32^(n_k^2) * B(Omega) * (prod_{p<=x} p)^(2 n_k)",
        &[("n_k", n), ("b_omega", b_omega), ("x", x)],
        Magnitude::from_ln(ln),
    ))
}

/// c₁e^{c₂ log(V)·V^130} in dimension 2, c₃e^{(log V)^{log V}} in dimension 3.
pub fn chlr_length_bound(v: f64, dimension: u32, c1: f64, c2: f64, c3: f64) -> Result<BoundReport> {
    need(v > 0.0, || format!("volume must be positive, got {v}"))?;
    let lv = v.ln();
    let (value, symbolic) = match dimension {
        2 => {
            need(c1 > 0.0 && c2 > 0.0, || "constants must be positive".into())?;
            let value = if lv > 0.0 {
                let ln_exponent = c2.ln() + lv.ln() + 130.0 * lv;
                if ln_exponent < 690.0 {
                    Magnitude::from_ln(c1.ln() + ln_exponent.exp())
                } else {
                    Magnitude::from_ln_ln(ln_exponent)
                }
            } else {
                Magnitude::from_ln(c1.ln() + c2 * lv * v.powi(130))
            };
            (value, "c1 * exp(c2 * log(V) * V^130)")
        }
        3 => {
            need(v > 1.0, || format!("dimension 3 needs V > 1, got {v}"))?;
            need(c3 > 0.0, || "constants must be positive".into())?;
            let ln_exponent = lv * lv.ln();
            let value = if ln_exponent < 690.0 {
                Magnitude::from_ln(c3.ln() + ln_exponent.exp())
            } else {
                Magnitude::from_ln_ln(ln_exponent)
            };
            (value, "c3 * exp(log(V)^log(V))")
        }
        _ => return Err(Error::Domain(format!("dimension must be 2 or 3, got {dimension}"))),
    };
    Ok(BoundReport::new(
        "chlr",
        symbolic,
        &[("volume", v), ("dimension", dimension as f64), ("c1", c1), ("c2", c2), ("c3", c3)],
        value,
    ))
}

/// e^{cV}.
pub fn mcreid_area_bound(v: f64, c: f64) -> Result<BoundReport> {
    need(v >= 0.0 && c > 0.0, || "need V ≥ 0 and c > 0".into())?;
    Ok(BoundReport::new("mcreid", "exp(c * V)", &[("volume", v), ("c", c)], Magnitude::from_ln(c * v)))
}

/// d^{2C}·(2 log(|disc B₁||disc B₂|))⁴·|disc B₁||disc B₂|.
pub fn brauer_rigidity_bound(d_base: f64, c: f64, disc1: f64, disc2: f64) -> Result<BoundReport> {
    need(d_base >= 1.0 && c > 0.0, || "need d_base ≥ 1 and C > 0".into())?;
    need(disc1 >= 1.0 && disc2 >= 1.0 && disc1 * disc2 > 1.0, || "discriminants must be ≥ 1, not both 1".into())?;
    let lp = disc1.ln() + disc2.ln();
    let ln = 2.0 * c * d_base.ln() + 4.0 * (2.0 * lp).ln() + lp;
    Ok(BoundReport::new(
        "brauer",
        "d_base^(2C) * (2 log(|disc B1| |disc B2|))^4 * |disc B1| |disc B2|",
        &[("d_base", d_base), ("c", c), ("disc1", disc1), ("disc2", disc2)],
        Magnitude::from_ln(ln),
    ))
}

/// Worst case of θ(x) against 21x/log³x + x over integers 2 < x ≤ x_max.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaReport {
    pub x_max: u64,
    pub max_ratio: f64,
    pub x_at_max: u64,
    pub violations: u64,
}

pub fn theta_bound_check(x_max: u64) -> Result<ThetaReport> {
    need(x_max >= 3, || "x_max must be at least 3".into())?;
    let theta = chebyshev_theta_table(x_max);
    let mut out = ThetaReport { x_max, max_ratio: 0.0, x_at_max: 3, violations: 0 };
    for x in 3..=x_max {
        let xf = x as f64;
        let bound = 21.0 * xf / xf.ln().powi(3) + xf;
        let t = theta[x as usize];
        if t > bound + 1e-9 {
            out.violations += 1;
        }
        let r = t / bound;
        if r > out.max_ratio {
            out.max_ratio = r;
            out.x_at_max = x;
        }
    }
    Ok(out)
}

/// Fundamental discriminants in search order: |Δ| ascending, negative first.
fn search_order(delta_max: u64) -> impl Iterator<Item = i64> {
    (3..=delta_max as i64).flat_map(|a| [-a, a]).filter(|&d| is_fundamental_discriminant(d))
}

/// Least Δ with embeds(Δ, B1) ≠ embeds(Δ, B2); None when B1 ≅ B2.
pub fn distinguish_quaternions(b1: &QuaternionAlgebraQ, b2: &QuaternionAlgebraQ, delta_max: u64) -> Result<Option<i64>> {
    distinguish_filtered(b1, b2, delta_max, false)
}

fn distinguish_filtered(
    b1: &QuaternionAlgebraQ,
    b2: &QuaternionAlgebraQ,
    delta_max: u64,
    real_only: bool,
) -> Result<Option<i64>> {
    if b1 == b2 {
        return Ok(None);
    }
    search_order(delta_max)
        .filter(|&d| !real_only || d > 0)
        .find(|&d| {
            let l = make_field(d).expect("fundamental");
            embeds(&l, b1) != embeds(&l, b2)
        })
        .map(Some)
        .ok_or(Error::NotFoundWithinBound(delta_max))
}

/// Outcome of separating two (field, algebra) pairs by an algebra over ℚ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BrauerDistinction {
    /// Least-discriminant indefinite B restricting correctly on exactly one side.
    pub least: QuaternionAlgebraQ,
    /// The algebra built from a descent set and the prime ω₁ (and ω₂ for parity).
    pub recipe: QuaternionAlgebraQ,
    pub omega1: Option<u64>,
    pub omega2: Option<u64>,
}

fn separates(b: &QuaternionAlgebraQ, l1: &QuadraticField, bl1: &QuaternionAlgebraL, l2: &QuadraticField, bl2: &QuaternionAlgebraL) -> bool {
    is_restriction(b, l1, bl1) != is_restriction(b, l2, bl2)
}

pub fn distinguish_brauer_pairs(
    bl1: &QuaternionAlgebraL,
    bl2: &QuaternionAlgebraL,
    x_max: u64,
) -> Result<Option<BrauerDistinction>> {
    let (l1, l2) = (*bl1.field(), *bl2.field());
    for l in [l1, l2] {
        if l.is_real() {
            return Err(Error::RealField(l.disc()));
        }
    }
    let rec1 = descends(bl1).ok_or_else(|| Error::Domain(format!("{bl1} does not descend")))?;
    let rec2 = descends(bl2).ok_or_else(|| Error::Domain(format!("{bl2} does not descend")))?;
    if l1 == l2 && bl1 == bl2 {
        return Ok(None);
    }

    // recipe
    let used: BTreeSet<u64> = rec1.split_primes.union(&rec2.split_primes).copied().collect();
    let (base, omega1, other) = if l1 == l2 {
        (rec1.split_primes.clone(), None, l1)
    } else {
        let w1 = (2u64..)
            .filter(|&p| is_prime(p) && !used.contains(&p))
            .find(|&p| {
                let s1 = splitting(&l1, PlaceQ::Finite(p)) == SplittingType::Split;
                let s2 = splitting(&l2, PlaceQ::Finite(p)) == SplittingType::Split;
                s1 != s2
            })
            .expect("distinct fields differ at some prime");
        // build on the side where ω₁ does not split, so that side still restricts
        if splitting(&l1, PlaceQ::Finite(w1)) == SplittingType::Split {
            (rec2.split_primes.clone(), Some(w1), l2)
        } else {
            (rec1.split_primes.clone(), Some(w1), l1)
        }
    };
    let mut primes: BTreeSet<u64> = base;
    primes.extend(omega1);
    let omega2 = if primes.len() % 2 == 1 {
        let w2 = (2u64..)
            .filter(|&p| is_prime(p) && !primes.contains(&p) && !used.contains(&p))
            .find(|&p| {
                [l1, l2, other].iter().all(|l| splitting(l, PlaceQ::Finite(p)) == SplittingType::Inert)
            })
            .expect("a prime inert in both exists");
        primes.insert(w2);
        Some(w2)
    } else {
        None
    };
    let recipe = QuaternionAlgebraQ::new(primes.into_iter().map(PlaceQ::Finite))?;
    if !separates(&recipe, &l1, bl1, &l2, bl2) {
        return Err(Error::InternalInconsistency(format!("recipe algebra {recipe} does not separate")));
    }

    // least-discriminant search over indefinite algebras
    let y = x_max.isqrt();
    let mut candidates = squarefree_products(&crate::arith::primes_up_to(y), y);
    candidates.sort_unstable();
    let least = candidates
        .into_iter()
        .filter(|&(_, w)| w % 2 == 0)
        .map(|(q, _)| {
            let ps: Vec<u64> = factorize(q).into_iter().map(|(p, _)| p).collect();
            QuaternionAlgebraQ::from_primes(&ps).expect("even prime set")
        })
        .find(|b| separates(b, &l1, bl1, &l2, bl2))
        .ok_or(Error::NotFoundWithinBound(x_max))?;
    Ok(Some(BrauerDistinction { least, recipe, omega1, omega2 }))
}

/// Two imaginary quadratic fields with the same splitting at every p ≤ m.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LimitPair {
    pub m: u64,
    pub disc1: i64,
    pub disc2: i64,
    /// The two least primes split in the first field and inert in the second.
    pub witnesses: [u64; 2],
}

fn splitting_signature(d: i64, primes: &[u64]) -> Vec<i8> {
    primes.iter().map(|&p| kronecker_symbol(d, p)).collect()
}

pub fn limit_pair(m: u64) -> Result<LimitPair> {
    need(m >= 2, || format!("m must be at least 2, got {m}"))?;
    let primes = crate::arith::primes_up_to(m);
    // (|Δ1|, |Δ2|) minimal: Δ1 = −3 always has partners, so it is the least |Δ1|.
    let negatives = (3i64..).map(|a| -a).filter(|&d| is_fundamental_discriminant(d));
    for d1 in negatives.clone() {
        let sig = splitting_signature(d1, &primes);
        if let Some(d2) = negatives
            .clone()
            .filter(|&d| d != d1 && d.abs() > d1.abs())
            .take(10_000_000)
            .find(|&d| splitting_signature(d, &primes) == sig)
        {
            let mut w = (2u64..)
                .filter(|&p| is_prime(p))
                .filter(|&p| kronecker_symbol(d1, p) == 1 && kronecker_symbol(d2, p) == -1);
            let witnesses = [w.next().expect("witness"), w.next().expect("witness")];
            return Ok(LimitPair { m, disc1: d1, disc2: d2, witnesses });
        }
    }
    unreachable!("the search over negative discriminants is unbounded")
}

/// Algebras B_j with Ram(B_j) = Ram(B) ∪ {p₁, p_{j+1}}, the p_i ascending
/// primes inert in every Δ_i and outside Ram(B).
pub fn length_preserving_family(
    b: &QuaternionAlgebraQ,
    fields: &[QuadraticField],
    count: usize,
) -> Result<Vec<QuaternionAlgebraQ>> {
    for l in fields {
        if !embeds(l, b) {
            return Err(Error::Domain(format!("{l} does not embed in the algebra ramified at {b}")));
        }
    }
    let discs: Vec<i64> = fields.iter().map(|l| l.disc()).collect();
    for t in nonempty_subsets(discs.len()) {
        let sub: Vec<i64> = t.iter().map(|&i| discs[i]).collect();
        if product_character(&sub).is_none() && t.len() % 2 == 1 {
            return Err(Error::NoCommonInertPrimes);
        }
    }
    let ram: BTreeSet<u64> = b.finite_primes().collect();
    let inert: Vec<u64> = (2u64..)
        .filter(|&p| is_prime(p) && !ram.contains(&p))
        .filter(|&p| discs.iter().all(|&d| kronecker_symbol(d, p) == -1))
        .take(count + 1)
        .collect();
    let out: Vec<QuaternionAlgebraQ> = (1..=count)
        .map(|j| {
            let places = b.ram().iter().copied().chain([PlaceQ::Finite(inert[0]), PlaceQ::Finite(inert[j])]);
            QuaternionAlgebraQ::new(places)
        })
        .collect::<Result<_>>()?;
    for bj in &out {
        if !fields.iter().all(|l| embeds(l, bj)) {
            return Err(Error::InternalInconsistency(format!("{bj} lost a subfield")));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairEntry {
    pub pair: [QuaternionAlgebraQ; 2],
    pub minimal_delta: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RigidityReport {
    pub x: u64,
    pub delta_max: u64,
    pub algebras: usize,
    pub entries: Vec<PairEntry>,
    pub max_minimal_delta: u64,
    pub histogram: BTreeMap<u64, u64>,
    pub bound: BoundReport,
}

/// All quaternion algebras over ℚ with |disc| ≤ x, by reduced discriminant.
pub fn quaternion_algebras_up_to(x: u64) -> Vec<QuaternionAlgebraQ> {
    let y = x.isqrt();
    let mut qs = squarefree_products(&crate::arith::primes_up_to(y), y);
    qs.sort_unstable();
    qs.into_iter()
        .map(|(q, _)| {
            let ps: Vec<u64> = factorize(q).into_iter().map(|(p, _)| p).collect();
            QuaternionAlgebraQ::from_primes(&ps).expect("prime set")
        })
        .collect()
}

/// Separates every pair of non-isomorphic algebras with |disc| ≤ x.
/// With `not_totally_complex`, pairs of indefinite algebras use real fields only.
pub fn rigidity_scan(x: u64, delta_max: u64, not_totally_complex: bool) -> Result<RigidityReport> {
    need(x >= 4, || format!("X must be at least 4, got {x}"))?;
    let algebras = quaternion_algebras_up_to(x);
    let pairs: Vec<(usize, usize)> =
        (0..algebras.len()).flat_map(|i| (i + 1..algebras.len()).map(move |j| (i, j))).collect();
    let entries: Vec<PairEntry> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (a, b) = (&algebras[i], &algebras[j]);
            let real_only = not_totally_complex && a.is_indefinite() && b.is_indefinite();
            let d = distinguish_filtered(a, b, delta_max, real_only)?
                .ok_or_else(|| Error::InternalInconsistency(format!("{a} and {b} reported isomorphic")))?;
            Ok(PairEntry { pair: [a.clone(), b.clone()], minimal_delta: d })
        })
        .collect::<Result<_>>()?;
    let mut histogram = BTreeMap::new();
    for e in &entries {
        *histogram.entry(e.minimal_delta.unsigned_abs()).or_insert(0) += 1;
    }
    let max_minimal_delta = histogram.keys().next_back().copied().unwrap_or(0);
    let bound = recognizing_bound(1, 1, x as f64)?;
    if max_minimal_delta > 0 && !Magnitude::from_ln((max_minimal_delta as f64).ln()).le(&bound.value) {
        return Err(Error::InvariantViolation(format!(
            "minimal distinguishing |Δ| = {max_minimal_delta} exceeds the recognizing bound"
        )));
    }
    Ok(RigidityReport { x, delta_max, algebras: algebras.len(), entries, max_minimal_delta, histogram, bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brauer::iso;

    fn q(s: &str) -> QuaternionAlgebraQ {
        s.parse().unwrap()
    }

    fn field(d: i64) -> QuadraticField {
        make_field(d).unwrap()
    }

    #[test]
    fn recognizing_examples() {
        let r = recognizing_bound(1, 1, 4.0).unwrap();
        let l4 = 4f64.ln();
        let want = 64f64.log10() + 2.0 * (84.0 / l4.powi(3) + 4.0) / std::f64::consts::LN_10;
        assert!((r.value.log10 - want).abs() < 1e-12);
        assert!((r.value.log10 - 32.67).abs() < 0.01);
        assert!(recognizing_bound(2, 5, 10.0).unwrap().value.log10 > 0.0);
        assert!(recognizing_bound(1, 1, 2.0).is_err());
    }

    #[test]
    fn recognizing_monotone_past_the_dip() {
        let vals: Vec<f64> = (9..200).map(|x| recognizing_bound(1, 1, x as f64).unwrap().value.log10).collect();
        assert!(vals.windows(2).all(|w| w[0] < w[1]));
        // 21x/log³x dominates for small x, so the bound dips before it grows
        let at4 = recognizing_bound(1, 1, 4.0).unwrap().value.log10;
        let at5 = recognizing_bound(1, 1, 5.0).unwrap().value.log10;
        assert!(at5 < at4);
    }

    #[test]
    fn gw_examples() {
        let r = grunwald_wang_conductor_bound(1, 4.0, 10.0).unwrap();
        assert!((r.value.value().unwrap() - 5_644_800.0).abs() < 1e-4);
        let r100 = grunwald_wang_conductor_bound(1, 4.0, 100.0).unwrap();
        let want = (32f64.ln() + 4f64.ln() + 2.0 * chebyshev_theta(100.0)) / std::f64::consts::LN_10;
        assert!((r100.value.log10 - want).abs() < 1e-12);
        let vals: Vec<f64> = (3..300).map(|x| grunwald_wang_conductor_bound(1, 4.0, x as f64).unwrap().value.log10).collect();
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn chlr_examples() {
        let e = std::f64::consts::E;
        let r = chlr_length_bound(e, 3, 1.0, 1.0, 1.0).unwrap();
        assert!((r.value.value().unwrap() - e).abs() < 1e-12);
        let r2 = chlr_length_bound(e, 2, 1.0, 1.0, 1.0).unwrap();
        assert!(r2.value.value().is_none());
        assert!((r2.value.log10 - 130f64.exp() / std::f64::consts::LN_10).abs() / r2.value.log10 < 1e-12);
        assert!(chlr_length_bound(1.0, 3, 1.0, 1.0, 1.0).is_err());
        for dim in [2, 3] {
            let grid: Vec<Magnitude> = (0..60)
                .map(|i| chlr_length_bound(e * (1.0 + i as f64 * 0.5), dim, 1.0, 1.0, 1.0).unwrap().value)
                .collect();
            assert!(grid.windows(2).all(|w| w[0].le(&w[1])), "dim {dim}");
        }
    }

    #[test]
    fn mcreid_and_brauer_examples() {
        assert_eq!(mcreid_area_bound(0.0, 1.0).unwrap().value.value().unwrap(), 1.0);
        let b = brauer_rigidity_bound(1.0, 1.0, 25.0, 25.0).unwrap().value.value().unwrap();
        let want = (2.0 * 625f64.ln()).powi(4) * 625.0;
        assert!((b - want).abs() / want < 1e-12);
        assert!((b - 1.717e7).abs() < 1e4);
        let a = brauer_rigidity_bound(1.0, 1.0, 25.0, 36.0).unwrap().value;
        assert!(brauer_rigidity_bound(1.0, 1.0, 25.0, 25.0).unwrap().value.le(&a));
        let grid: Vec<f64> = (1..50).map(|v| mcreid_area_bound(v as f64, 0.5).unwrap().value.log10).collect();
        assert!(grid.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn theta_bound_small_range() {
        let r = theta_bound_check(100_000).unwrap();
        assert_eq!(r.violations, 0);
        assert!(r.max_ratio < 1.0);
    }

    #[test]
    fn distinguish_examples() {
        assert_eq!(distinguish_quaternions(&q("2,inf"), &q("3,inf"), 100).unwrap(), Some(-7));
        assert_eq!(distinguish_quaternions(&q("2,inf"), &q("2,inf"), 100).unwrap(), None);
        assert_eq!(distinguish_quaternions(&q("2,3"), &q("2,inf"), 100).unwrap(), Some(5));
        assert_eq!(distinguish_quaternions(&q("2,inf"), &q("3,inf"), 5), Err(Error::NotFoundWithinBound(5)));
    }

    #[test]
    fn distinguish_iff_not_isomorphic() {
        let algebras = quaternion_algebras_up_to(2000);
        for a in &algebras {
            for b in &algebras {
                let d = distinguish_quaternions(a, b, 100_000).unwrap();
                assert_eq!(d.is_none(), iso(&a.to_csa(), &b.to_csa()).unwrap());
                if let Some(d) = d {
                    let l = field(d);
                    assert_ne!(embeds(&l, a), embeds(&l, b));
                }
            }
        }
    }

    #[test]
    fn brauer_pair_examples() {
        let (l1, l2) = (field(-3), field(-51));
        let (b1, b2) = (QuaternionAlgebraL::split(l1), QuaternionAlgebraL::split(l2));
        let d = distinguish_brauer_pairs(&b1, &b2, 10_000).unwrap().unwrap();
        assert_eq!(d.omega1, Some(5));
        assert_eq!(d.recipe, q("2,5"));
        assert_eq!(d.least, q("2,5"));
        for b in [&d.least, &d.recipe] {
            assert_ne!(is_restriction(b, &l1, &b1), is_restriction(b, &l2, &b2));
        }
        assert_eq!(distinguish_brauer_pairs(&b1, &b1, 10_000).unwrap(), None);
        let gi = field(-4);
        let r = distinguish_brauer_pairs(
            &QuaternionAlgebraL::split(gi),
            &QuaternionAlgebraL::parse(gi, "5.1,5.2").unwrap(),
            10_000,
        )
        .unwrap()
        .unwrap();
        assert!(r.least.is_split());
        assert!(distinguish_brauer_pairs(&b1, &QuaternionAlgebraL::parse(field(-4), "5.1,13.1").unwrap(), 100).is_err());
    }

    #[test]
    fn brauer_pairs_separate_on_a_grid() {
        let specs = [(-3i64, ""), (-4, ""), (-4, "5.1,5.2"), (-7, "2.1,2.2"), (-8, "3.1,3.2"), (-15, ""), (-20, "3.1,3.2")];
        for &(d1, r1) in &specs {
            for &(d2, r2) in &specs {
                let b1 = QuaternionAlgebraL::parse(field(d1), r1).unwrap();
                let b2 = QuaternionAlgebraL::parse(field(d2), r2).unwrap();
                match distinguish_brauer_pairs(&b1, &b2, 1_000_000).unwrap() {
                    None => assert_eq!((d1, r1), (d2, r2)),
                    Some(s) => {
                        assert!(separates(&s.least, b1.field(), &b1, b2.field(), &b2));
                        assert!(separates(&s.recipe, b1.field(), &b1, b2.field(), &b2));
                        assert!(s.least.disc() <= s.recipe.disc());
                    }
                }
            }
        }
    }

    #[test]
    fn limit_pair_examples() {
        let p3 = limit_pair(3).unwrap();
        assert_eq!((p3.disc1, p3.disc2), (-3, -51));
        assert_eq!(p3.witnesses[0], 7);
        let p2 = limit_pair(2).unwrap();
        assert_eq!((p2.disc1, p2.disc2), (-3, -11));
        assert!((p2.disc1.abs(), p2.disc2.abs()) < (p3.disc1.abs(), p3.disc2.abs()));
        for m in 2..=13 {
            let p = limit_pair(m).unwrap();
            for pr in crate::arith::primes_up_to(m) {
                assert_eq!(kronecker_symbol(p.disc1, pr), kronecker_symbol(p.disc2, pr));
            }
            for w in p.witnesses {
                assert!(w > m);
                assert_eq!((kronecker_symbol(p.disc1, w), kronecker_symbol(p.disc2, w)), (1, -1));
            }
        }
        assert!(limit_pair(1).is_err());
    }

    #[test]
    fn family_examples() {
        let fam = length_preserving_family(&q("2,3"), &[field(5)], 2).unwrap();
        assert_eq!(fam, vec![q("2,3,7,13"), q("2,3,7,17")]);
        let fam = length_preserving_family(&q("2,3"), &[field(5), field(8)], 4).unwrap();
        let set: BTreeSet<_> = fam.iter().collect();
        assert_eq!(set.len(), 4);
        for b in &fam {
            assert!(embeds(&field(5), b) && embeds(&field(8), b));
            assert!(q("2,3").ram().is_subset(b.ram()) && b.ram().len() == 4);
        }
        assert!(length_preserving_family(&q("2,3"), &[field(-7)], 1).is_err());
        assert_eq!(
            length_preserving_family(&QuaternionAlgebraQ::split(), &[field(-4), field(8), field(-8)], 1),
            Err(Error::NoCommonInertPrimes)
        );
        assert_eq!(
            length_preserving_family(&QuaternionAlgebraQ::split(), &[field(-4), field(5), field(-20)], 3),
            Err(Error::NoCommonInertPrimes)
        );
    }

    #[test]
    fn scan_examples() {
        let r = rigidity_scan(16, 100, false).unwrap();
        assert_eq!(r.algebras, 3);
        assert_eq!(r.entries.len(), 3);
        assert!(r.max_minimal_delta <= 8);
        let r = rigidity_scan(2000, 100_000, true).unwrap();
        for e in &r.entries {
            if e.pair.iter().all(|b| b.is_indefinite()) {
                assert!(e.minimal_delta > 0);
            }
        }
        assert!(rigidity_scan(3, 100, false).is_err());
    }
}

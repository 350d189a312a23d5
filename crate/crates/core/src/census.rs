//! Exact censuses: central simple algebras by discriminant, quadratic fields
//! embedding in a quaternion algebra, quaternion algebras containing given
//! quadratic fields, and the Dirichlet-series coefficients that reproduce them.

use std::collections::BTreeSet;

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{self, divisors, kronecker_symbol, mobius, primes_up_to, ramanujan_sum};
use crate::brauer::{embeds, QuaternionAlgebraQ};
use crate::error::{Error, Result};
use crate::fields::{make_field, splitting, PlaceQ, QuadraticField, SplittingType};

/// What a [`CountTable`] counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CensusSpec {
    /// Central simple algebras of degree n whose division degree divides m.
    Csa { m: u32, n: u32 },
    /// Division algebras of degree n.
    Division { n: u32 },
    /// Fundamental discriminants Δ with ℚ(√Δ) embedding in B.
    EmbeddingQuads { ram: QuaternionAlgebraQ, not_totally_complex: bool },
    /// Quaternion algebras admitting every listed quadratic field.
    QuatWithSubfields { fields: Vec<i64> },
    /// Fundamental discriminants other than 1.
    FundamentalDiscriminants,
}

/// Exact counts at a list of thresholds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountTable {
    pub spec: CensusSpec,
    pub thresholds: Vec<u64>,
    pub counts: Vec<u64>,
}

impl CountTable {
    pub fn count_at(&self, x: u64) -> Option<u64> {
        self.thresholds.iter().position(|&t| t == x).map(|i| self.counts[i])
    }

    pub fn rows(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.thresholds.iter().copied().zip(self.counts.iter().copied())
    }
}

fn normalize_thresholds(thresholds: &[u64]) -> Result<Vec<u64>> {
    if thresholds.is_empty() {
        return Err(Error::Domain("at least one threshold is required".into()));
    }
    if thresholds.contains(&0) {
        return Err(Error::Domain("thresholds must be at least 1".into()));
    }
    let set: BTreeSet<u64> = thresholds.iter().copied().collect();
    Ok(set.into_iter().collect())
}

/// A multiset of discriminants, queried by prefix counts.
#[derive(Debug, Clone, Default)]
pub struct DiscTally {
    discs: Vec<u128>,
    cumulative: Vec<u64>,
}

impl DiscTally {
    pub fn new(mut entries: Vec<(u128, u64)>) -> Self {
        entries.sort_unstable();
        let mut discs = Vec::with_capacity(entries.len());
        let mut cumulative = Vec::with_capacity(entries.len());
        let mut total = 0u64;
        for (d, w) in entries {
            total += w;
            if discs.last() == Some(&d) {
                *cumulative.last_mut().unwrap() = total;
            } else {
                discs.push(d);
                cumulative.push(total);
            }
        }
        Self { discs, cumulative }
    }

    /// Total weight of entries with discriminant ≤ x.
    pub fn count_le(&self, x: u128) -> u64 {
        let k = self.discs.partition_point(|&d| d <= x);
        if k == 0 {
            0
        } else {
            self.cumulative[k - 1]
        }
    }

    pub fn counts(&self, thresholds: &[u64]) -> Vec<u64> {
        thresholds.iter().map(|&x| self.count_le(x as u128)).collect()
    }
}

/// Largest integer r with r^e ≤ x.
fn iroot(x: u128, e: u32) -> u64 {
    if e == 1 {
        return x.min(u64::MAX as u128) as u64;
    }
    let mut r = (x as f64).powf(1.0 / e as f64) as u64;
    while r > 0 && checked_pow(r, e).is_none_or(|v| v > x) {
        r -= 1;
    }
    while checked_pow(r + 1, e).is_some_and(|v| v <= x) {
        r += 1;
    }
    r
}

fn checked_pow(b: u64, e: u32) -> Option<u128> {
    (b as u128).checked_pow(e)
}

/// Local choice at a prime: local index d | M with its exponent in the
/// discriminant and the residues a·(M/d) mod M of the admissible numerators.
#[derive(Debug, Clone)]
struct LocalChoice {
    d: u64,
    exp: u32,
    residues: Vec<usize>,
}

/// Depth-first generation of Hasse data with all local indices dividing M.
struct HasseWalker {
    modulus: usize,
    x: u128,
    primes: Vec<u64>,
    choices: Vec<LocalChoice>,
}

impl HasseWalker {
    fn new(modulus: u32, n: u32, x: u128) -> Self {
        let n2 = (n as u64).pow(2);
        let mut choices: Vec<LocalChoice> = divisors(modulus as u64)
            .into_iter()
            .filter(|&d| d > 1)
            .map(|d| LocalChoice {
                d,
                exp: (n2 * (d - 1) / d) as u32,
                residues: (1..d)
                    .filter(|a| a.gcd(&d) == 1)
                    .map(|a| (a * (modulus as u64 / d)) as usize)
                    .collect(),
            })
            .collect();
        choices.sort_by_key(|c| c.exp);
        let primes = match choices.first() {
            Some(c) => primes_up_to(iroot(x, c.exp)),
            None => Vec::new(),
        };
        Self { modulus: modulus as usize, x, primes, choices }
    }

    fn convolve(&self, dist: &[u64], residues: &[usize]) -> Vec<u64> {
        let m = self.modulus;
        let mut out = vec![0u64; m];
        for (r, &w) in dist.iter().enumerate() {
            if w == 0 {
                continue;
            }
            for &s in residues {
                out[(r + s) % m] += w;
            }
        }
        out
    }

    /// Visits every support set: (disc, lcm of local indices, residue distribution).
    fn walk<F: FnMut(u128, u64, &[u64])>(&self, shard: usize, shards: usize, visit: &mut F) {
        let mut root = vec![0u64; self.modulus];
        root[0] = 1;
        if shard == 0 {
            visit(1, 1, &root);
        }
        for i in (shard..self.primes.len()).step_by(shards) {
            if !self.branch(i, 1, 1, &root, visit) {
                break;
            }
        }
    }

    /// Extends by the prime at index i; false when nothing fits.
    fn branch<F: FnMut(u128, u64, &[u64])>(&self, i: usize, disc: u128, lcm: u64, dist: &[u64], visit: &mut F) -> bool {
        let p = self.primes[i];
        let mut any = false;
        for c in &self.choices {
            let Some(nd) = checked_pow(p, c.exp).and_then(|pe| pe.checked_mul(disc)) else { break };
            if nd > self.x {
                break;
            }
            any = true;
            let nl = lcm.lcm(&c.d);
            let nd_dist = self.convolve(dist, &c.residues);
            visit(nd, nl, &nd_dist);
            for j in i + 1..self.primes.len() {
                if !self.branch(j, nd, nl, &nd_dist, visit) {
                    break;
                }
            }
        }
        any
    }

    fn tally<W>(&self, shards: usize, weight: W) -> DiscTally
    where
        W: Fn(u64, &[u64]) -> u64 + Sync,
    {
        let parts: Vec<Vec<(u128, u64)>> = (0..shards)
            .into_par_iter()
            .map(|s| {
                let mut out = Vec::new();
                self.walk(s, shards, &mut |disc, lcm, dist| {
                    let w = weight(lcm, dist);
                    if w > 0 {
                        out.push((disc, w));
                    }
                });
                out
            })
            .collect();
        DiscTally::new(parts.into_iter().flatten().collect())
    }
}

fn check_m_n(m: u32, n: u32) -> Result<()> {
    if n == 0 || m == 0 || n % m != 0 {
        return Err(Error::Domain(format!("need m | n with m, n ≥ 1, got m={m}, n={n}")));
    }
    Ok(())
}

fn csa_tally(m: u32, n: u32, x: u128, shards: usize) -> DiscTally {
    let walker = HasseWalker::new(m, n, x);
    let half = (m % 2 == 0).then_some(m as usize / 2);
    walker.tally(shards.max(1), move |_, dist| dist[0] + half.map_or(0, |h| dist[h]))
}

/// N_{m,n}(x): CSAs of degree n with every local index dividing m and |disc| ≤ x.
pub fn count_csa(m: u32, n: u32, x: u64) -> Result<u64> {
    Ok(count_csa_table(m, n, &[x], 1)?.counts[0])
}

pub fn count_csa_table(m: u32, n: u32, thresholds: &[u64], shards: usize) -> Result<CountTable> {
    check_m_n(m, n)?;
    let thresholds = normalize_thresholds(thresholds)?;
    let x = *thresholds.last().unwrap() as u128;
    let counts = csa_tally(m, n, x, shards).counts(&thresholds);
    Ok(CountTable { spec: CensusSpec::Csa { m, n }, thresholds, counts })
}

/// N(x): division algebras of degree n with |disc| ≤ x.
pub fn count_division(n: u32, x: u64) -> Result<u64> {
    Ok(count_division_table(n, &[x], 1)?.counts[0])
}

/// Division-algebra counts, computed directly and by inclusion–exclusion
/// over N_{m,n}; the two must agree at every threshold.
pub fn count_division_table(n: u32, thresholds: &[u64], shards: usize) -> Result<CountTable> {
    if n < 2 {
        return Err(Error::Domain(format!("division census needs n ≥ 2, got {n}")));
    }
    let thresholds = normalize_thresholds(thresholds)?;
    let x = *thresholds.last().unwrap() as u128;
    let walker = HasseWalker::new(n, n, x);
    let nn = n as u64;
    let direct = walker
        .tally(shards.max(1), move |lcm, dist| {
            let mut w = if lcm == nn { dist[0] } else { 0 };
            if nn % 2 == 0 && lcm.lcm(&2) == nn {
                w += dist[nn as usize / 2];
            }
            w
        })
        .counts(&thresholds);
    let mut ie = vec![0i128; thresholds.len()];
    for m in divisors(nn) {
        let mu = mobius(nn / m);
        if mu == 0 {
            continue;
        }
        let c = csa_tally(m as u32, n, x, shards).counts(&thresholds);
        for (acc, v) in ie.iter_mut().zip(c) {
            *acc += mu as i128 * v as i128;
        }
    }
    for ((&t, &d), &e) in thresholds.iter().zip(&direct).zip(&ie) {
        if d as i128 != e {
            return Err(Error::InternalInconsistency(format!(
                "division census at x={t}: direct count {d}, inclusion-exclusion {e}"
            )));
        }
    }
    Ok(CountTable { spec: CensusSpec::Division { n }, thresholds, counts: direct })
}

/// Fundamental discriminants Δ ≠ 1 with |Δ| ≤ x, ordered by |Δ| with the
/// negative one first on ties.
pub fn fundamental_discriminants(x: u64) -> Vec<i64> {
    if x < 3 {
        return Vec::new();
    }
    let table = arith::sieve(x).expect("sieve within budget");
    let mut out = Vec::new();
    for a in 3..=x as i64 {
        if table.is_fundamental(-a) {
            out.push(-a);
        }
        if table.is_fundamental(a) {
            out.push(a);
        }
    }
    out
}

pub fn fundamental_discriminant_count(x: u64) -> u64 {
    fundamental_discriminants(x).len() as u64
}

pub fn fundamental_discriminant_table(thresholds: &[u64]) -> Result<CountTable> {
    let thresholds = normalize_thresholds(thresholds)?;
    let abs: Vec<u128> = fundamental_discriminants(*thresholds.last().expect("nonempty"))
        .into_iter()
        .map(|d| d.unsigned_abs() as u128)
        .collect();
    let counts = thresholds.iter().map(|&x| abs.partition_point(|&a| a <= x as u128) as u64).collect();
    Ok(CountTable { spec: CensusSpec::FundamentalDiscriminants, thresholds, counts })
}

pub fn count_embedding_quads(b: &QuaternionAlgebraQ, x: u64, not_totally_complex: bool) -> u64 {
    count_embedding_quads_table(b, &[x.max(1)], not_totally_complex)
        .map(|t| t.counts[0])
        .unwrap_or(0)
}

pub fn count_embedding_quads_table(
    b: &QuaternionAlgebraQ,
    thresholds: &[u64],
    not_totally_complex: bool,
) -> Result<CountTable> {
    let thresholds = normalize_thresholds(thresholds)?;
    let x = *thresholds.last().unwrap();
    let hits: Vec<(u128, u64)> = fundamental_discriminants(x)
        .into_iter()
        .filter(|&d| !not_totally_complex || d > 0)
        .filter(|&d| embeds(&make_field(d).expect("fundamental"), b))
        .map(|d| (d.unsigned_abs() as u128, 1))
        .collect();
    let counts = DiscTally::new(hits).counts(&thresholds);
    Ok(CountTable {
        spec: CensusSpec::EmbeddingQuads { ram: b.clone(), not_totally_complex },
        thresholds,
        counts,
    })
}

/// Parity vector (sign, odd primes) of a discriminant.
fn parity_vector(d: i64) -> (bool, BTreeSet<u64>) {
    let primes = arith::factorize(d.unsigned_abs())
        .into_iter()
        .filter(|&(_, e)| e % 2 == 1)
        .map(|(p, _)| p)
        .collect();
    (d < 0, primes)
}

/// Fundamental discriminant of ∏_{i∈T} Δ_i modulo squares, or None when trivial.
pub fn product_character(discs: &[i64]) -> Option<i64> {
    let mut sign = false;
    let mut primes: BTreeSet<u64> = BTreeSet::new();
    for &d in discs {
        let (s, ps) = parity_vector(d);
        sign ^= s;
        primes = primes.symmetric_difference(&ps).copied().collect();
    }
    if !sign && primes.is_empty() {
        return None;
    }
    let core = primes.iter().product::<u64>() as i64;
    Some(arith::fundamental_discriminant_of(if sign { -core } else { core }))
}

/// Nonempty subsets of indices 0..r as bitmasks.
pub(crate) fn nonempty_subsets(r: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u32..(1 << r)).map(move |mask| (0..r).filter(|i| mask >> i & 1 == 1).collect())
}

/// Checks that the fields generate a compositum of degree 2^r.
pub fn check_independent(fields: &[QuadraticField]) -> Result<()> {
    let discs: Vec<i64> = fields.iter().map(|l| l.disc()).collect();
    for t in nonempty_subsets(discs.len()) {
        let sub: Vec<i64> = t.iter().map(|&i| discs[i]).collect();
        if product_character(&sub).is_none() {
            return Err(Error::DependentDiscriminants);
        }
    }
    Ok(())
}

/// Places of ℚ split in none of the fields: the finite primes up to `limit`
/// and whether the real place qualifies.
pub fn non_split_places(fields: &[QuadraticField], limit: u64) -> (Vec<u64>, bool) {
    let primes = primes_up_to(limit)
        .into_iter()
        .filter(|&p| fields.iter().all(|l| kronecker_symbol(l.disc(), p) != 1))
        .collect();
    let inf = fields.iter().all(|l| !l.is_real());
    (primes, inf)
}

/// Squarefree products q of the given ascending primes with q ≤ y, with ω(q).
pub(crate) fn squarefree_products(primes: &[u64], y: u64) -> Vec<(u64, u32)> {
    fn rec(primes: &[u64], start: usize, q: u64, w: u32, y: u64, out: &mut Vec<(u64, u32)>) {
        out.push((q, w));
        for i in start..primes.len() {
            let Some(nq) = q.checked_mul(primes[i]) else { break };
            if nq > y {
                break;
            }
            rec(primes, i + 1, nq, w + 1, y, out);
        }
    }
    let mut out = Vec::new();
    rec(primes, 0, 1, 0, y, &mut out);
    out
}

pub fn count_quat_with_subfields(fields: &[QuadraticField], x: u64) -> Result<u64> {
    Ok(count_quat_with_subfields_table(fields, &[x])?.counts[0])
}

pub fn count_quat_with_subfields_table(fields: &[QuadraticField], thresholds: &[u64]) -> Result<CountTable> {
    check_independent(fields)?;
    let thresholds = normalize_thresholds(thresholds)?;
    let y = thresholds.last().unwrap().isqrt();
    let (primes, inf) = non_split_places(fields, y);
    let hits: Vec<(u128, u64)> = squarefree_products(&primes, y)
        .into_iter()
        .filter(|&(_, w)| inf || w % 2 == 0)
        .map(|(q, _)| ((q as u128) * (q as u128), 1))
        .collect();
    let counts = DiscTally::new(hits).counts(&thresholds);
    Ok(CountTable {
        spec: CensusSpec::QuatWithSubfields { fields: fields.iter().map(|l| l.disc()).collect() },
        thresholds,
        counts,
    })
}

/// Generating series whose coefficients are checked against a census.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SeriesSpec {
    Csa { m: u32, n: u32 },
    Embed { fields: Vec<i64> },
}

/// Multiplies a coefficient array in place by 1 + Σ c_q·q^{-s} over prime powers q.
fn apply_local_factor(a: &mut [i64], terms: &[(u64, i64)]) {
    let n_max = a.len() - 1;
    for k in (1..=n_max).rev() {
        let mut add = 0i64;
        for &(q, c) in terms {
            if q as usize <= k && k as u64 % q == 0 {
                add += c * a[k / q as usize];
            }
        }
        a[k] += add;
    }
}

/// Coefficients a_N, N ≤ n_max, by multiplying Euler factors exactly.
pub fn dirichlet_coefficients(spec: &SeriesSpec, n_max: u64) -> Result<Vec<u64>> {
    let len = n_max as usize + 1;
    let mut total = vec![0i64; len];
    let divide_by: i64 = match spec {
        SeriesSpec::Csa { m, n } => {
            check_m_n(*m, *n)?;
            let n2 = (*n as u64).pow(2);
            let local: Vec<(u64, u32)> = divisors(*m as u64)
                .into_iter()
                .filter(|&d| d > 1)
                .map(|d| (d, (n2 * (d - 1) / d) as u32))
                .collect();
            for j in 0..*m as i64 {
                let mut a = vec![0i64; len];
                let real = if m % 2 == 0 { 1 + if j % 2 == 0 { 1 } else { -1 } } else { 1 };
                if len > 1 {
                    a[1] = real;
                }
                for p in primes_up_to(n_max) {
                    let terms: Vec<(u64, i64)> = local
                        .iter()
                        .filter_map(|&(d, e)| {
                            checked_pow(p, e)
                                .filter(|&q| q <= n_max as u128)
                                .map(|q| (q as u64, ramanujan_sum(d, j)))
                        })
                        .collect();
                    if terms.is_empty() {
                        continue;
                    }
                    apply_local_factor(&mut a, &terms);
                }
                for (t, v) in total.iter_mut().zip(a) {
                    *t += v;
                }
            }
            *m as i64
        }
        SeriesSpec::Embed { fields } => {
            let fields: Vec<QuadraticField> = fields.iter().map(|&d| make_field(d)).collect::<Result<_>>()?;
            check_independent(&fields)?;
            let (primes, inf) = non_split_places(&fields, n_max.isqrt());
            for sign in [1i64, -1] {
                let mut a = vec![0i64; len];
                let real = if inf { 1 + sign } else { 1 };
                if len > 1 {
                    a[1] = real;
                }
                for &p in &primes {
                    apply_local_factor(&mut a, &[(p * p, sign)]);
                }
                for (t, v) in total.iter_mut().zip(a) {
                    *t += v;
                }
            }
            2
        }
    };
    total
        .into_iter()
        .enumerate()
        .map(|(k, v)| {
            if v % divide_by != 0 || v < 0 {
                Err(Error::InternalInconsistency(format!("coefficient {k} is {v}/{divide_by}")))
            } else {
                Ok((v / divide_by) as u64)
            }
        })
        .collect::<Result<Vec<u64>>>()
        .map(|mut v| {
            if !v.is_empty() {
                v[0] = 0;
            }
            v
        })
}

/// Frequencies of splitting types over fundamental discriminants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplittingDensity {
    pub split: u64,
    pub inert: u64,
    pub ramified: u64,
}

impl SplittingDensity {
    pub fn total(&self) -> u64 {
        self.split + self.inert + self.ramified
    }

    pub fn fractions(&self) -> (f64, f64, f64) {
        let t = self.total() as f64;
        (self.split as f64 / t, self.inert as f64 / t, self.ramified as f64 / t)
    }
}

pub fn splitting_density(v: PlaceQ, x: u64) -> Result<SplittingDensity> {
    if x < 100 {
        return Err(Error::Domain("splitting density needs X ≥ 100".into()));
    }
    if let PlaceQ::Finite(p) = v {
        if !arith::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
    }
    let mut out = SplittingDensity { split: 0, inert: 0, ramified: 0 };
    for d in fundamental_discriminants(x) {
        match splitting(&make_field(d).expect("fundamental"), v) {
            SplittingType::Split => out.split += 1,
            SplittingType::Inert => out.inert += 1,
            SplittingType::Ramified => out.ramified += 1,
        }
    }
    Ok(out)
}

pub fn smallest_inert_prime(l: &QuadraticField) -> u64 {
    (2u64..)
        .filter(|&p| arith::is_prime(p))
        .find(|&p| kronecker_symbol(l.disc(), p) == -1)
        .expect("a non-residue always exists")
}

/// Worst case of log p / log d_L for the least inert prime p.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InertPrimeStats {
    pub fields: u64,
    pub max_ratio: f64,
    pub disc_at_max: i64,
    pub prime_at_max: u64,
}

pub fn inert_prime_statistics(x: u64) -> InertPrimeStats {
    let primes = primes_up_to(10_000);
    let mut out = InertPrimeStats { fields: 0, max_ratio: 0.0, disc_at_max: 0, prime_at_max: 0 };
    for d in fundamental_discriminants(x) {
        let p = primes
            .iter()
            .copied()
            .find(|&p| kronecker_symbol(d, p) == -1)
            .unwrap_or_else(|| smallest_inert_prime(&make_field(d).expect("fundamental")));
        let ratio = (p as f64).ln() / (d.unsigned_abs() as f64).ln();
        out.fields += 1;
        if ratio > out.max_ratio {
            out.max_ratio = ratio;
            out.disc_at_max = d;
            out.prime_at_max = p;
        }
    }
    out
}

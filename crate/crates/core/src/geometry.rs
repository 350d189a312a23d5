//! Traces, lengths and volumes: closed geodesics from real quadratic fields,
//! covolumes of maximal-order groups, and the class and surface censuses.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::arith::{primes_up_to, zeta_k_at_2};
use crate::brauer::{descends, is_restriction, restrict, QuaternionAlgebraL, QuaternionAlgebraQ};
use crate::census::{check_independent, fundamental_discriminants, non_split_places, squarefree_products};
use crate::error::{Error, Result};
use crate::fields::{fundamental_unit, make_field, PlaceQ, QuadraticField};
use crate::numeric::{big_ln, Magnitude};

/// ℓ = 2 arccosh(|t|/2).
pub fn length_from_trace(t: f64) -> Result<f64> {
    if !(t.abs() > 2.0) {
        return Err(Error::NonHyperbolicTrace(t));
    }
    Ok(2.0 * (t.abs() / 2.0).acosh())
}

/// Inverse of [`length_from_trace`], returning the positive trace.
pub fn trace_from_length(length: f64) -> Result<f64> {
    if !(length > 0.0) || !length.is_finite() {
        return Err(Error::Domain(format!("length must be positive, got {length}")));
    }
    Ok(2.0 * (length / 2.0).cosh())
}

/// 2 arccosh(t/2) for an integer trace of any size.
pub fn length_from_big_trace(t: &BigUint) -> Result<f64> {
    if t.bits() < 52 {
        return length_from_trace(t.to_f64().expect("small"));
    }
    // arccosh(t/2) = ln t + ln((1 + √(1 − 4/t²))/2), and the correction is below 1e-30 here
    Ok(2.0 * big_ln(t))
}

/// A closed geodesic attached to a real quadratic field: the norm-one unit
/// ε₁^power and its trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicDatum {
    pub disc: i64,
    #[serde(with = "biguint_string")]
    pub trace: BigUint,
    pub power: u32,
    /// 2·log of the unit, from its coordinates.
    pub length: f64,
    /// Length attached to ±ε₀² with ε₀ the fundamental unit, 4·Reg.
    pub unit_square_length: f64,
}

mod biguint_string {
    use num_bigint::BigUint;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}

impl GeodesicDatum {
    /// Length recomputed from the trace alone.
    pub fn trace_length(&self) -> Result<f64> {
        length_from_big_trace(&self.trace)
    }

    /// The datum of ε₁^k, trace by t_{k+1} = t₁t_k − t_{k−1}.
    pub fn power(&self, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain("power must be at least 1".into()));
        }
        if self.power != 1 {
            return Err(Error::Domain("powers are taken of the primitive datum".into()));
        }
        let (mut prev, mut cur) = (BigUint::from(2u32), self.trace.clone());
        for _ in 1..k {
            let next = &self.trace * &cur - &prev;
            prev = std::mem::replace(&mut cur, next);
        }
        Ok(Self { trace: cur, power: k, length: self.length * k as f64, ..self.clone() })
    }
}

pub fn geodesic_from_field(disc: i64) -> Result<GeodesicDatum> {
    let l = make_field(disc)?;
    let unit = fundamental_unit(&l)?;
    Ok(GeodesicDatum {
        disc,
        trace: unit.t1.clone(),
        power: 1,
        length: 2.0 * unit.norm_one_log(),
        unit_square_length: 4.0 * unit.regulator(),
    })
}

/// Geodesics grouped by rational equivalence of lengths.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalClass {
    pub disc: i64,
    pub members: Vec<usize>,
}

/// Lengths are rationally equivalent exactly when the fields agree; the
/// grouping uses the field data and never compares floating lengths.
pub fn rational_classes(data: &[GeodesicDatum]) -> Vec<RationalClass> {
    let mut by_disc: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (i, g) in data.iter().enumerate() {
        by_disc.entry(g.disc).or_default().push(i);
    }
    by_disc.into_iter().map(|(disc, members)| RationalClass { disc, members }).collect()
}

/// Exact ratio ℓ(a)/ℓ(b) when the two lengths are commensurable.
pub fn length_ratio(a: &GeodesicDatum, b: &GeodesicDatum) -> Option<(u32, u32)> {
    if a.disc != b.disc {
        return None;
    }
    let g = num_integer::gcd(a.power, b.power);
    Some((a.power / g, b.power / g))
}

/// Wide commensurability invariant: base field (1 for ℚ) and ramification.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CommensurabilityClass {
    pub base_disc: i64,
    pub ram: String,
}

impl CommensurabilityClass {
    pub fn over_q(b: &QuaternionAlgebraQ) -> Self {
        Self { base_disc: 1, ram: b.to_string() }
    }

    pub fn over_l(b: &QuaternionAlgebraL) -> Self {
        Self { base_disc: b.field().disc(), ram: b.to_string() }
    }
}

/// Coarea with its a priori upper bound 2π²·|disc|.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coarea {
    pub value: f64,
    pub bound: f64,
}

/// 8π²ζ_k(2)∏(N𝔭 − 1)/(4π²)^{n_k} for a totally real base.
pub fn coarea_from_data(n_k: u32, zeta_k2: f64, ram_norms: &[u64]) -> f64 {
    let prod: f64 = ram_norms.iter().map(|&n| (n - 1) as f64).product();
    8.0 * PI * PI * zeta_k2 * prod / (4.0 * PI * PI).powi(n_k as i32)
}

pub fn coarea_maximal_order(b: &QuaternionAlgebraQ) -> Result<Coarea> {
    if b.is_definite() {
        return Err(Error::DefiniteAlgebra);
    }
    let norms: Vec<u64> = b.finite_primes().collect();
    let value = coarea_from_data(1, zeta_k_at_2(1)?, &norms);
    let disc = big_ln(&b.disc()).exp();
    let bound = 2.0 * PI * PI * disc;
    if value > bound {
        return Err(Error::InvariantViolation(format!("coarea {value} exceeds 2π²|disc| = {bound} for {b}")));
    }
    Ok(Coarea { value, bound })
}

/// d^{3/2}ζ_L(2)∏(N𝔭 − 1)/(4π²) for an imaginary quadratic L.
pub fn covolume_kleinian(b: &QuaternionAlgebraL) -> Result<f64> {
    let l = b.field();
    if l.is_real() {
        return Err(Error::RealField(l.disc()));
    }
    let d = l.d_l() as f64;
    let prod: f64 = b.finite_norms().iter().map(|&n| (n - 1) as f64).product();
    Ok(d.powf(1.5) * zeta_k_at_2(l.disc())? * prod / (4.0 * PI * PI))
}

/// 2π²ζ_k(2)d^{3/2}∏((N𝔭 − 1)/2)/((4π²)^{n_k}[k_B : k]).
pub fn minimal_covolume_cf(d_k: u64, n_k: u32, zeta_k2: f64, ram_norms: &[u64], kb_index: u64) -> Result<f64> {
    if kb_index == 0 {
        return Err(Error::Domain("[k_B : k] must be at least 1".into()));
    }
    let phi: f64 = ram_norms.iter().map(|&n| (n - 1) as f64 / 2.0).product();
    Ok(2.0 * PI * PI * zeta_k2 * (d_k as f64).powf(1.5) * phi
        / ((4.0 * PI * PI).powi(n_k as i32) * kb_index as f64))
}

/// Upper bound for |disc(B)| of an arithmetic group of covolume V:
/// 10^57·V^7 in dimension 3 and (10^93·V^13)^10 in dimension 2.
pub fn disc_bound_from_volume(v: f64, dimension: u32) -> Result<Magnitude> {
    if !(v > 0.0) {
        return Err(Error::Domain(format!("volume must be positive, got {v}")));
    }
    let lv = v.log10();
    let log10 = match dimension {
        3 => 57.0 + 7.0 * lv,
        2 => 10.0 * (93.0 + 13.0 * lv),
        _ => return Err(Error::Domain(format!("dimension must be 2 or 3, got {dimension}"))),
    };
    Ok(Magnitude { log10, log10_log10: None })
}

/// Indefinite algebras over ℚ ramified at an even set of primes drawn from
/// `primes`, with coarea ≤ v; sorted by (coarea, ram).
fn indefinite_with_coarea(primes: &[u64], v: f64, require_ramified: bool) -> Vec<(QuaternionAlgebraQ, f64)> {
    let scale = PI * PI / 3.0;
    let limit = v / scale * (1.0 + 1e-12);
    let mut out = Vec::new();
    fn rec(
        primes: &[u64],
        start: usize,
        chosen: &mut Vec<u64>,
        prod: f64,
        limit: f64,
        out: &mut Vec<Vec<u64>>,
    ) {
        if chosen.len() % 2 == 0 {
            out.push(chosen.clone());
        }
        for i in start..primes.len() {
            let np = prod * (primes[i] - 1) as f64;
            if np > limit {
                break;
            }
            chosen.push(primes[i]);
            rec(primes, i + 1, chosen, np, limit, out);
            chosen.pop();
        }
    }
    if limit < 1.0 {
        return out;
    }
    let mut sets = Vec::new();
    rec(primes, 0, &mut Vec::new(), 1.0, limit, &mut sets);
    for s in sets {
        if require_ramified && s.is_empty() {
            continue;
        }
        let b = QuaternionAlgebraQ::from_primes(&s).expect("even set of primes");
        let area = coarea_maximal_order(&b).expect("indefinite").value;
        out.push((b, area));
    }
    out.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    out
}

fn prime_limit_for_coarea(v: f64) -> u64 {
    // p − 1 ≤ 3V/π² since every other factor p' − 1 is at least 1
    (v * 3.0 / (PI * PI)).max(0.0) as u64 + 2
}

/// Indefinite quaternion algebras over ℚ with maximal-order coarea ≤ V.
pub fn fuchsian_classes(v: f64) -> Result<Vec<(QuaternionAlgebraQ, f64)>> {
    if !(v > 0.0) {
        return Err(Error::Domain(format!("volume must be positive, got {v}")));
    }
    Ok(indefinite_with_coarea(&primes_up_to(prime_limit_for_coarea(v)), v, false))
}

pub fn class_census_fuchsian(v: f64) -> Result<u64> {
    Ok(fuchsian_classes(v)?.len() as u64)
}

/// Result of a geodesic census in an indefinite algebra over ℚ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicCensus {
    pub algebra: QuaternionAlgebraQ,
    pub x: u64,
    pub data: Vec<GeodesicDatum>,
    pub classes: usize,
    pub max_length: f64,
    /// The length bound 2x of the counting theorem over ℚ.
    pub length_bound: f64,
}

/// One geodesic per real field Δ ≤ x that embeds in B.
pub fn geodesic_census(b: &QuaternionAlgebraQ, x: u64) -> Result<GeodesicCensus> {
    if b.is_definite() {
        return Err(Error::DefiniteAlgebra);
    }
    let data: Vec<GeodesicDatum> = fundamental_discriminants(x)
        .into_iter()
        .filter(|&d| d > 0 && crate::brauer::embeds(&make_field(d).expect("fundamental"), b))
        .map(geodesic_from_field)
        .collect::<Result<_>>()?;
    let classes = rational_classes(&data).len();
    let max_length = data.iter().map(|g| g.length).fold(0.0, f64::max);
    Ok(GeodesicCensus { algebra: b.clone(), x, classes, max_length, length_bound: 2.0 * x as f64, data })
}

/// A totally geodesic surface class: the descended algebra B0 over ℚ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceEntry {
    pub b0: QuaternionAlgebraQ,
    pub area: f64,
    /// 2π²|disc(B0)|e^{CV}
    pub ggs_area_bound: Magnitude,
}

fn surface_entry(b0: QuaternionAlgebraQ, v: f64, c: f64) -> Result<SurfaceEntry> {
    let area = coarea_maximal_order(&b0)?.value;
    let ln = (2.0 * PI * PI).ln() + big_ln(&b0.disc()) + c * v;
    Ok(SurfaceEntry { b0, area, ggs_area_bound: Magnitude::from_ln(ln) })
}

/// Indefinite B0 over ℚ with B0 ⊗ L ≅ BL and |disc(B0)| ≤ x, by descent:
/// Ram(B0) is the set of primes under the ramified pairs of BL together with
/// an even-completing set of primes non-split in L.
pub fn surface_census(bl: &QuaternionAlgebraL, x: u64, v: f64, c: f64) -> Result<Vec<SurfaceEntry>> {
    let l = *bl.field();
    if l.is_real() {
        return Err(Error::RealField(l.disc()));
    }
    let Some(rec) = descends(bl) else { return Ok(Vec::new()) };
    let s: Option<u64> = rec.split_primes.iter().try_fold(1u64, |a, &p| a.checked_mul(p));
    let Some(s) = s.filter(|&s| s.checked_mul(s).is_some_and(|s2| s2 <= x)) else { return Ok(Vec::new()) };
    let y = x.isqrt() / s;
    let (others, _) = non_split_places(&[l], y);
    let parity = rec.split_primes.len() % 2;
    let mut found = Vec::new();
    for (q, w) in squarefree_products(&others, y) {
        if (w as usize + parity) % 2 != 0 {
            continue;
        }
        let mut primes: Vec<u64> = rec.split_primes.iter().copied().collect();
        primes.extend(crate::arith::factorize(q).into_iter().map(|(p, _)| p));
        let b0 = QuaternionAlgebraQ::new(primes.into_iter().map(PlaceQ::Finite))?;
        if !is_restriction(&b0, &l, bl) {
            return Err(Error::InternalInconsistency(format!("{b0} does not restrict to {bl}")));
        }
        found.push(((s as u128 * q as u128).pow(2), b0));
    }
    found.sort();
    found.into_iter().map(|(_, b0)| surface_entry(b0, v, c)).collect()
}

/// Independent route: every indefinite B0 with |disc| ≤ x, restricted and compared.
pub fn surface_census_by_restriction(bl: &QuaternionAlgebraL, x: u64) -> Vec<QuaternionAlgebraQ> {
    let l = bl.field();
    let y = x.isqrt();
    let mut out: Vec<(u128, QuaternionAlgebraQ)> = squarefree_products(&primes_up_to(y), y)
        .into_iter()
        .filter(|&(_, w)| w % 2 == 0)
        .filter_map(|(q, _)| {
            let ps: Vec<u64> = crate::arith::factorize(q).into_iter().map(|(p, _)| p).collect();
            let b0 = QuaternionAlgebraQ::from_primes(&ps).ok()?;
            (restrict(&b0, l) == *bl).then(|| ((q as u128).pow(2), b0))
        })
        .collect();
    out.sort();
    out.into_iter().map(|(_, b)| b).collect()
}

/// Main term for the surface count: half the r = 1 constant of L, at
/// x/s² where s is the product of the primes under the ramified pairs.
pub fn surface_prediction(bl: &QuaternionAlgebraL, x: f64, cutoff: u64) -> Result<f64> {
    let rec = descends(bl).ok_or_else(|| Error::Domain(format!("{bl} does not descend")))?;
    let s: f64 = rec.split_primes.iter().map(|&p| p as f64).product();
    let y = x / (s * s);
    if y <= 1.0 {
        return Ok(0.0);
    }
    let k = crate::asymptotics::embed_constant_r1(bl.field(), cutoff)?.value;
    Ok(0.5 * k * y.sqrt() / y.ln().sqrt())
}

/// Indefinite algebras over ℚ with at least one ramified prime, admitting
/// every real field Δ_i, with maximal-order coarea ≤ V.
pub fn class_census_with_lengths(fields: &[QuadraticField], v: f64) -> Result<u64> {
    if let Some(l) = fields.iter().find(|l| !l.is_real()) {
        return Err(Error::ImaginaryField(l.disc()));
    }
    check_independent(fields)?;
    if !(v > 0.0) {
        return Err(Error::Domain(format!("volume must be positive, got {v}")));
    }
    let (primes, _) = non_split_places(fields, prime_limit_for_coarea(v));
    Ok(indefinite_with_coarea(&primes, v, true).len() as u64)
}

//! Quadratic fields over ℚ, their places, units and heights.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{self, is_fundamental_discriminant, kronecker_symbol, PellSolution};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Signature {
    Real,
    Imaginary,
}

/// A quadratic field keyed by its fundamental discriminant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub struct QuadraticField {
    disc: i64,
}

impl QuadraticField {
    pub fn new(disc: i64) -> Result<Self> {
        if disc == 0 || disc == 1 || !is_fundamental_discriminant(disc) {
            return Err(Error::NotFundamental(disc));
        }
        Ok(Self { disc })
    }

    pub fn disc(&self) -> i64 {
        self.disc
    }

    pub fn abs_disc(&self) -> u64 {
        self.disc.unsigned_abs()
    }

    pub fn signature(&self) -> Signature {
        if self.disc > 0 {
            Signature::Real
        } else {
            Signature::Imaginary
        }
    }

    pub fn is_real(&self) -> bool {
        self.disc > 0
    }

    /// Absolute discriminant d_L.
    pub fn d_l(&self) -> u64 {
        self.abs_disc()
    }
}

impl TryFrom<i64> for QuadraticField {
    type Error = Error;
    fn try_from(d: i64) -> Result<Self> {
        Self::new(d)
    }
}

impl From<QuadraticField> for i64 {
    fn from(l: QuadraticField) -> i64 {
        l.disc
    }
}

impl fmt::Display for QuadraticField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(sqrt({}))", self.disc)
    }
}

pub fn make_field(disc: i64) -> Result<QuadraticField> {
    QuadraticField::new(disc)
}

/// A place of ℚ. Finite places sort before the real place.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PlaceQ {
    Finite(u64),
    Infinity,
}

impl PlaceQ {
    /// Norm, with the real place of norm 1.
    pub fn norm(&self) -> u64 {
        match self {
            PlaceQ::Finite(p) => *p,
            PlaceQ::Infinity => 1,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, PlaceQ::Finite(_))
    }
}

impl fmt::Display for PlaceQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlaceQ::Finite(p) => write!(f, "{p}"),
            PlaceQ::Infinity => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SplittingType {
    Split,
    Inert,
    Ramified,
}

/// A place of a quadratic field lying over a place of ℚ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct QuadraticPlace {
    pub base: PlaceQ,
    pub index: u8,
    pub splitting: SplittingType,
    pub norm: u64,
}

impl QuadraticPlace {
    /// Image under the nontrivial Galois automorphism.
    pub fn conjugate(&self) -> Self {
        let mut out = *self;
        if self.splitting == SplittingType::Split {
            out.index = 3 - self.index;
        }
        out
    }

    /// The single complex place of an imaginary field.
    pub fn is_complex(&self) -> bool {
        self.base == PlaceQ::Infinity && self.splitting != SplittingType::Split
    }
}

impl fmt::Display for QuadraticPlace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.splitting == SplittingType::Split {
            write!(f, "{}.{}", self.base, self.index)
        } else {
            write!(f, "{}", self.base)
        }
    }
}

pub fn splitting(l: &QuadraticField, v: PlaceQ) -> SplittingType {
    match v {
        PlaceQ::Infinity => {
            if l.is_real() {
                SplittingType::Split
            } else {
                SplittingType::Ramified
            }
        }
        PlaceQ::Finite(p) => match kronecker_symbol(l.disc(), p) {
            1 => SplittingType::Split,
            0 => SplittingType::Ramified,
            _ => SplittingType::Inert,
        },
    }
}

/// Roots labelling the places with index 1 and 2 over a split odd prime:
/// the two square roots of Δ mod p, smaller first. Over 2 the labels are the
/// roots 0 and 1 of x² − x + (1 − Δ)/4.
pub fn split_labels(l: &QuadraticField, p: u64) -> Option<[u64; 2]> {
    if splitting(l, PlaceQ::Finite(p)) != SplittingType::Split {
        return None;
    }
    if p == 2 {
        return Some([0, 1]);
    }
    let d = l.disc().rem_euclid(p as i64) as u128;
    let pp = p as u128;
    let r = (0..=pp / 2).find(|&r| r * r % pp == d)?;
    Some([r as u64, (pp - r) as u64])
}

pub fn places_above(l: &QuadraticField, v: PlaceQ) -> Vec<QuadraticPlace> {
    let s = splitting(l, v);
    let norm = match (v, s) {
        (PlaceQ::Infinity, _) => 1,
        (PlaceQ::Finite(p), SplittingType::Inert) => p * p,
        (PlaceQ::Finite(p), _) => p,
    };
    let place = |index| QuadraticPlace { base: v, index, splitting: s, norm };
    if s == SplittingType::Split {
        vec![place(1), place(2)]
    } else {
        vec![place(1)]
    }
}

/// Fundamental unit data of a real quadratic field.
pub fn fundamental_unit(l: &QuadraticField) -> Result<PellSolution> {
    if !l.is_real() {
        return Err(Error::ImaginaryField(l.disc()));
    }
    arith::pell_fundamental(l.disc())
}

/// Reg_L = log ε₀ with ε₀ the fundamental unit (any norm).
pub fn regulator(l: &QuadraticField) -> Result<f64> {
    Ok(fundamental_unit(l)?.regulator())
}

/// An algebraic integer of degree at most 2, stored by its minimal polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QuadraticInteger {
    Rational(i64),
    /// Root of x² + bx + c.
    Quadratic { b: i64, c: i64 },
}

impl QuadraticInteger {
    pub fn quadratic(b: i64, c: i64) -> Result<Self> {
        let disc = b as i128 * b as i128 - 4 * c as i128;
        if disc >= 0 && (disc as u128).isqrt().pow(2) == disc as u128 {
            return Err(Error::Domain(format!("x^2 + {b}x + {c} is reducible")));
        }
        Ok(Self::Quadratic { b, c })
    }

    /// x + y√d for a non-square d. A zero y gives the rational integer x.
    pub fn from_parts(x: i64, y: i64, d: i64) -> Result<Self> {
        if y == 0 {
            return Ok(Self::Rational(x));
        }
        let b = -2 * x;
        let c = x
            .checked_mul(x)
            .and_then(|x2| d.checked_mul(y).and_then(|dy| dy.checked_mul(y)).and_then(|dy2| x2.checked_sub(dy2)))
            .ok_or_else(|| Error::Domain("coefficients overflow".into()))?;
        Self::quadratic(b, c)
    }

    pub fn degree(&self) -> u32 {
        match self {
            Self::Rational(_) => 1,
            Self::Quadratic { .. } => 2,
        }
    }
}

/// Absolute logarithmic height (1/deg)·log M(minpoly).
pub fn height(alpha: &QuadraticInteger) -> Result<f64> {
    match *alpha {
        QuadraticInteger::Rational(0) => Err(Error::ZeroInput),
        QuadraticInteger::Rational(n) => Ok((n.unsigned_abs() as f64).ln()),
        QuadraticInteger::Quadratic { b, c } => {
            if c == 0 {
                return Err(Error::ZeroInput);
            }
            let (bf, cf) = (b as f64, c as f64);
            let disc = bf * bf - 4.0 * cf;
            if disc < 0.0 {
                // conjugate complex roots of modulus √c
                return Ok(0.5 * cf.max(1.0).ln());
            }
            let sq = disc.sqrt();
            let r1 = if b >= 0 { (-bf - sq) / 2.0 } else { (-bf + sq) / 2.0 };
            let r2 = cf / r1;
            let log_m = r1.abs().max(1.0).ln() + r2.abs().max(1.0).ln();
            Ok(log_m / 2.0)
        }
    }
}

/// B(Ω) = ∏_σ (|σ(1)| + |σ(ω)|) for the integral basis {1, ω},
/// ω = (σ₀ + √Δ)/2 with σ₀ = Δ mod 2.
pub fn basis_bound_b(l: &QuadraticField) -> f64 {
    let d = l.disc() as f64;
    let s0 = l.disc().rem_euclid(2) as f64;
    if l.is_real() {
        let w1 = ((s0 + d.sqrt()) / 2.0).abs();
        let w2 = ((s0 - d.sqrt()) / 2.0).abs();
        (1.0 + w1) * (1.0 + w2)
    } else {
        let w = ((s0 * s0 + d.abs()) / 4.0).sqrt();
        (1.0 + w) * (1.0 + w)
    }
}

//! Central simple algebras as Hasse-invariant data.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::is_prime;
use crate::error::{Error, Result};
use crate::fields::{places_above, splitting, PlaceQ, QuadraticField, QuadraticPlace, SplittingType};

/// A local invariant a/m in ℚ/ℤ, stored in (0, 1).
pub type Invariant = Ratio<i64>;

fn reduce_mod_one(r: Invariant) -> Invariant {
    let (n, d) = (*r.numer(), *r.denom());
    Ratio::new(n.rem_euclid(d), d)
}

fn check_place(v: PlaceQ) -> Result<()> {
    match v {
        PlaceQ::Finite(p) if !is_prime(p) => Err(Error::NotPrime(p)),
        _ => Ok(()),
    }
}

/// A central simple algebra over ℚ given by its degree and Hasse invariants.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CentralSimpleAlgebraQ {
    degree: u32,
    invariants: BTreeMap<PlaceQ, Invariant>,
}

impl CentralSimpleAlgebraQ {
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn invariants(&self) -> &BTreeMap<PlaceQ, Invariant> {
        &self.invariants
    }

    /// Degree d of the underlying division algebra.
    pub fn division_degree(&self) -> u32 {
        lcm_of_denominators(&self.invariants)
    }

    pub fn is_division(&self) -> bool {
        self.division_degree() == self.degree
    }

    pub fn brauer_class(&self) -> BrauerClass {
        BrauerClass { invariants: self.invariants.clone() }
    }
}

fn lcm_of_denominators(inv: &BTreeMap<PlaceQ, Invariant>) -> u32 {
    inv.values().fold(1i64, |acc, r| acc.lcm(r.denom())) as u32
}

/// Builds a CSA of degree n from (place, invariant) pairs.
pub fn make_csa<I>(n: u32, assignments: I) -> Result<CentralSimpleAlgebraQ>
where
    I: IntoIterator<Item = (PlaceQ, Invariant)>,
{
    if n == 0 {
        return Err(Error::Domain("degree must be at least 1".into()));
    }
    let mut invariants = BTreeMap::new();
    let mut sum = Invariant::zero();
    for (v, a) in assignments {
        check_place(v)?;
        if a <= Invariant::zero() || a >= Invariant::one() {
            return Err(Error::InvalidInvariant(a.to_string()));
        }
        if v == PlaceQ::Infinity && a != Ratio::new(1, 2) {
            return Err(Error::BadRealInvariant);
        }
        if (n as i64) % a.denom() != 0 {
            return Err(Error::MNotDividingN { m: *a.denom(), n });
        }
        if invariants.insert(v, a).is_some() {
            return Err(Error::DuplicatePlace(v.to_string()));
        }
        sum += a;
    }
    if !sum.is_integer() {
        return Err(Error::InvariantSumNotIntegral);
    }
    Ok(CentralSimpleAlgebraQ { degree: n, invariants })
}

/// |disc(A)| = ∏_{finite p} p^{n²(1 − 1/m_p)}.
pub fn disc_norm(a: &CentralSimpleAlgebraQ) -> BigUint {
    let n2 = (a.degree as u64).pow(2);
    a.invariants
        .iter()
        .filter_map(|(v, r)| match v {
            PlaceQ::Finite(p) => {
                let m = *r.denom() as u64;
                Some(BigUint::from(*p).pow((n2 * (m - 1) / m) as u32))
            }
            PlaceQ::Infinity => None,
        })
        .product()
}

/// Brauer class data: an invariant map with zeros dropped.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BrauerClass {
    pub invariants: BTreeMap<PlaceQ, Invariant>,
}

impl BrauerClass {
    pub fn division_degree(&self) -> u32 {
        lcm_of_denominators(&self.invariants)
    }

    pub fn is_trivial(&self) -> bool {
        self.invariants.is_empty()
    }
}

pub fn opposite(a: &CentralSimpleAlgebraQ) -> CentralSimpleAlgebraQ {
    let invariants = a
        .invariants
        .iter()
        .map(|(&v, &r)| (v, reduce_mod_one(-r)))
        .collect();
    CentralSimpleAlgebraQ { degree: a.degree, invariants }
}

pub fn tensor_class(a1: &CentralSimpleAlgebraQ, a2: &CentralSimpleAlgebraQ) -> BrauerClass {
    let mut invariants = a1.invariants.clone();
    for (&v, &r) in &a2.invariants {
        let e = invariants.entry(v).or_insert_with(Invariant::zero);
        *e = reduce_mod_one(*e + r);
    }
    invariants.retain(|_, r| !r.is_zero());
    BrauerClass { invariants }
}

/// Isomorphism of CSAs of equal degree: equality of Hasse invariants.
pub fn iso(a1: &CentralSimpleAlgebraQ, a2: &CentralSimpleAlgebraQ) -> Result<bool> {
    if a1.degree != a2.degree {
        return Err(Error::DegreeMismatch(a1.degree, a2.degree));
    }
    Ok(a1.invariants == a2.invariants)
}

/// A quaternion algebra over ℚ, identified with its ramification set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct QuaternionAlgebraQ {
    ram: BTreeSet<PlaceQ>,
}

impl QuaternionAlgebraQ {
    pub fn new<I: IntoIterator<Item = PlaceQ>>(places: I) -> Result<Self> {
        let mut ram = BTreeSet::new();
        for v in places {
            check_place(v)?;
            if !ram.insert(v) {
                return Err(Error::DuplicatePlace(v.to_string()));
            }
        }
        if ram.len() % 2 == 1 {
            return Err(Error::OddRamification(ram.len()));
        }
        Ok(Self { ram })
    }

    /// The unique algebra ramified at the primes of a squarefree q, plus ∞ when needed.
    pub fn from_primes(primes: &[u64]) -> Result<Self> {
        let mut places: Vec<PlaceQ> = primes.iter().map(|&p| PlaceQ::Finite(p)).collect();
        if places.len() % 2 == 1 {
            places.push(PlaceQ::Infinity);
        }
        Self::new(places)
    }

    pub fn split() -> Self {
        Self { ram: BTreeSet::new() }
    }

    pub fn ram(&self) -> &BTreeSet<PlaceQ> {
        &self.ram
    }

    pub fn finite_primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.ram.iter().filter_map(|v| match v {
            PlaceQ::Finite(p) => Some(*p),
            PlaceQ::Infinity => None,
        })
    }

    pub fn is_split(&self) -> bool {
        self.ram.is_empty()
    }

    pub fn is_definite(&self) -> bool {
        self.ram.contains(&PlaceQ::Infinity)
    }

    pub fn is_indefinite(&self) -> bool {
        !self.is_definite()
    }

    /// Product of the finite ramified primes.
    pub fn reduced_disc(&self) -> BigUint {
        self.finite_primes().map(BigUint::from).product()
    }

    /// Reduced discriminant when it fits in a u128.
    pub fn reduced_disc_u128(&self) -> Option<u128> {
        self.finite_primes().try_fold(1u128, |acc, p| acc.checked_mul(p as u128))
    }

    /// |disc| = (reduced discriminant)².
    pub fn disc(&self) -> BigUint {
        let r = self.reduced_disc();
        &r * &r
    }

    pub fn to_csa(&self) -> CentralSimpleAlgebraQ {
        let invariants = self.ram.iter().map(|&v| (v, Ratio::new(1, 2))).collect();
        CentralSimpleAlgebraQ { degree: 2, invariants }
    }
}

impl fmt::Display for QuaternionAlgebraQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.ram.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

fn tokens(s: &str) -> Vec<&str> {
    let s = s.trim();
    if s.is_empty() || s == "none" {
        return Vec::new();
    }
    s.split(',').map(str::trim).collect()
}

fn parse_err(input: &str, reason: impl Into<String>) -> Error {
    Error::Parse { input: input.to_string(), reason: reason.into() }
}

/// Parses a ramification set of ℚ such as `2,inf` (empty string or `none` for ∅).
pub fn parse_places_q(s: &str) -> Result<Vec<PlaceQ>> {
    tokens(s)
        .into_iter()
        .map(|tok| {
            if tok == "inf" {
                Ok(PlaceQ::Infinity)
            } else {
                tok.parse::<u64>()
                    .map(PlaceQ::Finite)
                    .map_err(|_| parse_err(tok, "expected a prime or `inf`"))
            }
        })
        .collect()
}

impl FromStr for QuaternionAlgebraQ {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::new(parse_places_q(s)?)
    }
}

impl TryFrom<String> for QuaternionAlgebraQ {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<QuaternionAlgebraQ> for String {
    fn from(b: QuaternionAlgebraQ) -> String {
        b.to_string()
    }
}

/// A quaternion algebra over a quadratic field.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuaternionAlgebraL {
    field: QuadraticField,
    ram: BTreeSet<QuadraticPlace>,
}

impl QuaternionAlgebraL {
    pub fn new<I: IntoIterator<Item = QuadraticPlace>>(field: QuadraticField, places: I) -> Result<Self> {
        let mut ram = BTreeSet::new();
        for v in places {
            if v.is_complex() {
                return Err(Error::ComplexPlaceRamified);
            }
            check_place(v.base)?;
            if !places_above(&field, v.base).contains(&v) {
                return Err(Error::InvalidPlace { place: v.to_string(), disc: field.disc() });
            }
            if !ram.insert(v) {
                return Err(Error::DuplicatePlace(v.to_string()));
            }
        }
        if ram.len() % 2 == 1 {
            return Err(Error::OddRamification(ram.len()));
        }
        Ok(Self { field, ram })
    }

    /// Parses the text grammar: `p`, `p.1`, `p.2`, `inf.1`, `inf.2`.
    pub fn parse(field: QuadraticField, s: &str) -> Result<Self> {
        let mut places = Vec::new();
        for tok in tokens(s) {
            let (base, index) = match tok.split_once('.') {
                Some((b, i)) => {
                    let i: u8 = i.parse().map_err(|_| parse_err(tok, "bad place index"))?;
                    if !(1..=2).contains(&i) {
                        return Err(parse_err(tok, "place index must be 1 or 2"));
                    }
                    (b, Some(i))
                }
                None => (tok, None),
            };
            let base = if base == "inf" {
                PlaceQ::Infinity
            } else {
                PlaceQ::Finite(base.parse().map_err(|_| parse_err(tok, "expected a prime or `inf`"))?)
            };
            check_place(base)?;
            let above = places_above(&field, base);
            let place = match (above.len(), index) {
                (2, Some(i)) => above[i as usize - 1],
                (1, None) => above[0],
                (2, None) => return Err(parse_err(tok, "split place needs an index .1 or .2")),
                _ => return Err(parse_err(tok, "non-split place takes no index")),
            };
            places.push(place);
        }
        Self::new(field, places)
    }

    pub fn split(field: QuadraticField) -> Self {
        Self { field, ram: BTreeSet::new() }
    }

    pub fn field(&self) -> &QuadraticField {
        &self.field
    }

    pub fn ram(&self) -> &BTreeSet<QuadraticPlace> {
        &self.ram
    }

    pub fn is_split(&self) -> bool {
        self.ram.is_empty()
    }

    /// Norms of the finite ramified places.
    pub fn finite_norms(&self) -> Vec<u64> {
        self.ram.iter().filter(|v| v.base.is_finite()).map(|v| v.norm).collect()
    }
}

impl fmt::Display for QuaternionAlgebraL {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.ram.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// B ⊗ L: local invariants multiply by the local degree.
pub fn restrict(b: &QuaternionAlgebraQ, l: &QuadraticField) -> QuaternionAlgebraL {
    let ram = b
        .ram
        .iter()
        .filter(|&&v| splitting(l, v) == SplittingType::Split)
        .flat_map(|&v| places_above(l, v))
        .collect();
    QuaternionAlgebraL { field: *l, ram }
}

/// L embeds in B iff no ramified place of B splits in L.
pub fn embeds(l: &QuadraticField, b: &QuaternionAlgebraQ) -> bool {
    b.ram.iter().all(|&v| splitting(l, v) != SplittingType::Split)
}

/// Descent data: the primes p_j whose two places over them ramify, and
/// whether both real places ramify.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescentRecord {
    pub split_primes: BTreeSet<u64>,
    pub real_places: bool,
}

/// Some(record) iff the ramification of BL is a union of full conjugate pairs.
pub fn descends(bl: &QuaternionAlgebraL) -> Option<DescentRecord> {
    let mut by_base: BTreeMap<PlaceQ, Vec<&QuadraticPlace>> = BTreeMap::new();
    for v in &bl.ram {
        by_base.entry(v.base).or_default().push(v);
    }
    let mut split_primes = BTreeSet::new();
    let mut real_places = false;
    for (base, vs) in by_base {
        if vs.len() != 2 || vs.iter().any(|v| v.splitting != SplittingType::Split) {
            return None;
        }
        match base {
            PlaceQ::Finite(p) => {
                split_primes.insert(p);
            }
            PlaceQ::Infinity => real_places = true,
        }
    }
    Some(DescentRecord { split_primes, real_places })
}

pub fn is_restriction(b0: &QuaternionAlgebraQ, l: &QuadraticField, bl: &QuaternionAlgebraL) -> bool {
    bl.field == *l && restrict(b0, l).ram == bl.ram
}

/// The descent criterion read directly: Ram_f(B0) contains the split pairs
/// of BL and every other finite prime of Ram(B0) is inert or ramified in L.
/// The real place behaves the same way for real L and is invisible otherwise.
pub fn restriction_criterion(b0: &QuaternionAlgebraQ, l: &QuadraticField, bl: &QuaternionAlgebraL) -> bool {
    if bl.field != *l {
        return false;
    }
    let Some(rec) = descends(bl) else { return false };
    let finite: BTreeSet<u64> = b0.finite_primes().collect();
    if !rec.split_primes.is_subset(&finite) {
        return false;
    }
    let others_ok = finite
        .difference(&rec.split_primes)
        .all(|&p| splitting(l, PlaceQ::Finite(p)) != SplittingType::Split);
    let real_ok = if l.is_real() { rec.real_places == b0.is_definite() } else { !rec.real_places };
    others_ok && real_ok
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith;
    use crate::fields::make_field;

    fn q(s: &str) -> QuaternionAlgebraQ {
        s.parse().unwrap()
    }

    fn r(a: i64, b: i64) -> Invariant {
        Ratio::new(a, b)
    }

    #[test]
    fn make_csa_examples() {
        let m2 = make_csa(2, []).unwrap();
        assert_eq!(m2.division_degree(), 1);
        let h = make_csa(2, [(PlaceQ::Finite(2), r(1, 2)), (PlaceQ::Infinity, r(1, 2))]).unwrap();
        assert_eq!(h.division_degree(), 2);
        assert_eq!(make_csa(3, [(PlaceQ::Finite(2), r(1, 3))]), Err(Error::InvariantSumNotIntegral));
        assert!(matches!(
            make_csa(3, [(PlaceQ::Finite(2), r(1, 2)), (PlaceQ::Finite(3), r(1, 2))]),
            Err(Error::MNotDividingN { m: 2, n: 3 })
        ));
        assert_eq!(
            make_csa(4, [(PlaceQ::Infinity, r(1, 4)), (PlaceQ::Finite(2), r(3, 4))]),
            Err(Error::BadRealInvariant)
        );
        assert_eq!(make_csa(2, [(PlaceQ::Finite(4), r(1, 2)), (PlaceQ::Infinity, r(1, 2))]), Err(Error::NotPrime(4)));
    }

    #[test]
    fn disc_norm_examples() {
        assert_eq!(disc_norm(&make_csa(2, []).unwrap()), BigUint::from(1u32));
        assert_eq!(disc_norm(&q("2,inf").to_csa()), BigUint::from(4u32));
        let a = make_csa(3, [(PlaceQ::Finite(2), r(1, 3)), (PlaceQ::Finite(3), r(2, 3))]).unwrap();
        assert_eq!(disc_norm(&a), BigUint::from(46656u32));
    }

    #[test]
    fn opposite_and_tensor() {
        let b = q("2,inf").to_csa();
        assert_eq!(opposite(&b), b);
        let a = make_csa(3, [(PlaceQ::Finite(2), r(1, 3)), (PlaceQ::Finite(3), r(2, 3))]).unwrap();
        let t = tensor_class(&a, &opposite(&a));
        assert!(t.is_trivial());
        assert_eq!(t.division_degree(), 1);
        let op = opposite(&a);
        assert_eq!(op.invariants()[&PlaceQ::Finite(2)], r(2, 3));
        assert_eq!(op.invariants()[&PlaceQ::Finite(3)], r(1, 3));
        assert!(!iso(&a, &op).unwrap());
        assert!(iso(&b, &q("2,inf").to_csa()).unwrap());
        assert!(!iso(&b, &q("3,inf").to_csa()).unwrap());
        assert_eq!(iso(&a, &b), Err(Error::DegreeMismatch(3, 2)));
    }

    #[test]
    fn tensor_of_degree_four_classes() {
        let a = make_csa(4, [(PlaceQ::Finite(2), r(1, 4)), (PlaceQ::Finite(5), r(3, 4))]).unwrap();
        let t = tensor_class(&a, &a);
        assert_eq!(t.invariants[&PlaceQ::Finite(2)], r(1, 2));
        assert_eq!(t.division_degree(), 2);
    }

    #[test]
    fn quaternion_parsing() {
        assert_eq!(q("2,inf").to_string(), "2,inf");
        assert_eq!(q("inf,2"), q("2,inf"));
        assert!(q("").is_split());
        assert_eq!("2".parse::<QuaternionAlgebraQ>(), Err(Error::OddRamification(1)));
        assert!(matches!("2,x".parse::<QuaternionAlgebraQ>(), Err(Error::Parse { .. })));
        assert_eq!("2,2".parse::<QuaternionAlgebraQ>(), Err(Error::DuplicatePlace("2".into())));
        assert_eq!(q("2,3").disc(), BigUint::from(36u32));
        assert!(q("2,inf").is_definite());
    }

    #[test]
    fn l_algebra_parsing() {
        let gi = make_field(-4).unwrap();
        let bl = QuaternionAlgebraL::parse(gi, "5.1,5.2").unwrap();
        assert_eq!(bl.to_string(), "5.1,5.2");
        assert_eq!(bl.finite_norms(), vec![5, 5]);
        assert!(matches!(QuaternionAlgebraL::parse(gi, "5,3"), Err(Error::Parse { .. })));
        assert_eq!(QuaternionAlgebraL::parse(gi, "inf,3"), Err(Error::ComplexPlaceRamified));
        assert_eq!(QuaternionAlgebraL::parse(gi, "3"), Err(Error::OddRamification(1)));
        let r5 = make_field(5).unwrap();
        assert!(QuaternionAlgebraL::parse(r5, "inf.1,inf.2").is_ok());
    }

    #[test]
    fn restrict_examples() {
        let gi = make_field(-4).unwrap();
        assert!(restrict(&q("3,inf"), &gi).is_split());
        assert_eq!(restrict(&q("2,5"), &gi).to_string(), "5.1,5.2");
        let r5 = make_field(5).unwrap();
        assert_eq!(restrict(&q("2,inf"), &r5).to_string(), "inf.1,inf.2");
    }

    #[test]
    fn embeds_examples() {
        assert!(embeds(&make_field(-4).unwrap(), &q("2,inf")));
        assert!(!embeds(&make_field(5).unwrap(), &q("2,inf")));
        assert!(!embeds(&make_field(-7).unwrap(), &q("2,inf")));
    }

    #[test]
    fn descends_examples() {
        let gi = make_field(-4).unwrap();
        let rec = descends(&QuaternionAlgebraL::parse(gi, "5.1,5.2").unwrap()).unwrap();
        assert_eq!(rec.split_primes, BTreeSet::from([5]));
        assert!(descends(&QuaternionAlgebraL::parse(gi, "3,5.1").unwrap()).is_none());
        assert_eq!(descends(&QuaternionAlgebraL::split(gi)).unwrap().split_primes, BTreeSet::new());
    }

    #[test]
    fn is_restriction_examples() {
        let gi = make_field(-4).unwrap();
        let bl = QuaternionAlgebraL::parse(gi, "5.1,5.2").unwrap();
        assert!(is_restriction(&q("2,5"), &gi, &bl));
        assert!(!is_restriction(&q("5,13"), &gi, &bl));
        assert!(is_restriction(&q("5,7"), &gi, &bl));
    }

    fn small_algebras(max_reduced: u64) -> Vec<QuaternionAlgebraQ> {
        (1..=max_reduced)
            .filter(|&d| arith::is_squarefree(d))
            .map(|d| {
                let ps: Vec<u64> = arith::factorize(d).iter().map(|&(p, _)| p).collect();
                QuaternionAlgebraQ::from_primes(&ps).unwrap()
            })
            .collect()
    }

    #[test]
    fn restriction_routes_agree() {
        let algebras = small_algebras(60);
        for d in -120i64..=120 {
            let Ok(l) = make_field(d) else { continue };
            for b in &algebras {
                let bl = restrict(b, &l);
                assert_eq!(embeds(&l, b), bl.is_split());
                assert!(is_restriction(b, &l, &bl));
                assert!(restriction_criterion(b, &l, &bl), "d={d} b={b}");
                for b2 in &algebras {
                    assert_eq!(is_restriction(b2, &l, &bl), restriction_criterion(b2, &l, &bl), "d={d} b={b} b2={b2}");
                }
            }
        }
    }

    #[test]
    fn quaternions_are_self_opposite() {
        for b in small_algebras(200) {
            let a = b.to_csa();
            assert!(iso(&a, &opposite(&a)).unwrap());
        }
    }
}

//! Exact-arithmetic foundation: state spaces, rationals, probability
//! intervals, distributions and utility functions.
//!
//! Every quantity is an arbitrary-precision rational, so comparisons made by
//! the projection and oracle layers are exact.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num::{BigInt, BigRational, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// `n / d` as a rational. Panics when `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses integers (`"7"`, `"-2"`), decimals (`"0.35"`) and fractions
/// (`"3/10"`) exactly.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let err = || Error::ParseRational(text.to_string());
    let s = text.trim();
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| err())?;
        let den: BigInt = den.trim().parse().map_err(|_| err())?;
        if den.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(num, den));
    }
    let (negative, digits) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(err());
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let mantissa: BigInt = format!("{whole}{frac}").parse().map_err(|_| err())?;
    let scale = num::pow(BigInt::from(10), frac.len());
    let value = Rational::new(mantissa, scale);
    Ok(if negative { -value } else { value })
}

/// Canonical text form: `"p/q"` in lowest terms, or `"p"` for integers.
pub fn format_rational(q: &Rational) -> String {
    q.to_string()
}

pub fn to_f64(q: &Rational) -> f64 {
    use num::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct StateId(pub usize);

impl StateId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.0)
    }
}

/// A finite set of states, iterated in canonical (index) order.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateSet(BTreeSet<StateId>);

impl StateSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(s: StateId) -> Self {
        Self(BTreeSet::from([s]))
    }

    /// The whole state space `{s0, .., s(n-1)}`.
    pub fn all(n: usize) -> Self {
        (0..n).map(StateId).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, s: StateId) -> bool {
        self.0.contains(&s)
    }

    pub fn insert(&mut self, s: StateId) -> bool {
        self.0.insert(s)
    }

    pub fn iter(&self) -> impl Iterator<Item = StateId> + '_ {
        self.0.iter().copied()
    }

    pub fn first(&self) -> Option<StateId> {
        self.0.first().copied()
    }

    pub fn union(&self, other: &StateSet) -> StateSet {
        self.0.union(&other.0).copied().collect()
    }

    pub fn intersection(&self, other: &StateSet) -> StateSet {
        self.0.intersection(&other.0).copied().collect()
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_disjoint(&self, other: &StateSet) -> bool {
        self.0.is_disjoint(&other.0)
    }
}

impl FromIterator<StateId> for StateSet {
    fn from_iter<I: IntoIterator<Item = StateId>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl fmt::Display for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, s) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str("}")
    }
}

/// Named states in a fixed order. The order is the canonical order used for
/// serialization and tie-breaking.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateSpace {
    names: Vec<String>,
    index: HashMap<String, StateId>,
}

impl StateSpace {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::StateSpace("state space must be nonempty".into()));
        }
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if index.insert(name.clone(), StateId(i)).is_some() {
                return Err(Error::StateSpace(format!("duplicate state name {name:?}")));
            }
        }
        Ok(Self { names, index })
    }

    /// States named `s0 .. s(n-1)`.
    pub fn anonymous(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| format!("s{i}")))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, s: StateId) -> &str {
        &self.names[s.0]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn id(&self, name: &str) -> Option<StateId> {
        self.index.get(name).copied()
    }

    pub fn ids(&self) -> impl Iterator<Item = StateId> {
        (0..self.names.len()).map(StateId)
    }

    pub fn all(&self) -> StateSet {
        StateSet::all(self.len())
    }
}

/// A closed subinterval `[lo, hi]` of `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interval {
    lo: Rational,
    hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if lo.is_negative() || lo > hi || hi > Rational::one() {
            return Err(Error::InvalidInterval {
                lo: format_rational(&lo),
                hi: format_rational(&hi),
            });
        }
        Ok(Self { lo, hi })
    }

    pub fn point(q: Rational) -> Result<Self> {
        Self::new(q.clone(), q)
    }

    pub fn unit() -> Self {
        Self { lo: Rational::zero(), hi: Rational::one() }
    }

    pub fn zero() -> Self {
        Self { lo: Rational::zero(), hi: Rational::zero() }
    }

    pub fn one() -> Self {
        Self { lo: Rational::one(), hi: Rational::one() }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn is_zero(&self) -> bool {
        self.hi.is_zero()
    }

    pub fn contains(&self, q: &Rational) -> bool {
        &self.lo <= q && q <= &self.hi
    }

    /// `outer ⊇ inner`.
    pub fn subsumes(&self, inner: &Interval) -> bool {
        self.lo <= inner.lo && inner.hi <= self.hi
    }

    /// Endpoint-wise sum, each endpoint clamped into `[0, 1]`.
    pub fn add(&self, other: &Interval) -> Interval {
        let one = Rational::one();
        let lo = (&self.lo + &other.lo).min(one.clone());
        let hi = (&self.hi + &other.hi).min(one);
        Interval { lo, hi }
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        Interval { lo: &self.lo * &other.lo, hi: &self.hi * &other.hi }
    }

    /// Smallest interval containing both.
    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// A probability function over a finite state space, indexed by state.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Distribution {
    mass: Vec<Rational>,
}

impl Distribution {
    pub fn new(mass: Vec<Rational>) -> Result<Self> {
        if mass.is_empty() {
            return Err(Error::InvalidDistribution("empty state space".into()));
        }
        if let Some((i, m)) = mass.iter().enumerate().find(|(_, m)| m.is_negative()) {
            return Err(Error::InvalidDistribution(format!("negative mass {m} on s{i}")));
        }
        let total: Rational = mass.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidDistribution(format!("masses sum to {total}")));
        }
        Ok(Self { mass })
    }

    /// Point mass on `s` over a space of `n` states.
    pub fn point(n: usize, s: StateId) -> Self {
        let mut mass = vec![Rational::zero(); n];
        mass[s.0] = Rational::one();
        Self { mass }
    }

    pub fn uniform(set: &StateSet, n: usize) -> Self {
        let w = ratio(1, set.len() as i64);
        let mut mass = vec![Rational::zero(); n];
        for s in set.iter() {
            mass[s.0] = w.clone();
        }
        Self { mass }
    }

    pub(crate) fn from_raw(mass: Vec<Rational>) -> Self {
        debug_assert!(mass.iter().sum::<Rational>().is_one());
        Self { mass }
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn mass(&self, s: StateId) -> &Rational {
        &self.mass[s.0]
    }

    pub fn masses(&self) -> &[Rational] {
        &self.mass
    }

    pub fn into_masses(self) -> Vec<Rational> {
        self.mass
    }

    pub fn support(&self) -> StateSet {
        self.mass
            .iter()
            .enumerate()
            .filter(|(_, m)| !m.is_zero())
            .map(|(i, _)| StateId(i))
            .collect()
    }

    /// `P(B)`.
    pub fn probability_of(&self, set: &StateSet) -> Rational {
        set.iter().map(|s| &self.mass[s.0]).sum()
    }

    /// The affine operator: `Σ_i q_i · P_i`.
    pub fn mix(weights: &[Rational], dists: &[Distribution]) -> Result<Distribution> {
        if weights.is_empty() || weights.len() != dists.len() {
            return Err(Error::AffineVector(format!(
                "{} weights for {} distributions",
                weights.len(),
                dists.len()
            )));
        }
        check_affine(weights)?;
        let n = dists[0].len();
        if dists.iter().any(|d| d.len() != n) {
            return Err(Error::InvalidDistribution("distributions over different spaces".into()));
        }
        let mut mass = vec![Rational::zero(); n];
        for (q, d) in weights.iter().zip(dists) {
            if q.is_zero() {
                continue;
            }
            for (acc, m) in mass.iter_mut().zip(&d.mass) {
                *acc += q * m;
            }
        }
        Ok(Distribution::from_raw(mass))
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        let mut first = true;
        for (i, m) in self.mass.iter().enumerate() {
            if m.is_zero() {
                continue;
            }
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "s{i}:{m}")?;
        }
        f.write_str("}")
    }
}

pub(crate) fn check_affine(weights: &[Rational]) -> Result<()> {
    if let Some(q) = weights.iter().find(|q| q.is_negative() || **q > Rational::one()) {
        return Err(Error::AffineVector(format!("component {q} outside [0, 1]")));
    }
    let total: Rational = weights.iter().sum();
    if !total.is_one() {
        return Err(Error::AffineVector(format!("components sum to {total}")));
    }
    Ok(())
}

/// `f : Ω → ℚ`, unrestricted in sign.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UtilityFunction {
    values: Vec<Rational>,
}

impl UtilityFunction {
    pub fn new(values: Vec<Rational>) -> Self {
        Self { values }
    }

    pub fn from_integers(values: &[i64]) -> Self {
        Self::new(values.iter().map(|&v| int(v)).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, s: StateId) -> &Rational {
        &self.values[s.0]
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn expectation(&self, p: &Distribution) -> Rational {
        p.masses().iter().zip(&self.values).map(|(m, v)| m * v).sum()
    }
}

/// A closed interval of expected utilities; endpoints may be any rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EuInterval {
    pub lo: Rational,
    pub hi: Rational,
}

impl EuInterval {
    pub fn new(lo: Rational, hi: Rational) -> Option<Self> {
        (lo <= hi).then_some(Self { lo, hi })
    }

    pub fn point(v: Rational) -> Self {
        Self { lo: v.clone(), hi: v }
    }

    pub fn contains(&self, v: &Rational) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn contains_interval(&self, inner: &EuInterval) -> bool {
        self.lo <= inner.lo && inner.hi <= self.hi
    }
}

impl fmt::Display for EuInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn iv(lo: (i64, i64), hi: (i64, i64)) -> Interval {
        Interval::new(ratio(lo.0, lo.1), ratio(hi.0, hi.1)).unwrap()
    }

    #[test]
    fn parses_exact_numbers() {
        assert_eq!(parse_rational("0.3").unwrap(), ratio(3, 10));
        assert_eq!(parse_rational("3/10").unwrap(), ratio(3, 10));
        assert_eq!(parse_rational("-2").unwrap(), int(-2));
        assert_eq!(parse_rational("-0.25").unwrap(), ratio(-1, 4));
        assert_eq!(parse_rational(".5").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational(" 6/4 ").unwrap(), ratio(3, 2));
        for bad in ["", "abc", "1/0", "1.2.3", "-", "1e3"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn interval_add_examples() {
        assert_eq!(iv((1, 10), (2, 10)).add(&iv((3, 10), (4, 10))), iv((4, 10), (6, 10)));
        assert_eq!(Interval::zero().add(&iv((3, 10), (7, 10))), iv((3, 10), (7, 10)));
        assert_eq!(iv((8, 10), (9, 10)).add(&iv((5, 10), (6, 10))), Interval::one());
    }

    #[test]
    fn interval_mul_examples() {
        assert_eq!(iv((1, 2), (1, 2)).mul(&iv((3, 10), (7, 10))), iv((3, 20), (7, 20)));
        let q = iv((1, 5), (3, 7));
        assert_eq!(Interval::one().mul(&q), q);
        assert_eq!(Interval::unit().mul(&iv((2, 10), (4, 10))), iv((0, 1), (4, 10)));
    }

    #[test]
    fn interval_subsumes_examples() {
        assert!(Interval::unit().subsumes(&iv((2, 10), (3, 10))));
        let q = iv((1, 3), (1, 2));
        assert!(q.subsumes(&q));
        assert!(!iv((2, 10), (3, 10)).subsumes(&iv((1, 10), (3, 10))));
    }

    #[test]
    fn rejects_bad_intervals() {
        assert!(Interval::new(ratio(1, 2), ratio(1, 3)).is_err());
        assert!(Interval::new(ratio(-1, 2), ratio(1, 3)).is_err());
        assert!(Interval::new(ratio(1, 2), ratio(4, 3)).is_err());
    }

    #[test]
    fn dist_mix_examples() {
        let a = Distribution::point(2, StateId(0));
        let b = Distribution::point(2, StateId(1));
        let half = ratio(1, 2);
        let m = Distribution::mix(&[half.clone(), half.clone()], &[a.clone(), b.clone()]).unwrap();
        assert_eq!(m.masses(), &[half.clone(), half.clone()]);

        let p = Distribution::new(vec![ratio(1, 3), ratio(2, 3)]).unwrap();
        let m = Distribution::mix(&[int(1), int(0)], &[p.clone(), b.clone()]).unwrap();
        assert_eq!(m, p);

        let q = Distribution::new(vec![half.clone(), half]).unwrap();
        let m = Distribution::mix(&[ratio(7, 10), ratio(3, 10)], &[a, q]).unwrap();
        assert_eq!(m.masses(), &[ratio(17, 20), ratio(3, 20)]);
    }

    #[test]
    fn dist_mix_rejects_non_affine_weights() {
        let a = Distribution::point(2, StateId(0));
        let err = Distribution::mix(&[ratio(1, 2), ratio(1, 3)], &[a.clone(), a.clone()]);
        assert!(matches!(err, Err(Error::AffineVector(_))));
        assert!(Distribution::mix(&[int(1)], &[a.clone(), a]).is_err());
    }

    #[test]
    fn distribution_rejects_bad_mass() {
        assert!(Distribution::new(vec![ratio(1, 2), ratio(1, 3)]).is_err());
        assert!(Distribution::new(vec![ratio(3, 2), ratio(-1, 2)]).is_err());
    }

    #[test]
    fn state_space_rejects_duplicates_and_empty() {
        assert!(StateSpace::new(["a", "a"]).is_err());
        assert!(StateSpace::new(Vec::<String>::new()).is_err());
        let space = StateSpace::new(["a", "b"]).unwrap();
        assert_eq!(space.id("b"), Some(StateId(1)));
        assert_eq!(space.name(StateId(0)), "a");
    }

    fn arb_interval() -> impl Strategy<Value = Interval> {
        (0i64..=20, 0i64..=20).prop_map(|(x, y)| {
            let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
            Interval::new(ratio(lo, 20), ratio(hi, 20)).unwrap()
        })
    }

    proptest! {
        #[test]
        fn add_and_mul_commute(a in arb_interval(), b in arb_interval()) {
            prop_assert_eq!(a.add(&b), b.add(&a));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
        }

        #[test]
        fn mul_associates(a in arb_interval(), b in arb_interval(), c in arb_interval()) {
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        }

        #[test]
        fn add_associates_without_clamping(x in 0i64..=7, y in 0i64..=7, z in 0i64..=6, w in 0i64..=6) {
            let a = Interval::new(ratio(x.min(y), 20), ratio(x.max(y), 20)).unwrap();
            let b = Interval::new(ratio(z.min(w), 20), ratio(z.max(w), 20)).unwrap();
            let c = Interval::new(ratio(x.min(w), 20), ratio(x.max(w), 20)).unwrap();
            prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        }

        #[test]
        fn subsumption_is_a_partial_order(a in arb_interval(), b in arb_interval(), c in arb_interval()) {
            prop_assert!(a.subsumes(&a));
            if a.subsumes(&b) && b.subsumes(&a) {
                prop_assert_eq!(&a, &b);
            }
            if a.subsumes(&b) && b.subsumes(&c) {
                prop_assert!(a.subsumes(&c));
            }
        }

        #[test]
        fn mix_sums_to_one(raw in proptest::collection::vec(1i64..10, 1..5), k in 0usize..3) {
            let total: i64 = raw.iter().sum();
            let weights: Vec<Rational> = raw.iter().map(|&w| ratio(w, total)).collect();
            let dists: Vec<Distribution> = (0..raw.len())
                .map(|i| Distribution::point(3, StateId((i + k) % 3)))
                .collect();
            let m = Distribution::mix(&weights, &dists).unwrap();
            prop_assert_eq!(m.masses().iter().sum::<Rational>(), int(1));
        }
    }
}

//! Exact arithmetic on the projective line over Q and over prime fields.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

/// Prime used by the finite-field oracles unless another is requested.
pub const DEFAULT_PRIME: u64 = 32003;

/// A point `[a : b]` of P^1(Q), kept primitive with `b > 0`, or `[1 : 0]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProjPoint {
    a: BigInt,
    b: BigInt,
}

impl ProjPoint {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Result<Self> {
        let (a, b) = (a.into(), b.into());
        if a.is_zero() && b.is_zero() {
            return Err(Error::Parse("[0 : 0] is not a point".into()));
        }
        Ok(Self::normalized(a, b))
    }

    fn normalized(a: BigInt, b: BigInt) -> Self {
        debug_assert!(!(a.is_zero() && b.is_zero()));
        if b.is_zero() {
            return Self::infinity();
        }
        let g = a.gcd(&b);
        let (mut a, mut b) = (a / &g, b / &g);
        if b.is_negative() {
            a = -a;
            b = -b;
        }
        ProjPoint { a, b }
    }

    pub fn infinity() -> Self {
        ProjPoint {
            a: BigInt::one(),
            b: BigInt::zero(),
        }
    }

    pub fn integer(v: i64) -> Self {
        ProjPoint {
            a: BigInt::from(v),
            b: BigInt::one(),
        }
    }

    pub fn from_rat(r: &Rat) -> Self {
        Self::normalized(r.numer().clone(), r.denom().clone())
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    pub fn is_infinity(&self) -> bool {
        self.b.is_zero()
    }

    pub fn to_rat(&self) -> Option<Rat> {
        (!self.is_infinity()).then(|| Rat::new(self.a.clone(), self.b.clone()))
    }

    /// Reduction modulo `p`, or `None` if both coordinates vanish (never for primitive points).
    pub fn reduce(&self, p: u64) -> Option<FpPoint> {
        FpPoint::new(mod_p(&self.a, p), mod_p(&self.b, p), p)
    }
}

/// The bracket `a_i b_j - a_j b_i`.
pub fn bracket(x: &ProjPoint, y: &ProjPoint) -> BigInt {
    &x.a * &y.b - &y.a * &x.b
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinity() {
            write!(f, "inf")
        } else if self.b.is_one() {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{}/{}", self.a, self.b)
        }
    }
}

impl FromStr for ProjPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s == "∞" {
            return Ok(Self::infinity());
        }
        let bad = || Error::Parse(format!("bad point {s:?}"));
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let a: BigInt = num.parse().map_err(|_| bad())?;
        let b: BigInt = den.parse().map_err(|_| bad())?;
        if b.is_zero() {
            return Err(bad());
        }
        Ok(Self::normalized(a, b))
    }
}

impl From<i64> for ProjPoint {
    fn from(v: i64) -> Self {
        Self::integer(v)
    }
}

/// A fractional-linear transformation, stored as a primitive integer matrix
/// whose first nonzero entry is positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mobius {
    m: [[BigInt; 2]; 2],
}

impl Mobius {
    pub fn new(m: [[BigInt; 2]; 2]) -> Result<Self> {
        let det = &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0];
        if det.is_zero() {
            return Err(Error::Parse("singular matrix".into()));
        }
        Ok(Self::normalized(m))
    }

    pub fn from_i64(m: [[i64; 2]; 2]) -> Result<Self> {
        Self::new(m.map(|r| r.map(BigInt::from)))
    }

    fn normalized(m: [[BigInt; 2]; 2]) -> Self {
        let flat = [&m[0][0], &m[0][1], &m[1][0], &m[1][1]];
        let mut g = BigInt::zero();
        for e in flat {
            g = g.gcd(e);
        }
        let lead_neg = flat
            .iter()
            .find(|e| !e.is_zero())
            .is_some_and(|e| e.is_negative());
        if lead_neg {
            g = -g;
        }
        Mobius {
            m: m.map(|r| r.map(|e| e / &g)),
        }
    }

    pub fn identity() -> Self {
        Self::from_i64([[1, 0], [0, 1]]).unwrap()
    }

    pub fn matrix(&self) -> &[[BigInt; 2]; 2] {
        &self.m
    }

    pub fn det(&self) -> BigInt {
        &self.m[0][0] * &self.m[1][1] - &self.m[0][1] * &self.m[1][0]
    }

    pub fn apply(&self, p: &ProjPoint) -> ProjPoint {
        let a = &self.m[0][0] * &p.a + &self.m[0][1] * &p.b;
        let b = &self.m[1][0] * &p.a + &self.m[1][1] * &p.b;
        ProjPoint::normalized(a, b)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Mobius) -> Mobius {
        let (x, y) = (&self.m, &other.m);
        let e = |i: usize, j: usize| &x[i][0] * &y[0][j] + &x[i][1] * &y[1][j];
        Self::normalized([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }

    pub fn inverse(&self) -> Mobius {
        let m = &self.m;
        Self::normalized([
            [m[1][1].clone(), -m[0][1].clone()],
            [-m[1][0].clone(), m[0][0].clone()],
        ])
    }

    pub fn apply_all(&self, x: &Configuration) -> Configuration {
        Configuration::new(x.points().iter().map(|p| self.apply(p)).collect())
    }
}

impl fmt::Display for Mobius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.m;
        write!(f, "[[{},{}],[{},{}]]", m[0][0], m[0][1], m[1][0], m[1][1])
    }
}

/// Matrix sending 0, 1, inf to the three given points (as columns).
fn frame(p: &[ProjPoint; 3]) -> [[BigInt; 2]; 2] {
    let [p0, p1, p2] = p;
    // A e_inf = u p2, A e_0 = v p0, u p2 + v p0 = p1 (scaled by det(p2, p0)).
    let u = bracket(p1, p0);
    let v = bracket(p2, p1);
    [[&u * &p2.a, &v * &p0.a], [&u * &p2.b, &v * &p0.b]]
}

fn distinct3(t: &[ProjPoint; 3]) -> bool {
    t[0] != t[1] && t[0] != t[2] && t[1] != t[2]
}

/// The unique transformation taking `src[i]` to `dst[i]` for i = 0, 1, 2.
pub fn mobius_from_triples(src: &[ProjPoint; 3], dst: &[ProjPoint; 3]) -> Result<Mobius> {
    if !distinct3(src) || !distinct3(dst) {
        return Err(Error::CoincidentPoints);
    }
    let a = Mobius::normalized(frame(src)).inverse();
    let b = Mobius::normalized(frame(dst));
    Ok(b.compose(&a))
}

/// An ordered tuple of points of P^1, indexed 1..=n by position.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    points: Vec<ProjPoint>,
}

impl Configuration {
    pub fn new(points: Vec<ProjPoint>) -> Self {
        Configuration { points }
    }

    pub fn from_i64(values: &[i64]) -> Self {
        Self::new(values.iter().map(|&v| ProjPoint::integer(v)).collect())
    }

    pub fn points(&self) -> &[ProjPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn get(&self, i: usize) -> &ProjPoint {
        &self.points[i]
    }

    /// Coordinates at the given 0-based indices, in that order.
    pub fn project(&self, idx: &[usize]) -> Configuration {
        Self::new(idx.iter().map(|&i| self.points[i].clone()).collect())
    }

    /// True when all coordinates are pairwise distinct (membership in U_n).
    pub fn is_generic(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.points.iter().all(|p| seen.insert(p))
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.points.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for Configuration {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let points = s
            .split(',')
            .map(str::parse)
            .collect::<Result<Vec<ProjPoint>>>()?;
        if points.is_empty() {
            return Err(Error::Parse("empty configuration".into()));
        }
        Ok(Self::new(points))
    }
}

// ---------------------------------------------------------------------------
// Prime fields

pub(crate) fn mod_p(x: &BigInt, p: u64) -> u64 {
    let r = x.mod_floor(&BigInt::from(p));
    r.try_into().expect("residue fits in u64")
}

pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Inverse of a nonzero residue modulo the prime `p`.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a, p - 2, p)
}

/// A point of P^1(F_p), normalized to `[a : 1]` or `[1 : 0]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FpPoint {
    pub a: u64,
    pub b: u64,
    pub p: u64,
}

impl FpPoint {
    pub fn new(a: u64, b: u64, p: u64) -> Option<Self> {
        let (a, b) = (a % p, b % p);
        match (a, b) {
            (0, 0) => None,
            (_, 0) => Some(FpPoint { a: 1, b: 0, p }),
            _ => Some(FpPoint {
                a: mul_mod(a, inv_mod(b, p), p),
                b: 1,
                p,
            }),
        }
    }
}

/// An invertible 2x2 matrix over F_p acting on P^1(F_p).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FpMobius {
    pub m: [[u64; 2]; 2],
    pub p: u64,
}

impl FpMobius {
    pub fn new(m: [[u64; 2]; 2], p: u64) -> Option<Self> {
        let m = m.map(|r| r.map(|e| e % p));
        let det = (mul_mod(m[0][0], m[1][1], p) + p - mul_mod(m[0][1], m[1][0], p)) % p;
        (det != 0).then_some(FpMobius { m, p })
    }

    pub fn apply(&self, x: &FpPoint) -> FpPoint {
        let p = self.p;
        let a = (mul_mod(self.m[0][0], x.a, p) + mul_mod(self.m[0][1], x.b, p)) % p;
        let b = (mul_mod(self.m[1][0], x.a, p) + mul_mod(self.m[1][1], x.b, p)) % p;
        FpPoint::new(a, b, p).expect("invertible matrix has nonzero image")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(s: &str) -> ProjPoint {
        s.parse().unwrap()
    }

    fn triple(a: &str, b: &str, c: &str) -> [ProjPoint; 3] {
        [pt(a), pt(b), pt(c)]
    }

    #[test]
    fn normalization() {
        assert_eq!(
            ProjPoint::new(-4, -6).unwrap(),
            ProjPoint::new(2, 3).unwrap()
        );
        assert_eq!(ProjPoint::new(-5, 0).unwrap(), ProjPoint::infinity());
        assert_eq!(pt("0"), ProjPoint::new(0, 7).unwrap());
        assert_eq!(pt("6/-4").to_string(), "-3/2");
        assert_eq!(pt("inf").to_string(), "inf");
        assert!(ProjPoint::new(0, 0).is_err());
        assert!("1/0".parse::<ProjPoint>().is_err());
    }

    #[test]
    fn apply_examples() {
        assert_eq!(Mobius::identity().apply(&pt("3")), pt("3"));
        let scale = Mobius::from_i64([[2, 0], [0, 1]]).unwrap();
        assert_eq!(scale.apply(&pt("1")), pt("2"));
        let flip = Mobius::from_i64([[-1, 1], [0, 1]]).unwrap();
        assert_eq!(flip.apply(&pt("0")), pt("1"));
        assert_eq!(flip.apply(&pt("inf")), pt("inf"));
    }

    #[test]
    fn from_triples_examples() {
        let std = triple("0", "1", "inf");
        assert_eq!(mobius_from_triples(&std, &std).unwrap(), Mobius::identity());
        assert_eq!(
            mobius_from_triples(&std, &triple("0", "2", "inf")).unwrap(),
            Mobius::from_i64([[2, 0], [0, 1]]).unwrap()
        );
        assert_eq!(
            mobius_from_triples(&std, &triple("1", "0", "inf")).unwrap(),
            Mobius::from_i64([[-1, 1], [0, 1]]).unwrap()
        );
        assert_eq!(
            mobius_from_triples(&triple("0", "0", "1"), &std),
            Err(Error::CoincidentPoints)
        );
    }

    #[test]
    fn matrix_sign_is_canonical() {
        let a = Mobius::from_i64([[-2, 0], [0, -2]]).unwrap();
        assert_eq!(a, Mobius::identity());
        assert!(Mobius::from_i64([[1, 2], [2, 4]]).is_err());
    }

    #[test]
    fn finite_field_action() {
        let p = DEFAULT_PRIME;
        let g = FpMobius::new([[2, 0], [0, 1]], p).unwrap();
        let one = FpPoint::new(1, 1, p).unwrap();
        assert_eq!(g.apply(&one), FpPoint::new(2, 1, p).unwrap());
        assert_eq!(
            pt("-1/2").reduce(p).unwrap(),
            FpPoint::new(p - 1, 2, p).unwrap()
        );
        assert_eq!(mul_mod(inv_mod(5, p), 5, p), 1);
    }
}

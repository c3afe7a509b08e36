//! Configuration types, cross-ratios and the (1,1,1,1) forms cutting out
//! orbit closures in (P^1)^4.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact_geometry::{bracket, Configuration, ProjPoint};
use crate::label::{subsets_of_size, Label, LabelSet};

/// A set partition with parts ordered by their least element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition {
    parts: Vec<LabelSet>,
}

impl SetPartition {
    pub fn new(parts: Vec<LabelSet>) -> Result<Self> {
        let mut seen = LabelSet::new();
        for part in &parts {
            if part.is_empty() {
                return Err(Error::InvalidPartition);
            }
            for l in part {
                if !seen.insert(*l) {
                    return Err(Error::InvalidPartition);
                }
            }
        }
        let mut parts = parts;
        parts.sort_by_key(|p| *p.iter().next().unwrap());
        Ok(SetPartition { parts })
    }

    /// The partition of `labels` into singletons.
    pub fn discrete(labels: &LabelSet) -> Self {
        SetPartition {
            parts: labels.iter().map(|l| LabelSet::from([*l])).collect(),
        }
    }

    pub fn parts(&self) -> &[LabelSet] {
        &self.parts
    }

    pub fn num_parts(&self) -> usize {
        self.parts.len()
    }

    pub fn ground_set(&self) -> LabelSet {
        self.parts.iter().flatten().copied().collect()
    }

    /// Index of the part containing `l`.
    pub fn part_of(&self, l: Label) -> Option<usize> {
        self.parts.iter().position(|p| p.contains(&l))
    }

    /// Whether `set` meets every part at most once.
    pub fn is_transversal(&self, set: &LabelSet) -> bool {
        self.parts.iter().all(|p| p.intersection(set).count() <= 1)
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .parts
            .iter()
            .map(|p| {
                p.iter()
                    .map(|l| l.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        write!(f, "{}", parts.join("|"))
    }
}

impl std::str::FromStr for SetPartition {
    type Err = Error;

    /// Parses `"1,2|3|4"`.
    fn from_str(s: &str) -> Result<Self> {
        let parts = s
            .split('|')
            .map(|part| {
                part.split(',')
                    .map(str::parse)
                    .collect::<Result<LabelSet>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(parts)
    }
}

/// Every set partition of `labels`.
pub fn set_partitions(labels: &LabelSet) -> Vec<SetPartition> {
    let mut acc: Vec<Vec<LabelSet>> = vec![vec![]];
    for l in labels {
        let mut next = Vec::new();
        for parts in &acc {
            for i in 0..parts.len() {
                let mut p = parts.clone();
                p[i].insert(*l);
                next.push(p);
            }
            let mut p = parts.clone();
            p.push(LabelSet::from([*l]));
            next.push(p);
        }
        acc = next;
    }
    acc.into_iter()
        .map(|p| SetPartition::new(p).unwrap())
        .collect()
}

/// The type of `x`, with coordinates labelled 1..=n.
pub fn type_of(x: &Configuration) -> SetPartition {
    let labels: Vec<Label> = (1..=x.len() as u32).map(Label).collect();
    type_of_labeled(&labels, x)
}

/// The type of `x` where coordinate `i` carries `labels[i]`.
pub fn type_of_labeled(labels: &[Label], x: &Configuration) -> SetPartition {
    assert_eq!(labels.len(), x.len());
    let mut parts: Vec<(ProjPoint, LabelSet)> = Vec::new();
    for (l, p) in labels.iter().zip(x.points()) {
        match parts.iter_mut().find(|(q, _)| q == p) {
            Some((_, set)) => {
                set.insert(*l);
            }
            None => parts.push((p.clone(), LabelSet::from([*l]))),
        }
    }
    SetPartition::new(parts.into_iter().map(|(_, s)| s).collect()).unwrap()
}

/// Whether `x` lies in some Delta_i: all coordinates but at most one coincide.
pub fn in_delta_bullet(x: &Configuration) -> bool {
    let n = x.len();
    (0..n).any(|skip| {
        let mut rest = (0..n).filter(|&j| j != skip).map(|j| x.get(j));
        match rest.next() {
            Some(first) => rest.all(|p| p == first),
            None => true,
        }
    })
}

fn expect_len(x: &Configuration, n: usize) -> Result<()> {
    if x.len() != n {
        return Err(Error::OutOfRange(format!(
            "expected {n} points, got {}",
            x.len()
        )));
    }
    Ok(())
}

/// Lift of `x_j - x_i` (0-based indices).
fn diff(x: &Configuration, j: usize, i: usize) -> BigInt {
    bracket(x.get(j), x.get(i))
}

/// Cross-ratio of four distinct points, normalized so that (0, 1, inf, t) has value t.
pub fn cross_ratio(x: &Configuration) -> Result<ProjPoint> {
    expect_len(x, 4)?;
    if !x.is_generic() {
        return Err(Error::CoincidentPoints);
    }
    let num = diff(x, 3, 0) * diff(x, 1, 2);
    let den = diff(x, 1, 0) * diff(x, 3, 2);
    ProjPoint::new(num, den)
}

/// A section of O(1,1,1,1) on (P^1)^4. Slot `S` (a 4-bit mask) holds the
/// coefficient of `prod_{i in S} a_i * prod_{i not in S} b_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SectionForm {
    coeffs: [BigInt; 16],
}

impl SectionForm {
    /// Primitive, first nonzero coefficient positive. Fails on the zero form.
    pub fn new(coeffs: [BigInt; 16]) -> Result<Self> {
        let mut g = BigInt::zero();
        for c in &coeffs {
            g = g.gcd(c);
        }
        if g.is_zero() {
            return Err(Error::DegenerateConfiguration);
        }
        if coeffs.iter().find(|c| !c.is_zero()).unwrap().is_negative() {
            g = -g;
        }
        Ok(SectionForm {
            coeffs: coeffs.map(|c| c / &g),
        })
    }

    pub fn coeffs(&self) -> &[BigInt; 16] {
        &self.coeffs
    }

    pub fn coeff(&self, mask: usize) -> &BigInt {
        &self.coeffs[mask]
    }

    pub fn evaluate(&self, z: &Configuration) -> BigInt {
        evaluate_coeffs(&self.coeffs, z)
    }

    pub fn vanishes_at(&self, z: &Configuration) -> bool {
        self.evaluate(z).is_zero()
    }

    /// Human-readable monomial expansion, e.g. `a1a2b3b4 - 2*b1a2a3b4`.
    pub fn to_monomial_string(&self) -> String {
        let mut out = String::new();
        for (mask, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mono: String = (0..4)
                .map(|i| {
                    if mask >> i & 1 == 1 {
                        format!("a{}", i + 1)
                    } else {
                        format!("b{}", i + 1)
                    }
                })
                .collect();
            let sign = if c.is_negative() { "-" } else { "+" };
            if out.is_empty() {
                if c.is_negative() {
                    out.push('-');
                }
            } else {
                out += &format!(" {sign} ");
            }
            if !c.abs().is_one() {
                out += &format!("{}*", c.abs());
            }
            out += &mono;
        }
        out
    }
}

fn evaluate_coeffs(coeffs: &[BigInt; 16], z: &Configuration) -> BigInt {
    assert_eq!(z.len(), 4);
    let mut total = BigInt::zero();
    for (mask, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mut term = c.clone();
        for i in 0..4 {
            let p = z.get(i);
            term *= if mask >> i & 1 == 1 { p.a() } else { p.b() };
        }
        total += term;
    }
    total
}

/// Coefficients of the bracket product `[j1 i1][j2 i2]` in the z variables,
/// where `[j i]` lifts `z_j - z_i`; the four indices must be distinct.
fn bracket_pair(j1: usize, i1: usize, j2: usize, i2: usize) -> [i64; 16] {
    let single = |j: usize, i: usize| [(1usize << j, 1i64), (1usize << i, -1i64)];
    let mut out = [0i64; 16];
    for (m1, c1) in single(j1, i1) {
        for (m2, c2) in single(j2, i2) {
            out[m1 | m2] += c1 * c2;
        }
    }
    out
}

/// Unnormalized coefficients of the homogenized form
/// `(x4-x1)(x2-x3)(z2-z1)(z4-z3) - (x2-x1)(x4-x3)(z4-z1)(z2-z3)`,
/// using the primitive representatives of the points of `x`.
pub fn orbit_form_coefficients(x: &Configuration) -> Result<[BigInt; 16]> {
    expect_len(x, 4)?;
    let c = diff(x, 3, 0) * diff(x, 1, 2);
    let d = diff(x, 1, 0) * diff(x, 3, 2);
    let first = bracket_pair(1, 0, 3, 2);
    let second = bracket_pair(3, 0, 1, 2);
    let coeffs: [BigInt; 16] =
        std::array::from_fn(|m| &c * BigInt::from(first[m]) - &d * BigInt::from(second[m]));
    if coeffs.iter().all(Zero::is_zero) {
        return Err(Error::DegenerateConfiguration);
    }
    Ok(coeffs)
}

/// The normalized form f_x; its zero locus is the orbit closure of x when x
/// is generic, and a pair of diagonals when x has one coincident pair.
pub fn orbit_form(x: &Configuration) -> Result<SectionForm> {
    SectionForm::new(orbit_form_coefficients(x)?)
}

fn zero_based(set: &LabelSet) -> Vec<usize> {
    set.iter().map(|l| l.0 as usize - 1).collect()
}

/// Forms `f_{pi_I(x)}` for every 4-subset `I` of 1..=n whose projection avoids Delta_•.
pub fn orbit_ideal_forms(x: &Configuration) -> Result<BTreeMap<LabelSet, SectionForm>> {
    if x.len() < 4 {
        return Err(Error::TooFewMarkings(x.len()));
    }
    if type_of(x).num_parts() < 3 {
        return Err(Error::TooDegenerateType);
    }
    let labels = crate::label::range_labels(x.len());
    let mut out = BTreeMap::new();
    for subset in subsets_of_size(&labels, 4) {
        match orbit_form(&x.project(&zero_based(&subset))) {
            Ok(f) => {
                out.insert(subset, f);
            }
            Err(Error::DegenerateConfiguration) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Membership of `z` in the closure of the orbit of the generic configuration `x`,
/// tested by vanishing of all 4-subset forms.
pub fn in_orbit_closure(x: &Configuration, z: &Configuration) -> Result<bool> {
    if x.len() < 4 {
        return Err(Error::TooFewMarkings(x.len()));
    }
    if !x.is_generic() {
        return Err(Error::CoincidentPoints);
    }
    expect_len(z, x.len())?;
    let forms = orbit_ideal_forms(x)?;
    Ok(forms
        .iter()
        .all(|(subset, f)| f.vanishes_at(&z.project(&zero_based(subset)))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_generic_configuration, random_mobius, random_point, rng};

    fn cfg(s: &str) -> Configuration {
        s.parse().unwrap()
    }

    fn part(s: &str) -> SetPartition {
        s.parse().unwrap()
    }

    #[test]
    fn type_examples() {
        assert_eq!(type_of(&cfg("0,1,inf,2")), part("1|2|3|4"));
        assert_eq!(type_of(&cfg("0,0,1,inf")), part("1,2|3|4"));
        assert_eq!(type_of(&cfg("5,5,5")), part("1,2,3"));
        assert_eq!(type_of(&cfg("1,0,1,0")), part("1,3|2,4"));
    }

    #[test]
    fn partitions_reject_overlap() {
        assert!(SetPartition::new(vec![[Label(1)].into(), [Label(1), Label(2)].into()]).is_err());
        assert_eq!(set_partitions(&crate::label::range_labels(5)).len(), 52);
    }

    #[test]
    fn cross_ratio_examples() {
        assert_eq!(
            cross_ratio(&cfg("0,1,inf,7/3")).unwrap(),
            "7/3".parse().unwrap()
        );
        assert_eq!(
            cross_ratio(&cfg("0,1,inf,2")).unwrap(),
            ProjPoint::integer(2)
        );
        assert_eq!(
            cross_ratio(&cfg("1,2,3,4")).unwrap(),
            ProjPoint::integer(-3)
        );
        assert_eq!(cross_ratio(&cfg("1,1,3,4")), Err(Error::CoincidentPoints));
    }

    /// f = -2 [21][43] + [41][23] expanded by hand: [21][43] = (a2b1 - a1b2)(a4b3 - a3b4).
    #[test]
    fn orbit_form_worked_example() {
        let x = cfg("0,1,inf,2");
        let raw = orbit_form_coefficients(&x).unwrap();
        let b = |j: usize, i: usize, l: usize, k: usize| bracket_pair(j - 1, i - 1, l - 1, k - 1);
        let p = b(2, 1, 4, 3);
        let q = b(4, 1, 2, 3);
        let expected: [BigInt; 16] = std::array::from_fn(|m| BigInt::from(-2 * p[m] + q[m]));
        assert_eq!(raw, expected);
        assert!(orbit_form(&x).unwrap().vanishes_at(&x));
    }

    #[test]
    fn coincident_pair_gives_product_of_diagonals() {
        let f = orbit_form(&cfg("0,0,1,inf")).unwrap();
        assert_eq!(
            f,
            SectionForm::new(bracket_pair(1, 0, 3, 2).map(BigInt::from)).unwrap()
        );
        let mut r = rng(3);
        for _ in 0..20 {
            let (u, v, w) = (
                random_point(&mut r),
                random_point(&mut r),
                random_point(&mut r),
            );
            let z = Configuration::new(vec![u.clone(), u.clone(), v.clone(), w.clone()]);
            assert!(f.vanishes_at(&z));
            let z = Configuration::new(vec![v.clone(), w.clone(), u.clone(), u.clone()]);
            assert!(f.vanishes_at(&z));
        }
        assert!(!f.vanishes_at(&cfg("0,1,2,3")));
    }

    #[test]
    fn degenerate_forms_rejected() {
        assert_eq!(
            orbit_form(&cfg("1,1,1,0")),
            Err(Error::DegenerateConfiguration)
        );
        assert_eq!(
            orbit_form(&cfg("2,5,2,2")),
            Err(Error::DegenerateConfiguration)
        );
        assert_eq!(
            orbit_form(&cfg("3,3,3,3")),
            Err(Error::DegenerateConfiguration)
        );
    }

    #[test]
    fn invariance_under_mobius() {
        let mut r = rng(11);
        for _ in 0..10 {
            let x = random_generic_configuration(&mut r, 4);
            let cr = cross_ratio(&x).unwrap();
            let f = orbit_form(&x).unwrap();
            let ty = type_of(&x);
            for _ in 0..50 {
                let g = random_mobius(&mut r);
                let gx = g.apply_all(&x);
                assert_eq!(cross_ratio(&gx).unwrap(), cr);
                assert_eq!(orbit_form(&gx).unwrap(), f);
                assert_eq!(type_of(&gx), ty);
            }
        }
    }

    #[test]
    fn forms_vanish_on_delta_bullet() {
        let mut r = rng(5);
        for _ in 0..10 {
            let x = random_generic_configuration(&mut r, 4);
            let f = orbit_form(&x).unwrap();
            for free in 0..4 {
                let (c, u) = (random_point(&mut r), random_point(&mut r));
                let pts = (0..4)
                    .map(|i| if i == free { u.clone() } else { c.clone() })
                    .collect();
                assert!(f.vanishes_at(&Configuration::new(pts)));
            }
        }
    }

    #[test]
    fn zero_locus_on_u4_is_cross_ratio_level_set() {
        let mut r = rng(9);
        for _ in 0..200 {
            let x = random_generic_configuration(&mut r, 4);
            let z = random_generic_configuration(&mut r, 4);
            let f = orbit_form(&x).unwrap();
            assert_eq!(
                f.vanishes_at(&z),
                cross_ratio(&z).unwrap() == cross_ratio(&x).unwrap()
            );
            let gx = random_mobius(&mut r).apply_all(&x);
            assert!(f.vanishes_at(&gx));
        }
    }

    #[test]
    fn ideal_forms_examples() {
        let x = cfg("0,1,inf,2");
        let forms = orbit_ideal_forms(&x).unwrap();
        assert_eq!(forms.len(), 1);
        assert_eq!(forms.values().next().unwrap(), &orbit_form(&x).unwrap());

        let x = cfg("0,1,inf,2,3");
        let forms = orbit_ideal_forms(&x).unwrap();
        assert_eq!(forms.len(), 5);
        let mut r = rng(1);
        for _ in 0..20 {
            let gx = random_mobius(&mut r).apply_all(&x);
            for (subset, f) in &forms {
                assert!(f.vanishes_at(&gx.project(&zero_based(subset))));
            }
        }

        // Type {1,2}{3}{4}{5}: the 4-subsets containing both 1 and 2 with two
        // other distinct values have one coincident pair and stay admissible;
        // none lands in Delta_• since only one pair coincides.
        let x = cfg("0,0,1,inf,2");
        let forms = orbit_ideal_forms(&x).unwrap();
        assert_eq!(forms.len(), 5);
        let x = cfg("0,0,0,1,inf");
        let forms = orbit_ideal_forms(&x).unwrap();
        let keys: Vec<LabelSet> = forms.keys().cloned().collect();
        // 4-subsets containing {1,2,3} project into Delta_• and are omitted.
        assert_eq!(keys.len(), 5 - 2);
        assert!(keys
            .iter()
            .all(|k| !(k.contains(&Label(1)) && k.contains(&Label(2)) && k.contains(&Label(3)))));
        assert_eq!(
            orbit_ideal_forms(&cfg("0,0,1,1,1")),
            Err(Error::TooDegenerateType)
        );
    }

    #[test]
    fn orbit_closure_membership() {
        let x = cfg("0,1,inf,2,3");
        let mut r = rng(2);
        for _ in 0..20 {
            let gx = random_mobius(&mut r).apply_all(&x);
            assert!(in_orbit_closure(&x, &gx).unwrap());
        }
        // Delta_3: coordinate 3 free, rest equal.
        assert!(in_orbit_closure(&x, &cfg("5,5,-1,5,5")).unwrap());
        let x4 = cfg("0,1,inf,2");
        assert!(!in_orbit_closure(&x4, &cfg("0,1,inf,3")).unwrap());
        assert!(in_orbit_closure(&x4, &cfg("1,2,inf,3")).unwrap());
    }
}

//! Integer polynomials of degree at most one in each variable.
//!
//! A term is identified with the set of variables it multiplies, so a
//! polynomial is a sparse map from label subsets to coefficients. Products
//! and substitutions that would square a variable are rejected.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::label::{Label, LabelSet};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultilinearPoly {
    vars: LabelSet,
    terms: BTreeMap<LabelSet, BigInt>,
}

type Monomial = BTreeMap<Label, u32>;

impl MultilinearPoly {
    pub fn zero(vars: LabelSet) -> Self {
        MultilinearPoly {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: LabelSet, c: impl Into<BigInt>) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(LabelSet::new(), c.into());
        p
    }

    pub fn one(vars: LabelSet) -> Self {
        Self::constant(vars, 1)
    }

    /// The polynomial `t_v`.
    pub fn var(v: Label) -> Self {
        let mut p = Self::zero(LabelSet::from([v]));
        p.add_term(LabelSet::from([v]), BigInt::one());
        p
    }

    /// `c + sum_{s in set} t_s`.
    pub fn linear_sum(set: &LabelSet, c: i64) -> Self {
        let mut p = Self::constant(set.clone(), c);
        for s in set {
            p.add_term(LabelSet::from([*s]), BigInt::one());
        }
        p
    }

    /// Builds from explicit terms; every term's variables join the variable set.
    pub fn from_terms(vars: LabelSet, terms: impl IntoIterator<Item = (LabelSet, BigInt)>) -> Self {
        let mut p = Self::zero(vars);
        for (s, c) in terms {
            p.vars.extend(s.iter().copied());
            p.add_term(s, c);
        }
        p
    }

    fn add_term(&mut self, s: LabelSet, c: BigInt) {
        use std::collections::btree_map::Entry;
        if c.is_zero() {
            return;
        }
        match self.terms.entry(s) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn vars(&self) -> &LabelSet {
        &self.vars
    }

    pub fn terms(&self) -> &BTreeMap<LabelSet, BigInt> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, s: &LabelSet) -> BigInt {
        self.terms.get(s).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Same terms over a larger variable set.
    pub fn with_vars(mut self, vars: &LabelSet) -> Self {
        self.vars.extend(vars.iter().copied());
        self
    }

    fn from_monomials(vars: LabelSet, monos: BTreeMap<Monomial, BigInt>) -> Result<Self> {
        let mut p = Self::zero(vars);
        for (m, c) in monos {
            if c.is_zero() {
                continue;
            }
            if let Some((l, _)) = m.iter().find(|(_, e)| **e > 1) {
                return Err(Error::NotMultilinear(*l));
            }
            p.add_term(m.into_keys().collect(), c);
        }
        Ok(p)
    }

    /// Exact product; fails if any variable would survive with degree two.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        let mut monos: BTreeMap<Monomial, BigInt> = BTreeMap::new();
        for (s, c) in &self.terms {
            for (t, d) in &other.terms {
                let mut m: Monomial = s.iter().map(|l| (*l, 1)).collect();
                for l in t {
                    *m.entry(*l).or_insert(0) += 1;
                }
                *monos.entry(m).or_insert_with(BigInt::zero) += c * d;
            }
        }
        let vars = self.vars.union(&other.vars).copied().collect();
        Self::from_monomials(vars, monos)
    }

    /// Simultaneously replaces each `t_v` (for `v` a key of `map`) by
    /// `sum_{s in map[v]} t_s`. Variables not in `map` are left alone.
    pub fn substitute(&self, map: &BTreeMap<Label, LabelSet>) -> Result<Self> {
        let mut vars: LabelSet = self
            .vars
            .iter()
            .filter(|v| !map.contains_key(v))
            .copied()
            .collect();
        for s in map.values() {
            vars.extend(s.iter().copied());
        }
        let mut monos: BTreeMap<Monomial, BigInt> = BTreeMap::new();
        for (s, c) in &self.terms {
            // expand prod_{v in s} (image of t_v)
            let mut partial: Vec<Monomial> = vec![Monomial::new()];
            for v in s {
                let image: Vec<Label> = match map.get(v) {
                    Some(set) => set.iter().copied().collect(),
                    None => vec![*v],
                };
                partial = partial
                    .iter()
                    .flat_map(|m| {
                        image.iter().map(move |l| {
                            let mut m = m.clone();
                            *m.entry(*l).or_insert(0) += 1;
                            m
                        })
                    })
                    .collect();
            }
            for m in partial {
                *monos.entry(m).or_insert_with(BigInt::zero) += c;
            }
        }
        Self::from_monomials(vars, monos)
    }

    /// Replaces `t_v` by `sum_{s in set} t_s`.
    pub fn substitute_sum(&self, v: Label, set: &LabelSet) -> Result<Self> {
        self.substitute(&BTreeMap::from([(v, set.clone())]))
    }

    pub fn relabel(&self, f: impl Fn(Label) -> Label) -> Self {
        let map = self
            .vars
            .iter()
            .map(|v| (*v, LabelSet::from([f(*v)])))
            .collect();
        self.substitute(&map)
            .expect("injective relabelling stays multilinear")
    }

    pub fn evaluate(&self, assignment: &BTreeMap<Label, BigInt>) -> Result<BigInt> {
        if let Some(v) = self.vars.iter().find(|v| !assignment.contains_key(v)) {
            return Err(Error::MissingVariable(*v));
        }
        Ok(self
            .terms
            .iter()
            .map(|(s, c)| s.iter().fold(c.clone(), |acc, l| acc * &assignment[l]))
            .sum())
    }

    /// Evaluation with every variable set to the same integer.
    pub fn evaluate_constant(&self, value: i64) -> BigInt {
        let a = self
            .vars
            .iter()
            .map(|v| (*v, BigInt::from(value)))
            .collect();
        self.evaluate(&a).unwrap()
    }
}

impl Add for &MultilinearPoly {
    type Output = MultilinearPoly;

    fn add(self, rhs: &MultilinearPoly) -> MultilinearPoly {
        let mut out = self.clone();
        out.vars.extend(rhs.vars.iter().copied());
        for (s, c) in &rhs.terms {
            out.add_term(s.clone(), c.clone());
        }
        out
    }
}

impl Neg for &MultilinearPoly {
    type Output = MultilinearPoly;

    fn neg(self) -> MultilinearPoly {
        MultilinearPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(s, c)| (s.clone(), -c)).collect(),
        }
    }
}

impl Sub for &MultilinearPoly {
    type Output = MultilinearPoly;

    fn sub(self, rhs: &MultilinearPoly) -> MultilinearPoly {
        self + &(-rhs)
    }
}

impl fmt::Display for MultilinearPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut terms: Vec<(&LabelSet, &BigInt)> = self.terms.iter().collect();
        terms.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then(a.0.cmp(b.0)));
        let mut first = true;
        for (s, c) in terms {
            let (sign, mag) = if c < &BigInt::zero() {
                ("-", -c)
            } else {
                ("+", c.clone())
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let vars: Vec<String> = s.iter().map(|l| format!("t{l}")).collect();
            if s.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{mag}*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::label::range_labels;
    use proptest::prelude::*;

    fn set(v: &[u32]) -> LabelSet {
        v.iter().map(|&x| Label(x)).collect()
    }

    fn t(i: u32) -> MultilinearPoly {
        MultilinearPoly::var(Label(i))
    }

    fn one_plus(i: u32) -> MultilinearPoly {
        MultilinearPoly::linear_sum(&set(&[i]), 1)
    }

    fn poly(terms: &[(&[u32], i64)]) -> MultilinearPoly {
        MultilinearPoly::from_terms(
            LabelSet::new(),
            terms.iter().map(|(s, c)| (set(s), BigInt::from(*c))),
        )
    }

    #[test]
    fn add_and_subtract() {
        let p = &one_plus(1) + &one_plus(2);
        assert_eq!(p, poly(&[(&[], 2), (&[1], 1), (&[2], 1)]));
        let z = MultilinearPoly::zero(set(&[1, 2]));
        assert_eq!(&p + &z, p);
        assert!((&p - &p).is_zero());
    }

    #[test]
    fn multiply_examples() {
        let p = one_plus(1).multiply(&one_plus(2)).unwrap();
        assert_eq!(p, poly(&[(&[], 1), (&[1], 1), (&[2], 1), (&[1, 2], 1)]));
        assert_eq!(
            one_plus(1).multiply(&one_plus(1)),
            Err(Error::NotMultilinear(Label(1)))
        );
        let q = (&t(1) + &t(2)).multiply(&t(3)).unwrap();
        assert_eq!(q, poly(&[(&[1, 3], 1), (&[2, 3], 1)]));
    }

    #[test]
    fn substitute_examples() {
        let star = Label::STAR;
        let p = MultilinearPoly::var(star)
            .substitute_sum(star, &set(&[3, 4, 5]))
            .unwrap();
        assert_eq!(p, poly(&[(&[3], 1), (&[4], 1), (&[5], 1)]));

        let q = one_plus(1)
            .multiply(&MultilinearPoly::linear_sum(&LabelSet::from([star]), 1))
            .unwrap();
        let r = q.substitute_sum(star, &set(&[2, 3])).unwrap();
        assert_eq!(
            r,
            poly(&[
                (&[], 1),
                (&[1], 1),
                (&[2], 1),
                (&[3], 1),
                (&[1, 2], 1),
                (&[1, 3], 1)
            ])
        );
        // t1 * t_* with * -> t1 + t2 squares t1
        let bad = t(1).multiply(&MultilinearPoly::var(star)).unwrap();
        assert_eq!(
            bad.substitute_sum(star, &set(&[1, 2])),
            Err(Error::NotMultilinear(Label(1)))
        );
    }

    #[test]
    fn evaluate_examples() {
        let mut p = MultilinearPoly::one(LabelSet::new());
        for i in 1..=3 {
            p = p.multiply(&one_plus(i)).unwrap();
        }
        assert_eq!(p.evaluate_constant(1), BigInt::from(8));
        let a = BTreeMap::from([(Label(1), BigInt::from(1))]);
        assert_eq!(p.evaluate(&a), Err(Error::MissingVariable(Label(2))));
    }

    #[test]
    fn display() {
        let p = &one_plus(1).multiply(&one_plus(2)).unwrap() - &poly(&[(&[1], 3)]);
        assert_eq!(p.to_string(), "1 - 2*t1 + t2 + t1*t2");
    }

    fn arb_poly(vars: Vec<u32>) -> impl Strategy<Value = MultilinearPoly> {
        let n = vars.len();
        proptest::collection::vec(-5i64..=5, 1 << n).prop_map(move |coeffs| {
            let vs: LabelSet = vars.iter().map(|&v| Label(v)).collect();
            let items: Vec<Label> = vs.iter().copied().collect();
            MultilinearPoly::from_terms(
                vs.clone(),
                coeffs.into_iter().enumerate().map(|(mask, c)| {
                    let s: LabelSet = (0..n)
                        .filter(|i| mask >> i & 1 == 1)
                        .map(|i| items[i])
                        .collect();
                    (s, BigInt::from(c))
                }),
            )
        })
    }

    proptest! {
        #[test]
        fn ring_laws_on_disjoint_supports(
            p in arb_poly(vec![1, 2]),
            q in arb_poly(vec![3, 4]),
            r in arb_poly(vec![5]),
            s in arb_poly(vec![3, 4]),
            vals in proptest::collection::vec(-4i64..=4, 5),
        ) {
            let pq = p.multiply(&q).unwrap();
            prop_assert_eq!(&pq, &q.multiply(&p).unwrap());
            prop_assert_eq!(pq.multiply(&r).unwrap(), p.multiply(&q.multiply(&r).unwrap()).unwrap());
            prop_assert_eq!(p.multiply(&(&q + &s)).unwrap(), &pq + &p.multiply(&s).unwrap());
            let a: BTreeMap<Label, BigInt> =
                range_labels(5).into_iter().zip(vals.into_iter().map(BigInt::from)).collect();
            prop_assert_eq!(pq.evaluate(&a).unwrap(), p.evaluate(&a).unwrap() * q.evaluate(&a).unwrap());
            prop_assert_eq!(p.substitute_sum(Label(1), &set(&[1])).unwrap().with_vars(&set(&[1, 2])), p.clone());
        }
    }
}

//! Cycle classes in `(P^1)^n` in the basis `H_I`, where `H_I` is the class
//! of a fibre `{fixed coordinates off I} x X^I`. The grade of `H_I` is `|I|`;
//! orbit closures live in grade 3.

use std::collections::BTreeMap;
use std::fmt;

use crate::configurations::SetPartition;
use crate::error::{Error, Result};
use crate::label::{fmt_set, range_labels, subsets_of_size, Label, LabelSet};
use crate::trees::StableTree;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChowClass {
    vars: LabelSet,
    grade: usize,
    terms: BTreeMap<LabelSet, i64>,
}

impl ChowClass {
    pub fn zero(vars: LabelSet, grade: usize) -> Self {
        ChowClass {
            vars,
            grade,
            terms: BTreeMap::new(),
        }
    }

    /// The basis class `H_I` on `vars`.
    pub fn basis(vars: LabelSet, i: LabelSet) -> Result<Self> {
        Self::from_terms(vars, i.len(), [(i, 1)])
    }

    /// Builds a class, summing repeated subsets and dropping zeros. Every
    /// subset must lie in `vars` and have `grade` elements.
    pub fn from_terms(
        vars: LabelSet,
        grade: usize,
        terms: impl IntoIterator<Item = (LabelSet, i64)>,
    ) -> Result<Self> {
        let mut c = Self::zero(vars, grade);
        for (s, k) in terms {
            if let Some(l) = s.difference(&c.vars).next() {
                return Err(Error::MissingLabel(*l));
            }
            if s.len() != grade {
                return Err(Error::GradeMismatch(s.len(), grade, c.vars.len()));
            }
            c.add_term(s, k);
        }
        Ok(c)
    }

    fn add_term(&mut self, s: LabelSet, k: i64) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(s) {
            Entry::Vacant(e) => {
                if k != 0 {
                    e.insert(k);
                }
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += k;
                if *e.get() == 0 {
                    e.remove();
                }
            }
        }
    }

    pub fn vars(&self) -> &LabelSet {
        &self.vars
    }

    pub fn grade(&self) -> usize {
        self.grade
    }

    pub fn terms(&self) -> &BTreeMap<LabelSet, i64> {
        &self.terms
    }

    pub fn coefficient(&self, s: &LabelSet) -> i64 {
        self.terms.get(s).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &ChowClass) -> Result<ChowClass> {
        if self.vars != other.vars {
            return Err(Error::AmbientMismatch);
        }
        if self.grade != other.grade {
            return Err(Error::GradeMismatch(
                self.grade,
                other.grade,
                self.vars.len(),
            ));
        }
        let mut out = self.clone();
        for (s, k) in &other.terms {
            out.add_term(s.clone(), *k);
        }
        Ok(out)
    }

    pub fn scale(&self, k: i64) -> ChowClass {
        let mut out = Self::zero(self.vars.clone(), self.grade);
        for (s, c) in &self.terms {
            out.add_term(s.clone(), c * k);
        }
        out
    }

    pub fn relabel(&self, f: impl Fn(Label) -> Label) -> ChowClass {
        let mut out = Self::zero(self.vars.iter().map(|l| f(*l)).collect(), self.grade);
        for (s, k) in &self.terms {
            out.add_term(s.iter().map(|l| f(*l)).collect(), *k);
        }
        out
    }
}

impl fmt::Display for ChowClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (s, k)) in self.terms.iter().enumerate() {
            let sign = if *k < 0 { "-" } else { "+" };
            if idx == 0 {
                if *k < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if k.abs() != 1 {
                write!(f, "{}*", k.abs())?;
            }
            write!(f, "H{}", fmt_set(s))?;
        }
        Ok(())
    }
}

/// `beta = sum_{|I|=3} H_I` on `labels`.
pub fn generic_orbit_class_on(labels: &LabelSet) -> Result<ChowClass> {
    if labels.len() < 3 {
        return Err(Error::TooFewMarkings(labels.len()));
    }
    ChowClass::from_terms(
        labels.clone(),
        3,
        subsets_of_size(labels, 3).into_iter().map(|s| (s, 1)),
    )
}

pub fn generic_orbit_class(n: usize) -> Result<ChowClass> {
    generic_orbit_class_on(&range_labels(n))
}

/// Class of the orbit closure of any configuration of type `p`: the 3-subsets
/// meeting each part at most once.
pub fn orbit_class_of_type(p: &SetPartition) -> Result<ChowClass> {
    if p.num_parts() < 3 {
        return Err(Error::TooDegenerateType);
    }
    let vars = p.ground_set();
    let terms = subsets_of_size(&vars, 3)
        .into_iter()
        .filter(|s| p.is_transversal(s))
        .map(|s| (s, 1));
    ChowClass::from_terms(vars, 3, terms)
}

/// `sum_I c(I) c'(I^c)`.
pub fn intersection_number(c: &ChowClass, c2: &ChowClass) -> Result<i64> {
    if c.vars != c2.vars {
        return Err(Error::AmbientMismatch);
    }
    let n = c.vars.len();
    if c.grade + c2.grade != n {
        return Err(Error::GradeMismatch(c.grade, c2.grade, n));
    }
    Ok(c.terms
        .iter()
        .map(|(s, k)| {
            let comp: LabelSet = c.vars.difference(s).copied().collect();
            k * c2.coefficient(&comp)
        })
        .sum())
}

/// Push forward along the projection `X^n -> X^J`.
pub fn pushforward_projection(c: &ChowClass, j: &LabelSet) -> Result<ChowClass> {
    if let Some(l) = j.difference(&c.vars).next() {
        return Err(Error::MissingLabel(*l));
    }
    let terms = c
        .terms
        .iter()
        .filter(|(s, _)| s.is_subset(j))
        .map(|(s, k)| (s.clone(), *k));
    ChowClass::from_terms(j.clone(), c.grade, terms)
}

/// Push forward along the embedding that repeats coordinate `v` on every
/// label of `targets[v]`. The target sets must be disjoint.
pub fn pushforward_diagonal_map(
    c: &ChowClass,
    targets: &BTreeMap<Label, LabelSet>,
) -> Result<ChowClass> {
    let mut vars = LabelSet::new();
    for v in &c.vars {
        let t = targets.get(v).ok_or(Error::MissingLabel(*v))?;
        if t.is_empty() || !t.is_disjoint(&vars) {
            return Err(Error::InvalidPartition);
        }
        vars.extend(t.iter().copied());
    }
    let mut out = ChowClass::zero(vars, c.grade);
    for (s, k) in &c.terms {
        let mut images: Vec<LabelSet> = vec![LabelSet::new()];
        for v in s {
            images = images
                .iter()
                .flat_map(|img| {
                    targets[v].iter().map(move |l| {
                        let mut img = img.clone();
                        img.insert(*l);
                        img
                    })
                })
                .collect();
        }
        for img in images {
            out.add_term(img, *k);
        }
    }
    Ok(out)
}

/// Push forward along `Delta_P`, matching the variables of `c` in increasing
/// order with the parts of `p`.
pub fn pushforward_diagonal(c: &ChowClass, p: &SetPartition) -> Result<ChowClass> {
    if c.vars.len() != p.num_parts() {
        return Err(Error::InvalidPartition);
    }
    let targets = c
        .vars
        .iter()
        .copied()
        .zip(p.parts().iter().cloned())
        .collect();
    pushforward_diagonal_map(c, &targets)
}

/// `i_{K*} c_K + i_{L*} c_L`, where `c_K` lives on `K + star`, `c_L` on
/// `L + star`, and the `star` coordinate of each side is the small diagonal
/// of the other side.
pub fn pushforward_glue(c_k: &ChowClass, c_l: &ChowClass, star: Label) -> Result<ChowClass> {
    let mut k = c_k.vars.clone();
    let mut l = c_l.vars.clone();
    if !k.remove(&star) {
        return Err(Error::MissingLabel(star));
    }
    if !l.remove(&star) {
        return Err(Error::MissingLabel(star));
    }
    if !k.is_disjoint(&l) {
        return Err(Error::OverlappingMarkingSets);
    }
    let side = |c: &ChowClass, own: &LabelSet, other: &LabelSet| {
        let mut targets: BTreeMap<Label, LabelSet> =
            own.iter().map(|x| (*x, LabelSet::from([*x]))).collect();
        targets.insert(star, other.clone());
        pushforward_diagonal_map(c, &targets)
    };
    side(c_k, &k, &l)?.add(&side(c_l, &l, &k)?)
}

/// Sum over components of the diagonal pushforward of the component's
/// generic orbit class.
pub fn tree_cycle_class(t: &StableTree) -> Result<ChowClass> {
    let mut total = ChowClass::zero(t.markings(), 3);
    for v in 0..t.num_vertices() {
        let p = t.component_type(v);
        let generic = generic_orbit_class(p.num_parts())?;
        total = total.add(&pushforward_diagonal(&generic, &p)?)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::configurations::set_partitions;
    use crate::label::all_subsets;
    use crate::trees::enumerate_stable_trees;

    fn s(v: &[u32]) -> LabelSet {
        v.iter().map(|x| Label(*x)).collect()
    }

    #[test]
    fn generic_counts() {
        assert_eq!(generic_orbit_class(3).unwrap().terms().len(), 1);
        assert_eq!(generic_orbit_class(4).unwrap().terms().len(), 4);
        assert_eq!(generic_orbit_class(5).unwrap().terms().len(), 10);
        assert!(generic_orbit_class(2).is_err());
    }

    #[test]
    fn orbit_class_examples() {
        let p: SetPartition = "1,2|3|4|5".parse().unwrap();
        assert_eq!(orbit_class_of_type(&p).unwrap().terms().len(), 7);
        let p: SetPartition = "1,2|3|4".parse().unwrap();
        let c = orbit_class_of_type(&p).unwrap();
        assert_eq!(
            c.terms().keys().cloned().collect::<Vec<_>>(),
            vec![s(&[1, 3, 4]), s(&[2, 3, 4])]
        );
        let p: SetPartition = "1,2|3,4".parse().unwrap();
        assert_eq!(orbit_class_of_type(&p), Err(Error::TooDegenerateType));
        let p = SetPartition::discrete(&range_labels(6));
        assert_eq!(
            orbit_class_of_type(&p).unwrap(),
            generic_orbit_class(6).unwrap()
        );
    }

    #[test]
    fn intersection_examples() {
        let v = range_labels(4);
        let h123 = ChowClass::basis(v.clone(), s(&[1, 2, 3])).unwrap();
        let h4 = ChowClass::basis(v.clone(), s(&[4])).unwrap();
        let h3 = ChowClass::basis(v.clone(), s(&[3])).unwrap();
        assert_eq!(intersection_number(&h123, &h4).unwrap(), 1);
        assert_eq!(intersection_number(&h123, &h3).unwrap(), 0);
        assert_eq!(
            intersection_number(&generic_orbit_class(4).unwrap(), &h4).unwrap(),
            1
        );
        assert!(matches!(
            intersection_number(&h123, &h123),
            Err(Error::GradeMismatch(3, 3, 4))
        ));
    }

    #[test]
    fn duality() {
        for n in 1..=5 {
            let v = range_labels(n);
            let subsets = all_subsets(&v);
            for i in &subsets {
                for j in &subsets {
                    if i.len() + j.len() != n {
                        continue;
                    }
                    let hi = ChowClass::basis(v.clone(), i.clone()).unwrap();
                    let hj = ChowClass::basis(v.clone(), j.clone()).unwrap();
                    let expect = i64::from(v.difference(i).copied().collect::<LabelSet>() == *j);
                    assert_eq!(intersection_number(&hi, &hj).unwrap(), expect);
                }
            }
        }
    }

    #[test]
    fn projection_examples() {
        let b5 = generic_orbit_class(5).unwrap();
        assert_eq!(
            pushforward_projection(&b5, &range_labels(4)).unwrap(),
            generic_orbit_class(4).unwrap()
        );
        let h = ChowClass::basis(range_labels(5), s(&[1, 2, 5])).unwrap();
        assert!(pushforward_projection(&h, &range_labels(4))
            .unwrap()
            .is_zero());
        let c = orbit_class_of_type(&"1,2|3|4|5".parse().unwrap()).unwrap();
        let j = s(&[1, 3, 4, 5]);
        assert_eq!(
            pushforward_projection(&c, &j).unwrap(),
            generic_orbit_class_on(&j).unwrap()
        );
    }

    #[test]
    fn projection_functorial() {
        let b = generic_orbit_class(6).unwrap();
        let j = s(&[1, 2, 4, 5, 6]);
        let j2 = s(&[2, 4, 6]);
        let twice = pushforward_projection(&pushforward_projection(&b, &j).unwrap(), &j2).unwrap();
        assert_eq!(twice, pushforward_projection(&b, &j2).unwrap());
    }

    #[test]
    fn diagonal_examples() {
        let h12 = ChowClass::basis(range_labels(2), s(&[1, 2])).unwrap();
        let p: SetPartition = "1,2|3".parse().unwrap();
        let out = pushforward_diagonal(&h12, &p).unwrap();
        let expect =
            ChowClass::from_terms(range_labels(3), 2, [(s(&[1, 3]), 1), (s(&[2, 3]), 1)]).unwrap();
        assert_eq!(out, expect);
        let b = generic_orbit_class(4).unwrap();
        assert_eq!(
            pushforward_diagonal(&b, &SetPartition::discrete(&range_labels(4))).unwrap(),
            b
        );
    }

    #[test]
    fn diagonal_matches_type_class() {
        for n in 3..=6 {
            for p in set_partitions(&range_labels(n)) {
                if p.num_parts() < 3 {
                    continue;
                }
                let pushed =
                    pushforward_diagonal(&generic_orbit_class(p.num_parts()).unwrap(), &p).unwrap();
                assert_eq!(pushed, orbit_class_of_type(&p).unwrap(), "{p}");
            }
        }
    }

    #[test]
    fn glue_examples() {
        let star = Label::STAR;
        let ck = generic_orbit_class_on(&s(&[1, 2, star.0])).unwrap();
        let cl = generic_orbit_class_on(&s(&[3, 4, 5, star.0])).unwrap();
        let out = pushforward_glue(&ck, &cl, star).unwrap();
        assert_eq!(out.grade(), 3);
        assert_eq!(out, generic_orbit_class(5).unwrap());
        let h12 = ChowClass::basis(s(&[1, 2, star.0]), s(&[1, 2])).unwrap();
        let zero = ChowClass::zero(s(&[3, 4, star.0]), 2);
        let out = pushforward_glue(&h12, &zero, star).unwrap();
        assert_eq!(out, ChowClass::basis(range_labels(4), s(&[1, 2])).unwrap());
    }

    #[test]
    fn tree_classes_are_beta() {
        for n in 3..=7 {
            let beta = generic_orbit_class(n).unwrap();
            for t in enumerate_stable_trees(n).unwrap() {
                assert_eq!(tree_cycle_class(&t).unwrap(), beta, "{t}");
            }
        }
    }

    #[test]
    fn two_vertex_component_classes() {
        let t = StableTree::new(vec![s(&[1, 2]), s(&[3, 4])], vec![(0, 1)]).unwrap();
        let k =
            pushforward_diagonal(&generic_orbit_class(3).unwrap(), &t.component_type(0)).unwrap();
        assert_eq!(k.terms().len(), 2);
        assert_eq!(tree_cycle_class(&t).unwrap().terms().len(), 4);
    }

    #[test]
    fn display() {
        let c =
            ChowClass::from_terms(range_labels(3), 2, [(s(&[1, 2]), 1), (s(&[1, 3]), -2)]).unwrap();
        assert_eq!(c.to_string(), "H{1,2} - 2*H{1,3}");
    }
}

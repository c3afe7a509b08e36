//! Multigraded Hilbert polynomials of orbit closures and of the nodal-curve
//! subschemes built from them.

use std::collections::BTreeMap;

use crate::configurations::SetPartition;
use crate::error::{Error, Result};
use crate::label::{range_labels, subsets_of_size, Label, LabelSet};
use crate::polynomials::MultilinearPoly;
use crate::trees::StableTree;

/// `prod_{i in labels} (1 + t_i)`.
pub fn ambient_hilbert_on(labels: &LabelSet) -> MultilinearPoly {
    labels
        .iter()
        .fold(MultilinearPoly::one(labels.clone()), |acc, l| {
            acc.multiply(&MultilinearPoly::linear_sum(&LabelSet::from([*l]), 1))
                .expect("distinct variables")
        })
}

pub fn ambient_hilbert(n: usize) -> MultilinearPoly {
    ambient_hilbert_on(&range_labels(n))
}

/// `sum_{|I| <= 3} prod_{i in I} t_i`, the Hilbert polynomial of a generic orbit closure.
pub fn generic_orbit_hilbert_on(labels: &LabelSet) -> Result<MultilinearPoly> {
    if labels.len() < 3 {
        return Err(Error::TooFewMarkings(labels.len()));
    }
    let terms = (0..=3)
        .flat_map(|k| subsets_of_size(labels, k))
        .map(|s| (s, 1.into()));
    Ok(MultilinearPoly::from_terms(labels.clone(), terms))
}

pub fn generic_orbit_hilbert(n: usize) -> Result<MultilinearPoly> {
    generic_orbit_hilbert_on(&range_labels(n))
}

/// `(1 + sum_K t_k)(1 + sum_L t_l)`, the Hilbert polynomial of `Delta_{K,L}`.
pub fn gluing_correction(k: &LabelSet, l: &LabelSet) -> Result<MultilinearPoly> {
    MultilinearPoly::linear_sum(k, 1).multiply(&MultilinearPoly::linear_sum(l, 1))
}

/// Hilbert polynomial of `i_K(Z_K) ∪ i_L(Z_L)` from those of `Z_K ⊆ X^{K+*}`
/// and `Z_L ⊆ X^{L+*}`: each side's `t_*` becomes the sum over the other side,
/// minus the polynomial of the common diagonal.
pub fn glued_hilbert(
    p_k: &MultilinearPoly,
    p_l: &MultilinearPoly,
    star: Label,
) -> Result<MultilinearPoly> {
    let mut k = p_k.vars().clone();
    let mut l = p_l.vars().clone();
    if !k.remove(&star) {
        return Err(Error::MissingLabel(star));
    }
    if !l.remove(&star) {
        return Err(Error::MissingLabel(star));
    }
    if !k.is_disjoint(&l) {
        return Err(Error::OverlappingMarkingSets);
    }
    let left = p_k.substitute_sum(star, &l)?;
    let right = p_l.substitute_sum(star, &k)?;
    Ok(&(&left + &right) - &gluing_correction(&k, &l)?)
}

/// Hilbert polynomial of the union of component orbit closures of a stable curve,
/// recursing on a leaf component.
pub fn tree_hilbert(t: &StableTree) -> Result<MultilinearPoly> {
    tree_hilbert_with(t, &mut |t: &StableTree| {
        let leaf = t.leaves()[0];
        t.edges()
            .iter()
            .position(|&(v, w)| v == leaf || w == leaf)
            .unwrap()
    })
}

/// Same recursion, with `choose_edge` picking the node to cut at every step.
pub fn tree_hilbert_with(
    t: &StableTree,
    choose_edge: &mut dyn FnMut(&StableTree) -> usize,
) -> Result<MultilinearPoly> {
    if t.num_vertices() == 1 {
        return generic_orbit_hilbert_on(&t.markings());
    }
    let star = Label::fresh(&t.markings());
    let (a, b) = t.split_at_edge(choose_edge(t), star)?;
    let pa = tree_hilbert_with(&a, choose_edge)?;
    let pb = tree_hilbert_with(&b, choose_edge)?;
    glued_hilbert(&pa, &pb, star)
}

/// Hilbert polynomial of `Delta_P(Z)` from that of `Z ⊆ X^l`: the `j`-th
/// variable of `q` (in increasing order) becomes the sum over the `j`-th part.
pub fn push_hilbert_along_partition(
    q: &MultilinearPoly,
    partition: &SetPartition,
) -> Result<MultilinearPoly> {
    if q.vars().len() != partition.num_parts() {
        return Err(Error::OutOfRange(format!(
            "{} variables for {} parts",
            q.vars().len(),
            partition.num_parts()
        )));
    }
    let map: BTreeMap<Label, LabelSet> = q
        .vars()
        .iter()
        .copied()
        .zip(partition.parts().iter().cloned())
        .collect();
    q.substitute(&map)
}

/// The three pieces of the special fibre of the degeneration used for the
/// generic Hilbert polynomial: the orbit closure of `x'` on the diagonal
/// `t_i = t_n`, the diagonal `Delta_{i,n,[n-1]\i}`, and their intersection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegenerationPieces {
    pub orbit_on_diagonal: MultilinearPoly,
    pub diagonal: MultilinearPoly,
    pub intersection: MultilinearPoly,
}

impl DegenerationPieces {
    /// `p' + p'' - p_Delta`.
    pub fn combined(&self) -> MultilinearPoly {
        &(&self.orbit_on_diagonal + &self.diagonal) - &self.intersection
    }
}

pub fn degeneration_pieces(n: usize, i: usize) -> Result<DegenerationPieces> {
    if n < 4 || i == 0 || i >= n {
        return Err(Error::IndexOutOfRange(format!("n = {n}, i = {i}")));
    }
    let (li, ln) = (Label(i as u32), Label(n as u32));
    let q = generic_orbit_hilbert(n - 1)?;
    let orbit_on_diagonal = q.substitute_sum(li, &LabelSet::from([li, ln]))?;
    let rest: LabelSet = range_labels(n)
        .into_iter()
        .filter(|l| *l != li && *l != ln)
        .collect();
    let rest_sum = MultilinearPoly::linear_sum(&rest, 1);
    let diagonal = MultilinearPoly::linear_sum(&LabelSet::from([li]), 1)
        .multiply(&MultilinearPoly::linear_sum(&LabelSet::from([ln]), 1))?
        .multiply(&rest_sum)?;
    let intersection =
        MultilinearPoly::linear_sum(&LabelSet::from([li, ln]), 1).multiply(&rest_sum)?;
    Ok(DegenerationPieces {
        orbit_on_diagonal,
        diagonal,
        intersection,
    })
}

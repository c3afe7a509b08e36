//! The operad `P(I) = prod_{|J|=4} M_{0,4}-bar` of 4-subset signatures, the
//! signature morphism from decorated trees, and executable checks of the
//! procyclic-operad axioms for `P`, for decorated trees, and for Chow classes.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::chow::{pushforward_glue, pushforward_projection, tree_cycle_class, ChowClass};
use crate::error::{Error, Result};
use crate::label::{range_labels, subsets_of_size, Label, LabelSet};
use crate::sampling::{random_point, rng};
use crate::trees::{
    enumerate_stable_trees_on, m04_point_of, DecoratedStableTree, M04Point, StableTree,
};

/// An element of `P(I)`: a point of `M_{0,4}-bar` for every 4-subset of `I`.
/// A 3-element label set has the empty signature.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Signature {
    labels: LabelSet,
    values: BTreeMap<LabelSet, M04Point>,
}

fn sorted4(s: &LabelSet) -> [Label; 4] {
    let v: Vec<Label> = s.iter().copied().collect();
    [v[0], v[1], v[2], v[3]]
}

impl Signature {
    /// Checks that `values` is keyed by exactly the 4-subsets of `labels`.
    pub fn new(labels: LabelSet, values: BTreeMap<LabelSet, M04Point>) -> Result<Self> {
        if labels.len() < 3 {
            return Err(Error::TooFewMarkings(labels.len()));
        }
        let expected = subsets_of_size(&labels, 4);
        if values.len() != expected.len() || expected.iter().any(|j| !values.contains_key(j)) {
            return Err(Error::OutOfRange(
                "signature is not total on 4-subsets".into(),
            ));
        }
        for (j, v) in &values {
            if let M04Point::Boundary(pairs) = v {
                let split: LabelSet = pairs.iter().flatten().copied().collect();
                if split != *j {
                    return Err(Error::InvalidPartition);
                }
            }
        }
        Ok(Signature { labels, values })
    }

    pub fn labels(&self) -> &LabelSet {
        &self.labels
    }

    pub fn values(&self) -> &BTreeMap<LabelSet, M04Point> {
        &self.values
    }

    pub fn get(&self, j: &LabelSet) -> Option<&M04Point> {
        self.values.get(j)
    }

    /// Boundary values kept, interior values forgotten.
    pub fn pattern(&self) -> BTreeMap<LabelSet, Option<M04Point>> {
        self.values
            .iter()
            .map(|(j, v)| (j.clone(), v.is_boundary().then(|| v.clone())))
            .collect()
    }

    pub fn is_interior(&self) -> bool {
        self.values.values().all(|v| !v.is_boundary())
    }

    /// Transport along an injective relabelling.
    pub fn relabel(&self, f: impl Fn(Label) -> Label) -> Signature {
        let values = self
            .values
            .iter()
            .map(|(j, v)| {
                (
                    j.iter().map(|l| f(*l)).collect(),
                    v.relabel(&sorted4(j), &f),
                )
            })
            .collect();
        Signature {
            labels: self.labels.iter().map(|l| f(*l)).collect(),
            values,
        }
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, v) in &self.values {
            writeln!(f, "{}: {v}", crate::label::fmt_set(j))?;
        }
        Ok(())
    }
}

/// Value at each 4-subset `J` is the stabilization of `t` to `J`.
pub fn signature_of(t: &DecoratedStableTree) -> Result<Signature> {
    let labels = t.markings();
    if labels.len() < 3 {
        return Err(Error::TooFewMarkings(labels.len()));
    }
    let values = subsets_of_size(&labels, 4)
        .into_iter()
        .map(|j| {
            let v = m04_point_of(&t.stabilize(&j)?)?;
            Ok((j, v))
        })
        .collect::<Result<_>>()?;
    Ok(Signature { labels, values })
}

pub fn p_project(s: &Signature, k: &LabelSet) -> Result<Signature> {
    if k.len() < 3 {
        return Err(Error::TooFewMarkings(k.len()));
    }
    if let Some(l) = k.difference(&s.labels).next() {
        return Err(Error::MissingLabel(*l));
    }
    let values = s
        .values
        .iter()
        .filter(|(j, _)| j.is_subset(k))
        .map(|(j, v)| (j.clone(), v.clone()))
        .collect();
    Ok(Signature {
        labels: k.clone(),
        values,
    })
}

/// Composition `P(I + star) x P(J + star) -> P(I + J)`.
pub fn p_compose(x: &Signature, y: &Signature, star: Label) -> Result<Signature> {
    let mut i = x.labels.clone();
    let mut j = y.labels.clone();
    if !i.remove(&star) {
        return Err(Error::MissingLabel(star));
    }
    if !j.remove(&star) {
        return Err(Error::MissingLabel(star));
    }
    if !i.is_disjoint(&j) {
        return Err(Error::OverlappingLabels);
    }
    let labels: LabelSet = i.union(&j).copied().collect();
    // value of `s` at `part + star`, with star renamed to `other`
    let through_star = |s: &Signature, part: LabelSet, other: Label| {
        let mut key = part;
        key.insert(star);
        s.values[&key].relabel(&sorted4(&key), |l| if l == star { other } else { l })
    };
    let values = subsets_of_size(&labels, 4)
        .into_iter()
        .map(|q| {
            let qi: LabelSet = q.intersection(&i).copied().collect();
            let qj: LabelSet = q.intersection(&j).copied().collect();
            let v = match (qi.len(), qj.len()) {
                (4, _) => x.values[&q].clone(),
                (_, 4) => y.values[&q].clone(),
                (3, 1) => through_star(x, qi, *qj.iter().next().unwrap()),
                (1, 3) => through_star(y, qj, *qi.iter().next().unwrap()),
                _ => M04Point::boundary(&qi, &qj)?,
            };
            Ok((q, v))
        })
        .collect::<Result<_>>()?;
    Ok(Signature { labels, values })
}

/// A random element of `P(labels)`; about a quarter of the values are boundary points.
pub fn random_signature<R: Rng>(labels: &LabelSet, rng: &mut R) -> Signature {
    let values = subsets_of_size(labels, 4)
        .into_iter()
        .map(|j| {
            let v = if rng.gen_ratio(1, 4) {
                let ls = sorted4(&j);
                let partner = ls[rng.gen_range(1..4)];
                let a = LabelSet::from([ls[0], partner]);
                let b: LabelSet = j.difference(&a).copied().collect();
                M04Point::boundary(&a, &b).unwrap()
            } else {
                loop {
                    let p = random_point(rng);
                    if !p.is_infinity() && p.a().bits() > 0 && p.a() != p.b() {
                        break M04Point::Interior(p);
                    }
                }
            };
            (j, v)
        })
        .collect();
    Signature {
        labels: labels.clone(),
        values,
    }
}

// ---------------------------------------------------------------------------
// axiom checks

/// The structure maps of a procyclic operad on a concrete element type.
trait Procyclic {
    type Elem: Clone + fmt::Debug;
    const NAME: &'static str;
    fn project(x: &Self::Elem, i: &LabelSet) -> Result<Self::Elem>;
    fn compose(x: &Self::Elem, y: &Self::Elem, star: Label) -> Result<Self::Elem>;
    fn relabel(x: &Self::Elem, f: &dyn Fn(Label) -> Label) -> Self::Elem;
    fn same(a: &Self::Elem, b: &Self::Elem) -> bool;
}

struct POperad;
struct TreeOperad;
struct ChowOperad;

impl Procyclic for POperad {
    type Elem = Signature;
    const NAME: &'static str = "P";
    fn project(x: &Signature, i: &LabelSet) -> Result<Signature> {
        p_project(x, i)
    }
    fn compose(x: &Signature, y: &Signature, star: Label) -> Result<Signature> {
        p_compose(x, y, star)
    }
    fn relabel(x: &Signature, f: &dyn Fn(Label) -> Label) -> Signature {
        x.relabel(f)
    }
    fn same(a: &Signature, b: &Signature) -> bool {
        a == b
    }
}

impl Procyclic for TreeOperad {
    type Elem = DecoratedStableTree;
    const NAME: &'static str = "tree";
    fn project(x: &DecoratedStableTree, i: &LabelSet) -> Result<DecoratedStableTree> {
        x.stabilize(i)
    }
    fn compose(
        x: &DecoratedStableTree,
        y: &DecoratedStableTree,
        star: Label,
    ) -> Result<DecoratedStableTree> {
        x.glue(y, star)
    }
    fn relabel(x: &DecoratedStableTree, f: &dyn Fn(Label) -> Label) -> DecoratedStableTree {
        x.relabel(f)
    }
    fn same(a: &DecoratedStableTree, b: &DecoratedStableTree) -> bool {
        a.same_point(b)
    }
}

impl Procyclic for ChowOperad {
    type Elem = ChowClass;
    const NAME: &'static str = "chow";
    fn project(x: &ChowClass, i: &LabelSet) -> Result<ChowClass> {
        pushforward_projection(x, i)
    }
    fn compose(x: &ChowClass, y: &ChowClass, star: Label) -> Result<ChowClass> {
        pushforward_glue(x, y, star)
    }
    fn relabel(x: &ChowClass, f: &dyn Fn(Label) -> Label) -> ChowClass {
        x.relabel(f)
    }
    fn same(a: &ChowClass, b: &ChowClass) -> bool {
        a == b
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AxiomConfig {
    /// Largest label set `K + L` that is checked.
    pub max_labels: usize,
    /// Random instances per partition.
    pub samples: usize,
    pub seed: u64,
}

impl Default for AxiomConfig {
    fn default() -> Self {
        AxiomConfig {
            max_labels: 7,
            samples: 1,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub checks: usize,
    pub violations: usize,
    /// Keyed by `operad/check`.
    pub by_check: BTreeMap<String, Tally>,
    /// Descriptions of the first few violations.
    pub failures: Vec<String>,
}

impl AxiomReport {
    fn record(&mut self, operad: &str, check: &str, ok: bool, detail: impl FnOnce() -> String) {
        let tally = self
            .by_check
            .entry(format!("{operad}/{check}"))
            .or_default();
        self.checks += 1;
        if ok {
            tally.passed += 1;
        } else {
            tally.failed += 1;
            self.violations += 1;
            if self.failures.len() < 20 {
                self.failures
                    .push(format!("{operad}/{check}: {}", detail()));
            }
        }
    }

    fn record_result<T>(
        &mut self,
        operad: &str,
        check: &str,
        r: Result<T>,
        ok: impl FnOnce(T) -> bool,
        detail: impl FnOnce() -> String,
    ) {
        match r {
            Ok(v) => {
                let pass = ok(v);
                self.record(operad, check, pass, detail)
            }
            Err(e) => self.record(operad, check, false, || format!("{} ({e})", detail())),
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// The three stabilization/gluing diagrams plus projection functoriality for
/// one pair `x` on `K + star`, `y` on `L + star`.
fn check_diagrams<O: Procyclic>(
    x: &O::Elem,
    y: &O::Elem,
    k: &LabelSet,
    l: &LabelSet,
    star: Label,
    report: &mut AxiomReport,
) {
    let glued = match O::compose(x, y, star) {
        Ok(g) => g,
        Err(e) => {
            report.record(O::NAME, "compose", false, || {
                format!("K={k:?} L={l:?}: {e}")
            });
            return;
        }
    };
    let n: LabelSet = k.union(l).copied().collect();
    let with_star = |s: &LabelSet| {
        let mut s = s.clone();
        s.insert(star);
        s
    };
    for size in 3..=n.len() {
        for i in subsets_of_size(&n, size) {
            let ik: LabelSet = i.intersection(k).copied().collect();
            let il: LabelSet = i.intersection(l).copied().collect();
            let lhs = O::project(&glued, &i);
            let desc = || format!("K={k:?} L={l:?} I={i:?}");
            let (name, rhs) = match (ik.len(), il.len()) {
                (a, b) if a >= 2 && b >= 2 => (
                    "both_sides",
                    O::project(x, &with_star(&ik)).and_then(|xp| {
                        O::project(y, &with_star(&il)).and_then(|yp| O::compose(&xp, &yp, star))
                    }),
                ),
                (_, 0) => ("one_side", O::project(x, &i)),
                (0, _) => ("one_side", O::project(y, &i)),
                (_, 1) => {
                    let m = *il.iter().next().unwrap();
                    let f = move |q: Label| if q == star { m } else { q };
                    (
                        "through_node",
                        O::project(x, &with_star(&ik)).map(|p| O::relabel(&p, &f)),
                    )
                }
                _ => {
                    let m = *ik.iter().next().unwrap();
                    let f = move |q: Label| if q == star { m } else { q };
                    (
                        "through_node",
                        O::project(y, &with_star(&il)).map(|p| O::relabel(&p, &f)),
                    )
                }
            };
            let pair = lhs.and_then(|a| rhs.map(|b| (a, b)));
            report.record_result(O::NAME, name, pair, |(a, b)| O::same(&a, &b), desc);
        }
    }
    // projection functoriality along a chain N ⊇ J ⊇ I
    for j in subsets_of_size(&n, n.len() - 1) {
        if j.len() < 4 {
            continue;
        }
        let i: LabelSet = j.iter().copied().skip(1).collect();
        let twice = O::project(&glued, &j).and_then(|p| O::project(&p, &i));
        let once = O::project(&glued, &i);
        let pair = twice.and_then(|a| once.map(|b| (a, b)));
        report.record_result(
            O::NAME,
            "projection_functorial",
            pair,
            |(a, b)| O::same(&a, &b),
            || format!("J={j:?} I={i:?}"),
        );
    }
    // commutativity
    let swapped = O::compose(y, x, star);
    report.record_result(
        O::NAME,
        "commutative",
        swapped,
        |s| O::same(&s, &glued),
        || format!("K={k:?} L={l:?}"),
    );
}

fn check_associativity<O: Procyclic>(
    x: &O::Elem,
    y: &O::Elem,
    z: &O::Elem,
    s: Label,
    t: Label,
    report: &mut AxiomReport,
) {
    let left = O::compose(x, y, s).and_then(|xy| O::compose(&xy, z, t));
    let right = O::compose(y, z, t).and_then(|yz| O::compose(x, &yz, s));
    let pair = left.and_then(|a| right.map(|b| (a, b)));
    report.record_result(
        O::NAME,
        "associative",
        pair,
        |(a, b)| O::same(&a, &b),
        || format!("{x:?} {y:?} {z:?}"),
    );
}

/// Ordered splits of `n` into parts of the given minimum sizes.
fn ordered_splits(n: &LabelSet, mins: &[usize]) -> Vec<Vec<LabelSet>> {
    let items: Vec<Label> = n.iter().copied().collect();
    let parts = mins.len();
    let total = parts.pow(items.len() as u32);
    let mut out = Vec::new();
    for mut code in 0..total {
        let mut split = vec![LabelSet::new(); parts];
        for l in &items {
            split[code % parts].insert(*l);
            code /= parts;
        }
        if split.iter().zip(mins).all(|(s, m)| s.len() >= *m) {
            out.push(split);
        }
    }
    out
}

/// Source of random elements for every operad, with trees drawn uniformly
/// among combinatorial types.
struct Instances {
    rng: crate::sampling::SeededRng,
    trees: HashMap<usize, Vec<StableTree>>,
}

impl Instances {
    fn tree(&mut self, labels: &LabelSet) -> StableTree {
        let m = labels.len();
        let pool = self
            .trees
            .entry(m)
            .or_insert_with(|| enumerate_stable_trees_on(&range_labels(m)).expect("3..=8 labels"));
        let t = pool.choose(&mut self.rng).unwrap().clone();
        let map: BTreeMap<Label, Label> = range_labels(m)
            .into_iter()
            .zip(labels.iter().copied())
            .collect();
        t.relabel(|l| map[&l])
    }

    fn decorated(&mut self, labels: &LabelSet) -> DecoratedStableTree {
        let t = self.tree(labels);
        t.random_decoration(&mut self.rng)
    }

    fn signature(&mut self, labels: &LabelSet) -> Signature {
        random_signature(labels, &mut self.rng)
    }

    /// Random grade-3 class with small coefficients.
    fn class(&mut self, labels: &LabelSet) -> ChowClass {
        let terms: Vec<(LabelSet, i64)> = subsets_of_size(labels, 3)
            .into_iter()
            .map(|s| (s, self.rng.gen_range(-2..=2)))
            .collect();
        ChowClass::from_terms(labels.clone(), 3, terms).unwrap()
    }
}

fn plus(s: &LabelSet, extra: &[Label]) -> LabelSet {
    let mut s = s.clone();
    s.extend(extra.iter().copied());
    s
}

/// Runs every axiom check on label sets `{1..n}` for `4 <= n <= max_labels`,
/// over all ordered splits. Includes the morphism squares for the signature
/// map (trees to `P`) and the cycle-class map (trees to Chow classes).
pub fn check_procyclic_axioms(config: &AxiomConfig) -> AxiomReport {
    let mut report = AxiomReport::default();
    let mut inst = Instances {
        rng: rng(config.seed),
        trees: HashMap::new(),
    };
    let s = Label::STAR;
    let t = Label::fresh(&LabelSet::from([s]));

    for n in 4..=config.max_labels {
        let labels = range_labels(n);
        for split in ordered_splits(&labels, &[2, 2]) {
            let (k, l) = (&split[0], &split[1]);
            let (ks, ls) = (plus(k, &[s]), plus(l, &[s]));
            for _ in 0..config.samples {
                let (x, y) = (inst.signature(&ks), inst.signature(&ls));
                check_diagrams::<POperad>(&x, &y, k, l, s, &mut report);

                let (tx, ty) = (inst.decorated(&ks), inst.decorated(&ls));
                check_diagrams::<TreeOperad>(&tx, &ty, k, l, s, &mut report);
                check_morphism_squares(&tx, &ty, s, &mut report);

                let (cx, cy) = (inst.class(&ks), inst.class(&ls));
                check_diagrams::<ChowOperad>(&cx, &cy, k, l, s, &mut report);
            }
        }
        for split in ordered_splits(&labels, &[2, 1, 2]) {
            let (a, b, c) = (
                plus(&split[0], &[s]),
                plus(&split[1], &[s, t]),
                plus(&split[2], &[t]),
            );
            for _ in 0..config.samples {
                let (x, y, z) = (inst.signature(&a), inst.signature(&b), inst.signature(&c));
                check_associativity::<POperad>(&x, &y, &z, s, t, &mut report);
                let (x, y, z) = (inst.decorated(&a), inst.decorated(&b), inst.decorated(&c));
                check_associativity::<TreeOperad>(&x, &y, &z, s, t, &mut report);
                let (x, y, z) = (inst.class(&a), inst.class(&b), inst.class(&c));
                check_associativity::<ChowOperad>(&x, &y, &z, s, t, &mut report);
            }
        }
    }
    report
}

/// Signature and cycle-class maps commute with gluing and with projection.
fn check_morphism_squares(
    x: &DecoratedStableTree,
    y: &DecoratedStableTree,
    star: Label,
    report: &mut AxiomReport,
) {
    let desc = || format!("{} + {}", x.tree(), y.tree());
    let glued = match x.glue(y, star) {
        Ok(g) => g,
        Err(e) => return report.record("morphism", "glue", false, || format!("{}: {e}", desc())),
    };
    let sig_square = signature_of(&glued).and_then(|lhs| {
        let rhs = p_compose(&signature_of(x)?, &signature_of(y)?, star)?;
        Ok(lhs == rhs)
    });
    report.record_result("signature", "compose_square", sig_square, |ok| ok, desc);

    let cls_square = tree_cycle_class(&glued.tree()).and_then(|lhs| {
        let rhs = pushforward_glue(
            &tree_cycle_class(&x.tree())?,
            &tree_cycle_class(&y.tree())?,
            star,
        )?;
        Ok(lhs == rhs)
    });
    report.record_result("cycle_class", "compose_square", cls_square, |ok| ok, desc);

    let full = glued.markings();
    let sig = signature_of(&glued);
    let cls = tree_cycle_class(&glued.tree());
    for i in subsets_of_size(&full, full.len() - 1) {
        let nat = sig
            .as_ref()
            .map_err(Clone::clone)
            .and_then(|sig| Ok(p_project(sig, &i)? == signature_of(&glued.stabilize(&i)?)?));
        report.record_result(
            "signature",
            "naturality",
            nat,
            |ok| ok,
            || format!("{} to {i:?}", glued.tree()),
        );
        let nat = cls.as_ref().map_err(Clone::clone).and_then(|cls| {
            Ok(pushforward_projection(cls, &i)? == tree_cycle_class(&glued.tree().stabilize(&i)?)?)
        });
        report.record_result(
            "cycle_class",
            "naturality",
            nat,
            |ok| ok,
            || format!("{} to {i:?}", glued.tree()),
        );
    }
}

//! Stable marked genus-0 curves as trees of components.
//!
//! A [`StableTree`] is the combinatorial type: vertices are components
//! carrying markings, edges are nodes. A [`DecoratedStableTree`] adds an
//! explicit position on each component for every marking and node branch,
//! which makes it a rational point of the moduli space. Each component uses
//! its own chart; positions on different components are never compared
//! directly.
//!
//! Both kinds are kept in a canonical form: the root is the vertex holding
//! the least marking, vertices are numbered in preorder with children visited
//! by least marking in their subtree, and edge `k` joins vertex `k + 1` to its
//! parent. Structural equality of bare trees is therefore isomorphism.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::Rng;

use crate::configurations::{cross_ratio, SetPartition};
use crate::error::{Error, Result, Violation};
use crate::exact_geometry::{mobius_from_triples, Configuration, ProjPoint};
use crate::label::{Label, LabelSet};
use crate::sampling::random_distinct_points;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Edge<P> {
    v: usize,
    w: usize,
    pos_v: P,
    pos_w: P,
}

impl<P: Clone> Edge<P> {
    fn other(&self, x: usize) -> usize {
        if self.v == x {
            self.w
        } else {
            self.v
        }
    }

    fn pos_at(&self, x: usize) -> &P {
        if self.v == x {
            &self.pos_v
        } else {
            &self.pos_w
        }
    }
}

/// Shared representation. `P = ()` for bare trees, `ProjPoint` for decorated ones.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Graph<P> {
    marks: Vec<BTreeMap<Label, P>>,
    edges: Vec<Edge<P>>,
}

/// Order in which unstable vertices are contracted during stabilization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ContractionOrder {
    #[default]
    FirstUnstable,
    LastUnstable,
}

impl<P: Clone + Ord> Graph<P> {
    fn markings(&self) -> LabelSet {
        self.marks.iter().flat_map(|m| m.keys().copied()).collect()
    }

    fn incident(&self, v: usize) -> impl Iterator<Item = &Edge<P>> {
        self.edges.iter().filter(move |e| e.v == v || e.w == v)
    }

    fn degree(&self, v: usize) -> usize {
        self.incident(v).count()
    }

    fn validate(&self) -> std::result::Result<(), Violation> {
        let n = self.marks.len();
        if n == 0 {
            return Err(Violation::Empty);
        }
        for (i, e) in self.edges.iter().enumerate() {
            if e.v >= n || e.w >= n {
                return Err(Violation::EdgeOutOfRange(i));
            }
            if e.v == e.w {
                return Err(Violation::SelfLoop(i));
            }
        }
        let mut seen = LabelSet::new();
        for m in &self.marks {
            for l in m.keys() {
                if !seen.insert(*l) {
                    return Err(Violation::DuplicateMarking(*l));
                }
            }
        }
        // union-find for cycles and connectivity
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for e in &self.edges {
            let (a, b) = (find(&mut parent, e.v), find(&mut parent, e.w));
            if a == b {
                return Err(Violation::Cycle);
            }
            parent[a] = b;
        }
        let root = find(&mut parent, 0);
        if (1..n).any(|v| find(&mut parent, v) != root) {
            return Err(Violation::Disconnected);
        }
        for v in 0..n {
            let special = self.marks[v].len() + self.degree(v);
            if special < 3 {
                return Err(Violation::Unstable { vertex: v, special });
            }
        }
        Ok(())
    }

    /// Reorders a valid tree into canonical form.
    fn canonicalize(self) -> Self {
        let n = self.marks.len();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, e) in self.edges.iter().enumerate() {
            adj[e.v].push(i);
            adj[e.w].push(i);
        }
        let root = (0..n)
            .filter(|&v| !self.marks[v].is_empty())
            .min_by_key(|&v| *self.marks[v].keys().next().unwrap())
            .expect("a stable tree has markings");

        // parent edge and subtree minimum, rooted at `root`
        let mut order = vec![root];
        let mut parent_edge = vec![usize::MAX; n];
        let mut visited = vec![false; n];
        visited[root] = true;
        let mut i = 0;
        while i < order.len() {
            let v = order[i];
            for &e in &adj[v] {
                let w = self.edges[e].other(v);
                if !visited[w] {
                    visited[w] = true;
                    parent_edge[w] = e;
                    order.push(w);
                }
            }
            i += 1;
        }
        let mut sub_min: Vec<Label> = (0..n)
            .map(|v| self.marks[v].keys().next().copied().unwrap_or(Label::STAR))
            .collect();
        for &v in order.iter().rev() {
            if v != root {
                let p = self.edges[parent_edge[v]].other(v);
                sub_min[p] = sub_min[p].min(sub_min[v]);
            }
        }

        let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &v in &order {
            if v != root {
                children[self.edges[parent_edge[v]].other(v)].push(v);
            }
        }
        for c in &mut children {
            c.sort_by_key(|&w| sub_min[w]);
        }
        let mut pre = Vec::with_capacity(n);
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            pre.push(v);
            for &w in children[v].iter().rev() {
                stack.push(w);
            }
        }
        let mut new_index = vec![0; n];
        for (k, &v) in pre.iter().enumerate() {
            new_index[v] = k;
        }
        let marks = pre.iter().map(|&v| self.marks[v].clone()).collect();
        let edges = pre[1..]
            .iter()
            .map(|&child| {
                let e = &self.edges[parent_edge[child]];
                let p = e.other(child);
                Edge {
                    v: new_index[p],
                    w: new_index[child],
                    pos_v: e.pos_at(p).clone(),
                    pos_w: e.pos_at(child).clone(),
                }
            })
            .collect();
        Graph { marks, edges }
    }

    /// Markings on the `w` side of each edge.
    fn edge_sides(&self) -> Vec<LabelSet> {
        (0..self.edges.len())
            .map(|e| self.far_side(e, self.edges[e].v))
            .collect()
    }

    /// Markings reachable through edge `e` starting from endpoint `from`, not
    /// counting those at `from`.
    fn far_side(&self, e: usize, from: usize) -> LabelSet {
        let start = self.edges[e].other(from);
        let mut out = LabelSet::new();
        let mut stack = vec![(start, from)];
        while let Some((v, prev)) = stack.pop() {
            out.extend(self.marks[v].keys().copied());
            for f in self.incident(v) {
                let w = f.other(v);
                if w != prev {
                    stack.push((w, v));
                }
            }
        }
        out
    }

    fn glue(&self, other: &Self, star: Label) -> Result<Self> {
        let find_star = |g: &Self| {
            g.marks
                .iter()
                .position(|m| m.contains_key(&star))
                .ok_or(Error::MissingLabel(star))
        };
        let (va, vb) = (find_star(self)?, find_star(other)?);
        let mut left = self.markings();
        left.remove(&star);
        let mut right = other.markings();
        right.remove(&star);
        if !left.is_disjoint(&right) {
            return Err(Error::OverlappingMarkingSets);
        }
        let offset = self.marks.len();
        let mut marks: Vec<_> = self.marks.iter().chain(&other.marks).cloned().collect();
        let pos_a = marks[va].remove(&star).unwrap();
        let pos_b = marks[offset + vb].remove(&star).unwrap();
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|e| Edge {
            v: e.v + offset,
            w: e.w + offset,
            pos_v: e.pos_v.clone(),
            pos_w: e.pos_w.clone(),
        }));
        edges.push(Edge {
            v: va,
            w: offset + vb,
            pos_v: pos_a,
            pos_w: pos_b,
        });
        let g = Graph { marks, edges };
        debug_assert!(g.validate().is_ok());
        Ok(g.canonicalize())
    }

    fn stabilize(&self, keep: &LabelSet, order: ContractionOrder) -> Result<Self> {
        if keep.len() < 3 {
            return Err(Error::TooFewMarkings(keep.len()));
        }
        let all = self.markings();
        if let Some(l) = keep.iter().find(|l| !all.contains(l)) {
            return Err(Error::MissingLabel(*l));
        }
        let mut verts: Vec<Option<BTreeMap<Label, P>>> = self
            .marks
            .iter()
            .map(|m| {
                Some(
                    m.iter()
                        .filter(|(l, _)| keep.contains(l))
                        .map(|(l, p)| (*l, p.clone()))
                        .collect(),
                )
            })
            .collect();
        let mut edges: Vec<Option<Edge<P>>> = self.edges.iter().cloned().map(Some).collect();

        loop {
            let special =
                |v: usize, verts: &[Option<BTreeMap<Label, P>>], edges: &[Option<Edge<P>>]| {
                    verts[v].as_ref().map(|m| {
                        m.len()
                            + edges
                                .iter()
                                .flatten()
                                .filter(|e| e.v == v || e.w == v)
                                .count()
                    })
                };
            let unstable =
                (0..verts.len()).filter(|&v| special(v, &verts, &edges).is_some_and(|s| s < 3));
            let v = match order {
                ContractionOrder::FirstUnstable => unstable.min(),
                ContractionOrder::LastUnstable => unstable.max(),
            };
            let Some(v) = v else { break };
            let inc: Vec<usize> = (0..edges.len())
                .filter(|&i| edges[i].as_ref().is_some_and(|e| e.v == v || e.w == v))
                .collect();
            let vmarks = verts[v].take().unwrap();
            match (vmarks.len(), inc.len()) {
                // node - v - node: the two branches become one node
                (0, 2) => {
                    let e1 = edges[inc[0]].take().unwrap();
                    let e2 = edges[inc[1]].take().unwrap();
                    let (u, w) = (e1.other(v), e2.other(v));
                    edges.push(Some(Edge {
                        v: u,
                        w,
                        pos_v: e1.pos_at(u).clone(),
                        pos_w: e2.pos_at(w).clone(),
                    }));
                }
                // marking - v - node: the marking moves to the node's position
                (1, 1) => {
                    let e = edges[inc[0]].take().unwrap();
                    let u = e.other(v);
                    let (l, _) = vmarks.into_iter().next().unwrap();
                    verts[u].as_mut().unwrap().insert(l, e.pos_at(u).clone());
                }
                // dangling component: drop it and its node
                (0, 1) => {
                    edges[inc[0]] = None;
                }
                (m, d) => unreachable!("vertex with {m} markings and {d} nodes after forgetting"),
            }
        }

        let alive: Vec<usize> = (0..verts.len()).filter(|&v| verts[v].is_some()).collect();
        let mut index = vec![usize::MAX; verts.len()];
        for (k, &v) in alive.iter().enumerate() {
            index[v] = k;
        }
        let marks = alive.iter().map(|&v| verts[v].clone().unwrap()).collect();
        let edges = edges
            .into_iter()
            .flatten()
            .map(|e| Edge {
                v: index[e.v],
                w: index[e.w],
                ..e
            })
            .collect();
        let g = Graph { marks, edges };
        debug_assert!(g.validate().is_ok(), "{:?}", g.validate());
        Ok(g.canonicalize())
    }

    /// Cuts edge `e`; returns the `v`-side and `w`-side trees, each with the
    /// node replaced by a marking `star`.
    fn split(&self, e: usize, star: Label) -> Result<(Self, Self)> {
        if e >= self.edges.len() {
            return Err(Error::IndexOutOfRange(format!("edge {e}")));
        }
        if self.markings().contains(&star) {
            return Err(Error::OverlappingLabels);
        }
        let cut = &self.edges[e];
        let side = |root: usize, pos: &P| {
            // collect vertices on root's side
            let mut vs = vec![root];
            let mut stack = vec![(root, usize::MAX)];
            while let Some((v, prev)) = stack.pop() {
                for (i, f) in self.edges.iter().enumerate() {
                    if i == e || !(f.v == v || f.w == v) {
                        continue;
                    }
                    let w = f.other(v);
                    if w != prev {
                        vs.push(w);
                        stack.push((w, v));
                    }
                }
            }
            vs.sort_unstable();
            let index: BTreeMap<usize, usize> =
                vs.iter().enumerate().map(|(k, &v)| (v, k)).collect();
            let mut marks: Vec<_> = vs.iter().map(|&v| self.marks[v].clone()).collect();
            marks[index[&root]].insert(star, pos.clone());
            let edges = self
                .edges
                .iter()
                .enumerate()
                .filter(|(i, f)| *i != e && index.contains_key(&f.v))
                .map(|(_, f)| Edge {
                    v: index[&f.v],
                    w: index[&f.w],
                    pos_v: f.pos_v.clone(),
                    pos_w: f.pos_w.clone(),
                })
                .collect();
            Graph { marks, edges }.canonicalize()
        };
        Ok((side(cut.v, &cut.pos_v), side(cut.w, &cut.pos_w)))
    }

    fn relabel(&self, f: &impl Fn(Label) -> Label) -> Self {
        let marks = self
            .marks
            .iter()
            .map(|m| m.iter().map(|(l, p)| (f(*l), p.clone())).collect())
            .collect();
        Graph {
            marks,
            edges: self.edges.clone(),
        }
        .canonicalize()
    }

    fn bare(&self) -> Graph<()> {
        Graph {
            marks: self
                .marks
                .iter()
                .map(|m| m.keys().map(|l| (*l, ())).collect())
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| Edge {
                    v: e.v,
                    w: e.w,
                    pos_v: (),
                    pos_w: (),
                })
                .collect(),
        }
    }
}

// ---------------------------------------------------------------------------

/// Combinatorial type of a stable marked genus-0 curve.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StableTree {
    g: Graph<()>,
}

/// Checks the stable-tree invariants for raw vertex/edge data, naming the first failure.
pub fn validate(
    vertices: &[LabelSet],
    edges: &[(usize, usize)],
) -> std::result::Result<(), Violation> {
    raw_graph(vertices, edges).validate()
}

fn raw_graph(vertices: &[LabelSet], edges: &[(usize, usize)]) -> Graph<()> {
    Graph {
        marks: vertices
            .iter()
            .map(|s| s.iter().map(|l| (*l, ())).collect())
            .collect(),
        edges: edges
            .iter()
            .map(|&(v, w)| Edge {
                v,
                w,
                pos_v: (),
                pos_w: (),
            })
            .collect(),
    }
}

impl StableTree {
    pub fn new(vertices: Vec<LabelSet>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let g = raw_graph(&vertices, &edges);
        g.validate()?;
        Ok(StableTree {
            g: g.canonicalize(),
        })
    }

    pub fn one_vertex(labels: LabelSet) -> Result<Self> {
        Self::new(vec![labels], vec![])
    }

    pub fn markings(&self) -> LabelSet {
        self.g.markings()
    }

    pub fn num_vertices(&self) -> usize {
        self.g.marks.len()
    }

    pub fn num_edges(&self) -> usize {
        self.g.edges.len()
    }

    pub fn vertex_marks(&self, v: usize) -> LabelSet {
        self.g.marks[v].keys().copied().collect()
    }

    /// Edges as `(parent, child)` pairs in canonical order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.g.edges.iter().map(|e| (e.v, e.w)).collect()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.g.degree(v)
    }

    /// Vertices with exactly one node.
    pub fn leaves(&self) -> Vec<usize> {
        (0..self.num_vertices())
            .filter(|&v| self.degree(v) == 1)
            .collect()
    }

    /// For each edge, the markings on its child side.
    pub fn edge_sides(&self) -> Vec<LabelSet> {
        self.g.edge_sides()
    }

    /// Set of 2-sided splits `{side, complement}` cut out by the edges, each
    /// recorded as the side not containing the least marking.
    pub fn splits(&self) -> BTreeSet<LabelSet> {
        let all = self.markings();
        self.edge_sides()
            .into_iter()
            .map(|s| {
                let min = *all.iter().next().unwrap();
                if s.contains(&min) {
                    all.difference(&s).copied().collect()
                } else {
                    s
                }
            })
            .collect()
    }

    pub fn glue(&self, other: &StableTree, star: Label) -> Result<StableTree> {
        Ok(StableTree {
            g: self.g.glue(&other.g, star)?,
        })
    }

    pub fn stabilize(&self, keep: &LabelSet) -> Result<StableTree> {
        Ok(StableTree {
            g: self.g.stabilize(keep, ContractionOrder::default())?,
        })
    }

    pub fn split_at_edge(&self, e: usize, star: Label) -> Result<(StableTree, StableTree)> {
        let (a, b) = self.g.split(e, star)?;
        Ok((StableTree { g: a }, StableTree { g: b }))
    }

    pub fn relabel(&self, f: impl Fn(Label) -> Label) -> StableTree {
        StableTree {
            g: self.g.relabel(&f),
        }
    }

    /// Whether some node separates the markings exactly into `k` and `l`.
    pub fn separating_node_exists(&self, k: &LabelSet, l: &LabelSet) -> Result<bool> {
        let all = self.markings();
        let union: LabelSet = k.union(l).copied().collect();
        if !k.is_disjoint(l) || union != all || k.len() < 2 || l.len() < 2 {
            return Err(Error::InvalidPartition);
        }
        Ok(self.edge_sides().iter().any(|s| s == k || s == l))
    }

    /// Whether some node has all of `i` on one side and all of `j` on the other.
    pub fn separates(&self, i: &LabelSet, j: &LabelSet) -> bool {
        self.edge_sides().iter().any(|s| {
            (s.is_superset(i) && s.is_disjoint(j)) || (s.is_superset(j) && s.is_disjoint(i))
        })
    }

    /// Type of the component configuration at `v`: each marking at `v` is a
    /// singleton, and the markings beyond each node at `v` form one part.
    pub fn component_type(&self, v: usize) -> SetPartition {
        let mut parts: Vec<LabelSet> = self.g.marks[v]
            .keys()
            .map(|l| LabelSet::from([*l]))
            .collect();
        for (i, e) in self.g.edges.iter().enumerate() {
            if e.v == v || e.w == v {
                parts.push(self.g.far_side(i, v));
            }
        }
        SetPartition::new(parts).expect("sides of a tree partition its markings")
    }

    /// Random pairwise-distinct positions on every component.
    pub fn random_decoration<R: Rng>(&self, rng: &mut R) -> DecoratedStableTree {
        let n = self.num_vertices();
        let mut points: Vec<Vec<ProjPoint>> = (0..n)
            .map(|v| random_distinct_points(rng, self.g.marks[v].len() + self.degree(v)))
            .collect();
        let marks = (0..n)
            .map(|v| {
                self.g.marks[v]
                    .keys()
                    .map(|l| (*l, points[v].pop().unwrap()))
                    .collect()
            })
            .collect();
        let edges = self
            .g
            .edges
            .iter()
            .map(|e| Edge {
                v: e.v,
                w: e.w,
                pos_v: points[e.v].pop().unwrap(),
                pos_w: points[e.w].pop().unwrap(),
            })
            .collect();
        DecoratedStableTree {
            g: Graph { marks, edges },
        }
    }
}

impl fmt::Display for StableTree {
    /// `{1,2}-{3,4,5}` style: vertices in canonical order, edges as `v-w`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vs: Vec<String> = (0..self.num_vertices())
            .map(|v| crate::label::fmt_set(&self.vertex_marks(v)))
            .collect();
        let es: Vec<String> = self
            .edges()
            .iter()
            .map(|(v, w)| format!("{v}-{w}"))
            .collect();
        write!(f, "{} [{}]", vs.join(" "), es.join(" "))
    }
}

/// Joins the `star` legs of two trees into a node.
pub fn glue(t_k: &StableTree, t_l: &StableTree, star: Label) -> Result<StableTree> {
    t_k.glue(t_l, star)
}

/// Forgets markings outside `keep` and contracts unstable components.
pub fn stabilize(t: &DecoratedStableTree, keep: &LabelSet) -> Result<DecoratedStableTree> {
    t.stabilize(keep)
}

pub fn separating_node_exists(t: &StableTree, k: &LabelSet, l: &LabelSet) -> Result<bool> {
    t.separating_node_exists(k, l)
}

pub fn component_configuration(t: &DecoratedStableTree, v: usize) -> Configuration {
    t.component_configuration(v)
}

// ---------------------------------------------------------------------------

/// Explicit point of the moduli space: a stable tree with positions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DecoratedStableTree {
    g: Graph<ProjPoint>,
}

/// Raw decorated edge: `(v, w, position on v, position on w)`.
pub type DecoratedEdge = (usize, usize, ProjPoint, ProjPoint);

impl DecoratedStableTree {
    pub fn new(
        vertices: Vec<BTreeMap<Label, ProjPoint>>,
        edges: Vec<DecoratedEdge>,
    ) -> Result<Self> {
        let g = Graph {
            marks: vertices,
            edges: edges
                .into_iter()
                .map(|(v, w, pos_v, pos_w)| Edge { v, w, pos_v, pos_w })
                .collect(),
        };
        g.validate()?;
        for v in 0..g.marks.len() {
            let mut seen = BTreeSet::new();
            let distinct = g.marks[v]
                .values()
                .chain(g.incident(v).map(|e| e.pos_at(v)))
                .all(|p| seen.insert(p));
            if !distinct {
                return Err(Violation::CoincidentSpecialPoints(v).into());
            }
        }
        Ok(DecoratedStableTree {
            g: g.canonicalize(),
        })
    }

    /// The smooth curve with markings `labels[i]` at `x[i]`.
    pub fn smooth(labels: &[Label], x: &Configuration) -> Result<Self> {
        if labels.len() != x.len() {
            return Err(Error::OutOfRange(
                "labels and points differ in length".into(),
            ));
        }
        let marks = labels
            .iter()
            .copied()
            .zip(x.points().iter().cloned())
            .collect();
        Self::new(vec![marks], vec![])
    }

    pub fn tree(&self) -> StableTree {
        StableTree { g: self.g.bare() }
    }

    pub fn markings(&self) -> LabelSet {
        self.g.markings()
    }

    pub fn num_vertices(&self) -> usize {
        self.g.marks.len()
    }

    pub fn vertex_marks(&self, v: usize) -> &BTreeMap<Label, ProjPoint> {
        &self.g.marks[v]
    }

    pub fn edges(&self) -> Vec<DecoratedEdge> {
        self.g
            .edges
            .iter()
            .map(|e| (e.v, e.w, e.pos_v.clone(), e.pos_w.clone()))
            .collect()
    }

    pub fn glue(&self, other: &DecoratedStableTree, star: Label) -> Result<DecoratedStableTree> {
        Ok(DecoratedStableTree {
            g: self.g.glue(&other.g, star)?,
        })
    }

    pub fn stabilize(&self, keep: &LabelSet) -> Result<DecoratedStableTree> {
        self.stabilize_with_order(keep, ContractionOrder::default())
    }

    pub fn stabilize_with_order(
        &self,
        keep: &LabelSet,
        order: ContractionOrder,
    ) -> Result<DecoratedStableTree> {
        Ok(DecoratedStableTree {
            g: self.g.stabilize(keep, order)?,
        })
    }

    pub fn split_at_edge(
        &self,
        e: usize,
        star: Label,
    ) -> Result<(DecoratedStableTree, DecoratedStableTree)> {
        let (a, b) = self.g.split(e, star)?;
        Ok((DecoratedStableTree { g: a }, DecoratedStableTree { g: b }))
    }

    pub fn relabel(&self, f: impl Fn(Label) -> Label) -> DecoratedStableTree {
        DecoratedStableTree {
            g: self.g.relabel(&f),
        }
    }

    /// Retraction of all markings onto component `v`, in increasing label order.
    pub fn component_configuration(&self, v: usize) -> Configuration {
        let mut pos: BTreeMap<Label, ProjPoint> = self.g.marks[v].clone();
        for (i, e) in self.g.edges.iter().enumerate() {
            if e.v == v || e.w == v {
                for l in self.g.far_side(i, v) {
                    pos.insert(l, e.pos_at(v).clone());
                }
            }
        }
        Configuration::new(pos.into_values().collect())
    }

    /// Same point with every component's chart moved so that its three
    /// least-keyed special points sit at 0, 1, inf. Marks are keyed by label,
    /// node branches by the least marking beyond them.
    pub fn canonical_charts(&self) -> DecoratedStableTree {
        let mut g = self.g.clone();
        for v in 0..g.marks.len() {
            let mut keyed: Vec<(Label, ProjPoint)> =
                g.marks[v].iter().map(|(l, p)| (*l, p.clone())).collect();
            for (i, e) in self.g.edges.iter().enumerate() {
                if e.v == v || e.w == v {
                    let key = *self.g.far_side(i, v).iter().next().unwrap();
                    keyed.push((key, e.pos_at(v).clone()));
                }
            }
            keyed.sort();
            let src = [keyed[0].1.clone(), keyed[1].1.clone(), keyed[2].1.clone()];
            let dst = [
                ProjPoint::integer(0),
                ProjPoint::integer(1),
                ProjPoint::infinity(),
            ];
            let h = mobius_from_triples(&src, &dst).expect("special points are distinct");
            for p in g.marks[v].values_mut() {
                *p = h.apply(p);
            }
            for e in g.edges.iter_mut() {
                if e.v == v {
                    e.pos_v = h.apply(&e.pos_v);
                }
                if e.w == v {
                    e.pos_w = h.apply(&e.pos_w);
                }
            }
        }
        DecoratedStableTree { g }
    }

    /// Equality as points of the moduli space (up to a chart change on each component).
    pub fn same_point(&self, other: &DecoratedStableTree) -> bool {
        self.g.bare() == other.g.bare() && self.canonical_charts() == other.canonical_charts()
    }

    pub fn m04_point(&self) -> Result<M04Point> {
        m04_point_of(self)
    }
}

// ---------------------------------------------------------------------------

/// Every combinatorial type of stable tree on markings 1..=n, for 3 <= n <= 8.
pub fn enumerate_stable_trees(n: usize) -> Result<Vec<StableTree>> {
    if !(3..=8).contains(&n) {
        return Err(Error::OutOfRange(format!("n = {n} (need 3..=8)")));
    }
    enumerate_stable_trees_on(&crate::label::range_labels(n))
}

/// Every combinatorial type of stable tree on an arbitrary label set of size 3..=8.
///
/// Markings are inserted one at a time. Forgetting the newest marking from a
/// tree leaves a unique smaller tree, so each type is produced exactly once:
/// the new marking joins an existing vertex, subdivides a node, or sprouts a
/// new component together with an existing marking.
pub fn enumerate_stable_trees_on(labels: &LabelSet) -> Result<Vec<StableTree>> {
    if !(3..=8).contains(&labels.len()) {
        return Err(Error::OutOfRange(format!(
            "{} markings (need 3..=8)",
            labels.len()
        )));
    }
    let items: Vec<Label> = labels.iter().copied().collect();
    let mut level = vec![StableTree::one_vertex(
        items[..3].iter().copied().collect(),
    )?];
    for &new in &items[3..] {
        let mut next = Vec::new();
        for t in &level {
            let g = &t.g;
            for v in 0..g.marks.len() {
                let mut h = g.clone();
                h.marks[v].insert(new, ());
                next.push(h);
            }
            for e in 0..g.edges.len() {
                let mut h = g.clone();
                let old = h.edges.remove(e);
                let u = h.marks.len();
                h.marks.push(BTreeMap::from([(new, ())]));
                h.edges.push(Edge {
                    v: old.v,
                    w: u,
                    pos_v: (),
                    pos_w: (),
                });
                h.edges.push(Edge {
                    v: u,
                    w: old.w,
                    pos_v: (),
                    pos_w: (),
                });
                next.push(h);
            }
            for v in 0..g.marks.len() {
                for &m in g.marks[v].keys() {
                    let mut h = g.clone();
                    h.marks[v].remove(&m);
                    let u = h.marks.len();
                    h.marks.push(BTreeMap::from([(m, ()), (new, ())]));
                    h.edges.push(Edge {
                        v,
                        w: u,
                        pos_v: (),
                        pos_w: (),
                    });
                    next.push(h);
                }
            }
        }
        level = next
            .into_iter()
            .map(|g| StableTree {
                g: g.canonicalize(),
            })
            .collect();
    }
    level.sort();
    level.dedup();
    Ok(level)
}

// ---------------------------------------------------------------------------

/// A point of the moduli space of 4-marked curves.
///
/// `Interior` holds the cross-ratio of the four positions taken in increasing
/// label order; `Boundary` holds the 2+2 split of the labels by the node,
/// with each pair sorted and the pair holding the least label first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum M04Point {
    Interior(ProjPoint),
    Boundary([[Label; 2]; 2]),
}

impl M04Point {
    pub fn boundary(a: &LabelSet, b: &LabelSet) -> Result<Self> {
        if a.len() != 2 || b.len() != 2 || !a.is_disjoint(b) {
            return Err(Error::InvalidPartition);
        }
        let pair = |s: &LabelSet| {
            let v: Vec<Label> = s.iter().copied().collect();
            [v[0], v[1]]
        };
        let (mut x, mut y) = (pair(a), pair(b));
        if y[0] < x[0] {
            std::mem::swap(&mut x, &mut y);
        }
        Ok(M04Point::Boundary([x, y]))
    }

    pub fn is_boundary(&self) -> bool {
        matches!(self, M04Point::Boundary(_))
    }

    /// Transports the point along a relabelling of its four labels.
    /// `labels` are the current labels in increasing order.
    pub fn relabel(&self, labels: &[Label; 4], f: impl Fn(Label) -> Label) -> M04Point {
        match self {
            M04Point::Boundary([x, y]) => {
                let a: LabelSet = x.iter().map(|l| f(*l)).collect();
                let b: LabelSet = y.iter().map(|l| f(*l)).collect();
                M04Point::boundary(&a, &b).expect("relabelling is injective")
            }
            M04Point::Interior(lambda) => {
                let std = [
                    ProjPoint::integer(0),
                    ProjPoint::integer(1),
                    ProjPoint::infinity(),
                    lambda.clone(),
                ];
                let mut placed: Vec<(Label, ProjPoint)> =
                    labels.iter().zip(std).map(|(l, p)| (f(*l), p)).collect();
                placed.sort();
                let x = Configuration::new(placed.into_iter().map(|(_, p)| p).collect());
                M04Point::Interior(cross_ratio(&x).expect("interior value avoids 0, 1, inf"))
            }
        }
    }
}

impl fmt::Display for M04Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            M04Point::Interior(l) => write!(f, "interior {l}"),
            M04Point::Boundary([x, y]) => write!(f, "boundary {}{}|{}{}", x[0], x[1], y[0], y[1]),
        }
    }
}

impl std::str::FromStr for M04Point {
    type Err = Error;

    /// Parses `"interior a/b"` or `"boundary 12|34"` (single-character labels)
    /// or `"boundary 1,2|3,4"`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad M04 point {s:?}"));
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("interior ") {
            return Ok(M04Point::Interior(rest.parse()?));
        }
        let rest = s.strip_prefix("boundary ").ok_or_else(bad)?;
        let (a, b) = rest.split_once('|').ok_or_else(bad)?;
        let side = |t: &str| -> Result<LabelSet> {
            if t.contains(',') {
                t.split(',').map(str::parse).collect()
            } else {
                t.chars().map(|c| c.to_string().parse()).collect()
            }
        };
        M04Point::boundary(&side(a)?, &side(b)?)
    }
}

/// The point of M_{0,4}-bar given by a decorated tree on four markings.
pub fn m04_point_of(t: &DecoratedStableTree) -> Result<M04Point> {
    let labels = t.markings();
    if labels.len() != 4 {
        return Err(Error::OutOfRange(format!(
            "{} markings (need 4)",
            labels.len()
        )));
    }
    match t.num_vertices() {
        1 => {
            let x = Configuration::new(t.vertex_marks(0).values().cloned().collect());
            Ok(M04Point::Interior(cross_ratio(&x)?))
        }
        _ => {
            let side = &t.tree().edge_sides()[0];
            let rest: LabelSet = labels.difference(side).copied().collect();
            M04Point::boundary(side, &rest)
        }
    }
}

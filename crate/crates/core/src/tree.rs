//! Loaded trees and their correspondence with tree monomials.
//!
//! A loaded tree carries a (possibly empty) label set on every vertex and a
//! positive multiplicity on every edge. The nonempty label sets partition
//! `{1..n}` and every vertex satisfies `deg(v) + |h(v)| >= 3`. Removing an
//! edge splits the labels into a cut; the product of those cuts, raised to
//! the edge multiplicities, is the monomial of the tree.

use std::collections::VecDeque;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::labels::{Label, LabelSet};
use crate::model::{Cut, Monomial};

pub type VertexId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TreeEdge {
    pub u: VertexId,
    pub v: VertexId,
    pub multiplicity: u64,
}

impl TreeEdge {
    pub fn new(u: VertexId, v: VertexId, multiplicity: u64) -> Self {
        TreeEdge { u, v, multiplicity }
    }

    pub fn other(&self, x: VertexId) -> VertexId {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// One broken condition of a loaded tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoVertices,
    EdgeEndpointOutOfRange { edge: usize },
    SelfLoop { edge: usize },
    /// The graph has a cycle, a repeated edge, or is disconnected.
    NotATree { vertices: usize, edges: usize, reachable: usize },
    ZeroMultiplicity { edge: usize },
    LabelOutOfRange { vertex: VertexId, label: Label },
    LabelOnSeveralVertices { label: Label, vertices: Vec<VertexId> },
    MissingLabel { label: Label },
    DegreePlusLabelsTooSmall { vertex: VertexId, degree: usize, labels: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoVertices => write!(f, "tree has no vertices"),
            Violation::EdgeEndpointOutOfRange { edge } => write!(f, "edge {edge} references a missing vertex"),
            Violation::SelfLoop { edge } => write!(f, "edge {edge} is a loop"),
            Violation::NotATree { vertices, edges, reachable } => write!(
                f,
                "not a tree: {vertices} vertices, {edges} edges, {reachable} reachable from vertex 0"
            ),
            Violation::ZeroMultiplicity { edge } => write!(f, "edge {edge} has multiplicity 0"),
            Violation::LabelOutOfRange { vertex, label } => {
                write!(f, "label {label} on vertex {vertex} is out of range")
            }
            Violation::LabelOnSeveralVertices { label, vertices } => {
                write!(f, "label {label} appears on vertices {vertices:?}")
            }
            Violation::MissingLabel { label } => write!(f, "label {label} is on no vertex"),
            Violation::DegreePlusLabelsTooSmall { vertex, degree, labels } => write!(
                f,
                "vertex {vertex}: deg + |h| = {degree} + {labels} < 3"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("factors {0:?} and {1:?} cross; the monomial is not a tree monomial")]
    CrossingFactors(Cut, Cut),
    #[error("a tree without edges on {0} labels has no monomial (needs exactly 3 labels)")]
    EmptyNonTrivial(u32),
    #[error("invalid loaded tree: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("pivot {0:?} is not a factor of the monomial")]
    PivotNotAFactor(Cut),
}

#[derive(Clone, PartialEq, Eq)]
pub struct LoadedTree {
    ambient_n: u32,
    labels: Vec<LabelSet>,
    edges: Vec<TreeEdge>,
}

impl fmt::Debug for LoadedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LoadedTree(n={}; ", self.ambient_n)?;
        for (i, h) in self.labels.iter().enumerate() {
            write!(f, "v{i}{h} ")?;
        }
        for e in &self.edges {
            write!(f, "v{}-v{}x{} ", e.u, e.v, e.multiplicity)?;
        }
        f.write_str(")")
    }
}

impl LoadedTree {
    /// Assembles a tree without checking any invariant. Use [`validate`]
    /// before relying on tree structure.
    ///
    /// [`validate`]: LoadedTree::validate
    pub fn from_parts(ambient_n: u32, labels: Vec<LabelSet>, edges: Vec<TreeEdge>) -> Self {
        LoadedTree { ambient_n, labels, edges }
    }

    /// Assembles and validates a tree.
    pub fn new(ambient_n: u32, labels: Vec<LabelSet>, edges: Vec<TreeEdge>) -> Result<Self, TreeError> {
        let t = LoadedTree::from_parts(ambient_n, labels, edges);
        let violations = t.validate();
        if violations.is_empty() {
            Ok(t)
        } else {
            Err(TreeError::Invalid(violations))
        }
    }

    /// The single-vertex tree holding all labels `{1..n}`.
    pub fn single_vertex(n: u32) -> Self {
        LoadedTree::from_parts(n, vec![LabelSet::full(n)], Vec::new())
    }

    pub fn ambient_n(&self) -> u32 {
        self.ambient_n
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edges(&self) -> &[TreeEdge] {
        &self.edges
    }

    pub fn labels(&self, v: VertexId) -> &LabelSet {
        &self.labels[v]
    }

    pub fn all_labels(&self) -> &[LabelSet] {
        &self.labels
    }

    /// Total multiplicity `Σ m(e)`.
    pub fn edge_count_with_multiplicity(&self) -> u64 {
        self.edges.iter().map(|e| e.multiplicity).sum()
    }

    /// `Σ m(e) = n - 3`.
    pub fn is_proper(&self) -> bool {
        self.ambient_n >= 3 && self.edge_count_with_multiplicity() == u64::from(self.ambient_n) - 3
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.labels.len()];
        for e in &self.edges {
            deg[e.u] += 1;
            deg[e.v] += 1;
        }
        deg
    }

    /// Incident edge indices per vertex.
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.labels.len()];
        for (i, e) in self.edges.iter().enumerate() {
            inc[e.u].push(i);
            inc[e.v].push(i);
        }
        inc
    }

    /// Checks every loaded-tree condition and reports each failure.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let nv = self.labels.len();
        if nv == 0 {
            out.push(Violation::NoVertices);
            return out;
        }
        let mut structural = true;
        for (i, e) in self.edges.iter().enumerate() {
            if e.u >= nv || e.v >= nv {
                out.push(Violation::EdgeEndpointOutOfRange { edge: i });
                structural = false;
            } else if e.u == e.v {
                out.push(Violation::SelfLoop { edge: i });
                structural = false;
            }
            if e.multiplicity == 0 {
                out.push(Violation::ZeroMultiplicity { edge: i });
            }
        }
        if structural {
            let reachable = self.reachable_from(0, None).iter().filter(|&&b| b).count();
            if self.edges.len() + 1 != nv || reachable != nv {
                out.push(Violation::NotATree { vertices: nv, edges: self.edges.len(), reachable });
            }
            for (v, d) in self.degrees().into_iter().enumerate() {
                if d + self.labels[v].len() < 3 {
                    out.push(Violation::DegreePlusLabelsTooSmall { vertex: v, degree: d, labels: self.labels[v].len() });
                }
            }
        }
        let n = self.ambient_n as usize;
        let mut owners: Vec<Vec<VertexId>> = vec![Vec::new(); n + 1];
        for (v, h) in self.labels.iter().enumerate() {
            for l in h.iter() {
                if l == 0 || l as usize > n {
                    out.push(Violation::LabelOutOfRange { vertex: v, label: l });
                } else {
                    owners[l as usize].push(v);
                }
            }
        }
        for (l, vs) in owners.iter().enumerate().skip(1) {
            match vs.len() {
                0 => out.push(Violation::MissingLabel { label: l as Label }),
                1 => {}
                _ => out.push(Violation::LabelOnSeveralVertices { label: l as Label, vertices: vs.clone() }),
            }
        }
        out
    }

    /// Vertices reachable from `start`, optionally ignoring one edge.
    pub(crate) fn reachable_from(&self, start: VertexId, skip_edge: Option<usize>) -> Vec<bool> {
        let inc = self.incidence();
        let mut seen = vec![false; self.labels.len()];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(x) = queue.pop_front() {
            for &ei in &inc[x] {
                if Some(ei) == skip_edge {
                    continue;
                }
                let y = self.edges[ei].other(x);
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        seen
    }

    /// Splits the tree at edge `ei`: membership of each vertex in the
    /// component of the edge's `u` endpoint.
    pub fn side_of_u(&self, ei: usize) -> Vec<bool> {
        self.reachable_from(self.edges[ei].u, Some(ei))
    }

    /// Label sets of the two components left by removing edge `ei`, as
    /// `(u side, v side)`.
    pub fn edge_split(&self, ei: usize) -> (LabelSet, LabelSet) {
        let side = self.side_of_u(ei);
        let mut a = Vec::new();
        let mut b = Vec::new();
        for (v, h) in self.labels.iter().enumerate() {
            if side[v] {
                a.extend(h.iter());
            } else {
                b.extend(h.iter());
            }
        }
        (a.into_iter().collect(), b.into_iter().collect())
    }

    /// Returns the tree with labels renamed by the order-preserving map onto
    /// `1..=k`, where `k` is the number of labels present.
    pub fn relabeled_contiguous(&self) -> LoadedTree {
        let mut all: Vec<Label> = self.labels.iter().flat_map(|h| h.iter()).collect();
        all.sort_unstable();
        let rename = |l: Label| all.binary_search(&l).expect("label present") as Label + 1;
        let labels = self.labels.iter().map(|h| h.iter().map(rename).collect()).collect();
        LoadedTree::from_parts(all.len() as u32, labels, self.edges.clone())
    }

    /// Rigid canonical form: each vertex is keyed by its label set and the
    /// label sets lying beyond each incident edge. Two valid loaded trees are
    /// isomorphic iff their canonical forms are equal.
    pub fn canonical_form(&self) -> Vec<(VertexKey, VertexKey, u64)> {
        let mut beyond: Vec<Vec<LabelSet>> = vec![Vec::new(); self.labels.len()];
        for (ei, e) in self.edges.iter().enumerate() {
            let (us, vs) = self.edge_split(ei);
            beyond[e.u].push(vs);
            beyond[e.v].push(us);
        }
        let keys: Vec<VertexKey> = beyond
            .into_iter()
            .enumerate()
            .map(|(v, mut b)| {
                b.sort();
                VertexKey { labels: self.labels[v].clone(), beyond: b }
            })
            .collect();
        let mut out: Vec<_> = self
            .edges
            .iter()
            .map(|e| {
                let (a, b) = (keys[e.u].clone(), keys[e.v].clone());
                if a <= b {
                    (a, b, e.multiplicity)
                } else {
                    (b, a, e.multiplicity)
                }
            })
            .collect();
        if out.is_empty() {
            out.push((keys[0].clone(), keys[0].clone(), 0));
        }
        out.sort();
        out
    }

    pub fn is_isomorphic(&self, other: &LoadedTree) -> bool {
        self.ambient_n == other.ambient_n
            && self.labels.len() == other.labels.len()
            && self.canonical_form() == other.canonical_form()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct VertexKey {
    pub labels: LabelSet,
    pub beyond: Vec<LabelSet>,
}

/// The monomial of a loaded tree: one factor per edge, raised to its
/// multiplicity.
pub fn tree_to_monomial(t: &LoadedTree) -> Result<Monomial, TreeError> {
    let violations = t.validate();
    if !violations.is_empty() {
        return Err(TreeError::Invalid(violations));
    }
    let n = t.ambient_n();
    if t.edges().is_empty() {
        return if n == 3 { Ok(Monomial::empty(3).expect("n = 3")) } else { Err(TreeError::EmptyNonTrivial(n)) };
    }
    let mut m = Monomial::empty(n).expect("valid tree with an edge has n >= 4");
    for (ei, e) in t.edges().iter().enumerate() {
        let (a, b) = t.edge_split(ei);
        // Validity makes both sides carry at least 2 labels.
        let cut = Cut::new(a, b, n).map_err(|_| TreeError::Invalid(Vec::new()))?;
        m.multiply(cut, e.multiplicity as u32).expect("same n, positive multiplicity");
    }
    Ok(m)
}

/// Builds the loaded tree of a tree monomial, pivoting on the smallest cut.
pub fn monomial_to_tree(m: &Monomial) -> Result<LoadedTree, TreeError> {
    match m.factors().next() {
        None => empty_tree(m.ambient_n()),
        Some((pivot, _)) => {
            let pivot = pivot.clone();
            monomial_to_tree_with_pivot(m, &pivot)
        }
    }
}

fn empty_tree(n: u32) -> Result<LoadedTree, TreeError> {
    if n == 3 {
        Ok(LoadedTree::single_vertex(3))
    } else {
        Err(TreeError::EmptyNonTrivial(n))
    }
}

/// Hasse-diagram construction around a chosen pivot cut `{I, J}`.
///
/// Every other factor contributes the one part strictly inside `I` or `J`.
/// The Hasse diagram of these sets under containment, plus the bridge
/// `I - J`, is the tree; each vertex keeps the labels not covered by its
/// immediate subsets.
pub fn monomial_to_tree_with_pivot(m: &Monomial, pivot: &Cut) -> Result<LoadedTree, TreeError> {
    if m.is_empty() {
        return empty_tree(m.ambient_n());
    }
    if let Some((a, b)) = m.crossing_pair() {
        return Err(TreeError::CrossingFactors(a.clone(), b.clone()));
    }
    let pivot_exp = m.exponent(pivot);
    if pivot_exp == 0 {
        return Err(TreeError::PivotNotAFactor(pivot.clone()));
    }
    let n = m.ambient_n();
    let [big_i, big_j] = pivot.parts();

    // sets[0] = I, sets[1] = J; the rest come with the exponent of their cut.
    let mut sets: Vec<LabelSet> = vec![big_i.clone(), big_j.clone()];
    let mut exps: Vec<u64> = vec![0, 0];
    for (cut, e) in m.factors() {
        if cut == pivot {
            continue;
        }
        let part = cut
            .parts()
            .into_iter()
            .find(|p| p.is_strict_subset(big_i) || p.is_strict_subset(big_j))
            .expect("a non-crossing cut has a part strictly inside a pivot part");
        sets.push(part.clone());
        exps.push(u64::from(e));
    }

    // Cover relation: the parent of a set is its smallest strict superset.
    let k = sets.len();
    let mut parent: Vec<Option<usize>> = vec![None; k];
    for i in 2..k {
        parent[i] = (0..k)
            .filter(|&j| j != i && sets[i].is_strict_subset(&sets[j]))
            .min_by_key(|&j| sets[j].len());
    }

    let mut labels = sets.clone();
    for i in 2..k {
        let p = parent[i].expect("every non-pivot set lies inside I or J");
        labels[p] = labels[p].difference(&sets[i]);
    }

    let mut edges = vec![TreeEdge::new(0, 1, u64::from(pivot_exp))];
    for i in 2..k {
        edges.push(TreeEdge::new(parent[i].expect("checked above"), i, exps[i]));
    }
    Ok(LoadedTree::from_parts(n, labels, edges))
}

/// Deterministic random proper loaded tree on `n >= 3` labels.
///
/// Picks a vertex count, a random recursive tree shape with enough label
/// capacity, deals labels so that `deg + |h| >= 3` everywhere, and spreads
/// the `n - 3` edge multiplicity randomly over the edges.
pub fn random_proper_tree(n: u32, seed: u64) -> LoadedTree {
    assert!(n >= 3, "random_proper_tree needs n >= 3");
    if n == 3 {
        return LoadedTree::single_vertex(3);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (u64::from(n) << 40));
    let budget = u64::from(n) - 3;
    let max_vertices = (n - 2) as usize;

    let (nv, parents) = loop {
        let nv = rng.gen_range(2..=max_vertices);
        let parents: Vec<usize> = (1..nv).map(|i| rng.gen_range(0..i)).collect();
        if required_labels(nv, &parents) <= n as usize {
            break (nv, parents);
        }
        // A path always fits since it needs nv + 2 <= n labels.
        if rng.gen_bool(0.2) {
            break (nv, (1..nv).map(|i| i - 1).collect());
        }
    };

    let mut deg = vec![0usize; nv];
    for (i, &p) in parents.iter().enumerate() {
        deg[i + 1] += 1;
        deg[p] += 1;
    }
    let mut perm: Vec<Label> = (1..=n).collect();
    perm.shuffle(&mut rng);
    let mut next = perm.into_iter();
    let mut labels: Vec<Vec<Label>> = vec![Vec::new(); nv];
    for v in 0..nv {
        for _ in deg[v]..3 {
            labels[v].push(next.next().expect("label capacity checked"));
        }
    }
    for l in next {
        labels[rng.gen_range(0..nv)].push(l);
    }

    let ne = nv - 1;
    let mut mult = vec![1u64; ne];
    for _ in 0..(budget - ne as u64) {
        mult[rng.gen_range(0..ne)] += 1;
    }
    let edges = parents
        .iter()
        .enumerate()
        .map(|(i, &p)| TreeEdge::new(p, i + 1, mult[i]))
        .collect();
    let t = LoadedTree::from_parts(n, labels.into_iter().map(LabelSet::from_iter).collect(), edges);
    debug_assert!(t.validate().is_empty() && t.is_proper());
    t
}

fn required_labels(nv: usize, parents: &[usize]) -> usize {
    let mut deg = vec![0usize; nv];
    for (i, &p) in parents.iter().enumerate() {
        deg[i + 1] += 1;
        deg[p] += 1;
    }
    deg.iter().map(|&d| 3usize.saturating_sub(d)).sum()
}

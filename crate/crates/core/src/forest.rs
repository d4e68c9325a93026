//! The forest algorithm.
//!
//! A proper loaded tree is turned into a weighted tree (`w(v) = deg(v) +
//! |h(v)| - 3`, `w(e) = m(e) - 1`), whose edge weight sum fixes the sign of
//! the value. Subdividing every edge gives the redundancy tree; deleting its
//! zero-weight vertices gives the redundancy forest. Each tree of the forest
//! is then evaluated by leaf elimination: a leaf `l` with parent `p`
//! contributes `C(w(p), w(l))` and lowers `w(p)` by `w(l)`, or forces 0 when
//! `w(l) > w(p)`. A last vertex contributes 1 when its weight is 0 and 0
//! otherwise.

use std::collections::{BTreeSet, VecDeque};

use num_bigint::{BigInt, BigUint, Sign as BigSign};
use num_traits::Zero;
use thiserror::Error;

use crate::binomial::{binomial, product};
use crate::labels::LabelSet;
use crate::model::{classify, Classification, IntegerValue, Monomial};
use crate::serial::TreeJson;
use crate::tree::{monomial_to_tree, LoadedTree, TreeError, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ForestError {
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("weight identity fails: vertex weights sum to {vertex_sum}, edge weights to {edge_sum}")]
    WeightIdentityViolation { vertex_sum: u64, edge_sum: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WeightedEdge {
    pub u: VertexId,
    pub v: VertexId,
    pub weight: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedTree {
    pub labels: Vec<LabelSet>,
    pub vertex_weights: Vec<u64>,
    pub edges: Vec<WeightedEdge>,
}

impl WeightedTree {
    pub fn vertex_weight_sum(&self) -> u64 {
        self.vertex_weights.iter().sum()
    }

    pub fn edge_weight_sum(&self) -> u64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertex_weights.len()];
        for e in &self.edges {
            deg[e.u] += 1;
            deg[e.v] += 1;
        }
        deg
    }
}

/// Where a redundancy-tree vertex came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Origin {
    FromVertex,
    FromLeafVertex,
    FromEdge,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RedundancyVertex {
    pub id: usize,
    pub weight: u64,
    pub origin: Origin,
    /// Labels of the originating loaded-tree vertex; empty for edge
    /// midpoints.
    pub labels: LabelSet,
}

/// A tree with vertex weights only. Vertices are kept sorted by id; edges
/// refer to ids.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RedundancyTree {
    pub vertices: Vec<RedundancyVertex>,
    pub edges: Vec<(usize, usize)>,
}

impl RedundancyTree {
    /// Plain weighted tree with ids `0..weights.len()`, used for synthetic
    /// inputs.
    pub fn from_weights(weights: &[u64], edges: &[(usize, usize)]) -> Self {
        RedundancyTree {
            vertices: weights
                .iter()
                .enumerate()
                .map(|(id, &weight)| RedundancyVertex { id, weight, origin: Origin::FromVertex, labels: LabelSet::new() })
                .collect(),
            edges: edges.to_vec(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn weights(&self) -> Vec<u64> {
        self.vertices.iter().map(|v| v.weight).collect()
    }

    fn index_of(&self, id: usize) -> usize {
        self.vertices.binary_search_by_key(&id, |v| v.id).expect("edge endpoint is a vertex")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RedundancyForest {
    pub trees: Vec<RedundancyTree>,
}

impl RedundancyForest {
    /// The forest with no vertices.
    pub fn is_null(&self) -> bool {
        self.trees.iter().all(RedundancyTree::is_empty)
    }
}

/// Weighted tree of a valid loaded tree.
pub fn to_weighted(t: &LoadedTree) -> WeightedTree {
    let deg = t.degrees();
    let vertex_weights = (0..t.vertex_count())
        .map(|v| {
            let s = deg[v] + t.labels(v).len();
            debug_assert!(s >= 3, "vertex {v} breaks deg + |h| >= 3");
            s.saturating_sub(3) as u64
        })
        .collect();
    let edges = t
        .edges()
        .iter()
        .map(|e| WeightedEdge { u: e.u, v: e.v, weight: e.multiplicity - 1 })
        .collect();
    WeightedTree { labels: t.all_labels().to_vec(), vertex_weights, edges }
}

/// `(-1)^(edge weight sum)`, after checking the weight identity.
pub fn sign_of(wt: &WeightedTree) -> Result<i8, ForestError> {
    let (vertex_sum, edge_sum) = (wt.vertex_weight_sum(), wt.edge_weight_sum());
    if vertex_sum != edge_sum {
        return Err(ForestError::WeightIdentityViolation { vertex_sum, edge_sum });
    }
    Ok(if edge_sum.is_multiple_of(2) { 1 } else { -1 })
}

/// Subdivides every edge once. Original vertices keep ids `0..|V|`; the
/// midpoint of edge `i` gets id `|V| + i`.
pub fn to_redundancy(wt: &WeightedTree) -> RedundancyTree {
    let nv = wt.vertex_weights.len();
    let deg = wt.degrees();
    let mut vertices: Vec<RedundancyVertex> = wt
        .vertex_weights
        .iter()
        .enumerate()
        .map(|(id, &weight)| RedundancyVertex {
            id,
            weight,
            origin: if deg[id] == 1 { Origin::FromLeafVertex } else { Origin::FromVertex },
            labels: wt.labels.get(id).cloned().unwrap_or_default(),
        })
        .collect();
    let mut edges = Vec::with_capacity(2 * wt.edges.len());
    for (i, e) in wt.edges.iter().enumerate() {
        let mid = nv + i;
        vertices.push(RedundancyVertex { id: mid, weight: e.weight, origin: Origin::FromEdge, labels: LabelSet::new() });
        edges.push((e.u, mid));
        edges.push((mid, e.v));
    }
    RedundancyTree { vertices, edges }
}

/// Deletes every zero-weight vertex with its incident edges. Components
/// are listed by smallest vertex id.
pub fn prune(rt: &RedundancyTree) -> RedundancyForest {
    let k = rt.vertices.len();
    let keep: Vec<bool> = rt.vertices.iter().map(|v| v.weight > 0).collect();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut kept_edges = Vec::new();
    for &(a, b) in &rt.edges {
        let (ia, ib) = (rt.index_of(a), rt.index_of(b));
        if keep[ia] && keep[ib] {
            adj[ia].push(ib);
            adj[ib].push(ia);
            kept_edges.push((ia, ib));
        }
    }
    let mut comp = vec![usize::MAX; k];
    let mut trees: Vec<RedundancyTree> = Vec::new();
    for start in 0..k {
        if !keep[start] || comp[start] != usize::MAX {
            continue;
        }
        let c = trees.len();
        let mut members = Vec::new();
        let mut queue = VecDeque::from([start]);
        comp[start] = c;
        while let Some(x) = queue.pop_front() {
            members.push(x);
            for &y in &adj[x] {
                if comp[y] == usize::MAX {
                    comp[y] = c;
                    queue.push_back(y);
                }
            }
        }
        members.sort_unstable();
        trees.push(RedundancyTree {
            vertices: members.iter().map(|&i| rt.vertices[i].clone()).collect(),
            edges: Vec::new(),
        });
    }
    for (ia, ib) in kept_edges {
        trees[comp[ia]].edges.push((rt.vertices[ia].id, rt.vertices[ib].id));
    }
    RedundancyForest { trees }
}

/// One event of leaf elimination, with vertex ids of the redundancy tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Elimination {
    /// Leaf removed; contributes `C(top, bottom)`.
    Step { leaf: usize, parent: usize, top: u64, bottom: u64 },
    /// Leaf heavier than its parent; the tree value is 0.
    LeafExceedsParent { leaf: usize, parent: usize, leaf_weight: u64, parent_weight: u64 },
    /// Last vertex; contributes 1 iff its weight is 0.
    Last { vertex: usize, weight: u64 },
}

struct Eliminator<'a> {
    rt: &'a RedundancyTree,
    weight: Vec<u64>,
    degree: Vec<usize>,
    // XOR of the live neighbours; equals the parent once a vertex is a leaf.
    neighbours: Vec<usize>,
    alive: Vec<bool>,
    leaves: BTreeSet<usize>,
    remaining: usize,
}

impl<'a> Eliminator<'a> {
    fn new(rt: &'a RedundancyTree) -> Self {
        let k = rt.vertices.len();
        let mut degree = vec![0; k];
        let mut neighbours = vec![0; k];
        for &(a, b) in &rt.edges {
            let (ia, ib) = (rt.index_of(a), rt.index_of(b));
            degree[ia] += 1;
            degree[ib] += 1;
            neighbours[ia] ^= ib;
            neighbours[ib] ^= ia;
        }
        let leaves = (0..k).filter(|&i| degree[i] == 1).collect();
        Eliminator { rt, weight: rt.weights(), degree, neighbours, alive: vec![true; k], leaves, remaining: k }
    }

    fn snapshot(&self) -> RedundancyTree {
        let vertices = self
            .rt
            .vertices
            .iter()
            .enumerate()
            .filter(|(i, _)| self.alive[*i])
            .map(|(i, v)| RedundancyVertex { weight: self.weight[i], ..v.clone() })
            .collect();
        let edges = self
            .rt
            .edges
            .iter()
            .filter(|&&(a, b)| self.alive[self.rt.index_of(a)] && self.alive[self.rt.index_of(b)])
            .copied()
            .collect();
        RedundancyTree { vertices, edges }
    }

    /// Runs to completion. `pick` chooses the next leaf (local index) from
    /// the current leaf set; `observe` sees every event with the state after
    /// it. Returns the binomial factors, or `None` when the value is 0.
    fn run<P, O>(mut self, mut pick: P, mut observe: O) -> Option<Vec<(u64, u64)>>
    where
        P: FnMut(&BTreeSet<usize>) -> usize,
        O: FnMut(&Elimination, &Eliminator<'_>),
    {
        let mut factors = Vec::new();
        if self.remaining == 0 {
            return Some(factors);
        }
        let mut last = 0;
        while self.remaining > 1 {
            let leaf = pick(&self.leaves);
            debug_assert!(self.alive[leaf] && self.degree[leaf] == 1);
            let parent = self.neighbours[leaf];
            let (wl, wp) = (self.weight[leaf], self.weight[parent]);
            let id = |i: usize| self.rt.vertices[i].id;
            if wl > wp {
                let ev = Elimination::LeafExceedsParent { leaf: id(leaf), parent: id(parent), leaf_weight: wl, parent_weight: wp };
                observe(&ev, &self);
                return None;
            }
            let ev = Elimination::Step { leaf: id(leaf), parent: id(parent), top: wp, bottom: wl };
            if wl != 0 && wl != wp {
                factors.push((wp, wl));
            }
            self.weight[parent] -= wl;
            self.alive[leaf] = false;
            self.leaves.remove(&leaf);
            self.remaining -= 1;
            self.degree[parent] -= 1;
            self.neighbours[parent] ^= leaf;
            match self.degree[parent] {
                0 => {
                    self.leaves.remove(&parent);
                }
                1 => {
                    self.leaves.insert(parent);
                }
                _ => {}
            }
            last = parent;
            observe(&ev, &self);
        }
        let ev = Elimination::Last { vertex: self.rt.vertices[last].id, weight: self.weight[last] };
        observe(&ev, &self);
        if self.weight[last] == 0 {
            Some(factors)
        } else {
            None
        }
    }
}

fn factors_value(factors: Option<Vec<(u64, u64)>>) -> BigUint {
    match factors {
        None => BigUint::zero(),
        Some(f) => product(f.into_iter().map(|(top, bottom)| binomial(top, bottom)).collect()),
    }
}

/// Value of one redundancy tree, eliminating the smallest-id leaf first.
pub fn eval_redundancy_tree(rt: &RedundancyTree) -> BigUint {
    eval_redundancy_tree_by(rt, |_| 0)
}

/// Value of one redundancy tree with a caller-chosen elimination order.
/// `choose(leaf_ids)` returns a position in the sorted list of current leaf
/// ids.
pub fn eval_redundancy_tree_by<F>(rt: &RedundancyTree, mut choose: F) -> BigUint
where
    F: FnMut(&[usize]) -> usize,
{
    let factors = Eliminator::new(rt).run(
        |leaves| {
            if leaves.len() == 1 {
                return *leaves.first().expect("nonempty");
            }
            let ids: Vec<usize> = leaves.iter().map(|&i| rt.vertices[i].id).collect();
            let k = choose(&ids);
            *leaves.iter().nth(k).expect("choice within the leaf list")
        },
        |_, _| {},
    );
    factors_value(factors)
}

/// Product of the tree values; 1 for the null graph.
pub fn eval_forest(rf: &RedundancyForest) -> BigUint {
    let mut factors = Vec::new();
    for rt in &rf.trees {
        match Eliminator::new(rt).run(|leaves| *leaves.first().expect("a tree with 2+ vertices has leaves"), |_, _| {}) {
            None => return BigUint::zero(),
            Some(f) => factors.extend(f),
        }
    }
    factors_value(Some(factors))
}

/// One line of the evaluation trace.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct TraceRecord {
    pub stage: String,
    pub structure: TreeJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub binomial: Option<[u64; 2]>,
}

/// Outcome of evaluating a monomial.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub classification: Classification,
    pub value: IntegerValue,
    /// `(-1)^(edge weight sum)` when the forest pipeline ran.
    pub sign: Option<i8>,
    pub trace: Vec<TraceRecord>,
}

/// Integral of a monomial.
pub fn eval(m: &Monomial) -> Result<IntegerValue, ForestError> {
    Ok(evaluate(m, false)?.value)
}

/// Integral of a monomial with classification, sign, and optional trace.
pub fn evaluate(m: &Monomial, trace: bool) -> Result<Evaluation, ForestError> {
    let classification = classify(m);
    match classification {
        Classification::DegreeMismatch | Classification::ZeroByKeel => {
            Ok(Evaluation { classification, value: BigInt::zero(), sign: None, trace: Vec::new() })
        }
        Classification::Clever | Classification::TreeMonomial => {
            let t = monomial_to_tree(m)?;
            let (value, sign, records) = run_pipeline(&t, trace)?;
            Ok(Evaluation { classification, value, sign: Some(sign), trace: records })
        }
    }
}

/// Value of a loaded tree. Trees that are not proper have value 0.
pub fn eval_tree(t: &LoadedTree) -> Result<IntegerValue, ForestError> {
    let violations = t.validate();
    if !violations.is_empty() {
        return Err(TreeError::Invalid(violations).into());
    }
    if !t.is_proper() {
        return Ok(BigInt::zero());
    }
    Ok(run_pipeline(t, false)?.0)
}

/// Value of a proper loaded tree through the full pipeline, with trace.
pub fn eval_tree_traced(t: &LoadedTree) -> Result<(IntegerValue, Vec<TraceRecord>), ForestError> {
    let violations = t.validate();
    if !violations.is_empty() {
        return Err(TreeError::Invalid(violations).into());
    }
    if !t.is_proper() {
        return Ok((BigInt::zero(), Vec::new()));
    }
    let (v, _, records) = run_pipeline(t, true)?;
    Ok((v, records))
}

fn run_pipeline(t: &LoadedTree, trace: bool) -> Result<(IntegerValue, i8, Vec<TraceRecord>), ForestError> {
    let mut records = Vec::new();
    let wt = to_weighted(t);
    let sign = sign_of(&wt)?;
    let rt = to_redundancy(&wt);
    let rf = prune(&rt);
    let magnitude = if trace {
        records.push(TraceRecord { stage: "loaded".into(), structure: TreeJson::from(t), binomial: None });
        records.push(TraceRecord { stage: "weighted".into(), structure: TreeJson::from(&wt), binomial: None });
        records.push(TraceRecord { stage: "redundancy".into(), structure: TreeJson::from(&rt), binomial: None });
        records.push(TraceRecord { stage: "forest".into(), structure: TreeJson::from(&rf), binomial: None });
        eval_forest_traced(&rf, &mut records)
    } else {
        eval_forest(&rf)
    };
    let value = BigInt::from_biguint(if sign < 0 { BigSign::Minus } else { BigSign::Plus }, magnitude);
    Ok((value, sign, records))
}

fn eval_forest_traced(rf: &RedundancyForest, records: &mut Vec<TraceRecord>) -> BigUint {
    let mut factors = Vec::new();
    for rt in &rf.trees {
        let outcome = Eliminator::new(rt).run(
            |leaves| *leaves.first().expect("nonempty"),
            |ev, state| {
                let (stage, binomial) = match *ev {
                    Elimination::Step { top, bottom, .. } => ("eliminate", Some([top, bottom])),
                    Elimination::LeafExceedsParent { .. } => ("leaf_exceeds_parent", None),
                    Elimination::Last { weight, .. } => (if weight == 0 { "last" } else { "last_nonzero" }, None),
                };
                records.push(TraceRecord { stage: stage.into(), structure: TreeJson::from(&state.snapshot()), binomial });
            },
        );
        match outcome {
            None => return BigUint::zero(),
            Some(f) => factors.extend(f),
        }
    }
    factors_value(Some(factors))
}

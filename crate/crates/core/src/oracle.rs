//! Independent evaluator based on recursive edge cutting.
//!
//! Three cuts are used on a proper loaded tree `T`:
//!
//! * single-edge cut of a multiplicity-1 edge `{u, v}`: split `T` and give
//!   each endpoint a fresh label `x`; `|∫T| = |∫T1| · |∫T2|`.
//! * multi-edge cut of an edge of multiplicity `r` separating labels `I1`
//!   (with `s1` edges, counted with multiplicity) from `I2`: each side gets a
//!   new vertex `{a, b}` joined by an edge of multiplicity `|Ii| - si - 1`,
//!   and `∫T = C(r-1, |I1|-s1-2) · ∫T'1 · ∫T'2`.
//! * star cut: a multi-edge cut whose one side is a star.
//!
//! The recursion removes multiplicity-1 edges, then edges to nonzero-weight
//! leaves, then star cuts, bottoming out at single vertices and sun-like
//! stars (a star whose leaves have weight 0, with value the multinomial of
//! the centre weight over the edge weights). Absolute values are carried
//! through the recursion and the sign `(-1)^(Σ (m(e) - 1))` is applied once.
//!
//! Weights are recomputed here rather than taken from [`crate::forest`].

use num_bigint::{BigInt, BigUint, Sign as BigSign};
use num_traits::{One, Zero};
use thiserror::Error;

use crate::binomial::{binomial_signed, multinomial};
use crate::labels::{Label, LabelSet};
use crate::model::IntegerValue;
use crate::serial::TreeJson;
use crate::tree::{LoadedTree, TreeEdge, TreeError, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("edge {edge} has multiplicity {multiplicity}, not 1")]
    NotSingleEdge { edge: usize, multiplicity: u64 },
    #[error("star cut needs at least 3 vertices, got {0}")]
    TooSmall(usize),
    #[error("tree is not sun-like: {0}")]
    NotSunLike(&'static str),
    #[error("edge index {0} out of range")]
    NoSuchEdge(usize),
}

/// Fresh labels for the cut constructions: `n+1`, `n+2`, `n+3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AuxLabels {
    pub x: Label,
    pub a: Label,
    pub b: Label,
}

impl AuxLabels {
    pub fn for_ambient(n: u32) -> Self {
        AuxLabels { x: n + 1, a: n + 2, b: n + 3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum CutKind {
    SingleEdge,
    MultiEdge,
    StarCut,
}

impl CutKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CutKind::SingleEdge => "single_edge",
            CutKind::MultiEdge => "multi_edge",
            CutKind::StarCut => "star_cut",
        }
    }
}

/// Result of a multi-edge (or star) cut.
///
/// Side 1 is the component of the edge's `u` endpoint. `children` is `None`
/// exactly when some side would need a non-positive multiplicity, in which
/// case the binomial is 0 for proper inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutStep {
    pub edge: (VertexId, VertexId),
    pub kind: CutKind,
    /// Multiplicity `r` of the cut edge.
    pub multiplicity: u64,
    pub side_labels: [usize; 2],
    pub side_edges: [u64; 2],
    /// `(r - 1, |I1| - s1 - 2)`.
    pub binomial_args: (i64, i64),
    pub binomial: BigUint,
    pub children: Option<(LoadedTree, LoadedTree)>,
}

/// Edge returned by [`find_star_cut`]; cutting it leaves `center` on a star.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StarCut {
    pub edge: usize,
    pub center: VertexId,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct OracleTraceRecord {
    pub stage: String,
    pub structure: TreeJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub binomial: Option<[i64; 2]>,
}

fn weights(t: &LoadedTree) -> Vec<i64> {
    t.degrees()
        .iter()
        .enumerate()
        .map(|(v, &d)| (d + t.labels(v).len()) as i64 - 3)
        .collect()
}

/// The component on one side of `ei`, with `extra` labels added to the
/// cut endpoint and optionally a new pendant vertex. Labels are left as is.
fn side_tree(
    t: &LoadedTree,
    ei: usize,
    u_side: bool,
    extra_on_endpoint: &[Label],
    pendant: Option<(LabelSet, u64)>,
) -> LoadedTree {
    let side = t.side_of_u(ei);
    let e = t.edges()[ei];
    let endpoint = if u_side { e.u } else { e.v };
    let mut map = vec![usize::MAX; t.vertex_count()];
    let mut labels = Vec::new();
    for v in 0..t.vertex_count() {
        if side[v] == u_side {
            map[v] = labels.len();
            let mut h = t.labels(v).clone();
            if v == endpoint {
                for &l in extra_on_endpoint {
                    h.insert(l);
                }
            }
            labels.push(h);
        }
    }
    let mut edges: Vec<TreeEdge> = t
        .edges()
        .iter()
        .enumerate()
        .filter(|&(i, f)| i != ei && side[f.u] == u_side && side[f.v] == u_side)
        .map(|(_, f)| TreeEdge::new(map[f.u], map[f.v], f.multiplicity))
        .collect();
    if let Some((h, m)) = pendant {
        labels.push(h);
        edges.push(TreeEdge::new(map[endpoint], labels.len() - 1, m));
    }
    LoadedTree::from_parts(t.ambient_n() + 3, labels, edges)
}

/// Cuts a multiplicity-1 edge, adding the fresh label `x` to both endpoints.
/// Both results are relabeled onto `1..n'`.
pub fn single_edge_cut(t: &LoadedTree, ei: usize) -> Result<(LoadedTree, LoadedTree), OracleError> {
    let e = *t.edges().get(ei).ok_or(OracleError::NoSuchEdge(ei))?;
    if e.multiplicity != 1 {
        return Err(OracleError::NotSingleEdge { edge: ei, multiplicity: e.multiplicity });
    }
    let aux = AuxLabels::for_ambient(t.ambient_n());
    let t1 = side_tree(t, ei, true, &[aux.x], None).relabeled_contiguous();
    let t2 = side_tree(t, ei, false, &[aux.x], None).relabeled_contiguous();
    Ok((t1, t2))
}

/// Cuts any edge, attaching a new `{a, b}` vertex to each endpoint.
pub fn multi_edge_cut(t: &LoadedTree, ei: usize) -> Result<CutStep, OracleError> {
    let e = *t.edges().get(ei).ok_or(OracleError::NoSuchEdge(ei))?;
    let side = t.side_of_u(ei);
    let mut side_labels = [0usize; 2];
    for v in 0..t.vertex_count() {
        side_labels[usize::from(!side[v])] += t.labels(v).len();
    }
    let mut side_edges = [0u64; 2];
    for (i, f) in t.edges().iter().enumerate() {
        if i != ei {
            side_edges[usize::from(!side[f.u])] += f.multiplicity;
        }
    }
    let r = e.multiplicity as i64;
    let k1 = side_labels[0] as i64 - side_edges[0] as i64 - 2;
    let k2 = side_labels[1] as i64 - side_edges[1] as i64 - 2;
    let binomial = binomial_signed(r - 1, k1);
    let children = if k1 >= 0 && k2 >= 0 {
        let aux = AuxLabels::for_ambient(t.ambient_n());
        let ab = LabelSet::from([aux.a, aux.b]);
        let t1 = side_tree(t, ei, true, &[], Some((ab.clone(), (k1 + 1) as u64))).relabeled_contiguous();
        let t2 = side_tree(t, ei, false, &[], Some((ab, (k2 + 1) as u64))).relabeled_contiguous();
        Some((t1, t2))
    } else {
        None
    };
    Ok(CutStep {
        edge: (e.u, e.v),
        kind: CutKind::MultiEdge,
        multiplicity: e.multiplicity,
        side_labels,
        side_edges,
        binomial_args: (r - 1, k1),
        binomial,
        children,
    })
}

/// Vertex adjacent to every other vertex, for trees with 3 or more vertices.
fn star_center(t: &LoadedTree) -> Option<VertexId> {
    let nv = t.vertex_count();
    if nv < 3 {
        return None;
    }
    t.degrees().iter().position(|&d| d == nv - 1)
}

/// An edge whose cut leaves a star around `center`.
///
/// For a star any edge works. Otherwise strip the leaves; a vertex `u` of
/// degree 1 in what remains, with its remaining neighbour `u'`, gives the
/// edge `{u, u'}`.
pub fn find_star_cut(t: &LoadedTree) -> Result<StarCut, OracleError> {
    let nv = t.vertex_count();
    if nv < 3 {
        return Err(OracleError::TooSmall(nv));
    }
    if let Some(center) = star_center(t) {
        let edge = t.edges().iter().position(|e| e.u == center || e.v == center).expect("center has edges");
        return Ok(StarCut { edge, center });
    }
    let deg = t.degrees();
    let inc = t.incidence();
    let inner = |v: VertexId| deg[v] > 1;
    for u in (0..nv).filter(|&u| inner(u)) {
        let inner_edges: Vec<usize> = inc[u].iter().copied().filter(|&ei| inner(t.edges()[ei].other(u))).collect();
        if inner_edges.len() == 1 {
            return Ok(StarCut { edge: inner_edges[0], center: u });
        }
    }
    unreachable!("a tree that is not a star has an inner vertex of inner degree 1")
}

/// Absolute value of a sun-like tree: a star (or a two-vertex tree) whose
/// non-centre vertices have weight 0. Equals the multinomial of the centre
/// weight over the edge weights, or 0 when they do not add up.
pub fn sun_like_value(t: &LoadedTree) -> Result<BigUint, OracleError> {
    let w = weights(t);
    let center = match t.vertex_count() {
        0 | 1 => return Err(OracleError::NotSunLike("fewer than two vertices")),
        2 => usize::from(w[1] > w[0]),
        _ => star_center(t).ok_or(OracleError::NotSunLike("not a star"))?,
    };
    if w.iter().enumerate().any(|(v, &wv)| v != center && wv != 0) {
        return Err(OracleError::NotSunLike("a leaf has nonzero weight"));
    }
    if w[center] < 0 {
        return Err(OracleError::NotSunLike("centre breaks deg + |h| >= 3"));
    }
    let parts: Vec<u64> = t.edges().iter().map(|e| e.multiplicity - 1).collect();
    Ok(multinomial(w[center] as u64, &parts))
}

/// Signed value of a loaded tree by recursive cutting. Trees that are not
/// proper have value 0.
pub fn oracle_eval(t: &LoadedTree) -> Result<IntegerValue, TreeError> {
    evaluate(t, None)
}

/// [`oracle_eval`] with one record per cut and base case.
pub fn oracle_eval_traced(t: &LoadedTree) -> Result<(IntegerValue, Vec<OracleTraceRecord>), TreeError> {
    let mut records = Vec::new();
    let v = evaluate(t, Some(&mut records))?;
    Ok((v, records))
}

fn evaluate(t: &LoadedTree, trace: Option<&mut Vec<OracleTraceRecord>>) -> Result<IntegerValue, TreeError> {
    let violations = t.validate();
    if !violations.is_empty() {
        return Err(TreeError::Invalid(violations));
    }
    if !t.is_proper() {
        return Ok(BigInt::zero());
    }
    let mut sink = trace;
    let magnitude = abs_value(t, &mut sink);
    let edge_weight_sum: u64 = t.edges().iter().map(|e| e.multiplicity - 1).sum();
    let sign = if edge_weight_sum.is_multiple_of(2) { BigSign::Plus } else { BigSign::Minus };
    Ok(BigInt::from_biguint(sign, magnitude))
}

fn record(sink: &mut Option<&mut Vec<OracleTraceRecord>>, stage: &str, t: &LoadedTree, binomial: Option<[i64; 2]>) {
    if let Some(out) = sink.as_deref_mut() {
        out.push(OracleTraceRecord { stage: stage.to_string(), structure: TreeJson::from(t), binomial });
    }
}

fn abs_value(t: &LoadedTree, sink: &mut Option<&mut Vec<OracleTraceRecord>>) -> BigUint {
    if !t.is_proper() {
        record(sink, "not_proper", t, None);
        return BigUint::zero();
    }
    let nv = t.vertex_count();
    if nv == 1 {
        record(sink, "single_vertex", t, None);
        return if t.labels(0).len() == 3 { BigUint::one() } else { BigUint::zero() };
    }

    if let Some(ei) = t.edges().iter().position(|e| e.multiplicity == 1) {
        record(sink, CutKind::SingleEdge.as_str(), t, None);
        let (t1, t2) = single_edge_cut(t, ei).expect("multiplicity is 1");
        let v1 = abs_value(&t1, sink);
        if v1.is_zero() {
            return v1;
        }
        return v1 * abs_value(&t2, sink);
    }

    let w = weights(t);
    let (ei, kind) = if nv == 2 {
        if w[0] == 0 || w[1] == 0 {
            return sun_like(t, sink);
        }
        (0, CutKind::MultiEdge)
    } else {
        let deg = t.degrees();
        let heavy_leaf = (0..nv).find(|&v| deg[v] == 1 && w[v] > 0);
        match heavy_leaf {
            Some(l) => (t.edges().iter().position(|e| e.u == l || e.v == l).expect("leaf has an edge"), CutKind::MultiEdge),
            None if star_center(t).is_some() => return sun_like(t, sink),
            None => (find_star_cut(t).expect("3+ vertices").edge, CutKind::StarCut),
        }
    };

    let step = CutStep { kind, ..multi_edge_cut(t, ei).expect("edge index in range") };
    let (top, bottom) = step.binomial_args;
    record(sink, kind.as_str(), t, Some([top, bottom]));
    match step.children {
        Some((t1, t2)) if !step.binomial.is_zero() => {
            let v1 = abs_value(&t1, sink);
            if v1.is_zero() {
                return v1;
            }
            step.binomial * v1 * abs_value(&t2, sink)
        }
        _ => BigUint::zero(),
    }
}

fn sun_like(t: &LoadedTree, sink: &mut Option<&mut Vec<OracleTraceRecord>>) -> BigUint {
    record(sink, "sun_like", t, None);
    sun_like_value(t).expect("caller checked the sun-like shape")
}

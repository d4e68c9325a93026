//! JSON and DOT renderings of loaded, weighted, and redundancy structures.
//!
//! All structures share one JSON schema:
//! `{"vertices":[{"id","labels","weight"?}],"edges":[{"u","v","multiplicity"?,"weight"?}]}`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::forest::{Origin, RedundancyForest, RedundancyTree, WeightedTree};
use crate::labels::{Label, LabelSet};
use crate::tree::{LoadedTree, TreeEdge, TreeError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexJson {
    pub id: usize,
    pub labels: Vec<Label>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub u: usize,
    pub v: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplicity: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TreeJson {
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<EdgeJson>,
}

impl TreeJson {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }
}

impl From<&LoadedTree> for TreeJson {
    fn from(t: &LoadedTree) -> Self {
        TreeJson {
            vertices: t
                .all_labels()
                .iter()
                .enumerate()
                .map(|(id, h)| VertexJson { id, labels: h.as_slice().to_vec(), weight: None })
                .collect(),
            edges: t
                .edges()
                .iter()
                .map(|e| EdgeJson { u: e.u, v: e.v, multiplicity: Some(e.multiplicity), weight: None })
                .collect(),
        }
    }
}

impl From<&WeightedTree> for TreeJson {
    fn from(t: &WeightedTree) -> Self {
        TreeJson {
            vertices: t
                .vertex_weights
                .iter()
                .enumerate()
                .map(|(id, &w)| VertexJson {
                    id,
                    labels: t.labels.get(id).map(|h| h.as_slice().to_vec()).unwrap_or_default(),
                    weight: Some(w),
                })
                .collect(),
            edges: t
                .edges
                .iter()
                .map(|e| EdgeJson { u: e.u, v: e.v, multiplicity: Some(e.weight + 1), weight: Some(e.weight) })
                .collect(),
        }
    }
}

impl From<&RedundancyTree> for TreeJson {
    fn from(t: &RedundancyTree) -> Self {
        TreeJson {
            vertices: t
                .vertices
                .iter()
                .map(|v| VertexJson { id: v.id, labels: v.labels.as_slice().to_vec(), weight: Some(v.weight) })
                .collect(),
            edges: t.edges.iter().map(|&(u, v)| EdgeJson { u, v, multiplicity: None, weight: None }).collect(),
        }
    }
}

impl From<&RedundancyForest> for TreeJson {
    fn from(f: &RedundancyForest) -> Self {
        let mut out = TreeJson::default();
        for t in &f.trees {
            let j = TreeJson::from(t);
            out.vertices.extend(j.vertices);
            out.edges.extend(j.edges);
        }
        out
    }
}

/// Reads a loaded tree from the shared schema. Vertex ids must be
/// `0..k` in some order; the ambient `n` is the largest label. The result
/// is validated.
impl TryFrom<&TreeJson> for LoadedTree {
    type Error = TreeError;

    fn try_from(j: &TreeJson) -> Result<Self, TreeError> {
        let k = j.vertices.len();
        let mut labels = vec![None; k];
        for v in &j.vertices {
            if v.id >= k || labels[v.id].is_some() {
                return Err(TreeError::Invalid(vec![crate::tree::Violation::NoVertices]));
            }
            labels[v.id] = Some(v.labels.iter().copied().collect::<LabelSet>());
        }
        let labels: Vec<LabelSet> = labels.into_iter().map(|h| h.expect("all ids filled")).collect();
        let n = labels.iter().filter_map(LabelSet::max).max().unwrap_or(0);
        let edges = j
            .edges
            .iter()
            .map(|e| TreeEdge::new(e.u, e.v, e.multiplicity.unwrap_or(1)))
            .collect();
        LoadedTree::new(n, labels, edges)
    }
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn write_dot(name: &str, nodes: &[(usize, String, Option<&str>)], edges: &[(usize, usize, Option<String>)]) -> String {
    let mut out = String::new();
    writeln!(out, "graph {name} {{").unwrap();
    writeln!(out, "  node [shape=circle];").unwrap();
    for (id, label, shape) in nodes {
        match shape {
            Some(s) => writeln!(out, "  v{id} [label=\"{}\", shape={s}];", dot_escape(label)).unwrap(),
            None => writeln!(out, "  v{id} [label=\"{}\"];", dot_escape(label)).unwrap(),
        }
    }
    for (u, v, label) in edges {
        match label {
            Some(l) => writeln!(out, "  v{u} -- v{v} [label=\"{}\"];", dot_escape(l)).unwrap(),
            None => writeln!(out, "  v{u} -- v{v};").unwrap(),
        }
    }
    out.push_str("}\n");
    out
}

/// Structures that render as DOT graphs.
pub trait ToDot {
    fn to_dot(&self) -> String;
}

/// Vertices show label sets, edges show multiplicities.
impl ToDot for LoadedTree {
    fn to_dot(&self) -> String {
        let nodes: Vec<_> = self.all_labels().iter().enumerate().map(|(i, h)| (i, h.to_string(), None)).collect();
        let edges: Vec<_> = self.edges().iter().map(|e| (e.u, e.v, Some(e.multiplicity.to_string()))).collect();
        write_dot("loaded_tree", &nodes, &edges)
    }
}

impl ToDot for WeightedTree {
    fn to_dot(&self) -> String {
        let nodes: Vec<_> = self
            .vertex_weights
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let h = self.labels.get(i).cloned().unwrap_or_default();
                (i, format!("{h}\\nw={w}"), None)
            })
            .collect();
        let edges: Vec<_> = self.edges.iter().map(|e| (e.u, e.v, Some(format!("w={}", e.weight)))).collect();
        write_dot("weighted_tree", &nodes, &edges)
    }
}

fn redundancy_nodes(t: &RedundancyTree) -> Vec<(usize, String, Option<&'static str>)> {
    t.vertices
        .iter()
        .map(|v| match v.origin {
            Origin::FromEdge => (v.id, v.weight.to_string(), Some("box")),
            _ => (v.id, v.weight.to_string(), None),
        })
        .collect()
}

/// Vertices show weights; edge midpoints are drawn as boxes.
impl ToDot for RedundancyTree {
    fn to_dot(&self) -> String {
        let edges: Vec<_> = self.edges.iter().map(|&(u, v)| (u, v, None)).collect();
        write_dot("redundancy_tree", &redundancy_nodes(self), &edges)
    }
}

impl ToDot for RedundancyForest {
    fn to_dot(&self) -> String {
        let mut nodes = Vec::new();
        let mut edges = Vec::new();
        for t in &self.trees {
            nodes.extend(redundancy_nodes(t));
            edges.extend(t.edges.iter().map(|&(u, v)| (u, v, None)));
        }
        write_dot("redundancy_forest", &nodes, &edges)
    }
}

pub fn tree_to_dot(t: &dyn ToDot) -> String {
    t.to_dot()
}

//! JSON documents for hypergraphs and cospans.
//!
//! A graph document lists `nodes` (arbitrary distinct ids) and `edges`
//! (`{id, label, sources, targets}`); a cospan document adds `left` and
//! `right` node-id lists. Ids are renumbered densely on load in the order
//! they appear in `nodes`, and edges keep their document order.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cospan::Cospan;
use crate::hypergraph::{Hypergraph, NodeId};
use crate::sigterm::Signature;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DocError {
    #[error("malformed document at {line}:{column}: {message}")]
    Malformed {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid document: {0}")]
    Invalid(String),
}

impl DocError {
    pub fn code(&self) -> &'static str {
        match self {
            DocError::Malformed { .. } => "MalformedDocument",
            DocError::Invalid(_) => "InvalidDocument",
        }
    }

    pub fn location(&self) -> Option<(usize, usize)> {
        match self {
            DocError::Malformed { line, column, .. } => Some((*line, *column)),
            DocError::Invalid(_) => None,
        }
    }
}

impl From<serde_json::Error> for DocError {
    fn from(e: serde_json::Error) -> Self {
        DocError::Malformed {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub id: u64,
    pub label: String,
    pub sources: Vec<u64>,
    pub targets: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDoc {
    pub nodes: Vec<u64>,
    pub edges: Vec<EdgeDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CospanDoc {
    pub nodes: Vec<u64>,
    pub edges: Vec<EdgeDoc>,
    pub left: Vec<u64>,
    pub right: Vec<u64>,
}

impl GraphDoc {
    pub fn from_hypergraph(g: &Hypergraph) -> Self {
        let ids = |vs: &[NodeId]| vs.iter().map(|&v| v as u64).collect();
        GraphDoc {
            nodes: (0..g.node_count as u64).collect(),
            edges: g
                .edges
                .iter()
                .enumerate()
                .map(|(i, e)| EdgeDoc {
                    id: i as u64,
                    label: e.label.clone(),
                    sources: ids(&e.sources),
                    targets: ids(&e.targets),
                })
                .collect(),
        }
    }

    /// The hypergraph with dense ids, and the id table used.
    pub fn to_hypergraph(&self) -> Result<(Hypergraph, BTreeMap<u64, NodeId>), DocError> {
        let mut index = BTreeMap::new();
        for (i, &v) in self.nodes.iter().enumerate() {
            if index.insert(v, i).is_some() {
                return Err(DocError::Invalid(format!("node id {v} listed twice")));
            }
        }
        let mut g = Hypergraph::discrete(self.nodes.len());
        let mut edge_ids = BTreeMap::new();
        for e in &self.edges {
            if edge_ids.insert(e.id, ()).is_some() {
                return Err(DocError::Invalid(format!("edge id {} listed twice", e.id)));
            }
            if e.label.is_empty() {
                return Err(DocError::Invalid(format!("edge {} has an empty label", e.id)));
            }
            let lookup = |vs: &[u64]| -> Result<Vec<NodeId>, DocError> {
                vs.iter()
                    .map(|v| {
                        index.get(v).copied().ok_or_else(|| {
                            DocError::Invalid(format!("edge {} refers to unknown node {v}", e.id))
                        })
                    })
                    .collect()
            };
            g.add_edge(&e.label, lookup(&e.sources)?, lookup(&e.targets)?);
        }
        Ok((g, index))
    }
}

impl CospanDoc {
    pub fn from_cospan(c: &Cospan) -> Self {
        let g = GraphDoc::from_hypergraph(&c.carrier);
        CospanDoc {
            nodes: g.nodes,
            edges: g.edges,
            left: c.left.iter().map(|&v| v as u64).collect(),
            right: c.right.iter().map(|&v| v as u64).collect(),
        }
    }

    pub fn to_cospan(&self) -> Result<Cospan, DocError> {
        let graph = GraphDoc {
            nodes: self.nodes.clone(),
            edges: self.edges.clone(),
        };
        let (carrier, index) = graph.to_hypergraph()?;
        let lookup = |vs: &[u64], side: &str| -> Result<Vec<NodeId>, DocError> {
            vs.iter()
                .map(|v| {
                    index
                        .get(v)
                        .copied()
                        .ok_or_else(|| DocError::Invalid(format!("{side} interface refers to unknown node {v}")))
                })
                .collect()
        };
        Ok(Cospan {
            left: lookup(&self.left, "left")?,
            right: lookup(&self.right, "right")?,
            carrier,
        })
    }
}

pub fn parse_graph(src: &str) -> Result<Hypergraph, DocError> {
    let doc: GraphDoc = serde_json::from_str(src)?;
    Ok(doc.to_hypergraph()?.0)
}

pub fn parse_cospan(src: &str) -> Result<Cospan, DocError> {
    let doc: CospanDoc = serde_json::from_str(src)?;
    doc.to_cospan()
}

/// Parse a cospan and check its labels against `sig`.
pub fn parse_cospan_over(src: &str, sig: &Signature) -> Result<Cospan, DocError> {
    let c = parse_cospan(src)?;
    c.carrier
        .validate(Some(sig))
        .map_err(|e| DocError::Invalid(e.to_string()))?;
    Ok(c)
}

pub fn graph_to_json(g: &Hypergraph) -> String {
    let mut s = serde_json::to_string_pretty(&GraphDoc::from_hypergraph(g)).expect("plain data");
    s.push('\n');
    s
}

pub fn cospan_to_json(c: &Cospan) -> String {
    let mut s = serde_json::to_string_pretty(&CospanDoc::from_cospan(c)).expect("plain data");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparse_ids_are_renumbered() {
        let src = r#"{"nodes":[10,20,30],"edges":[{"id":7,"label":"f","sources":[30],"targets":[10]}],
                      "left":[30,30],"right":[20,10]}"#;
        let c = parse_cospan(src).unwrap();
        assert_eq!(c.carrier.node_count, 3);
        assert_eq!(c.carrier.edges[0].sources, vec![2]);
        assert_eq!(c.left, vec![2, 2]);
        assert_eq!(c.right, vec![1, 0]);
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let src = r#"{"nodes":[0,1],"edges":[{"id":0,"label":"f","sources":[1],"targets":[0]}],"left":[1],"right":[0]}"#;
        let once = cospan_to_json(&parse_cospan(src).unwrap());
        let twice = cospan_to_json(&parse_cospan(&once).unwrap());
        assert_eq!(once, twice);
    }

    #[test]
    fn errors() {
        let e = parse_cospan("{\"nodes\": [0,").unwrap_err();
        assert_eq!(e.code(), "MalformedDocument");
        assert!(e.location().is_some());
        let e = parse_cospan(r#"{"nodes":[0,0],"edges":[],"left":[],"right":[]}"#).unwrap_err();
        assert_eq!(e.code(), "InvalidDocument");
        let e = parse_cospan(r#"{"nodes":[0],"edges":[],"left":[4],"right":[]}"#).unwrap_err();
        assert_eq!(e.code(), "InvalidDocument");
        let e = parse_graph(r#"{"nodes":[0],"edges":[],"extra":1}"#).unwrap_err();
        assert_eq!(e.code(), "MalformedDocument");
        let sig = Signature::new().with("f", 1, 1);
        let bad = r#"{"nodes":[0],"edges":[{"id":0,"label":"f","sources":[0,0],"targets":[0]}],"left":[],"right":[]}"#;
        assert_eq!(parse_cospan_over(bad, &sig).unwrap_err().code(), "InvalidDocument");
    }
}

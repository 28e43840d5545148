//! Decompositions of right-monogamous acyclic cospans: node orders and edge
//! levels, cuts, weak and strong decomposition around a convex
//! sub-hypergraph, factorisation into levels, and readback into terms.

mod cut;
mod levels;
mod readback;
mod weak;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::cospan::Cospan;
use crate::hypergraph::{EdgeId, NodeId};

pub use cut::{apply_cut, complete_cut, Cut, CutOutcome};
pub use levels::{factorise_into_levels, level0_decompose, Level, LevelFactorisation, Level0};
pub use readback::{function_term, monogamous_term, permutation_term, readback_term};
pub use weak::{
    strong_decompose, weak_decompose, InOutSignature, StrongDecomposition, SubHypergraph,
    UpDownSignature, WeakDecomposition,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecomposeError {
    #[error("cospan is not right-monogamous")]
    NotRightMonogamous,
    #[error("cospan is cyclic")]
    Cyclic,
    #[error("node {0} is not terminal")]
    NotTerminal(NodeId),
    #[error("partition mismatch: {0}")]
    PartitionMismatch(String),
    #[error("no cut given for terminal node {0}")]
    MissingCut(NodeId),
    #[error("sub-hypergraph is not convex")]
    NotConvex,
    #[error("not a sub-hypergraph: {0}")]
    NotASubhypergraph(String),
    #[error("invalid up-down signature: {0}")]
    InvalidSignature(String),
    #[error("invalid in-out signature: {0}")]
    InvalidInOutSignature(String),
    #[error("incompatible gluing: {0}")]
    IncompatibleGluing(String),
    #[error("order-0 terminal nodes are not listed first in the right interface")]
    BadInterfaceOrder,
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
}

impl DecomposeError {
    pub fn code(&self) -> &'static str {
        match self {
            DecomposeError::NotRightMonogamous => "NotRightMonogamous",
            DecomposeError::Cyclic => "Cyclic",
            DecomposeError::NotTerminal(_) => "NotTerminal",
            DecomposeError::PartitionMismatch(_) => "PartitionMismatch",
            DecomposeError::MissingCut(_) => "MissingCut",
            DecomposeError::NotConvex => "NotConvex",
            DecomposeError::NotASubhypergraph(_) => "NotASubhypergraph",
            DecomposeError::InvalidSignature(_) => "InvalidSignature",
            DecomposeError::InvalidInOutSignature(_) => "InvalidInOutSignature",
            DecomposeError::IncompatibleGluing(_) => "IncompatibleGluing",
            DecomposeError::BadInterfaceOrder => "BadInterfaceOrder",
            DecomposeError::UnknownNode(_) => "UnknownNode",
            DecomposeError::UnknownEdge(_) => "UnknownEdge",
        }
    }
}

/// An in-connection of a node: a target position of a hyperedge, or a
/// position of the left interface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Connection {
    Input(usize),
    Edge(EdgeId, usize),
}

/// All in-connections of `v`, inputs first.
pub fn in_connections(c: &Cospan, v: NodeId) -> Vec<Connection> {
    let mut out: Vec<Connection> = c
        .left
        .iter()
        .enumerate()
        .filter(|(_, &u)| u == v)
        .map(|(p, _)| Connection::Input(p))
        .collect();
    for (id, e) in c.carrier.edges.iter().enumerate() {
        for (pos, &t) in e.targets.iter().enumerate() {
            if t == v {
                out.push(Connection::Edge(id, pos));
            }
        }
    }
    out
}

/// In-connections of every node, indexed by node.
pub fn all_in_connections(c: &Cospan) -> Vec<Vec<Connection>> {
    let mut out = vec![Vec::new(); c.carrier.node_count];
    for (p, &v) in c.left.iter().enumerate() {
        out[v].push(Connection::Input(p));
    }
    for (id, e) in c.carrier.edges.iter().enumerate() {
        for (pos, &t) in e.targets.iter().enumerate() {
            out[t].push(Connection::Edge(id, pos));
        }
    }
    out
}

pub(crate) fn require_rmac(c: &Cospan) -> Result<(), DecomposeError> {
    if !c.is_right_monogamous() {
        return Err(DecomposeError::NotRightMonogamous);
    }
    if !c.is_acyclic() {
        return Err(DecomposeError::Cyclic);
    }
    Ok(())
}

/// Orders of nodes, levels of edges and the left-amonogamous nodes of a
/// right-monogamous acyclic cospan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stratification {
    pub amonogamous: Vec<bool>,
    pub node_order: Vec<usize>,
    pub edge_level: Vec<usize>,
}

impl Stratification {
    pub fn of(c: &Cospan) -> Result<Self, DecomposeError> {
        require_rmac(c)?;
        let g = &c.carrier;
        let conns = all_in_connections(c);
        let amonogamous: Vec<bool> = conns.iter().map(|cs| cs.len() != 1).collect();
        let order = g.topological_edge_order().ok_or(DecomposeError::Cyclic)?;
        let mut node_order: Vec<usize> = amonogamous.iter().map(|&a| usize::from(a)).collect();
        let mut edge_level = vec![0; g.edges.len()];
        for e in order {
            let edge = &g.edges[e];
            let level = edge.sources.iter().map(|&s| node_order[s]).max().unwrap_or(0);
            edge_level[e] = level;
            for &t in &edge.targets {
                node_order[t] = node_order[t].max(level + usize::from(amonogamous[t]));
            }
        }
        Ok(Stratification {
            amonogamous,
            node_order,
            edge_level,
        })
    }

    pub fn max_level(&self) -> usize {
        self.edge_level.iter().copied().max().unwrap_or(0)
    }
}

/// Nodes whose in-connections deviate from a plain wire: anything other
/// than exactly one in-connection, counting interface occurrences.
pub fn left_amonogamous_nodes(c: &Cospan) -> Result<BTreeSet<NodeId>, DecomposeError> {
    let s = Stratification::of(c)?;
    Ok(s.amonogamous
        .iter()
        .enumerate()
        .filter(|(_, &a)| a)
        .map(|(v, _)| v)
        .collect())
}

pub fn node_order(c: &Cospan, v: NodeId) -> Result<usize, DecomposeError> {
    let s = Stratification::of(c)?;
    s.node_order.get(v).copied().ok_or(DecomposeError::UnknownNode(v))
}

pub fn edge_level(c: &Cospan, e: EdgeId) -> Result<usize, DecomposeError> {
    let s = Stratification::of(c)?;
    s.edge_level.get(e).copied().ok_or(DecomposeError::UnknownEdge(e))
}

use std::collections::{BTreeMap, BTreeSet};

use super::{in_connections, require_rmac, Connection, DecomposeError};
use crate::cospan::Cospan;
use crate::hypergraph::NodeId;

/// An ordered partition of the in-connections of a terminal node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cut {
    pub node: NodeId,
    pub partition: Vec<BTreeSet<Connection>>,
}

impl Cut {
    /// The cut with a single block.
    pub fn trivial(c: &Cospan, node: NodeId) -> Cut {
        Cut {
            node,
            partition: vec![in_connections(c, node).into_iter().collect()],
        }
    }

    /// One singleton block per in-connection, or one empty block when there
    /// are none.
    pub fn discrete(c: &Cospan, node: NodeId) -> Cut {
        let conns = in_connections(c, node);
        let partition = if conns.is_empty() {
            vec![BTreeSet::new()]
        } else {
            conns.into_iter().map(|x| BTreeSet::from([x])).collect()
        };
        Cut { node, partition }
    }
}

/// Result of cutting: the new cospan, the reconnect map from new right
/// positions to old ones, and the node pieces each cut node became.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutOutcome {
    pub cospan: Cospan,
    pub reconnect: Vec<usize>,
    pub pieces: BTreeMap<NodeId, Vec<NodeId>>,
}

fn check_partition(c: &Cospan, cut: &Cut) -> Result<(), DecomposeError> {
    if cut.node >= c.carrier.node_count {
        return Err(DecomposeError::UnknownNode(cut.node));
    }
    if cut.partition.is_empty() {
        return Err(DecomposeError::PartitionMismatch(format!(
            "cut of node {} has no blocks",
            cut.node
        )));
    }
    let expected: BTreeSet<Connection> = in_connections(c, cut.node).into_iter().collect();
    let mut seen = BTreeSet::new();
    for block in &cut.partition {
        for conn in block {
            if !seen.insert(*conn) {
                return Err(DecomposeError::PartitionMismatch(format!(
                    "{conn:?} appears in two blocks of the cut of node {}",
                    cut.node
                )));
            }
        }
    }
    if seen != expected {
        return Err(DecomposeError::PartitionMismatch(format!(
            "blocks of the cut of node {} do not cover exactly its in-connections",
            cut.node
        )));
    }
    Ok(())
}

/// Splits terminal node `cut.node` into one node per block.
pub fn apply_cut(c: &Cospan, cut: &Cut) -> Result<CutOutcome, DecomposeError> {
    require_rmac(c)?;
    apply_cut_unchecked(c, cut)
}

fn apply_cut_unchecked(c: &Cospan, cut: &Cut) -> Result<CutOutcome, DecomposeError> {
    let Some(position) = c.right.iter().position(|&v| v == cut.node) else {
        return Err(if cut.node < c.carrier.node_count {
            DecomposeError::NotTerminal(cut.node)
        } else {
            DecomposeError::UnknownNode(cut.node)
        });
    };
    check_partition(c, cut)?;
    let mut out = c.clone();
    let mut pieces = vec![cut.node];
    for _ in 1..cut.partition.len() {
        pieces.push(out.carrier.add_node());
    }
    for (block, &piece) in cut.partition.iter().zip(&pieces) {
        for conn in block {
            match *conn {
                Connection::Input(p) => out.left[p] = piece,
                Connection::Edge(e, pos) => out.carrier.edges[e].targets[pos] = piece,
            }
        }
    }
    out.right.splice(position..=position, pieces.iter().copied());
    let reconnect = (0..out.right.len())
        .map(|i| {
            if i < position {
                i
            } else if i < position + pieces.len() {
                position
            } else {
                i + 1 - pieces.len()
            }
        })
        .collect();
    Ok(CutOutcome {
        cospan: out,
        reconnect,
        pieces: BTreeMap::from([(cut.node, pieces)]),
    })
}

/// Applies one cut per terminal node, in right-interface order.
pub fn complete_cut(c: &Cospan, cuts: &[Cut]) -> Result<CutOutcome, DecomposeError> {
    require_rmac(c)?;
    let mut by_node: BTreeMap<NodeId, &Cut> = BTreeMap::new();
    for cut in cuts {
        if !c.right.contains(&cut.node) {
            return Err(if cut.node < c.carrier.node_count {
                DecomposeError::NotTerminal(cut.node)
            } else {
                DecomposeError::UnknownNode(cut.node)
            });
        }
        if by_node.insert(cut.node, cut).is_some() {
            return Err(DecomposeError::PartitionMismatch(format!(
                "node {} is cut twice",
                cut.node
            )));
        }
    }
    if let Some(&v) = c.right.iter().find(|v| !by_node.contains_key(v)) {
        return Err(DecomposeError::MissingCut(v));
    }
    let mut current = c.clone();
    let mut reconnect: Vec<usize> = (0..c.right.len()).collect();
    let mut pieces = BTreeMap::new();
    for &v in &c.right {
        let step = apply_cut_unchecked(&current, by_node[&v])?;
        reconnect = step.reconnect.iter().map(|&i| reconnect[i]).collect();
        pieces.extend(step.pieces);
        current = step.cospan;
    }
    Ok(CutOutcome {
        cospan: current,
        reconnect,
        pieces,
    })
}

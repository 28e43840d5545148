use std::collections::{BTreeMap, BTreeSet};

use super::{all_in_connections, Connection, DecomposeError, Stratification};
use crate::cospan::{function_to_cospan, Cospan, FinFunction};
use crate::hypergraph::{EdgeId, Hypergraph, NodeId};

/// A wire between factors. Plain nodes of the original carrier travel as a
/// single wire; a left-amonogamous node travels as one wire per in-connection
/// until the discrete factor of its order merges them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Wire {
    Plain(NodeId),
    End(NodeId, Connection),
    Merged(NodeId),
}

impl Wire {
    fn node(self) -> NodeId {
        match self {
            Wire::Plain(v) | Wire::End(v, _) | Wire::Merged(v) => v,
        }
    }
}

/// One stage `M_i ; (id_{k_i} ⊕ (D_i ; …))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Level {
    /// Monogamous acyclic factor holding the level-`i` hyperedges.
    pub m: Cospan,
    /// Number of outputs of `m` that bypass the remaining stages.
    pub k: usize,
    /// Discrete right-monogamous factor merging order-`i+1` nodes.
    pub d: Cospan,
    /// Original hyperedge behind each hyperedge of `m`.
    pub edges: Vec<EdgeId>,
    /// Original left-amonogamous nodes merged or created by `d`.
    pub merged: Vec<NodeId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelFactorisation {
    pub levels: Vec<Level>,
    /// Final reordering of the outputs, as a bijection from stage order to
    /// the original right interface.
    pub pi: FinFunction,
}

impl LevelFactorisation {
    /// Recomposition from stage `from` onwards, before the final reordering.
    pub fn recompose_from(&self, from: usize) -> Cospan {
        let mut acc = Cospan::identity(0);
        for level in self.levels[from..].iter().rev() {
            let tail = level.d.compose(&acc).expect("stage interfaces agree");
            acc = level
                .m
                .compose(&Cospan::identity(level.k).tensor(&tail))
                .expect("stage interfaces agree");
        }
        acc
    }

    pub fn recompose(&self) -> Cospan {
        self.recompose_from(0)
            .compose(&function_to_cospan(&self.pi))
            .expect("reordering matches the output width")
    }
}

struct Stages {
    levels: Vec<Level>,
    /// Original terminal nodes in the order the stages emit them.
    emitted: Vec<NodeId>,
}

fn build_stages(g: &Cospan) -> Result<Stages, DecomposeError> {
    let strat = Stratification::of(g)?;
    let carrier = &g.carrier;
    let amono = &strat.amonogamous;
    let conns = all_in_connections(g);
    let wire_in = |v: NodeId, c: Connection| if amono[v] { Wire::End(v, c) } else { Wire::Plain(v) };
    let wire_out = |v: NodeId| if amono[v] { Wire::Merged(v) } else { Wire::Plain(v) };
    let right_pos: BTreeMap<NodeId, usize> = g.right.iter().enumerate().map(|(i, &v)| (v, i)).collect();

    let last = g
        .right
        .iter()
        .map(|&v| strat.node_order[v])
        .chain(strat.edge_level.iter().copied())
        .max()
        .unwrap_or(0);

    let mut entering: Vec<Wire> = g
        .left
        .iter()
        .enumerate()
        .map(|(p, &v)| wire_in(v, Connection::Input(p)))
        .collect();
    let mut levels = Vec::new();
    let mut emitted = Vec::new();
    for stage in 0..=last {
        let stage_edges: Vec<EdgeId> = (0..carrier.edges.len())
            .filter(|&e| strat.edge_level[e] == stage)
            .collect();
        let mut m = Hypergraph::discrete(0);
        let mut index: BTreeMap<Wire, NodeId> = BTreeMap::new();
        let mut left = Vec::with_capacity(entering.len());
        for &w in &entering {
            let x = m.add_node();
            index.insert(w, x);
            left.push(x);
        }
        for &e in &stage_edges {
            for (pos, &t) in carrier.edges[e].targets.iter().enumerate() {
                let x = m.add_node();
                index.insert(wire_in(t, Connection::Edge(e, pos)), x);
            }
        }
        let mut consumed = BTreeSet::new();
        for &e in &stage_edges {
            let edge = &carrier.edges[e];
            let sources = edge
                .sources
                .iter()
                .map(|&s| {
                    let w = wire_out(s);
                    consumed.insert(w);
                    index[&w]
                })
                .collect();
            let targets = edge
                .targets
                .iter()
                .enumerate()
                .map(|(pos, &t)| index[&wire_in(t, Connection::Edge(e, pos))])
                .collect();
            m.add_edge(&edge.label, sources, targets);
        }
        let alive: Vec<Wire> = index.keys().copied().filter(|w| !consumed.contains(w)).collect();
        let (mut aside, rest): (Vec<Wire>, Vec<Wire>) = alive.into_iter().partition(|&w| {
            w == wire_out(w.node())
                && right_pos.contains_key(&w.node())
                && strat.node_order[w.node()] == stage
        });
        aside.sort_by_key(|w| right_pos[&w.node()]);
        emitted.extend(aside.iter().map(|w| w.node()));
        let m = Cospan {
            right: aside.iter().chain(&rest).map(|w| index[w]).collect(),
            left,
            carrier: m,
        };

        let mut next: BTreeSet<Wire> = BTreeSet::new();
        let mut merged = BTreeSet::new();
        let forward = |w: Wire| match w {
            Wire::End(v, _) if strat.node_order[v] == stage + 1 => Wire::Merged(v),
            other => other,
        };
        for &w in &rest {
            let f = forward(w);
            if let Wire::Merged(v) = f {
                merged.insert(v);
            }
            next.insert(f);
        }
        if stage == 0 {
            for v in carrier.nodes().filter(|&v| conns[v].is_empty()) {
                merged.insert(v);
                next.insert(Wire::Merged(v));
            }
        }
        let next: Vec<Wire> = next.into_iter().collect();
        let position: BTreeMap<Wire, usize> = next.iter().enumerate().map(|(i, &w)| (w, i)).collect();
        let d = function_to_cospan(&FinFunction {
            dom: rest.len(),
            cod: next.len(),
            table: rest.iter().map(|&w| position[&forward(w)]).collect(),
        });
        levels.push(Level {
            m,
            k: aside.len(),
            d,
            edges: stage_edges,
            merged: merged.into_iter().collect(),
        });
        entering = next;
    }
    debug_assert!(entering.is_empty());
    Ok(Stages { levels, emitted })
}

fn reorder(emitted: &[NodeId], target: &[NodeId]) -> FinFunction {
    let pos: BTreeMap<NodeId, usize> = target.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    FinFunction {
        dom: emitted.len(),
        cod: target.len(),
        table: emitted.iter().map(|v| pos[v]).collect(),
    }
}

/// Alternating monogamous and discrete factors, one stage per level.
pub fn factorise_into_levels(g: &Cospan) -> Result<LevelFactorisation, DecomposeError> {
    let stages = build_stages(g)?;
    Ok(LevelFactorisation {
        pi: reorder(&stages.emitted, &g.right),
        levels: stages.levels,
    })
}

/// `g ≅ m ; (id_k ⊕ (d ; rest))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Level0 {
    pub m: Cospan,
    pub k: usize,
    pub d: Cospan,
    pub rest: Cospan,
}

impl Level0 {
    pub fn recompose(&self) -> Cospan {
        let tail = self.d.compose(&self.rest).expect("interfaces agree");
        self.m
            .compose(&Cospan::identity(self.k).tensor(&tail))
            .expect("interfaces agree")
    }
}

/// First stage of the level factorisation. The order-0 terminal nodes must
/// come first in the right interface.
pub fn level0_decompose(g: &Cospan) -> Result<Level0, DecomposeError> {
    let stages = build_stages(g)?;
    let first = &stages.levels[0];
    if stages.emitted[..first.k] != g.right[..first.k] {
        return Err(DecomposeError::BadInterfaceOrder);
    }
    let rest_factors = LevelFactorisation {
        levels: stages.levels[1..].to_vec(),
        pi: reorder(&stages.emitted[first.k..], &g.right[first.k..]),
    };
    let rest = if rest_factors.levels.is_empty() {
        Cospan::identity(0)
    } else {
        rest_factors.recompose()
    };
    Ok(Level0 {
        m: first.m.clone(),
        k: first.k,
        d: first.d.clone(),
        rest,
    })
}

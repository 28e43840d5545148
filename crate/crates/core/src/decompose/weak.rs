use std::collections::{BTreeMap, BTreeSet};

use super::cut::{complete_cut, Cut};
use super::{all_in_connections, require_rmac, Connection, DecomposeError};
use crate::cospan::Cospan;
use crate::hypergraph::{is_convex_image, EdgeId, Homomorphism, Hypergraph, NodeId};

/// A sub-hypergraph given by node and edge subsets of a carrier.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SubHypergraph {
    pub nodes: BTreeSet<NodeId>,
    pub edges: BTreeSet<EdgeId>,
}

impl SubHypergraph {
    /// The edges together with all their endpoints.
    pub fn spanned_by(g: &Hypergraph, edges: impl IntoIterator<Item = EdgeId>) -> Self {
        let edges: BTreeSet<EdgeId> = edges.into_iter().collect();
        let nodes = edges
            .iter()
            .flat_map(|&e| g.edges[e].sources.iter().chain(&g.edges[e].targets).copied())
            .collect();
        SubHypergraph { nodes, edges }
    }

    pub fn from_embedding(h: &Homomorphism) -> Self {
        SubHypergraph {
            nodes: h.node_image(),
            edges: h.edge_image(),
        }
    }

    pub fn whole(g: &Hypergraph) -> Self {
        SubHypergraph {
            nodes: g.nodes().collect(),
            edges: (0..g.edges.len()).collect(),
        }
    }

    fn validate(&self, g: &Hypergraph) -> Result<(), DecomposeError> {
        if let Some(&v) = self.nodes.iter().find(|&&v| v >= g.node_count) {
            return Err(DecomposeError::UnknownNode(v));
        }
        for &e in &self.edges {
            let edge = g.edges.get(e).ok_or(DecomposeError::UnknownEdge(e))?;
            if !edge.sources.iter().chain(&edge.targets).all(|v| self.nodes.contains(v)) {
                return Err(DecomposeError::NotASubhypergraph(format!(
                    "edge {e} has an endpoint outside the node set"
                )));
            }
        }
        Ok(())
    }
}

/// For each left-shared node, a split `(upper, lower)` of its in-connections
/// that lie outside the sub-hypergraph.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UpDownSignature {
    pub splits: BTreeMap<NodeId, (BTreeSet<Connection>, BTreeSet<Connection>)>,
}

fn outside_connections(g: &Cospan, l: &SubHypergraph) -> BTreeMap<NodeId, BTreeSet<Connection>> {
    let conns = all_in_connections(g);
    l.nodes
        .iter()
        .filter_map(|&v| {
            let outside: BTreeSet<Connection> = conns[v]
                .iter()
                .filter(|c| !matches!(c, Connection::Edge(e, _) if l.edges.contains(e)))
                .copied()
                .collect();
            (!outside.is_empty()).then_some((v, outside))
        })
        .collect()
}

impl UpDownSignature {
    /// Every outside in-connection goes to the lower part.
    pub fn all_lower(g: &Cospan, l: &SubHypergraph) -> Self {
        UpDownSignature {
            splits: outside_connections(g, l)
                .into_iter()
                .map(|(v, outside)| (v, (BTreeSet::new(), outside)))
                .collect(),
        }
    }

    /// Every outside in-connection goes to the upper part.
    pub fn all_upper(g: &Cospan, l: &SubHypergraph) -> Self {
        UpDownSignature {
            splits: outside_connections(g, l)
                .into_iter()
                .map(|(v, outside)| (v, (outside, BTreeSet::new())))
                .collect(),
        }
    }

    fn upper_contains(&self, v: NodeId, c: &Connection) -> bool {
        self.splits.get(&v).is_some_and(|(up, _)| up.contains(c))
    }

    fn lower_nonempty(&self, v: NodeId) -> bool {
        self.splits.get(&v).is_some_and(|(_, low)| !low.is_empty())
    }
}

/// `C̃1 ; (id_k ⊕ L) ; C2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeakDecomposition {
    pub c1: Cospan,
    pub k: usize,
    pub l: Cospan,
    pub c2: Cospan,
    /// Original carrier node of each node of `l`.
    pub l_origin: Vec<NodeId>,
    /// Original carrier edge of each edge of `l`.
    pub l_edge_origin: Vec<EdgeId>,
    /// Original carrier edges of `c1` and `c2`.
    pub c1_edges: Vec<EdgeId>,
    pub c2_edges: Vec<EdgeId>,
}

impl WeakDecomposition {
    pub fn recompose(&self) -> Cospan {
        self.c1
            .compose(&Cospan::identity(self.k).tensor(&self.l))
            .and_then(|x| x.compose(&self.c2))
            .expect("weak decomposition factors are composable")
    }
}

struct Builder {
    graph: Hypergraph,
    index: BTreeMap<NodeId, NodeId>,
}

impl Builder {
    fn new() -> Self {
        Builder {
            graph: Hypergraph::default(),
            index: BTreeMap::new(),
        }
    }

    fn node(&mut self, v: NodeId) -> NodeId {
        if let Some(&x) = self.index.get(&v) {
            return x;
        }
        let x = self.graph.add_node();
        self.index.insert(v, x);
        x
    }

    fn fresh(&mut self) -> NodeId {
        self.graph.add_node()
    }
}

/// Extracts the convex sub-hypergraph `l` of `g` as the middle factor of a
/// three-part decomposition, placing each outside in-connection of a shared
/// node above or below according to `tau`.
pub fn weak_decompose(
    g: &Cospan,
    l: &SubHypergraph,
    tau: &UpDownSignature,
) -> Result<WeakDecomposition, DecomposeError> {
    require_rmac(g)?;
    let carrier = &g.carrier;
    l.validate(carrier)?;
    if !is_convex_image(carrier, &l.nodes, &l.edges) {
        return Err(DecomposeError::NotConvex);
    }

    // Nodes from which some node of L is reachable.
    let mut reaches = vec![false; carrier.node_count];
    for &v in &l.nodes {
        reaches[v] = true;
    }
    let order = carrier.topological_edge_order().ok_or(DecomposeError::Cyclic)?;
    for &e in order.iter().rev() {
        let edge = &carrier.edges[e];
        if edge.targets.iter().any(|&t| reaches[t]) {
            for &s in &edge.sources {
                reaches[s] = true;
            }
        }
    }
    let c1_edges: Vec<EdgeId> = (0..carrier.edges.len())
        .filter(|e| !l.edges.contains(e) && carrier.edges[*e].targets.iter().any(|&t| reaches[t]))
        .collect();
    let c2_edges: Vec<EdgeId> = (0..carrier.edges.len())
        .filter(|e| !l.edges.contains(e) && !c1_edges.contains(e))
        .collect();
    let endpoints = |edges: &[EdgeId]| -> BTreeSet<NodeId> {
        edges
            .iter()
            .flat_map(|&e| carrier.edges[e].sources.iter().chain(&carrier.edges[e].targets).copied())
            .collect()
    };
    let mut c1_nodes: BTreeSet<NodeId> = g.left.iter().copied().collect();
    c1_nodes.extend(endpoints(&c1_edges));
    let mut c2_nodes: BTreeSet<NodeId> = g.right.iter().copied().collect();
    c2_nodes.extend(endpoints(&c2_edges));
    for v in carrier.nodes() {
        if !c1_nodes.contains(&v) && !l.nodes.contains(&v) {
            c2_nodes.insert(v);
        }
    }

    let i_part: Vec<NodeId> = l
        .nodes
        .iter()
        .filter(|v| c1_nodes.contains(v) && !c2_nodes.contains(v))
        .copied()
        .collect();
    let j_part: Vec<NodeId> = l
        .nodes
        .iter()
        .filter(|v| c2_nodes.contains(v) && !c1_nodes.contains(v))
        .copied()
        .collect();
    let k_part: Vec<NodeId> = c1_nodes
        .iter()
        .filter(|v| c2_nodes.contains(v) && !l.nodes.contains(v))
        .copied()
        .collect();
    let xi: Vec<NodeId> = l
        .nodes
        .iter()
        .filter(|v| c1_nodes.contains(v) && c2_nodes.contains(v))
        .copied()
        .collect();

    let outside = outside_connections(g, l);
    for (&v, (up, low)) in &tau.splits {
        let Some(expected) = outside.get(&v) else {
            return Err(DecomposeError::InvalidSignature(format!(
                "node {v} is not left-shared"
            )));
        };
        if !up.is_disjoint(low) {
            return Err(DecomposeError::InvalidSignature(format!(
                "upper and lower sets of node {v} overlap"
            )));
        }
        if &up.union(low).copied().collect::<BTreeSet<_>>() != expected {
            return Err(DecomposeError::InvalidSignature(format!(
                "split of node {v} does not cover its outside in-connections"
            )));
        }
    }
    if let Some(v) = xi.iter().find(|v| !tau.splits.contains_key(v)) {
        return Err(DecomposeError::InvalidSignature(format!(
            "no split given for left-shared node {v}"
        )));
    }
    let xi_lower: Vec<NodeId> = xi.iter().copied().filter(|&v| tau.lower_nonempty(v)).collect();

    // C̃1: C1 with every shared node replaced by an upper and a lower copy.
    let mut b1 = Builder::new();
    for &v in &c1_nodes {
        if !xi.contains(&v) {
            b1.node(v);
        }
    }
    let upper: BTreeMap<NodeId, NodeId> = xi.iter().map(|&v| (v, b1.fresh())).collect();
    let lower: BTreeMap<NodeId, NodeId> = xi_lower.iter().map(|&v| (v, b1.fresh())).collect();
    let place = |b: &mut Builder, v: NodeId, conn: Connection| -> NodeId {
        if upper.contains_key(&v) {
            if tau.upper_contains(v, &conn) {
                upper[&v]
            } else {
                lower[&v]
            }
        } else {
            b.node(v)
        }
    };
    for &e in &c1_edges {
        let edge = &carrier.edges[e];
        let sources = edge.sources.iter().map(|&s| b1.node(s)).collect();
        let targets = edge
            .targets
            .iter()
            .enumerate()
            .map(|(pos, &t)| place(&mut b1, t, Connection::Edge(e, pos)))
            .collect();
        b1.graph.add_edge(&edge.label, sources, targets);
    }
    let c1_left: Vec<NodeId> = g
        .left
        .iter()
        .enumerate()
        .map(|(p, &v)| place(&mut b1, v, Connection::Input(p)))
        .collect();
    let mut c1_right: Vec<NodeId> = k_part.iter().map(|&v| b1.node(v)).collect();
    c1_right.extend(xi.iter().map(|v| upper[v]));
    c1_right.extend(i_part.iter().map(|&v| b1.node(v)));
    c1_right.extend(xi_lower.iter().map(|v| lower[v]));
    let c1 = Cospan {
        carrier: b1.graph,
        left: c1_left,
        right: c1_right,
    };

    let mut bl = Builder::new();
    for &v in &l.nodes {
        bl.node(v);
    }
    let l_edge_origin: Vec<EdgeId> = l.edges.iter().copied().collect();
    for &e in &l_edge_origin {
        let edge = &carrier.edges[e];
        let s = edge.sources.iter().map(|&v| bl.node(v)).collect();
        let t = edge.targets.iter().map(|&v| bl.node(v)).collect();
        bl.graph.add_edge(&edge.label, s, t);
    }
    let l_left = i_part.iter().chain(&xi_lower).map(|&v| bl.node(v)).collect();
    let l_right = j_part.iter().chain(&xi).map(|&v| bl.node(v)).collect();
    let l_origin = l.nodes.iter().copied().collect();
    let l_cospan = Cospan {
        carrier: bl.graph,
        left: l_left,
        right: l_right,
    };

    let mut b2 = Builder::new();
    for &v in &c2_nodes {
        b2.node(v);
    }
    for &e in &c2_edges {
        let edge = &carrier.edges[e];
        let s = edge.sources.iter().map(|&v| b2.node(v)).collect();
        let t = edge.targets.iter().map(|&v| b2.node(v)).collect();
        b2.graph.add_edge(&edge.label, s, t);
    }
    let c2_left = k_part
        .iter()
        .chain(&xi)
        .chain(&j_part)
        .chain(&xi)
        .map(|&v| b2.node(v))
        .collect();
    let c2_right = g.right.iter().map(|&v| b2.node(v)).collect();
    let c2 = Cospan {
        carrier: b2.graph,
        left: c2_left,
        right: c2_right,
    };

    Ok(WeakDecomposition {
        c1,
        k: k_part.len() + xi.len(),
        l: l_cospan,
        c2,
        l_origin,
        l_edge_origin,
        c1_edges,
        c2_edges,
    })
}

/// Complete cuts of the outer part of the first factor and of the middle
/// factor of a weak decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InOutSignature {
    pub omega_in: Vec<Cut>,
    pub omega_out: Vec<Cut>,
}

impl InOutSignature {
    pub fn trivial(w: &WeakDecomposition) -> Self {
        InOutSignature {
            omega_in: w.c1.right.iter().map(|&v| Cut::trivial(&w.c1, v)).collect(),
            omega_out: w.l.right.iter().map(|&v| Cut::trivial(&w.l, v)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrongDecomposition {
    pub first: Cospan,
    pub middle: Cospan,
    pub last: Cospan,
}

impl StrongDecomposition {
    pub fn recompose(&self) -> Cospan {
        self.first
            .compose(&self.middle)
            .and_then(|x| x.compose(&self.last))
            .expect("strong decomposition factors are composable")
    }
}

/// Refines a weak decomposition by cutting the terminal nodes of its first
/// and middle factors. `gluing` sends a position of the cut `i` interface to
/// the block index, within the cut of the matching middle node, it attaches
/// to; unlisted positions attach to the block holding their own input.
pub fn strong_decompose(
    weak: &WeakDecomposition,
    inout: &InOutSignature,
    gluing: &BTreeMap<usize, usize>,
) -> Result<StrongDecomposition, DecomposeError> {
    let k = weak.k;
    let bad = |e: DecomposeError| DecomposeError::InvalidInOutSignature(e.to_string());
    for cut in &inout.omega_in {
        if let Some(pos) = weak.c1.right.iter().position(|&v| v == cut.node) {
            if pos < k && cut.partition.len() != 1 {
                return Err(DecomposeError::InvalidInOutSignature(format!(
                    "node {} passes through the identity part and must not be cut",
                    cut.node
                )));
            }
        }
    }
    let first = complete_cut(&weak.c1, &inout.omega_in).map_err(bad)?;
    let middle_cut = complete_cut(&weak.l, &inout.omega_out).map_err(bad)?;
    let cut_l = &middle_cut.cospan;
    let cut_of: BTreeMap<NodeId, &Cut> = inout.omega_out.iter().map(|c| (c.node, c)).collect();

    let i_cut = first.cospan.right.len() - k;
    if let Some((&q, _)) = gluing.iter().find(|(&q, _)| q >= i_cut) {
        return Err(DecomposeError::IncompatibleGluing(format!(
            "position {q} is outside the cut interface of width {i_cut}"
        )));
    }
    let mut alpha = Vec::with_capacity(i_cut);
    for q in 0..i_cut {
        let p = first.reconnect[k + q] - k;
        let v = weak.l.left[p];
        match middle_cut.pieces.get(&v) {
            None => {
                if gluing.contains_key(&q) {
                    return Err(DecomposeError::IncompatibleGluing(format!(
                        "position {q} attaches to node {v}, which is not terminal in the middle factor"
                    )));
                }
                alpha.push(v);
            }
            Some(pieces) => {
                let block = match gluing.get(&q) {
                    Some(&b) => b,
                    None => cut_of[&v]
                        .partition
                        .iter()
                        .position(|blk| blk.contains(&Connection::Input(p)))
                        .expect("a cut covers every in-connection"),
                };
                let piece = pieces.get(block).ok_or_else(|| {
                    DecomposeError::IncompatibleGluing(format!(
                        "node {v} was cut into {} blocks, block {block} requested",
                        pieces.len()
                    ))
                })?;
                alpha.push(*piece);
            }
        }
    }

    let shift = k;
    let middle = Cospan {
        carrier: Hypergraph::discrete(k).disjoint_union(&cut_l.carrier),
        left: (0..k).chain(alpha.iter().map(|&v| v + shift)).collect(),
        right: (0..k).chain(cut_l.right.iter().map(|&v| v + shift)).collect(),
    };
    let last = Cospan {
        carrier: weak.c2.carrier.clone(),
        left: weak.c2.left[..k]
            .iter()
            .copied()
            .chain(middle_cut.reconnect.iter().map(|&r| weak.c2.left[k + r]))
            .collect(),
        right: weak.c2.right.clone(),
    };
    Ok(StrongDecomposition {
        first: first.cospan,
        middle,
        last,
    })
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::running_example;
    use super::*;
    use crate::sigterm::{Signature, Term};
    use crate::translate::eval_term;

    fn check(w: &WeakDecomposition, g: &Cospan) {
        for c in [&w.c1, &w.l, &w.c2] {
            assert!(c.is_right_monogamous() && c.is_acyclic());
        }
        assert!(w.recompose().iso_equal(g));
    }

    #[test]
    fn whole_carrier() {
        let g = running_example();
        let l = SubHypergraph::whole(&g.carrier);
        let w = weak_decompose(&g, &l, &UpDownSignature::all_lower(&g, &l)).unwrap();
        check(&w, &g);
        assert!(w.c1.carrier.edges.is_empty() && w.c2.carrier.edges.is_empty());
        assert!(w.l.carrier.edges.len() == 3);
    }

    #[test]
    fn two_choices_for_a_merge() {
        let sig = Signature::new().with("b", 1, 1);
        let g = eval_term(&Term::seq(Term::par(Term::gen("b"), Term::Id(1)), Term::Mu), &sig).unwrap();
        let l = SubHypergraph::spanned_by(&g.carrier, [0]);
        let lower = weak_decompose(&g, &l, &UpDownSignature::all_lower(&g, &l)).unwrap();
        let upper = weak_decompose(&g, &l, &UpDownSignature::all_upper(&g, &l)).unwrap();
        check(&lower, &g);
        check(&upper, &g);
        let with_merge = eval_term(&Term::seq(Term::par(Term::gen("b"), Term::Id(1)), Term::Mu), &sig).unwrap();
        let plain = eval_term(&Term::gen("b"), &sig).unwrap();
        assert!(lower.l.iso_equal(&with_merge));
        assert!(upper.l.iso_equal(&plain));
        assert_eq!((lower.k, upper.k), (1, 1));
    }

    #[test]
    fn signature_errors() {
        let g = running_example();
        let l = SubHypergraph::spanned_by(&g.carrier, [0]);
        let mut tau = UpDownSignature::all_lower(&g, &l);
        tau.splits.get_mut(&2).unwrap().1.remove(&Connection::Input(1));
        assert!(matches!(
            weak_decompose(&g, &l, &tau),
            Err(DecomposeError::InvalidSignature(_))
        ));
        assert!(matches!(
            weak_decompose(&g, &l, &UpDownSignature::default()),
            Err(DecomposeError::InvalidSignature(_))
        ));
        let mut chain = Hypergraph::discrete(3);
        chain.add_edge("f", vec![0], vec![1]);
        chain.add_edge("f", vec![1], vec![2]);
        let c = Cospan::new(chain, vec![0], vec![2]).unwrap();
        let gap = SubHypergraph {
            nodes: BTreeSet::from([0, 2]),
            edges: BTreeSet::new(),
        };
        assert_eq!(
            weak_decompose(&c, &gap, &UpDownSignature::default()),
            Err(DecomposeError::NotConvex)
        );
    }

    fn running_strong(gluing: &BTreeMap<usize, usize>) -> (Cospan, StrongDecomposition) {
        let g = running_example();
        let l = SubHypergraph::spanned_by(&g.carrier, [0]);
        let mut tau = UpDownSignature::default();
        tau.splits.insert(
            2,
            (
                BTreeSet::from([Connection::Input(2)]),
                BTreeSet::from([Connection::Input(1), Connection::Edge(1, 0)]),
            ),
        );
        let w = weak_decompose(&g, &l, &tau).unwrap();
        check(&w, &g);
        // C̃1 right: [v2' (k), v0 (i'), v2'' (u)].
        assert_eq!(w.k, 1);
        assert_eq!(w.c1.right.len(), 3);
        let [up, v0, low] = [w.c1.right[0], w.c1.right[1], w.c1.right[2]];
        let conns = |c: &Cospan, v| super::super::in_connections(c, v);
        let omega_in = vec![
            Cut::trivial(&w.c1, up),
            Cut {
                node: v0,
                partition: vec![conns(&w.c1, v0).into_iter().collect(), BTreeSet::new()],
            },
            Cut::discrete(&w.c1, low),
        ];
        assert_eq!(omega_in[2].partition.len(), 2);
        let shared = w.l.right[0];
        let in_l = conns(&w.l, shared);
        let omega_out = vec![Cut {
            node: shared,
            partition: vec![
                in_l.iter().filter(|c| **c != Connection::Edge(0, 1)).copied().collect(),
                BTreeSet::from([Connection::Edge(0, 1)]),
            ],
        }];
        let s = strong_decompose(&w, &InOutSignature { omega_in, omega_out }, gluing).unwrap();
        (g, s)
    }

    #[test]
    fn gluing_choices_give_distinct_middles() {
        let (g, a) = running_strong(&BTreeMap::from([(2, 0), (3, 1)]));
        let (_, b) = running_strong(&BTreeMap::from([(2, 1), (3, 0)]));
        for s in [&a, &b] {
            for c in [&s.first, &s.middle, &s.last] {
                assert!(c.is_right_monogamous() && c.is_acyclic());
            }
            assert!(s.recompose().iso_equal(&g));
        }
        assert!(!a.middle.iso_equal(&b.middle));
        assert!(matches!(
            strong_decompose_with(&BTreeMap::from([(2, 5)])),
            Err(DecomposeError::IncompatibleGluing(_))
        ));
        assert!(matches!(
            strong_decompose_with(&BTreeMap::from([(0, 0)])),
            Err(DecomposeError::IncompatibleGluing(_))
        ));
    }

    fn strong_decompose_with(gluing: &BTreeMap<usize, usize>) -> Result<StrongDecomposition, DecomposeError> {
        let g = running_example();
        let l = SubHypergraph::spanned_by(&g.carrier, [0]);
        let w = weak_decompose(&g, &l, &UpDownSignature::all_lower(&g, &l)).unwrap();
        let mut io = InOutSignature::trivial(&w);
        let shared = w.l.right[0];
        io.omega_out = vec![Cut::discrete(&w.l, shared)];
        strong_decompose(&w, &io, gluing)
    }

    #[test]
    fn trivial_in_out_signature_matches_weak() {
        let g = running_example();
        let l = SubHypergraph::spanned_by(&g.carrier, [2]);
        let w = weak_decompose(&g, &l, &UpDownSignature::all_lower(&g, &l)).unwrap();
        check(&w, &g);
        let s = strong_decompose(&w, &InOutSignature::trivial(&w), &BTreeMap::new()).unwrap();
        assert!(s.first.iso_equal(&w.c1));
        assert!(s.middle.iso_equal(&Cospan::identity(w.k).tensor(&w.l)));
        assert!(s.last.iso_equal(&w.c2));
    }

    #[test]
    fn cutting_the_identity_part_is_rejected() {
        let g = running_example();
        let l = SubHypergraph::spanned_by(&g.carrier, [0]);
        let w = weak_decompose(&g, &l, &UpDownSignature::all_upper(&g, &l)).unwrap();
        let mut io = InOutSignature::trivial(&w);
        let first = w.c1.right[0];
        io.omega_in[0] = Cut::discrete(&w.c1, first);
        assert!(io.omega_in[0].partition.len() > 1);
        assert!(matches!(
            strong_decompose(&w, &io, &BTreeMap::new()),
            Err(DecomposeError::InvalidInOutSignature(_))
        ));
    }
}

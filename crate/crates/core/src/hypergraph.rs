//! Directed hypergraphs whose hyperedges carry generator labels and ordered
//! source/target lists.

use std::collections::{BTreeSet, VecDeque};

use thiserror::Error;

use crate::sigterm::Signature;

pub type NodeId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HypergraphError {
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("edge {edge} labelled `{label}` does not match the signature: {reason}")]
    IllLabelled {
        edge: EdgeId,
        label: String,
        reason: String,
    },
    #[error("not a sub-hypergraph: {0}")]
    NotASubhypergraph(String),
}

impl HypergraphError {
    pub fn code(&self) -> &'static str {
        match self {
            HypergraphError::UnknownNode(_) => "UnknownNode",
            HypergraphError::UnknownEdge(_) => "UnknownEdge",
            HypergraphError::IllLabelled { .. } => "IllLabelled",
            HypergraphError::NotASubhypergraph(_) => "NotASubhypergraph",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    pub label: String,
    pub sources: Vec<NodeId>,
    pub targets: Vec<NodeId>,
}

/// Nodes are `0..node_count`; edges are indexed by position.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Hypergraph {
    pub node_count: usize,
    pub edges: Vec<Edge>,
}

impl Hypergraph {
    pub fn discrete(n: usize) -> Self {
        Hypergraph {
            node_count: n,
            edges: Vec::new(),
        }
    }

    pub fn add_node(&mut self) -> NodeId {
        self.node_count += 1;
        self.node_count - 1
    }

    pub fn add_edge(&mut self, label: &str, sources: Vec<NodeId>, targets: Vec<NodeId>) -> EdgeId {
        debug_assert!(sources.iter().chain(&targets).all(|&v| v < self.node_count));
        self.edges.push(Edge {
            label: label.to_string(),
            sources,
            targets,
        });
        self.edges.len() - 1
    }

    pub fn nodes(&self) -> std::ops::Range<NodeId> {
        0..self.node_count
    }

    /// Checks node references and, when a signature is given, arities.
    pub fn validate(&self, sig: Option<&Signature>) -> Result<(), HypergraphError> {
        for (id, e) in self.edges.iter().enumerate() {
            if let Some(&v) = e.sources.iter().chain(&e.targets).find(|&&v| v >= self.node_count) {
                return Err(HypergraphError::UnknownNode(v));
            }
            if let Some(sig) = sig {
                let ill = |reason: String| HypergraphError::IllLabelled {
                    edge: id,
                    label: e.label.clone(),
                    reason,
                };
                let a = sig
                    .arity(&e.label)
                    .ok_or_else(|| ill("label not declared".into()))?;
                if a.inputs != e.sources.len() || a.outputs != e.targets.len() {
                    return Err(ill(format!(
                        "expected {} -> {}, found {} -> {}",
                        a.inputs,
                        a.outputs,
                        e.sources.len(),
                        e.targets.len()
                    )));
                }
            }
        }
        Ok(())
    }

    fn check_node(&self, v: NodeId) -> Result<(), HypergraphError> {
        if v < self.node_count {
            Ok(())
        } else {
            Err(HypergraphError::UnknownNode(v))
        }
    }

    /// Number of `(edge, position)` pairs with `v` as a target.
    pub fn in_degree(&self, v: NodeId) -> Result<usize, HypergraphError> {
        self.check_node(v)?;
        Ok(self
            .edges
            .iter()
            .map(|e| e.targets.iter().filter(|&&t| t == v).count())
            .sum())
    }

    /// Number of `(edge, position)` pairs with `v` as a source.
    pub fn out_degree(&self, v: NodeId) -> Result<usize, HypergraphError> {
        self.check_node(v)?;
        Ok(self
            .edges
            .iter()
            .map(|e| e.sources.iter().filter(|&&s| s == v).count())
            .sum())
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.node_count];
        for e in &self.edges {
            for &t in &e.targets {
                d[t] += 1;
            }
        }
        d
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.node_count];
        for e in &self.edges {
            for &s in &e.sources {
                d[s] += 1;
            }
        }
        d
    }

    /// Nodes of out-degree 0, ascending.
    pub fn terminal_nodes(&self) -> Vec<NodeId> {
        self.out_degrees()
            .iter()
            .enumerate()
            .filter(|(_, &d)| d == 0)
            .map(|(v, _)| v)
            .collect()
    }

    /// For each node, the edges having it as a source.
    pub fn out_edges(&self) -> Vec<Vec<EdgeId>> {
        let mut out = vec![Vec::new(); self.node_count];
        for (id, e) in self.edges.iter().enumerate() {
            for &s in &e.sources {
                if out[s].last() != Some(&id) {
                    out[s].push(id);
                }
            }
        }
        out
    }

    /// For each node, the edges having it as a target.
    pub fn in_edges(&self) -> Vec<Vec<EdgeId>> {
        let mut inc = vec![Vec::new(); self.node_count];
        for (id, e) in self.edges.iter().enumerate() {
            for &t in &e.targets {
                if inc[t].last() != Some(&id) {
                    inc[t].push(id);
                }
            }
        }
        inc
    }

    /// True iff no path visits the same node twice.
    pub fn is_acyclic(&self) -> bool {
        self.find_cycle().is_none()
    }

    /// A path starting and ending at the same node, if one exists.
    pub fn find_cycle(&self) -> Option<Path> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            New,
            Open,
            Done,
        }
        let out = self.out_edges();
        let mut mark = vec![Mark::New; self.node_count];
        // Stack entries: (node, index into out[node], index into targets, edge taken to reach node)
        for root in self.nodes() {
            if mark[root] != Mark::New {
                continue;
            }
            let mut stack: Vec<(NodeId, usize, usize, Option<EdgeId>)> = vec![(root, 0, 0, None)];
            mark[root] = Mark::Open;
            while let Some(top) = stack.last_mut() {
                let (v, ei, ti, _) = *top;
                if ei == out[v].len() {
                    mark[v] = Mark::Done;
                    stack.pop();
                    continue;
                }
                let e = out[v][ei];
                let targets = &self.edges[e].targets;
                if ti == targets.len() {
                    top.1 += 1;
                    top.2 = 0;
                    continue;
                }
                top.2 += 1;
                let w = targets[ti];
                match mark[w] {
                    Mark::New => {
                        mark[w] = Mark::Open;
                        stack.push((w, 0, 0, Some(e)));
                    }
                    Mark::Open => {
                        let start = stack.iter().position(|s| s.0 == w).unwrap();
                        let mut items = vec![PathItem::Node(w)];
                        for s in &stack[start + 1..] {
                            items.push(PathItem::Edge(s.3.unwrap()));
                            items.push(PathItem::Node(s.0));
                        }
                        items.push(PathItem::Edge(e));
                        items.push(PathItem::Node(w));
                        return Some(Path(items));
                    }
                    Mark::Done => {}
                }
            }
        }
        None
    }

    /// Edges in an order where every edge comes after all edges feeding its
    /// sources; `None` on a cycle.
    pub fn topological_edge_order(&self) -> Option<Vec<EdgeId>> {
        let producers = self.in_edges();
        let mut pending: Vec<usize> = self
            .edges
            .iter()
            .map(|e| {
                let preds: BTreeSet<EdgeId> =
                    e.sources.iter().flat_map(|&s| producers[s].iter().copied()).collect();
                preds.len()
            })
            .collect();
        let consumers = self.out_edges();
        let mut queue: VecDeque<EdgeId> = (0..self.edges.len()).filter(|&e| pending[e] == 0).collect();
        let mut order = Vec::with_capacity(self.edges.len());
        let mut seen_pairs = BTreeSet::new();
        while let Some(e) = queue.pop_front() {
            order.push(e);
            for &t in &self.edges[e].targets {
                for &next in &consumers[t] {
                    if seen_pairs.insert((e, next)) {
                        pending[next] -= 1;
                        if pending[next] == 0 {
                            queue.push_back(next);
                        }
                    }
                }
            }
        }
        (order.len() == self.edges.len()).then_some(order)
    }

    /// Nodes reachable from `start` along edges (excluding `start` unless on a cycle).
    pub fn descendants(&self, start: &[NodeId]) -> BTreeSet<NodeId> {
        let out = self.out_edges();
        let mut seen = BTreeSet::new();
        let mut queue: VecDeque<NodeId> = start.iter().copied().collect();
        while let Some(v) = queue.pop_front() {
            for &e in &out[v] {
                for &t in &self.edges[e].targets {
                    if seen.insert(t) {
                        queue.push_back(t);
                    }
                }
            }
        }
        seen
    }

    /// Disjoint union; the second graph's nodes are shifted by `self.node_count`.
    pub fn disjoint_union(&self, other: &Hypergraph) -> Hypergraph {
        let shift = self.node_count;
        let mut g = self.clone();
        g.node_count += other.node_count;
        g.edges.extend(other.edges.iter().map(|e| Edge {
            label: e.label.clone(),
            sources: e.sources.iter().map(|v| v + shift).collect(),
            targets: e.targets.iter().map(|v| v + shift).collect(),
        }));
        g
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PathItem {
    Node(NodeId),
    Edge(EdgeId),
}

/// An alternating list of nodes and hyperedges. Each hyperedge has its
/// predecessor among its sources and its successor among its targets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path(pub Vec<PathItem>);

impl Path {
    pub fn is_valid_in(&self, g: &Hypergraph) -> bool {
        let items = &self.0;
        if items.is_empty() {
            return false;
        }
        for (i, item) in items.iter().enumerate() {
            match *item {
                PathItem::Node(v) => {
                    if v >= g.node_count {
                        return false;
                    }
                    if matches!(items.get(i + 1), Some(PathItem::Node(_))) {
                        return false;
                    }
                }
                PathItem::Edge(e) => {
                    let Some(edge) = g.edges.get(e) else {
                        return false;
                    };
                    if i > 0 {
                        match items[i - 1] {
                            PathItem::Node(v) if edge.sources.contains(&v) => {}
                            _ => return false,
                        }
                    }
                    if let Some(next) = items.get(i + 1) {
                        match *next {
                            PathItem::Node(v) if edge.targets.contains(&v) => {}
                            _ => return false,
                        }
                    }
                }
            }
        }
        true
    }

    pub fn repeats_node(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.0
            .iter()
            .filter_map(|i| match i {
                PathItem::Node(v) => Some(v),
                _ => None,
            })
            .any(|v| !seen.insert(*v))
    }

    pub fn repeats_edge(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.0
            .iter()
            .filter_map(|i| match i {
                PathItem::Edge(e) => Some(e),
                _ => None,
            })
            .any(|e| !seen.insert(*e))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Homomorphism {
    pub node_map: Vec<NodeId>,
    pub edge_map: Vec<EdgeId>,
}

impl Homomorphism {
    pub fn identity(g: &Hypergraph) -> Self {
        Homomorphism {
            node_map: g.nodes().collect(),
            edge_map: (0..g.edges.len()).collect(),
        }
    }

    /// Label preservation and positional commutation with sources/targets.
    pub fn is_valid(&self, from: &Hypergraph, to: &Hypergraph) -> bool {
        self.node_map.len() == from.node_count
            && self.edge_map.len() == from.edges.len()
            && self.node_map.iter().all(|&v| v < to.node_count)
            && from.edges.iter().zip(&self.edge_map).all(|(e, &img)| {
                let Some(h) = to.edges.get(img) else {
                    return false;
                };
                h.label == e.label
                    && h.sources.len() == e.sources.len()
                    && h.targets.len() == e.targets.len()
                    && e.sources.iter().zip(&h.sources).all(|(&a, &b)| self.node_map[a] == b)
                    && e.targets.iter().zip(&h.targets).all(|(&a, &b)| self.node_map[a] == b)
            })
    }

    pub fn is_injective(&self) -> bool {
        let nodes: BTreeSet<_> = self.node_map.iter().collect();
        let edges: BTreeSet<_> = self.edge_map.iter().collect();
        nodes.len() == self.node_map.len() && edges.len() == self.edge_map.len()
    }

    pub fn node_image(&self) -> BTreeSet<NodeId> {
        self.node_map.iter().copied().collect()
    }

    pub fn edge_image(&self) -> BTreeSet<EdgeId> {
        self.edge_map.iter().copied().collect()
    }
}

/// Convexity of the sub-hypergraph of `g` spanned by `nodes` and `edges`:
/// no path between two of its nodes passes through an edge outside it.
pub fn is_convex_image(g: &Hypergraph, nodes: &BTreeSet<NodeId>, edges: &BTreeSet<EdgeId>) -> bool {
    let out = g.out_edges();
    // State (node, left the sub-hypergraph already).
    let mut seen = vec![[false; 2]; g.node_count];
    let mut queue: VecDeque<(NodeId, bool)> = VecDeque::new();
    for &v in nodes {
        seen[v][0] = true;
        queue.push_back((v, false));
    }
    while let Some((v, escaped)) = queue.pop_front() {
        for &e in &out[v] {
            let esc = escaped || !edges.contains(&e);
            for &t in &g.edges[e].targets {
                if esc && nodes.contains(&t) {
                    return false;
                }
                if !seen[t][esc as usize] {
                    seen[t][esc as usize] = true;
                    queue.push_back((t, esc));
                }
            }
        }
    }
    true
}

/// Like [`is_convex_image`], but a path that leaves the image may come back
/// to a node no image edge consumes. Such nodes can only be rule outputs, and
/// merging into them can happen after the rule.
pub fn is_output_convex_image(g: &Hypergraph, nodes: &BTreeSet<NodeId>, edges: &BTreeSet<EdgeId>) -> bool {
    let out = g.out_edges();
    let consumed: BTreeSet<NodeId> = edges.iter().flat_map(|&e| g.edges[e].sources.iter().copied()).collect();
    let mut seen = vec![[false; 2]; g.node_count];
    let mut queue: VecDeque<(NodeId, bool)> = VecDeque::new();
    for &v in nodes {
        seen[v][0] = true;
        queue.push_back((v, false));
    }
    while let Some((v, escaped)) = queue.pop_front() {
        for &e in &out[v] {
            let esc = escaped || !edges.contains(&e);
            for &t in &g.edges[e].targets {
                if esc && consumed.contains(&t) {
                    return false;
                }
                if !seen[t][esc as usize] {
                    seen[t][esc as usize] = true;
                    queue.push_back((t, esc));
                }
            }
        }
    }
    true
}

/// Convexity of `h` embedded in `g`. The embedding must be an injective
/// homomorphism.
pub fn is_convex_subhypergraph(
    h: &Hypergraph,
    g: &Hypergraph,
    embedding: &Homomorphism,
) -> Result<bool, HypergraphError> {
    if !embedding.is_valid(h, g) {
        return Err(HypergraphError::NotASubhypergraph(
            "embedding is not a homomorphism".into(),
        ));
    }
    if !embedding.is_injective() {
        return Err(HypergraphError::NotASubhypergraph(
            "embedding is not injective".into(),
        ));
    }
    Ok(is_convex_image(g, &embedding.node_image(), &embedding.edge_image()))
}

struct HomSearch<'a> {
    pattern: &'a Hypergraph,
    host: &'a Hypergraph,
    merge_allowed: &'a BTreeSet<NodeId>,
    node_map: Vec<Option<NodeId>>,
    preimages: Vec<Vec<NodeId>>,
    edge_map: Vec<EdgeId>,
    edge_used: Vec<bool>,
    isolated: Vec<NodeId>,
    out: Vec<Homomorphism>,
}

impl HomSearch<'_> {
    fn can_map(&self, p: NodeId, h: NodeId) -> bool {
        match self.node_map[p] {
            Some(x) => x == h,
            None => self.preimages[h].iter().all(|&q| {
                self.merge_allowed.contains(&p) && self.merge_allowed.contains(&q)
            }),
        }
    }

    fn bind(&mut self, p: NodeId, h: NodeId) -> bool {
        if self.node_map[p].is_some() {
            return false;
        }
        self.node_map[p] = Some(h);
        self.preimages[h].push(p);
        true
    }

    fn unbind(&mut self, p: NodeId, h: NodeId) {
        self.node_map[p] = None;
        self.preimages[h].pop();
    }

    fn edges(&mut self, i: usize) {
        if i == self.pattern.edges.len() {
            self.isolated_nodes(0);
            return;
        }
        let pe = &self.pattern.edges[i];
        for hi in 0..self.host.edges.len() {
            if self.edge_used[hi] {
                continue;
            }
            let he = &self.host.edges[hi];
            if he.label != pe.label
                || he.sources.len() != pe.sources.len()
                || he.targets.len() != pe.targets.len()
            {
                continue;
            }
            let pairs: Vec<(NodeId, NodeId)> = pe
                .sources
                .iter()
                .zip(&he.sources)
                .chain(pe.targets.iter().zip(&he.targets))
                .map(|(&a, &b)| (a, b))
                .collect();
            let mut bound = Vec::new();
            let mut ok = true;
            for &(p, h) in &pairs {
                if !self.can_map(p, h) {
                    ok = false;
                    break;
                }
                if self.bind(p, h) {
                    bound.push((p, h));
                }
            }
            if ok {
                self.edge_used[hi] = true;
                self.edge_map.push(hi);
                self.edges(i + 1);
                self.edge_map.pop();
                self.edge_used[hi] = false;
            }
            for &(p, h) in bound.iter().rev() {
                self.unbind(p, h);
            }
        }
    }

    fn isolated_nodes(&mut self, i: usize) {
        if i == self.isolated.len() {
            self.out.push(Homomorphism {
                node_map: self.node_map.iter().map(|v| v.unwrap()).collect(),
                edge_map: self.edge_map.clone(),
            });
            return;
        }
        let p = self.isolated[i];
        for h in self.host.nodes() {
            if self.can_map(p, h) {
                self.bind(p, h);
                self.isolated_nodes(i + 1);
                self.unbind(p, h);
            }
        }
    }
}

/// All label- and position-preserving homomorphisms `pattern -> host` that
/// are injective on edges, and injective on nodes except that two pattern
/// nodes may share an image when both lie in `merge_allowed`. Results are
/// ordered lexicographically by edge assignment.
pub fn find_homomorphisms(
    pattern: &Hypergraph,
    host: &Hypergraph,
    merge_allowed: &BTreeSet<NodeId>,
) -> Vec<Homomorphism> {
    let mut touched = vec![false; pattern.node_count];
    for e in &pattern.edges {
        for &v in e.sources.iter().chain(&e.targets) {
            touched[v] = true;
        }
    }
    let mut search = HomSearch {
        pattern,
        host,
        merge_allowed,
        node_map: vec![None; pattern.node_count],
        preimages: vec![Vec::new(); host.node_count],
        edge_map: Vec::new(),
        edge_used: vec![false; host.edges.len()],
        isolated: pattern.nodes().filter(|&v| !touched[v]).collect(),
        out: Vec::new(),
    };
    search.edges(0);
    search.out
}

/// Isomorphism-invariant encoding of a hypergraph with an ordered list of
/// pinned nodes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey {
    pub nodes: usize,
    pub pins: Vec<usize>,
    pub edges: Vec<(String, Vec<usize>, Vec<usize>)>,
}

/// Edge colour, target side, tentacle position.
type Incidence = (usize, bool, usize);

struct Canon<'a> {
    g: &'a Hypergraph,
    pins: &'a [NodeId],
    unordered: &'a [NodeId],
    incidence: Vec<Vec<(EdgeId, bool, usize)>>,
    best: Option<CanonicalKey>,
}

fn rank<T: Ord + Clone>(sigs: &[T]) -> (Vec<usize>, usize) {
    let mut sorted: Vec<T> = sigs.to_vec();
    sorted.sort();
    sorted.dedup();
    let ranks = sigs
        .iter()
        .map(|s| sorted.binary_search(s).unwrap())
        .collect();
    (ranks, sorted.len())
}

impl Canon<'_> {
    fn refine(&self, nc: &mut Vec<usize>, ec: &mut Vec<usize>) {
        let count = |c: &[usize]| c.iter().collect::<BTreeSet<_>>().len();
        let mut classes = count(nc) + count(ec);
        loop {
            let node_sigs: Vec<(usize, Vec<Incidence>)> = (0..self.g.node_count)
                .map(|v| {
                    let mut inc: Vec<_> = self.incidence[v]
                        .iter()
                        .map(|&(e, tgt, pos)| (ec[e], tgt, pos))
                        .collect();
                    inc.sort_unstable();
                    (nc[v], inc)
                })
                .collect();
            let edge_sigs: Vec<(usize, Vec<usize>, Vec<usize>)> = self
                .g
                .edges
                .iter()
                .enumerate()
                .map(|(i, e)| {
                    (
                        ec[i],
                        e.sources.iter().map(|&v| nc[v]).collect(),
                        e.targets.iter().map(|&v| nc[v]).collect(),
                    )
                })
                .collect();
            let (n2, a) = rank(&node_sigs);
            let (e2, b) = rank(&edge_sigs);
            *nc = n2;
            *ec = e2;
            if a + b == classes {
                return;
            }
            classes = a + b;
        }
    }

    fn leaf(&self, nc: &[usize], ec: &[usize]) -> CanonicalKey {
        let mut order: Vec<NodeId> = self.g.nodes().collect();
        order.sort_by_key(|&v| nc[v]);
        let mut index = vec![0; self.g.node_count];
        for (i, &v) in order.iter().enumerate() {
            index[v] = i;
        }
        let mut edges: Vec<EdgeId> = (0..self.g.edges.len()).collect();
        edges.sort_by_key(|&e| ec[e]);
        let mut loose: Vec<usize> = self.unordered.iter().map(|&v| index[v]).collect();
        loose.sort_unstable();
        CanonicalKey {
            nodes: self.g.node_count,
            pins: self.pins.iter().map(|&v| index[v]).chain(loose).collect(),
            edges: edges
                .iter()
                .map(|&e| {
                    let edge = &self.g.edges[e];
                    (
                        edge.label.clone(),
                        edge.sources.iter().map(|&v| index[v]).collect(),
                        edge.targets.iter().map(|&v| index[v]).collect(),
                    )
                })
                .collect(),
        }
    }

    fn search(&mut self, mut nc: Vec<usize>, mut ec: Vec<usize>) {
        self.refine(&mut nc, &mut ec);
        let mut sizes = vec![0usize; ec.len()];
        for &c in &ec {
            sizes[c] += 1;
        }
        match sizes.iter().position(|&s| s > 1) {
            None => {
                let key = self.leaf(&nc, &ec);
                if self.best.as_ref().is_none_or(|b| key < *b) {
                    self.best = Some(key);
                }
            }
            Some(cell) => {
                let members: Vec<EdgeId> = (0..ec.len()).filter(|&e| ec[e] == cell).collect();
                for &chosen in &members {
                    let ec2: Vec<usize> = (0..ec.len())
                        .map(|e| 2 * ec[e] + usize::from(e != chosen))
                        .collect();
                    let nc2: Vec<usize> = nc.clone();
                    self.search(nc2, ec2);
                }
            }
        }
    }
}

/// Canonical key of `g` with `pins` fixed pointwise and in order. Two inputs
/// get equal keys iff a label-preserving isomorphism maps one onto the other
/// and pins onto pins.
pub fn canonical_form(g: &Hypergraph, pins: &[NodeId]) -> CanonicalKey {
    canonical_form_with_set(g, pins, &[])
}

/// Like [`canonical_form`], with the extra nodes in `unordered` fixed only as
/// a set. Their positions follow the ordered pins in the key, sorted.
pub fn canonical_form_with_set(g: &Hypergraph, pins: &[NodeId], unordered: &[NodeId]) -> CanonicalKey {
    let mut incidence = vec![Vec::new(); g.node_count];
    for (id, e) in g.edges.iter().enumerate() {
        for (pos, &v) in e.sources.iter().enumerate() {
            incidence[v].push((id, false, pos));
        }
        for (pos, &v) in e.targets.iter().enumerate() {
            incidence[v].push((id, true, pos));
        }
    }
    let mut pin_positions = vec![Vec::new(); g.node_count];
    for (i, &v) in pins.iter().enumerate() {
        pin_positions[v].push(i);
    }
    for &v in unordered {
        pin_positions[v].push(usize::MAX);
    }
    let (nc, _) = rank(&pin_positions);
    let labels: Vec<&str> = g.edges.iter().map(|e| e.label.as_str()).collect();
    let (ec, _) = rank(&labels);
    let mut canon = Canon {
        g,
        pins,
        unordered,
        incidence,
        best: None,
    };
    canon.search(nc, ec);
    canon.best.expect("search always reaches a leaf")
}

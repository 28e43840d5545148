//! Discrete cospans `m -> G <- n` of labelled hypergraphs.

use thiserror::Error;

use crate::hypergraph::{canonical_form, CanonicalKey, Hypergraph, NodeId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CospanError {
    #[error("interface mismatch: left cospan has {right} outputs, right cospan has {left} inputs")]
    InterfaceMismatch { right: usize, left: usize },
    #[error("carrier is not discrete")]
    NotDiscrete,
    #[error("cospan is not right-monogamous")]
    NotRightMonogamous,
    #[error("interface refers to unknown node {0}")]
    UnknownNode(NodeId),
    #[error("invalid function: {0}")]
    InvalidFunction(String),
}

impl CospanError {
    pub fn code(&self) -> &'static str {
        match self {
            CospanError::InterfaceMismatch { .. } => "InterfaceMismatch",
            CospanError::NotDiscrete => "NotDiscrete",
            CospanError::NotRightMonogamous => "NotRightMonogamous",
            CospanError::UnknownNode(_) => "UnknownNode",
            CospanError::InvalidFunction(_) => "InvalidFunction",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cospan {
    pub carrier: Hypergraph,
    pub left: Vec<NodeId>,
    pub right: Vec<NodeId>,
}

/// A function `{0..dom} -> {0..cod}` as a lookup table.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FinFunction {
    pub dom: usize,
    pub cod: usize,
    pub table: Vec<usize>,
}

impl FinFunction {
    pub fn new(cod: usize, table: Vec<usize>) -> Result<Self, CospanError> {
        if let Some(&bad) = table.iter().find(|&&x| x >= cod) {
            return Err(CospanError::InvalidFunction(format!(
                "entry {bad} out of range for codomain {cod}"
            )));
        }
        Ok(FinFunction {
            dom: table.len(),
            cod,
            table,
        })
    }

    pub fn identity(n: usize) -> Self {
        FinFunction {
            dom: n,
            cod: n,
            table: (0..n).collect(),
        }
    }

    /// `self ; other`, i.e. `other ∘ self`.
    pub fn then(&self, other: &FinFunction) -> FinFunction {
        assert_eq!(self.cod, other.dom, "composing functions of mismatched type");
        FinFunction {
            dom: self.dom,
            cod: other.cod,
            table: self.table.iter().map(|&x| other.table[x]).collect(),
        }
    }

    pub fn is_bijection(&self) -> bool {
        if self.dom != self.cod {
            return false;
        }
        let mut hit = vec![false; self.cod];
        self.table.iter().all(|&x| !std::mem::replace(&mut hit[x], true))
    }

    /// Every function `m -> n`, in lexicographic order of tables.
    pub fn all(m: usize, n: usize) -> Vec<FinFunction> {
        let mut out = Vec::new();
        let mut table = vec![0; m];
        if m > 0 && n == 0 {
            return out;
        }
        loop {
            out.push(FinFunction {
                dom: m,
                cod: n,
                table: table.clone(),
            });
            let mut i = m;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                table[i] += 1;
                if table[i] < n {
                    break;
                }
                table[i] = 0;
            }
        }
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.parent[a.max(b)] = a.min(b);
        }
    }
}

/// Quotients `g` by the equivalence generated by `pairs`, numbering classes
/// by their smallest member. Returns the quotient and the node map.
pub fn quotient(g: &Hypergraph, pairs: &[(NodeId, NodeId)]) -> (Hypergraph, Vec<NodeId>) {
    let mut uf = UnionFind::new(g.node_count);
    for &(a, b) in pairs {
        uf.union(a, b);
    }
    let mut index = vec![usize::MAX; g.node_count];
    let mut count = 0;
    let mut map = vec![0; g.node_count];
    for v in g.nodes() {
        let r = uf.find(v);
        if index[r] == usize::MAX {
            index[r] = count;
            count += 1;
        }
        map[v] = index[r];
    }
    let mut q = Hypergraph::discrete(count);
    for e in &g.edges {
        q.add_edge(
            &e.label,
            e.sources.iter().map(|&v| map[v]).collect(),
            e.targets.iter().map(|&v| map[v]).collect(),
        );
    }
    (q, map)
}

impl Cospan {
    pub fn new(carrier: Hypergraph, left: Vec<NodeId>, right: Vec<NodeId>) -> Result<Self, CospanError> {
        if let Some(&v) = left.iter().chain(&right).find(|&&v| v >= carrier.node_count) {
            return Err(CospanError::UnknownNode(v));
        }
        Ok(Cospan { carrier, left, right })
    }

    pub fn identity(n: usize) -> Self {
        Cospan {
            carrier: Hypergraph::discrete(n),
            left: (0..n).collect(),
            right: (0..n).collect(),
        }
    }

    /// `σ_{m,n} : m + n -> n + m`.
    pub fn symmetry(m: usize, n: usize) -> Self {
        Cospan {
            carrier: Hypergraph::discrete(m + n),
            left: (0..m + n).map(|i| if i < m { i + n } else { i - m }).collect(),
            right: (0..m + n).collect(),
        }
    }

    /// The cospan `dom -> cod <- cod` of a permutation or any function.
    pub fn from_function(f: &FinFunction) -> Self {
        function_to_cospan(f)
    }

    pub fn dom(&self) -> usize {
        self.left.len()
    }

    pub fn cod(&self) -> usize {
        self.right.len()
    }

    /// Pushout along the shared interface.
    pub fn compose(&self, other: &Cospan) -> Result<Cospan, CospanError> {
        if self.right.len() != other.left.len() {
            return Err(CospanError::InterfaceMismatch {
                right: self.right.len(),
                left: other.left.len(),
            });
        }
        let shift = self.carrier.node_count;
        let union = self.carrier.disjoint_union(&other.carrier);
        let pairs: Vec<(NodeId, NodeId)> = self
            .right
            .iter()
            .zip(&other.left)
            .map(|(&a, &b)| (a, b + shift))
            .collect();
        let (carrier, map) = quotient(&union, &pairs);
        Ok(Cospan {
            carrier,
            left: self.left.iter().map(|&v| map[v]).collect(),
            right: other.right.iter().map(|&v| map[v + shift]).collect(),
        })
    }

    pub fn tensor(&self, other: &Cospan) -> Cospan {
        let shift = self.carrier.node_count;
        Cospan {
            carrier: self.carrier.disjoint_union(&other.carrier),
            left: self
                .left
                .iter()
                .copied()
                .chain(other.left.iter().map(|v| v + shift))
                .collect(),
            right: self
                .right
                .iter()
                .copied()
                .chain(other.right.iter().map(|v| v + shift))
                .collect(),
        }
    }

    pub fn is_acyclic(&self) -> bool {
        self.carrier.is_acyclic()
    }

    /// The right leg is injective, its image is exactly the terminal nodes,
    /// and no node feeds more than one hyperedge input.
    pub fn is_right_monogamous(&self) -> bool {
        let outs = self.carrier.out_degrees();
        if outs.iter().any(|&d| d > 1) {
            return false;
        }
        let mut hit = vec![false; self.carrier.node_count];
        for &v in &self.right {
            if std::mem::replace(&mut hit[v], true) {
                return false;
            }
        }
        outs.iter().zip(&hit).all(|(&d, &h)| (d == 0) == h)
    }

    /// Both legs injective, the left image is the in-degree-0 nodes, the right
    /// image the terminal nodes, and all degrees are at most one.
    pub fn is_monogamous(&self) -> bool {
        let ins = self.carrier.in_degrees();
        let outs = self.carrier.out_degrees();
        let mut in_left = vec![false; self.carrier.node_count];
        let mut in_right = vec![false; self.carrier.node_count];
        for &v in &self.left {
            if std::mem::replace(&mut in_left[v], true) {
                return false;
            }
        }
        for &v in &self.right {
            if std::mem::replace(&mut in_right[v], true) {
                return false;
            }
        }
        self.carrier.nodes().all(|v| {
            ins[v] <= 1
                && outs[v] <= 1
                && (ins[v] == 0) == in_left[v]
                && (outs[v] == 0) == in_right[v]
        })
    }

    /// Canonical key pinning `left ++ right`.
    pub fn canonical_key(&self) -> (usize, CanonicalKey) {
        let pins: Vec<NodeId> = self.left.iter().chain(&self.right).copied().collect();
        (self.left.len(), canonical_form(&self.carrier, &pins))
    }

    /// Isomorphism of cospans: a carrier isomorphism commuting with both legs.
    pub fn iso_equal(&self, other: &Cospan) -> bool {
        self.left.len() == other.left.len()
            && self.right.len() == other.right.len()
            && self.carrier.node_count == other.carrier.node_count
            && self.carrier.edges.len() == other.carrier.edges.len()
            && self.canonical_key() == other.canonical_key()
    }

    /// Reorders the right interface: position `i` of the result is position
    /// `perm[i]` of `self`.
    pub fn permute_right(&self, perm: &[usize]) -> Cospan {
        Cospan {
            carrier: self.carrier.clone(),
            left: self.left.clone(),
            right: perm.iter().map(|&i| self.right[i]).collect(),
        }
    }
}

pub fn identity(n: usize) -> Cospan {
    Cospan::identity(n)
}

pub fn symmetry(m: usize, n: usize) -> Cospan {
    Cospan::symmetry(m, n)
}

pub fn compose(a: &Cospan, b: &Cospan) -> Result<Cospan, CospanError> {
    a.compose(b)
}

pub fn tensor(a: &Cospan, b: &Cospan) -> Cospan {
    a.tensor(b)
}

pub fn is_right_monogamous(c: &Cospan) -> bool {
    c.is_right_monogamous()
}

pub fn is_monogamous(c: &Cospan) -> bool {
    c.is_monogamous()
}

pub fn iso_equal(a: &Cospan, b: &Cospan) -> bool {
    a.iso_equal(b)
}

/// `m --f--> n <--id-- n`.
pub fn function_to_cospan(f: &FinFunction) -> Cospan {
    Cospan {
        carrier: Hypergraph::discrete(f.cod),
        left: f.table.clone(),
        right: (0..f.cod).collect(),
    }
}

/// Inverse of [`function_to_cospan`] up to isomorphism: `g⁻¹ ∘ f`.
pub fn cospan_to_function(c: &Cospan) -> Result<FinFunction, CospanError> {
    if !c.carrier.edges.is_empty() {
        return Err(CospanError::NotDiscrete);
    }
    if !c.is_right_monogamous() {
        return Err(CospanError::NotRightMonogamous);
    }
    let mut inverse = vec![0; c.carrier.node_count];
    for (i, &v) in c.right.iter().enumerate() {
        inverse[v] = i;
    }
    Ok(FinFunction {
        dom: c.left.len(),
        cod: c.right.len(),
        table: c.left.iter().map(|&v| inverse[v]).collect(),
    })
}

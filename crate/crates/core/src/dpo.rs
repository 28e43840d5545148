//! Weakly convex double-pushout rewriting of right-monogamous acyclic
//! cospans.
//!
//! A rule `i -> L <- j`, `i -> R <- j` is applied to a host `n -> G <- m` by
//! finding a convex match `L -> G`, choosing a weak boundary complement
//! `i + j -> L⊥ <- n + m` and gluing `R` into the hole.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::cospan::Cospan;
use crate::hypergraph::{
    find_homomorphisms, is_output_convex_image, CanonicalKey, EdgeId, Homomorphism, Hypergraph, NodeId,
};
use crate::sigterm::{parse_term, SigTermError, Signature, Term};
use crate::translate::{eval_term, TranslateError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DpoError {
    #[error(transparent)]
    Term(#[from] SigTermError),
    #[error("invalid rule `{name}`: {reason}")]
    InvalidRule { name: String, reason: String },
    #[error("host is not a right-monogamous acyclic cospan")]
    InvalidHost,
    #[error("invalid match: {0}")]
    InvalidMatch(String),
    #[error("deleted node {node} is still connected outside the match")]
    DanglingEdge { node: NodeId },
    #[error("complement rejected: {0}")]
    InvalidComplement(ComplementViolation),
    #[error("rewrite result is not right-monogamous and acyclic")]
    ResultNotRightMonogamous,
    #[error("step budget of {steps} exhausted with {} diagram(s) still reducible", frontier.len())]
    StepBudgetExhausted { steps: usize, frontier: Vec<Cospan> },
}

impl DpoError {
    pub fn code(&self) -> &'static str {
        match self {
            DpoError::Term(e) => e.code(),
            DpoError::InvalidRule { .. } => "InvalidRule",
            DpoError::InvalidHost => "NotRightMonogamous",
            DpoError::InvalidMatch(_) => "InvalidMatch",
            DpoError::DanglingEdge { .. } => "DanglingEdge",
            DpoError::InvalidComplement(_) => "InvalidComplement",
            DpoError::ResultNotRightMonogamous => "ResultNotRightMonogamous",
            DpoError::StepBudgetExhausted { .. } => "StepBudgetExhausted",
        }
    }
}

impl From<TranslateError> for DpoError {
    fn from(e: TranslateError) -> Self {
        match e {
            TranslateError::Term(t) => DpoError::Term(t),
            other => DpoError::Term(SigTermError::TypeMismatch(other.to_string())),
        }
    }
}

/// The reason a candidate complement fails validation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplementViolation {
    #[error("malformed complement: {0}")]
    Shape(String),
    #[error("the match identifies nodes outside the rule's right interface")]
    ConditionA,
    #[error("left rule interface is not injective in the complement")]
    ConditionB,
    #[error("a complement node is in the image of both rule interfaces")]
    ConditionC,
    #[error("rearranged complement is not right-monogamous")]
    ConditionD,
    #[error("a path in the complement runs from the rule's outputs back to its inputs")]
    BackwardPath,
    #[error("gluing the rule's left side into the complement does not give the host")]
    NotAPushout,
}

impl ComplementViolation {
    pub fn code(&self) -> &'static str {
        match self {
            ComplementViolation::Shape(_) => "MalformedComplement",
            ComplementViolation::ConditionA => "ConditionA",
            ComplementViolation::ConditionB => "ConditionB",
            ComplementViolation::ConditionC => "ConditionC",
            ComplementViolation::ConditionD => "ConditionD",
            ComplementViolation::BackwardPath => "BackwardPath",
            ComplementViolation::NotAPushout => "NotAPushout",
        }
    }
}

/// A rewrite rule given by two cospans with the same interfaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteRule {
    pub name: String,
    pub lhs: Cospan,
    pub rhs: Cospan,
}

impl RewriteRule {
    pub fn new(name: impl Into<String>, lhs: Cospan, rhs: Cospan) -> Result<Self, DpoError> {
        let name = name.into();
        let invalid = |reason: &str| DpoError::InvalidRule {
            name: name.clone(),
            reason: reason.to_string(),
        };
        if lhs.dom() != rhs.dom() || lhs.cod() != rhs.cod() {
            return Err(invalid("sides have different interfaces"));
        }
        for side in [&lhs, &rhs] {
            if !side.is_right_monogamous() || !side.is_acyclic() {
                return Err(invalid("a side is not right-monogamous and acyclic"));
            }
        }
        Ok(RewriteRule { name, lhs, rhs })
    }

    pub fn from_terms(name: &str, lhs: &Term, rhs: &Term, sig: &Signature) -> Result<Self, DpoError> {
        let (lt, rt) = (lhs.typecheck(sig)?, rhs.typecheck(sig)?);
        if lt != rt {
            return Err(DpoError::InvalidRule {
                name: name.to_string(),
                reason: format!("sides have types {} -> {} and {} -> {}", lt.0, lt.1, rt.0, rt.1),
            });
        }
        RewriteRule::new(name, eval_term(lhs, sig)?, eval_term(rhs, sig)?)
    }

    pub fn from_def(def: &RuleDef, sig: &Signature) -> Result<Self, DpoError> {
        Self::from_terms(&def.name, &def.lhs, &def.rhs, sig)
    }
}

/// A rule as written in a rule file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleDef {
    pub name: String,
    pub lhs: Term,
    pub rhs: Term,
}

/// Parses lines of the form `rule <name> : <term> => <term>`; `#` starts a
/// comment. Both sides must have the same type.
pub fn parse_rules(src: &str, sig: &Signature) -> Result<Vec<RuleDef>, DpoError> {
    let mut out = Vec::new();
    let mut names = BTreeSet::new();
    for (idx, raw) in src.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        let syntax = |column: usize, message: &str| SigTermError::Syntax {
            line: line_no,
            column,
            message: message.to_string(),
        };
        let indent = line.len() - line.trim_start().len();
        let rest = line
            .trim_start()
            .strip_prefix("rule")
            .filter(|r| r.starts_with(char::is_whitespace))
            .ok_or_else(|| syntax(indent + 1, "expected `rule <name> : <term> => <term>`"))?;
        let colon = rest
            .find(':')
            .ok_or_else(|| syntax(line.len() + 1, "missing `:` after rule name"))?;
        let name = rest[..colon].trim();
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || "_-'".contains(c)) {
            return Err(syntax(indent + 5, "malformed rule name").into());
        }
        if !names.insert(name.to_string()) {
            return Err(DpoError::InvalidRule {
                name: name.to_string(),
                reason: "declared twice".into(),
            });
        }
        let body_at = indent + 4 + colon + 1;
        let body = &line[body_at..];
        let arrow = body
            .find("=>")
            .ok_or_else(|| syntax(line.len() + 1, "missing `=>` between rule sides"))?;
        let side = |text: &str, offset: usize| {
            parse_term(text, sig).map_err(|e| match e {
                SigTermError::Syntax { column, message, .. } => SigTermError::Syntax {
                    line: line_no,
                    column: offset + column,
                    message,
                },
                other => other,
            })
        };
        let lhs = side(&body[..arrow], body_at)?;
        let rhs = side(&body[arrow + 2..], body_at + arrow + 2)?;
        let (lt, rt) = (lhs.typecheck(sig)?, rhs.typecheck(sig)?);
        if lt != rt {
            return Err(DpoError::InvalidRule {
                name: name.to_string(),
                reason: format!("sides have types {} -> {} and {} -> {}", lt.0, lt.1, rt.0, rt.1),
            });
        }
        out.push(RuleDef {
            name: name.to_string(),
            lhs,
            rhs,
        });
    }
    Ok(out)
}

/// A homomorphism from the rule's left-hand carrier into the host carrier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Match {
    pub hom: Homomorphism,
}

/// `i + j -> L⊥ <- n + m`, stored leg by leg.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Complement {
    pub carrier: Hypergraph,
    pub c1: Vec<NodeId>,
    pub c2: Vec<NodeId>,
    pub d1: Vec<NodeId>,
    pub d2: Vec<NodeId>,
}

impl Complement {
    /// `i + j -> L⊥ <- n + m`.
    pub fn as_cospan(&self) -> Cospan {
        Cospan {
            carrier: self.carrier.clone(),
            left: self.c1.iter().chain(&self.c2).copied().collect(),
            right: self.d1.iter().chain(&self.d2).copied().collect(),
        }
    }

    /// `n + j -> L⊥ <- m + i`.
    pub fn rearranged(&self) -> Cospan {
        Cospan {
            carrier: self.carrier.clone(),
            left: self.d1.iter().chain(&self.c2).copied().collect(),
            right: self.d2.iter().chain(&self.c1).copied().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteStep {
    /// Index of the rule in the list passed to [`rewrite_all`].
    pub rule: usize,
    pub matching: Match,
    pub complement: Complement,
    pub result: Cospan,
}

fn require_host(host: &Cospan) -> Result<(), DpoError> {
    if host.is_right_monogamous() && host.is_acyclic() {
        Ok(())
    } else {
        Err(DpoError::InvalidHost)
    }
}

/// Homomorphisms `L -> G` with an output-convex image (see
/// [`is_output_convex_image`]) that only identify nodes of the rule's right
/// interface, ordered by edge assignment then node assignment.
pub fn enumerate_convex_matches(rule: &RewriteRule, host: &Cospan) -> Vec<Match> {
    let allowed: BTreeSet<NodeId> = rule.lhs.right.iter().copied().collect();
    let mut homs: Vec<Homomorphism> = find_homomorphisms(&rule.lhs.carrier, &host.carrier, &allowed)
        .into_iter()
        .filter(|h| is_output_convex_image(&host.carrier, &h.node_image(), &h.edge_image()))
        .collect();
    homs.sort_by(|a, b| (&a.edge_map, &a.node_map).cmp(&(&b.edge_map, &b.node_map)));
    homs.dedup();
    homs.into_iter().map(|hom| Match { hom }).collect()
}

fn condition_a(rule: &RewriteRule, hom: &Homomorphism) -> bool {
    let right: BTreeSet<NodeId> = rule.lhs.right.iter().copied().collect();
    let mut seen: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    for (x, &v) in hom.node_map.iter().enumerate() {
        if let Some(&y) = seen.get(&v) {
            if !right.contains(&x) || !right.contains(&y) {
                return false;
            }
        } else {
            seen.insert(v, x);
        }
    }
    true
}

fn check_match(rule: &RewriteRule, m: &Match, host: &Cospan) -> Result<(), DpoError> {
    let hom = &m.hom;
    if !hom.is_valid(&rule.lhs.carrier, &host.carrier) {
        return Err(DpoError::InvalidMatch("not a homomorphism".into()));
    }
    let edges: BTreeSet<EdgeId> = hom.edge_map.iter().copied().collect();
    if edges.len() != hom.edge_map.len() {
        return Err(DpoError::InvalidMatch("two rule edges share a host edge".into()));
    }
    if !condition_a(rule, hom) {
        return Err(DpoError::InvalidMatch(
            "identifies nodes outside the rule's right interface".into(),
        ));
    }
    if !is_output_convex_image(&host.carrier, &hom.node_image(), &edges) {
        return Err(DpoError::InvalidMatch("image is not convex".into()));
    }
    Ok(())
}

/// Where an in-connection of a host node comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Incoming {
    Input(usize),
    Edge(EdgeId, usize),
}

/// All weak boundary complements of a match, each verified against the
/// conditions and the pushout property.
pub fn boundary_complement(
    rule: &RewriteRule,
    m: &Match,
    host: &Cospan,
) -> Result<Vec<Complement>, DpoError> {
    require_host(host)?;
    check_match(rule, m, host)?;
    let g = &host.carrier;
    let f = &m.hom.node_map;
    let matched: BTreeSet<EdgeId> = m.hom.edge_map.iter().copied().collect();
    let image: BTreeSet<NodeId> = f.iter().copied().collect();
    let c1_host: Vec<NodeId> = rule.lhs.left.iter().map(|&x| f[x]).collect();
    let c2_host: Vec<NodeId> = rule.lhs.right.iter().map(|&x| f[x]).collect();
    let boundary: BTreeSet<NodeId> = c1_host.iter().chain(&c2_host).copied().collect();

    let mut consumed_inside = vec![false; g.node_count];
    let mut outside_touch = vec![false; g.node_count];
    let mut incoming: Vec<Vec<Incoming>> = vec![Vec::new(); g.node_count];
    for (p, &v) in host.left.iter().enumerate() {
        outside_touch[v] = true;
        incoming[v].push(Incoming::Input(p));
    }
    for &v in &host.right {
        outside_touch[v] = true;
    }
    for (e, edge) in g.edges.iter().enumerate() {
        let inside = matched.contains(&e);
        for &s in &edge.sources {
            if inside {
                consumed_inside[s] = true;
            } else {
                outside_touch[s] = true;
            }
        }
        if !inside {
            for (pos, &t) in edge.targets.iter().enumerate() {
                outside_touch[t] = true;
                incoming[t].push(Incoming::Edge(e, pos));
            }
        }
    }
    if let Some(&node) = image
        .iter()
        .find(|&&v| !boundary.contains(&v) && outside_touch[v])
    {
        return Err(DpoError::DanglingEdge { node });
    }

    // Node copies in the complement: one for untouched host nodes; for a
    // boundary node, a main copy (unless its consumer was deleted) followed
    // by one copy per left-interface position of the rule landing on it.
    let mut carrier = Hypergraph::discrete(0);
    let mut main: Vec<Option<NodeId>> = vec![None; g.node_count];
    let mut copies: Vec<Vec<NodeId>> = vec![Vec::new(); g.node_count];
    let mut c1 = vec![0; c1_host.len()];
    for v in g.nodes() {
        if !image.contains(&v) {
            let x = carrier.add_node();
            main[v] = Some(x);
            copies[v].push(x);
        } else if boundary.contains(&v) {
            if !consumed_inside[v] {
                let x = carrier.add_node();
                main[v] = Some(x);
                copies[v].push(x);
            }
            for (p, _) in c1_host.iter().enumerate().filter(|(_, &u)| u == v) {
                let x = carrier.add_node();
                c1[p] = x;
                copies[v].push(x);
            }
        }
    }
    let mut c2 = Vec::with_capacity(c2_host.len());
    for &v in &c2_host {
        match main[v] {
            Some(x) => c2.push(x),
            None => return Ok(Vec::new()),
        }
    }
    let d2: Vec<NodeId> = host
        .right
        .iter()
        .map(|&v| main[v].expect("host outputs survive"))
        .collect();
    let mut kept_edges = Vec::new();
    for (e, edge) in g.edges.iter().enumerate() {
        if matched.contains(&e) {
            continue;
        }
        let sources = edge
            .sources
            .iter()
            .map(|&s| main[s].expect("sources of kept edges survive"))
            .collect();
        carrier.add_edge(&edge.label, sources, vec![0; edge.targets.len()]);
        kept_edges.push(e);
    }
    let new_edge: BTreeMap<EdgeId, usize> = kept_edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();

    let choices: Vec<(NodeId, Incoming)> = g
        .nodes()
        .flat_map(|v| incoming[v].iter().map(move |&c| (v, c)))
        .collect();
    let radix: Vec<usize> = choices.iter().map(|(v, _)| copies[*v].len()).collect();
    if radix.contains(&0) {
        return Ok(Vec::new());
    }
    let mut digits = vec![0usize; choices.len()];
    let mut out = Vec::new();
    loop {
        let mut comp = Complement {
            carrier: carrier.clone(),
            c1: c1.clone(),
            c2: c2.clone(),
            d1: vec![0; host.left.len()],
            d2: d2.clone(),
        };
        for ((v, conn), &d) in choices.iter().zip(&digits) {
            let x = copies[*v][d];
            match *conn {
                Incoming::Input(p) => comp.d1[p] = x,
                Incoming::Edge(e, pos) => comp.carrier.edges[new_edge[&e]].targets[pos] = x,
            }
        }
        if validate_complement(rule, m, &comp, host).is_ok() {
            out.push(comp);
        }
        let mut i = 0;
        while i < digits.len() {
            digits[i] += 1;
            if digits[i] < radix[i] {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
        if i == digits.len() {
            break;
        }
    }
    Ok(out)
}

/// Checks conditions (A)–(D), that no path leads from `c2` back to `c1`, and
/// that gluing `L` into the complement along the rule interface gives back
/// the host.
pub fn validate_complement(
    rule: &RewriteRule,
    m: &Match,
    comp: &Complement,
    host: &Cospan,
) -> Result<(), ComplementViolation> {
    let shape = |s: &str| Err(ComplementViolation::Shape(s.to_string()));
    if comp.c1.len() != rule.lhs.dom()
        || comp.c2.len() != rule.lhs.cod()
        || comp.d1.len() != host.dom()
        || comp.d2.len() != host.cod()
    {
        return shape("interface lengths disagree with rule and host");
    }
    let n = comp.carrier.node_count;
    let legs = comp.c1.iter().chain(&comp.c2).chain(&comp.d1).chain(&comp.d2);
    if legs.clone().any(|&x| x >= n) || comp.carrier.validate(None).is_err() {
        return shape("node index out of range");
    }
    if m.hom.node_map.len() != rule.lhs.carrier.node_count {
        return shape("match does not cover the rule's left side");
    }
    if !condition_a(rule, &m.hom) {
        return Err(ComplementViolation::ConditionA);
    }
    let c1: BTreeSet<NodeId> = comp.c1.iter().copied().collect();
    if c1.len() != comp.c1.len() {
        return Err(ComplementViolation::ConditionB);
    }
    if comp.c2.iter().any(|x| c1.contains(x)) {
        return Err(ComplementViolation::ConditionC);
    }
    if !comp.rearranged().is_right_monogamous() {
        return Err(ComplementViolation::ConditionD);
    }
    if has_backward_path(comp) {
        return Err(ComplementViolation::BackwardPath);
    }
    let lhs_open = Cospan {
        carrier: rule.lhs.carrier.clone(),
        left: Vec::new(),
        right: rule.lhs.left.iter().chain(&rule.lhs.right).copied().collect(),
    };
    let host_open = Cospan {
        carrier: host.carrier.clone(),
        left: Vec::new(),
        right: host.left.iter().chain(&host.right).copied().collect(),
    };
    let glued = lhs_open
        .compose(&comp.as_cospan())
        .map_err(|e| ComplementViolation::Shape(e.to_string()))?;
    if !glued.iso_equal(&host_open) {
        return Err(ComplementViolation::NotAPushout);
    }
    Ok(())
}

fn has_backward_path(comp: &Complement) -> bool {
    let g = &comp.carrier;
    let out = g.out_edges();
    let c1: BTreeSet<NodeId> = comp.c1.iter().copied().collect();
    let mut seen = vec![false; g.node_count];
    let mut stack: Vec<NodeId> = comp.c2.clone();
    while let Some(v) = stack.pop() {
        for &e in &out[v] {
            for &t in &g.edges[e].targets {
                if c1.contains(&t) {
                    return true;
                }
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
    }
    false
}

fn glue_rhs(rule: &RewriteRule, comp: &Complement, n: usize) -> Result<Cospan, DpoError> {
    let rhs_open = Cospan {
        carrier: rule.rhs.carrier.clone(),
        left: Vec::new(),
        right: rule.rhs.left.iter().chain(&rule.rhs.right).copied().collect(),
    };
    let glued = rhs_open
        .compose(&comp.as_cospan())
        .map_err(|_| DpoError::ResultNotRightMonogamous)?;
    let result = Cospan {
        left: glued.right[..n].to_vec(),
        right: glued.right[n..].to_vec(),
        carrier: glued.carrier,
    };
    if !result.is_right_monogamous() || !result.is_acyclic() {
        return Err(DpoError::ResultNotRightMonogamous);
    }
    Ok(result)
}

/// Glues the rule's right-hand side into a validated complement.
pub fn apply_rewrite(
    rule: &RewriteRule,
    m: &Match,
    comp: &Complement,
    host: &Cospan,
) -> Result<Cospan, DpoError> {
    validate_complement(rule, m, comp, host).map_err(DpoError::InvalidComplement)?;
    glue_rhs(rule, comp, host.dom())
}

fn key(c: &Cospan) -> (usize, CanonicalKey) {
    c.canonical_key()
}

/// Every weakly convex rewrite step of every rule, keeping the first step
/// for each isomorphism class of results.
pub fn rewrite_all(rules: &[RewriteRule], host: &Cospan) -> Result<Vec<RewriteStep>, DpoError> {
    require_host(host)?;
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (r, rule) in rules.iter().enumerate() {
        for m in enumerate_convex_matches(rule, host) {
            let comps = match boundary_complement(rule, &m, host) {
                Ok(c) => c,
                Err(DpoError::DanglingEdge { .. }) => continue,
                Err(e) => return Err(e),
            };
            for comp in comps {
                let result = glue_rhs(rule, &comp, host.dom())?;
                if seen.insert(key(&result)) {
                    out.push(RewriteStep {
                        rule: r,
                        matching: m.clone(),
                        complement: comp,
                        result,
                    });
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Follow the first available step until none is left.
    Leftmost,
    /// Explore every step breadth-first and collect all normal forms.
    ExhaustiveBfs,
}

/// Normal forms reachable within `max_steps` rewrite steps.
pub fn normalize(
    rules: &[RewriteRule],
    host: &Cospan,
    strategy: Strategy,
    max_steps: usize,
) -> Result<Vec<Cospan>, DpoError> {
    match strategy {
        Strategy::Leftmost => {
            let mut current = host.clone();
            for steps in 0.. {
                let Some(step) = rewrite_all(rules, &current)?.into_iter().next() else {
                    return Ok(vec![current]);
                };
                if steps == max_steps {
                    return Err(DpoError::StepBudgetExhausted {
                        steps: max_steps,
                        frontier: vec![current],
                    });
                }
                current = step.result;
            }
            unreachable!()
        }
        Strategy::ExhaustiveBfs => {
            let mut normal = Vec::new();
            let mut normal_keys = BTreeSet::new();
            let mut level = VecDeque::from([host.clone()]);
            for depth in 0..=max_steps {
                let mut next = VecDeque::new();
                let mut next_keys = BTreeSet::new();
                let mut stuck = Vec::new();
                for g in level {
                    let steps = rewrite_all(rules, &g)?;
                    if steps.is_empty() {
                        if normal_keys.insert(key(&g)) {
                            normal.push(g);
                        }
                    } else if depth == max_steps {
                        stuck.push(g);
                    } else {
                        for s in steps {
                            if next_keys.insert(key(&s.result)) {
                                next.push_back(s.result);
                            }
                        }
                    }
                }
                if !stuck.is_empty() {
                    return Err(DpoError::StepBudgetExhausted {
                        steps: max_steps,
                        frontier: stuck,
                    });
                }
                if next.is_empty() {
                    break;
                }
                level = next;
            }
            Ok(normal)
        }
    }
}

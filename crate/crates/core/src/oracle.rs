//! Term-level ground truth: equality modulo the laws of symmetric monoidal
//! categories and commutative monoids by bounded closure, and brute-force
//! enumeration of rewrites in context.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::Rng;
use thiserror::Error;

use crate::cospan::{Cospan, FinFunction};
use crate::decompose::{function_term, permutation_term};
use crate::hypergraph::{canonical_form_with_set, CanonicalKey, NodeId};
use crate::random::{max_intermediate_width, random_term, TermConfig};
use crate::sigterm::{SigTermError, Signature, Term};
use crate::translate::{eval_term, generator_cospan, TranslateError};

/// Name of the placeholder generator standing for the rule's left side.
pub const HOLE: &str = "@rule";

/// Default number of closure members explored before giving up.
pub const DEFAULT_CLOSURE_CAP: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Term(#[from] SigTermError),
    #[error("seed has size {size}, above the bound {bound}")]
    BoundTooSmall { size: usize, bound: usize },
    #[error("rule sides have types {lhs:?} and {rhs:?}")]
    RuleTypeMismatch {
        lhs: (usize, usize),
        rhs: (usize, usize),
    },
}

impl OracleError {
    pub fn code(&self) -> &'static str {
        match self {
            OracleError::Term(e) => e.code(),
            OracleError::BoundTooSmall { .. } => "BoundTooSmall",
            OracleError::RuleTypeMismatch { .. } => "TypeMismatch",
        }
    }
}

impl From<TranslateError> for OracleError {
    fn from(e: TranslateError) -> Self {
        match e {
            TranslateError::Term(t) => OracleError::Term(t),
            other => OracleError::Term(SigTermError::TypeMismatch(other.to_string())),
        }
    }
}

/// The equations of symmetric monoidal categories and of commutative
/// monoids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Law {
    SeqAssoc,
    SeqUnitLeft,
    SeqUnitRight,
    ParAssoc,
    ParUnitLeft,
    ParUnitRight,
    IdSum,
    SymInvolution,
    SymNaturality,
    Interchange,
    SymHexagon,
    MuAssoc,
    MuComm,
    MuUnitLeft,
    MuUnitRight,
}

impl Law {
    pub const ALL: [Law; 15] = [
        Law::SeqAssoc,
        Law::SeqUnitLeft,
        Law::SeqUnitRight,
        Law::ParAssoc,
        Law::ParUnitLeft,
        Law::ParUnitRight,
        Law::IdSum,
        Law::SymInvolution,
        Law::SymNaturality,
        Law::Interchange,
        Law::SymHexagon,
        Law::MuAssoc,
        Law::MuComm,
        Law::MuUnitLeft,
        Law::MuUnitRight,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Law::SeqAssoc => "seq-assoc",
            Law::SeqUnitLeft => "seq-unit-left",
            Law::SeqUnitRight => "seq-unit-right",
            Law::ParAssoc => "par-assoc",
            Law::ParUnitLeft => "par-unit-left",
            Law::ParUnitRight => "par-unit-right",
            Law::IdSum => "id-sum",
            Law::SymInvolution => "sym-involution",
            Law::SymNaturality => "sym-naturality",
            Law::Interchange => "interchange",
            Law::SymHexagon => "sym-hexagon",
            Law::MuAssoc => "mu-assoc",
            Law::MuComm => "mu-comm",
            Law::MuUnitLeft => "mu-unit-left",
            Law::MuUnitRight => "mu-unit-right",
        }
    }

    /// Both sides of a random instance, drawing subterms from `sig`.
    pub fn instantiate<R: Rng>(self, rng: &mut R, sig: &Signature) -> (Term, Term) {
        let cfg = TermConfig {
            max_generators: 2,
            max_width: 3,
            max_depth: 2,
        };
        let any = |rng: &mut R| random_term(rng, sig, &cfg);
        let ty = |t: &Term| t.typecheck(sig).expect("generated terms are well-typed");
        let nat = |rng: &mut R| rng.gen_range(0..=3usize);
        match self {
            Law::SeqAssoc => {
                let s = any(rng);
                let t = random_term_from(rng, sig, ty(&s).1, &cfg);
                let u = random_term_from(rng, sig, ty(&t).1, &cfg);
                (
                    Term::seq(Term::seq(s.clone(), t.clone()), u.clone()),
                    Term::seq(s, Term::seq(t, u)),
                )
            }
            Law::SeqUnitLeft => {
                let s = any(rng);
                (Term::seq(Term::Id(ty(&s).0), s.clone()), s)
            }
            Law::SeqUnitRight => {
                let s = any(rng);
                (Term::seq(s.clone(), Term::Id(ty(&s).1)), s)
            }
            Law::ParAssoc => {
                let (s, t, u) = (any(rng), any(rng), any(rng));
                (
                    Term::par(Term::par(s.clone(), t.clone()), u.clone()),
                    Term::par(s, Term::par(t, u)),
                )
            }
            Law::ParUnitLeft => {
                let s = any(rng);
                (Term::par(Term::Id(0), s.clone()), s)
            }
            Law::ParUnitRight => {
                let s = any(rng);
                (Term::par(s.clone(), Term::Id(0)), s)
            }
            Law::IdSum => {
                let (m, n) = (nat(rng), nat(rng));
                (Term::par(Term::Id(m), Term::Id(n)), Term::Id(m + n))
            }
            Law::SymInvolution => {
                let (m, n) = (nat(rng), nat(rng));
                (Term::seq(Term::Sym(m, n), Term::Sym(n, m)), Term::Id(m + n))
            }
            Law::SymNaturality => {
                let s = any(rng);
                let (o, n) = ty(&s);
                let m = nat(rng);
                (
                    Term::seq(Term::par(s.clone(), Term::Id(m)), Term::Sym(n, m)),
                    Term::seq(Term::Sym(o, m), Term::par(Term::Id(m), s)),
                )
            }
            Law::Interchange => {
                let s = any(rng);
                let u = random_term_from(rng, sig, ty(&s).1, &cfg);
                let t = any(rng);
                let v = random_term_from(rng, sig, ty(&t).1, &cfg);
                (
                    Term::par(Term::seq(s.clone(), u.clone()), Term::seq(t.clone(), v.clone())),
                    Term::seq(Term::par(s, t), Term::par(u, v)),
                )
            }
            Law::SymHexagon => {
                let (m, n, o) = (nat(rng), nat(rng), nat(rng));
                (
                    Term::seq(
                        Term::par(Term::Sym(m, n), Term::Id(o)),
                        Term::par(Term::Id(n), Term::Sym(m, o)),
                    ),
                    Term::Sym(m, n + o),
                )
            }
            Law::MuAssoc => (mu_assoc_left(), mu_assoc_right()),
            Law::MuComm => (Term::seq(Term::Sym(1, 1), Term::Mu), Term::Mu),
            Law::MuUnitLeft => (Term::seq(Term::par(Term::Eta, Term::Id(1)), Term::Mu), Term::Id(1)),
            Law::MuUnitRight => (Term::seq(Term::par(Term::Id(1), Term::Eta), Term::Mu), Term::Id(1)),
        }
    }
}

fn mu_assoc_left() -> Term {
    Term::seq(Term::par(Term::Mu, Term::Id(1)), Term::Mu)
}

fn mu_assoc_right() -> Term {
    Term::seq(Term::par(Term::Id(1), Term::Mu), Term::Mu)
}

/// A random term with domain `dom`: a random term preceded by a random
/// function into its domain.
pub fn random_term_from<R: Rng>(rng: &mut R, sig: &Signature, dom: usize, cfg: &TermConfig) -> Term {
    let t = random_term(rng, sig, cfg);
    let (w, _) = t.typecheck(sig).expect("generated terms are well-typed");
    if w == 0 {
        return Term::par(t, Term::Id(dom));
    }
    let table = (0..dom).map(|_| rng.gen_range(0..w)).collect();
    let f = FinFunction { dom, cod: w, table };
    Term::seq(function_term(&f), t)
}

fn root_steps(t: &Term, sig: &Signature, out: &mut Vec<(Law, Term)>) {
    use Term::*;
    let ty = |x: &Term| x.typecheck(sig).expect("closure members are well-typed");
    let (dom, cod) = ty(t);
    let mut push = |law: Law, x: Term| out.push((law, x));

    push(Law::SeqUnitLeft, Term::seq(Id(dom), t.clone()));
    push(Law::SeqUnitRight, Term::seq(t.clone(), Id(cod)));
    push(Law::ParUnitLeft, Term::par(Id(0), t.clone()));
    push(Law::ParUnitRight, Term::par(t.clone(), Id(0)));

    match t {
        Seq(a, b) => {
            if let Seq(s, u) = &**a {
                push(Law::SeqAssoc, Term::seq((**s).clone(), Term::seq((**u).clone(), (**b).clone())));
            }
            if let Seq(u, v) = &**b {
                push(Law::SeqAssoc, Term::seq(Term::seq((**a).clone(), (**u).clone()), (**v).clone()));
            }
            if matches!(**a, Id(_)) {
                push(Law::SeqUnitLeft, (**b).clone());
            }
            if matches!(**b, Id(_)) {
                push(Law::SeqUnitRight, (**a).clone());
            }
            if let (Sym(m, n), Sym(n2, m2)) = (&**a, &**b) {
                if n == n2 && m == m2 {
                    push(Law::SymInvolution, Id(m + n));
                }
            }
            // (s + id_m) ; sym_{n,m}  <->  sym_{o,m} ; (id_m + s)
            if let (Par(s, idm), Sym(n, m)) = (&**a, &**b) {
                if **idm == Id(*m) && ty(s).1 == *n {
                    let o = ty(s).0;
                    push(
                        Law::SymNaturality,
                        Term::seq(Sym(o, *m), Term::par(Id(*m), (**s).clone())),
                    );
                }
            }
            if let (Sym(o, m), Par(idm, s)) = (&**a, &**b) {
                if **idm == Id(*m) && ty(s).0 == *o {
                    let n = ty(s).1;
                    push(
                        Law::SymNaturality,
                        Term::seq(Term::par((**s).clone(), Id(*m)), Sym(n, *m)),
                    );
                }
            }
            // mirror image: (id_m + s) ; sym_{m,n}  <->  sym_{m,o} ; (s + id_m)
            if let (Par(idm, s), Sym(m, n)) = (&**a, &**b) {
                if **idm == Id(*m) && ty(s).1 == *n {
                    let o = ty(s).0;
                    push(
                        Law::SymNaturality,
                        Term::seq(Sym(*m, o), Term::par((**s).clone(), Id(*m))),
                    );
                }
            }
            if let (Sym(m, o), Par(s, idm)) = (&**a, &**b) {
                if **idm == Id(*m) && ty(s).0 == *o {
                    let n = ty(s).1;
                    push(
                        Law::SymNaturality,
                        Term::seq(Term::par(Id(*m), (**s).clone()), Sym(*m, n)),
                    );
                }
            }
            if let (Par(s, t2), Par(u, v)) = (&**a, &**b) {
                if ty(s).1 == ty(u).0 && ty(t2).1 == ty(v).0 {
                    push(
                        Law::Interchange,
                        Term::par(
                            Term::seq((**s).clone(), (**u).clone()),
                            Term::seq((**t2).clone(), (**v).clone()),
                        ),
                    );
                }
                if let (Sym(m, n), Id(o), Id(n2), Sym(m2, o2)) = (&**s, &**t2, &**u, &**v) {
                    if n == n2 && m == m2 && o == o2 {
                        push(Law::SymHexagon, Sym(*m, n + o));
                    }
                }
            }
            if **b == Mu {
                if **a == Par(Box::new(Mu), Box::new(Id(1))) {
                    push(Law::MuAssoc, mu_assoc_right());
                }
                if **a == Par(Box::new(Id(1)), Box::new(Mu)) {
                    push(Law::MuAssoc, mu_assoc_left());
                }
                if **a == Sym(1, 1) {
                    push(Law::MuComm, Mu);
                }
                if **a == Par(Box::new(Eta), Box::new(Id(1))) {
                    push(Law::MuUnitLeft, Id(1));
                }
                if **a == Par(Box::new(Id(1)), Box::new(Eta)) {
                    push(Law::MuUnitRight, Id(1));
                }
            }
        }
        Par(a, b) => {
            if let Par(s, u) = &**a {
                push(Law::ParAssoc, Term::par((**s).clone(), Term::par((**u).clone(), (**b).clone())));
            }
            if let Par(u, v) = &**b {
                push(Law::ParAssoc, Term::par(Term::par((**a).clone(), (**u).clone()), (**v).clone()));
            }
            if **a == Id(0) {
                push(Law::ParUnitLeft, (**b).clone());
            }
            if **b == Id(0) {
                push(Law::ParUnitRight, (**a).clone());
            }
            if let (Id(m), Id(n)) = (&**a, &**b) {
                push(Law::IdSum, Id(m + n));
            }
            if let (Seq(s, u), Seq(t2, v)) = (&**a, &**b) {
                push(
                    Law::Interchange,
                    Term::seq(
                        Term::par((**s).clone(), (**t2).clone()),
                        Term::par((**u).clone(), (**v).clone()),
                    ),
                );
            }
        }
        Id(k) => {
            for m in 0..=*k {
                push(Law::IdSum, Term::par(Id(m), Id(k - m)));
                push(Law::SymInvolution, Term::seq(Sym(m, k - m), Sym(k - m, m)));
            }
            if *k == 1 {
                push(Law::MuUnitLeft, Term::seq(Term::par(Eta, Id(1)), Mu));
                push(Law::MuUnitRight, Term::seq(Term::par(Id(1), Eta), Mu));
            }
        }
        Sym(m, k) => {
            for n in 0..=*k {
                let o = k - n;
                push(
                    Law::SymHexagon,
                    Term::seq(
                        Term::par(Sym(*m, n), Id(o)),
                        Term::par(Id(n), Sym(*m, o)),
                    ),
                );
            }
        }
        Mu => push(Law::MuComm, Term::seq(Sym(1, 1), Mu)),
        _ => {}
    }
}

/// Every term reachable from `t` by one application of a law, in either
/// direction, at any position.
pub fn one_step(t: &Term, sig: &Signature) -> Vec<(Law, Term)> {
    let mut out = Vec::new();
    root_steps(t, sig, &mut out);
    match t {
        Term::Seq(a, b) => {
            out.extend(one_step(a, sig).into_iter().map(|(l, x)| (l, Term::seq(x, (**b).clone()))));
            out.extend(one_step(b, sig).into_iter().map(|(l, x)| (l, Term::seq((**a).clone(), x))));
        }
        Term::Par(a, b) => {
            out.extend(one_step(a, sig).into_iter().map(|(l, x)| (l, Term::par(x, (**b).clone()))));
            out.extend(one_step(b, sig).into_iter().map(|(l, x)| (l, Term::par((**a).clone(), x))));
        }
        _ => {}
    }
    out
}

/// Terms provably equal to the seed using only intermediate terms of size at
/// most `bound`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomClosure {
    pub seed: Term,
    pub bound: usize,
    pub members: BTreeSet<Term>,
    /// False when exploration stopped at the member cap.
    pub saturated: bool,
}

impl AxiomClosure {
    pub fn contains(&self, t: &Term) -> bool {
        self.members.contains(t)
    }
}

pub fn axiom_closure(t: &Term, sig: &Signature, bound: usize) -> Result<AxiomClosure, OracleError> {
    axiom_closure_capped(t, sig, bound, DEFAULT_CLOSURE_CAP)
}

/// Breadth-first closure that stops after `cap` members.
pub fn axiom_closure_capped(
    t: &Term,
    sig: &Signature,
    bound: usize,
    cap: usize,
) -> Result<AxiomClosure, OracleError> {
    t.typecheck(sig)?;
    if t.size() > bound {
        return Err(OracleError::BoundTooSmall { size: t.size(), bound });
    }
    let mut members = BTreeSet::from([t.clone()]);
    let mut queue = VecDeque::from([t.clone()]);
    let mut saturated = true;
    'bfs: while let Some(x) = queue.pop_front() {
        for (_, y) in one_step(&x, sig) {
            if y.size() <= bound && !members.contains(&y) {
                if members.len() >= cap {
                    saturated = false;
                    break 'bfs;
                }
                members.insert(y.clone());
                queue.push_back(y);
            }
        }
    }
    Ok(AxiomClosure {
        seed: t.clone(),
        bound,
        members,
        saturated,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Equality {
    Equal,
    DistinctWithinBound,
    Unknown,
}

/// Bounded equality modulo the axioms. Terms of different types are
/// distinct.
pub fn terms_equal_mod_axioms(
    t1: &Term,
    t2: &Term,
    sig: &Signature,
    bound: usize,
) -> Result<Equality, OracleError> {
    if t1.typecheck(sig)? != t2.typecheck(sig)? {
        return Ok(Equality::DistinctWithinBound);
    }
    if t1 == t2 {
        return Ok(Equality::Equal);
    }
    let c1 = axiom_closure(t1, sig, bound.max(t1.size()))?;
    if c1.contains(t2) {
        return Ok(Equality::Equal);
    }
    if t2.size() > bound || !c1.saturated {
        return Ok(Equality::Unknown);
    }
    let c2 = axiom_closure(t2, sig, bound)?;
    if c2.contains(t1) {
        return Ok(Equality::Equal);
    }
    Ok(if c2.saturated {
        Equality::DistinctWithinBound
    } else {
        Equality::Unknown
    })
}

struct Atom {
    term: Term,
    dom: usize,
    cospan: Cospan,
    filled: Cospan,
    generator: Option<String>,
}

struct State {
    term: Term,
    cospan: Cospan,
    /// `cospan` with the placeholder replaced by the rule's left side.
    filled: Cospan,
    used: BTreeMap<String, usize>,
    hole: bool,
}

/// Whether a prefix `f` of some context can still be completed to `d`: the
/// canonical map of `f` into any completion is a homomorphism fixing the
/// inputs, injective on edges, that only merges nodes of the right interface
/// and leaves every other node with exactly its degrees in `f`.
struct Embedding<'a> {
    f: &'a Cospan,
    d: &'a Cospan,
    open: Vec<bool>,
    f_in: Vec<usize>,
    f_out: Vec<usize>,
    d_in: Vec<usize>,
    d_out: Vec<usize>,
    d_right: Vec<bool>,
    edges: Vec<usize>,
    map: Vec<Option<NodeId>>,
    preimages: Vec<Vec<NodeId>>,
    used: Vec<bool>,
}

impl<'a> Embedding<'a> {
    fn exists(f: &'a Cospan, d: &'a Cospan) -> bool {
        let mut open = vec![false; f.carrier.node_count];
        for &v in &f.right {
            open[v] = true;
        }
        let mut d_right = vec![false; d.carrier.node_count];
        for &v in &d.right {
            d_right[v] = true;
        }
        let Some(edges) = f.carrier.topological_edge_order() else {
            return false;
        };
        let mut e = Embedding {
            f,
            d,
            open,
            f_in: f.carrier.in_degrees(),
            f_out: f.carrier.out_degrees(),
            d_in: d.carrier.in_degrees(),
            d_out: d.carrier.out_degrees(),
            d_right,
            edges,
            map: vec![None; f.carrier.node_count],
            preimages: vec![Vec::new(); d.carrier.node_count],
            used: vec![false; d.carrier.edges.len()],
        };
        for (&x, &y) in f.left.iter().zip(&d.left) {
            if !e.bind(x, y) {
                return false;
            }
        }
        e.search(0)
    }

    fn bind(&mut self, x: NodeId, y: NodeId) -> bool {
        if let Some(z) = self.map[x] {
            return z == y;
        }
        if !self.open[x]
            && (self.f_in[x] != self.d_in[y] || self.f_out[x] != self.d_out[y] || self.d_right[y])
        {
            return false;
        }
        if self.preimages[y].iter().any(|&w| !self.open[w] || !self.open[x]) {
            return false;
        }
        self.map[x] = Some(y);
        self.preimages[y].push(x);
        true
    }

    fn unbind(&mut self, bound: &[NodeId]) {
        for &x in bound.iter().rev() {
            let y = self.map[x].take().expect("bound above");
            self.preimages[y].pop();
        }
    }

    fn search(&mut self, k: usize) -> bool {
        let Some(&pe) = self.edges.get(k) else {
            return true;
        };
        let pattern = &self.f.carrier.edges[pe];
        for he in 0..self.d.carrier.edges.len() {
            let host = &self.d.carrier.edges[he];
            if self.used[he] || host.label != pattern.label {
                continue;
            }
            let pairs: Vec<(NodeId, NodeId)> = pattern
                .sources
                .iter()
                .zip(&host.sources)
                .chain(pattern.targets.iter().zip(&host.targets))
                .map(|(&x, &y)| (x, y))
                .collect();
            let mut bound = Vec::new();
            let mut ok = true;
            for (x, y) in pairs {
                let fresh = self.map[x].is_none();
                if !self.bind(x, y) {
                    ok = false;
                    break;
                }
                if fresh {
                    bound.push(x);
                }
            }
            if ok {
                self.used[he] = true;
                if self.search(k + 1) {
                    return true;
                }
                self.used[he] = false;
            }
            self.unbind(&bound);
        }
        false
    }
}

fn state_key(c: &Cospan) -> CanonicalKey {
    canonical_form_with_set(&c.carrier, &c.left, &c.right)
}

/// All orderings of `0..n`, as tables `i -> position`.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, left: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..left.len() {
            let x = left.remove(i);
            prefix.push(x);
            go(prefix, left, out);
            prefix.pop();
            left.insert(i, x);
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut (0..n).collect(), &mut out);
    out
}

/// Ordered selections of `k` distinct positions out of `0..w`.
fn selections(w: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(w: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for p in 0..w {
            if !cur.contains(&p) {
                cur.push(p);
                go(w, k, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(w, k, &mut Vec::new(), &mut out);
    out
}

/// All `e = c1 ; (id_k + r) ; c2` such that `d` equals
/// `c1 ; (id_k + l) ; c2`.
///
/// Contexts are explored as sequences of layers, each applying one
/// generator, `mu` or `eta` to chosen wires, and at most `bound` layers.
/// Wire widths are capped at `max(4, w + k)`, where `w` is the widest wire
/// bundle inside `d` and `k` the number of inputs of `l`. Wire order is
/// settled by a final permutation. Equality of `d` and a candidate is decided through
/// the interpretation as cospans. Results are deduplicated up to isomorphism
/// of their interpretations and returned in discovery order.
pub fn enumerate_rewrites_bruteforce(
    l: &Term,
    r: &Term,
    d: &Term,
    sig: &Signature,
    bound: usize,
) -> Result<Vec<Term>, OracleError> {
    let (i, j) = l.typecheck(sig)?;
    let rt = r.typecheck(sig)?;
    if (i, j) != rt {
        return Err(OracleError::RuleTypeMismatch { lhs: (i, j), rhs: rt });
    }
    let (n, m) = d.typecheck(sig)?;
    let mut budget = d.generator_counts();
    for (g, c) in l.generator_counts() {
        match budget.get_mut(&g) {
            Some(b) if *b >= c => *b -= c,
            _ => return Ok(Vec::new()),
        }
    }
    budget.retain(|_, c| *c > 0);
    let width = 4.max(max_intermediate_width(d, sig) + i);
    let host = eval_term(d, sig)?;
    let target = host.canonical_key();

    let mut ext = sig.clone();
    ext.insert_unchecked(HOLE, i, j);
    let mut atoms = vec![
        Atom {
            term: Term::Mu,
            dom: 2,
            cospan: eval_term(&Term::Mu, sig)?,
            filled: eval_term(&Term::Mu, sig)?,
            generator: None,
        },
        Atom {
            term: Term::Eta,
            dom: 0,
            cospan: eval_term(&Term::Eta, sig)?,
            filled: eval_term(&Term::Eta, sig)?,
            generator: None,
        },
    ];
    for name in budget.keys().map(String::as_str).chain([HOLE]) {
        atoms.push(Atom {
            term: Term::gen(name),
            dom: ext.arity(name).expect("declared above").inputs,
            cospan: generator_cospan(name, &ext)?,
            filled: if name == HOLE {
                eval_term(l, sig)?
            } else {
                generator_cospan(name, sig)?
            },
            generator: Some(name.to_string()),
        });
    }
    let orderings = permutations(m);

    let mut results = Vec::new();
    let mut result_keys = BTreeSet::new();
    let mut finish = |s: &State| -> Result<(), OracleError> {
        if !s.hole || s.cospan.cod() != m || s.used != budget {
            return Ok(());
        }
        let filled = &s.filled;
        for perm in &orderings {
            let mut placed = filled.clone();
            for (k, &p) in perm.iter().enumerate() {
                placed.right[p] = filled.right[k];
            }
            if placed.canonical_key() != target {
                continue;
            }
            let e = Term::seq(s.term.clone(), permutation_term(perm)).substitute(HOLE, r);
            if result_keys.insert(eval_term(&e, sig)?.canonical_key()) {
                results.push(e);
            }
        }
        Ok(())
    };

    let start = State {
        term: Term::Id(n),
        cospan: Cospan::identity(n),
        filled: Cospan::identity(n),
        used: BTreeMap::new(),
        hole: false,
    };
    let mut seen = BTreeSet::from([state_key(&start.cospan)]);
    finish(&start)?;
    let mut frontier = vec![start];
    for _ in 0..bound {
        let mut next = Vec::new();
        for s in &frontier {
            let w = s.cospan.cod();
            for atom in &atoms {
                let allowed = match &atom.generator {
                    Some(g) if g == HOLE => !s.hole,
                    Some(g) => s.used.get(g).copied().unwrap_or(0) < budget[g],
                    None => true,
                };
                let out = atom.cospan.cod();
                if !allowed || atom.dom > w || w - atom.dom + out > width {
                    continue;
                }
                let layer = atom.cospan.tensor(&Cospan::identity(w - atom.dom));
                let filled_layer = atom.filled.tensor(&Cospan::identity(w - atom.dom));
                for chosen in selections(w, atom.dom) {
                    let rest: Vec<usize> = (0..w).filter(|p| !chosen.contains(p)).collect();
                    let mut moved = s.cospan.clone();
                    moved.right = chosen.iter().chain(&rest).map(|&p| s.cospan.right[p]).collect();
                    let cospan = moved.compose(&layer).expect("widths agree");
                    if !seen.insert(state_key(&cospan)) {
                        continue;
                    }
                    let mut filled = s.filled.clone();
                    filled.right = chosen.iter().chain(&rest).map(|&p| s.filled.right[p]).collect();
                    let filled = filled.compose(&filled_layer).expect("widths agree");
                    if !Embedding::exists(&filled, &host) {
                        continue;
                    }
                    let mut target_pos = vec![0; w];
                    for (new, &old) in chosen.iter().chain(&rest).enumerate() {
                        target_pos[old] = new;
                    }
                    let step = Term::seq(
                        permutation_term(&target_pos),
                        Term::par(atom.term.clone(), Term::Id(w - atom.dom)),
                    );
                    let mut used = s.used.clone();
                    let mut hole = s.hole;
                    match &atom.generator {
                        Some(g) if g == HOLE => hole = true,
                        Some(g) => *used.entry(g.clone()).or_default() += 1,
                        None => {}
                    }
                    let state = State {
                        term: Term::seq(s.term.clone(), step),
                        cospan,
                        filled,
                        used,
                        hole,
                    };
                    finish(&state)?;
                    next.push(state);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(results)
}

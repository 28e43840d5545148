//! Seeded generators for random terms and random right-monogamous acyclic
//! cospans, used by the test suites and the CLI corpus tooling.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::cospan::Cospan;
use crate::hypergraph::Hypergraph;
use crate::sigterm::{Signature, Term};

/// Three generators of mixed arity.
pub fn default_signature() -> Signature {
    Signature::new().with("f", 1, 1).with("g", 2, 1).with("h", 1, 2)
}

#[derive(Debug, Clone)]
pub struct TermConfig {
    pub max_generators: usize,
    pub max_width: usize,
    pub max_depth: usize,
}

impl Default for TermConfig {
    fn default() -> Self {
        TermConfig {
            max_generators: 6,
            max_width: 4,
            max_depth: 4,
        }
    }
}

struct TermGen<'a, R> {
    rng: &'a mut R,
    gens: Vec<(String, usize, usize)>,
    cfg: &'a TermConfig,
    budget: usize,
}

impl<R: Rng> TermGen<'_, R> {
    fn layer(&mut self, width: usize) -> (Term, usize) {
        let mut parts = Vec::new();
        let mut remaining = width;
        let mut out = 0;
        let mut etas = 0;
        while remaining > 0 || (etas == 0 && self.rng.gen_bool(0.1)) {
            let roll = self.rng.gen_range(0..10);
            let candidate = match roll {
                0..=2 if self.budget > 0 => {
                    let (name, m, n) = self.gens.choose(self.rng).unwrap().clone();
                    (m <= remaining).then_some((Term::Gen(name), m, n))
                }
                3 | 4 if remaining >= 2 => Some((Term::Mu, 2, 1)),
                5 if etas < 1 => Some((Term::Eta, 0, 1)),
                6 if remaining >= 2 => Some((Term::Sym(1, 1), 2, 2)),
                _ if remaining >= 1 => Some((Term::Id(1), 1, 1)),
                _ => None,
            };
            let Some((t, m, n)) = candidate else {
                if remaining == 0 {
                    break;
                }
                continue;
            };
            if matches!(t, Term::Gen(_)) {
                self.budget -= 1;
            }
            if matches!(t, Term::Eta) {
                etas += 1;
            }
            remaining -= m;
            out += n;
            parts.push(t);
        }
        parts.shuffle(self.rng);
        (Term::par_all(parts), out)
    }

    fn term(&mut self, width: usize, depth: usize) -> (Term, usize) {
        if depth == 0 {
            return self.layer(width);
        }
        match self.rng.gen_range(0..4) {
            0 => self.layer(width),
            1 if width >= 1 => {
                let split = self.rng.gen_range(0..=width);
                let (a, wa) = self.term(split, depth - 1);
                let (b, wb) = self.term(width - split, depth - 1);
                (Term::par(a, b), wa + wb)
            }
            _ => {
                let (a, wa) = self.term(width, depth - 1);
                if wa > self.cfg.max_width {
                    return (a, wa);
                }
                let (b, wb) = self.term(wa, depth - 1);
                (Term::seq(a, b), wb)
            }
        }
    }
}

/// Largest domain or codomain of any subterm.
pub fn max_intermediate_width(t: &Term, sig: &Signature) -> usize {
    match t {
        Term::Seq(a, b) | Term::Par(a, b) => {
            let (d, c) = t.typecheck(sig).unwrap();
            max_intermediate_width(a, sig)
                .max(max_intermediate_width(b, sig))
                .max(d)
                .max(c)
        }
        _ => {
            let (d, c) = t.typecheck(sig).unwrap();
            d.max(c)
        }
    }
}

/// A random well-typed term with at most `max_generators` signature
/// generators and all wire widths at most `max_width`.
pub fn random_term<R: Rng>(rng: &mut R, sig: &Signature, cfg: &TermConfig) -> Term {
    let gens: Vec<(String, usize, usize)> = sig
        .iter()
        .map(|(n, a)| (n.to_string(), a.inputs, a.outputs))
        .collect();
    loop {
        let width = rng.gen_range(0..=cfg.max_width);
        let depth = rng.gen_range(0..=cfg.max_depth);
        let mut tg = TermGen {
            rng: &mut *rng,
            gens: gens.clone(),
            cfg,
            budget: cfg.max_generators,
        };
        let (t, _) = tg.term(width, depth);
        if max_intermediate_width(&t, sig) <= cfg.max_width {
            return t;
        }
    }
}

#[derive(Debug, Clone)]
pub struct CospanConfig {
    pub max_nodes: usize,
    pub max_edges: usize,
    pub max_inputs: usize,
}

impl Default for CospanConfig {
    fn default() -> Self {
        CospanConfig {
            max_nodes: 8,
            max_edges: 5,
            max_inputs: 4,
        }
    }
}

/// A random right-monogamous acyclic cospan over `sig`, built directly on
/// the carrier rather than from a term. Nodes are created in a fixed order
/// and every edge points forward, so the result is acyclic.
pub fn random_cospan<R: Rng>(rng: &mut R, sig: &Signature, cfg: &CospanConfig) -> Cospan {
    let gens: Vec<(String, usize, usize)> = sig
        .iter()
        .map(|(n, a)| (n.to_string(), a.inputs, a.outputs))
        .collect();
    loop {
        let n = rng.gen_range(0..=cfg.max_nodes);
        let mut g = Hypergraph::discrete(n);
        let mut consumed = vec![false; n];
        let edge_target = rng.gen_range(0..=cfg.max_edges);
        for _ in 0..edge_target * 3 {
            if g.edges.len() == edge_target {
                break;
            }
            let (name, m, k) = gens.choose(rng).unwrap().clone();
            let free: Vec<usize> = (0..n).filter(|&v| !consumed[v]).collect();
            if free.len() < m {
                continue;
            }
            let sources: Vec<usize> = free.choose_multiple(rng, m).copied().collect();
            let lo = sources.iter().map(|&s| s + 1).max().unwrap_or(0);
            if k > 0 && lo >= n {
                continue;
            }
            let targets: Vec<usize> = (0..k).map(|_| rng.gen_range(lo..n)).collect();
            for &s in &sources {
                consumed[s] = true;
            }
            g.add_edge(&name, sources, targets);
        }
        let mut right = g.terminal_nodes();
        right.shuffle(rng);
        let inputs = if n == 0 { 0 } else { rng.gen_range(0..=cfg.max_inputs) };
        let left = (0..inputs).map(|_| rng.gen_range(0..n)).collect();
        let c = Cospan {
            carrier: g,
            left,
            right,
        };
        if c.right.len() <= cfg.max_inputs + 2 {
            debug_assert!(c.is_right_monogamous() && c.is_acyclic());
            return c;
        }
    }
}

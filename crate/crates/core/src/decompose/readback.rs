use std::collections::BTreeMap;

use super::levels::factorise_into_levels;
use super::DecomposeError;
use crate::cospan::{cospan_to_function, Cospan, FinFunction};
use crate::sigterm::Term;

fn seq(a: Term, b: Term) -> Term {
    match (a, b) {
        (Term::Id(_), b) => b,
        (a, Term::Id(_)) => a,
        (a, b) => Term::seq(a, b),
    }
}

fn par(a: Term, b: Term) -> Term {
    match (a, b) {
        (Term::Id(0), b) => b,
        (a, Term::Id(0)) => a,
        (Term::Id(m), Term::Id(n)) => Term::Id(m + n),
        (a, b) => Term::par(a, b),
    }
}

/// A term built from symmetries sending input `i` to output `target[i]`.
/// `target` must be a permutation.
pub fn permutation_term(target: &[usize]) -> Term {
    let width = target.len();
    let mut arr = target.to_vec();
    let mut layers = Vec::new();
    loop {
        let mut swapped = false;
        for i in 0..width.saturating_sub(1) {
            if arr[i] > arr[i + 1] {
                arr.swap(i, i + 1);
                swapped = true;
                let layer = par(par(Term::Id(i), Term::Sym(1, 1)), Term::Id(width - i - 2));
                layers.push(layer);
            }
        }
        if !swapped {
            break;
        }
    }
    layers.into_iter().fold(Term::Id(width), seq)
}

/// Generators in topological order, with symmetries routing sources into
/// place. Requires a monogamous acyclic cospan.
pub fn monogamous_term(m: &Cospan) -> Result<Term, DecomposeError> {
    if !m.is_monogamous() {
        return Err(DecomposeError::NotRightMonogamous);
    }
    let order = m.carrier.topological_edge_order().ok_or(DecomposeError::Cyclic)?;
    let mut wires = m.left.clone();
    let mut term = Term::Id(wires.len());
    for e in order {
        let edge = &m.carrier.edges[e];
        let front: Vec<usize> = edge
            .sources
            .iter()
            .map(|s| wires.iter().position(|w| w == s).expect("monogamous source is live"))
            .collect();
        let rest: Vec<usize> = (0..wires.len()).filter(|i| !front.contains(i)).collect();
        let mut target = vec![0; wires.len()];
        for (new, &old) in front.iter().chain(&rest).enumerate() {
            target[old] = new;
        }
        let step = par(Term::Gen(edge.label.clone()), Term::Id(rest.len()));
        term = seq(seq(term, permutation_term(&target)), step);
        let mut next = edge.targets.clone();
        next.extend(rest.iter().map(|&i| wires[i]));
        wires = next;
    }
    let pos: BTreeMap<usize, usize> = m.right.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let target: Vec<usize> = wires.iter().map(|w| pos[w]).collect();
    Ok(seq(term, permutation_term(&target)))
}

fn merge_tree(size: usize) -> Term {
    match size {
        0 => Term::Eta,
        1 => Term::Id(1),
        _ => seq(par(Term::Id(1), merge_tree(size - 1)), Term::Mu),
    }
}

/// A term of the commutative monoid structure denoting `f`.
pub fn function_term(f: &FinFunction) -> Term {
    let mut by_target: Vec<usize> = (0..f.dom).collect();
    by_target.sort_by_key(|&i| f.table[i]);
    let mut target = vec![0; f.dom];
    for (new, &old) in by_target.iter().enumerate() {
        target[old] = new;
    }
    let mut sizes = vec![0; f.cod];
    for &j in &f.table {
        sizes[j] += 1;
    }
    let fibres = sizes.into_iter().map(merge_tree).fold(Term::Id(0), par);
    seq(permutation_term(&target), fibres)
}

/// A term whose interpretation is isomorphic to `g`.
pub fn readback_term(g: &Cospan) -> Result<Term, DecomposeError> {
    let f = factorise_into_levels(g)?;
    let mut acc = Term::Id(0);
    for level in f.levels.iter().rev() {
        let d = cospan_to_function(&level.d).expect("discrete factor is a function");
        let tail = seq(function_term(&d), acc);
        acc = seq(monogamous_term(&level.m)?, par(Term::Id(level.k), tail));
    }
    Ok(seq(acc, permutation_term(&f.pi.table)))
}

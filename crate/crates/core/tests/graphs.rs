use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cmonrw::cospan::Cospan;
use cmonrw::hypergraph::{canonical_form, find_homomorphisms, Hypergraph};
use cmonrw::random::{default_signature, random_cospan, CospanConfig};

fn small_graph(seed: u64, nodes: usize, edges: usize) -> Hypergraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(0..=nodes);
    let mut g = Hypergraph::discrete(n);
    if n == 0 {
        return g;
    }
    for _ in 0..rng.gen_range(0..=edges) {
        if rng.gen_bool(0.5) {
            let (s, t) = (rng.gen_range(0..n), rng.gen_range(0..n));
            g.add_edge("a", vec![s], vec![t]);
        } else {
            let (s, t, u) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
            g.add_edge("b", vec![s, t], vec![u]);
        }
    }
    g
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn edge_multiset(g: &Hypergraph, rename: &[usize]) -> Vec<(String, Vec<usize>, Vec<usize>)> {
    let mut es: Vec<_> = g
        .edges
        .iter()
        .map(|e| {
            (
                e.label.clone(),
                e.sources.iter().map(|&v| rename[v]).collect(),
                e.targets.iter().map(|&v| rename[v]).collect(),
            )
        })
        .collect();
    es.sort();
    es
}

/// Isomorphism by trying every node bijection.
fn brute_iso(a: &Hypergraph, pa: &[usize], b: &Hypergraph, pb: &[usize]) -> bool {
    if a.node_count != b.node_count || a.edges.len() != b.edges.len() || pa.len() != pb.len() {
        return false;
    }
    let target = edge_multiset(b, &(0..b.node_count).collect::<Vec<_>>());
    permutations(a.node_count).into_iter().any(|p| {
        pa.iter().zip(pb).all(|(&x, &y)| p[x] == y) && edge_multiset(a, &p) == target
    })
}

fn injections(k: usize, n: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for partial in injections(k - 1, n) {
        for v in (0..n).filter(|v| !partial.contains(v)) {
            let mut p = partial.clone();
            p.push(v);
            out.push(p);
        }
    }
    out
}

fn relabel(g: &Hypergraph, perm: &[usize]) -> Hypergraph {
    let mut h = Hypergraph::discrete(g.node_count);
    for e in g.edges.iter().rev() {
        h.add_edge(
            &e.label,
            e.sources.iter().map(|&v| perm[v]).collect(),
            e.targets.iter().map(|&v| perm[v]).collect(),
        );
    }
    h
}

fn rmac(seed: u64) -> Cospan {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = CospanConfig {
        max_nodes: 6,
        max_edges: 4,
        max_inputs: 3,
    };
    random_cospan(&mut rng, &default_signature(), &cfg)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn degree_sums(seed in any::<u64>()) {
        let g = small_graph(seed, 6, 5);
        let ins: usize = g.in_degrees().iter().sum();
        let outs: usize = g.out_degrees().iter().sum();
        prop_assert_eq!(ins, g.edges.iter().map(|e| e.targets.len()).sum::<usize>());
        prop_assert_eq!(outs, g.edges.iter().map(|e| e.sources.len()).sum::<usize>());
        let terminal: BTreeSet<usize> = g.terminal_nodes().into_iter().collect();
        for v in g.nodes() {
            prop_assert_eq!(terminal.contains(&v), g.out_degree(v).unwrap() == 0);
        }
    }

    #[test]
    fn acyclic_iff_topologically_sortable(seed in any::<u64>()) {
        let g = small_graph(seed, 8, 6);
        prop_assert_eq!(g.is_acyclic(), g.topological_edge_order().is_some());
        if let Some(cycle) = g.find_cycle() {
            prop_assert!(cycle.is_valid_in(&g));
            prop_assert!(cycle.repeats_node());
        }
    }

    #[test]
    fn canonical_form_decides_isomorphism(a in any::<u64>(), b in any::<u64>(), pin in 0usize..3) {
        let g = small_graph(a, 5, 4);
        let h = small_graph(b, 5, 4);
        let pg: Vec<usize> = (0..pin.min(g.node_count)).collect();
        let ph: Vec<usize> = (0..pin.min(h.node_count)).collect();
        let same_key = canonical_form(&g, &pg) == canonical_form(&h, &ph);
        prop_assert_eq!(same_key, brute_iso(&g, &pg, &h, &ph));
    }

    #[test]
    fn canonical_form_ignores_relabelling(a in any::<u64>(), shuffle in any::<u64>()) {
        let g = small_graph(a, 6, 6);
        let mut perm: Vec<usize> = (0..g.node_count).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(shuffle);
        rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), &mut rng);
        let h = relabel(&g, &perm);
        let pins: Vec<usize> = (0..g.node_count.min(2)).collect();
        let moved: Vec<usize> = pins.iter().map(|&v| perm[v]).collect();
        prop_assert_eq!(canonical_form(&g, &pins), canonical_form(&h, &moved));
    }

    #[test]
    fn injective_homomorphisms_match_brute_force(a in any::<u64>(), b in any::<u64>()) {
        let pattern = small_graph(a, 3, 2);
        let host = small_graph(b, 4, 4);
        let found: BTreeSet<(Vec<usize>, Vec<usize>)> =
            find_homomorphisms(&pattern, &host, &BTreeSet::new())
                .into_iter()
                .map(|h| (h.node_map, h.edge_map))
                .collect();
        let mut expected = BTreeSet::new();
        for node_map in injections(pattern.node_count, host.node_count) {
            let mut edge_maps: Vec<Vec<usize>> = vec![vec![]];
            for e in &pattern.edges {
                let mut next = Vec::new();
                for partial in &edge_maps {
                    for (j, f) in host.edges.iter().enumerate() {
                        let fits = f.label == e.label
                            && !partial.contains(&j)
                            && e.sources.iter().map(|&v| node_map[v]).eq(f.sources.iter().copied())
                            && e.targets.iter().map(|&v| node_map[v]).eq(f.targets.iter().copied());
                        if fits {
                            let mut p = partial.clone();
                            p.push(j);
                            next.push(p);
                        }
                    }
                }
                edge_maps = next;
            }
            for em in edge_maps {
                expected.insert((node_map.clone(), em));
            }
        }
        prop_assert_eq!(found, expected);
    }

    #[test]
    fn composition_is_associative(a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let (x, y, z) = (rmac(a), rmac(b), rmac(c));
        let y = fit(&y, x.cod());
        let z = fit(&z, y.cod());
        let left = x.compose(&y).unwrap().compose(&z).unwrap();
        let right = x.compose(&y.compose(&z).unwrap()).unwrap();
        prop_assert!(left.iso_equal(&right));
        prop_assert!(left.is_right_monogamous() && left.is_acyclic());
    }

    #[test]
    fn interchange(a in any::<u64>(), b in any::<u64>(), c in any::<u64>(), d in any::<u64>()) {
        let (s, t) = (rmac(a), rmac(b));
        let u = fit(&rmac(c), s.cod());
        let v = fit(&rmac(d), t.cod());
        let lhs = s.tensor(&t).compose(&u.tensor(&v)).unwrap();
        let rhs = s.compose(&u).unwrap().tensor(&t.compose(&v).unwrap());
        prop_assert!(lhs.iso_equal(&rhs));
        prop_assert!(s.tensor(&t).is_right_monogamous() && s.tensor(&t).is_acyclic());
    }
}

/// `c` with its left interface resized to `width` by reusing nodes, or an
/// identity when `c` has no nodes to attach to.
fn fit(c: &Cospan, width: usize) -> Cospan {
    if c.carrier.node_count == 0 {
        return Cospan::identity(width);
    }
    let left = (0..width).map(|i| i % c.carrier.node_count).collect();
    Cospan {
        carrier: c.carrier.clone(),
        left,
        right: c.right.clone(),
    }
}

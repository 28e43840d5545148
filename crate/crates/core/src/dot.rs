//! Graphviz export. Nodes are points, hyperedges are labelled boxes, and
//! tentacles carry their port number at the arrowhead. A cospan's
//! interfaces are drawn as two rails of numbered ports on either side.

use std::fmt::Write;

use crate::cospan::Cospan;
use crate::hypergraph::Hypergraph;

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' | '\\' => {
                out.push('\\');
                out.push(c);
            }
            '\n' => out.push_str("\\n"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

fn body(g: &Hypergraph, out: &mut String) {
    for v in g.nodes() {
        writeln!(out, "  n{v} [shape=point, width=0.08, xlabel={}];", quote(&v.to_string())).unwrap();
    }
    for (i, e) in g.edges.iter().enumerate() {
        writeln!(out, "  e{i} [shape=box, label={}];", quote(&e.label)).unwrap();
        for (p, s) in e.sources.iter().enumerate() {
            writeln!(out, "  n{s} -> e{i} [headlabel=\"{p}\", arrowsize=0.6];").unwrap();
        }
        for (p, t) in e.targets.iter().enumerate() {
            writeln!(out, "  e{i} -> n{t} [taillabel=\"{p}\", arrowsize=0.6];").unwrap();
        }
    }
}

pub fn hypergraph_to_dot(g: &Hypergraph, name: &str) -> String {
    let mut out = format!("digraph {} {{\n  rankdir=LR;\n", quote(name));
    body(g, &mut out);
    out.push_str("}\n");
    out
}

pub fn cospan_to_dot(c: &Cospan, name: &str) -> String {
    let mut out = format!("digraph {} {{\n  rankdir=LR;\n", quote(name));
    for (side, ports, prefix) in [("inputs", &c.left, "l"), ("outputs", &c.right, "r")] {
        writeln!(out, "  subgraph cluster_{side} {{").unwrap();
        writeln!(out, "    label={}; style=rounded; color=blue;", quote(side)).unwrap();
        out.push_str("    node [shape=plaintext];\n");
        for i in 0..ports.len() {
            writeln!(out, "    {prefix}{i} [label=\"{i}\"];").unwrap();
        }
        if ports.len() > 1 {
            let chain: Vec<String> = (0..ports.len()).map(|i| format!("{prefix}{i}")).collect();
            writeln!(out, "    {} [style=invis];", chain.join(" -> ")).unwrap();
        }
        out.push_str("  }\n");
    }
    body(&c.carrier, &mut out);
    for (i, v) in c.left.iter().enumerate() {
        writeln!(out, "  l{i} -> n{v} [style=dashed, arrowhead=none];").unwrap();
    }
    for (i, v) in c.right.iter().enumerate() {
        writeln!(out, "  n{v} -> r{i} [style=dashed, arrowhead=none];").unwrap();
    }
    out.push_str("}\n");
    out
}

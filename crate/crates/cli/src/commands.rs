use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use cmonrw::decompose::{factorise_into_levels, readback_term};
use cmonrw::doc::{cospan_to_json, CospanDoc};
use cmonrw::dot::{cospan_to_dot, hypergraph_to_dot};
use cmonrw::dpo::{
    boundary_complement, enumerate_convex_matches, normalize, parse_rules, rewrite_all, DpoError,
    RewriteRule, RewriteStep, Strategy,
};
use cmonrw::oracle::enumerate_rewrites_bruteforce;
use cmonrw::sigterm::pretty_print;
use cmonrw::translate::eval_term;
use cmonrw::{Cospan, Signature, Term};

use crate::error::CliError;
use crate::files::{self, Host};
use crate::{Cli, Command, Diagram, Format, StrategyArg};

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Check { input, sig } => check(cli, input, sig.as_deref()),
        Command::Translate {
            sig,
            term,
            term_file,
            dot,
        } => translate(cli, sig.as_deref(), term.as_deref(), term_file.as_deref(), dot.as_deref()),
        Command::Factorize { input, sig } => factorize(cli, input, sig.as_deref()),
        Command::Readback { input, sig } => readback(cli, input, sig.as_deref()),
        Command::Match { rules, host, sig } => matches(cli, rules, host, sig.as_deref()),
        Command::Rewrite {
            rules,
            host,
            sig,
            strategy,
            max_steps,
            all,
            dot_dir,
        } => rewrite(
            cli,
            rules,
            host,
            sig.as_deref(),
            *strategy,
            *max_steps,
            *all,
            dot_dir.as_deref(),
        ),
        Command::OracleCompare {
            rules,
            host,
            sig,
            bound,
        } => oracle_compare(cli, rules, host, sig.as_deref(), *bound),
        Command::Export {
            term,
            term_file,
            cospan,
            graph,
            sig,
        } => export(cli, term.as_deref(), term_file.as_deref(), cospan.as_deref(), graph.as_deref(), sig.as_deref()),
    }
}

fn emit(cli: &Cli, text: String, structured: &Value) -> Result<(), CliError> {
    let body = match cli.format {
        Format::Text => text,
        Format::Structured => {
            let mut s = serde_json::to_string_pretty(structured).expect("plain data");
            s.push('\n');
            s
        }
    };
    emit_raw(cli, &body)
}

fn emit_raw(cli: &Cli, body: &str) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => files::write_atomic(path, body),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn load(input: &Diagram, sig: Option<&Path>) -> Result<(Option<Term>, Cospan), CliError> {
    let given = sig.is_some();
    let sig = files::signature(sig)?;
    if let Some(src) = &input.term {
        let t = files::term_text(src, &sig)?;
        let c = eval_term(&t, &sig)?;
        Ok((Some(t), c))
    } else if let Some(path) = &input.term_file {
        let t = files::term_file(path, &sig)?;
        let c = eval_term(&t, &sig).map_err(|e| CliError::from(e).at(path))?;
        Ok((Some(t), c))
    } else {
        let path = input.cospan.as_deref().expect("clap requires one input");
        Ok((None, files::cospan_file(path, given.then_some(&sig))?))
    }
}

fn doc(c: &Cospan) -> Value {
    serde_json::to_value(CospanDoc::from_cospan(c)).expect("plain data")
}

fn term_of(c: &Cospan) -> Result<String, CliError> {
    Ok(pretty_print(&readback_term(c)?))
}

fn check(cli: &Cli, input: &Diagram, sig: Option<&Path>) -> Result<(), CliError> {
    let (term, c) = load(input, sig)?;
    let (rm, ac, mono) = (c.is_right_monogamous(), c.is_acyclic(), c.is_monogamous());
    let mut text = format!("right-monogamous: {rm}, acyclic: {ac}\n");
    let _ = writeln!(text, "monogamous: {mono}");
    let _ = writeln!(text, "interface: {} -> {}", c.dom(), c.cod());
    let _ = writeln!(text, "nodes: {}, edges: {}", c.carrier.node_count, c.carrier.edges.len());
    let structured = json!({
        "right_monogamous": rm,
        "acyclic": ac,
        "monogamous": mono,
        "inputs": c.dom(),
        "outputs": c.cod(),
        "nodes": c.carrier.node_count,
        "edges": c.carrier.edges.len(),
        "term": term.as_ref().map(pretty_print),
    });
    emit(cli, text, &structured)
}

fn translate(
    cli: &Cli,
    sig: Option<&Path>,
    term: Option<&str>,
    term_file: Option<&Path>,
    dot: Option<&Path>,
) -> Result<(), CliError> {
    let input = Diagram {
        term: term.map(str::to_string),
        term_file: term_file.map(Path::to_path_buf),
        cospan: None,
    };
    let (_, c) = load(&input, sig)?;
    if let Some(path) = dot {
        files::write_atomic(path, &cospan_to_dot(&c, "term"))?;
    }
    emit_raw(cli, &cospan_to_json(&c))
}

fn factorize(cli: &Cli, input: &Diagram, sig: Option<&Path>) -> Result<(), CliError> {
    let (_, c) = load(input, sig)?;
    let f = factorise_into_levels(&c)?;
    let mut text = format!("{} level(s)\n", f.levels.len());
    let mut levels = Vec::new();
    for (i, level) in f.levels.iter().enumerate() {
        let _ = writeln!(
            text,
            "level {i}: M {} -> {} with edges {:?}, {} bypassing, D {} -> {} merging nodes {:?}",
            level.m.dom(),
            level.m.cod(),
            level.edges,
            level.k,
            level.d.dom(),
            level.d.cod(),
            level.merged,
        );
        levels.push(json!({
            "m": doc(&level.m),
            "k": level.k,
            "d": doc(&level.d),
            "edges": level.edges,
            "merged": level.merged,
        }));
    }
    let _ = writeln!(text, "pi: {:?}", f.pi.table);
    emit(cli, text, &json!({ "levels": levels, "pi": f.pi.table }))
}

fn readback(cli: &Cli, input: &Diagram, sig: Option<&Path>) -> Result<(), CliError> {
    let (_, c) = load(input, sig)?;
    let t = readback_term(&c)?;
    let printed = pretty_print(&t);
    let structured = json!({ "term": printed, "inputs": c.dom(), "outputs": c.cod() });
    emit(cli, format!("{printed}\n"), &structured)
}

fn load_rules(path: &Path, sig: &Signature) -> Result<Vec<(cmonrw::dpo::RuleDef, RewriteRule)>, CliError> {
    let src = files::read(path)?;
    let at = |e: DpoError| CliError::from(e).at(path);
    parse_rules(&src, sig)
        .map_err(at)?
        .into_iter()
        .map(|def| {
            let rule = RewriteRule::from_def(&def, sig).map_err(at)?;
            Ok((def, rule))
        })
        .collect()
}

struct Inputs {
    rules: Vec<(cmonrw::dpo::RuleDef, RewriteRule)>,
    host: Host,
    sig: Signature,
}

fn load_rewriting(rules: &Path, host: &Path, sig: Option<&Path>) -> Result<Inputs, CliError> {
    let sig = files::signature(sig)?;
    let host = files::host_file(host, &sig)?;
    let rules = load_rules(rules, &sig)?;
    Ok(Inputs { rules, host, sig })
}

fn matches(cli: &Cli, rules: &Path, host: &Path, sig: Option<&Path>) -> Result<(), CliError> {
    let inputs = load_rewriting(rules, host, sig)?;
    let host = &inputs.host.cospan;
    let mut text = String::new();
    let mut out = Vec::new();
    for (def, rule) in &inputs.rules {
        for m in enumerate_convex_matches(rule, host) {
            let complements = match boundary_complement(rule, &m, host) {
                Ok(cs) => cs.len(),
                Err(DpoError::DanglingEdge { .. }) => 0,
                Err(e) => return Err(e.into()),
            };
            let _ = writeln!(
                text,
                "{}: edges {:?} nodes {:?}, {complements} complement(s)",
                def.name, m.hom.edge_map, m.hom.node_map
            );
            out.push(json!({
                "rule": def.name,
                "edges": m.hom.edge_map,
                "nodes": m.hom.node_map,
                "complements": complements,
            }));
        }
    }
    if out.is_empty() {
        text.push_str("no matches\n");
    }
    emit(cli, text, &json!({ "matches": out }))
}

fn step_json(step: &RewriteStep, name: &str) -> Result<Value, CliError> {
    Ok(json!({
        "rule": name,
        "edges": step.matching.hom.edge_map,
        "nodes": step.matching.hom.node_map,
        "term": term_of(&step.result)?,
        "result": doc(&step.result),
    }))
}

/// Steps of a leftmost rewrite sequence, stopping at a normal form.
fn leftmost_trace(rules: &[RewriteRule], host: &Cospan, max_steps: usize) -> Result<Vec<RewriteStep>, DpoError> {
    let mut trace = Vec::new();
    let mut current = host.clone();
    loop {
        let Some(step) = rewrite_all(rules, &current)?.into_iter().next() else {
            return Ok(trace);
        };
        if trace.len() == max_steps {
            return Err(DpoError::StepBudgetExhausted {
                steps: max_steps,
                frontier: vec![current],
            });
        }
        current = step.result.clone();
        trace.push(step);
    }
}

#[allow(clippy::too_many_arguments)]
fn rewrite(
    cli: &Cli,
    rules: &Path,
    host: &Path,
    sig: Option<&Path>,
    strategy: StrategyArg,
    max_steps: usize,
    all: bool,
    dot_dir: Option<&Path>,
) -> Result<(), CliError> {
    let inputs = load_rewriting(rules, host, sig)?;
    let host = &inputs.host.cospan;
    let names: Vec<&str> = inputs.rules.iter().map(|(d, _)| d.name.as_str()).collect();
    let rules: Vec<RewriteRule> = inputs.rules.iter().map(|(_, r)| r.clone()).collect();

    let (steps, normal) = if all {
        (rewrite_all(&rules, host)?, None)
    } else {
        match strategy {
            StrategyArg::Leftmost => {
                let trace = leftmost_trace(&rules, host, max_steps)?;
                let last = trace.last().map_or_else(|| host.clone(), |s| s.result.clone());
                (trace, Some(vec![last]))
            }
            StrategyArg::Bfs => (
                rewrite_all(&rules, host)?,
                Some(normalize(&rules, host, Strategy::ExhaustiveBfs, max_steps)?),
            ),
        }
    };

    let mut text = format!("{} step(s)\n", steps.len());
    let mut steps_json = Vec::new();
    let mut drawings: Vec<(PathBuf, String)> = Vec::new();
    for (i, step) in steps.iter().enumerate() {
        let _ = writeln!(
            text,
            "step {i}: {} at edges {:?} => {}",
            names[step.rule],
            step.matching.hom.edge_map,
            term_of(&step.result)?
        );
        steps_json.push(step_json(step, names[step.rule])?);
        if let Some(dir) = dot_dir {
            let name = format!("step_{i:03}");
            drawings.push((dir.join(format!("{name}.dot")), cospan_to_dot(&step.result, &name)));
        }
    }
    let mut structured = json!({ "steps": steps_json });
    if let Some(normal) = &normal {
        let _ = writeln!(text, "{} normal form(s)", normal.len());
        let mut forms = Vec::new();
        for (i, c) in normal.iter().enumerate() {
            let t = term_of(c)?;
            let _ = writeln!(text, "normal form {i}: {t}");
            forms.push(json!({ "term": t, "result": doc(c) }));
            if let Some(dir) = dot_dir {
                let name = format!("normal_{i:03}");
                drawings.push((dir.join(format!("{name}.dot")), cospan_to_dot(c, &name)));
            }
        }
        structured["normal_forms"] = Value::Array(forms);
    }
    if let Some(dir) = dot_dir {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        for (path, dot) in &drawings {
            files::write_atomic(path, dot)?;
        }
    }
    emit(cli, text, &structured)
}

fn oracle_compare(
    cli: &Cli,
    rules: &Path,
    host: &Path,
    sig: Option<&Path>,
    bound: Option<usize>,
) -> Result<(), CliError> {
    let inputs = load_rewriting(rules, host, sig)?;
    let Some(term) = &inputs.host.term else {
        return Err(CliError::usage("oracle-compare needs a host given as a term"));
    };
    let bound = bound.unwrap_or(term.size() + 6);
    let sig = &inputs.sig;
    let host = &inputs.host.cospan;

    let mut text = String::new();
    let mut out = Vec::new();
    let mut differing = 0;
    for (def, rule) in &inputs.rules {
        let dpo: Vec<Cospan> = rewrite_all(std::slice::from_ref(rule), host)?
            .into_iter()
            .map(|s| s.result)
            .collect();
        let found = enumerate_rewrites_bruteforce(&def.lhs, &def.rhs, term, sig, bound)?;
        let oracle: Vec<Cospan> = found.iter().map(|t| eval_term(t, sig)).collect::<Result<_, _>>()?;
        let dpo_terms: Vec<String> = dpo.iter().map(term_of).collect::<Result<_, _>>()?;
        let oracle_terms: Vec<String> = found.iter().map(pretty_print).collect();
        let only_dpo: Vec<&String> = dpo
            .iter()
            .zip(&dpo_terms)
            .filter(|(c, _)| !oracle.iter().any(|o| o.iso_equal(c)))
            .map(|(_, t)| t)
            .collect();
        let only_oracle: Vec<&String> = oracle
            .iter()
            .zip(&oracle_terms)
            .filter(|(o, _)| !dpo.iter().any(|c| c.iso_equal(o)))
            .map(|(_, t)| t)
            .collect();
        differing += only_dpo.len() + only_oracle.len();

        let _ = writeln!(
            text,
            "rule {}: {} by rewriting, {} by the oracle, {} in the difference",
            def.name,
            dpo.len(),
            oracle.len(),
            only_dpo.len() + only_oracle.len()
        );
        for (label, list) in [("rewriting", &dpo_terms), ("oracle", &oracle_terms)] {
            for t in list {
                let _ = writeln!(text, "  {label}: {t}");
            }
        }
        for t in &only_dpo {
            let _ = writeln!(text, "  only rewriting: {t}");
        }
        for t in &only_oracle {
            let _ = writeln!(text, "  only oracle: {t}");
        }
        out.push(json!({
            "rule": def.name,
            "rewriting": dpo_terms,
            "oracle": oracle_terms,
            "only_rewriting": only_dpo,
            "only_oracle": only_oracle,
        }));
    }
    emit(cli, text, &json!({ "bound": bound, "rules": out }))?;
    if differing > 0 {
        return Err(CliError::domain(
            "RewriteSetsDiffer",
            format!("{differing} result(s) found by only one side"),
        ));
    }
    Ok(())
}

fn export(
    cli: &Cli,
    term: Option<&str>,
    term_file: Option<&Path>,
    cospan: Option<&Path>,
    graph: Option<&Path>,
    sig: Option<&Path>,
) -> Result<(), CliError> {
    let dot = match graph {
        Some(path) => hypergraph_to_dot(&files::graph_file(path)?, "graph"),
        None => {
            let input = Diagram {
                term: term.map(str::to_string),
                term_file: term_file.map(Path::to_path_buf),
                cospan: cospan.map(Path::to_path_buf),
            };
            cospan_to_dot(&load(&input, sig)?.1, "diagram")
        }
    };
    emit(cli, dot.clone(), &json!({ "dot": dot }))
}

use std::fs;
use std::io::Write;
use std::path::Path;

use cmonrw::doc::{parse_cospan, parse_cospan_over, parse_graph};
use cmonrw::sigterm::{parse_term, strip_comments};
use cmonrw::translate::eval_term;
use cmonrw::{Cospan, Hypergraph, Signature, Term};

use crate::error::CliError;

pub fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// Writes `contents` to a sibling temporary file, then renames it over
/// `path`.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(path, e))?;
    tmp.write_all(contents.as_bytes())
        .and_then(|_| tmp.as_file().sync_all())
        .map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

pub fn signature(path: Option<&Path>) -> Result<Signature, CliError> {
    match path {
        None => Ok(Signature::new()),
        Some(p) => Signature::parse(&read(p)?).map_err(|e| CliError::from(e).at(p)),
    }
}

pub fn term_text(src: &str, sig: &Signature) -> Result<Term, CliError> {
    Ok(parse_term(&strip_comments(src), sig)?)
}

pub fn term_file(path: &Path, sig: &Signature) -> Result<Term, CliError> {
    term_text(&read(path)?, sig).map_err(|e| e.at(path))
}

pub fn cospan_file(path: &Path, sig: Option<&Signature>) -> Result<Cospan, CliError> {
    let src = read(path)?;
    let parsed = match sig {
        Some(sig) => parse_cospan_over(&src, sig),
        None => parse_cospan(&src),
    };
    parsed.map_err(|e| CliError::from(e).at(path))
}

pub fn graph_file(path: &Path) -> Result<Hypergraph, CliError> {
    parse_graph(&read(path)?).map_err(|e| CliError::from(e).at(path))
}

/// A host diagram read from a file holding either a cospan document or a
/// term.
pub struct Host {
    pub term: Option<Term>,
    pub cospan: Cospan,
}

pub fn host_file(path: &Path, sig: &Signature) -> Result<Host, CliError> {
    let src = read(path)?;
    let at = |e: CliError| e.at(path);
    if src.trim_start().starts_with('{') {
        let cospan = parse_cospan_over(&src, sig).map_err(|e| at(e.into()))?;
        Ok(Host { term: None, cospan })
    } else {
        let term = term_text(&src, sig).map_err(at)?;
        let cospan = eval_term(&term, sig).map_err(|e| at(e.into()))?;
        Ok(Host {
            term: Some(term),
            cospan,
        })
    }
}

//! Rewriting of string diagrams modulo commutative monoid structure, through
//! right-monogamous acyclic cospans of labelled hypergraphs.

pub mod cospan;
pub mod decompose;
pub mod doc;
pub mod dot;
pub mod dpo;
pub mod hypergraph;
pub mod oracle;
pub mod random;
pub mod sigterm;
pub mod translate;

pub use cospan::{Cospan, FinFunction};
pub use hypergraph::{Edge, EdgeId, Homomorphism, Hypergraph, NodeId};
pub use sigterm::{Signature, Term};

/// Any error raised by the library, with a stable machine-readable code.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Term(#[from] sigterm::SigTermError),
    #[error(transparent)]
    Hypergraph(#[from] hypergraph::HypergraphError),
    #[error(transparent)]
    Cospan(#[from] cospan::CospanError),
    #[error(transparent)]
    Translate(#[from] translate::TranslateError),
    #[error(transparent)]
    Decompose(#[from] decompose::DecomposeError),
    #[error(transparent)]
    Dpo(#[from] dpo::DpoError),
    #[error(transparent)]
    Oracle(#[from] oracle::OracleError),
    #[error(transparent)]
    Doc(#[from] doc::DocError),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::Term(e) => e.code(),
            Error::Hypergraph(e) => e.code(),
            Error::Cospan(e) => e.code(),
            Error::Translate(e) => e.code(),
            Error::Decompose(e) => e.code(),
            Error::Dpo(e) => e.code(),
            Error::Oracle(e) => e.code(),
            Error::Doc(e) => e.code(),
        }
    }

    /// `(line, column)` of the offending input, when known.
    pub fn location(&self) -> Option<(usize, usize)> {
        match self {
            Error::Term(e) | Error::Translate(translate::TranslateError::Term(e)) => e.location(),
            Error::Dpo(dpo::DpoError::Term(e)) | Error::Oracle(oracle::OracleError::Term(e)) => e.location(),
            Error::Doc(e) => e.location(),
            _ => None,
        }
    }
}

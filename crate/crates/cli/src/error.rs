use std::path::{Path, PathBuf};

use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Usage,
    Io,
    Domain,
}

/// A failure reported to the caller as a JSON record on stderr.
#[derive(Debug)]
pub struct CliError {
    pub kind: Kind,
    pub code: String,
    pub message: String,
    pub location: Option<(usize, usize)>,
    pub path: Option<PathBuf>,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            kind: Kind::Usage,
            code: "Usage".into(),
            message: message.into(),
            location: None,
            path: None,
        }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError {
            kind: Kind::Io,
            code: "IoFailure".into(),
            message: err.to_string(),
            location: None,
            path: Some(path.to_path_buf()),
        }
    }

    pub fn domain(code: &str, message: impl Into<String>) -> Self {
        CliError {
            kind: Kind::Domain,
            code: code.into(),
            message: message.into(),
            location: None,
            path: None,
        }
    }

    pub fn at(mut self, path: &Path) -> Self {
        self.path.get_or_insert_with(|| path.to_path_buf());
        self
    }

    pub fn exit_code(&self) -> u8 {
        match self.kind {
            Kind::Usage => 2,
            Kind::Io | Kind::Domain => 1,
        }
    }

    pub fn record(&self) -> Value {
        json!({
            "code": self.code,
            "message": self.message,
            "location": self.location.map(|(line, column)| json!({ "line": line, "column": column })),
            "path": self.path.as_ref().map(|p| p.display().to_string()),
        })
    }
}

impl From<cmonrw::Error> for CliError {
    fn from(e: cmonrw::Error) -> Self {
        CliError {
            kind: Kind::Domain,
            code: e.code().into(),
            message: e.to_string(),
            location: e.location(),
            path: None,
        }
    }
}

macro_rules! from_library {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                cmonrw::Error::from(e).into()
            }
        }
    )*};
}

from_library!(
    cmonrw::sigterm::SigTermError,
    cmonrw::cospan::CospanError,
    cmonrw::translate::TranslateError,
    cmonrw::decompose::DecomposeError,
    cmonrw::dpo::DpoError,
    cmonrw::oracle::OracleError,
    cmonrw::doc::DocError
);

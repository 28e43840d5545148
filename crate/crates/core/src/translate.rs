//! Interpretation of terms as right-monogamous acyclic cospans.

use thiserror::Error;

use crate::cospan::{function_to_cospan, Cospan, FinFunction};
use crate::hypergraph::Hypergraph;
use crate::sigterm::{SigTermError, Signature, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error(transparent)]
    Term(#[from] SigTermError),
    #[error("term contains generator `{0}`")]
    ContainsGenerator(String),
}

impl TranslateError {
    pub fn code(&self) -> &'static str {
        match self {
            TranslateError::Term(e) => e.code(),
            TranslateError::ContainsGenerator(_) => "ContainsGenerator",
        }
    }
}

/// One hyperedge with its sources on the left and targets on the right.
pub fn generator_cospan(name: &str, sig: &Signature) -> Result<Cospan, TranslateError> {
    let a = sig.arity(name).ok_or_else(|| SigTermError::UnknownGenerator {
        name: name.to_string(),
    })?;
    let (m, n) = (a.inputs, a.outputs);
    let mut g = Hypergraph::discrete(m + n);
    g.add_edge(name, (0..m).collect(), (m..m + n).collect());
    Ok(Cospan {
        carrier: g,
        left: (0..m).collect(),
        right: (m..m + n).collect(),
    })
}

pub fn mu_function() -> FinFunction {
    FinFunction {
        dom: 2,
        cod: 1,
        table: vec![0, 0],
    }
}

pub fn eta_function() -> FinFunction {
    FinFunction {
        dom: 0,
        cod: 1,
        table: vec![],
    }
}

fn eval(t: &Term, sig: &Signature) -> Result<Cospan, TranslateError> {
    Ok(match t {
        Term::Gen(name) => generator_cospan(name, sig)?,
        Term::Id(n) => Cospan::identity(*n),
        Term::Sym(m, n) => Cospan::symmetry(*m, *n),
        Term::Mu => function_to_cospan(&mu_function()),
        Term::Eta => function_to_cospan(&eta_function()),
        Term::Seq(a, b) => {
            let (a, b) = (eval(a, sig)?, eval(b, sig)?);
            a.compose(&b).map_err(|e| {
                SigTermError::TypeMismatch(e.to_string())
            })?
        }
        Term::Par(a, b) => eval(a, sig)?.tensor(&eval(b, sig)?),
    })
}

/// Evaluates a well-typed term bottom-up.
pub fn eval_term(t: &Term, sig: &Signature) -> Result<Cospan, TranslateError> {
    t.typecheck(sig)?;
    eval(t, sig)
}

/// The function a generator-free term denotes.
pub fn cmon_term_to_function(t: &Term) -> Result<FinFunction, TranslateError> {
    Ok(match t {
        Term::Gen(name) => return Err(TranslateError::ContainsGenerator(name.clone())),
        Term::Id(n) => FinFunction::identity(*n),
        Term::Sym(m, n) => FinFunction {
            dom: m + n,
            cod: m + n,
            table: (0..m + n).map(|i| if i < *m { i + n } else { i - m }).collect(),
        },
        Term::Mu => mu_function(),
        Term::Eta => eta_function(),
        Term::Seq(a, b) => {
            let (f, g) = (cmon_term_to_function(a)?, cmon_term_to_function(b)?);
            if f.cod != g.dom {
                return Err(SigTermError::TypeMismatch(format!(
                    "cannot compose {a} : {} -> {} with {b} : {} -> {}",
                    f.dom, f.cod, g.dom, g.cod
                ))
                .into());
            }
            f.then(&g)
        }
        Term::Par(a, b) => {
            let (f, g) = (cmon_term_to_function(a)?, cmon_term_to_function(b)?);
            FinFunction {
                dom: f.dom + g.dom,
                cod: f.cod + g.cod,
                table: f
                    .table
                    .iter()
                    .copied()
                    .chain(g.table.iter().map(|x| x + f.cod))
                    .collect(),
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cospan::identity;

    fn sig() -> Signature {
        Signature::new().with("f", 1, 1).with("p", 0, 2).with("g", 2, 1)
    }

    #[test]
    fn generator_cospans() {
        let s = sig();
        let f = generator_cospan("f", &s).unwrap();
        assert_eq!(f.carrier.node_count, 2);
        assert_eq!((f.left.clone(), f.right.clone()), (vec![0], vec![1]));
        let p = generator_cospan("p", &s).unwrap();
        assert!(p.carrier.edges[0].sources.is_empty());
        assert_eq!(p.carrier.node_count, 2);
        assert!(generator_cospan("g", &s).unwrap().is_monogamous());
        assert!(matches!(
            generator_cospan("h", &s),
            Err(TranslateError::Term(SigTermError::UnknownGenerator { .. }))
        ));
    }

    #[test]
    fn evaluation_examples() {
        let s = sig();
        let eta = eval_term(&Term::Eta, &s).unwrap();
        assert_eq!(eta.carrier.node_count, 1);
        assert!(eta.left.is_empty());
        assert_eq!(eta.right, vec![0]);
        let comm = eval_term(&Term::seq(Term::Sym(1, 1), Term::Mu), &s).unwrap();
        assert!(comm.iso_equal(&eval_term(&Term::Mu, &s).unwrap()));
        let unit = eval_term(&Term::seq(Term::par(Term::Id(1), Term::Eta), Term::Mu), &s).unwrap();
        assert!(unit.iso_equal(&identity(1)));
        assert!(eval_term(&Term::seq(Term::Mu, Term::Mu), &s).is_err());
    }

    #[test]
    fn function_semantics() {
        assert_eq!(cmon_term_to_function(&Term::Mu).unwrap().table, vec![0, 0]);
        assert_eq!(cmon_term_to_function(&Term::Id(3)).unwrap(), FinFunction::identity(3));
        let t = Term::seq(Term::par(Term::Mu, Term::Id(1)), Term::Mu);
        let f = cmon_term_to_function(&t).unwrap();
        assert_eq!((f.dom, f.cod, f.table), (3, 1, vec![0, 0, 0]));
        assert_eq!(
            cmon_term_to_function(&Term::gen("f")),
            Err(TranslateError::ContainsGenerator("f".into()))
        );
    }
}

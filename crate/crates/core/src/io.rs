//! JSON documents for automorphisms (`.aut`), words (`.word`) and
//! certificates (`.cert`). Every document carries a `format_version`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{serde_int, IntMatrix};
use crate::model::{
    AutError, BlockSpec, Certificate, Environment, GroupWord, RepAut, FORMAT_VERSION,
};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid automorphism: {0}")]
    Validation(#[from] AutError),
    #[error("unsupported format version {found} (expected {FORMAT_VERSION})")]
    Version { found: u32 },
}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        let message = e.to_string();
        // serde_json appends the position to the message; keep only the cause
        let message = match message.rfind(" at line ") {
            Some(i) => message[..i].to_string(),
            None => message,
        };
        FormatError::Syntax {
            line: e.line(),
            column: e.column(),
            message,
        }
    }
}

fn one() -> BigInt {
    BigInt::one()
}

fn is_one(v: &BigInt) -> bool {
    v.is_one()
}

/// Wire form of [`RepAut`]. Inverses are not stored; they are recomputed
/// (and thereby re-verified) when a document is read.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum AutRecord {
    Finitary {
        support: Vec<usize>,
        matrix: IntMatrix,
    },
    Uniform {
        d: usize,
        block: IntMatrix,
    },
    EventuallyUniform {
        window: usize,
        window_matrix: IntMatrix,
        d: usize,
        block: IntMatrix,
    },
    Graded {
        prefix: Vec<u64>,
        excluded: Vec<u64>,
        #[serde(with = "serde_int", default = "one", skip_serializing_if = "is_one")]
        scale: BigInt,
        #[serde(default = "empty", skip_serializing_if = "is_empty")]
        head: IntMatrix,
    },
}

fn empty() -> IntMatrix {
    IntMatrix::zeros(0, 0)
}

fn is_empty(m: &IntMatrix) -> bool {
    m.rows() == 0
}

impl From<RepAut> for AutRecord {
    fn from(a: RepAut) -> Self {
        match a {
            RepAut::Finitary(f) => AutRecord::Finitary {
                support: f.support().to_vec(),
                matrix: f.matrix().clone(),
            },
            RepAut::EventuallyUniform(e) if e.window() == 0 => AutRecord::Uniform {
                d: e.d(),
                block: e.block().block().clone(),
            },
            RepAut::EventuallyUniform(e) => AutRecord::EventuallyUniform {
                window: e.window(),
                window_matrix: e.head().clone(),
                d: e.d(),
                block: e.block().block().clone(),
            },
            RepAut::Graded(g) => AutRecord::Graded {
                prefix: g.prefix().to_vec(),
                excluded: g.excluded().iter().copied().collect(),
                scale: g.scale().clone(),
                head: g.head().clone(),
            },
        }
    }
}

impl TryFrom<AutRecord> for RepAut {
    type Error = AutError;

    fn try_from(r: AutRecord) -> Result<Self, AutError> {
        let dim = |what: &str, m: &IntMatrix, n: usize| {
            if m.rows() != n || m.cols() != n {
                Err(AutError::Argument(format!(
                    "{what} must be {n}x{n}, found {}x{}",
                    m.rows(),
                    m.cols()
                )))
            } else {
                Ok(())
            }
        };
        match r {
            AutRecord::Finitary { support, matrix } => RepAut::finitary(support, matrix),
            AutRecord::Uniform { d, block } => {
                dim("block", &block, d)?;
                Ok(RepAut::uniform_spec(BlockSpec::new(block)?))
            }
            AutRecord::EventuallyUniform {
                window,
                window_matrix,
                d,
                block,
            } => {
                dim("window matrix", &window_matrix, window)?;
                dim("block", &block, d)?;
                RepAut::eventually_uniform(window_matrix, block)
            }
            AutRecord::Graded {
                prefix,
                excluded,
                scale,
                head,
            } => {
                let set: BTreeSet<u64> = excluded.iter().copied().collect();
                if set.len() != excluded.len() {
                    return Err(AutError::Argument("excluded primes repeat".into()));
                }
                RepAut::graded_full(head, prefix, set, scale)
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct AutDocument<A> {
    format_version: u32,
    automorphism: A,
}

/// A group word together with the environment that resolves its names.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordDocument {
    pub format_version: u32,
    pub word: GroupWord,
    pub environment: Environment,
}

impl WordDocument {
    pub fn new(word: GroupWord, environment: Environment) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            word,
            environment,
        }
    }
}

fn to_text<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string(v).expect("documents always serialize");
    s.push('\n');
    s
}

fn check_version(found: u32) -> Result<(), FormatError> {
    if found != FORMAT_VERSION {
        return Err(FormatError::Version { found });
    }
    Ok(())
}

pub fn serialize_aut(a: &RepAut) -> String {
    to_text(&AutDocument {
        format_version: FORMAT_VERSION,
        automorphism: AutRecord::from(a.clone()),
    })
}

pub fn parse_aut(text: &str) -> Result<RepAut, FormatError> {
    let doc: AutDocument<AutRecord> = serde_json::from_str(text)?;
    check_version(doc.format_version)?;
    Ok(RepAut::try_from(doc.automorphism)?)
}

pub fn serialize_word(w: &WordDocument) -> String {
    to_text(w)
}

pub fn parse_word(text: &str) -> Result<WordDocument, FormatError> {
    let doc: WordDocument = serde_json::from_str(text)?;
    check_version(doc.format_version)?;
    Ok(doc)
}

pub fn serialize_certificate(c: &Certificate) -> String {
    to_text(c)
}

pub fn parse_certificate(text: &str) -> Result<Certificate, FormatError> {
    let c: Certificate = serde_json::from_str(text)?;
    check_version(c.format_version)?;
    Ok(c)
}

/// Generic JSON writer for report-like values.
pub fn to_json<T: Serialize>(v: &T) -> String {
    to_text(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::mat;

    #[test]
    fn tau_document() {
        let tau = RepAut::uniform(mat(&[[1, 0], [1, 1]])).unwrap();
        let s = serialize_aut(&tau);
        assert_eq!(
            s,
            "{\"format_version\":1,\"automorphism\":{\"variant\":\"uniform\",\"d\":2,\"block\":[[1,0],[1,1]]}}\n"
        );
        assert_eq!(parse_aut(&s).unwrap(), tau);
    }

    #[test]
    fn rejects_singular_block() {
        let s = r#"{"format_version":1,"automorphism":{"variant":"uniform","d":2,"block":[[2,0],[0,1]]}}"#;
        match parse_aut(s) {
            Err(FormatError::Validation(AutError::NotUnimodular { what, det })) => {
                assert_eq!(what, "block");
                assert_eq!(det, BigInt::from(2));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_errors_have_positions() {
        let s = "{\"format_version\":1,\n\"automorphism\":{\"variant\":\"uniform\",\"d\":2,\"block\":[[1,0],[1,]]}}";
        match parse_aut(s) {
            Err(FormatError::Syntax { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        let s = r#"{"format_version":7,"automorphism":{"variant":"uniform","d":1,"block":[[1]]}}"#;
        assert!(matches!(
            parse_aut(s),
            Err(FormatError::Version { found: 7 })
        ));
    }

    #[test]
    fn graded_round_trip() {
        let g = RepAut::graded(vec![2, 3], [7].into()).unwrap();
        let s = serialize_aut(&g);
        assert_eq!(parse_aut(&s).unwrap(), g);
        assert_eq!(serialize_aut(&parse_aut(&s).unwrap()), s);
    }
}

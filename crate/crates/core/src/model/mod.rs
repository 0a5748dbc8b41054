//! Representations of automorphisms of the countable-rank free abelian group,
//! the group-word language over them, and certificates.

mod certificate;
mod rep;
mod word;

pub use certificate::{
    Certificate, Claim, MalformedCertificate, Target, Verification, FORMAT_VERSION,
};
pub use rep::{Alignment, BlockSpec, EventuallyUniform, Finitary, GradedBlock, RepAut};
pub use word::{
    apply_word, evaluate_symbolic, evaluate_word, word_alignment, Environment, GroupWord,
};

use num_bigint::BigInt;
use thiserror::Error;

use crate::linalg::LinalgError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutError {
    #[error("{what} is not unimodular (determinant {det})")]
    NotUnimodular { what: &'static str, det: BigInt },
    #[error("{what} must be square, got {rows}x{cols}")]
    NotSquare {
        what: &'static str,
        rows: usize,
        cols: usize,
    },
    #[error("claimed inverse of the {what} does not check out")]
    BadInverse { what: &'static str },
    #[error("window {requested} is not aligned (need at least {min} and a multiple of {step})")]
    Window {
        requested: usize,
        min: usize,
        step: usize,
    },
    #[error("composition unsupported: {0}; evaluate on a window instead")]
    CompositionUnsupported(String),
    #[error("unresolved name `{0}`")]
    UnresolvedName(String),
    #[error("{0}")]
    Argument(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::word::{apply_word, evaluate_word, word_alignment, Environment, GroupWord};
use super::{AutError, RepAut};
use crate::linalg::serde_int;
use crate::linalg::IntMatrix;

pub const FORMAT_VERSION: u32 = 1;

/// Right-hand side of a window identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Target {
    Automorphism {
        aut: RepAut,
    },
    /// A finite matrix, read as acting by the identity beyond its size.
    Matrix {
        matrix: IntMatrix,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Claim {
    /// The word equals the target on every listed window.
    WindowIdentity { target: Target },
    /// The word has exactly this multiplicative order on every listed window.
    Order { order: u64 },
    /// The word sends `vector` to `image` (both zero-padded to each window).
    ActionOnVector {
        #[serde(with = "serde_int::vec")]
        vector: Vec<BigInt>,
        #[serde(with = "serde_int::vec")]
        image: Vec<BigInt>,
    },
}

/// A claim about a group word, together with everything needed to recheck it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub format_version: u32,
    pub claim: Claim,
    pub word: GroupWord,
    pub environment: Environment,
    pub windows: Vec<usize>,
}

/// Outcome of rechecking a well-formed certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verification {
    pub holds: bool,
    pub report: Vec<String>,
}

/// The certificate cannot be checked at all, as opposed to a claim that is false.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MalformedCertificate {
    #[error("unsupported format version {0}")]
    Version(u32),
    #[error("certificate lists no windows")]
    NoWindows,
    #[error("order must be positive")]
    ZeroOrder,
    #[error("window {window}: {source}")]
    Evaluation { window: usize, source: AutError },
    #[error("vector of length {len} does not fit window {window}")]
    VectorTooLong { len: usize, window: usize },
    #[error("target matrix of size {size} does not fit window {window}")]
    TargetTooLarge { size: usize, window: usize },
    #[error("target: {0}")]
    Target(AutError),
}

impl Certificate {
    pub fn new(
        claim: Claim,
        word: GroupWord,
        environment: Environment,
        windows: Vec<usize>,
    ) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            claim,
            word,
            environment,
            windows,
        }
    }

    /// Window identity checked on the two standard windows of the word and target.
    pub fn window_identity(
        word: GroupWord,
        environment: Environment,
        target: RepAut,
    ) -> Result<Self, AutError> {
        let al = word_alignment(&word, &environment)?.join(target.alignment());
        let windows = al.certificate_windows().to_vec();
        Ok(Self::new(
            Claim::WindowIdentity {
                target: Target::Automorphism { aut: target },
            },
            word,
            environment,
            windows,
        ))
    }

    pub fn order(word: GroupWord, environment: Environment, order: u64) -> Result<Self, AutError> {
        let windows = word_alignment(&word, &environment)?
            .certificate_windows()
            .to_vec();
        Ok(Self::new(
            Claim::Order { order },
            word,
            environment,
            windows,
        ))
    }

    pub fn action(
        word: GroupWord,
        environment: Environment,
        vector: Vec<BigInt>,
        image: Vec<BigInt>,
    ) -> Result<Self, AutError> {
        let al = word_alignment(&word, &environment)?;
        let len = vector.len().max(image.len());
        let first = al.round_up(len.max(2 * al.step));
        let windows = vec![first, first + 2 * al.step];
        Ok(Self::new(
            Claim::ActionOnVector { vector, image },
            word,
            environment,
            windows,
        ))
    }

    /// The automorphism this certificate identifies its word with, if any.
    pub fn target_aut(&self) -> Option<&RepAut> {
        match &self.claim {
            Claim::WindowIdentity {
                target: Target::Automorphism { aut },
            } => Some(aut),
            _ => None,
        }
    }

    /// Rechecks the claim. Pure: depends only on the certificate contents.
    pub fn verify(&self) -> Result<Verification, MalformedCertificate> {
        if self.format_version != FORMAT_VERSION {
            return Err(MalformedCertificate::Version(self.format_version));
        }
        if self.windows.is_empty() {
            return Err(MalformedCertificate::NoWindows);
        }
        let mut report = Vec::new();
        let mut holds = true;
        for &n in &self.windows {
            let eval_err = |source| MalformedCertificate::Evaluation { window: n, source };
            let outcome = match &self.claim {
                Claim::WindowIdentity { target } => {
                    let lhs = evaluate_word(&self.word, &self.environment, n).map_err(eval_err)?;
                    let rhs = match target {
                        Target::Automorphism { aut } => {
                            aut.window_matrix(n).map_err(MalformedCertificate::Target)?
                        }
                        Target::Matrix { matrix } => {
                            if matrix.rows() > n || !matrix.is_square() {
                                return Err(MalformedCertificate::TargetTooLarge {
                                    size: matrix.rows(),
                                    window: n,
                                });
                            }
                            let mut full = IntMatrix::identity(n);
                            full.set_block(0, 0, matrix);
                            full
                        }
                    };
                    match lhs.first_difference(&rhs) {
                        None => Ok(format!("window {n}: word equals target")),
                        Some((i, j)) => Err(format!(
                            "window {n}: entry ({i}, {j}) is {} in the word but {} in the target",
                            lhs.get(i, j),
                            rhs.get(i, j)
                        )),
                    }
                }
                Claim::Order { order } => {
                    if *order == 0 {
                        return Err(MalformedCertificate::ZeroOrder);
                    }
                    let m = evaluate_word(&self.word, &self.environment, n).map_err(eval_err)?;
                    check_order(&m, *order, n)
                }
                Claim::ActionOnVector { vector, image } => {
                    let len = vector.len().max(image.len());
                    if len > n {
                        return Err(MalformedCertificate::VectorTooLong { len, window: n });
                    }
                    let pad = |v: &[BigInt]| {
                        let mut out = v.to_vec();
                        out.resize(n, BigInt::zero());
                        out
                    };
                    let got = apply_word(&self.word, &self.environment, n, &pad(vector))
                        .map_err(eval_err)?;
                    let want = pad(image);
                    match (0..n).find(|&i| got[i] != want[i]) {
                        None => Ok(format!("window {n}: image matches")),
                        Some(i) => Err(format!(
                            "window {n}: coordinate {i} of the image is {} but the claim says {}",
                            got[i], want[i]
                        )),
                    }
                }
            };
            match outcome {
                Ok(line) => report.push(line),
                Err(line) => {
                    holds = false;
                    report.push(line);
                    break;
                }
            }
        }
        Ok(Verification { holds, report })
    }
}

fn check_order(m: &IntMatrix, order: u64, n: usize) -> Result<String, String> {
    let full = m.pow(order).expect("square window");
    if let Some((i, j)) = full.first_difference(&IntMatrix::identity(n)) {
        return Err(format!(
            "window {n}: the {order}-th power differs from the identity at ({i}, {j})"
        ));
    }
    for j in 1..order {
        if order.is_multiple_of(j) && m.pow(j).expect("square window").is_identity() {
            return Err(format!(
                "window {n}: already the {j}-th power is the identity"
            ));
        }
    }
    Ok(format!("window {n}: order is exactly {order}"))
}

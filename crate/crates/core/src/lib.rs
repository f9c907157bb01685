//! Topic models over bags of neural-network activations.
//!
//! Images are turned into sparse documents whose "words" are either fired
//! convolutional units (after thresholding) or the top predicted object
//! classes. Two models are provided on top of the same [`Corpus`]:
//!
//! - [`catmix`]: a mixture of categoricals with one topic per document,
//!   fitted by expectation-maximization.
//! - [`lda`]: latent Dirichlet allocation with per-token topic assignments,
//!   fitted by collapsed Gibbs sampling.
//!
//! [`eval`] compares the resulting hard topic assignments against gold
//! labels (contingency tables, purity, NMI) and reports top features per
//! topic.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, reports and
//! the command-line tool live in the `acttopic` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod catmix;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod lda;
pub mod math;
pub mod matrix;

pub use corpus::{Corpus, FeatureDoc, RawActivationRecord, Token, Vocabulary};
pub use error::{Error, Result};
pub use matrix::Matrix;

/// Deterministic random stream used by every seeded operation.
pub type SeededRng = rand_chacha::ChaCha8Rng;

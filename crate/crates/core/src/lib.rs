//! Sparse and private distributed matrix-vector multiplication over GF(q).
//!
//! A chief node owns a private sparse matrix `A` and a public `x` and wants
//! `y = A x` computed by two non-communicating clusters of workers. `A` is
//! masked with a dependent sparse one-time pad `R`: the fully untrusted
//! cluster multiplies row blocks of `A + R` (which leak nothing when the pad
//! is drawn with equal conditional probabilities), and the partly trusted
//! cluster multiplies row blocks of `R` (which leak a bounded amount to up
//! to `z` colluding workers). Denser pads leak less but destroy the sparsity
//! that makes the worker tasks cheap; the [`analysis`] module quantifies the
//! trade-off and solves for the sparsest admissible pad under a leakage
//! budget. Cyclic layered task replication ([`scheme`]) tolerates slow and
//! silent workers with exact recovery thresholds, and [`sim`] measures the
//! resulting time-to-decode under a simple cost model.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod gf;
pub mod matrix;
pub mod pad;
pub mod scheme;
pub mod sim;

pub use error::{Error, Result};

//! The dependent sparse one-time pad.
//!
//! A sparse matrix `A` is masked as the pair `(B1, B2) = (R, A + R)` where the
//! pad `R` is drawn entry-wise conditionally on `A`:
//!
//! - where `A[i,j] = 0`: `R[i,j] = 0` with probability `p_z0`, otherwise
//!   uniform over the q-1 nonzero values;
//! - where `A[i,j] = a != 0`: `R[i,j] = -a` with probability `p_nz0` (so the
//!   sum cancels to zero), otherwise uniform over the other q-1 values.
//!
//! `p_z0 = p_nz0 = 1/q` reduces to the classical uniform one-time pad
//! (perfect privacy, no sparsity); larger values keep `R` and `A + R`
//! sparse at the price of leaking information about `A` through `R`.
//! The closed-form sparsity/leakage consequences live in [`crate::analysis`].
//!
//! Entries of `R` depend only on the co-located entry of `A`, and each row is
//! generated from its own derived RNG stream (stream index = row), so output
//! is seed-deterministic no matter how rows are scheduled.

use rand::Rng;

use crate::error::{Error, Result};
use crate::gf::{fork_base, stream_rng, FieldElement, FieldSpec, RngState};
use crate::matrix::SparseMatrix;

/// The two conditional pad probabilities together with the field.
///
/// Both probabilities live in the closed interval [0, 1]; the endpoints are
/// admitted (p = 1 makes both branches deterministic, which the trade-off
/// boundary at full relative leakage uses).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PadParams {
    p_z0: f64,
    p_nz0: f64,
    field: FieldSpec,
}

impl PadParams {
    pub fn new(p_z0: f64, p_nz0: f64, field: FieldSpec) -> Result<Self> {
        for (name, p) in [("p_z0", p_z0), ("p_nz0", p_nz0)] {
            if !(0.0..=1.0).contains(&p) || p.is_nan() {
                return Err(Error::invalid(format!("{name} = {p} outside [0, 1]")));
            }
        }
        Ok(PadParams { p_z0, p_nz0, field })
    }

    /// The `p_z0 = p_nz0 = p` regime in which `A + R` leaks nothing.
    pub fn diagonal(p: f64, field: FieldSpec) -> Result<Self> {
        PadParams::new(p, p, field)
    }

    /// Probability that a zero entry of `A` stays zero in `R`.
    pub fn p_z0(&self) -> f64 {
        self.p_z0
    }

    /// Probability that a nonzero entry of `A` is cancelled by `R`.
    pub fn p_nz0(&self) -> f64 {
        self.p_nz0
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }
}

/// I.i.d. source model for `A`: zero with probability `s`, each nonzero
/// symbol equiprobable with mass `(1-s)/(q-1)`. Requires `s > 1/q` (sparser
/// than uniform).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceModel {
    sparsity: f64,
    field: FieldSpec,
}

impl SourceModel {
    pub fn new(sparsity: f64, field: FieldSpec) -> Result<Self> {
        let q_inv = 1.0 / field.q() as f64;
        if !(sparsity > q_inv && sparsity <= 1.0) {
            return Err(Error::invalid(format!(
                "source sparsity {sparsity} must lie in (1/q, 1] = ({q_inv}, 1]"
            )));
        }
        Ok(SourceModel { sparsity, field })
    }

    pub fn sparsity(&self) -> f64 {
        self.sparsity
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }
}

/// Sample an m x n matrix from the source model.
pub fn sample_source(
    model: &SourceModel,
    rows: usize,
    cols: usize,
    rng: &mut RngState,
) -> Result<SparseMatrix> {
    let field = model.field();
    let s = model.sparsity();
    let base = fork_base(rng);
    SparseMatrix::from_row_major(field, rows, cols, |r, buf| {
        let mut row_rng = stream_rng(base, r as u64);
        for c in 0..cols {
            if row_rng.gen::<f64>() >= s {
                buf.push((c as u32, field.sample_uniform(true, &mut row_rng)));
            }
        }
    })
}

/// Draw the pad `R` for `A` from the two conditional distributions.
pub fn generate_pad(a: &SparseMatrix, params: &PadParams, rng: &mut RngState) -> Result<SparseMatrix> {
    let field = params.field();
    if a.field() != field {
        return Err(Error::FieldMismatch(a.field().q(), field.q()));
    }
    let base = fork_base(rng);
    let (p_z0, p_nz0) = (params.p_z0(), params.p_nz0());
    SparseMatrix::from_row_major(field, a.rows(), a.cols(), |r, buf| {
        let mut row_rng = stream_rng(base, r as u64);
        let mut entries = a.iter_row(r).peekable();
        for c in 0..a.cols() {
            let a_val = match entries.peek() {
                Some(&(ec, ev)) if ec == c => {
                    entries.next();
                    ev
                }
                _ => FieldElement::ZERO,
            };
            let r_val = if a_val.is_zero() {
                if row_rng.gen::<f64>() < p_z0 {
                    FieldElement::ZERO
                } else {
                    field.sample_excluding(FieldElement::ZERO, &mut row_rng)
                }
            } else {
                let cancel = field.neg(a_val);
                if row_rng.gen::<f64>() < p_nz0 {
                    cancel
                } else {
                    field.sample_excluding(cancel, &mut row_rng)
                }
            };
            if !r_val.is_zero() {
                buf.push((c as u32, r_val));
            }
        }
    })
}

/// Encode `A` into the pair `(B1, B2) = (R, A + R)`.
pub fn encode(
    a: &SparseMatrix,
    params: &PadParams,
    rng: &mut RngState,
) -> Result<(SparseMatrix, SparseMatrix)> {
    let pad = generate_pad(a, params, rng)?;
    let padded = a.add_entrywise(&pad)?;
    Ok((pad, padded))
}

/// Recover `A = B2 - B1` entry-wise.
pub fn decode_pair(b1: &SparseMatrix, b2: &SparseMatrix) -> Result<SparseMatrix> {
    b2.sub_entrywise(b1)
}

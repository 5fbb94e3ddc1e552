//! Property tests for the invariants that hold for every input: pad round
//! trips, matvec linearity, split/stack identity, and text-format stability.

use proptest::prelude::*;

use sparsepad::gf::{rng_from_seed, FieldSpec};
use sparsepad::matrix::{DenseMatrix, SparseMatrix};
use sparsepad::pad::{decode_pair, encode, sample_source, PadParams, SourceModel};

fn field_of(index: usize) -> FieldSpec {
    let qs = [2u32, 3, 7, 11, 256];
    FieldSpec::new(qs[index % qs.len()]).unwrap()
}

fn random_sparse(field: FieldSpec, rows: usize, cols: usize, seed: u64) -> SparseMatrix {
    let q_inv = 1.0 / field.q() as f64;
    let model = SourceModel::new((0.6f64).max(q_inv + 0.1), field).unwrap();
    let mut rng = rng_from_seed(seed);
    sample_source(&model, rows, cols, &mut rng).unwrap()
}

fn random_dense(field: FieldSpec, rows: usize, cols: usize, seed: u64) -> DenseMatrix {
    let mut rng = rng_from_seed(seed);
    let mut m = DenseMatrix::zero(field, rows, cols).unwrap();
    for r in 0..rows {
        for c in 0..cols {
            m.set(r, c, field.sample_uniform(false, &mut rng));
        }
    }
    m
}

proptest! {
    #[test]
    fn pad_round_trip_recovers_the_source(
        qi in 0usize..5,
        rows in 1usize..20,
        cols in 1usize..20,
        p_z0 in 0.0f64..=1.0,
        p_nz0 in 0.0f64..=1.0,
        seed in any::<u64>(),
    ) {
        let field = field_of(qi);
        let a = random_sparse(field, rows, cols, seed);
        let params = PadParams::new(p_z0, p_nz0, field).unwrap();
        let mut rng = rng_from_seed(seed ^ 0xABCD);
        let (b1, b2) = encode(&a, &params, &mut rng).unwrap();
        prop_assert_eq!(decode_pair(&b1, &b2).unwrap(), a);
        // stored entries are never zero
        prop_assert!(b1.iter().all(|(_, _, v)| !v.is_zero()));
        prop_assert!(b2.iter().all(|(_, _, v)| !v.is_zero()));
    }

    #[test]
    fn matvec_is_linear(
        qi in 0usize..5,
        rows in 1usize..16,
        cols in 1usize..16,
        k in 1usize..4,
        seed in any::<u64>(),
    ) {
        let field = field_of(qi);
        let a = random_sparse(field, rows, cols, seed);
        let b = random_sparse(field, rows, cols, seed.wrapping_add(1));
        let x = random_dense(field, cols, k, seed.wrapping_add(2));
        let lhs = a.add_entrywise(&b).unwrap().matvec(&x).unwrap();
        let rhs = a.matvec(&x).unwrap().add(&b.matvec(&x).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn split_then_stack_is_identity_up_to_padding(
        qi in 0usize..5,
        rows in 1usize..30,
        cols in 1usize..12,
        parts in 1usize..8,
        seed in any::<u64>(),
    ) {
        let field = field_of(qi);
        let a = random_sparse(field, rows, cols, seed);
        let blocks = a.split_rows(parts).unwrap();
        prop_assert_eq!(blocks.len(), parts);
        let stacked = SparseMatrix::vstack(&blocks).unwrap();
        prop_assert_eq!(stacked.truncate_rows(rows).unwrap(), a);
    }

    #[test]
    fn sparse_text_round_trip(
        qi in 0usize..5,
        rows in 1usize..15,
        cols in 1usize..15,
        seed in any::<u64>(),
    ) {
        let field = field_of(qi);
        let a = random_sparse(field, rows, cols, seed);
        let text = a.to_text();
        let parsed = SparseMatrix::from_text(&text).unwrap();
        prop_assert_eq!(&parsed, &a);
        prop_assert_eq!(parsed.to_text(), text);
    }

    #[test]
    fn dense_text_round_trip(
        qi in 0usize..5,
        rows in 1usize..10,
        cols in 1usize..10,
        seed in any::<u64>(),
    ) {
        let field = field_of(qi);
        let x = random_dense(field, rows, cols, seed);
        let text = x.to_text();
        let parsed = DenseMatrix::from_text(&text).unwrap();
        prop_assert_eq!(&parsed, &x);
        prop_assert_eq!(parsed.to_text(), text);
    }
}

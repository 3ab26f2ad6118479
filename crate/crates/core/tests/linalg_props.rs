use proptest::prelude::*;
use qtet_core::linalg::{frob, nullspace, orth, projector, rank, singular_values};
use qtet_core::scalar::CMat;
use num_complex::Complex;

fn low_rank(n: usize, k: usize, entries: &[f64]) -> CMat<f64> {
    let left = CMat::<f64>::from_fn(n, k, |r, c| Complex::new(entries[r * k + c], entries[n * k + r * k + c]));
    let right = CMat::<f64>::from_fn(k, n, |r, c| Complex::new(entries[2 * n * k + r * n + c], 0.0));
    left * right
}

proptest! {
    #[test]
    fn orth_spans_columns(n in 3usize..9, k in 1usize..4, entries in prop::collection::vec(-1.0f64..1.0, 3 * 9 * 4)) {
        let k = k.min(n - 1);
        let m = low_rank(n, k, &entries);
        let b = orth(&m, 1e-8);
        prop_assert!(frob(&(&m - projector(&b) * &m)) < 1e-9 * frob(&m).max(1.0));
        prop_assert_eq!(b.ncols(), rank(&m, 1e-8));
    }

    #[test]
    fn nullspace_is_annihilated(n in 3usize..9, k in 1usize..4, entries in prop::collection::vec(-1.0f64..1.0, 3 * 9 * 4)) {
        let k = k.min(n - 1);
        let m = low_rank(n, k, &entries);
        let z = nullspace(&m, 1e-10);
        prop_assert!(frob(&(&m * &z)) < 1e-9 * frob(&m).max(1.0));
        prop_assert_eq!(z.ncols() + rank(&m, 1e-8 * singular_values(&m)[0].max(1.0)), n);
    }
}

#[test]
fn repeated_singular_values_reconstruct() {
    // Two stacked orthonormal 4-dimensional bases sharing a 2-dimensional
    // subspace: singular values sqrt(2), sqrt(2), 1, 1, 1, 1, 0, 0.
    let n = 8;
    let mut m = CMat::<f64>::zeros(n, 8);
    for c in 0..4 {
        m[(c, c)] = Complex::new(1.0, 0.0);
    }
    for c in 0..4 {
        m[(c + 2, 4 + c)] = Complex::new(1.0, 0.0);
    }
    let b = orth(&m, 1e-6);
    assert_eq!(b.ncols(), 6);
    assert!(frob(&(&m - projector(&b) * &m)) < 1e-12);
}

//! Hot numeric kernels. Convolutions, attention and the mel path all reduce
//! to `matmul_acc`, so the fused inner loop here carries most of the
//! training budget.

use crate::Scalar;

/// `out += a @ b` for row-major `a` (m x k), `b` (k x n), `out` (m x n).
///
/// SAXPY loop order: the inner loop runs along contiguous rows of `b` and
/// `out`, which the compiler turns into FMA vector code.
pub fn matmul_acc<F: Scalar>(a: &[F], b: &[F], m: usize, k: usize, n: usize, out: &mut [F]) {
    debug_assert_eq!(a.len(), m * k);
    debug_assert_eq!(b.len(), k * n);
    debug_assert_eq!(out.len(), m * n);
    for i in 0..m {
        let a_row = &a[i * k..(i + 1) * k];
        let out_row = &mut out[i * n..(i + 1) * n];
        for (kk, &a_ik) in a_row.iter().enumerate() {
            let b_row = &b[kk * n..(kk + 1) * n];
            for (o, &bv) in out_row.iter_mut().zip(b_row.iter()) {
                *o = bv.mul_add(a_ik, *o);
            }
        }
    }
}

/// Fresh-allocation variant of [`matmul_acc`].
pub fn matmul<F: Scalar>(a: &[F], b: &[F], m: usize, k: usize, n: usize) -> Vec<F> {
    let mut out = vec![F::zero(); m * n];
    matmul_acc(a, b, m, k, n, &mut out);
    out
}

/// Row-major transpose of an m x n matrix.
pub fn transpose<F: Scalar>(a: &[F], m: usize, n: usize) -> Vec<F> {
    debug_assert_eq!(a.len(), m * n);
    let mut out = vec![F::zero(); m * n];
    for i in 0..m {
        for j in 0..n {
            out[j * m + i] = a[i * n + j];
        }
    }
    out
}

//! Small dense solves.

use crate::scalar::Scalar;

/// Solves `A x = b` in place for symmetric positive definite `A` (row-major,
/// `n x n`, overwritten by its Cholesky factor). Returns `false` if `A` is
/// not numerically positive definite.
pub(crate) fn cholesky_solve<T: Scalar>(a: &mut [T], b: &mut [T]) -> bool {
    let n = b.len();
    debug_assert_eq!(a.len(), n * n);
    for j in 0..n {
        let mut d = a[j * n + j];
        for p in 0..j {
            d -= a[j * n + p] * a[j * n + p];
        }
        if !(d > T::zero()) {
            return false;
        }
        let d = d.sqrt();
        a[j * n + j] = d;
        for i in j + 1..n {
            let mut v = a[i * n + j];
            for p in 0..j {
                v -= a[i * n + p] * a[j * n + p];
            }
            a[i * n + j] = v / d;
        }
    }
    for i in 0..n {
        let mut v = b[i];
        for p in 0..i {
            v -= a[i * n + p] * b[p];
        }
        b[i] = v / a[i * n + i];
    }
    for i in (0..n).rev() {
        let mut v = b[i];
        for p in i + 1..n {
            v -= a[p * n + i] * b[p];
        }
        b[i] = v / a[i * n + i];
    }
    true
}

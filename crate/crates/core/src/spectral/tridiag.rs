//! Symmetric tridiagonal eigensolver: implicit-shift QL iteration with
//! eigenvector accumulation.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Symmetric tridiagonal matrix stored as its diagonal and sub-diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct SymTridiagonal<T> {
    pub diag: Vec<T>,
    /// `off[i]` couples rows `i` and `i + 1`; length `diag.len() - 1`.
    pub off: Vec<T>,
}

impl<T: Scalar> SymTridiagonal<T> {
    pub fn new(diag: Vec<T>, off: Vec<T>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::LengthMismatch {
                expected: diag.len().saturating_sub(1),
                got: off.len(),
            });
        }
        Ok(Self { diag, off })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        let n = self.dim();
        assert_eq!(x.len(), n);
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.off[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    /// Full eigendecomposition. Eigenvalues ascend; `vectors[k]` is the
    /// Euclidean-unit eigenvector for `values[k]`.
    pub fn eigen(&self) -> Result<SymEigen<T>> {
        let n = self.dim();
        let mut d = self.diag.clone();
        let mut e = vec![T::zero(); n];
        e[..n - 1].copy_from_slice(&self.off);
        // z is column-major: z[k * n + i] is component i of vector k.
        let mut z = vec![T::zero(); n * n];
        for i in 0..n {
            z[i * n + i] = T::one();
        }
        ql_implicit(&mut d, &mut e, &mut z, n)?;

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).expect("finite eigenvalues"));
        let values = order.iter().map(|&k| d[k]).collect();
        let vectors = order
            .iter()
            .map(|&k| {
                let mut v = z[k * n..(k + 1) * n].to_vec();
                fix_sign(&mut v);
                v
            })
            .collect();
        Ok(SymEigen { values, vectors })
    }
}

#[derive(Clone, Debug)]
pub struct SymEigen<T> {
    pub values: Vec<T>,
    pub vectors: Vec<Vec<T>>,
}

/// Makes the first non-negligible component positive so decompositions are reproducible.
fn fix_sign<T: Scalar>(v: &mut [T]) {
    let scale = v.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    let cut = scale * T::lit(1e-8);
    if let Some(first) = v.iter().copied().find(|x| x.abs() > cut) {
        if first < T::zero() {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

fn ql_implicit<T: Scalar>(d: &mut [T], e: &mut [T], z: &mut [T], n: usize) -> Result<()> {
    const MAX_SWEEPS: usize = 60;
    let eps = T::epsilon();
    for l in 0..n {
        let mut iter = 0;
        loop {
            // Find a negligible off-diagonal element to split at.
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= eps * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_SWEEPS {
                return Err(Error::InvalidParameter(format!(
                    "tridiagonal QL failed to converge for eigenvalue {l}"
                )));
            }
            let two = T::lit(2.0);
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + r.abs().copysign(g));
            let mut s = T::one();
            let mut c = T::one();
            let mut p = T::zero();
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] -= p;
                    e[m] = T::zero();
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    let zi1 = z[(i + 1) * n + k];
                    let zi = z[i * n + k];
                    z[(i + 1) * n + k] = s * zi + c * zi1;
                    z[i * n + k] = c * zi - s * zi1;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(())
}

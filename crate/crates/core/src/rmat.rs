//! Dense square real matrices.
//!
//! Used for the real `2n x 2n` Jacobian of a pluriharmonic mapping and for
//! the Newton linear solves. Also hosts the symmetric eigensolver every
//! singular-value computation in the crate reduces to.

use serde::Serialize;

use crate::scalar::{real, Real};
use crate::{Error, Result};

/// Dense square real matrix, row-major.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RMat<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> RMat<T> {
    pub fn zeros(n: usize) -> Self {
        RMat {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    context: "RMat::from_rows",
                    expected: n,
                    actual: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(RMat { n, data })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    /// Determinant via LU with partial pivoting.
    pub fn determinant(&self) -> T {
        let n = self.n;
        let mut m = self.data.clone();
        let mut det = T::one();
        for col in 0..n {
            let mut pivot_row = col;
            let mut pivot_abs = m[col * n + col].abs();
            for row in col + 1..n {
                let a = m[row * n + col].abs();
                if a > pivot_abs {
                    pivot_abs = a;
                    pivot_row = row;
                }
            }
            if pivot_abs == T::zero() {
                return T::zero();
            }
            if pivot_row != col {
                for k in 0..n {
                    m.swap(col * n + k, pivot_row * n + k);
                }
                det = -det;
            }
            let pivot = m[col * n + col];
            det = det * pivot;
            for row in col + 1..n {
                let factor = m[row * n + col] / pivot;
                if factor != T::zero() {
                    for k in col..n {
                        let sub = factor * m[col * n + k];
                        m[row * n + k] = m[row * n + k] - sub;
                    }
                }
            }
        }
        det
    }

    /// Solves `A x = b` via LU with partial pivoting. `None` when a pivot
    /// vanishes.
    pub fn solve(&self, b: &[T]) -> Option<Vec<T>> {
        let n = self.n;
        if b.len() != n {
            return None;
        }
        let mut m = self.data.clone();
        let mut x = b.to_vec();
        for col in 0..n {
            let mut pivot_row = col;
            let mut pivot_abs = m[col * n + col].abs();
            for row in col + 1..n {
                let a = m[row * n + col].abs();
                if a > pivot_abs {
                    pivot_abs = a;
                    pivot_row = row;
                }
            }
            if pivot_abs == T::zero() {
                return None;
            }
            if pivot_row != col {
                for k in 0..n {
                    m.swap(col * n + k, pivot_row * n + k);
                }
                x.swap(col, pivot_row);
            }
            let pivot = m[col * n + col];
            for row in col + 1..n {
                let factor = m[row * n + col] / pivot;
                if factor != T::zero() {
                    for k in col..n {
                        let sub = factor * m[col * n + k];
                        m[row * n + k] = m[row * n + k] - sub;
                    }
                    x[row] = x[row] - factor * x[col];
                }
            }
        }
        for col in (0..n).rev() {
            let mut acc = x[col];
            for k in col + 1..n {
                acc = acc - m[col * n + k] * x[k];
            }
            x[col] = acc / m[col * n + col];
        }
        Some(x)
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        let n = self.n;
        let mut out = vec![T::zero(); n];
        for i in 0..n {
            let mut acc = T::zero();
            for j in 0..n {
                acc = acc + self.data[i * n + j] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    /// Largest and smallest singular values, via the symmetric eigenvalues
    /// of `A^T A`.
    pub fn singular_extremes(&self) -> (T, T) {
        let n = self.n;
        let mut g = vec![T::zero(); n * n];
        for i in 0..n {
            for j in i..n {
                let mut acc = T::zero();
                for k in 0..n {
                    acc = acc + self.data[k * n + i] * self.data[k * n + j];
                }
                g[i * n + j] = acc;
                g[j * n + i] = acc;
            }
        }
        let eigs = symmetric_eigenvalues(&mut g, n);
        let mut lo = eigs[0];
        let mut hi = eigs[0];
        for &e in &eigs[1..] {
            if e < lo {
                lo = e;
            }
            if e > hi {
                hi = e;
            }
        }
        (hi.max(T::zero()).sqrt(), lo.max(T::zero()).sqrt())
    }
}

/// Eigenvalues of a symmetric matrix (row-major, length `n * n`) by cyclic
/// Jacobi rotations. The input buffer is destroyed.
///
/// Robust for the small dimensions used here (`n <= 32`); converges to
/// machine precision in a handful of sweeps.
pub(crate) fn symmetric_eigenvalues<T: Real>(a: &mut [T], n: usize) -> Vec<T> {
    debug_assert_eq!(a.len(), n * n);
    if n == 1 {
        return vec![a[0]];
    }
    let mut scale = T::zero();
    for v in a.iter() {
        scale = scale + *v * *v;
    }
    let scale = scale.sqrt();
    if scale == T::zero() {
        return vec![T::zero(); n];
    }
    let stop = scale * T::epsilon() * real::<T>(1e-2);
    let max_sweeps = 64;
    for _ in 0..max_sweeps {
        let mut off = T::zero();
        for p in 0..n {
            for q in p + 1..n {
                off = off + a[p * n + q] * a[p * n + q];
            }
        }
        if off.sqrt() <= stop {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == T::zero() {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (real::<T>(2.0) * apq);
                let t = if theta.abs() > real::<T>(1e150) {
                    (real::<T>(2.0) * theta).recip()
                } else {
                    let s = if theta >= T::zero() {
                        T::one()
                    } else {
                        -T::one()
                    };
                    s / (theta.abs() + (theta * theta + T::one()).sqrt())
                };
                let c = (t * t + T::one()).sqrt().recip();
                let s = t * c;
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = T::zero();
                a[q * n + p] = T::zero();
                for i in 0..n {
                    if i == p || i == q {
                        continue;
                    }
                    let aip = a[i * n + p];
                    let aiq = a[i * n + q];
                    let new_ip = c * aip - s * aiq;
                    let new_iq = s * aip + c * aiq;
                    a[i * n + p] = new_ip;
                    a[p * n + i] = new_ip;
                    a[i * n + q] = new_iq;
                    a[q * n + i] = new_iq;
                }
            }
        }
    }
    (0..n).map(|i| a[i * n + i]).collect()
}

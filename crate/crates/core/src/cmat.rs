//! Dense complex matrix calculus: operator norm, minimal gain, determinant
//! and inverse.
//!
//! Singular values are obtained from the eigenvalues of the Hermitian product
//! `A^H A`, computed through its real symmetric embedding and the cyclic
//! Jacobi solver in [`crate::rmat`]. A deterministic power iteration was
//! rejected here: with the all-ones start vector it locks onto a non-extremal
//! eigenpair whenever the start is orthogonal to the extremal eigenspace
//! (e.g. `A^H A = [[2,-1],[-1,2]]`), so the full decomposition is the primary
//! path. Dimensions stay small (`n <= 16`), where Jacobi is effectively exact.

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::rmat::symmetric_eigenvalues;
use crate::scalar::{real, to_f64, Real};
use crate::{Error, Result, SINGULARITY_THRESHOLD};

/// Dense `n x n` complex matrix, row-major.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CMat<T> {
    n: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> CMat<T> {
    /// Builds a matrix from row-major entries. Rejects empty dimensions and
    /// non-finite entries.
    pub fn new(n: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::DimensionMismatch {
                context: "CMat::new dimension",
                expected: 1,
                actual: 0,
            });
        }
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                context: "CMat::new entries",
                expected: n * n,
                actual: data.len(),
            });
        }
        if data.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite {
                context: "CMat entry".to_string(),
            });
        }
        Ok(CMat { n, data })
    }

    pub fn from_rows(rows: &[Vec<Complex<T>>]) -> Result<Self> {
        let n = rows.len();
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    context: "CMat::from_rows",
                    expected: n,
                    actual: row.len(),
                });
            }
        }
        CMat::new(n, rows.concat())
    }

    pub fn zeros(n: usize) -> Self {
        CMat {
            n,
            data: vec![Complex::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = Complex::one();
        }
        m
    }

    pub fn diagonal(entries: &[Complex<T>]) -> Self {
        let n = entries.len();
        let mut m = CMat::zeros(n);
        for (i, &e) in entries.iter().enumerate() {
            m.data[i * n + i] = e;
        }
        m
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex<T>) {
        self.data[i * self.n + j] = v;
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn is_diagonal(&self) -> bool {
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j && self.data[i * self.n + j] != Complex::zero() {
                    return false;
                }
            }
        }
        true
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j];
            }
        }
        out
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        CMat {
            n: self.n,
            data: self.data.iter().map(|c| c.conj()).collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        self.transpose().conj()
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        CMat {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| *a + *b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        CMat {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| *a - *b)
                .collect(),
        }
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        CMat {
            n: self.n,
            data: self.data.iter().map(|a| *a * c).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex::zero();
                for k in 0..n {
                    acc = acc + self.data[i * n + k] * other.data[k * n + j];
                }
                out.data[i * n + j] = acc;
            }
        }
        out
    }

    /// Matrix times column vector.
    pub fn mul_vec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.n;
        debug_assert_eq!(v.len(), n);
        let mut out = vec![Complex::zero(); n];
        for i in 0..n {
            let mut acc = Complex::zero();
            for k in 0..n {
                acc = acc + self.data[i * n + k] * v[k];
            }
            out[i] = acc;
        }
        out
    }

    /// Frobenius norm.
    pub fn frobenius(&self) -> T {
        self.data
            .iter()
            .map(|c| c.norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            .sqrt()
    }

    /// Largest and smallest singular values.
    pub fn singular_extremes(&self) -> (T, T) {
        let n = self.n;
        if n == 1 {
            let m = self.data[0].norm();
            return (m, m);
        }
        // Hermitian product H = A^H A, then its real symmetric embedding
        // [[Re H, -Im H], [Im H, Re H]], whose spectrum is that of H with
        // every eigenvalue doubled.
        let mut h = vec![Complex::<T>::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex::zero();
                for k in 0..n {
                    acc = acc + self.data[k * n + i].conj() * self.data[k * n + j];
                }
                h[i * n + j] = acc;
            }
        }
        let m = 2 * n;
        let mut e = vec![T::zero(); m * m];
        for i in 0..n {
            for j in 0..n {
                let c = h[i * n + j];
                e[i * m + j] = c.re;
                e[i * m + (n + j)] = -c.im;
                e[(n + i) * m + j] = c.im;
                e[(n + i) * m + (n + j)] = c.re;
            }
        }
        let eigs = symmetric_eigenvalues(&mut e, m);
        let mut lo = eigs[0];
        let mut hi = eigs[0];
        for &v in &eigs[1..] {
            if v < lo {
                lo = v;
            }
            if v > hi {
                hi = v;
            }
        }
        (hi.max(T::zero()).sqrt(), lo.max(T::zero()).sqrt())
    }

    /// Operator norm (largest singular value).
    pub fn op_norm(&self) -> T {
        self.singular_extremes().0
    }

    /// Minimal gain (smallest singular value); zero iff singular.
    pub fn min_gain(&self) -> T {
        self.singular_extremes().1
    }

    /// Complex determinant via LU with partial pivoting.
    pub fn determinant(&self) -> Complex<T> {
        let n = self.n;
        if n == 1 {
            return self.data[0];
        }
        let mut m = self.data.clone();
        let mut det = Complex::<T>::one();
        for col in 0..n {
            let mut pivot_row = col;
            let mut pivot_sq = m[col * n + col].norm_sqr();
            for row in col + 1..n {
                let a = m[row * n + col].norm_sqr();
                if a > pivot_sq {
                    pivot_sq = a;
                    pivot_row = row;
                }
            }
            if pivot_sq == T::zero() {
                return Complex::zero();
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
                if factor != Complex::zero() {
                    for k in col..n {
                        let sub = factor * m[col * n + k];
                        m[row * n + k] = m[row * n + k] - sub;
                    }
                }
            }
        }
        det
    }

    /// Inverse. Errors with [`Error::Singular`] when the minimal gain is at
    /// or below [`SINGULARITY_THRESHOLD`]; the caller must treat that as a
    /// hypothesis violation rather than a numerical accident.
    pub fn inverse(&self) -> Result<Self> {
        let mg = self.min_gain();
        if mg <= real::<T>(SINGULARITY_THRESHOLD) {
            return Err(Error::Singular {
                min_gain: to_f64(mg),
                threshold: SINGULARITY_THRESHOLD,
            });
        }
        Ok(self.inverse_unchecked())
    }

    /// Gauss-Jordan inverse with partial pivoting plus Newton refinement.
    /// Assumes the caller has already screened for singularity.
    pub(crate) fn inverse_unchecked(&self) -> Self {
        let n = self.n;
        if n == 1 {
            return CMat {
                n: 1,
                data: vec![self.data[0].inv()],
            };
        }
        let mut m = self.data.clone();
        let mut inv = CMat::<T>::identity(n).data;
        for col in 0..n {
            let mut pivot_row = col;
            let mut pivot_sq = m[col * n + col].norm_sqr();
            for row in col + 1..n {
                let a = m[row * n + col].norm_sqr();
                if a > pivot_sq {
                    pivot_sq = a;
                    pivot_row = row;
                }
            }
            if pivot_row != col {
                for k in 0..n {
                    m.swap(col * n + k, pivot_row * n + k);
                    inv.swap(col * n + k, pivot_row * n + k);
                }
            }
            let pivot = m[col * n + col];
            let pinv = pivot.inv();
            for k in 0..n {
                m[col * n + k] = m[col * n + k] * pinv;
                inv[col * n + k] = inv[col * n + k] * pinv;
            }
            for row in 0..n {
                if row == col {
                    continue;
                }
                let factor = m[row * n + col];
                if factor != Complex::zero() {
                    for k in 0..n {
                        let a = factor * m[col * n + k];
                        let b = factor * inv[col * n + k];
                        m[row * n + k] = m[row * n + k] - a;
                        inv[row * n + k] = inv[row * n + k] - b;
                    }
                }
            }
        }
        let mut b = CMat { n, data: inv };
        // Newton refinement B <- B (2I - A B); keeps the residual near
        // machine precision for moderately conditioned inputs.
        let ident = CMat::identity(n);
        let mut res = ident.sub(&self.mul(&b)).frobenius();
        for _ in 0..2 {
            if res <= T::epsilon() * real::<T>(n as f64) {
                break;
            }
            let correction = ident.sub(&self.mul(&b));
            let refined = b.add(&b.mul(&correction));
            let new_res = ident.sub(&self.mul(&refined)).frobenius();
            if new_res < res {
                b = refined;
                res = new_res;
            } else {
                break;
            }
        }
        b
    }
}

/// Row-covector product `v A`: component `j` is `sum_k v_k A[k][j]`.
///
/// Mapping values act as row covectors under the perturbation families
/// `h + conj(g) A` and `h + g A`.
pub fn row_covector_mul<T: Real>(v: &[Complex<T>], a: &CMat<T>) -> Vec<Complex<T>> {
    let n = a.n();
    debug_assert_eq!(v.len(), n);
    let mut out = vec![Complex::zero(); n];
    for j in 0..n {
        let mut acc = Complex::zero();
        for k in 0..n {
            acc = acc + v[k] * a.get(k, j);
        }
        out[j] = acc;
    }
    out
}

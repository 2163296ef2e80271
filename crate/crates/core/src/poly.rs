//! Sparse polynomial holomorphic mappings `C^n -> C^n` with exact evaluation,
//! exact complex differentiation and linear combination.
//!
//! A mapping is a canonical list of monomials: terms are sorted by
//! `(component, exponents)`, duplicate keys are merged and zero coefficients
//! dropped, so structurally equal mappings are representationally equal.

use num_complex::Complex;
use num_traits::Zero;
use serde::Serialize;

use crate::cmat::CMat;
use crate::scalar::Real;
use crate::{Error, Result};

/// Per-variable degree cap, enforced at construction.
pub const MAX_DEGREE: u32 = 16;

/// One monomial `coefficient * z^exponents` contributing to one component.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Monomial<T> {
    pub component: usize,
    pub exponents: Vec<u32>,
    pub coefficient: Complex<T>,
}

impl<T: Real> Monomial<T> {
    pub fn new(component: usize, exponents: Vec<u32>, coefficient: Complex<T>) -> Self {
        Monomial {
            component,
            exponents,
            coefficient,
        }
    }
}

/// Sparse polynomial holomorphic mapping in canonical form.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolyMap<T> {
    n: usize,
    terms: Vec<Monomial<T>>,
}

/// Sign of the second operand in [`PolyMap::linear_combine`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn factor<T: Real>(self) -> T {
        match self {
            Sign::Plus => T::one(),
            Sign::Minus => -T::one(),
        }
    }
}

impl<T: Real> PolyMap<T> {
    /// Builds the canonical mapping from an arbitrary term list.
    pub fn new(n: usize, terms: Vec<Monomial<T>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::DimensionMismatch {
                context: "PolyMap dimension",
                expected: 1,
                actual: 0,
            });
        }
        for t in &terms {
            if t.exponents.len() != n {
                return Err(Error::DimensionMismatch {
                    context: "Monomial exponents",
                    expected: n,
                    actual: t.exponents.len(),
                });
            }
            if t.component >= n {
                return Err(Error::DimensionMismatch {
                    context: "Monomial component",
                    expected: n,
                    actual: t.component,
                });
            }
            if let Some(&d) = t.exponents.iter().find(|&&e| e > MAX_DEGREE) {
                return Err(Error::DegreeTooHigh {
                    degree: d,
                    cap: MAX_DEGREE,
                });
            }
            if !t.coefficient.re.is_finite() || !t.coefficient.im.is_finite() {
                return Err(Error::NonFinite {
                    context: format!("coefficient of component {}", t.component),
                });
            }
        }
        let mut terms = terms;
        terms.sort_by(|a, b| {
            a.component
                .cmp(&b.component)
                .then_with(|| a.exponents.cmp(&b.exponents))
        });
        let mut canonical: Vec<Monomial<T>> = Vec::with_capacity(terms.len());
        for t in terms {
            match canonical.last_mut() {
                Some(last) if last.component == t.component && last.exponents == t.exponents => {
                    last.coefficient = last.coefficient + t.coefficient;
                }
                _ => canonical.push(t),
            }
        }
        canonical.retain(|t| !t.coefficient.is_zero());
        Ok(PolyMap {
            n,
            terms: canonical,
        })
    }

    /// The zero mapping.
    pub fn zero(n: usize) -> Self {
        PolyMap {
            n,
            terms: Vec::new(),
        }
    }

    /// The identity mapping `z -> z`.
    pub fn identity(n: usize) -> Self {
        let terms = (0..n)
            .map(|j| {
                let mut e = vec![0u32; n];
                e[j] = 1;
                Monomial::new(j, e, Complex::new(T::one(), T::zero()))
            })
            .collect();
        PolyMap { n, terms }
    }

    /// The linear mapping `z -> z A` in the row-covector convention:
    /// component `j` is `sum_k A[k][j] z_k`.
    pub fn linear(a: &CMat<T>) -> Self {
        let n = a.n();
        let mut terms = Vec::new();
        for j in 0..n {
            for k in 0..n {
                let c = a.get(k, j);
                if !c.is_zero() {
                    let mut e = vec![0u32; n];
                    e[k] = 1;
                    terms.push(Monomial::new(j, e, c));
                }
            }
        }
        PolyMap::new(n, terms).expect("linear map from a finite matrix is valid")
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[Monomial<T>] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Maximum total degree over all terms (0 for the zero map).
    pub fn total_degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|t| t.exponents.iter().sum())
            .max()
            .unwrap_or(0)
    }

    fn check_point(&self, z: &[Complex<T>]) -> Result<()> {
        if z.len() != self.n {
            return Err(Error::DimensionMismatch {
                context: "evaluation point",
                expected: self.n,
                actual: z.len(),
            });
        }
        Ok(())
    }

    /// Evaluates the mapping; component `j` sums its terms in canonical order.
    pub fn eval(&self, z: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        self.check_point(z)?;
        let mut out = vec![Complex::zero(); self.n];
        for t in &self.terms {
            let mut v = t.coefficient;
            for (k, &e) in t.exponents.iter().enumerate() {
                if e > 0 {
                    v = v * z[k].powu(e);
                }
            }
            out[t.component] = out[t.component] + v;
        }
        Ok(out)
    }

    /// Complex Jacobian `DP(z)`: entry `(j, k)` is `dP_j / dz_k`, computed
    /// exactly by the power rule.
    pub fn jacobian(&self, z: &[Complex<T>]) -> Result<CMat<T>> {
        self.check_point(z)?;
        let n = self.n;
        let mut out = CMat::zeros(n);
        for t in &self.terms {
            for (k, &e) in t.exponents.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let mut v = t.coefficient * Complex::new(T::from_u32(e).unwrap(), T::zero());
                for (m, &em) in t.exponents.iter().enumerate() {
                    let power = if m == k { em - 1 } else { em };
                    if power > 0 {
                        v = v * z[m].powu(power);
                    }
                }
                out.set(t.component, k, out.get(t.component, k) + v);
            }
        }
        Ok(out)
    }

    /// Canonical mapping `self + sign * (other A)` with `other A` in the
    /// row-covector convention. The Jacobian identity
    /// `D(self + s other A) = D self + s A^T D other` holds exactly at the
    /// coefficient level.
    pub fn linear_combine(&self, other: &PolyMap<T>, a: &CMat<T>, sign: Sign) -> Result<PolyMap<T>> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch {
                context: "linear_combine operand",
                expected: self.n,
                actual: other.n,
            });
        }
        if a.n() != self.n {
            return Err(Error::DimensionMismatch {
                context: "linear_combine matrix",
                expected: self.n,
                actual: a.n(),
            });
        }
        let s = Complex::new(sign.factor::<T>(), T::zero());
        let mut terms = self.terms.clone();
        for t in &other.terms {
            for j in 0..self.n {
                let c = a.get(t.component, j);
                if !c.is_zero() {
                    terms.push(Monomial::new(j, t.exponents.clone(), s * t.coefficient * c));
                }
            }
        }
        PolyMap::new(self.n, terms)
    }

    /// Row-covector product `z -> P(z) A`.
    pub fn right_mul(&self, a: &CMat<T>) -> Result<PolyMap<T>> {
        PolyMap::zero(self.n).linear_combine(self, a, Sign::Plus)
    }

    /// Termwise sum.
    pub fn add(&self, other: &PolyMap<T>) -> Result<PolyMap<T>> {
        self.linear_combine(other, &CMat::identity(self.n), Sign::Plus)
    }

    /// Termwise difference.
    pub fn sub(&self, other: &PolyMap<T>) -> Result<PolyMap<T>> {
        self.linear_combine(other, &CMat::identity(self.n), Sign::Minus)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type P = PolyMap<f64>;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn sample_map() -> P {
        // P(z) = (z1^2, z1 z2)
        P::new(
            2,
            vec![
                Monomial::new(0, vec![2, 0], c(1.0, 0.0)),
                Monomial::new(1, vec![1, 1], c(1.0, 0.0)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn identity_evaluates_to_input() {
        let p = P::identity(2);
        let z = vec![c(0.1, 0.0), c(0.0, 0.2)];
        assert_eq!(p.eval(&z).unwrap(), z);
    }

    #[test]
    fn monomial_arithmetic() {
        let p = sample_map();
        let z = vec![c(1.0, 1.0), c(2.0, 0.0)];
        let v = p.eval(&z).unwrap();
        assert!((v[0] - c(0.0, 2.0)).norm() < 1e-15);
        assert!((v[1] - c(2.0, 2.0)).norm() < 1e-15);
    }

    #[test]
    fn zero_map_evaluates_to_zero() {
        let p = P::zero(3);
        let z = vec![c(0.4, 0.1); 3];
        assert_eq!(p.eval(&z).unwrap(), vec![c(0.0, 0.0); 3]);
    }

    #[test]
    fn jacobian_power_rule() {
        let p = sample_map();
        let z = vec![c(1.0, 1.0), c(2.0, 0.0)];
        let d = p.jacobian(&z).unwrap();
        assert!((d.get(0, 0) - c(2.0, 2.0)).norm() < 1e-15);
        assert!((d.get(0, 1)).norm() < 1e-15);
        assert!((d.get(1, 0) - c(2.0, 0.0)).norm() < 1e-15);
        assert!((d.get(1, 1) - c(1.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn jacobian_of_identity_is_identity() {
        let p = P::identity(3);
        let z = vec![c(0.3, -0.2), c(0.0, 0.5), c(0.1, 0.1)];
        let d = p.jacobian(&z).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((d.get(i, j) - c(expect, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn duplicate_terms_merge() {
        let p = P::new(
            1,
            vec![
                Monomial::new(0, vec![2], c(1.0, 0.0)),
                Monomial::new(0, vec![2], c(2.0, 0.0)),
            ],
        )
        .unwrap();
        assert_eq!(p.terms().len(), 1);
        assert_eq!(p.terms()[0].coefficient, c(3.0, 0.0));
    }

    #[test]
    fn cancelling_terms_drop() {
        let p = P::new(
            1,
            vec![
                Monomial::new(0, vec![1], c(1.0, 0.0)),
                Monomial::new(0, vec![1], c(-1.0, 0.0)),
            ],
        )
        .unwrap();
        assert!(p.is_zero());
    }

    #[test]
    fn degree_cap_enforced() {
        let r = P::new(1, vec![Monomial::new(0, vec![17], c(1.0, 0.0))]);
        assert!(matches!(r, Err(Error::DegreeTooHigh { .. })));
    }

    #[test]
    fn dimension_mismatch_on_eval() {
        let p = P::identity(2);
        assert!(matches!(
            p.eval(&[c(1.0, 0.0)]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn linear_combine_with_identity_is_sum() {
        // A = I, sign = Minus gives h - g termwise.
        let h = P::identity(1);
        let g = P::new(1, vec![Monomial::new(0, vec![2], c(0.5, 0.0))]).unwrap();
        let f = h
            .linear_combine(&g, &CMat::identity(1), Sign::Minus)
            .unwrap();
        let z = vec![c(0.3, 0.0)];
        let v = f.eval(&z).unwrap();
        assert!((v[0] - c(0.3 - 0.045, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn linear_combine_with_zero_matrix_keeps_first() {
        let h = sample_map();
        let g = P::identity(2);
        let f = h.linear_combine(&g, &CMat::zeros(2), Sign::Plus).unwrap();
        assert_eq!(f, h);
    }

    #[test]
    fn diagonal_action() {
        // Q(z) = (z1, z2), A = diag(i, -1), P = 0, sign = Plus -> (i z1, -z2)
        let q = P::identity(2);
        let a = CMat::diagonal(&[c(0.0, 1.0), c(-1.0, 0.0)]);
        let f = P::zero(2).linear_combine(&q, &a, Sign::Plus).unwrap();
        let z = vec![c(0.2, 0.1), c(-0.3, 0.4)];
        let v = f.eval(&z).unwrap();
        assert!((v[0] - z[0] * c(0.0, 1.0)).norm() < 1e-15);
        assert!((v[1] + z[1]).norm() < 1e-15);
    }

    #[test]
    fn derivative_linearity_exact() {
        // D(P + s Q A)(z) = DP(z) + s A^T DQ(z), as an exact identity.
        let p = sample_map();
        let q = P::new(
            2,
            vec![
                Monomial::new(0, vec![1, 2], c(0.3, -0.7)),
                Monomial::new(1, vec![3, 0], c(-0.2, 0.1)),
            ],
        )
        .unwrap();
        let a = CMat::from_rows(&[
            vec![c(0.5, 0.25), c(-1.0, 0.0)],
            vec![c(0.0, -0.5), c(0.75, 0.125)],
        ])
        .unwrap();
        let r = p.linear_combine(&q, &a, Sign::Minus).unwrap();
        let z = vec![c(0.4, -0.3), c(-0.6, 0.2)];
        let left = r.jacobian(&z).unwrap();
        let right = p
            .jacobian(&z)
            .unwrap()
            .sub(&a.transpose().mul(&q.jacobian(&z).unwrap()));
        for i in 0..2 {
            for j in 0..2 {
                assert!((left.get(i, j) - right.get(i, j)).norm() < 1e-14);
            }
        }
    }
}

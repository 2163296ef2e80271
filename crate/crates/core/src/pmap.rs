//! Pluriharmonic-mapping calculus for `f = h + conj(g)`: evaluation, the
//! dilatation `omega = Dg [Dh]^{-1}`, the real `2n x 2n` Jacobian, the block
//! determinant formula and the stretch extremes `Lambda_f / lambda_f`.

use num_complex::Complex;
use serde::Serialize;

use crate::cmat::CMat;
use crate::poly::PolyMap;
use crate::rmat::RMat;
use crate::sampling::SampleStream;
use crate::scalar::{point_f64, real, to_f64, vec_norm, Real};
use crate::{Error, Result, SINGULARITY_THRESHOLD};

/// Pluriharmonic mapping `f = h + conj(g)` with `h`, `g` polynomial
/// holomorphic mappings of the same dimension.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PHMap<T> {
    h: PolyMap<T>,
    g: PolyMap<T>,
}

/// Derivative bundle of `f` at one point.
#[derive(Clone, Debug, Serialize)]
pub struct DerivPack<T> {
    pub z: Vec<Complex<T>>,
    pub dh: CMat<T>,
    pub dg: CMat<T>,
    /// Dilatation `Dg [Dh]^{-1}`.
    pub omega: CMat<T>,
    /// Largest stretch `Lambda_f(z)`.
    pub lambda_big: T,
    /// Smallest stretch `lambda_f(z)`.
    pub lambda_small: T,
    /// Real Jacobian determinant `det J_f(z)`.
    pub det_j: T,
}

impl<T: Real> PHMap<T> {
    pub fn new(h: PolyMap<T>, g: PolyMap<T>) -> Result<Self> {
        if h.n() != g.n() {
            return Err(Error::DimensionMismatch {
                context: "PHMap parts",
                expected: h.n(),
                actual: g.n(),
            });
        }
        Ok(PHMap { h, g })
    }

    /// Wraps a holomorphic mapping as the pluriharmonic pair `(F, 0)`.
    pub fn from_holomorphic(f: PolyMap<T>) -> Self {
        let g = PolyMap::zero(f.n());
        PHMap { h: f, g }
    }

    pub fn identity(n: usize) -> Self {
        PHMap {
            h: PolyMap::identity(n),
            g: PolyMap::zero(n),
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.h.n()
    }

    pub fn h(&self) -> &PolyMap<T> {
        &self.h
    }

    pub fn g(&self) -> &PolyMap<T> {
        &self.g
    }

    /// `f(z) = h(z) + conj(g(z))`.
    pub fn eval(&self, z: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        let hv = self.h.eval(z)?;
        let gv = self.g.eval(z)?;
        Ok(hv
            .into_iter()
            .zip(gv)
            .map(|(a, b)| a + b.conj())
            .collect())
    }

    /// Dilatation `omega(z) = Dg(z) [Dh(z)]^{-1}`.
    ///
    /// [`Error::DhSingular`] signals that the local-biholomorphy hypothesis
    /// on `h` fails at `z`.
    pub fn omega(&self, z: &[Complex<T>]) -> Result<CMat<T>> {
        let dh = self.h.jacobian(z)?;
        let dg = self.g.jacobian(z)?;
        let mg = dh.min_gain();
        if mg <= real::<T>(SINGULARITY_THRESHOLD) {
            return Err(Error::DhSingular {
                point: point_f64(z),
                min_gain: to_f64(mg),
            });
        }
        Ok(dg.mul(&dh.inverse_unchecked()))
    }

    /// Real Jacobian of `(Re f, Im f)` with respect to `(x, y)`, rows ordered
    /// `(u_1..u_n, v_1..v_n)` and columns `(x_1..x_n, y_1..y_n)`, assembled
    /// exactly from the Wirtinger derivatives `Df = Dh`, `Dbar f = conj(Dg)`.
    pub fn real_jacobian(&self, z: &[Complex<T>]) -> Result<RMat<T>> {
        let p = self.h.jacobian(z)?;
        let dg = self.g.jacobian(z)?;
        let n = self.n();
        let mut j = RMat::zeros(2 * n);
        for row in 0..n {
            for col in 0..n {
                let pjk = p.get(row, col);
                let qjk = dg.get(row, col).conj();
                let dx = pjk + qjk;
                let dy = (pjk - qjk) * Complex::new(T::zero(), T::one());
                j.set(row, col, dx.re);
                j.set(row, n + col, dy.re);
                j.set(n + row, col, dx.im);
                j.set(n + row, n + col, dy.im);
            }
        }
        Ok(j)
    }

    /// `det J_f(z)` through the block formula
    /// `|det Dh|^2 det(I - omega conj(omega))`.
    ///
    /// The complex computation must come out real; an imaginary residue above
    /// `1e-10` indicates an assembly bug and raises
    /// [`Error::InternalInconsistency`] instead of returning garbage.
    pub fn det_jacobian(&self, z: &[Complex<T>]) -> Result<T> {
        let dh = self.h.jacobian(z)?;
        let dg = self.g.jacobian(z)?;
        let mg = dh.min_gain();
        if mg <= real::<T>(SINGULARITY_THRESHOLD) {
            return Err(Error::DhSingular {
                point: point_f64(z),
                min_gain: to_f64(mg),
            });
        }
        let omega = dg.mul(&dh.inverse_unchecked());
        det_jacobian_from_parts(&dh, &omega)
    }

    /// `(Lambda_f(z), lambda_f(z))`: extreme singular values of the real
    /// Jacobian.
    pub fn lambda_extremes(&self, z: &[Complex<T>]) -> Result<(T, T)> {
        Ok(self.real_jacobian(z)?.singular_extremes())
    }

    /// Extremes of `|| Dh(z) theta + conj(Dg(z)) conj(theta) ||` over sampled
    /// directions `theta` of the complex unit sphere, plus 64 deterministic
    /// axis/diagonal directions. A restriction of the true extremum: the max
    /// is nondecreasing and the min nonincreasing in `samples` for a fixed
    /// seed, because a longer run extends the same sample stream.
    pub fn sphere_scan_extremes(&self, z: &[Complex<T>], samples: u64, seed: u64) -> Result<(T, T)> {
        let dh = self.h.jacobian(z)?;
        let dgc = self.g.jacobian(z)?.conj();
        let n = self.n();
        let stretch = |theta: &[Complex<T>]| -> T {
            let a = dh.mul_vec(theta);
            let conj_theta: Vec<Complex<T>> = theta.iter().map(|c| c.conj()).collect();
            let b = dgc.mul_vec(&conj_theta);
            let v: Vec<Complex<T>> = a.into_iter().zip(b).map(|(x, y)| x + y).collect();
            vec_norm(&v)
        };
        let mut hi = T::neg_infinity();
        let mut lo = T::infinity();
        for theta in deterministic_directions::<T>(n) {
            let v = stretch(&theta);
            hi = hi.max(v);
            lo = lo.min(v);
        }
        let mut stream = SampleStream::new(seed, 0);
        for _ in 0..samples {
            let theta = stream.unit_sphere(n);
            let v = stretch(&theta);
            hi = hi.max(v);
            lo = lo.min(v);
        }
        Ok((hi, lo))
    }

    /// Full derivative bundle at `z`.
    pub fn derivs(&self, z: &[Complex<T>]) -> Result<DerivPack<T>> {
        let dh = self.h.jacobian(z)?;
        let dg = self.g.jacobian(z)?;
        let mg = dh.min_gain();
        if mg <= real::<T>(SINGULARITY_THRESHOLD) {
            return Err(Error::DhSingular {
                point: point_f64(z),
                min_gain: to_f64(mg),
            });
        }
        let omega = dg.mul(&dh.inverse_unchecked());
        let det_j = det_jacobian_from_parts(&dh, &omega)?;
        let (lambda_big, lambda_small) = self.lambda_extremes(z)?;
        Ok(DerivPack {
            z: z.to_vec(),
            dh,
            dg,
            omega,
            lambda_big,
            lambda_small,
            det_j,
        })
    }
}

fn det_jacobian_from_parts<T: Real>(dh: &CMat<T>, omega: &CMat<T>) -> Result<T> {
    let n = dh.n();
    let inner = CMat::identity(n)
        .sub(&omega.mul(&omega.conj()))
        .determinant();
    let value = inner * Complex::new(dh.determinant().norm_sqr(), T::zero());
    if value.im.abs() > real::<T>(1e-10) {
        return Err(Error::InternalInconsistency {
            detail: format!(
                "block determinant has imaginary residue {:.3e}",
                to_f64(value.im)
            ),
        });
    }
    Ok(value.re)
}

/// 64 deterministic directions on the complex unit sphere: the complex axes
/// `e_k` and `i e_k`, two-axis diagonals `(e_j +/- e_k)/sqrt(2)` and
/// `(e_j +/- i e_k)/sqrt(2)`, the all-ones diagonal under eight phases, then
/// phase-rotated axes until the budget is filled.
pub(crate) fn deterministic_directions<T: Real>(n: usize) -> Vec<Vec<Complex<T>>> {
    const BUDGET: usize = 64;
    let mut dirs: Vec<Vec<Complex<T>>> = Vec::with_capacity(BUDGET);
    let one = Complex::new(T::one(), T::zero());
    let i_unit = Complex::new(T::zero(), T::one());
    let axis = |k: usize, c: Complex<T>| {
        let mut v = vec![Complex::new(T::zero(), T::zero()); n];
        v[k] = c;
        v
    };
    for k in 0..n {
        if dirs.len() >= BUDGET {
            break;
        }
        dirs.push(axis(k, one));
        dirs.push(axis(k, i_unit));
    }
    let inv_sqrt2 = real::<T>(std::f64::consts::FRAC_1_SQRT_2);
    'pairs: for j in 0..n {
        for k in j + 1..n {
            for &c in &[one, -one, i_unit, -i_unit] {
                if dirs.len() >= BUDGET {
                    break 'pairs;
                }
                let mut v = axis(j, one);
                v[k] = c;
                for e in &mut v {
                    *e = *e * Complex::new(inv_sqrt2, T::zero());
                }
                dirs.push(v);
            }
        }
    }
    let inv_sqrt_n = real::<T>(1.0 / (n as f64).sqrt());
    for m in 0..8 {
        if dirs.len() >= BUDGET {
            break;
        }
        let angle = std::f64::consts::TAU * m as f64 / 8.0;
        let phase = Complex::new(real::<T>(angle.cos()), real::<T>(angle.sin()));
        dirs.push(vec![
            phase * Complex::new(inv_sqrt_n, T::zero());
            n
        ]);
    }
    let mut m = 0usize;
    while dirs.len() < BUDGET {
        let angle = std::f64::consts::PI * m as f64 / 32.0;
        let phase = Complex::new(real::<T>(angle.cos()), real::<T>(angle.sin()));
        dirs.push(axis(m % n, phase));
        m += 1;
    }
    dirs.truncate(BUDGET);
    dirs
}

//! Seeded Monte-Carlo integration over balls in `C^n` under the normalized
//! Lebesgue volume measure (the unit ball has total mass 1, so the ball of
//! radius `r` has mass `r^{2n}`), plus the generalized-volume machinery.
//!
//! Sampling is split into fixed-size batches; batch `b` draws from the
//! ChaCha stream `(seed, b)` and partial sums are reduced in batch order, so
//! an estimate is bit-identical for a given `(seed, samples)` regardless of
//! how many workers execute the batches.

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::pmap::PHMap;
use crate::sampling::SampleStream;
use crate::scalar::{point_f64, real, to_f64, Real};
use crate::{Error, Result, SINGULARITY_THRESHOLD};

const BATCH: u64 = 8192;

/// Fraction of hypothesis-violating samples tolerated before the whole
/// estimate is rejected.
const VIOLATION_BUDGET: f64 = 1e-3;

/// One seeded Monte-Carlo estimate.
///
/// `sum` and `sum_sq` are the raw accumulators over the unscaled integrand;
/// `value` and `stderr` carry the `r^{2n}` mass factor. Identical
/// `(seed, samples)` reproduce the estimate bit-for-bit.
#[derive(Clone, Debug, Serialize)]
pub struct IntegralEstimate<T> {
    pub value: T,
    pub stderr: T,
    pub samples: u64,
    pub seed: u64,
    pub r: T,
    /// Complex dimension of the ball the estimate was taken over.
    pub dim: u32,
    pub sum: T,
    pub sum_sq: T,
}

impl<T: Real> IntegralEstimate<T> {
    /// Standard error recomputed from the stored accumulators.
    pub fn recomputed_stderr(&self) -> T {
        if self.samples < 2 {
            return T::zero();
        }
        let n = real::<T>(self.samples as f64);
        let var = ((self.sum_sq - self.sum * self.sum / n) / (n - T::one())).max(T::zero());
        let mass = self.r.powi(2 * self.dim as i32);
        (var / n).sqrt() * mass
    }
}

/// Generalized-volume profile over the dyadic radius schedule.
#[derive(Clone, Debug, Serialize)]
pub struct VolumeProfile<T> {
    pub radii: Vec<T>,
    pub values: Vec<IntegralEstimate<T>>,
    pub sup_estimate: T,
    pub diverged: bool,
}

/// Outcome of the volume inequality check at one radius.
#[derive(Clone, Debug, Serialize)]
pub struct VolumeInequalityVerdict<T> {
    pub lhs: IntegralEstimate<T>,
    pub rhs: IntegralEstimate<T>,
    pub k_r_pow_n: T,
    /// `K_r^n * rhs + 3 * (stderr_lhs + K_r^n * stderr_rhs)`.
    pub bound: T,
    pub pass: bool,
}

enum SampleValue<T> {
    Clean(T),
    /// Hypothesis-violating but computable sample; still contributes.
    Flagged(T),
    /// `Dh` singular: counts as a violation, contributes zero.
    Singular,
    NonFinite,
}

struct BatchResult<T> {
    sum: T,
    sum_sq: T,
    violations: u64,
    first_violation: Option<(u64, Vec<[f64; 2]>)>,
    first_non_finite: Option<(u64, Vec<[f64; 2]>)>,
}

fn run_batches<T, F>(n: usize, r: f64, samples: u64, seed: u64, eval: F) -> BatchResult<T>
where
    T: Real,
    F: Fn(&[Complex<T>]) -> SampleValue<T> + Sync,
{
    let batches = samples.div_ceil(BATCH);
    let partials: Vec<BatchResult<T>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut stream = SampleStream::new(seed, b);
            let count = BATCH.min(samples - b * BATCH);
            let mut out = BatchResult {
                sum: T::zero(),
                sum_sq: T::zero(),
                violations: 0,
                first_violation: None,
                first_non_finite: None,
            };
            for s in 0..count {
                let idx = b * BATCH + s;
                let z: Vec<Complex<T>> = stream.ball_point(n, r);
                match eval(&z) {
                    SampleValue::Clean(v) => {
                        out.sum = out.sum + v;
                        out.sum_sq = out.sum_sq + v * v;
                    }
                    SampleValue::Flagged(v) => {
                        out.sum = out.sum + v;
                        out.sum_sq = out.sum_sq + v * v;
                        out.violations += 1;
                        if out.first_violation.is_none() {
                            out.first_violation = Some((idx, point_f64(&z)));
                        }
                    }
                    SampleValue::Singular => {
                        out.violations += 1;
                        if out.first_violation.is_none() {
                            out.first_violation = Some((idx, point_f64(&z)));
                        }
                    }
                    SampleValue::NonFinite => {
                        if out.first_non_finite.is_none() {
                            out.first_non_finite = Some((idx, point_f64(&z)));
                        }
                    }
                }
            }
            out
        })
        .collect();
    partials
        .into_iter()
        .reduce(|mut acc, b| {
            acc.sum = acc.sum + b.sum;
            acc.sum_sq = acc.sum_sq + b.sum_sq;
            acc.violations += b.violations;
            acc.first_violation = match (acc.first_violation.take(), b.first_violation) {
                (Some(a), Some(c)) => Some(if a.0 <= c.0 { a } else { c }),
                (a, c) => a.or(c),
            };
            acc.first_non_finite = match (acc.first_non_finite.take(), b.first_non_finite) {
                (Some(a), Some(c)) => Some(if a.0 <= c.0 { a } else { c }),
                (a, c) => a.or(c),
            };
            acc
        })
        .expect("at least one batch")
}

fn finish<T: Real>(
    n: usize,
    r: f64,
    samples: u64,
    seed: u64,
    batch: BatchResult<T>,
) -> Result<IntegralEstimate<T>> {
    if let Some((_, point)) = batch.first_non_finite {
        return Err(Error::IntegrandNonFinite { point });
    }
    if (batch.violations as f64) > VIOLATION_BUDGET * samples as f64 {
        let (_, witness) = batch.first_violation.expect("violations imply a witness");
        return Err(Error::hypothesis(
            "volume-integrand",
            format!(
                "{} of {} samples violate min_gain(Dh) > {:.0e} and ||omega|| < 1",
                batch.violations, samples, SINGULARITY_THRESHOLD
            ),
            Some(witness),
        ));
    }
    let mass = real::<T>(r).powi(2 * n as i32);
    let count = real::<T>(samples as f64);
    let mean = batch.sum / count;
    let stderr = if samples < 2 {
        T::zero()
    } else {
        let var =
            ((batch.sum_sq - batch.sum * batch.sum / count) / (count - T::one())).max(T::zero());
        (var / count).sqrt()
    };
    Ok(IntegralEstimate {
        value: mean * mass,
        stderr: stderr * mass,
        samples,
        seed,
        r: real(r),
        dim: n as u32,
        sum: batch.sum,
        sum_sq: batch.sum_sq,
    })
}

/// Monte-Carlo mean of `integrand` over the ball of radius `r` in `C^n`,
/// scaled by the mass `r^{2n}` of the ball under the normalized measure.
///
/// Exact for constant integrands. A non-finite integrand value aborts with
/// the offending sample point.
pub fn integrate_ball<T, F>(
    n: usize,
    r: f64,
    samples: u64,
    seed: u64,
    integrand: F,
) -> Result<IntegralEstimate<T>>
where
    T: Real,
    F: Fn(&[Complex<T>]) -> T + Sync,
{
    check_radius(r, true)?;
    check_samples(samples, 100)?;
    let batch = run_batches(n, r, samples, seed, |z| {
        let v = integrand(z);
        if v.is_finite() {
            SampleValue::Clean(v)
        } else {
            SampleValue::NonFinite
        }
    });
    finish(n, r, samples, seed, batch)
}

fn check_radius(r: f64, closed_top: bool) -> Result<()> {
    let ok = r > 0.0 && if closed_top { r <= 1.0 } else { r < 1.0 };
    if !ok {
        return Err(Error::DomainError {
            context: format!("radius {r} outside the admissible range"),
        });
    }
    Ok(())
}

fn check_samples(samples: u64, min: u64) -> Result<()> {
    if samples < min {
        return Err(Error::PreconditionViolated {
            detail: format!("samples = {samples} below the minimum {min}"),
        });
    }
    Ok(())
}

/// Per-sample derivative site shared by the volume integrands.
struct Site<T> {
    dh_norm: T,
    omega_norm: T,
    det_j: T,
}

fn eval_site<T: Real>(f: &PHMap<T>, z: &[Complex<T>]) -> Option<Site<T>> {
    let dh = f.h().jacobian(z).expect("dimensions fixed by PHMap");
    let dg = f.g().jacobian(z).expect("dimensions fixed by PHMap");
    let (dh_norm, min_gain) = dh.singular_extremes();
    if min_gain <= real::<T>(SINGULARITY_THRESHOLD) {
        return None;
    }
    let omega = dg.mul(&dh.inverse_unchecked());
    let omega_norm = omega.op_norm();
    let inner = crate::cmat::CMat::identity(f.n())
        .sub(&omega.mul(&omega.conj()))
        .determinant();
    let det_j = inner.re * dh.determinant().norm_sqr();
    Some(Site {
        dh_norm,
        omega_norm,
        det_j,
    })
}

/// Generalized volume `V_f(r)`: Monte-Carlo estimate of
/// `||Dh||^{2n} (1 - ||omega||^2)^n` over the ball of radius `r`.
///
/// The hypothesis `min_gain(Dh) > 0` and `||omega|| < 1` is monitored per
/// sample; more than 0.1% violations reject the estimate with a witness.
pub fn generalized_volume<T: Real>(
    f: &PHMap<T>,
    r: f64,
    samples: u64,
    seed: u64,
) -> Result<IntegralEstimate<T>> {
    check_radius(r, false)?;
    check_samples(samples, 100)?;
    let n = f.n();
    let power = n as i32;
    let batch = run_batches(n, r, samples, seed, |z| match eval_site(f, z) {
        None => SampleValue::Singular,
        Some(site) => {
            let v = site.dh_norm.powi(2 * power)
                * (T::one() - site.omega_norm * site.omega_norm).powi(power);
            if !v.is_finite() {
                SampleValue::NonFinite
            } else if site.omega_norm >= T::one() {
                SampleValue::Flagged(v)
            } else {
                SampleValue::Clean(v)
            }
        }
    });
    finish(n, r, samples, seed, batch)
}

/// Real volume: Monte-Carlo estimate of `|det J_f|` over the ball of radius
/// `r`, with the same hypothesis monitoring as [`generalized_volume`].
pub fn real_volume<T: Real>(
    f: &PHMap<T>,
    r: f64,
    samples: u64,
    seed: u64,
) -> Result<IntegralEstimate<T>> {
    check_radius(r, false)?;
    check_samples(samples, 100)?;
    let n = f.n();
    let batch = run_batches(n, r, samples, seed, |z| match eval_site(f, z) {
        None => SampleValue::Singular,
        Some(site) => {
            let v = site.det_j.abs();
            if !v.is_finite() {
                SampleValue::NonFinite
            } else if site.omega_norm >= T::one() {
                SampleValue::Flagged(v)
            } else {
                SampleValue::Clean(v)
            }
        }
    });
    finish(n, r, samples, seed, batch)
}

/// Approximates `V = sup_{0<r<1} V_f(r)` on the dyadic schedule
/// `r_k = 1 - 2^{-k}`, `k = 1..=budget`.
///
/// `sup_estimate` is the last value; `diverged` is set when the last two
/// increments each exceed 10% relatively, and is flagged rather than
/// extrapolated.
pub fn sup_generalized_volume<T: Real>(
    f: &PHMap<T>,
    samples: u64,
    seed: u64,
    budget: u32,
) -> Result<VolumeProfile<T>> {
    if budget < 3 {
        return Err(Error::PreconditionViolated {
            detail: format!("budget = {budget} below the minimum 3 radii"),
        });
    }
    let mut radii = Vec::with_capacity(budget as usize);
    let mut values = Vec::with_capacity(budget as usize);
    for k in 1..=budget {
        let r = 1.0 - 0.5f64.powi(k as i32);
        values.push(generalized_volume(f, r, samples, seed)?);
        radii.push(real::<T>(r));
    }
    let m = values.len();
    let rel_increment = |a: T, b: T| -> f64 {
        let denom = to_f64(a).abs().max(1e-300);
        (to_f64(b) - to_f64(a)) / denom
    };
    let diverged = m >= 3
        && rel_increment(values[m - 2].value, values[m - 1].value) > 0.1
        && rel_increment(values[m - 3].value, values[m - 2].value) > 0.1;
    let sup_estimate = values[m - 1].value;
    Ok(VolumeProfile {
        radii,
        values,
        sup_estimate,
        diverged,
    })
}

/// Checks the volume inequality
/// `integral of |det J_f| <= K_r^n V_f(r)` with `K_r = (1+r)/(1-r)` at one
/// radius, using common random numbers (the same seed) on both sides.
///
/// Passes iff `lhs <= K_r^n rhs + 3 (stderr_lhs + K_r^n stderr_rhs)`.
pub fn volume_inequality_check<T: Real>(
    f: &PHMap<T>,
    r: f64,
    samples: u64,
    seed: u64,
) -> Result<VolumeInequalityVerdict<T>> {
    let lhs = real_volume(f, r, samples, seed)?;
    let rhs = generalized_volume(f, r, samples, seed)?;
    let k_r = (1.0 + r) / (1.0 - r);
    let k_r_pow_n = real::<T>(k_r.powi(f.n() as i32));
    let three = real::<T>(3.0);
    let bound = k_r_pow_n * rhs.value + three * (lhs.stderr + k_r_pow_n * rhs.stderr);
    let pass = lhs.value <= bound;
    Ok(VolumeInequalityVerdict {
        lhs,
        rhs,
        k_r_pow_n,
        bound,
        pass,
    })
}

//! Damped Newton iteration on the real `2n`-dimensional system `f(z) = w`,
//! plus the deterministic multistart grid used by the covering check.

use num_complex::Complex;

use crate::pmap::PHMap;
use crate::scalar::{real, to_f64, vec_dist, Real};

/// Result of one Newton run.
#[derive(Clone, Debug)]
pub struct NewtonOutcome<T> {
    pub converged: bool,
    pub z: Vec<Complex<T>>,
    pub residual: T,
    pub iterations: u32,
}

pub(crate) const NEWTON_MAX_ITER: u32 = 200;
pub(crate) const NEWTON_MAX_HALVINGS: u32 = 20;

/// Damped Newton on `f(z) = target` from `start`: full step from the real
/// Jacobian linear solve, halved up to 20 times until the residual improves,
/// at most 200 iterations. Stops early on a singular Jacobian, a stalled
/// step or a non-finite residual.
pub fn damped_newton<T: Real>(
    f: &PHMap<T>,
    target: &[Complex<T>],
    start: &[Complex<T>],
    residual_tol: T,
) -> NewtonOutcome<T> {
    let n = f.n();
    let mut z = start.to_vec();
    let mut fz = f.eval(&z).expect("dimension fixed by PHMap");
    let mut residual = vec_dist(&fz, target);
    let mut iterations = 0;
    while iterations < NEWTON_MAX_ITER {
        if !residual.is_finite() {
            return NewtonOutcome {
                converged: false,
                z,
                residual: T::infinity(),
                iterations,
            };
        }
        if residual < residual_tol {
            return NewtonOutcome {
                converged: true,
                z,
                residual,
                iterations,
            };
        }
        iterations += 1;
        let jac = f.real_jacobian(&z).expect("dimension fixed by PHMap");
        let mut rhs = vec![T::zero(); 2 * n];
        for k in 0..n {
            let d = fz[k] - target[k];
            rhs[k] = d.re;
            rhs[n + k] = d.im;
        }
        let Some(step) = jac.solve(&rhs) else {
            return NewtonOutcome {
                converged: false,
                z,
                residual,
                iterations,
            };
        };
        let mut lambda = T::one();
        let mut improved = false;
        for _ in 0..=NEWTON_MAX_HALVINGS {
            let candidate: Vec<Complex<T>> = (0..n)
                .map(|k| {
                    Complex::new(
                        z[k].re - lambda * step[k],
                        z[k].im - lambda * step[n + k],
                    )
                })
                .collect();
            let f_candidate = f.eval(&candidate).expect("dimension fixed by PHMap");
            let cand_residual = vec_dist(&f_candidate, target);
            if cand_residual.is_finite() && cand_residual < residual {
                z = candidate;
                fz = f_candidate;
                residual = cand_residual;
                improved = true;
                break;
            }
            lambda = lambda * real::<T>(0.5);
        }
        if !improved {
            break;
        }
    }
    NewtonOutcome {
        converged: residual < residual_tol,
        z,
        residual,
        iterations,
    }
}

fn halton(mut index: u64, base: u64) -> f64 {
    let mut result = 0.0;
    let mut fraction = 1.0 / base as f64;
    while index > 0 {
        result += (index % base) as f64 * fraction;
        index /= base;
        fraction /= base as f64;
    }
    result
}

const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Deterministic multistart grid: the origin plus `count - 1` Halton points
/// of the cube inscribed in the ball of radius `0.9 * domain_radius`.
pub fn multistart_points<T: Real>(
    n: usize,
    domain_radius: f64,
    count: usize,
) -> Vec<Vec<Complex<T>>> {
    let half_side = 0.9 * domain_radius / ((2 * n) as f64).sqrt();
    let mut points = Vec::with_capacity(count);
    points.push(vec![Complex::new(T::zero(), T::zero()); n]);
    for idx in 1..count as u64 {
        let point: Vec<Complex<T>> = (0..n)
            .map(|k| {
                let re = (2.0 * halton(idx, PRIMES[2 * k]) - 1.0) * half_side;
                let im = (2.0 * halton(idx, PRIMES[2 * k + 1]) - 1.0) * half_side;
                Complex::new(real(re), real(im))
            })
            .collect();
        points.push(point);
    }
    points
}

/// Numerically validates that a start grid stays inside the open ball.
#[allow(dead_code)]
pub(crate) fn starts_inside<T: Real>(points: &[Vec<Complex<T>>], radius: f64) -> bool {
    points.iter().all(|p| {
        let norm_sq: f64 = p.iter().map(|c| to_f64(c.norm_sqr())).sum();
        norm_sq.sqrt() < radius
    })
}

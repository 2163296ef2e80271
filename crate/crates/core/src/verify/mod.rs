//! Empirical geometric verification: univalence falsification by pair
//! scanning with Newton-based collision refinement, covering certification
//! by multistart root finding, linear-connectivity estimation and the
//! end-to-end Landau-Bloch pipeline.
//!
//! Scans falsify, never certify: a clean verdict means "no counterexample
//! found at N samples", and every violation carries a witness that
//! reproduces the violating inequality when re-evaluated standalone.

mod connectivity;
mod newton;
mod pipeline;

pub use connectivity::{
    cloud_connectivity, connectivity_estimate, ConnectivityEstimate, BOUNDARY_RHO,
    DEFAULT_PAIR_BATCH,
};
pub use newton::{damped_newton, multistart_points, NewtonOutcome};
pub use pipeline::{landau_bloch_verify, LandauBlochConfig, LandauBlochReport};

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::pmap::PHMap;
use crate::sampling::SampleStream;
use crate::scalar::{real, to_f64, vec_dist, vec_norm, Real};

/// Scan outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanStatus {
    NoViolation,
    Violation,
}

/// Violation witness; re-evaluating the stored data reproduces the
/// violating inequality within the verdict tolerance.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ScanWitness<T> {
    Collision {
        z1: Vec<Complex<T>>,
        z2: Vec<Complex<T>>,
        domain_dist: T,
        image_dist: T,
    },
    NonpositiveJacobian {
        z: Vec<Complex<T>>,
        det: T,
    },
    UnreachedTarget {
        target: Vec<Complex<T>>,
        best_residual: T,
    },
}

/// Seeded verdict of a falsification scan.
#[derive(Clone, Debug, Serialize)]
pub struct ScanVerdict<T> {
    pub status: ScanStatus,
    pub witness: Option<ScanWitness<T>>,
    pub samples: u64,
    pub tol: T,
    pub seed: u64,
    /// Honest wording of what the scan established.
    pub summary: String,
}

impl<T: Real> ScanVerdict<T> {
    fn new(status: ScanStatus, witness: Option<ScanWitness<T>>, samples: u64, tol: T, seed: u64) -> Self {
        let summary = match status {
            ScanStatus::NoViolation => {
                format!("no counterexample found at {samples} samples")
            }
            ScanStatus::Violation => format!("violation witnessed within {samples} samples"),
        };
        ScanVerdict {
            status,
            witness,
            samples,
            tol,
            seed,
            summary,
        }
    }

    pub fn is_violation(&self) -> bool {
        self.status == ScanStatus::Violation
    }
}

const SCAN_BATCH: u64 = 4096;
/// Fraction of pairs devoted to the stratified near-diagonal batch.
const NEAR_DIAGONAL_SHARE: u64 = 4;
/// Collision refinement budget: the most collision-like pairs are polished
/// by damped Newton before the scan concludes.
const REFINE_CANDIDATES: usize = 64;
const CANDIDATES_PER_BATCH: usize = 8;
/// A genuine collision needs domain separation at least `100 x tol`.
const SEPARATION_FACTOR: f64 = 100.0;

/// `(image/domain distance ratio, pair index, z1, z2)`.
type Candidate<T> = (f64, u64, Vec<Complex<T>>, Vec<Complex<T>>);

struct PairBatchOut<T> {
    violation: Option<(u64, ScanWitness<T>)>,
    candidates: Vec<Candidate<T>>,
}

/// Hunts for univalence violations of `map` on the ball of radius `radius`.
///
/// Three phases, all seeded and reproducible:
/// 1. `pairs` sampled point pairs (uniform, plus a stratified near-diagonal
///    quarter with separations log-spread over `[10 tol, 0.1 radius]`);
///    a pair violates when `||f(z1) - f(z2)|| <= tol` while
///    `||z1 - z2|| >= 100 tol`.
/// 2. a sense-preservation flag: any sampled point with `det J_f <= 0`
///    (evaluated through the real Jacobian, which needs no `Dh` inversion)
///    is a local violation.
/// 3. the most collision-like pairs (smallest image/domain distance ratio)
///    are refined by damped Newton toward an exact collision; a refined
///    witness is re-checked before it is reported.
///
/// The first violation by deterministic phase and sample index wins.
pub fn univalence_scan<T: Real>(
    map: &PHMap<T>,
    radius: T,
    pairs: u64,
    seed: u64,
    tol: T,
) -> ScanVerdict<T> {
    let n = map.n();
    let radius_f = to_f64(radius);
    let tol_f = to_f64(tol);
    let separation = real::<T>(SEPARATION_FACTOR) * tol;
    let diag_lo = 10.0 * tol_f;
    let diag_hi = 0.1 * radius_f;
    let near_diag = if diag_lo < diag_hi {
        pairs / NEAR_DIAGONAL_SHARE
    } else {
        0
    };
    let uniform = pairs - near_diag;

    let batches = pairs.div_ceil(SCAN_BATCH);
    let outs: Vec<PairBatchOut<T>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut stream = SampleStream::new(seed, b);
            let count = SCAN_BATCH.min(pairs - b * SCAN_BATCH);
            let mut out = PairBatchOut {
                violation: None,
                candidates: Vec::new(),
            };
            for s in 0..count {
                let idx = b * SCAN_BATCH + s;
                let (z1, z2): (Vec<Complex<T>>, Vec<Complex<T>>) = if idx < uniform {
                    (stream.ball_point(n, radius_f), stream.ball_point(n, radius_f))
                } else {
                    let u = stream.uniform_f64();
                    let step = diag_lo * (diag_hi / diag_lo).powf(u);
                    let z1: Vec<Complex<T>> = stream.ball_point(n, radius_f - step);
                    let dir: Vec<Complex<T>> = stream.unit_sphere(n);
                    let step_t = real::<T>(step);
                    let z2 = z1
                        .iter()
                        .zip(&dir)
                        .map(|(a, d)| *a + *d * Complex::new(step_t, T::zero()))
                        .collect();
                    (z1, z2)
                };
                let f1 = map.eval(&z1).expect("dimension fixed by PHMap");
                let f2 = map.eval(&z2).expect("dimension fixed by PHMap");
                let domain_dist = vec_dist(&z1, &z2);
                let image_dist = vec_dist(&f1, &f2);
                if image_dist <= tol && domain_dist >= separation {
                    if out.violation.is_none() {
                        out.violation = Some((
                            idx,
                            ScanWitness::Collision {
                                z1: z1.clone(),
                                z2: z2.clone(),
                                domain_dist,
                                image_dist,
                            },
                        ));
                    }
                    continue;
                }
                for z in [&z1, &z2] {
                    let det = map
                        .real_jacobian(z)
                        .expect("dimension fixed by PHMap")
                        .determinant();
                    if det <= T::zero() && out.violation.is_none() {
                        out.violation = Some((
                            idx,
                            ScanWitness::NonpositiveJacobian {
                                z: z.clone(),
                                det,
                            },
                        ));
                    }
                }
                if domain_dist > T::zero() {
                    let q = to_f64(image_dist / domain_dist);
                    if q.is_finite() {
                        out.candidates.push((q, idx, z1, z2));
                        if out.candidates.len() > CANDIDATES_PER_BATCH {
                            out.candidates.sort_by(|a, b| {
                                a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1))
                            });
                            out.candidates.truncate(CANDIDATES_PER_BATCH);
                        }
                    }
                }
            }
            out
        })
        .collect();

    let mut direct: Option<(u64, ScanWitness<T>)> = None;
    let mut candidates = Vec::new();
    for out in outs {
        if let Some((idx, w)) = out.violation {
            match &direct {
                Some((best, _)) if *best <= idx => {}
                _ => direct = Some((idx, w)),
            }
        }
        candidates.extend(out.candidates);
    }
    if let Some((_, witness)) = direct {
        return ScanVerdict::new(ScanStatus::Violation, Some(witness), pairs, tol, seed);
    }

    candidates.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    candidates.truncate(REFINE_CANDIDATES);
    for (_, _, z1, z2) in &candidates {
        let target = map.eval(z1).expect("dimension fixed by PHMap");
        let outcome = damped_newton(map, &target, z2, tol);
        if !outcome.converged {
            continue;
        }
        let z_star = outcome.z;
        let inside = vec_norm(&z_star) < radius;
        let domain_dist = vec_dist(&z_star, z1);
        if inside && domain_dist >= separation {
            let image_dist = vec_dist(
                &map.eval(&z_star).expect("dimension fixed by PHMap"),
                &target,
            );
            if image_dist <= tol {
                return ScanVerdict::new(
                    ScanStatus::Violation,
                    Some(ScanWitness::Collision {
                        z1: z1.clone(),
                        z2: z_star,
                        domain_dist,
                        image_dist,
                    }),
                    pairs,
                    tol,
                    seed,
                );
            }
        }
    }
    ScanVerdict::new(ScanStatus::NoViolation, None, pairs, tol, seed)
}

/// Covering residual required of a reached target.
pub const COVERING_RESIDUAL: f64 = 1e-9;
const MULTISTART_COUNT: usize = 32;

/// Checks that every sampled target in the ball of radius `target_radius` is
/// reached by `map` from the ball of radius `domain_radius`: damped Newton
/// from 32 deterministic multistart points per target; a target counts as
/// reached when some start converges to `||z|| < domain_radius` with
/// residual below `1e-9`. Non-convergence is a violation report (the hardest
/// unreached target), never an error.
pub fn covering_check<T: Real>(
    map: &PHMap<T>,
    domain_radius: T,
    target_radius: T,
    targets: u64,
    seed: u64,
) -> ScanVerdict<T> {
    let n = map.n();
    let domain_f = to_f64(domain_radius);
    let starts = multistart_points::<T>(n, domain_f, MULTISTART_COUNT);
    let residual_tol = real::<T>(COVERING_RESIDUAL);

    // `(target index, target, best in-domain residual)`
    type Unreached<T> = Option<(u64, Vec<Complex<T>>, T)>;
    let batches = targets.div_ceil(SCAN_BATCH);
    let per_batch: Vec<Unreached<T>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut stream = SampleStream::new(seed, b);
            let count = SCAN_BATCH.min(targets - b * SCAN_BATCH);
            let mut hardest: Option<(u64, Vec<Complex<T>>, T)> = None;
            for s in 0..count {
                let idx = b * SCAN_BATCH + s;
                let w: Vec<Complex<T>> = stream.ball_point(n, to_f64(target_radius));
                let mut best_residual = T::infinity();
                let mut reached = false;
                for start in &starts {
                    let out = damped_newton(map, &w, start, residual_tol);
                    if out.converged && vec_norm(&out.z) < domain_radius {
                        reached = true;
                        break;
                    }
                    if vec_norm(&out.z) < domain_radius && out.residual < best_residual {
                        best_residual = out.residual;
                    }
                }
                if !reached {
                    let replace = match &hardest {
                        None => true,
                        Some((_, _, r)) => best_residual > *r,
                    };
                    if replace {
                        hardest = Some((idx, w, best_residual));
                    }
                }
            }
            hardest
        })
        .collect();

    let mut hardest: Unreached<T> = None;
    for h in per_batch.into_iter().flatten() {
        let replace = match &hardest {
            None => true,
            Some((best_idx, _, r)) => h.2 > *r || (h.2 == *r && h.0 < *best_idx),
        };
        if replace {
            hardest = Some(h);
        }
    }
    match hardest {
        None => ScanVerdict::new(
            ScanStatus::NoViolation,
            None,
            targets,
            residual_tol,
            seed,
        ),
        Some((_, target, best_residual)) => ScanVerdict::new(
            ScanStatus::Violation,
            Some(ScanWitness::UnreachedTarget {
                target,
                best_residual,
            }),
            targets,
            residual_tol,
            seed,
        ),
    }
}

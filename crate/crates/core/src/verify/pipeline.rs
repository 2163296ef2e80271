//! End-to-end Landau-Bloch verification pipeline: from a pluriharmonic
//! mapping satisfying `f(0) = 0`, `Dg(0) = 0`, compute `alpha`, the volume
//! supremum, the closed-form radii, then falsify univalence on the
//! univalence ball and certify covering of the covering ball.

use num_complex::Complex;
use serde::Serialize;

use crate::bloch::{landau_bloch_radii, max_admissible_alpha, BlochInputs, BlochRadii};
use crate::pmap::PHMap;
use crate::sampling::derive_seed;
use crate::scalar::{real, to_f64, vec_norm, Real};
use crate::verify::{covering_check, univalence_scan, ScanVerdict};
use crate::volume::{sup_generalized_volume, VolumeProfile};
use crate::{Error, Result};

/// Stage budgets of the pipeline; every stage seed is derived from `seed`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LandauBlochConfig {
    pub volume_samples: u64,
    pub volume_budget: u32,
    pub scan_pairs: u64,
    pub covering_targets: u64,
    pub tol: f64,
    pub seed: u64,
}

impl Default for LandauBlochConfig {
    fn default() -> Self {
        LandauBlochConfig {
            volume_samples: 200_000,
            volume_budget: 12,
            scan_pairs: 1_000_000,
            covering_targets: 1_000,
            tol: 1e-9,
            seed: 42,
        }
    }
}

/// Structured pipeline report with every intermediate quantity.
#[derive(Clone, Debug, Serialize)]
pub struct LandauBlochReport<T> {
    pub alpha: T,
    pub profile: VolumeProfile<T>,
    pub volume: T,
    pub alpha_cap: T,
    pub radii: BlochRadii<T>,
    pub univalence: ScanVerdict<T>,
    pub covering: ScanVerdict<T>,
    pub pass: bool,
}

/// Runs the pipeline:
///
/// 1. hypotheses `f(0) = 0` and `Dg(0) = 0`;
/// 2. `alpha = |det J_f(0)|`;
/// 3. `V` from the generalized-volume profile (rejected when diverging);
/// 4. the cap `alpha <= 8 V psi0^n / pi`;
/// 5. `(Ru, Rc)` from the closed forms;
/// 6. univalence scan on the ball of radius `Ru`;
/// 7. covering check with domain `Ru` and target `Rc`.
///
/// Overall pass iff both scans report no violation. Hypothesis failures
/// carry the stage identifier.
pub fn landau_bloch_verify<T: Real>(
    f: &PHMap<T>,
    config: &LandauBlochConfig,
) -> Result<LandauBlochReport<T>> {
    let n = f.n();
    let origin = vec![Complex::new(T::zero(), T::zero()); n];
    let f0 = f.eval(&origin).expect("origin has dimension n");
    if vec_norm(&f0) > real::<T>(1e-12) {
        return Err(Error::hypothesis(
            "hypotheses",
            format!("f(0) has norm {}, expected 0", to_f64(vec_norm(&f0))),
            None,
        ));
    }
    let dg0 = f.g().jacobian(&origin).expect("origin has dimension n");
    if dg0.op_norm() > real::<T>(1e-12) {
        return Err(Error::hypothesis(
            "hypotheses",
            format!("||Dg(0)|| = {}, expected 0", to_f64(dg0.op_norm())),
            None,
        ));
    }

    let alpha = f.det_jacobian(&origin)?.abs();

    let profile = sup_generalized_volume(
        f,
        config.volume_samples,
        derive_seed(config.seed, 1),
        config.volume_budget,
    )?;
    if profile.diverged {
        return Err(Error::hypothesis(
            "volume-sup",
            "generalized volume profile keeps growing; f is not in the finite-volume class",
            None,
        ));
    }
    let volume = profile.sup_estimate;

    let alpha_cap = max_admissible_alpha(n, volume);
    let radii = landau_bloch_radii(&BlochInputs { n, alpha, volume })?;

    let univalence = univalence_scan(
        f,
        radii.ru,
        config.scan_pairs,
        derive_seed(config.seed, 2),
        real::<T>(config.tol),
    );
    let covering = covering_check(
        f,
        radii.ru,
        radii.rc,
        config.covering_targets,
        derive_seed(config.seed, 3),
    );
    let pass = !univalence.is_violation() && !covering.is_violation();
    Ok(LandauBlochReport {
        alpha,
        profile,
        volume,
        alpha_cap,
        radii,
        univalence,
        covering,
        pass,
    })
}

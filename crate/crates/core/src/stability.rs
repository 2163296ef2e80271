//! Perturbation families `f_A = h + conj(g) A` and `F_A = h + g A`,
//! perturbation samplers, the collision witness transfer between the two
//! families, the Moebius diagonal identity, the `M'` linear-connectivity
//! formula, the shear-theorem verifier and the no-Bloch counterexample
//! family.

use num_complex::Complex;
use serde::Serialize;

use crate::cmat::CMat;
use crate::pmap::PHMap;
use crate::poly::{Monomial, PolyMap, Sign};
use crate::sampling::{derive_seed, SampleStream};
use crate::scalar::{point_f64, real, to_f64, vec_dist, Real};
use crate::verify::{
    cloud_connectivity, connectivity_estimate, univalence_scan, ConnectivityEstimate, ScanVerdict,
};
use crate::{Error, Result};

/// Families of perturbation matrices, matching the stability definitions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PerturbationKind {
    /// `||A|| <= 1`.
    GeneralContraction,
    /// `||A|| = 1`.
    UnitNorm,
    /// Diagonal with unit-modulus entries.
    UnimodularDiagonal,
    /// Diagonal with entries in the closed unit disk.
    ContractionDiagonal,
}

/// A validated perturbation matrix.
#[derive(Clone, Debug, Serialize)]
pub struct Perturbation<T> {
    pub kind: PerturbationKind,
    pub matrix: CMat<T>,
}

const KIND_TOL: f64 = 1e-12;

impl<T: Real> Perturbation<T> {
    /// Validates the matrix against the invariants of its kind.
    pub fn new(kind: PerturbationKind, matrix: CMat<T>) -> Result<Self> {
        let tol = real::<T>(KIND_TOL);
        match kind {
            PerturbationKind::GeneralContraction => {
                let norm = matrix.op_norm();
                if norm > T::one() + tol {
                    return Err(Error::InvalidPerturbation {
                        detail: format!("contraction with op norm {}", to_f64(norm)),
                    });
                }
            }
            PerturbationKind::UnitNorm => {
                let norm = matrix.op_norm();
                if (norm - T::one()).abs() > tol {
                    return Err(Error::InvalidPerturbation {
                        detail: format!("unit-norm matrix with op norm {}", to_f64(norm)),
                    });
                }
            }
            PerturbationKind::UnimodularDiagonal | PerturbationKind::ContractionDiagonal => {
                if !matrix.is_diagonal() {
                    return Err(Error::InvalidPerturbation {
                        detail: "diagonal kind with off-diagonal entries".to_string(),
                    });
                }
                for j in 0..matrix.n() {
                    let m = matrix.get(j, j).norm();
                    let ok = match kind {
                        PerturbationKind::UnimodularDiagonal => (m - T::one()).abs() <= tol,
                        _ => m <= T::one() + tol,
                    };
                    if !ok {
                        return Err(Error::InvalidPerturbation {
                            detail: format!("diagonal entry {j} with modulus {}", to_f64(m)),
                        });
                    }
                }
            }
        }
        Ok(Perturbation { kind, matrix })
    }

    /// The identity matrix, valid for every kind.
    pub fn identity(kind: PerturbationKind, n: usize) -> Self {
        Perturbation {
            kind,
            matrix: CMat::identity(n),
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.matrix.n()
    }
}

/// Samples one perturbation of the given kind:
///
/// * general contraction: entries uniform on the square `[-1,1]^2`, rescaled
///   to a uniform target norm in `(0, 1]`;
/// * unit norm: same, rescaled to operator norm exactly 1;
/// * unimodular diagonal: `diag(e^{i theta_j})` with uniform phases;
/// * contraction diagonal: diagonal entries uniform in the closed unit disk.
pub fn sample_perturbation<T: Real>(kind: PerturbationKind, n: usize, seed: u64) -> Perturbation<T> {
    let mut stream = SampleStream::new(seed, 0);
    let matrix = match kind {
        PerturbationKind::GeneralContraction | PerturbationKind::UnitNorm => loop {
            let entries: Vec<Complex<T>> = (0..n * n).map(|_| stream.square_complex()).collect();
            let m = CMat::new(n, entries).expect("finite entries by construction");
            let norm = m.op_norm();
            if norm <= T::epsilon() {
                continue;
            }
            let target = match kind {
                PerturbationKind::GeneralContraction => real::<T>(stream.uniform_open_f64()),
                _ => T::one(),
            };
            let scale = Complex::new(target / norm, T::zero());
            break m.scale(scale);
        },
        PerturbationKind::UnimodularDiagonal => {
            let entries: Vec<Complex<T>> = (0..n).map(|_| stream.phase()).collect();
            CMat::diagonal(&entries)
        }
        PerturbationKind::ContractionDiagonal => {
            let entries: Vec<Complex<T>> = (0..n).map(|_| stream.unit_disk()).collect();
            CMat::diagonal(&entries)
        }
    };
    Perturbation::new(kind, matrix).expect("sampled perturbation satisfies its invariants")
}

/// `f_A = h + conj(g A conj(.))`: the pluriharmonic perturbation
/// `h + conj(g) A`, stored as the polynomial pair `(h, g conj(A))` since
/// `conj(g) A = conj(g conj(A))`.
pub fn perturb_pluriharmonic<T: Real>(
    h: &PolyMap<T>,
    g: &PolyMap<T>,
    a: &CMat<T>,
) -> Result<PHMap<T>> {
    let g_a = g.right_mul(&a.conj())?;
    PHMap::new(h.clone(), g_a)
}

/// `F_A = h + g A`, the holomorphic perturbation.
pub fn perturb_holomorphic<T: Real>(
    h: &PolyMap<T>,
    g: &PolyMap<T>,
    a: &CMat<T>,
) -> Result<PolyMap<T>> {
    h.linear_combine(g, a, Sign::Plus)
}

/// The generalized shear holomorphic counterpart `F = h - g`.
pub fn shear_counterpart<T: Real>(f: &PHMap<T>) -> PolyMap<T> {
    f.h()
        .sub(f.g())
        .expect("parts of a PHMap share a dimension")
}

/// Moebius diagonal `C = (A + D)(I + conj(A) D)^{-1}` for a contraction
/// diagonal `A` and a unimodular diagonal `D`; every entry
/// `(lambda_j + e^{i theta_j}) / (1 + conj(lambda_j) e^{i theta_j})` has unit
/// modulus, so `||C|| = 1`.
pub fn moebius_diagonal<T: Real>(a: &Perturbation<T>, d: &Perturbation<T>) -> Result<CMat<T>> {
    if a.kind != PerturbationKind::ContractionDiagonal {
        return Err(Error::InvalidPerturbation {
            detail: "moebius_diagonal needs a contraction-diagonal first argument".to_string(),
        });
    }
    if d.kind != PerturbationKind::UnimodularDiagonal {
        return Err(Error::InvalidPerturbation {
            detail: "moebius_diagonal needs a unimodular-diagonal second argument".to_string(),
        });
    }
    let n = a.n();
    if d.n() != n {
        return Err(Error::DimensionMismatch {
            context: "moebius_diagonal",
            expected: n,
            actual: d.n(),
        });
    }
    let strict = T::one() - real::<T>(1e-9);
    let mut entries = Vec::with_capacity(n);
    for j in 0..n {
        let lambda = a.matrix.get(j, j);
        if lambda.norm() > strict {
            return Err(Error::PreconditionViolated {
                detail: format!(
                    "diagonal entry {j} has modulus {} above the strict-contraction bound",
                    to_f64(lambda.norm())
                ),
            });
        }
        let phase = d.matrix.get(j, j);
        let denominator = Complex::new(T::one(), T::zero()) + lambda.conj() * phase;
        if denominator.norm() < real::<T>(1e-9) {
            return Err(Error::DegenerateDenominator {
                index: j,
                modulus: to_f64(denominator.norm()),
            });
        }
        entries.push((lambda + phase) / denominator);
    }
    Ok(CMat::diagonal(&entries))
}

/// Transfers a collision of the holomorphic family to the pluriharmonic one.
///
/// Given a genuine collision `(h + g A0)(z1) = (h + g A0)(z2)`, builds
/// `B = diag(e^{-i theta_j})` with `theta_j = arg(h_j(z1) - h_j(z2))`
/// (`theta_j = 0` where the component difference vanishes) and returns
/// `A = conj(A0) conj(B)^2` together with the residual
/// `||f_A(z1) - f_A(z2)||` for `f_A = h + conj(g) A`. The construction
/// multiplies by unitary diagonals only, so `||A|| = ||A0||`.
pub fn transfer_collision<T: Real>(
    h: &PolyMap<T>,
    g: &PolyMap<T>,
    a0: &Perturbation<T>,
    z1: &[Complex<T>],
    z2: &[Complex<T>],
) -> Result<(Perturbation<T>, T)> {
    let collision_tol = real::<T>(1e-9);
    if vec_dist(z1, z2) <= collision_tol {
        return Err(Error::NotACollision {
            detail: "z1 and z2 coincide".to_string(),
        });
    }
    let f_a0 = perturb_holomorphic(h, g, &a0.matrix)?;
    let gap = vec_dist(&f_a0.eval(z1)?, &f_a0.eval(z2)?);
    if gap > collision_tol {
        return Err(Error::NotACollision {
            detail: format!(
                "||F_A0(z1) - F_A0(z2)|| = {} above the collision tolerance 1e-9",
                to_f64(gap)
            ),
        });
    }
    let h1 = h.eval(z1)?;
    let h2 = h.eval(z2)?;
    let diff: Vec<Complex<T>> = h1.iter().zip(&h2).map(|(a, b)| *a - *b).collect();
    if diff.iter().all(|d| d.norm() <= real::<T>(1e-12)) {
        return Err(Error::Case1Unsupported);
    }
    let n = h.n();
    let mut a = a0.matrix.conj();
    for j in 0..n {
        // column j of conj(A0) scaled by conj(B)^2_jj = e^{2 i theta_j}
        let theta = diff[j].arg();
        let two_theta = theta + theta;
        let phase = Complex::new(two_theta.cos(), two_theta.sin());
        for k in 0..n {
            a.set(k, j, a.get(k, j) * phase);
        }
    }
    let f_a = perturb_pluriharmonic(h, g, &a)?;
    let residual = vec_dist(&f_a.eval(z1)?, &f_a.eval(z2)?);
    let perturbation = Perturbation::new(a0.kind, a)?;
    Ok((perturbation, residual))
}

/// `M' = M (1 + C) / (1 - (1 + 2M) C)`, defined for `M >= 1`, `0 <= C` and
/// `C < 1 / (2M + 1)`; strictly increasing in both arguments there.
pub fn mprime<T: Real>(m: T, c: T) -> Result<T> {
    if m < T::one() || c < T::zero() {
        return Err(Error::PreconditionViolated {
            detail: format!(
                "mprime needs M >= 1 and C >= 0, got M = {}, C = {}",
                to_f64(m),
                to_f64(c)
            ),
        });
    }
    let bound = (real::<T>(2.0) * m + T::one()).recip();
    if c >= bound {
        return Err(Error::PreconditionViolated {
            detail: format!(
                "C = {} at or above the admissible bound 1/(2M+1) = {}",
                to_f64(c),
                to_f64(bound)
            ),
        });
    }
    Ok(m * (T::one() + c) / (T::one() - (T::one() + real::<T>(2.0) * m) * c))
}

/// Univalence-scan budget shared by the stability drivers.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct UnivalenceConfig {
    pub radius: f64,
    pub pairs: u64,
    pub tol: f64,
}

impl Default for UnivalenceConfig {
    fn default() -> Self {
        UnivalenceConfig {
            radius: 0.9,
            pairs: 20_000,
            tol: 1e-9,
        }
    }
}

/// Per-perturbation scan outcome.
#[derive(Clone, Debug, Serialize)]
pub struct PerturbationScan<T> {
    pub index: u64,
    pub perturbation: Perturbation<T>,
    /// Scan of the pluriharmonic family member `f_A = h + conj(g) A`.
    pub pluriharmonic: ScanVerdict<T>,
    /// Scan of the holomorphic family member `F_A = h + g A`.
    pub holomorphic: ScanVerdict<T>,
}

/// Aggregate of a stability scan.
#[derive(Clone, Debug, Serialize)]
pub struct StabilityScanReport<T> {
    pub kind: PerturbationKind,
    pub scans: Vec<PerturbationScan<T>>,
    pub violations: u64,
    pub pass: bool,
    /// Finite scans falsify only; recorded in the report wording.
    pub note: String,
}

/// Scans the families `f_A` and `F_A` over sampled perturbations of one
/// kind. Index 0 is always the identity perturbation so the unperturbed
/// family members are covered; indices `1..count` are sampled with derived
/// seeds.
pub fn stability_scan<T: Real>(
    h: &PolyMap<T>,
    g: &PolyMap<T>,
    kind: PerturbationKind,
    count: u64,
    config: &UnivalenceConfig,
    seed: u64,
) -> Result<StabilityScanReport<T>> {
    if count == 0 {
        return Err(Error::PreconditionViolated {
            detail: "stability_scan needs at least one perturbation".to_string(),
        });
    }
    if h.n() != g.n() {
        return Err(Error::DimensionMismatch {
            context: "stability_scan parts",
            expected: h.n(),
            actual: g.n(),
        });
    }
    let n = h.n();
    let mut scans = Vec::with_capacity(count as usize);
    let mut violations = 0u64;
    for index in 0..count {
        let perturbation = if index == 0 {
            Perturbation::identity(kind, n)
        } else {
            sample_perturbation(kind, n, derive_seed(seed, index))
        };
        let f_a = perturb_pluriharmonic(h, g, &perturbation.matrix)?;
        let big_f_a = perturb_holomorphic(h, g, &perturbation.matrix)?;
        let radius = real::<T>(config.radius);
        let tol = real::<T>(config.tol);
        let pluriharmonic = univalence_scan(
            &f_a,
            radius,
            config.pairs,
            derive_seed(seed, 1_000 + 2 * index),
            tol,
        );
        let holomorphic = univalence_scan(
            &PHMap::from_holomorphic(big_f_a),
            radius,
            config.pairs,
            derive_seed(seed, 1_000 + 2 * index + 1),
            tol,
        );
        if pluriharmonic.is_violation() {
            violations += 1;
        }
        if holomorphic.is_violation() {
            violations += 1;
        }
        scans.push(PerturbationScan {
            index,
            perturbation,
            pluriharmonic,
            holomorphic,
        });
    }
    Ok(StabilityScanReport {
        kind,
        scans,
        violations,
        pass: violations == 0,
        note: "finite perturbation scans falsify only; a pass means no counterexample found"
            .to_string(),
    })
}

/// Which part of the shear theorem to verify.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ShearPart {
    /// Hypotheses on `F = h - g`; conclusion on `f_A = h + conj(g) A`.
    I,
    /// Hypotheses on `f = h + conj(g)`; conclusion on `F_A = h - g A`.
    II,
}

/// Budgets of the shear verifier.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ShearConfig {
    pub omega_grid_points: usize,
    pub connectivity_points: usize,
    pub k_neighbors: usize,
    pub scan: UnivalenceConfig,
}

impl Default for ShearConfig {
    fn default() -> Self {
        ShearConfig {
            omega_grid_points: 1_000,
            connectivity_points: 800,
            k_neighbors: 8,
            scan: UnivalenceConfig {
                radius: 1.0,
                pairs: 20_000,
                tol: 1e-9,
            },
        }
    }
}

/// Outcome of the shear verifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShearStatus {
    Pass,
    Fail,
    /// The empirical hypothesis `C < 1/(2 M_hat + 1)` fails; informative,
    /// not a test failure.
    NotApplicable,
}

/// Report of one shear verification run.
#[derive(Clone, Debug, Serialize)]
pub struct ShearVerifyReport<T> {
    pub part: ShearPart,
    /// Max of `||omega||` over the sample grid in the ball of radius 0.95.
    pub c_max: T,
    /// Connectivity estimate of the unperturbed image.
    pub m_hat: T,
    /// `1 / (2 M_hat + 1)`.
    pub hypothesis_bound: T,
    pub m_prime: Option<T>,
    pub perturbed_scan: Option<ScanVerdict<T>>,
    pub m_hat_perturbed: Option<T>,
    /// Sampling slack applied to the `M_hat' <= M'` comparison.
    pub slack_factor: T,
    pub status: ShearStatus,
    pub note: String,
}

/// Slack factor for comparing the perturbed connectivity estimate against
/// `M'`: the estimator is a lower bound, so the comparison carries 15%.
pub const SHEAR_SLACK: f64 = 1.15;

/// Verifies one instance of the shear theorem:
///
/// 1. `C = max ||omega||` over a sample grid in the ball of radius 0.95;
/// 2. `M_hat` = connectivity estimate of the image of `F = h - g` (part I)
///    or `f` (part II);
/// 3. requires `C < 1/(2 M_hat + 1)`, otherwise `NotApplicable`;
/// 4. `M' = mprime(M_hat, C)`;
/// 5. univalence scan of the perturbed member (`f_A` for part I,
///    `F_A = h - g A` for part II) must find no violation;
/// 6. the perturbed connectivity estimate must satisfy
///    `M_hat' <= 1.15 M'`.
///
/// Since `M_hat` underestimates the true `M`, passing the empirical
/// hypothesis is necessary but not sufficient for the theorem hypothesis;
/// the report says so.
pub fn shear_verify<T: Real>(
    f: &PHMap<T>,
    part: ShearPart,
    a: &Perturbation<T>,
    config: &ShearConfig,
    seed: u64,
) -> Result<ShearVerifyReport<T>> {
    let note = "M_hat is a sampled lower estimate of the true M; the empirical hypothesis \
                C < 1/(2 M_hat + 1) is necessary, not sufficient, for the theorem hypothesis"
        .to_string();
    let norm_a = a.matrix.op_norm();
    if norm_a > T::one() + real::<T>(KIND_TOL) {
        return Err(Error::PreconditionViolated {
            detail: format!("perturbation norm {} above 1", to_f64(norm_a)),
        });
    }
    let h = f.h();
    let g = f.g();

    // (pre) the unperturbed map of the relevant part must scan clean
    let base_map = match part {
        ShearPart::I => PHMap::from_holomorphic(shear_counterpart(f)),
        ShearPart::II => f.clone(),
    };
    let base_scan = univalence_scan(
        &base_map,
        real::<T>(config.scan.radius),
        config.scan.pairs,
        derive_seed(seed, 10),
        real::<T>(config.scan.tol),
    );
    if base_scan.is_violation() {
        return Err(Error::PreconditionViolated {
            detail: "the unperturbed map already fails its univalence scan".to_string(),
        });
    }

    // (1) dilatation bound over the sample grid
    let mut stream = SampleStream::new(derive_seed(seed, 11), 0);
    let mut c_max = T::zero();
    for _ in 0..config.omega_grid_points {
        let z: Vec<Complex<T>> = stream.ball_point(f.n(), 0.95);
        let omega = match f.omega(&z) {
            Ok(om) => om,
            Err(Error::DhSingular { point, min_gain }) => {
                return Err(Error::hypothesis(
                    "local-biholomorphy",
                    format!("Dh singular on the sample grid (min gain {min_gain:.3e})"),
                    Some(point),
                ))
            }
            Err(e) => return Err(e),
        };
        c_max = c_max.max(omega.op_norm());
    }

    // (2) connectivity of the unperturbed image
    let m_est = connectivity_estimate(
        &base_map,
        1.0,
        config.connectivity_points,
        config.k_neighbors,
        derive_seed(seed, 12),
    )?;
    let m_hat = m_est.m_hat.max(T::one());
    let hypothesis_bound = (real::<T>(2.0) * m_hat + T::one()).recip();
    let slack_factor = real::<T>(SHEAR_SLACK);

    // (3) empirical hypothesis
    if c_max >= hypothesis_bound {
        return Ok(ShearVerifyReport {
            part,
            c_max,
            m_hat,
            hypothesis_bound,
            m_prime: None,
            perturbed_scan: None,
            m_hat_perturbed: None,
            slack_factor,
            status: ShearStatus::NotApplicable,
            note,
        });
    }

    // (4) the distortion formula
    let m_prime = mprime(m_hat, c_max)?;

    // (5) univalence of the perturbed member
    let perturbed: PHMap<T> = match part {
        ShearPart::I => perturb_pluriharmonic(h, g, &a.matrix)?,
        ShearPart::II => {
            PHMap::from_holomorphic(h.linear_combine(g, &a.matrix, Sign::Minus)?)
        }
    };
    let perturbed_scan = univalence_scan(
        &perturbed,
        real::<T>(config.scan.radius),
        config.scan.pairs,
        derive_seed(seed, 13),
        real::<T>(config.scan.tol),
    );

    // (6) connectivity of the perturbed image
    let m_perturbed = connectivity_estimate(
        &perturbed,
        1.0,
        config.connectivity_points,
        config.k_neighbors,
        derive_seed(seed, 14),
    )?;
    let m_hat_perturbed = m_perturbed.m_hat;

    let pass = !perturbed_scan.is_violation() && m_hat_perturbed <= slack_factor * m_prime;
    Ok(ShearVerifyReport {
        part,
        c_max,
        m_hat,
        hypothesis_bound,
        m_prime: Some(m_prime),
        perturbed_scan: Some(perturbed_scan),
        m_hat_perturbed: Some(m_hat_perturbed),
        slack_factor,
        status: if pass {
            ShearStatus::Pass
        } else {
            ShearStatus::Fail
        },
        note,
    })
}

/// The no-Bloch counterexample family
/// `f_k(z) = (k z_1, z_2 / k, z_3, ..., z_n)` as a pluriharmonic map with
/// `g = 0`; `det J_{f_k}(0) = 1` and `f_k(0) = 0` for every `k`.
pub fn counterexample_family<T: Real>(k: u32, n: usize) -> Result<PHMap<T>> {
    if n < 2 {
        return Err(Error::PreconditionViolated {
            detail: format!("counterexample family needs n >= 2, got {n}"),
        });
    }
    if k < 1 {
        return Err(Error::PreconditionViolated {
            detail: "counterexample family needs k >= 1".to_string(),
        });
    }
    let kf = real::<T>(k as f64);
    let mut terms = Vec::with_capacity(n);
    for j in 0..n {
        let coeff = match j {
            0 => Complex::new(kf, T::zero()),
            1 => Complex::new(kf.recip(), T::zero()),
            _ => Complex::new(T::one(), T::zero()),
        };
        let mut e = vec![0u32; n];
        e[j] = 1;
        terms.push(Monomial::new(j, e, coeff));
    }
    let h = PolyMap::new(n, terms)?;
    PHMap::new(h, PolyMap::zero(n))
}

/// Convenience: connectivity estimate of a raw cloud, re-exported here so
/// stability drivers and synthetic-cloud tests share a single entry point.
pub fn cloud_m_hat<T: Real>(
    cloud: &[Vec<Complex<T>>],
    k_neighbors: usize,
    pairs: u64,
    seed: u64,
) -> Result<ConnectivityEstimate<T>> {
    cloud_connectivity(cloud, k_neighbors, pairs, seed)
}

/// Reports the matrix as `[re, im]` rows, used by CLI witnesses.
pub fn matrix_witness<T: Real>(m: &CMat<T>) -> Vec<Vec<[f64; 2]>> {
    (0..m.n())
        .map(|i| point_f64(&(0..m.n()).map(|j| m.get(i, j)).collect::<Vec<_>>()))
        .collect()
}

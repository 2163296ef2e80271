//! Closed-form Landau-Bloch constants and radius formulas, plus the cited
//! growth, Schwarz-dilatation and bounded-map bounds as runnable grid checks.
//!
//! Everything is computed from exact radicals at full floating precision.

use num_complex::Complex;
use serde::Serialize;

use crate::pmap::PHMap;
use crate::sampling::SampleStream;
use crate::scalar::{point_f64, real, to_f64, vec_norm, Real};
use crate::{Error, Result};

/// The four closed-form constants.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BlochConstants<T> {
    /// `psi_0 = (11 + 5 sqrt(5)) / 2`, the minimum of [`psi`].
    pub psi0: T,
    /// `r_0 = (sqrt(5) - 1) / 2`, the minimizer of [`psi`].
    pub r0: T,
    /// `t* = 2 - sqrt(2)`, the maximizer of [`nu`].
    pub t_star: T,
    /// `nu(t*) = 3 - 2 sqrt(2)`.
    pub nu_max: T,
}

/// Inputs of the radius computation.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BlochInputs<T> {
    pub n: usize,
    /// `alpha = |det J_f(0)|`.
    pub alpha: T,
    /// `V = sup_{0<r<1} V_f(r)`.
    pub volume: T,
}

/// Radii and the sampled `rho(t)` table.
#[derive(Clone, Debug, Serialize)]
pub struct BlochRadii<T> {
    pub psi0: T,
    pub r0: T,
    pub t_star: T,
    pub nu_max: T,
    /// `(t, rho(t))` on the fixed grid `t = k/1000`, `k = 1..=999`.
    pub rho: Vec<(T, T)>,
    /// Univalence radius.
    pub ru: T,
    /// Covering radius.
    pub rc: T,
}

/// One failed grid point of a check.
#[derive(Clone, Debug, Serialize)]
pub struct GridWitness<T> {
    pub z: Vec<Complex<T>>,
    pub lhs: T,
    pub rhs: T,
}

/// Outcome of a pointwise inequality check over a grid.
#[derive(Clone, Debug, Serialize)]
pub struct GridCheckVerdict<T> {
    pub pass: bool,
    pub checked: usize,
    pub witnesses: Vec<GridWitness<T>>,
}

/// Multiplicative slack used by all grid checks.
const GRID_SLACK: f64 = 1e-9;

/// Internal sampling used to screen `sup ||omega|| < 1` and `sup ||f|| <= 1`
/// hypotheses: radius, point count and a fixed stream seed.
const HYPOTHESIS_RADIUS: f64 = 0.995;
const HYPOTHESIS_POINTS: usize = 512;
const HYPOTHESIS_SEED: u64 = 0x706c_7572_6968_6172;

pub fn constants<T: Real>() -> BlochConstants<T> {
    let five: T = real(5.0);
    let s5 = five.sqrt();
    let s2 = T::SQRT_2();
    let two = real::<T>(2.0);
    BlochConstants {
        psi0: (real::<T>(11.0) + five * s5) / two,
        r0: (s5 - T::one()) / two,
        t_star: two - s2,
        nu_max: real::<T>(3.0) - two * s2,
    }
}

/// `psi(r) = (1 + r) / (r^2 (1 - r))` on `(0, 1)`; minimized at `r0` with
/// minimum `psi0`.
pub fn psi<T: Real>(r: T) -> Result<T> {
    if r <= T::zero() || r >= T::one() {
        return Err(Error::DomainError {
            context: format!("psi argument {} outside (0, 1)", to_f64(r)),
        });
    }
    Ok((T::one() + r) / (r * r * (T::one() - r)))
}

/// `nu(t) = t (1 - t) / (2 - t)`; maximized at `t*` with maximum `3 - 2 sqrt 2`.
pub fn nu<T: Real>(t: T) -> T {
    t * (T::one() - t) / (real::<T>(2.0) - t)
}

/// Argmin of `psi` over a uniform grid on `(0.01, 0.99)` refined by
/// golden-section search. Serves as the numeric cross-check of `r0`.
pub fn psi_grid_argmin<T: Real>(grid_points: usize) -> T {
    let lo = 0.01;
    let hi = 0.99;
    let mut best_t = lo;
    let mut best_v = f64::INFINITY;
    for k in 0..grid_points {
        let t = lo + (hi - lo) * (k as f64 + 0.5) / grid_points as f64;
        let v = to_f64(psi::<T>(real(t)).expect("grid point inside (0,1)"));
        if v < best_v {
            best_v = v;
            best_t = t;
        }
    }
    let step = (hi - lo) / grid_points as f64;
    let mut a = (best_t - step).max(lo);
    let mut b = (best_t + step).min(hi);
    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let eval = |t: f64| to_f64(psi::<T>(real(t)).expect("bracket inside (0,1)"));
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = eval(c);
    let mut fd = eval(d);
    for _ in 0..200 {
        if (b - a).abs() < 1e-12 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = eval(d);
        }
    }
    real((a + b) / 2.0)
}

/// Largest `alpha` admissible for the given `(n, V)`: `8 V psi0^n / pi`.
pub fn max_admissible_alpha<T: Real>(n: usize, volume: T) -> T {
    let k = constants::<T>();
    real::<T>(8.0) * volume * k.psi0.powi(n as i32) / T::PI()
}

/// Computes the univalence and covering radii
///
/// ```text
/// Ru = alpha pi (sqrt 5 - 1)(3 - 2 sqrt 2) / (8 V psi0^n)
/// Rc = alpha^2 pi (sqrt 5 - 1)(3 - 2 sqrt 2) / (16 V^{(4n-1)/(2n)} psi0^{(4n-1)/2})
/// ```
///
/// together with the table of `rho(t) = alpha pi (1 - t) / (4 V psi0^n (2 - t))`.
/// The identity `Ru = r0 t* rho(t*)` is asserted to `1e-12` relative.
pub fn landau_bloch_radii<T: Real>(inputs: &BlochInputs<T>) -> Result<BlochRadii<T>> {
    let k = constants::<T>();
    let n = inputs.n;
    let alpha = inputs.alpha;
    let volume = inputs.volume;
    let positive = |x: T| x.is_finite() && x > T::zero();
    if !positive(alpha) || !positive(volume) {
        return Err(Error::DomainError {
            context: "alpha and volume must be positive".to_string(),
        });
    }
    let cap = max_admissible_alpha(n, volume);
    if alpha > cap {
        return Err(Error::hypothesis(
            "alpha-cap",
            format!(
                "alpha = {} exceeds the maximum admissible {} = 8 V psi0^n / pi",
                to_f64(alpha),
                to_f64(cap)
            ),
            None,
        ));
    }
    let pi = T::PI();
    let five: T = real(5.0);
    let s5m1 = five.sqrt() - T::one();
    let psi0_n = k.psi0.powi(n as i32);
    let ru = alpha * pi * s5m1 * k.nu_max / (real::<T>(8.0) * volume * psi0_n);
    let exponent = (4.0 * n as f64 - 1.0) / (2.0 * n as f64);
    let v_pow = real::<T>(to_f64(volume).powf(exponent));
    let psi_pow = real::<T>(to_f64(k.psi0).powf((4.0 * n as f64 - 1.0) / 2.0));
    let rc = alpha * alpha * pi * s5m1 * k.nu_max / (real::<T>(16.0) * v_pow * psi_pow);
    let rho_at = |t: T| -> T {
        alpha * pi * (T::one() - t) / (real::<T>(4.0) * volume * psi0_n * (real::<T>(2.0) - t))
    };
    let rho: Vec<(T, T)> = (1..1000)
        .map(|j| {
            let t = real::<T>(j as f64 / 1000.0);
            (t, rho_at(t))
        })
        .collect();
    let ru_alt = k.r0 * k.t_star * rho_at(k.t_star);
    let rel = (to_f64(ru) - to_f64(ru_alt)).abs() / to_f64(ru).abs().max(f64::MIN_POSITIVE);
    if rel > 1e-12 {
        return Err(Error::InternalInconsistency {
            detail: format!("Ru closed form and r0 t* rho(t*) differ by {rel:.3e} relative"),
        });
    }
    Ok(BlochRadii {
        psi0: k.psi0,
        r0: k.r0,
        t_star: k.t_star,
        nu_max: k.nu_max,
        rho,
        ru,
        rc,
    })
}

fn omega_norm_at<T: Real>(f: &PHMap<T>, z: &[Complex<T>]) -> Result<T> {
    f.omega(z).map(|om| om.op_norm())
}

/// Screens the sampled `sup ||omega|| < 1` hypothesis over an internal ball
/// sample; returns the witness on failure.
fn screen_omega_sup<T: Real>(f: &PHMap<T>) -> Result<()> {
    let mut stream = SampleStream::new(HYPOTHESIS_SEED, 0);
    for _ in 0..HYPOTHESIS_POINTS {
        let z: Vec<Complex<T>> = stream.ball_point(f.n(), HYPOTHESIS_RADIUS);
        let norm = omega_norm_at(f, &z)?;
        if norm >= T::one() {
            return Err(Error::hypothesis(
                "omega-sup",
                format!("sampled ||omega|| = {} >= 1", to_f64(norm)),
                Some(point_f64(&z)),
            ));
        }
    }
    Ok(())
}

fn check_dg_zero_at_origin<T: Real>(f: &PHMap<T>) -> Result<()> {
    let origin = vec![Complex::new(T::zero(), T::zero()); f.n()];
    let dg0 = f.g().jacobian(&origin).expect("origin has dimension n");
    if dg0.op_norm() > real::<T>(1e-12) {
        return Err(Error::hypothesis(
            "dg-origin",
            format!("||Dg(0)|| = {} is not 0", to_f64(dg0.op_norm())),
            None,
        ));
    }
    Ok(())
}

/// Growth bound check: `Lambda_f(z)^{2n} <= K_r^n V / (r - ||z||)^{2n}` at
/// every grid point with multiplicative slack `1 + 1e-9`.
///
/// Hypotheses screened first: `f(0) = 0`, `Dg(0) = 0`, sampled
/// `sup ||omega|| < 1`; every grid point must satisfy `||z|| < r`.
pub fn growth_bound_check<T: Real>(
    f: &PHMap<T>,
    volume: T,
    r: T,
    grid: &[Vec<Complex<T>>],
) -> Result<GridCheckVerdict<T>> {
    if r <= T::zero() || r >= T::one() {
        return Err(Error::DomainError {
            context: format!("growth bound radius {} outside (0, 1)", to_f64(r)),
        });
    }
    let origin = vec![Complex::new(T::zero(), T::zero()); f.n()];
    let f0 = f.eval(&origin).expect("origin has dimension n");
    if vec_norm(&f0) > real::<T>(1e-12) {
        return Err(Error::hypothesis("f-origin", "f(0) is not 0", None));
    }
    check_dg_zero_at_origin(f)?;
    screen_omega_sup(f)?;
    let n = f.n() as i32;
    let k_r = (T::one() + r) / (T::one() - r);
    let slack = T::one() + real::<T>(GRID_SLACK);
    let mut witnesses = Vec::new();
    for z in grid {
        let norm_z = vec_norm(z);
        if norm_z >= r {
            return Err(Error::PreconditionViolated {
                detail: format!(
                    "grid point with ||z|| = {} outside the ball of radius {}",
                    to_f64(norm_z),
                    to_f64(r)
                ),
            });
        }
        let (lambda_big, _) = f.lambda_extremes(z)?;
        let lhs = lambda_big.powi(2 * n);
        let rhs = k_r.powi(n) * volume / (r - norm_z).powi(2 * n);
        if lhs > rhs * slack {
            witnesses.push(GridWitness {
                z: z.clone(),
                lhs,
                rhs,
            });
        }
    }
    Ok(GridCheckVerdict {
        pass: witnesses.is_empty(),
        checked: grid.len(),
        witnesses,
    })
}

/// Schwarz dilatation check: `||omega(z)|| <= ||z|| + 1e-9` at every grid
/// point, under the hypotheses `Dg(0) = 0` and sampled `sup ||omega|| < 1`.
pub fn schwarz_omega_check<T: Real>(
    f: &PHMap<T>,
    grid: &[Vec<Complex<T>>],
) -> Result<GridCheckVerdict<T>> {
    check_dg_zero_at_origin(f)?;
    screen_omega_sup(f)?;
    let slack = real::<T>(GRID_SLACK);
    let mut witnesses = Vec::new();
    for z in grid {
        let norm = omega_norm_at(f, z)?;
        let bound = vec_norm(z) + slack;
        if norm > bound {
            witnesses.push(GridWitness {
                z: z.clone(),
                lhs: norm,
                rhs: bound,
            });
        }
    }
    Ok(GridCheckVerdict {
        pass: witnesses.is_empty(),
        checked: grid.len(),
        witnesses,
    })
}

/// Bounded-map bounds: for `f` mapping into the closed unit ball,
/// `Lambda_f(z) <= (4/pi) / (1 - ||z||^2)` at every grid point, and when
/// `f(0) = 0` also `||f(z)|| <= (4/pi) arctan ||z||`.
///
/// The image containment is screened on an internal dense sample first.
pub fn bounded_map_bound_check<T: Real>(
    f: &PHMap<T>,
    grid: &[Vec<Complex<T>>],
) -> Result<GridCheckVerdict<T>> {
    let mut stream = SampleStream::new(HYPOTHESIS_SEED, 1);
    for _ in 0..HYPOTHESIS_POINTS {
        let z: Vec<Complex<T>> = stream.ball_point(f.n(), HYPOTHESIS_RADIUS);
        let image = vec_norm(&f.eval(&z).expect("dimension fixed"));
        if image > T::one() + real::<T>(GRID_SLACK) {
            return Err(Error::hypothesis(
                "image-ball",
                format!("sampled ||f(z)|| = {} leaves the closed unit ball", to_f64(image)),
                Some(point_f64(&z)),
            ));
        }
    }
    let origin = vec![Complex::new(T::zero(), T::zero()); f.n()];
    let f0_norm = vec_norm(&f.eval(&origin).expect("origin has dimension n"));
    let check_arctan = f0_norm <= real::<T>(1e-12);
    let four_over_pi = real::<T>(4.0) / T::PI();
    let slack = T::one() + real::<T>(GRID_SLACK);
    let mut witnesses = Vec::new();
    for z in grid {
        let norm_z = vec_norm(z);
        let (lambda_big, _) = f.lambda_extremes(z)?;
        let bound = four_over_pi / (T::one() - norm_z * norm_z);
        if lambda_big > bound * slack {
            witnesses.push(GridWitness {
                z: z.clone(),
                lhs: lambda_big,
                rhs: bound,
            });
            continue;
        }
        if check_arctan {
            let image = vec_norm(&f.eval(z).expect("dimension fixed"));
            let arctan_bound = four_over_pi * norm_z.atan();
            if image > arctan_bound * slack {
                witnesses.push(GridWitness {
                    z: z.clone(),
                    lhs: image,
                    rhs: arctan_bound,
                });
            }
        }
    }
    Ok(GridCheckVerdict {
        pass: witnesses.is_empty(),
        checked: grid.len(),
        witnesses,
    })
}

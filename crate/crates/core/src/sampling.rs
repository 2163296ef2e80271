//! Seeded sampling streams.
//!
//! Every stochastic routine in the crate draws from a [`SampleStream`]: a
//! ChaCha8 generator addressed by `(seed, stream)`. Raw `u64` output is
//! mapped to uniforms in-house so results are bit-stable across library
//! versions and platforms; scalars are produced in `f64` and converted to the
//! working type at the edge.

use num_complex::Complex;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scalar::{real, Real};

const TWO_POW_NEG53: f64 = 1.0 / ((1u64 << 53) as f64);

/// Deterministic stream of samples addressed by `(seed, stream)`.
pub struct SampleStream {
    rng: ChaCha8Rng,
}

impl SampleStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        SampleStream { rng }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn uniform_f64(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * TWO_POW_NEG53
    }

    /// Uniform in `(0, 1]`.
    #[inline]
    pub fn uniform_open_f64(&mut self) -> f64 {
        1.0 - self.uniform_f64()
    }

    /// Uniform in `[lo, hi)`.
    #[inline]
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform_f64()
    }

    /// Standard normal pair via Box-Muller.
    pub fn normal_pair(&mut self) -> (f64, f64) {
        let u = self.uniform_open_f64();
        let v = self.uniform_f64();
        let r = (-2.0 * u.ln()).sqrt();
        let angle = std::f64::consts::TAU * v;
        (r * angle.cos(), r * angle.sin())
    }

    fn unit_sphere_f64(&mut self, n: usize) -> Vec<(f64, f64)> {
        loop {
            let mut g = Vec::with_capacity(n);
            let mut norm_sq = 0.0;
            for _ in 0..n {
                let (a, b) = self.normal_pair();
                norm_sq += a * a + b * b;
                g.push((a, b));
            }
            if norm_sq > 1e-300 {
                let inv = norm_sq.sqrt().recip();
                for p in &mut g {
                    p.0 *= inv;
                    p.1 *= inv;
                }
                return g;
            }
        }
    }

    /// Uniform point on the complex unit sphere of `C^n` (the real sphere
    /// `S^{2n-1}`).
    pub fn unit_sphere<T: Real>(&mut self, n: usize) -> Vec<Complex<T>> {
        self.unit_sphere_f64(n)
            .into_iter()
            .map(|(a, b)| Complex::new(real(a), real(b)))
            .collect()
    }

    /// Uniform point in the ball of radius `r` in `C^n`:
    /// Gaussian direction, radius `U^{1/(2n)} r`.
    pub fn ball_point<T: Real>(&mut self, n: usize, r: f64) -> Vec<Complex<T>> {
        let dir = self.unit_sphere_f64(n);
        let u = self.uniform_f64();
        let rad = r * u.powf(1.0 / (2 * n) as f64);
        dir.into_iter()
            .map(|(a, b)| Complex::new(real(a * rad), real(b * rad)))
            .collect()
    }

    /// Unit-modulus complex scalar with uniform phase.
    pub fn phase<T: Real>(&mut self) -> Complex<T> {
        let angle = std::f64::consts::TAU * self.uniform_f64();
        Complex::new(real(angle.cos()), real(angle.sin()))
    }

    /// Uniform point of the closed unit disk (radius `sqrt(U)`).
    pub fn unit_disk<T: Real>(&mut self) -> Complex<T> {
        let rad = self.uniform_f64().sqrt();
        let angle = std::f64::consts::TAU * self.uniform_f64();
        Complex::new(real(rad * angle.cos()), real(rad * angle.sin()))
    }

    /// Complex scalar with independent real and imaginary parts uniform on
    /// `[-1, 1]`.
    pub fn square_complex<T: Real>(&mut self) -> Complex<T> {
        let a = self.uniform_in(-1.0, 1.0);
        let b = self.uniform_in(-1.0, 1.0);
        Complex::new(real(a), real(b))
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Derives an independent sub-seed from `(seed, tag)`.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    splitmix64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ splitmix64(tag))
}

/// Seeded grid of `points` uniform samples of the ball of radius `r` in `C^n`.
pub fn ball_grid<T: Real>(n: usize, r: f64, points: usize, seed: u64) -> Vec<Vec<Complex<T>>> {
    let mut stream = SampleStream::new(seed, 0);
    (0..points).map(|_| stream.ball_point(n, r)).collect()
}

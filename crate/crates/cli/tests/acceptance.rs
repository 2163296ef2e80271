#![allow(clippy::needless_range_loop)]

//! Acceptance suite: one test per criterion, each printing a PASS line on
//! success. Run with
//! `cargo test -p pluriharm-cli --test acceptance -- --nocapture`.

use std::path::PathBuf;
use std::process::{Command, Output};

use num_complex::Complex;
use pluriharm::bloch::{
    bounded_map_bound_check, constants, growth_bound_check, landau_bloch_radii, psi,
    psi_grid_argmin, schwarz_omega_check, BlochInputs,
};
use pluriharm::cmat::{row_covector_mul, CMat};
use pluriharm::pmap::PHMap;
use pluriharm::poly::{Monomial, PolyMap};
use pluriharm::sampling::{ball_grid, SampleStream};
use pluriharm::stability::{
    counterexample_family, mprime, moebius_diagonal, transfer_collision, Perturbation,
    PerturbationKind,
};
use pluriharm::verify::{covering_check, landau_bloch_verify, LandauBlochConfig};
use pluriharm::volume::{real_volume, sup_generalized_volume, volume_inequality_check};
use pluriharm::{CMat64, Complex64, PHMap64, PolyMap64};

fn c(re: f64, im: f64) -> Complex64 {
    Complex::new(re, im)
}

fn pass(criterion: u32, name: &str) {
    println!("acceptance criterion {criterion} ({name}): PASS");
}

// ---------------------------------------------------------------- helpers

fn random_polymap(stream: &mut SampleStream, n: usize, terms: usize, scale: f64) -> PolyMap64 {
    let mut list = Vec::with_capacity(terms);
    for _ in 0..terms {
        let component = (stream.next_u64() % n as u64) as usize;
        let exponents: Vec<u32> = (0..n).map(|_| (stream.next_u64() % 4) as u32).collect();
        let coeff = stream.square_complex::<f64>() * scale;
        list.push(Monomial::new(component, exponents, coeff));
    }
    PolyMap::new(n, list).unwrap()
}

/// Identity-dominated map: h = z + eps * (random cubic), g = delta * (random
/// cubic). Rejection-screened so that `min_gain(Dh) > 0.1` and
/// `sup ||omega|| <= omega_cap` over a seeded sample of the screening ball.
fn random_screened_map(
    stream: &mut SampleStream,
    n: usize,
    eps: f64,
    delta: f64,
    omega_cap: f64,
    screen_radius: f64,
) -> PHMap64 {
    loop {
        let h = PolyMap::identity(n)
            .add(&random_polymap(stream, n, 3, eps))
            .unwrap();
        let g = random_polymap(stream, n, 3, delta);
        let f = PHMap::new(h, g).unwrap();
        let mut ok = true;
        let mut screen = SampleStream::new(stream.next_u64(), 0);
        for _ in 0..200 {
            let z: Vec<Complex64> = screen.ball_point(n, screen_radius);
            let dh = f.h().jacobian(&z).unwrap();
            let (_, min_gain) = dh.singular_extremes();
            if min_gain <= 0.1 {
                ok = false;
                break;
            }
            let omega = f.g().jacobian(&z).unwrap().mul(&dh.inverse().unwrap());
            if omega.op_norm() > omega_cap {
                ok = false;
                break;
            }
        }
        if ok {
            return f;
        }
    }
}

fn quad_half_map() -> PHMap64 {
    let h = PolyMap::identity(1);
    let g = PolyMap::new(1, vec![Monomial::new(0, vec![2], c(0.5, 0.0))]).unwrap();
    PHMap::new(h, g).unwrap()
}

// ---------------------------------------------------------------- criteria

#[test]
fn criterion_01_constants() {
    let k = constants::<f64>();
    // paper decimals
    assert!((k.psi0 - 11.09017).abs() < 5e-6, "psi0 = {}", k.psi0);
    assert!((k.r0 - 0.618034).abs() < 5e-7, "r0 = {}", k.r0);
    assert!((k.nu_max - 0.171573).abs() < 5e-7, "nu_max = {}", k.nu_max);
    assert!((k.t_star - 0.585786).abs() < 5e-7, "t_star = {}", k.t_star);
    // psi(r0) = psi0 within 1e-12
    assert!((psi(k.r0).unwrap() - k.psi0).abs() < 1e-12);
    // grid argmin of psi within 1e-6 of r0
    let argmin = psi_grid_argmin::<f64>(4000);
    assert!((argmin - k.r0).abs() < 1e-6, "argmin = {argmin}");
    pass(1, "constants");
}

#[test]
fn criterion_02_matrix_lemmas() {
    let mut stream = SampleStream::new(0xACCE_0002, 0);
    // gain bound: min_gain >= |det| / ||A||^{n-1}, 1e4 matrices
    let mut checked = 0u64;
    while checked < 10_000 {
        for n in 1..=4usize {
            let entries: Vec<Complex64> =
                (0..n * n).map(|_| stream.square_complex()).collect();
            let a = CMat::new(n, entries).unwrap();
            let norm = a.op_norm();
            if norm == 0.0 {
                continue;
            }
            let bound = a.determinant().norm() / norm.powi(n as i32 - 1);
            assert!(
                a.min_gain() >= bound - 1e-10,
                "gain bound fails at n = {n}: min_gain {} < bound {bound}",
                a.min_gain()
            );
            checked += 1;
        }
    }
    // Neumann: ||(I +/- A)^{-1}|| <= 1/(1 - ||A||), 1e4 matrices with norm < 1
    let mut checked = 0u64;
    while checked < 10_000 {
        for n in 1..=4usize {
            let entries: Vec<Complex64> =
                (0..n * n).map(|_| stream.square_complex()).collect();
            let raw = CMat::new(n, entries).unwrap();
            let norm = raw.op_norm();
            if norm == 0.0 {
                continue;
            }
            let target = 0.98 * stream.uniform_f64();
            let a = raw.scale(c(target / norm, 0.0));
            let bound = 1.0 / (1.0 - target) + 1e-9;
            let ident: CMat64 = CMat::identity(n);
            assert!(ident.add(&a).inverse().unwrap().op_norm() <= bound);
            assert!(ident.sub(&a).inverse().unwrap().op_norm() <= bound);
            checked += 1;
        }
    }
    pass(2, "matrix lemmas");
}

#[test]
fn criterion_03_jacobian_equivalences() {
    // block determinant vs real Jacobian determinant on 500 screened maps
    let mut stream = SampleStream::new(0xACCE_0003, 0);
    let mut checked = 0;
    while checked < 500 {
        let n = 1 + (stream.next_u64() % 3) as usize;
        let h = PolyMap::identity(n)
            .add(&random_polymap(&mut stream, n, 4, 0.25))
            .unwrap();
        let g = random_polymap(&mut stream, n, 4, 0.35);
        let f = PHMap::new(h, g).unwrap();
        let z: Vec<Complex64> = stream.ball_point(n, 0.8);
        let dh = f.h().jacobian(&z).unwrap();
        let (_, min_gain) = dh.singular_extremes();
        if min_gain <= 0.1 {
            continue;
        }
        let omega = f.g().jacobian(&z).unwrap().mul(&dh.inverse().unwrap());
        if omega.op_norm() >= 0.9 {
            continue;
        }
        let block = f.det_jacobian(&z).unwrap();
        let real_det = f.real_jacobian(&z).unwrap().determinant();
        let scale = real_det.abs().max(1e-12);
        assert!(
            (block - real_det).abs() / scale < 1e-9,
            "map {checked}: block {block} vs real {real_det}"
        );
        checked += 1;
    }

    // sphere scan at 1e5 samples brackets the SVD extremes within 1e-3
    // relative; anisotropy is kept mild for n = 3 where the scan resolution
    // at this budget demands it
    let cases = [(1usize, 0.3, 0.4), (2, 0.1, 0.12), (3, 0.02, 0.025)];
    for (idx, &(n, eps, delta)) in cases.iter().enumerate() {
        for rep in 0..3 {
            let mut map_stream = SampleStream::new(0xACCE_1003 + idx as u64, rep);
            let f = random_screened_map(&mut map_stream, n, eps, delta, 0.95, 0.7);
            let z: Vec<Complex64> = map_stream.ball_point(n, 0.6);
            let (big, small) = f.lambda_extremes(&z).unwrap();
            let (hi, lo) = f
                .sphere_scan_extremes(&z, 100_000, 0xACCE_2003 + rep)
                .unwrap();
            assert!(hi <= big + 1e-12 && lo >= small - 1e-12);
            assert!(
                (big - hi) / big <= 1e-3,
                "n = {n}, rep {rep}: scan max {hi} vs SVD {big}"
            );
            assert!(
                (lo - small) / small <= 1e-3,
                "n = {n}, rep {rep}: scan min {lo} vs SVD {small}"
            );
        }
    }
    pass(3, "jacobian equivalences");
}

#[test]
fn criterion_04_volume_inequality() {
    // identity closed forms: exact mass for the constant integrand
    let identity: PHMap64 = PHMap::identity(1);
    let v = volume_inequality_check(&identity, 0.5, 10_000, 7).unwrap();
    assert_eq!(v.lhs.value, 0.25);
    assert_eq!(v.rhs.value, 0.25);
    assert!((v.k_r_pow_n - 3.0).abs() < 1e-15);
    assert!(v.pass);

    // 100 seeded trials (50 maps per dimension), r in {0.3, 0.5, 0.7}
    let mut trial = 0u64;
    for n in 1..=2usize {
        for _ in 0..50 {
            let mut stream = SampleStream::new(0xACCE_0004 + trial, 0);
            let f = random_screened_map(&mut stream, n, 0.2, 0.3, 0.8, 0.75);
            for (ri, r) in [0.3, 0.5, 0.7].into_iter().enumerate() {
                let seed = 0xACCE_3004 + 10 * trial + ri as u64;
                let verdict = volume_inequality_check(&f, r, 10_000, seed).unwrap();
                assert!(
                    verdict.pass,
                    "trial {trial}, n = {n}, r = {r}: lhs {} > bound {}",
                    verdict.lhs.value, verdict.bound
                );
            }
            trial += 1;
        }
    }
    pass(4, "volume inequality");
}

#[test]
fn criterion_05_landau_bloch_end_to_end() {
    // Independent oracle for V of h = z, g = z^2/2: a 1e7-point midpoint
    // quadrature of the hand-derived integrand. In the polar coordinates of
    // the normalized disk measure, dA = du dtheta / (2 pi) with u = rho^2,
    // and |h'|^2 (1 - |omega|^2) = 1 - u at z = sqrt(u) e^{i theta}.
    // Integrated up to the profile's final radius; the pinned limit is 1/2.
    let budget = 12;
    let r_final = 1.0 - 0.5f64.powi(budget);
    let (nu, ntheta) = (3163usize, 3163usize);
    let du = r_final * r_final / nu as f64;
    let dtheta_weight = 1.0 / ntheta as f64;
    let mut oracle = 0.0;
    for iu in 0..nu {
        let u = (iu as f64 + 0.5) * du;
        let mut ring = 0.0;
        for it in 0..ntheta {
            let theta = std::f64::consts::TAU * (it as f64 + 0.5) / ntheta as f64;
            let z = c(u.sqrt() * theta.cos(), u.sqrt() * theta.sin());
            ring += (1.0 - z.norm_sqr()) * dtheta_weight;
        }
        oracle += ring * du;
    }
    assert!(
        (oracle - 0.5).abs() < 1e-6,
        "quadrature oracle = {oracle}, pinned value 0.5"
    );

    let f = quad_half_map();
    let config = LandauBlochConfig {
        volume_samples: 200_000,
        volume_budget: budget as u32,
        scan_pairs: 1_000_000,
        covering_targets: 1_000,
        tol: 1e-9,
        seed: 42,
    };
    let report = landau_bloch_verify(&f, &config).unwrap();
    assert!((report.alpha - 1.0).abs() < 1e-12, "alpha = {}", report.alpha);
    let last = report.profile.values.last().unwrap();
    assert!(
        (report.volume - oracle).abs() <= 3.0 * last.stderr,
        "volume {} vs oracle {oracle} (3 stderr = {})",
        report.volume,
        3.0 * last.stderr
    );
    assert!(report.alpha <= report.alpha_cap);
    // radii from the closed forms, recomputed independently
    let radii = landau_bloch_radii(&BlochInputs {
        n: 1,
        alpha: report.alpha,
        volume: report.volume,
    })
    .unwrap();
    assert_eq!(report.radii.ru, radii.ru);
    assert_eq!(report.radii.rc, radii.rc);
    assert!(!report.univalence.is_violation(), "{}", report.univalence.summary);
    assert!(!report.covering.is_violation(), "{}", report.covering.summary);
    assert!(report.pass);
    pass(5, "landau-bloch end to end");
}

#[test]
fn criterion_06_witness_transfer() {
    // the reference z + z^2 instance
    let h = PolyMap::identity(1);
    let g = PolyMap::new(1, vec![Monomial::new(0, vec![2], c(1.0, 0.0))]).unwrap();
    let a0 = Perturbation::new(PerturbationKind::UnitNorm, CMat::identity(1)).unwrap();
    let (a, residual) =
        transfer_collision(&h, &g, &a0, &[c(-0.2, 0.0)], &[c(-0.8, 0.0)]).unwrap();
    assert!(residual <= 1e-12, "residual = {residual:.3e}");
    assert!((a.matrix.op_norm() - a0.matrix.op_norm()).abs() <= 1e-12);

    // 100 manufactured collisions across n in {1, 2, 3}
    let mut stream = SampleStream::new(0xACCE_0006, 0);
    let mut done = 0;
    while done < 100 {
        let n = 1 + (stream.next_u64() % 3) as usize;
        let h = PolyMap::identity(n)
            .add(&random_polymap(&mut stream, n, 3, 0.2))
            .unwrap();
        let z1: Vec<Complex64> = stream.ball_point(n, 0.85);
        let z2: Vec<Complex64> = stream.ball_point(n, 0.85);
        let sep: f64 = z1
            .iter()
            .zip(&z2)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if sep < 0.2 {
            continue;
        }
        let raw_entries: Vec<Complex64> = (0..n * n).map(|_| stream.square_complex()).collect();
        let raw = CMat::new(n, raw_entries).unwrap();
        let norm = raw.op_norm();
        if norm < 1e-6 {
            continue;
        }
        let a0_matrix = raw.scale(c(1.0 / norm, 0.0));
        if a0_matrix.min_gain() < 1e-3 {
            continue;
        }
        let a0 = Perturbation::new(PerturbationKind::UnitNorm, a0_matrix).unwrap();
        let h1 = h.eval(&z1).unwrap();
        let h2 = h.eval(&z2).unwrap();
        let d: Vec<Complex64> = h1.iter().zip(&h2).map(|(x, y)| x - y).collect();
        if d.iter().all(|v| v.norm() < 1e-9) {
            continue;
        }
        // linear g with (g(z2) - g(z1)) A0 = h(z1) - h(z2) exactly
        let e = row_covector_mul(&d, &a0.matrix.inverse().unwrap());
        let w: Vec<Complex64> = z2.iter().zip(&z1).map(|(x, y)| x - y).collect();
        let w_norm_sq: f64 = w.iter().map(|v| v.norm_sqr()).sum();
        let mut g_matrix: CMat64 = CMat::zeros(n);
        for k in 0..n {
            for j in 0..n {
                g_matrix.set(k, j, w[k].conj() * e[j] / w_norm_sq);
            }
        }
        let g = PolyMap::linear(&g_matrix);
        let (a, residual) = transfer_collision(&h, &g, &a0, &z1, &z2).unwrap();
        assert!(residual <= 1e-9, "case {done}: residual = {residual:.3e}");
        assert!((a.matrix.op_norm() - a0.matrix.op_norm()).abs() <= 1e-12);
        done += 1;
    }
    pass(6, "witness transfer");
}

#[test]
fn criterion_07_moebius_diagonal() {
    let mut stream = SampleStream::new(0xACCE_0007, 0);
    for i in 0..10_000u64 {
        let n = 1 + (i % 3) as usize;
        let lambdas: Vec<Complex64> = (0..n)
            .map(|_| stream.unit_disk::<f64>() * 0.999)
            .collect();
        let phases: Vec<Complex64> = (0..n).map(|_| stream.phase()).collect();
        let a = Perturbation::new(
            PerturbationKind::ContractionDiagonal,
            CMat::diagonal(&lambdas),
        )
        .unwrap();
        let d = Perturbation::new(
            PerturbationKind::UnimodularDiagonal,
            CMat::diagonal(&phases),
        )
        .unwrap();
        let m = moebius_diagonal(&a, &d).unwrap();
        for j in 0..n {
            assert!(
                (m.get(j, j).norm() - 1.0).abs() <= 1e-12,
                "entry modulus {} at iteration {i}",
                m.get(j, j).norm()
            );
        }
        assert!((m.op_norm() - 1.0).abs() <= 1e-12);
    }
    pass(7, "moebius diagonal");
}

#[test]
fn criterion_08_mprime_formula() {
    assert_eq!(mprime(1.0f64, 0.0).unwrap(), 1.0);
    assert!((mprime(1.0f64, 0.2).unwrap() - 3.0).abs() < 1e-15);
    // rejection exactly at the bound
    for m in [1.0f64, 1.7, 2.0, 3.5] {
        let bound = 1.0 / (2.0 * m + 1.0);
        assert!(mprime(m, bound).is_err());
        assert!(mprime(m, bound * (1.0 - 1e-9)).is_ok());
    }
    // monotonicity on a 100-point grid in each argument
    let bound = 1.0 / 3.0;
    let mut prev = mprime(1.0f64, 0.0).unwrap();
    for j in 1..100 {
        let cval = bound * j as f64 / 101.0;
        let cur = mprime(1.0, cval).unwrap();
        assert!(cur > prev);
        prev = cur;
    }
    let mut prev = 0.0;
    for j in 0..100 {
        let m = 1.0 + j as f64 / 10.0;
        let cur = mprime(m, 0.02).unwrap();
        assert!(cur > prev);
        prev = cur;
    }
    pass(8, "m-prime formula");
}

#[test]
fn criterion_09_counterexample_family() {
    for k in [2u32, 5, 10] {
        let f = counterexample_family::<f64>(k, 2).unwrap();
        // |det J| = 1: real volume is exactly the mass r^{2n}
        let vol = real_volume(&f, 0.9, 20_000, 0xACCE_0009).unwrap();
        let expect = 0.9f64.powi(4);
        assert!(
            (vol.value - expect).abs() <= 3.0 * vol.stderr + 1e-12,
            "k = {k}: volume {} vs {expect}",
            vol.value
        );
        // covered at radius 1/(2k)
        let inner = covering_check(&f, 1.0, 1.0 / (2.0 * k as f64), 500, 0xACCE_1009);
        assert!(!inner.is_violation(), "k = {k}: {}", inner.summary);
        // not covered at radius 1/k + 0.05
        let outer = covering_check(&f, 1.0, 1.0 / k as f64 + 0.05, 500, 0xACCE_2009);
        assert!(outer.is_violation(), "k = {k}: {}", outer.summary);
    }
    pass(9, "counterexample family");
}

#[test]
fn criterion_10_growth_schwarz_bounded_checks() {
    // Schwarz equality case omega(z) = z
    let f = quad_half_map();
    let grid = ball_grid::<f64>(1, 0.95, 1_000, 0xACCE_0010);
    let verdict = schwarz_omega_check(&f, &grid).unwrap();
    assert!(verdict.pass, "{} witnesses", verdict.witnesses.len());
    assert_eq!(verdict.checked, 1_000);

    // growth bound with V from the volume profile
    let h = PolyMap::identity(1);
    let g = PolyMap::new(1, vec![Monomial::new(0, vec![2], c(0.25, 0.0))]).unwrap();
    let f = PHMap::new(h, g).unwrap();
    let profile = sup_generalized_volume(&f, 100_000, 0xACCE_1010, 10).unwrap();
    let grid = ball_grid::<f64>(1, 0.69, 1_000, 0xACCE_2010);
    let verdict = growth_bound_check(&f, profile.sup_estimate, 0.7, &grid).unwrap();
    assert!(verdict.pass, "{} witnesses", verdict.witnesses.len());

    // bounded-map bounds on f = z/2 + conj(z^2/8)
    let h = PolyMap::new(1, vec![Monomial::new(0, vec![1], c(0.5, 0.0))]).unwrap();
    let g = PolyMap::new(1, vec![Monomial::new(0, vec![2], c(0.125, 0.0))]).unwrap();
    let f = PHMap::new(h, g).unwrap();
    let grid = ball_grid::<f64>(1, 0.95, 1_000, 0xACCE_3010);
    let verdict = bounded_map_bound_check(&f, &grid).unwrap();
    assert!(verdict.pass, "{} witnesses", verdict.witnesses.len());
    pass(10, "growth, schwarz and bounded-map checks");
}

// ---------------------------------------------------------- determinism

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pluriharm"))
}

fn maps_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../maps")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn masked(out: &Output) -> String {
    let text = String::from_utf8_lossy(&out.stdout);
    let mut doc: serde_json::Value =
        serde_json::from_str(&text).unwrap_or_else(|e| panic!("not JSON ({e}): {text}"));
    doc["timestamp_ms"] = serde_json::json!(0);
    doc.to_string()
}

#[test]
fn criterion_11_report_determinism() {
    let quad = maps_dir().join("quad_half.json");
    let quad = quad.to_str().unwrap();
    let square = maps_dir().join("square.json");
    let square = square.to_str().unwrap();
    let transfer = maps_dir().join("quad_transfer.json");
    let transfer = transfer.to_str().unwrap();
    let shear = maps_dir().join("small_shear.json");
    let shear = shear.to_str().unwrap();

    let cases: Vec<Vec<&str>> = vec![
        vec!["constants"],
        vec!["info", "--spec", quad],
        vec!["eval", "--spec", quad, "--point", "[[0.25,-0.1]]"],
        vec!["derivs", "--spec", quad, "--point", "[[0.25,-0.1]]"],
        vec!["volume", "--spec", quad, "--samples", "5000", "--budget", "5"],
        vec![
            "bloch", "--spec", quad, "--samples", "5000", "--pairs", "5000", "--targets", "50",
            "--budget", "6",
        ],
        vec!["verify-univalence", "--spec", square, "--pairs", "5000"],
        vec![
            "verify-covering",
            "--spec",
            quad,
            "--target-radius",
            "0.2",
            "--targets",
            "100",
        ],
        vec!["connectivity", "--spec", quad, "--grid-points", "300"],
        vec![
            "stability-scan",
            "--spec",
            quad,
            "--kind",
            "unit-norm",
            "--count",
            "3",
            "--radius",
            "0.4",
            "--pairs",
            "2000",
        ],
        vec![
            "shear-verify",
            "--spec",
            shear,
            "--part",
            "i",
            "--grid-points",
            "200",
            "--connectivity-points",
            "300",
            "--pairs",
            "2000",
        ],
        vec![
            "transfer-collision",
            "--spec",
            transfer,
            "--a0",
            "[[[1,0]]]",
            "--z1",
            "[[-0.2,0]]",
            "--z2",
            "[[-0.8,0]]",
        ],
        vec![
            "demo-counterexample",
            "--k",
            "5",
            "--samples",
            "2000",
            "--targets",
            "50",
        ],
    ];
    for args in &cases {
        let a = run(args);
        let b = run(args);
        assert_eq!(
            masked(&a),
            masked(&b),
            "report not deterministic for {args:?}"
        );
    }
    // and across worker counts
    let w1 = run(&["volume", "--spec", quad, "--samples", "5000", "--workers", "1"]);
    let w3 = run(&["volume", "--spec", quad, "--samples", "5000", "--workers", "3"]);
    let mut a: serde_json::Value =
        serde_json::from_slice(&w1.stdout).expect("volume report parses");
    let mut b: serde_json::Value =
        serde_json::from_slice(&w3.stdout).expect("volume report parses");
    assert_eq!(a["result"], b["result"]);
    for doc in [&mut a, &mut b] {
        doc["timestamp_ms"] = serde_json::json!(0);
        doc["params"]["workers"] = serde_json::json!(0);
    }
    assert_eq!(a, b);
    pass(11, "report determinism");
}

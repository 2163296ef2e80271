//! Command-line interface definition.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use pluriharm::stability::{PerturbationKind, ShearPart};

#[derive(Parser, Debug)]
#[command(
    name = "pluriharm",
    version,
    about = "Numerical toolkit for pluriharmonic mappings on the unit ball of C^n",
    after_help = "Exit codes: 0 pass/no-violation, 1 violation found, 2 hypothesis violated, \
                  3 usage or parse error."
)]
pub struct Cli {
    /// Base seed; every stochastic stage derives its own stream from it.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,

    /// Sample budget; commands fall back to their own defaults when absent.
    #[arg(long, global = true)]
    pub samples: Option<u64>,

    /// Collision tolerance for univalence scans.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,

    /// Worker threads. Results are bit-identical for any worker count, but
    /// the value is echoed as part of the reproducibility key.
    #[arg(long, global = true, default_value_t = 1)]
    pub workers: usize,

    /// Write the JSON report to this path instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Write a CSV sidecar with the flattened result rows.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the closed-form constants psi0, r0, t*, nu_max.
    Constants,

    /// Summarize a mapping-spec file.
    Info {
        #[arg(long)]
        spec: PathBuf,
    },

    /// Evaluate f = h + conj(g) at a point.
    Eval {
        #[arg(long)]
        spec: PathBuf,
        /// Point as JSON pairs, e.g. `[[0.1,0.2],[0.3,0.0]]`.
        #[arg(long)]
        point: String,
    },

    /// Derivative bundle at a point: Dh, Dg, omega, Lambda, lambda, det J.
    Derivs {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        point: String,
    },

    /// Generalized and real volumes, the volume inequality per radius, and
    /// the dyadic volume profile.
    Volume {
        #[arg(long)]
        spec: PathBuf,
        /// Radii for the inequality check.
        #[arg(long, value_delimiter = ',', default_values_t = [0.3, 0.5, 0.7])]
        radii: Vec<f64>,
        /// Dyadic schedule length for the volume profile.
        #[arg(long, default_value_t = 8)]
        budget: u32,
    },

    /// End-to-end Landau-Bloch pipeline: alpha, volume profile, cap check,
    /// radii, univalence scan and covering check.
    Bloch {
        #[arg(long)]
        spec: PathBuf,
        /// Univalence-scan pair budget.
        #[arg(long, default_value_t = 1_000_000)]
        pairs: u64,
        /// Covering-check target budget.
        #[arg(long, default_value_t = 1_000)]
        targets: u64,
        /// Dyadic schedule length for the volume profile.
        #[arg(long, default_value_t = 12)]
        budget: u32,
        /// Also run the Schwarz-dilatation and growth-bound grid checks.
        #[arg(long)]
        checks: bool,
        /// Also run the bounded-map check (requires the image inside the
        /// closed unit ball).
        #[arg(long)]
        bounded: bool,
        /// Grid size for the check operations.
        #[arg(long, default_value_t = 1_000)]
        grid_points: usize,
        /// Ball radius for the growth-bound check.
        #[arg(long, default_value_t = 0.7)]
        check_radius: f64,
    },

    /// Hunt for univalence violations on a ball.
    VerifyUnivalence {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 0.9)]
        radius: f64,
        /// Pair budget; defaults to --samples or 100000.
        #[arg(long)]
        pairs: Option<u64>,
        /// Scan the shear counterpart F = h - g instead of f.
        #[arg(long)]
        shear: bool,
    },

    /// Check that sampled targets are reached by the mapping.
    VerifyCovering {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 0.9)]
        domain_radius: f64,
        #[arg(long)]
        target_radius: f64,
        #[arg(long, default_value_t = 1_000)]
        targets: u64,
    },

    /// Linear-connectivity estimate of the image.
    Connectivity {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 0.9)]
        domain_radius: f64,
        #[arg(long, default_value_t = 1_000)]
        grid_points: usize,
        #[arg(long, default_value_t = 8)]
        k: usize,
    },

    /// Univalence scans of the families f_A and F_A over sampled
    /// perturbations (index 0 is always the identity).
    StabilityScan {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long, default_value_t = 20)]
        count: u64,
        #[arg(long, default_value_t = 0.9)]
        radius: f64,
        /// Pairs per scan; defaults to --samples or 20000.
        #[arg(long)]
        pairs: Option<u64>,
    },

    /// Verify one instance of the shear theorem.
    ShearVerify {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_enum)]
        part: PartArg,
        #[arg(long, value_enum, default_value_t = KindArg::UnitNorm)]
        kind: KindArg,
        /// Seed of the sampled perturbation; defaults to a stream derived
        /// from --seed.
        #[arg(long)]
        a_seed: Option<u64>,
        /// Sample size for the dilatation bound C.
        #[arg(long, default_value_t = 1_000)]
        grid_points: usize,
        #[arg(long, default_value_t = 800)]
        connectivity_points: usize,
        #[arg(long, default_value_t = 8)]
        k: usize,
        /// Pairs per univalence scan; defaults to --samples or 20000.
        #[arg(long)]
        pairs: Option<u64>,
    },

    /// Transfer a holomorphic-family collision to the conjugated family.
    TransferCollision {
        #[arg(long)]
        spec: PathBuf,
        /// Perturbation matrix A0 as JSON rows of `[re, im]` pairs,
        /// e.g. `[[[1,0]]]`.
        #[arg(long)]
        a0: String,
        #[arg(long, value_enum, default_value_t = KindArg::UnitNorm)]
        kind: KindArg,
        #[arg(long)]
        z1: String,
        #[arg(long)]
        z2: String,
    },

    /// The family f_k = (k z1, z2/k, ...): finite volume yet no common
    /// covered ball.
    DemoCounterexample {
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 0.9)]
        r: f64,
        #[arg(long, default_value_t = 500)]
        targets: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    GeneralContraction,
    UnitNorm,
    UnimodularDiagonal,
    ContractionDiagonal,
}

impl From<KindArg> for PerturbationKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::GeneralContraction => PerturbationKind::GeneralContraction,
            KindArg::UnitNorm => PerturbationKind::UnitNorm,
            KindArg::UnimodularDiagonal => PerturbationKind::UnimodularDiagonal,
            KindArg::ContractionDiagonal => PerturbationKind::ContractionDiagonal,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PartArg {
    I,
    Ii,
}

impl From<PartArg> for ShearPart {
    fn from(p: PartArg) -> Self {
        match p {
            PartArg::I => ShearPart::I,
            PartArg::Ii => ShearPart::II,
        }
    }
}

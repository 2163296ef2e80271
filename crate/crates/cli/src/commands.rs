//! Command handlers: each builds the parameter echo, runs the corresponding
//! library pipeline and returns the result document plus a status.

use std::fs;
use std::path::Path;

use num_complex::Complex;
use serde_json::{json, Value};
use thiserror::Error;

use pluriharm::bloch;
use pluriharm::cmat::CMat;
use pluriharm::pmap::PHMap;
use pluriharm::sampling::{ball_grid, derive_seed};
use pluriharm::stability::{
    sample_perturbation, shear_counterpart, shear_verify, stability_scan, transfer_collision,
    Perturbation, ShearConfig, ShearStatus, UnivalenceConfig,
};
use pluriharm::verify::{
    connectivity_estimate, covering_check, landau_bloch_verify, univalence_scan,
    LandauBlochConfig,
};
use pluriharm::volume::{real_volume, sup_generalized_volume, volume_inequality_check};
use pluriharm::{CMat64, Complex64, PHMap64};

use crate::args::{Cli, Command};
use crate::report::{Report, ReportStatus};
use crate::spec_file::{parse_spec, ParsedSpec, SpecError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Spec(#[from] SpecError),
    #[error("{0}")]
    Core(#[from] pluriharm::Error),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    /// Exit code per the report contract: usage/parse problems are 3,
    /// everything raised by a failed mathematical hypothesis is 2.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Spec(_) | CliError::Io { .. } => 3,
            CliError::Core(e) => match e {
                pluriharm::Error::DimensionMismatch { .. }
                | pluriharm::Error::DegreeTooHigh { .. }
                | pluriharm::Error::NonFinite { .. }
                | pluriharm::Error::DomainError { .. } => 3,
                _ => 2,
            },
        }
    }

    /// Result document for reportable (exit 2) failures.
    pub fn result_json(&self) -> Value {
        let mut doc = json!({ "error": self.to_string() });
        if let CliError::Core(pluriharm::Error::HypothesisViolated { stage, witness, .. }) = self {
            doc["stage"] = json!(stage);
            if let Some(w) = witness {
                doc["witness"] = json!(w);
            }
        }
        doc
    }
}

fn load_spec(path: &Path) -> Result<ParsedSpec, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(parse_spec(&text)?)
}

fn ph_map(spec: &ParsedSpec) -> Result<PHMap64, CliError> {
    Ok(PHMap::new(spec.h.clone(), spec.g.clone())?)
}

fn parse_point(text: &str, n: usize) -> Result<Vec<Complex64>, CliError> {
    let pairs: Vec<[f64; 2]> = serde_json::from_str(text)
        .map_err(|e| CliError::Usage(format!("cannot parse point `{text}`: {e}")))?;
    if pairs.len() != n {
        return Err(CliError::Usage(format!(
            "point has {} coordinates, the mapping has dimension {n}",
            pairs.len()
        )));
    }
    Ok(pairs
        .into_iter()
        .map(|[re, im]| Complex::new(re, im))
        .collect())
}

fn parse_matrix(text: &str, n: usize) -> Result<CMat64, CliError> {
    let rows: Vec<Vec<[f64; 2]>> = serde_json::from_str(text)
        .map_err(|e| CliError::Usage(format!("cannot parse matrix `{text}`: {e}")))?;
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Usage(format!(
            "matrix must be {n} x {n} to act on this mapping"
        )));
    }
    let entries: Vec<Complex64> = rows
        .into_iter()
        .flatten()
        .map(|[re, im]| Complex::new(re, im))
        .collect();
    Ok(CMat::new(n, entries)?)
}

fn complex_json(z: &Complex64) -> Value {
    json!([z.re, z.im])
}

fn point_json(z: &[Complex64]) -> Value {
    Value::Array(z.iter().map(complex_json).collect())
}

fn matrix_json(m: &CMat64) -> Value {
    Value::Array(
        (0..m.n())
            .map(|i| Value::Array((0..m.n()).map(|j| complex_json(&m.get(i, j))).collect()))
            .collect(),
    )
}

fn to_value<S: serde::Serialize>(s: &S) -> Value {
    serde_json::to_value(s).expect("report values serialize")
}

fn globals_json(cli: &Cli) -> Value {
    json!({
        "seed": cli.seed,
        "samples": cli.samples,
        "tol": cli.tol,
        "workers": cli.workers,
    })
}

fn merge_params(cli: &Cli, specific: Value) -> Value {
    let mut base = globals_json(cli);
    if let (Value::Object(base_map), Value::Object(spec_map)) = (&mut base, specific) {
        for (k, v) in spec_map {
            base_map.insert(k, v);
        }
    }
    base
}

pub fn dispatch(cli: &Cli) -> Result<Report, CliError> {
    match &cli.command {
        Command::Constants => {
            let k = bloch::constants::<f64>();
            let params = merge_params(cli, json!({}));
            let result = json!({
                "psi0": k.psi0,
                "r0": k.r0,
                "t_star": k.t_star,
                "nu_max": k.nu_max,
            });
            Ok(Report::new("constants", params, result, ReportStatus::Pass))
        }

        Command::Info { spec } => {
            let parsed = load_spec(spec)?;
            let params = merge_params(cli, json!({ "spec": spec.display().to_string() }));
            let result = json!({
                "schema": crate::spec_file::SCHEMA_VERSION,
                "n": parsed.n,
                "metadata": to_value(&parsed.metadata),
                "h": { "terms": parsed.h.terms().len(), "total_degree": parsed.h.total_degree() },
                "g": { "terms": parsed.g.terms().len(), "total_degree": parsed.g.total_degree() },
            });
            Ok(Report::new("info", params, result, ReportStatus::Pass))
        }

        Command::Eval { spec, point } => {
            let parsed = load_spec(spec)?;
            let f = ph_map(&parsed)?;
            let z = parse_point(point, parsed.n)?;
            let params = merge_params(
                cli,
                json!({ "spec": spec.display().to_string(), "point": point }),
            );
            let result = json!({
                "point": point_json(&z),
                "f": point_json(&f.eval(&z)?),
                "h": point_json(&parsed.h.eval(&z)?),
                "g": point_json(&parsed.g.eval(&z)?),
            });
            Ok(Report::new("eval", params, result, ReportStatus::Pass))
        }

        Command::Derivs { spec, point } => {
            let parsed = load_spec(spec)?;
            let f = ph_map(&parsed)?;
            let z = parse_point(point, parsed.n)?;
            let pack = f.derivs(&z)?;
            let params = merge_params(
                cli,
                json!({ "spec": spec.display().to_string(), "point": point }),
            );
            let result = json!({
                "z": point_json(&pack.z),
                "dh": matrix_json(&pack.dh),
                "dg": matrix_json(&pack.dg),
                "omega": matrix_json(&pack.omega),
                "omega_norm": pack.omega.op_norm(),
                "lambda_big": pack.lambda_big,
                "lambda_small": pack.lambda_small,
                "det_j": pack.det_j,
            });
            Ok(Report::new("derivs", params, result, ReportStatus::Pass))
        }

        Command::Volume {
            spec,
            radii,
            budget,
        } => {
            let parsed = load_spec(spec)?;
            let f = ph_map(&parsed)?;
            let samples = cli.samples.unwrap_or(100_000);
            let params = merge_params(
                cli,
                json!({
                    "spec": spec.display().to_string(),
                    "radii": radii,
                    "budget": budget,
                    "samples": samples,
                }),
            );
            let mut checks = Vec::new();
            let mut all_pass = true;
            for &r in radii {
                let verdict = volume_inequality_check(&f, r, samples, cli.seed)?;
                all_pass &= verdict.pass;
                checks.push(to_value(&verdict));
            }
            let profile = sup_generalized_volume(&f, samples, cli.seed, *budget)?;
            let result = json!({
                "inequality_checks": checks,
                "profile": to_value(&profile),
            });
            let status = if all_pass {
                ReportStatus::Pass
            } else {
                ReportStatus::Violation
            };
            Ok(Report::new("volume", params, result, status))
        }

        Command::Bloch {
            spec,
            pairs,
            targets,
            budget,
            checks,
            bounded,
            grid_points,
            check_radius,
        } => {
            let parsed = load_spec(spec)?;
            let f = ph_map(&parsed)?;
            let config = LandauBlochConfig {
                volume_samples: cli.samples.unwrap_or(200_000),
                volume_budget: *budget,
                scan_pairs: *pairs,
                covering_targets: *targets,
                tol: cli.tol,
                seed: cli.seed,
            };
            let params = merge_params(
                cli,
                json!({
                    "spec": spec.display().to_string(),
                    "config": to_value(&config),
                    "checks": checks,
                    "bounded": bounded,
                    "grid_points": grid_points,
                    "check_radius": check_radius,
                }),
            );
            let report = landau_bloch_verify(&f, &config)?;
            let mut pass = report.pass;
            let mut result = to_value(&report);
            if *checks {
                let schwarz_grid =
                    ball_grid::<f64>(parsed.n, 0.95, *grid_points, derive_seed(cli.seed, 20));
                let schwarz = bloch::schwarz_omega_check(&f, &schwarz_grid)?;
                let growth_grid = ball_grid::<f64>(
                    parsed.n,
                    0.99 * check_radius,
                    *grid_points,
                    derive_seed(cli.seed, 21),
                );
                let growth =
                    bloch::growth_bound_check(&f, report.volume, *check_radius, &growth_grid)?;
                pass &= schwarz.pass && growth.pass;
                let mut checks_doc = json!({
                    "schwarz": to_value(&schwarz),
                    "growth": to_value(&growth),
                });
                if *bounded {
                    let grid =
                        ball_grid::<f64>(parsed.n, 0.95, *grid_points, derive_seed(cli.seed, 22));
                    let verdict = bloch::bounded_map_bound_check(&f, &grid)?;
                    pass &= verdict.pass;
                    checks_doc["bounded_map"] = to_value(&verdict);
                }
                result["checks"] = checks_doc;
            }
            let status = if pass {
                ReportStatus::Pass
            } else {
                ReportStatus::Violation
            };
            Ok(Report::new("bloch", params, result, status))
        }

        Command::VerifyUnivalence {
            spec,
            radius,
            pairs,
            shear,
        } => {
            let parsed = load_spec(spec)?;
            let f = ph_map(&parsed)?;
            let map = if *shear {
                PHMap::from_holomorphic(shear_counterpart(&f))
            } else {
                f
            };
            let pairs = pairs.or(cli.samples).unwrap_or(100_000);
            let params = merge_params(
                cli,
                json!({
                    "spec": spec.display().to_string(),
                    "radius": radius,
                    "pairs": pairs,
                    "shear": shear,
                }),
            );
            let verdict = univalence_scan(&map, *radius, pairs, cli.seed, cli.tol);
            let status = if verdict.is_violation() {
                ReportStatus::Violation
            } else {
                ReportStatus::Pass
            };
            Ok(Report::new(
                "verify-univalence",
                params,
                to_value(&verdict),
                status,
            ))
        }

        Command::VerifyCovering {
            spec,
            domain_radius,
            target_radius,
            targets,
        } => {
            let parsed = load_spec(spec)?;
            let f = ph_map(&parsed)?;
            let params = merge_params(
                cli,
                json!({
                    "spec": spec.display().to_string(),
                    "domain_radius": domain_radius,
                    "target_radius": target_radius,
                    "targets": targets,
                }),
            );
            let verdict = covering_check(&f, *domain_radius, *target_radius, *targets, cli.seed);
            let status = if verdict.is_violation() {
                ReportStatus::Violation
            } else {
                ReportStatus::Pass
            };
            Ok(Report::new(
                "verify-covering",
                params,
                to_value(&verdict),
                status,
            ))
        }

        Command::Connectivity {
            spec,
            domain_radius,
            grid_points,
            k,
        } => {
            let parsed = load_spec(spec)?;
            let f = ph_map(&parsed)?;
            let params = merge_params(
                cli,
                json!({
                    "spec": spec.display().to_string(),
                    "domain_radius": domain_radius,
                    "grid_points": grid_points,
                    "k": k,
                }),
            );
            let estimate = connectivity_estimate(&f, *domain_radius, *grid_points, *k, cli.seed)?;
            Ok(Report::new(
                "connectivity",
                params,
                to_value(&estimate),
                ReportStatus::Pass,
            ))
        }

        Command::StabilityScan {
            spec,
            kind,
            count,
            radius,
            pairs,
        } => {
            let parsed = load_spec(spec)?;
            let config = UnivalenceConfig {
                radius: *radius,
                pairs: pairs.or(cli.samples).unwrap_or(20_000),
                tol: cli.tol,
            };
            let params = merge_params(
                cli,
                json!({
                    "spec": spec.display().to_string(),
                    "kind": format!("{kind:?}"),
                    "count": count,
                    "config": to_value(&config),
                }),
            );
            let report = stability_scan(
                &parsed.h,
                &parsed.g,
                (*kind).into(),
                *count,
                &config,
                cli.seed,
            )?;
            let status = if report.pass {
                ReportStatus::Pass
            } else {
                ReportStatus::Violation
            };
            Ok(Report::new(
                "stability-scan",
                params,
                to_value(&report),
                status,
            ))
        }

        Command::ShearVerify {
            spec,
            part,
            kind,
            a_seed,
            grid_points,
            connectivity_points,
            k,
            pairs,
        } => {
            let parsed = load_spec(spec)?;
            let f = ph_map(&parsed)?;
            let a_seed = a_seed.unwrap_or_else(|| derive_seed(cli.seed, 9000));
            let perturbation = sample_perturbation::<f64>((*kind).into(), parsed.n, a_seed);
            let config = ShearConfig {
                omega_grid_points: *grid_points,
                connectivity_points: *connectivity_points,
                k_neighbors: *k,
                scan: UnivalenceConfig {
                    radius: 1.0,
                    pairs: pairs.or(cli.samples).unwrap_or(20_000),
                    tol: cli.tol,
                },
            };
            let params = merge_params(
                cli,
                json!({
                    "spec": spec.display().to_string(),
                    "part": format!("{part:?}"),
                    "kind": format!("{kind:?}"),
                    "a_seed": a_seed,
                    "config": to_value(&config),
                }),
            );
            let report = shear_verify(&f, (*part).into(), &perturbation, &config, cli.seed)?;
            let status = match report.status {
                ShearStatus::Pass => ReportStatus::Pass,
                ShearStatus::Fail => ReportStatus::Violation,
                ShearStatus::NotApplicable => ReportStatus::HypothesisViolated,
            };
            let result = json!({
                "perturbation": to_value(&perturbation),
                "report": to_value(&report),
            });
            Ok(Report::new("shear-verify", params, result, status))
        }

        Command::TransferCollision {
            spec,
            a0,
            kind,
            z1,
            z2,
        } => {
            let parsed = load_spec(spec)?;
            let a0_matrix = parse_matrix(a0, parsed.n)?;
            let a0 = Perturbation::new((*kind).into(), a0_matrix)?;
            let p1 = parse_point(z1, parsed.n)?;
            let p2 = parse_point(z2, parsed.n)?;
            let params = merge_params(
                cli,
                json!({
                    "spec": spec.display().to_string(),
                    "kind": format!("{kind:?}"),
                    "z1": z1,
                    "z2": z2,
                }),
            );
            let (a, residual) = transfer_collision(&parsed.h, &parsed.g, &a0, &p1, &p2)?;
            let result = json!({
                "a0": matrix_json(&a0.matrix),
                "a": matrix_json(&a.matrix),
                "residual": residual,
                "a0_norm": a0.matrix.op_norm(),
                "a_norm": a.matrix.op_norm(),
            });
            Ok(Report::new(
                "transfer-collision",
                params,
                result,
                ReportStatus::Pass,
            ))
        }

        Command::DemoCounterexample { k, n, r, targets } => {
            let f = pluriharm::stability::counterexample_family::<f64>(*k, *n)?;
            let samples = cli.samples.unwrap_or(100_000);
            let params = merge_params(
                cli,
                json!({ "k": k, "n": n, "r": r, "targets": targets, "samples": samples }),
            );
            let volume = real_volume(&f, *r, samples, cli.seed)?;
            let inner_radius = 1.0 / (2.0 * *k as f64);
            let outer_radius = 1.0 / *k as f64 + 0.05;
            let inner = covering_check(&f, 1.0, inner_radius, *targets, derive_seed(cli.seed, 1));
            let outer = covering_check(&f, 1.0, outer_radius, *targets, derive_seed(cli.seed, 2));
            let demonstrates = !inner.is_violation() && outer.is_violation();
            let result = json!({
                "real_volume": to_value(&volume),
                "inner_radius": inner_radius,
                "covering_inner": to_value(&inner),
                "outer_radius": outer_radius,
                "covering_outer": to_value(&outer),
                "demonstrates_no_absolute_constant": demonstrates,
            });
            let status = if demonstrates {
                ReportStatus::Pass
            } else {
                ReportStatus::Violation
            };
            Ok(Report::new("demo-counterexample", params, result, status))
        }
    }
}

use std::fs;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use pluriharm_cli::args::Cli;
use pluriharm_cli::commands::dispatch;
use pluriharm_cli::report::{result_to_csv, Report, ReportStatus};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            e.print().ok();
            return ExitCode::from(code);
        }
    };

    // Results are worker-count independent by construction; the pool size
    // only controls throughput.
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.workers.max(1))
        .build_global()
        .ok();

    match dispatch(&cli) {
        Ok(report) => emit(&cli, report),
        Err(err) => {
            let code = err.exit_code();
            if code == 2 {
                // hypothesis violations are reportable outcomes
                let report = Report::new(
                    command_name(&cli),
                    serde_json::json!({ "seed": cli.seed, "workers": cli.workers }),
                    err.result_json(),
                    ReportStatus::HypothesisViolated,
                );
                emit(&cli, report)
            } else {
                eprintln!("error: {err}");
                ExitCode::from(3)
            }
        }
    }
}

fn command_name(cli: &Cli) -> &'static str {
    use pluriharm_cli::args::Command::*;
    match cli.command {
        Constants => "constants",
        Info { .. } => "info",
        Eval { .. } => "eval",
        Derivs { .. } => "derivs",
        Volume { .. } => "volume",
        Bloch { .. } => "bloch",
        VerifyUnivalence { .. } => "verify-univalence",
        VerifyCovering { .. } => "verify-covering",
        Connectivity { .. } => "connectivity",
        StabilityScan { .. } => "stability-scan",
        ShearVerify { .. } => "shear-verify",
        TransferCollision { .. } => "transfer-collision",
        DemoCounterexample { .. } => "demo-counterexample",
    }
}

fn emit(cli: &Cli, report: Report) -> ExitCode {
    let json = report.to_json();
    if let Some(path) = &cli.out {
        if let Err(e) = fs::write(path, &json) {
            eprintln!("error: cannot write report to {}: {e}", path.display());
            return ExitCode::from(3);
        }
    } else {
        print!("{json}");
    }
    if let Some(path) = &cli.csv {
        let csv = result_to_csv(&report.result);
        if let Err(e) = fs::write(path, csv) {
            eprintln!("error: cannot write CSV sidecar to {}: {e}", path.display());
            return ExitCode::from(3);
        }
    }
    ExitCode::from(u8::try_from(report.exit_code).unwrap_or(3))
}

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use pencil_core::cli::{
    emit_report, parse_check_list, run_document_with, CheckId, CheckResult, Format, Report,
    TensorDocument,
};
use pencil_core::corpus::{build, ExampleId};
use pencil_core::hydro::{conservation_densities, flow_operators};
use pencil_core::sim::{
    conservation_drift, evolve, max_speed, trajectory_csv, CompiledFun, CompiledOperator, Grid1D,
    Profile, RunManifest, Scheme,
};
use pencil_core::Error;

/// Thread count for independent checks and corpus members.
const THREADS_VAR: &str = "PENCIL_THREADS";

#[derive(Parser)]
#[command(name = "pencil", version, about = "Exact verification of compatible metric pencils")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run checks on a tensor document.
    Verify(VerifyArgs),
    /// Catalog of built-in examples.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
    /// Numerical evolution of a flow.
    Sim {
        #[command(subcommand)]
        action: SimAction,
    },
}

#[derive(Args)]
struct VerifyArgs {
    doc: PathBuf,
    /// Comma-separated check ids, e.g. `geodesic,chain:4,flows:3`.
    #[arg(long, default_value = "")]
    checks: String,
    #[arg(long, default_value = "text")]
    format: String,
    /// Seed for the witness sample points.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum CorpusAction {
    /// Verify every standard member, or one.
    Run {
        #[arg(long)]
        only: Option<String>,
        #[arg(long, default_value = "text")]
        format: String,
    },
}

#[derive(Subcommand)]
enum SimAction {
    Run(SimArgs),
}

#[derive(Args)]
struct SimArgs {
    doc: PathBuf,
    /// Flow operator `A<k>`.
    #[arg(long, default_value = "A1")]
    flow: String,
    #[arg(long, default_value_t = 256)]
    grid: usize,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long = "T", default_value_t = 0.5)]
    t_final: f64,
    #[arg(long, default_value = "smooth")]
    profile: String,
    #[arg(long, default_value = "rk4-central")]
    scheme: String,
    /// Write the trajectory as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

/// Usage and input errors exit with 2, failed checks with 1.
enum Failure {
    Usage(String),
    Checks,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn read_doc(path: &Path) -> Result<TensorDocument, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    TensorDocument::parse(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn configure_threads() -> Result<(), Failure> {
    if let Ok(v) = std::env::var(THREADS_VAR) {
        let n: usize = v
            .parse()
            .map_err(|_| Failure::Usage(format!("{THREADS_VAR} must be a positive integer")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    Ok(())
}

fn run_parallel(doc: &TensorDocument, checks: &[CheckId], seed: u64) -> Report {
    run_document_with(doc, checks, seed, |jobs, f| jobs.par_iter().map(f).collect::<Vec<CheckResult>>())
}

fn write_out(bytes: &[u8]) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(bytes);
    let _ = out.flush();
}

fn verify(args: VerifyArgs) -> Result<(), Failure> {
    let format: Format = args.format.parse()?;
    let checks = parse_check_list(&args.checks)?;
    let doc = read_doc(&args.doc)?;
    let report = run_parallel(&doc, &checks, args.seed);
    write_out(&emit_report(&report, format));
    if report.all_pass() {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn corpus_run(only: Option<String>, format: &str) -> Result<(), Failure> {
    let format: Format = format.parse()?;
    let ids: Vec<ExampleId> = match only {
        Some(name) => vec![name.parse()?],
        None => ExampleId::standard(),
    };
    let reports: Vec<(String, Report)> = ids
        .par_iter()
        .map(|&id| {
            let report = match build(id) {
                Ok(e) => {
                    let doc = TensorDocument::from_pair(&e.g, &e.l, e.pencil.clone());
                    let checks = [
                        CheckId::Geodesic,
                        CheckId::Nijenhuis,
                        CheckId::Corpus(id.to_string()),
                    ];
                    run_document_with(&doc, &checks, 0, |jobs, f| jobs.iter().map(f).collect())
                }
                Err(e) => Report::new(
                    0,
                    vec![CheckResult::fail(
                        &format!("corpus:{id}"),
                        "construction failed",
                        pencil_core::cli::Witness {
                            component: Vec::new(),
                            expression: e.to_string(),
                            sample: None,
                        },
                    )],
                ),
            };
            (id.to_string(), report)
        })
        .collect();
    let ok = reports.iter().all(|(_, r)| r.all_pass());
    match format {
        Format::Json => {
            let map: BTreeMap<&str, &Report> = reports.iter().map(|(k, r)| (k.as_str(), r)).collect();
            let mut s = serde_json::to_string_pretty(&serde_json::to_value(&map).expect("serializes"))
                .expect("serializes");
            s.push('\n');
            write_out(s.as_bytes());
        }
        Format::Text => {
            for (id, r) in &reports {
                write_out(format!("== {id}\n").as_bytes());
                write_out(&emit_report(r, Format::Text));
            }
        }
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn sim_run(args: SimArgs) -> Result<(), Failure> {
    let doc = read_doc(&args.doc)?;
    let l = doc
        .operator()?
        .ok_or_else(|| Failure::Usage("document has no operator L".into()))?;
    let k: usize = args
        .flow
        .strip_prefix('A')
        .and_then(|s| s.parse().ok())
        .filter(|&k| k >= 1)
        .ok_or_else(|| Failure::Usage(format!("flow must be A<k>, got `{}`", args.flow)))?;
    let scheme: Scheme = args.scheme.parse()?;
    let n = l.rows();
    let a = CompiledOperator::new(&flow_operators(&l, k).operators[k - 1])?;
    let dens = conservation_densities(&l, 2)
        .iter()
        .map(|f| CompiledFun::new(f, n))
        .collect::<Result<Vec<_>, _>>()?;
    let grid = Grid1D::periodic(args.grid, 2.0 * PI)?;
    let u0 = Profile::named(&args.profile, n)?.sample(&grid);
    let dt = match args.dt {
        Some(dt) => dt,
        None => {
            let speed = max_speed(&a, &u0)?;
            if speed > 0.0 {
                0.5 * grid.spacing() / speed
            } else {
                grid.spacing()
            }
        }
    };
    let traj = match evolve(&a, &u0, &grid, dt, args.t_final, scheme) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("pencil: {e}");
            return Err(Failure::Checks);
        }
    };
    let drifts = conservation_drift(&traj, &dens)?;
    if let Some(path) = &args.csv {
        fs::write(path, trajectory_csv(&traj))
            .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    }
    let mut manifest = RunManifest::new(&traj, drifts).to_json();
    manifest.push('\n');
    write_out(manifest.as_bytes());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match cli.command {
        Command::Verify(args) => verify(args),
        Command::Corpus {
            action: CorpusAction::Run { only, format },
        } => corpus_run(only, &format),
        Command::Sim {
            action: SimAction::Run(args),
        } => sim_run(args),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("pencil: {msg}");
            ExitCode::from(2)
        }
    }
}

//! Command dispatch for the `clairaut` binary.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use clairaut_core::clairaut::{self, GeodesicState};
use clairaut_core::report::CheckReport;
use clairaut_core::ricci_decomp::{self, DecompContext};
use clairaut_core::scenario_file::{self, ScenarioFile};
use clairaut_core::submersion::SubmersionPoint;
use clairaut_core::{checks, numdiff, reference, soliton, Error, Result, SubmersionScenario};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "clairaut",
    version,
    about = "Verify Clairaut conformal submersions and Ricci-soliton identities"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Scenario JSON file, or the name of a bundled scenario.
    pub scenario: String,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Treat REPORT-ONLY comparisons as PASS/FAIL checks.
    #[arg(long)]
    pub strict_paper: bool,
    /// Override the sampling seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Override the number of sample points.
    #[arg(long)]
    pub count: Option<usize>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Horizontal conformality, frames and dilation at every sample.
    CheckConformal(Common),
    /// Christoffel symbols and frame covariant derivatives at one point.
    Christoffel {
        #[command(flatten)]
        common: Common,
        /// Evaluation point (comma-separated); defaults to the first sample.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        at: Option<Vec<f64>>,
    },
    /// O'Neill tensors, mean curvatures and their identities.
    Oneill(Common),
    /// Pointwise Clairaut certificate.
    Clairaut(Common),
    /// Integrate a geodesic and monitor the Clairaut invariant.
    Geodesic {
        #[command(flatten)]
        common: Common,
        /// Initial point (comma-separated coordinates).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        p0: Vec<f64>,
        /// Initial velocity in coordinate components.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        v0: Vec<f64>,
        /// Parameter length to integrate over.
        #[arg(long, default_value_t = 1.0)]
        length: f64,
        /// RK4 step.
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        /// Write the trajectory as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Soliton residual, μ fit, Einstein, conformal and Killing checks,
    /// gradient-soliton paths and scalar-curvature identities.
    Soliton(Common),
    /// Term-by-term Ricci decompositions and the identities they rely on.
    RicciDecompose {
        #[command(flatten)]
        common: Common,
        /// Write one row per term per sample as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Every check the scenario supports.
    Report(Common),
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::CheckConformal(c)
            | Command::Oneill(c)
            | Command::Clairaut(c)
            | Command::Soliton(c)
            | Command::Report(c) => c,
            Command::Christoffel { common, .. }
            | Command::Geodesic { common, .. }
            | Command::RicciDecompose { common, .. } => common,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Command::CheckConformal(_) => "check-conformal",
            Command::Christoffel { .. } => "christoffel",
            Command::Oneill(_) => "oneill",
            Command::Clairaut(_) => "clairaut",
            Command::Geodesic { .. } => "geodesic",
            Command::Soliton(_) => "soliton",
            Command::RicciDecompose { .. } => "ricci-decompose",
            Command::Report(_) => "report",
        }
    }
}

/// Reads a scenario from a path, falling back to the bundled scenarios.
pub fn load_scenario(arg: &str) -> Result<ScenarioFile> {
    let path = Path::new(arg);
    if path.exists() {
        return ScenarioFile::from_path(path);
    }
    match scenario_file::bundled(arg) {
        Some(text) => ScenarioFile::from_json(text),
        None => Err(Error::Input(format!(
            "no scenario file or bundled scenario named `{arg}`"
        ))),
    }
}

struct Run {
    scn: SubmersionScenario,
    samples: Vec<SubmersionPoint>,
    report: CheckReport,
}

fn prepare(command: &Command) -> Result<Run> {
    let c = command.common();
    let file = load_scenario(&c.scenario)?;
    let mut scn = file.build()?;
    if let Some(seed) = c.seed {
        scn.sampling.seed = seed;
    }
    if let Some(count) = c.count {
        if count == 0 {
            return Err(Error::Input("--count must be at least 1".into()));
        }
        scn.sampling.count = count;
    }
    let (samples, rejected) = scn.samples()?;
    let mut report = CheckReport {
        command: command.name().to_string(),
        scenario: file.name.clone(),
        scenario_hash: file.hash(),
        ..CheckReport::default()
    };
    report.environment.version = env!("CARGO_PKG_VERSION").to_string();
    report.environment.seed = scn.sampling.seed;
    report.environment.finite_difference_step = numdiff::REL_STEP;
    report.reject_all(&rejected);
    Ok(Run { scn, samples, report })
}

fn first_sample(run: &Run) -> Result<Vec<f64>> {
    run.samples
        .first()
        .map(|s| s.point().to_vec())
        .ok_or_else(|| Error::Input("no sample point was accepted".into()))
}

fn geodesic_into(run: &mut Run, p0: &[f64], v0: &[f64], length: f64, step: f64) -> Result<Vec<GeodesicState>> {
    let traj = clairaut::geodesic_integrate(run.scn.submersion.total(), p0, v0, length, step)?;
    let (states, rec) = clairaut::clairaut_monitor(&run.scn, &traj)?;
    run.report.environment.geodesic_step = Some(step);
    run.report.push(rec);
    run.report.detail(
        "geodesic",
        serde_json::json!({
            "p0": p0,
            "v0": v0,
            "length": length,
            "step": step,
            "speed_drift": traj.speed_drift(),
            "truncated": traj.truncated,
            "states": states,
        }),
    );
    Ok(states)
}

fn write_geodesic_csv(path: &Path, states: &[GeodesicState]) -> Result<()> {
    let io = |e: csv::Error| Error::Input(format!("cannot write {}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    let n = states.first().map_or(0, |s| s.x.len());
    let mut header = vec!["s".to_string()];
    header.extend((0..n).map(|i| format!("x{}", i + 1)));
    header.extend((0..n).map(|i| format!("v{}", i + 1)));
    header.extend(["speed", "omega", "clairaut_value"].map(String::from));
    w.write_record(&header).map_err(io)?;
    for s in states {
        let mut row = vec![s.s];
        row.extend(&s.x);
        row.extend(&s.v);
        row.extend([s.speed, s.omega, s.clairaut_value]);
        w.write_record(row.iter().map(|v| format!("{v:e}"))).map_err(io)?;
    }
    w.flush()
        .map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display())))
}

fn write_breakdown_csv(path: &Path, run: &Run) -> Result<()> {
    let io = |e: csv::Error| Error::Input(format!("cannot write {}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(["sample", "formula", "block", "first", "second", "term", "value"])
        .map_err(io)?;
    for (k, at) in run.samples.iter().enumerate() {
        let ctx = DecompContext::new(&run.scn.submersion, at.point())?;
        let beta = match run.scn.beta {
            Some(_) => Some(ricci_decomp::BetaData::new(&run.scn, at.point())?),
            None => None,
        };
        for b in ricci_decomp::breakdowns(&ctx, beta.as_ref()) {
            let rows = b.terms.iter().map(|t| (t.label, t.value)).chain([
                ("rhs_total", b.rhs_total),
                ("intrinsic", b.intrinsic),
                ("delta", b.delta),
            ]);
            for (label, value) in rows {
                w.write_record([
                    k.to_string(),
                    b.formula.to_string(),
                    b.pair.block.name().to_string(),
                    (b.pair.first + 1).to_string(),
                    (b.pair.second + 1).to_string(),
                    label.to_string(),
                    format!("{value:e}"),
                ])
                .map_err(io)?;
            }
        }
    }
    w.flush()
        .map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display())))
}

fn points(run: &Run) -> Vec<Vec<f64>> {
    run.samples.iter().map(|s| s.point().to_vec()).collect()
}

/// Runs one command and returns its report. Any error is an input error.
pub fn execute(command: &Command) -> Result<CheckReport> {
    let mut run = prepare(command)?;
    match command {
        Command::CheckConformal(_) => {
            let r = checks::conformal_report(&run.scn, &run.samples);
            run.report.merge(r);
        }
        Command::Christoffel { at, .. } => {
            let p = match at {
                Some(p) => p.clone(),
                None => first_sample(&run)?,
            };
            let r = checks::christoffel_report(&run.scn, &p)?;
            run.report.merge(r);
        }
        Command::Oneill(_) => {
            let r = checks::oneill_report(&run.scn, &run.samples);
            run.report.merge(r);
        }
        Command::Clairaut(_) => {
            let r = clairaut::clairaut_certificate(&run.scn, &run.samples)?;
            run.report.merge(r);
        }
        Command::Geodesic {
            p0,
            v0,
            length,
            step,
            csv,
            ..
        } => {
            run.scn.beta()?;
            let states = geodesic_into(&mut run, p0, v0, *length, *step)?;
            if let Some(path) = csv {
                write_geodesic_csv(path, &states)?;
            }
        }
        Command::Soliton(_) => {
            let r = soliton::soliton_report(&run.scn, &run.samples)?;
            run.report.merge(r);
        }
        Command::RicciDecompose { csv, .. } => {
            let r = ricci_decomp::ricci_decompose_report(&run.scn, &points(&run))?;
            run.report.merge(r);
            if let Some(path) = csv {
                write_breakdown_csv(path, &run)?;
            }
        }
        Command::Report(_) => {
            let r = checks::conformal_report(&run.scn, &run.samples);
            run.report.merge(r);
            let p = first_sample(&run)?;
            run.report.merge(checks::christoffel_report(&run.scn, &p)?);
            run.report.merge(checks::oneill_report(&run.scn, &run.samples));
            if run.scn.beta.is_some() {
                run.report
                    .merge(clairaut::clairaut_certificate(&run.scn, &run.samples)?);
                let at = &run.samples[0];
                let v0: Vec<f64> = (&at.frame.horizontal_basis[0] + &at.frame.vertical_basis[0])
                    .iter()
                    .copied()
                    .collect();
                geodesic_into(&mut run, &p, &v0, 1.0, 1e-3)?;
            }
            run.report.merge(soliton::soliton_report(&run.scn, &run.samples)?);
            run.report
                .merge(ricci_decomp::ricci_decompose_report(&run.scn, &points(&run))?);
            run.report.merge(reference::reference_report(&run.scn, &run.samples)?);
        }
    }
    if command.common().strict_paper {
        run.report.promote_report_only();
    }
    Ok(run.report)
}

/// Exit code for a finished report.
pub fn exit_code(report: &CheckReport) -> i32 {
    if report.any_failed() {
        EXIT_FAIL
    } else {
        EXIT_OK
    }
}

/// Runs a command end to end: executes, writes the report, and returns the
/// process exit code. Errors go to stderr.
pub fn run(cli: &Cli) -> i32 {
    let report = match execute(&cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    let json = report.to_json();
    match &cli.command.common().out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &json) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return EXIT_INPUT;
            }
        }
        None => print!("{json}"),
    }
    for r in &report.records {
        eprintln!(
            "{:<12} {:<48} max {:.3e} (tol {:.1e})",
            format!("{:?}", r.verdict).to_uppercase(),
            r.name,
            r.max_residual,
            r.tolerance
        );
    }
    exit_code(&report)
}

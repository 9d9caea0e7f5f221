//! `tdg`: simultaneous true-discovery bounds from the command line.
//!
//! Exit codes: 0 success, 1 validation error, 2 counterexample found by
//! `verify`, 3 I/O error.

mod io;

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use tdg_core::calibration::{calibrate_table, CalibrationResult};
use tdg_core::closed_testing::ClosedShortcut;
use tdg_core::verify::{run_verify, Fault, VerifyConfig, MAX_SCALE};
use tdg_core::{
    kr_procedure, run_table2, tdg_to_fdp, BoxedProcedure, CriticalValueFamily, CustomTable,
    DiscoveryProcedure, Error, FdpBound, KrMethod, SimulationConfig,
};

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Counterexample(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Counterexample(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "error: {m}"),
            CliError::Counterexample(m) => write!(f, "counterexample: {m}"),
            CliError::Io(m) => write!(f, "I/O error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Counterexample { suite, detail } => {
                CliError::Counterexample(format!("{suite}: {detail}"))
            }
            other => CliError::Validation(other.to_string()),
        }
    }
}

fn io_err(what: &str) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::Io(format!("{what}: {e}"))
}

#[derive(Parser)]
#[command(name = "tdg", version, about = "Simultaneous true-discovery bounds via closed testing")]
struct Cli {
    /// Worker threads for parallel work (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bound the number of true discoveries in query sets.
    Analyze(AnalyzeArgs),
    /// Run randomized self-checks on small instances.
    Verify(VerifyArgs),
    /// Calibrate admissible K&R constants c_m by Monte Carlo.
    Calibrate(CalibrateArgs),
    /// Simulate average bounds of the K&R chain.
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// CSV file with header `id,p`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// kr-original, kr-coherent, kr-closed, kr-admissible, simes-closed, or
    /// custom:<file> (CSV matrix, row n holds l_{1:n}..l_{n:n}).
    #[arg(long)]
    method: String,
    /// Query file, one set per line; standard input when omitted.
    #[arg(long)]
    queries: Option<PathBuf>,
    /// Calibrated c_m table (CSV with columns m, c_m) for kr-admissible.
    #[arg(long)]
    c_table: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 8)]
    scale: usize,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Mutate the shortcut to check that the harness reports failures.
    #[arg(long, hide = true)]
    inject_fault: bool,
}

#[derive(Args)]
struct CalibrateArgs {
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// A single size m.
    #[arg(long, conflicts_with = "m_list")]
    m: Option<usize>,
    /// Comma-separated sizes, e.g. 1,2,10.
    #[arg(long)]
    m_list: Option<String>,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Bisection tolerance on c.
    #[arg(long, default_value_t = 1e-5)]
    tol: f64,
    /// Output CSV; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, default_value_t = 1000)]
    m: usize,
    /// Comma-separated numbers of false hypotheses.
    #[arg(long)]
    m1: String,
    /// Comma-separated effect sizes.
    #[arg(long)]
    gamma: String,
    #[arg(long, default_value_t = 10_000)]
    reps: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Comma-separated sizes i of the reported sets K_i.
    #[arg(long)]
    sets: String,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value = "original,coherent,closed,admissible")]
    methods: String,
    /// Calibrated c_m table for the admissible method.
    #[arg(long)]
    c_table: Option<PathBuf>,
    /// Table CSV; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Violations CSV; standard error when omitted.
    #[arg(long)]
    violations_out: Option<PathBuf>,
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors, which is reserved for counterexamples
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Validation(format!("cannot set up {n} threads: {e}")))?;
    }
    match cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Verify(a) => verify(a),
        Command::Calibrate(a) => calibrate(a),
        Command::Simulate(a) => simulate(a),
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::Io(format!("cannot create {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

#[derive(Serialize)]
struct QueryRecord {
    set: Vec<usize>,
    size: usize,
    d: usize,
    fdp_bound: f64,
}

fn build_procedure(args: &AnalyzeArgs, p: Arc<tdg_core::PValues>) -> Result<BoxedProcedure, CliError> {
    let family = p.family();
    let shortcut = |fam: CriticalValueFamily<f64>| -> Result<BoxedProcedure, CliError> {
        Ok(Box::new(ClosedShortcut::new(&fam, Arc::clone(&p), &family)?))
    };
    if let Some(path) = args.method.strip_prefix("custom:") {
        let table = CustomTable::from_csv(&io::read_file(Path::new(path))?)?;
        let fam = CriticalValueFamily::custom(args.alpha, table)?;
        if !fam.is_monotone_in_n(family.len())? {
            return Err(CliError::Validation(format!(
                "custom thresholds in {path} are not nonincreasing in n; closed testing shortcut does not apply"
            )));
        }
        return shortcut(fam);
    }
    let kr = |method| -> Result<BoxedProcedure, CliError> {
        let table = match &args.c_table {
            Some(path) => Some(io::parse_c_table(&io::read_file(path)?)?),
            None => None,
        };
        Ok(kr_procedure(method, args.alpha, Arc::clone(&p), &family, table.as_ref())?)
    };
    match args.method.as_str() {
        "kr-original" => kr(KrMethod::Original),
        "kr-coherent" => kr(KrMethod::Coherent),
        "kr-closed" => kr(KrMethod::Closed),
        "kr-admissible" => kr(KrMethod::Admissible),
        "simes-closed" => shortcut(CriticalValueFamily::simes(args.alpha)?),
        other => Err(CliError::Validation(format!(
            "unknown method '{other}'; expected kr-original, kr-coherent, kr-closed, \
             kr-admissible, simes-closed or custom:<file>"
        ))),
    }
}

fn analyze(args: AnalyzeArgs) -> Result<(), CliError> {
    let p = Arc::new(io::parse_pvalues(&io::read_file(&args.input)?)?);
    let procedure = build_procedure(&args, Arc::clone(&p))?;
    let text = match &args.queries {
        Some(path) => io::read_file(path)?,
        None => io::read_stdin()?,
    };
    let queries = io::parse_queries(&text, p.len())?;
    let mut out = output(None)?;
    for set in queries {
        let d = procedure.bound(&set)?;
        let bound: FdpBound<f64> = tdg_to_fdp(&procedure, &set)?;
        let record = QueryRecord {
            size: set.len(),
            set: set.as_slice().to_vec(),
            d,
            fdp_bound: bound.q,
        };
        let line = serde_json::to_string(&record).expect("plain record serializes");
        writeln!(out, "{line}").map_err(io_err("writing output"))?;
    }
    out.flush().map_err(io_err("writing output"))
}

fn verify(args: VerifyArgs) -> Result<(), CliError> {
    if args.scale > MAX_SCALE {
        return Err(CliError::Validation(format!(
            "scale {} exceeds the maximum of {MAX_SCALE}",
            args.scale
        )));
    }
    let cfg = VerifyConfig {
        scale: args.scale,
        trials: args.trials,
        seed: args.seed,
        fault: args.inject_fault.then_some(Fault::ShortcutOverstatesFamily),
    };
    let report = run_verify(&cfg)?;
    let mut out = output(None)?;
    for (suite, checks) in &report.checks {
        writeln!(out, "pass {suite}: {checks} checks").map_err(io_err("writing output"))?;
    }
    writeln!(out, "all suites passed on {} trials", report.trials).map_err(io_err("writing output"))?;
    out.flush().map_err(io_err("writing output"))
}

fn calibrate(args: CalibrateArgs) -> Result<(), CliError> {
    let ms: Vec<usize> = match (&args.m, &args.m_list) {
        (Some(m), None) => vec![*m],
        (None, Some(list)) => io::parse_list(list, "size")?,
        _ => return Err(CliError::Validation("give --m or --m-list".into())),
    };
    if let Some(&bad) = ms.iter().find(|&&m| m == 0) {
        return Err(CliError::Validation(format!("size {bad} is not a valid m; sizes start at 1")));
    }
    let results = calibrate_table(args.alpha, &ms, args.samples, args.seed, args.tol)?;
    write_calibration(output(args.out.as_deref())?, &results)
}

fn write_calibration(sink: Box<dyn Write>, results: &[CalibrationResult]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(sink);
    let csv_err = |e: csv::Error| CliError::Io(format!("writing CSV: {e}"));
    w.write_record(["m", "c_m", "se", "samples", "seed", "alpha", "rng"])
        .map_err(csv_err)?;
    for r in results {
        w.write_record([
            r.m.to_string(),
            r.c_m.to_string(),
            r.standard_error.to_string(),
            r.samples.to_string(),
            r.seed.to_string(),
            r.alpha.to_string(),
            r.rng.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(io_err("writing CSV"))
}

fn simulate(args: SimulateArgs) -> Result<(), CliError> {
    let m1s: Vec<usize> = io::parse_list(&args.m1, "m1")?;
    let gammas: Vec<f64> = io::parse_list(&args.gamma, "gamma")?;
    let sets: Vec<usize> = io::parse_list(&args.sets, "set size")?;
    let methods: Vec<KrMethod> = io::parse_list(&args.methods, "method")?;
    let c_table = match &args.c_table {
        Some(path) => Some(io::parse_c_table(&io::read_file(path)?)?),
        None => None,
    };
    let mut results = Vec::new();
    for &m1 in &m1s {
        for &gamma in &gammas {
            let cfg = SimulationConfig {
                m: args.m,
                m1,
                gamma,
                reps: args.reps,
                seed: args.seed,
                report_sets: sets.clone(),
                methods: methods.clone(),
                alpha: args.alpha,
                c_table: c_table.clone(),
            };
            results.push(run_table2(&cfg)?);
        }
    }

    let csv_err = |e: csv::Error| CliError::Io(format!("writing CSV: {e}"));
    let mut table = csv::Writer::from_writer(output(args.out.as_deref())?);
    let mut header = vec!["set".to_string(), "method".to_string()];
    header.extend(
        results
            .iter()
            .map(|r| format!("m1={} gamma={}", r.config.m1, r.config.gamma)),
    );
    table.write_record(&header).map_err(csv_err)?;
    for (b, &i) in sets.iter().enumerate() {
        for (a, method) in methods.iter().enumerate() {
            let mut row = vec![format!("K{i}"), method.to_string()];
            row.extend(results.iter().map(|r| format!("{:.4}", r.averages[a][b])));
            table.write_record(&row).map_err(csv_err)?;
        }
    }
    table.flush().map_err(io_err("writing CSV"))?;

    let sink: Box<dyn Write> = match &args.violations_out {
        Some(p) => output(Some(p))?,
        None => Box::new(std::io::stderr()),
    };
    let mut viol = csv::Writer::from_writer(sink);
    viol.write_record(["m1", "gamma", "method", "violation_rate", "se", "chain_violations"])
        .map_err(csv_err)?;
    for r in &results {
        for (a, method) in methods.iter().enumerate() {
            viol.write_record([
                r.config.m1.to_string(),
                r.config.gamma.to_string(),
                method.to_string(),
                format!("{:.6}", r.violation_rates[a]),
                format!("{:.6}", r.violation_standard_errors[a]),
                r.chain_violations.to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    viol.flush().map_err(io_err("writing CSV"))
}

mod dot;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use fibertopo::corpus::{run_corpus, CorpusError, Expectations};
use fibertopo::solver::{backend_by_name, Backend, SolverParams};
use fibertopo::validate::{audit, power_trace, TraceError};
use fibertopo::{load_scenario, optimize, PipelineError, ResultFile, Scenario, SolveStatus};

/// Environment variable read when `--backend` is not given.
const BACKEND_ENV: &str = "FIBERTOPO_BACKEND";

/// Process exit codes. Every failure class maps to exactly one of these.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Code {
    Ok = 0,
    /// A check did not hold: audit violations, corpus mismatches.
    CheckFailed = 1,
    /// Unreadable or invalid input: scenario, result or expectation files,
    /// unknown names, bad flags.
    Input = 2,
    Infeasible = 3,
    /// Backend unavailable, crashed, refused the model or returned a bad
    /// point; also decode errors.
    Solver = 4,
    /// Time limit hit before any feasible point was found.
    Timeout = 5,
}

struct Failure {
    code: Code,
    message: String,
}

impl Failure {
    fn new(code: Code, message: impl ToString) -> Self {
        Failure {
            code,
            message: message.to_string(),
        }
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        let code = match e {
            PipelineError::Scenario(_) | PipelineError::Build(_) => Code::Input,
            PipelineError::Solver(_) | PipelineError::Decode(_) => Code::Solver,
        };
        Failure::new(code, e)
    }
}

impl From<fibertopo::ResultFileError> for Failure {
    fn from(e: fibertopo::ResultFileError) -> Self {
        Failure::new(Code::Input, e)
    }
}

impl From<CorpusError> for Failure {
    fn from(e: CorpusError) -> Self {
        Failure::new(Code::Input, e)
    }
}

/// Optical multi-core fiber topology synthesis.
#[derive(Parser)]
#[command(name = "fibertopo", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SolverArgs {
    /// Backend: `bb` (built-in branch and bound) or `highs`. Defaults to
    /// $FIBERTOPO_BACKEND, then `bb`.
    #[arg(long)]
    backend: Option<String>,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Relative optimality gap.
    #[arg(long, default_value_t = 1e-6)]
    gap: f64,
    /// Seed passed to backends with randomized heuristics.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Solver threads for backends that use them; 0 lets the backend decide.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

impl SolverArgs {
    fn backend(&self) -> Result<Box<dyn Backend>, Failure> {
        let name = self
            .backend
            .clone()
            .or_else(|| std::env::var(BACKEND_ENV).ok())
            .unwrap_or_else(|| "bb".into());
        backend_by_name(&name).ok_or_else(|| Failure::new(Code::Input, format!("unknown backend `{name}`")))
    }

    fn params(&self) -> Result<SolverParams, Failure> {
        let time_limit = match self.time_limit {
            None => None,
            Some(t) if t.is_finite() && t > 0.0 => Some(Duration::from_secs_f64(t)),
            Some(t) => return Err(Failure::new(Code::Input, format!("invalid time limit {t}"))),
        };
        if !(self.gap >= 0.0 && self.gap.is_finite()) {
            return Err(Failure::new(Code::Input, format!("invalid gap {}", self.gap)));
        }
        Ok(SolverParams {
            time_limit,
            rel_gap: self.gap,
            threads: self.threads,
            seed: self.seed,
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve a scenario and write the result file.
    Optimize {
        /// Scenario JSON file.
        #[arg(long, required_unless_present = "corpus", conflicts_with = "corpus")]
        scenario: Option<PathBuf>,
        /// Use a bundled corpus scenario instead of a file.
        #[arg(long)]
        corpus: Option<String>,
        /// Where to write the result JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Re-audit a stored result against its embedded scenario.
    Validate {
        #[arg(long)]
        result: PathBuf,
    },
    /// Print the power level along a signal's path.
    Trace {
        #[arg(long)]
        result: PathBuf,
        /// Signal id as written in the scenario.
        #[arg(long)]
        signal: String,
        /// Also write the trace as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a stored result as a Graphviz digraph.
    ExportDot {
        #[arg(long)]
        result: PathBuf,
        /// Defaults to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the bundled scenarios and compare against stored expectations.
    Corpus {
        /// Also solve the large in-flight entertainment case.
        #[arg(long)]
        with_ife: bool,
        /// Expectation file to use instead of the bundled one.
        #[arg(long)]
        expectations: Option<PathBuf>,
        /// Write the per-case results as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverArgs,
    },
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::new(Code::Input, format!("{}: {e}", path.display())))
}

fn summarize_devices(result: &ResultFile) -> String {
    let mut counts: Vec<(String, usize)> = Vec::new();
    for d in result.topology.iter().flat_map(|t| &t.devices) {
        let name = d.device_type.clone().unwrap_or_else(|| "absent".into());
        match counts.iter_mut().find(|(n, _)| *n == name) {
            Some((_, c)) => *c += 1,
            None => counts.push((name, 1)),
        }
    }
    counts
        .iter()
        .map(|(n, c)| format!("{c} {n}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn cmd_optimize(
    scenario: Option<PathBuf>,
    corpus: Option<String>,
    out: Option<PathBuf>,
    solver: SolverArgs,
) -> Result<Code, Failure> {
    let sc: Scenario = match (scenario, corpus) {
        (Some(path), _) => load_scenario(&path).map_err(|e| Failure::new(Code::Input, e))?,
        (None, Some(name)) => fibertopo::corpus::scenario(&name)?,
        (None, None) => return Err(Failure::new(Code::Input, "no scenario given")),
    };
    let backend = solver.backend()?;
    let params = solver.params()?;
    let outcome = optimize(&sc, backend.as_ref(), &params)?;
    let result = outcome.result_file();
    if let Some(path) = &out {
        result.save(path)?;
    }

    let s = &result.stats;
    println!("scenario   {}", sc.name);
    println!("backend    {}", s.backend);
    println!("status     {:?}", s.status);
    println!(
        "model      {} rows, {} binary, {} integer, {} continuous columns, p_lim {} dB",
        s.rows, s.binary, s.integer, s.continuous, s.p_lim
    );
    println!("wall       {:.3} s, gap {:.4}%", s.wall_seconds, 100.0 * s.gap);
    if let Some(t) = &result.topology {
        println!("objective  {}", t.objective_value);
        println!("devices    {}", summarize_devices(&result));
        let cables: Vec<String> = t
            .existing_cables()
            .map(|c| format!("{}={}", c.id, c.cable_type.as_deref().unwrap_or_default()))
            .collect();
        println!("cables     {}", cables.join(" "));
        for w in &t.warnings {
            println!("warning    {w}");
        }
    }
    if let Some(r) = &result.report {
        println!("audit      {}", if r.passes { "pass" } else { "FAIL" });
        for v in &r.violations {
            println!("  {} {}: {}", v.rule, v.element, v.detail);
        }
    }

    Ok(status_code(
        s.status,
        result.report.as_ref().is_some_and(|r| r.passes),
    ))
}

fn status_code(status: SolveStatus, audit_passes: bool) -> Code {
    match status {
        SolveStatus::Optimal | SolveStatus::FeasibleGap if audit_passes => Code::Ok,
        SolveStatus::Optimal | SolveStatus::FeasibleGap => Code::CheckFailed,
        SolveStatus::Infeasible => Code::Infeasible,
        SolveStatus::Timeout => Code::Timeout,
        SolveStatus::Unbounded => Code::Solver,
    }
}

fn load_with_topology(path: &Path) -> Result<(ResultFile, Scenario), Failure> {
    let result = ResultFile::load(path)?;
    let scenario = result.scenario()?;
    if result.topology.is_none() {
        return Err(Failure::new(
            Code::Input,
            format!(
                "{} holds no topology (status {:?})",
                path.display(),
                result.stats.status
            ),
        ));
    }
    Ok((result, scenario))
}

fn cmd_validate(result: PathBuf) -> Result<Code, Failure> {
    let (res, scenario) = load_with_topology(&result)?;
    let report = audit(res.topology.as_ref().unwrap(), &scenario);
    if report.passes {
        println!("pass");
        return Ok(Code::Ok);
    }
    for v in &report.violations {
        println!("{} {}: {}", v.rule, v.element, v.detail);
    }
    Ok(Code::CheckFailed)
}

fn cmd_trace(result: PathBuf, signal: String, out: Option<PathBuf>) -> Result<Code, Failure> {
    let (res, scenario) = load_with_topology(&result)?;
    let trace = power_trace(res.topology.as_ref().unwrap(), &scenario, &signal).map_err(|e| match e {
        TraceError::UnknownSignal(_) => Failure::new(Code::Input, e),
        _ => Failure::new(Code::CheckFailed, e),
    })?;
    println!("{:<10} {:<14} {:>9} {:>8}", "step", "element", "dBm", "delta");
    for p in &trace.points {
        println!(
            "{:<10} {:<14} {:>9.2} {:>8.2}",
            format!("{:?}", p.step).to_lowercase(),
            p.element,
            p.power,
            p.delta
        );
    }
    if let Some(path) = out {
        write_file(
            &path,
            &(serde_json::to_string_pretty(&trace).expect("trace serializes") + "\n"),
        )?;
    }
    Ok(Code::Ok)
}

fn cmd_export_dot(result: PathBuf, out: Option<PathBuf>) -> Result<Code, Failure> {
    let (res, scenario) = load_with_topology(&result)?;
    let text = dot::render(res.topology.as_ref().unwrap(), &scenario);
    match out {
        Some(path) => write_file(&path, &text)?,
        None => print!("{text}"),
    }
    Ok(Code::Ok)
}

fn cmd_corpus(
    with_ife: bool,
    expectations: Option<PathBuf>,
    out: Option<PathBuf>,
    solver: SolverArgs,
) -> Result<Code, Failure> {
    let exp = match &expectations {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::new(Code::Input, format!("{}: {e}", path.display())))?;
            Expectations::parse(&text)?
        }
        None => Expectations::bundled(),
    };
    let backend = solver.backend()?;
    let params = solver.params()?;
    let results = run_corpus(backend.as_ref(), &params, &exp, with_ife)?;

    println!(
        "{:<10} {:<6} {:<12} {:>12} {:>9}",
        "case", "result", "status", "objective", "seconds"
    );
    for r in &results {
        let obj = r.objective.map_or("-".to_string(), |o| o.to_string());
        println!(
            "{:<10} {:<6} {:<12} {:>12} {:>9.2}",
            r.scenario,
            if r.passed { "pass" } else { "FAIL" },
            r.status,
            obj,
            r.wall_seconds
        );
        for f in &r.failures {
            println!("    {f}");
        }
    }
    let passed = results.iter().filter(|r| r.passed).count();
    println!("{passed}/{} passed", results.len());
    if let Some(path) = out {
        write_file(
            &path,
            &(serde_json::to_string_pretty(&results).expect("results serialize") + "\n"),
        )?;
    }
    Ok(if passed == results.len() {
        Code::Ok
    } else {
        Code::CheckFailed
    })
}

fn run(cli: Cli) -> Result<Code, Failure> {
    match cli.command {
        Command::Optimize {
            scenario,
            corpus,
            out,
            solver,
        } => cmd_optimize(scenario, corpus, out, solver),
        Command::Validate { result } => cmd_validate(result),
        Command::Trace { result, signal, out } => cmd_trace(result, signal, out),
        Command::ExportDot { result, out } => cmd_export_dot(result, out),
        Command::Corpus {
            with_ife,
            expectations,
            out,
            solver,
        } => cmd_corpus(with_ife, expectations, out, solver),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                Code::Input as u8
            } else {
                Code::Ok as u8
            });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code as u8)
        }
    }
}

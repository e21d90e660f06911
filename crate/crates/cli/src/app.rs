use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use polysched_core::bounds::{best_bound, bound, BoundConfig, BoundReport, Certificate};
use polysched_core::coloring::{color_edges, round_robin_from};
use polysched_core::exact::{dps_feasible, ops_optimal_heat, ExactError, ExactLimits, Verdict};
use polysched_core::generate::{generate, random_ops, seeded_rng, Family};
use polysched_core::io::{emit_dps, emit_instance, emit_schedule, parse_instance, parse_schedule, Instance};
use polysched_core::layering::layered_schedule;
use polysched_core::model::{dps_to_ops, heat, verify_dps, DpsInstance, Heat, OpsInstance, PeriodicSchedule};
use polysched_core::rational::{format_rational, parse_rational, Rational};
use polysched_satred::cnf::{max3sat_oracle, parse_dimacs, CnfError, ORACLE_MAX_VARS};
use polysched_satred::compile::{compile, emit_provenance, gap_factor, load_artifact, ReductionArtifact};
use polysched_satred::synth::{extract_assignment, synthesize_schedule, SynthesisError};

use crate::report::{emit_csv, emit_text, run_suite, Algorithm, BoundChoice, SuiteConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_PARSE: i32 = 65;
pub const EXIT_NO_INPUT: i32 = 66;
pub const EXIT_CANT_CREATE: i32 = 73;

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Parse { .. } => EXIT_PARSE,
            CliError::Read { .. } => EXIT_NO_INPUT,
            CliError::Write { .. } => EXIT_CANT_CREATE,
        }
    }

    fn parse(path: &Path, err: impl std::fmt::Display) -> Self {
        CliError::Parse {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }
}

type CmdResult = Result<i32, CliError>;

#[derive(Debug, Parser)]
#[command(name = "polysched", version, about = "Polyamorous scheduling: solvers, bounds and the 3SAT reduction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print a named instance family, or a seeded random instance (`random`).
    Gen(GenArgs),
    /// Check a schedule: deadlines for a dps instance, finite heat for an ops instance.
    Verify(VerifyArgs),
    /// Heat of a schedule; a dps instance is read as growth rates 1/f.
    Heat(HeatArgs),
    /// Build a schedule with an approximation algorithm.
    Schedule(ScheduleArgs),
    /// Decide whether a dps instance has a schedule.
    Feasible(FeasibleArgs),
    /// Optimal heat of an ops instance.
    Solve(SolveArgs),
    /// Lower bound on the optimal heat.
    Bound(BoundArgs),
    /// Compile a CNF formula and threshold into a dps instance with a provenance sidecar.
    ReduceSat(ReduceArgs),
    /// Schedule a compiled instance from a truth assignment.
    Synth(SynthArgs),
    /// Read the truth assignment back from a schedule of a compiled instance.
    Extract(ExtractArgs),
    /// Ratio table over fixtures, files and seeded random instances.
    Suite(SuiteArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Debug, Args)]
struct GenArgs {
    /// Family name such as `figure1`, `tadpole(2,3)`, `pinwheel-star(2,4,4)`, or `random`.
    family: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 6)]
    persons: usize,
    #[arg(long, default_value_t = 8)]
    edges: usize,
    /// Growth rates drawn by `random`.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,6")]
    growth: Vec<String>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    instance: PathBuf,
    schedule: PathBuf,
}

#[derive(Debug, Args)]
struct HeatArgs {
    instance: PathBuf,
    schedule: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScheduleAlgo {
    Coloring,
    Layering,
}

#[derive(Debug, Args)]
struct ScheduleArgs {
    #[arg(long)]
    algo: ScheduleAlgo,
    instance: PathBuf,
    /// Where to write the schedule.
    #[arg(short, long, alias = "emit-schedule")]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Args)]
struct LimitArgs {
    /// State visits before the search gives up.
    #[arg(long, default_value_t = 50_000_000)]
    max_states: u64,
    #[arg(long)]
    time_limit_ms: Option<u64>,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long)]
    no_dominance: bool,
}

impl LimitArgs {
    fn limits(&self) -> ExactLimits {
        ExactLimits {
            max_states: self.max_states,
            time_limit: self.time_limit_ms.map(Duration::from_millis),
            dominance: !self.no_dominance,
            threads: self.threads.max(1),
            ..ExactLimits::default()
        }
    }
}

#[derive(Debug, Args)]
struct FeasibleArgs {
    instance: PathBuf,
    #[arg(long)]
    emit_schedule: Option<PathBuf>,
    #[command(flatten)]
    limits: LimitArgs,
}

#[derive(Debug, Args)]
struct SolveArgs {
    /// Exhaustive search; the only mode.
    #[arg(long, required = true)]
    exact: bool,
    instance: PathBuf,
    #[arg(long)]
    emit_schedule: Option<PathBuf>,
    #[command(flatten)]
    limits: LimitArgs,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Args)]
struct BoundArgs {
    /// trivial, bamboo, mass, polydensity or best.
    #[arg(long, default_value = "best")]
    method: BoundChoice,
    instance: PathBuf,
    #[arg(long)]
    certificate: bool,
    #[arg(long, default_value_t = BoundConfig::default().matching_cap)]
    matching_cap: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Args)]
struct ReduceArgs {
    #[arg(long)]
    cnf: PathBuf,
    /// Number of clauses that must be satisfied.
    #[arg(short)]
    k: usize,
    /// Instance path; the sidecar goes next to it with `.prov` appended.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long)]
    artifact: PathBuf,
    /// One 0/1 digit per variable, x1 first.
    #[arg(long)]
    assign: String,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExtractArgs {
    #[arg(long)]
    artifact: PathBuf,
    #[arg(long)]
    schedule: PathBuf,
}

#[derive(Debug, Args)]
struct SuiteArgs {
    #[arg(long)]
    seed: u64,
    /// Random instances to add after the fixtures and files.
    #[arg(long, default_value_t = 20)]
    count: usize,
    #[arg(long, default_value_t = 6)]
    persons: usize,
    #[arg(long, default_value_t = 8)]
    edges: usize,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,6")]
    growth: Vec<String>,
    /// Named fixtures, e.g. `figure1`.
    #[arg(long)]
    family: Vec<String>,
    /// Instance files.
    #[arg(long)]
    instance: Vec<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "coloring,layering")]
    algo: Vec<Algorithm>,
    #[arg(long, default_value = "best")]
    bound: BoundChoice,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Include wall time, which makes the table vary between runs.
    #[arg(long)]
    timing: bool,
    #[command(flatten)]
    limits: LimitArgs,
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Verify(a) => verify(a),
        Command::Heat(a) => heat_cmd(a),
        Command::Schedule(a) => schedule(a),
        Command::Feasible(a) => feasible(a),
        Command::Solve(a) => solve(a),
        Command::Bound(a) => bound_cmd(a),
        Command::ReduceSat(a) => reduce_sat(a),
        Command::Synth(a) => synth(a),
        Command::Extract(a) => extract(a),
        Command::Suite(a) => suite(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("polysched: {e}");
        e.code()
    })
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.display().to_string(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Write {
        path: path.display().to_string(),
        source,
    })
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_instance(path: &Path) -> Result<Instance, CliError> {
    parse_instance(&read(path)?).map_err(|e| CliError::parse(path, e))
}

/// A dps instance is read as growth rates `1/f`, so heat at most one means every deadline holds.
fn read_ops(path: &Path) -> Result<OpsInstance, CliError> {
    Ok(match read_instance(path)? {
        Instance::Ops(i) => i,
        Instance::Dps(i) => dps_to_ops(&i),
    })
}

fn read_dps(path: &Path) -> Result<DpsInstance, CliError> {
    match read_instance(path)? {
        Instance::Dps(i) => Ok(i),
        Instance::Ops(_) => Err(CliError::parse(path, "expected a dps instance, found ops")),
    }
}

fn read_schedule(path: &Path, instance: &Instance) -> Result<PeriodicSchedule, CliError> {
    parse_schedule(&read(path)?, instance.graph()).map_err(|e| CliError::parse(path, e))
}

fn parse_growth(raw: &[String]) -> Result<Vec<Rational>, CliError> {
    let growth: Vec<Rational> = raw
        .iter()
        .map(|s| parse_rational(s.trim()).map_err(|e| CliError::Usage(format!("--growth `{s}`: {e}"))))
        .collect::<Result<_, _>>()?;
    if growth.is_empty() || growth.iter().any(|g| *g <= Rational::from_integer(0.into())) {
        return Err(CliError::Usage("--growth needs positive rates".into()));
    }
    Ok(growth)
}

/// Key/value lines, or a two-row CSV.
struct Record(Vec<(&'static str, String)>);

impl Record {
    fn new() -> Self {
        Record(Vec::new())
    }

    fn push(&mut self, key: &'static str, value: impl ToString) -> &mut Self {
        self.0.push((key, value.to_string()));
        self
    }

    fn emit(&self, format: Format) -> String {
        match format {
            Format::Text => {
                let width = self.0.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
                self.0.iter().map(|(k, v)| format!("{k:<width$}  {v}\n")).collect()
            }
            Format::Csv => {
                let keys: Vec<&str> = self.0.iter().map(|(k, _)| *k).collect();
                let values: Vec<String> = self.0.iter().map(|(_, v)| v.replace(',', ";")).collect();
                format!("{}\n{}\n", keys.join(","), values.join(","))
            }
        }
    }
}

fn gen(a: GenArgs) -> CmdResult {
    let instance = if a.family == "random" {
        let growth = parse_growth(&a.growth)?;
        Instance::Ops(random_ops(&mut seeded_rng(a.seed), a.persons, a.edges, &growth))
    } else {
        let family: Family = a.family.parse().map_err(|e| CliError::Usage(format!("{e}")))?;
        let generated = generate(&family);
        for w in &generated.warnings {
            eprintln!("warning: {w}");
        }
        generated.instance
    };
    write_or_print(a.output.as_deref(), &emit_instance(&instance))?;
    Ok(EXIT_OK)
}

fn verify(a: VerifyArgs) -> CmdResult {
    let instance = read_instance(&a.instance)?;
    let schedule = read_schedule(&a.schedule, &instance)?;
    match &instance {
        Instance::Dps(dps) => match verify_dps(dps, &schedule) {
            Ok(()) => {
                println!("valid");
                Ok(EXIT_OK)
            }
            Err(v) => {
                println!("invalid: {v}");
                Ok(EXIT_INFEASIBLE)
            }
        },
        Instance::Ops(ops) => match heat(ops, &schedule) {
            Heat::Finite(h) => {
                println!("valid, heat {}", format_rational(&h));
                Ok(EXIT_OK)
            }
            Heat::Unbounded => {
                println!("invalid: some edge never occurs");
                Ok(EXIT_INFEASIBLE)
            }
        },
    }
}

fn heat_cmd(a: HeatArgs) -> CmdResult {
    let instance = read_instance(&a.instance)?;
    let schedule = read_schedule(&a.schedule, &instance)?;
    let ops = match &instance {
        Instance::Ops(i) => i.clone(),
        Instance::Dps(i) => dps_to_ops(i),
    };
    println!("{}", heat(&ops, &schedule));
    Ok(EXIT_OK)
}

fn bound_fields(record: &mut Record, report: &BoundReport) {
    record
        .push("bound", format_rational(&report.value))
        .push("bound_method", &report.method);
}

fn schedule(a: ScheduleArgs) -> CmdResult {
    let ops = read_ops(&a.instance)?;
    let mut record = Record::new();
    let schedule = match a.algo {
        ScheduleAlgo::Coloring => {
            let coloring = color_edges(ops.graph());
            record.push("algorithm", "coloring").push("colors", coloring.num_colors());
            round_robin_from(&coloring)
        }
        ScheduleAlgo::Layering => {
            let layered = layered_schedule(&ops);
            record
                .push("algorithm", "layering")
                .push("l", layered.decomposition.layers.len() - 1)
                .push("active_layers", layered.active_layers);
            layered.schedule
        }
    };
    let h = heat(&ops, &schedule);
    let lb = BoundChoice::Best.evaluate(&ops, BoundConfig::default()).expect("best bound always exists");
    record.push("period", schedule.period()).push("heat", &h);
    bound_fields(&mut record, &lb);
    let ratio = match h.finite() {
        Some(h) if lb.value > Rational::from_integer(0.into()) => format_rational(&(h / &lb.value)),
        _ => "-".into(),
    };
    record.push("ratio", ratio);
    if let Some(path) = &a.output {
        write(path, &emit_schedule(&schedule, ops.graph()))?;
    }
    print!("{}", record.emit(a.format));
    Ok(EXIT_OK)
}

fn feasible(a: FeasibleArgs) -> CmdResult {
    let dps = read_dps(&a.instance)?;
    let result = dps_feasible(&dps, a.limits.limits());
    let code = match &result.verdict {
        Verdict::Feasible(s) => {
            println!("feasible (period {}, {} states)", s.period(), result.explored);
            if let Some(path) = &a.emit_schedule {
                write(path, &emit_schedule(s, dps.graph()))?;
            }
            EXIT_OK
        }
        Verdict::Infeasible => {
            println!("infeasible ({} states)", result.explored);
            EXIT_INFEASIBLE
        }
        Verdict::Inconclusive(reason) => {
            println!("inconclusive: {reason}");
            EXIT_INCONCLUSIVE
        }
    };
    Ok(code)
}

fn solve(a: SolveArgs) -> CmdResult {
    debug_assert!(a.exact);
    let ops = read_ops(&a.instance)?;
    match ops_optimal_heat(&ops, a.limits.limits()) {
        Ok(opt) => {
            let mut record = Record::new();
            record
                .push("heat", format_rational(&opt.heat))
                .push(
                    "infeasible_below",
                    opt.predecessor.as_ref().map_or_else(|| "-".into(), format_rational),
                )
                .push("probes", opt.probes.len())
                .push("period", opt.witness.period());
            if let Some(path) = &a.emit_schedule {
                write(path, &emit_schedule(&opt.witness, ops.graph()))?;
            }
            print!("{}", record.emit(a.format));
            Ok(EXIT_OK)
        }
        Err(e @ ExactError::Inconclusive { .. }) => {
            println!("inconclusive: {e}");
            Ok(EXIT_INCONCLUSIVE)
        }
    }
}

fn certificate_text(c: &Certificate) -> String {
    match c {
        Certificate::None => "none".into(),
        Certificate::Person(p) => format!("person {p}"),
        Certificate::Subset { edges, inner } => {
            let es: Vec<String> = edges.iter().map(usize::to_string).collect();
            format!("subset [{}] via {}", es.join(" "), certificate_text(&inner.certificate))
        }
        Certificate::Dual(z) => {
            let ws: Vec<String> = z.weights().iter().map(format_rational).collect();
            format!("z = {}", ws.join(" "))
        }
    }
}

fn bound_cmd(a: BoundArgs) -> CmdResult {
    let ops = read_ops(&a.instance)?;
    let config = BoundConfig {
        matching_cap: a.matching_cap,
    };
    let report = match a.method {
        BoundChoice::Best => best_bound(&ops, config),
        BoundChoice::Method(m) => match bound(&ops, m, config) {
            Ok(r) => r,
            Err(e) => {
                println!("inconclusive: {e}");
                return Ok(EXIT_INCONCLUSIVE);
            }
        },
    };
    let mut record = Record::new();
    record.push("method", &report.method).push("value", format_rational(&report.value));
    if a.certificate {
        record.push("certificate", certificate_text(&report.certificate));
    }
    print!("{}", record.emit(a.format));
    Ok(EXIT_OK)
}

fn sidecar_path(instance: &Path) -> PathBuf {
    let mut name = instance.as_os_str().to_owned();
    name.push(".prov");
    PathBuf::from(name)
}

fn reduce_sat(a: ReduceArgs) -> CmdResult {
    let text = read(&a.cnf)?;
    let formula = parse_dimacs(&text, a.k).map_err(|e| match e {
        CnfError::ThresholdTooLarge { .. } => CliError::Usage(format!("-k: {e}")),
        other => CliError::parse(&a.cnf, other),
    })?;
    let artifact = compile(&formula);
    write(&a.output, &emit_dps(&artifact.dps))?;
    write(&sidecar_path(&a.output), &emit_provenance(&artifact))?;
    let graph = artifact.dps.graph();
    let mut record = Record::new();
    record
        .push("persons", graph.num_persons())
        .push("edges", graph.num_edges())
        .push("max_frequency", artifact.max_frequency())
        .push("gap_factor", format_rational(&gap_factor(artifact.max_frequency())));
    if formula.num_vars() <= ORACLE_MAX_VARS {
        let best = max3sat_oracle(&formula).expect("within the oracle limit");
        record.push("max_satisfiable", best).push("k", a.k);
    }
    print!("{}", record.emit(Format::Text));
    Ok(EXIT_OK)
}

fn read_artifact(path: &Path) -> Result<ReductionArtifact, CliError> {
    let instance = read(path)?;
    let prov_path = sidecar_path(path);
    let provenance = read(&prov_path)?;
    load_artifact(&instance, &provenance).map_err(|e| CliError::parse(&prov_path, e))
}

fn parse_bits(raw: &str) -> Result<Vec<bool>, CliError> {
    raw.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(CliError::Usage(format!("--assign takes 0/1 digits, found `{other}`"))),
        })
        .collect()
}

fn bits_text(assignment: &[bool]) -> String {
    assignment.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn synth(a: SynthArgs) -> CmdResult {
    let artifact = read_artifact(&a.artifact)?;
    let assignment = parse_bits(&a.assign)?;
    match synthesize_schedule(&artifact, &assignment) {
        Ok(schedule) => {
            write_or_print(a.output.as_deref(), &emit_schedule(&schedule, artifact.dps.graph()))?;
            eprintln!(
                "satisfied {} of {} clauses (k = {})",
                artifact.formula.satisfied_count(&assignment),
                artifact.formula.num_clauses(),
                artifact.formula.threshold()
            );
            Ok(EXIT_OK)
        }
        Err(e @ SynthesisError::WrongLength { .. }) => Err(CliError::Usage(e.to_string())),
        Err(e) => {
            println!("refused: {e}");
            Ok(EXIT_INFEASIBLE)
        }
    }
}

fn extract(a: ExtractArgs) -> CmdResult {
    let artifact = read_artifact(&a.artifact)?;
    let schedule = parse_schedule(&read(&a.schedule)?, artifact.dps.graph()).map_err(|e| CliError::parse(&a.schedule, e))?;
    match extract_assignment(&artifact, &schedule) {
        Ok(assignment) => {
            let f = &artifact.formula;
            let mut record = Record::new();
            record
                .push("assignment", bits_text(&assignment))
                .push("satisfied", f.satisfied_count(&assignment))
                .push("clauses", f.num_clauses())
                .push("k", f.threshold());
            print!("{}", record.emit(Format::Text));
            Ok(EXIT_OK)
        }
        Err(e) => {
            println!("rejected: {e}");
            Ok(EXIT_INFEASIBLE)
        }
    }
}

fn suite(a: SuiteArgs) -> CmdResult {
    let growth = parse_growth(&a.growth)?;
    let mut instances: Vec<(String, OpsInstance)> = Vec::new();
    for name in &a.family {
        let family: Family = name.parse().map_err(|e| CliError::Usage(format!("{e}")))?;
        let ops = match generate(&family).instance {
            Instance::Ops(i) => i,
            Instance::Dps(i) => dps_to_ops(&i),
        };
        instances.push((family.to_string(), ops));
    }
    for path in &a.instance {
        instances.push((path.display().to_string(), read_ops(path)?));
    }
    let mut rng = seeded_rng(a.seed);
    for i in 0..a.count {
        instances.push((format!("random-{}-{i}", a.seed), random_ops(&mut rng, a.persons, a.edges, &growth)));
    }
    if a.algo.is_empty() {
        return Err(CliError::Usage("--algo needs at least one algorithm".into()));
    }
    let config = SuiteConfig {
        exact: a.limits.limits(),
        ..SuiteConfig::default()
    };
    let reports = run_suite(&instances, &a.algo, a.bound, config);
    let table = match a.format {
        Format::Text => emit_text(&reports, a.timing),
        Format::Csv => emit_csv(&reports, a.timing),
    };
    print!("{table}");
    let failed = reports.iter().flat_map(|r| &r.checks).any(|c| !c.holds);
    Ok(if failed { EXIT_INFEASIBLE } else { EXIT_OK })
}

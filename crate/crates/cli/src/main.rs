mod output;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use hyperperc::algebra;
use hyperperc::engine;
use hyperperc::extremal::{self, ExtremalSeed};
use hyperperc::norms::{LemmaConfig, LemmaId};
use hyperperc::oracle::{self, OracleReport};
use hyperperc::verify::{self, Suite, SuiteParams, SuiteReport};
use hyperperc::{CubeShape, Error, Exec, Pattern, VertexSet};

use output::Format;

const EXIT_USAGE: u8 = 1;
const EXIT_GUARD: u8 = 2;
const EXIT_FAILED: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "hyperperc",
    version,
    about = "Bootstrap percolation on q-ary hypercubes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Run batch work on one thread.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the process from a seed and report rounds and percolation.
    Simulate(SimulateArgs),
    /// Report the closure of a seed and its subcube decomposition.
    Closure(SimulateArgs),
    /// Build the extremal seed for Q_{n,q}.
    Construct(ConstructArgs),
    /// Evaluate the closed form for the maximum percolation time.
    Formula(FormulaArgs),
    /// Brute-force maximum percolation time on a small cube.
    Oracle(OracleArgs),
    /// Run one verification suite.
    Verify(VerifyArgs),
    /// Check the predicted sets for one lemma configuration.
    VerifyLemma(VerifyLemmaArgs),
    /// Run every verification suite.
    VerifyAll(SuiteArgs),
}

#[derive(Args, Debug)]
struct ShapeArgs {
    #[arg(long)]
    q: Option<u32>,
    #[arg(long)]
    n: Option<usize>,
}

impl ShapeArgs {
    fn shape(&self) -> Result<CubeShape, Failure> {
        match (self.n, self.q) {
            (Some(n), Some(q)) => Ok(CubeShape::new(n, q)?),
            _ => Err(Failure::usage("--q and --n are required")),
        }
    }
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    shape: ShapeArgs,

    /// Infection threshold.
    #[arg(long, default_value_t = 2)]
    r: u32,

    /// Seed vertices. Comma separated digit strings when q <= 10
    /// (`00,11`), otherwise `;` separated tokens (`0,10;11,3`).
    #[arg(long, group = "source", allow_hyphen_values = true)]
    seed: Option<String>,

    /// File with one vertex per line; `#` starts a comment.
    #[arg(long, group = "source")]
    seed_file: Option<PathBuf>,

    /// Use the extremal seed for `q,n`.
    #[arg(long, group = "source", value_name = "Q,N")]
    construct: Option<String>,

    /// Include per-vertex infection times.
    #[arg(long)]
    timestamps: bool,
}

#[derive(Args, Debug)]
struct ConstructArgs {
    #[command(flatten)]
    shape: ShapeArgs,

    /// Lift the seed this many extra dimensions.
    #[arg(long, default_value_t = 0)]
    lift: usize,
}

#[derive(Args, Debug)]
struct FormulaArgs {
    #[arg(long)]
    q: u32,
    #[arg(long, conflicts_with = "max_n")]
    n: Option<u64>,
    #[arg(long)]
    max_n: Option<u64>,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[command(flatten)]
    shape: ShapeArgs,

    /// Only examine seeds with at most this many vertices.
    #[arg(long)]
    cap: Option<usize>,

    /// List containment-minimal spanning seeds instead (needs --cap).
    #[arg(long, requires = "cap")]
    minimal: bool,

    /// Work budget in elementary vertex updates.
    #[arg(long, env = "PERC_BUDGET")]
    budget: Option<u128>,
}

#[derive(Args, Debug)]
struct SuiteArgs {
    #[arg(long)]
    q: Option<u32>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    max_n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    l: Option<usize>,
    /// Random trials per shape for sampled suites.
    #[arg(long)]
    samples: Option<usize>,
    /// Seed-size cap for the capped oracle.
    #[arg(long)]
    cap: Option<usize>,
    #[arg(long, default_value_t = verify::DEFAULT_RNG_SEED)]
    rng_seed: u64,
    #[arg(long, env = "PERC_BUDGET")]
    budget: Option<u128>,
}

impl SuiteArgs {
    fn params(&self, exec: Exec) -> SuiteParams {
        SuiteParams {
            q: self.q,
            n: self.n,
            max_n: self.max_n,
            k: self.k,
            l: self.l,
            samples: self.samples,
            cap: self.cap,
            rng_seed: self.rng_seed,
            budget: self.budget.unwrap_or(oracle::DEFAULT_BUDGET),
            exec,
        }
    }
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// st1..st6, lemma3, lemma4, lemma5, lemma6, lemma13, formula,
    /// monotonicity, oracle, engine or all.
    #[arg(long)]
    suite: String,
    #[command(flatten)]
    params: SuiteArgs,
}

#[derive(Args, Debug)]
struct VerifyLemmaArgs {
    /// st1..st6
    #[arg(long)]
    lemma: String,
    #[arg(long)]
    q: u32,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    l: usize,
    /// Trailing symbols, e.g. `2` or `1,2`. All valid choices when absent.
    #[arg(long, value_delimiter = ',')]
    marks: Option<Vec<u32>>,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_resource_guard() {
            EXIT_GUARD
        } else {
            EXIT_USAGE
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

struct Report {
    text: String,
    passed: bool,
}

fn render<T: Serialize>(command: &str, body: &T, format: Format) -> Result<Report, Failure> {
    let text = output::render(command, body, format).map_err(Failure::usage)?;
    Ok(Report { text, passed: true })
}

fn split_seed(text: &str, q: u32) -> Vec<&str> {
    let separators: &[char] = if q <= 10 { &[',', ';'] } else { &[';'] };
    text.split(|c: char| separators.contains(&c) || c.is_whitespace())
        .map(str::trim)
        .filter(|w| !w.is_empty())
        .collect()
}

fn parse_pair(text: &str) -> Result<(u32, usize), Failure> {
    let bad = || Failure::usage(format!("expected Q,N, got '{text}'"));
    let (q, n) = text.split_once(',').ok_or_else(bad)?;
    Ok((
        q.trim().parse().map_err(|_| bad())?,
        n.trim().parse().map_err(|_| bad())?,
    ))
}

fn load_seed(args: &SimulateArgs) -> Result<VertexSet, Failure> {
    if let Some(spec) = &args.construct {
        let (q, n) = parse_pair(spec)?;
        if args.shape.q.is_some_and(|x| x != q) || args.shape.n.is_some_and(|x| x != n) {
            return Err(Failure::usage("--q/--n disagree with --construct"));
        }
        return Ok(extremal::build_extremal_seed(q, n)?.vertices);
    }
    let shape = args.shape.shape()?;
    if let Some(text) = &args.seed {
        return Ok(VertexSet::parse(shape, split_seed(text, shape.q()))?);
    }
    if let Some(path) = &args.seed_file {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
        let words = text
            .lines()
            .map(|line| line.split('#').next().unwrap_or("").trim())
            .filter(|w| !w.is_empty());
        return Ok(VertexSet::parse(shape, words)?);
    }
    Err(Failure::usage(
        "one of --seed, --seed-file or --construct is required",
    ))
}

#[derive(Serialize)]
struct Timestamp {
    vertex: String,
    time: Option<u32>,
}

#[derive(Serialize)]
struct SimulateReport {
    shape: CubeShape,
    r: u32,
    seed: VertexSet,
    percolated: bool,
    rounds: u32,
    infected: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    timestamps: Option<Vec<Timestamp>>,
}

fn simulate(args: &SimulateArgs, format: Format) -> Result<Report, Failure> {
    let seed = load_seed(args)?;
    let record = engine::run(&seed, args.r)?;
    let shape = seed.shape();
    let timestamps = args.timestamps.then(|| {
        shape
            .vertices()
            .map(|v| Timestamp {
                vertex: shape.format_vertex(v),
                time: record.time_of(v),
            })
            .collect()
    });
    let summary = record.summary();
    let report = SimulateReport {
        shape,
        r: args.r,
        seed,
        percolated: summary.percolated,
        rounds: summary.rounds,
        infected: summary.infected,
        timestamps,
    };
    render("simulate", &report, format)
}

#[derive(Serialize)]
struct ClosureReport {
    shape: CubeShape,
    r: u32,
    seed: VertexSet,
    seed_closed: bool,
    closure: VertexSet,
    size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    components: Option<Vec<Pattern>>,
}

fn closure(args: &SimulateArgs, format: Format) -> Result<Report, Failure> {
    let seed = load_seed(args)?;
    let closure = engine::closure(&seed, args.r)?;
    // subcube decomposition is only meaningful for the 2-neighbour process
    let components = if args.r == 2 {
        Some(algebra::decompose_closed(&closure)?.components)
    } else {
        None
    };
    let report = ClosureReport {
        shape: seed.shape(),
        r: args.r,
        seed_closed: closure == seed,
        size: closure.len(),
        seed,
        closure,
        components,
    };
    render("closure", &report, format)
}

#[derive(Serialize)]
struct ConstructReport {
    #[serde(flatten)]
    seed: ExtremalSeed,
    time: Option<u32>,
    formula: u64,
}

fn construct(args: &ConstructArgs, format: Format) -> Result<Report, Failure> {
    let shape = args.shape.shape()?;
    let mut seed = extremal::build_extremal_seed(shape.q(), shape.n())?;
    for _ in 0..args.lift {
        seed = extremal::lift_seed(&seed)?;
    }
    let report = ConstructReport {
        time: engine::percolation_time(&seed.vertices),
        formula: extremal::max_time_formula(shape.q(), shape.n() as u64)?,
        seed,
    };
    render("construct", &report, format)
}

#[derive(Serialize)]
struct FormulaRow {
    n: u64,
    value: u64,
}

#[derive(Serialize)]
struct FormulaReport {
    q: u32,
    values: Vec<FormulaRow>,
}

fn formula(args: &FormulaArgs, format: Format) -> Result<Report, Failure> {
    let ns: Vec<u64> = match (args.n, args.max_n) {
        (Some(n), _) => vec![n],
        (None, Some(m)) => (0..=m).collect(),
        (None, None) => return Err(Failure::usage("one of --n or --max-n is required")),
    };
    let values = ns
        .into_iter()
        .map(|n| {
            Ok(FormulaRow {
                n,
                value: extremal::max_time_formula(args.q, n)?,
            })
        })
        .collect::<Result<_, Error>>()?;
    render("formula", &FormulaReport { q: args.q, values }, format)
}

#[derive(Serialize)]
struct MinimalReport {
    shape: CubeShape,
    size_cap: usize,
    count: usize,
    sets: Vec<VertexSet>,
}

fn oracle_cmd(args: &OracleArgs, exec: Exec, format: Format) -> Result<Report, Failure> {
    let shape = args.shape.shape()?;
    let budget = args.budget.unwrap_or(oracle::DEFAULT_BUDGET);
    match (args.cap, args.minimal) {
        (Some(cap), true) => {
            let sets = oracle::minimal_spanning_sets(shape, cap, budget, exec)?;
            let report = MinimalReport {
                shape,
                size_cap: cap,
                count: sets.len(),
                sets,
            };
            render("oracle", &report, format)
        }
        (Some(cap), false) => {
            let report: OracleReport = oracle::max_time_capped(shape, cap, budget, exec)?;
            render("oracle", &report, format)
        }
        (None, _) => render("oracle", &oracle::max_time_exhaustive(shape, exec)?, format),
    }
}

fn suite_report(command: &str, report: &SuiteReport, format: Format) -> Result<Report, Failure> {
    let mut out = render(command, report, format)?;
    out.passed = report.passed;
    Ok(out)
}

fn verify_lemma(args: &VerifyLemmaArgs, format: Format) -> Result<Report, Failure> {
    let lemma: LemmaId = args.lemma.parse()?;
    let configs = match &args.marks {
        Some(marks) => vec![LemmaConfig::new(lemma, args.q, args.k, args.l, marks)?],
        None => LemmaConfig::all_marks(lemma, args.q, args.k, args.l)?,
    };
    let checks = configs
        .iter()
        .map(verify::check_lemma_config)
        .collect::<Result<Vec<_>, Error>>()?;
    let report = SuiteReport {
        suite: lemma.name().to_string(),
        passed: checks.iter().all(|c| c.passed),
        items: checks.iter().map(|c| c.items).sum(),
        checks,
    };
    suite_report("verify-lemma", &report, format)
}

fn dispatch(cli: &Cli) -> Result<Report, Failure> {
    let exec = if cli.sequential {
        Exec::Sequential
    } else {
        Exec::Parallel
    };
    match &cli.command {
        Command::Simulate(a) => simulate(a, cli.format),
        Command::Closure(a) => closure(a, cli.format),
        Command::Construct(a) => construct(a, cli.format),
        Command::Formula(a) => formula(a, cli.format),
        Command::Oracle(a) => oracle_cmd(a, exec, cli.format),
        Command::Verify(a) => {
            let suite: Suite = a.suite.parse()?;
            let report = verify::run_suite(suite, &a.params.params(exec))?;
            suite_report("verify", &report, cli.format)
        }
        Command::VerifyLemma(a) => verify_lemma(a, cli.format),
        Command::VerifyAll(a) => {
            let report = verify::run_suite(Suite::All, &a.params(exec))?;
            suite_report("verify-all", &report, cli.format)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let report = match dispatch(&cli) {
        Ok(r) => r,
        Err(f) => {
            eprintln!("error: {}", f.message);
            return ExitCode::from(f.code);
        }
    };
    if let Err(e) = output::emit(&report.text, cli.output.as_deref()) {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(EXIT_USAGE);
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILED)
    }
}

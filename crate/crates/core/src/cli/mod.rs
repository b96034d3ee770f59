//! Command-line front end. [`run`] is the whole program minus process exit.

mod output;

use std::io::Write;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::engine::{Func, Manager, VarId};
use crate::error::Error;
use crate::frontend::{parse_dimacs, parse_formula, CnfDocument, Formula, VarMap};
use crate::games::DEFAULT_N_LIMIT;
use crate::measures::{ConstancyMeasure, ShareFunction, Value};
use crate::oracle::{check_ivf_axioms, check_optional, Mode, OracleMeasure, Property, ValueFunction};
use crate::pmc::{blame_via_pmc, encode_blame_level, Counter, CounterAdapter};
use crate::values::{influence_via_formula, rank_all, CgmKind, EvalOptions, GameValue, Measure, Variant};

pub use output::{OutputRecord, VarValue, SCHEMA};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_LIMIT: i32 = 3;
pub const EXIT_COUNTER: i32 = 4;

/// Small CNFs shipped for the benchmark smoke run.
pub const BUNDLED_CNFS: [(&str, &str); 3] = [
    ("adder3", include_str!("../../data/adder3.cnf")),
    ("parity6", include_str!("../../data/parity6.cnf")),
    ("rand3sat12", include_str!("../../data/rand3sat12.cnf")),
];

#[derive(Parser, Debug)]
#[command(name = "impvals", version, about = "Importance values of variables in Boolean functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Influence I_x(f)
    Influence(MeasureArgs),
    /// Blame B^rho or modified blame MB^rho
    Blame(MeasureArgs),
    /// Value of a cooperative game derived from f
    Cgm(MeasureArgs),
    /// All variables ranked under one measure
    Rank(RankArgs),
    /// Check the importance value function axioms on truth tables
    Axioms(AxiomArgs),
    /// Write the projected counting encoding of one blame level
    Encode(EncodeArgs),
    /// Time a few measures on the bundled CNFs and print CSV
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Dimacs,
    Formula,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    Bdd,
    Pmc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CgmArg {
    Dominating,
    Rectifying,
    Hkr,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ValueArg {
    Banzhaf,
    Shapley,
    Z,
}

#[derive(Args, Debug, Clone)]
pub struct InputArgs {
    /// Input file, `-` for stdin; with `--format formula` also the formula text itself
    #[arg(long, short)]
    pub input: Option<String>,
    /// DIMACS file (shorthand for `--input FILE --format dimacs`)
    #[arg(long, conflicts_with = "input")]
    pub cnf: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Target variable by name, or 1-based position; repeatable
    #[arg(long = "var", short = 'x')]
    pub vars: Vec<String>,
    /// Every variable of the input
    #[arg(long, conflicts_with = "vars")]
    pub all: bool,
    #[arg(long, conflicts_with = "csv")]
    pub json: bool,
    #[arg(long)]
    pub csv: bool,
    /// Add wall time to the output
    #[arg(long)]
    pub timing: bool,
    /// Largest support for the HKR games
    #[arg(long, default_value_t = DEFAULT_N_LIMIT)]
    pub n_limit: usize,
    /// Worker threads, each with its own manager
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Args, Debug, Clone)]
pub struct MeasureArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Share function: exp, frac, step or a comma separated table
    #[arg(long, default_value = "exp")]
    pub rho: String,
    #[arg(long)]
    pub modified: bool,
    #[arg(long, value_enum, default_value = "dominating")]
    pub cgm: CgmArg,
    #[arg(long, default_value = "quad")]
    pub kappa: String,
    #[arg(long, value_enum, default_value = "banzhaf")]
    pub value: ValueArg,
    #[arg(long, value_enum, default_value = "bdd")]
    pub engine: Engine,
    /// External projected model counter (overrides IMPVALS_COUNTER)
    #[arg(long)]
    pub counter: Option<PathBuf>,
    /// Counter timeout in seconds
    #[arg(long, default_value_t = 60)]
    pub timeout: u64,
}

#[derive(Args, Debug, Clone)]
pub struct RankArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// e.g. influence, blame:frac, mblame:exp, cgm:hkr-quad:shapley
    #[arg(long, default_value = "blame:exp")]
    pub measure: String,
}

#[derive(Args, Debug, Clone)]
pub struct AxiomArgs {
    #[arg(long, default_value = "influence")]
    pub measure: String,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Sample instances with this seed instead of enumerating
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 500)]
    pub budget: usize,
    /// Optional property to check instead of the axioms; repeatable
    #[arg(long)]
    pub property: Vec<String>,
    /// Evaluate through the truth-table definitions
    #[arg(long)]
    pub oracle: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug, Clone)]
pub struct EncodeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long = "var", short = 'x')]
    pub var: Option<String>,
    #[arg(long, short, default_value_t = 0)]
    pub k: usize,
    #[arg(long)]
    pub modified: bool,
    /// Output file instead of stdout
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct BenchArgs {
    /// Extra DIMACS files next to the bundled ones
    #[arg(long)]
    pub cnf: Vec<PathBuf>,
}

/// An error with the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::LimitExceeded { .. } => EXIT_LIMIT,
            Error::Counter(_) => EXIT_COUNTER,
            Error::UnknownMeasure(_) | Error::Measure(_) | Error::InvalidWeights(_) => EXIT_USAGE,
            _ => EXIT_INPUT,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

/// Parsed input with its variable names and raw bytes (for the digest).
#[derive(Clone, Debug)]
pub struct Loaded {
    pub format: Format,
    pub names: VarMap,
    pub formula: Formula,
    pub cnf: Option<CnfDocument>,
    pub raw: Vec<u8>,
}

impl Loaded {
    pub fn universe(&self) -> usize {
        self.names.len()
    }

    /// Builds `f` in a fresh manager.
    pub fn build(&self) -> CliResult<(Manager, Func)> {
        let mut m = Manager::new(self.universe());
        let f = match &self.cnf {
            Some(doc) => doc.to_func(&mut m),
            None => self.formula.to_func(&mut m),
        }
        .map_err(Error::from)?;
        Ok((m, f))
    }

    fn resolve(&self, spec: &str) -> CliResult<VarId> {
        if let Some(v) = self.names.get(spec) {
            return Ok(v);
        }
        match spec.parse::<usize>() {
            Ok(i) if (1..=self.universe()).contains(&i) => Ok(VarId::from(i - 1)),
            _ => Err(Error::UnknownVariable(spec.to_string()).into()),
        }
    }

    fn targets(&self, c: &CommonArgs) -> CliResult<Vec<VarId>> {
        if self.universe() == 0 {
            return Err(CliError::input("input has no variables"));
        }
        if c.all {
            return Ok((0..self.universe()).map(VarId::from).collect());
        }
        if c.vars.is_empty() {
            // the first variable of the input
            return Ok(vec![VarId::from(0)]);
        }
        c.vars.iter().map(|s| self.resolve(s)).collect()
    }
}

fn cnf_formula(doc: &CnfDocument) -> Formula {
    let lit = |l: i32| {
        let v = Formula::Var(crate::frontend::dimacs::lit_var(l));
        if l > 0 {
            v
        } else {
            Formula::not(v)
        }
    };
    doc.clauses
        .iter()
        .map(|c| {
            c.iter()
                .map(|&l| lit(l))
                .reduce(Formula::or)
                .unwrap_or(Formula::Const(false))
        })
        .reduce(Formula::and)
        .unwrap_or(Formula::Const(true))
}

pub fn load_input(args: &InputArgs) -> CliResult<Loaded> {
    let (source, format) = match (&args.cnf, &args.input) {
        (Some(p), _) => (p.display().to_string(), Format::Dimacs),
        (None, Some(s)) => {
            let guess = if s.ends_with(".cnf") || s.ends_with(".dimacs") {
                Format::Dimacs
            } else {
                Format::Formula
            };
            (s.clone(), args.format.unwrap_or(guess))
        }
        (None, None) => return Err(CliError::usage("one of --input or --cnf is required")),
    };
    let raw = if source == "-" {
        let mut buf = Vec::new();
        std::io::Read::read_to_end(&mut std::io::stdin(), &mut buf)
            .map_err(|e| CliError::input(format!("stdin: {e}")))?;
        buf
    } else {
        match std::fs::read(&source) {
            Ok(b) => b,
            Err(_) if format == Format::Formula => source.clone().into_bytes(),
            Err(e) => return Err(CliError::input(format!("{source}: {e}"))),
        }
    };
    let text = String::from_utf8(raw.clone()).map_err(|_| CliError::input("input is not UTF-8"))?;
    match format {
        Format::Formula => {
            let (formula, names) = parse_formula(text.trim()).map_err(Error::from)?;
            Ok(Loaded {
                format,
                names,
                formula,
                cnf: None,
                raw,
            })
        }
        Format::Dimacs => {
            let doc = parse_dimacs(&text).map_err(Error::from)?;
            Ok(Loaded {
                format,
                names: VarMap::numbered(doc.n_vars),
                formula: cnf_formula(&doc),
                cnf: Some(doc),
                raw,
            })
        }
    }
}

fn rho_of(s: &str) -> CliResult<ShareFunction> {
    s.parse()
        .map_err(|e: crate::measures::MeasureError| CliError::usage(e.to_string()))
}

fn kappa_of(s: &str) -> CliResult<ConstancyMeasure> {
    s.parse()
        .map_err(|e: crate::measures::MeasureError| CliError::usage(e.to_string()))
}

fn measure_of(cmd: &str, a: &MeasureArgs) -> CliResult<Measure> {
    Ok(match cmd {
        "influence" => Measure::Influence,
        "blame" => Measure::Blame {
            rho: rho_of(&a.rho)?,
            variant: if a.modified {
                Variant::Modified
            } else {
                Variant::Chk
            },
        },
        _ => {
            let cgm = match a.cgm {
                CgmArg::Dominating => CgmKind::Dominating,
                CgmArg::Rectifying => CgmKind::Rectifying,
                CgmArg::Hkr => CgmKind::Hkr(kappa_of(&a.kappa)?),
            };
            let value = match a.value {
                ValueArg::Banzhaf => GameValue::Banzhaf,
                ValueArg::Shapley => GameValue::Shapley,
                ValueArg::Z => GameValue::Z,
            };
            Measure::cgm(cgm, value)
        }
    })
}

/// Values for `targets`, split over `jobs` threads with separate managers.
fn evaluate_bdd(
    input: &Loaded,
    measure: &Measure,
    targets: &[VarId],
    opts: &EvalOptions,
    jobs: usize,
) -> CliResult<Vec<Value>> {
    let jobs = jobs.clamp(1, targets.len().max(1));
    if jobs == 1 {
        let (mut m, f) = input.build()?;
        return Ok(measure.evaluate_all(&mut m, f, targets, opts)?);
    }
    let chunk = targets.len().div_ceil(jobs);
    let results: Vec<CliResult<Vec<Value>>> = std::thread::scope(|s| {
        let handles: Vec<_> = targets
            .chunks(chunk)
            .map(|part| {
                s.spawn(move || {
                    let (mut m, f) = input.build()?;
                    Ok(measure.evaluate_all(&mut m, f, part, opts)?)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    let mut out = Vec::with_capacity(targets.len());
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

fn counter_of(a: &MeasureArgs) -> Counter {
    let timeout = Duration::from_secs(a.timeout);
    match &a.counter {
        Some(p) => Counter::External(CounterAdapter::new(p, timeout)),
        None => CounterAdapter::from_env(timeout).map_or(Counter::Internal, Counter::External),
    }
}

fn evaluate_pmc(input: &Loaded, measure: &Measure, targets: &[VarId], a: &MeasureArgs) -> CliResult<Vec<Value>> {
    let n = input.universe();
    let counter = counter_of(a);
    targets
        .iter()
        .map(|&x| {
            let r = match measure {
                Measure::Influence => influence_via_formula(&input.formula, n, x)?,
                Measure::Blame { rho, variant } => {
                    blame_via_pmc(&input.formula, n, x, rho, *variant, &counter)?
                }
                Measure::Cgm { .. } => {
                    return Err(CliError::usage("cooperative game values need --engine bdd"))
                }
            };
            Ok(Value::Exact(r))
        })
        .collect()
}

fn emit(out: &mut dyn Write, record: &OutputRecord, c: &CommonArgs) -> CliResult<()> {
    let text = if c.json {
        record.to_json()
    } else if c.csv {
        record.to_csv()
    } else {
        record.to_table()
    };
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::input(format!("write failed: {e}")))
}

fn cmd_measure(cmd: &str, a: &MeasureArgs, out: &mut dyn Write) -> CliResult<()> {
    let start = Instant::now();
    let input = load_input(&a.common.input)?;
    let measure = measure_of(cmd, a)?;
    let targets = input.targets(&a.common)?;
    let opts = EvalOptions {
        n_limit: a.common.n_limit,
    };
    let values = match a.engine {
        Engine::Bdd => evaluate_bdd(&input, &measure, &targets, &opts, a.common.jobs)?,
        Engine::Pmc => evaluate_pmc(&input, &measure, &targets, a)?,
    };
    let entries: Vec<(VarId, Value)> = targets.into_iter().zip(values).collect();
    let mut record = OutputRecord::new(cmd, &input, &measure, &entries);
    if a.common.timing {
        record.wall_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    emit(out, &record, &a.common)
}

fn cmd_rank(a: &RankArgs, out: &mut dyn Write) -> CliResult<()> {
    let start = Instant::now();
    let input = load_input(&a.common.input)?;
    let measure: Measure = a.measure.parse()?;
    let opts = EvalOptions {
        n_limit: a.common.n_limit,
    };
    let (mut m, f) = input.build()?;
    let report = rank_all(&mut m, f, &measure, &opts)?;
    let mut record = OutputRecord::new("rank", &input, &measure, &report.entries);
    if a.common.timing {
        record.wall_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    emit(out, &record, &a.common)
}

fn cmd_axioms(a: &AxiomArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    let measure: Measure = a.measure.parse()?;
    let mode = match a.seed {
        Some(seed) => {
            let _ = writeln!(err, "seed {seed}");
            Mode::Random {
                seed,
                budget: a.budget,
            }
        }
        None => Mode::Exhaustive,
    };
    let oracle = OracleMeasure(measure.clone());
    let vf: &dyn ValueFunction = if a.oracle { &oracle } else { &measure };
    let reports = if a.property.is_empty() {
        vec![check_ivf_axioms(vf, a.n, mode)]
    } else {
        a.property
            .iter()
            .map(|p| {
                let prop: Property = p.parse().map_err(CliError::usage)?;
                Ok(check_optional(vf, prop, a.n, mode))
            })
            .collect::<CliResult<Vec<_>>>()?
    };
    let text = if a.json {
        output::axioms_json(&reports)
    } else {
        reports.iter().map(|r| r.to_string()).collect()
    };
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::input(format!("write failed: {e}")))
}

fn cmd_encode(a: &EncodeArgs, out: &mut dyn Write) -> CliResult<()> {
    let input = load_input(&a.input)?;
    let x = match &a.var {
        Some(s) => input.resolve(s)?,
        None => VarId::from(0),
    };
    let variant = if a.modified {
        Variant::Modified
    } else {
        Variant::Chk
    };
    let enc = encode_blame_level(&input.formula, input.universe(), x, a.k, variant)?;
    let mut text = format!(
        "c blame level k={} target={} variant={}\n",
        a.k,
        input.names.name(x),
        if a.modified { "modified" } else { "chk" }
    );
    text += &enc.cnf.to_dimacs();
    match &a.output {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::input(format!("{}: {e}", p.display()))),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| CliError::input(format!("write failed: {e}"))),
    }
}

fn cmd_bench(a: &BenchArgs, out: &mut dyn Write) -> CliResult<()> {
    let mut instances: Vec<(String, String)> = BUNDLED_CNFS
        .iter()
        .map(|(n, t)| (n.to_string(), t.to_string()))
        .collect();
    for p in &a.cnf {
        let text = std::fs::read_to_string(p).map_err(|e| CliError::input(format!("{}: {e}", p.display())))?;
        instances.push((p.display().to_string(), text));
    }
    let measures = [
        ("influence", Measure::Influence, Engine::Bdd),
        ("influence", Measure::Influence, Engine::Pmc),
        ("blame:exp", Measure::blame(ShareFunction::Exp), Engine::Bdd),
        ("blame:exp", Measure::blame(ShareFunction::Exp), Engine::Pmc),
        ("mblame:exp", Measure::modified_blame(ShareFunction::Exp), Engine::Bdd),
        ("cgm:dominating:banzhaf", Measure::cgm(CgmKind::Dominating, GameValue::Banzhaf), Engine::Bdd),
        ("cgm:hkr-quad:banzhaf", Measure::cgm(CgmKind::Hkr(ConstancyMeasure::Quad), GameValue::Banzhaf), Engine::Bdd),
    ];
    let mut csv = String::from("instance,measure,engine,time_ms,value\n");
    for (name, text) in &instances {
        let doc = parse_dimacs(text).map_err(Error::from)?;
        let input = Loaded {
            format: Format::Dimacs,
            names: VarMap::numbered(doc.n_vars),
            formula: cnf_formula(&doc),
            cnf: Some(doc),
            raw: text.clone().into_bytes(),
        };
        let x = [VarId::from(0)];
        for (mname, measure, engine) in &measures {
            let start = Instant::now();
            let v = match engine {
                Engine::Bdd => evaluate_bdd(&input, measure, &x, &EvalOptions::default(), 1)?,
                Engine::Pmc => {
                    let a = MeasureArgs {
                        common: CommonArgs {
                            input: InputArgs {
                                input: None,
                                cnf: None,
                                format: None,
                            },
                            vars: vec![],
                            all: false,
                            json: false,
                            csv: false,
                            timing: false,
                            n_limit: DEFAULT_N_LIMIT,
                            jobs: 1,
                        },
                        rho: "exp".into(),
                        modified: false,
                        cgm: CgmArg::Dominating,
                        kappa: "quad".into(),
                        value: ValueArg::Banzhaf,
                        engine: Engine::Pmc,
                        counter: None,
                        timeout: 60,
                    };
                    evaluate_pmc(&input, measure, &x, &a)?
                }
            };
            let ms = start.elapsed().as_secs_f64() * 1e3;
            let engine = if *engine == Engine::Bdd { "bdd" } else { "pmc" };
            csv += &format!("{name},{mname},{engine},{ms:.3},{}\n", v[0].exact_string());
        }
    }
    out.write_all(csv.as_bytes())
        .map_err(|e| CliError::input(format!("write failed: {e}")))
}

pub fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    match &cli.command {
        Command::Influence(a) => cmd_measure("influence", a, out),
        Command::Blame(a) => cmd_measure("blame", a, out),
        Command::Cgm(a) => cmd_measure("cgm", a, out),
        Command::Rank(a) => cmd_rank(a, out),
        Command::Axioms(a) => cmd_axioms(a, out, err),
        Command::Encode(a) => cmd_encode(a, out),
        Command::Bench(a) => cmd_bench(a, out),
    }
}

/// Parses `args` (program name first), runs the command, returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    match dispatch(&cli, out, err) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
    }
}

#[cfg(test)]
mod tests;

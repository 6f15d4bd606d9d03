//! `charsum` command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or domain error,
//! 3 capacity exceeded.

use std::fmt;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::str::FromStr;

use charsum::verify::{
    self, BilinearConfig, CheckKind, CoeffModel, ExperimentConfig, ReportBundle,
    VerificationReport,
};
use charsum::{
    sums, CharacterGroup, Complex64, DirichletCharacter, Error, IntervalSpec, LambdaEvaluator,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;

/// Environment variable capping worker threads; 0 or unset means automatic.
pub const THREADS_ENV: &str = "CHARSUM_THREADS";

#[derive(Parser, Debug, Clone, PartialEq)]
#[command(name = "charsum", version, about = "Kloosterman-type character sums and their identities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, PartialEq)]
pub enum Command {
    /// Evaluate one sum.
    Compute(ComputeArgs),
    /// Run a verification sweep over a modulus range.
    Verify(VerifyArgs),
    /// Run seeded bilinear-form instances.
    Bilinear(BilinearArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumKind {
    Lambda,
    Gauss,
    K2,
    Quadsum,
    Pairsum,
    Srsum,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyArg {
    Naive,
    Reduced,
}

/// Which characters to evaluate: an enumeration index, a label, or all of them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChiSelector {
    All,
    Index(u64),
    Label(String),
}

impl FromStr for ChiSelector {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "all" {
            Ok(ChiSelector::All)
        } else if s.contains(':') {
            Ok(ChiSelector::Label(s.to_string()))
        } else {
            s.parse()
                .map(ChiSelector::Index)
                .map_err(|_| format!("expected an index, a label or `all`, got {s:?}"))
        }
    }
}

impl fmt::Display for ChiSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChiSelector::All => f.write_str("all"),
            ChiSelector::Index(i) => write!(f, "{i}"),
            ChiSelector::Label(l) => f.write_str(l),
        }
    }
}

/// Inclusive modulus range written `lo..hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QRange {
    pub lo: u64,
    pub hi: u64,
}

impl FromStr for QRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (lo, hi) = s
            .split_once("..")
            .ok_or_else(|| format!("expected lo..hi, got {s:?}"))?;
        let parse = |x: &str| {
            x.trim()
                .parse::<u64>()
                .map_err(|_| format!("bad range bound {x:?}"))
        };
        Ok(QRange {
            lo: parse(lo)?,
            hi: parse(hi)?,
        })
    }
}

impl fmt::Display for QRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct ComputeArgs {
    pub sum: SumKind,
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub chi: Option<ChiSelector>,
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    pub n: Option<i64>,
    /// First summation index of an incomplete sum.
    #[arg(long, allow_hyphen_values = true)]
    pub start: Option<i64>,
    /// Interval length; together with `--start` selects the incomplete sum.
    #[arg(long)]
    pub len: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<i64>,
    /// Restrict the quadratic sum to units.
    #[arg(long)]
    pub restricted: bool,
    #[arg(long, allow_hyphen_values = true)]
    pub y: Option<i64>,
    #[arg(long)]
    pub ell: Option<u64>,
    /// Second-moment evaluation path.
    #[arg(long, value_enum)]
    pub strategy: Option<StrategyArg>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct VerifyArgs {
    /// A check name, or `all`.
    pub check: String,
    #[arg(long, default_value = "3..30")]
    pub q_range: QRange,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 4)]
    pub trials: u32,
    #[arg(long, default_value_t = 256)]
    pub samples: u32,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 1.5)]
    pub gamma: f64,
    #[arg(long, default_value = "unit-disc")]
    pub coeff_model: CoeffModel,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct BilinearArgs {
    /// Moduli, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "101")]
    pub q: Vec<u64>,
    #[arg(long = "A", default_value_t = 8)]
    pub a_scale: u64,
    #[arg(long = "M", default_value_t = 8)]
    pub m_scale: u64,
    #[arg(long = "N", default_value_t = 8)]
    pub n_scale: u64,
    #[arg(long, default_value_t = 5)]
    pub trials: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "unit-disc")]
    pub coeff_model: CoeffModel,
    /// Character index; a random primitive character per instance if omitted.
    #[arg(long)]
    pub chi: Option<u64>,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 1.5)]
    pub gamma: f64,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn push<T: ToString>(args: &mut Vec<String>, flag: &str, v: T) {
    args.push(flag.to_string());
    args.push(v.to_string());
}

fn push_opt<T: ToString>(args: &mut Vec<String>, flag: &str, v: &Option<T>) {
    if let Some(v) = v {
        push(args, flag, v.to_string());
    }
}

fn value_name<T: ValueEnum>(v: &T) -> String {
    v.to_possible_value()
        .expect("no skipped variants")
        .get_name()
        .to_string()
}

impl Cli {
    /// Command-line arguments (without the program name) that parse back to `self`.
    pub fn to_args(&self) -> Vec<String> {
        let mut v = Vec::new();
        match &self.command {
            Command::Compute(c) => {
                v.push("compute".into());
                v.push(value_name(&c.sum));
                push(&mut v, "--q", c.q);
                push_opt(&mut v, "--chi", &c.chi);
                push_opt(&mut v, "--m", &c.m);
                push_opt(&mut v, "--n", &c.n);
                push_opt(&mut v, "--start", &c.start);
                push_opt(&mut v, "--len", &c.len);
                push_opt(&mut v, "--a", &c.a);
                push_opt(&mut v, "--b", &c.b);
                if c.restricted {
                    v.push("--restricted".into());
                }
                push_opt(&mut v, "--y", &c.y);
                push_opt(&mut v, "--ell", &c.ell);
                push_opt(&mut v, "--strategy", &c.strategy.map(|s| value_name(&s)));
                push(&mut v, "--format", value_name(&c.format));
                push_opt(&mut v, "--out", &c.out.as_ref().map(|p| p.display()));
            }
            Command::Verify(c) => {
                v.push("verify".into());
                v.push(c.check.clone());
                push(&mut v, "--q-range", c.q_range);
                push(&mut v, "--format", value_name(&c.format));
                push_opt(&mut v, "--out", &c.out.as_ref().map(|p| p.display()));
                push(&mut v, "--seed", c.seed);
                push(&mut v, "--trials", c.trials);
                push(&mut v, "--samples", c.samples);
                push(&mut v, "--epsilon", c.epsilon);
                push(&mut v, "--gamma", c.gamma);
                push(&mut v, "--coeff-model", c.coeff_model);
            }
            Command::Bilinear(c) => {
                v.push("bilinear".into());
                let qs: Vec<String> = c.q.iter().map(u64::to_string).collect();
                push(&mut v, "--q", qs.join(","));
                push(&mut v, "--A", c.a_scale);
                push(&mut v, "--M", c.m_scale);
                push(&mut v, "--N", c.n_scale);
                push(&mut v, "--trials", c.trials);
                push(&mut v, "--seed", c.seed);
                push(&mut v, "--coeff-model", c.coeff_model);
                push_opt(&mut v, "--chi", &c.chi);
                push(&mut v, "--epsilon", c.epsilon);
                push(&mut v, "--gamma", c.gamma);
                push(&mut v, "--format", value_name(&c.format));
                push_opt(&mut v, "--out", &c.out.as_ref().map(|p| p.display()));
            }
        }
        v
    }
}

enum Failure {
    Usage(String),
    Lib(Error),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Lib(Error::Capacity { .. }) => EXIT_CAPACITY,
            _ => EXIT_USAGE,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => f.write_str(m),
            Failure::Lib(e) => write!(f, "{e}"),
            Failure::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

/// One computed value as printed by `compute`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValueRecord {
    pub sum: String,
    pub q: u64,
    pub chi_index: Option<u64>,
    pub chi_label: String,
    pub inputs: String,
    pub re: f64,
    pub im: f64,
    pub abs: f64,
    pub strategy: String,
}

fn characters(q: u64, sel: &Option<ChiSelector>) -> Result<Vec<DirichletCharacter>, Failure> {
    let group = CharacterGroup::new(q)?;
    match sel {
        None => Err(Failure::Usage("this sum needs --chi".into())),
        Some(ChiSelector::All) => Ok(group.characters().collect()),
        Some(ChiSelector::Index(i)) => Ok(vec![group.character(*i)?]),
        Some(ChiSelector::Label(l)) => Ok(vec![group.parse_label(l)?]),
    }
}

fn need<T: Copy>(v: Option<T>, flag: &str) -> Result<T, Failure> {
    v.ok_or_else(|| Failure::Usage(format!("this sum needs {flag}")))
}

fn compute(c: &ComputeArgs) -> Result<Vec<ValueRecord>, Failure> {
    let name = value_name(&c.sum);
    let record = |chi: Option<&DirichletCharacter>, inputs: String, v: Complex64, strategy: &str| {
        ValueRecord {
            sum: name.clone(),
            q: c.q,
            chi_index: chi.map(DirichletCharacter::index),
            chi_label: chi.map(DirichletCharacter::label).unwrap_or_default(),
            inputs,
            re: v.re,
            im: v.im,
            abs: v.norm(),
            strategy: strategy.to_string(),
        }
    };
    if c.sum == SumKind::Quadsum {
        let (a, b) = (need(c.a, "--a")?, need(c.b, "--b")?);
        let v = sums::quadratic_expsum(a, b, c.q, c.restricted)?;
        let inputs = format!("a={a};b={b};restricted={}", c.restricted);
        return Ok(vec![record(None, inputs, v, "direct")]);
    }
    let mut out = Vec::new();
    for chi in characters(c.q, &c.chi)? {
        let rec = match c.sum {
            SumKind::Lambda => {
                let (m, n) = (need(c.m, "--m")?, need(c.n, "--n")?);
                match (c.start, c.len) {
                    (None, None) => {
                        let v = LambdaEvaluator::new(&chi).complete(m, n);
                        record(Some(&chi), format!("m={m};n={n}"), v, "complete")
                    }
                    (Some(start), Some(len)) => {
                        let interval = IntervalSpec::new(start, len, c.q)?;
                        let v = LambdaEvaluator::new(&chi).incomplete(m, n, &interval);
                        let inputs = format!("m={m};n={n};start={start};len={len}");
                        record(Some(&chi), inputs, v, "interval")
                    }
                    _ => return Err(Failure::Usage("--start and --len go together".into())),
                }
            }
            SumKind::Gauss => {
                let n = need(c.n, "--n")?;
                record(Some(&chi), format!("n={n}"), sums::gauss_sum(&chi, n), "table")
            }
            SumKind::K2 => {
                let strategy = match c.strategy.unwrap_or(StrategyArg::Reduced) {
                    StrategyArg::Naive => sums::MomentStrategy::Naive,
                    StrategyArg::Reduced => sums::MomentStrategy::Reduced,
                };
                let v: f64 = sums::second_moment(&chi, strategy)?;
                record(Some(&chi), String::new(), Complex64::new(v, 0.0), strategy.name())
            }
            SumKind::Pairsum => {
                let (y, ell) = (need(c.y, "--y")?, need(c.ell, "--ell")?);
                let v = sums::character_pair_sum(&chi, y, ell)?;
                record(Some(&chi), format!("y={y};ell={ell}"), v, "grouped")
            }
            SumKind::Srsum => {
                let s = sums::unit_root_char_sum(&chi);
                record(Some(&chi), String::new(), Complex64::new(s as f64, 0.0), "exact")
            }
            SumKind::Quadsum => unreachable!("handled above"),
        };
        out.push(rec);
    }
    Ok(out)
}

fn experiment_config(c: &VerifyArgs) -> ExperimentConfig {
    ExperimentConfig {
        q_min: c.q_range.lo,
        q_max: c.q_range.hi,
        seed: c.seed,
        trials: c.trials,
        samples: c.samples,
        coeff_model: c.coeff_model,
        epsilon: c.epsilon,
        gamma: c.gamma,
    }
}

fn run_verify(c: &VerifyArgs) -> Result<Vec<VerificationReport>, Failure> {
    let cfg = experiment_config(c);
    if c.check == "all" {
        if cfg.q_min > cfg.q_max {
            return Err(Failure::Usage(format!("empty range {}", c.q_range)));
        }
        let bundle = verify::run_all(&cfg)?;
        if bundle.reports.is_empty() {
            return Err(Failure::Usage(format!("no check covers {}", c.q_range)));
        }
        return Ok(bundle.reports);
    }
    let kind = CheckKind::from_name(&c.check)
        .ok_or_else(|| Failure::Usage(format!("unknown check {:?}", c.check)))?;
    Ok(vec![verify::run_check(kind, &cfg)?])
}

fn bilinear_config(c: &BilinearArgs) -> BilinearConfig {
    BilinearConfig {
        moduli: c.q.clone(),
        shapes: vec![(c.a_scale, c.m_scale, c.n_scale)],
        trials: c.trials,
        seed: c.seed,
        coeff_model: c.coeff_model,
        character: c.chi,
        epsilon: c.epsilon,
        gamma: c.gamma,
    }
}

fn render_reports(reports: &[VerificationReport], format: Format, bundle: bool) -> Result<Vec<u8>, Failure> {
    Ok(match format {
        Format::Json if bundle => ReportBundle {
            reports: reports.to_vec(),
        }
        .to_json()
        .into_bytes()
        .into_iter()
        .chain(*b"\n")
        .collect(),
        Format::Json => (reports[0].to_json() + "\n").into_bytes(),
        Format::Csv => {
            let mut buf = Vec::new();
            verify::write_csv(reports, &mut buf)?;
            buf
        }
    })
}

fn render_values(values: &[ValueRecord], format: Format) -> Result<Vec<u8>, Failure> {
    Ok(match format {
        Format::Json => (serde_json::to_string_pretty(values).expect("values are finite") + "\n")
            .into_bytes(),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for v in values {
                w.serialize(v).map_err(|e| Failure::Io(e.into()))?;
            }
            w.into_inner().map_err(|e| Failure::Io(e.into_error()))?
        }
    })
}

fn emit(bytes: &[u8], out: &Option<PathBuf>, stdout: &mut (dyn Write + Send)) -> Result<(), Failure> {
    match out {
        Some(path) => File::create(path)?.write_all(bytes)?,
        None => stdout.write_all(bytes)?,
    }
    Ok(())
}

fn report_failures(reports: &[VerificationReport], stderr: &mut (dyn Write + Send)) -> io::Result<bool> {
    let mut ok = true;
    for r in reports.iter().filter(|r| !r.ok()) {
        ok = false;
        writeln!(
            stderr,
            "{}: {} of {} cases failed",
            r.check,
            r.summary.tested - r.summary.passed,
            r.summary.tested
        )?;
        for w in r.summary.witnesses.iter().filter(|w| !w.passed) {
            writeln!(
                stderr,
                "  q={} chi={} {} value={}{:+}i defect={:e} ratio={}",
                w.q, w.chi_label, w.params, w.value_re, w.value_im, w.defect, w.ratio
            )?;
        }
    }
    Ok(ok)
}

fn dispatch(cli: &Cli, stdout: &mut (dyn Write + Send), stderr: &mut (dyn Write + Send)) -> Result<i32, Failure> {
    match &cli.command {
        Command::Compute(c) => {
            let values = compute(c)?;
            emit(&render_values(&values, c.format)?, &c.out, stdout)?;
            Ok(EXIT_OK)
        }
        Command::Verify(c) => {
            let reports = run_verify(c)?;
            emit(&render_reports(&reports, c.format, c.check == "all")?, &c.out, stdout)?;
            Ok(if report_failures(&reports, stderr)? {
                EXIT_OK
            } else {
                EXIT_FAILED
            })
        }
        Command::Bilinear(c) => {
            let report = verify::bilinear_experiment(&bilinear_config(c))?;
            let reports = [report];
            emit(&render_reports(&reports, c.format, false)?, &c.out, stdout)?;
            Ok(if report_failures(&reports, stderr)? {
                EXIT_OK
            } else {
                EXIT_FAILED
            })
        }
    }
}

fn thread_pool() -> Result<rayon::ThreadPool, Failure> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| Failure::Usage(format!("{THREADS_ENV} must be a count, got {v:?}")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Failure::Usage(e.to_string()))
}

/// Parse `args` (program name first) and run; returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut (dyn Write + Send), stderr: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{text}");
                EXIT_OK
            };
        }
    };
    let result = thread_pool().and_then(|pool| pool.install(|| dispatch(&cli, stdout, stderr)));
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {f}");
            f.code()
        }
    }
}

//! Command-line dispatch.
//!
//! Exit codes: 0 on success, 1 on usage or input errors, 2 when a decoder
//! fails or a verified property does not hold.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use obcs_core::codes::distance_target;
use obcs_core::construct::{
    bernoulli_matrix, constant_weight_random, default_bernoulli_p, explicit_ruff, gaussian_matrix,
    gaussian_rows_needed, stacked_matrix, stacked_matrix_with_total, superset_rows, RecoveryParams, SetFamily,
};
use obcs_core::decode::{
    binary_round, biht, gt_superset_decode, ruff_decode, superset_recover_detailed, AllNegativePolicy, BihtConfig,
    SupersetConfig,
};
use obcs_core::experiment::{error_curve_csv, sweep_csv, ErrorCurveConfig, SweepConfig};
use obcs_core::signal::{gen_signal, sign_measure};
use obcs_core::verify::{
    beta_bound_report, beta_intermediate_report, beta_pdf_at_half, check_property1, fact1_report, fact2_report,
    list_disjunct_report, list_ruff_report, ruff_report, ts_worst, BallSepParams, CheckReport, ListRuffParams,
    ListRuffViolation,
};
use obcs_core::{BinaryMatrix, EnumCap, MeasurementMatrix, SignalModel, SparseSignal, SupportSet};

use crate::formats::{self, MatrixFile};
use crate::{runner, svg};

/// Environment variable overriding every enumeration cap.
pub const ENUM_CAP_ENV: &str = "OBCS_ENUM_CAP";

#[derive(Parser, Debug)]
#[command(name = "obcs", version, about = "One-bit compressed sensing with superset recovery")]
struct Cli {
    /// Seed for all randomness; runs never read the clock.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Enumeration cap for brute-force checks (overrides OBCS_ENUM_CAP).
    #[arg(long, global = true, value_name = "N")]
    enum_cap: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a measurement matrix.
    GenMatrix(GenMatrixArgs),
    /// Write a random unit-norm sparse signal.
    GenSignal(GenSignalArgs),
    /// Write sign measurements of a signal.
    Measure(MeasureArgs),
    /// Recover a support or a signal from sign measurements.
    Decode(DecodeArgs),
    /// Check a combinatorial or numeric property.
    Verify(VerifyArgs),
    /// Run a reproducible experiment and write a CSV table.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
    /// Print the number of Gaussian rows sufficient for approximate recovery.
    RowsNeeded(RowsNeededArgs),
}

/// A probability, or the literal `1/(k+1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Prob {
    Value(f64),
    OneOverKPlusOne,
}

impl Prob {
    fn resolve(self, k: Option<usize>) -> anyhow::Result<f64> {
        match self {
            Prob::Value(p) => Ok(p),
            Prob::OneOverKPlusOne => Ok(default_bernoulli_p(k.context("--p 1/(k+1) needs --k")?)),
        }
    }
}

fn parse_prob(s: &str) -> Result<Prob, String> {
    if s.replace(' ', "") == "1/(k+1)" {
        return Ok(Prob::OneOverKPlusOne);
    }
    let p: f64 = s.parse().map_err(|_| format!("expected a probability or `1/(k+1)`, got {s:?}"))?;
    if p > 0.0 && p < 1.0 {
        Ok(Prob::Value(p))
    } else {
        Err(format!("probability {p} is outside (0, 1)"))
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum MatrixKind {
    Gaussian,
    Bernoulli,
    ConstantWeight,
    Ruff,
    Stacked,
}

#[derive(Args, Debug)]
struct GenMatrixArgs {
    #[arg(long, value_enum)]
    kind: MatrixKind,
    /// Rows (total rows for `stacked`).
    #[arg(long)]
    m: Option<usize>,
    /// Columns.
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: Option<usize>,
    /// Bernoulli probability; accepts `1/(k+1)`.
    #[arg(long, value_parser = parse_prob)]
    p: Option<Prob>,
    /// Group-testing rows of a stacked matrix [default: round(4k log10 n)].
    #[arg(long)]
    m1: Option<usize>,
    /// Robust UFF threshold.
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    /// Target error, used to size the Gaussian block when `--m` is absent.
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, default_value_t = RecoveryParams::DEFAULT_ETA)]
    eta: f64,
    #[arg(long)]
    out: PathBuf,
    /// Also write the generating code (`ruff` only).
    #[arg(long)]
    code_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GenSignalArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value = "real", value_parser = ["real", "nonnegative", "binary"])]
    model: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct MeasureArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    signal: PathBuf,
    /// Defaults to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum Algo {
    /// Superset from group tests (binary matrix).
    Gt,
    /// Exact support by majority over each column's tests (binary matrix).
    Ruff,
    /// BIHT on a real matrix.
    Biht,
    /// Group-testing superset, then BIHT on it (stacked matrix).
    SupersetBiht,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum Fallback {
    Error,
    FullBiht,
}

#[derive(Args, Debug)]
struct DecodeArgs {
    #[arg(long, value_enum)]
    algo: Algo,
    #[arg(long)]
    matrix: PathBuf,
    /// Sign file; for stacked matrices the group-testing signs come first.
    #[arg(long)]
    obs: PathBuf,
    #[arg(long)]
    k: Option<usize>,
    /// Round the estimate to a binary signal.
    #[arg(long)]
    binary: bool,
    #[arg(long, default_value_t = 1000)]
    max_iters: usize,
    #[arg(long, default_value_t = 1.0)]
    step: f64,
    /// What to do when every group test is negative.
    #[arg(long, value_enum, default_value_t = Fallback::Error)]
    fallback: Fallback,
    /// Defaults to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum Property {
    ListDisjunct,
    Ruff,
    ListRuff,
    Property1,
    Ts,
    CodeDistance,
    Facts,
    BallSeparation,
    Beta,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    property: Property,
    #[arg(long)]
    matrix: Option<PathBuf>,
    #[arg(long)]
    signal: Option<PathBuf>,
    #[arg(long)]
    code: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    l: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    /// Pivot tolerance for the nullspace test.
    #[arg(long, default_value_t = 1e-9)]
    rank_tol: f64,
    /// Distance between the two points.
    #[arg(long, default_value_t = 1.0)]
    eps: f64,
    /// Ball radius.
    #[arg(long, default_value_t = 0.01)]
    delta_net: f64,
    /// Ambient dimension.
    #[arg(long, default_value_t = 10)]
    dim: usize,
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    /// Grid size for `facts`.
    #[arg(long, default_value_t = 10_000)]
    points: usize,
    #[arg(long, default_value_t = 4)]
    n_min: usize,
    #[arg(long, default_value_t = 200)]
    n_max: usize,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Subcommand, Debug)]
enum ExperimentCommand {
    /// Mean recovery error against m for both methods.
    ErrorCurve(ErrorCurveArgs),
    /// Mean group-testing superset size against the Bernoulli probability.
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
struct ExperimentCommon {
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// Trials per cell [default: 100, or the full count with --full].
    #[arg(long)]
    trials: Option<usize>,
    /// Use the full trial count.
    #[arg(long)]
    full: bool,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// CSV output; defaults to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write an SVG plot.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ErrorCurveArgs {
    #[command(flatten)]
    common: ExperimentCommon,
    /// Comma-separated total row counts.
    #[arg(long, value_delimiter = ',', default_value = "250,500,1000,1500,2000")]
    m_values: Vec<usize>,
    /// Group-testing probability; accepts `1/(k+1)`.
    #[arg(long, value_parser = parse_prob, default_value = "1/(k+1)")]
    p: Prob,
    #[arg(long, default_value_t = 1000)]
    max_iters: usize,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    common: ExperimentCommon,
    #[arg(long, value_delimiter = ',', default_value = "200")]
    m_values: Vec<usize>,
    /// Comma-separated probabilities; `1/(k+1)` is always added.
    #[arg(long, value_delimiter = ',', value_parser = parse_prob,
          default_value = "0.02,0.04,0.06,0.08,0.1,0.12,0.14,0.16,0.18,0.2")]
    p_values: Vec<Prob>,
}

#[derive(Args, Debug)]
struct RowsNeededArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = RecoveryParams::DEFAULT_ETA)]
    eta: f64,
}

/// A check ran and reported failure.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct CheckFailed(String);

struct Ctx<'a> {
    seed: u64,
    cap_override: Option<EnumCap>,
    out: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn cap(&self, default: EnumCap) -> EnumCap {
        self.cap_override.unwrap_or(default)
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    fn emit(&mut self, path: Option<&Path>, text: &str) -> anyhow::Result<()> {
        match path {
            Some(p) => formats::write_text(p, text)?,
            None => self.out.write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

fn parse_cap(s: &str) -> anyhow::Result<EnumCap> {
    let s = s.trim();
    if let Ok(v) = s.parse::<u128>() {
        return Ok(EnumCap(v));
    }
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v >= 0.0 && v.fract() == 0.0 => Ok(EnumCap(v as u128)),
        _ => bail!("enumeration cap {s:?} is not a nonnegative integer"),
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    1
                }
            };
        }
    };
    let result = (|| {
        let cap_override = match &cli.enum_cap {
            Some(s) => Some(parse_cap(s).context("--enum-cap")?),
            None => match std::env::var(ENUM_CAP_ENV) {
                Ok(s) => Some(parse_cap(&s).with_context(|| ENUM_CAP_ENV.to_string())?),
                Err(_) => None,
            },
        };
        let mut ctx = Ctx { seed: cli.seed, cap_override, out: &mut *out };
        dispatch(cli.command, &mut ctx)
    })();
    match result {
        Ok(()) => 0,
        Err(e) => {
            let code = exit_code(&e);
            if !e.is::<CheckFailed>() {
                let _ = writeln!(err, "error: {e:#}");
            }
            code
        }
    }
}

fn exit_code(e: &anyhow::Error) -> i32 {
    let decode_failure = e.chain().any(|c| {
        c.downcast_ref::<CheckFailed>().is_some()
            || matches!(c.downcast_ref::<obcs_core::Error>(), Some(obcs_core::Error::DecodeFailure(_)))
    });
    if decode_failure {
        2
    } else {
        1
    }
}

fn dispatch(cmd: Command, ctx: &mut Ctx<'_>) -> anyhow::Result<()> {
    match cmd {
        Command::GenMatrix(a) => gen_matrix(a, ctx),
        Command::GenSignal(a) => {
            let model: SignalModel = a.model.parse()?;
            let x = gen_signal(a.n, a.k, model, &mut ctx.rng())?;
            formats::write_text(&a.out, &formats::format_signal(&x))?;
            Ok(())
        }
        Command::Measure(a) => {
            let m = formats::read_matrix(&a.matrix)?;
            let x = formats::read_signal(&a.signal)?;
            let y = match &m {
                MatrixFile::Binary(b) => sign_measure(b, &x)?,
                MatrixFile::Real(r) => sign_measure(r, &x)?,
                MatrixFile::Stacked(s) => {
                    let mut y = sign_measure(&s.top, &x)?;
                    y.0.extend(sign_measure(&s.bottom, &x)?.0);
                    y
                }
            };
            ctx.emit(a.out.as_deref(), &formats::format_signs(&y))
        }
        Command::Decode(a) => decode(a, ctx),
        Command::Verify(a) => verify(a, ctx),
        Command::Experiment(e) => experiment(e, ctx),
        Command::RowsNeeded(a) => {
            let params = RecoveryParams::new(a.n, a.k, a.eps, a.eta)?;
            writeln!(ctx.out, "{}", gaussian_rows_needed(&params))?;
            Ok(())
        }
    }
}

fn need<T>(v: Option<T>, flag: &str) -> anyhow::Result<T> {
    v.ok_or_else(|| anyhow!("missing required flag --{flag}"))
}

fn gen_matrix(a: GenMatrixArgs, ctx: &mut Ctx<'_>) -> anyhow::Result<()> {
    let mut rng = ctx.rng();
    if a.code_out.is_some() && a.kind != MatrixKind::Ruff {
        bail!("--code-out only applies to --kind ruff");
    }
    let file = match a.kind {
        MatrixKind::Gaussian => MatrixFile::Real(gaussian_matrix(need(a.m, "m")?, a.n, &mut rng)?),
        MatrixKind::Bernoulli => {
            let p = need(a.p, "p")?.resolve(a.k)?;
            MatrixFile::Binary(bernoulli_matrix(need(a.m, "m")?, a.n, p, &mut rng)?)
        }
        MatrixKind::ConstantWeight => {
            MatrixFile::Binary(constant_weight_random(need(a.m, "m")?, a.n, need(a.k, "k")?, &mut rng)?)
        }
        MatrixKind::Ruff => {
            let built = explicit_ruff(a.n, need(a.k, "k")?, a.alpha, ctx.cap(EnumCap::CODEWORDS))?;
            if let Some(path) = &a.code_out {
                formats::write_text(path, &formats::format_code(&built.code))?;
            }
            MatrixFile::Binary(built.incidence)
        }
        MatrixKind::Stacked => {
            let k = need(a.k, "k")?;
            let p = a.p.unwrap_or(Prob::OneOverKPlusOne).resolve(Some(k))?;
            let m1 = a.m1.unwrap_or_else(|| superset_rows(a.n, k));
            let sm = match (a.m, a.eps) {
                (Some(m), None) => stacked_matrix_with_total(a.n, m, m1, p, &mut rng)?,
                (None, Some(eps)) => stacked_matrix(&RecoveryParams::new(a.n, k, eps, a.eta)?, p, m1, &mut rng)?,
                _ => bail!("stacked matrices need exactly one of --m (total rows) or --eps"),
            };
            MatrixFile::Stacked(sm)
        }
    };
    formats::write_text(&a.out, &formats::format_matrix(&file))?;
    Ok(())
}

fn support_text(s: &SupportSet) -> String {
    s.indices().iter().map(|i| format!("{i}\n")).collect()
}

fn binary_of(m: MatrixFile, what: &str) -> anyhow::Result<BinaryMatrix> {
    match m {
        MatrixFile::Binary(b) => Ok(b),
        other => bail!("{what} needs a binary matrix, got a {} matrix", other.kind()),
    }
}

fn decode(a: DecodeArgs, ctx: &mut Ctx<'_>) -> anyhow::Result<()> {
    let m = formats::read_matrix(&a.matrix)?;
    let y = formats::read_signs(&a.obs)?;
    let biht_cfg = BihtConfig { max_iters: a.max_iters, step_size: a.step, ..BihtConfig::default() };
    let finish = |x: SparseSignal, k: usize| -> anyhow::Result<SparseSignal> {
        Ok(if a.binary { binary_round(&x, k)? } else { x })
    };
    let text = match a.algo {
        Algo::Gt => {
            let b = binary_of(m, "gt decoding")?;
            support_text(&gt_superset_decode(&b, &y.to_gt())?)
        }
        Algo::Ruff => {
            let b = binary_of(m, "ruff decoding")?;
            support_text(&ruff_decode(&b, &y)?)
        }
        Algo::Biht => {
            let k = need(a.k, "k")?;
            let r = match m {
                MatrixFile::Real(r) => r,
                MatrixFile::Binary(b) => b.to_real(),
                MatrixFile::Stacked(_) => bail!("use --algo superset-biht for stacked matrices"),
            };
            formats::format_signal(&finish(biht(&r, &y, k, &biht_cfg)?, k)?)
        }
        Algo::SupersetBiht => {
            let k = need(a.k, "k")?;
            let MatrixFile::Stacked(sm) = m else {
                bail!("superset-biht needs a stacked matrix, got a {} matrix", m.kind());
            };
            if y.len() != sm.m1() + sm.m2() {
                bail!("expected {} signs, found {}", sm.m1() + sm.m2(), y.len());
            }
            let (y1, y2) = y.split_at(sm.m1());
            let all_negative = match a.fallback {
                Fallback::Error => AllNegativePolicy::Error,
                Fallback::FullBiht => AllNegativePolicy::FullBiht,
            };
            let cfg = SupersetConfig { biht: biht_cfg, all_negative };
            let rec = superset_recover_detailed(&sm, &y1, &y2, k, &cfg)?;
            formats::format_signal(&finish(rec.signal, k)?)
        }
    };
    ctx.emit(a.out.as_deref(), &text)
}

fn family_of(b: &BinaryMatrix) -> anyhow::Result<SetFamily> {
    let sets = (0..b.ncols()).map(|j| b.column_support(j)).collect();
    Ok(SetFamily::new(b.nrows(), sets)?)
}

fn verify(a: VerifyArgs, ctx: &mut Ctx<'_>) -> anyhow::Result<()> {
    let cap = ctx.cap(EnumCap::VERIFY);
    let matrix = || -> anyhow::Result<MatrixFile> { Ok(formats::read_matrix(&need(a.matrix.clone(), "matrix")?)?) };
    let reports: Vec<CheckReport> = match a.property {
        Property::ListDisjunct => {
            let b = binary_of(matrix()?, "list-disjunct")?;
            vec![list_disjunct_report(&b, need(a.k, "k")?, need(a.l, "l")?, cap)?]
        }
        Property::Ruff => {
            let b = binary_of(matrix()?, "ruff")?;
            vec![ruff_report(&family_of(&b)?, need(a.k, "k")?, a.alpha, cap)?]
        }
        Property::ListRuff => {
            let mut params = ListRuffParams::new(need(a.k, "k")?, need(a.l, "l")?)?;
            params.alpha = a.alpha;
            params.rank_tol = a.rank_tol;
            let report = match matrix()? {
                MatrixFile::Binary(b) => list_ruff_report(&b, &params, cap)?,
                MatrixFile::Real(r) => list_ruff_report(&r, &params, cap)?,
                MatrixFile::Stacked(_) => bail!("list-ruff needs a single matrix block"),
            };
            if let Some(v) = &report.violation {
                let detail = match v {
                    ListRuffViolation::TooManyConfusable { s, ts_len } => format!("|T_S| = {ts_len} for S = {:?}", s.indices()),
                    ListRuffViolation::NullRows { s, j, rows } => {
                        format!("rows {rows:?} of S = {:?} with column {j} admit a full-support nullvector", s.indices())
                    }
                };
                writeln!(ctx.out, "# {detail}")?;
            }
            let passed = report.violation.is_none();
            vec![CheckReport::new("list-ruff", passed, report.max_ts as f64, params.l as f64)]
        }
        Property::Property1 => {
            let b = binary_of(matrix()?, "property1")?;
            let x = formats::read_signal(&need(a.signal.clone(), "signal")?)?;
            let ok = check_property1(&b, &x)?;
            vec![CheckReport::new("property1", ok, f64::from(u8::from(ok)), 1.0)]
        }
        Property::Ts => {
            let l = need(a.l, "l")?;
            let (worst, s) = match matrix()? {
                MatrixFile::Binary(b) => ts_worst(&b, need(a.k, "k")?, cap)?,
                MatrixFile::Real(r) => ts_worst(&r, need(a.k, "k")?, cap)?,
                MatrixFile::Stacked(_) => bail!("ts needs a single matrix block"),
            };
            writeln!(ctx.out, "# largest T_S at S = {:?}", s.indices())?;
            vec![CheckReport::new("ts", worst < l, worst as f64, l as f64)]
        }
        Property::CodeDistance => {
            let code = formats::read_code(&need(a.code.clone(), "code")?)?;
            let dist = code.min_distance(ctx.cap(EnumCap::CODEWORDS))?;
            let target = distance_target(code.delta(), code.block_len());
            vec![CheckReport::new("code-distance", dist >= target, dist as f64, target as f64)]
        }
        Property::Facts => vec![fact1_report(a.points), fact2_report(a.points)],
        Property::BallSeparation => {
            let params = BallSepParams { eps: a.eps, delta_net: a.delta_net, n: a.dim, samples: a.samples };
            let (est, se) = runner::mc_ball_separation(&params, ctx.seed, a.jobs)?;
            writeln!(ctx.out, "# estimate {est} stderr {se}")?;
            let lower = params.lower_bound();
            let exact = params.exact_without_net();
            vec![
                CheckReport::new("ball-separation-lower", est + 3.0 * se >= lower, est + 3.0 * se, lower),
                CheckReport::new("ball-separation-upper", est - 3.0 * se <= exact, est - 3.0 * se, exact),
            ]
        }
        Property::Beta => {
            if a.n_min > a.n_max {
                bail!("--n-min exceeds --n-max");
            }
            let five = beta_pdf_at_half(5)?;
            vec![
                CheckReport::new("beta-at-5", (five - 1.5).abs() <= 1e-9, five, 1.5),
                beta_intermediate_report(a.n_min..=a.n_max)?,
                beta_bound_report(a.n_min..=a.n_max)?,
            ]
        }
    };
    for r in &reports {
        writeln!(ctx.out, "{r}")?;
    }
    let failed: Vec<&str> = reports.iter().filter(|r| !r.passed).map(|r| r.name.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CheckFailed(failed.join(", ")).into())
    }
}

fn trials(common: &ExperimentCommon, full: usize) -> usize {
    common.trials.unwrap_or(if common.full { full } else { 100 })
}

fn experiment(cmd: ExperimentCommand, ctx: &mut Ctx<'_>) -> anyhow::Result<()> {
    match cmd {
        ExperimentCommand::ErrorCurve(a) => {
            let c = &a.common;
            let mut cfg = ErrorCurveConfig::new(c.n, c.k, a.m_values.clone(), trials(c, 500), ctx.seed);
            cfg.p = a.p.resolve(Some(c.k))?;
            cfg.biht.max_iters = a.max_iters;
            let rows = runner::run_error_curve(&cfg, c.jobs)?;
            if let Some(path) = &c.svg {
                formats::write_text(path, &svg::error_curve_svg(&rows)?)?;
            }
            ctx.emit(c.out.as_deref(), &error_curve_csv(&rows))
        }
        ExperimentCommand::Sweep(a) => {
            let c = &a.common;
            let mut p_values = a.p_values.iter().map(|p| p.resolve(Some(c.k))).collect::<anyhow::Result<Vec<_>>>()?;
            p_values.push(default_bernoulli_p(c.k));
            let cfg = SweepConfig {
                n: c.n,
                k: c.k,
                m_values: a.m_values.clone(),
                p_values,
                trials: trials(c, 1000),
                base_seed: ctx.seed,
            };
            let rows = runner::run_bernoulli_sweep(&cfg, c.jobs)?;
            if let Some(path) = &c.svg {
                formats::write_text(path, &svg::sweep_svg(&rows)?)?;
            }
            ctx.emit(c.out.as_deref(), &sweep_csv(&rows))
        }
    }
}

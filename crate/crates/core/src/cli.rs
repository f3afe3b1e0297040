//! Command-line front end.
//!
//! Every subcommand writes one JSON document (or, for `kcurve`, CSV) that
//! echoes the effective configuration. Exit codes: 0 on success or a passing
//! check, 1 when a checked property fails or a computation breaks down, 2 on
//! usage errors.

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::approx_spaces::{gp_norm, lorentz_marcinkiewicz_norm, phi_type_norm};
use crate::boyd::{
    boyd_indices_with, check_submultiplicativity, dilation_with, power_weights, validate_weight_sequence,
    DilationGrid, WeightSequence,
};
use crate::error::{Error, Result};
use crate::io::{read_matrix, read_sequence, write_kcurve};
use crate::kfunc::{interpolation_norm_with, k_curve, InterpolationParameter, KMethod, QuadratureConfig, SequenceCouple};
use crate::numeric::log_grid;
use crate::operators::approximation_numbers;
use crate::parse::{parse_boyd, parse_real, parse_snf, parse_space};
use crate::sequences::{decreasing_rearrangement, DecreasingSequence, RawSequence};
use crate::verify::{
    verify_convexified_reiteration, verify_embeddings, verify_lm_reiteration, verify_lp_couple, DecayProfile,
    SampleSpec, VerifyOptions, WEIGHT_P_GRID,
};

pub const DEFAULT_N: usize = 256;
pub const DEFAULT_SAMPLES: usize = 100;
pub const DEFAULT_SEED: u64 = 42;
/// Caps the worker threads used for sample batches.
pub const THREADS_ENV: &str = "INTERP_SCALES_THREADS";

#[derive(Debug, Parser)]
#[command(name = "interp-scales", version, about = "Interpolation scales on approximation spaces")]
struct Cli {
    /// More log output (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a Lorentz–Marcinkiewicz, Φ-type or G_p norm of a sequence.
    Norm(NormArgs),
    /// Emit K(t, x) over a log-spaced t-grid as CSV.
    Kcurve(KcurveArgs),
    /// Evaluate the interpolation norm (E₀,E₁)_{φ,q}.
    Interpnorm(InterpArgs),
    /// Dilation function and Boyd indices of a function spec.
    Boyd(BoydArgs),
    /// Weight-sequence checks.
    #[command(subcommand)]
    Weights(WeightsCommand),
    /// Batch verification of a norm equivalence.
    #[command(subcommand)]
    Verify(VerifyCommand),
}

#[derive(Debug, Args, Serialize)]
struct InputArgs {
    /// JSON or CSV file holding the sequence (or matrix with --matrix).
    #[arg(long, short, required_unless_present = "values")]
    input: Option<PathBuf>,
    /// Inline comma-separated sequence.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "input")]
    values: Option<Vec<f64>>,
}

impl InputArgs {
    fn raw(&self) -> Result<RawSequence> {
        match (&self.input, &self.values) {
            (Some(p), _) => read_sequence(p),
            (None, Some(v)) => RawSequence::new(v.clone()),
            (None, None) => Err(Error::InvalidInput("no input sequence".into())),
        }
    }

    fn sequence(&self) -> Result<DecreasingSequence> {
        Ok(decreasing_rearrangement(&self.raw()?))
    }
}

#[derive(Debug, Args, Serialize)]
#[command(group(clap::ArgGroup::new("which").required(true).args(["lm", "snf", "gp", "space"])))]
struct NormArgs {
    #[command(flatten)]
    #[serde(flatten)]
    input: InputArgs,
    /// Treat the input as a matrix and use its approximation numbers.
    #[arg(long)]
    matrix: bool,
    /// Lorentz–Marcinkiewicz norm with this φ (needs --q).
    #[arg(long, requires = "q")]
    lm: Option<String>,
    #[arg(long, value_parser = parse_real)]
    q: Option<f64>,
    /// Φ-type norm with this symmetric norming function.
    #[arg(long)]
    snf: Option<String>,
    /// G_p norm.
    #[arg(long, value_parser = parse_real)]
    gp: Option<f64>,
    /// Any couple-space spec (`lp:2`, `lm:2:power:0.5`, `snf:phi1`).
    #[arg(long)]
    space: Option<String>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct CoupleArgs {
    #[arg(long, default_value = "lp:1")]
    e0: String,
    #[arg(long, default_value = "lp:inf")]
    e1: String,
}

impl CoupleArgs {
    fn couple(&self) -> Result<SequenceCouple> {
        Ok(SequenceCouple::new(parse_space(&self.e0)?, parse_space(&self.e1)?))
    }
}

#[derive(Debug, Args, Serialize)]
struct KcurveArgs {
    #[command(flatten)]
    #[serde(flatten)]
    input: InputArgs,
    #[command(flatten)]
    #[serde(flatten)]
    couple: CoupleArgs,
    /// exact | truncation | convex
    #[arg(long, default_value = "convex")]
    method: KMethod,
    #[arg(long, default_value_t = 2f64.powi(-10))]
    t_min: f64,
    #[arg(long, default_value_t = 2f64.powi(10))]
    t_max: f64,
    #[arg(long, default_value_t = 41)]
    points: usize,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct QuadratureArgs {
    /// Initial window [2^-L, 2^L].
    #[arg(long, default_value_t = QuadratureConfig::default().initial_log2_window)]
    window_log2: u32,
    #[arg(long, default_value_t = QuadratureConfig::default().max_log2_window)]
    max_window_log2: u32,
    #[arg(long, default_value_t = QuadratureConfig::default().panels)]
    panels: usize,
    #[arg(long, default_value_t = QuadratureConfig::default().tail_tolerance)]
    tail_tol: f64,
}

impl QuadratureArgs {
    fn config(&self) -> QuadratureConfig {
        QuadratureConfig {
            initial_log2_window: self.window_log2,
            max_log2_window: self.max_window_log2,
            panels: self.panels,
            tail_tolerance: self.tail_tol,
        }
    }
}

#[derive(Debug, Args, Serialize)]
struct InterpArgs {
    #[command(flatten)]
    #[serde(flatten)]
    input: InputArgs,
    #[command(flatten)]
    #[serde(flatten)]
    couple: CoupleArgs,
    #[arg(long)]
    phi: String,
    #[arg(long, value_parser = parse_real)]
    q: f64,
    #[arg(long, default_value = "truncation")]
    method: KMethod,
    #[command(flatten)]
    #[serde(flatten)]
    quadrature: QuadratureArgs,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct GridArgs {
    #[arg(long, default_value_t = DilationGrid::default().lo)]
    grid_lo: f64,
    #[arg(long, default_value_t = DilationGrid::default().hi)]
    grid_hi: f64,
    #[arg(long, default_value_t = DilationGrid::default().points)]
    grid_points: usize,
}

impl GridArgs {
    fn grid(&self) -> DilationGrid {
        DilationGrid {
            lo: self.grid_lo,
            hi: self.grid_hi,
            points: self.grid_points,
        }
    }
}

#[derive(Debug, Args, Serialize)]
struct BoydArgs {
    /// Function spec, e.g. `power:0.3` or `quot:power:0.6/power:0.2`.
    #[arg(long = "fn")]
    function: String,
    #[command(flatten)]
    #[serde(flatten)]
    grid: GridArgs,
    /// t-values at which φ̄ is reported.
    #[arg(long, value_delimiter = ',', default_values_t = [0.01, 0.1, 0.5, 2.0, 10.0, 100.0])]
    t: Vec<f64>,
    /// Random (s, t) pairs for the submultiplicativity check.
    #[arg(long, default_value_t = 50)]
    submult_pairs: usize,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum WeightsCommand {
    /// Check the weight-sequence properties and the vanishing limit condition.
    Validate(WeightsArgs),
}

#[derive(Debug, Args, Serialize)]
struct WeightsArgs {
    /// Power weights n^-a.
    #[arg(long, required_unless_present = "input", allow_hyphen_values = true)]
    a: Option<f64>,
    /// File holding the weights.
    #[arg(long, short, conflicts_with = "a")]
    input: Option<PathBuf>,
    /// Stored length for power weights.
    #[arg(long, default_value_t = 4096)]
    n: usize,
    #[arg(long, value_delimiter = ',', default_values_t = WEIGHT_P_GRID)]
    p_grid: Vec<f64>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct BatchArgs {
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    /// Truncation length.
    #[arg(long, short = 'n', default_value_t = DEFAULT_N)]
    n: usize,
    /// Second truncation length (default 2N).
    #[arg(long)]
    n2: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// geometric | polynomial[:a] | mixed | plateau[:k]
    #[arg(long, default_value = "mixed")]
    profile: DecayProfile,
    #[arg(long, default_value_t = VerifyOptions::default().spread_max)]
    spread_max: f64,
    #[arg(long, default_value_t = VerifyOptions::default().stability_tolerance)]
    stability_tol: f64,
    #[arg(long, default_value_t = VerifyOptions::default().calibration_samples)]
    calibration_samples: usize,
    #[arg(long, default_value_t = VerifyOptions::default().calibration_points)]
    calibration_points: usize,
    #[command(flatten)]
    #[serde(flatten)]
    quadrature: QuadratureArgs,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

impl BatchArgs {
    fn spec(&self) -> Result<SampleSpec> {
        SampleSpec::new(self.seed, self.samples, self.n, self.profile)
    }

    fn options(&self) -> VerifyOptions {
        VerifyOptions {
            n2: self.n2,
            quadrature: self.quadrature.config(),
            calibration_samples: self.calibration_samples,
            calibration_points: self.calibration_points,
            spread_max: self.spread_max,
            stability_tolerance: self.stability_tol,
        }
    }
}

#[derive(Debug, Subcommand)]
enum VerifyCommand {
    /// (l_p0, l_p1)_{ρ,q} against l_{φ,q}.
    Thm13(Thm13Args),
    /// Reiteration of Lorentz–Marcinkiewicz spaces.
    Thm12(Thm12Args),
    /// Reiteration of convexified Φ-type spaces.
    Thm17(Thm17Args),
    /// E_Δ ⊂ (E₀,E₁)_{φ,q} ⊂ E_Σ.
    Embed(EmbedArgs),
}

#[derive(Debug, Args, Serialize)]
struct Thm13Args {
    #[arg(long)]
    phi: String,
    #[arg(long, value_parser = parse_real)]
    p0: f64,
    #[arg(long, value_parser = parse_real)]
    p1: f64,
    #[arg(long, value_parser = parse_real)]
    q: f64,
    #[command(flatten)]
    #[serde(flatten)]
    batch: BatchArgs,
}

#[derive(Debug, Args, Serialize)]
struct Thm12Args {
    #[arg(long)]
    chi: String,
    #[arg(long)]
    phi0: String,
    #[arg(long)]
    phi1: String,
    #[arg(long, value_parser = parse_real)]
    q0: f64,
    #[arg(long, value_parser = parse_real)]
    q1: f64,
    #[arg(long, value_parser = parse_real)]
    q: f64,
    #[command(flatten)]
    #[serde(flatten)]
    batch: BatchArgs,
}

#[derive(Debug, Args, Serialize)]
struct Thm17Args {
    /// Exponent a of α_n = n^-a.
    #[arg(long)]
    alpha: f64,
    /// Exponent b of β_n = n^-b.
    #[arg(long)]
    beta: f64,
    #[arg(long, value_parser = parse_real)]
    p: f64,
    #[arg(long, value_parser = parse_real)]
    q: f64,
    #[arg(long, value_parser = parse_real)]
    l: f64,
    /// Stored weight length.
    #[arg(long, default_value_t = 4096)]
    weight_len: usize,
    #[command(flatten)]
    #[serde(flatten)]
    batch: BatchArgs,
}

#[derive(Debug, Args, Serialize)]
struct EmbedArgs {
    #[command(flatten)]
    #[serde(flatten)]
    couple: CoupleArgs,
    #[arg(long, default_value = "power:0.5")]
    phi: String,
    #[arg(long, value_parser = parse_real, default_value = "2")]
    q: f64,
    #[command(flatten)]
    #[serde(flatten)]
    batch: BatchArgs,
}

/// Parses `argv` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();
    configure_threads();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::InvalidInput(_) | Error::InvalidParameter(_) | Error::Unsupported(_) | Error::Domain(_) => 2,
        Error::Truncation(_) | Error::NumericalFailure { .. } | Error::DivergentTail(_) => 1,
    }
}

fn configure_threads() {
    let Ok(raw) = std::env::var(THREADS_ENV) else { return };
    match raw.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                log::debug!("thread pool already configured: {e}");
            }
        }
        _ => log::warn!("ignoring {THREADS_ENV}={raw}: expected a positive integer"),
    }
}

fn timestamp() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    match path {
        Some(p) => File::create(p)
            .map(|f| Box::new(io::BufWriter::new(f)) as Box<dyn Write>)
            .map_err(|e| Error::InvalidInput(format!("{}: {e}", p.display()))),
        None => Ok(Box::new(io::stdout().lock())),
    }
}

/// Writes `body` with `config` and `timestamp` fields added.
fn emit(body: impl Serialize, command: &str, args: impl Serialize, output: Option<&Path>) -> Result<()> {
    let mut doc = serde_json::to_value(body).map_err(|e| Error::InvalidInput(e.to_string()))?;
    let config = json!({ "command": command, "args": args });
    match &mut doc {
        Value::Object(map) => {
            map.insert("config".into(), config);
            map.insert("timestamp".into(), json!(timestamp()));
        }
        other => {
            *other = json!({ "result": other.clone(), "config": config, "timestamp": timestamp() });
        }
    }
    let mut w = sink(output)?;
    let text = serde_json::to_string_pretty(&doc).map_err(|e| Error::InvalidInput(e.to_string()))?;
    writeln!(w, "{text}")
        .and_then(|_| w.flush())
        .map_err(|e| Error::InvalidInput(e.to_string()))
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Norm(a) => norm(a),
        Command::Kcurve(a) => kcurve(a),
        Command::Interpnorm(a) => interpnorm(a),
        Command::Boyd(a) => boyd(a),
        Command::Weights(WeightsCommand::Validate(a)) => weights(a),
        Command::Verify(v) => verify(v),
    }
}

fn norm(a: NormArgs) -> Result<i32> {
    let (x, singular) = if a.matrix {
        let path = a
            .input
            .input
            .as_deref()
            .ok_or_else(|| Error::InvalidInput("--matrix needs --input".into()))?;
        let s = approximation_numbers(&read_matrix(path)?)?;
        (s.clone(), Some(s.into_vec()))
    } else {
        (a.input.sequence()?, None)
    };
    let (kind, spec, value) = if let Some(spec) = &a.lm {
        let q = a.q.expect("clap enforces --q");
        ("lorentz_marcinkiewicz", spec.clone(), lorentz_marcinkiewicz_norm(&x, &parse_boyd(spec)?, q)?)
    } else if let Some(spec) = &a.snf {
        ("phi_type", spec.clone(), phi_type_norm(&x, &parse_snf(spec)?)?)
    } else if let Some(p) = a.gp {
        ("gp", p.to_string(), gp_norm(&x, p)?)
    } else {
        let spec = a.space.clone().expect("clap enforces one norm");
        ("space", spec.clone(), parse_space(&spec)?.norm(&x)?)
    };
    let body = json!({
        "kind": kind,
        "spec": spec,
        "len": x.len(),
        "value": value,
        "approximation_numbers": singular,
    });
    emit(body, "norm", &a, a.output.as_deref())?;
    Ok(0)
}

fn kcurve(a: KcurveArgs) -> Result<i32> {
    if !(a.t_min > 0.0 && a.t_max > a.t_min && a.points >= 2) {
        return Err(Error::InvalidParameter("need 0 < t_min < t_max and at least 2 points".into()));
    }
    let x = a.input.sequence()?;
    let couple = a.couple.couple()?;
    let curve = k_curve(&x, &couple, &log_grid(a.t_min, a.t_max, a.points), a.method)?;
    let check = curve.check(1e-9);
    if !(check.monotone && check.concave) {
        log::warn!("K-curve shape check failed: {check:?}");
    }
    log::info!("kcurve config: {}", serde_json::to_string(&a).unwrap_or_default());
    write_kcurve(sink(a.output.as_deref())?, &curve)?;
    Ok(0)
}

fn interpnorm(a: InterpArgs) -> Result<i32> {
    let x = a.input.sequence()?;
    let couple = a.couple.couple()?;
    let param = InterpolationParameter::new(parse_boyd(&a.phi)?, a.q)?;
    let r = interpolation_norm_with(&x, &couple, &param, a.method, &a.quadrature.config())?;
    emit(r, "interpnorm", &a, a.output.as_deref())?;
    Ok(0)
}

fn boyd(a: BoydArgs) -> Result<i32> {
    let phi = parse_boyd(&a.function)?;
    let grid = a.grid.grid();
    let indices = boyd_indices_with(&phi, &grid)?;
    let dilation = a
        .t
        .iter()
        .map(|&t| dilation_with(&phi, t, &grid).map(|d| json!({ "t": t, "value": d.value, "exact": d.exact })))
        .collect::<Result<Vec<_>>>()?;
    let submult = check_submultiplicativity(&phi, a.submult_pairs, &grid)?;
    let body = json!({
        "function": phi.to_string(),
        "upper": indices.upper,
        "lower": indices.lower,
        "indices": indices,
        "dilation": dilation,
        "submultiplicativity": submult,
    });
    emit(body, "boyd", &a, a.output.as_deref())?;
    Ok(if submult.passed { 0 } else { 1 })
}

fn weights(a: WeightsArgs) -> Result<i32> {
    let w = match (&a.input, a.a) {
        (Some(path), _) => WeightSequence::from_values(read_sequence(path)?.values().to_vec())?,
        (None, Some(exp)) => power_weights(exp, a.n)?,
        (None, None) => return Err(Error::InvalidInput("need --a or --input".into())),
    };
    let v = validate_weight_sequence(&w, &a.p_grid)?;
    let body = json!({
        "weights_passed": v.passed,
        "limit_condition_holds": v.limit_condition.vanishes,
        "validation": v,
    });
    emit(body, "weights validate", &a, a.output.as_deref())?;
    Ok(if v.passed { 0 } else { 1 })
}

fn verify(v: VerifyCommand) -> Result<i32> {
    let (body, pass, command, args, batch_out): (Value, bool, &str, Value, Option<PathBuf>) = match v {
        VerifyCommand::Thm13(a) => {
            let r = verify_lp_couple(&parse_boyd(&a.phi)?, a.p0, a.p1, a.q, &a.batch.spec()?, &a.batch.options())?;
            (to_value(&r)?, r.pass, "verify thm13", with_options(&a, &a.batch)?, a.batch.output.clone())
        }
        VerifyCommand::Thm12(a) => {
            let r = verify_lm_reiteration(
                &parse_boyd(&a.chi)?,
                &parse_boyd(&a.phi0)?,
                &parse_boyd(&a.phi1)?,
                a.q0,
                a.q1,
                a.q,
                &a.batch.spec()?,
                &a.batch.options(),
            )?;
            (to_value(&r)?, r.pass, "verify thm12", with_options(&a, &a.batch)?, a.batch.output.clone())
        }
        VerifyCommand::Thm17(a) => {
            let alpha = power_weights(a.alpha, a.weight_len)?;
            let beta = power_weights(a.beta, a.weight_len)?;
            let r = verify_convexified_reiteration(&alpha, &beta, a.p, a.q, a.l, &a.batch.spec()?, &a.batch.options())?;
            (to_value(&r)?, r.pass, "verify thm17", with_options(&a, &a.batch)?, a.batch.output.clone())
        }
        VerifyCommand::Embed(a) => {
            let r = verify_embeddings(&a.couple.couple()?, &parse_boyd(&a.phi)?, a.q, &a.batch.spec()?, &a.batch.options())?;
            (to_value(&r)?, r.pass, "verify embed", with_options(&a, &a.batch)?, a.batch.output.clone())
        }
    };
    emit(body, command, args, batch_out.as_deref())?;
    Ok(if pass { 0 } else { 1 })
}

fn to_value(v: &impl Serialize) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::InvalidInput(e.to_string()))
}

fn with_options(args: &impl Serialize, batch: &BatchArgs) -> Result<Value> {
    let mut v = to_value(args)?;
    if let Value::Object(map) = &mut v {
        map.insert("options".into(), to_value(&batch.options())?);
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["interp-scales"]), 2);
        assert_eq!(run(["interp-scales", "boyd", "--fn", "bogus:1"]), 2);
        assert_eq!(run(["interp-scales", "frobnicate"]), 2);
        assert_eq!(run(["interp-scales", "--help"]), 0);
    }

    #[test]
    fn exit_codes_by_error_kind() {
        assert_eq!(exit_code(&Error::Parse("x".into())), 2);
        assert_eq!(exit_code(&Error::numerical("x")), 1);
        assert_eq!(exit_code(&Error::DivergentTail("x".into())), 1);
    }
}

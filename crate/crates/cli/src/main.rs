//! Command-line surface over the rate region toolkit: derived constants,
//! region membership queries, boundary traces, figure datasets, discrete
//! evaluators and searches, common-part extraction, and the Monte Carlo
//! validation report.
//!
//! Conventions: the core works in nats; `--units bits` converts rate inputs
//! and outputs at this boundary only. CSV output starts with a version
//! header line, then a column header row; numbers carry 12 significant
//! digits. Errors are machine-readable JSON records on stderr; exit code 2
//! marks usage errors, 1 computation errors.

use clap::{Args, Parser, Subcommand, ValueEnum};
use rdsc_core::discrete::{
    common_part, corollary1_min_rate, default_aux_cards, theorem1_evaluate, theorem1_optimize,
    theorem3_evaluate, theorem4_evaluate, AchievablePoint, AuxCards, AuxChannels, DiscreteProblem,
    EvaluatedBounds, JointPmf, LayeredChannels, MdChannels, MdProblem, ZChannels,
};
use rdsc_core::gaussian::derived_constants;
use rdsc_core::numerics::linspace;
use rdsc_core::oracle::{validate, CheckStatus};
use rdsc_core::regions::{
    ceo_boundary, ceo_contains, d12_inner_curve, d12_outer, ippr_boundary, ippr_contains,
    noisy_md_contains, omega_contains, partial_char_contains, qout_contains, LambdaCase,
    SegmentLabel,
};
use rdsc_core::{Error, Params, Point, Polyline, Problem};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// First line of every CSV output; determinism is promised modulo this line.
const VERSION_HEADER: &str = concat!("# rdsc ", env!("CARGO_PKG_VERSION"));

#[derive(Parser)]
#[command(
    name = "rdsc",
    version,
    about = "Rate-distortion regions for distributed coding of a noisy Gaussian source"
)]
struct Cli {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Units for rate inputs and outputs (core computations are in nats).
    #[arg(long, global = true, value_enum, default_value_t = Units::Nats)]
    units: Units,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ProblemArgs {
    /// Source variance (overrides --config).
    #[arg(long, global = true)]
    sigma_x2: Option<f64>,
    /// First observation noise variance (overrides --config).
    #[arg(long, global = true)]
    sigma_n1_2: Option<f64>,
    /// Second observation noise variance (overrides --config).
    #[arg(long, global = true)]
    sigma_n2_2: Option<f64>,
    /// Observation noise correlation (overrides --config).
    #[arg(long, global = true)]
    rho_n: Option<f64>,
    /// JSON file with problem parameters; inline flags win on conflict.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Units {
    /// Natural logarithm units.
    Nats,
    /// Binary units: rates scale by 1/ln 2 on output, ln 2 on input.
    Bits,
}

impl Units {
    fn rate_in(self, v: f64) -> f64 {
        match self {
            Units::Nats => v,
            Units::Bits => v * std::f64::consts::LN_2,
        }
    }

    fn rate_out(self, v: f64) -> f64 {
        match self {
            Units::Nats => v,
            Units::Bits => v / std::f64::consts::LN_2,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the derived constants of the problem as JSON.
    Constants,
    /// Test a rate-distortion point for membership in a region.
    Member(MemberArgs),
    /// Trace a region boundary as CSV on stdout.
    Boundary(BoundaryArgs),
    /// Write figure datasets as CSV files into a directory.
    Figure(FigureArgs),
    /// Discrete-alphabet evaluators and channel searches.
    #[command(subcommand)]
    Discrete(DiscreteCommand),
    /// Extract the maximal common part of a two-axis pmf.
    CommonPart(CommonPartArgs),
    /// Compare closed forms against the Monte Carlo oracle.
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Region {
    /// Single-description scheme (each description individually decodable).
    Ippr,
    /// Joint-decoder region at a fixed joint distortion.
    Ceo,
    /// Entropy-power outer bound.
    Qout,
    /// Centralized-encoder multiple description region.
    Md,
    /// Equal-sum-rate chord region (symmetric problems).
    Omega,
    /// Exact characterization slices (requires --item).
    Partial,
}

#[derive(Args)]
struct MemberArgs {
    /// Region to test against.
    #[arg(long, value_enum)]
    region: Region,
    /// Operating point R1,R2,D1,D2,D3 (rates in the selected units).
    #[arg(long)]
    point: String,
    /// Characterization item (1, 2, or 3) for --region partial.
    #[arg(long)]
    item: Option<u8>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BoundaryRegion {
    /// Joint-decoder rate boundary at --d3.
    Ceo,
    /// Side-distortion inner boundary at equal rates --rate.
    D12in,
    /// Side-distortion outer floors at equal rates --rate.
    D12out,
}

#[derive(Args)]
struct BoundaryArgs {
    /// Boundary to trace.
    #[arg(long, value_enum)]
    region: BoundaryRegion,
    /// Joint distortion (required for ceo).
    #[arg(long)]
    d3: Option<f64>,
    /// Per-description rate in the selected units (required for d12in/d12out).
    #[arg(long)]
    rate: Option<f64>,
    /// Number of samples per traced segment.
    #[arg(long, default_value_t = 257)]
    samples: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FigureId {
    /// Single-description vs joint-decoder rate boundaries at --d3.
    Fig2,
    /// Labeled three-piece joint-decoder boundary at --d3.
    Fig3,
    /// Side-distortion inner curve vs outer floors at --rate.
    Fig4,
}

#[derive(Args)]
struct FigureArgs {
    /// Which figure dataset to write.
    #[arg(value_enum)]
    which: FigureId,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    /// Joint distortion for fig2/fig3.
    #[arg(long, default_value_t = 0.4)]
    d3: f64,
    /// Per-description rate for fig4, in the selected units.
    #[arg(long, default_value_t = 0.5)]
    rate: f64,
    /// Number of samples per traced segment.
    #[arg(long, default_value_t = 257)]
    samples: usize,
}

#[derive(Subcommand)]
enum DiscreteCommand {
    /// Evaluate the two-layer inner bound at channels from a file.
    Evaluate(DiscreteEvaluateArgs),
    /// Search two-layer channels minimizing a weighted objective.
    Optimize(DiscreteOptimizeArgs),
    /// Minimum rate with an informed joint decoder (one described source).
    Corollary1(Corollary1Args),
    /// Evaluate the two-description bound for one observed source.
    Theorem3(Theorem3Args),
    /// Evaluate the layered bound that codes the common part centrally.
    Theorem4(Theorem4Args),
}

#[derive(Args)]
struct DiscreteEvaluateArgs {
    /// Problem pmf JSON: {"shape":[|X|,|Y1|,|Y2|],"p":[...]} row-major.
    #[arg(long)]
    pmf: PathBuf,
    /// Distortion JSON: {"shape":[|X|,|Xhat|],"d":[...]} row-major.
    #[arg(long)]
    dist: PathBuf,
    /// Channels JSON: {"cards":[u1,w1,u2,w2],"channel1":[...],"channel2":[...]}.
    #[arg(long)]
    channels: PathBuf,
}

#[derive(Args)]
struct DiscreteOptimizeArgs {
    /// Problem pmf JSON: {"shape":[|X|,|Y1|,|Y2|],"p":[...]} row-major.
    #[arg(long)]
    pmf: PathBuf,
    /// Distortion JSON: {"shape":[|X|,|Xhat|],"d":[...]} row-major.
    #[arg(long)]
    dist: PathBuf,
    /// Auxiliary alphabet sizes u1,w1,u2,w2 (default: support-lemma sizes).
    #[arg(long)]
    cards: Option<String>,
    /// Cap applied to the default alphabet sizes.
    #[arg(long, default_value_t = 64)]
    card_cap: usize,
    /// Objective weights on R1,R2,D1,D2,D3 (rates in the selected units).
    #[arg(long)]
    weights: String,
    /// Number of evaluator calls the search may spend.
    #[arg(long)]
    budget: usize,
    /// Random seed.
    #[arg(long)]
    seed: u64,
}

#[derive(Args)]
struct Corollary1Args {
    /// Problem pmf JSON: {"shape":[|X|,|Y1|,|Y2|],"p":[...]} row-major.
    #[arg(long)]
    pmf: PathBuf,
    /// Distortion JSON: {"shape":[|X|,|Xhat|],"d":[...]} row-major.
    #[arg(long)]
    dist: PathBuf,
    /// Side-decoder distortion demand.
    #[arg(long)]
    d1_max: f64,
    /// Informed-decoder distortion demand.
    #[arg(long)]
    d3_max: f64,
    /// Auxiliary alphabet sizes u,w.
    #[arg(long)]
    cards: String,
    /// Number of evaluator calls the search may spend.
    #[arg(long)]
    budget: usize,
    /// Random seed.
    #[arg(long)]
    seed: u64,
}

#[derive(Args)]
struct Theorem3Args {
    /// Problem pmf JSON: {"shape":[|X|,|Y|],"p":[...]} row-major.
    #[arg(long)]
    pmf: PathBuf,
    /// Distortion JSON: {"shape":[|X|,|Xhat|],"d":[...]} row-major.
    #[arg(long)]
    dist: PathBuf,
    /// Channels JSON: {"cards":[c0,c1,c2,c3],"channel":[...]} row-major.
    #[arg(long)]
    channels: PathBuf,
    /// Require a constant base layer and independent side reconstructions.
    #[arg(long)]
    restricted: bool,
}

#[derive(Args)]
struct Theorem4Args {
    /// Problem pmf JSON: {"shape":[|X|,|Y1|,|Y2|],"p":[...]} row-major.
    #[arg(long)]
    pmf: PathBuf,
    /// Distortion JSON: {"shape":[|X|,|Xhat|],"d":[...]} row-major.
    #[arg(long)]
    dist: PathBuf,
    /// Common-layer channels JSON: {"cards":[c0,c1,c2,c3],"base":[...],"refine":[...]}.
    #[arg(long)]
    z_channels: PathBuf,
    /// Distributed channels JSON: {"cards":[u1,w1,u2,w2],"u1":[...],"w1":[...],"u2":[...],"w2":[...]}.
    #[arg(long)]
    layer_channels: PathBuf,
}

#[derive(Args)]
struct CommonPartArgs {
    /// Joint pmf JSON: {"shape":[|Y1|,|Y2|],"p":[...]} row-major.
    #[arg(long)]
    pmf: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    /// Sample count.
    #[arg(long)]
    n: usize,
    /// Random seed.
    #[arg(long)]
    seed: u64,
    /// Tolerance for sampled rows: a multiple of the standard error, written
    /// as a number or as e.g. "3sigma".
    #[arg(long, default_value = "3sigma")]
    tol: String,
    /// Coarse test variance of encoder 1.
    #[arg(long, default_value_t = 1.0 / 3.0)]
    t11: f64,
    /// Refinement test variance of encoder 1.
    #[arg(long, default_value_t = 1.0 / 3.0)]
    t12: f64,
    /// Coarse test variance of encoder 2.
    #[arg(long, default_value_t = 1.0 / 3.0)]
    t21: f64,
    /// Refinement test variance of encoder 2.
    #[arg(long, default_value_t = 1.0 / 3.0)]
    t22: f64,
}

/// Usage problems exit 2; computation problems exit 1.
enum CliError {
    Usage(String),
    Compute(Error),
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Compute(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Short machine-readable tag for each core error variant.
fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidProblem(_) => "invalid_problem",
        Error::InvalidArgument(_) => "invalid_argument",
        Error::RateInfinite(_) => "rate_infinite",
        Error::InfeasibleDistortion(_) => "infeasible_distortion",
        Error::NotApplicable(_) => "not_applicable",
        Error::SingularCovariance(_) => "singular_covariance",
        Error::NoSignChange { .. } => "no_sign_change",
        Error::NotUnimodal => "not_unimodal",
        Error::EmptyInput(_) => "empty_input",
        Error::DimensionMismatch(_) => "dimension_mismatch",
        Error::TensorTooLarge(_) => "tensor_too_large",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("{}", json!({"error": {"kind": "usage", "message": msg}}));
            ExitCode::from(2)
        }
        Err(CliError::Compute(e)) => {
            eprintln!(
                "{}",
                json!({"error": {"kind": error_kind(&e), "message": e.to_string()}})
            );
            ExitCode::FAILURE
        }
        Err(CliError::Io(msg)) => {
            eprintln!("{}", json!({"error": {"kind": "io", "message": msg}}));
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let problem = build_problem(&cli.problem)?;
    let units = cli.units;
    match cli.command {
        Command::Constants => run_constants(&problem),
        Command::Member(args) => run_member(&problem, units, &args),
        Command::Boundary(args) => run_boundary(&problem, units, &args),
        Command::Figure(args) => run_figure(&problem, units, &args),
        Command::Discrete(cmd) => run_discrete(units, &cmd),
        Command::CommonPart(args) => run_common_part(&args),
        Command::Validate(args) => run_validate(&problem, &args),
    }
}

/// Problem parameters from a config file overridden by inline flags.
fn build_problem(args: &ProblemArgs) -> Result<Problem, CliError> {
    #[derive(serde::Deserialize, Default)]
    struct ConfigFile {
        sigma_x2: Option<f64>,
        sigma_n1_2: Option<f64>,
        sigma_n2_2: Option<f64>,
        rho_n: Option<f64>,
    }
    let file: ConfigFile = match &args.config {
        Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?)
            .map_err(|e| CliError::Usage(format!("invalid config JSON: {e}")))?,
        None => ConfigFile::default(),
    };
    let pick = |inline: Option<f64>, from_file: Option<f64>, default: f64| {
        inline.or(from_file).unwrap_or(default)
    };
    Ok(Problem::new(
        pick(args.sigma_x2, file.sigma_x2, 1.0),
        pick(args.sigma_n1_2, file.sigma_n1_2, 1.0),
        pick(args.sigma_n2_2, file.sigma_n2_2, 1.0),
        pick(args.rho_n, file.rho_n, 0.0),
    )?)
}

/// Formats a number with 12 significant digits for CSV cells.
fn sig12(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.11e}")
    }
}

/// JSON value for a float; non-finite values become strings.
fn jnum(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::String(sig12(v))
    }
}

/// JSON value for an optional float.
fn jopt(v: Option<f64>) -> Value {
    v.map(jnum).unwrap_or(Value::Null)
}

fn segment_name(label: SegmentLabel) -> &'static str {
    match label {
        SegmentLabel::A => "A",
        SegmentLabel::B => "B",
        SegmentLabel::C => "C",
        SegmentLabel::Curve => "curve",
        SegmentLabel::Floor => "floor",
    }
}

fn case_name(case: LambdaCase) -> &'static str {
    match case {
        LambdaCase::SupAtInfinity => "sup_at_infinity",
        LambdaCase::SupInterior => "sup_interior",
        LambdaCase::SupAtZero => "sup_at_zero",
    }
}

fn run_constants(p: &Problem) -> Result<(), CliError> {
    let c = derived_constants(p)?;
    println!(
        "{}",
        json!({
            "d1_min": jnum(c.d1_min),
            "d2_min": jnum(c.d2_min),
            "d3_min": jnum(c.d3_min),
            "d_x": jnum(c.d_x),
        })
    );
    Ok(())
}

/// Parses "R1,R2,D1,D2,D3" with rates in the selected units.
fn parse_point(s: &str, units: Units) -> Result<Point, CliError> {
    let parts = parse_floats(s, 5, "point")?;
    Ok(Point::new(
        units.rate_in(parts[0]),
        units.rate_in(parts[1]),
        parts[2],
        parts[3],
        parts[4],
    )?)
}

/// Parses a comma-separated list of exactly `n` floats ("inf" allowed).
fn parse_floats(s: &str, n: usize, what: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != n {
        return Err(CliError::Usage(format!(
            "{what} needs {n} comma-separated values, got {}",
            parts.len()
        )));
    }
    parts
        .iter()
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("{what}: cannot parse '{t}' as a number")))
        })
        .collect()
}

/// Parses a comma-separated list of exactly `n` nonzero sizes.
fn parse_cards(s: &str, n: usize, what: &str) -> Result<Vec<usize>, CliError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != n {
        return Err(CliError::Usage(format!(
            "{what} needs {n} comma-separated sizes, got {}",
            parts.len()
        )));
    }
    parts
        .iter()
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Usage(format!("{what}: cannot parse '{t}' as a size")))
        })
        .collect()
}

fn run_member(p: &Problem, units: Units, args: &MemberArgs) -> Result<(), CliError> {
    let point = parse_point(&args.point, units)?;
    let record = |contains: bool, margin: Value, witness: Value| -> Value {
        json!({"contains": contains, "margin": margin, "witness": witness})
    };
    let out = match args.region {
        Region::Ippr => {
            let r = ippr_contains(p, &point)?;
            let w = r
                .witness
                .map(|(t1, t2)| json!({"t1": jnum(t1), "t2": jnum(t2)}))
                .unwrap_or(Value::Null);
            record(r.contains, jnum(r.margin), w)
        }
        Region::Ceo => {
            let r = ceo_contains(p, point.r1, point.r2, point.d3)?;
            let w = r
                .witness
                .map(|(t1, t2)| json!({"t1": jnum(t1), "t2": jnum(t2)}))
                .unwrap_or(Value::Null);
            record(r.contains, jnum(r.margin), w)
        }
        Region::Qout => {
            let r = qout_contains(p, &point)?;
            let w = r
                .witness
                .map(|w| {
                    json!({
                        "r11": jnum(w.params.r11),
                        "r12": jnum(w.params.r12),
                        "r21": jnum(w.params.r21),
                        "r22": jnum(w.params.r22),
                        "zeta": jnum(w.zeta),
                        "lambda": jnum(w.lambda_val),
                        "sigma_m2_hat": jopt(w.sigma_m2_hat),
                    })
                })
                .unwrap_or(Value::Null);
            record(r.contains, jnum(r.margin), w)
        }
        Region::Md => {
            let r = noisy_md_contains(p, &point)?;
            let w = r
                .witness
                .map(|w| {
                    json!({
                        "gamma": jnum(w.value),
                        "case": case_name(w.case),
                        "sigma_m2_hat": jopt(w.sigma_m2_hat),
                    })
                })
                .unwrap_or(Value::Null);
            record(r.contains, jnum(r.margin), w)
        }
        Region::Omega => {
            let inside = omega_contains(p, point.r1, point.r2)?;
            record(inside, Value::Null, Value::Null)
        }
        Region::Partial => {
            let item = args.item.ok_or_else(|| {
                CliError::Usage("--region partial requires --item 1|2|3".into())
            })?;
            let r = partial_char_contains(p, &point, item)?;
            let w = r
                .witness
                .map(|(t1, t2)| json!({"t1_tilde": jnum(t1), "t2_tilde": jnum(t2)}))
                .unwrap_or(Value::Null);
            record(r.contains, jnum(r.margin), w)
        }
    };
    println!("{out}");
    Ok(())
}

/// Renders a polyline as CSV with a version header.
fn polyline_csv(b: &Polyline, col1: &str, col2: &str, scale_rates: impl Fn(f64) -> f64) -> String {
    let mut out = String::new();
    out.push_str(VERSION_HEADER);
    out.push('\n');
    out.push_str(&format!("{col1},{col2},label\n"));
    for (&(x, y), &label) in b.points.iter().zip(b.labels.iter()) {
        out.push_str(&format!(
            "{},{},{}\n",
            sig12(scale_rates(x)),
            sig12(scale_rates(y)),
            segment_name(label)
        ));
    }
    out
}

/// Diagonal trace of the outer floors as a polyline.
fn outer_floor_polyline(p: &Problem, rate: f64, samples: usize) -> Result<Polyline, CliError> {
    let floors = d12_outer(p, rate)?;
    let lo = floors.individual_floor;
    let hi = floors.sum_floor - floors.individual_floor;
    let points: Vec<(f64, f64)> = linspace(lo, hi, samples.max(2))
        .into_iter()
        .map(|d1| (d1, floors.sum_floor - d1))
        .collect();
    let labels = vec![SegmentLabel::Floor; points.len()];
    Ok(Polyline { points, labels })
}

fn run_boundary(p: &Problem, units: Units, args: &BoundaryArgs) -> Result<(), CliError> {
    let csv = match args.region {
        BoundaryRegion::Ceo => {
            let d3 = args
                .d3
                .ok_or_else(|| CliError::Usage("--region ceo requires --d3".into()))?;
            let b = ceo_boundary(p, d3, args.samples)?;
            polyline_csv(&b, "r1", "r2", |v| units.rate_out(v))
        }
        BoundaryRegion::D12in => {
            let rate = args
                .rate
                .ok_or_else(|| CliError::Usage("--region d12in requires --rate".into()))?;
            let b = d12_inner_curve(p, units.rate_in(rate), args.samples)?;
            polyline_csv(&b, "d1", "d2", |v| v)
        }
        BoundaryRegion::D12out => {
            let rate = args
                .rate
                .ok_or_else(|| CliError::Usage("--region d12out requires --rate".into()))?;
            let b = outer_floor_polyline(p, units.rate_in(rate), args.samples)?;
            polyline_csv(&b, "d1", "d2", |v| v)
        }
    };
    print!("{csv}");
    Ok(())
}

fn run_figure(p: &Problem, units: Units, args: &FigureArgs) -> Result<(), CliError> {
    std::fs::create_dir_all(&args.out)?;
    let write = |name: &str, contents: String| -> Result<(), CliError> {
        let path = args.out.join(name);
        std::fs::write(&path, contents)?;
        println!("{}", path.display());
        Ok(())
    };
    match args.which {
        FigureId::Fig2 => {
            let single = ippr_boundary(p, args.d3, args.samples)?;
            let joint = ceo_boundary(p, args.d3, args.samples)?;
            write(
                "fig2_ippr.csv",
                polyline_csv(&single, "r1", "r2", |v| units.rate_out(v)),
            )?;
            write(
                "fig2_ceo.csv",
                polyline_csv(&joint, "r1", "r2", |v| units.rate_out(v)),
            )?;
        }
        FigureId::Fig3 => {
            let b = ceo_boundary(p, args.d3, args.samples)?;
            write(
                "fig3_ceo_labeled.csv",
                polyline_csv(&b, "r1", "r2", |v| units.rate_out(v)),
            )?;
        }
        FigureId::Fig4 => {
            let rate = units.rate_in(args.rate);
            let inner = d12_inner_curve(p, rate, args.samples)?;
            let outer = outer_floor_polyline(p, rate, args.samples)?;
            write("fig4_inner.csv", polyline_csv(&inner, "d1", "d2", |v| v))?;
            write("fig4_outer.csv", polyline_csv(&outer, "d1", "d2", |v| v))?;
        }
    }
    Ok(())
}

#[derive(serde::Deserialize)]
struct PmfFile {
    shape: Vec<usize>,
    p: Vec<f64>,
}

#[derive(serde::Deserialize)]
struct DistFile {
    shape: Vec<usize>,
    d: Vec<f64>,
}

#[derive(serde::Deserialize)]
struct ChannelsFile {
    cards: [usize; 4],
    channel1: Vec<f64>,
    channel2: Vec<f64>,
    #[serde(default)]
    decoder1: Option<Vec<usize>>,
    #[serde(default)]
    decoder2: Option<Vec<usize>>,
    #[serde(default)]
    decoder3: Option<Vec<usize>>,
}

#[derive(serde::Deserialize)]
struct MdChannelsFile {
    cards: [usize; 4],
    channel: Vec<f64>,
}

#[derive(serde::Deserialize)]
struct ZChannelsFile {
    cards: [usize; 4],
    base: Vec<f64>,
    refine: Vec<f64>,
}

#[derive(serde::Deserialize)]
struct LayerChannelsFile {
    cards: [usize; 4],
    u1: Vec<f64>,
    w1: Vec<f64>,
    u2: Vec<f64>,
    w2: Vec<f64>,
}

fn load_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Result<T, CliError> {
    serde_json::from_str(&std::fs::read_to_string(path)?)
        .map_err(|e| CliError::Usage(format!("invalid {what} JSON in {}: {e}", path.display())))
}

/// Loads a three-observation problem from pmf and distortion files.
fn load_problem3(pmf: &Path, dist: &Path) -> Result<DiscreteProblem<f64>, CliError> {
    let pmf: PmfFile = load_json(pmf, "pmf")?;
    let dist: DistFile = load_json(dist, "distortion")?;
    if pmf.shape.len() != 3 {
        return Err(CliError::Usage(format!(
            "pmf shape must be [|X|,|Y1|,|Y2|], got {:?}",
            pmf.shape
        )));
    }
    if dist.shape.len() != 2 || dist.shape[0] != pmf.shape[0] {
        return Err(CliError::Usage(format!(
            "distortion shape must be [|X|,|Xhat|] with |X| = {}, got {:?}",
            pmf.shape[0], dist.shape
        )));
    }
    Ok(DiscreteProblem::new(
        pmf.shape[0],
        pmf.shape[1],
        pmf.shape[2],
        dist.shape[1],
        pmf.p,
        dist.d,
    )?)
}

/// JSON rendering of an evaluated two-layer point.
fn achievable_json(pt: &AchievablePoint<f64>, units: Units, with_channels: bool) -> Value {
    let corner = |r1: f64, r2: f64| {
        json!({"r1": jnum(units.rate_out(r1)), "r2": jnum(units.rate_out(r2))})
    };
    let mut out = json!({
        "corner1": corner(pt.corner1.r1, pt.corner1.r2),
        "corner2": corner(pt.corner2.r1, pt.corner2.r2),
        "sum_rate": jnum(units.rate_out(pt.sum_rate)),
        "distortions": {
            "d1": jnum(pt.distortions.0),
            "d2": jnum(pt.distortions.1),
            "d3": jnum(pt.distortions.2),
        },
        "decoder1": pt.channels.decoder1,
        "decoder2": pt.channels.decoder2,
        "decoder3": pt.channels.decoder3,
    });
    if with_channels {
        out["channels"] = json!({
            "cards": [
                pt.channels.u1_card,
                pt.channels.w1_card,
                pt.channels.u2_card,
                pt.channels.w2_card,
            ],
            "channel1": pt.channels.channel1,
            "channel2": pt.channels.channel2,
        });
    }
    out
}

fn bounds_json(b: &EvaluatedBounds<f64>, units: Units) -> Value {
    json!({
        "r1_bound": jnum(units.rate_out(b.r1_bound)),
        "r2_bound": jnum(units.rate_out(b.r2_bound)),
        "sum_bound": jnum(units.rate_out(b.sum_bound)),
        "distortions": {
            "d1": jnum(b.distortions.0),
            "d2": jnum(b.distortions.1),
            "d3": jnum(b.distortions.2),
        },
    })
}

fn run_discrete(units: Units, cmd: &DiscreteCommand) -> Result<(), CliError> {
    match cmd {
        DiscreteCommand::Evaluate(args) => {
            let prob = load_problem3(&args.pmf, &args.dist)?;
            let ch: ChannelsFile = load_json(&args.channels, "channels")?;
            let mut aux = AuxChannels::new(
                prob.y1_card,
                prob.y2_card,
                ch.cards[0],
                ch.cards[1],
                ch.cards[2],
                ch.cards[3],
                ch.channel1,
                ch.channel2,
            )?;
            aux.decoder1 = ch.decoder1;
            aux.decoder2 = ch.decoder2;
            aux.decoder3 = ch.decoder3;
            let pt = theorem1_evaluate(&prob, &aux)?;
            println!("{}", achievable_json(&pt, units, false));
        }
        DiscreteCommand::Optimize(args) => {
            let prob = load_problem3(&args.pmf, &args.dist)?;
            let cards = match &args.cards {
                Some(s) => {
                    let c = parse_cards(s, 4, "--cards")?;
                    AuxCards { u1: c[0], w1: c[1], u2: c[2], w2: c[3] }
                }
                None => default_aux_cards(&prob, args.card_cap),
            };
            let w = parse_floats(&args.weights, 5, "--weights")?;
            // Rate weights entered per selected unit convert to per-nat.
            let weights = [
                units.rate_out(w[0]),
                units.rate_out(w[1]),
                w[2],
                w[3],
                w[4],
            ];
            let pt = theorem1_optimize(&prob, cards, weights, args.budget, args.seed)?;
            println!("{}", achievable_json(&pt, units, true));
        }
        DiscreteCommand::Corollary1(args) => {
            let prob = load_problem3(&args.pmf, &args.dist)?;
            let c = parse_cards(&args.cards, 2, "--cards")?;
            let rate = corollary1_min_rate(
                &prob,
                args.d1_max,
                args.d3_max,
                (c[0], c[1]),
                args.budget,
                args.seed,
            )?;
            println!("{}", json!({"rate": jnum(units.rate_out(rate))}));
        }
        DiscreteCommand::Theorem3(args) => {
            let pmf: PmfFile = load_json(&args.pmf, "pmf")?;
            let dist: DistFile = load_json(&args.dist, "distortion")?;
            if pmf.shape.len() != 2 {
                return Err(CliError::Usage(format!(
                    "pmf shape must be [|X|,|Y|], got {:?}",
                    pmf.shape
                )));
            }
            if dist.shape.len() != 2 || dist.shape[0] != pmf.shape[0] {
                return Err(CliError::Usage(format!(
                    "distortion shape must be [|X|,|Xhat|] with |X| = {}, got {:?}",
                    pmf.shape[0], dist.shape
                )));
            }
            let prob = MdProblem::new(pmf.shape[0], pmf.shape[1], dist.shape[1], pmf.p, dist.d)?;
            let ch: MdChannelsFile = load_json(&args.channels, "channels")?;
            let aux = MdChannels::new(prob.y_card, ch.cards, ch.channel)?;
            let out = theorem3_evaluate(&prob, &aux, args.restricted)?;
            println!("{}", bounds_json(&out, units));
        }
        DiscreteCommand::Theorem4(args) => {
            let prob = load_problem3(&args.pmf, &args.dist)?;
            // The common part of the two observations fixes the central layer.
            let mut obs = vec![0.0_f64; prob.y1_card * prob.y2_card];
            for x in 0..prob.x_card {
                for y1 in 0..prob.y1_card {
                    for y2 in 0..prob.y2_card {
                        obs[y1 * prob.y2_card + y2] +=
                            prob.pmf[(x * prob.y1_card + y1) * prob.y2_card + y2];
                    }
                }
            }
            let joint = JointPmf::new(vec![prob.y1_card, prob.y2_card], obs)?;
            let common = common_part(&joint)?;
            let zf: ZChannelsFile = load_json(&args.z_channels, "common-layer channels")?;
            let zc = ZChannels::new(common.k, zf.cards, zf.base, zf.refine)?;
            let lf: LayerChannelsFile = load_json(&args.layer_channels, "distributed channels")?;
            let lc = LayeredChannels {
                u1_card: lf.cards[0],
                w1_card: lf.cards[1],
                u2_card: lf.cards[2],
                w2_card: lf.cards[3],
                u1: lf.u1,
                w1: lf.w1,
                u2: lf.u2,
                w2: lf.w2,
            };
            let out = theorem4_evaluate(&prob, &common, &zc, &lc)?;
            let mut rendered = bounds_json(&out, units);
            rendered["common_part"] = json!({"k": common.k, "f": common.f, "g": common.g});
            println!("{rendered}");
        }
    }
    Ok(())
}

fn run_common_part(args: &CommonPartArgs) -> Result<(), CliError> {
    let pmf: PmfFile = load_json(&args.pmf, "pmf")?;
    if pmf.shape.len() != 2 {
        return Err(CliError::Usage(format!(
            "pmf shape must be [|Y1|,|Y2|], got {:?}",
            pmf.shape
        )));
    }
    let joint = JointPmf::new(pmf.shape, pmf.p)?;
    let cp = common_part(&joint)?;
    println!("{}", json!({"k": cp.k, "f": cp.f, "g": cp.g}));
    Ok(())
}

/// Parses a tolerance written as a number or as "<k>sigma".
fn parse_tol(s: &str) -> Result<f64, CliError> {
    let trimmed = s.trim();
    let body = trimmed.strip_suffix("sigma").unwrap_or(trimmed);
    body.trim()
        .parse::<f64>()
        .map_err(|_| CliError::Usage(format!("cannot parse tolerance '{s}'")))
}

fn run_validate(p: &Problem, args: &ValidateArgs) -> Result<(), CliError> {
    let tol = parse_tol(&args.tol)?;
    let params = Params::new(args.t11, args.t12, args.t21, args.t22)?;
    let report = validate(p, &params, args.n, args.seed, tol)?;
    println!("{VERSION_HEADER}");
    println!("name,status,expected,actual,tolerance,note");
    let mut counts = (0usize, 0usize, 0usize);
    for e in &report.entries {
        let status = match e.status {
            CheckStatus::Pass => {
                counts.0 += 1;
                "pass"
            }
            CheckStatus::Fail => {
                counts.1 += 1;
                "fail"
            }
            CheckStatus::Skipped => {
                counts.2 += 1;
                "skipped"
            }
        };
        println!(
            "{},{},{},{},{},{}",
            e.name,
            status,
            sig12(e.expected),
            sig12(e.actual),
            sig12(e.tolerance),
            e.note
        );
    }
    println!("# passed {} failed {} skipped {}", counts.0, counts.1, counts.2);
    if counts.1 > 0 {
        return Err(CliError::Compute(Error::InvalidProblem(format!(
            "{} validation rows failed",
            counts.1
        ))));
    }
    Ok(())
}

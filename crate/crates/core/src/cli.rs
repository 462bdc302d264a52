//! Command-line front end.
//!
//! Every subcommand prints to stdout, or with `--out PATH` writes `PATH` plus
//! a `PATH.manifest.json` sidecar holding everything needed to rerun it.
//! Exit codes: 0 success, 1 integrity or I/O failure, 2 usage error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use num_traits::Signed;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bitcore::BitString;
use crate::charfn::{eval_charfn, moments_via_jets};
use crate::cylinder::CylinderSolver;
use crate::error::{Error, Result};
use crate::exact::{format_rational, rational_to_f64, Rational};
use crate::measure::{build_rep, MeasureRep};
use crate::oracle::{brute_histogram, CountingWindow};
use crate::stochastic::{self, ExperimentConfig, ExperimentResult};
use crate::variance_formula::{variance_bounds_check, variance_closed_form, LReading};

#[derive(Parser, Debug)]
#[command(name = "digitdrift", version, about = "Exact and sampled laws of s2(n + a) - s2(n)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact distribution of the digit-sum difference for one a.
    Measure(MeasureArgs),
    /// Exact variance of one a, or the generic variance experiment.
    Variance(VarianceArgs),
    /// Exact moments from the characteristic-function jets.
    Moments(MomentsArgs),
    /// Characteristic function on a theta grid.
    Charfn(CharfnArgs),
    /// Suffix words whose cylinders make up {n : s2(n+a) - s2(n) = d}.
    Cylinders(CylinderArgs),
    /// Brute-force counts over n < 2^M next to the exact densities.
    Oracle(OracleArgs),
    /// Order-2 correlation of random sign sequences.
    Corr(SampleArgs),
    /// Renormalized moments of random a against normal moments.
    Clt(CltArgs),
    /// Exact CDF of random a against the normal CDF.
    Cdf(CdfArgs),
    /// Minimum of P(s2(n+a) >= s2(n)) over a range, or for random a.
    Cusick(CusickArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Measure(_) => "measure",
            Command::Variance(_) => "variance",
            Command::Moments(_) => "moments",
            Command::Charfn(_) => "charfn",
            Command::Cylinders(_) => "cylinders",
            Command::Oracle(_) => "oracle",
            Command::Corr(_) => "corr",
            Command::Clt(_) => "clt",
            Command::Cdf(_) => "cdf",
            Command::Cusick(_) => "cusick",
        }
    }

    fn parameters(&self) -> Value {
        let v = match self {
            Command::Measure(x) => serde_json::to_value(x),
            Command::Variance(x) => serde_json::to_value(x),
            Command::Moments(x) => serde_json::to_value(x),
            Command::Charfn(x) => serde_json::to_value(x),
            Command::Cylinders(x) => serde_json::to_value(x),
            Command::Oracle(x) => serde_json::to_value(x),
            Command::Corr(x) => serde_json::to_value(x),
            Command::Clt(x) => serde_json::to_value(x),
            Command::Cdf(x) => serde_json::to_value(x),
            Command::Cusick(x) => serde_json::to_value(x),
        };
        v.unwrap_or(Value::Null)
    }

    fn output(&self) -> &OutputArgs {
        match self {
            Command::Measure(x) => &x.output,
            Command::Variance(x) => &x.sample.output,
            Command::Moments(x) => &x.output,
            Command::Charfn(x) => &x.output,
            Command::Cylinders(x) => &x.output,
            Command::Oracle(x) => &x.output,
            Command::Corr(x) => &x.output,
            Command::Clt(x) => &x.sample.output,
            Command::Cdf(x) => &x.sample.output,
            Command::Cusick(x) => &x.sample.output,
        }
    }

    fn seed(&self) -> Option<u64> {
        match self {
            Command::Variance(x) if x.a.is_none() => Some(x.sample.seed),
            Command::Corr(x) => Some(x.seed),
            Command::Clt(x) => Some(x.sample.seed),
            Command::Cdf(x) => Some(x.sample.seed),
            Command::Cusick(x) if x.max_a.is_none() => Some(x.sample.seed),
            _ => None,
        }
    }
}

fn ser_display<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn ser_opt_display<S: serde::Serializer>(v: &Option<BigUint>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => ser_display(v, s),
        None => s.serialize_none(),
    }
}

#[derive(Args, Debug, Serialize)]
struct OutputArgs {
    /// Write output to PATH and a manifest to PATH.manifest.json.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Print exact values as floats.
    #[arg(long)]
    float: bool,
}

#[derive(Args, Debug, Serialize)]
struct MeasureArgs {
    #[arg(long)]
    #[serde(serialize_with = "ser_display")]
    a: BigUint,
    /// Offsets to tabulate (defaults to -8 ..= s2(a)).
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    window: Option<Vec<i64>>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
struct SampleArgs {
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Bit bias as NUM/DEN.
    #[arg(long, default_value = "1/2")]
    p: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of consecutive seeds starting at --seed.
    #[arg(long, default_value_t = 1)]
    seeds: usize,
    #[command(flatten)]
    output: OutputArgs,
}

impl SampleArgs {
    fn config(&self) -> Result<ExperimentConfig> {
        Ok(ExperimentConfig::new(self.seed, self.n).with_p(stochastic::parse_p(&self.p)?).with_samples(self.seeds))
    }
}

#[derive(Args, Debug, Serialize)]
struct VarianceArgs {
    /// Exact variance of this a; without it the seeded experiment runs.
    #[arg(long)]
    #[serde(serialize_with = "ser_opt_display")]
    a: Option<BigUint>,
    /// Print the four terms of the closed form.
    #[arg(long, requires = "a")]
    breakdown: bool,
    #[command(flatten)]
    sample: SampleArgs,
}

#[derive(Args, Debug, Serialize)]
struct MomentsArgs {
    #[arg(long)]
    #[serde(serialize_with = "ser_display")]
    a: BigUint,
    #[arg(long = "max-order", default_value_t = 6)]
    max_order: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
struct CharfnArgs {
    #[arg(long)]
    #[serde(serialize_with = "ser_display")]
    a: BigUint,
    /// Evaluate at STEPS evenly spaced thetas from LO to HI.
    #[arg(long, num_args = 3, value_names = ["LO", "HI", "STEPS"], allow_negative_numbers = true)]
    grid: Option<Vec<f64>>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
struct CylinderArgs {
    #[arg(long)]
    a: u64,
    #[arg(long, allow_negative_numbers = true)]
    d: i64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
struct OracleArgs {
    #[arg(long)]
    a: u64,
    /// Single offset; all observed offsets when omitted.
    #[arg(long, allow_negative_numbers = true)]
    d: Option<i64>,
    #[arg(long = "M", default_value_t = 20)]
    m: u32,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
struct CltArgs {
    #[arg(long = "max-order", default_value_t = 6)]
    max_order: usize,
    #[command(flatten)]
    sample: SampleArgs,
}

#[derive(Args, Debug, Serialize)]
struct CdfArgs {
    /// Normalized points x; the CDF is taken at x sqrt(n/2).
    #[arg(long, num_args = 3, value_names = ["LO", "HI", "STEPS"], allow_negative_numbers = true)]
    grid: Option<Vec<f64>>,
    #[command(flatten)]
    sample: SampleArgs,
}

#[derive(Args, Debug, Serialize)]
struct CusickArgs {
    /// Scan 1 <= a < MAX_A; without it random a are sampled.
    #[arg(long = "max-a")]
    max_a: Option<u64>,
    #[command(flatten)]
    sample: SampleArgs,
}

/// Rendered command output.
enum Rendered {
    Json(Value),
    Csv { header: Vec<String>, rows: Vec<Vec<String>> },
    Text(String),
}

impl Rendered {
    fn csv(header: &[&str], rows: Vec<Vec<String>>) -> Self {
        Rendered::Csv { header: header.iter().map(|s| s.to_string()).collect(), rows }
    }

    fn into_string(self) -> Result<String> {
        match self {
            Rendered::Json(v) => Ok(serde_json::to_string_pretty(&v).map_err(io_err)? + "\n"),
            Rendered::Text(s) => Ok(s),
            Rendered::Csv { header, rows } => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&header).map_err(io_err)?;
                for r in rows {
                    w.write_record(&r).map_err(io_err)?;
                }
                String::from_utf8(w.into_inner().map_err(io_err)?).map_err(io_err)
            }
        }
    }
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Consistency(format!("output failure: {e}"))
}

/// 17 significant digits.
fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_exact(q: &Rational, float: bool) -> String {
    if float {
        fmt_f64(rational_to_f64(q))
    } else {
        format_rational(q)
    }
}

fn exact_json(q: &Rational, float: bool) -> Value {
    if float {
        json!(rational_to_f64(q))
    } else {
        json!(format_rational(q))
    }
}

fn grid_points(grid: &Option<Vec<f64>>, default: (f64, f64, usize)) -> Result<Vec<f64>> {
    let (lo, hi, steps) = match grid.as_deref() {
        None => default,
        Some([lo, hi, steps]) => {
            if steps.fract() != 0.0 || *steps < 1.0 {
                return Err(Error::Parse(format!("grid STEPS must be a positive integer, got {steps}")));
            }
            (*lo, *hi, *steps as usize)
        }
        Some(_) => return Err(Error::Parse("grid needs LO HI STEPS".into())),
    };
    if steps == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..steps).map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64).collect())
}

fn experiment_rows(results: &[ExperimentResult]) -> Rendered {
    let rows = results
        .iter()
        .flat_map(|r| {
            let seed = r.metadata.config.seed;
            r.rows.iter().map(move |row| {
                vec![
                    seed.to_string(),
                    row.n.to_string(),
                    row.statistic.clone(),
                    fmt_f64(row.value),
                    fmt_f64(row.target),
                    fmt_f64(row.deviation),
                ]
            })
        })
        .collect();
    Rendered::csv(&["seed", "n", "statistic", "value", "target", "deviation"], rows)
}

fn cmd_measure(args: &MeasureArgs) -> Result<Rendered> {
    let a = BitString::from_biguint(args.a.clone());
    let rep: MeasureRep = build_rep(&a);
    let (lo, hi) = match args.window.as_deref() {
        Some([lo, hi]) => (*lo, *hi),
        _ => (-8, a.s2() as i64),
    };
    if lo > hi {
        return Err(Error::Parse(format!("empty window {lo}..{hi}")));
    }
    let values: serde_json::Map<String, Value> =
        (lo..=hi).map(|d| (d.to_string(), exact_json(&rep.evaluate_q(d), args.output.float))).collect();
    Ok(Rendered::Json(json!({
        "a": args.a.to_string(),
        "values": values,
        "rep": rep.to_json(),
        "l2_norm_squared": exact_json(&rep.l2_norm_squared(), args.output.float),
        "cusick_c": exact_json(&rep.cusick_c().to_rational(), args.output.float),
    })))
}

fn cmd_variance(args: &VarianceArgs) -> Result<Rendered> {
    let float = args.sample.output.float;
    let Some(a) = &args.a else {
        let config = args.sample.config()?;
        return Ok(experiment_rows(&stochastic::run_seeds(&config, stochastic::generic_variance_experiment)?));
    };
    let a = BitString::from_biguint(a.clone());
    let v = variance_closed_form(&a)?;
    let bounds = variance_bounds_check(&a)?;
    let mut out = json!({
        "a": a.value().to_string(),
        "total": exact_json(&v.total, float),
        "bounds": {
            "l_reading": LReading::OneBlocks,
            "lower": bounds.lower,
            "upper": bounds.upper,
            "ok": bounds.ok,
        },
    });
    if args.breakdown {
        out["breakdown"] = json!({
            "leading": exact_json(&v.leading, float),
            "tail": exact_json(&v.tail, float),
            "correlation_sum": exact_json(&v.correlation_sum, float),
            "boundary_sum": exact_json(&v.boundary_sum, float),
        });
    }
    Ok(Rendered::Json(out))
}

fn cmd_moments(args: &MomentsArgs) -> Result<Rendered> {
    let a = BitString::from_biguint(args.a.clone());
    let rows = moments_via_jets(&a, args.max_order)?
        .iter()
        .enumerate()
        .map(|(k, m)| vec![k.to_string(), fmt_exact(m, args.output.float)])
        .collect();
    Ok(Rendered::csv(&["k", "m_k"], rows))
}

fn cmd_charfn(args: &CharfnArgs) -> Result<Rendered> {
    let a = BitString::from_biguint(args.a.clone());
    let rows = grid_points(&args.grid, (0.0, std::f64::consts::TAU, 64))?
        .into_iter()
        .map(|theta| {
            let z = eval_charfn(&a, theta);
            vec![fmt_f64(theta), fmt_f64(z.re), fmt_f64(z.im)]
        })
        .collect();
    Ok(Rendered::csv(&["theta", "re", "im"], rows))
}

fn cmd_cylinders(args: &CylinderArgs) -> Result<Rendered> {
    let ws = CylinderSolver::new().solve(args.a, args.d);
    let density = ws.density()?;
    let mut text = String::new();
    for w in &ws.words {
        let _ = writeln!(text, "{w}");
    }
    let _ = writeln!(text, "density {}", fmt_exact(&density, args.output.float));
    Ok(Rendered::Text(text))
}

fn cmd_oracle(args: &OracleArgs) -> Result<Rendered> {
    let window = CountingWindow::new(args.m)?;
    let hist = brute_histogram(args.a, window);
    let rep = crate::measure::build_measure_u64(args.a);
    let offsets: Vec<i64> = match args.d {
        Some(d) => vec![d],
        None => hist.keys().copied().collect(),
    };
    let denom = Rational::from_integer(window.size().into());
    let rows = offsets
        .into_iter()
        .map(|d| {
            let brute = Rational::from_integer(hist.get(&d).copied().unwrap_or(0).into()) / &denom;
            let exact = rep.evaluate_q(d);
            let err = (&brute - &exact).abs();
            vec![
                d.to_string(),
                fmt_exact(&brute, args.output.float),
                fmt_exact(&exact, args.output.float),
                fmt_exact(&err, args.output.float),
            ]
        })
        .collect();
    Ok(Rendered::csv(&["d", "brute", "exact", "abs_error"], rows))
}

fn cmd_corr(args: &SampleArgs) -> Result<Rendered> {
    Ok(experiment_rows(&stochastic::run_seeds(&args.config()?, stochastic::correlation_experiment)?))
}

fn cmd_clt(args: &CltArgs) -> Result<Rendered> {
    let config = args.sample.config()?.with_max_moment_order(args.max_order);
    Ok(experiment_rows(&stochastic::run_seeds(&config, stochastic::clt_moments_experiment)?))
}

fn cmd_cdf(args: &CdfArgs) -> Result<Rendered> {
    let grid = grid_points(&args.grid, (-4.0, 4.0, 41))?;
    let config = args.sample.config()?;
    Ok(experiment_rows(&stochastic::run_seeds(&config, |c| stochastic::cdf_experiment(c, &grid))?))
}

fn cmd_cusick(args: &CusickArgs) -> Result<Rendered> {
    let float = args.sample.output.float;
    if let Some(max_a) = args.max_a {
        let (c, a) = stochastic::cusick_scan(max_a)?;
        return Ok(Rendered::Json(json!({ "max_a": max_a, "min_c": exact_json(&c, float), "argmin": a })));
    }
    let config = args.sample.config()?;
    let results = stochastic::run_seeds(&config, |c| stochastic::cusick_random_experiment(c).map(|(_, r)| r))?;
    Ok(experiment_rows(&results))
}

#[derive(Serialize)]
struct RunManifest<'a> {
    subcommand: &'a str,
    parameters: Value,
    seed: Option<u64>,
    version: &'a str,
    outputs: Vec<String>,
    started_unix_s: u64,
    wall_clock_ms: u128,
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn execute(command: &Command) -> Result<()> {
    let started = Instant::now();
    let started_unix_s = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let rendered = match command {
        Command::Measure(x) => cmd_measure(x),
        Command::Variance(x) => cmd_variance(x),
        Command::Moments(x) => cmd_moments(x),
        Command::Charfn(x) => cmd_charfn(x),
        Command::Cylinders(x) => cmd_cylinders(x),
        Command::Oracle(x) => cmd_oracle(x),
        Command::Corr(x) => cmd_corr(x),
        Command::Clt(x) => cmd_clt(x),
        Command::Cdf(x) => cmd_cdf(x),
        Command::Cusick(x) => cmd_cusick(x),
    }?;
    let text = rendered.into_string()?;
    match &command.output().out {
        None => print!("{text}"),
        Some(path) => {
            std::fs::write(path, &text).map_err(io_err)?;
            let manifest = RunManifest {
                subcommand: command.name(),
                parameters: command.parameters(),
                seed: command.seed(),
                version: env!("CARGO_PKG_VERSION"),
                outputs: vec![path.display().to_string()],
                started_unix_s,
                wall_clock_ms: started.elapsed().as_millis(),
            };
            let json = serde_json::to_string_pretty(&manifest).map_err(io_err)? + "\n";
            std::fs::write(manifest_path(path), json).map_err(io_err)?;
        }
    }
    Ok(())
}

fn configure_threads() {
    if let Some(n) = std::env::var("DIGITDRIFT_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain(_) | Error::Parse(_) => 2,
        Error::SuffixComparable { .. } | Error::Consistency(_) => 1,
    }
}

/// Parses `argv` (program name first), runs the subcommand, returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    configure_threads();
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("digitdrift {}: {e}", cli.command.name());
            exit_code(&e)
        }
    }
}

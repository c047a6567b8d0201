//! Command-line front end.
//!
//! Every subcommand writes CSV (a `# config:` line, a header and data rows)
//! or a JSON object holding the resolved configuration and the same rows.
//! Exit codes: 0 success, 2 usage error, 3 numeric-guard violation.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::kernels::{
    bessel_kernel, contour_kernel_oracle, edge_cutoff, sine_kernel, BesselKernel, ContourGrid,
};
use crate::partitions::{
    descent_window, dimension, enumerate_partitions_capped, plancherel_prob, Partition, DEFAULT_ENUMERATION_CAP,
};
use crate::sampling::{self, clt_report, mc_linear_statistic, CltMode, CltSource, McReport, RngSeed};
use crate::variance::{
    corner_variance_density, log_variance_sweep, pattern_variance_density, poissonized_variance_with,
    predicted_log_variance, PatternSpec,
};

/// Environment variable capping the worker thread count (0 = automatic).
pub const THREADS_ENV: &str = "PLANCHLAB_THREADS";

/// Shortest decimal representation that parses back to the same double.
pub fn format_float(x: f64) -> String {
    format!("{x:?}")
}

#[derive(Debug, Parser)]
#[command(name = "planchlab", version, about = "Descent statistics of Plancherel-random partitions")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List all partitions of n with dimension and Plancherel probability.
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap: usize,
    },
    /// Draw Plancherel-random partitions.
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        samples: u64,
        #[arg(long)]
        seed: u64,
    },
    /// Descent indicators of a partition on [from, to].
    #[command(allow_negative_numbers = true)]
    Descents {
        /// Parts separated by commas, e.g. 4,2,1 ("-" for the empty partition).
        #[arg(long)]
        partition: String,
        #[arg(long)]
        from: i64,
        #[arg(long)]
        to: i64,
    },
    /// Evaluate a correlation kernel.
    Kernel {
        #[command(subcommand)]
        kind: KernelCommand,
    },
    /// Variance of the descent count on an interval.
    Variance {
        #[command(subcommand)]
        kind: VarianceCommand,
    },
    /// Linear variance densities of local patterns under the sine process.
    Pattern {
        #[command(subcommand)]
        kind: PatternCommand,
    },
    /// Normality diagnostics of a count over a window.
    #[command(allow_negative_numbers = true)]
    Clt(CltArgs),
}

#[derive(Debug, Subcommand)]
enum KernelCommand {
    /// Discrete sine kernel sin(φd)/(πd).
    #[command(allow_negative_numbers = true)]
    Sine {
        #[arg(long)]
        d: i64,
        #[arg(long)]
        phi: f64,
    },
    /// Discrete Bessel kernel by recurrence.
    #[command(allow_negative_numbers = true)]
    Bessel {
        #[arg(long)]
        x: i64,
        #[arg(long)]
        y: i64,
        #[arg(long)]
        theta: f64,
    },
    /// Discrete Bessel kernel by contour quadrature, next to the recurrence value.
    #[command(allow_negative_numbers = true)]
    Contour {
        #[arg(long)]
        x: i64,
        #[arg(long)]
        y: i64,
        #[arg(long)]
        theta: f64,
        #[arg(long, default_value_t = 0.8)]
        inner_radius: f64,
        #[arg(long, default_value_t = 1.25)]
        outer_radius: f64,
        #[arg(long, default_value_t = 256)]
        nodes: usize,
    },
}

#[derive(Debug, Subcommand)]
enum VarianceCommand {
    /// Exact poissonized variance; with --sweep, on centered intervals.
    #[command(allow_negative_numbers = true)]
    Poisson {
        #[arg(long)]
        theta: f64,
        #[arg(long, required_unless_present = "sweep")]
        a: Option<i64>,
        #[arg(long, required_unless_present = "sweep")]
        b: Option<i64>,
        /// Interval lengths, comma separated.
        #[arg(long, value_delimiter = ',', conflicts_with_all = ["a", "b"])]
        sweep: Option<Vec<u64>>,
    },
    /// Monte-Carlo variance of a pattern count over Plancherel samples.
    #[command(allow_negative_numbers = true)]
    Mc {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        a: i64,
        #[arg(long)]
        b: i64,
        /// Offsets, comma separated.
        #[arg(long, default_value = "0")]
        pattern: String,
        #[arg(long)]
        samples: u64,
        #[arg(long)]
        seed: u64,
    },
}

#[derive(Debug, Subcommand)]
enum PatternCommand {
    /// Σ_d Cov(c_{0+x}, c_{d+x}) truncated at |d| ≤ tail.
    Density {
        #[arg(long)]
        pattern: String,
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
        phi: f64,
        #[arg(long, default_value_t = 1_000_000)]
        tail: i64,
    },
    /// The same density for the corner count Σ (c_i − c_i c_{i+1}).
    Corners {
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
        phi: f64,
        #[arg(long, default_value_t = 1_000_000)]
        tail: i64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Corners,
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SourceArg {
    Plancherel,
    Sine,
}

#[derive(Debug, Args)]
struct CltArgs {
    #[arg(long, value_enum)]
    mode: ModeArg,
    #[arg(long, value_enum, default_value_t = SourceArg::Plancherel)]
    source: SourceArg,
    /// Diagram size (Plancherel source).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    a: i64,
    #[arg(long)]
    b: i64,
    #[arg(long)]
    samples: u64,
    #[arg(long)]
    seed: u64,
    /// Sine-kernel angle (sine source).
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
    phi: f64,
}

/// The resolved parameters of one invocation, echoed into every output.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ExperimentConfig {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interval: Option<[i64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pattern: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lengths: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extra: Option<Map<String, Value>>,
    pub format: String,
    pub output: String,
}

/// Column-oriented result of a command.
struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

enum Cell {
    Int(i128),
    Float(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Text(s) if s.contains([',', '"']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Float(v) => serde_json::Number::from_f64(*v).map(Value::Number).unwrap_or(Value::Null),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v as i128)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i128)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i128)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Float)
    }
}

fn render(config: &ExperimentConfig, table: &Table, format: Format) -> String {
    let config_json = serde_json::to_string(config).expect("config serializes");
    match format {
        Format::Csv => {
            let mut out = format!("# config: {config_json}\n{}\n", table.header.join(","));
            for row in &table.rows {
                let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> =
                        table.header.iter().zip(row).map(|(h, c)| (h.to_string(), c.json())).collect();
                    Value::Object(obj)
                })
                .collect();
            let doc = json!({ "config": serde_json::to_value(config).expect("config serializes"), "rows": rows });
            let mut s = serde_json::to_string_pretty(&doc).expect("json");
            s.push('\n');
            s
        }
    }
}

fn parse_pattern(s: &str) -> Result<PatternSpec> {
    let offsets = s
        .split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|_| Error::InvalidPattern(format!("bad offset {t:?}"))))
        .collect::<Result<Vec<_>>>()?;
    PatternSpec::new(&offsets)
}

fn extra(pairs: &[(&str, Value)]) -> Option<Map<String, Value>> {
    Some(pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect())
}

fn execute(command: Command, config: &mut ExperimentConfig) -> Result<Table> {
    match command {
        Command::Enumerate { n, cap } => {
            config.command = "enumerate".into();
            config.n = Some(n);
            config.extra = extra(&[("cap", json!(cap))]);
            let rows = enumerate_partitions_capped(n, cap)?
                .iter()
                .map(|lambda| {
                    let p = plancherel_prob(lambda);
                    vec![
                        Cell::Text(lambda.to_string()),
                        Cell::Text(dimension(lambda).to_string()),
                        Cell::Float(p.to_f64()),
                        Cell::Text(p.to_string()),
                    ]
                })
                .collect();
            Ok(Table { header: vec!["partition", "dim", "prob", "prob_exact"], rows })
        }
        Command::Sample { n, samples, seed } => {
            config.command = "sample".into();
            config.n = Some(n);
            config.samples = Some(samples);
            config.seed = Some(seed);
            let shapes = sampling::parallel_samples(RngSeed(seed), samples, |_, rng| sampling::sample_plancherel(n, rng));
            let rows = shapes
                .iter()
                .enumerate()
                .map(|(i, lambda)| {
                    vec![
                        Cell::from(i),
                        Cell::from(lambda.size()),
                        Cell::from(lambda.first_row()),
                        Cell::from(lambda.rows()),
                        Cell::Text(lambda.to_string()),
                    ]
                })
                .collect();
            Ok(Table { header: vec!["index", "size", "first_row", "rows", "partition"], rows })
        }
        Command::Descents { partition, from, to } => {
            config.command = "descents".into();
            config.interval = Some([from, to]);
            let lambda: Partition = partition.parse()?;
            config.extra = extra(&[("partition", json!(lambda.to_string()))]);
            let w = descent_window(&lambda, from, to)?;
            let rows = (from..=to)
                .map(|k| vec![Cell::from(k), Cell::from(w.get(k).expect("inside window") as u64)])
                .collect();
            Ok(Table { header: vec!["k", "c"], rows })
        }
        Command::Kernel { kind } => kernel(kind, config),
        Command::Variance { kind } => variance(kind, config),
        Command::Pattern { kind } => pattern(kind, config),
        Command::Clt(args) => clt(args, config),
    }
}

fn kernel(kind: KernelCommand, config: &mut ExperimentConfig) -> Result<Table> {
    match kind {
        KernelCommand::Sine { d, phi } => {
            config.command = "kernel sine".into();
            config.phi = Some(phi);
            config.extra = extra(&[("d", json!(d))]);
            if !(0.0..=std::f64::consts::PI).contains(&phi) {
                return Err(Error::InvalidArgument(format!("phi must lie in [0, π], got {phi}")));
            }
            Ok(Table { header: vec!["d", "phi", "value"], rows: vec![vec![d.into(), phi.into(), sine_kernel(d, phi).into()]] })
        }
        KernelCommand::Bessel { x, y, theta } => {
            config.command = "kernel bessel".into();
            config.theta = Some(theta);
            config.extra = extra(&[("x", json!(x)), ("y", json!(y))]);
            let k = BesselKernel::new(theta)?;
            let v = bessel_kernel(x, y, theta, k.table())?;
            Ok(Table { header: vec!["x", "y", "theta", "value"], rows: vec![vec![x.into(), y.into(), theta.into(), v.into()]] })
        }
        KernelCommand::Contour { x, y, theta, inner_radius, outer_radius, nodes } => {
            config.command = "kernel contour".into();
            config.theta = Some(theta);
            config.extra = extra(&[
                ("x", json!(x)),
                ("y", json!(y)),
                ("inner_radius", json!(inner_radius)),
                ("outer_radius", json!(outer_radius)),
                ("nodes", json!(nodes)),
            ]);
            let grid = ContourGrid::new(inner_radius, outer_radius, nodes)?;
            let quad = contour_kernel_oracle(x, y, theta, &grid)?;
            let k = BesselKernel::new(theta)?;
            let rec = bessel_kernel(x, y, theta, k.table())?;
            Ok(Table {
                header: vec!["x", "y", "theta", "value", "recurrence", "abs_diff"],
                rows: vec![vec![x.into(), y.into(), theta.into(), quad.into(), rec.into(), (quad - rec).abs().into()]],
            })
        }
    }
}

fn variance(kind: VarianceCommand, config: &mut ExperimentConfig) -> Result<Table> {
    match kind {
        VarianceCommand::Poisson { theta, a, b, sweep } => {
            config.command = "variance poisson".into();
            config.theta = Some(theta);
            if !(theta > 0.0) {
                return Err(Error::InvalidArgument(format!("theta must be positive, got {theta}")));
            }
            let header = vec!["theta", "a", "b", "L", "var_io", "var_trace", "predicted", "ratio", "truncation_bound"];
            if let Some(lengths) = sweep {
                config.lengths = Some(lengths.clone());
                eprintln!("sweeping {} lengths at theta = {theta}", lengths.len());
                let s = log_variance_sweep(theta, &lengths)?;
                let mut header = header;
                header.push("slope");
                let rows = s
                    .rows
                    .iter()
                    .map(|r| {
                        let v = &r.breakdown;
                        vec![
                            theta.into(),
                            v.a.into(),
                            v.b.into(),
                            r.length.into(),
                            v.value_inside_outside.into(),
                            v.value_trace_form.into(),
                            r.predicted.into(),
                            (v.value_inside_outside / r.predicted).into(),
                            v.truncation_bound.into(),
                            s.slope.into(),
                        ]
                    })
                    .collect();
                return Ok(Table { header, rows });
            }
            let (a, b) = (a.expect("required by clap"), b.expect("required by clap"));
            config.interval = Some([a, b]);
            let cutoff = edge_cutoff(theta);
            if a > b {
                return Err(Error::EmptyRange { a, b });
            }
            if a < -cutoff || b > cutoff {
                return Err(Error::IntervalBeyondEdge { a, b, cutoff });
            }
            let v = poissonized_variance_with(&BesselKernel::new(theta)?, a, b)?;
            let length = (b - a + 1) as u64;
            let predicted = predicted_log_variance(length).ok();
            Ok(Table {
                header,
                rows: vec![vec![
                    theta.into(),
                    a.into(),
                    b.into(),
                    length.into(),
                    v.value_inside_outside.into(),
                    v.value_trace_form.into(),
                    predicted.into(),
                    predicted.map(|p| v.value_inside_outside / p).into(),
                    v.truncation_bound.into(),
                ]],
            })
        }
        VarianceCommand::Mc { n, a, b, pattern, samples, seed } => {
            config.command = "variance mc".into();
            config.n = Some(n);
            config.interval = Some([a, b]);
            config.samples = Some(samples);
            config.seed = Some(seed);
            let p = parse_pattern(&pattern)?;
            config.pattern = Some(p.offsets().to_vec());
            let r = mc_linear_statistic(n, a, b, &p, samples, RngSeed(seed))?;
            let mut header = vec!["n", "a", "b", "pattern"];
            header.extend(McReport::CSV_HEADER.split(','));
            let rows = vec![vec![
                n.into(),
                a.into(),
                b.into(),
                Cell::Text(p.to_string()),
                r.n_samples.into(),
                r.seed.0.into(),
                r.mean.into(),
                r.variance.into(),
                r.std_error_of_variance.into(),
                r.skewness.into(),
                r.excess_kurtosis.into(),
            ]];
            Ok(Table { header, rows })
        }
    }
}

fn pattern(kind: PatternCommand, config: &mut ExperimentConfig) -> Result<Table> {
    let (label, phi, tail, est) = match kind {
        PatternCommand::Density { pattern, phi, tail } => {
            config.command = "pattern density".into();
            let p = parse_pattern(&pattern)?;
            config.pattern = Some(p.offsets().to_vec());
            config.phi = Some(phi);
            config.extra = extra(&[("tail", json!(tail))]);
            (p.to_string(), phi, tail, pattern_variance_density(&p, phi, tail)?)
        }
        PatternCommand::Corners { phi, tail } => {
            config.command = "pattern corners".into();
            config.phi = Some(phi);
            config.extra = extra(&[("tail", json!(tail))]);
            ("corners".to_string(), phi, tail, corner_variance_density(phi, tail)?)
        }
    };
    Ok(Table {
        header: vec!["pattern", "phi", "tail", "density", "remainder_bound"],
        rows: vec![vec![Cell::Text(label), phi.into(), tail.into(), est.value.into(), est.remainder_bound.into()]],
    })
}

fn clt(args: CltArgs, config: &mut ExperimentConfig) -> Result<Table> {
    let mode = match args.mode {
        ModeArg::Corners => CltMode::Corners,
        ModeArg::Plain => CltMode::Plain,
    };
    config.command = "clt".into();
    config.interval = Some([args.a, args.b]);
    config.samples = Some(args.samples);
    config.seed = Some(args.seed);
    let source = match args.source {
        SourceArg::Plancherel => {
            let n = args
                .n
                .ok_or_else(|| Error::InvalidArgument("--n is required with the plancherel source".into()))?;
            config.n = Some(n);
            CltSource::Plancherel { n }
        }
        SourceArg::Sine => {
            config.phi = Some(args.phi);
            CltSource::Sine { phi: args.phi }
        }
    };
    let source_name = match args.source {
        SourceArg::Plancherel => "plancherel",
        SourceArg::Sine => "sine",
    };
    let mode_name = match mode {
        CltMode::Corners => "corners",
        CltMode::Plain => "plain",
    };
    config.extra = extra(&[("mode", json!(mode_name)), ("source", json!(source_name))]);
    let r = clt_report(source, mode, args.a, args.b, args.samples, RngSeed(args.seed))?;
    Ok(Table {
        header: vec![
            "source",
            "mode",
            "n_samples",
            "mean",
            "variance",
            "skewness",
            "excess_kurtosis",
            "ks_statistic",
            "ks_statistic_lattice",
            "predicted_variance",
        ],
        rows: vec![vec![
            Cell::Text(source_name.into()),
            Cell::Text(mode_name.into()),
            r.n_samples.into(),
            r.mean.into(),
            r.variance.into(),
            r.skewness.into(),
            r.excess_kurtosis.into(),
            r.ks_statistic.into(),
            r.ks_statistic_lattice.into(),
            r.predicted_variance.into(),
        ]],
    })
}

fn thread_count() -> std::result::Result<usize, String> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(0),
        Ok(s) if s.trim().is_empty() => Ok(0),
        Ok(s) => s.trim().parse().map_err(|_| format!("{THREADS_ENV} must be a nonnegative integer, got {s:?}")),
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let text = e.to_string();
            let line = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("invalid arguments");
            eprintln!("{line}");
            return 2;
        }
    };
    let threads = match thread_count() {
        Ok(t) => t,
        Err(msg) => {
            eprintln!("error: {msg}");
            return 2;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker threads: {e}");
            return 1;
        }
    };

    let mut config = ExperimentConfig {
        format: match cli.format {
            Format::Csv => "csv".into(),
            Format::Json => "json".into(),
        },
        output: cli.output.as_ref().map_or_else(|| "-".to_string(), |p| p.display().to_string()),
        ..Default::default()
    };
    let result = pool.install(|| execute(cli.command, &mut config));
    let table = match result {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return if e.is_numeric_guard() { 3 } else { 2 };
        }
    };
    let text = render(&config, &table, cli.format);
    let written = match &cli.output {
        Some(path) => std::fs::write(path, text.as_bytes()),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return 1;
    }
    0
}

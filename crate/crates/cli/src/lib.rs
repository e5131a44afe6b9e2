//! Command-line harness: parameter sweeps, `m̄` optimization, charts and
//! numerical checks on top of `d2d-coverage`.

pub mod chart;
pub mod checks;
pub mod config;
pub mod error;
pub mod optimize;
pub mod sweep;

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use d2d_coverage::geometry::ContentStrategy;
use d2d_coverage::metrics::CoverageOptions;

use chart::Metric;
use config::{ExperimentSpec, Method, SimConfig, SweepAxis};
use error::{exit, CliError, Result};

#[derive(Debug, Parser)]
#[command(
    name = "d2dcov",
    version,
    about = "Coverage probability and ASE of clustered D2D networks"
)]
pub struct Cli {
    /// Log more (-v info, -vv debug).
    #[arg(short, long, action = ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate coverage and ASE along a sweep and write a CSV.
    Sweep(ExperimentArgs),
    /// Find the ASE-maximizing m̄ at each sweep value.
    Optimize {
        #[command(flatten)]
        exp: ExperimentArgs,
        /// Largest m̄ searched (default M).
        #[arg(long)]
        m_bar_max: Option<usize>,
    },
    /// Draw an SVG line chart from a sweep CSV.
    Chart {
        input: PathBuf,
        /// Output file (default: input with an .svg extension).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = MetricArg::Coverage)]
        metric: MetricArg,
        #[arg(long)]
        title: Option<String>,
    },
    /// Compare simulated distance distributions with the analytical ones.
    Validate {
        #[command(flatten)]
        exp: ExperimentArgs,
        /// Samples per conditioning bin.
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        /// Largest acceptable KS distance.
        #[arg(long, default_value_t = 0.02)]
        max_ks: f64,
    },
    /// Check normalization, transform shape and bound ordering.
    Selftest(ExperimentArgs),
    /// Print the effective experiment configuration as TOML.
    Config(ExperimentArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MetricArg {
    Coverage,
    Ase,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StrategyArg {
    Uniform,
    KClosest,
}

fn bare_message(e: CliError) -> String {
    match e {
        CliError::Usage(m) => m,
        e => e.to_string(),
    }
}

fn parse_method(s: &str) -> std::result::Result<Method, String> {
    s.parse().map_err(bare_message)
}

fn parse_axis(s: &str) -> std::result::Result<SweepAxis, String> {
    s.parse().map_err(bare_message)
}

/// Experiment selection shared by the computing subcommands. Flags override
/// the config file, which overrides the built-in defaults.
#[derive(Debug, Clone, Default, Args)]
struct ExperimentArgs {
    /// TOML experiment file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated methods: exact, approx, approx-2, closed-form, monte-carlo.
    #[arg(long, value_delimiter = ',', value_parser = parse_method)]
    method: Vec<Method>,
    /// Sweep axis: m_bar, beta, k, sigma or lambda_c.
    #[arg(long, value_parser = parse_axis)]
    axis: Option<SweepAxis>,
    /// Comma-separated sweep values.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    values: Vec<f64>,
    #[arg(long, value_enum)]
    strategy: Option<StrategyArg>,
    /// Content rank for the k-closest strategy; implies it.
    #[arg(long)]
    k: Option<usize>,
    /// Cluster density in clusters/km².
    #[arg(long, allow_negative_numbers = true)]
    lambda_c: Option<f64>,
    /// Scattering standard deviation in meters.
    #[arg(long, allow_negative_numbers = true)]
    sigma: Option<f64>,
    /// Devices per cluster N.
    #[arg(long)]
    devices: Option<usize>,
    /// Maximum simultaneous transmitters per cluster M.
    #[arg(long)]
    max_transmitters: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    m_bar: Option<f64>,
    /// Path-loss exponent.
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// SIR threshold in dB.
    #[arg(long, allow_negative_numbers = true)]
    beta_db: Option<f64>,
    /// Monte Carlo seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo trials.
    #[arg(long)]
    trials: Option<u64>,
    /// Simulation window half-side in meters.
    #[arg(long)]
    region_half_side: Option<f64>,
    /// Coarser quadrature tolerances.
    #[arg(long)]
    fast: bool,
}

impl ExperimentArgs {
    fn spec(&self) -> Result<ExperimentSpec> {
        let mut spec = match &self.config {
            Some(path) => ExperimentSpec::load(path)?,
            None => ExperimentSpec::default(),
        };
        let p = &mut spec.params;
        if let Some(v) = self.lambda_c {
            p.lambda_c = v;
        }
        if let Some(v) = self.sigma {
            p.sigma = v;
        }
        if let Some(v) = self.devices {
            p.devices_per_cluster = v;
        }
        if let Some(v) = self.max_transmitters {
            p.max_transmitters = v;
        }
        if let Some(v) = self.m_bar {
            p.m_bar = v;
        }
        if let Some(v) = self.alpha {
            p.alpha = v;
        }
        if let Some(v) = self.beta_db {
            p.beta_db = v;
        }
        match (self.strategy, self.k) {
            (Some(StrategyArg::Uniform), Some(_)) => {
                return Err(CliError::usage("--k needs the k-closest strategy"));
            }
            (Some(StrategyArg::Uniform), None) => spec.strategy = ContentStrategy::Uniform,
            (_, Some(k)) => spec.strategy = ContentStrategy::KClosest { k },
            (Some(StrategyArg::KClosest), None) => {
                if spec.strategy == ContentStrategy::Uniform {
                    spec.strategy = ContentStrategy::KClosest { k: 1 };
                }
            }
            (None, None) => {}
        }
        if let Some(axis) = self.axis {
            spec.sweep.axis = axis;
        }
        if !self.values.is_empty() {
            spec.sweep.values = self.values.clone();
        }
        if !self.method.is_empty() {
            spec.methods = self.method.clone();
        }
        if self.seed.is_some() || self.trials.is_some() || self.region_half_side.is_some() {
            let sim = spec.sim.get_or_insert_with(SimConfig::default);
            if let Some(v) = self.seed {
                sim.seed = v;
            }
            if let Some(v) = self.trials {
                sim.trials = v;
            }
            if let Some(v) = self.region_half_side {
                sim.region_half_side = Some(v);
            }
        }
        if let Some(out) = &self.out {
            spec.output = out.clone();
        }
        Ok(spec)
    }

    fn options(&self) -> CoverageOptions<f64> {
        if self.fast {
            CoverageOptions::fast()
        } else {
            CoverageOptions::default()
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))
}

fn cmd_sweep(args: &ExperimentArgs) -> Result<i32> {
    let spec = args.spec()?;
    let rows = sweep::run_sweep(&spec, &args.options())?;
    sweep::write_csv(&rows, create(&spec.output)?)?;
    println!(
        "{:<12} {:<20} {:>10} {:>14} {:>10}",
        spec.sweep.axis, "method", "coverage", "ASE", "±CI"
    );
    for r in &rows {
        match (r.coverage(), r.ase()) {
            (Some(c), Some(a)) => {
                let ci = r
                    .ci_half_width()
                    .map_or(String::new(), |c| format!("{c:.4}"));
                println!(
                    "{:<12} {:<20} {c:>10.6} {a:>14.6e} {ci:>10}",
                    r.sweep_value, r.method
                );
            }
            _ => {
                if let sweep::RowOutcome::Failed { code } = &r.outcome {
                    println!("{:<12} {:<20} {code:>10}", r.sweep_value, r.method);
                }
            }
        }
    }
    let failed = rows.iter().filter(|r| r.is_failure()).count();
    eprintln!("wrote {} rows to {}", rows.len(), spec.output.display());
    if failed > 0 {
        eprintln!("{failed} rows failed");
        return Ok(exit::NUMERICAL);
    }
    Ok(exit::SUCCESS)
}

fn cmd_optimize(args: &ExperimentArgs, m_bar_max: Option<usize>) -> Result<i32> {
    let spec = args.spec()?;
    let report = optimize::run_optimize(&spec, &args.options(), m_bar_max)?;
    print!("{}", report.text());
    if let Some(out) = &args.out {
        report.write_csv(create(out)?)?;
        eprintln!("wrote {}", out.display());
    }
    Ok(exit::SUCCESS)
}

fn cmd_chart(
    input: &Path,
    out: Option<&Path>,
    metric: MetricArg,
    title: Option<&str>,
) -> Result<i32> {
    let file = File::open(input)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", input.display())))?;
    let rows = sweep::read_csv(BufReader::new(file))?;
    let metric = match metric {
        MetricArg::Coverage => Metric::Coverage,
        MetricArg::Ase => Metric::Ase,
    };
    let default_title = input
        .file_stem()
        .map_or(String::new(), |s| s.to_string_lossy().into_owned());
    let svg = chart::render(&rows, metric, title.unwrap_or(&default_title))?;
    let out = out.map_or_else(|| input.with_extension("svg"), Path::to_path_buf);
    let mut w = create(&out)?;
    w.write_all(svg.as_bytes())?;
    w.flush()?;
    eprintln!("wrote {}", out.display());
    Ok(exit::SUCCESS)
}

fn cmd_validate(args: &ExperimentArgs, samples: usize, max_ks: f64) -> Result<i32> {
    let spec = args.spec()?;
    let params = spec.params.to_params();
    let sim = spec
        .sim
        .unwrap_or_default()
        .to_simulation(&params, spec.strategy);
    let rows = checks::validate(&params, &sim, samples, max_ks)?;
    print!("{}", checks::validation_report(&rows, max_ks));
    if let Some(out) = &args.out {
        let mut w = csv::Writer::from_writer(create(out)?);
        w.write_record(["distribution", "bin_lo", "bin_hi", "samples", "ks", "pass"])?;
        for (r, pass) in &rows {
            let (lo, hi) = r.bin.map_or((String::new(), String::new()), |(a, b)| {
                (a.to_string(), b.to_string())
            });
            let ks = r.ks.map_or(String::new(), |d| d.to_string());
            w.write_record([
                r.distribution.clone(),
                lo,
                hi,
                r.samples.to_string(),
                ks,
                pass.to_string(),
            ])?;
        }
        w.flush()?;
    }
    Ok(if rows.iter().all(|(_, pass)| *pass) {
        exit::SUCCESS
    } else {
        exit::NUMERICAL
    })
}

fn cmd_selftest(args: &ExperimentArgs) -> Result<i32> {
    let spec = args.spec()?;
    let results = checks::selftest(&spec.params.to_params())?;
    print!("{}", checks::report(&results));
    Ok(if checks::all_pass(&results) {
        exit::SUCCESS
    } else {
        exit::NUMERICAL
    })
}

fn cmd_config(args: &ExperimentArgs) -> Result<i32> {
    let spec = args.spec()?;
    spec.validate()?;
    print!("{}", spec.to_toml());
    Ok(exit::SUCCESS)
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    // Repeated calls in one process (tests) keep the first logger.
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .try_init();
}

/// Runs the CLI and returns the process exit code: 0 on success, 1 for
/// usage and input errors, 2 for numerical failures.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                exit::USAGE
            } else {
                exit::SUCCESS
            };
        }
    };
    init_logging(cli.verbose);
    let result = match &cli.command {
        Command::Sweep(a) => cmd_sweep(a),
        Command::Optimize { exp, m_bar_max } => cmd_optimize(exp, *m_bar_max),
        Command::Chart {
            input,
            out,
            metric,
            title,
        } => cmd_chart(input, out.as_deref(), *metric, title.as_deref()),
        Command::Validate {
            exp,
            samples,
            max_ks,
        } => cmd_validate(exp, *samples, *max_ks),
        Command::Selftest(a) => cmd_selftest(a),
        Command::Config(a) => cmd_config(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                CliError::Model(_) => exit::NUMERICAL,
                _ => exit::USAGE,
            }
        }
    }
}

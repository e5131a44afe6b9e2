use std::io::{Read, Write};
use std::time::Instant;

use d2d_coverage::geometry::ContentStrategy;
use d2d_coverage::metrics::{coverage, CoverageOptions};
use d2d_coverage::montecarlo::simulate_coverage;
use d2d_coverage::Params;
use rayon::prelude::*;

use crate::config::{ExperimentSpec, Method, SweepAxis};
use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: u32 = 1;

pub const HEADER: [&str; 8] = [
    "schema_version",
    "sweep_axis",
    "sweep_value",
    "method",
    "coverage",
    "ase",
    "ci_half_width",
    "wall_time_ms",
];

#[derive(Debug, Clone, PartialEq)]
pub enum RowOutcome {
    Value {
        coverage: f64,
        ase: f64,
        /// Monte Carlo rows only.
        ci_half_width: Option<f64>,
    },
    /// The computation failed; the coverage column holds the error code.
    Failed { code: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub schema_version: u32,
    pub sweep_axis: SweepAxis,
    pub sweep_value: f64,
    pub method: String,
    pub outcome: RowOutcome,
    pub wall_time_ms: f64,
}

impl SweepRow {
    pub fn is_failure(&self) -> bool {
        matches!(self.outcome, RowOutcome::Failed { .. })
    }

    pub fn coverage(&self) -> Option<f64> {
        match self.outcome {
            RowOutcome::Value { coverage, .. } => Some(coverage),
            RowOutcome::Failed { .. } => None,
        }
    }

    pub fn ase(&self) -> Option<f64> {
        match self.outcome {
            RowOutcome::Value { ase, .. } => Some(ase),
            RowOutcome::Failed { .. } => None,
        }
    }

    pub fn ci_half_width(&self) -> Option<f64> {
        match self.outcome {
            RowOutcome::Value { ci_half_width, .. } => ci_half_width,
            RowOutcome::Failed { .. } => None,
        }
    }

    fn record(&self) -> [String; 8] {
        let (coverage, ase, ci) = match &self.outcome {
            RowOutcome::Value {
                coverage,
                ase,
                ci_half_width,
            } => (
                coverage.to_string(),
                ase.to_string(),
                ci_half_width.map(|c| c.to_string()).unwrap_or_default(),
            ),
            RowOutcome::Failed { code } => (code.clone(), String::new(), String::new()),
        };
        [
            self.schema_version.to_string(),
            self.sweep_axis.to_string(),
            self.sweep_value.to_string(),
            self.method.clone(),
            coverage,
            ase,
            ci,
            format!("{:.3}", self.wall_time_ms),
        ]
    }
}

fn ase_of(params: &Params, coverage: f64) -> f64 {
    params.m_bar * params.lambda_c * (1.0 + params.beta).log2() * coverage
}

fn run_point(
    spec: &ExperimentSpec,
    params: &Params,
    strategy: ContentStrategy,
    method: Method,
    options: &CoverageOptions<f64>,
) -> d2d_coverage::Result<(f64, Option<f64>)> {
    match method.resolve(strategy) {
        Some(m) => coverage(params, strategy, m, options).map(|c| (c.value, None)),
        None => {
            let sim = spec.sim.unwrap_or_default().to_simulation(params, strategy);
            simulate_coverage(params, &sim).map(|e| (e.p_hat, Some(e.ci_half_width)))
        }
    }
}

fn evaluate(
    spec: &ExperimentSpec,
    value: f64,
    method: Method,
    options: &CoverageOptions<f64>,
) -> SweepRow {
    let start = Instant::now();
    let failed = |code: &str| RowOutcome::Failed {
        code: code.to_string(),
    };
    let (name, outcome) = match spec.point(value) {
        Ok((params, strategy)) => {
            let outcome = match run_point(spec, &params, strategy, method, options) {
                Ok((cov, ci)) => RowOutcome::Value {
                    coverage: cov,
                    ase: ase_of(&params, cov),
                    ci_half_width: ci,
                },
                Err(e) => {
                    log::warn!("{} = {value}, {}: {e}", spec.sweep.axis, method.as_str());
                    failed(e.code())
                }
            };
            (method.column_name(strategy), outcome)
        }
        Err(e) => {
            log::warn!("{} = {value}: {e}", spec.sweep.axis);
            (method.as_str(), failed("ERR_DOMAIN"))
        }
    };
    SweepRow {
        schema_version: SCHEMA_VERSION,
        sweep_axis: spec.sweep.axis,
        sweep_value: value,
        method: name.to_string(),
        outcome,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    }
}

/// One row per (sweep value, method), in sweep order then method order.
/// Points run in parallel. A failed point becomes an error row.
pub fn run_sweep(spec: &ExperimentSpec, options: &CoverageOptions<f64>) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let points: Vec<(f64, Method)> = spec
        .sweep
        .values
        .iter()
        .flat_map(|&v| spec.methods.iter().map(move |&m| (v, m)))
        .collect();
    Ok(points
        .par_iter()
        .map(|&(v, m)| evaluate(spec, v, m, options))
        .collect())
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for row in rows {
        w.write_record(row.record())?;
    }
    w.flush()?;
    Ok(())
}

fn field(record: &csv::StringRecord, i: usize, row: usize) -> Result<&str> {
    record.get(i).ok_or_else(|| CliError::Row {
        row,
        message: format!("missing column {}", HEADER[i]),
    })
}

fn number(text: &str, column: &str, row: usize) -> Result<f64> {
    text.trim().parse().map_err(|_| CliError::Row {
        row,
        message: format!("{column} '{text}' is not a number"),
    })
}

/// Parses a sweep CSV. Errors name the offending data row.
pub fn read_csv<R: Read>(input: R) -> Result<Vec<SweepRow>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().collect::<Vec<_>>() != HEADER {
        return Err(CliError::Row {
            row: 0,
            message: format!(
                "unexpected header '{}'",
                header.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    let mut rows = Vec::new();
    for (i, record) in r.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| CliError::Row {
            row,
            message: e.to_string(),
        })?;
        if record.len() != HEADER.len() {
            return Err(CliError::Row {
                row,
                message: format!("expected {} fields, found {}", HEADER.len(), record.len()),
            });
        }
        let schema_version: u32 = field(&record, 0, row)?.parse().map_err(|_| CliError::Row {
            row,
            message: "bad schema_version".to_string(),
        })?;
        if schema_version != SCHEMA_VERSION {
            return Err(CliError::Row {
                row,
                message: format!("unsupported schema version {schema_version}"),
            });
        }
        let sweep_axis = field(&record, 1, row)?
            .parse()
            .map_err(|e: CliError| CliError::Row {
                row,
                message: e.to_string(),
            })?;
        let sweep_value = number(field(&record, 2, row)?, "sweep_value", row)?;
        let method = field(&record, 3, row)?.to_string();
        let coverage = field(&record, 4, row)?;
        let outcome = if coverage.starts_with("ERR_") {
            RowOutcome::Failed {
                code: coverage.to_string(),
            }
        } else {
            let ci = field(&record, 6, row)?;
            RowOutcome::Value {
                coverage: number(coverage, "coverage", row)?,
                ase: number(field(&record, 5, row)?, "ase", row)?,
                ci_half_width: if ci.is_empty() {
                    None
                } else {
                    Some(number(ci, "ci_half_width", row)?)
                },
            }
        };
        let wall_time_ms = number(field(&record, 7, row)?, "wall_time_ms", row)?;
        rows.push(SweepRow {
            schema_version,
            sweep_axis,
            sweep_value,
            method,
            outcome,
            wall_time_ms,
        });
    }
    Ok(rows)
}

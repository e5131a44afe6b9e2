use std::fmt::Write as _;
use std::io::Write;

use d2d_coverage::metrics::{optimize_mbar, CoverageMethod, CoverageOptions};

use crate::config::{ExperimentSpec, Method, SweepAxis};
use crate::error::{CliError, Result};
use crate::sweep::SCHEMA_VERSION;

pub const HEADER: [&str; 9] = [
    "schema_version",
    "sweep_axis",
    "sweep_value",
    "strategy",
    "method",
    "m_bar",
    "coverage",
    "ase",
    "optimal",
];

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub m_bar: usize,
    pub coverage: f64,
    pub ase: f64,
}

/// The ASE-optimal `m̄` at one sweep value.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeEntry {
    /// `None` when the spec sweeps `m̄` itself, which is then the search
    /// variable.
    pub sweep_value: Option<f64>,
    pub strategy: String,
    pub method: CoverageMethod,
    pub m_bar: usize,
    pub ase: f64,
    pub curve: Vec<CurvePoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeReport {
    pub sweep_axis: SweepAxis,
    pub entries: Vec<OptimizeEntry>,
}

/// Searches `m̄ ∈ 1..=m_bar_max` (default `M`) with the first analytical
/// method of the spec, at every sweep value unless the spec sweeps `m̄`.
pub fn run_optimize(
    spec: &ExperimentSpec,
    options: &CoverageOptions<f64>,
    m_bar_max: Option<usize>,
) -> Result<OptimizeReport> {
    let method = spec
        .methods
        .iter()
        .copied()
        .find(|m| *m != Method::MonteCarlo)
        .ok_or_else(|| CliError::usage("optimize needs an analytical method"))?;
    let values: Vec<Option<f64>> = if spec.sweep.axis == SweepAxis::MBar {
        vec![None]
    } else {
        spec.validate()?;
        spec.sweep.values.iter().copied().map(Some).collect()
    };
    let mut entries = Vec::new();
    for value in values {
        let (params, strategy) = match value {
            Some(v) => spec.point(v)?,
            None => (spec.params.to_params(), spec.strategy),
        };
        let resolved = method.resolve(strategy).expect("analytical method");
        let top = m_bar_max.unwrap_or(params.max_transmitters);
        if top == 0 {
            return Err(CliError::usage("m_bar range must include 1"));
        }
        let opt = optimize_mbar(&params, strategy, resolved, options, 1..=top)?;
        entries.push(OptimizeEntry {
            sweep_value: value,
            strategy: strategy.label(),
            method: resolved,
            m_bar: opt.m_bar,
            ase: opt.best.value,
            curve: opt
                .curve
                .iter()
                .enumerate()
                .map(|(i, a)| CurvePoint {
                    m_bar: i + 1,
                    coverage: a.coverage.value,
                    ase: a.value,
                })
                .collect(),
        });
    }
    Ok(OptimizeReport {
        sweep_axis: spec.sweep.axis,
        entries,
    })
}

impl OptimizeReport {
    pub fn text(&self) -> String {
        let mut s = String::new();
        for e in &self.entries {
            match e.sweep_value {
                Some(v) => writeln!(s, "{} = {v}, {}, {}", self.sweep_axis, e.strategy, e.method),
                None => writeln!(s, "{}, {}", e.strategy, e.method),
            }
            .unwrap();
            writeln!(
                s,
                "  optimal m_bar = {}, ASE = {:.6e} bit/s/Hz/m²",
                e.m_bar, e.ase
            )
            .unwrap();
            writeln!(s, "  {:>6}  {:>10}  {:>14}", "m_bar", "coverage", "ASE").unwrap();
            for p in &e.curve {
                let mark = if p.m_bar == e.m_bar { " *" } else { "" };
                writeln!(
                    s,
                    "  {:>6}  {:>10.6}  {:>14.6e}{mark}",
                    p.m_bar, p.coverage, p.ase
                )
                .unwrap();
            }
        }
        s
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(HEADER)?;
        for e in &self.entries {
            for p in &e.curve {
                w.write_record([
                    SCHEMA_VERSION.to_string(),
                    self.sweep_axis.to_string(),
                    e.sweep_value.map(|v| v.to_string()).unwrap_or_default(),
                    e.strategy.clone(),
                    e.method.to_string(),
                    p.m_bar.to_string(),
                    p.coverage.to_string(),
                    p.ase.to_string(),
                    (p.m_bar == e.m_bar).to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

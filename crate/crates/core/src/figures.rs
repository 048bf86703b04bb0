//! Reproduction of the two Monte Carlo figures as data files.
//!
//! Figure 1: scenarios A–D (LogNormal(2, 1), Gamma(100, 1), Uniform(1, 2),
//! Pareto(10, 1)) crossed with the identity, log and reciprocal generators.
//! Figure 2: LogNormal(2, 6.25) with the identity and log generators.
//!
//! Each cell gets `hist.csv`, `statistics.csv` and `report.json`; the
//! figure gets `summary.csv`. Wall-clock times go to `timing.json` alone so
//! that every other file is byte-identical for a fixed seed.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::asymptotics::{edgeworth_terms, EdgeworthVariant};
use crate::distributions::DistributionModel;
use crate::error::{Error, Result};
use crate::generator::Generator;
use crate::simulation::{histogram, run_scenario, sample_skewness, HistogramBin, ScenarioConfig, SimulationReport};

pub const TOOL: &str = "regmean";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Float formatting shared by every CSV output: 17 significant digits,
/// '.' decimal separator, empty field for missing values. Negative zero
/// prints as zero.
pub fn csv_float(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.16e}")
}

fn csv_opt(v: Option<f64>) -> String {
    v.map(csv_float).unwrap_or_default()
}

/// `{tool, version, seed, command}` block carried by every JSON output.
pub fn metadata(command: &str, seed: u64) -> Value {
    json!({ "tool": TOOL, "version": VERSION, "command": command, "seed": seed })
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(format!("creating {}", parent.display()), e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

pub fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::NumericFailure(format!("serializing {}: {e}", path.display())))?;
    text.push('\n');
    write_file(path, &text)
}

pub fn histogram_csv(bins: &[HistogramBin]) -> String {
    let mut s = String::from("bin_lo,bin_hi,count,normal_density_at_mid\n");
    for b in bins {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            csv_float(b.bin_lo),
            csv_float(b.bin_hi),
            b.count,
            csv_float(b.normal_density_at_mid)
        );
    }
    s
}

pub fn statistics_csv(report: &SimulationReport) -> String {
    let mut s = String::from("replicate,mean,scaled_error,standardized\n");
    for (i, ((m, e), z)) in report
        .means
        .iter()
        .zip(&report.scaled_errors)
        .zip(&report.statistics)
        .enumerate()
    {
        let _ = writeln!(s, "{i},{},{},{}", csv_float(*m), csv_float(*e), csv_float(*z));
    }
    s
}

/// Report fields common to `simulate` and the figure cells; excludes the
/// wall-clock time.
pub fn report_json(command: &str, report: &SimulationReport) -> Value {
    json!({
        "metadata": metadata(command, report.config.seed),
        "config": report.config,
        "statistic": "standardized",
        "eg": report.asymptotic.eg,
        "gprime_at_eg": report.asymptotic.gprime_at_eg,
        "asym_var": report.asymptotic.asym_var,
        "empirical_var": report.empirical_var,
        "variance_ratio": report.variance_ratio(),
        "ks": report.ks_vs_normal,
        "edgeworth_sup_gap": report.edgeworth_sup_gap,
        "moments": report.moments,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct FigureConfig {
    pub n: usize,
    pub replicates: usize,
    pub seed: u64,
}

impl Default for FigureConfig {
    fn default() -> Self {
        FigureConfig { n: 1000, replicates: 1000, seed: 42 }
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub label: &'static str,
    pub dist: DistributionModel,
}

pub fn figure1_scenarios() -> Vec<Scenario> {
    vec![
        Scenario { label: "A", dist: DistributionModel::LogNormal { mu: 2.0, sigma2: 1.0 } },
        Scenario { label: "B", dist: DistributionModel::Gamma { shape: 100.0, rate: 1.0 } },
        Scenario { label: "C", dist: DistributionModel::Uniform { lo: 1.0, hi: 2.0 } },
        Scenario { label: "D", dist: DistributionModel::Pareto { alpha: 10.0, scale: 1.0 } },
    ]
}

pub fn figure1_generators() -> Vec<Generator> {
    vec![Generator::identity(), Generator::log(), Generator::reciprocal()]
}

pub fn figure2_distribution() -> DistributionModel {
    DistributionModel::LogNormal { mu: 2.0, sigma2: 6.25 }
}

#[derive(Debug, Clone, Serialize)]
pub struct CellSummary {
    pub scenario: String,
    pub distribution: String,
    pub generator: String,
    pub n: usize,
    pub replicates: usize,
    pub eg: f64,
    pub asym_var: f64,
    pub empirical_var: Option<f64>,
    pub variance_ratio: Option<f64>,
    pub ks: f64,
    pub edgeworth_sup_gap: Option<f64>,
    pub runtime_ms: f64,
}

#[derive(Debug, Clone)]
pub struct Cell {
    pub summary: CellSummary,
    pub report: SimulationReport,
}

fn summary_csv(cells: &[Cell]) -> String {
    let mut s = String::from(
        "scenario,distribution,generator,n,replicates,eg,asym_var,empirical_var,variance_ratio,ks,edgeworth_sup_gap\n",
    );
    for c in cells {
        let m = &c.summary;
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{}",
            m.scenario,
            m.distribution,
            m.generator,
            m.n,
            m.replicates,
            csv_float(m.eg),
            csv_float(m.asym_var),
            csv_opt(m.empirical_var),
            csv_opt(m.variance_ratio),
            csv_float(m.ks),
            csv_opt(m.edgeworth_sup_gap)
        );
    }
    s
}

fn run_cell(
    out_dir: &Path,
    command: &str,
    label: &str,
    dist: DistributionModel,
    generator: Generator,
    cfg: FigureConfig,
    files: &mut Vec<PathBuf>,
) -> Result<Cell> {
    let name = format!("{label}-{}", generator.name());
    let scenario = ScenarioConfig::new(dist, generator, cfg.n, cfg.replicates, cfg.seed)?;
    let report = run_scenario(&scenario)?;
    let dir = out_dir.join("cells").join(&name);

    let mut value = report_json(command, &report);
    value["scenario"] = json!(label);
    let outputs = [
        (dir.join("report.json"), None),
        (dir.join("hist.csv"), Some(histogram_csv(&histogram(&report.statistics)?))),
        (dir.join("statistics.csv"), Some(statistics_csv(&report))),
    ];
    for (path, text) in outputs {
        match text {
            Some(t) => write_file(&path, &t)?,
            None => write_json(&path, &value)?,
        }
        files.push(path);
    }
    let summary = CellSummary {
        scenario: label.to_string(),
        distribution: dist.spec(),
        generator: report.config.generator.clone(),
        n: cfg.n,
        replicates: cfg.replicates,
        eg: report.asymptotic.eg,
        asym_var: report.asymptotic.asym_var,
        empirical_var: report.empirical_var,
        variance_ratio: report.variance_ratio(),
        ks: report.ks_vs_normal,
        edgeworth_sup_gap: report.edgeworth_sup_gap,
        runtime_ms: report.runtime_ms,
    };
    Ok(Cell { summary, report })
}

fn write_timing(out_dir: &Path, command: &str, seed: u64, cells: &[Cell], files: &mut Vec<PathBuf>) -> Result<()> {
    let timing: Vec<Value> = cells
        .iter()
        .map(|c| {
            json!({
                "scenario": c.summary.scenario,
                "generator": c.summary.generator,
                "runtime_ms": c.summary.runtime_ms,
            })
        })
        .collect();
    let path = out_dir.join("timing.json");
    write_json(&path, &json!({ "metadata": metadata(command, seed), "cells": timing }))?;
    files.push(path);
    Ok(())
}

#[derive(Debug, Clone)]
pub struct FigureOutput {
    pub cells: Vec<Cell>,
    pub files: Vec<PathBuf>,
}

impl FigureOutput {
    pub fn cell(&self, scenario: &str, generator: &str) -> Option<&Cell> {
        self.cells
            .iter()
            .find(|c| c.summary.scenario == scenario && c.summary.generator == generator)
    }
}

/// All twelve scenario × generator cells of Figure 1.
pub fn reproduce_figure1(out_dir: &Path, cfg: FigureConfig) -> Result<FigureOutput> {
    const COMMAND: &str = "reproduce-figure1";
    let mut files = Vec::new();
    let mut cells = Vec::new();
    for scenario in figure1_scenarios() {
        for g in figure1_generators() {
            cells.push(run_cell(out_dir, COMMAND, scenario.label, scenario.dist, g, cfg, &mut files)?);
        }
    }
    let path = out_dir.join("summary.csv");
    write_file(&path, &summary_csv(&cells))?;
    files.push(path);
    write_timing(out_dir, COMMAND, cfg.seed, &cells, &mut files)?;
    Ok(FigureOutput { cells, files })
}

#[derive(Debug, Clone, Serialize)]
pub struct Figure2Findings {
    pub ks_identity: f64,
    pub ks_log: f64,
    /// ks_identity / ks_log
    pub ks_ratio: f64,
    pub log_converges_faster: bool,
    pub ks_log_below_threshold: bool,
    pub ks_threshold: f64,
    /// Informational only.
    pub factor_target: f64,
    pub factor_target_met: bool,
    /// Largest |correction| of the Edgeworth expansion for the log cell
    /// over a grid on [−5, 5].
    pub log_max_abs_correction: f64,
    pub identity_statistics_skewness: f64,
}

pub const FIGURE2_KS_THRESHOLD: f64 = 0.05;
pub const FIGURE2_FACTOR_TARGET: f64 = 2.0;

/// LogNormal(2, 6.25) with the identity and log generators.
pub fn reproduce_figure2(out_dir: &Path, cfg: FigureConfig) -> Result<(FigureOutput, Figure2Findings)> {
    const COMMAND: &str = "reproduce-figure2";
    let mut files = Vec::new();
    let dist = figure2_distribution();
    let cells = vec![
        run_cell(out_dir, COMMAND, "lognormal-2-6.25", dist, Generator::identity(), cfg, &mut files)?,
        run_cell(out_dir, COMMAND, "lognormal-2-6.25", dist, Generator::log(), cfg, &mut files)?,
    ];
    let (identity, log) = (&cells[0], &cells[1]);

    let coef = log
        .report
        .edgeworth_coefficients()
        .ok_or_else(|| Error::Degenerate("log cell has no Edgeworth coefficients".into()))?;
    let log_max_abs_correction = (0..=200)
        .map(|i| -5.0 + i as f64 * 0.05)
        .flat_map(|x| edgeworth_terms(x, cfg.n, &coef, EdgeworthVariant::SkewSquared).corrections)
        .map(f64::abs)
        .fold(0.0, f64::max);

    let (ks_identity, ks_log) = (identity.summary.ks, log.summary.ks);
    let ratio = ks_identity / ks_log;
    let findings = Figure2Findings {
        ks_identity,
        ks_log,
        ks_ratio: ratio,
        log_converges_faster: ks_log < ks_identity,
        ks_log_below_threshold: ks_log < FIGURE2_KS_THRESHOLD,
        ks_threshold: FIGURE2_KS_THRESHOLD,
        factor_target: FIGURE2_FACTOR_TARGET,
        factor_target_met: ratio >= FIGURE2_FACTOR_TARGET,
        log_max_abs_correction,
        identity_statistics_skewness: sample_skewness(&identity.report.statistics)?,
    };

    let path = out_dir.join("summary.csv");
    write_file(&path, &summary_csv(&cells))?;
    files.push(path);
    let path = out_dir.join("findings.json");
    write_json(&path, &json!({ "metadata": metadata(COMMAND, cfg.seed), "findings": findings }))?;
    files.push(path);
    write_timing(out_dir, COMMAND, cfg.seed, &cells, &mut files)?;
    Ok((FigureOutput { cells, files }, findings))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_floats_have_seventeen_digits() {
        assert_eq!(csv_float(0.1), "1.0000000000000001e-1");
        assert_eq!(csv_float(-2.5), "-2.5000000000000000e0");
        assert_eq!(csv_float(0.1).parse::<f64>().unwrap(), 0.1);
        assert_eq!(csv_opt(None), "");
    }

    #[test]
    fn small_figure1_layout() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = FigureConfig { n: 20, replicates: 30, seed: 7 };
        let out = reproduce_figure1(dir.path(), cfg).unwrap();
        assert_eq!(out.cells.len(), 12);
        let summary = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
        assert_eq!(summary.lines().count(), 13);
        for f in &out.files {
            assert!(f.exists(), "{}", f.display());
        }
        let hist = fs::read_to_string(dir.path().join("cells/C-identity/hist.csv")).unwrap();
        assert!(hist.starts_with("bin_lo,bin_hi,count,normal_density_at_mid\n"));
        let report: Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("cells/A-log/report.json")).unwrap()).unwrap();
        assert_eq!(report["metadata"]["seed"], 7);
        assert!(report.get("runtime_ms").is_none());
        assert!(out.cell("D", "reciprocal").is_some());
    }

    #[test]
    fn unwritable_directory_reports_path() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, "x").unwrap();
        let err = reproduce_figure1(&blocker, FigureConfig { n: 5, replicates: 2, seed: 1 }).unwrap_err();
        match err {
            Error::Io { context, .. } => assert!(context.contains("file"), "{context}"),
            other => panic!("expected io error, got {other:?}"),
        }
    }
}

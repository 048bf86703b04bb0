use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use regmean::asymptotics::{edgeworth_terms, g_moments, EdgeworthVariant, MomentMethod};
use regmean::figures::{
    csv_float, histogram_csv, metadata, report_json, reproduce_figure1, reproduce_figure2, write_file, FigureConfig,
    FigureOutput,
};
use regmean::portfolio::{summarize, ReturnSeries, VarianceDivisor};
use regmean::simulation::{histogram, run_scenario, ScenarioConfig};
use regmean::stability::{verify_stability, verify_stability_sampled, MAX_EXHAUSTIVE_N};
use regmean::{check_axioms, mean, DistributionModel, Error, Generator, Interval, Result};
use serde_json::{json, Map, Value};

use crate::input;
use crate::{Cli, Command, Format, GlobalArgs};

struct Output {
    json: Value,
    /// Preferred CSV rendering; top-level scalars of `json` otherwise.
    table: Option<String>,
    default_format: Format,
}

impl Output {
    fn json(json: Value) -> Self {
        Output { json, table: None, default_format: Format::Json }
    }

    fn with_table(mut self, table: String) -> Self {
        self.table = Some(table);
        self
    }
}

fn scalar_csv(value: &Value) -> String {
    let mut header = Vec::new();
    let mut row = Vec::new();
    if let Value::Object(map) = value {
        for (k, v) in map {
            let cell = match v {
                Value::Number(n) => match n.as_f64() {
                    Some(f) if !n.is_i64() && !n.is_u64() => csv_float(f),
                    _ => n.to_string(),
                },
                Value::Bool(b) => b.to_string(),
                Value::String(s) => s.clone(),
                Value::Null => String::new(),
                _ => continue,
            };
            header.push(k.clone());
            row.push(cell);
        }
    }
    format!("{}\n{}\n", header.join(","), row.join(","))
}

fn emit(global: &GlobalArgs, out: Output) -> Result<()> {
    let text = match global.format.unwrap_or(out.default_format) {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&out.json)
                .map_err(|e| Error::NumericFailure(format!("serializing output: {e}")))?;
            s.push('\n');
            s
        }
        Format::Csv => out.table.unwrap_or_else(|| scalar_csv(&out.json)),
    };
    match &global.out {
        Some(path) => write_file(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn with_metadata(command: &str, seed: u64, body: Value) -> Value {
    let mut map = Map::new();
    map.insert("metadata".into(), metadata(command, seed));
    if let Value::Object(fields) = body {
        map.extend(fields);
    }
    Value::Object(map)
}

fn generator(spec: &str) -> Result<Generator> {
    spec.parse()
}

fn distribution(spec: &str) -> Result<DistributionModel> {
    spec.parse()
}

pub fn run(cli: &Cli) -> Result<()> {
    let g = &cli.global;
    let seed = g.seed;
    match &cli.command {
        Command::Mean { generator: spec, data } => {
            let gen = generator(spec)?;
            let values = input::numbers(data)?;
            let m = mean(&gen, &values)?;
            let body = json!({
                "config": { "generator": gen.name(), "n": values.len() },
                "mean": m,
            });
            let table = format!("generator,n,mean\n{},{},{}\n", gen.name(), values.len(), csv_float(m));
            emit(g, Output::json(with_metadata("mean", seed, body)).with_table(table))
        }
        Command::Axioms { generator: spec, n, n0, trials, tol } => {
            let gen = generator(spec)?;
            let blocks: Vec<usize> = match n0 {
                Some(k) => vec![*k],
                None => (1..=*n).collect(),
            };
            let reports = blocks
                .iter()
                .map(|&k| check_axioms(&gen, *n, k, *trials, *tol, seed))
                .collect::<Result<Vec<_>>>()?;
            let mut table = String::from(
                "generator,n,n0,a1_pass,a1_worst,a2_pass,a2_worst,a3_pass,a3_worst,a4_pass,a4_worst\n",
            );
            for r in &reports {
                let _ = writeln!(
                    table,
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    r.generator,
                    r.n,
                    r.n0,
                    r.a1_monotone.pass,
                    csv_float(r.a1_monotone.worst_violation),
                    r.a2_symmetric.pass,
                    csv_float(r.a2_symmetric.worst_violation),
                    r.a3_idempotent.pass,
                    csv_float(r.a3_idempotent.worst_violation),
                    r.a4_replacement.pass,
                    csv_float(r.a4_replacement.worst_violation),
                );
            }
            let body = json!({
                "config": { "generator": gen.name(), "n": n, "n0": n0, "trials": trials, "tol": tol },
                "all_pass": reports.iter().all(|r| r.all_pass()),
                "reports": reports,
            });
            emit(g, Output::json(with_metadata("axioms", seed, body)).with_table(table))
        }
        Command::Edgeworth { generator: spec, dist, n, grid, literal_kappa2 } => {
            let gen = generator(spec)?;
            let d = distribution(dist)?;
            let (interval, steps) = input::grid(grid)?;
            if *n == 0 {
                return Err(Error::Configuration("n must be at least 1".into()));
            }
            let moments = g_moments(&gen, &d, MomentMethod::Auto)?;
            let coef = moments.edgeworth()?;
            let variant = if *literal_kappa2 {
                EdgeworthVariant::KurtosisSquared
            } else {
                EdgeworthVariant::SkewSquared
            };
            let rows: Vec<_> = interval
                .grid(steps)
                .into_iter()
                .map(|x| edgeworth_terms(x, *n, &coef, variant))
                .collect();
            let mut table = String::from("x,phi_cdf,edgeworth_cdf,correction_1,correction_2,correction_3\n");
            for r in &rows {
                let _ = writeln!(
                    table,
                    "{},{},{},{},{},{}",
                    csv_float(r.x),
                    csv_float(r.normal_cdf),
                    csv_float(r.value),
                    csv_float(r.corrections[0]),
                    csv_float(r.corrections[1]),
                    csv_float(r.corrections[2]),
                );
            }
            let body = json!({
                "config": { "generator": gen.name(), "dist": d.spec(), "n": n, "grid": grid, "variant": variant },
                "moments": moments,
                "rows": rows,
            });
            let mut out = Output::json(with_metadata("edgeworth", seed, body)).with_table(table);
            out.default_format = Format::Csv;
            emit(g, out)
        }
        Command::Simulate { dist, generator: spec, n, replicates, hist } => {
            let cfg = ScenarioConfig::new(distribution(dist)?, generator(spec)?, *n, *replicates, seed)?;
            let report = run_scenario(&cfg)?;
            if let Some(path) = hist {
                write_file(path, &histogram_csv(&histogram(&report.statistics)?))?;
            }
            let mut value = report_json("simulate", &report);
            value["runtime_ms"] = json!(report.runtime_ms);
            emit(g, Output::json(value))
        }
        Command::Stability { g: gs, h: hs, interval, n, grid, points } => {
            let (a, b) = (generator(gs)?, generator(hs)?);
            let interval: Interval = interval.parse()?;
            let report = if *n <= MAX_EXHAUSTIVE_N {
                verify_stability(&a, &b, interval, *n, *grid)?
            } else {
                verify_stability_sampled(&a, &b, interval, *n, *grid, *points, seed)?
            };
            let body = serde_json::to_value(&report)
                .map_err(|e| Error::NumericFailure(format!("serializing report: {e}")))?;
            emit(g, Output::json(with_metadata("stability", seed, body)))
        }
        Command::Portfolio { returns, w0, percent, unbiased_variance } => {
            let values = input::numbers(returns)?;
            let series = if *percent {
                ReturnSeries::from_percent(&values, *w0)?
            } else {
                ReturnSeries::new(values, *w0)?
            };
            let divisor = if *unbiased_variance {
                VarianceDivisor::Unbiased
            } else {
                VarianceDivisor::Population
            };
            let summary = summarize(&series, divisor);
            let body = json!({
                "config": { "periods": series.len(), "w0": w0, "percent": percent, "variance_divisor": divisor },
                "wealth": summary.wealth,
                "geometric_gross": summary.geometric_gross,
                "geometric_net": summary.geometric_net,
                "markowitz": summary.markowitz,
                "gap": summary.gap,
            });
            emit(g, Output::json(with_metadata("portfolio", seed, body)))
        }
        Command::ReproduceFigure1 { n, replicates } => {
            let dir = out_dir(g, "figure1");
            let out = reproduce_figure1(&dir, FigureConfig { n: *n, replicates: *replicates, seed })?;
            let body = figure_body(&dir, &out);
            print_json(&with_metadata("reproduce-figure1", seed, body))
        }
        Command::ReproduceFigure2 { n, replicates } => {
            let dir = out_dir(g, "figure2");
            let (out, findings) = reproduce_figure2(&dir, FigureConfig { n: *n, replicates: *replicates, seed })?;
            let mut body = figure_body(&dir, &out);
            body["findings"] = json!(findings);
            print_json(&with_metadata("reproduce-figure2", seed, body))
        }
    }
}

fn out_dir(g: &GlobalArgs, default: &str) -> PathBuf {
    g.out.clone().unwrap_or_else(|| PathBuf::from(default))
}

fn figure_body(dir: &Path, out: &FigureOutput) -> Value {
    let cells: Vec<_> = out.cells.iter().map(|c| &c.summary).collect();
    json!({
        "out_dir": dir.display().to_string(),
        "cells": cells,
        "files": out.files.iter().map(|f| f.display().to_string()).collect::<Vec<_>>(),
    })
}

fn print_json(value: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::NumericFailure(format!("serializing output: {e}")))?;
    println!("{text}");
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_csv_flattens_top_level_fields() {
        let v = json!({ "a": 1, "b": 0.5, "c": "x", "d": null, "nested": { "e": 1 } });
        assert_eq!(scalar_csv(&v), "a,b,c,d\n1,5.0000000000000000e-1,x,\n");
    }
}

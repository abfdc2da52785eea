//! Plot-ready tables and the run manifest.
//!
//! Output bytes depend only on the run description: no timestamps, host
//! names or worker counts are written.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::{IntegratorSection, Output, RunConfig};
use crate::error::EmitError;
use crate::sweep::{Row, SeriesResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Decimal text with 15 significant digits; NaN for failed rows.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else {
        format!("{x:.14e}")
    }
}

fn observable(row: &Row, o: Output) -> f64 {
    match o {
        Output::QLeft => row.q_left,
        Output::QRight => row.q_right,
        Output::QAvg => row.q_avg,
        Output::DeltaQ => row.delta_q,
        Output::MinSuperadiabaticPopulation => row.min_superadiabatic_population,
        Output::MaxPositivityViolation => row.max_positivity_violation,
        Output::AlphaBar => row.alpha_bar,
        Output::MeanRhoGg => row.mean_rho_gg,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SeriesEntry {
    pub label: String,
    pub axis: String,
    pub variant: String,
    pub file: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace_file: Option<String>,
    pub rows: usize,
    pub failed_rows: usize,
    pub integrator: IntegratorSection,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub format: Format,
    pub config: RunConfig,
    pub series: Vec<SeriesEntry>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> EmitError + '_ {
    move |source| EmitError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> EmitError + '_ {
    move |source| EmitError::Csv {
        path: path.to_path_buf(),
        source,
    }
}

fn json_err(path: &Path) -> impl FnOnce(serde_json::Error) -> EmitError + '_ {
    move |source| EmitError::Json {
        path: path.to_path_buf(),
        source,
    }
}

fn header(res: &SeriesResult) -> Vec<String> {
    let mut h: Vec<String> = ["series", "index", res.spec.axis.column(), "variant", "status", "converged", "cycles"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    h.extend(res.spec.outputs.iter().map(|o| o.name().to_string()));
    h.push("error".into());
    h
}

fn write_csv(res: &SeriesResult, path: &Path) -> Result<(), EmitError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(header(res)).map_err(csv_err(path))?;
    for r in &res.rows {
        let mut rec = vec![
            res.spec.label.clone(),
            r.index.to_string(),
            fmt_f64(r.value),
            r.variant.to_string(),
            if r.ok { "ok" } else { "failed" }.to_string(),
            r.converged.to_string(),
            r.cycles.to_string(),
        ];
        rec.extend(res.spec.outputs.iter().map(|&o| fmt_f64(observable(r, o))));
        rec.push(r.error.clone().unwrap_or_default());
        w.write_record(&rec).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

fn json_number(x: f64) -> serde_json::Value {
    serde_json::Number::from_f64(x).map_or(serde_json::Value::Null, serde_json::Value::Number)
}

fn write_json(res: &SeriesResult, path: &Path) -> Result<(), EmitError> {
    let rows: Vec<serde_json::Value> = res
        .rows
        .iter()
        .map(|r| {
            let mut m = serde_json::Map::new();
            m.insert("index".into(), r.index.into());
            m.insert(res.spec.axis.column().into(), json_number(r.value));
            m.insert("variant".into(), r.variant.to_string().into());
            m.insert("status".into(), if r.ok { "ok" } else { "failed" }.into());
            m.insert("converged".into(), r.converged.into());
            m.insert("cycles".into(), r.cycles.into());
            for &o in &res.spec.outputs {
                m.insert(o.name().into(), json_number(observable(r, o)));
            }
            m.insert("error".into(), r.error.clone().map_or(serde_json::Value::Null, Into::into));
            serde_json::Value::Object(m)
        })
        .collect();
    let doc = serde_json::json!({ "series": res.spec.label, "axis": res.spec.axis.name(), "rows": rows });
    let text = serde_json::to_string_pretty(&doc).map_err(json_err(path))?;
    fs::write(path, text + "\n").map_err(io_err(path))
}

fn write_trace(res: &SeriesResult, path: &Path) -> Result<(), EmitError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record([
        "index",
        res.spec.axis.column(),
        "phase",
        "rho_gg",
        "rho_ge_re",
        "rho_ge_im",
        "superadiabatic_population",
        "alpha",
    ])
    .map_err(csv_err(path))?;
    for t in &res.trace {
        w.write_record([
            t.index.to_string(),
            fmt_f64(t.value),
            fmt_f64(t.phase),
            fmt_f64(t.rho_gg),
            fmt_f64(t.rho_ge_re),
            fmt_f64(t.rho_ge_im),
            fmt_f64(t.superadiabatic_population),
            fmt_f64(t.alpha),
        ])
        .map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Write one table per series (plus traces where requested) and
/// `manifest.json` into `out_dir`. Returns the manifest path.
pub fn emit(run: &RunConfig, results: &[SeriesResult], out_dir: &Path, format: Format) -> Result<PathBuf, EmitError> {
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let mut entries = Vec::with_capacity(results.len());
    for res in results {
        let file = format!("{}.{}", res.spec.label, format.extension());
        let path = out_dir.join(&file);
        match format {
            Format::Csv => write_csv(res, &path)?,
            Format::Json => write_json(res, &path)?,
        }
        let trace_file = if res.spec.trace {
            let name = format!("{}_trace.csv", res.spec.label);
            write_trace(res, &out_dir.join(&name))?;
            Some(name)
        } else {
            None
        };
        entries.push(SeriesEntry {
            label: res.spec.label.clone(),
            axis: res.spec.axis.name().into(),
            variant: res.spec.variant.to_string(),
            file,
            trace_file,
            rows: res.rows.len(),
            failed_rows: res.failed_rows(),
            integrator: res.spec.fixed.integrator.clone(),
        });
    }
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        format,
        config: run.clone(),
        series: entries,
    };
    let path = out_dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).map_err(json_err(&path))?;
    fs::write(&path, text + "\n").map_err(io_err(&path))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn at_least_twelve_significant_digits() {
        let s = fmt_f64(-0.99951612345678);
        let mantissa: String = s.split('e').next().unwrap().chars().filter(|c| c.is_ascii_digit()).collect();
        assert!(mantissa.len() >= 12, "{s}");
        assert_eq!(s.parse::<f64>().unwrap(), -0.99951612345678);
        assert_eq!(fmt_f64(f64::NAN), "NaN");
    }
}

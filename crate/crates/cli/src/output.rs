//! Report envelope, CSV rows and spectrum plots.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use plotters::prelude::*;
use serde::Serialize;

use crate::experiments::{Assertion, Outcome, Row, Spectrum};
use crate::ExperimentConfig;

pub const SCHEMA: &str = "disc-defect/1";

#[derive(Serialize)]
pub struct Report<'a> {
    schema: &'static str,
    config: &'a ExperimentConfig,
    passed: bool,
    first_failure: Option<String>,
    assertions: &'a [Assertion],
    result: &'a serde_json::Value,
    /// Unix time of the run; the only field that differs between reruns.
    generated_at: u64,
}

impl<'a> Report<'a> {
    pub fn new(config: &'a ExperimentConfig, outcome: &'a Outcome) -> Self {
        Report {
            schema: SCHEMA,
            config,
            passed: outcome.first_failure().is_none(),
            first_failure: outcome.first_failure(),
            assertions: &outcome.assertions,
            result: &outcome.result,
            generated_at: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: &'a str,
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    schema: &'static str,
    error: ErrorBody<'a>,
}

pub fn error_report(kind: &str, message: &str) -> String {
    serde_json::to_string_pretty(&ErrorReport {
        schema: SCHEMA,
        error: ErrorBody { kind, message },
    })
    .expect("error serializes")
}

pub fn to_csv(command: &str, outcome: &Outcome) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fallback = [Row {
        experiment: command.to_string(),
        passed: outcome.first_failure().is_none(),
        ..Row::default()
    }];
    let rows = if outcome.rows.is_empty() { &fallback[..] } else { &outcome.rows[..] };
    for row in rows {
        w.serialize(row).expect("row serializes");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv is utf-8")
}

fn plot_path(out: Option<&Path>, command: &str, name: &str) -> PathBuf {
    let file = format!("{command}-{name}.svg").replace([':', '=', ',', ' ', '/'], "_");
    match out.and_then(Path::parent) {
        Some(dir) => dir.join(file),
        None => PathBuf::from(file),
    }
}

/// One SVG per spectrum, `log10` of the singular values against their index.
pub fn write_plots(out: Option<&Path>, command: &str, spectra: &[Spectrum]) -> Result<(), Box<dyn std::error::Error>> {
    for s in spectra {
        let path = plot_path(out, command, &s.name);
        let pts: Vec<(f64, f64)> = s
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| (i as f64, v.max(1e-18).log10()))
            .collect();
        let lo = pts.iter().map(|p| p.1).fold(0.0, f64::min).floor();
        let hi = pts.iter().map(|p| p.1).fold(lo + 1.0, f64::max).ceil();
        let root = SVGBackend::new(&path, (640, 400)).into_drawing_area();
        root.fill(&WHITE)?;
        let mut chart = ChartBuilder::on(&root)
            .caption(&s.name, ("sans-serif", 18))
            .margin(12)
            .x_label_area_size(32)
            .y_label_area_size(48)
            .build_cartesian_2d(-0.5..(pts.len().max(1) as f64 - 0.5), lo..hi)?;
        chart
            .configure_mesh()
            .x_desc("index")
            .y_desc("log10 singular value")
            .draw()?;
        chart.draw_series(pts.iter().map(|&p| Circle::new(p, 3, BLUE.filled())))?;
        root.present()?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_header_and_rows() {
        let outcome = Outcome {
            rows: vec![
                Row {
                    experiment: "defect".into(),
                    truncation: Some(16),
                    dimension: Some(1),
                    gap_ratio: Some(1e9),
                    ..Row::default()
                },
                Row {
                    experiment: "defect".into(),
                    truncation: Some(32),
                    dimension: Some(1),
                    ..Row::default()
                },
            ],
            ..Outcome::default()
        };
        let text = to_csv("defect", &outcome);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "experiment,truncation,dimension,gap_ratio,value,passed");
        assert_eq!(lines[1], "defect,16,1,1000000000.0,,false");
        assert_eq!(lines.len(), 3);
    }

    #[test]
    fn error_object_shape() {
        let v: serde_json::Value = serde_json::from_str(&error_report("invalid_spec", "bad")).unwrap();
        assert_eq!(v["schema"], SCHEMA);
        assert_eq!(v["error"]["kind"], "invalid_spec");
    }

    #[test]
    fn plot_file_names_are_sanitized() {
        let p = plot_path(Some(Path::new("out/r.json")), "defect", "quadric:n=2");
        assert_eq!(p, PathBuf::from("out/defect-quadric_n_2.svg"));
    }
}

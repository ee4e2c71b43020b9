//! CSV and plot-data encodings of convergence reports.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;

use crate::error::Result;

use super::config::ReportFormat;
use super::study::{ConvergenceReport, ReportRow};

pub const CSV_HEADER: [&str; 8] = ["ell", "N", "h", "value_re", "value_im", "abs_err", "rel_err", "eoc"];

/// Shortest representation that parses back to the same `f64`.
fn fmt_float(x: f64) -> String {
    format!("{x:?}")
}

pub fn write_csv<W: Write>(report: &ConvergenceReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in &report.rows {
        w.write_record([
            r.ell.to_string(),
            r.n.to_string(),
            fmt_float(r.h),
            fmt_float(r.value.re),
            fmt_float(r.value.im),
            fmt_float(r.abs_err),
            fmt_float(r.rel_err),
            r.eoc.map(fmt_float).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Deserialize)]
struct CsvRow {
    ell: usize,
    #[serde(rename = "N")]
    n: usize,
    h: f64,
    value_re: f64,
    value_im: f64,
    abs_err: f64,
    rel_err: f64,
    eoc: Option<f64>,
}

/// Reads rows written by [`write_csv`].
pub fn read_csv<R: Read>(input: R) -> Result<Vec<ReportRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(crate::error::Error::invalid(format!("unexpected CSV header {header:?}")));
    }
    r.deserialize::<CsvRow>()
        .map(|row| {
            let row = row?;
            Ok(ReportRow {
                ell: row.ell,
                n: row.n,
                h: row.h,
                value: Complex64::new(row.value_re, row.value_im),
                abs_err: row.abs_err,
                rel_err: row.rel_err,
                eoc: row.eoc,
            })
        })
        .collect()
}

/// Error column used for plot data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorMetric {
    Absolute,
    Relative,
}

/// Writes `# series: <name>` blocks of `N err` lines, one block per report,
/// separated by blank lines.
pub fn write_plot_data<W: Write>(series: &[(&str, &ConvergenceReport)], metric: ErrorMetric, mut out: W) -> Result<()> {
    for (i, (name, report)) in series.iter().enumerate() {
        if i > 0 {
            writeln!(out)?;
        }
        writeln!(out, "# series: {name}")?;
        for r in &report.rows {
            let err = match metric {
                ErrorMetric::Absolute => r.abs_err,
                ErrorMetric::Relative => r.rel_err,
            };
            writeln!(out, "{} {}", r.n, fmt_float(err))?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Writes a report to `path` in the given format.
pub fn emit(report: &ConvergenceReport, format: ReportFormat, path: &Path) -> Result<()> {
    let file = BufWriter::new(File::create(path)?);
    match format {
        ReportFormat::Csv => write_csv(report, file),
        ReportFormat::PlotData => {
            let name = format!("{} {}", report.meta.attractor, report.meta.kernel);
            write_plot_data(&[(name.as_str(), report)], ErrorMetric::Absolute, file)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::study::ReportMeta;

    fn report(rows: usize) -> ConvergenceReport {
        let mut out = Vec::new();
        for i in 0..rows {
            out.push(ReportRow {
                ell: i + 2,
                n: 1 << (i + 2),
                h: 0.1f64.powi(i as i32 + 1),
                value: Complex64::new(-1.0 / 3.0 + i as f64 * 1e-17, 0.1),
                abs_err: 1e-3 / 9f64.powi(i as i32),
                rel_err: 2e-3 / 9f64.powi(i as i32),
                eoc: if i == 0 { None } else { Some(2.0 / 3.0) },
            });
        }
        ConvergenceReport {
            meta: ReportMeta {
                attractor: "cantor".into(),
                kernel: "phi-t(t=0)".into(),
                reference: Complex64::new(-0.3, 0.1),
                reference_source: "exact".into(),
                wall_time_s: 0.0,
            },
            rows: out,
        }
    }

    #[test]
    fn csv_round_trip() {
        let r = report(4);
        let mut buf = Vec::new();
        write_csv(&r, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("ell,N,h,value_re,value_im,abs_err,rel_err,eoc\n"));
        let back = read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, r.rows);
    }

    #[test]
    fn single_row_has_blank_eoc() {
        let mut buf = Vec::new();
        write_csv(&report(1), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let line = text.lines().nth(1).unwrap();
        assert!(line.ends_with(','));
    }

    #[test]
    fn plot_data_layout() {
        let a = report(2);
        let b = report(3);
        let mut buf = Vec::new();
        write_plot_data(&[("a", &a), ("b", &b)], ErrorMetric::Relative, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# series: a");
        assert_eq!(lines[1], "4 0.002");
        assert_eq!(lines[3], "");
        assert_eq!(lines[4], "# series: b");
        assert_eq!(lines.len(), 8);
    }

    #[test]
    fn unwritable_path_is_io_error() {
        let err = emit(&report(1), ReportFormat::Csv, Path::new("/nonexistent/dir/out.csv")).unwrap_err();
        assert_eq!(err.kind(), crate::error::ErrorKind::Io);
    }

    #[test]
    fn emit_to_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        emit(&report(3), ReportFormat::Csv, &path).unwrap();
        let back = read_csv(File::open(&path).unwrap()).unwrap();
        assert_eq!(back.len(), 3);
    }
}

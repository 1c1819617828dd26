//! CSV and JSON output.
//!
//! Floats are written in Rust's shortest round-trip form, so parsing an
//! emitted file gives back the exact values. Nothing time-dependent is
//! written; equal reports produce equal bytes.

use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{BerReport, HarnessError};

pub const CSV_HEADER: &str = "sigma_common,sigma_additive,kappa,delay,ber_base,ber_comp,ci_lo_base,ci_hi_base,ci_lo_comp,ci_hi_comp,case1,case2,case3,case4,seed";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

/// One line of the sweep table. Baseline columns are empty when the
/// baseline arm was not run; `kappa` is `inf` in the border-case mode.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub sigma_common: f64,
    pub sigma_additive: f64,
    pub kappa: f64,
    pub delay: i64,
    pub ber_base: Option<f64>,
    pub ber_comp: f64,
    pub ci_lo_base: Option<f64>,
    pub ci_hi_base: Option<f64>,
    pub ci_lo_comp: f64,
    pub ci_hi_comp: f64,
    pub cases: [u64; 4],
    pub seed: u64,
}

impl From<&BerReport> for CsvRow {
    fn from(r: &BerReport) -> Self {
        let est = &r.config.estimator;
        let h = &r.case_histogram;
        Self {
            sigma_common: r.config.channel.sigma_common,
            sigma_additive: r.config.channel.sigma_additive,
            kappa: if est.kappa_infinite { f64::INFINITY } else { est.kappa },
            delay: r.config.channel.delay_offset,
            ber_base: r.uncompensated.map(|a| a.ber),
            ber_comp: r.compensated.ber,
            ci_lo_base: r.uncompensated.map(|a| a.ci.lo),
            ci_hi_base: r.uncompensated.map(|a| a.ci.hi),
            ci_lo_comp: r.compensated.ci.lo,
            ci_hi_comp: r.compensated.ci.hi,
            cases: [h.no_correction_required, h.correction_successful, h.additional_errors, h.no_correction_possible],
            seed: r.seed,
        }
    }
}

struct Opt(Option<f64>);

impl fmt::Display for Opt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Some(v) => write!(f, "{v}"),
            None => Ok(()),
        }
    }
}

impl fmt::Display for CsvRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.sigma_common,
            self.sigma_additive,
            self.kappa,
            self.delay,
            Opt(self.ber_base),
            self.ber_comp,
            Opt(self.ci_lo_base),
            Opt(self.ci_hi_base),
            self.ci_lo_comp,
            self.ci_hi_comp,
            self.cases[0],
            self.cases[1],
            self.cases[2],
            self.cases[3],
            self.seed
        )
    }
}

impl FromStr for CsvRow {
    type Err = String;

    fn from_str(line: &str) -> Result<Self, Self::Err> {
        let cols: Vec<&str> = line.trim_end().split(',').collect();
        if cols.len() != 15 {
            return Err(format!("expected 15 columns, found {}", cols.len()));
        }
        fn num<T: FromStr>(s: &str, name: &str) -> Result<T, String> {
            s.parse().map_err(|_| format!("column {name}: cannot parse `{s}`"))
        }
        fn opt(s: &str, name: &str) -> Result<Option<f64>, String> {
            if s.is_empty() {
                Ok(None)
            } else {
                num(s, name).map(Some)
            }
        }
        Ok(Self {
            sigma_common: num(cols[0], "sigma_common")?,
            sigma_additive: num(cols[1], "sigma_additive")?,
            kappa: num(cols[2], "kappa")?,
            delay: num(cols[3], "delay")?,
            ber_base: opt(cols[4], "ber_base")?,
            ber_comp: num(cols[5], "ber_comp")?,
            ci_lo_base: opt(cols[6], "ci_lo_base")?,
            ci_hi_base: opt(cols[7], "ci_hi_base")?,
            ci_lo_comp: num(cols[8], "ci_lo_comp")?,
            ci_hi_comp: num(cols[9], "ci_hi_comp")?,
            cases: [num(cols[10], "case1")?, num(cols[11], "case2")?, num(cols[12], "case3")?, num(cols[13], "case4")?],
            seed: num(cols[14], "seed")?,
        })
    }
}

pub fn write_csv<W: Write>(reports: &[BerReport], mut w: W) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in reports {
        writeln!(w, "{}", CsvRow::from(r))?;
    }
    w.flush()
}

pub fn write_json<W: Write>(reports: &[BerReport], mut w: W) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut w, reports)?;
    writeln!(w)?;
    w.flush()
}

/// Writes `reports` to `path` in the given format.
pub fn emit(reports: &[BerReport], format: Format, path: &Path) -> Result<(), HarnessError> {
    let io_err = |source| HarnessError::Io { path: path.display().to_string(), source };
    let w = BufWriter::new(File::create(path).map_err(io_err)?);
    match format {
        Format::Csv => write_csv(reports, w),
        Format::Json => write_json(reports, w),
    }
    .map_err(io_err)
}

pub fn read_csv(path: &Path) -> Result<Vec<CsvRow>, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.display().to_string(), source })?;
    let parse_err = |reason: String| HarnessError::Parse { path: path.display().to_string(), reason };
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => return Err(parse_err(format!("unexpected header {other:?}"))),
    }
    lines.filter(|l| !l.is_empty()).map(|l| l.parse().map_err(parse_err)).collect()
}

/// Writes `(freq_hz, efficiency)` pairs under the header `freq_hz,efficiency`.
pub fn write_efficiency_csv(curve: &[(f64, f64)], path: &Path) -> Result<(), HarnessError> {
    let io_err = |source| HarnessError::Io { path: path.display().to_string(), source };
    let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
    (|| -> io::Result<()> {
        writeln!(w, "freq_hz,efficiency")?;
        for (f, e) in curve {
            writeln!(w, "{f},{e}")?;
        }
        w.flush()
    })()
    .map_err(io_err)
}

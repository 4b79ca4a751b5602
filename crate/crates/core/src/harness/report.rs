//! Convergence reports and their CSV / JSON renderings.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde_json::{json, Value};

use super::config::ReportFormat;
use crate::rational::{self, Rational};
use crate::{Error, Result};

pub const CSV_COLUMNS: [&str; 14] = [
    "word",
    "q",
    "n",
    "trials",
    "mc_mean_re",
    "mc_mean_im",
    "mc_stderr",
    "wick_re",
    "wick_im",
    "limit_re",
    "limit_im",
    "abs_error",
    "limit_regime",
    "error",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitRegime {
    Standard,
    /// Partial trace over a block with `d_q = 0`: normalized by `n_q` at finite
    /// size, but the limit is not asserted.
    OmittedCase,
}

impl LimitRegime {
    pub fn as_str(self) -> &'static str {
        match self {
            LimitRegime::Standard => "standard",
            LimitRegime::OmittedCase => "omitted-case",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(LimitRegime::Standard),
            "omitted-case" => Ok(LimitRegime::OmittedCase),
            other => Err(Error::Config(format!("unknown limit regime {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub word: String,
    pub q: usize,
    pub n: usize,
    pub trials: usize,
    pub mc_mean: Option<Complex64>,
    pub mc_stderr: Option<f64>,
    pub wick: Option<Rational>,
    pub limit: Option<Rational>,
    pub limit_regime: LimitRegime,
    pub error: Option<String>,
}

impl ReportRow {
    /// `|mc_mean - limit|` when both are present.
    pub fn abs_error(&self) -> Option<f64> {
        let (m, l) = (self.mc_mean?, self.limit.as_ref()?);
        Some((m - rational::to_f64(l)).norm())
    }

    /// `|wick - limit|` when both are present.
    pub fn wick_gap(&self) -> Option<Rational> {
        let d = self.wick.as_ref()? - self.limit.as_ref()?;
        Some(if d < Rational::from_integer(0.into()) { -d } else { d })
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvergenceReport {
    pub rows: Vec<ReportRow>,
}

fn float(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn exact(x: Option<&Rational>) -> String {
    x.map(rational::render_rational).unwrap_or_default()
}

fn exact_im(x: Option<&Rational>) -> String {
    x.map(|_| "0".to_string()).unwrap_or_default()
}

impl ConvergenceReport {
    fn records(&self) -> Vec<[String; 14]> {
        self.rows
            .iter()
            .map(|r| {
                [
                    r.word.clone(),
                    r.q.to_string(),
                    r.n.to_string(),
                    r.trials.to_string(),
                    float(r.mc_mean.map(|m| m.re)),
                    float(r.mc_mean.map(|m| m.im)),
                    float(r.mc_stderr),
                    exact(r.wick.as_ref()),
                    exact_im(r.wick.as_ref()),
                    exact(r.limit.as_ref()),
                    exact_im(r.limit.as_ref()),
                    float(r.abs_error()),
                    r.limit_regime.as_str().to_string(),
                    r.error.clone().unwrap_or_default(),
                ]
            })
            .collect()
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(CSV_COLUMNS).map_err(io)?;
        for rec in self.records() {
            w.write_record(&rec).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }

    /// Array of row objects keyed by the CSV column names; exact values stay strings.
    pub fn to_json(&self) -> Value {
        let opt_f = |x: Option<f64>| x.map_or(Value::Null, |v| json!(v));
        let opt_s = |x: String| if x.is_empty() { Value::Null } else { json!(x) };
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                json!({
                    "word": r.word,
                    "q": r.q,
                    "n": r.n,
                    "trials": r.trials,
                    "mc_mean_re": opt_f(r.mc_mean.map(|m| m.re)),
                    "mc_mean_im": opt_f(r.mc_mean.map(|m| m.im)),
                    "mc_stderr": opt_f(r.mc_stderr),
                    "wick_re": opt_s(exact(r.wick.as_ref())),
                    "wick_im": opt_s(exact_im(r.wick.as_ref())),
                    "limit_re": opt_s(exact(r.limit.as_ref())),
                    "limit_im": opt_s(exact_im(r.limit.as_ref())),
                    "abs_error": opt_f(r.abs_error()),
                    "limit_regime": r.limit_regime.as_str(),
                    "error": r.error.as_ref().map_or(Value::Null, |e| json!(e)),
                })
            })
            .collect();
        json!({ "rows": rows })
    }

    pub fn render(&self, format: ReportFormat) -> Result<String> {
        match format {
            ReportFormat::Csv => self.to_csv(),
            ReportFormat::Json => serde_json::to_string_pretty(&self.to_json())
                .map(|s| s + "\n")
                .map_err(|e| Error::Io(e.to_string())),
        }
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(text.as_bytes());
        let bad = |e: csv::Error| Error::Config(format!("report csv: {e}"));
        let header = rd.headers().map_err(bad)?.clone();
        if header.iter().ne(CSV_COLUMNS) {
            return Err(Error::Config(format!("unexpected report header {header:?}")));
        }
        let mut rows = Vec::new();
        for rec in rd.records() {
            let rec = rec.map_err(bad)?;
            let cell = |i: usize| rec.get(i).unwrap_or("");
            rows.push(row_from_cells(|name| {
                let i = CSV_COLUMNS.iter().position(|c| *c == name).expect("known column");
                let s = cell(i);
                (!s.is_empty()).then(|| s.to_string())
            })?);
        }
        Ok(ConvergenceReport { rows })
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let rows = value
            .get("rows")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Config("report json needs a rows array".into()))?;
        let rows = rows
            .iter()
            .map(|obj| {
                row_from_cells(|name| match obj.get(name) {
                    None | Some(Value::Null) => None,
                    Some(Value::String(s)) => Some(s.clone()),
                    Some(v) => Some(v.to_string()),
                })
            })
            .collect::<Result<_>>()?;
        Ok(ConvergenceReport { rows })
    }
}

fn row_from_cells(get: impl Fn(&str) -> Option<String>) -> Result<ReportRow> {
    let need = |name: &str| get(name).ok_or_else(|| Error::Config(format!("report row lacks {name}")));
    let int = |name: &str| -> Result<usize> {
        need(name)?.parse().map_err(|e| Error::Config(format!("{name}: {e}")))
    };
    let flt = |name: &str| -> Result<Option<f64>> {
        get(name)
            .map(|s| s.parse().map_err(|e| Error::Config(format!("{name}: {e}"))))
            .transpose()
    };
    let rat = |name: &str| get(name).map(|s| rational::parse_rational(&s)).transpose();
    let mc_mean = match (flt("mc_mean_re")?, flt("mc_mean_im")?) {
        (Some(re), Some(im)) => Some(Complex64::new(re, im)),
        _ => None,
    };
    Ok(ReportRow {
        word: need("word")?,
        q: int("q")?,
        n: int("n")?,
        trials: int("trials")?,
        mc_mean,
        mc_stderr: flt("mc_stderr")?,
        wick: rat("wick_re")?,
        limit: rat("limit_re")?,
        limit_regime: LimitRegime::parse(&need("limit_regime")?)?,
        error: get("error"),
    })
}

/// Writes `contents` next to `path` and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error.to_string()))?;
    Ok(())
}

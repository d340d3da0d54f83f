use super::{McReport, ReportRow};
use crate::error::{Error, Result};
use serde::Serialize;
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "md" | "markdown" => Ok(Self::Markdown),
            "json" => Ok(Self::Json),
            other => Err(Error::InvalidInput(format!("unknown format `{other}` (csv, markdown, json)"))),
        }
    }
}

const CSV_HEADER: [&str; 9] = ["scenario", "setting", "estimator", "n", "parameter", "bias", "rmse", "replications", "failures"];

#[derive(Serialize)]
struct JsonReport<'a> {
    schema_version: u32,
    scenario: &'a str,
    rows: &'a [ReportRow],
}

impl McReport {
    pub fn render(&self, format: ReportFormat) -> Result<String> {
        match format {
            ReportFormat::Csv => self.to_csv(),
            ReportFormat::Markdown => Ok(self.to_markdown()),
            ReportFormat::Json => serde_json::to_string_pretty(&JsonReport {
                schema_version: SCHEMA_VERSION,
                scenario: &self.scenario,
                rows: &self.rows,
            })
            .map(|s| s + "\n")
            .map_err(|e| Error::Io(e.to_string())),
        }
    }

    pub fn emit(&self, format: ReportFormat, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(self.render(format)?.as_bytes())?;
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(CSV_HEADER).map_err(err)?;
        for r in &self.rows {
            w.write_record([
                self.scenario.clone(),
                r.setting.clone(),
                r.estimator.clone(),
                r.n.to_string(),
                r.parameter.clone(),
                r.bias.to_string(),
                r.rmse.to_string(),
                r.replications.to_string(),
                r.failures.to_string(),
            ])
            .map_err(err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let header = rdr.headers().map_err(|e| Error::Parse { line: 1, message: e.to_string() })?.clone();
        if header.iter().collect::<Vec<_>>() != CSV_HEADER {
            return Err(Error::Parse { line: 1, message: format!("unexpected header {header:?}") });
        }
        let mut scenario = String::new();
        let mut rows = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let line = i + 2;
            let rec = rec.map_err(|e| Error::Parse { line, message: e.to_string() })?;
            let num = |k: usize| -> Result<f64> {
                rec[k].parse().map_err(|_| Error::Parse { line, message: format!("bad number `{}`", &rec[k]) })
            };
            let int = |k: usize| -> Result<usize> {
                rec[k].parse().map_err(|_| Error::Parse { line, message: format!("bad count `{}`", &rec[k]) })
            };
            scenario = rec[0].to_string();
            rows.push(ReportRow {
                setting: rec[1].to_string(),
                estimator: rec[2].to_string(),
                n: int(3)?,
                parameter: rec[4].to_string(),
                bias: num(5)?,
                rmse: num(6)?,
                replications: int(7)?,
                failures: int(8)?,
            });
        }
        Ok(Self { scenario, rows })
    }

    /// One table per setting: rows are sample sizes (and parameters), column
    /// groups are estimators with Bias and RMSE.
    pub fn to_markdown(&self) -> String {
        let mut out = format!("# {}\n", self.scenario);
        let mut settings: Vec<&str> = Vec::new();
        for r in &self.rows {
            if !settings.contains(&r.setting.as_str()) {
                settings.push(&r.setting);
            }
        }
        for setting in settings {
            let rows: Vec<&ReportRow> = self.rows.iter().filter(|r| r.setting == setting).collect();
            let mut estimators: Vec<&str> = Vec::new();
            let mut keys: Vec<(usize, &str)> = Vec::new();
            for r in &rows {
                if !estimators.contains(&r.estimator.as_str()) {
                    estimators.push(&r.estimator);
                }
                if !keys.contains(&(r.n, r.parameter.as_str())) {
                    keys.push((r.n, &r.parameter));
                }
            }
            let _ = write!(out, "\n## {setting}\n\n| n | param |");
            for e in &estimators {
                let _ = write!(out, " {e} Bias | {e} RMSE |");
            }
            out.push_str("\n|---:|:---|");
            out.push_str(&"---:|---:|".repeat(estimators.len()));
            out.push('\n');
            for (n, p) in keys {
                let _ = write!(out, "| {n} | {p} |");
                for e in &estimators {
                    match rows.iter().find(|r| r.n == n && r.parameter == p && r.estimator == *e) {
                        Some(r) => {
                            let _ = write!(out, " {:.3} | {:.3} |", r.bias, r.rmse);
                        }
                        None => out.push_str(" | |"),
                    }
                }
                out.push('\n');
            }
            let failures: Vec<String> = estimators
                .iter()
                .filter_map(|e| {
                    let f: usize = rows.iter().filter(|r| r.estimator == *e && r.parameter == rows[0].parameter).map(|r| r.failures).sum();
                    (f > 0).then(|| format!("{e}: {f}"))
                })
                .collect();
            if !failures.is_empty() {
                let _ = writeln!(out, "\nFailed fits (excluded): {}", failures.join(", "));
            }
        }
        out
    }
}

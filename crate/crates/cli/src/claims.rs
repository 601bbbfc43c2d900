//! Claims files: `z,status[,beta][,ultimate][,cohort]`, one claim per row,
//! `status` 1 for a closed claim and 0 for an open one.

use std::io::{Read, Write};

use tailbridge::simulation::PortfolioClaim;
use tailbridge::{CensoredSample, Observation};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct ClaimRow {
    pub z: f64,
    pub uncensored: bool,
    pub beta: Option<f64>,
    pub ultimate: Option<f64>,
    pub cohort: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ClaimsFile {
    pub rows: Vec<ClaimRow>,
    pub has_ultimate: bool,
    pub has_cohort: bool,
}

fn parse_positive(field: &str, name: &str, line: usize) -> Result<f64, CliError> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| CliError::input(format!("line {line}: {name} {field:?} is not a number")))?;
    if !(v.is_finite() && v > 0.0) {
        return Err(CliError::input(format!("line {line}: {name} must be positive, got {v}")));
    }
    Ok(v)
}

fn optional(field: Option<&str>) -> Option<&str> {
    field.map(str::trim).filter(|f| !f.is_empty())
}

impl ClaimsFile {
    pub fn read<R: Read>(reader: R) -> Result<Self, CliError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers().map_err(|e| CliError::input(format!("cannot read header: {e}")))?.clone();
        let col = |name: &str| headers.iter().position(|h| h == name);
        let z_col = col("z").ok_or_else(|| CliError::input("header must contain a `z` column"))?;
        let status_col = col("status").ok_or_else(|| CliError::input("header must contain a `status` column"))?;
        let (beta_col, ult_col, cohort_col) = (col("beta"), col("ultimate"), col("cohort"));

        let mut rows = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let line = i + 2;
            let rec = rec.map_err(|e| CliError::input(format!("line {line}: {e}")))?;
            let get = |c: usize| rec.get(c).unwrap_or("");
            let z = parse_positive(get(z_col), "z", line)?;
            let uncensored = match get(status_col).trim() {
                "1" => true,
                "0" => false,
                other => return Err(CliError::input(format!("line {line}: status must be 0 or 1, got {other:?}"))),
            };
            let beta = match optional(beta_col.map(get)) {
                Some(f) => Some(parse_positive(f, "beta", line)?),
                None => None,
            };
            let ultimate = match optional(ult_col.map(get)) {
                Some(f) => Some(parse_positive(f, "ultimate", line)?),
                None if uncensored => ult_col.map(|_| z),
                None => None,
            };
            if ult_col.is_some() && ultimate.is_none() {
                return Err(CliError::input(format!("line {line}: open claim without an ultimate")));
            }
            let cohort = match optional(cohort_col.map(get)) {
                Some(f) => Some(
                    f.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| CliError::input(format!("line {line}: cohort {f:?} is not a number")))?,
                ),
                None if cohort_col.is_some() => {
                    return Err(CliError::input(format!("line {line}: missing cohort")));
                }
                None => None,
            };
            rows.push(ClaimRow { z, uncensored, beta, ultimate, cohort });
        }
        if rows.is_empty() {
            return Err(CliError::input("the claims file has no rows"));
        }
        Ok(Self { rows, has_ultimate: ult_col.is_some(), has_cohort: cohort_col.is_some() })
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self, CliError> {
        let file = std::fs::File::open(path)
            .map_err(|e| CliError::input(format!("cannot open {}: {e}", path.display())))?;
        Self::read(file)
    }

    /// Every open claim needs an expert index unless a global one is given.
    pub fn require_betas(&self, global: Option<f64>) -> Result<(), CliError> {
        if global.is_some() {
            return Ok(());
        }
        match self.rows.iter().position(|r| !r.uncensored && r.beta.is_none()) {
            Some(i) => Err(CliError::input(format!(
                "line {}: open claim without beta (add a beta column or pass --beta)",
                i + 2
            ))),
            None => Ok(()),
        }
    }

    pub fn sample(&self) -> Result<CensoredSample, CliError> {
        let obs = self
            .rows
            .iter()
            .map(|r| if r.uncensored { Observation::closed(r.z) } else { Observation::open(r.z, r.beta) })
            .collect();
        CensoredSample::new(obs).map_err(CliError::input)
    }

    pub fn ultimates(&self) -> Option<Vec<f64>> {
        if !self.has_ultimate {
            return None;
        }
        self.rows.iter().map(|r| r.ultimate).collect()
    }

    /// Rows whose cohort is at most `cutoff`.
    pub fn cohort_at_most(&self, cutoff: f64) -> Result<Self, CliError> {
        if !self.has_cohort {
            return Err(CliError::input("the claims file has no cohort column"));
        }
        let rows = self.rows.iter().filter(|r| r.cohort.is_some_and(|c| c <= cutoff)).cloned().collect();
        Ok(Self { rows, ..self.clone() })
    }
}

pub fn write_portfolio<W: Write>(claims: &[PortfolioClaim], out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["z", "status", "beta", "ultimate", "cohort"]).map_err(CliError::io)?;
    for c in claims {
        w.write_record([
            fmt_num(c.z),
            if c.uncensored { "1" } else { "0" }.to_string(),
            fmt_num(c.beta),
            fmt_num(c.ultimate),
            c.cohort.to_string(),
        ])
        .map_err(CliError::io)?;
    }
    w.flush().map_err(CliError::io)
}

/// Shortest decimal that parses back to the same `f64`.
pub fn fmt_num(x: f64) -> String {
    format!("{x:?}")
}

/// As [`fmt_num`], with an empty cell for a missing value.
pub fn fmt_cell(x: Option<f64>) -> String {
    x.filter(|v| v.is_finite()).map(fmt_num).unwrap_or_default()
}

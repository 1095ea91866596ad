use std::collections::HashSet;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Real-valued feature table with optional labels, before discretization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawTable {
    column_names: Vec<String>,
    values: Vec<f64>,
    /// Default label per row. `None` inside the vector marks an unobserved outcome.
    pub y: Option<Vec<Option<u8>>>,
    pub r: Option<Vec<u8>>,
    pub policy: Option<Vec<usize>>,
    /// Rows removed by the missing-value filter while loading.
    pub dropped_rows: usize,
}

impl RawTable {
    /// Builds a table from row-major `values`; every row must hold exactly
    /// `column_names.len()` finite entries.
    pub fn new(column_names: Vec<String>, values: Vec<f64>) -> Result<Self> {
        let d = column_names.len();
        if d == 0 && !values.is_empty() {
            return Err(Error::Shape("values without feature columns".into()));
        }
        if d > 0 && !values.len().is_multiple_of(d) {
            return Err(Error::Shape(format!(
                "{} values do not form rows of {d} features",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Shape("non-finite feature value".into()));
        }
        Ok(RawTable {
            column_names,
            values,
            y: None,
            r: None,
            policy: None,
            dropped_rows: 0,
        })
    }

    pub fn from_rows(column_names: Vec<String>, rows: &[Vec<f64>]) -> Result<Self> {
        let d = column_names.len();
        if let Some(bad) = rows.iter().position(|r| r.len() != d) {
            return Err(Error::Shape(format!("row {bad} does not have {d} values")));
        }
        RawTable::new(column_names, rows.concat())
    }

    pub fn with_y(mut self, y: Vec<Option<u8>>) -> Result<Self> {
        self.check_len("y", y.len())?;
        self.y = Some(y);
        Ok(self)
    }

    pub fn with_r(mut self, r: Vec<u8>) -> Result<Self> {
        self.check_len("r", r.len())?;
        self.r = Some(r);
        Ok(self)
    }

    pub fn with_policy(mut self, policy: Vec<usize>) -> Result<Self> {
        self.check_len("policy", policy.len())?;
        if policy.contains(&0) {
            return Err(Error::Shape("policy ids start at 1".into()));
        }
        self.policy = Some(policy);
        Ok(self)
    }

    fn check_len(&self, what: &str, len: usize) -> Result<()> {
        if len != self.n_rows() {
            return Err(Error::Shape(format!(
                "{what} has {len} entries for {} rows",
                self.n_rows()
            )));
        }
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        if self.column_names.is_empty() {
            0
        } else {
            self.values.len() / self.column_names.len()
        }
    }

    pub fn n_features(&self) -> usize {
        self.column_names.len()
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.column_names.iter().position(|c| c == name)
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let d = self.n_features();
        &self.values[i * d..(i + 1) * d]
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().skip(j).step_by(self.n_features()).copied()
    }

    /// New table holding `rows` (in the given order) with all label columns carried along.
    pub fn select_rows(&self, rows: &[usize]) -> RawTable {
        let mut values = Vec::with_capacity(rows.len() * self.n_features());
        for &i in rows {
            values.extend_from_slice(self.row(i));
        }
        RawTable {
            column_names: self.column_names.clone(),
            values,
            y: self.y.as_ref().map(|y| rows.iter().map(|&i| y[i]).collect()),
            r: self.r.as_ref().map(|r| rows.iter().map(|&i| r[i]).collect()),
            policy: self.policy.as_ref().map(|p| rows.iter().map(|&i| p[i]).collect()),
            dropped_rows: 0,
        }
    }

    /// Stacks tables with identical columns. Label columns survive only if every part has them.
    pub fn concat(parts: &[RawTable]) -> Result<RawTable> {
        let first = parts
            .first()
            .ok_or_else(|| Error::Shape("nothing to concatenate".into()))?;
        if parts.iter().any(|p| p.column_names != first.column_names) {
            return Err(Error::Shape("tables have different columns".into()));
        }
        let mut out = RawTable::new(
            first.column_names.clone(),
            parts.iter().flat_map(|p| p.values.iter().copied()).collect(),
        )?;
        if parts.iter().all(|p| p.y.is_some()) {
            out.y = Some(parts.iter().flat_map(|p| p.y.clone().unwrap()).collect());
        }
        if parts.iter().all(|p| p.r.is_some()) {
            out.r = Some(parts.iter().flat_map(|p| p.r.clone().unwrap()).collect());
        }
        if parts.iter().all(|p| p.policy.is_some()) {
            out.policy = Some(parts.iter().flat_map(|p| p.policy.clone().unwrap()).collect());
        }
        out.dropped_rows = parts.iter().map(|p| p.dropped_rows).sum();
        Ok(out)
    }

    /// Writes the table with the column conventions accepted by [`load_csv`].
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header: Vec<String> = self.column_names.clone();
        if self.y.is_some() {
            header.push("y".into());
        }
        if self.r.is_some() {
            header.push("r".into());
        }
        if self.policy.is_some() {
            header.push("policy".into());
        }
        out.write_record(&header).map_err(csv_write_error)?;
        for i in 0..self.n_rows() {
            let mut record: Vec<String> = self.row(i).iter().map(|v| format_real(*v)).collect();
            if let Some(y) = &self.y {
                record.push(y[i].map(|v| v.to_string()).unwrap_or_default());
            }
            if let Some(r) = &self.r {
                record.push(r[i].to_string());
            }
            if let Some(p) = &self.policy {
                record.push(p[i].to_string());
            }
            out.write_record(&record).map_err(csv_write_error)?;
        }
        out.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }
}

/// Shortest representation that parses back to the same `f64`.
pub(crate) fn format_real(v: f64) -> String {
    format!("{v:?}")
}

fn csv_write_error(e: csv::Error) -> Error {
    Error::Parse {
        line: e.position().map(|p| p.line()).unwrap_or(0),
        message: e.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnRole {
    Feature,
    Default,
    Rejection,
    Policy,
    Ignore,
}

impl std::str::FromStr for ColumnRole {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "feature" => Ok(ColumnRole::Feature),
            "default" | "y" => Ok(ColumnRole::Default),
            "rejection" | "r" => Ok(ColumnRole::Rejection),
            "policy" => Ok(ColumnRole::Policy),
            "ignore" => Ok(ColumnRole::Ignore),
            other => Err(Error::Schema(format!("unknown column role `{other}`"))),
        }
    }
}

/// Role of every column in a CSV file, keyed by header name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvSchema {
    pub columns: Vec<(String, ColumnRole)>,
}

impl CsvSchema {
    /// `y`, `r` and `policy` take their label roles; every other column is a feature.
    pub fn infer<S: AsRef<str>>(header: &[S]) -> Self {
        CsvSchema {
            columns: header
                .iter()
                .map(|h| {
                    let h = h.as_ref();
                    let role = match h {
                        "y" => ColumnRole::Default,
                        "r" => ColumnRole::Rejection,
                        "policy" => ColumnRole::Policy,
                        _ => ColumnRole::Feature,
                    };
                    (h.to_string(), role)
                })
                .collect(),
        }
    }

    /// Parses `name:role` pairs, e.g. `["fico:feature", "y:default"]`.
    pub fn parse<S: AsRef<str>>(specs: &[S]) -> Result<Self> {
        let columns = specs
            .iter()
            .map(|s| {
                let s = s.as_ref();
                let (name, role) = s
                    .rsplit_once(':')
                    .ok_or_else(|| Error::Schema(format!("expected name:role, got `{s}`")))?;
                Ok((name.to_string(), role.parse()?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CsvSchema { columns })
    }

    fn role_of(&self, name: &str) -> Option<ColumnRole> {
        self.columns.iter().find(|(n, _)| n == name).map(|(_, r)| *r)
    }
}

fn is_missing(field: &str) -> bool {
    matches!(field.trim(), "" | "NA" | "N/A" | "NaN" | "nan" | "null" | "NULL" | "?")
}

/// Reads a headered CSV file. Rows with a missing feature, rejection or
/// policy value are dropped and counted in `dropped_rows`; an empty default
/// label is kept as an unobserved outcome.
pub fn load_csv(path: impl AsRef<Path>, schema: Option<&CsvSchema>) -> Result<RawTable> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, schema)
}

pub fn read_csv<R: Read>(reader: R, schema: Option<&CsvSchema>) -> Result<RawTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::Parse {
            line: 1,
            message: e.to_string(),
        })?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let schema = match schema {
        Some(s) => s.clone(),
        None => CsvSchema::infer(&header),
    };

    let mut seen = HashSet::new();
    let mut roles = Vec::with_capacity(header.len());
    for h in &header {
        if !seen.insert(h.as_str()) {
            return Err(Error::Schema(format!("duplicate column `{h}`")));
        }
        let role = schema
            .role_of(h)
            .ok_or_else(|| Error::Schema(format!("column `{h}` has no role in the schema")))?;
        roles.push(role);
    }
    for (name, _) in &schema.columns {
        if !header.iter().any(|h| h == name) {
            return Err(Error::Schema(format!("schema column `{name}` missing from header")));
        }
    }
    for role in [ColumnRole::Default, ColumnRole::Rejection, ColumnRole::Policy] {
        if roles.iter().filter(|r| **r == role).count() > 1 {
            return Err(Error::Schema(format!("more than one {role:?} column")));
        }
    }

    let feature_names: Vec<String> = header
        .iter()
        .zip(&roles)
        .filter(|(_, r)| **r == ColumnRole::Feature)
        .map(|(h, _)| h.clone())
        .collect();
    let has = |role| roles.contains(&role);
    let mut values = Vec::new();
    let mut y = has(ColumnRole::Default).then(Vec::new);
    let mut r = has(ColumnRole::Rejection).then(Vec::new);
    let mut policy = has(ColumnRole::Policy).then(Vec::new);
    let mut dropped = 0usize;

    for record in rdr.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map(|p| p.line()).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() != header.len() {
            return Err(Error::Parse {
                line,
                message: format!("expected {} fields, found {}", header.len(), record.len()),
            });
        }
        let parse_err = |col: &str, field: &str| Error::Parse {
            line,
            message: format!("column `{col}`: cannot parse `{field}`"),
        };

        let mut row = Vec::with_capacity(feature_names.len());
        let mut row_y = None;
        let mut row_r = None;
        let mut row_policy = None;
        let mut missing = false;
        for ((field, role), col) in record.iter().zip(&roles).zip(&header) {
            let field = field.trim();
            match role {
                ColumnRole::Ignore => {}
                ColumnRole::Default => {
                    if !is_missing(field) {
                        row_y = Some(parse_binary(field).ok_or_else(|| parse_err(col, field))?);
                    }
                }
                _ if is_missing(field) => missing = true,
                ColumnRole::Feature => {
                    let v: f64 = field.parse().map_err(|_| parse_err(col, field))?;
                    if !v.is_finite() {
                        missing = true;
                    }
                    row.push(v);
                }
                ColumnRole::Rejection => {
                    row_r = Some(parse_binary(field).ok_or_else(|| parse_err(col, field))?);
                }
                ColumnRole::Policy => {
                    let p: usize = field.parse().map_err(|_| parse_err(col, field))?;
                    if p == 0 {
                        return Err(parse_err(col, field));
                    }
                    row_policy = Some(p);
                }
            }
        }
        // an approved row without an outcome is incomplete
        if row_y.is_none() && y.is_some() && row_r.unwrap_or(0) == 0 {
            missing = true;
        }
        if missing {
            dropped += 1;
            continue;
        }
        values.extend(row);
        if let Some(y) = y.as_mut() {
            y.push(row_y);
        }
        if let Some(r) = r.as_mut() {
            r.push(row_r.unwrap());
        }
        if let Some(p) = policy.as_mut() {
            p.push(row_policy.unwrap());
        }
    }

    let mut table = RawTable::new(feature_names, values)?;
    table.y = y;
    table.r = r;
    table.policy = policy;
    table.dropped_rows = dropped;
    Ok(table)
}

fn parse_binary(field: &str) -> Option<u8> {
    match field {
        "0" | "0.0" => Some(0),
        "1" | "1.0" => Some(1),
        _ => None,
    }
}

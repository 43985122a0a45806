//! Series ingestion: plain one-value-per-line files and CSV columns.

use std::path::{Path, PathBuf};

use mprofile::TimeSeries;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Column {
    Index(usize),
    Name(String),
}

impl Column {
    /// A bare integer selects by 0-based position, anything else by header name.
    pub fn parse(selector: &str) -> Self {
        selector
            .parse()
            .map_or_else(|_| Column::Name(selector.to_string()), Column::Index)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeriesFormat {
    /// One decimal value per line; blank lines and `#` comments are skipped.
    Plain,
    /// One column of a CSV file, with an optional header row.
    Csv { column: Column },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesFile {
    pub path: PathBuf,
    pub format: SeriesFormat,
}

impl SeriesFile {
    /// CSV when a column is given or the file ends in `.csv`, plain otherwise.
    pub fn new(path: impl Into<PathBuf>, column: Option<&str>) -> Self {
        let path = path.into();
        let is_csv = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
        let format = match column {
            Some(c) => SeriesFormat::Csv {
                column: Column::parse(c),
            },
            None if is_csv => SeriesFormat::Csv {
                column: Column::Index(0),
            },
            None => SeriesFormat::Plain,
        };
        Self { path, format }
    }

    pub fn read_values(&self) -> Result<Vec<f64>> {
        let text = std::fs::read_to_string(&self.path).map_err(|source| CliError::Read {
            path: self.path.clone(),
            source,
        })?;
        match &self.format {
            SeriesFormat::Plain => parse_plain(&text, &self.path),
            SeriesFormat::Csv { column } => parse_csv(&text, column, &self.path),
        }
    }

    pub fn read(&self) -> Result<TimeSeries> {
        Ok(TimeSeries::new(self.read_values()?)?)
    }
}

fn parse_error(path: &Path, line: usize, message: String) -> CliError {
    CliError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    }
}

fn parse_value(field: &str, path: &Path, line: usize) -> Result<f64> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| parse_error(path, line, format!("not a number: {:?}", field.trim())))?;
    if !v.is_finite() {
        return Err(parse_error(path, line, format!("non-finite value {v}")));
    }
    Ok(v)
}

pub fn parse_plain(text: &str, path: &Path) -> Result<Vec<f64>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| {
            let l = l.trim();
            !l.is_empty() && !l.starts_with('#')
        })
        .map(|(k, l)| parse_value(l, path, k + 1))
        .collect()
}

pub fn parse_csv(text: &str, column: &Column, path: &Path) -> Result<Vec<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut values = Vec::new();
    let mut index = match column {
        Column::Index(i) => Some(*i),
        Column::Name(_) => None,
    };
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(row + 1, |p| p.line() as usize);
            parse_error(path, line, e.to_string())
        })?;
        let line = record.position().map_or(row + 1, |p| p.line() as usize);
        let col = match (index, column) {
            (Some(i), _) => i,
            (None, Column::Name(name)) => {
                let found = record.iter().position(|h| h == name).ok_or_else(|| {
                    CliError::Params(format!("{}: no column named {name:?}", path.display()))
                })?;
                index = Some(found);
                continue;
            }
            (None, Column::Index(_)) => unreachable!(),
        };
        let field = record
            .get(col)
            .ok_or_else(|| parse_error(path, line, format!("row has no column {col}")))?;
        if row == 0 && matches!(column, Column::Index(_)) && field.parse::<f64>().is_err() {
            // header row
            continue;
        }
        values.push(parse_value(field, path, line)?);
    }
    Ok(values)
}

//! UCR-style dataset loading and normalization helpers.
//!
//! A record is one line: the class label followed by the samples, separated
//! by a configurable delimiter. Lines may have different lengths.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Guard below which a window is treated as constant by [`znormalize`].
pub const DEFAULT_EPSILON: f64 = 1e-8;

/// A univariate series with an optional integer-coded label.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
    label: Option<usize>,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>, label: Option<usize>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::config("time series must contain at least one value"));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::config(format!(
                "time series value at index {pos} is not finite"
            )));
        }
        Ok(TimeSeries { values, label })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn label(&self) -> Option<usize> {
        self.label
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Field separator of a UCR text file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Delimiter {
    #[default]
    Comma,
    /// Any run of spaces or tabs.
    Whitespace,
    Char(char),
}

impl FromStr for Delimiter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "," | "comma" => Ok(Delimiter::Comma),
            "whitespace" | "space" | " " | "ws" => Ok(Delimiter::Whitespace),
            "tab" | "\t" => Ok(Delimiter::Char('\t')),
            other => {
                let mut chars = other.chars();
                match (chars.next(), chars.next()) {
                    (Some(c), None) => Ok(Delimiter::Char(c)),
                    _ => Err(Error::config(format!("unknown delimiter {other:?}"))),
                }
            }
        }
    }
}

impl fmt::Display for Delimiter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Delimiter::Comma => f.write_str(","),
            Delimiter::Whitespace => f.write_str("whitespace"),
            Delimiter::Char(c) => write!(f, "{c}"),
        }
    }
}

impl Delimiter {
    fn split<'a>(&self, line: &'a str) -> Box<dyn Iterator<Item = &'a str> + 'a> {
        match *self {
            Delimiter::Comma => Box::new(line.split(',').map(str::trim)),
            Delimiter::Whitespace => Box::new(line.split_whitespace()),
            Delimiter::Char(c) => Box::new(line.split(c).map(str::trim)),
        }
    }

    fn separator(&self) -> char {
        match *self {
            Delimiter::Comma => ',',
            Delimiter::Whitespace => ' ',
            Delimiter::Char(c) => c,
        }
    }
}

/// A collection of series with string class names mapped to dense codes in
/// first-appearance order.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    series: Vec<TimeSeries>,
    classes: Vec<String>,
    max_length: usize,
}

impl Dataset {
    /// Builds a dataset from `(label, values)` pairs.
    pub fn from_labeled<I, S>(items: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Vec<f64>)>,
        S: AsRef<str>,
    {
        let mut builder = ClassIndex::default();
        let mut series = Vec::new();
        for (label, values) in items {
            let code = builder.code(label.as_ref());
            series.push(TimeSeries::new(values, Some(code))?);
        }
        Self::from_parts(series, builder.names)
    }

    /// Builds a dataset of unlabeled series.
    pub fn unlabeled(values: Vec<Vec<f64>>) -> Result<Self> {
        let series = values
            .into_iter()
            .map(|v| TimeSeries::new(v, None))
            .collect::<Result<Vec<_>>>()?;
        Self::from_parts(series, Vec::new())
    }

    pub fn from_parts(series: Vec<TimeSeries>, classes: Vec<String>) -> Result<Self> {
        if series.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if let Some(bad) = series
            .iter()
            .filter_map(TimeSeries::label)
            .find(|&code| code >= classes.len())
        {
            return Err(Error::config(format!(
                "label code {bad} has no class name ({} classes)",
                classes.len()
            )));
        }
        let max_length = series.iter().map(TimeSeries::len).max().unwrap_or(0);
        Ok(Dataset {
            series,
            classes,
            max_length,
        })
    }

    pub fn series(&self) -> &[TimeSeries] {
        &self.series
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn max_length(&self) -> usize {
        self.max_length
    }

    pub fn min_length(&self) -> usize {
        self.series.iter().map(TimeSeries::len).min().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }

    pub fn class_name(&self, code: usize) -> Option<&str> {
        self.classes.get(code).map(String::as_str)
    }

    pub fn label_name(&self, index: usize) -> Option<&str> {
        self.series
            .get(index)
            .and_then(TimeSeries::label)
            .and_then(|c| self.class_name(c))
    }

    /// Integer label codes; fails if any series is unlabeled.
    pub fn label_codes(&self) -> Result<Vec<usize>> {
        self.series
            .iter()
            .enumerate()
            .map(|(i, s)| {
                s.label()
                    .ok_or_else(|| Error::config(format!("series {i} has no label")))
            })
            .collect()
    }
}

#[derive(Default)]
struct ClassIndex {
    names: Vec<String>,
    lookup: HashMap<String, usize>,
}

impl ClassIndex {
    fn code(&mut self, raw: &str) -> usize {
        let name = canonical_label(raw);
        if let Some(&code) = self.lookup.get(&name) {
            return code;
        }
        let code = self.names.len();
        self.lookup.insert(name.clone(), code);
        self.names.push(name);
        code
    }
}

/// Integral numeric labels ("1.0000000e+00", "2.0") are rendered as plain
/// integers so the same class gets the same name regardless of file flavour.
fn canonical_label(raw: &str) -> String {
    match raw.parse::<f64>() {
        Ok(v) if v.is_finite() && v.fract() == 0.0 && v.abs() < 1e15 => {
            format!("{}", v as i64)
        }
        _ => raw.to_string(),
    }
}

/// Parses UCR text already held in memory.
pub fn parse_dataset(text: &str, delimiter: Delimiter) -> Result<Dataset> {
    let mut classes = ClassIndex::default();
    let mut series = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = delimiter.split(line);
        let label = fields.next().unwrap_or_default();
        let mut values = Vec::new();
        for (col, token) in fields.enumerate() {
            let column = col + 2;
            if token.is_empty() && delimiter != Delimiter::Whitespace {
                // tolerate a trailing delimiter
                continue;
            }
            let v: f64 = token.parse().map_err(|_| Error::ParseValue {
                line: line_no,
                column,
                token: token.to_string(),
            })?;
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    line: line_no,
                    column,
                    token: token.to_string(),
                });
            }
            values.push(v);
        }
        if values.is_empty() {
            return Err(Error::LabelOnly { line: line_no });
        }
        let code = classes.code(label);
        series.push(TimeSeries {
            values,
            label: Some(code),
        });
    }
    Dataset::from_parts(series, classes.names)
}

/// Reads a UCR-format file.
pub fn load_dataset(path: impl AsRef<Path>, delimiter: Delimiter) -> Result<Dataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_dataset(&text, delimiter)
}

/// Writes a dataset back out in UCR format using shortest round-trip float
/// formatting. Unlabeled series are written with the label `?`.
pub fn write_dataset<W: Write>(
    mut out: W,
    data: &Dataset,
    delimiter: Delimiter,
) -> std::io::Result<()> {
    let sep = delimiter.separator();
    for s in data.series() {
        let label = s
            .label()
            .and_then(|c| data.class_name(c))
            .unwrap_or("?");
        write!(out, "{label}")?;
        for v in s.values() {
            write!(out, "{sep}{v}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Z-normalizes with the population standard deviation. Inputs whose standard
/// deviation falls below `epsilon` map to all zeros.
pub fn znormalize(values: &[f64], epsilon: f64) -> Vec<f64> {
    let mut out = values.to_vec();
    znormalize_in_place(&mut out, epsilon);
    out
}

pub(crate) fn znormalize_in_place(values: &mut [f64], epsilon: f64) {
    if values.is_empty() {
        return;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let std = var.sqrt();
    if std < epsilon {
        values.iter_mut().for_each(|v| *v = 0.0);
    } else {
        values.iter_mut().for_each(|v| *v = (*v - mean) / std);
    }
}

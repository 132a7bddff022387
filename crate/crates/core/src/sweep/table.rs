//! CSV tables: what sweeps emit and what the optimum search reads back.

use std::io::{Read, Write};

use crate::error::{Error, Result};

/// A header row plus string cells. Numeric cells are written with the
/// shortest representation that round-trips the `f64` exactly.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// Which way [`find_optimum`] searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    Minimize,
    Maximize,
}

impl Objective {
    /// Efficiencies and harvested power are maximized, everything else
    /// (outage probabilities) minimized.
    pub fn for_column(column: &str) -> Self {
        match column {
            "se" | "ee" | "harvest_power_mean" => Objective::Maximize,
            _ => Objective::Minimize,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    /// Zero-based data row.
    pub row: usize,
    pub value: f64,
    /// Value of the swept variable on that row, if the table has one.
    pub argument: Option<f64>,
}

/// Column names a sweep may use for its swept variable.
pub const SWEPT_COLUMNS: [&str; 4] = ["alpha", "rho", "power_db", "relay_offset"];

pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

impl Table {
    pub fn new(headers: Vec<String>) -> Self {
        Self {
            headers,
            rows: Vec::new(),
        }
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    /// The column parsed as numbers.
    pub fn numeric_column(&self, name: &str) -> Result<Vec<f64>> {
        let idx = self.column_index(name)?;
        self.rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let cell = row.get(idx).map(String::as_str).unwrap_or("");
                cell.trim().parse::<f64>().map_err(|_| {
                    Error::Table(format!(
                        "row {}: column `{name}` is not numeric: {cell:?}",
                        i + 1
                    ))
                })
            })
            .collect()
    }

    pub fn swept_column(&self) -> Option<&str> {
        self.headers
            .iter()
            .find(|h| SWEPT_COLUMNS.contains(&h.as_str()))
            .map(String::as_str)
    }

    /// Rows whose `scheme` cell equals `scheme`.
    pub fn filter_scheme(&self, scheme: &str) -> Result<Table> {
        let idx = self.column_index("scheme")?;
        Ok(Table {
            headers: self.headers.clone(),
            rows: self
                .rows
                .iter()
                .filter(|r| r.get(idx).map(String::as_str) == Some(scheme))
                .cloned()
                .collect(),
        })
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        let map = |e: csv::Error| Error::Table(e.to_string());
        w.write_record(&self.headers).map_err(map)?;
        for row in &self.rows {
            w.write_record(row).map_err(map)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Table(e.to_string()))
    }

    /// Reads a CSV document with a mandatory header row. Every data row must
    /// have as many cells as the header.
    pub fn read_csv<R: Read>(input: R) -> Result<Table> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(input);
        let headers: Vec<String> = r
            .headers()
            .map_err(|e| Error::Table(e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        if headers.is_empty() || headers.iter().all(String::is_empty) {
            return Err(Error::Table("missing header row".into()));
        }
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(|e| Error::Table(e.to_string()))?;
            rows.push(rec.iter().map(str::to_string).collect());
        }
        Ok(Table { headers, rows })
    }

    pub fn parse(text: &str) -> Result<Table> {
        Self::read_csv(text.as_bytes())
    }
}

/// Grid argmin/argmax of `column`. Ties go to the lowest row index; NaN cells
/// are skipped.
pub fn find_optimum(table: &Table, column: &str, objective: Objective) -> Result<Optimum> {
    let values = table.numeric_column(column)?;
    if values.is_empty() {
        return Err(Error::Table("table has no data rows".into()));
    }
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in values.iter().enumerate() {
        if v.is_nan() {
            continue;
        }
        let better = match best {
            None => true,
            Some((_, b)) => match objective {
                Objective::Minimize => v < b,
                Objective::Maximize => v > b,
            },
        };
        if better {
            best = Some((i, v));
        }
    }
    let (row, value) =
        best.ok_or_else(|| Error::Numerical(format!("column `{column}` has no numeric values")))?;
    let argument = match table.swept_column() {
        Some(name) => table.numeric_column(name).ok().map(|c| c[row]),
        None => None,
    };
    Ok(Optimum {
        row,
        value,
        argument,
    })
}

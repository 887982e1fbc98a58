//! CSV input helpers: comma-separated, header row required, UTF-8, '.'
//! decimal separator.

use anyhow::{bail, Context, Result};
use std::path::Path;

pub struct CsvTable {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn read(path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_path(path)
            .with_context(|| format!("cannot open {}", path.display()))?;
        let headers: Vec<String> = reader
            .headers()
            .context("missing header row")?
            .iter()
            .map(str::to_string)
            .collect();
        let mut rows = Vec::new();
        for (idx, record) in reader.records().enumerate() {
            let record = record.with_context(|| format!("malformed CSV record at row {idx}"))?;
            let row = record
                .iter()
                .enumerate()
                .map(|(col, field)| {
                    field.parse::<f64>().with_context(|| {
                        format!(
                            "row {idx}, column '{}': '{field}' is not a number",
                            headers.get(col).map_or("?", String::as_str)
                        )
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            if row.len() != headers.len() {
                bail!("row {idx} has {} fields, expected {}", row.len(), headers.len());
            }
            rows.push(row);
        }
        if rows.is_empty() {
            bail!("{} contains no data rows", path.display());
        }
        Ok(Self { headers, rows })
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.headers
            .iter()
            .position(|h| h == name)
            .with_context(|| {
                format!(
                    "column '{name}' not found; available: {}",
                    self.headers.join(", ")
                )
            })
    }

    pub fn column(&self, index: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[index]).collect()
    }

    /// Design rows [1, columns...] for the named covariates.
    pub fn design(&self, covariates: &[String]) -> Result<Vec<Vec<f64>>> {
        let indices = covariates
            .iter()
            .map(|name| self.column_index(name))
            .collect::<Result<Vec<usize>>>()?;
        Ok(self
            .rows
            .iter()
            .map(|row| {
                let mut design_row = Vec::with_capacity(indices.len() + 1);
                design_row.push(1.0);
                design_row.extend(indices.iter().map(|&i| row[i]));
                design_row
            })
            .collect())
    }
}

/// Split a comma-separated list flag into trimmed nonempty names.
pub fn name_list(raw: Option<&str>) -> Vec<String> {
    raw.map(|s| {
        s.split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(str::to_string)
            .collect()
    })
    .unwrap_or_default()
}

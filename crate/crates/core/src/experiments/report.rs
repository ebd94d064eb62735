use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::svg::line_plot;
use crate::error::{Error, Result};

/// One (grid row, measure) cell: a value or the error that replaced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub grid: Vec<String>,
    pub measure: String,
    pub value: Option<f64>,
    pub error: Option<String>,
}

impl Record {
    pub fn ok(grid: Vec<String>, measure: impl Into<String>, value: f64) -> Self {
        Record {
            grid,
            measure: measure.into(),
            value: Some(value),
            error: None,
        }
    }

    pub fn from_result(
        grid: Vec<String>,
        measure: impl Into<String>,
        r: std::result::Result<f64, String>,
    ) -> Self {
        match r {
            Ok(v) => Record::ok(grid, measure, v),
            Err(e) => Record {
                grid,
                measure: measure.into(),
                value: None,
                error: Some(e),
            },
        }
    }
}

/// A secondary table written as `<name>.<suffix>.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub suffix: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// Wall-clock information, kept apart from the reproducible files.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub started_unix_ms: u128,
    pub total_ms: f64,
    pub cell_ms: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotSpec {
    /// Grid column used as the x axis; the other grid columns and the
    /// measure name identify a series.
    pub x_column: String,
    /// Restrict the plot to these measures (all when empty).
    pub measures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub seed: u64,
    pub params: serde_json::Value,
    pub grid_columns: Vec<String>,
    pub records: Vec<Record>,
    pub tables: Vec<Table>,
    pub plot: Option<PlotSpec>,
    pub timing: Timing,
}

/// Shortest decimal text that parses back to the same value.
pub fn fmt_num(v: f64) -> String {
    format!("{v}")
}

impl ExperimentReport {
    pub fn csv_columns(&self) -> Vec<String> {
        let mut c = self.grid_columns.clone();
        c.extend(["measure", "value", "error"].map(String::from));
        c
    }

    fn col(&self, name: &str) -> Option<usize> {
        self.grid_columns.iter().position(|c| c == name)
    }

    /// Records of `measure` whose grid matches every `(column, value)` filter.
    pub fn select<'a>(
        &'a self,
        measure: &'a str,
        filters: &'a [(&'a str, &'a str)],
    ) -> impl Iterator<Item = &'a Record> + 'a {
        let idx: Vec<Option<usize>> = filters.iter().map(|(c, _)| self.col(c)).collect();
        self.records.iter().filter(move |r| {
            r.measure == measure
                && filters
                    .iter()
                    .zip(&idx)
                    .all(|((_, v), i)| matches!(i, Some(i) if r.grid[*i] == *v))
        })
    }

    /// Value of the single record matching the filters.
    pub fn value(&self, measure: &str, filters: &[(&str, &str)]) -> Option<f64> {
        let mut it = self.select(measure, filters);
        let first = it.next()?;
        if it.next().is_some() {
            return None;
        }
        first.value
    }

    pub fn table(&self, suffix: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.suffix == suffix)
    }

    pub fn csv_string(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(self.csv_columns()).map_err(csv_err)?;
        for r in &self.records {
            let mut row = r.grid.clone();
            row.push(r.measure.clone());
            row.push(r.value.map(fmt_num).unwrap_or_default());
            row.push(r.error.clone().unwrap_or_default());
            w.write_record(&row).map_err(csv_err)?;
        }
        finish(w)
    }

    /// Deterministic metadata: everything except wall-clock values.
    pub fn meta_json(&self) -> String {
        let files: Vec<String> = self
            .file_names()
            .into_iter()
            .filter(|f| !f.ends_with(".timing.json"))
            .collect();
        let errors = self.records.iter().filter(|r| r.value.is_none()).count();
        let meta = serde_json::json!({
            "name": self.name,
            "seed": self.seed,
            "params": self.params,
            "columns": self.csv_columns(),
            "n_records": self.records.len(),
            "n_errors": errors,
            "files": files,
        });
        serde_json::to_string_pretty(&meta).expect("meta serializes") + "\n"
    }

    pub fn timing_json(&self) -> String {
        serde_json::to_string_pretty(&self.timing).expect("timing serializes") + "\n"
    }

    pub fn svg(&self) -> Option<String> {
        let plot = self.plot.as_ref()?;
        let xi = self.col(&plot.x_column)?;
        let mut series: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
        for r in &self.records {
            if !plot.measures.is_empty() && !plot.measures.contains(&r.measure) {
                continue;
            }
            let (Ok(x), Some(y)) = (r.grid[xi].parse::<f64>(), r.value) else {
                continue;
            };
            let mut key: Vec<&str> = r
                .grid
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != xi)
                .map(|(_, g)| g.as_str())
                .collect();
            key.push(&r.measure);
            series.entry(key.join(" ")).or_default().push((x, y));
        }
        let series: Vec<(String, Vec<(f64, f64)>)> = series.into_iter().collect();
        Some(line_plot(&self.name, &plot.x_column, &series))
    }

    pub fn file_names(&self) -> Vec<String> {
        let mut f = vec![
            format!("{}.csv", self.name),
            format!("{}.meta.json", self.name),
            format!("{}.timing.json", self.name),
        ];
        for t in &self.tables {
            f.push(format!("{}.{}.csv", self.name, t.suffix));
        }
        if self.plot.is_some() {
            f.push(format!("{}.svg", self.name));
        }
        f
    }

    /// Writes the CSV, metadata, timing, extra tables and plot into `dir`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let mut put = |name: String, body: String| -> Result<()> {
            let p = dir.join(name);
            fs::write(&p, body)?;
            written.push(p);
            Ok(())
        };
        put(format!("{}.csv", self.name), self.csv_string()?)?;
        put(format!("{}.meta.json", self.name), self.meta_json())?;
        put(format!("{}.timing.json", self.name), self.timing_json())?;
        for t in &self.tables {
            put(format!("{}.{}.csv", self.name, t.suffix), table_csv(t)?)?;
        }
        if let Some(svg) = self.svg() {
            put(format!("{}.svg", self.name), svg)?;
        }
        Ok(written)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

pub fn table_csv(t: &Table) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(&t.columns).map_err(csv_err)?;
    for r in &t.rows {
        w.write_record(r).map_err(csv_err)?;
    }
    finish(w)
}

/// Reads a report CSV back into its grid columns and records.
pub fn read_report_csv(text: &str) -> Result<(Vec<String>, Vec<Record>)> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = rd
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(String::from)
        .collect();
    let k = header.len();
    if k < 3 || header[k - 3..] != ["measure", "value", "error"] {
        return Err(Error::InvalidParameter(
            "report csv must end with measure,value,error".into(),
        ));
    }
    let mut records = Vec::new();
    for row in rd.records() {
        let row = row.map_err(csv_err)?;
        let cells: Vec<String> = row.iter().map(String::from).collect();
        let value = match cells[k - 2].as_str() {
            "" => None,
            v => Some(
                v.parse::<f64>()
                    .map_err(|_| Error::InvalidParameter(format!("bad value {v}")))?,
            ),
        };
        let error = Some(cells[k - 1].clone()).filter(|e| !e.is_empty());
        records.push(Record {
            grid: cells[..k - 3].to_vec(),
            measure: cells[k - 3].clone(),
            value,
            error,
        });
    }
    Ok((header[..k - 3].to_vec(), records))
}

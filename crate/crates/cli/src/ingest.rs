//! Expression-matrix ingestion: genes on rows, cells on columns.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use clap::ValueEnum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Tsv,
}

impl Format {
    fn delimiter(self) -> u8 {
        match self {
            Format::Csv => b',',
            Format::Tsv => b'\t',
        }
    }

    /// Guesses from the file extension, defaulting to CSV.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("tsv") || e.eq_ignore_ascii_case("tab") => {
                Format::Tsv
            }
            _ => Format::Csv,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Transform {
    #[default]
    None,
    /// log2(x + 1) after scaling every cell to a library size of 10^6.
    #[value(name = "log2cpm1")]
    Log2Cpm1,
}

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("parse error at row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: usize,
        message: String,
    },
    #[error(
        "missing value at row {row}, column {column} (missing values are rejected, not imputed)"
    )]
    MissingValue { row: usize, column: usize },
    #[error("dimension mismatch at row {row}: expected {expected} fields, found {found}")]
    DimensionMismatch {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("cell {cell:?} has zero library size, CPM is undefined")]
    ZeroLibrarySize { cell: String },
    #[error("input has no {0}")]
    Empty(&'static str),
    #[error("duplicate gene id {0:?}")]
    DuplicateGene(String),
}

/// Genes by cells. `values[g][c]` is gene `g` in cell `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpressionMatrix {
    pub gene_ids: Vec<String>,
    pub cell_ids: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

const MISSING: [&str; 5] = ["", "na", "nan", "null", "?"];

fn parse_value(field: &str, row: usize, column: usize) -> Result<f64, IngestError> {
    let s = field.trim();
    if MISSING.contains(&s.to_ascii_lowercase().as_str()) {
        return Err(IngestError::MissingValue { row, column });
    }
    let v: f64 = s.parse().map_err(|_| IngestError::Parse {
        row,
        column,
        message: format!("not a number: {s:?}"),
    })?;
    if !v.is_finite() {
        return Err(IngestError::Parse {
            row,
            column,
            message: format!("non-finite value {s:?}"),
        });
    }
    Ok(v)
}

/// Parses a matrix. Rows and columns in errors are 1-based positions in the file.
pub fn parse(reader: impl Read, format: Format) -> Result<ExpressionMatrix, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(format.delimiter())
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut records = rdr.records();
    let header = match records.next() {
        Some(r) => r.map_err(|e| csv_error(e, 1))?,
        None => return Err(IngestError::Empty("header row")),
    };
    let cell_ids: Vec<String> = header
        .iter()
        .skip(1)
        .map(|s| s.trim().to_string())
        .collect();
    if cell_ids.is_empty() {
        return Err(IngestError::Empty("cell columns"));
    }
    let expected = cell_ids.len() + 1;
    let mut gene_ids = Vec::new();
    let mut values = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (i, rec) in records.enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| csv_error(e, row))?;
        if rec.len() != expected {
            return Err(IngestError::DimensionMismatch {
                row,
                expected,
                found: rec.len(),
            });
        }
        let gene = rec[0].trim().to_string();
        if !seen.insert(gene.clone()) {
            return Err(IngestError::DuplicateGene(gene));
        }
        let vals = rec
            .iter()
            .skip(1)
            .enumerate()
            .map(|(j, f)| parse_value(f, row, j + 2))
            .collect::<Result<Vec<f64>, _>>()?;
        gene_ids.push(gene);
        values.push(vals);
    }
    if gene_ids.is_empty() {
        return Err(IngestError::Empty("gene rows"));
    }
    Ok(ExpressionMatrix {
        gene_ids,
        cell_ids,
        values,
    })
}

fn csv_error(e: csv::Error, row: usize) -> IngestError {
    IngestError::Parse {
        row,
        column: 0,
        message: e.to_string(),
    }
}

pub fn ingest(
    path: &Path,
    format: Format,
    transform: Transform,
) -> Result<ExpressionMatrix, IngestError> {
    let file = File::open(path).map_err(|e| IngestError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let mut m = parse(file, format)?;
    apply(&mut m, transform)?;
    Ok(m)
}

pub fn apply(m: &mut ExpressionMatrix, transform: Transform) -> Result<(), IngestError> {
    if transform == Transform::None {
        return Ok(());
    }
    for (c, cell) in m.cell_ids.iter().enumerate() {
        let total: f64 = m.values.iter().map(|row| row[c]).sum();
        if total == 0.0 {
            return Err(IngestError::ZeroLibrarySize { cell: cell.clone() });
        }
        for row in m.values.iter_mut() {
            row[c] = (row[c] / total * 1e6 + 1.0).log2();
        }
    }
    Ok(())
}

/// Writes the matrix back in the same layout; values use shortest round-trip formatting.
pub fn export(m: &ExpressionMatrix, out: impl Write, format: Format) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .delimiter(format.delimiter())
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(std::iter::once("gene").chain(m.cell_ids.iter().map(String::as_str)))?;
    for (g, row) in m.gene_ids.iter().zip(&m.values) {
        let fields: Vec<String> = std::iter::once(g.clone())
            .chain(row.iter().map(|v| v.to_string()))
            .collect();
        w.write_record(&fields)?;
    }
    w.flush()?;
    Ok(())
}

impl ExpressionMatrix {
    /// Resolves a row by gene id, falling back to a 0-based index.
    pub fn row_index(&self, key: &str) -> Option<usize> {
        self.gene_ids.iter().position(|g| g == key).or_else(|| {
            key.parse::<usize>()
                .ok()
                .filter(|&i| i < self.gene_ids.len())
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOY: &str = "gene,c1,c2,c3\ng1,1,2.5,0\ng2,3,0.125,-7\n";

    #[test]
    fn toy_round_trips() {
        let m = parse(TOY.as_bytes(), Format::Csv).unwrap();
        assert_eq!(m.gene_ids, ["g1", "g2"]);
        assert_eq!(m.cell_ids, ["c1", "c2", "c3"]);
        let mut out = Vec::new();
        export(&m, &mut out, Format::Csv).unwrap();
        assert_eq!(String::from_utf8(out.clone()).unwrap(), TOY);
        assert_eq!(parse(out.as_slice(), Format::Csv).unwrap(), m);
    }

    #[test]
    fn tsv_and_none_transform() {
        let tsv = TOY.replace(',', "\t");
        let mut m = parse(tsv.as_bytes(), Format::Tsv).unwrap();
        let before = m.clone();
        apply(&mut m, Transform::None).unwrap();
        assert_eq!(m, before);
        assert_eq!(m.values[1], [3.0, 0.125, -7.0]);
    }

    #[test]
    fn cpm_transform() {
        let mut m = parse("gene,a,b\nx,1,0\ny,3,5\n".as_bytes(), Format::Csv).unwrap();
        apply(&mut m, Transform::Log2Cpm1).unwrap();
        assert_eq!(m.values[0][0], (250_000.0f64 + 1.0).log2());
        assert_eq!(m.values[1][0], (750_000.0f64 + 1.0).log2());
        assert_eq!(m.values[0][1], 0.0);
        assert_eq!(m.values[1][1], (1e6f64 + 1.0).log2());
    }

    #[test]
    fn zero_column_rejected_by_cpm() {
        let mut m = parse("gene,a,b\nx,0,1\ny,0,2\n".as_bytes(), Format::Csv).unwrap();
        let err = apply(&mut m, Transform::Log2Cpm1).unwrap_err();
        assert!(matches!(err, IngestError::ZeroLibrarySize { ref cell } if cell == "a"));
    }

    #[test]
    fn errors_carry_locations() {
        let e = parse("gene,a,b\nx,1,2\ny,3,oops\n".as_bytes(), Format::Csv).unwrap_err();
        assert!(
            matches!(
                e,
                IngestError::Parse {
                    row: 3,
                    column: 3,
                    ..
                }
            ),
            "{e}"
        );
        let e = parse("gene,a,b\nx,1\n".as_bytes(), Format::Csv).unwrap_err();
        assert!(matches!(
            e,
            IngestError::DimensionMismatch {
                row: 2,
                expected: 3,
                found: 2
            }
        ));
        let e = parse("gene,a,b\nx,1,NA\n".as_bytes(), Format::Csv).unwrap_err();
        assert!(matches!(e, IngestError::MissingValue { row: 2, column: 3 }));
        let e = parse("gene,a,b\nx,1,\n".as_bytes(), Format::Csv).unwrap_err();
        assert!(matches!(e, IngestError::MissingValue { .. }));
        let e = parse("gene,a\nx,inf\n".as_bytes(), Format::Csv).unwrap_err();
        assert!(matches!(e, IngestError::Parse { .. }));
        assert!(matches!(
            parse("gene,a\n".as_bytes(), Format::Csv),
            Err(IngestError::Empty(_))
        ));
        assert!(matches!(
            parse("gene,a\nx,1\nx,2\n".as_bytes(), Format::Csv),
            Err(IngestError::DuplicateGene(_))
        ));
    }

    #[test]
    fn rows_by_id_or_index() {
        let m = parse(TOY.as_bytes(), Format::Csv).unwrap();
        assert_eq!(m.row_index("g2"), Some(1));
        assert_eq!(m.row_index("0"), Some(0));
        assert_eq!(m.row_index("5"), None);
    }
}

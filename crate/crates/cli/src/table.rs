//! CSV writers and readers for matrices and paired samples.

use std::io::{Read, Write};

use anyhow::{bail, Context};
use depgap::measures::PairwiseMatrix;
use depgap::PairedSample;

/// Formats with 10 significant digits, `%.10g` style, trailing zeros removed.
pub fn sig10(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.9e}");
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..10).contains(&exp) {
        let decimals = (9 - exp).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mant.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

/// First cell "gene", then gene ids; failed pairs are written as `NA`.
pub fn write_matrix(m: &PairwiseMatrix, genes: &[String], out: impl Write) -> anyhow::Result<()> {
    let mut w = writer(out);
    w.write_record(std::iter::once("gene").chain(genes.iter().map(String::as_str)))?;
    for (i, g) in genes.iter().enumerate() {
        let cells = m
            .row(i)
            .iter()
            .map(|v| v.map_or_else(|| "NA".to_string(), sig10));
        w.write_record(std::iter::once(g.clone()).chain(cells))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_pairs(s: &PairedSample, out: impl Write) -> anyhow::Result<()> {
    let mut w = writer(out);
    w.write_record(["x", "y"])?;
    for (x, y) in s.xs().iter().zip(s.ys()) {
        w.write_record([x.to_string(), y.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_pairs(input: impl Read) -> anyhow::Result<PairedSample> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    if header.len() != 2 || header[0].trim() != "x" || header[1].trim() != "y" {
        bail!(
            "paired sample must have header `x,y`, found {:?}",
            header.iter().collect::<Vec<_>>()
        );
    }
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (i, rec) in r.records().enumerate() {
        let row = i + 2;
        let rec = rec.with_context(|| format!("row {row}"))?;
        for (col, dst) in [(0usize, &mut xs), (1, &mut ys)] {
            let f = rec.get(col).map(str::trim).unwrap_or("");
            let v: f64 = f
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .with_context(|| format!("row {row}, column {}: bad value {f:?}", col + 1))?;
            dst.push(v);
        }
    }
    Ok(PairedSample::new(xs, ys)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_significant_digits() {
        assert_eq!(sig10(1.0), "1");
        assert_eq!(sig10(-0.5), "-0.5");
        assert_eq!(sig10(1.0 / 3.0), "0.3333333333");
        assert_eq!(sig10(2.0 / 3.0 * 1e4), "6666.666667");
        assert_eq!(sig10(123456789012.0), "1.23456789e11");
        assert_eq!(sig10(1.5e-7), "1.5e-7");
        assert_eq!(sig10(0.0001234567891234), "0.0001234567891");
        assert_eq!(sig10(9.99999999999), "10");
    }

    #[test]
    fn pairs_round_trip() {
        let s =
            PairedSample::new(vec![0.1, -2.0, 1e-9], vec![3.0, 0.3333333333333333, 7.25]).unwrap();
        let mut buf = Vec::new();
        write_pairs(&s, &mut buf).unwrap();
        assert_eq!(read_pairs(buf.as_slice()).unwrap(), s);
        assert!(read_pairs("a,b\n1,2\n".as_bytes()).is_err());
        assert!(read_pairs("x,y\n1,\n2,3\n".as_bytes()).is_err());
    }
}

//! CSV files: likelihood and utility matrices in, result tables out.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use cascade_core::{LikelihoodMatrix, UtilityMatrix};

/// `v` rounded to 9 significant digits, in plain decimal notation.
pub fn format_sig9(v: f64) -> String {
    let rounded: f64 = format!("{v:.8e}").parse().expect("formatted float parses");
    format!("{rounded}")
}

/// Opens `path` for writing, or stdout when `path` is `None`.
pub fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    match path {
        Some(p) => {
            let f = File::create(p).with_context(|| format!("cannot write {}", p.display()))?;
            Ok(Box::new(io::BufWriter::new(f)))
        }
        None => Ok(Box::new(io::stdout().lock())),
    }
}

pub fn csv_writer(path: Option<&Path>) -> Result<csv::Writer<Box<dyn Write>>> {
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(output(path)?))
}

/// Reads a square numeric table with header `{prefix}0..{prefix}{n-1}`.
fn read_matrix(path: &Path, prefix: &str) -> Result<Vec<Vec<f64>>> {
    let file = File::open(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(file);
    let headers = reader
        .headers()
        .with_context(|| format!("{}: missing header row", path.display()))?
        .clone();
    for (k, h) in headers.iter().enumerate() {
        if h != format!("{prefix}{k}") {
            bail!(
                "{}: header column {k} is '{h}', expected '{prefix}{k}'",
                path.display()
            );
        }
    }
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.with_context(|| format!("{}: row {}", path.display(), line + 1))?;
        let row = record
            .iter()
            .map(|s| {
                s.parse::<f64>().with_context(|| {
                    format!("{}: row {}: bad number '{s}'", path.display(), line + 1)
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

/// `t0..t{n-1}` header, one row per action.
pub fn write_likelihood(path: Option<&Path>, lik: &LikelihoodMatrix) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record((0..lik.n()).map(|t| format!("t{t}")))?;
    for row in lik.rows() {
        w.write_record(row.iter().map(|&v| format_sig9(v)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_likelihood(path: &Path) -> Result<LikelihoodMatrix> {
    let rows = read_matrix(path, "t")?;
    LikelihoodMatrix::from_rows(&rows)
        .with_context(|| format!("invalid likelihood in {}", path.display()))
}

/// `s0..s{m-1}` header, one row per action.
pub fn read_utility(path: &Path) -> Result<UtilityMatrix> {
    let rows = read_matrix(path, "s")?;
    UtilityMatrix::from_rows(&rows)
        .with_context(|| format!("invalid utility matrix in {}", path.display()))
}

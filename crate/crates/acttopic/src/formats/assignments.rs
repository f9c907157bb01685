//! Per-document topic posteriors: `doc_id<TAB>argmax<TAB>p0 p1 ...`.

use std::io::{BufRead, Write};
use std::path::Path;

use acttopic_core::Matrix;

use super::{fmt_floats, parse_floats, Lines};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct Assignments {
    pub doc_ids: Vec<String>,
    pub hard: Vec<usize>,
    pub posterior: Matrix<f64>,
}

impl Assignments {
    pub fn topics(&self) -> usize {
        self.posterior.cols()
    }
}

pub fn write_assignments(w: &mut dyn Write, a: &Assignments) -> Result<()> {
    for ((id, t), row) in a.doc_ids.iter().zip(&a.hard).zip(a.posterior.iter_rows()) {
        writeln!(w, "{id}\t{t}\t{}", fmt_floats(row))?;
    }
    Ok(())
}

pub fn read_assignments<R: BufRead>(reader: R, source: &str) -> Result<Assignments> {
    let mut lines = Lines::new(reader, source);
    let mut doc_ids = Vec::new();
    let mut hard = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    while let Some(line) = lines.next_line()? {
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split('\t').collect();
        if parts.len() != 3 {
            return Err(lines.err("expected doc_id<TAB>topic<TAB>probabilities"));
        }
        let t: usize = parts[1]
            .parse()
            .map_err(|_| lines.err(format!("bad topic id {:?}", parts[1])))?;
        let row = parse_floats(parts[2]).map_err(|m| lines.err(m))?;
        if row.is_empty() || rows.first().is_some_and(|r| r.len() != row.len()) {
            return Err(lines.err("inconsistent number of topic probabilities"));
        }
        if t >= row.len() {
            return Err(lines.err(format!("topic {t} outside {} topics", row.len())));
        }
        doc_ids.push(parts[0].to_string());
        hard.push(t);
        rows.push(row);
    }
    let posterior = Matrix::from_rows(rows).expect("row lengths checked");
    Ok(Assignments {
        doc_ids,
        hard,
        posterior,
    })
}

pub fn save_assignments(a: &Assignments, path: &Path) -> Result<()> {
    super::write_file(path, |w| write_assignments(w, a))
}

pub fn load_assignments(path: &Path) -> Result<Assignments> {
    read_assignments(super::open(path)?, &super::source_name(path))
}

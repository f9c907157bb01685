//! Line-oriented UTF-8 text formats.
//!
//! | file        | header                                 |
//! |-------------|----------------------------------------|
//! | activations | `#actfile v1 layer=<name> dim=<D>`     |
//! | labels      | `#labfile v1 source=<name>`            |
//! | corpus      | `#corpus v1 V=<V> D=<num_docs>`        |
//! | mixture     | `#catmix v1 T=<T> V=<V>`               |
//! | LDA         | `#lda v1 T=<T> V=<V>`                  |
//!
//! Fields are tab-separated and a lone `-` stands for a missing gold label.
//! Probabilities are written with 17 significant digits so that reading a
//! file back reproduces the values exactly.

pub mod actfile;
pub mod assignments;
pub mod corpusfile;
pub mod labfile;
pub mod model;
pub mod trace;

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub const FORMAT_VERSION: &str = "v1";
pub const NO_LABEL: &str = "-";

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn fmt_floats(xs: &[f64]) -> String {
    xs.iter().map(|&x| fmt_f64(x)).collect::<Vec<_>>().join(" ")
}

pub(crate) fn parse_floats(field: &str) -> std::result::Result<Vec<f64>, String> {
    field
        .split(' ')
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| format!("bad number {s:?}")))
        .collect()
}

pub(crate) fn label_field(label: Option<&str>) -> &str {
    label.unwrap_or(NO_LABEL)
}

pub(crate) fn parse_label(field: &str) -> Option<String> {
    (field != NO_LABEL).then(|| field.to_string())
}

/// Rejects strings that would break the line/tab structure.
pub(crate) fn check_field(what: &str, s: &str) -> Result<()> {
    if s.is_empty() || s.contains(['\t', '\n', '\r']) {
        return Err(Error::Usage(format!(
            "{what} {s:?} is empty or contains a tab or newline"
        )));
    }
    Ok(())
}

/// Parses `#<magic> v1 key=value ...` into its key/value pairs.
pub(crate) fn parse_header(line: &str, magic: &str, source: &str) -> Result<Vec<(String, String)>> {
    let mut parts = line.split(' ').filter(|p| !p.is_empty());
    let tag = parts.next().unwrap_or_default();
    if tag != format!("#{magic}") {
        return Err(Error::format(
            source,
            1,
            format!("expected a #{magic} header, found {tag:?}"),
        ));
    }
    match parts.next() {
        Some(FORMAT_VERSION) => {}
        other => {
            return Err(Error::format(
                source,
                1,
                format!("unsupported version {other:?}, expected {FORMAT_VERSION}"),
            ))
        }
    }
    parts
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .ok_or_else(|| Error::format(source, 1, format!("bad header field {kv:?}")))
        })
        .collect()
}

pub(crate) fn header_value<'a>(
    kv: &'a [(String, String)],
    key: &str,
    source: &str,
) -> Result<&'a str> {
    kv.iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.as_str())
        .ok_or_else(|| Error::format(source, 1, format!("header is missing {key}=")))
}

pub(crate) fn header_usize(kv: &[(String, String)], key: &str, source: &str) -> Result<usize> {
    let v = header_value(kv, key, source)?;
    v.parse()
        .map_err(|_| Error::format(source, 1, format!("{key}={v} is not a count")))
}

/// Numbered lines of a text source. Line numbers start at 1.
pub(crate) struct Lines<R> {
    inner: std::io::Lines<R>,
    pub source: String,
    pub line_no: usize,
}

impl<R: BufRead> Lines<R> {
    pub fn new(reader: R, source: &str) -> Self {
        Lines {
            inner: reader.lines(),
            source: source.to_string(),
            line_no: 0,
        }
    }

    pub fn next_line(&mut self) -> Result<Option<String>> {
        match self.inner.next() {
            None => Ok(None),
            Some(Ok(l)) => {
                self.line_no += 1;
                Ok(Some(l))
            }
            Some(Err(e)) => Err(Error::format(&self.source, self.line_no + 1, e.to_string())),
        }
    }

    pub fn err(&self, message: impl Into<String>) -> Error {
        Error::format(&self.source, self.line_no, message)
    }
}

pub(crate) fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(path, e))
}

/// Writes through a buffer into `path`, creating parent directories.
pub(crate) fn write_file<F>(path: &Path, body: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    body(&mut w).map_err(|e| match e {
        Error::Write(e) => Error::io(path, e),
        other => other,
    })?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub(crate) fn source_name(path: &Path) -> String {
    path.display().to_string()
}

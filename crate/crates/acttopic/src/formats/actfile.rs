//! Activation files: `doc_id<TAB>label<TAB>idx:value idx:value ...`.

use std::io::{BufRead, Write};

use acttopic_core::RawActivationRecord;

use super::{
    check_field, header_usize, header_value, label_field, parse_header, parse_label, Lines,
};
use crate::error::{Error, Result};

pub const MAGIC: &str = "actfile";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActHeader {
    pub layer: String,
    pub dim: usize,
    /// Header fields other than `layer` and `dim`, in file order.
    pub extra: Vec<(String, String)>,
}

/// Streams records from an activation file, validating each line.
pub struct ActReader<R> {
    lines: Lines<R>,
    header: ActHeader,
}

impl<R: BufRead> ActReader<R> {
    pub fn new(reader: R, source: &str) -> Result<Self> {
        let mut lines = Lines::new(reader, source);
        let first = lines
            .next_line()?
            .ok_or_else(|| Error::format(source, 1, "empty file, expected #actfile header"))?;
        let kv = parse_header(&first, MAGIC, source)?;
        let header = ActHeader {
            layer: header_value(&kv, "layer", source)?.to_string(),
            dim: header_usize(&kv, "dim", source)?,
            extra: kv
                .into_iter()
                .filter(|(k, _)| k != "layer" && k != "dim")
                .collect(),
        };
        Ok(ActReader { lines, header })
    }

    pub fn header(&self) -> &ActHeader {
        &self.header
    }

    /// Line number of the most recently returned record.
    pub fn line(&self) -> usize {
        self.lines.line_no
    }

    fn parse(&self, line: &str) -> Result<RawActivationRecord> {
        let err = |m: String| self.lines.err(m);
        let mut fields = line.split('\t');
        let (Some(doc_id), Some(label), values, None) = (
            fields.next(),
            fields.next(),
            fields.next().unwrap_or(""),
            fields.next(),
        ) else {
            return Err(err("expected doc_id<TAB>label<TAB>values".into()));
        };
        if doc_id.is_empty() {
            return Err(err("empty doc id".into()));
        }
        let mut pairs = Vec::new();
        let mut prev: Option<u32> = None;
        for item in values.split(' ').filter(|s| !s.is_empty()) {
            let (i, v) = item
                .split_once(':')
                .ok_or_else(|| err(format!("doc {doc_id}: expected idx:value, got {item:?}")))?;
            let idx: u32 = i
                .parse()
                .map_err(|_| err(format!("doc {doc_id}: bad unit index {i:?}")))?;
            let value: f64 = v
                .parse()
                .map_err(|_| err(format!("doc {doc_id}: bad value {v:?}")))?;
            if !value.is_finite() {
                return Err(err(format!(
                    "doc {doc_id}: non-finite value for unit {idx}"
                )));
            }
            if idx as usize >= self.header.dim {
                return Err(err(format!(
                    "doc {doc_id}: unit {idx} outside dim={}",
                    self.header.dim
                )));
            }
            if let Some(p) = prev {
                if idx <= p {
                    let what = if idx == p { "duplicate" } else { "decreasing" };
                    return Err(err(format!("doc {doc_id}: {what} unit index {idx}")));
                }
            }
            prev = Some(idx);
            pairs.push((idx, value));
        }
        Ok(RawActivationRecord {
            doc_id: doc_id.to_string(),
            gold_label: parse_label(label),
            values: pairs,
        })
    }
}

impl<R: BufRead> Iterator for ActReader<R> {
    type Item = Result<RawActivationRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            match self.lines.next_line() {
                Err(e) => return Some(Err(e)),
                Ok(None) => return None,
                Ok(Some(l)) if l.is_empty() => continue,
                Ok(Some(l)) => return Some(self.parse(&l)),
            }
        }
    }
}

pub fn write_actfile<'a, I>(w: &mut dyn Write, header: &ActHeader, records: I) -> Result<()>
where
    I: IntoIterator<Item = &'a RawActivationRecord>,
{
    check_field("layer", &header.layer)?;
    write!(w, "#{MAGIC} v1 layer={} dim={}", header.layer, header.dim)?;
    for (k, v) in &header.extra {
        write!(w, " {k}={v}")?;
    }
    writeln!(w)?;
    for r in records {
        check_field("doc id", &r.doc_id)?;
        let values: Vec<String> = r.values.iter().map(|(i, v)| format!("{i}:{v}")).collect();
        writeln!(
            w,
            "{}\t{}\t{}",
            r.doc_id,
            label_field(r.gold_label.as_deref()),
            values.join(" ")
        )?;
    }
    Ok(())
}

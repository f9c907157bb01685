//! Label files: `doc_id<TAB>label<TAB>surface|surface|...`.

use std::io::{BufRead, Write};

use acttopic_core::corpus::LabelDoc;

use super::{check_field, header_value, label_field, parse_header, parse_label, Lines};
use crate::error::{Error, Result};

pub const MAGIC: &str = "labfile";

pub struct LabReader<R> {
    lines: Lines<R>,
    source_tag: String,
    extra: Vec<(String, String)>,
}

impl<R: BufRead> LabReader<R> {
    pub fn new(reader: R, source: &str) -> Result<Self> {
        let mut lines = Lines::new(reader, source);
        let first = lines
            .next_line()?
            .ok_or_else(|| Error::format(source, 1, "empty file, expected #labfile header"))?;
        let kv = parse_header(&first, MAGIC, source)?;
        let source_tag = header_value(&kv, "source", source)?.to_string();
        let extra = kv.into_iter().filter(|(k, _)| k != "source").collect();
        Ok(LabReader {
            lines,
            source_tag,
            extra,
        })
    }

    /// The `source=` header field.
    pub fn source_tag(&self) -> &str {
        &self.source_tag
    }

    pub fn extra_header(&self) -> &[(String, String)] {
        &self.extra
    }

    pub fn line(&self) -> usize {
        self.lines.line_no
    }

    fn parse(&self, line: &str) -> Result<LabelDoc> {
        let mut fields = line.split('\t');
        let (Some(doc_id), Some(label), surfaces, None) = (
            fields.next(),
            fields.next(),
            fields.next().unwrap_or(""),
            fields.next(),
        ) else {
            return Err(self.lines.err("expected doc_id<TAB>label<TAB>surfaces"));
        };
        if doc_id.is_empty() {
            return Err(self.lines.err("empty doc id"));
        }
        let surfaces: Vec<String> = if surfaces.is_empty() {
            Vec::new()
        } else {
            surfaces.split('|').map(str::to_string).collect()
        };
        if surfaces.iter().any(String::is_empty) {
            return Err(self.lines.err(format!("doc {doc_id}: empty label surface")));
        }
        Ok(LabelDoc {
            doc_id: doc_id.to_string(),
            gold_label: parse_label(label),
            surfaces,
        })
    }
}

impl<R: BufRead> Iterator for LabReader<R> {
    type Item = Result<LabelDoc>;

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

pub fn write_labfile<'a, I>(w: &mut dyn Write, source: &str, docs: I) -> Result<()>
where
    I: IntoIterator<Item = &'a LabelDoc>,
{
    writeln!(w, "#{MAGIC} v1 source={source}")?;
    for d in docs {
        check_field("doc id", &d.doc_id)?;
        for s in &d.surfaces {
            check_field("surface", s)?;
            if s.contains('|') {
                return Err(Error::Usage(format!("surface {s:?} contains '|'")));
            }
        }
        writeln!(
            w,
            "{}\t{}\t{}",
            d.doc_id,
            label_field(d.gold_label.as_deref()),
            d.surfaces.join("|")
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_label_docs() {
        let text = "#labfile v1 source=vgg16\na\tdrink\twine bottle|goblet\nb\t-\t\n";
        let r = LabReader::new(text.as_bytes(), "t.lab").unwrap();
        assert_eq!(r.source_tag(), "vgg16");
        let docs: Vec<LabelDoc> = r.collect::<Result<_>>().unwrap();
        assert_eq!(docs[0].surfaces, vec!["wine bottle", "goblet"]);
        assert_eq!(docs[0].gold_label.as_deref(), Some("drink"));
        assert!(docs[1].surfaces.is_empty());
    }

    #[test]
    fn rejects_empty_surfaces() {
        let text = "#labfile v1 source=x\na\t-\tplate||tray\n";
        let r: Result<Vec<_>> = LabReader::new(text.as_bytes(), "t.lab").unwrap().collect();
        assert!(matches!(r, Err(Error::Format { line: 2, .. })));
        assert!(LabReader::new("#labfile v1\n".as_bytes(), "t.lab").is_err());
    }

    #[test]
    fn write_then_read() {
        let docs = vec![LabelDoc {
            doc_id: "p1".into(),
            gold_label: None,
            surfaces: vec!["plate".into(), "ice cream".into()],
        }];
        let mut buf = Vec::new();
        write_labfile(&mut buf, "test", &docs).unwrap();
        let back: Vec<LabelDoc> = LabReader::new(&buf[..], "b")
            .unwrap()
            .collect::<Result<_>>()
            .unwrap();
        assert_eq!(back, docs);
    }
}

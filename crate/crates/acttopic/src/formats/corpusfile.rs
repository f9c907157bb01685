//! Corpus files.
//!
//! ```text
//! #corpus v1 V=<V> D=<num_docs>
//! <id><TAB><surface>                      V lines, ids 0..V in order
//! <doc_id><TAB><label or -><TAB>id:count ...   D lines
//! #meta key=value                         any number
//! ```

use std::io::{BufRead, Write};
use std::path::Path;

use acttopic_core::{Corpus, FeatureDoc, Vocabulary};

use super::{check_field, header_usize, label_field, parse_header, parse_label, Lines};
use crate::error::{Error, Result};

pub const MAGIC: &str = "corpus";

pub fn write_corpus(w: &mut dyn Write, corpus: &Corpus) -> Result<()> {
    writeln!(
        w,
        "#{MAGIC} v1 V={} D={}",
        corpus.vocab_len(),
        corpus.num_docs()
    )?;
    for token in corpus.vocabulary().iter() {
        check_field("surface", token.surface)?;
        writeln!(w, "{}\t{}", token.id, token.surface)?;
    }
    for doc in corpus.docs() {
        check_field("doc id", &doc.doc_id)?;
        if let Some(l) = &doc.gold_label {
            check_field("label", l)?;
        }
        let counts: Vec<String> = doc
            .counts()
            .iter()
            .map(|(t, c)| format!("{t}:{c}"))
            .collect();
        writeln!(
            w,
            "{}\t{}\t{}",
            doc.doc_id,
            label_field(doc.gold_label.as_deref()),
            counts.join(" ")
        )?;
    }
    for (k, v) in corpus.meta() {
        if k.is_empty() || k.contains(['=', ' ', '\t', '\n', '\r']) || v.contains(['\n', '\r']) {
            return Err(Error::Usage(format!(
                "meta entry {k:?}={v:?} cannot be stored"
            )));
        }
        writeln!(w, "#meta {k}={v}")?;
    }
    Ok(())
}

pub fn read_corpus<R: BufRead>(reader: R, source: &str) -> Result<Corpus> {
    let mut lines = Lines::new(reader, source);
    let first = lines
        .next_line()?
        .ok_or_else(|| Error::format(source, 1, "empty file, expected #corpus header"))?;
    let kv = parse_header(&first, MAGIC, source)?;
    let v = header_usize(&kv, "V", source)?;
    let d = header_usize(&kv, "D", source)?;

    let mut surfaces = Vec::with_capacity(v);
    for expected in 0..v {
        let line = lines.next_line()?.ok_or_else(|| {
            lines.err(format!(
                "truncated: expected {v} vocabulary lines, found {expected}"
            ))
        })?;
        let (id, surface) = line
            .split_once('\t')
            .ok_or_else(|| lines.err("expected <id><TAB><surface>"))?;
        if id.parse::<usize>().ok() != Some(expected) {
            return Err(lines.err(format!("expected vocabulary id {expected}, found {id:?}")));
        }
        surfaces.push(surface.to_string());
    }
    let vocabulary = Vocabulary::from_surfaces(surfaces).map_err(|e| lines.err(e.to_string()))?;

    let mut docs = Vec::with_capacity(d);
    for found in 0..d {
        let line = lines.next_line()?.ok_or_else(|| {
            lines.err(format!("truncated: expected {d} documents, found {found}"))
        })?;
        let mut fields = line.split('\t');
        let (Some(doc_id), Some(label), Some(counts), None) =
            (fields.next(), fields.next(), fields.next(), fields.next())
        else {
            return Err(lines.err("expected doc_id<TAB>label<TAB>counts"));
        };
        let mut pairs = Vec::new();
        for item in counts.split(' ').filter(|s| !s.is_empty()) {
            let parsed = item
                .split_once(':')
                .and_then(|(t, c)| Some((t.parse::<u32>().ok()?, c.parse::<u32>().ok()?)));
            let (t, c) =
                parsed.ok_or_else(|| lines.err(format!("doc {doc_id}: bad id:count {item:?}")))?;
            if t as usize >= v {
                return Err(lines.err(format!("doc {doc_id}: token id {t} out of range (V={v})")));
            }
            pairs.push((t, c));
        }
        let doc = FeatureDoc::new(doc_id, parse_label(label), pairs)
            .map_err(|e| lines.err(e.to_string()))?;
        docs.push(doc);
    }

    let mut meta = Vec::new();
    while let Some(line) = lines.next_line()? {
        let Some(kv) = line.strip_prefix("#meta ") else {
            return Err(lines.err(format!("unexpected line after {d} documents")));
        };
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| lines.err("expected #meta key=value"))?;
        meta.push((k.to_string(), v.to_string()));
    }
    Corpus::new(vocabulary, docs, meta).map_err(|e| lines.err(e.to_string()))
}

pub fn save_corpus(corpus: &Corpus, path: &Path) -> Result<()> {
    super::write_file(path, |w| write_corpus(w, corpus))
}

pub fn load_corpus(path: &Path) -> Result<Corpus> {
    read_corpus(super::open(path)?, &super::source_name(path))
}

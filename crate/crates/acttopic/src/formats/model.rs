//! Fitted model files.
//!
//! Mixture:
//! ```text
//! #catmix v1 T=<T> V=<V>
//! theta<TAB>p0 p1 ...
//! beta<TAB><t><TAB>p0 p1 ...          T lines
//! ```
//! LDA:
//! ```text
//! #lda v1 T=<T> V=<V>
//! alpha<TAB>a0 a1 ...
//! gamma<TAB>g0 g1 ...
//! sampler<TAB>burn_in=<n> samples=<n> thin=<n>
//! phi<TAB><t><TAB>p0 p1 ...           T lines
//! doc_theta<TAB><doc_id><TAB>p0 ...   one line per training document
//! ```

use std::io::{BufRead, Write};
use std::path::Path;

use acttopic_core::catmix::CatMixParams;
use acttopic_core::lda::{GibbsSchedule, LdaHyper, LdaModel};
use acttopic_core::Matrix;

use super::{fmt_floats, header_usize, parse_floats, Lines};
use crate::error::{Error, Result};

/// Either fitted model family.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    CatMix(CatMixParams),
    Lda(LdaModel),
}

impl Model {
    pub fn topics(&self) -> usize {
        match self {
            Model::CatMix(p) => p.topics(),
            Model::Lda(m) => m.topics(),
        }
    }

    pub fn vocab_len(&self) -> usize {
        match self {
            Model::CatMix(p) => p.vocab_len(),
            Model::Lda(m) => m.vocab_len(),
        }
    }

    /// Topic × token probabilities.
    pub fn topic_token(&self) -> &Matrix<f64> {
        match self {
            Model::CatMix(p) => p.beta(),
            Model::Lda(m) => m.phi(),
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            Model::CatMix(_) => "catmix",
            Model::Lda(_) => "lda",
        }
    }
}

pub fn write_catmix(w: &mut dyn Write, p: &CatMixParams) -> Result<()> {
    writeln!(w, "#catmix v1 T={} V={}", p.topics(), p.vocab_len())?;
    writeln!(w, "theta\t{}", fmt_floats(p.theta()))?;
    for (t, row) in p.beta().iter_rows().enumerate() {
        writeln!(w, "beta\t{t}\t{}", fmt_floats(row))?;
    }
    Ok(())
}

pub fn write_lda(w: &mut dyn Write, m: &LdaModel) -> Result<()> {
    writeln!(w, "#lda v1 T={} V={}", m.topics(), m.vocab_len())?;
    writeln!(w, "alpha\t{}", fmt_floats(m.hyper().alpha()))?;
    writeln!(w, "gamma\t{}", fmt_floats(m.hyper().gamma()))?;
    let s = m.schedule;
    writeln!(
        w,
        "sampler\tburn_in={} samples={} thin={}",
        s.burn_in, s.samples, s.thin
    )?;
    for (t, row) in m.phi().iter_rows().enumerate() {
        writeln!(w, "phi\t{t}\t{}", fmt_floats(row))?;
    }
    for (id, row) in m.doc_ids.iter().zip(m.doc_theta().iter_rows()) {
        super::check_field("doc id", id)?;
        writeln!(w, "doc_theta\t{id}\t{}", fmt_floats(row))?;
    }
    Ok(())
}

pub fn write_model(w: &mut dyn Write, model: &Model) -> Result<()> {
    match model {
        Model::CatMix(p) => write_catmix(w, p),
        Model::Lda(m) => write_lda(w, m),
    }
}

struct ModelLines<R> {
    lines: Lines<R>,
}

impl<R: BufRead> ModelLines<R> {
    /// Next line, split into `tag` and the remaining tab fields.
    fn expect(&mut self, tag: &str, fields: usize) -> Result<Vec<String>> {
        let line = self
            .lines
            .next_line()?
            .ok_or_else(|| self.lines.err(format!("truncated: expected a {tag} line")))?;
        let parts: Vec<&str> = line.split('\t').collect();
        if parts[0] != tag || parts.len() != fields + 1 {
            return Err(self.lines.err(format!(
                "expected {tag} with {fields} field(s), found {:?}",
                parts[0]
            )));
        }
        Ok(parts[1..].iter().map(|s| s.to_string()).collect())
    }

    fn floats(&self, field: &str, len: usize) -> Result<Vec<f64>> {
        let v = parse_floats(field).map_err(|m| self.lines.err(m))?;
        if v.len() != len {
            return Err(self
                .lines
                .err(format!("expected {len} values, found {}", v.len())));
        }
        Ok(v)
    }

    fn index(&self, field: &str, expected: usize) -> Result<()> {
        if field.parse::<usize>().ok() != Some(expected) {
            return Err(self
                .lines
                .err(format!("expected row {expected}, found {field:?}")));
        }
        Ok(())
    }
}

fn read_catmix<R: BufRead>(mut ml: ModelLines<R>, kv: &[(String, String)]) -> Result<CatMixParams> {
    let source = ml.lines.source.clone();
    let t = header_usize(kv, "T", &source)?;
    let v = header_usize(kv, "V", &source)?;
    let f = ml.expect("theta", 1)?;
    let theta = ml.floats(&f[0], t)?;
    let mut rows = Vec::with_capacity(t);
    for k in 0..t {
        let f = ml.expect("beta", 2)?;
        ml.index(&f[0], k)?;
        rows.push(ml.floats(&f[1], v)?);
    }
    if ml.lines.next_line()?.is_some() {
        return Err(ml.lines.err("unexpected trailing line"));
    }
    let beta = Matrix::from_rows(rows).unwrap_or_else(|| Matrix::filled(t, v, 0.0));
    CatMixParams::new(theta, beta).map_err(|e| Error::format(&source, 1, e.to_string()))
}

fn read_lda<R: BufRead>(mut ml: ModelLines<R>, kv: &[(String, String)]) -> Result<LdaModel> {
    let source = ml.lines.source.clone();
    let t = header_usize(kv, "T", &source)?;
    let v = header_usize(kv, "V", &source)?;
    let f = ml.expect("alpha", 1)?;
    let alpha = ml.floats(&f[0], t)?;
    let f = ml.expect("gamma", 1)?;
    let gamma = ml.floats(&f[0], v)?;
    let hyper = LdaHyper::new(alpha, gamma).map_err(|e| ml.lines.err(e.to_string()))?;
    let f = ml.expect("sampler", 1)?;
    let mut sched = [0usize; 3];
    for (slot, key) in sched.iter_mut().zip(["burn_in", "samples", "thin"]) {
        *slot = f[0]
            .split(' ')
            .find_map(|kv| kv.strip_prefix(key)?.strip_prefix('=')?.parse().ok())
            .ok_or_else(|| ml.lines.err(format!("sampler line is missing {key}=")))?;
    }
    let schedule = GibbsSchedule {
        burn_in: sched[0],
        samples: sched[1],
        thin: sched[2],
    };
    let mut phi = Vec::with_capacity(t);
    for k in 0..t {
        let f = ml.expect("phi", 2)?;
        ml.index(&f[0], k)?;
        phi.push(ml.floats(&f[1], v)?);
    }
    let mut doc_ids = Vec::new();
    let mut theta = Vec::new();
    while let Some(line) = ml.lines.next_line()? {
        let parts: Vec<&str> = line.split('\t').collect();
        if parts.len() != 3 || parts[0] != "doc_theta" {
            return Err(ml.lines.err("expected doc_theta<TAB>doc_id<TAB>values"));
        }
        doc_ids.push(parts[1].to_string());
        theta.push(ml.floats(parts[2], t)?);
    }
    let phi = Matrix::from_rows(phi).unwrap_or_else(|| Matrix::filled(t, v, 0.0));
    let doc_theta = if theta.is_empty() {
        Matrix::filled(0, t, 0.0)
    } else {
        Matrix::from_rows(theta).expect("rows checked to length T")
    };
    LdaModel::from_parts(phi, doc_theta, hyper, schedule, doc_ids)
        .map_err(|e| Error::format(&source, 1, e.to_string()))
}

pub fn read_model<R: BufRead>(reader: R, source: &str) -> Result<Model> {
    let mut lines = Lines::new(reader, source);
    let first = lines
        .next_line()?
        .ok_or_else(|| Error::format(source, 1, "empty model file"))?;
    let ml = ModelLines { lines };
    if first.starts_with("#catmix ") {
        let kv = super::parse_header(&first, "catmix", source)?;
        read_catmix(ml, &kv).map(Model::CatMix)
    } else if first.starts_with("#lda ") {
        let kv = super::parse_header(&first, "lda", source)?;
        read_lda(ml, &kv).map(Model::Lda)
    } else {
        Err(Error::format(
            source,
            1,
            "expected a #catmix or #lda header",
        ))
    }
}

pub fn save_model(model: &Model, path: &Path) -> Result<()> {
    super::write_file(path, |w| write_model(w, model))
}

pub fn load_model(path: &Path) -> Result<Model> {
    read_model(super::open(path)?, &super::source_name(path))
}

//! Documents, vocabulary and featurization of raw network outputs.
//!
//! A document is a sparse bag of token counts. Tokens are either fired
//! activation units (`unit_<j>`, one per unit whose value is strictly above
//! a threshold) or predicted class names.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Meta key recording how many documents ended up with no tokens.
pub const META_EMPTY_DOCS: &str = "empty_docs";

/// A vocabulary entry seen through its id.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token<'a> {
    pub id: u32,
    pub surface: &'a str,
}

/// Bidirectional token surface ↔ id map. Ids are dense and assigned in
/// first-insertion order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    entries: Vec<String>,
    index: BTreeMap<String, u32>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a vocabulary whose ids follow `surfaces` order. Duplicates are
    /// rejected.
    pub fn from_surfaces<I, S>(surfaces: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut vocab = Vocabulary::new();
        for s in surfaces {
            let s = s.into();
            if vocab.index.contains_key(&s) {
                return Err(Error::DuplicateSurface(s));
            }
            vocab.intern(&s);
        }
        Ok(vocab)
    }

    /// Returns the id of `surface`, inserting it if unseen.
    pub fn intern(&mut self, surface: &str) -> u32 {
        if let Some(&id) = self.index.get(surface) {
            return id;
        }
        let id = self.entries.len() as u32;
        self.entries.push(surface.to_string());
        self.index.insert(surface.to_string(), id);
        id
    }

    pub fn id_of(&self, surface: &str) -> Option<u32> {
        self.index.get(surface).copied()
    }

    pub fn surface_of(&self, id: u32) -> Option<&str> {
        self.entries.get(id as usize).map(String::as_str)
    }

    pub fn token(&self, id: u32) -> Option<Token<'_>> {
        self.surface_of(id).map(|surface| Token { id, surface })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Token<'_>> + '_ {
        self.entries.iter().enumerate().map(|(i, s)| Token {
            id: i as u32,
            surface: s,
        })
    }

    pub fn surfaces(&self) -> &[String] {
        &self.entries
    }
}

/// One image as a sparse bag of token counts.
///
/// Counts are kept sorted by token id, and every count is at least one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureDoc {
    pub doc_id: String,
    pub gold_label: Option<String>,
    counts: Vec<(u32, u32)>,
}

impl FeatureDoc {
    /// Builds a document from `(token, count)` pairs. Repeated tokens are
    /// summed; a zero count is an error.
    pub fn new<I>(doc_id: impl Into<String>, gold_label: Option<String>, counts: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        let doc_id = doc_id.into();
        let mut merged: BTreeMap<u32, u32> = BTreeMap::new();
        for (token, count) in counts {
            if count == 0 {
                return Err(Error::ZeroCount { doc_id, token });
            }
            *merged.entry(token).or_insert(0) += count;
        }
        Ok(FeatureDoc {
            doc_id,
            gold_label,
            counts: merged.into_iter().collect(),
        })
    }

    pub fn empty(doc_id: impl Into<String>, gold_label: Option<String>) -> Self {
        FeatureDoc {
            doc_id: doc_id.into(),
            gold_label,
            counts: Vec::new(),
        }
    }

    /// `(token, count)` pairs in increasing token order.
    pub fn counts(&self) -> &[(u32, u32)] {
        &self.counts
    }

    pub fn count_of(&self, token: u32) -> u32 {
        self.counts
            .binary_search_by_key(&token, |&(t, _)| t)
            .map_or(0, |i| self.counts[i].1)
    }

    /// Total number of token occurrences.
    pub fn len(&self) -> usize {
        self.counts.iter().map(|&(_, c)| c as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Token ids with counts expanded into positions.
    pub fn positions(&self) -> impl Iterator<Item = u32> + '_ {
        self.counts
            .iter()
            .flat_map(|&(t, c)| core::iter::repeat_n(t, c as usize))
    }

    pub fn max_token(&self) -> Option<u32> {
        self.counts.last().map(|&(t, _)| t)
    }
}

/// Pre-threshold activations of one image at one layer.
#[derive(Debug, Clone, PartialEq)]
pub struct RawActivationRecord {
    pub doc_id: String,
    pub gold_label: Option<String>,
    /// `(unit index, activation)` pairs with strictly increasing units.
    pub values: Vec<(u32, f64)>,
}

impl RawActivationRecord {
    /// Checks unit ordering and finiteness. `record` is the position of
    /// this record in its stream, used in the error.
    pub fn validate(&self, record: usize) -> Result<()> {
        let malformed = |reason: String| Error::MalformedRecord {
            doc_id: self.doc_id.clone(),
            record,
            reason,
        };
        let mut prev: Option<u32> = None;
        for &(unit, value) in &self.values {
            if let Some(p) = prev {
                if unit == p {
                    return Err(malformed(format!("duplicate unit index {unit}")));
                }
                if unit < p {
                    return Err(malformed(format!(
                        "unit index {unit} after {p}; indices must be strictly increasing"
                    )));
                }
            }
            if !value.is_finite() {
                return Err(malformed(format!("non-finite value for unit {unit}")));
            }
            prev = Some(unit);
        }
        Ok(())
    }
}

/// An immutable collection of documents over one vocabulary.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Corpus {
    vocabulary: Vocabulary,
    docs: Vec<FeatureDoc>,
    meta: Vec<(String, String)>,
}

impl Corpus {
    /// Validates doc-id uniqueness and token ranges.
    pub fn new(
        vocabulary: Vocabulary,
        docs: Vec<FeatureDoc>,
        meta: Vec<(String, String)>,
    ) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for doc in &docs {
            if !seen.insert(doc.doc_id.as_str()) {
                return Err(Error::DuplicateDoc(doc.doc_id.clone()));
            }
            if let Some(t) = doc.max_token() {
                if t as usize >= vocabulary.len() {
                    return Err(Error::TokenOutOfRange {
                        doc_id: doc.doc_id.clone(),
                        token: t,
                        vocab_len: vocabulary.len(),
                    });
                }
            }
        }
        let mut keys = BTreeSet::new();
        for (k, _) in &meta {
            if !keys.insert(k.as_str()) {
                return Err(Error::InvalidArgument(format!("duplicate meta key {k:?}")));
            }
        }
        Ok(Corpus {
            vocabulary,
            docs,
            meta,
        })
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn docs(&self) -> &[FeatureDoc] {
        &self.docs
    }

    pub fn doc(&self, i: usize) -> &FeatureDoc {
        &self.docs[i]
    }

    pub fn num_docs(&self) -> usize {
        self.docs.len()
    }

    pub fn vocab_len(&self) -> usize {
        self.vocabulary.len()
    }

    /// Provenance key/value pairs in insertion order.
    pub fn meta(&self) -> &[(String, String)] {
        &self.meta
    }

    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.meta
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// Sets a meta entry, replacing an existing value for the same key.
    pub fn set_meta(&mut self, key: impl Into<String>, value: impl Into<String>) {
        let (key, value) = (key.into(), value.into());
        match self.meta.iter_mut().find(|(k, _)| *k == key) {
            Some(entry) => entry.1 = value,
            None => self.meta.push((key, value)),
        }
    }

    pub fn total_tokens(&self) -> usize {
        self.docs.iter().map(FeatureDoc::len).sum()
    }

    pub fn empty_docs(&self) -> usize {
        self.docs.iter().filter(|d| d.is_empty()).count()
    }

    /// Re-expresses every document in `target`'s id space. Tokens unknown to
    /// `target` are dropped; the second value is the number of dropped
    /// occurrences.
    pub fn remap_to(&self, target: &Vocabulary) -> Result<(Corpus, usize)> {
        let mut dropped = 0usize;
        let mut docs = Vec::with_capacity(self.docs.len());
        for doc in &self.docs {
            let mut counts = Vec::with_capacity(doc.counts.len());
            for &(t, c) in &doc.counts {
                let surface = self.vocabulary.surface_of(t).unwrap_or_default();
                match target.id_of(surface) {
                    Some(id) => counts.push((id, c)),
                    None => dropped += c as usize,
                }
            }
            docs.push(FeatureDoc::new(
                doc.doc_id.clone(),
                doc.gold_label.clone(),
                counts,
            )?);
        }
        let corpus = Corpus::new(target.clone(), docs, self.meta.clone())?;
        Ok((corpus, dropped))
    }
}

/// Streaming construction of a thresholded activation corpus.
///
/// Unit `j` of a record becomes token `unit_<j>` with count 1 iff its value
/// is strictly greater than the threshold.
#[derive(Debug)]
pub struct ThresholdBuilder {
    threshold: f64,
    vocabulary: Vocabulary,
    docs: Vec<FeatureDoc>,
    seen: BTreeSet<String>,
}

impl ThresholdBuilder {
    pub fn new(threshold: f64) -> Result<Self> {
        if !threshold.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "threshold must be finite, got {threshold}"
            )));
        }
        Ok(ThresholdBuilder {
            threshold,
            vocabulary: Vocabulary::new(),
            docs: Vec::new(),
            seen: BTreeSet::new(),
        })
    }

    pub fn push(&mut self, record: RawActivationRecord) -> Result<()> {
        let index = self.docs.len();
        record.validate(index)?;
        if !self.seen.insert(record.doc_id.clone()) {
            return Err(Error::DuplicateDoc(record.doc_id));
        }
        let mut counts = Vec::new();
        for &(unit, value) in &record.values {
            if value > self.threshold {
                counts.push((self.vocabulary.intern(&unit_surface(unit)), 1));
            }
        }
        self.docs
            .push(FeatureDoc::new(record.doc_id, record.gold_label, counts)?);
        Ok(())
    }

    pub fn finish(self) -> Corpus {
        let empty = self.docs.iter().filter(|d| d.is_empty()).count();
        let meta = alloc::vec![
            ("featurization".to_string(), "threshold".to_string()),
            ("threshold".to_string(), format!("{}", self.threshold)),
            (META_EMPTY_DOCS.to_string(), format!("{empty}")),
        ];
        Corpus {
            vocabulary: self.vocabulary,
            docs: self.docs,
            meta,
        }
    }
}

/// Surface used for activation unit `j`.
pub fn unit_surface(unit: u32) -> String {
    format!("unit_{unit}")
}

/// Thresholds a stream of activation records into a corpus.
pub fn threshold_activations<I>(records: I, threshold: f64) -> Result<Corpus>
where
    I: IntoIterator<Item = RawActivationRecord>,
{
    let mut builder = ThresholdBuilder::new(threshold)?;
    for record in records {
        builder.push(record)?;
    }
    Ok(builder.finish())
}

/// Indices of the `k` largest scores, descending, ties to the lower index.
pub fn top_k_indices(scores: &[f64], k: usize) -> Result<Vec<usize>> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if scores.is_empty() {
        return Err(Error::InvalidArgument("empty score vector".into()));
    }
    if let Some(i) = scores.iter().position(|s| !s.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "non-finite score at index {i}"
        )));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    // stable sort keeps lower indices first among equal scores
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    order.truncate(k);
    Ok(order)
}

/// Class names of the `k` highest scores. Each returned surface is meant to
/// contribute a count of one to its document.
pub fn top_k_labels<S: AsRef<str>>(
    scores: &[f64],
    k: usize,
    class_names: &[S],
) -> Result<Vec<String>> {
    if scores.len() != class_names.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} scores for {} class names",
            scores.len(),
            class_names.len()
        )));
    }
    Ok(top_k_indices(scores, k)?
        .into_iter()
        .map(|i| class_names[i].as_ref().to_string())
        .collect())
}

/// A document given as a list of label surfaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelDoc {
    pub doc_id: String,
    pub gold_label: Option<String>,
    pub surfaces: Vec<String>,
}

/// Streaming construction of a corpus from label documents.
#[derive(Debug, Default)]
pub struct LabelCorpusBuilder {
    vocabulary: Vocabulary,
    docs: Vec<FeatureDoc>,
    seen: BTreeSet<String>,
}

impl LabelCorpusBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, doc: LabelDoc) -> Result<()> {
        if !self.seen.insert(doc.doc_id.clone()) {
            return Err(Error::DuplicateDoc(doc.doc_id));
        }
        let counts: Vec<(u32, u32)> = doc
            .surfaces
            .iter()
            .map(|s| (self.vocabulary.intern(s), 1))
            .collect();
        self.docs
            .push(FeatureDoc::new(doc.doc_id, doc.gold_label, counts)?);
        Ok(())
    }

    pub fn finish(self) -> Corpus {
        let empty = self.docs.iter().filter(|d| d.is_empty()).count();
        Corpus {
            vocabulary: self.vocabulary,
            docs: self.docs,
            meta: alloc::vec![
                ("featurization".to_string(), "labels".to_string()),
                (META_EMPTY_DOCS.to_string(), format!("{empty}")),
            ],
        }
    }
}

/// Builds a corpus from label documents; vocabulary ids follow first
/// occurrence and repeated surfaces in one document accumulate.
pub fn build_corpus_from_label_docs<I>(docs: I) -> Result<Corpus>
where
    I: IntoIterator<Item = LabelDoc>,
{
    let mut builder = LabelCorpusBuilder::new();
    for doc in docs {
        builder.push(doc)?;
    }
    Ok(builder.finish())
}

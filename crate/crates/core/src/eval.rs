//! Comparing topics with gold labels.
//!
//! Documents are hard-assigned to their most probable topic and counted
//! against their gold label in a topic × label table. Purity and normalized
//! mutual information summarize the table; [`top_features`] lists the
//! heaviest tokens of a topic.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::corpus::Vocabulary;
use crate::error::{Error, Result};
use crate::math::{self, ln, sorted_sum};
use crate::matrix::Matrix;

/// Most probable topic per row; ties go to the lowest topic id.
pub fn hard_assign(doc_topic: &Matrix<f64>) -> Vec<usize> {
    doc_topic.iter_rows().map(math::argmax).collect()
}

/// Topic × gold-label document counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    labels: Vec<String>,
    counts: Matrix<u64>,
    /// Documents left out because they had no gold label.
    pub skipped: usize,
    nicknames: Vec<Option<String>>,
}

impl ContingencyTable {
    pub fn from_counts(labels: Vec<String>, counts: Matrix<u64>) -> Result<Self> {
        if counts.cols() != labels.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} label columns for {} labels",
                counts.cols(),
                labels.len()
            )));
        }
        Ok(ContingencyTable {
            nicknames: alloc::vec![None; counts.rows()],
            labels,
            counts,
            skipped: 0,
        })
    }

    pub fn topics(&self) -> usize {
        self.counts.rows()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn counts(&self) -> &Matrix<u64> {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.as_slice().iter().sum()
    }

    pub fn row_totals(&self) -> Vec<u64> {
        self.counts.iter_rows().map(|r| r.iter().sum()).collect()
    }

    pub fn column_totals(&self) -> Vec<u64> {
        (0..self.counts.cols())
            .map(|l| (0..self.counts.rows()).map(|t| self.counts[(t, l)]).sum())
            .collect()
    }

    /// Human annotation for a topic row, e.g. `"food"`.
    pub fn set_nickname(&mut self, topic: usize, name: impl Into<String>) {
        if let Some(slot) = self.nicknames.get_mut(topic) {
            *slot = Some(name.into());
        }
    }

    pub fn nickname(&self, topic: usize) -> Option<&str> {
        self.nicknames.get(topic).and_then(|n| n.as_deref())
    }

    /// Row-normalized shares in percent; empty rows stay at zero.
    pub fn row_percentages(&self) -> Matrix<f64> {
        let mut m = Matrix::filled(self.counts.rows(), self.counts.cols(), 0.0);
        for (t, total) in self.row_totals().into_iter().enumerate() {
            if total == 0 {
                continue;
            }
            for l in 0..self.counts.cols() {
                m[(t, l)] = 100.0 * self.counts[(t, l)] as f64 / total as f64;
            }
        }
        m
    }

    /// Swaps the roles of topics and labels. Topic ids become the new
    /// label names.
    pub fn transposed(&self) -> Self {
        let labels = (0..self.topics()).map(|t| t.to_string()).collect();
        ContingencyTable {
            nicknames: alloc::vec![None; self.labels.len()],
            labels,
            counts: self.counts.transpose(),
            skipped: self.skipped,
        }
    }
}

/// Counts documents per (assigned topic, gold label).
///
/// Documents without a label are skipped and counted in `skipped`. Label
/// columns follow `label_order` when given (unknown labels are then an
/// error), otherwise first occurrence.
pub fn contingency<S: AsRef<str>>(
    assignments: &[usize],
    labels: &[Option<S>],
    topics: usize,
    label_order: Option<&[S]>,
) -> Result<ContingencyTable> {
    if assignments.len() != labels.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} assignments for {} labels",
            assignments.len(),
            labels.len()
        )));
    }
    if let Some(&t) = assignments.iter().find(|&&t| t >= topics) {
        return Err(Error::DimensionMismatch(format!(
            "topic {t} with only {topics} topics"
        )));
    }
    let fixed = label_order.is_some();
    let mut columns = match label_order {
        Some(order) => Vocabulary::from_surfaces(order.iter().map(|s| s.as_ref()))?,
        None => Vocabulary::new(),
    };
    let mut cells: Vec<(usize, usize)> = Vec::with_capacity(assignments.len());
    let mut skipped = 0;
    for (&t, label) in assignments.iter().zip(labels) {
        let Some(label) = label else {
            skipped += 1;
            continue;
        };
        let label = label.as_ref();
        let col = match columns.id_of(label) {
            Some(c) => c,
            None if fixed => return Err(Error::UnknownLabel(label.to_string())),
            None => columns.intern(label),
        };
        cells.push((t, col as usize));
    }
    let mut counts = Matrix::filled(topics, columns.len(), 0u64);
    for (t, l) in cells {
        counts[(t, l)] += 1;
    }
    let mut table = ContingencyTable::from_counts(columns.surfaces().to_vec(), counts)?;
    table.skipped = skipped;
    Ok(table)
}

/// Fraction of documents that carry their topic's majority label.
pub fn purity(table: &ContingencyTable) -> Result<f64> {
    let total = table.total();
    if total == 0 {
        return Err(Error::EmptyTable);
    }
    let majority: u64 = table
        .counts
        .iter_rows()
        .map(|r| r.iter().copied().max().unwrap_or(0))
        .sum();
    Ok(majority as f64 / total as f64)
}

/// `Σ (n/N) ln(N/n)` over the non-zero marginals.
fn entropy(marginals: &[u64], total: f64) -> f64 {
    let mut terms: Vec<f64> = marginals
        .iter()
        .filter(|&&n| n > 0)
        .map(|&n| {
            let n = n as f64;
            (n / total) * ln(total / n)
        })
        .collect();
    sorted_sum(&mut terms)
}

/// Mutual information of topics and labels divided by the arithmetic mean
/// of their entropies.
///
/// When one side has zero entropy the score is 0, except when both do (all
/// documents in one cell), which scores 1. Every sum is taken in sorted
/// order, so the value is exactly invariant under transposition and under
/// permutations of rows or columns.
pub fn nmi(table: &ContingencyTable) -> Result<f64> {
    let total_count = table.total();
    if total_count == 0 {
        return Err(Error::EmptyTable);
    }
    let total = total_count as f64;
    let rows = table.row_totals();
    let cols = table.column_totals();
    let h_rows = entropy(&rows, total);
    let h_cols = entropy(&cols, total);
    if h_rows == 0.0 && h_cols == 0.0 {
        return Ok(1.0);
    }
    if h_rows == 0.0 || h_cols == 0.0 {
        return Ok(0.0);
    }
    let mut terms = Vec::new();
    for (t, &a) in rows.iter().enumerate() {
        for (l, &b) in cols.iter().enumerate() {
            let n = table.counts[(t, l)];
            if n == 0 {
                continue;
            }
            let n = n as f64;
            terms.push((n / total) * ln(n * total / (a as f64 * b as f64)));
        }
    }
    let mi = sorted_sum(&mut terms);
    Ok((mi / ((h_rows + h_cols) / 2.0)).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureWeight {
    pub token: u32,
    pub surface: String,
    pub weight: f64,
}

/// The `k` heaviest tokens of one topic, descending; ties to the lower
/// token id and `k` clamped to the vocabulary size.
pub fn top_features(
    weights: &[f64],
    vocabulary: &Vocabulary,
    k: usize,
) -> Result<Vec<FeatureWeight>> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if weights.len() != vocabulary.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} weights for a vocabulary of {}",
            weights.len(),
            vocabulary.len()
        )));
    }
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]));
    Ok(order
        .into_iter()
        .take(k)
        .map(|i| FeatureWeight {
            token: i as u32,
            surface: vocabulary
                .surface_of(i as u32)
                .unwrap_or_default()
                .to_string(),
            weight: weights[i],
        })
        .collect())
}

/// Top features for every topic row of a topic × token matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicReport {
    pub rows: Vec<Vec<FeatureWeight>>,
}

pub fn topic_report(
    topic_token: &Matrix<f64>,
    vocabulary: &Vocabulary,
    k: usize,
) -> Result<TopicReport> {
    let rows = topic_token
        .iter_rows()
        .map(|r| top_features(r, vocabulary, k))
        .collect::<Result<_>>()?;
    Ok(TopicReport { rows })
}

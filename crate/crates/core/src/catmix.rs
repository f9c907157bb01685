//! Mixture of categoricals with one topic per document.
//!
//! A document `i` with counts `S_j(i)` has likelihood
//! `Σ_t θ_t Π_j β_tj^{S_j(i)}`; the corpus likelihood is the product over
//! documents. Parameters are fitted by EM with optional additive smoothing
//! of the topic rows.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand_core::SeedableRng;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::math::{self, ln, log_sum_exp};
use crate::matrix::Matrix;
use crate::SeededRng;

/// Tolerance used when validating probability vectors.
pub const SIMPLEX_TOL: f64 = 1e-9;

pub const DEFAULT_SMOOTHING: f64 = 1e-6;
pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_ITER: usize = 500;

/// Mixture weights `theta` (length T) and topic rows `beta` (T × V).
#[derive(Debug, Clone, PartialEq)]
pub struct CatMixParams {
    theta: Vec<f64>,
    beta: Matrix<f64>,
}

pub(crate) fn check_simplex(what: &str, p: &[f64]) -> Result<()> {
    if p.iter().any(|&x| x < 0.0 || !x.is_finite()) {
        return Err(Error::NotNormalized(format!(
            "{what} has a negative or non-finite entry"
        )));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > SIMPLEX_TOL {
        return Err(Error::NotNormalized(format!("{what} sums to {s}")));
    }
    Ok(())
}

impl CatMixParams {
    pub fn new(theta: Vec<f64>, beta: Matrix<f64>) -> Result<Self> {
        if theta.is_empty() || beta.cols() == 0 {
            return Err(Error::InvalidArgument("need T >= 1 and V >= 1".into()));
        }
        if beta.rows() != theta.len() {
            return Err(Error::DimensionMismatch(format!(
                "theta has {} topics, beta has {} rows",
                theta.len(),
                beta.rows()
            )));
        }
        check_simplex("theta", &theta)?;
        for (t, row) in beta.iter_rows().enumerate() {
            check_simplex(&format!("beta row {t}"), row)?;
        }
        Ok(CatMixParams { theta, beta })
    }

    pub fn topics(&self) -> usize {
        self.theta.len()
    }

    pub fn vocab_len(&self) -> usize {
        self.beta.cols()
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn beta(&self) -> &Matrix<f64> {
        &self.beta
    }

    /// Same model with topics relabeled: new topic `k` is old topic `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let theta = perm.iter().map(|&p| self.theta[p]).collect();
        let rows = perm.iter().map(|&p| self.beta.row(p).to_vec()).collect();
        CatMixParams {
            theta,
            beta: Matrix::from_rows(rows).expect("rows share V"),
        }
    }

    fn check_corpus(&self, corpus: &Corpus) -> Result<()> {
        if corpus.vocab_len() != self.vocab_len() {
            return Err(Error::DimensionMismatch(format!(
                "model has V={}, corpus has V={}",
                self.vocab_len(),
                corpus.vocab_len()
            )));
        }
        Ok(())
    }

    /// Per-topic `ln θ_t + Σ_j S_j ln β_tj` for one document.
    fn topic_scores(&self, counts: &[(u32, u32)], out: &mut [f64]) {
        for (t, score) in out.iter_mut().enumerate() {
            let row = self.beta.row(t);
            let mut s = ln(self.theta[t]);
            for &(j, c) in counts {
                s += c as f64 * ln(row[j as usize]);
            }
            *score = s;
        }
    }
}

/// Posterior topic probabilities per document (D × T).
#[derive(Debug, Clone, PartialEq)]
pub struct Responsibilities {
    matrix: Matrix<f64>,
    /// Documents whose every topic score was `-inf`; their rows are uniform.
    pub degenerate_docs: Vec<usize>,
}

impl Responsibilities {
    /// Wraps a D × T matrix whose rows are probability vectors.
    pub fn new(matrix: Matrix<f64>) -> Result<Self> {
        for (i, row) in matrix.iter_rows().enumerate() {
            check_simplex(&format!("responsibility row {i}"), row)?;
        }
        Ok(Responsibilities {
            matrix,
            degenerate_docs: Vec::new(),
        })
    }

    pub fn matrix(&self) -> &Matrix<f64> {
        &self.matrix
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.matrix.row(i)
    }

    pub fn into_matrix(self) -> Matrix<f64> {
        self.matrix
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convergence {
    Tolerance,
    MaxIterations,
}

/// Log-likelihood after initialization and after each EM iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct FitTrace {
    pub log_likelihoods: Vec<f64>,
    pub iterations: usize,
    pub convergence: Convergence,
}

/// Corpus log-likelihood `Σ_i ln Σ_t θ_t Π_j β_tj^{S_j(i)}`.
///
/// A document with a token that has zero probability under every topic
/// makes the result `-inf`. Empty documents contribute `ln 1 = 0`.
pub fn log_likelihood(corpus: &Corpus, params: &CatMixParams) -> Result<f64> {
    params.check_corpus(corpus)?;
    let mut scores = vec![0.0; params.topics()];
    let mut total = 0.0;
    for doc in corpus.docs() {
        if doc.is_empty() {
            continue;
        }
        params.topic_scores(doc.counts(), &mut scores);
        total += log_sum_exp(&scores);
    }
    Ok(total)
}

/// Posterior `p(z_i = t | doc i)` for every document. Empty documents get
/// uniform rows, as do documents impossible under every topic (which are
/// also listed in `degenerate_docs`).
pub fn e_step(corpus: &Corpus, params: &CatMixParams) -> Result<Responsibilities> {
    params.check_corpus(corpus)?;
    let topics = params.topics();
    let uniform = 1.0 / topics as f64;
    let mut matrix = Matrix::filled(corpus.num_docs(), topics, uniform);
    let mut degenerate_docs = Vec::new();
    let mut scores = vec![0.0; topics];
    for (i, doc) in corpus.docs().iter().enumerate() {
        if doc.is_empty() {
            continue;
        }
        params.topic_scores(doc.counts(), &mut scores);
        let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            degenerate_docs.push(i);
            continue;
        }
        let row = matrix.row_mut(i);
        let mut z = 0.0;
        for (r, &s) in row.iter_mut().zip(&scores) {
            *r = math::exp(s - max);
            z += *r;
        }
        row.iter_mut().for_each(|r| *r /= z);
    }
    Ok(Responsibilities {
        matrix,
        degenerate_docs,
    })
}

/// Closed-form maximizer given responsibilities:
/// `θ_t = Σ_i r_it / D` and
/// `β_tj = (s + Σ_i r_it S_ij) / (V s + Σ_i r_it |i|)`, over non-empty docs.
pub fn m_step(corpus: &Corpus, resp: &Responsibilities, smoothing: f64) -> Result<CatMixParams> {
    if smoothing < 0.0 || !smoothing.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "smoothing must be >= 0, got {smoothing}"
        )));
    }
    let topics = resp.matrix.cols();
    let vocab = corpus.vocab_len();
    if resp.matrix.rows() != corpus.num_docs() {
        return Err(Error::DimensionMismatch(format!(
            "{} responsibility rows for {} docs",
            resp.matrix.rows(),
            corpus.num_docs()
        )));
    }
    if topics == 0 || vocab == 0 {
        return Err(Error::InvalidArgument("need T >= 1 and V >= 1".into()));
    }
    let mut theta = vec![0.0; topics];
    let mut numer = Matrix::filled(topics, vocab, smoothing);
    let mut denom = vec![vocab as f64 * smoothing; topics];
    let mut fitted = 0usize;
    for (i, doc) in corpus.docs().iter().enumerate() {
        if doc.is_empty() {
            continue;
        }
        fitted += 1;
        let len = doc.len() as f64;
        for (t, &r) in resp.row(i).iter().enumerate() {
            theta[t] += r;
            if r == 0.0 {
                continue;
            }
            denom[t] += r * len;
            let row = numer.row_mut(t);
            for &(j, c) in doc.counts() {
                row[j as usize] += r * c as f64;
            }
        }
    }
    if fitted == 0 {
        return Err(Error::EmptyCorpus);
    }
    theta.iter_mut().for_each(|v| *v /= fitted as f64);
    for (t, &d) in denom.iter().enumerate() {
        if d <= 0.0 {
            return Err(Error::DegenerateTopic(t));
        }
        numer.row_mut(t).iter_mut().for_each(|v| *v /= d);
    }
    Ok(CatMixParams { theta, beta: numer })
}

/// Starting point for [`fit_em`].
#[derive(Debug, Clone, PartialEq)]
pub enum EmInit {
    /// Per-document responsibilities drawn from a symmetric Dirichlet(1),
    /// followed by one M-step.
    Seed(u64),
    Params(CatMixParams),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub smoothing: f64,
}

impl Default for EmOptions {
    fn default() -> Self {
        EmOptions {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            smoothing: DEFAULT_SMOOTHING,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmFit {
    pub params: CatMixParams,
    pub responsibilities: Responsibilities,
    pub trace: FitTrace,
    /// Empty documents left out of fitting.
    pub skipped_empty_docs: usize,
    /// More topics than non-empty documents.
    pub underdetermined: bool,
}

fn random_responsibilities(corpus: &Corpus, topics: usize, seed: u64) -> Responsibilities {
    let mut rng = SeededRng::seed_from_u64(seed);
    let mut matrix = Matrix::filled(corpus.num_docs(), topics, 1.0 / topics as f64);
    for (i, doc) in corpus.docs().iter().enumerate() {
        if !doc.is_empty() {
            math::dirichlet_ones(&mut rng, matrix.row_mut(i));
        }
    }
    Responsibilities {
        matrix,
        degenerate_docs: Vec::new(),
    }
}

/// Fits the mixture by EM until the absolute log-likelihood change drops
/// below `tol` or `max_iter` iterations have run.
pub fn fit_em(corpus: &Corpus, topics: usize, init: EmInit, opts: EmOptions) -> Result<EmFit> {
    if topics == 0 {
        return Err(Error::InvalidArgument("T must be at least 1".into()));
    }
    if opts.max_iter == 0 {
        return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
    }
    let non_empty = corpus.num_docs() - corpus.empty_docs();
    if non_empty == 0 || corpus.vocab_len() == 0 {
        return Err(Error::EmptyCorpus);
    }
    let mut params = match init {
        EmInit::Seed(seed) => m_step(
            corpus,
            &random_responsibilities(corpus, topics, seed),
            opts.smoothing,
        )?,
        EmInit::Params(p) => {
            if p.topics() != topics {
                return Err(Error::DimensionMismatch(format!(
                    "initial params have {} topics, asked for {topics}",
                    p.topics()
                )));
            }
            p.check_corpus(corpus)?;
            p
        }
    };
    let mut ll = log_likelihood(corpus, &params)?;
    let mut trace = FitTrace {
        log_likelihoods: vec![ll],
        iterations: 0,
        convergence: Convergence::MaxIterations,
    };
    for iter in 1..=opts.max_iter {
        let resp = e_step(corpus, &params)?;
        params = m_step(corpus, &resp, opts.smoothing)?;
        let next = log_likelihood(corpus, &params)?;
        trace.log_likelihoods.push(next);
        trace.iterations = iter;
        let stalled = next == ll || (next - ll).abs() < opts.tol;
        ll = next;
        if stalled {
            trace.convergence = Convergence::Tolerance;
            break;
        }
    }
    let responsibilities = e_step(corpus, &params)?;
    Ok(EmFit {
        params,
        responsibilities,
        trace,
        skipped_empty_docs: corpus.num_docs() - non_empty,
        underdetermined: topics > non_empty,
    })
}

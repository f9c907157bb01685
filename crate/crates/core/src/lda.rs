//! Latent Dirichlet allocation fitted by collapsed Gibbs sampling.
//!
//! Every token position carries its own topic assignment. With symmetric or
//! asymmetric Dirichlet priors `alpha` (document-topic) and `gamma`
//! (topic-token), the per-document proportions and topic rows are
//! integrated out and only the assignments are sampled:
//!
//! ```text
//! p(z = t | rest) ∝ (n_dt + α_t) · (n_tw + γ_w) / (n_t + Σγ)
//! ```
//!
//! Point estimates are posterior means averaged over thinned samples taken
//! after burn-in. Sweeps visit documents, then positions, in order, so a
//! chain is fully determined by its seed.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand_core::SeedableRng;

use crate::catmix::check_simplex;
use crate::corpus::{Corpus, FeatureDoc};
use crate::error::{Error, Result};
use crate::math::{self, ln};
use crate::matrix::Matrix;
use crate::SeededRng;

pub const DEFAULT_GAMMA: f64 = 0.1;
pub const DEFAULT_FOLD_IN_SWEEPS: usize = 50;

/// Dirichlet hyperparameters: `alpha` over T topics, `gamma` over V tokens.
#[derive(Debug, Clone, PartialEq)]
pub struct LdaHyper {
    alpha: Vec<f64>,
    gamma: Vec<f64>,
    alpha_sum: f64,
    gamma_sum: f64,
}

impl LdaHyper {
    pub fn new(alpha: Vec<f64>, gamma: Vec<f64>) -> Result<Self> {
        if alpha.is_empty() || gamma.is_empty() {
            return Err(Error::InvalidArgument(
                "alpha and gamma must be non-empty".into(),
            ));
        }
        for (name, v) in [("alpha", &alpha), ("gamma", &gamma)] {
            if let Some(x) = v.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
                return Err(Error::InvalidArgument(format!(
                    "{name} entries must be positive and finite, got {x}"
                )));
            }
        }
        Ok(LdaHyper {
            alpha_sum: alpha.iter().sum(),
            gamma_sum: gamma.iter().sum(),
            alpha,
            gamma,
        })
    }

    pub fn symmetric(topics: usize, vocab: usize, alpha: f64, gamma: f64) -> Result<Self> {
        Self::new(vec![alpha; topics], vec![gamma; vocab])
    }

    /// `alpha = 50 / T`, `gamma = 0.1`.
    pub fn default_for(topics: usize, vocab: usize) -> Result<Self> {
        Self::symmetric(topics, vocab, 50.0 / topics.max(1) as f64, DEFAULT_GAMMA)
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn topics(&self) -> usize {
        self.alpha.len()
    }

    pub fn vocab_len(&self) -> usize {
        self.gamma.len()
    }

    /// Natural log of the multivariate Beta function `B(x)`, the Dirichlet
    /// normalizer.
    pub fn ln_multivariate_beta(x: &[f64]) -> f64 {
        let s: f64 = x.iter().sum();
        x.iter().map(|&v| libm::lgamma(v)).sum::<f64>() - libm::lgamma(s)
    }

    fn check(&self, topics: usize, vocab: usize) -> Result<()> {
        if self.topics() != topics || self.vocab_len() != vocab {
            return Err(Error::DimensionMismatch(format!(
                "hyperparameters are for T={} V={}, corpus/model has T={topics} V={vocab}",
                self.topics(),
                self.vocab_len()
            )));
        }
        Ok(())
    }
}

/// Topic assignments for every token position plus the count matrices
/// derived from them.
#[derive(Debug, Clone, PartialEq)]
pub struct LdaState {
    hyper: LdaHyper,
    words: Vec<Vec<u32>>,
    z: Vec<Vec<u32>>,
    n_dt: Matrix<u32>,
    n_tw: Matrix<u32>,
    n_t: Vec<u32>,
    rng: SeededRng,
}

/// Assigns every token position a uniformly random topic.
pub fn gibbs_init(corpus: &Corpus, topics: usize, hyper: &LdaHyper, seed: u64) -> Result<LdaState> {
    if topics == 0 {
        return Err(Error::InvalidArgument("T must be at least 1".into()));
    }
    hyper.check(topics, corpus.vocab_len())?;
    let mut rng = SeededRng::seed_from_u64(seed);
    let words: Vec<Vec<u32>> = corpus
        .docs()
        .iter()
        .map(|d| d.positions().collect())
        .collect();
    let mut state = LdaState {
        hyper: hyper.clone(),
        z: Vec::with_capacity(words.len()),
        n_dt: Matrix::filled(words.len(), topics, 0),
        n_tw: Matrix::filled(topics, corpus.vocab_len(), 0),
        n_t: vec![0; topics],
        words: Vec::new(),
        rng: rng.clone(),
    };
    for (d, doc) in words.iter().enumerate() {
        let mut zd = Vec::with_capacity(doc.len());
        for &w in doc {
            let t = math::uniform_index(&mut rng, topics);
            zd.push(t as u32);
            state.n_dt[(d, t)] += 1;
            state.n_tw[(t, w as usize)] += 1;
            state.n_t[t] += 1;
        }
        state.z.push(zd);
    }
    state.words = words;
    state.rng = rng;
    Ok(state)
}

impl LdaState {
    pub fn topics(&self) -> usize {
        self.n_t.len()
    }

    pub fn vocab_len(&self) -> usize {
        self.n_tw.cols()
    }

    pub fn num_docs(&self) -> usize {
        self.words.len()
    }

    pub fn hyper(&self) -> &LdaHyper {
        &self.hyper
    }

    /// Topic of each position of each document.
    pub fn assignments(&self) -> &[Vec<u32>] {
        &self.z
    }

    pub fn doc_words(&self, d: usize) -> &[u32] {
        &self.words[d]
    }

    pub fn doc_topic_counts(&self) -> &Matrix<u32> {
        &self.n_dt
    }

    pub fn topic_token_counts(&self) -> &Matrix<u32> {
        &self.n_tw
    }

    pub fn topic_totals(&self) -> &[u32] {
        &self.n_t
    }

    /// Removes position `pos` of document `d` from the counts and returns
    /// its topic. The position must be reassigned with [`LdaState::assign`]
    /// before the state is consistent again.
    pub fn unassign(&mut self, d: usize, pos: usize) -> usize {
        let t = self.z[d][pos] as usize;
        let w = self.words[d][pos] as usize;
        self.n_dt[(d, t)] -= 1;
        self.n_tw[(t, w)] -= 1;
        self.n_t[t] -= 1;
        t
    }

    pub fn assign(&mut self, d: usize, pos: usize, t: usize) {
        let w = self.words[d][pos] as usize;
        self.z[d][pos] = t as u32;
        self.n_dt[(d, t)] += 1;
        self.n_tw[(t, w)] += 1;
        self.n_t[t] += 1;
    }

    /// Unnormalized collapsed conditional for token `w` in document `d`
    /// under the current counts.
    pub fn conditional_weights(&self, d: usize, w: u32, out: &mut [f64]) {
        let w = w as usize;
        let gamma_w = self.hyper.gamma[w];
        let gamma_sum = self.hyper.gamma_sum;
        let doc_counts = self.n_dt.row(d);
        for (t, o) in out.iter_mut().enumerate() {
            *o = (doc_counts[t] as f64 + self.hyper.alpha[t])
                * (self.n_tw[(t, w)] as f64 + gamma_w)
                / (self.n_t[t] as f64 + gamma_sum);
        }
    }

    /// Normalized conditional `p(z = t | rest)` for token `w` in document
    /// `d`. The counts are used as they stand, so the position being
    /// resampled must already be removed.
    pub fn collapsed_conditional(&self, d: usize, w: u32) -> Result<Vec<f64>> {
        if d >= self.num_docs() || w as usize >= self.vocab_len() {
            return Err(Error::DimensionMismatch(format!(
                "doc {d} / token {w} outside D={} V={}",
                self.num_docs(),
                self.vocab_len()
            )));
        }
        let mut p = vec![0.0; self.topics()];
        self.conditional_weights(d, w, &mut p);
        let total: f64 = p.iter().sum();
        p.iter_mut().for_each(|x| *x /= total);
        Ok(p)
    }

    /// Resamples every position once from the collapsed conditional.
    pub fn gibbs_sweep(&mut self) {
        self.sweep_with(math::sample_weighted);
    }

    /// One sweep in document-then-position order with a caller-supplied
    /// draw from the unnormalized weights.
    pub(crate) fn sweep_with<F>(&mut self, mut pick: F)
    where
        F: FnMut(&mut SeededRng, &[f64]) -> usize,
    {
        let mut weights = vec![0.0; self.topics()];
        for d in 0..self.words.len() {
            for pos in 0..self.words[d].len() {
                self.unassign(d, pos);
                self.conditional_weights(d, self.words[d][pos], &mut weights);
                let t = pick(&mut self.rng, &weights);
                self.assign(d, pos, t);
            }
        }
        debug_assert!(self.check_counts().is_ok(), "{:?}", self.check_counts());
    }

    /// Recomputes every count from the assignments and compares exactly.
    pub fn check_counts(&self) -> Result<()> {
        let topics = self.topics();
        let mut n_dt = Matrix::filled(self.num_docs(), topics, 0u32);
        let mut n_tw = Matrix::filled(topics, self.vocab_len(), 0u32);
        let mut n_t = vec![0u32; topics];
        for (d, (zd, wd)) in self.z.iter().zip(&self.words).enumerate() {
            if zd.len() != wd.len() {
                return Err(Error::InconsistentState(format!(
                    "doc {d} has {} assignments for {} positions",
                    zd.len(),
                    wd.len()
                )));
            }
            for (&t, &w) in zd.iter().zip(wd) {
                n_dt[(d, t as usize)] += 1;
                n_tw[(t as usize, w as usize)] += 1;
                n_t[t as usize] += 1;
            }
        }
        if n_dt != self.n_dt {
            return Err(Error::InconsistentState("doc-topic counts".into()));
        }
        if n_tw != self.n_tw {
            return Err(Error::InconsistentState("topic-token counts".into()));
        }
        if n_t != self.n_t {
            return Err(Error::InconsistentState("topic totals".into()));
        }
        Ok(())
    }

    /// Posterior mean topic-token distributions `(n_tw + γ_w) / (n_t + Σγ)`.
    pub fn phi(&self) -> Matrix<f64> {
        let mut phi = Matrix::filled(self.topics(), self.vocab_len(), 0.0);
        for t in 0..self.topics() {
            let denom = self.n_t[t] as f64 + self.hyper.gamma_sum;
            for (w, p) in phi.row_mut(t).iter_mut().enumerate() {
                *p = (self.n_tw[(t, w)] as f64 + self.hyper.gamma[w]) / denom;
            }
        }
        phi
    }

    /// Posterior mean document-topic distributions
    /// `(n_dt + α_t) / (|d| + Σα)`.
    pub fn doc_theta(&self) -> Matrix<f64> {
        let mut theta = Matrix::filled(self.num_docs(), self.topics(), 0.0);
        for d in 0..self.num_docs() {
            let denom = self.words[d].len() as f64 + self.hyper.alpha_sum;
            for (t, p) in theta.row_mut(d).iter_mut().enumerate() {
                *p = (self.n_dt[(d, t)] as f64 + self.hyper.alpha[t]) / denom;
            }
        }
        theta
    }

    /// Log joint `ln p(w, z)` of the current assignments under the priors.
    pub fn log_joint(&self) -> f64 {
        type B = LdaHyper;
        let mut total = 0.0;
        let mut buf = vec![0.0; self.vocab_len()];
        for t in 0..self.topics() {
            for (w, b) in buf.iter_mut().enumerate() {
                *b = self.n_tw[(t, w)] as f64 + self.hyper.gamma[w];
            }
            total += B::ln_multivariate_beta(&buf) - B::ln_multivariate_beta(&self.hyper.gamma);
        }
        let mut buf = vec![0.0; self.topics()];
        for d in 0..self.num_docs() {
            for (t, b) in buf.iter_mut().enumerate() {
                *b = self.n_dt[(d, t)] as f64 + self.hyper.alpha[t];
            }
            total += B::ln_multivariate_beta(&buf) - B::ln_multivariate_beta(&self.hyper.alpha);
        }
        total
    }
}

/// Burn-in, number of averaged samples and spacing between samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GibbsSchedule {
    pub burn_in: usize,
    pub samples: usize,
    pub thin: usize,
}

impl Default for GibbsSchedule {
    fn default() -> Self {
        GibbsSchedule {
            burn_in: 200,
            samples: 10,
            thin: 10,
        }
    }
}

impl GibbsSchedule {
    pub fn total_sweeps(&self) -> usize {
        self.burn_in + self.samples * self.thin
    }
}

/// Averaged posterior-mean estimates from one fitted chain.
#[derive(Debug, Clone, PartialEq)]
pub struct LdaModel {
    phi: Matrix<f64>,
    doc_theta: Matrix<f64>,
    hyper: LdaHyper,
    pub schedule: GibbsSchedule,
    pub doc_ids: Vec<String>,
    pub skipped_empty_docs: usize,
}

impl LdaModel {
    /// Assembles a model from stored estimates, checking shapes and that
    /// every row is a probability vector.
    pub fn from_parts(
        phi: Matrix<f64>,
        doc_theta: Matrix<f64>,
        hyper: LdaHyper,
        schedule: GibbsSchedule,
        doc_ids: Vec<String>,
    ) -> Result<Self> {
        hyper.check(phi.rows(), phi.cols())?;
        if doc_theta.cols() != phi.rows() || doc_theta.rows() != doc_ids.len() {
            return Err(Error::DimensionMismatch(format!(
                "doc_theta is {}x{}, expected {}x{}",
                doc_theta.rows(),
                doc_theta.cols(),
                doc_ids.len(),
                phi.rows()
            )));
        }
        for (t, row) in phi.iter_rows().enumerate() {
            check_simplex(&format!("phi row {t}"), row)?;
        }
        for (d, row) in doc_theta.iter_rows().enumerate() {
            check_simplex(&format!("doc_theta row {d}"), row)?;
        }
        Ok(LdaModel {
            phi,
            doc_theta,
            hyper,
            schedule,
            doc_ids,
            skipped_empty_docs: 0,
        })
    }

    pub fn topics(&self) -> usize {
        self.phi.rows()
    }

    pub fn vocab_len(&self) -> usize {
        self.phi.cols()
    }

    pub fn phi(&self) -> &Matrix<f64> {
        &self.phi
    }

    pub fn doc_theta(&self) -> &Matrix<f64> {
        &self.doc_theta
    }

    pub fn hyper(&self) -> &LdaHyper {
        &self.hyper
    }

    /// `Σ_d Σ_w n_dw ln Σ_t θ_dt φ_tw` using the fitted document
    /// proportions. `corpus` must be the training corpus.
    pub fn log_likelihood(&self, corpus: &Corpus) -> Result<f64> {
        if corpus.num_docs() != self.doc_theta.rows() || corpus.vocab_len() != self.vocab_len() {
            return Err(Error::DimensionMismatch(
                "corpus does not match the fitted model".into(),
            ));
        }
        let mut total = 0.0;
        for (d, doc) in corpus.docs().iter().enumerate() {
            total += doc_log_likelihood(&self.phi, self.doc_theta.row(d), doc).0;
        }
        Ok(total)
    }
}

/// Returns `(Σ count · ln p(w|d), in-vocabulary token count)`; tokens
/// outside the model's vocabulary are skipped.
fn doc_log_likelihood(phi: &Matrix<f64>, theta: &[f64], doc: &FeatureDoc) -> (f64, usize) {
    let mut ll = 0.0;
    let mut n = 0;
    for &(w, c) in doc.counts() {
        if w as usize >= phi.cols() {
            continue;
        }
        let p: f64 = theta
            .iter()
            .enumerate()
            .map(|(t, th)| th * phi[(t, w as usize)])
            .sum();
        ll += c as f64 * ln(p);
        n += c as usize;
    }
    (ll, n)
}

/// Fits LDA with `T` topics. Runs `burn_in` sweeps, then averages the
/// posterior-mean estimates of `samples` states taken every `thin` sweeps.
pub fn fit_lda(
    corpus: &Corpus,
    topics: usize,
    hyper: &LdaHyper,
    schedule: GibbsSchedule,
    seed: u64,
) -> Result<LdaModel> {
    fit_lda_observed(corpus, topics, hyper, schedule, seed, |_, _| {})
}

/// [`fit_lda`] that calls `observer(sweeps_done, state)` after every sweep.
pub fn fit_lda_observed<F>(
    corpus: &Corpus,
    topics: usize,
    hyper: &LdaHyper,
    schedule: GibbsSchedule,
    seed: u64,
    mut observer: F,
) -> Result<LdaModel>
where
    F: FnMut(usize, &LdaState),
{
    if schedule.samples == 0 || schedule.thin == 0 {
        return Err(Error::InvalidArgument(
            "samples and thin must be at least 1".into(),
        ));
    }
    if corpus.total_tokens() == 0 {
        return Err(Error::EmptyCorpus);
    }
    let mut state = gibbs_init(corpus, topics, hyper, seed)?;
    let mut done = 0;
    for _ in 0..schedule.burn_in {
        state.gibbs_sweep();
        done += 1;
        observer(done, &state);
    }
    let mut phi = Matrix::filled(topics, corpus.vocab_len(), 0.0);
    let mut theta = Matrix::filled(corpus.num_docs(), topics, 0.0);
    for _ in 0..schedule.samples {
        for _ in 0..schedule.thin {
            state.gibbs_sweep();
            done += 1;
            observer(done, &state);
        }
        add_into(&mut phi, &state.phi());
        add_into(&mut theta, &state.doc_theta());
    }
    let n = schedule.samples as f64;
    phi.as_mut_slice().iter_mut().for_each(|x| *x /= n);
    theta.as_mut_slice().iter_mut().for_each(|x| *x /= n);
    Ok(LdaModel {
        phi,
        doc_theta: theta,
        hyper: hyper.clone(),
        schedule,
        doc_ids: corpus.docs().iter().map(|d| d.doc_id.clone()).collect(),
        skipped_empty_docs: corpus.empty_docs(),
    })
}

fn add_into(acc: &mut Matrix<f64>, x: &Matrix<f64>) {
    for (a, b) in acc.as_mut_slice().iter_mut().zip(x.as_slice()) {
        *a += b;
    }
}

/// Fold-in controls for documents not seen during fitting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FoldInOptions {
    pub sweeps: usize,
    pub seed: u64,
}

impl Default for FoldInOptions {
    fn default() -> Self {
        FoldInOptions {
            sweeps: DEFAULT_FOLD_IN_SWEEPS,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoldIn {
    pub theta: Vec<f64>,
    /// Token occurrences with ids outside the model vocabulary.
    pub oov_dropped: usize,
}

/// Topic proportions for one document with `phi` held fixed.
///
/// Samples assignments from `(n_dt + α_t) φ_tw` and averages the posterior
/// mean of the second half of the sweeps. Token ids `>= V` are dropped; a
/// document with nothing left gets a uniform vector.
pub fn infer_doc_theta(model: &LdaModel, doc: &FeatureDoc, opts: FoldInOptions) -> FoldIn {
    let topics = model.topics();
    let v = model.vocab_len();
    let words: Vec<u32> = doc.positions().filter(|&w| (w as usize) < v).collect();
    let oov_dropped = doc.len() - words.len();
    if words.is_empty() {
        return FoldIn {
            theta: vec![1.0 / topics as f64; topics],
            oov_dropped,
        };
    }
    let alpha = model.hyper.alpha();
    let alpha_sum: f64 = alpha.iter().sum();
    let mut rng = SeededRng::seed_from_u64(opts.seed);
    let mut counts = vec![0u32; topics];
    let mut z: Vec<usize> = words
        .iter()
        .map(|_| {
            let t = math::uniform_index(&mut rng, topics);
            counts[t] += 1;
            t
        })
        .collect();
    let sweeps = opts.sweeps.max(1);
    let start = sweeps / 2;
    let mut acc = vec![0.0; topics];
    let mut weights = vec![0.0; topics];
    let denom = words.len() as f64 + alpha_sum;
    for s in 0..sweeps {
        for (pos, &w) in words.iter().enumerate() {
            counts[z[pos]] -= 1;
            for (t, wt) in weights.iter_mut().enumerate() {
                *wt = (counts[t] as f64 + alpha[t]) * model.phi[(t, w as usize)];
            }
            let t = math::sample_weighted(&mut rng, &weights);
            z[pos] = t;
            counts[t] += 1;
        }
        if s >= start {
            for (a, (&c, &al)) in acc.iter_mut().zip(counts.iter().zip(alpha)) {
                *a += (c as f64 + al) / denom;
            }
        }
    }
    let n = (sweeps - start) as f64;
    acc.iter_mut().for_each(|a| *a /= n);
    FoldIn {
        theta: acc,
        oov_dropped,
    }
}

/// Per-token average of `ln Σ_t θ_dt φ_tw` over `corpus`, with `θ_d`
/// obtained by fold-in (document `i` uses seed `opts.seed + i`).
pub fn held_out_log_likelihood(
    model: &LdaModel,
    corpus: &Corpus,
    opts: FoldInOptions,
) -> Result<f64> {
    let mut total = 0.0;
    let mut tokens = 0usize;
    for (i, doc) in corpus.docs().iter().enumerate() {
        let fold = infer_doc_theta(
            model,
            doc,
            FoldInOptions {
                sweeps: opts.sweeps,
                seed: opts.seed.wrapping_add(i as u64),
            },
        );
        let (ll, n) = doc_log_likelihood(&model.phi, &fold.theta, doc);
        total += ll;
        tokens += n;
    }
    if tokens == 0 {
        return Err(Error::InvalidArgument(
            "no in-vocabulary tokens to evaluate".into(),
        ));
    }
    Ok(total / tokens as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Vocabulary;

    fn corpus(vocab: usize, docs: &[&[(u32, u32)]]) -> Corpus {
        let v = Vocabulary::from_surfaces((0..vocab).map(|i| format!("w{i}"))).unwrap();
        let docs = docs
            .iter()
            .enumerate()
            .map(|(i, c)| FeatureDoc::new(format!("d{i}"), None, c.iter().copied()).unwrap())
            .collect();
        Corpus::new(v, docs, vec![]).unwrap()
    }

    fn random_corpus(seed: u64, docs: usize, vocab: usize) -> Corpus {
        let mut rng = SeededRng::seed_from_u64(seed);
        let rows: Vec<Vec<(u32, u32)>> = (0..docs)
            .map(|_| {
                (0..vocab as u32)
                    .filter_map(|w| {
                        let c = math::uniform_index(&mut rng, 4) as u32;
                        (c > 0 && math::uniform(&mut rng) < 0.4).then_some((w, c))
                    })
                    .collect()
            })
            .collect();
        let refs: Vec<&[(u32, u32)]> = rows.iter().map(Vec::as_slice).collect();
        corpus(vocab, &refs)
    }

    #[test]
    fn single_topic_init() {
        let c = corpus(3, &[&[(0, 2), (2, 1)], &[(1, 4)]]);
        let h = LdaHyper::default_for(1, 3).unwrap();
        let s = gibbs_init(&c, 1, &h, 5).unwrap();
        assert!(s.assignments().iter().flatten().all(|&t| t == 0));
        assert_eq!(s.topic_totals(), &[7]);
        s.check_counts().unwrap();
    }

    #[test]
    fn init_is_seeded_and_consistent() {
        let c = random_corpus(1, 30, 12);
        let h = LdaHyper::default_for(4, 12).unwrap();
        let a = gibbs_init(&c, 4, &h, 77).unwrap();
        assert_eq!(a, gibbs_init(&c, 4, &h, 77).unwrap());
        a.check_counts().unwrap();
        assert_ne!(
            a.assignments(),
            gibbs_init(&c, 4, &h, 78).unwrap().assignments()
        );
    }

    #[test]
    fn init_rejects_mismatched_hyper() {
        let c = corpus(3, &[&[(0, 1)]]);
        let h = LdaHyper::default_for(2, 4).unwrap();
        assert!(matches!(
            gibbs_init(&c, 2, &h, 0),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(LdaHyper::new(vec![1.0, 0.0], vec![1.0]).is_err());
        assert!(LdaHyper::new(vec![1.0], vec![f64::NAN]).is_err());
    }

    #[test]
    fn conditional_uniform_without_counts() {
        let c = corpus(3, &[&[(1, 1)]]);
        let h = LdaHyper::symmetric(3, 3, 0.5, 0.1).unwrap();
        let mut s = gibbs_init(&c, 3, &h, 0).unwrap();
        s.unassign(0, 0);
        let p = s.collapsed_conditional(0, 1).unwrap();
        for x in p {
            assert!((x - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn conditional_hand_example() {
        // doc 0: two positions of token 0 in topic 0; eight more positions of
        // token 1 in topic 0 in another doc, plus one token-0 position there.
        let c = corpus(3, &[&[(0, 2)], &[(0, 1), (1, 7)]]);
        let h = LdaHyper::symmetric(2, 3, 1.0, 1.0).unwrap();
        let mut s = gibbs_init(&c, 2, &h, 0).unwrap();
        for d in 0..2 {
            for pos in 0..s.doc_words(d).len() {
                s.unassign(d, pos);
                s.assign(d, pos, 0);
            }
        }
        assert_eq!(s.doc_topic_counts().row(0), &[2, 0]);
        assert_eq!(s.topic_token_counts()[(0, 0)], 3);
        assert_eq!(s.topic_totals(), &[10, 0]);
        let p = s.collapsed_conditional(0, 0).unwrap();
        let (a, b) = (3.0 * 4.0 / 13.0, 1.0 * 1.0 / 3.0);
        assert!((a - 0.9230769230769231f64).abs() < 1e-15);
        assert!((p[0] - a / (a + b)).abs() < 1e-15);
        assert!((p[0] - 0.7346938775510204).abs() < 1e-12);
        assert!((p[1] - 0.2653061224489796).abs() < 1e-12);
    }

    #[test]
    fn conditional_sums_to_one_and_is_positive() {
        let c = random_corpus(2, 20, 9);
        let h = LdaHyper::symmetric(5, 9, 0.01, 0.001).unwrap();
        let s = gibbs_init(&c, 5, &h, 3).unwrap();
        for d in 0..c.num_docs() {
            for w in 0..9 {
                let p = s.collapsed_conditional(d, w).unwrap();
                assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                assert!(p.iter().all(|&x| x > 0.0));
            }
        }
        assert!(s.collapsed_conditional(99, 0).is_err());
    }

    #[test]
    fn single_topic_sweep_only_advances_rng() {
        let c = random_corpus(4, 10, 6);
        let h = LdaHyper::default_for(1, 6).unwrap();
        let mut s = gibbs_init(&c, 1, &h, 1).unwrap();
        let before = s.clone();
        s.gibbs_sweep();
        assert_eq!(s.assignments(), before.assignments());
        assert_eq!(s.doc_topic_counts(), before.doc_topic_counts());
        assert_ne!(s, before);
    }

    #[test]
    fn sweeps_conserve_counts_and_are_deterministic() {
        let c = random_corpus(5, 25, 15);
        let h = LdaHyper::symmetric(3, 15, 0.3, 0.05).unwrap();
        let mut a = gibbs_init(&c, 3, &h, 9).unwrap();
        let mut b = a.clone();
        for _ in 0..20 {
            a.gibbs_sweep();
            b.gibbs_sweep();
            a.check_counts().unwrap();
            for d in 0..c.num_docs() {
                let s: u32 = a.doc_topic_counts().row(d).iter().sum();
                assert_eq!(s as usize, c.doc(d).len());
            }
            let total: u32 = a.topic_totals().iter().sum();
            assert_eq!(total as usize, c.total_tokens());
        }
        assert_eq!(a, b);
    }

    fn swapped(state: &LdaState) -> LdaState {
        let mut s = state.clone();
        for d in 0..s.num_docs() {
            for pos in 0..s.doc_words(d).len() {
                let t = s.unassign(d, pos);
                s.assign(d, pos, 1 - t);
            }
        }
        s
    }

    #[test]
    fn topic_relabeling_commutes_with_sweeps() {
        let c = random_corpus(6, 12, 8);
        let h = LdaHyper::symmetric(2, 8, 0.4, 0.2).unwrap();
        let mut a = gibbs_init(&c, 2, &h, 21).unwrap();
        let mut b = swapped(&a);
        for _ in 0..10 {
            a.sweep_with(|rng, w| math::sample_weighted_in_order(rng, w, [0, 1]));
            // the relabeled chain walks its topics in the relabeled order
            b.sweep_with(|rng, w| math::sample_weighted_in_order(rng, w, [1, 0]));
            assert_eq!(swapped(&a).assignments(), b.assignments());
        }
    }

    #[test]
    fn single_topic_fit() {
        let c = corpus(3, &[&[(0, 2), (2, 1)], &[(1, 1)]]);
        let h = LdaHyper::symmetric(1, 3, 1.0, 0.5).unwrap();
        let m = fit_lda(
            &c,
            1,
            &h,
            GibbsSchedule {
                burn_in: 2,
                samples: 3,
                thin: 1,
            },
            0,
        )
        .unwrap();
        for (w, n) in [2.0, 1.0, 1.0].iter().enumerate() {
            assert!((m.phi()[(0, w)] - (n + 0.5) / 5.5).abs() < 1e-12);
        }
        assert!(m.doc_theta().as_slice().iter().all(|&x| x == 1.0));
    }

    #[test]
    fn fit_rows_normalized_and_deterministic() {
        let c = random_corpus(7, 30, 10);
        let h = LdaHyper::default_for(3, 10).unwrap();
        let sched = GibbsSchedule {
            burn_in: 10,
            samples: 4,
            thin: 2,
        };
        let m = fit_lda(&c, 3, &h, sched, 5).unwrap();
        for row in m.phi().iter_rows().chain(m.doc_theta().iter_rows()) {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
        assert_eq!(m, fit_lda(&c, 3, &h, sched, 5).unwrap());
        let rebuilt = LdaModel::from_parts(
            m.phi().clone(),
            m.doc_theta().clone(),
            m.hyper().clone(),
            sched,
            m.doc_ids.clone(),
        )
        .unwrap();
        assert_eq!(rebuilt.phi(), m.phi());
    }

    #[test]
    fn fit_rejects_bad_input() {
        let c = corpus(2, &[&[]]);
        let h = LdaHyper::default_for(2, 2).unwrap();
        assert_eq!(
            fit_lda(&c, 2, &h, GibbsSchedule::default(), 0).unwrap_err(),
            Error::EmptyCorpus
        );
        let c = corpus(2, &[&[(0, 1)]]);
        let bad = GibbsSchedule {
            burn_in: 0,
            samples: 0,
            thin: 1,
        };
        assert!(fit_lda(&c, 2, &h, bad, 0).is_err());
    }

    fn one_hot_model(topics: usize, vocab: usize, hot: usize) -> LdaModel {
        // topic `hot` owns tokens 0..2; other topics spread over the rest
        let mut rows = Vec::new();
        for t in 0..topics {
            let row: Vec<f64> = if t == hot {
                (0..vocab).map(|w| if w < 2 { 0.5 } else { 0.0 }).collect()
            } else {
                (0..vocab)
                    .map(|w| if w < 2 { 0.0 } else { 1.0 / (vocab - 2) as f64 })
                    .collect()
            };
            rows.push(row);
        }
        let hyper = LdaHyper::symmetric(topics, vocab, 0.1, 0.1).unwrap();
        LdaModel::from_parts(
            Matrix::from_rows(rows).unwrap(),
            Matrix::filled(0, topics, 0.0),
            hyper,
            GibbsSchedule::default(),
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn fold_in_concentrates_on_owning_topic() {
        let m = one_hot_model(4, 6, 2);
        let doc = FeatureDoc::new("x", None, [(0, 12), (1, 8)]).unwrap();
        let f = infer_doc_theta(
            &m,
            &doc,
            FoldInOptions {
                sweeps: 20,
                seed: 3,
            },
        );
        assert!(f.theta[2] > 0.9, "{:?}", f.theta);
        assert_eq!(f.oov_dropped, 0);
        assert_eq!(
            f,
            infer_doc_theta(
                &m,
                &doc,
                FoldInOptions {
                    sweeps: 20,
                    seed: 3
                }
            )
        );
    }

    #[test]
    fn fold_in_empty_and_oov() {
        let m = one_hot_model(4, 6, 0);
        let f = infer_doc_theta(&m, &FeatureDoc::empty("e", None), FoldInOptions::default());
        assert_eq!(f.theta, vec![0.25; 4]);
        let doc = FeatureDoc::new("o", None, [(6, 2), (9, 1)]).unwrap();
        let f = infer_doc_theta(&m, &doc, FoldInOptions::default());
        assert_eq!(f.theta, vec![0.25; 4]);
        assert_eq!(f.oov_dropped, 3);
    }

    #[test]
    fn held_out_uniform_single_topic() {
        let v = 5;
        let hyper = LdaHyper::symmetric(1, v, 1.0, 1.0).unwrap();
        let m = LdaModel::from_parts(
            Matrix::filled(1, v, 1.0 / v as f64),
            Matrix::filled(0, 1, 0.0),
            hyper,
            GibbsSchedule::default(),
            vec![],
        )
        .unwrap();
        let c = random_corpus(8, 6, v);
        let ll = held_out_log_likelihood(&m, &c, FoldInOptions::default()).unwrap();
        assert!((ll + (v as f64).ln()).abs() < 1e-12);
    }

    #[test]
    fn held_out_two_token_hand_case() {
        // one topic, phi = [0.8, 0.2]; doc {a:3, b:1}
        // mean = (3 ln 0.8 + ln 0.2) / 4
        let hyper = LdaHyper::symmetric(1, 2, 1.0, 1.0).unwrap();
        let m = LdaModel::from_parts(
            Matrix::from_rows(vec![vec![0.8, 0.2]]).unwrap(),
            Matrix::filled(0, 1, 0.0),
            hyper,
            GibbsSchedule::default(),
            vec![],
        )
        .unwrap();
        let c = corpus(2, &[&[(0, 3), (1, 1)]]);
        let ll = held_out_log_likelihood(&m, &c, FoldInOptions::default()).unwrap();
        let want = (3.0 * 0.8f64.ln() + 0.2f64.ln()) / 4.0;
        assert!((ll - want).abs() < 1e-12);
        assert!(ll <= 0.0);
        let oov = corpus(5, &[&[(3, 1)]]);
        assert!(held_out_log_likelihood(&m, &oov, FoldInOptions::default()).is_err());
    }

    #[test]
    fn log_joint_increases_on_structured_data() {
        let mut rows: Vec<Vec<(u32, u32)>> = Vec::new();
        for i in 0..20 {
            let base = if i % 2 == 0 { 0 } else { 3 };
            rows.push(vec![(base, 3), (base + 1, 2), (base + 2, 3)]);
        }
        let refs: Vec<&[(u32, u32)]> = rows.iter().map(Vec::as_slice).collect();
        let c = corpus(6, &refs);
        let h = LdaHyper::symmetric(2, 6, 0.1, 0.1).unwrap();
        let mut s = gibbs_init(&c, 2, &h, 4).unwrap();
        let start = s.log_joint();
        for _ in 0..50 {
            s.gibbs_sweep();
        }
        assert!(s.log_joint() > start);
    }
}

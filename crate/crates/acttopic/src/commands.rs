//! The `ingest`, `fit`, `assign` and `eval` subcommands.
//!
//! Every value can come from a flag or from the `key = value` config file;
//! flags win. All randomness derives from the single `seed`:
//!
//! - mixture initialization uses `seed`;
//! - LDA chain `c` uses `seed + c`;
//! - fold-in of document `i` in `assign` uses `seed + FOLD_IN_SEED_OFFSET + i`.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use acttopic_core::catmix::{self, EmInit, EmOptions};
use acttopic_core::corpus::{self, LabelCorpusBuilder, LabelDoc, ThresholdBuilder};
use acttopic_core::eval::{self, topic_report};
use acttopic_core::lda::{self, FoldInOptions, GibbsSchedule, LdaHyper, LdaModel};
use acttopic_core::{Corpus, Matrix};

use crate::config::ConfigFile;
use crate::error::{Error, Result};
use crate::formats::actfile::ActReader;
use crate::formats::assignments::{self, Assignments};
use crate::formats::corpusfile::{load_corpus, save_corpus};
use crate::formats::labfile::LabReader;
use crate::formats::model::{load_model, save_model, Model};
use crate::formats::{self, source_name, trace};
use crate::manifest::{sha256_file, RunManifest};
use crate::report::{self, Metrics, ReportFormat};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "ACTTOPIC_OUT_DIR";
pub const FOLD_IN_SEED_OFFSET: u64 = 1_000_000;
pub const DEFAULT_TOP_K_FEATURES: usize = 10;

fn required<T>(value: Option<T>, name: &str) -> Result<T> {
    value.ok_or_else(|| Error::Usage(format!("missing --{name} (flag or config key)")))
}

fn out_dir(flag: Option<PathBuf>, cfg: &ConfigFile) -> Result<PathBuf> {
    if let Some(d) = cfg.pick(flag, "out_dir")? {
        return Ok(d);
    }
    Ok(std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(".")))
}

#[derive(Debug, Clone, Default, clap::Args)]
pub struct IngestArgs {
    /// Activation file (`#actfile`).
    #[arg(long)]
    pub actfile: Option<PathBuf>,
    /// Label file (`#labfile`).
    #[arg(long)]
    pub labfile: Option<PathBuf>,
    /// Keep unit j iff its activation is strictly greater than this.
    #[arg(long, allow_negative_numbers = true)]
    pub threshold: Option<f64>,
    /// Treat activation values as class scores and keep the K best classes.
    #[arg(long)]
    pub top_k: Option<usize>,
    /// Class names for --top-k, one per line (default `class_<i>`).
    #[arg(long)]
    pub class_names: Option<PathBuf>,
    /// Re-express the corpus in the vocabulary of an existing corpus file;
    /// unknown tokens are dropped.
    #[arg(long)]
    pub vocab_from: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IngestSummary {
    pub docs: usize,
    pub vocab: usize,
    pub empty_docs: usize,
    pub oov_dropped: usize,
}

fn read_class_names(path: &Path, dim: usize) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let names: Vec<String> = text.lines().map(str::to_string).collect();
    if names.len() != dim {
        return Err(Error::format(
            &source_name(path),
            names.len(),
            format!("{} class names for dim={dim}", names.len()),
        ));
    }
    Ok(names)
}

fn ingest_threshold(path: &Path, threshold: f64) -> Result<Corpus> {
    let src = source_name(path);
    let mut reader = ActReader::new(formats::open(path)?, &src)?;
    let header = reader.header().clone();
    let mut builder = ThresholdBuilder::new(threshold)?;
    while let Some(record) = reader.next() {
        builder
            .push(record?)
            .map_err(|e| Error::format(&src, reader.line(), e.to_string()))?;
    }
    let mut c = builder.finish();
    c.set_meta("layer", header.layer);
    c.set_meta("dim", header.dim.to_string());
    for (k, v) in header.extra {
        c.set_meta(k, v);
    }
    Ok(c)
}

fn ingest_top_k(path: &Path, k: usize, class_names: Option<&Path>) -> Result<Corpus> {
    let src = source_name(path);
    let mut reader = ActReader::new(formats::open(path)?, &src)?;
    let header = reader.header().clone();
    let names = match class_names {
        Some(p) => read_class_names(p, header.dim)?,
        None => (0..header.dim).map(|i| format!("class_{i}")).collect(),
    };
    let mut builder = LabelCorpusBuilder::new();
    while let Some(record) = reader.next() {
        let record = record?;
        let line = reader.line();
        if record.values.len() != header.dim {
            return Err(Error::format(
                &src,
                line,
                format!(
                    "doc {}: --top-k needs all {} scores",
                    record.doc_id, header.dim
                ),
            ));
        }
        let scores: Vec<f64> = record.values.iter().map(|&(_, v)| v).collect();
        let surfaces = corpus::top_k_labels(&scores, k, &names)
            .map_err(|e| Error::format(&src, line, e.to_string()))?;
        builder
            .push(LabelDoc {
                doc_id: record.doc_id,
                gold_label: record.gold_label,
                surfaces,
            })
            .map_err(|e| Error::format(&src, line, e.to_string()))?;
    }
    let mut c = builder.finish();
    c.set_meta("featurization", "top_k");
    c.set_meta("top_k", k.to_string());
    c.set_meta("layer", header.layer);
    c.set_meta("dim", header.dim.to_string());
    for (key, v) in header.extra {
        c.set_meta(key, v);
    }
    Ok(c)
}

fn ingest_labels(path: &Path) -> Result<Corpus> {
    let src = source_name(path);
    let mut reader = LabReader::new(formats::open(path)?, &src)?;
    let tag = reader.source_tag().to_string();
    let extra = reader.extra_header().to_vec();
    let mut builder = LabelCorpusBuilder::new();
    while let Some(doc) = reader.next() {
        builder
            .push(doc?)
            .map_err(|e| Error::format(&src, reader.line(), e.to_string()))?;
    }
    let mut c = builder.finish();
    c.set_meta("source", tag);
    for (k, v) in extra {
        c.set_meta(k, v);
    }
    Ok(c)
}

pub fn ingest(args: IngestArgs, cfg: &ConfigFile) -> Result<IngestSummary> {
    let actfile: Option<PathBuf> = cfg.pick(args.actfile, "actfile")?;
    let labfile: Option<PathBuf> = cfg.pick(args.labfile, "labfile")?;
    let threshold: Option<f64> = cfg.pick(args.threshold, "threshold")?;
    let top_k: Option<usize> = cfg.pick(args.top_k, "top_k")?;
    let class_names: Option<PathBuf> = cfg.pick(args.class_names, "class_names")?;
    let vocab_from: Option<PathBuf> = cfg.pick(args.vocab_from, "vocab_from")?;
    let out: PathBuf = required(cfg.pick(args.out, "out")?, "out")?;

    let mut corpus = match (actfile, labfile) {
        (Some(_), Some(_)) => {
            return Err(Error::Usage(
                "give either --actfile or --labfile, not both".into(),
            ))
        }
        (None, None) => {
            return Err(Error::Usage(
                "one of --actfile or --labfile is required".into(),
            ))
        }
        (None, Some(lab)) => {
            if threshold.is_some() || top_k.is_some() {
                return Err(Error::Usage(
                    "--threshold and --top-k only apply to --actfile input".into(),
                ));
            }
            ingest_labels(&lab)?
        }
        (Some(act), None) => match (threshold, top_k) {
            (Some(t), None) => ingest_threshold(&act, t)?,
            (None, Some(k)) => ingest_top_k(&act, k, class_names.as_deref())?,
            (Some(_), Some(_)) => {
                return Err(Error::Usage(
                    "--threshold and --top-k are mutually exclusive".into(),
                ))
            }
            (None, None) => {
                return Err(Error::Usage(
                    "--actfile needs --threshold or --top-k".into(),
                ))
            }
        },
    };
    let mut oov_dropped = 0;
    if let Some(base) = vocab_from {
        let base = load_corpus(&base)?;
        let (remapped, dropped) = corpus.remap_to(base.vocabulary())?;
        corpus = remapped;
        corpus.set_meta("oov_dropped", dropped.to_string());
        corpus.set_meta(corpus::META_EMPTY_DOCS, corpus.empty_docs().to_string());
        oov_dropped = dropped;
    }
    save_corpus(&corpus, &out)?;
    Ok(IngestSummary {
        docs: corpus.num_docs(),
        vocab: corpus.vocab_len(),
        empty_docs: corpus.empty_docs(),
        oov_dropped,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelFamily {
    CatMix,
    Lda,
}

impl std::str::FromStr for ModelFamily {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "catmix" => Ok(ModelFamily::CatMix),
            "lda" => Ok(ModelFamily::Lda),
            other => Err(format!("unknown model {other:?} (catmix, lda)")),
        }
    }
}

#[derive(Debug, Clone, Default, clap::Args)]
pub struct FitArgs {
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// `lda` or `catmix`.
    #[arg(long)]
    pub model: Option<ModelFamily>,
    #[arg(long)]
    pub topics: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Symmetric value or comma-separated per-topic vector (default 50/T).
    #[arg(long)]
    pub alpha: Option<String>,
    /// Symmetric value or comma-separated per-token vector (default 0.1).
    #[arg(long)]
    pub gamma: Option<String>,
    /// Additive smoothing of mixture topic rows (default 1e-6).
    #[arg(long)]
    pub smoothing: Option<f64>,
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub thin: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Independent LDA chains run in parallel; the best training
    /// log-likelihood wins.
    #[arg(long)]
    pub chains: Option<usize>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

/// Fully resolved settings of one `fit` run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub corpus: PathBuf,
    pub family: ModelFamily,
    pub topics: usize,
    pub seed: u64,
    pub hyper: Option<LdaHyper>,
    pub schedule: GibbsSchedule,
    pub chains: usize,
    pub em: EmOptions,
    pub out_dir: PathBuf,
}

impl RunConfig {
    fn entries(&self) -> Vec<(String, String)> {
        let mut e = vec![
            ("corpus".to_string(), self.corpus.display().to_string()),
            ("topics".into(), self.topics.to_string()),
        ];
        match self.family {
            ModelFamily::CatMix => {
                e.push(("model".into(), "catmix".into()));
                e.push(("smoothing".into(), format!("{}", self.em.smoothing)));
                e.push(("tol".into(), format!("{}", self.em.tol)));
                e.push(("max_iter".into(), self.em.max_iter.to_string()));
            }
            ModelFamily::Lda => {
                e.push(("model".into(), "lda".into()));
                if let Some(h) = &self.hyper {
                    e.push(("alpha".into(), join(h.alpha())));
                    e.push(("gamma".into(), join(h.gamma())));
                }
                e.push(("burn_in".into(), self.schedule.burn_in.to_string()));
                e.push(("samples".into(), self.schedule.samples.to_string()));
                e.push(("thin".into(), self.schedule.thin.to_string()));
                e.push(("chains".into(), self.chains.to_string()));
            }
        }
        e
    }
}

fn join(xs: &[f64]) -> String {
    xs.iter()
        .map(|x| format!("{x}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn parse_prior(spec: &str, len: usize, name: &str) -> Result<Vec<f64>> {
    let values: Vec<f64> = spec
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| {
            Error::Usage(format!(
                "--{name} must be a number or comma-separated numbers"
            ))
        })?;
    match values.len() {
        1 => Ok(vec![values[0]; len]),
        n if n == len => Ok(values),
        n => Err(Error::Usage(format!(
            "--{name} has {n} values, expected 1 or {len}"
        ))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitSummary {
    pub model_path: PathBuf,
    pub trace_path: PathBuf,
    pub manifest_path: PathBuf,
    /// Final mixture log-likelihood or chosen chain's training
    /// log-likelihood.
    pub log_likelihood: f64,
    pub skipped_empty_docs: usize,
    pub warnings: Vec<String>,
}

pub fn resolve_fit(
    args: FitArgs,
    cfg: &ConfigFile,
    vocab_len: impl FnOnce(&Path) -> Result<usize>,
) -> Result<RunConfig> {
    let corpus: PathBuf = required(cfg.pick(args.corpus, "corpus")?, "corpus")?;
    let family: ModelFamily = required(cfg.pick(args.model, "model")?, "model")?;
    let topics: usize = required(cfg.pick(args.topics, "topics")?, "topics")?;
    if topics == 0 {
        return Err(Error::Usage("--topics must be at least 1".into()));
    }
    let seed = cfg.pick(args.seed, "seed")?.unwrap_or(0);
    let lda_flags = args.alpha.is_some()
        || args.gamma.is_some()
        || args.burn_in.is_some()
        || args.samples.is_some()
        || args.thin.is_some()
        || args.chains.is_some();
    let em_flags = args.smoothing.is_some() || args.tol.is_some() || args.max_iter.is_some();
    match family {
        ModelFamily::CatMix if lda_flags => {
            return Err(Error::Usage(
                "LDA sampler/prior flags given with --model catmix".into(),
            ))
        }
        ModelFamily::Lda if em_flags => {
            return Err(Error::Usage(
                "EM flags (--smoothing, --tol, --max-iter) given with --model lda".into(),
            ))
        }
        _ => {}
    }
    let defaults = GibbsSchedule::default();
    let schedule = GibbsSchedule {
        burn_in: cfg
            .pick(args.burn_in, "burn_in")?
            .unwrap_or(defaults.burn_in),
        samples: cfg
            .pick(args.samples, "samples")?
            .unwrap_or(defaults.samples),
        thin: cfg.pick(args.thin, "thin")?.unwrap_or(defaults.thin),
    };
    let em_defaults = EmOptions::default();
    let em = EmOptions {
        tol: cfg.pick(args.tol, "tol")?.unwrap_or(em_defaults.tol),
        max_iter: cfg
            .pick(args.max_iter, "max_iter")?
            .unwrap_or(em_defaults.max_iter),
        smoothing: cfg
            .pick(args.smoothing, "smoothing")?
            .unwrap_or(em_defaults.smoothing),
    };
    let chains = cfg.pick(args.chains, "chains")?.unwrap_or(1);
    if chains == 0 {
        return Err(Error::Usage("--chains must be at least 1".into()));
    }
    let hyper = match family {
        ModelFamily::CatMix => None,
        ModelFamily::Lda => {
            let v = vocab_len(&corpus)?;
            let alpha = match cfg.pick(args.alpha, "alpha")? {
                Some(s) => parse_prior(&s, topics, "alpha")?,
                None => vec![50.0 / topics as f64; topics],
            };
            let gamma = match cfg.pick(args.gamma, "gamma")? {
                Some(s) => parse_prior(&s, v, "gamma")?,
                None => vec![lda::DEFAULT_GAMMA; v],
            };
            Some(LdaHyper::new(alpha, gamma).map_err(|e| Error::Usage(e.to_string()))?)
        }
    };
    Ok(RunConfig {
        corpus,
        family,
        topics,
        seed,
        hyper,
        schedule,
        chains,
        em,
        out_dir: out_dir(args.out_dir, cfg)?,
    })
}

struct ChainResult {
    model: LdaModel,
    train_ll: f64,
    log: Vec<(usize, usize, f64)>,
}

fn run_chain(
    corpus: &Corpus,
    rc: &RunConfig,
    hyper: &LdaHyper,
    chain: usize,
) -> acttopic_core::Result<ChainResult> {
    let mut log = Vec::new();
    let thin = rc.schedule.thin.max(1);
    let model = lda::fit_lda_observed(
        corpus,
        rc.topics,
        hyper,
        rc.schedule,
        rc.seed.wrapping_add(chain as u64),
        |sweep, state| {
            if sweep % thin == 0 {
                log.push((chain, sweep, state.log_joint()));
            }
        },
    )?;
    let train_ll = model.log_likelihood(corpus)?;
    Ok(ChainResult {
        model,
        train_ll,
        log,
    })
}

pub fn fit(args: FitArgs, cfg: &ConfigFile) -> Result<FitSummary> {
    let started = Instant::now();
    let started_unix = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    let mut loaded: Option<Corpus> = None;
    let rc = resolve_fit(args, cfg, |p| {
        let c = load_corpus(p)?;
        let v = c.vocab_len();
        loaded = Some(c);
        Ok(v)
    })?;
    let corpus = match loaded {
        Some(c) => c,
        None => load_corpus(&rc.corpus)?,
    };
    std::fs::create_dir_all(&rc.out_dir).map_err(|e| Error::io(&rc.out_dir, e))?;
    let trace_path = rc.out_dir.join("trace.tsv");
    let mut warnings = Vec::new();

    let (model, ll, skipped) = match rc.family {
        ModelFamily::CatMix => {
            let fit = catmix::fit_em(&corpus, rc.topics, EmInit::Seed(rc.seed), rc.em)?;
            if fit.underdetermined {
                warnings.push(format!(
                    "{} topics for only {} non-empty documents",
                    rc.topics,
                    corpus.num_docs() - fit.skipped_empty_docs
                ));
            }
            if let Some(w) = fit
                .trace
                .log_likelihoods
                .windows(2)
                .find(|w| w[1] < w[0] - 1e-8)
            {
                warnings.push(format!(
                    "log-likelihood decreased from {} to {}",
                    w[0], w[1]
                ));
            }
            formats::write_file(&trace_path, |w| trace::write_em_trace(w, &fit.trace))?;
            let ll = *fit
                .trace
                .log_likelihoods
                .last()
                .expect("trace is never empty");
            (Model::CatMix(fit.params), ll, fit.skipped_empty_docs)
        }
        ModelFamily::Lda => {
            let hyper = rc.hyper.clone().expect("resolved for lda");
            let results: Vec<acttopic_core::Result<ChainResult>> = if rc.chains == 1 {
                vec![run_chain(&corpus, &rc, &hyper, 0)]
            } else {
                std::thread::scope(|s| {
                    let handles: Vec<_> = (0..rc.chains)
                        .map(|c| {
                            let (corpus, rc, hyper) = (&corpus, &rc, &hyper);
                            s.spawn(move || run_chain(corpus, rc, hyper, c))
                        })
                        .collect();
                    handles
                        .into_iter()
                        .map(|h| h.join().expect("chain thread panicked"))
                        .collect()
                })
            };
            let results = results
                .into_iter()
                .collect::<acttopic_core::Result<Vec<_>>>()?;
            let mut best = 0;
            for (i, r) in results.iter().enumerate() {
                if r.train_ll > results[best].train_ll {
                    best = i;
                }
            }
            let log: Vec<_> = results.iter().flat_map(|r| r.log.iter().copied()).collect();
            formats::write_file(&trace_path, |w| trace::write_sweep_log(w, &log, best))?;
            let chosen = results.into_iter().nth(best).expect("best index in range");
            let skipped = chosen.model.skipped_empty_docs;
            (Model::Lda(chosen.model), chosen.train_ll, skipped)
        }
    };
    if skipped > 0 {
        warnings.push(format!(
            "{skipped} empty document(s) skipped during fitting"
        ));
    }
    let model_name = format!("model.{}", model.family());
    let model_path = rc.out_dir.join(&model_name);
    save_model(&model, &model_path)?;

    let manifest_path = rc.out_dir.join("manifest.txt");
    let manifest = RunManifest {
        command: "fit".into(),
        version: crate::VERSION.into(),
        seed: rc.seed,
        config: rc.entries(),
        inputs: vec![(rc.corpus.display().to_string(), sha256_file(&rc.corpus)?)],
        outputs: vec![model_name, "trace.tsv".into(), "manifest.txt".into()],
        started_unix,
        wall_clock_ms: started.elapsed().as_millis(),
    };
    formats::write_file(&manifest_path, |w| manifest.write(w))?;
    Ok(FitSummary {
        model_path,
        trace_path,
        manifest_path,
        log_likelihood: ll,
        skipped_empty_docs: skipped,
        warnings,
    })
}

#[derive(Debug, Clone, Default, clap::Args)]
pub struct AssignArgs {
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Model file written by `fit` (config key `model_file`).
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Seed for LDA fold-in of documents not seen during fitting.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Fold-in sweeps per document.
    #[arg(long)]
    pub sweeps: Option<usize>,
    /// Output file (default `<out-dir>/assignments.tsv`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssignSummary {
    pub out: PathBuf,
    pub docs: usize,
    /// Whether LDA document proportions came from fold-in rather than the
    /// stored training estimates.
    pub folded_in: bool,
    pub oov_dropped: usize,
}

pub fn assign(args: AssignArgs, cfg: &ConfigFile) -> Result<AssignSummary> {
    let corpus_path: PathBuf = required(cfg.pick(args.corpus, "corpus")?, "corpus")?;
    let model_path: PathBuf = required(cfg.pick(args.model, "model_file")?, "model")?;
    let seed = cfg.pick(args.seed, "seed")?.unwrap_or(0);
    let sweeps = cfg
        .pick(args.sweeps, "sweeps")?
        .unwrap_or(lda::DEFAULT_FOLD_IN_SWEEPS);
    let out = match cfg.pick(args.out, "assignments")? {
        Some(p) => p,
        None => out_dir(args.out_dir, cfg)?.join("assignments.tsv"),
    };
    let corpus = load_corpus(&corpus_path)?;
    let model = load_model(&model_path)?;
    let mut folded_in = false;
    let mut oov_dropped = 0;
    let posterior: Matrix<f64> = match &model {
        Model::CatMix(p) => catmix::e_step(&corpus, p)?.into_matrix(),
        Model::Lda(m) => {
            let same_docs = m.doc_ids.len() == corpus.num_docs()
                && m.doc_ids
                    .iter()
                    .zip(corpus.docs())
                    .all(|(a, d)| *a == d.doc_id);
            if same_docs && corpus.vocab_len() == m.vocab_len() {
                m.doc_theta().clone()
            } else {
                folded_in = true;
                let mut out = Matrix::filled(corpus.num_docs(), m.topics(), 0.0);
                for (i, doc) in corpus.docs().iter().enumerate() {
                    let opts = FoldInOptions {
                        sweeps,
                        seed: seed
                            .wrapping_add(FOLD_IN_SEED_OFFSET)
                            .wrapping_add(i as u64),
                    };
                    let f = lda::infer_doc_theta(m, doc, opts);
                    oov_dropped += f.oov_dropped;
                    out.row_mut(i).copy_from_slice(&f.theta);
                }
                out
            }
        }
    };
    let a = Assignments {
        doc_ids: corpus.docs().iter().map(|d| d.doc_id.clone()).collect(),
        hard: eval::hard_assign(&posterior),
        posterior,
    };
    assignments::save_assignments(&a, &out)?;
    Ok(AssignSummary {
        out,
        docs: corpus.num_docs(),
        folded_in,
        oov_dropped,
    })
}

#[derive(Debug, Clone, Default, clap::Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Assignments file written by `assign`.
    #[arg(long)]
    pub assignments: Option<PathBuf>,
    /// Model file, for the top-features report (config key `model_file`).
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Features listed per topic (config key `top_features`).
    #[arg(long)]
    pub top_k: Option<usize>,
    /// `text`, `csv` or `latex`.
    #[arg(long)]
    pub format: Option<ReportFormat>,
    /// Row percentages instead of raw counts.
    #[arg(long)]
    pub percent: bool,
    /// Comma-separated label column order (default: first occurrence).
    #[arg(long)]
    pub labels: Option<String>,
    /// `topic=nickname` lines used to annotate rows.
    #[arg(long)]
    pub nicknames: Option<PathBuf>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalSummary {
    pub density: Option<String>,
    pub metrics: Option<Metrics>,
    pub topics: Option<String>,
    pub written: Vec<PathBuf>,
    pub warnings: Vec<String>,
}

fn read_nicknames(path: &Path) -> Result<Vec<(usize, String)>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let src = source_name(path);
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parsed = line
            .split_once('=')
            .and_then(|(t, n)| Some((t.trim().parse::<usize>().ok()?, n.trim().to_string())));
        out.push(parsed.ok_or_else(|| Error::format(&src, i + 1, "expected topic=nickname"))?);
    }
    Ok(out)
}

pub fn evaluate(args: EvalArgs, cfg: &ConfigFile) -> Result<EvalSummary> {
    let corpus_path: PathBuf = required(cfg.pick(args.corpus, "corpus")?, "corpus")?;
    let assign_path: PathBuf = required(cfg.pick(args.assignments, "assignments")?, "assignments")?;
    let model_path: Option<PathBuf> = cfg.pick(args.model, "model_file")?;
    let top_k = cfg
        .pick(args.top_k, "top_features")?
        .unwrap_or(DEFAULT_TOP_K_FEATURES);
    let format: ReportFormat = cfg.pick(args.format, "format")?.unwrap_or_default();
    let percent = args.percent || cfg.get::<bool>("percent")?.unwrap_or(false);
    let label_order: Option<Vec<String>> = cfg
        .pick(args.labels, "labels")?
        .map(|s: String| s.split(',').map(|l| l.trim().to_string()).collect());
    let nicknames = match cfg.pick(args.nicknames, "nicknames")? {
        Some(p) => read_nicknames(&p)?,
        None => Vec::new(),
    };
    let dir = out_dir(args.out_dir, cfg)?;

    let corpus = load_corpus(&corpus_path)?;
    let assigned = assignments::load_assignments(&assign_path)?;
    let by_id: HashMap<&str, usize> = assigned
        .doc_ids
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i))
        .collect();
    let mut hard = Vec::with_capacity(corpus.num_docs());
    for doc in corpus.docs() {
        let i = by_id.get(doc.doc_id.as_str()).ok_or_else(|| {
            Error::format(
                &source_name(&assign_path),
                0,
                format!("no assignment for doc {:?}", doc.doc_id),
            )
        })?;
        hard.push(assigned.hard[*i]);
    }
    let labels: Vec<Option<&str>> = corpus
        .docs()
        .iter()
        .map(|d| d.gold_label.as_deref())
        .collect();

    let mut summary = EvalSummary {
        density: None,
        metrics: None,
        topics: None,
        written: Vec::new(),
        warnings: Vec::new(),
    };
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let ext = format.extension();
    if labels.iter().all(Option::is_none) {
        summary
            .warnings
            .push("no gold labels in corpus; writing the topics report only".into());
    } else {
        let order: Option<Vec<&str>> = label_order
            .as_ref()
            .map(|o| o.iter().map(String::as_str).collect());
        let mut table = eval::contingency(&hard, &labels, assigned.topics(), order.as_deref())?;
        for (t, name) in nicknames {
            table.set_nickname(t, name);
        }
        let metrics = Metrics {
            labeled: table.total(),
            skipped: table.skipped,
            purity: eval::purity(&table)?,
            nmi: eval::nmi(&table)?,
        };
        let density = report::render_density(&table, format, percent);
        let density_path = dir.join(format!("density.{ext}"));
        formats::write_file(&density_path, |w| Ok(w.write_all(density.as_bytes())?))?;
        let metrics_path = dir.join("metrics.txt");
        let metrics_text = report::render_metrics(&metrics);
        formats::write_file(&metrics_path, |w| Ok(w.write_all(metrics_text.as_bytes())?))?;
        summary.written.extend([density_path, metrics_path]);
        summary.density = Some(density);
        summary.metrics = Some(metrics);
    }
    if let Some(mp) = model_path {
        let model = load_model(&mp)?;
        if model.vocab_len() != corpus.vocab_len() {
            return Err(Error::Usage(format!(
                "model vocabulary ({}) does not match corpus vocabulary ({})",
                model.vocab_len(),
                corpus.vocab_len()
            )));
        }
        let rep = topic_report(model.topic_token(), corpus.vocabulary(), top_k)?;
        let text = report::render_topics(&rep, format);
        let path = dir.join(format!("topics.{ext}"));
        formats::write_file(&path, |w| Ok(w.write_all(text.as_bytes())?))?;
        summary.written.push(path);
        summary.topics = Some(text);
    } else if summary.density.is_none() {
        summary
            .warnings
            .push("no --model given, so there is no topics report either".into());
    }
    Ok(summary)
}

//! Repeated-generation stability scoring.
//!
//! A task holds `k` code samples produced for one prompt. Every sample is
//! parsed once and reduced to one symbol multiset per encoding; pairwise
//! scores are then averaged into a per-task stability score. Jensen-Shannon
//! similarity is averaged over unordered pairs and the directed cross-entropy
//! ratio over ordered pairs, so both task scores are independent of sample
//! order.

mod correlation;
mod io;

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::{extract_symbols, DepthBound, EncodingScheme};
use crate::distribution::{empirical, joint_support, DistributionError, SubtreeMultiset, DEFAULT_EPSILON};
use crate::frontend::{node_count, FrontendError, GrammarRegistry};
use crate::metrics::{jsd_similarity, sce_similarity, MetricError, MetricKind};
use crate::numeric::order_free_mean;

pub use correlation::{pearson, pearson_columns, pearson_matrix, CorrelationMatrix};
pub use io::{read_dataset, read_report, write_report_csv, write_report_json};

/// Samples per task used by default.
pub const DEFAULT_SAMPLES_PER_TASK: usize = 5;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Frontend(#[from] FrontendError),
    #[error(transparent)]
    Distribution(#[from] DistributionError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("line {line}: {message}")]
    MalformedRecord { line: usize, message: String },
    #[error("duplicate task id `{0}`")]
    DuplicateTask(String),
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("no task had two or more parseable samples")]
    EmptyReport,
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

/// One prompt's worth of generated samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskRecord {
    pub task_id: String,
    pub language: String,
    pub samples: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub external_metrics: Option<BTreeMap<String, f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Sce,
    Jsd,
}

impl Metric {
    pub const ALL: [Metric; 2] = [Metric::Sce, Metric::Jsd];

    fn kind(self) -> MetricKind {
        match self {
            Metric::Sce => MetricKind::Sce,
            Metric::Jsd => MetricKind::JsdSim,
        }
    }
}

/// Column name for a metric under an encoding: `sce`, `sce_structural`,
/// `jsd`, `jsd_structural`.
pub fn score_key(metric: Metric, encoding: EncodingScheme) -> String {
    let base = match metric.kind() {
        MetricKind::Sce => "sce",
        MetricKind::JsdSim => "jsd",
    };
    match encoding {
        EncodingScheme::StructOnly => format!("{base}_structural"),
        EncodingScheme::StructValue => base.to_string(),
    }
}

/// Score columns in report order.
pub fn score_keys(config: &HarnessConfig) -> Vec<String> {
    let mut keys = Vec::new();
    for metric in Metric::ALL {
        if !config.metrics.contains(&metric) {
            continue;
        }
        for encoding in EncodingScheme::ALL {
            if config.encodings.contains(&encoding) {
                keys.push(score_key(metric, encoding));
            }
        }
    }
    keys
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarnessConfig {
    pub depth: DepthBound,
    pub epsilon: f64,
    pub clamp_sce: bool,
    /// Renormalise the smoothed reference to sum to one.
    pub renormalize: bool,
    pub encodings: BTreeSet<EncodingScheme>,
    pub metrics: BTreeSet<Metric>,
    pub strict_parse: bool,
    /// Use at most this many samples per task (the first ones in the record).
    pub samples_per_task: usize,
    pub workers: usize,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        Self {
            depth: DepthBound::default(),
            epsilon: DEFAULT_EPSILON,
            clamp_sce: true,
            renormalize: false,
            encodings: EncodingScheme::ALL.into_iter().collect(),
            metrics: Metric::ALL.into_iter().collect(),
            strict_parse: false,
            samples_per_task: DEFAULT_SAMPLES_PER_TASK,
            workers: 1,
        }
    }
}

impl HarnessConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: &str| Err(HarnessError::InvalidConfig(msg.to_string()));
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return bad("epsilon must be positive");
        }
        if self.encodings.is_empty() {
            return bad("at least one encoding is required");
        }
        if self.metrics.is_empty() {
            return bad("at least one metric is required");
        }
        if self.samples_per_task < 2 {
            return bad("samples per task must be at least 2");
        }
        if self.workers == 0 {
            return bad("workers must be positive");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskScore {
    pub task_id: String,
    pub language: String,
    /// Mean pairwise similarity per score column, each in `[0, 1]` when
    /// clamping is on.
    pub scores: BTreeMap<String, f64>,
    /// Mean unclamped cross-entropy ratio per SCE column.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub sce_raw: BTreeMap<String, f64>,
    pub samples_scored: usize,
    pub unordered_pairs: usize,
    pub ordered_pairs: usize,
    pub parse_failures: usize,
    /// Samples accepted with error-recovery nodes.
    pub recovered_samples: usize,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub external_metrics: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkippedTask {
    pub task_id: String,
    pub parse_failures: usize,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TaskOutcome {
    Scored(TaskScore),
    Skipped(SkippedTask),
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dataset: Option<String>,
    /// Language name to grammar version, for every language in the dataset.
    pub grammars: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub config: HarnessConfig,
    pub provenance: Provenance,
    /// Mean of each score column over scored tasks.
    pub aggregate: BTreeMap<String, f64>,
    pub per_task: Vec<TaskScore>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub skipped: Vec<SkippedTask>,
}

/// Pairwise scores for two sources, as printed by `compare`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairComparison {
    pub language: String,
    pub nodes_a: usize,
    pub nodes_b: usize,
    /// Similarity per score column. SCE columns treat `a` as the sample and
    /// `b` as the smoothed reference.
    pub scores: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub sce_raw: BTreeMap<String, f64>,
}

struct PairScores {
    jsd: f64,
    sce_ab: (f64, f64),
    sce_ba: (f64, f64),
}

fn score_pair(
    a: &SubtreeMultiset,
    b: &SubtreeMultiset,
    config: &HarnessConfig,
    with_sce: bool,
    with_jsd: bool,
) -> Result<PairScores, HarnessError> {
    let support = joint_support(a, b)?;
    let p = empirical(a, &support)?;
    let q = empirical(b, &support)?;
    let jsd = if with_jsd { jsd_similarity(&p, &q)?.value } else { f64::NAN };
    let (sce_ab, sce_ba) = if with_sce {
        let qs = q.smoothed(config.epsilon, config.renormalize)?;
        let ps = p.smoothed(config.epsilon, config.renormalize)?;
        let ab = sce_similarity(&p, &qs, config.clamp_sce)?;
        let ba = sce_similarity(&q, &ps, config.clamp_sce)?;
        ((ab.value, ab.raw), (ba.value, ba.raw))
    } else {
        ((f64::NAN, f64::NAN), (f64::NAN, f64::NAN))
    };
    Ok(PairScores { jsd, sce_ab, sce_ba })
}

/// Score two sources of the same language under every configured encoding
/// and metric.
pub fn compare_sources(
    registry: &GrammarRegistry,
    language: &str,
    source_a: &str,
    source_b: &str,
    config: &HarnessConfig,
) -> Result<PairComparison, HarnessError> {
    config.validate()?;
    let a = registry.parse_with(language, source_a, config.strict_parse)?;
    let b = registry.parse_with(language, source_b, config.strict_parse)?;
    let with_sce = config.metrics.contains(&Metric::Sce);
    let with_jsd = config.metrics.contains(&Metric::Jsd);
    let mut scores = BTreeMap::new();
    let mut sce_raw = BTreeMap::new();
    for &encoding in &config.encodings {
        let sa = extract_symbols(&a, config.depth, encoding);
        let sb = extract_symbols(&b, config.depth, encoding);
        let pair = score_pair(&sa, &sb, config, with_sce, with_jsd)?;
        if with_jsd {
            scores.insert(score_key(Metric::Jsd, encoding), pair.jsd);
        }
        if with_sce {
            let key = score_key(Metric::Sce, encoding);
            scores.insert(key.clone(), pair.sce_ab.0);
            sce_raw.insert(key, pair.sce_ab.1);
        }
    }
    Ok(PairComparison {
        language: language.to_string(),
        nodes_a: node_count(&a),
        nodes_b: node_count(&b),
        scores,
        sce_raw,
    })
}

/// Score one task: parse every sample, drop the ones that fail, and average
/// pairwise similarities over the rest.
///
/// Fewer than two parseable samples is a [`TaskOutcome::Skipped`], not an
/// error. An unregistered language is an error.
pub fn score_task(
    registry: &GrammarRegistry,
    task: &TaskRecord,
    config: &HarnessConfig,
) -> Result<TaskOutcome, HarnessError> {
    config.validate()?;
    registry.language(&task.language)?;

    let mut trees = Vec::new();
    let mut parse_failures = 0;
    for (i, sample) in task.samples.iter().take(config.samples_per_task).enumerate() {
        match registry.parse_with(&task.language, sample, config.strict_parse) {
            Ok(tree) => trees.push(tree),
            Err(
                e @ (FrontendError::ParseFailure { .. }
                | FrontendError::EmptyInput { .. }
                | FrontendError::InvalidTree(_)),
            ) => {
                log::warn!("task {}: sample {i} excluded: {e}", task.task_id);
                parse_failures += 1;
            }
            Err(e) => return Err(e.into()),
        }
    }
    if trees.len() < 2 {
        return Ok(TaskOutcome::Skipped(SkippedTask {
            task_id: task.task_id.clone(),
            parse_failures,
            reason: format!("{} parseable sample(s), need at least 2", trees.len()),
        }));
    }
    let recovered_samples = trees.iter().filter(|t| t.has_errors()).count();

    let with_sce = config.metrics.contains(&Metric::Sce);
    let with_jsd = config.metrics.contains(&Metric::Jsd);
    let n = trees.len();
    let mut scores = BTreeMap::new();
    let mut sce_raw = BTreeMap::new();
    for &encoding in &config.encodings {
        let symbols: Vec<SubtreeMultiset> =
            trees.iter().map(|t| extract_symbols(t, config.depth, encoding)).collect();
        let mut jsd = Vec::new();
        let mut sce = Vec::new();
        let mut raw = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let pair = score_pair(&symbols[i], &symbols[j], config, with_sce, with_jsd)?;
                jsd.push(pair.jsd);
                sce.extend([pair.sce_ab.0, pair.sce_ba.0]);
                raw.extend([pair.sce_ab.1, pair.sce_ba.1]);
            }
        }
        if with_jsd {
            scores.insert(score_key(Metric::Jsd, encoding), order_free_mean(&jsd).expect("n >= 2"));
        }
        if with_sce {
            let key = score_key(Metric::Sce, encoding);
            scores.insert(key.clone(), order_free_mean(&sce).expect("n >= 2"));
            sce_raw.insert(key, order_free_mean(&raw).expect("n >= 2"));
        }
    }

    Ok(TaskOutcome::Scored(TaskScore {
        task_id: task.task_id.clone(),
        language: task.language.clone(),
        scores,
        sce_raw,
        samples_scored: n,
        unordered_pairs: n * (n - 1) / 2,
        ordered_pairs: n * (n - 1),
        parse_failures,
        recovered_samples,
        external_metrics: task.external_metrics.clone().unwrap_or_default(),
    }))
}

/// Score every task and aggregate. Tasks are scored on a pool of
/// `config.workers` threads; the report lists them sorted by task id.
pub fn run_dataset<I>(
    registry: &GrammarRegistry,
    dataset: I,
    config: &HarnessConfig,
    dataset_label: Option<String>,
) -> Result<StabilityReport, HarnessError>
where
    I: IntoIterator<Item = TaskRecord>,
{
    config.validate()?;
    let tasks: Vec<TaskRecord> = dataset.into_iter().collect();
    if tasks.is_empty() {
        return Err(HarnessError::EmptyDataset);
    }
    let mut seen = BTreeSet::new();
    let mut grammars = BTreeMap::new();
    for task in &tasks {
        if !seen.insert(task.task_id.as_str()) {
            return Err(HarnessError::DuplicateTask(task.task_id.clone()));
        }
        let id = registry.language(&task.language)?;
        grammars.insert(id.name, id.grammar_version);
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| HarnessError::InvalidConfig(format!("worker pool: {e}")))?;
    let outcomes: Vec<TaskOutcome> = pool.install(|| {
        tasks.par_iter().map(|task| score_task(registry, task, config)).collect::<Result<_, _>>()
    })?;

    let mut per_task = Vec::new();
    let mut skipped = Vec::new();
    for outcome in outcomes {
        match outcome {
            TaskOutcome::Scored(score) => per_task.push(score),
            TaskOutcome::Skipped(s) => {
                log::warn!("task {} skipped: {}", s.task_id, s.reason);
                skipped.push(s);
            }
        }
    }
    if per_task.is_empty() {
        return Err(HarnessError::EmptyReport);
    }
    per_task.sort_by(|a, b| a.task_id.cmp(&b.task_id));
    skipped.sort_by(|a, b| a.task_id.cmp(&b.task_id));

    let mut aggregate = BTreeMap::new();
    for key in score_keys(config) {
        let column: Vec<f64> = per_task.iter().filter_map(|t| t.scores.get(&key).copied()).collect();
        if let Some(mean) = order_free_mean(&column) {
            aggregate.insert(key, mean);
        }
    }

    Ok(StabilityReport {
        config: config.clone(),
        provenance: Provenance { dataset: dataset_label, grammars },
        aggregate,
        per_task,
        skipped,
    })
}

//! Benchmark harness: replays random fixed-length transactions against a
//! prepared strategy and aggregates result-set length histograms, timing,
//! and a query-dependency score.
//!
//! Transaction `i` is derived from `(seed, i)` alone, so the sequence is
//! reproducible and independent of execution order. Setup work (clustering,
//! grouping) is timed once, separately from per-query time.

use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::kmeans::{self, ClusterModel, FitOptions, KmeansError};
use crate::matrix::{RatingsMatrix, RecommendationList, Transaction, DEFAULT_TRANSACTION_LEN};
use crate::strategy::{
    self, ContentGroups, KmeansRecConfig, StrategyError, ThresholdConfig,
};
use crate::stream::{stream_seed, TAG_TRANSACTION};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("transaction length {length} exceeds article count {n_articles}")]
    LengthExceedsArticles { length: usize, n_articles: usize },
    #[error("transaction length must be at least 1")]
    ZeroLength,
    #[error("length list must not be empty")]
    EmptyInput,
    #[error("histogram has no observations")]
    EmptyHistogram,
    #[error("unknown bin scheme `{0}`, expected `content` or `labeled`")]
    UnknownScheme(String),
    #[error(transparent)]
    Kmeans(#[from] KmeansError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error("strategy failed at iteration {iteration} on transaction {transaction:?}: {source}")]
    StrategyFailed {
        iteration: usize,
        transaction: Vec<usize>,
        source: StrategyError,
    },
}

/// Uniformly random transaction of `length` distinct articles.
pub fn random_transaction<R: Rng + ?Sized>(
    rng: &mut R,
    n_articles: usize,
    length: usize,
) -> Result<Transaction, BenchError> {
    if length == 0 {
        return Err(BenchError::ZeroLength);
    }
    if length > n_articles {
        return Err(BenchError::LengthExceedsArticles { length, n_articles });
    }
    let ids = rand::seq::index::sample(rng, n_articles, length).into_vec();
    Ok(Transaction::new(ids, n_articles).expect("sampled ids are distinct and in range"))
}

/// Histogram bin layouts for result-set lengths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum BinScheme {
    /// {0}, {1}, {2-3}, {4-9}, {>=10}
    Content,
    /// {0}, {1..=e0}, {e0+1..=e1}, {e1+1..=e2}, {>e2}
    Labeled { edges: [u64; 3] },
}

impl BinScheme {
    pub const DEFAULT_LABELED_EDGES: [u64; 3] = [2, 5, 24];

    pub fn labeled_default() -> Self {
        BinScheme::Labeled {
            edges: Self::DEFAULT_LABELED_EDGES,
        }
    }

    pub fn labels(&self) -> Vec<String> {
        match self {
            BinScheme::Content => ["Empty set", "1", "2-3", "4-9", "10>"]
                .map(String::from)
                .to_vec(),
            BinScheme::Labeled { .. } => ["Empty set", "Very Short", "Short", "Normal", "Long"]
                .map(String::from)
                .to_vec(),
        }
    }

    fn bin_of(&self, length: u64) -> usize {
        match self {
            BinScheme::Content => match length {
                0 => 0,
                1 => 1,
                2..=3 => 2,
                4..=9 => 3,
                _ => 4,
            },
            BinScheme::Labeled { edges } => {
                if length == 0 {
                    0
                } else if length <= edges[0] {
                    1
                } else if length <= edges[1] {
                    2
                } else if length <= edges[2] {
                    3
                } else {
                    4
                }
            }
        }
    }
}

impl FromStr for BinScheme {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, BenchError> {
        match s {
            "content" => Ok(BinScheme::Content),
            "labeled" => Ok(BinScheme::labeled_default()),
            other => Err(BenchError::UnknownScheme(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HistogramBin {
    pub label: String,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Histogram {
    pub scheme: BinScheme,
    pub bins: Vec<HistogramBin>,
    pub total: u64,
}

pub fn bin_lengths(lengths: &[usize], scheme: BinScheme) -> Histogram {
    let labels = scheme.labels();
    let mut counts = vec![0u64; labels.len()];
    for &len in lengths {
        counts[scheme.bin_of(len as u64)] += 1;
    }
    Histogram {
        scheme,
        bins: labels
            .into_iter()
            .zip(counts)
            .map(|(label, count)| HistogramBin { label, count })
            .collect(),
        total: lengths.len() as u64,
    }
}

/// Per-bin percentages, rounded to one decimal.
pub fn proportions(h: &Histogram) -> Result<Vec<f64>, BenchError> {
    if h.total == 0 {
        return Err(BenchError::EmptyHistogram);
    }
    Ok(h.bins
        .iter()
        .map(|bin| {
            let pct = 100.0 * bin.count as f64 / h.total as f64;
            (pct * 10.0).round() / 10.0
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum QdLabel {
    Low,
    Medium,
    High,
}

/// Score boundaries for the query-dependency labels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QdCutoffs {
    pub medium: f64,
    pub high: f64,
}

impl Default for QdCutoffs {
    fn default() -> Self {
        QdCutoffs {
            medium: 0.2,
            high: 0.6,
        }
    }
}

/// How strongly result-set size varies with the query: empty-result rate
/// plus the coefficient of variation of result lengths, capped at 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QueryDependencyReport {
    pub empty_rate: f64,
    pub length_cv: f64,
    pub score: f64,
    pub label: QdLabel,
}

pub fn query_dependency(lengths: &[usize]) -> Result<QueryDependencyReport, BenchError> {
    query_dependency_with(lengths, QdCutoffs::default())
}

pub fn query_dependency_with(
    lengths: &[usize],
    cutoffs: QdCutoffs,
) -> Result<QueryDependencyReport, BenchError> {
    if lengths.is_empty() {
        return Err(BenchError::EmptyInput);
    }
    let n = lengths.len() as f64;
    let empty_rate = lengths.iter().filter(|&&l| l == 0).count() as f64 / n;
    let mean = lengths.iter().sum::<usize>() as f64 / n;
    let length_cv = if mean == 0.0 {
        0.0
    } else {
        let variance = lengths
            .iter()
            .map(|&l| (l as f64 - mean).powi(2))
            .sum::<f64>()
            / n;
        variance.sqrt() / mean
    };
    let score = empty_rate + length_cv.min(1.0);
    let label = if score < cutoffs.medium {
        QdLabel::Low
    } else if score < cutoffs.high {
        QdLabel::Medium
    } else {
        QdLabel::High
    };
    Ok(QueryDependencyReport {
        empty_rate,
        length_cv,
        score,
        label,
    })
}

/// Which strategy to benchmark, with its parameters. The content half-width
/// is resolved to the data-driven default during [`prepare`] when absent.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "strategy", rename_all = "snake_case")]
pub enum StrategySpec {
    Threshold { config: ThresholdConfig },
    Kmeans { fit: FitOptions, config: KmeansRecConfig },
    Content { half_width: Option<f64> },
}

impl StrategySpec {
    pub fn name(&self) -> &'static str {
        match self {
            StrategySpec::Threshold { .. } => "threshold",
            StrategySpec::Kmeans { .. } => "kmeans",
            StrategySpec::Content { .. } => "content",
        }
    }

    /// Histogram layout each strategy is reported with by default: fixed
    /// count bins for content, labeled bins for threshold and k-means.
    pub fn default_scheme(&self) -> BinScheme {
        match self {
            StrategySpec::Content { .. } => BinScheme::Content,
            _ => BinScheme::labeled_default(),
        }
    }
}

enum PreparedState {
    Threshold(ThresholdConfig),
    Kmeans {
        model: ClusterModel,
        config: KmeansRecConfig,
    },
    Content {
        groups: ContentGroups,
    },
}

/// A strategy with its setup work (clustering, grouping) already done and
/// timed.
pub struct PreparedStrategy {
    spec: StrategySpec,
    state: PreparedState,
    setup_time: Duration,
}

pub fn prepare(m: &RatingsMatrix, spec: StrategySpec) -> Result<PreparedStrategy, BenchError> {
    let start = Instant::now();
    let (spec, state) = match spec {
        StrategySpec::Threshold { config } => (
            StrategySpec::Threshold { config },
            PreparedState::Threshold(config),
        ),
        StrategySpec::Kmeans { fit, config } => {
            let model = kmeans::fit_with(m, &fit)?;
            (
                StrategySpec::Kmeans { fit, config },
                PreparedState::Kmeans { model, config },
            )
        }
        StrategySpec::Content { half_width } => {
            let x = half_width
                .or_else(|| strategy::default_half_width(m))
                .ok_or(StrategyError::AllColumnsEmpty)?;
            let groups = strategy::build_content_groups(m, x)?;
            (
                StrategySpec::Content { half_width: Some(x) },
                PreparedState::Content { groups },
            )
        }
    };
    Ok(PreparedStrategy {
        spec,
        state,
        setup_time: start.elapsed(),
    })
}

impl PreparedStrategy {
    pub fn name(&self) -> &'static str {
        self.spec.name()
    }

    pub fn spec(&self) -> &StrategySpec {
        &self.spec
    }

    pub fn setup_time(&self) -> Duration {
        self.setup_time
    }

    /// The fitted cluster model, when this is the k-means strategy.
    pub fn model(&self) -> Option<&ClusterModel> {
        match &self.state {
            PreparedState::Kmeans { model, .. } => Some(model),
            _ => None,
        }
    }

    pub fn recommend(
        &self,
        m: &RatingsMatrix,
        txn: &Transaction,
    ) -> Result<RecommendationList, StrategyError> {
        match &self.state {
            PreparedState::Threshold(config) => {
                Ok(strategy::threshold_recommend(m, txn, config))
            }
            PreparedState::Kmeans { model, config } => {
                strategy::kmeans_recommend(model, m, txn, config)
            }
            PreparedState::Content { groups } => strategy::content_recommend(groups, m, txn),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub iterations: usize,
    pub seed: u64,
    pub txn_len: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            iterations: 1000,
            seed: 42,
            txn_len: DEFAULT_TRANSACTION_LEN,
        }
    }
}

/// One benchmark iteration: the query, the result length, the query time.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub transaction: Transaction,
    pub result_length: usize,
    pub elapsed: Duration,
}

/// Replays `iterations` random transactions against the prepared strategy;
/// record `i` is fully determined by `(seed, i)` except for timing.
pub fn run(
    m: &RatingsMatrix,
    prepared: &PreparedStrategy,
    cfg: &RunConfig,
) -> Result<Vec<RunRecord>, BenchError> {
    if cfg.txn_len == 0 {
        return Err(BenchError::ZeroLength);
    }
    if cfg.txn_len > m.n_articles() {
        return Err(BenchError::LengthExceedsArticles {
            length: cfg.txn_len,
            n_articles: m.n_articles(),
        });
    }
    let mut records = Vec::with_capacity(cfg.iterations);
    for i in 0..cfg.iterations {
        let mut rng =
            ChaCha8Rng::seed_from_u64(stream_seed(cfg.seed, TAG_TRANSACTION, i as u64));
        let txn = random_transaction(&mut rng, m.n_articles(), cfg.txn_len)?;
        let start = Instant::now();
        let list = prepared
            .recommend(m, &txn)
            .map_err(|source| BenchError::StrategyFailed {
                iteration: i,
                transaction: txn.articles().to_vec(),
                source,
            })?;
        let elapsed = start.elapsed();
        records.push(RunRecord {
            transaction: txn,
            result_length: list.len(),
            elapsed,
        });
    }
    Ok(records)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TimingStats {
    pub setup_ns: u64,
    pub total_ns: u64,
    pub mean_ns: u64,
    pub p50_ns: u64,
    pub p95_ns: u64,
}

impl TimingStats {
    pub fn from_records(records: &[RunRecord], setup: Duration) -> Self {
        let mut times: Vec<u64> = records
            .iter()
            .map(|r| r.elapsed.as_nanos() as u64)
            .collect();
        times.sort_unstable();
        let n = times.len();
        let total: u64 = times.iter().sum();
        TimingStats {
            setup_ns: setup.as_nanos() as u64,
            total_ns: total,
            mean_ns: if n == 0 { 0 } else { total / n as u64 },
            p50_ns: if n == 0 { 0 } else { times[n * 50 / 100] },
            p95_ns: if n == 0 { 0 } else { times[(n * 95 / 100).min(n - 1)] },
        }
    }

    /// Query time plus setup time, the figure run-time ranking uses.
    pub fn total_with_setup_ns(&self) -> u64 {
        self.setup_ns + self.total_ns
    }
}

/// Everything measured for one strategy over one benchmark run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkSummary {
    pub strategy: String,
    pub histogram: Histogram,
    pub proportions: Vec<f64>,
    pub timing: TimingStats,
    pub query_dependency: QueryDependencyReport,
    pub config: StrategySpec,
    pub run: RunConfig,
}

pub fn summarize(
    prepared: &PreparedStrategy,
    records: &[RunRecord],
    run_cfg: &RunConfig,
    scheme: BinScheme,
    cutoffs: QdCutoffs,
) -> Result<BenchmarkSummary, BenchError> {
    if records.is_empty() {
        return Err(BenchError::EmptyInput);
    }
    let lengths: Vec<usize> = records.iter().map(|r| r.result_length).collect();
    let histogram = bin_lengths(&lengths, scheme);
    let pct = proportions(&histogram)?;
    let qd = query_dependency_with(&lengths, cutoffs)?;
    Ok(BenchmarkSummary {
        strategy: prepared.name().to_string(),
        histogram,
        proportions: pct,
        timing: TimingStats::from_records(records, prepared.setup_time()),
        query_dependency: qd,
        config: prepared.spec().clone(),
        run: *run_cfg,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{generate, GeneratorConfig};

    #[test]
    fn random_transactions_are_shaped_and_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = random_transaction(&mut rng, 100, 4).unwrap();
        assert_eq!(t.len(), 4);
        assert!(t.articles().iter().all(|&a| a < 100));

        let mut a = ChaCha8Rng::seed_from_u64(2);
        let mut b = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            assert_eq!(
                random_transaction(&mut a, 50, 4).unwrap(),
                random_transaction(&mut b, 50, 4).unwrap()
            );
        }
    }

    #[test]
    fn full_length_transaction_uses_every_article() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = random_transaction(&mut rng, 4, 4).unwrap();
        let mut ids = t.articles().to_vec();
        ids.sort_unstable();
        assert_eq!(ids, [0, 1, 2, 3]);
    }

    #[test]
    fn transaction_length_is_bounded_by_articles() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        assert!(matches!(
            random_transaction(&mut rng, 3, 4),
            Err(BenchError::LengthExceedsArticles { .. })
        ));
        assert!(matches!(
            random_transaction(&mut rng, 3, 0),
            Err(BenchError::ZeroLength)
        ));
    }

    #[test]
    fn content_scheme_bins_one_length_per_bin() {
        let h = bin_lengths(&[0, 1, 2, 5, 12], BinScheme::Content);
        let counts: Vec<u64> = h.bins.iter().map(|b| b.count).collect();
        assert_eq!(counts, [1, 1, 1, 1, 1]);
        assert_eq!(h.total, 5);
    }

    #[test]
    fn labeled_scheme_bins_span_the_length_range() {
        let h = bin_lengths(&[6, 6, 47, 0], BinScheme::labeled_default());
        let counts: Vec<u64> = h.bins.iter().map(|b| b.count).collect();
        assert_eq!(counts, [1, 0, 0, 2, 1]);
    }

    #[test]
    fn histogram_counts_sum_to_total() {
        let lengths: Vec<usize> = (0..100).map(|i| i % 13).collect();
        for scheme in [BinScheme::Content, BinScheme::labeled_default()] {
            let h = bin_lengths(&lengths, scheme);
            assert_eq!(h.bins.iter().map(|b| b.count).sum::<u64>(), h.total);
        }
    }

    #[test]
    fn proportions_render_to_one_decimal() {
        let mut h = bin_lengths(&[], BinScheme::Content);
        assert!(matches!(proportions(&h), Err(BenchError::EmptyHistogram)));
        h.total = 1000;
        let counts = [1u64, 8, 80, 782, 129];
        for (bin, &c) in h.bins.iter_mut().zip(&counts) {
            bin.count = c;
        }
        assert_eq!(proportions(&h).unwrap(), vec![0.1, 0.8, 8.0, 78.2, 12.9]);
    }

    #[test]
    fn query_dependency_examples() {
        let qd = query_dependency(&[5, 5, 5, 5]).unwrap();
        assert_eq!(qd.empty_rate, 0.0);
        assert_eq!(qd.length_cv, 0.0);
        assert_eq!(qd.score, 0.0);
        assert_eq!(qd.label, QdLabel::Low);

        let qd = query_dependency(&[0, 0, 0, 0]).unwrap();
        assert_eq!(qd.empty_rate, 1.0);
        assert_eq!(qd.length_cv, 0.0);
        assert_eq!(qd.score, 1.0);
        assert_eq!(qd.label, QdLabel::High);

        let qd = query_dependency(&[0, 10, 0, 10]).unwrap();
        assert_eq!(qd.empty_rate, 0.5);
        assert_eq!(qd.length_cv, 1.0);
        assert_eq!(qd.score, 1.5);
        assert_eq!(qd.label, QdLabel::High);

        assert!(matches!(
            query_dependency(&[]),
            Err(BenchError::EmptyInput)
        ));
    }

    #[test]
    fn scheme_parsing() {
        assert_eq!("content".parse::<BinScheme>().unwrap(), BinScheme::Content);
        assert_eq!(
            "labeled".parse::<BinScheme>().unwrap(),
            BinScheme::labeled_default()
        );
        assert!(matches!(
            "weird".parse::<BinScheme>(),
            Err(BenchError::UnknownScheme(_))
        ));
    }

    fn desk_matrix(seed: u64) -> crate::matrix::RatingsMatrix {
        generate(&GeneratorConfig {
            n_users: 40,
            n_articles: 15,
            seed,
            ..GeneratorConfig::default()
        })
        .unwrap()
    }

    #[test]
    fn run_produces_requested_deterministic_records() {
        let m = desk_matrix(5);
        let prepared = prepare(
            &m,
            StrategySpec::Threshold {
                config: ThresholdConfig::default(),
            },
        )
        .unwrap();
        let cfg = RunConfig {
            iterations: 100,
            seed: 9,
            txn_len: 4,
        };
        let a = run(&m, &prepared, &cfg).unwrap();
        let b = run(&m, &prepared, &cfg).unwrap();
        assert_eq!(a.len(), 100);
        let la: Vec<usize> = a.iter().map(|r| r.result_length).collect();
        let lb: Vec<usize> = b.iter().map(|r| r.result_length).collect();
        assert_eq!(la, lb);
        assert_eq!(a[0].transaction, b[0].transaction);
    }

    #[test]
    fn kmeans_records_all_have_top_n_length() {
        let m = desk_matrix(6);
        let prepared = prepare(
            &m,
            StrategySpec::Kmeans {
                fit: FitOptions::new(5, 1),
                config: KmeansRecConfig::default(),
            },
        )
        .unwrap();
        let cfg = RunConfig {
            iterations: 200,
            seed: 11,
            txn_len: 4,
        };
        let records = run(&m, &prepared, &cfg).unwrap();
        assert!(records.iter().all(|r| r.result_length == 8));

        let summary = summarize(
            &prepared,
            &records,
            &cfg,
            BinScheme::Content,
            QdCutoffs::default(),
        )
        .unwrap();
        assert_eq!(summary.query_dependency.empty_rate, 0.0);
        assert_eq!(summary.query_dependency.length_cv, 0.0);
        assert_eq!(summary.query_dependency.label, QdLabel::Low);
        assert_eq!(summary.histogram.total, 200);
    }

    #[test]
    fn content_prepare_resolves_default_half_width() {
        let m = desk_matrix(7);
        let prepared = prepare(&m, StrategySpec::Content { half_width: None }).unwrap();
        match prepared.spec() {
            StrategySpec::Content { half_width: Some(x) } => assert!(*x > 0.0),
            other => panic!("unexpected spec {other:?}"),
        }
    }
}

//! The three recommendation strategies: threshold-based collaborative
//! filtering, k-means-based collaborative filtering, and content-based
//! filtering over article-mean proximity groups.
//!
//! Scores are strategy-specific (supporter counts, cluster means, negated
//! mean distances) and are not comparable across strategies.

use serde::Serialize;
use thiserror::Error;

use crate::kmeans::ClusterModel;
use crate::matrix::{Rating, RatingsMatrix, RecommendationList, Transaction};

#[derive(Debug, Error, PartialEq)]
pub enum StrategyError {
    #[error("half-width x must be positive and finite, got {0}")]
    NonPositiveX(f64),
    #[error("every article column is empty; content groups are undefined")]
    AllColumnsEmpty,
    #[error("model fitted on {model_users} users x {model_articles} articles does not match matrix {users}x{articles}")]
    ModelMatrixMismatch {
        model_users: usize,
        model_articles: usize,
        users: usize,
        articles: usize,
    },
    #[error("content groups cover {groups} articles but the matrix has {articles}")]
    GroupsMatrixMismatch { groups: usize, articles: usize },
}

/// Threshold filter configuration; 9.3 is the benchmark default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ThresholdConfig {
    pub theta: Rating,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        ThresholdConfig {
            theta: Rating::new(9.3).expect("9.3 is in range"),
        }
    }
}

/// Supporters are users who rated at least one transaction article strictly
/// above theta; candidate articles are scored by how many supporters rated
/// them strictly above theta. May return an empty list.
pub fn threshold_recommend(
    m: &RatingsMatrix,
    txn: &Transaction,
    cfg: &ThresholdConfig,
) -> RecommendationList {
    let theta = cfg.theta;
    let mut counts = vec![0u32; m.n_articles()];
    for u in 0..m.n_users() {
        let row = m.row(u);
        let supporter = txn
            .articles()
            .iter()
            .any(|&a| row[a].is_some_and(|r| r > theta));
        if !supporter {
            continue;
        }
        for (article, cell) in row.iter().enumerate() {
            if cell.is_some_and(|r| r > theta) && !txn.contains(article) {
                counts[article] += 1;
            }
        }
    }
    let scored = counts
        .iter()
        .enumerate()
        .filter(|&(_, &c)| c > 0)
        .map(|(article, &c)| (article, f64::from(c)))
        .collect();
    RecommendationList::from_scored(scored, txn)
}

/// K-means recommendation knobs: result length and the rating assigned to
/// the customer's chosen articles when building the query vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct KmeansRecConfig {
    pub top_n: usize,
    pub pseudo_rating: Rating,
}

impl Default for KmeansRecConfig {
    fn default() -> Self {
        KmeansRecConfig {
            top_n: 8,
            pseudo_rating: Rating::MAX,
        }
    }
}

/// Places the customer in a cluster via a pseudo-user vector (chosen
/// articles at `pseudo_rating`, everything else missing) and recommends the
/// cluster's highest-mean articles. Falls back to the global article mean
/// when no cluster member rated an article, and to 0.0 when nobody did, so
/// the result always has min(top_n, n_articles - |txn|) entries.
pub fn kmeans_recommend(
    model: &ClusterModel,
    m: &RatingsMatrix,
    txn: &Transaction,
    cfg: &KmeansRecConfig,
) -> Result<RecommendationList, StrategyError> {
    if model.assignment().len() != m.n_users() || model.n_articles() != m.n_articles() {
        return Err(StrategyError::ModelMatrixMismatch {
            model_users: model.assignment().len(),
            model_articles: model.n_articles(),
            users: m.n_users(),
            articles: m.n_articles(),
        });
    }

    let mut pseudo = vec![None; m.n_articles()];
    for &a in txn.articles() {
        pseudo[a] = Some(cfg.pseudo_rating.value());
    }
    let cluster = model.assign(&pseudo);

    let mut sums = vec![0.0; m.n_articles()];
    let mut counts = vec![0u32; m.n_articles()];
    for (u, &c) in model.assignment().iter().enumerate() {
        if c != cluster {
            continue;
        }
        for (article, cell) in m.row(u).iter().enumerate() {
            if let Some(r) = cell {
                sums[article] += r.value();
                counts[article] += 1;
            }
        }
    }

    let scored = (0..m.n_articles())
        .filter(|&article| !txn.contains(article))
        .map(|article| {
            let score = if counts[article] > 0 {
                sums[article] / f64::from(counts[article])
            } else {
                m.article_mean(article).unwrap_or(0.0)
            };
            (article, score)
        })
        .collect();
    let mut list = RecommendationList::from_scored(scored, txn);
    list.truncate(cfg.top_n);
    Ok(list)
}

/// Fixed-width partition of mean-bearing articles: two articles share a
/// group iff their means fall in the same bin of width `2 * half_width`
/// anchored at the minimum mean. Articles whose column has no observations
/// are ungrouped.
#[derive(Debug, Clone, PartialEq)]
pub struct ContentGroups {
    group_of: Vec<Option<usize>>,
    means: Vec<Option<f64>>,
    half_width: f64,
    anchor: f64,
}

impl ContentGroups {
    pub fn n_articles(&self) -> usize {
        self.group_of.len()
    }

    /// Group index of an article, `None` when ungrouped.
    pub fn group_of(&self, article: usize) -> Option<usize> {
        self.group_of[article]
    }

    pub fn means(&self) -> &[Option<f64>] {
        &self.means
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// The minimum article mean, anchoring bin 0.
    pub fn anchor(&self) -> f64 {
        self.anchor
    }
}

pub fn build_content_groups(m: &RatingsMatrix, x: f64) -> Result<ContentGroups, StrategyError> {
    if !x.is_finite() || x <= 0.0 {
        return Err(StrategyError::NonPositiveX(x));
    }
    let means = m.article_means();
    let anchor = means
        .iter()
        .flatten()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if !anchor.is_finite() {
        return Err(StrategyError::AllColumnsEmpty);
    }
    let group_of = means
        .iter()
        .map(|mean| mean.map(|mu| ((mu - anchor) / (2.0 * x)).floor() as usize))
        .collect();
    Ok(ContentGroups {
        group_of,
        means,
        half_width: x,
        anchor,
    })
}

/// Data-driven default for the grouping half-width: a quarter of the
/// standard deviation of the article means. Falls back to 0.5 when the
/// means do not vary; `None` when no column has observations.
pub fn default_half_width(m: &RatingsMatrix) -> Option<f64> {
    let means: Vec<f64> = m.article_means().into_iter().flatten().collect();
    if means.is_empty() {
        return None;
    }
    let mean = means.iter().sum::<f64>() / means.len() as f64;
    let variance = means.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / means.len() as f64;
    let x = variance.sqrt() / 4.0;
    Some(if x > 0.0 { x } else { 0.5 })
}

/// Candidates are the group-mates of the transaction's articles; each is
/// scored by the negated distance to the closest transaction mean in its
/// group, so nearer means rank higher. May return an empty list.
pub fn content_recommend(
    groups: &ContentGroups,
    m: &RatingsMatrix,
    txn: &Transaction,
) -> Result<RecommendationList, StrategyError> {
    if groups.n_articles() != m.n_articles() {
        return Err(StrategyError::GroupsMatrixMismatch {
            groups: groups.n_articles(),
            articles: m.n_articles(),
        });
    }
    let mut scored = Vec::new();
    for article in 0..m.n_articles() {
        if txn.contains(article) {
            continue;
        }
        let Some(group) = groups.group_of(article) else {
            continue;
        };
        let mean = groups.means[article].expect("grouped articles have a mean");
        let mut best: Option<f64> = None;
        for &t in txn.articles() {
            if groups.group_of(t) == Some(group) {
                let d = (mean - groups.means[t].expect("grouped")).abs();
                best = Some(best.map_or(d, |cur| cur.min(d)));
            }
        }
        if let Some(d) = best {
            scored.push((article, -d));
        }
    }
    Ok(RecommendationList::from_scored(scored, txn))
}

//! From-scratch k-means over user rating vectors.
//!
//! Distances are computed only over co-observed coordinates (see
//! [`partial_distance`]), so no imputation happens anywhere. Fitting is
//! Lloyd's alternation with seeded random row initialization, deterministic
//! for a given `(matrix, k, seed, max_iter)`.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::matrix::RatingsMatrix;

/// Distance reported when two vectors share no observed coordinate: the
/// maximum possible per-coordinate squared difference, (10 - (-10))².
pub const NO_OVERLAP_DISTANCE: f64 = 400.0;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KmeansError {
    #[error("k must satisfy 1 <= k <= n_users, got k={k} with {n_users} users")]
    InvalidK { k: usize, n_users: usize },
    #[error("max_iter must be at least 1")]
    ZeroMaxIter,
}

/// Mean squared difference over coordinates present in both vectors,
/// [`NO_OVERLAP_DISTANCE`] when no coordinate is co-present.
///
/// Panics when the vectors have different lengths.
pub fn partial_distance(a: &[Option<f64>], b: &[Option<f64>]) -> f64 {
    assert_eq!(a.len(), b.len(), "vectors must have the same article count");
    let mut sum = 0.0;
    let mut count = 0u32;
    for (x, y) in a.iter().zip(b) {
        if let (Some(x), Some(y)) = (x, y) {
            let d = x - y;
            sum += d * d;
            count += 1;
        }
    }
    if count == 0 {
        NO_OVERLAP_DISTANCE
    } else {
        sum / f64::from(count)
    }
}

/// Index of the centroid nearest to `v`, ties to the lowest index.
fn nearest<C: AsRef<[Option<f64>]>>(v: &[Option<f64>], centroids: &[C]) -> usize {
    let mut best = 0;
    let mut best_d = partial_distance(v, centroids[0].as_ref());
    for (c, coords) in centroids.iter().enumerate().skip(1) {
        let d = partial_distance(v, coords.as_ref());
        if d < best_d {
            best = c;
            best_d = d;
        }
    }
    best
}

/// Cluster center; a coordinate is present iff at least one member rated
/// that article.
#[derive(Debug, Clone, PartialEq)]
pub struct Centroid {
    coords: Vec<Option<f64>>,
}

impl Centroid {
    pub fn coords(&self) -> &[Option<f64>] {
        &self.coords
    }
}

impl AsRef<[Option<f64>]> for Centroid {
    fn as_ref(&self) -> &[Option<f64>] {
        &self.coords
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FitOptions {
    pub k: usize,
    pub seed: u64,
    pub max_iter: usize,
    /// Use a k-means++-style weighted initializer instead of plain random
    /// row selection.
    pub plus_plus_init: bool,
}

impl FitOptions {
    pub fn new(k: usize, seed: u64) -> Self {
        FitOptions {
            k,
            seed,
            max_iter: 50,
            plus_plus_init: false,
        }
    }
}

/// Fitted k-means state: centroids, per-user assignment, and the objective
/// value recorded after every assignment pass.
#[derive(Debug, Clone)]
pub struct ClusterModel {
    n_articles: usize,
    centroids: Vec<Centroid>,
    assignment: Vec<usize>,
    iterations_run: usize,
    inertia_history: Vec<f64>,
    reseeded: Vec<bool>,
}

impl ClusterModel {
    pub fn k(&self) -> usize {
        self.centroids.len()
    }

    pub fn n_articles(&self) -> usize {
        self.n_articles
    }

    pub fn centroids(&self) -> &[Centroid] {
        &self.centroids
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn iterations_run(&self) -> usize {
        self.iterations_run
    }

    pub fn inertia_history(&self) -> &[f64] {
        &self.inertia_history
    }

    /// Whether `cluster` was re-seeded after running empty during fit.
    pub fn was_reseeded(&self, cluster: usize) -> bool {
        self.reseeded[cluster]
    }

    pub fn member_count(&self, cluster: usize) -> usize {
        self.assignment.iter().filter(|&&c| c == cluster).count()
    }

    /// Cluster of the centroid nearest to `v`, ties to the lowest index.
    ///
    /// Panics when `v` does not have the model's article count.
    pub fn assign(&self, v: &[Option<f64>]) -> usize {
        assert_eq!(
            v.len(),
            self.n_articles,
            "vector length must match the model's article count"
        );
        nearest(v, &self.centroids)
    }

    /// Debug dump: one line per centroid with comma-separated coordinates
    /// (empty field = absent), then one line with every user's cluster index.
    pub fn dump<W: Write>(&self, mut w: W) -> io::Result<()> {
        for centroid in &self.centroids {
            let mut first = true;
            for coord in centroid.coords() {
                if !first {
                    write!(w, ",")?;
                }
                if let Some(v) = coord {
                    write!(w, "{v}")?;
                }
                first = false;
            }
            writeln!(w)?;
        }
        let assignment: Vec<String> = self.assignment.iter().map(ToString::to_string).collect();
        writeln!(w, "{}", assignment.join(","))
    }
}

/// Sum over users of the partial distance to their assigned centroid.
///
/// Panics when the model was not fitted on a matrix of `m`'s shape.
pub fn inertia(model: &ClusterModel, m: &RatingsMatrix) -> f64 {
    assert_eq!(model.assignment.len(), m.n_users());
    assert_eq!(model.n_articles, m.n_articles());
    (0..m.n_users())
        .map(|u| {
            partial_distance(
                &m.row_values(u),
                model.centroids[model.assignment[u]].coords(),
            )
        })
        .sum()
}

pub fn fit(
    m: &RatingsMatrix,
    k: usize,
    seed: u64,
    max_iter: usize,
) -> Result<ClusterModel, KmeansError> {
    fit_with(
        m,
        &FitOptions {
            k,
            seed,
            max_iter,
            plus_plus_init: false,
        },
    )
}

pub fn fit_with(m: &RatingsMatrix, opts: &FitOptions) -> Result<ClusterModel, KmeansError> {
    let n_users = m.n_users();
    if opts.k == 0 || opts.k > n_users {
        return Err(KmeansError::InvalidK {
            k: opts.k,
            n_users,
        });
    }
    if opts.max_iter == 0 {
        return Err(KmeansError::ZeroMaxIter);
    }

    let rows: Vec<Vec<Option<f64>>> = (0..n_users).map(|u| m.row_values(u)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let seed_rows: Vec<usize> = if opts.plus_plus_init {
        plus_plus_seeds(&rows, opts.k, &mut rng)
    } else {
        rand::seq::index::sample(&mut rng, n_users, opts.k).into_vec()
    };
    let mut centroids: Vec<Vec<Option<f64>>> =
        seed_rows.into_iter().map(|u| rows[u].clone()).collect();
    let mut reseeded = vec![false; opts.k];

    let mut assignment = assign_all(&rows, &centroids);
    let mut history = vec![objective(&rows, &centroids, &assignment)];
    let mut iterations_run = 0;

    while iterations_run < opts.max_iter {
        iterations_run += 1;
        update_centroids(&rows, &assignment, &mut centroids);
        reseed_empty_clusters(&rows, &mut assignment, &mut centroids, &mut reseeded);
        let next = assign_all(&rows, &centroids);
        let converged = next == assignment;
        assignment = next;
        history.push(objective(&rows, &centroids, &assignment));
        if converged {
            break;
        }
    }

    Ok(ClusterModel {
        n_articles: m.n_articles(),
        centroids: centroids
            .into_iter()
            .map(|coords| Centroid { coords })
            .collect(),
        assignment,
        iterations_run,
        inertia_history: history,
        reseeded,
    })
}

fn assign_all(rows: &[Vec<Option<f64>>], centroids: &[Vec<Option<f64>>]) -> Vec<usize> {
    rows.iter().map(|row| nearest(row, centroids)).collect()
}

fn objective(
    rows: &[Vec<Option<f64>>],
    centroids: &[Vec<Option<f64>>],
    assignment: &[usize],
) -> f64 {
    rows.iter()
        .zip(assignment)
        .map(|(row, &c)| partial_distance(row, &centroids[c]))
        .sum()
}

/// Per-coordinate means of each cluster's members. Clusters without members
/// keep their previous coordinates until the reseed step decides.
fn update_centroids(
    rows: &[Vec<Option<f64>>],
    assignment: &[usize],
    centroids: &mut [Vec<Option<f64>>],
) {
    let k = centroids.len();
    let dims = rows[0].len();
    let mut sums = vec![0.0; k * dims];
    let mut counts = vec![0u32; k * dims];
    let mut members = vec![0usize; k];
    for (row, &c) in rows.iter().zip(assignment) {
        members[c] += 1;
        for (j, cell) in row.iter().enumerate() {
            if let Some(v) = cell {
                sums[c * dims + j] += v;
                counts[c * dims + j] += 1;
            }
        }
    }
    for (c, centroid) in centroids.iter_mut().enumerate() {
        if members[c] == 0 {
            continue;
        }
        for (j, coord) in centroid.iter_mut().enumerate() {
            let count = counts[c * dims + j];
            *coord = (count > 0).then(|| sums[c * dims + j] / f64::from(count));
        }
    }
}

/// Re-seeds each empty cluster to the user row farthest from its assigned
/// centroid, moving that user along; candidates are restricted to clusters
/// with at least two members so no new empty cluster appears.
fn reseed_empty_clusters(
    rows: &[Vec<Option<f64>>],
    assignment: &mut [usize],
    centroids: &mut [Vec<Option<f64>>],
    reseeded: &mut [bool],
) {
    let k = centroids.len();
    let mut members = vec![0usize; k];
    for &c in assignment.iter() {
        members[c] += 1;
    }
    if members.iter().all(|&m| m > 0) {
        return;
    }
    let mut dist: Vec<f64> = rows
        .iter()
        .zip(assignment.iter())
        .map(|(row, &c)| partial_distance(row, &centroids[c]))
        .collect();
    for c in 0..k {
        if members[c] > 0 {
            continue;
        }
        let mut farthest: Option<usize> = None;
        for (u, &d) in dist.iter().enumerate() {
            if members[assignment[u]] < 2 {
                continue;
            }
            if farthest.is_none_or(|b| d > dist[b]) {
                farthest = Some(u);
            }
        }
        let Some(u) = farthest else {
            continue; // nothing movable; leave empty, flagged by member_count
        };
        members[assignment[u]] -= 1;
        assignment[u] = c;
        members[c] = 1;
        centroids[c] = rows[u].clone();
        dist[u] = 0.0;
        reseeded[c] = true;
    }
}

/// k-means++-style initializer: subsequent seed rows are sampled with
/// probability proportional to their distance from the nearest chosen seed.
fn plus_plus_seeds(rows: &[Vec<Option<f64>>], k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = rows.len();
    let first = rng.random_range(0..n);
    let mut chosen = vec![first];
    let mut best_dist: Vec<f64> = rows
        .iter()
        .map(|row| partial_distance(row, &rows[first]))
        .collect();
    best_dist[first] = 0.0;
    while chosen.len() < k {
        let total: f64 = best_dist.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = None;
            for (u, &d) in best_dist.iter().enumerate() {
                if d <= 0.0 {
                    continue;
                }
                pick = Some(u);
                target -= d;
                if target <= 0.0 {
                    break;
                }
            }
            pick.expect("positive total implies a positive weight")
        } else {
            (0..n)
                .find(|u| !chosen.contains(u))
                .expect("k <= n_users leaves an unchosen row")
        };
        chosen.push(next);
        for (u, row) in rows.iter().enumerate() {
            let d = partial_distance(row, &rows[next]);
            if d < best_dist[u] {
                best_dist[u] = d;
            }
        }
        best_dist[next] = 0.0;
    }
    chosen
}

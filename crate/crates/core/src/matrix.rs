//! Rating matrix model: one-decimal ratings in [-10.0, +10.0] laid out as a
//! dense users × articles grid with explicit missing cells.

use std::fmt;

use thiserror::Error;

/// Default number of articles in a customer transaction.
pub const DEFAULT_TRANSACTION_LEN: usize = 4;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatrixError {
    #[error("matrix must have at least one user and one article")]
    EmptyMatrix,
    #[error("rating at user {user}, article {article} is outside [-10.0, +10.0]")]
    ValueOutOfRange { user: usize, article: usize },
    #[error("row {row} has {found} cells, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TransactionError {
    #[error("transaction must contain at least one article")]
    EmptyTransaction,
    #[error("article {article} appears more than once in the transaction")]
    DuplicateArticle { article: usize },
    #[error("article {article} is out of bounds for a matrix with {n_articles} articles")]
    IndexOutOfBounds { article: usize, n_articles: usize },
}

/// A rating with one decimal digit of precision, stored as tenths so that
/// comparisons and text round-trips are exact.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rating(i16);

impl Rating {
    pub const MIN: Rating = Rating(-100);
    pub const MAX: Rating = Rating(100);

    /// Rounds `value` to the nearest tenth. Returns `None` when the value is
    /// not finite or the rounded result falls outside [-10.0, +10.0].
    pub fn new(value: f64) -> Option<Rating> {
        if !value.is_finite() {
            return None;
        }
        let tenths = (value * 10.0).round();
        if !(-100.0..=100.0).contains(&tenths) {
            return None;
        }
        Some(Rating(tenths as i16))
    }

    /// Builds a rating from tenths (e.g. 93 → 9.3).
    pub fn from_tenths(tenths: i16) -> Option<Rating> {
        ((-100..=100).contains(&tenths)).then_some(Rating(tenths))
    }

    pub fn tenths(self) -> i16 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 10.0
    }
}

impl fmt::Display for Rating {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        write!(f, "{sign}{}.{}", abs / 10, abs % 10)
    }
}

impl fmt::Debug for Rating {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Rating({self})")
    }
}

impl serde::Serialize for Rating {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.value())
    }
}

/// Dense users × articles grid of optional ratings, immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatingsMatrix {
    n_users: usize,
    n_articles: usize,
    cells: Vec<Option<Rating>>, // row-major
}

impl RatingsMatrix {
    /// Builds a matrix from already-validated ratings in row-major order.
    pub fn from_cells(
        n_users: usize,
        n_articles: usize,
        cells: Vec<Option<Rating>>,
    ) -> Result<Self, MatrixError> {
        if n_users == 0 || n_articles == 0 {
            return Err(MatrixError::EmptyMatrix);
        }
        if cells.len() != n_users * n_articles {
            return Err(MatrixError::RaggedRow {
                row: cells.len() / n_articles,
                expected: n_users * n_articles,
                found: cells.len(),
            });
        }
        Ok(RatingsMatrix {
            n_users,
            n_articles,
            cells,
        })
    }

    /// Validates raw per-user rows and builds the matrix. This is the
    /// validation gate: dimension, shape, and range violations are reported
    /// with the first offending cell.
    pub fn from_rows(rows: &[Vec<Option<f64>>]) -> Result<Self, MatrixError> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(MatrixError::EmptyMatrix);
        }
        let n_articles = rows[0].len();
        let mut cells = Vec::with_capacity(rows.len() * n_articles);
        for (user, row) in rows.iter().enumerate() {
            if row.len() != n_articles {
                return Err(MatrixError::RaggedRow {
                    row: user,
                    expected: n_articles,
                    found: row.len(),
                });
            }
            for (article, value) in row.iter().enumerate() {
                match value {
                    None => cells.push(None),
                    Some(v) => match Rating::new(*v) {
                        Some(r) => cells.push(Some(r)),
                        None => return Err(MatrixError::ValueOutOfRange { user, article }),
                    },
                }
            }
        }
        Self::from_cells(rows.len(), n_articles, cells)
    }

    pub fn n_users(&self) -> usize {
        self.n_users
    }

    pub fn n_articles(&self) -> usize {
        self.n_articles
    }

    /// Rating of `article` by `user`, `None` when missing.
    ///
    /// Panics when either index is out of bounds.
    pub fn get(&self, user: usize, article: usize) -> Option<Rating> {
        assert!(user < self.n_users && article < self.n_articles);
        self.cells[user * self.n_articles + article]
    }

    /// One user's ratings across all articles.
    pub fn row(&self, user: usize) -> &[Option<Rating>] {
        assert!(user < self.n_users);
        &self.cells[user * self.n_articles..(user + 1) * self.n_articles]
    }

    /// One user's ratings as optional reals, for distance computations.
    pub fn row_values(&self, user: usize) -> Vec<Option<f64>> {
        self.row(user).iter().map(|c| c.map(Rating::value)).collect()
    }

    /// Arithmetic mean of the present ratings in a column, `None` when the
    /// column has no observations.
    ///
    /// Panics when `article` is out of bounds.
    pub fn article_mean(&self, article: usize) -> Option<f64> {
        assert!(article < self.n_articles);
        let mut sum = 0.0;
        let mut count = 0usize;
        for user in 0..self.n_users {
            if let Some(r) = self.cells[user * self.n_articles + article] {
                sum += r.value();
                count += 1;
            }
        }
        (count > 0).then(|| sum / count as f64)
    }

    /// Means of every column, indexed by article.
    pub fn article_means(&self) -> Vec<Option<f64>> {
        (0..self.n_articles).map(|a| self.article_mean(a)).collect()
    }

    /// Fraction of users who did not rate `article`, in [0, 1].
    ///
    /// Panics when `article` is out of bounds.
    pub fn missing_ratio(&self, article: usize) -> f64 {
        assert!(article < self.n_articles);
        let missing = (0..self.n_users)
            .filter(|u| self.cells[u * self.n_articles + article].is_none())
            .count();
        missing as f64 / self.n_users as f64
    }
}

/// The articles a customer selected; the query every strategy answers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transaction {
    articles: Vec<usize>,
}

impl Transaction {
    /// Validates distinct, in-range article indices. Order is preserved.
    pub fn new(ids: Vec<usize>, n_articles: usize) -> Result<Self, TransactionError> {
        if ids.is_empty() {
            return Err(TransactionError::EmptyTransaction);
        }
        for (i, &article) in ids.iter().enumerate() {
            if article >= n_articles {
                return Err(TransactionError::IndexOutOfBounds {
                    article,
                    n_articles,
                });
            }
            if ids[..i].contains(&article) {
                return Err(TransactionError::DuplicateArticle { article });
            }
        }
        Ok(Transaction { articles: ids })
    }

    /// Convenience form of [`Transaction::new`] bound to a matrix.
    pub fn for_matrix(ids: Vec<usize>, matrix: &RatingsMatrix) -> Result<Self, TransactionError> {
        Self::new(ids, matrix.n_articles())
    }

    pub fn articles(&self) -> &[usize] {
        &self.articles
    }

    pub fn len(&self) -> usize {
        self.articles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.articles.is_empty()
    }

    pub fn contains(&self, article: usize) -> bool {
        self.articles.contains(&article)
    }
}

/// Ranked strategy output: (article, score) pairs sorted by score descending,
/// ties broken by article index ascending. Never contains a transaction
/// article.
#[derive(Debug, Clone, PartialEq)]
pub struct RecommendationList {
    entries: Vec<(usize, f64)>,
}

impl RecommendationList {
    /// Sorts scored candidates into the canonical order. Callers guarantee
    /// distinct articles outside the transaction.
    pub(crate) fn from_scored(mut scored: Vec<(usize, f64)>, txn: &Transaction) -> Self {
        debug_assert!(scored.iter().all(|(a, _)| !txn.contains(*a)));
        scored.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));
        debug_assert!(scored.windows(2).all(|w| w[0].0 != w[1].0));
        RecommendationList { entries: scored }
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub(crate) fn truncate(&mut self, n: usize) {
        self.entries.truncate(n);
    }
}

//! Synthetic rating-matrix generator.
//!
//! Users are drawn from a small number of latent archetypes so that
//! collaborative structure exists for clustering to recover; per-article
//! missingness is sampled from a configurable range. Generation is a pure
//! function of the config: the RNG is ChaCha8 (`rand_chacha::ChaCha8Rng`),
//! seeded per user from the root seed, so output is identical across
//! platforms and independent of processing order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::matrix::{Rating, RatingsMatrix};
use crate::stream::{stream_seed, TAG_USER};

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("missing range [{low}, {high}] must satisfy 0 <= low <= high <= 1")]
    InvalidMissingRange { low: f64, high: f64 },
    #[error("n_archetypes must be at least 1")]
    ZeroArchetypes,
    #[error("noise_sigma must be nonnegative and finite, got {0}")]
    InvalidNoise(f64),
    #[error("matrix shape {n_users}x{n_articles} must be at least 1x1")]
    EmptyShape { n_users: usize, n_articles: usize },
}

/// Shape and distribution parameters for [`generate`].
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub n_users: usize,
    pub n_articles: usize,
    pub n_archetypes: usize,
    pub noise_sigma: f64,
    pub missing_low: f64,
    pub missing_high: f64,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            n_users: 5000,
            n_articles: 100,
            n_archetypes: 8,
            noise_sigma: 1.5,
            missing_low: 0.18,
            missing_high: 0.70,
            seed: 42,
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n_users == 0 || self.n_articles == 0 {
            return Err(ConfigError::EmptyShape {
                n_users: self.n_users,
                n_articles: self.n_articles,
            });
        }
        if self.n_archetypes == 0 {
            return Err(ConfigError::ZeroArchetypes);
        }
        if !self.noise_sigma.is_finite() || self.noise_sigma < 0.0 {
            return Err(ConfigError::InvalidNoise(self.noise_sigma));
        }
        let ok_range = self.missing_low >= 0.0
            && self.missing_low <= self.missing_high
            && self.missing_high <= 1.0;
        if !ok_range {
            return Err(ConfigError::InvalidMissingRange {
                low: self.missing_low,
                high: self.missing_high,
            });
        }
        Ok(())
    }
}

/// Generates a matrix plus the archetype label of every user.
///
/// The labels give clustering tests a ground truth: with zero noise and no
/// missingness, users sharing an archetype have identical rows.
pub fn generate_with_archetypes(
    cfg: &GeneratorConfig,
) -> Result<(RatingsMatrix, Vec<usize>), ConfigError> {
    cfg.validate()?;

    // Global draws: per-article missing probability, then the archetype
    // preference table, both from the root stream.
    let mut root_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let missing_prob: Vec<f64> = (0..cfg.n_articles)
        .map(|_| root_rng.random_range(cfg.missing_low..=cfg.missing_high))
        .collect();
    let prefs: Vec<Vec<f64>> = (0..cfg.n_archetypes)
        .map(|_| {
            (0..cfg.n_articles)
                .map(|_| root_rng.random_range(-10.0..=10.0))
                .collect()
        })
        .collect();

    let noise = (cfg.noise_sigma > 0.0)
        .then(|| Normal::new(0.0, cfg.noise_sigma).expect("validated sigma"));

    let mut cells = Vec::with_capacity(cfg.n_users * cfg.n_articles);
    let mut archetypes = Vec::with_capacity(cfg.n_users);
    for user in 0..cfg.n_users {
        let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(cfg.seed, TAG_USER, user as u64));
        let archetype = rng.random_range(0..cfg.n_archetypes);
        archetypes.push(archetype);
        for article in 0..cfg.n_articles {
            if rng.random::<f64>() < missing_prob[article] {
                cells.push(None);
                continue;
            }
            let mut value = prefs[archetype][article];
            if let Some(n) = &noise {
                value += n.sample(&mut rng);
            }
            let rating = Rating::new(value.clamp(-10.0, 10.0)).expect("clamped value in range");
            cells.push(Some(rating));
        }
    }

    let matrix = RatingsMatrix::from_cells(cfg.n_users, cfg.n_articles, cells)
        .expect("generated shape is valid");
    Ok((matrix, archetypes))
}

/// Generates a synthetic rating matrix; see [`generate_with_archetypes`].
pub fn generate(cfg: &GeneratorConfig) -> Result<RatingsMatrix, ConfigError> {
    generate_with_archetypes(cfg).map(|(m, _)| m)
}

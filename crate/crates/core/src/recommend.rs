//! Nearest-command recommendation in the valence/arousal plane.
//!
//! Distance is Euclidean over range-normalized differences with arousal
//! down-weighted by `alpha`. Candidates come only from the half of the corpus
//! whose polarity matches the estimate (valence >= 5 is positive); the whole
//! corpus is searched only when that half is empty.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::command::{CommandCorpus, EmotionCommand, Polarity, AROUSAL_MAX, AROUSAL_MIN, VALENCE_MAX, VALENCE_MIN};

pub const DEFAULT_ALPHA: f64 = 0.5;
pub const DEFAULT_K: usize = 3;

const VALENCE_SPAN: f64 = (VALENCE_MAX - VALENCE_MIN) as f64;
const AROUSAL_SPAN: f64 = (AROUSAL_MAX - AROUSAL_MIN) as f64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecommendConfig {
    pub alpha: f64,
    pub k: usize,
}

impl Default for RecommendConfig {
    fn default() -> Self {
        Self {
            alpha: DEFAULT_ALPHA,
            k: DEFAULT_K,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Recommendation {
    pub keys: Vec<String>,
    pub distances: Vec<f64>,
    pub polarity: Polarity,
    pub fallback_used: bool,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RecommendError {
    #[error("EMPTY_CORPUS: nothing to recommend from")]
    EmptyCorpus,
    #[error("OUT_OF_RANGE: valence {0} must lie in [1, 9]")]
    ValenceOutOfRange(f64),
    #[error("OUT_OF_RANGE: arousal {0} must lie in [50, 90]")]
    ArousalOutOfRange(f64),
    #[error("INVALID_CONFIG: {0}")]
    InvalidConfig(String),
}

/// `sqrt(((V - v)/8)^2 + alpha * ((A - a)/40)^2)`.
pub fn distance(valence: f64, arousal: f64, cmd_valence: f64, cmd_arousal: f64, alpha: f64) -> f64 {
    let dv = (valence - cmd_valence) / VALENCE_SPAN;
    let da = (arousal - cmd_arousal) / AROUSAL_SPAN;
    (dv * dv + alpha * (da * da)).sqrt()
}

/// Ranking key: distance, then valence proximity, then corpus position.
#[derive(Debug, Clone, Copy)]
struct Rank {
    distance: f64,
    valence_gap: f64,
    index: usize,
}

impl Rank {
    fn cmp(&self, other: &Self) -> Ordering {
        self.distance
            .total_cmp(&other.distance)
            .then(self.valence_gap.total_cmp(&other.valence_gap))
            .then(self.index.cmp(&other.index))
    }
}

fn check_inputs(
    corpus: &CommandCorpus,
    valence: f64,
    arousal: f64,
    cfg: &RecommendConfig,
) -> Result<(), RecommendError> {
    if !(cfg.alpha >= 0.0 && cfg.alpha.is_finite()) {
        return Err(RecommendError::InvalidConfig(format!(
            "alpha {} must be >= 0",
            cfg.alpha
        )));
    }
    if cfg.k == 0 {
        return Err(RecommendError::InvalidConfig("k must be >= 1".to_owned()));
    }
    if !(VALENCE_MIN as f64..=VALENCE_MAX as f64).contains(&valence) {
        return Err(RecommendError::ValenceOutOfRange(valence));
    }
    if !(AROUSAL_MIN as f64..=AROUSAL_MAX as f64).contains(&arousal) {
        return Err(RecommendError::ArousalOutOfRange(arousal));
    }
    if corpus.is_empty() {
        return Err(RecommendError::EmptyCorpus);
    }
    Ok(())
}

/// The `k` nearest commands of matching polarity.
pub fn recommend(
    corpus: &CommandCorpus,
    valence: f64,
    arousal: f64,
    cfg: &RecommendConfig,
) -> Result<Recommendation, RecommendError> {
    check_inputs(corpus, valence, arousal, cfg)?;
    let polarity = Polarity::of_valence(valence);
    let in_pool = |c: &EmotionCommand| c.polarity() == polarity;
    let fallback_used = !corpus.commands.iter().any(in_pool);

    // bounded insertion: `best` stays sorted and never exceeds k entries
    let mut best: Vec<Rank> = Vec::with_capacity(cfg.k + 1);
    for (index, c) in corpus.commands.iter().enumerate() {
        if !fallback_used && !in_pool(c) {
            continue;
        }
        let rank = Rank {
            distance: distance(valence, arousal, c.valence as f64, c.arousal as f64, cfg.alpha),
            valence_gap: (valence - c.valence as f64).abs(),
            index,
        };
        if best.len() == cfg.k && rank.cmp(&best[cfg.k - 1]) != Ordering::Less {
            continue;
        }
        let at = best.partition_point(|b| b.cmp(&rank) == Ordering::Less);
        best.insert(at, rank);
        best.truncate(cfg.k);
    }

    Ok(Recommendation {
        keys: best.iter().map(|r| corpus.commands[r.index].key.clone()).collect(),
        distances: best.iter().map(|r| r.distance).collect(),
        polarity,
        fallback_used,
    })
}

/// Reference answer by exhaustive sorting, kept separate from [`recommend`]
/// so the two can be compared.
pub mod oracle {
    use super::*;

    /// Sorts the whole candidate pool and takes the first `k`.
    pub fn brute_force(
        corpus: &CommandCorpus,
        valence: f64,
        arousal: f64,
        cfg: &RecommendConfig,
    ) -> Result<Recommendation, RecommendError> {
        check_inputs(corpus, valence, arousal, cfg)?;
        let polarity = Polarity::of_valence(valence);
        let pool: Vec<(usize, &EmotionCommand)> = corpus
            .commands
            .iter()
            .enumerate()
            .filter(|(_, c)| c.polarity() == polarity)
            .collect();
        let fallback_used = pool.is_empty();
        let mut scored: Vec<(f64, f64, usize)> = if fallback_used {
            corpus.commands.iter().enumerate().collect::<Vec<_>>()
        } else {
            pool
        }
        .into_iter()
        .map(|(i, c)| {
            let dv = valence - c.valence as f64;
            let da = arousal - c.arousal as f64;
            let (nv, na) = (dv / 8.0, da / 40.0);
            let d = (nv * nv + cfg.alpha * (na * na)).sqrt();
            (d, dv.abs(), i)
        })
        .collect();
        scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.cmp(&b.2)));
        scored.truncate(cfg.k);
        Ok(Recommendation {
            keys: scored.iter().map(|s| corpus.commands[s.2].key.clone()).collect(),
            distances: scored.iter().map(|s| s.0).collect(),
            polarity,
            fallback_used,
        })
    }
}

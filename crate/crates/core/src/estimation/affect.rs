use serde::{Deserialize, Serialize};

use super::sample::{check_probs, EmotionClass, SampleError, EMOTION_CLASSES};
use crate::command::{AROUSAL_DEFAULT, AROUSAL_MAX, AROUSAL_MIN, VALENCE_NEUTRAL};

/// Heart-rate to arousal scale factor.
pub const AROUSAL_GAMMA: f64 = 1.05;
/// Voice RMS above which the mouth is drawn open.
pub const MOUTH_OPEN_THRESHOLD: f64 = 0.02;
/// Weight of a new estimate in the exponential moving average.
pub const SMOOTHING: f64 = 0.2;

/// Maps an emotion-probability vector to the 1..=9 valence scale.
///
/// With `p` the largest of the six basic-emotion probabilities, a positive
/// winner yields `floor(4p) + 5` and a negative one `floor(4p) + 1`. When
/// neutral strictly beats all six, the result is 5. Ties between basic
/// emotions go to the one listed first in [`EmotionClass::ALL`].
pub fn encode_valence(probs: &[f64; EMOTION_CLASSES]) -> Result<i64, SampleError> {
    check_probs(probs)?;
    let (winner, p_max) = EmotionClass::ALL[..6].iter().zip(probs.iter()).fold(
        (EmotionClass::Happy, f64::NEG_INFINITY),
        |best, (class, &p)| {
            if p > best.1 {
                (*class, p)
            } else {
                best
            }
        },
    );
    if probs[6] > p_max {
        return Ok(VALENCE_NEUTRAL);
    }
    let base = (p_max * 4.0).floor() as i64;
    Ok(if winner.is_positive() { base + 5 } else { base + 1 })
}

/// `70 + gamma * (bpm - 60)` before rounding and clamping.
pub fn arousal_raw(bpm: f64) -> f64 {
    70.0 + AROUSAL_GAMMA * (bpm - 60.0)
}

/// Arousal on the 50..=90 scale from a heart rate.
pub fn estimate_arousal(bpm: f64) -> Result<i64, SampleError> {
    if !(bpm.is_finite() && bpm > 0.0) {
        return Err(SampleError::InvalidBpm(bpm));
    }
    let a = arousal_raw(bpm).round() as i64;
    Ok(a.clamp(AROUSAL_MIN, AROUSAL_MAX))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MouthState {
    Open,
    Closed,
}

pub fn mouth_state(volume: f64) -> MouthState {
    if volume > MOUTH_OPEN_THRESHOLD {
        MouthState::Open
    } else {
        MouthState::Closed
    }
}

/// Latest valence/arousal estimates plus smoothed copies used for
/// recommendation.
#[derive(Debug, Clone, PartialEq)]
pub struct AffectTracker {
    pub valence: i64,
    pub arousal: i64,
    smoothed_valence: Option<f64>,
    smoothed_arousal: Option<f64>,
    pub valence_ts: Option<u64>,
    pub arousal_ts: Option<u64>,
}

impl Default for AffectTracker {
    fn default() -> Self {
        Self {
            valence: VALENCE_NEUTRAL,
            arousal: AROUSAL_DEFAULT,
            smoothed_valence: None,
            smoothed_arousal: None,
            valence_ts: None,
            arousal_ts: None,
        }
    }
}

fn ema(prev: Option<f64>, x: f64) -> f64 {
    match prev {
        Some(p) => (1.0 - SMOOTHING) * p + SMOOTHING * x,
        None => x,
    }
}

impl AffectTracker {
    pub fn observe_valence(&mut self, v: i64, ts: u64) {
        self.valence = v;
        self.valence_ts = Some(ts);
        self.smoothed_valence = Some(ema(self.smoothed_valence, v as f64));
    }

    pub fn observe_arousal(&mut self, a: i64, ts: u64) {
        self.arousal = a;
        self.arousal_ts = Some(ts);
        self.smoothed_arousal = Some(ema(self.smoothed_arousal, a as f64));
    }

    /// Smoothed `(V, A)`; defaults to `(5, 70)` before any reading.
    pub fn smoothed(&self) -> (f64, f64) {
        (
            self.smoothed_valence.unwrap_or(VALENCE_NEUTRAL as f64),
            self.smoothed_arousal.unwrap_or(AROUSAL_DEFAULT as f64),
        )
    }
}

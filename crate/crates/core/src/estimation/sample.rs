use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Number of entries in an emotion-probability vector.
pub const EMOTION_CLASSES: usize = 7;

/// Order of entries in [`SensorSample::emotion_probs`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmotionClass {
    Happy,
    Sad,
    Fearful,
    Angry,
    Surprised,
    Disgusted,
    Neutral,
}

impl EmotionClass {
    pub const ALL: [EmotionClass; EMOTION_CLASSES] = [
        EmotionClass::Happy,
        EmotionClass::Sad,
        EmotionClass::Fearful,
        EmotionClass::Angry,
        EmotionClass::Surprised,
        EmotionClass::Disgusted,
        EmotionClass::Neutral,
    ];

    /// Right half of the circumplex. Neutral is neither.
    pub fn is_positive(self) -> bool {
        matches!(self, EmotionClass::Happy | EmotionClass::Surprised)
    }
}

/// One bundle of readings from a performer's external sensors. Every reading
/// is optional; absent ones leave the puppet untouched.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorSample {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub landmarks: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub emotion_probs: Option<[f64; EMOTION_CLASSES]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub volume: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bpm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eye_open_l: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eye_open_r: Option<bool>,
    #[serde(default)]
    pub timestamp_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SampleError {
    #[error("EMPTY_SAMPLE: no readings present")]
    Empty,
    #[error("EMPTY_LANDMARKS: landmark list is empty")]
    EmptyLandmarks,
    #[error("INVALID_LANDMARK: landmark {0} is not finite")]
    InvalidLandmark(usize),
    #[error("INVALID_PROBS: {0}")]
    InvalidProbs(String),
    #[error("INVALID_VOLUME: {0}")]
    InvalidVolume(f64),
    #[error("INVALID_BPM: {0}")]
    InvalidBpm(f64),
}

/// Checks a probability vector: finite, non-negative, summing to 1 +- 0.01.
pub fn check_probs(p: &[f64; EMOTION_CLASSES]) -> Result<(), SampleError> {
    if let Some(bad) = p.iter().find(|x| !x.is_finite() || **x < 0.0) {
        return Err(SampleError::InvalidProbs(format!(
            "entry {bad} is negative or not finite"
        )));
    }
    let sum: f64 = p.iter().sum();
    if !(0.99..=1.01).contains(&sum) {
        return Err(SampleError::InvalidProbs(format!("entries sum to {sum}")));
    }
    Ok(())
}

impl SensorSample {
    pub fn validate(&self) -> Result<(), SampleError> {
        if self.landmarks.is_none()
            && self.emotion_probs.is_none()
            && self.volume.is_none()
            && self.bpm.is_none()
            && self.eye_open_l.is_none()
            && self.eye_open_r.is_none()
        {
            return Err(SampleError::Empty);
        }
        if let Some(lms) = &self.landmarks {
            if lms.is_empty() {
                return Err(SampleError::EmptyLandmarks);
            }
            if let Some(i) = lms.iter().position(|l| !l[0].is_finite() || !l[1].is_finite()) {
                return Err(SampleError::InvalidLandmark(i));
            }
        }
        if let Some(p) = &self.emotion_probs {
            check_probs(p)?;
        }
        if let Some(v) = self.volume {
            if !(v.is_finite() && v >= 0.0) {
                return Err(SampleError::InvalidVolume(v));
            }
        }
        if let Some(b) = self.bpm {
            if !(b.is_finite() && b > 0.0) {
                return Err(SampleError::InvalidBpm(b));
            }
        }
        Ok(())
    }
}

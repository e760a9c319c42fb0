//! Turns raw sensor readings into puppet parameters and affect estimates.

mod affect;
mod filter;
mod sample;

pub use affect::{
    arousal_raw, encode_valence, estimate_arousal, mouth_state, AffectTracker, MouthState, AROUSAL_GAMMA,
    MOUTH_OPEN_THRESHOLD, SMOOTHING,
};
pub use filter::{
    landmark_mean, FaceFilter, FilterError, DEFAULT_OBSERVATION_NOISE, DEFAULT_PROCESS_NOISE, FILTER_PARTICLES,
};
pub use sample::{check_probs, EmotionClass, SampleError, SensorSample, EMOTION_CLASSES};

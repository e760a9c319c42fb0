//! Condensation (sampling-importance-resampling) tracker for the face position.
//!
//! Hidden state per particle is `[x, y, dx, dy]` with a random-walk velocity;
//! the observation is the mean of the detected landmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

pub const FILTER_PARTICLES: usize = 500;
/// Std deviation of the per-update velocity perturbation, scene units.
pub const DEFAULT_PROCESS_NOISE: f64 = 0.01;
/// Std deviation of the landmark-mean measurement, scene units.
pub const DEFAULT_OBSERVATION_NOISE: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FilterError {
    #[error("EMPTY_LANDMARKS: at least one landmark is required")]
    EmptyLandmarks,
}

/// Mean of the landmark positions.
pub fn landmark_mean(landmarks: &[[f64; 2]]) -> Result<(f64, f64), FilterError> {
    if landmarks.is_empty() {
        return Err(FilterError::EmptyLandmarks);
    }
    let n = landmarks.len() as f64;
    let (sx, sy) = landmarks.iter().fold((0.0, 0.0), |(sx, sy), l| (sx + l[0], sy + l[1]));
    Ok((sx / n, sy / n))
}

#[derive(Debug, Clone)]
pub struct FaceFilter {
    states: Vec<[f64; 4]>,
    weights: Vec<f64>,
    process: Normal<f64>,
    observation_noise: f64,
    rng: ChaCha8Rng,
    estimate: (f64, f64),
}

impl FaceFilter {
    pub fn new(seed: u64) -> Self {
        Self::with_noise(seed, DEFAULT_PROCESS_NOISE, DEFAULT_OBSERVATION_NOISE)
    }

    /// Particles start uniformly over the unit square, at rest.
    pub fn with_noise(seed: u64, process_noise: f64, observation_noise: f64) -> Self {
        assert!(
            process_noise >= 0.0 && observation_noise > 0.0,
            "noise must be positive"
        );
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let states = (0..FILTER_PARTICLES)
            .map(|_| [rng.random::<f64>(), rng.random::<f64>(), 0.0, 0.0])
            .collect();
        Self {
            states,
            weights: vec![1.0 / FILTER_PARTICLES as f64; FILTER_PARTICLES],
            process: Normal::new(0.0, process_noise).expect("finite std dev"),
            observation_noise,
            rng,
            estimate: (0.5, 0.5),
        }
    }

    pub fn particles(&self) -> &[[f64; 4]] {
        &self.states
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Last position estimate; the scene centre before any update.
    pub fn estimate(&self) -> (f64, f64) {
        self.estimate
    }

    /// One predict / weight / resample cycle against the landmark mean.
    /// Returns the weighted-mean position clamped to the unit square.
    pub fn update(&mut self, landmarks: &[[f64; 2]]) -> Result<(f64, f64), FilterError> {
        let (mx, my) = landmark_mean(landmarks)?;

        for s in &mut self.states {
            s[0] += s[2];
            s[1] += s[3];
            s[2] += self.process.sample(&mut self.rng);
            s[3] += self.process.sample(&mut self.rng);
        }

        // log-likelihoods, shifted by their max so the best particle has weight 1
        let inv_two_var = 1.0 / (2.0 * self.observation_noise * self.observation_noise);
        for (w, s) in self.weights.iter_mut().zip(&self.states) {
            let d2 = (s[0] - mx).powi(2) + (s[1] - my).powi(2);
            *w = -d2 * inv_two_var;
        }
        let max = self.weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut total = 0.0;
        for w in &mut self.weights {
            *w = (*w - max).exp();
            total += *w;
        }
        for w in &mut self.weights {
            *w /= total;
        }

        let (ex, ey) = self
            .states
            .iter()
            .zip(&self.weights)
            .fold((0.0, 0.0), |(ex, ey), (s, w)| (ex + w * s[0], ey + w * s[1]));
        self.estimate = (ex.clamp(0.0, 1.0), ey.clamp(0.0, 1.0));

        self.resample();
        Ok(self.estimate)
    }

    /// Systematic resampling; leaves uniform weights.
    fn resample(&mut self) {
        let n = self.states.len();
        let step = 1.0 / n as f64;
        let mut u = self.rng.random::<f64>() * step;
        let mut resampled = Vec::with_capacity(n);
        let mut cumulative = self.weights[0];
        let mut i = 0;
        for _ in 0..n {
            while u > cumulative && i + 1 < n {
                i += 1;
                cumulative += self.weights[i];
            }
            resampled.push(self.states[i]);
            u += step;
        }
        self.states = resampled;
        self.weights.fill(step);
    }
}

//! Background particle effects: jet, exploding and rain emitters.
//!
//! Particles fade linearly to transparent over their lifetime. Velocity noise
//! is applied once, at spawn. Motion uses semi-implicit Euler; the recurrence
//! in [`step`] is the exact contract, not an approximation of a closed form.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tree::Point;

/// Live particles kept per emitter; the oldest are evicted beyond this.
pub const MAX_PARTICLES: usize = 1000;

pub const DEFAULT_HALF_ANGLE: f64 = PI / 6.0;
pub const DEFAULT_SPAWN_RATE: f64 = 30.0;
pub const DEFAULT_LIFETIME_MS: f64 = 1500.0;
pub const DEFAULT_GRAVITY: f64 = 0.5;
pub const DEFAULT_NOISE_RATIO: f64 = 0.05;
pub const DEFAULT_SEGMENT_HALF_LENGTH: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParticlePattern {
    Jet,
    Exploding,
    Rain,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid emitter config: {0}")]
pub struct ParticleError(pub String);

#[derive(Debug, Clone, PartialEq)]
pub struct EmitterConfig {
    pub pattern: ParticlePattern,
    pub emitter: Point,
    /// Initial speed, scene units per second.
    pub speed: f64,
    /// Jet cone half-angle in radians.
    pub half_angle: f64,
    /// Jet axis as a unit vector. Scene y points down, so "up" is `(0, -1)`.
    pub direction: (f64, f64),
    pub segment_half_length: f64,
    /// Particles per second.
    pub spawn_rate: f64,
    pub lifetime_ms: f64,
    /// Downward acceleration, scene units per second squared.
    pub gravity: f64,
    /// Std deviation of the per-component initial velocity noise.
    pub noise_sigma: f64,
    pub texture_id: String,
}

impl EmitterConfig {
    /// A config with the stock defaults for everything a PARTICLE action does
    /// not specify.
    pub fn new(pattern: ParticlePattern, emitter: Point, speed: f64, texture_id: impl Into<String>) -> Self {
        Self {
            pattern,
            emitter,
            speed,
            half_angle: DEFAULT_HALF_ANGLE,
            direction: (0.0, -1.0),
            segment_half_length: DEFAULT_SEGMENT_HALF_LENGTH,
            spawn_rate: DEFAULT_SPAWN_RATE,
            lifetime_ms: DEFAULT_LIFETIME_MS,
            gravity: DEFAULT_GRAVITY,
            noise_sigma: DEFAULT_NOISE_RATIO * speed,
            texture_id: texture_id.into(),
        }
    }

    pub fn validate(&self) -> Result<(), ParticleError> {
        let fail = |m: String| Err(ParticleError(m));
        if !(self.half_angle > 0.0 && self.half_angle <= PI) {
            return fail(format!("half_angle {} outside (0, pi]", self.half_angle));
        }
        if !(self.spawn_rate > 0.0 && self.spawn_rate.is_finite()) {
            return fail(format!("spawn_rate {} must be positive", self.spawn_rate));
        }
        if !(self.lifetime_ms > 0.0 && self.lifetime_ms.is_finite()) {
            return fail(format!("lifetime_ms {} must be positive", self.lifetime_ms));
        }
        if !(self.gravity >= 0.0 && self.gravity.is_finite()) {
            return fail(format!("gravity {} must be non-negative", self.gravity));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return fail(format!("noise_sigma {} must be non-negative", self.noise_sigma));
        }
        let norm = self.direction.0.hypot(self.direction.1);
        if (norm - 1.0).abs() > 1e-9 {
            return fail(format!("direction has length {norm}, expected 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Particle {
    pub x: f64,
    pub y: f64,
    pub vx: f64,
    pub vy: f64,
    pub age_ms: f64,
    pub alpha: f64,
}

/// Opacity at `age_ms` for a particle living `lifetime_ms`.
pub fn alpha_at(age_ms: f64, lifetime_ms: f64) -> f64 {
    (1.0 - age_ms / lifetime_ms).max(0.0)
}

/// Draws one new particle.
pub fn spawn<R: Rng + ?Sized>(config: &EmitterConfig, rng: &mut R) -> Particle {
    let e = config.emitter;
    let (x, y, vx, vy) = match config.pattern {
        ParticlePattern::Jet => {
            let axis = config.direction.1.atan2(config.direction.0);
            let theta = axis + rng.random_range(-config.half_angle..=config.half_angle);
            (e.x, e.y, config.speed * theta.cos(), config.speed * theta.sin())
        }
        ParticlePattern::Exploding => {
            let theta = rng.random_range(0.0..TAU);
            (e.x, e.y, config.speed * theta.cos(), config.speed * theta.sin())
        }
        ParticlePattern::Rain => {
            let l = config.segment_half_length;
            let x = rng.random_range(e.x - l..=e.x + l);
            (x, e.y, 0.0, 0.0)
        }
    };
    let (nx, ny) = if config.noise_sigma > 0.0 {
        let noise = Normal::new(0.0, config.noise_sigma).expect("sigma validated finite");
        (noise.sample(rng), noise.sample(rng))
    } else {
        (0.0, 0.0)
    };
    Particle {
        x,
        y,
        vx: vx + nx,
        vy: vy + ny,
        age_ms: 0.0,
        alpha: 1.0,
    }
}

/// Advances every particle by `dt_ms` and drops the expired ones.
///
/// Exploding and rain particles: `vy += g*dt` then `pos += v*dt`.
/// Jet particles: `pos += v*dt` with constant velocity.
pub fn step(particles: &mut Vec<Particle>, config: &EmitterConfig, dt_ms: f64) {
    let dt = dt_ms / 1000.0;
    let gravity = match config.pattern {
        ParticlePattern::Jet => None,
        ParticlePattern::Exploding | ParticlePattern::Rain => Some(config.gravity),
    };
    for p in particles.iter_mut() {
        if let Some(g) = gravity {
            p.vy += g * dt;
        }
        p.x += p.vx * dt;
        p.y += p.vy * dt;
        p.age_ms += dt_ms;
        p.alpha = alpha_at(p.age_ms, config.lifetime_ms);
    }
    particles.retain(|p| p.age_ms < config.lifetime_ms);
}

/// A running emitter: its config, live particles and fractional spawn debt.
#[derive(Debug, Clone, PartialEq)]
pub struct Emitter {
    pub config: EmitterConfig,
    pub particles: Vec<Particle>,
    spawn_debt: f64,
}

impl Emitter {
    pub fn new(config: EmitterConfig) -> Self {
        Self {
            config,
            particles: Vec::new(),
            spawn_debt: 0.0,
        }
    }

    /// Steps existing particles, then spawns this tick's share of new ones
    /// while `emitting`.
    pub fn update<R: Rng + ?Sized>(&mut self, dt_ms: f64, emitting: bool, rng: &mut R) {
        step(&mut self.particles, &self.config, dt_ms);
        if emitting {
            self.spawn_debt += self.config.spawn_rate * dt_ms / 1000.0;
            let n = self.spawn_debt.floor();
            self.spawn_debt -= n;
            for _ in 0..n as usize {
                self.particles.push(spawn(&self.config, rng));
            }
            if self.particles.len() > MAX_PARTICLES {
                let excess = self.particles.len() - MAX_PARTICLES;
                self.particles.drain(..excess);
            }
        }
    }

    pub fn is_idle(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn sprites(&self) -> impl Iterator<Item = ParticleSprite> + '_ {
        self.particles.iter().map(|p| ParticleSprite {
            x: p.x,
            y: p.y,
            alpha: p.alpha,
            texture_id: self.config.texture_id.clone(),
        })
    }
}

/// Render description of one particle, as carried in state frames.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParticleSprite {
    pub x: f64,
    pub y: f64,
    pub alpha: f64,
    pub texture_id: String,
}

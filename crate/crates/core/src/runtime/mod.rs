//! The fixed-step tick engine.
//!
//! A [`Runtime`] owns one puppet: it folds sensor samples into the puppet
//! parameters, installs a compiled timeline when a command is triggered, and
//! produces one [`StateFrame`] per tick. Given the same corpus, config, seed
//! and input sequence it produces bit-identical frames.

mod frame;

use log::warn;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub use frame::{Character, ComponentOffsets, DanmakuSprite, Effects, Expression, Offset, PuppetState, StateFrame};

use crate::command::CommandCorpus;
use crate::estimation::{
    encode_valence, estimate_arousal, mouth_state, AffectTracker, FaceFilter, MouthState, SampleError, SensorSample,
};
use crate::particles::{Emitter, EmitterConfig};
use crate::recommend::{recommend, RecommendConfig};
use crate::tree::{compile_timeline, ActionParams, ActionTimeline, Axis, TimelineError};

pub const DEFAULT_TICK_RATE: u32 = 60;
pub const MIN_TICK_RATE: u32 = 1;
pub const MAX_TICK_RATE: u32 = 240;

#[derive(Debug, Clone, PartialEq)]
pub struct RuntimeConfig {
    pub tick_rate: u32,
    pub seed: u64,
    pub character: Character,
    pub recommend: RecommendConfig,
}

impl Default for RuntimeConfig {
    fn default() -> Self {
        Self {
            tick_rate: DEFAULT_TICK_RATE,
            seed: 0,
            character: Character::Boy,
            recommend: RecommendConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RuntimeError {
    #[error("UNKNOWN_KEY: no command bound to {0:?}")]
    UnknownKey(String),
    #[error(transparent)]
    InvalidTree(#[from] TimelineError),
    #[error("INVALID_TICK_RATE: {0} outside [1, 240]")]
    InvalidTickRate(u32),
}

impl RuntimeError {
    pub fn code(&self) -> &'static str {
        match self {
            RuntimeError::UnknownKey(_) => "UNKNOWN_KEY",
            RuntimeError::InvalidTree(_) => "INVALID_TREE",
            RuntimeError::InvalidTickRate(_) => "INVALID_TICK_RATE",
        }
    }
}

#[derive(Debug, Clone)]
struct ActiveTimeline {
    key: String,
    timeline: ActionTimeline,
    trigger_tick: u64,
    /// One slot per timeline entry; only PARTICLE entries get an emitter.
    emitters: Vec<Option<Emitter>>,
    fired: Vec<bool>,
}

impl ActiveTimeline {
    fn new(key: String, timeline: ActionTimeline, trigger_tick: u64) -> Self {
        let emitters = timeline
            .entries
            .iter()
            .map(|e| match &e.action {
                ActionParams::Particle(p) => Some(Emitter::new(EmitterConfig::new(
                    p.pattern,
                    p.emitter,
                    p.speed,
                    p.texture_id.clone(),
                ))),
                _ => None,
            })
            .collect();
        let fired = vec![false; timeline.entries.len()];
        Self {
            key,
            timeline,
            trigger_tick,
            emitters,
            fired,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Runtime {
    config: RuntimeConfig,
    corpus: CommandCorpus,
    puppet: PuppetState,
    affect: AffectTracker,
    filter: FaceFilter,
    particle_rng: ChaCha8Rng,
    active: Option<ActiveTimeline>,
    tick: u64,
}

impl Runtime {
    pub fn new(corpus: CommandCorpus, config: RuntimeConfig) -> Result<Self, RuntimeError> {
        if !(MIN_TICK_RATE..=MAX_TICK_RATE).contains(&config.tick_rate) {
            return Err(RuntimeError::InvalidTickRate(config.tick_rate));
        }
        let mut particle_rng = ChaCha8Rng::seed_from_u64(config.seed);
        particle_rng.set_stream(1);
        Ok(Self {
            puppet: PuppetState::new(config.character),
            affect: AffectTracker::default(),
            filter: FaceFilter::new(config.seed),
            particle_rng,
            active: None,
            tick: 0,
            corpus,
            config,
        })
    }

    pub fn config(&self) -> &RuntimeConfig {
        &self.config
    }

    pub fn corpus(&self) -> &CommandCorpus {
        &self.corpus
    }

    /// Replaces the command set. A running timeline keeps playing.
    pub fn set_corpus(&mut self, corpus: CommandCorpus) {
        self.corpus = corpus;
    }

    pub fn puppet(&self) -> &PuppetState {
        &self.puppet
    }

    pub fn affect(&self) -> &AffectTracker {
        &self.affect
    }

    /// Index of the next frame to be produced.
    pub fn next_tick(&self) -> u64 {
        self.tick
    }

    pub fn dt_ms(&self) -> f64 {
        1000.0 / self.config.tick_rate as f64
    }

    /// True while a triggered command is still playing.
    pub fn is_animating(&self) -> bool {
        self.active.is_some()
    }

    /// Folds one sensor sample into the puppet. Invalid samples are dropped
    /// whole and leave the state untouched.
    pub fn apply_sensor(&mut self, sample: &SensorSample) -> Result<(), SampleError> {
        if let Err(e) = sample.validate() {
            warn!("dropping sensor sample at {} ms: {e}", sample.timestamp_ms);
            return Err(e);
        }
        if let Some(landmarks) = &sample.landmarks {
            let (x, y) = self.filter.update(landmarks).expect("landmarks validated non-empty");
            self.puppet.x = x;
            self.puppet.y = y;
        }
        if let Some(open) = sample.eye_open_l {
            self.puppet.eye_closed_l = !open;
        }
        if let Some(open) = sample.eye_open_r {
            self.puppet.eye_closed_r = !open;
        }
        if let Some(volume) = sample.volume {
            self.puppet.mouth_open = mouth_state(volume) == MouthState::Open;
        }
        if let Some(probs) = &sample.emotion_probs {
            let v = encode_valence(probs)?;
            self.affect.observe_valence(v, sample.timestamp_ms);
        }
        if let Some(bpm) = sample.bpm {
            let a = estimate_arousal(bpm)?;
            self.affect.observe_arousal(a, sample.timestamp_ms);
        }
        Ok(())
    }

    /// Starts the command bound to `key`, replacing whatever is playing. The
    /// timeline's clock starts with the next frame.
    pub fn trigger(&mut self, key: &str) -> Result<(), RuntimeError> {
        let cmd = self
            .corpus
            .get(key)
            .ok_or_else(|| RuntimeError::UnknownKey(key.to_owned()))?;
        let timeline = compile_timeline(&cmd.tree)?;
        self.active = Some(ActiveTimeline::new(cmd.key.clone(), timeline, self.tick));
        Ok(())
    }

    /// Advances one fixed step and describes the result.
    pub fn tick(&mut self) -> StateFrame {
        let tick = self.tick;
        let rate = self.config.tick_rate as f64;
        let dt = self.dt_ms();
        let mut effects = Effects {
            background: self.corpus.default_background.clone(),
            ..Effects::default()
        };
        let mut expression = Expression::Neutral;

        let mut expired = false;
        if let Some(active) = &mut self.active {
            // ms elapsed at the end of this tick; exact whenever it is integral
            let t_now = (tick - active.trigger_tick + 1) as f64 * 1000.0 / rate;
            expired = t_now >= active.timeline.total_ms as f64;
            for (i, entry) in active.timeline.entries.iter().enumerate() {
                let started = t_now >= entry.start_ms as f64;
                let live = entry.is_live(t_now);
                let local = t_now - entry.start_ms as f64;
                match &entry.action {
                    ActionParams::Sound(p) => {
                        if started && !active.fired[i] {
                            active.fired[i] = true;
                            effects.sounds.push(p.sound_id.clone());
                        }
                    }
                    _ if expired => {}
                    ActionParams::Swap(p) if live => expression = p.template.into(),
                    ActionParams::Danmaku(p) if live => {
                        let span = (entry.end_ms - entry.start_ms) as f64;
                        effects.danmaku.push(DanmakuSprite {
                            text: p.text.clone(),
                            font_size: p.font_size,
                            color: p.color,
                            x: p.x_at(local / span),
                            y: p.shift,
                        });
                    }
                    ActionParams::Vibration(p) if live => {
                        let offset = effects.vibration.get_mut(entry.component);
                        match p.axis {
                            Axis::X => offset.dx += p.offset_at(local),
                            Axis::Y => offset.dy += p.offset_at(local),
                        }
                    }
                    ActionParams::Particle(_) if started => {
                        if let Some(emitter) = active.emitters[i].as_mut() {
                            emitter.update(dt, live, &mut self.particle_rng);
                            effects.particles.extend(emitter.sprites());
                        }
                    }
                    ActionParams::BackgroundImage(p) if started => {
                        effects.background = Some(p.image_id.clone());
                    }
                    _ => {}
                }
            }
            if expired {
                effects.background = self.corpus.default_background.clone();
            } else {
                effects.active_command = Some(active.key.clone());
            }
        }
        if expired {
            self.active = None;
        }
        self.puppet.expression = expression;

        let (v, a) = self.affect.smoothed();
        let (recommendations, recommendation_fallback) = match recommend(&self.corpus, v, a, &self.config.recommend) {
            Ok(r) => (r.keys, r.fallback_used),
            Err(_) => (Vec::new(), false),
        };

        self.tick += 1;
        StateFrame {
            tick,
            time_ms: (tick + 1) as f64 * 1000.0 / rate,
            puppet: self.puppet.clone(),
            effects,
            recommendations,
            recommendation_fallback,
            valence: self.affect.valence,
            arousal: self.affect.arousal,
        }
    }
}

//! Headless drivers: offline rendering of one command and scenario replay.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::canonical;
use crate::command::CommandCorpus;
use crate::estimation::SensorSample;
use crate::protocol::{Hello, Message, Payload, Role, Trigger};
use crate::runtime::{Runtime, RuntimeConfig, RuntimeError, StateFrame, DEFAULT_TICK_RATE};
use crate::session::{Outbound, Session};

/// Frames covering the whole timeline of `key`, starting on the frame after
/// the trigger. The last frame is the first one past the timeline's end.
pub fn render(corpus: &CommandCorpus, key: &str, fps: u32, seed: u64) -> Result<Vec<StateFrame>, RuntimeError> {
    let cfg = RuntimeConfig {
        tick_rate: fps,
        seed,
        ..RuntimeConfig::default()
    };
    let mut rt = Runtime::new(corpus.clone(), cfg)?;
    rt.trigger(key)?;
    let mut frames = vec![rt.tick()];
    while rt.is_animating() {
        frames.push(rt.tick());
    }
    Ok(frames)
}

/// One canonical JSON object per line.
pub fn to_ndjson<T: Serialize>(items: &[T]) -> Vec<u8> {
    let mut out = Vec::new();
    for item in items {
        out.extend(canonical::to_bytes(item).expect("engine types serialize"));
        out.push(b'\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Corpus file, relative to the scenario file.
    #[serde(default)]
    pub corpus: Option<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_tick_rate")]
    pub tick_rate: u32,
    /// Defaults to one second past the last record.
    #[serde(default)]
    pub duration_ms: Option<u64>,
}

fn default_tick_rate() -> u32 {
    DEFAULT_TICK_RATE
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            corpus: None,
            seed: 0,
            tick_rate: DEFAULT_TICK_RATE,
            duration_ms: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScenarioRecord {
    Sensor { t_ms: u64, sample: SensorSample },
    Trigger { t_ms: u64, key: String },
}

impl ScenarioRecord {
    pub fn t_ms(&self) -> u64 {
        match self {
            ScenarioRecord::Sensor { t_ms, .. } | ScenarioRecord::Trigger { t_ms, .. } => *t_ms,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub records: Vec<ScenarioRecord>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("MALFORMED_SCENARIO: line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error(transparent)]
    Runtime(#[from] RuntimeError),
}

impl Scenario {
    /// Parses newline-delimited records. Blank lines are ignored. An optional
    /// `{"kind": "config", ...}` record may appear on the first non-blank line.
    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        let mut scenario = Scenario::default();
        let mut seen_record = false;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let bad = |reason: String| ScenarioError::Malformed { line, reason };
            if raw.trim().is_empty() {
                continue;
            }
            let mut v: Value = serde_json::from_str(raw).map_err(|e| bad(e.to_string()))?;
            if v.get("kind").and_then(Value::as_str) == Some("config") {
                if seen_record {
                    return Err(bad("config must be the first record".into()));
                }
                v.as_object_mut().expect("has a kind field").remove("kind");
                scenario.config = serde_json::from_value(v).map_err(|e| bad(e.to_string()))?;
                seen_record = true;
                continue;
            }
            seen_record = true;
            let rec: ScenarioRecord = serde_json::from_value(v).map_err(|e| bad(e.to_string()))?;
            if let Some(prev) = scenario.records.last() {
                if rec.t_ms() < prev.t_ms() {
                    return Err(bad(format!("t_ms {} goes backwards", rec.t_ms())));
                }
            }
            scenario.records.push(rec);
        }
        Ok(scenario)
    }

    pub fn duration_ms(&self) -> u64 {
        self.config
            .duration_ms
            .unwrap_or_else(|| self.records.last().map_or(0, |r| r.t_ms()) + 1000)
    }

    /// Number of frames the run produces.
    pub fn tick_count(&self) -> u64 {
        (self.duration_ms() * self.config.tick_rate as u64).div_ceil(1000)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecommendationChange {
    pub tick: u64,
    pub keys: Vec<String>,
    pub fallback: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary {
    pub frames: u64,
    pub final_valence: i64,
    pub final_arousal: i64,
    pub final_x: f64,
    pub final_y: f64,
    /// Recommendation list each time it changes.
    pub recommendation_trace: Vec<RecommendationChange>,
    /// Errors returned by the session, as `CODE: message`.
    pub errors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    pub frames: Vec<StateFrame>,
    pub summary: SimulationSummary,
}

const SIM_SESSION: &str = "simulate";
const SIM_PERFORMER: u64 = 1;

/// Runs the scenario through a live session as its performer. A record at
/// `t_ms` is delivered before frame `floor(t_ms * rate / 1000)`.
pub fn simulate(scenario: &Scenario, corpus: CommandCorpus) -> Result<Simulation, ScenarioError> {
    let cfg = RuntimeConfig {
        tick_rate: scenario.config.tick_rate,
        seed: scenario.config.seed,
        ..RuntimeConfig::default()
    };
    let rate = cfg.tick_rate as u64;
    let mut session = Session::new(SIM_SESSION, corpus, cfg)?;
    let mut errors = Vec::new();
    let mut collect = |out: Vec<Outbound>| {
        for o in out {
            if let Payload::Error(e) = o.msg.payload {
                errors.push(format!("{}: {}", e.code, e.message));
            }
        }
    };

    let mut seq = 1;
    let hello = Payload::Hello(Hello {
        role: Role::Performer,
        seed: None,
    });
    collect(session.handle(SIM_PERFORMER, Message::new(SIM_SESSION, seq, hello)));

    let mut frames = Vec::new();
    let mut records = scenario.records.iter().peekable();
    for tick in 0..scenario.tick_count() {
        while let Some(rec) = records.next_if(|r| r.t_ms() * rate / 1000 <= tick) {
            let payload = match rec {
                ScenarioRecord::Sensor { t_ms, sample } => Payload::Sensor(SensorSample {
                    timestamp_ms: *t_ms,
                    ..sample.clone()
                }),
                ScenarioRecord::Trigger { key, .. } => Payload::Trigger(Trigger { key: key.clone() }),
            };
            seq += 1;
            collect(session.handle(SIM_PERFORMER, Message::new(SIM_SESSION, seq, payload)));
        }
        let (frame, _) = session.tick();
        frames.extend(frame);
    }

    let mut trace: Vec<RecommendationChange> = Vec::new();
    for f in &frames {
        let changed = trace
            .last()
            .is_none_or(|t| t.keys != f.recommendations || t.fallback != f.recommendation_fallback);
        if changed {
            trace.push(RecommendationChange {
                tick: f.tick,
                keys: f.recommendations.clone(),
                fallback: f.recommendation_fallback,
            });
        }
    }
    let rt = session.runtime();
    let summary = SimulationSummary {
        frames: frames.len() as u64,
        final_valence: rt.affect().valence,
        final_arousal: rt.affect().arousal,
        final_x: rt.puppet().x,
        final_y: rt.puppet().y,
        recommendation_trace: trace,
        errors,
    };
    Ok(Simulation { frames, summary })
}

//! Fixtures shared by the engine benchmarks.

use puppetwire_core::command::{load_corpus, CommandCorpus};
use puppetwire_core::estimation::SensorSample;
use puppetwire_core::runtime::{Runtime, RuntimeConfig};

pub fn bundled_corpus() -> CommandCorpus {
    load_corpus(include_bytes!("../../core/data/basic_emotions.json")).expect("bundled corpus is valid")
}

pub fn sample(t: u64) -> SensorSample {
    let phase = t as f64 / 30.0;
    SensorSample {
        landmarks: Some(vec![[0.5 + 0.2 * phase.cos(), 0.5 + 0.2 * phase.sin()]]),
        volume: Some(0.02),
        bpm: Some(72.0),
        emotion_probs: Some([0.6, 0.1, 0.1, 0.05, 0.05, 0.05, 0.05]),
        ..Default::default()
    }
}

/// Runtime half way through the angry command, with its particles in flight.
pub fn busy_runtime() -> Runtime {
    let mut rt = Runtime::new(bundled_corpus(), RuntimeConfig::default()).expect("default config");
    rt.trigger("a").expect("bundled key");
    for t in 0..30 {
        let _ = rt.apply_sensor(&sample(t));
        rt.tick();
    }
    rt
}

//! Deterministic headless engine for emotion-command driven 2D live
//! animation.
//!
//! A corpus binds single keys to emotion commands. Each command carries a
//! valence/arousal label and a behavior tree of timed visual and audio
//! actions. The [`runtime::Runtime`] folds performer sensor data into puppet
//! parameters, plays triggered commands, and suggests commands whose labels
//! sit nearest the performer's estimated affect. [`session::Session`] wraps
//! a runtime in the performer/audience protocol.

pub mod canonical;
pub mod command;
pub mod diagnostics;
pub mod estimation;
pub mod offline;
pub mod particles;
pub mod protocol;
pub mod recommend;
pub mod runtime;
pub mod session;
pub mod tree;

pub use command::{
    load_corpus, save_corpus, validate_command, validate_corpus, CommandCorpus, CorpusDoc, CorpusError, EmotionCommand,
    Polarity,
};
pub use diagnostics::{Diagnostic, DiagnosticCode, Diagnostics};
pub use estimation::{AffectTracker, FaceFilter, SensorSample};
pub use offline::{render, simulate, Scenario, Simulation, SimulationSummary};
pub use protocol::{decode_message, encode_message, Message, Payload, ProtocolError, Role};
pub use recommend::{recommend, RecommendConfig, Recommendation};
pub use runtime::{Runtime, RuntimeConfig, RuntimeError, StateFrame};
pub use session::Session;
pub use tree::{compile_timeline, parse_tree, validate_tree, ActionTimeline, BehaviorTree};

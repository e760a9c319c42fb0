//! Emotion commands and the corpus that holds them.
//!
//! An emotion command binds a trigger key, a free-text semantic label, a
//! self-reported valence (1..=9) and arousal (50..=90), and the behavior
//! tree the puppet performs when the key is pressed.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canonical;
use crate::diagnostics::{Diagnostic, DiagnosticCode, Diagnostics};
use crate::tree::{parse_tree, validate_tree, BehaviorTree, TreeDoc};

pub const VALENCE_MIN: i64 = 1;
pub const VALENCE_MAX: i64 = 9;
pub const VALENCE_NEUTRAL: i64 = 5;
pub const AROUSAL_MIN: i64 = 50;
pub const AROUSAL_MAX: i64 = 90;
pub const AROUSAL_DEFAULT: i64 = 70;

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct EmotionCommand {
    pub key: String,
    pub semantic: String,
    pub valence: i64,
    pub arousal: i64,
    pub tree: BehaviorTree,
}

/// Which half of the valence scale a value falls in. Five counts as positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn of_valence(v: f64) -> Self {
        if v >= VALENCE_NEUTRAL as f64 {
            Polarity::Positive
        } else {
            Polarity::Negative
        }
    }
}

impl EmotionCommand {
    pub fn polarity(&self) -> Polarity {
        Polarity::of_valence(self.valence as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommandCorpus {
    pub schema_version: u64,
    pub default_background: Option<String>,
    pub commands: Vec<EmotionCommand>,
}

impl Default for CommandCorpus {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            default_background: None,
            commands: Vec::new(),
        }
    }
}

impl CommandCorpus {
    pub fn new(commands: Vec<EmotionCommand>) -> Self {
        Self {
            commands,
            ..Self::default()
        }
    }

    pub fn len(&self) -> usize {
        self.commands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.commands.is_empty()
    }

    pub fn get(&self, key: &str) -> Option<&EmotionCommand> {
        self.commands.iter().find(|c| c.key == key)
    }

    /// Commands with valence >= 5.
    pub fn positive(&self) -> impl Iterator<Item = &EmotionCommand> {
        self.commands.iter().filter(|c| c.polarity() == Polarity::Positive)
    }

    /// Commands with valence < 5.
    pub fn negative(&self) -> impl Iterator<Item = &EmotionCommand> {
        self.commands.iter().filter(|c| c.polarity() == Polarity::Negative)
    }
}

/// Checks `cmd` on its own and against `corpus`.
///
/// A key collision is any *other* corpus entry with the same key; when `cmd`
/// is itself borrowed from `corpus` its own slot is not counted.
pub fn validate_command(cmd: &EmotionCommand, corpus: &CommandCorpus) -> Diagnostics {
    let mut out = Vec::new();
    let mut chars = cmd.key.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) if !c.is_control() => {}
        _ => out.push(Diagnostic::new(
            DiagnosticCode::InvalidKey,
            format!("key {:?} must be a single printable character", cmd.key),
        )),
    }
    if cmd.semantic.is_empty() {
        out.push(Diagnostic::new(
            DiagnosticCode::EmptySemantic,
            "semantic label is empty",
        ));
    }
    if !(VALENCE_MIN..=VALENCE_MAX).contains(&cmd.valence) {
        out.push(Diagnostic::new(
            DiagnosticCode::ValenceOutOfRange,
            format!("valence {} outside [{VALENCE_MIN}, {VALENCE_MAX}]", cmd.valence),
        ));
    }
    if !(AROUSAL_MIN..=AROUSAL_MAX).contains(&cmd.arousal) {
        out.push(Diagnostic::new(
            DiagnosticCode::ArousalOutOfRange,
            format!("arousal {} outside [{AROUSAL_MIN}, {AROUSAL_MAX}]", cmd.arousal),
        ));
    }
    let collides = corpus
        .commands
        .iter()
        .any(|other| !std::ptr::eq(other, cmd) && other.key == cmd.key);
    if collides {
        out.push(Diagnostic::new(
            DiagnosticCode::DuplicateKey,
            format!("key {:?} is bound to more than one command", cmd.key),
        ));
    }
    out.extend(validate_tree(&cmd.tree));
    for d in &mut out {
        d.key = Some(cmd.key.clone());
    }
    out
}

/// Diagnostics for every command of the corpus, in corpus order.
pub fn validate_corpus(corpus: &CommandCorpus) -> Diagnostics {
    corpus
        .commands
        .iter()
        .flat_map(|c| validate_command(c, corpus))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CorpusError {
    #[error("MALFORMED_DOCUMENT: {0}")]
    MalformedDocument(String),
    #[error("SCHEMA_VIOLATION: {0}")]
    SchemaViolation(String),
    #[error("INVALID_COMMAND: {} diagnostic(s)", .0.len())]
    InvalidCommand(Diagnostics),
}

impl CorpusError {
    pub fn code(&self) -> &'static str {
        match self {
            CorpusError::MalformedDocument(_) => "MALFORMED_DOCUMENT",
            CorpusError::SchemaViolation(_) => "SCHEMA_VIOLATION",
            CorpusError::InvalidCommand(_) => "INVALID_COMMAND",
        }
    }
}

/// Wire form of one command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommandDoc {
    pub key: String,
    pub semantic: String,
    pub valence: i64,
    pub arousal: i64,
    pub tree: TreeDoc,
}

fn default_schema_version() -> u64 {
    SCHEMA_VERSION
}

/// Wire form of a corpus. Every top-level field may be omitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusDoc {
    #[serde(default = "default_schema_version")]
    pub schema_version: u64,
    #[serde(default)]
    pub default_background: Option<String>,
    #[serde(default)]
    pub commands: Vec<CommandDoc>,
}

impl From<&EmotionCommand> for CommandDoc {
    fn from(c: &EmotionCommand) -> Self {
        CommandDoc {
            key: c.key.clone(),
            semantic: c.semantic.clone(),
            valence: c.valence,
            arousal: c.arousal,
            tree: c.tree.to_doc(),
        }
    }
}

impl From<&CommandCorpus> for CorpusDoc {
    fn from(c: &CommandCorpus) -> Self {
        CorpusDoc {
            schema_version: c.schema_version,
            default_background: c.default_background.clone(),
            commands: c.commands.iter().map(CommandDoc::from).collect(),
        }
    }
}

impl CorpusDoc {
    /// Structural conversion plus full validation.
    pub fn into_corpus(self) -> Result<CommandCorpus, CorpusError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CorpusError::SchemaViolation(format!(
                "unsupported schema_version {}",
                self.schema_version
            )));
        }
        let mut commands = Vec::with_capacity(self.commands.len());
        for doc in self.commands {
            let tree = parse_tree(&doc.tree)
                .map_err(|e| CorpusError::SchemaViolation(format!("command {:?}: {e}", doc.key)))?;
            commands.push(EmotionCommand {
                key: doc.key,
                semantic: doc.semantic,
                valence: doc.valence,
                arousal: doc.arousal,
                tree,
            });
        }
        let corpus = CommandCorpus {
            schema_version: self.schema_version,
            default_background: self.default_background,
            commands,
        };
        let diags = validate_corpus(&corpus);
        if diags.is_empty() {
            Ok(corpus)
        } else {
            Err(CorpusError::InvalidCommand(diags))
        }
    }
}

/// Parses a corpus document. Total: every input yields a corpus or an error.
pub fn load_corpus(bytes: &[u8]) -> Result<CommandCorpus, CorpusError> {
    let text = std::str::from_utf8(bytes).map_err(|e| CorpusError::MalformedDocument(e.to_string()))?;
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| CorpusError::MalformedDocument(e.to_string()))?;
    // serde would happily read a struct out of a JSON array
    if !value.is_object() {
        return Err(CorpusError::SchemaViolation("corpus must be an object".to_owned()));
    }
    let doc: CorpusDoc = serde_json::from_value(value).map_err(|e| CorpusError::SchemaViolation(e.to_string()))?;
    doc.into_corpus()
}

/// Canonical bytes: sorted keys, two-space indent, trailing newline.
pub fn save_corpus(corpus: &CommandCorpus) -> Vec<u8> {
    canonical::to_pretty_bytes(&CorpusDoc::from(corpus)).expect("corpus documents always serialize")
}

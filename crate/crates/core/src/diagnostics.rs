//! Structured validation findings shared by corpus and tree validation.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Machine-readable diagnostic code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DiagnosticCode {
    ValenceOutOfRange,
    ArousalOutOfRange,
    DuplicateKey,
    InvalidKey,
    EmptySemantic,
    MultipleRoots,
    MissingRoot,
    IllegalEdge,
    DanglingEdge,
    DuplicateNodeId,
    MultipleParents,
    Cycle,
    UnreachableNode,
    ComponentMismatch,
    InvalidParam,
}

impl DiagnosticCode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::ValenceOutOfRange => "VALENCE_OUT_OF_RANGE",
            Self::ArousalOutOfRange => "AROUSAL_OUT_OF_RANGE",
            Self::DuplicateKey => "DUPLICATE_KEY",
            Self::InvalidKey => "INVALID_KEY",
            Self::EmptySemantic => "EMPTY_SEMANTIC",
            Self::MultipleRoots => "MULTIPLE_ROOTS",
            Self::MissingRoot => "MISSING_ROOT",
            Self::IllegalEdge => "ILLEGAL_EDGE",
            Self::DanglingEdge => "DANGLING_EDGE",
            Self::DuplicateNodeId => "DUPLICATE_NODE_ID",
            Self::MultipleParents => "MULTIPLE_PARENTS",
            Self::Cycle => "CYCLE",
            Self::UnreachableNode => "UNREACHABLE_NODE",
            Self::ComponentMismatch => "COMPONENT_MISMATCH",
            Self::InvalidParam => "INVALID_PARAM",
        }
    }
}

impl fmt::Display for DiagnosticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One validation finding. `key` names the owning command (when known) and
/// `node` the offending tree node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub code: DiagnosticCode,
    pub key: Option<String>,
    pub node: Option<String>,
    pub message: String,
}

impl Diagnostic {
    pub fn new(code: DiagnosticCode, message: impl Into<String>) -> Self {
        Self {
            code,
            key: None,
            node: None,
            message: message.into(),
        }
    }

    pub fn at_node(code: DiagnosticCode, node: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            code,
            key: None,
            node: Some(node.into()),
            message: message.into(),
        }
    }

    pub fn with_key(mut self, key: impl Into<String>) -> Self {
        self.key = Some(key.into());
        self
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.code)?;
        if let Some(key) = &self.key {
            write!(f, " key={key:?}")?;
        }
        if let Some(node) = &self.node {
            write!(f, " node={node}")?;
        }
        write!(f, ": {}", self.message)
    }
}

pub type Diagnostics = Vec<Diagnostic>;

/// True when any diagnostic in `diags` carries `code`.
pub fn has_code(diags: &[Diagnostic], code: DiagnosticCode) -> bool {
    diags.iter().any(|d| d.code == code)
}

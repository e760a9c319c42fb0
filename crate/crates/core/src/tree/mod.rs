//! The three-kind behavior tree (`root+ -> sequence+ -> action`) that
//! describes what a puppet does when an emotion command fires.
//!
//! A tree is parsed from its document form ([`TreeDoc`]), checked with
//! [`validate_tree`], and compiled once per trigger into an
//! [`ActionTimeline`]. There is no per-tick re-evaluation of control flow.

mod doc;
mod timeline;
mod validate;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use doc::{parse_tree, NodeDoc, TreeDoc, TreeError};
pub use timeline::{compile_timeline, ActionTimeline, TimelineEntry, TimelineError};
pub use validate::validate_tree;

use crate::particles::ParticlePattern;

/// Duration applied to an action whose `duration_ms` is omitted.
pub const DEFAULT_DURATION_MS: u64 = 2000;

/// Horizontal speed, in scene widths per second, used to derive a danmaku
/// duration when none is given.
pub const DEFAULT_DANMAKU_SPEED: f64 = 0.25;

/// Font points per scene unit. The scene is one unit wide.
pub const SCENE_WIDTH_PT: f64 = 1000.0;

/// Sounds a SOUND action may name. Playback assets live in the UI.
pub const SOUND_REGISTRY: &[&str] = &["cry", "gasp", "giggle", "laugh", "scream", "sigh"];

/// Target component of a `sequence+` node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Component {
    Face,
    Background,
    Text,
}

impl Component {
    pub const ALL: [Component; 3] = [Component::Face, Component::Background, Component::Text];
}

/// The six basic expression templates a SWAP action can show.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Template {
    Happy,
    Sad,
    Fearful,
    Angry,
    Surprised,
    Disgusted,
}

impl Template {
    pub const ALL: [Template; 6] = [
        Template::Happy,
        Template::Sad,
        Template::Fearful,
        Template::Angry,
        Template::Surprised,
        Template::Disgusted,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DanmakuDirection {
    LeftToRight,
    RightToLeft,
}

/// Coarse frequency / amplitude setting of a vibration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Low,
    Med,
    High,
}

impl Level {
    /// Oscillation frequency in Hz.
    pub fn frequency_hz(self) -> f64 {
        match self {
            Level::Low => 2.0,
            Level::Med => 5.0,
            Level::High => 10.0,
        }
    }

    /// Peak displacement in scene units.
    pub fn amplitude(self) -> f64 {
        match self {
            Level::Low => 0.005,
            Level::Med => 0.01,
            Level::High => 0.02,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    X,
    Y,
}

/// A point in scene coordinates (origin top-left, y down, unit square).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn in_unit_square(self) -> bool {
        (0.0..=1.0).contains(&self.x) && (0.0..=1.0).contains(&self.y)
    }
}

/// 24-bit color, written as `#RRGGBB`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rgb(pub u8, pub u8, pub u8);

impl fmt::Display for Rgb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{:02X}{:02X}{:02X}", self.0, self.1, self.2)
    }
}

impl FromStr for Rgb {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let hex = s
            .strip_prefix('#')
            .filter(|h| h.len() == 6 && h.bytes().all(|b| b.is_ascii_hexdigit()))
            .ok_or_else(|| format!("expected #RRGGBB, got {s:?}"))?;
        let channel = |i: usize| u8::from_str_radix(&hex[i..i + 2], 16).map_err(|e| e.to_string());
        Ok(Rgb(channel(0)?, channel(2)?, channel(4)?))
    }
}

impl Serialize for Rgb {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rgb {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DanmakuParams {
    pub text: String,
    pub font_size: f64,
    pub color: Rgb,
    pub direction: DanmakuDirection,
    pub shift: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration_ms: Option<u64>,
}

impl DanmakuParams {
    pub(crate) const FIELDS: &'static [&'static str] =
        &["text", "font_size", "color", "direction", "shift", "duration_ms"];

    /// Approximate rendered width in scene units (0.6 em per character).
    pub fn text_width(&self) -> f64 {
        0.6 * self.font_size / SCENE_WIDTH_PT * self.text.chars().count() as f64
    }

    /// Horizontal position `progress` of the way through the traversal, where
    /// `progress` runs from 0 to 1. The text starts and ends one text-width
    /// outside the scene.
    pub fn x_at(&self, progress: f64) -> f64 {
        let margin = self.text_width();
        let span = 1.0 + 2.0 * margin;
        match self.direction {
            DanmakuDirection::LeftToRight => -margin + progress * span,
            DanmakuDirection::RightToLeft => 1.0 + margin - progress * span,
        }
    }

    pub fn effective_duration_ms(&self) -> u64 {
        match self.duration_ms {
            Some(ms) => ms,
            None => {
                let span = 1.0 + 2.0 * self.text_width();
                (span / DEFAULT_DANMAKU_SPEED * 1000.0).round() as u64
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwapParams {
    pub template: Template,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration_ms: Option<u64>,
}

impl SwapParams {
    pub(crate) const FIELDS: &'static [&'static str] = &["template", "duration_ms"];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParticleParams {
    pub texture_id: String,
    pub emitter: Point,
    pub pattern: ParticlePattern,
    pub speed: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration_ms: Option<u64>,
}

impl ParticleParams {
    pub(crate) const FIELDS: &'static [&'static str] = &["texture_id", "emitter", "pattern", "speed", "duration_ms"];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VibrationParams {
    pub frequency: Level,
    pub amplitude: Level,
    pub axis: Axis,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration_ms: Option<u64>,
}

impl VibrationParams {
    pub(crate) const FIELDS: &'static [&'static str] = &["frequency", "amplitude", "axis", "duration_ms"];

    /// Signed displacement `elapsed_ms` after the vibration started.
    pub fn offset_at(&self, elapsed_ms: f64) -> f64 {
        let phase = std::f64::consts::TAU * self.frequency.frequency_hz() * elapsed_ms / 1000.0;
        self.amplitude.amplitude() * phase.sin()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SoundParams {
    pub sound_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration_ms: Option<u64>,
}

impl SoundParams {
    pub(crate) const FIELDS: &'static [&'static str] = &["sound_id", "duration_ms"];
}

/// Background image for the stage. Takes no time in its sequence; the image
/// stays up until the command's timeline ends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BackgroundImageParams {
    pub image_id: String,
}

impl BackgroundImageParams {
    pub(crate) const FIELDS: &'static [&'static str] = &["image_id"];
}

/// Parameters of an action node, one variant per action kind.
#[derive(Debug, Clone, PartialEq)]
pub enum ActionParams {
    Danmaku(DanmakuParams),
    Swap(SwapParams),
    Particle(ParticleParams),
    Vibration(VibrationParams),
    Sound(SoundParams),
    BackgroundImage(BackgroundImageParams),
}

impl ActionParams {
    pub fn kind_name(&self) -> &'static str {
        match self {
            ActionParams::Danmaku(_) => "danmaku",
            ActionParams::Swap(_) => "swap",
            ActionParams::Particle(_) => "particle",
            ActionParams::Vibration(_) => "vibration",
            ActionParams::Sound(_) => "sound",
            ActionParams::BackgroundImage(_) => "background_image",
        }
    }

    /// Whether this action may hang under a `sequence+` of `component`.
    pub fn allowed_under(&self, component: Component) -> bool {
        match self {
            ActionParams::Swap(_) | ActionParams::Sound(_) => component == Component::Face,
            ActionParams::Particle(_) | ActionParams::BackgroundImage(_) => component == Component::Background,
            ActionParams::Danmaku(_) => component == Component::Text,
            ActionParams::Vibration(_) => true,
        }
    }

    /// Time this action occupies in its sequence.
    pub fn duration_ms(&self) -> u64 {
        let explicit = match self {
            ActionParams::Danmaku(p) => return p.effective_duration_ms(),
            ActionParams::BackgroundImage(_) => return 0,
            ActionParams::Swap(p) => p.duration_ms,
            ActionParams::Particle(p) => p.duration_ms,
            ActionParams::Vibration(p) => p.duration_ms,
            ActionParams::Sound(p) => p.duration_ms,
        };
        explicit.unwrap_or(DEFAULT_DURATION_MS)
    }
}

/// Kind plus kind-specific parameters of a node.
#[derive(Debug, Clone, PartialEq)]
pub enum NodeBody {
    RootPlus,
    SequencePlus { component: Component },
    Action(ActionParams),
}

impl NodeBody {
    pub fn kind_name(&self) -> &'static str {
        match self {
            NodeBody::RootPlus => "root+",
            NodeBody::SequencePlus { .. } => "sequence+",
            NodeBody::Action(a) => a.kind_name(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeNode {
    pub id: String,
    pub body: NodeBody,
    pub children: Vec<String>,
}

/// A parsed behavior program. Node order mirrors the source document.
#[derive(Debug, Clone, PartialEq)]
pub struct BehaviorTree {
    pub root: String,
    pub nodes: Vec<TreeNode>,
}

/// The `(f*, t*, o*)` view of a tree: actions grouped by their component.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BehaviorActionSet {
    pub face: Vec<ActionParams>,
    pub background: Vec<ActionParams>,
    pub text: Vec<ActionParams>,
}

impl BehaviorTree {
    /// A lone `root+` with no components.
    pub fn empty() -> Self {
        Self {
            root: "root".to_owned(),
            nodes: vec![TreeNode {
                id: "root".to_owned(),
                body: NodeBody::RootPlus,
                children: Vec::new(),
            }],
        }
    }

    /// First node carrying `id`.
    pub fn node(&self, id: &str) -> Option<&TreeNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn action_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n.body, NodeBody::Action(_)))
            .count()
    }

    /// Sequence nodes under the root, in child order.
    pub fn sequences(&self) -> impl Iterator<Item = (&TreeNode, Component)> {
        self.node(&self.root)
            .into_iter()
            .flat_map(|root| root.children.iter())
            .filter_map(|id| self.node(id))
            .filter_map(|n| match n.body {
                NodeBody::SequencePlus { component } => Some((n, component)),
                _ => None,
            })
    }

    /// Groups reachable actions by the component of their parent sequence.
    pub fn action_set(&self) -> BehaviorActionSet {
        let mut set = BehaviorActionSet::default();
        for (seq, component) in self.sequences() {
            let bucket = match component {
                Component::Face => &mut set.face,
                Component::Background => &mut set.background,
                Component::Text => &mut set.text,
            };
            for child in seq.children.iter().filter_map(|id| self.node(id)) {
                if let NodeBody::Action(action) = &child.body {
                    bucket.push(action.clone());
                }
            }
        }
        set
    }
}

use serde::{Deserialize, Serialize};

use crate::particles::ParticleSprite;
use crate::tree::{Component, Rgb, Template};

/// Expression currently drawn on the puppet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expression {
    #[default]
    Neutral,
    Happy,
    Sad,
    Fearful,
    Angry,
    Surprised,
    Disgusted,
}

impl From<Template> for Expression {
    fn from(t: Template) -> Self {
        match t {
            Template::Happy => Expression::Happy,
            Template::Sad => Expression::Sad,
            Template::Fearful => Expression::Fearful,
            Template::Angry => Expression::Angry,
            Template::Surprised => Expression::Surprised,
            Template::Disgusted => Expression::Disgusted,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Character {
    #[default]
    Boy,
    Girl,
}

/// The controllable puppet parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PuppetState {
    pub x: f64,
    pub y: f64,
    pub expression: Expression,
    pub eye_closed_l: bool,
    pub eye_closed_r: bool,
    pub mouth_open: bool,
    pub character: Character,
}

impl PuppetState {
    pub fn new(character: Character) -> Self {
        Self {
            x: 0.5,
            y: 0.5,
            expression: Expression::Neutral,
            eye_closed_l: false,
            eye_closed_r: false,
            mouth_open: false,
            character,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Offset {
    pub dx: f64,
    pub dy: f64,
}

/// Vibration displacement per component; zero when nothing vibrates it.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentOffsets {
    pub face: Offset,
    pub background: Offset,
    pub text: Offset,
}

impl ComponentOffsets {
    pub fn get(&self, c: Component) -> Offset {
        match c {
            Component::Face => self.face,
            Component::Background => self.background,
            Component::Text => self.text,
        }
    }

    pub fn get_mut(&mut self, c: Component) -> &mut Offset {
        match c {
            Component::Face => &mut self.face,
            Component::Background => &mut self.background,
            Component::Text => &mut self.text,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DanmakuSprite {
    pub text: String,
    pub font_size: f64,
    pub color: Rgb,
    pub x: f64,
    pub y: f64,
}

/// Everything an active command contributes to a frame.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Effects {
    pub active_command: Option<String>,
    pub vibration: ComponentOffsets,
    pub danmaku: Vec<DanmakuSprite>,
    pub particles: Vec<ParticleSprite>,
    /// Sound ids that start on this frame.
    pub sounds: Vec<String>,
    pub background: Option<String>,
}

/// One tick's complete render description.
///
/// Frame `tick` covers the interval ending at `time_ms`, so frame 0 shows the
/// world one tick after start.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFrame {
    pub tick: u64,
    pub time_ms: f64,
    pub puppet: PuppetState,
    pub effects: Effects,
    pub recommendations: Vec<String>,
    pub recommendation_fallback: bool,
    pub valence: i64,
    pub arousal: i64,
}

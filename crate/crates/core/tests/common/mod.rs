//! Random generators for valid engine values, shared by integration tests.
#![allow(dead_code)]

use puppetwire_core::command::{CommandCorpus, EmotionCommand};
use puppetwire_core::diagnostics::DiagnosticCode;
use puppetwire_core::particles::ParticlePattern;
use puppetwire_core::tree::{
    ActionParams, Axis, BackgroundImageParams, BehaviorTree, Component, DanmakuDirection, DanmakuParams, Level,
    NodeBody, ParticleParams, Point, Rgb, SoundParams, SwapParams, Template, TreeNode, VibrationParams, SOUND_REGISTRY,
};
use rand::seq::IndexedRandom;
use rand::Rng;
use serde_json::{json, Value};

const TEXT_POOL: &[&str] = &[
    "wow",
    "",
    "ha ha",
    "\"quoted\"",
    "tab\there",
    "日本語",
    "😀!",
    "a\\b",
    "line\nbreak",
];

fn level(rng: &mut impl Rng) -> Level {
    *[Level::Low, Level::Med, Level::High].choose(rng).unwrap()
}

fn duration(rng: &mut impl Rng) -> Option<u64> {
    rng.random_bool(0.7).then(|| rng.random_range(1..=5000))
}

fn word(rng: &mut impl Rng) -> String {
    let n = rng.random_range(1..8);
    (0..n).map(|_| rng.random_range(b'a'..=b'z') as char).collect()
}

pub fn action(rng: &mut impl Rng, component: Component) -> ActionParams {
    let choice = match component {
        Component::Face => *["swap", "sound", "vibration"].choose(rng).unwrap(),
        Component::Background => *["particle", "background_image", "vibration"].choose(rng).unwrap(),
        Component::Text => *["danmaku", "vibration"].choose(rng).unwrap(),
    };
    match choice {
        "swap" => ActionParams::Swap(SwapParams {
            template: *Template::ALL.choose(rng).unwrap(),
            duration_ms: duration(rng),
        }),
        "sound" => ActionParams::Sound(SoundParams {
            sound_id: SOUND_REGISTRY.choose(rng).unwrap().to_string(),
            duration_ms: duration(rng),
        }),
        "vibration" => ActionParams::Vibration(VibrationParams {
            frequency: level(rng),
            amplitude: level(rng),
            axis: if rng.random() { Axis::X } else { Axis::Y },
            duration_ms: duration(rng),
        }),
        "particle" => ActionParams::Particle(ParticleParams {
            texture_id: word(rng),
            emitter: Point::new(rng.random(), rng.random()),
            pattern: *[ParticlePattern::Jet, ParticlePattern::Exploding, ParticlePattern::Rain]
                .choose(rng)
                .unwrap(),
            speed: rng.random_range(0.01..2.0),
            duration_ms: duration(rng),
        }),
        "background_image" => ActionParams::BackgroundImage(BackgroundImageParams { image_id: word(rng) }),
        _ => ActionParams::Danmaku(DanmakuParams {
            text: TEXT_POOL.choose(rng).unwrap().to_string(),
            font_size: rng.random_range(6.0..96.0),
            color: Rgb(rng.random(), rng.random(), rng.random()),
            direction: if rng.random() {
                DanmakuDirection::LeftToRight
            } else {
                DanmakuDirection::RightToLeft
            },
            shift: rng.random(),
            duration_ms: duration(rng),
        }),
    }
}

/// A structurally valid tree with up to four sequences of up to five
/// actions each, node ids shuffled in the node list.
pub fn tree(rng: &mut impl Rng) -> BehaviorTree {
    let mut nodes = Vec::new();
    let mut root_children = Vec::new();
    for s in 0..rng.random_range(0..=4) {
        let component = *Component::ALL.choose(rng).unwrap();
        let sid = format!("seq{s}");
        let mut children = Vec::new();
        for a in 0..rng.random_range(0..=5) {
            let aid = format!("act{s}_{a}");
            nodes.push(TreeNode {
                id: aid.clone(),
                body: NodeBody::Action(action(rng, component)),
                children: vec![],
            });
            children.push(aid);
        }
        nodes.push(TreeNode {
            id: sid.clone(),
            body: NodeBody::SequencePlus { component },
            children,
        });
        root_children.push(sid);
    }
    nodes.push(TreeNode {
        id: "root".into(),
        body: NodeBody::RootPlus,
        children: root_children,
    });
    // node order carries no meaning, but it must survive a round trip
    for i in (1..nodes.len()).rev() {
        let j = rng.random_range(0..=i);
        nodes.swap(i, j);
    }
    BehaviorTree {
        root: "root".into(),
        nodes,
    }
}

const KEYS: &str = "abcdefghijklmnopqrstuvwxyz0123456789!?é中";

pub fn command(rng: &mut impl Rng, key: char) -> EmotionCommand {
    EmotionCommand {
        key: key.to_string(),
        semantic: word(rng),
        valence: rng.random_range(1..=9),
        arousal: rng.random_range(50..=90),
        tree: tree(rng),
    }
}

/// Up to `max` commands with distinct keys.
pub fn corpus(rng: &mut impl Rng, max: usize) -> CommandCorpus {
    let keys: Vec<char> = KEYS.chars().collect();
    let n = rng.random_range(0..=max.min(keys.len()));
    let chosen: Vec<char> = keys.choose_multiple(rng, n).copied().collect();
    let mut c = CommandCorpus::new(chosen.into_iter().map(|k| command(rng, k)).collect());
    if rng.random() {
        c.default_background = Some(word(rng));
    }
    c
}

/// Commands with only labels (empty trees), for recommendation tests.
/// Labels are drawn from a small grid so ties are common.
pub fn labelled_corpus(rng: &mut impl Rng, max: usize) -> CommandCorpus {
    let n = rng.random_range(1..=max);
    let commands = (0..n)
        .map(|i| EmotionCommand {
            key: char::from_u32(0x4e00 + i as u32).unwrap().to_string(),
            semantic: format!("c{i}"),
            valence: rng.random_range(1..=9),
            arousal: 50 + 5 * rng.random_range(0..=8),
            tree: BehaviorTree::empty(),
        })
        .collect();
    CommandCorpus::new(commands)
}

fn seq(id: &str, component: &str, children: &[&str]) -> Value {
    json!({"id": id, "kind": "sequence+", "params": {"component": component}, "children": children})
}

fn root(id: &str, children: &[&str]) -> Value {
    json!({"id": id, "kind": "root+", "children": children})
}

fn swap(id: &str) -> Value {
    json!({"id": id, "kind": "swap", "params": {"template": "happy"}})
}

fn doc(root_id: &str, nodes: Vec<Value>) -> Value {
    json!({"root": root_id, "nodes": nodes})
}

/// Tree documents that parse but must fail validation, with the code each
/// must produce.
pub fn rejection_table() -> Vec<(&'static str, Value, DiagnosticCode)> {
    use DiagnosticCode::*;
    let sound = json!({"id": "a", "kind": "sound", "params": {"sound_id": "laugh"}});
    let particle = json!({"id": "a", "kind": "particle", "params": {
        "texture_id": "t", "emitter": {"x": 0.5, "y": 0.5}, "pattern": "jet", "speed": 0.2}});
    let danmaku = json!({"id": "a", "kind": "danmaku", "params": {
        "text": "hi", "font_size": 20, "color": "#FFFFFF", "direction": "left_to_right", "shift": 0.5}});
    let image = json!({"id": "a", "kind": "background_image", "params": {"image_id": "sky"}});
    vec![
        (
            "two roots",
            doc("r", vec![root("r", &["s"]), root("r2", &[]), seq("s", "face", &[])]),
            MultipleRoots,
        ),
        (
            "no root",
            doc("s", vec![seq("s", "face", &["a"]), swap("a")]),
            MissingRoot,
        ),
        (
            "declared root is a sequence",
            doc("s", vec![root("r", &["s"]), seq("s", "face", &[])]),
            MissingRoot,
        ),
        (
            "root to action",
            doc("r", vec![root("r", &["a"]), swap("a")]),
            IllegalEdge,
        ),
        (
            "root to root",
            doc("r", vec![root("r", &["r2"]), root("r2", &[])]),
            IllegalEdge,
        ),
        (
            "sequence to sequence",
            doc(
                "r",
                vec![root("r", &["s"]), seq("s", "face", &["t"]), seq("t", "text", &[])],
            ),
            IllegalEdge,
        ),
        (
            "action to sequence",
            doc(
                "r",
                vec![
                    root("r", &["s"]),
                    seq("s", "face", &["a"]),
                    json!({"id": "a", "kind": "swap", "params": {"template": "sad"}, "children": ["t"]}),
                    seq("t", "text", &[]),
                ],
            ),
            IllegalEdge,
        ),
        (
            "sequence to root",
            doc("r", vec![root("r", &["s"]), seq("s", "face", &["r"])]),
            IllegalEdge,
        ),
        (
            "sound under background",
            doc(
                "r",
                vec![root("r", &["s"]), seq("s", "background", &["a"]), sound.clone()],
            ),
            ComponentMismatch,
        ),
        (
            "sound under text",
            doc("r", vec![root("r", &["s"]), seq("s", "text", &["a"]), sound]),
            ComponentMismatch,
        ),
        (
            "swap under background",
            doc("r", vec![root("r", &["s"]), seq("s", "background", &["a"]), swap("a")]),
            ComponentMismatch,
        ),
        (
            "swap under text",
            doc("r", vec![root("r", &["s"]), seq("s", "text", &["a"]), swap("a")]),
            ComponentMismatch,
        ),
        (
            "particle under face",
            doc("r", vec![root("r", &["s"]), seq("s", "face", &["a"]), particle.clone()]),
            ComponentMismatch,
        ),
        (
            "particle under text",
            doc("r", vec![root("r", &["s"]), seq("s", "text", &["a"]), particle]),
            ComponentMismatch,
        ),
        (
            "danmaku under face",
            doc("r", vec![root("r", &["s"]), seq("s", "face", &["a"]), danmaku.clone()]),
            ComponentMismatch,
        ),
        (
            "danmaku under background",
            doc("r", vec![root("r", &["s"]), seq("s", "background", &["a"]), danmaku]),
            ComponentMismatch,
        ),
        (
            "background_image under face",
            doc("r", vec![root("r", &["s"]), seq("s", "face", &["a"]), image.clone()]),
            ComponentMismatch,
        ),
        (
            "background_image under text",
            doc("r", vec![root("r", &["s"]), seq("s", "text", &["a"]), image]),
            ComponentMismatch,
        ),
        (
            "shared child",
            doc(
                "r",
                vec![
                    root("r", &["s", "t"]),
                    seq("s", "face", &["a"]),
                    seq("t", "face", &["a"]),
                    swap("a"),
                ],
            ),
            MultipleParents,
        ),
        (
            "self loop",
            doc("r", vec![root("r", &["s"]), seq("s", "face", &["s"])]),
            Cycle,
        ),
        (
            "unreachable action",
            doc("r", vec![root("r", &[]), swap("a")]),
            UnreachableNode,
        ),
        (
            "duplicate id",
            doc(
                "r",
                vec![root("r", &["s"]), seq("s", "face", &[]), seq("s", "text", &[])],
            ),
            DuplicateNodeId,
        ),
        (
            "zero duration",
            doc(
                "r",
                vec![
                    root("r", &["s"]),
                    seq("s", "face", &["a"]),
                    json!({"id": "a", "kind": "swap", "params": {"template": "happy", "duration_ms": 0}}),
                ],
            ),
            InvalidParam,
        ),
        (
            "unknown sound",
            doc(
                "r",
                vec![
                    root("r", &["s"]),
                    seq("s", "face", &["a"]),
                    json!({"id": "a", "kind": "sound", "params": {"sound_id": "boing"}}),
                ],
            ),
            InvalidParam,
        ),
    ]
}

/// Vibration hangs off each component without complaint.
pub fn vibration_docs() -> Vec<Value> {
    ["face", "background", "text"]
        .iter()
        .map(|c| {
            doc("r", vec![
                root("r", &["s"]),
                seq("s", c, &["v"]),
                json!({"id": "v", "kind": "vibration", "params": {"frequency": "low", "amplitude": "high", "axis": "y"}}),
            ])
        })
        .collect()
}

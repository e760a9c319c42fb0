use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use super::{
    ActionParams, BackgroundImageParams, BehaviorTree, Component, DanmakuParams, NodeBody, ParticleParams, SoundParams,
    SwapParams, TreeNode, VibrationParams,
};

/// Document form of a behavior tree, as embedded in a corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeDoc {
    pub nodes: Vec<NodeDoc>,
    pub root: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeDoc {
    pub id: String,
    pub kind: String,
    #[serde(default)]
    pub params: Map<String, Value>,
    #[serde(default)]
    pub children: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("MALFORMED_NODE: node {node:?}: {reason}")]
    MalformedNode { node: String, reason: String },
    #[error("UNKNOWN_KIND: node {node:?} has kind {kind:?}")]
    UnknownKind { node: String, kind: String },
    #[error("UNKNOWN_PARAM: node {node:?} has unknown parameter {param:?}")]
    UnknownParam { node: String, param: String },
    #[error("DANGLING_EDGE: {from:?} refers to missing node {to:?}")]
    DanglingEdge { from: String, to: String },
}

impl TreeError {
    pub fn code(&self) -> &'static str {
        match self {
            TreeError::MalformedNode { .. } => "MALFORMED_NODE",
            TreeError::UnknownKind { .. } => "UNKNOWN_KIND",
            TreeError::UnknownParam { .. } => "UNKNOWN_PARAM",
            TreeError::DanglingEdge { .. } => "DANGLING_EDGE",
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SequenceParams {
    component: Component,
}

fn check_fields(node: &NodeDoc, allowed: &[&str]) -> Result<(), TreeError> {
    match node.params.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(param) => Err(TreeError::UnknownParam {
            node: node.id.clone(),
            param: param.clone(),
        }),
        None => Ok(()),
    }
}

fn params<T: DeserializeOwned>(node: &NodeDoc, allowed: &[&str]) -> Result<T, TreeError> {
    check_fields(node, allowed)?;
    serde_json::from_value(Value::Object(node.params.clone())).map_err(|e| TreeError::MalformedNode {
        node: node.id.clone(),
        reason: e.to_string(),
    })
}

fn parse_body(node: &NodeDoc) -> Result<NodeBody, TreeError> {
    let body = match node.kind.as_str() {
        "root+" => {
            check_fields(node, &[])?;
            NodeBody::RootPlus
        }
        "sequence+" => {
            let p: SequenceParams = params(node, &["component"])?;
            NodeBody::SequencePlus { component: p.component }
        }
        "danmaku" => NodeBody::Action(ActionParams::Danmaku(params(node, DanmakuParams::FIELDS)?)),
        "swap" => NodeBody::Action(ActionParams::Swap(params(node, SwapParams::FIELDS)?)),
        "particle" => NodeBody::Action(ActionParams::Particle(params(node, ParticleParams::FIELDS)?)),
        "vibration" => NodeBody::Action(ActionParams::Vibration(params(node, VibrationParams::FIELDS)?)),
        "sound" => NodeBody::Action(ActionParams::Sound(params(node, SoundParams::FIELDS)?)),
        "background_image" => NodeBody::Action(ActionParams::BackgroundImage(params(
            node,
            BackgroundImageParams::FIELDS,
        )?)),
        other => {
            return Err(TreeError::UnknownKind {
                node: node.id.clone(),
                kind: other.to_owned(),
            })
        }
    };
    Ok(body)
}

/// Builds a tree mirroring `doc` node for node. Grammar checks are left to
/// [`validate_tree`](super::validate_tree); only references to missing nodes
/// fail here.
pub fn parse_tree(doc: &TreeDoc) -> Result<BehaviorTree, TreeError> {
    let mut nodes = Vec::with_capacity(doc.nodes.len());
    for node in &doc.nodes {
        if node.id.is_empty() {
            return Err(TreeError::MalformedNode {
                node: node.id.clone(),
                reason: "empty node id".to_owned(),
            });
        }
        nodes.push(TreeNode {
            id: node.id.clone(),
            body: parse_body(node)?,
            children: node.children.clone(),
        });
    }

    let exists = |id: &str| nodes.iter().any(|n: &TreeNode| n.id == id);
    if !exists(&doc.root) {
        return Err(TreeError::DanglingEdge {
            from: "<root>".to_owned(),
            to: doc.root.clone(),
        });
    }
    for node in &nodes {
        if let Some(missing) = node.children.iter().find(|c| !exists(c)) {
            return Err(TreeError::DanglingEdge {
                from: node.id.clone(),
                to: missing.clone(),
            });
        }
    }

    Ok(BehaviorTree {
        root: doc.root.clone(),
        nodes,
    })
}

fn to_params<T: Serialize>(value: &T) -> Map<String, Value> {
    match serde_json::to_value(value) {
        Ok(Value::Object(map)) => map,
        // every params type is a plain struct
        _ => unreachable!("action params serialize to an object"),
    }
}

impl From<&BehaviorTree> for TreeDoc {
    fn from(tree: &BehaviorTree) -> Self {
        let nodes = tree
            .nodes
            .iter()
            .map(|n| {
                let params = match &n.body {
                    NodeBody::RootPlus => Map::new(),
                    NodeBody::SequencePlus { component } => {
                        let mut m = Map::new();
                        m.insert(
                            "component".to_owned(),
                            serde_json::to_value(component).expect("enum serializes"),
                        );
                        m
                    }
                    NodeBody::Action(ActionParams::Danmaku(p)) => to_params(p),
                    NodeBody::Action(ActionParams::Swap(p)) => to_params(p),
                    NodeBody::Action(ActionParams::Particle(p)) => to_params(p),
                    NodeBody::Action(ActionParams::Vibration(p)) => to_params(p),
                    NodeBody::Action(ActionParams::Sound(p)) => to_params(p),
                    NodeBody::Action(ActionParams::BackgroundImage(p)) => to_params(p),
                };
                NodeDoc {
                    id: n.id.clone(),
                    kind: n.body.kind_name().to_owned(),
                    params,
                    children: n.children.clone(),
                }
            })
            .collect();
        TreeDoc {
            nodes,
            root: tree.root.clone(),
        }
    }
}

impl BehaviorTree {
    pub fn to_doc(&self) -> TreeDoc {
        TreeDoc::from(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn doc(v: Value) -> TreeDoc {
        serde_json::from_value(v).unwrap()
    }

    #[test]
    fn minimal_program_parses_to_three_nodes() {
        let d = doc(json!({
            "root": "r",
            "nodes": [
                {"id": "r", "kind": "root+", "children": ["s"]},
                {"id": "s", "kind": "sequence+", "params": {"component": "text"}, "children": ["d"]},
                {"id": "d", "kind": "danmaku", "params": {
                    "text": "hello", "font_size": 24, "color": "#FF0000",
                    "direction": "right_to_left", "shift": 0.2
                }}
            ]
        }));
        let tree = parse_tree(&d).unwrap();
        assert_eq!(tree.nodes.len(), 3);
        assert_eq!(tree.node("s").unwrap().children, vec!["d".to_owned()]);
        match &tree.node("d").unwrap().body {
            NodeBody::Action(ActionParams::Danmaku(p)) => assert_eq!(p.text, "hello"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn error_classes() {
        let unknown_kind = doc(json!({"root": "r", "nodes": [
            {"id": "r", "kind": "root+", "children": ["x"]},
            {"id": "x", "kind": "selector"}
        ]}));
        assert_eq!(parse_tree(&unknown_kind).unwrap_err().code(), "UNKNOWN_KIND");

        let unknown_param = doc(json!({"root": "r", "nodes": [
            {"id": "r", "kind": "root+", "children": ["s"]},
            {"id": "s", "kind": "sequence+", "params": {"component": "face", "color": "#000000"}}
        ]}));
        assert_eq!(parse_tree(&unknown_param).unwrap_err().code(), "UNKNOWN_PARAM");

        let malformed = doc(json!({"root": "r", "nodes": [
            {"id": "r", "kind": "root+", "children": ["w"]},
            {"id": "w", "kind": "swap", "params": {"template": "bored"}}
        ]}));
        assert_eq!(parse_tree(&malformed).unwrap_err().code(), "MALFORMED_NODE");

        let dangling = doc(json!({"root": "r", "nodes": [
            {"id": "r", "kind": "root+", "children": ["ghost"]}
        ]}));
        assert_eq!(
            parse_tree(&dangling).unwrap_err(),
            TreeError::DanglingEdge {
                from: "r".into(),
                to: "ghost".into()
            }
        );

        let missing_root = doc(json!({"root": "nope", "nodes": []}));
        assert_eq!(parse_tree(&missing_root).unwrap_err().code(), "DANGLING_EDGE");
    }

    #[test]
    fn serialize_restores_document() {
        let v = json!({"root": "r", "nodes": [
            {"id": "r", "kind": "root+", "params": {}, "children": ["s"]},
            {"id": "s", "kind": "sequence+", "params": {"component": "background"}, "children": ["p", "b"]},
            {"id": "p", "kind": "particle", "params": {
                "texture_id": "heart", "emitter": {"x": 0.5, "y": 0.25},
                "pattern": "exploding", "speed": 0.3, "duration_ms": 1500
            }, "children": []},
            {"id": "b", "kind": "background_image", "params": {"image_id": "beach"}, "children": []}
        ]});
        let tree = parse_tree(&doc(v.clone())).unwrap();
        assert_eq!(serde_json::to_value(tree.to_doc()).unwrap(), v);
    }
}

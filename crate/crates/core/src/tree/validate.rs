use std::collections::{HashMap, HashSet};

use crate::diagnostics::{Diagnostic, DiagnosticCode, Diagnostics};

use super::{ActionParams, BehaviorTree, NodeBody, SOUND_REGISTRY};

/// Checks the `root+ -> sequence+ -> action` grammar, component/action
/// compatibility and per-action parameter ranges. Returns every finding;
/// an empty result means the tree can be compiled.
pub fn validate_tree(tree: &BehaviorTree) -> Diagnostics {
    let mut out = Vec::new();

    let mut index: HashMap<&str, usize> = HashMap::new();
    for (i, node) in tree.nodes.iter().enumerate() {
        if index.insert(node.id.as_str(), i).is_some() {
            out.push(Diagnostic::at_node(
                DiagnosticCode::DuplicateNodeId,
                &node.id,
                "node id used more than once",
            ));
        }
    }
    // first occurrence wins for lookups
    let lookup = |id: &str| tree.nodes.iter().position(|n| n.id == id);

    let roots: Vec<&str> = tree
        .nodes
        .iter()
        .filter(|n| matches!(n.body, NodeBody::RootPlus))
        .map(|n| n.id.as_str())
        .collect();
    match roots.len() {
        0 => out.push(Diagnostic::new(DiagnosticCode::MissingRoot, "tree has no root+ node")),
        1 => {}
        _ => {
            for extra in roots.iter().filter(|id| **id != tree.root) {
                out.push(Diagnostic::at_node(
                    DiagnosticCode::MultipleRoots,
                    *extra,
                    format!("{} root+ nodes; exactly one allowed", roots.len()),
                ));
            }
        }
    }
    let root_ok = lookup(&tree.root)
        .map(|i| matches!(tree.nodes[i].body, NodeBody::RootPlus))
        .unwrap_or(false);
    if !roots.is_empty() && !root_ok {
        out.push(Diagnostic::at_node(
            DiagnosticCode::MissingRoot,
            &tree.root,
            "declared root is not a root+ node",
        ));
    }

    let mut parent_count: HashMap<&str, usize> = HashMap::new();
    for node in &tree.nodes {
        for child_id in &node.children {
            *parent_count.entry(child_id.as_str()).or_default() += 1;
            let Some(ci) = lookup(child_id) else {
                out.push(Diagnostic::at_node(
                    DiagnosticCode::DanglingEdge,
                    &node.id,
                    format!("child {child_id:?} does not exist"),
                ));
                continue;
            };
            let child = &tree.nodes[ci];
            match (&node.body, &child.body) {
                (NodeBody::RootPlus, NodeBody::SequencePlus { .. }) => {}
                (NodeBody::SequencePlus { component }, NodeBody::Action(action)) => {
                    if !action.allowed_under(*component) {
                        out.push(Diagnostic::at_node(
                            DiagnosticCode::ComponentMismatch,
                            &child.id,
                            format!(
                                "{} action cannot be attached to a {:?} sequence",
                                action.kind_name(),
                                component
                            ),
                        ));
                    }
                }
                (parent, child_body) => out.push(Diagnostic::at_node(
                    DiagnosticCode::IllegalEdge,
                    &node.id,
                    format!(
                        "edge {} -> {} ({:?}) is not allowed",
                        parent.kind_name(),
                        child_body.kind_name(),
                        child.id
                    ),
                )),
            }
        }
    }
    for node in &tree.nodes {
        if parent_count.get(node.id.as_str()).copied().unwrap_or(0) > 1 {
            out.push(Diagnostic::at_node(
                DiagnosticCode::MultipleParents,
                &node.id,
                "node is the child of more than one edge",
            ));
        }
    }

    if let Some(root) = lookup(&tree.root) {
        let (reached, cyclic) = walk(tree, root, &lookup);
        for id in cyclic {
            out.push(Diagnostic::at_node(
                DiagnosticCode::Cycle,
                id,
                "node is part of a cycle",
            ));
        }
        for (i, node) in tree.nodes.iter().enumerate() {
            if !reached[i] && !matches!(node.body, NodeBody::RootPlus) {
                out.push(Diagnostic::at_node(
                    DiagnosticCode::UnreachableNode,
                    &node.id,
                    "node is not reachable from the root",
                ));
            }
        }
    }

    for node in &tree.nodes {
        if let NodeBody::Action(action) = &node.body {
            for problem in param_problems(action) {
                out.push(Diagnostic::at_node(DiagnosticCode::InvalidParam, &node.id, problem));
            }
        }
    }

    out
}

/// Depth-first walk from the root. Returns the reached mask and the ids that
/// close a back edge.
fn walk<'t>(tree: &'t BehaviorTree, root: usize, lookup: &dyn Fn(&str) -> Option<usize>) -> (Vec<bool>, Vec<&'t str>) {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Open,
        Done,
    }
    let mut marks = vec![Mark::New; tree.nodes.len()];
    let mut cyclic: HashSet<&str> = HashSet::new();
    // (node, next child position)
    let mut stack = vec![(root, 0usize)];
    marks[root] = Mark::Open;
    while let Some(top) = stack.last_mut() {
        let (node, next) = *top;
        let children = &tree.nodes[node].children;
        if next == children.len() {
            marks[node] = Mark::Done;
            stack.pop();
            continue;
        }
        top.1 += 1;
        let child_id = &children[next];
        let Some(ci) = lookup(child_id) else { continue };
        match marks[ci] {
            Mark::New => {
                marks[ci] = Mark::Open;
                stack.push((ci, 0));
            }
            Mark::Open => {
                cyclic.insert(tree.nodes[ci].id.as_str());
            }
            Mark::Done => {}
        }
    }
    let mut cyclic: Vec<&str> = cyclic.into_iter().collect();
    cyclic.sort_unstable();
    (marks.into_iter().map(|m| m != Mark::New).collect(), cyclic)
}

fn param_problems(action: &ActionParams) -> Vec<String> {
    let mut problems = Vec::new();
    let mut duration = |d: Option<u64>| {
        if d == Some(0) {
            problems.push("duration_ms must be positive".to_owned());
        }
    };
    match action {
        ActionParams::Danmaku(p) => {
            duration(p.duration_ms);
            if !(p.shift.is_finite() && (0.0..=1.0).contains(&p.shift)) {
                problems.push(format!("shift {} outside [0, 1]", p.shift));
            }
            if !(p.font_size.is_finite() && p.font_size > 0.0) {
                problems.push(format!("font_size {} must be positive", p.font_size));
            }
        }
        ActionParams::Swap(p) => duration(p.duration_ms),
        ActionParams::Particle(p) => {
            duration(p.duration_ms);
            if !(p.speed.is_finite() && p.speed > 0.0) {
                problems.push(format!("speed {} must be positive", p.speed));
            }
            if !p.emitter.in_unit_square() {
                problems.push(format!(
                    "emitter ({}, {}) outside the unit square",
                    p.emitter.x, p.emitter.y
                ));
            }
            if p.texture_id.is_empty() {
                problems.push("texture_id is empty".to_owned());
            }
        }
        ActionParams::Vibration(p) => duration(p.duration_ms),
        ActionParams::Sound(p) => {
            duration(p.duration_ms);
            if !SOUND_REGISTRY.contains(&p.sound_id.as_str()) {
                problems.push(format!("unknown sound_id {:?}", p.sound_id));
            }
        }
        ActionParams::BackgroundImage(p) => {
            if p.image_id.is_empty() {
                problems.push("image_id is empty".to_owned());
            }
        }
    }
    problems
}

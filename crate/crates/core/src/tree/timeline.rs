use thiserror::Error;

use crate::diagnostics::Diagnostics;

use super::{validate_tree, ActionParams, BehaviorTree, Component, NodeBody};

/// One scheduled action. Times are relative to the trigger.
#[derive(Debug, Clone, PartialEq)]
pub struct TimelineEntry {
    pub node_id: String,
    pub component: Component,
    pub action: ActionParams,
    pub start_ms: u64,
    pub end_ms: u64,
}

impl TimelineEntry {
    /// Whether the entry is running at `t_ms`.
    pub fn is_live(&self, t_ms: f64) -> bool {
        self.start_ms as f64 <= t_ms && t_ms < self.end_ms as f64
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ActionTimeline {
    pub entries: Vec<TimelineEntry>,
    pub total_ms: u64,
}

impl ActionTimeline {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries_for(&self, component: Component) -> impl Iterator<Item = &TimelineEntry> {
        self.entries.iter().filter(move |e| e.component == component)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TimelineError {
    #[error("INVALID_TREE: {} diagnostic(s), first: {}", .0.len(), .0.first().map(|d| d.to_string()).unwrap_or_default())]
    InvalidTree(Diagnostics),
}

/// Schedules every action of a valid tree.
///
/// Actions under one `sequence+` run back to back in child order starting at
/// zero; separate `sequence+` nodes run in parallel, all starting at zero.
pub fn compile_timeline(tree: &BehaviorTree) -> Result<ActionTimeline, TimelineError> {
    let diags = validate_tree(tree);
    if !diags.is_empty() {
        return Err(TimelineError::InvalidTree(diags));
    }

    let mut timeline = ActionTimeline::default();
    for (seq, component) in tree.sequences() {
        let mut cursor = 0u64;
        for child in seq.children.iter().filter_map(|id| tree.node(id)) {
            let NodeBody::Action(action) = &child.body else {
                continue;
            };
            let end = cursor + action.duration_ms();
            timeline.entries.push(TimelineEntry {
                node_id: child.id.clone(),
                component,
                action: action.clone(),
                start_ms: cursor,
                end_ms: end,
            });
            cursor = end;
        }
        timeline.total_ms = timeline.total_ms.max(cursor);
    }
    Ok(timeline)
}

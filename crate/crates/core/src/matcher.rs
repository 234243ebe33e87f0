//! Execution-mode matching: unify a new command with stored templates,
//! extract variable values, and rank templates for clarification when the
//! command does not select exactly one task.

use std::cmp::Ordering;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::model::{Command, CommandTemplate, Task, TaskId, TemplateItem, Token, VariableName};
use crate::par::{self, Execution};
use crate::text::MatchOptions;

/// The value captured by one template variable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarValue {
    pub var: VariableName,
    pub value: Vec<Token>,
}

impl VarValue {
    pub fn new(var: VariableName, value: Vec<Token>) -> Self {
        VarValue { var, value }
    }

    pub fn text(&self) -> String {
        crate::text::detokenize(&self.value).unwrap_or_default()
    }
}

/// Values for every variable of a template, in template order.
pub type Assignment = Vec<VarValue>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchResult {
    pub task_id: TaskId,
    pub assignments: Assignment,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClarificationKind {
    NoMatch,
    AmbiguousTemplates,
    AmbiguousSegmentation,
}

impl ClarificationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ClarificationKind::NoMatch => "no_match",
            ClarificationKind::AmbiguousTemplates => "ambiguous_templates",
            ClarificationKind::AmbiguousSegmentation => "ambiguous_segmentation",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Suggestion {
    pub task_id: TaskId,
    pub template: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClarificationResponse {
    pub kind: ClarificationKind,
    pub suggestions: Vec<Suggestion>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MatchOutcome {
    Matched(MatchResult),
    Clarify(ClarificationResponse),
}

pub fn unify(template: &CommandTemplate, command: &Command) -> Vec<Assignment> {
    unify_with(template, command, MatchOptions::EXACT)
}

/// All assignments of non-empty token runs to the template's variables that
/// make the template equal to the command, ordered lexicographically by
/// capture lengths (shortest first).
pub fn unify_with(template: &CommandTemplate, command: &Command, opts: MatchOptions) -> Vec<Assignment> {
    let items = template.items();
    let words = command.tokens();
    // suffix_min[k]: fewest tokens items[k..] can consume
    let mut suffix_min = vec![0usize; items.len() + 1];
    for k in (0..items.len()).rev() {
        suffix_min[k] = suffix_min[k + 1] + 1;
    }
    if suffix_min[0] > words.len() {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(template.variable_count());
    unify_from(items, words, 0, 0, &suffix_min, opts, &mut current, &mut out);
    out
}

#[allow(clippy::too_many_arguments)]
fn unify_from(
    items: &[TemplateItem],
    words: &[Token],
    item: usize,
    pos: usize,
    suffix_min: &[usize],
    opts: MatchOptions,
    current: &mut Vec<VarValue>,
    out: &mut Vec<Assignment>,
) {
    if item == items.len() {
        if pos == words.len() {
            out.push(current.clone());
        }
        return;
    }
    if words.len() - pos < suffix_min[item] {
        return;
    }
    match &items[item] {
        TemplateItem::Const(t) => {
            if opts.eq(t.as_str(), words[pos].as_str()) {
                unify_from(items, words, item + 1, pos + 1, suffix_min, opts, current, out);
            }
        }
        TemplateItem::Var { var } => {
            let max_len = words.len() - pos - suffix_min[item + 1];
            for len in 1..=max_len {
                current.push(VarValue::new(*var, words[pos..pos + len].to_vec()));
                unify_from(items, words, item + 1, pos + len, suffix_min, opts, current, out);
                current.pop();
            }
        }
    }
}

pub fn match_command(command: &Command, tasks: &[Task]) -> MatchOutcome {
    match_command_with(command, tasks, MatchOptions::EXACT, Execution::default())
}

/// Selects the single task whose template unifies with `command`, or
/// explains why none could be selected.
pub fn match_command_with(command: &Command, tasks: &[Task], opts: MatchOptions, exec: Execution) -> MatchOutcome {
    let unified: Vec<(usize, Vec<Assignment>)> =
        par::map(exec, tasks, |task| unify_with(&task.template, command, opts))
            .into_iter()
            .enumerate()
            .filter(|(_, a)| !a.is_empty())
            .collect();

    match unified.as_slice() {
        [] => MatchOutcome::Clarify(ClarificationResponse {
            kind: ClarificationKind::NoMatch,
            suggestions: similarity_rank_with(command, tasks.iter(), opts),
        }),
        [(idx, assignments)] if assignments.len() == 1 => MatchOutcome::Matched(MatchResult {
            task_id: tasks[*idx].id,
            assignments: assignments[0].clone(),
        }),
        [(idx, _)] => MatchOutcome::Clarify(ClarificationResponse {
            kind: ClarificationKind::AmbiguousSegmentation,
            suggestions: overlap_rank_with(command, std::iter::once(&tasks[*idx]), opts),
        }),
        many => MatchOutcome::Clarify(ClarificationResponse {
            kind: ClarificationKind::AmbiguousTemplates,
            suggestions: overlap_rank_with(command, many.iter().map(|(i, _)| &tasks[*i]), opts),
        }),
    }
}

/// Token-level edit distance between a template and a command. A variable
/// absorbs one or more command tokens at no cost, or is deleted at cost 1;
/// constants are substituted, inserted or deleted at cost 1.
pub fn template_distance(template: &CommandTemplate, command: &Command, opts: MatchOptions) -> usize {
    let items = template.items();
    let words = command.tokens();
    let cols = words.len() + 1;
    let mut prev: Vec<usize> = (0..cols).collect();
    let mut row = vec![0usize; cols];
    for item in items {
        row[0] = prev[0] + 1;
        for j in 1..cols {
            let delete = prev[j] + 1;
            let insert = row[j - 1] + 1;
            row[j] = match item {
                TemplateItem::Const(t) => {
                    let sub = prev[j - 1] + usize::from(!opts.eq(t.as_str(), words[j - 1].as_str()));
                    delete.min(insert).min(sub)
                }
                TemplateItem::Var { .. } => {
                    // absorb token j: start the capture, or extend it
                    delete.min(prev[j - 1]).min(row[j - 1])
                }
            };
        }
        std::mem::swap(&mut prev, &mut row);
    }
    prev[words.len()]
}

/// Distance normalized by the longer of the two lengths.
pub fn similarity_score(template: &CommandTemplate, command: &Command, opts: MatchOptions) -> f64 {
    let longer = template.len().max(command.len()).max(1);
    template_distance(template, command, opts) as f64 / longer as f64
}

/// Size of the multiset intersection of the template's constants and the
/// command's tokens.
pub fn overlap_score(template: &CommandTemplate, command: &Command, opts: MatchOptions) -> usize {
    let mut available: HashMap<_, usize> = HashMap::new();
    for t in command.tokens() {
        *available.entry(opts.key(t.as_str())).or_default() += 1;
    }
    let mut shared = 0;
    for c in template.constants() {
        if let Some(n) = available.get_mut(&opts.key(c.as_str())) {
            if *n > 0 {
                *n -= 1;
                shared += 1;
            }
        }
    }
    shared
}

fn by_age(a: &Task, b: &Task) -> Ordering {
    a.created_at.cmp(&b.created_at).then(a.id.cmp(&b.id))
}

fn suggestion(task: &Task, score: f64) -> Suggestion {
    Suggestion {
        task_id: task.id,
        template: task.template.render(),
        score,
    }
}

pub fn similarity_rank<'a>(command: &Command, tasks: impl IntoIterator<Item = &'a Task>) -> Vec<Suggestion> {
    similarity_rank_with(command, tasks, MatchOptions::EXACT)
}

/// Most similar first; ties go to the older task.
pub fn similarity_rank_with<'a>(
    command: &Command,
    tasks: impl IntoIterator<Item = &'a Task>,
    opts: MatchOptions,
) -> Vec<Suggestion> {
    let mut scored: Vec<(&Task, f64)> = tasks
        .into_iter()
        .map(|t| (t, similarity_score(&t.template, command, opts)))
        .collect();
    scored.sort_by(|(ta, a), (tb, b)| a.total_cmp(b).then_with(|| by_age(ta, tb)));
    scored.into_iter().map(|(t, s)| suggestion(t, s)).collect()
}

pub fn overlap_rank<'a>(command: &Command, tasks: impl IntoIterator<Item = &'a Task>) -> Vec<Suggestion> {
    overlap_rank_with(command, tasks, MatchOptions::EXACT)
}

/// Most shared filler first; ties go to fewer variables, then the older task.
pub fn overlap_rank_with<'a>(
    command: &Command,
    tasks: impl IntoIterator<Item = &'a Task>,
    opts: MatchOptions,
) -> Vec<Suggestion> {
    let mut scored: Vec<(&Task, usize)> = tasks
        .into_iter()
        .map(|t| (t, overlap_score(&t.template, command, opts)))
        .collect();
    scored.sort_by(|(ta, a), (tb, b)| {
        b.cmp(a)
            .then(ta.template.variable_count().cmp(&tb.template.variable_count()))
            .then_with(|| by_age(ta, tb))
    });
    scored.into_iter().map(|(t, s)| suggestion(t, s as f64)).collect()
}

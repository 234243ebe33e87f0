//! One-shot task learning from a command and a demonstration script.
//!
//! The learner looks for script parameter values that also occur verbatim
//! in the command. Longer matches are preferred; each match tries to
//! reserve its span of the command, and a span may only be shared by
//! actions that claim exactly the same boundaries. Reserved spans become
//! template variables `X_m`, named after their left boundary `m`.

use std::time::{SystemTime, UNIX_EPOCH};

use thiserror::Error;

use crate::error::ModelError;
use crate::model::{
    Command, CommandTemplate, Program, Task, TaskId, TemplateItem, UiScript, VariableBinding, VariableName,
};
use crate::text::{tokenize, MatchOptions};

/// A script parameter value found in the command. Positions are 1-based
/// and inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatchCandidate {
    pub len: usize,
    pub action: usize,
    pub start: usize,
    pub end: usize,
}

impl MatchCandidate {
    pub fn new(action: usize, start: usize, end: usize) -> Self {
        debug_assert!(1 <= start && start <= end);
        MatchCandidate {
            len: end - start + 1,
            action,
            start,
            end,
        }
    }
}

/// A successful claim of command span `start..=end` by `action`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Reservation {
    pub start: usize,
    pub end: usize,
    pub action: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LearnError {
    #[error("variables {left} and {right} are adjacent; separate the values with some filler words")]
    AdjacentVariables { left: String, right: String },
    #[error("value {value:?} of action {action} appears {occurrences} times in the command; each value may appear only once")]
    DuplicateValue {
        action: usize,
        value: String,
        occurrences: usize,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl LearnError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            LearnError::AdjacentVariables { .. } => "adjacent_variables",
            LearnError::DuplicateValue { .. } => "duplicate_value",
            LearnError::Model(_) => "empty_input",
        }
    }
}

pub fn find_candidates(command: &Command, script: &UiScript) -> Vec<MatchCandidate> {
    find_candidates_with(command, script, MatchOptions::EXACT)
}

/// Every (action, span) pair where the action's parameter equals the span's
/// tokens, longest first, then by action index, then by left boundary.
pub fn find_candidates_with(command: &Command, script: &UiScript, opts: MatchOptions) -> Vec<MatchCandidate> {
    let words = command.tokens();
    let mut out = Vec::new();
    for (i, action) in script.actions().iter().enumerate() {
        let Some(value) = action.parameter.as_deref() else {
            continue;
        };
        let Ok(needle) = tokenize(value) else { continue };
        if needle.len() > words.len() {
            continue;
        }
        for (offset, window) in words.windows(needle.len()).enumerate() {
            if opts.seq_eq(window, &needle) {
                out.push(MatchCandidate::new(i + 1, offset + 1, offset + needle.len()));
            }
        }
    }
    out.sort_by(|a, b| {
        b.len
            .cmp(&a.len)
            .then(a.action.cmp(&b.action))
            .then(a.start.cmp(&b.start))
    });
    out
}

/// Runs the reservation array over `candidates` (in the given order) for a
/// command of `command_len` tokens. Returns the successful reservations
/// sorted by left boundary; equal boundaries keep reservation order.
pub fn reserve(candidates: &[MatchCandidate], command_len: usize) -> Vec<Reservation> {
    // slots 0 and command_len + 1 stay zero so edge reads are well defined
    let mut owner = vec![0usize; command_len + 2];
    let mut reserved = Vec::new();
    for c in candidates {
        if c.start == 0 || c.end > command_len || c.start > c.end {
            continue;
        }
        let span = &owner[c.start..=c.end];
        let first = span[0];
        let uniform = span.iter().all(|&r| r == first);
        let free = uniform && first == 0;
        let exact_share = uniform && first != 0 && owner[c.start - 1] != first && owner[c.end + 1] != first;
        if free || exact_share {
            owner[c.start..=c.end].fill(c.action);
            reserved.push(Reservation {
                start: c.start,
                end: c.end,
                action: c.action,
            });
        }
    }
    reserved.sort_by_key(|r| r.start);
    reserved
}

pub fn learn(command: &Command, script: &UiScript) -> Result<Task, LearnError> {
    learn_with(command, script, MatchOptions::EXACT)
}

/// Infers a task (template, program, binding) from one command and one
/// demonstration. The task is not persisted and carries [`TaskId::UNSAVED`].
pub fn learn_with(command: &Command, script: &UiScript, opts: MatchOptions) -> Result<Task, LearnError> {
    let candidates = find_candidates_with(command, script, opts);
    check_unique_values(&candidates, script)?;
    let reservations = reserve(&candidates, command.len());

    let var_at = |start: usize| VariableName::new(start as u32).expect("spans start at 1");

    let mut items = Vec::with_capacity(command.len());
    let mut pos = 1;
    let mut next = reservations.iter().peekable();
    while pos <= command.len() {
        // reservations sharing a span collapse into one variable
        while next.peek().is_some_and(|r| r.start < pos) {
            next.next();
        }
        match next.peek() {
            Some(r) if r.start == pos => {
                items.push(TemplateItem::Var { var: var_at(r.start) });
                pos = r.end + 1;
            }
            _ => {
                items.push(TemplateItem::Const(command.tokens()[pos - 1].clone()));
                pos += 1;
            }
        }
    }
    let template = CommandTemplate::new(items).map_err(|e| match e {
        ModelError::AdjacentVariables { left, right } => LearnError::AdjacentVariables { left, right },
        other => LearnError::Model(other),
    })?;

    let mut program = Program::literal(script);
    for r in &reservations {
        program.set_variable(r.action, var_at(r.start));
    }
    let binding = VariableBinding::from_pairs(reservations.iter().map(|r| (var_at(r.start), r.action)));

    let task = Task {
        id: TaskId::UNSAVED,
        template,
        program,
        binding,
        created_at: unix_now(),
    };
    debug_assert!(task.validate().is_ok());
    Ok(task)
}

fn check_unique_values(candidates: &[MatchCandidate], script: &UiScript) -> Result<(), LearnError> {
    let mut counts = vec![0usize; script.len() + 1];
    for c in candidates {
        counts[c.action] += 1;
    }
    match counts.iter().position(|&n| n > 1) {
        Some(action) => Err(LearnError::DuplicateValue {
            action,
            value: script
                .action(action)
                .and_then(|a| a.parameter.clone())
                .unwrap_or_default(),
            occurrences: counts[action],
        }),
        None => Ok(()),
    }
}

pub(crate) fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::{Action, ParamValue};

    fn cmd(s: &str) -> Command {
        Command::parse(s).unwrap()
    }

    fn x(i: u32) -> VariableName {
        VariableName::new(i).unwrap()
    }

    fn shipping_script() -> UiScript {
        UiScript::new(vec![
            Action::textbox_fill("textbox_1", "10 Main St"),
            Action::textbox_fill("textbox_2", "10 Main St"),
        ])
        .unwrap()
    }

    #[test]
    fn flight_candidates() {
        let c = find_candidates(&cmd(fixtures::FLIGHT_COMMAND), &fixtures::flight_script());
        assert_eq!(c, vec![MatchCandidate::new(3, 3, 3), MatchCandidate::new(4, 5, 5)]);
        assert_eq!(c[0].len, 1);
    }

    #[test]
    fn no_parameters_no_candidates() {
        let s = UiScript::new(vec![Action::click_button("button_1")]).unwrap();
        assert!(find_candidates(&cmd("hello"), &s).is_empty());
    }

    #[test]
    fn shared_value_candidates() {
        let c = find_candidates(&cmd("ship to 10 Main St please"), &shipping_script());
        assert_eq!(c, vec![MatchCandidate::new(1, 3, 5), MatchCandidate::new(2, 3, 5)]);
        assert_eq!(c[0].len, 3);
    }

    #[test]
    fn candidate_sort_order() {
        let s = UiScript::new(vec![
            Action::textbox_fill("t1", "c"),
            Action::textbox_fill("t2", "a b"),
            Action::textbox_fill("t3", "a"),
        ])
        .unwrap();
        let c = find_candidates(&cmd("a b c"), &s);
        assert_eq!(
            c,
            vec![
                MatchCandidate::new(2, 1, 2),
                MatchCandidate::new(1, 3, 3),
                MatchCandidate::new(3, 1, 1)
            ]
        );
    }

    #[test]
    fn reserve_disjoint() {
        let c = [MatchCandidate::new(3, 3, 3), MatchCandidate::new(4, 5, 5)];
        assert_eq!(
            reserve(&c, 7),
            vec![
                Reservation {
                    start: 3,
                    end: 3,
                    action: 3
                },
                Reservation {
                    start: 5,
                    end: 5,
                    action: 4
                }
            ]
        );
    }

    #[test]
    fn reserve_exact_share() {
        let c = [MatchCandidate::new(1, 3, 5), MatchCandidate::new(2, 3, 5)];
        assert_eq!(reserve(&c, 6).len(), 2);
    }

    #[test]
    fn reserve_rejects_nested_and_overlapping() {
        let nested = [MatchCandidate::new(1, 2, 3), MatchCandidate::new(2, 3, 3)];
        assert_eq!(
            reserve(&nested, 4),
            vec![Reservation {
                start: 2,
                end: 3,
                action: 1
            }]
        );
        let overlap = [MatchCandidate::new(1, 2, 3), MatchCandidate::new(2, 3, 4)];
        assert_eq!(
            reserve(&overlap, 4),
            vec![Reservation {
                start: 2,
                end: 3,
                action: 1
            }]
        );
    }

    #[test]
    fn reserve_at_edges() {
        let c = [
            MatchCandidate::new(1, 1, 1),
            MatchCandidate::new(2, 1, 1),
            MatchCandidate::new(3, 2, 2),
        ];
        assert_eq!(reserve(&c, 2).len(), 3);
    }

    #[test]
    fn learn_flight_example() {
        let task = learn(&cmd(fixtures::FLIGHT_COMMAND), &fixtures::flight_script()).unwrap();
        assert_eq!(task.template.render(), "When does ___ flight ___ land ?");
        assert_eq!(task.template.to_string(), "When does X_3 flight X_5 land ?");
        assert_eq!(task.binding.pairs().collect::<Vec<_>>(), vec![(x(3), 3), (x(5), 4)]);
        let params: Vec<_> = task.program.actions().iter().map(|a| a.parameter.clone()).collect();
        assert_eq!(params[2], Some(ParamValue::Var { var: x(3) }));
        assert_eq!(params[3], Some(ParamValue::Var { var: x(5) }));
        assert_eq!(params[0], Some(ParamValue::Literal("flightarrivals.com".into())));
        assert_eq!(task.id, TaskId::UNSAVED);
        task.validate().unwrap();
    }

    #[test]
    fn learn_macro() {
        let s = UiScript::new(vec![Action::click_button("button_1")]).unwrap();
        let task = learn(&cmd("hello"), &s).unwrap();
        assert_eq!(task.template.render(), "hello");
        assert_eq!(task.program, Program::literal(&s));
        assert!(task.binding.is_empty());
    }

    #[test]
    fn learn_one_to_many() {
        let task = learn(&cmd("ship to 10 Main St please"), &shipping_script()).unwrap();
        assert_eq!(task.template.to_string(), "ship to X_3 please");
        assert_eq!(task.binding.pairs().collect::<Vec<_>>(), vec![(x(3), 1), (x(3), 2)]);
    }

    #[test]
    fn adjacent_values_are_rejected() {
        let s = UiScript::new(vec![
            Action::select_from("menu_1", "Ford Taurus"),
            Action::select_from("menu_2", "Tuesday"),
        ])
        .unwrap();
        let err = learn(&cmd("I need a Ford Taurus Tuesday"), &s).unwrap_err();
        assert_eq!(err.code(), "adjacent_variables");
    }

    #[test]
    fn repeated_values_are_rejected() {
        let s = UiScript::new(vec![Action::textbox_fill("textbox_1", "2")]).unwrap();
        let err = learn(&cmd("Find a hotel for 2 nights for 2 people"), &s).unwrap_err();
        assert_eq!(
            err,
            LearnError::DuplicateValue {
                action: 1,
                value: "2".into(),
                occurrences: 2
            }
        );
        assert_eq!(err.code(), "duplicate_value");

        // a value equal to a filler word elsewhere is also a repeat
        let s = UiScript::new(vec![Action::textbox_fill("textbox_1", "find")]).unwrap();
        let err = learn(&cmd("Find a synonym for the word find"), &s);
        assert!(err.is_ok(), "case-sensitive by default: 'Find' differs from 'find'");
        let err = learn_with(
            &cmd("Find a synonym for the word find"),
            &s,
            MatchOptions::ignoring_case(),
        );
        assert_eq!(err.unwrap_err().code(), "duplicate_value");
    }

    #[test]
    fn nested_value_stays_literal() {
        let s = UiScript::new(vec![
            Action::textbox_fill("textbox_1", "New York"),
            Action::textbox_fill("textbox_2", "York"),
        ])
        .unwrap();
        let task = learn(&cmd("fly to New York today"), &s).unwrap();
        assert_eq!(task.template.to_string(), "fly to X_3 today");
        assert_eq!(
            task.program.actions()[1].parameter,
            Some(ParamValue::Literal("York".into()))
        );
    }

    #[test]
    fn learning_is_deterministic() {
        let a = learn(&cmd(fixtures::FLIGHT_COMMAND), &fixtures::flight_script()).unwrap();
        let b = learn(&cmd(fixtures::FLIGHT_COMMAND), &fixtures::flight_script()).unwrap();
        assert_eq!(a, b);
    }
}

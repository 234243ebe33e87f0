//! Substitutes matched values into a task's program.

use thiserror::Error;

use crate::matcher::VarValue;
use crate::model::{Action, ParamValue, Task, UiScript};
use crate::text::detokenize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExecError {
    #[error("assignments do not match the task's variables: expected [{expected}], got [{got}]")]
    BindingMismatch { expected: String, got: String },
    #[error("empty value for {0}")]
    EmptyValue(String),
    #[error("corrupt task: {0}")]
    CorruptTask(String),
}

fn names<I: IntoIterator<Item = String>>(it: I) -> String {
    it.into_iter().collect::<Vec<_>>().join(", ")
}

/// Builds the concrete script for `task` given one value per variable, in
/// binding order.
pub fn instantiate(task: &Task, assignments: &[VarValue]) -> Result<UiScript, ExecError> {
    let expected: Vec<_> = task.binding.variables().collect();
    let got: Vec<_> = assignments.iter().map(|a| a.var).collect();
    if expected != got {
        return Err(ExecError::BindingMismatch {
            expected: names(expected.iter().map(ToString::to_string)),
            got: names(got.iter().map(ToString::to_string)),
        });
    }

    let mut params: Vec<Option<String>> = vec![None; task.program.len()];
    for (entry, value) in task.binding.entries().iter().zip(assignments) {
        let text = detokenize(&value.value).map_err(|_| ExecError::EmptyValue(value.var.to_string()))?;
        for &i in &entry.actions {
            let target = task
                .program
                .action(i)
                .ok_or_else(|| ExecError::CorruptTask(format!("binding targets missing action {i}")))?;
            if target.parameter.as_ref().and_then(ParamValue::var) != Some(entry.var) {
                return Err(ExecError::CorruptTask(format!(
                    "action {i} does not carry {}",
                    entry.var
                )));
            }
            params[i - 1] = Some(text.clone());
        }
    }

    let mut actions = Vec::with_capacity(task.program.len());
    for (idx, (action, bound)) in task.program.actions().iter().zip(params).enumerate() {
        let parameter = match (&action.parameter, bound) {
            (Some(ParamValue::Var { var }), None) => {
                return Err(ExecError::CorruptTask(format!(
                    "action {} uses {var}, which the binding does not cover",
                    idx + 1
                )));
            }
            (_, Some(text)) => Some(text),
            (Some(ParamValue::Literal(s)), None) => Some(s.clone()),
            (None, None) => None,
        };
        actions.push(Action {
            action_type: action.action_type,
            element: action.element.clone(),
            parameter,
        });
    }
    UiScript::new(actions).map_err(|e| ExecError::CorruptTask(e.to_string()))
}

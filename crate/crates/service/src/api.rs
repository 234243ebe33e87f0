//! Request and response bodies, and the transport-independent handlers
//! behind each endpoint. The CLI prints these same bodies with `--json`.

use serde::{Deserialize, Serialize};

use helpa_core::matcher::{ClarificationResponse, MatchOutcome};
use helpa_core::model::VariableName;
use helpa_core::store::StoreError;
use helpa_core::{
    instantiate, learn_with, match_command_with, Command, ExecError, Execution, LearnError, MatchOptions, Task, TaskId,
    UiScript,
};

/// Every error code the API can return.
pub const ERROR_CODES: &[&str] = &[
    "adjacent_variables",
    "duplicate_value",
    "empty_input",
    "invalid_request",
    "unknown_proposal",
    "duplicate_template",
    "not_found",
    "no_env",
    "store_locked",
    "store_error",
    "internal_error",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    BadRequest,
    Unprocessable,
    NotFound,
    Conflict,
    Unavailable,
    Internal,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiError {
    pub kind: ErrorKind,
    pub code: &'static str,
    pub message: String,
}

impl ApiError {
    pub fn new(kind: ErrorKind, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            kind,
            code,
            message: message.into(),
        }
    }

    pub fn invalid_request(message: impl Into<String>) -> Self {
        ApiError::new(ErrorKind::BadRequest, "invalid_request", message)
    }

    pub fn unknown_proposal(id: u64) -> Self {
        ApiError::new(
            ErrorKind::NotFound,
            "unknown_proposal",
            format!("no pending proposal {id}"),
        )
    }

    pub fn no_env() -> Self {
        ApiError::new(ErrorKind::NotFound, "no_env", "no environment is loaded")
    }

    pub fn body(&self) -> ErrorBody {
        ErrorBody {
            error: ErrorDetail {
                code: self.code.to_owned(),
                message: self.message.clone(),
            },
        }
    }
}

impl std::fmt::Display for ApiError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

impl std::error::Error for ApiError {}

impl From<LearnError> for ApiError {
    fn from(e: LearnError) -> Self {
        ApiError::new(ErrorKind::Unprocessable, e.code(), e.to_string())
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        let (kind, code) = match &e {
            StoreError::DuplicateTemplate(_) => (ErrorKind::Conflict, "duplicate_template"),
            StoreError::NotFound(_) => (ErrorKind::NotFound, "not_found"),
            StoreError::Locked(_) => (ErrorKind::Unavailable, "store_locked"),
            StoreError::InvalidTask(_) => (ErrorKind::Unprocessable, "invalid_request"),
            StoreError::Io { .. } | StoreError::Corrupt { .. } => (ErrorKind::Internal, "store_error"),
        };
        ApiError::new(kind, code, e.to_string())
    }
}

impl From<ExecError> for ApiError {
    fn from(e: ExecError) -> Self {
        ApiError::new(ErrorKind::Internal, "internal_error", e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorDetail {
    pub code: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: ErrorDetail,
}

#[derive(Debug, Clone, Deserialize)]
pub struct LearnRequest {
    pub command: String,
    pub script: serde_json::Value,
}

/// A template variable with the example value it captured and the program
/// actions it feeds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableView {
    pub var: VariableName,
    pub value: String,
    pub actions: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LearnResponse {
    pub proposal_id: u64,
    pub template: String,
    pub variables: Vec<VariableView>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct ApproveRequest {
    pub proposal_id: u64,
    #[serde(default = "yes")]
    pub approve: bool,
    #[serde(default)]
    pub force: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApproveResponse {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub task_id: Option<TaskId>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct ExecuteRequest {
    pub command: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssignmentView {
    pub var: VariableName,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExecuteResponse {
    Script {
        script: UiScript,
        task_id: TaskId,
        assignments: Vec<AssignmentView>,
    },
    Clarification {
        clarification: ClarificationResponse,
    },
}

#[derive(Debug, Clone, Deserialize)]
pub struct PlayRequest {
    pub script: UiScript,
}

/// A stored task with its template also rendered for display.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskView {
    pub rendered: String,
    #[serde(flatten)]
    pub task: Task,
}

impl From<&Task> for TaskView {
    fn from(task: &Task) -> Self {
        TaskView {
            rendered: task.template.render(),
            task: task.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeleteResponse {
    pub deleted: TaskId,
}

/// Parses a script body, reporting an empty action list as `empty_input`.
pub fn parse_script(value: serde_json::Value) -> Result<UiScript, ApiError> {
    let empty = value
        .get("actions")
        .and_then(serde_json::Value::as_array)
        .is_some_and(Vec::is_empty);
    if empty {
        return Err(ApiError::new(
            ErrorKind::Unprocessable,
            "empty_input",
            "the script has no actions",
        ));
    }
    serde_json::from_value(value).map_err(|e| ApiError::invalid_request(format!("invalid script: {e}")))
}

fn parse_command(text: &str) -> Result<Command, ApiError> {
    Command::parse(text).map_err(|e| ApiError::new(ErrorKind::Unprocessable, "empty_input", e.to_string()))
}

/// Runs the learner. The task is returned unsaved, together with the
/// variables it found.
pub fn propose(command: &str, script: &UiScript, opts: MatchOptions) -> Result<(Task, Vec<VariableView>), ApiError> {
    let task = learn_with(&parse_command(command)?, script, opts)?;
    let variables = task
        .binding
        .entries()
        .iter()
        .map(|e| VariableView {
            var: e.var,
            value: e
                .actions
                .first()
                .and_then(|&i| script.action(i))
                .and_then(|a| a.parameter.clone())
                .unwrap_or_default(),
            actions: e.actions.clone(),
        })
        .collect();
    Ok((task, variables))
}

/// Matches `command` against `tasks` and instantiates the selected task.
pub fn execute(
    command: &str,
    tasks: &[Task],
    opts: MatchOptions,
    exec: Execution,
) -> Result<ExecuteResponse, ApiError> {
    let command = parse_command(command)?;
    match match_command_with(&command, tasks, opts, exec) {
        MatchOutcome::Matched(m) => {
            let task = tasks
                .iter()
                .find(|t| t.id == m.task_id)
                .ok_or_else(|| ApiError::new(ErrorKind::Internal, "internal_error", "matched task vanished"))?;
            let script = instantiate(task, &m.assignments)?;
            let assignments = m
                .assignments
                .iter()
                .map(|a| AssignmentView {
                    var: a.var,
                    value: a.text(),
                })
                .collect();
            Ok(ExecuteResponse::Script {
                script,
                task_id: m.task_id,
                assignments,
            })
        }
        MatchOutcome::Clarify(clarification) => Ok(ExecuteResponse::Clarification { clarification }),
    }
}

use thiserror::Error;

/// Violations of the domain type invariants.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("command is empty")]
    EmptyCommand,
    #[error("token list is empty")]
    EmptyTokenList,
    #[error("invalid token {0:?}: tokens are non-empty and contain no whitespace")]
    InvalidToken(String),
    #[error("UI script has no actions")]
    EmptyScript,
    #[error("action {index}: {reason}")]
    InvalidAction { index: usize, reason: String },
    #[error("invalid variable name {0:?}: expected X_<positive integer>")]
    InvalidVariableName(String),
    #[error("command template is empty")]
    EmptyTemplate,
    #[error("variables {left} and {right} are adjacent in the template")]
    AdjacentVariables { left: String, right: String },
    #[error("variable {0} occurs more than once in the template")]
    RepeatedVariable(String),
    #[error("variable {later} does not follow {earlier} in left-to-right order")]
    UnorderedVariables { earlier: String, later: String },
    #[error("invalid task: {0}")]
    InvalidTask(String),
}

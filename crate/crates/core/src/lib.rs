//! Teach a task with one example, then run new commands of the same shape.
//!
//! A task is learned from a natural-language command and a recorded UI
//! script ([`learner`]), stored keyed on its command template ([`store`]),
//! and later selected by unifying a new command with the stored templates
//! ([`matcher`]). The matched values are substituted into the task's
//! program ([`executor`]) and the resulting script can be played against a
//! simulated form UI ([`sim_env`]).

pub mod error;
pub mod executor;
pub mod fixtures;
pub mod learner;
pub mod matcher;
pub mod model;
pub mod par;
pub mod sim_env;
pub mod store;
pub mod synth;
pub mod text;

pub use error::ModelError;
pub use executor::{instantiate, ExecError};
pub use learner::{find_candidates, learn, learn_with, reserve, LearnError, MatchCandidate, Reservation};
pub use matcher::{
    match_command, match_command_with, overlap_rank, similarity_rank, unify, Assignment, ClarificationKind,
    ClarificationResponse, MatchOutcome, MatchResult, Suggestion, VarValue,
};
pub use model::{
    Action, ActionType, BindingEntry, Command, CommandTemplate, ParamValue, Program, Task, TaskId, TemplateItem, Token,
    UiScript, VariableBinding, VariableName,
};
pub use par::Execution;
pub use sim_env::{play, record, EnvSpec, ExecutionTrace, Gesture};
pub use store::{StoreError, TaskStore};
pub use text::{detokenize, tokenize, MatchOptions};

//! Domain types: commands, UI scripts, programs, templates, bindings, tasks.
//!
//! Every value validates its invariants at construction (and on
//! deserialization) and is immutable afterwards. Action indices are 1-based
//! throughout, both in memory and on the wire.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ModelError;
use crate::text;

/// A whitespace-free, non-empty unit of a command.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Token(String);

impl Token {
    pub fn new(text: impl Into<String>) -> Result<Self, ModelError> {
        let text = text.into();
        if text.is_empty() || text.chars().any(char::is_whitespace) {
            return Err(ModelError::InvalidToken(text));
        }
        Ok(Token(text))
    }

    pub(crate) fn from_trusted(text: String) -> Self {
        debug_assert!(!text.is_empty() && !text.chars().any(char::is_whitespace));
        Token(text)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl AsRef<str> for Token {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for Token {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Token {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Token::new(s).map_err(serde::de::Error::custom)
    }
}

/// A natural-language command and its tokenization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Command {
    raw: String,
    tokens: Vec<Token>,
}

impl Command {
    pub fn parse(raw: impl Into<String>) -> Result<Self, ModelError> {
        let raw = raw.into();
        let tokens = text::tokenize(&raw)?;
        Ok(Command { raw, tokens })
    }

    pub fn raw(&self) -> &str {
        &self.raw
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

impl FromStr for Command {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Command::parse(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionType {
    TextboxFill,
    SelectFrom,
    ClickButton,
    CheckBox,
    RadioSelect,
    WaitFor,
    Navigate,
}

impl ActionType {
    pub fn requires_parameter(self) -> bool {
        matches!(
            self,
            ActionType::TextboxFill | ActionType::SelectFrom | ActionType::Navigate | ActionType::WaitFor
        )
    }

    /// Whether the action must name a UI element.
    pub fn requires_element(self) -> bool {
        !matches!(self, ActionType::WaitFor | ActionType::Navigate)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ActionType::TextboxFill => "textbox_fill",
            ActionType::SelectFrom => "select_from",
            ActionType::ClickButton => "click_button",
            ActionType::CheckBox => "check_box",
            ActionType::RadioSelect => "radio_select",
            ActionType::WaitFor => "wait_for",
            ActionType::Navigate => "navigate",
        }
    }
}

impl fmt::Display for ActionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One UI action. `P` is the parameter type: a literal string in a
/// [`UiScript`], a [`ParamValue`] in a [`Program`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound(deserialize = "P: Deserialize<'de>"))]
pub struct Action<P = String> {
    #[serde(rename = "type")]
    pub action_type: ActionType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub element: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parameter: Option<P>,
}

impl<P> Action<P> {
    pub fn new(action_type: ActionType, element: Option<&str>, parameter: Option<P>) -> Self {
        Action {
            action_type,
            element: element.map(str::to_owned),
            parameter,
        }
    }

    fn check(&self, index: usize) -> Result<(), ModelError> {
        let fail = |reason: String| Err(ModelError::InvalidAction { index, reason });
        let ty = self.action_type;
        if ty.requires_parameter() != self.parameter.is_some() {
            return if ty.requires_parameter() {
                fail(format!("{ty} requires a parameter"))
            } else {
                fail(format!("{ty} takes no parameter"))
            };
        }
        match &self.element {
            None if ty.requires_element() => fail(format!("{ty} requires an element")),
            Some(e) if e.is_empty() => fail("element identifier is empty".into()),
            _ => Ok(()),
        }
    }
}

impl Action<String> {
    pub fn textbox_fill(element: &str, value: &str) -> Self {
        Action::new(ActionType::TextboxFill, Some(element), Some(value.to_owned()))
    }

    pub fn select_from(element: &str, option: &str) -> Self {
        Action::new(ActionType::SelectFrom, Some(element), Some(option.to_owned()))
    }

    pub fn click_button(element: &str) -> Self {
        Action::new(ActionType::ClickButton, Some(element), None)
    }

    pub fn check_box(element: &str) -> Self {
        Action::new(ActionType::CheckBox, Some(element), None)
    }

    pub fn radio_select(element: &str) -> Self {
        Action::new(ActionType::RadioSelect, Some(element), None)
    }

    pub fn wait_for(condition: &str) -> Self {
        Action::new(ActionType::WaitFor, None, Some(condition.to_owned()))
    }

    pub fn navigate(url: &str) -> Self {
        Action::new(ActionType::Navigate, None, Some(url.to_owned()))
    }
}

fn check_actions<P>(actions: &[Action<P>]) -> Result<(), ModelError> {
    if actions.is_empty() {
        return Err(ModelError::EmptyScript);
    }
    actions.iter().enumerate().try_for_each(|(i, a)| a.check(i + 1))
}

/// A non-branching sequence of concrete UI actions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ScriptRepr<String>")]
pub struct UiScript {
    actions: Vec<Action>,
}

#[derive(Deserialize)]
#[serde(bound(deserialize = "P: Deserialize<'de>"))]
struct ScriptRepr<P> {
    actions: Vec<Action<P>>,
}

impl TryFrom<ScriptRepr<String>> for UiScript {
    type Error = ModelError;

    fn try_from(r: ScriptRepr<String>) -> Result<Self, Self::Error> {
        UiScript::new(r.actions)
    }
}

impl UiScript {
    pub fn new(actions: Vec<Action>) -> Result<Self, ModelError> {
        check_actions(&actions)?;
        Ok(UiScript { actions })
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    /// The action at a 1-based index.
    pub fn action(&self, index: usize) -> Option<&Action> {
        index.checked_sub(1).and_then(|i| self.actions.get(i))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("UiScript serializes")
    }
}

/// A template or program variable, named `X_m` after the left boundary `m`
/// of its span in the training command.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VariableName(u32);

impl VariableName {
    pub fn new(index: u32) -> Result<Self, ModelError> {
        if index == 0 {
            return Err(ModelError::InvalidVariableName("X_0".into()));
        }
        Ok(VariableName(index))
    }

    pub fn index(self) -> u32 {
        self.0
    }
}

impl fmt::Display for VariableName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X_{}", self.0)
    }
}

impl FromStr for VariableName {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ModelError::InvalidVariableName(s.to_owned());
        let digits = s.strip_prefix("X_").ok_or_else(bad)?;
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0') {
            return Err(bad());
        }
        let index = digits.parse::<u32>().map_err(|_| bad())?;
        VariableName::new(index)
    }
}

impl Serialize for VariableName {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for VariableName {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A program parameter: either a literal value or a variable reference,
/// serialized as a plain string or `{"var":"X_m"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Literal(String),
    Var { var: VariableName },
}

impl ParamValue {
    pub fn var(&self) -> Option<VariableName> {
        match self {
            ParamValue::Var { var } => Some(*var),
            ParamValue::Literal(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TemplateItem {
    Const(Token),
    Var { var: VariableName },
}

impl TemplateItem {
    pub fn var(&self) -> Option<VariableName> {
        match self {
            TemplateItem::Var { var } => Some(*var),
            TemplateItem::Const(_) => None,
        }
    }

    pub fn constant(&self) -> Option<&Token> {
        match self {
            TemplateItem::Const(t) => Some(t),
            TemplateItem::Var { .. } => None,
        }
    }
}

/// A tokenized command in which variable values have been replaced by
/// variable names.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<TemplateItem>", into = "Vec<TemplateItem>")]
pub struct CommandTemplate {
    items: Vec<TemplateItem>,
}

impl TryFrom<Vec<TemplateItem>> for CommandTemplate {
    type Error = ModelError;

    fn try_from(items: Vec<TemplateItem>) -> Result<Self, Self::Error> {
        CommandTemplate::new(items)
    }
}

impl From<CommandTemplate> for Vec<TemplateItem> {
    fn from(t: CommandTemplate) -> Self {
        t.items
    }
}

impl CommandTemplate {
    pub fn new(items: Vec<TemplateItem>) -> Result<Self, ModelError> {
        if items.is_empty() {
            return Err(ModelError::EmptyTemplate);
        }
        for pair in items.windows(2) {
            if let (Some(l), Some(r)) = (pair[0].var(), pair[1].var()) {
                return Err(ModelError::AdjacentVariables {
                    left: l.to_string(),
                    right: r.to_string(),
                });
            }
        }
        let mut prev: Option<VariableName> = None;
        for var in items.iter().filter_map(TemplateItem::var) {
            if let Some(p) = prev {
                if p == var {
                    return Err(ModelError::RepeatedVariable(var.to_string()));
                }
                if p > var {
                    return Err(ModelError::UnorderedVariables {
                        earlier: p.to_string(),
                        later: var.to_string(),
                    });
                }
            }
            prev = Some(var);
        }
        Ok(CommandTemplate { items })
    }

    /// A template with no variables: the command itself.
    pub fn literal(command: &Command) -> Self {
        CommandTemplate {
            items: command.tokens().iter().cloned().map(TemplateItem::Const).collect(),
        }
    }

    pub fn items(&self) -> &[TemplateItem] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Variables in left-to-right order.
    pub fn variables(&self) -> impl Iterator<Item = VariableName> + '_ {
        self.items.iter().filter_map(TemplateItem::var)
    }

    pub fn constants(&self) -> impl Iterator<Item = &Token> + '_ {
        self.items.iter().filter_map(TemplateItem::constant)
    }

    pub fn variable_count(&self) -> usize {
        self.variables().count()
    }

    /// User-facing rendering with `___` in place of each variable.
    pub fn render(&self) -> String {
        self.render_with(|_| "___".to_owned())
    }

    pub fn render_with(&self, mut var: impl FnMut(VariableName) -> String) -> String {
        self.items
            .iter()
            .map(|item| match item {
                TemplateItem::Const(t) => t.as_str().to_owned(),
                TemplateItem::Var { var: v } => var(*v),
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Store key: constants by text, variables by position only.
    pub fn key(&self) -> Vec<Option<&str>> {
        self.items
            .iter()
            .map(|item| item.constant().map(Token::as_str))
            .collect()
    }
}

impl fmt::Display for CommandTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_with(|v| v.to_string()))
    }
}

/// A UI script in which some parameter values are variables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ScriptRepr<ParamValue>")]
pub struct Program {
    actions: Vec<Action<ParamValue>>,
}

impl TryFrom<ScriptRepr<ParamValue>> for Program {
    type Error = ModelError;

    fn try_from(r: ScriptRepr<ParamValue>) -> Result<Self, Self::Error> {
        Program::new(r.actions)
    }
}

impl Program {
    pub fn new(actions: Vec<Action<ParamValue>>) -> Result<Self, ModelError> {
        check_actions(&actions)?;
        Ok(Program { actions })
    }

    /// The program equal to `script` with no variables.
    pub fn literal(script: &UiScript) -> Self {
        Program {
            actions: script
                .actions()
                .iter()
                .map(|a| Action {
                    action_type: a.action_type,
                    element: a.element.clone(),
                    parameter: a.parameter.clone().map(ParamValue::Literal),
                })
                .collect(),
        }
    }

    pub fn actions(&self) -> &[Action<ParamValue>] {
        &self.actions
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn action(&self, index: usize) -> Option<&Action<ParamValue>> {
        index.checked_sub(1).and_then(|i| self.actions.get(i))
    }

    pub(crate) fn set_variable(&mut self, index: usize, var: VariableName) {
        self.actions[index - 1].parameter = Some(ParamValue::Var { var });
    }

    /// 1-based indices of actions whose parameter is a variable.
    pub fn variable_sites(&self) -> impl Iterator<Item = (usize, VariableName)> + '_ {
        self.actions
            .iter()
            .enumerate()
            .filter_map(|(i, a)| a.parameter.as_ref().and_then(ParamValue::var).map(|v| (i + 1, v)))
    }
}

/// One template variable and the program actions it feeds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BindingEntry {
    pub var: VariableName,
    pub actions: Vec<usize>,
}

/// Ordered one-to-many map from template variables to 1-based program
/// action indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VariableBinding {
    entries: Vec<BindingEntry>,
}

impl VariableBinding {
    /// Builds a binding from `(variable, action)` pairs already sorted by
    /// variable; consecutive pairs sharing a variable are grouped.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (VariableName, usize)>) -> Self {
        let mut entries: Vec<BindingEntry> = Vec::new();
        for (var, action) in pairs {
            match entries.last_mut() {
                Some(last) if last.var == var => last.actions.push(action),
                _ => entries.push(BindingEntry {
                    var,
                    actions: vec![action],
                }),
            }
        }
        VariableBinding { entries }
    }

    pub fn entries(&self) -> &[BindingEntry] {
        &self.entries
    }

    pub fn pairs(&self) -> impl Iterator<Item = (VariableName, usize)> + '_ {
        self.entries
            .iter()
            .flat_map(|e| e.actions.iter().map(move |&a| (e.var, a)))
    }

    pub fn variables(&self) -> impl Iterator<Item = VariableName> + '_ {
        self.entries.iter().map(|e| e.var)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TaskId(pub u64);

impl TaskId {
    /// Id carried by tasks that have not been saved yet.
    pub const UNSAVED: TaskId = TaskId(0);
}

impl fmt::Display for TaskId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for TaskId {
    type Err = std::num::ParseIntError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse().map(TaskId)
    }
}

/// A learned task: template, program and binding, plus bookkeeping.
///
/// Equality ignores `created_at`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Task {
    pub id: TaskId,
    pub template: CommandTemplate,
    pub program: Program,
    pub binding: VariableBinding,
    /// UTC seconds since the epoch.
    pub created_at: u64,
}

impl PartialEq for Task {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
            && self.template == other.template
            && self.program == other.program
            && self.binding == other.binding
    }
}

impl Eq for Task {}

impl Task {
    /// Checks that template, program and binding agree on their variables.
    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |msg: String| Err(ModelError::InvalidTask(msg));

        let template_vars: Vec<VariableName> = self.template.variables().collect();
        let binding_vars: Vec<VariableName> = self.binding.variables().collect();
        if template_vars != binding_vars {
            return bad(format!(
                "binding variables {binding_vars:?} do not match template variables {template_vars:?}"
            ));
        }

        let mut seen = HashSet::new();
        for entry in self.binding.entries() {
            if entry.actions.is_empty() {
                return bad(format!("{} is bound to no action", entry.var));
            }
            for &i in &entry.actions {
                if !seen.insert(i) {
                    return bad(format!("action {i} is bound more than once"));
                }
                let param = self.program.action(i).and_then(|a| a.parameter.as_ref());
                if param.and_then(ParamValue::var) != Some(entry.var) {
                    return bad(format!("action {i} does not carry {}", entry.var));
                }
            }
        }

        let program_vars: BTreeSet<VariableName> = self.program.variable_sites().map(|(_, v)| v).collect();
        let bound: BTreeSet<VariableName> = binding_vars.into_iter().collect();
        if program_vars != bound {
            return bad("program variables are not all covered by the binding".into());
        }
        if self.program.variable_sites().count() != seen.len() {
            return bad("program has unbound variable sites".into());
        }
        Ok(())
    }
}

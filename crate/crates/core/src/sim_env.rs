//! Headless simulated form UI.
//!
//! An [`EnvSpec`] declares pages of form elements. [`play`] interprets a
//! [`UiScript`] against it and [`record`] turns a session of user gestures
//! into the script a recorder would have written. Pages change only when a
//! button with a `goto` target is clicked or when the address bar is used.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::ModelError;
use crate::model::{Action, ActionType, UiScript};

/// Pseudo-element for the browser address bar.
pub const ADDRESS_BAR: &str = "address_bar";
/// Wait condition satisfied by page transitions.
pub const PAGE_LOAD: &str = "page_load";
/// Button target that ends the session.
pub const TERMINAL: &str = "terminal";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ElementSpec {
    Textbox {
        id: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        default: Option<String>,
    },
    Menu {
        id: String,
        options: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        default: Option<String>,
    },
    Checkbox {
        id: String,
        #[serde(default)]
        default: bool,
    },
    Radio {
        id: String,
        group: String,
        #[serde(default)]
        default: bool,
    },
    Button {
        id: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        goto: Option<String>,
    },
}

impl ElementSpec {
    pub fn id(&self) -> &str {
        match self {
            ElementSpec::Textbox { id, .. }
            | ElementSpec::Menu { id, .. }
            | ElementSpec::Checkbox { id, .. }
            | ElementSpec::Radio { id, .. }
            | ElementSpec::Button { id, .. } => id,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ElementSpec::Textbox { .. } => "textbox",
            ElementSpec::Menu { .. } => "menu",
            ElementSpec::Checkbox { .. } => "checkbox",
            ElementSpec::Radio { .. } => "radio",
            ElementSpec::Button { .. } => "button",
        }
    }

    fn default_state(&self) -> Option<String> {
        match self {
            ElementSpec::Textbox { default, .. } => Some(default.clone().unwrap_or_default()),
            ElementSpec::Menu { default, .. } => Some(default.clone().unwrap_or_default()),
            ElementSpec::Checkbox { default, .. } | ElementSpec::Radio { default, .. } => Some(default.to_string()),
            ElementSpec::Button { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageSpec {
    pub id: String,
    /// Extra address under which the page can be reached directly.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub url: Option<String>,
    #[serde(default)]
    pub elements: Vec<ElementSpec>,
}

impl PageSpec {
    pub fn element(&self, id: &str) -> Option<&ElementSpec> {
        self.elements.iter().find(|e| e.id() == id)
    }
}

/// A simulated site. `start_url` opens the first page.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "EnvRepr")]
pub struct EnvSpec {
    pub start_url: String,
    pub pages: Vec<PageSpec>,
}

#[derive(Deserialize)]
struct EnvRepr {
    start_url: String,
    pages: Vec<PageSpec>,
}

impl TryFrom<EnvRepr> for EnvSpec {
    type Error = EnvError;

    fn try_from(r: EnvRepr) -> Result<Self, Self::Error> {
        EnvSpec::new(r.start_url, r.pages)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnvError {
    #[error("environment has no pages")]
    NoPages,
    #[error("duplicate page id {0:?}")]
    DuplicatePage(String),
    #[error("duplicate url {0:?}")]
    DuplicateUrl(String),
    #[error("page {page:?}: duplicate element id {element:?}")]
    DuplicateElement { page: String, element: String },
    #[error("page {page:?}: element id {element:?} is reserved")]
    ReservedElement { page: String, element: String },
    #[error("page {page:?}: menu {element:?} has no options")]
    EmptyMenu { page: String, element: String },
    #[error("page {page:?}: button {element:?} targets unknown page {target:?}")]
    UnknownTarget {
        page: String,
        element: String,
        target: String,
    },
}

impl EnvSpec {
    pub fn new(start_url: impl Into<String>, pages: Vec<PageSpec>) -> Result<Self, EnvError> {
        let start_url = start_url.into();
        if pages.is_empty() {
            return Err(EnvError::NoPages);
        }
        let mut page_ids = HashSet::new();
        let mut urls = HashSet::from([start_url.clone()]);
        for p in &pages {
            if !page_ids.insert(p.id.as_str()) || p.id == TERMINAL {
                return Err(EnvError::DuplicatePage(p.id.clone()));
            }
            if let Some(u) = &p.url {
                if !urls.insert(u.clone()) {
                    return Err(EnvError::DuplicateUrl(u.clone()));
                }
            }
        }
        for p in &pages {
            let mut seen = HashSet::new();
            for e in &p.elements {
                let err_ctx = || (p.id.clone(), e.id().to_owned());
                if e.id() == ADDRESS_BAR || e.id().is_empty() {
                    let (page, element) = err_ctx();
                    return Err(EnvError::ReservedElement { page, element });
                }
                if !seen.insert(e.id()) {
                    let (page, element) = err_ctx();
                    return Err(EnvError::DuplicateElement { page, element });
                }
                match e {
                    ElementSpec::Menu { options, .. } if options.is_empty() => {
                        let (page, element) = err_ctx();
                        return Err(EnvError::EmptyMenu { page, element });
                    }
                    ElementSpec::Button { goto: Some(t), .. } if t != TERMINAL && !page_ids.contains(t.as_str()) => {
                        let (page, element) = err_ctx();
                        return Err(EnvError::UnknownTarget {
                            page,
                            element,
                            target: t.clone(),
                        });
                    }
                    _ => {}
                }
            }
        }
        Ok(EnvSpec { start_url, pages })
    }

    pub fn page(&self, id: &str) -> Option<&PageSpec> {
        self.pages.iter().find(|p| p.id == id)
    }

    fn page_index(&self, id: &str) -> Option<usize> {
        self.pages.iter().position(|p| p.id == id)
    }

    /// Index of the page registered for `url`.
    pub fn resolve_url(&self, url: &str) -> Option<usize> {
        if url == self.start_url {
            return Some(0);
        }
        self.pages.iter().position(|p| p.url.as_deref() == Some(url))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepOutcome {
    Ok,
    Error(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    /// 1-based action index.
    pub index: usize,
    pub action: Action,
    pub outcome: StepOutcome,
}

/// Result of playing a script. Element state is keyed `page/element`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecutionTrace {
    pub steps: Vec<TraceStep>,
    pub final_page: Option<String>,
    pub state: BTreeMap<String, String>,
}

impl ExecutionTrace {
    /// First failing step, if any.
    pub fn error(&self) -> Option<&TraceStep> {
        self.steps.iter().find(|s| s.outcome != StepOutcome::Ok)
    }

    pub fn ok_steps(&self) -> usize {
        self.steps.iter().filter(|s| s.outcome == StepOutcome::Ok).count()
    }

    pub fn is_ok(&self) -> bool {
        self.error().is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Location {
    Blank,
    Page(usize),
    Terminal,
}

/// Mutable simulation state shared by the player and the recorder.
struct Browser<'e> {
    env: &'e EnvSpec,
    location: Location,
    state: BTreeMap<String, String>,
}

impl<'e> Browser<'e> {
    fn new(env: &'e EnvSpec) -> Self {
        Browser {
            env,
            location: Location::Blank,
            state: BTreeMap::new(),
        }
    }

    fn load(&mut self, page: usize) {
        let p = &self.env.pages[page];
        for e in &p.elements {
            if let Some(v) = e.default_state() {
                self.state.insert(key(&p.id, e.id()), v);
            }
        }
        self.location = Location::Page(page);
    }

    fn final_page(&self) -> Option<String> {
        match self.location {
            Location::Blank => None,
            Location::Page(i) => Some(self.env.pages[i].id.clone()),
            Location::Terminal => Some(TERMINAL.to_owned()),
        }
    }

    fn navigate(&mut self, url: &str) -> Result<(), String> {
        if self.location == Location::Terminal {
            return Err("action after terminal page".into());
        }
        let page = self
            .env
            .resolve_url(url)
            .ok_or_else(|| format!("unknown url {url:?}"))?;
        self.load(page);
        Ok(())
    }

    fn element(&self, id: &str) -> Result<(&'e PageSpec, &'e ElementSpec), String> {
        match self.location {
            Location::Terminal => Err("action after terminal page".into()),
            Location::Blank => Err(format!("unknown element {id:?}: no page loaded")),
            Location::Page(i) => {
                let page = &self.env.pages[i];
                page.element(id)
                    .map(|e| (page, e))
                    .ok_or_else(|| format!("unknown element {id:?} on page {:?}", page.id))
            }
        }
    }

    fn fill(&mut self, id: &str, text: &str) -> Result<(), String> {
        match self.element(id)? {
            (page, ElementSpec::Textbox { .. }) => {
                self.state.insert(key(&page.id, id), text.to_owned());
                Ok(())
            }
            (_, other) => Err(format!("element {id:?} is a {}, not a textbox", other.kind())),
        }
    }

    fn select(&mut self, id: &str, option: &str) -> Result<(), String> {
        match self.element(id)? {
            (page, ElementSpec::Menu { options, .. }) => {
                if !options.iter().any(|o| o == option) {
                    return Err(format!("{option:?} is not an option of menu {id:?}"));
                }
                self.state.insert(key(&page.id, id), option.to_owned());
                Ok(())
            }
            (_, other) => Err(format!("element {id:?} is a {}, not a menu", other.kind())),
        }
    }

    /// Returns whether the click caused a page transition.
    fn click(&mut self, id: &str) -> Result<bool, String> {
        match self.element(id)? {
            (_, ElementSpec::Button { goto: None, .. }) => Ok(false),
            (_, ElementSpec::Button { goto: Some(t), .. }) => {
                if t == TERMINAL {
                    self.location = Location::Terminal;
                } else {
                    let i = self.env.page_index(t).expect("validated target");
                    self.load(i);
                }
                Ok(true)
            }
            (_, other) => Err(format!("element {id:?} is a {}, not a button", other.kind())),
        }
    }

    fn toggle(&mut self, id: &str) -> Result<(), String> {
        match self.element(id)? {
            (page, ElementSpec::Checkbox { .. }) => {
                let k = key(&page.id, id);
                let on = self.state.get(&k).is_some_and(|v| v == "true");
                self.state.insert(k, (!on).to_string());
                Ok(())
            }
            (_, other) => Err(format!("element {id:?} is a {}, not a checkbox", other.kind())),
        }
    }

    fn choose(&mut self, id: &str) -> Result<(), String> {
        match self.element(id)? {
            (page, ElementSpec::Radio { group, .. }) => {
                for e in &page.elements {
                    if let ElementSpec::Radio {
                        id: other, group: g, ..
                    } = e
                    {
                        if g == group {
                            self.state.insert(key(&page.id, other), (other == id).to_string());
                        }
                    }
                }
                Ok(())
            }
            (_, other) => Err(format!("element {id:?} is a {}, not a radio button", other.kind())),
        }
    }

    fn apply(&mut self, action: &Action) -> Result<(), String> {
        let param = action.parameter.as_deref();
        let element = action.element.as_deref();
        match (action.action_type, element, param) {
            (ActionType::WaitFor, _, _) => Ok(()),
            (ActionType::Navigate, _, Some(url)) => self.navigate(url),
            (ActionType::TextboxFill, Some(ADDRESS_BAR), Some(url)) => self.navigate(url),
            (ActionType::TextboxFill, Some(id), Some(text)) => self.fill(id, text),
            (ActionType::SelectFrom, Some(id), Some(option)) => self.select(id, option),
            (ActionType::ClickButton, Some(id), _) => self.click(id).map(drop),
            (ActionType::CheckBox, Some(id), _) => self.toggle(id),
            (ActionType::RadioSelect, Some(id), _) => self.choose(id),
            (ty, _, _) => Err(format!("malformed {ty} action")),
        }
    }
}

fn key(page: &str, element: &str) -> String {
    format!("{page}/{element}")
}

/// Plays `script` against `env`. Stops at the first failing action.
pub fn play(env: &EnvSpec, script: &UiScript) -> ExecutionTrace {
    let mut browser = Browser::new(env);
    let mut steps = Vec::with_capacity(script.len());
    for (i, action) in script.actions().iter().enumerate() {
        let outcome = match browser.apply(action) {
            Ok(()) => StepOutcome::Ok,
            Err(detail) => StepOutcome::Error(format!("action {}: {detail}", i + 1)),
        };
        let failed = outcome != StepOutcome::Ok;
        steps.push(TraceStep {
            index: i + 1,
            action: action.clone(),
            outcome,
        });
        if failed {
            break;
        }
    }
    ExecutionTrace {
        steps,
        final_page: browser.final_page(),
        state: browser.state,
    }
}

/// A user interaction captured during a demonstration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "gesture", rename_all = "snake_case")]
pub enum Gesture {
    Navigate { url: String },
    Type { element: String, text: String },
    Select { element: String, option: String },
    Click { element: String },
    Check { element: String },
    Radio { element: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecordError {
    #[error("gesture {index}: {detail}")]
    InvalidGesture { index: usize, detail: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Turns a session into a UI script, inserting `wait_for page_load` after
/// every page transition. Address-bar navigation is written the way a
/// browser recorder sees it: a fill of the address bar.
pub fn record(env: &EnvSpec, session: &[Gesture]) -> Result<UiScript, RecordError> {
    let mut browser = Browser::new(env);
    let mut actions = Vec::with_capacity(session.len() + 2);
    for (i, g) in session.iter().enumerate() {
        let fail = |detail: String| RecordError::InvalidGesture { index: i + 1, detail };
        match g {
            Gesture::Navigate { url } => {
                browser.navigate(url).map_err(fail)?;
                actions.push(Action::textbox_fill(ADDRESS_BAR, url));
                actions.push(Action::wait_for(PAGE_LOAD));
            }
            Gesture::Type { element, text } => {
                browser.fill(element, text).map_err(fail)?;
                actions.push(Action::textbox_fill(element, text));
            }
            Gesture::Select { element, option } => {
                browser.select(element, option).map_err(fail)?;
                actions.push(Action::select_from(element, option));
            }
            Gesture::Click { element } => {
                let moved = browser.click(element).map_err(fail)?;
                actions.push(Action::click_button(element));
                if moved {
                    actions.push(Action::wait_for(PAGE_LOAD));
                }
            }
            Gesture::Check { element } => {
                browser.toggle(element).map_err(fail)?;
                actions.push(Action::check_box(element));
            }
            Gesture::Radio { element } => {
                browser.choose(element).map_err(fail)?;
                actions.push(Action::radio_select(element));
            }
        }
    }
    Ok(UiScript::new(actions)?)
}

//! Seeded generator of well-formed teaching scenarios.
//!
//! Each [`SynthCase`] is a small simulated site plus a demonstration whose
//! command follows the teaching rules: every variable value appears in the
//! command verbatim and exactly once, values are separated by filler, and
//! filler words never occur inside a value. Cases can be re-instantiated
//! with fresh values to produce the command and session a user would give
//! for another member of the same command class.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{Command, UiScript};
use crate::sim_env::{record, ElementSpec, EnvSpec, Gesture, PageSpec, RecordError, TERMINAL};

const FILLER: &[&str] = &[
    "please", "find", "show", "me", "for", "with", "in", "from", "to", "and", "the", "a", "at", "about", "on", "by",
    "of", "get", "book", "search", "what", "is", "when", "does", "i", "need", "?", ".", ",", "\"",
];

const NAMES: &[&str] = &[
    "Alpha",
    "Bravo",
    "Charlie",
    "Delta",
    "Echo",
    "Foxtrot",
    "Golf",
    "Hotel",
    "India",
    "Juliet",
    "Kilo",
    "Lima",
    "Mike",
    "November",
    "Oscar",
    "Papa",
    "Quebec",
    "Romeo",
    "Sierra",
    "Tango",
    "Uniform",
    "Victor",
    "Whiskey",
    "Xray",
    "Yankee",
    "Zulu",
    "Boston",
    "Denver",
    "Austin",
    "Paris",
    "Tokyo",
    "Oslo",
    "Lisbon",
    "Cairo",
    "Lagos",
    "Lima-2",
    "KLM",
    "United",
    "Ford",
    "Taurus",
    "Porsche",
    "Mustang",
    "MSFT",
    "AAPL",
    "08/03/2014",
    "10:30",
    "$100",
    "O'Neil",
];

/// Literal values for untouched-by-command fields; never used in commands.
const DECOYS: &[&str] = &["zz-fixed", "zz-default", "zz-keep", "zz-123", "zz-note"];

/// One command part: filler tokens or the value of a slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Part {
    Filler(Vec<String>),
    Slot(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SlotKind {
    /// Text typed into one or more textboxes.
    Text,
    /// An option chosen from a menu.
    Menu { options: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slot {
    pub kind: SlotKind,
    pub value: String,
}

#[derive(Debug, Clone)]
pub struct SynthCase {
    pub seed: u64,
    pub env: EnvSpec,
    pub parts: Vec<Part>,
    pub slots: Vec<Slot>,
    /// Demonstration gestures, each optionally tied to the slot whose value
    /// it carries.
    pub session: Vec<(Gesture, Option<usize>)>,
}

impl SynthCase {
    pub fn values(&self) -> Vec<String> {
        self.slots.iter().map(|s| s.value.clone()).collect()
    }

    /// Command text with `values[i]` substituted for slot `i`.
    pub fn command_text(&self, values: &[String]) -> String {
        self.parts
            .iter()
            .map(|p| match p {
                Part::Filler(words) => words.join(" "),
                Part::Slot(i) => values[*i].clone(),
            })
            .filter(|s| !s.is_empty())
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn command(&self, values: &[String]) -> Command {
        Command::parse(self.command_text(values)).expect("generated commands are non-empty")
    }

    pub fn gestures(&self, values: &[String]) -> Vec<Gesture> {
        self.session
            .iter()
            .map(|(g, slot)| match (g, slot) {
                (Gesture::Type { element, .. }, Some(i)) => Gesture::Type {
                    element: element.clone(),
                    text: values[*i].clone(),
                },
                (Gesture::Select { element, .. }, Some(i)) => Gesture::Select {
                    element: element.clone(),
                    option: values[*i].clone(),
                },
                (g, _) => g.clone(),
            })
            .collect()
    }

    pub fn script(&self, values: &[String]) -> Result<UiScript, RecordError> {
        record(&self.env, &self.gestures(values))
    }

    /// Token positions of each slot in the training command, as `(start,
    /// end)` 1-based inclusive.
    pub fn slot_spans(&self) -> Vec<(usize, usize)> {
        let mut spans = vec![(0, 0); self.slots.len()];
        let mut pos = 1;
        for p in &self.parts {
            let n = match p {
                Part::Filler(words) => words.len(),
                Part::Slot(i) => {
                    let n = crate::text::tokenize(&self.slots[*i].value)
                        .map(|t| t.len())
                        .unwrap_or(0);
                    spans[*i] = (pos, pos + n - 1);
                    n
                }
            };
            pos += n;
        }
        spans
    }

    /// New values for every slot: another option for menus, fresh words for
    /// text.
    pub fn fresh_values(&self, rng: &mut impl Rng) -> Vec<String> {
        self.slots
            .iter()
            .map(|s| match &s.kind {
                SlotKind::Menu { options } => {
                    let others: Vec<&String> = options.iter().filter(|o| **o != s.value).collect();
                    others
                        .choose(rng)
                        .map(|o| (*o).clone())
                        .unwrap_or_else(|| s.value.clone())
                }
                SlotKind::Text => {
                    let n = rng.random_range(1..=3);
                    NAMES.choose_multiple(rng, n).copied().collect::<Vec<_>>().join(" ")
                }
            })
            .collect()
    }
}

/// Draws distinct value words so that no value can occur twice.
struct WordPool(Vec<&'static str>);

impl WordPool {
    fn new(rng: &mut impl Rng) -> Self {
        let mut words = NAMES.to_vec();
        words.shuffle(rng);
        WordPool(words)
    }

    fn phrase(&mut self, rng: &mut impl Rng) -> String {
        let n = rng.random_range(1..=3).min(self.0.len());
        let words: Vec<_> = (0..n).filter_map(|_| self.0.pop()).collect();
        words.join(" ")
    }
}

enum Want {
    TextSlot(usize),
    MenuSlot(usize),
    Decoy(&'static str),
    Check,
    Radio,
    Idle,
}

struct PagePlan {
    wants: Vec<Want>,
    has_next: bool,
    last_button_terminal: bool,
}

pub fn generate(seed: u64) -> SynthCase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool = WordPool::new(&mut rng);

    let slot_count = rng.random_range(0..=4);
    let page_count = rng.random_range(1..=2);

    let mut slots = Vec::with_capacity(slot_count);
    let mut plans: Vec<PagePlan> = (0..page_count)
        .map(|p| PagePlan {
            wants: Vec::new(),
            has_next: p + 1 < page_count,
            last_button_terminal: false,
        })
        .collect();
    plans.last_mut().expect("at least one page").last_button_terminal = rng.random_bool(0.5);

    for i in 0..slot_count {
        let page = rng.random_range(0..page_count);
        if rng.random_bool(0.5) {
            let value = pool.phrase(&mut rng);
            let mut options = vec![value.clone()];
            for _ in 0..rng.random_range(1..=2) {
                options.push(pool.phrase(&mut rng));
            }
            options.retain(|o| !o.is_empty());
            options.dedup();
            options.shuffle(&mut rng);
            slots.push(Slot {
                kind: SlotKind::Menu { options },
                value,
            });
            plans[page].wants.push(Want::MenuSlot(i));
        } else {
            let value = pool.phrase(&mut rng);
            slots.push(Slot {
                kind: SlotKind::Text,
                value,
            });
            let copies = if rng.random_bool(0.2) { 2 } else { 1 };
            for _ in 0..copies {
                plans[page].wants.push(Want::TextSlot(i));
            }
        }
    }
    for plan in &mut plans {
        for _ in 0..rng.random_range(0..=1) {
            plan.wants
                .push(Want::Decoy(DECOYS.choose(&mut rng).expect("non-empty")));
        }
        for _ in 0..rng.random_range(0..=1) {
            plan.wants.push(Want::Check);
        }
        if rng.random_bool(0.3) {
            plan.wants.push(Want::Radio);
        }
        for _ in 0..rng.random_range(0..=2) {
            plan.wants.push(Want::Idle);
        }
        plan.wants.shuffle(&mut rng);
    }

    let url = format!("site-{seed}.test");
    let mut pages = Vec::with_capacity(page_count);
    let mut session: Vec<(Gesture, Option<usize>)> = vec![(Gesture::Navigate { url: url.clone() }, None)];

    for (p, plan) in plans.iter().enumerate() {
        let mut counters = [0usize; 5];
        let mut next_id = |kind: usize, name: &str| {
            counters[kind] += 1;
            format!("{name}_{}", counters[kind])
        };
        let mut elements = Vec::new();
        let mut gestures: Vec<(Gesture, Option<usize>)> = Vec::new();
        for want in &plan.wants {
            match want {
                Want::TextSlot(i) => {
                    let id = next_id(0, "textbox");
                    elements.push(ElementSpec::Textbox {
                        id: id.clone(),
                        default: None,
                    });
                    gestures.push((
                        Gesture::Type {
                            element: id,
                            text: slots[*i].value.clone(),
                        },
                        Some(*i),
                    ));
                }
                Want::MenuSlot(i) => {
                    let id = next_id(1, "menu");
                    let SlotKind::Menu { options } = &slots[*i].kind else {
                        unreachable!()
                    };
                    elements.push(ElementSpec::Menu {
                        id: id.clone(),
                        options: options.clone(),
                        default: None,
                    });
                    gestures.push((
                        Gesture::Select {
                            element: id,
                            option: slots[*i].value.clone(),
                        },
                        Some(*i),
                    ));
                }
                Want::Decoy(text) => {
                    let id = next_id(0, "textbox");
                    elements.push(ElementSpec::Textbox {
                        id: id.clone(),
                        default: Some((*text).to_owned()),
                    });
                    gestures.push((
                        Gesture::Type {
                            element: id,
                            text: (*text).to_owned(),
                        },
                        None,
                    ));
                }
                Want::Check => {
                    let id = next_id(2, "checkbox");
                    elements.push(ElementSpec::Checkbox {
                        id: id.clone(),
                        default: false,
                    });
                    gestures.push((Gesture::Check { element: id }, None));
                }
                Want::Radio => {
                    let a = next_id(3, "radio");
                    let b = next_id(3, "radio");
                    elements.push(ElementSpec::Radio {
                        id: a,
                        group: "choice".into(),
                        default: true,
                    });
                    elements.push(ElementSpec::Radio {
                        id: b.clone(),
                        group: "choice".into(),
                        default: false,
                    });
                    gestures.push((Gesture::Radio { element: b }, None));
                }
                Want::Idle => {
                    let id = next_id(0, "textbox");
                    elements.push(ElementSpec::Textbox {
                        id,
                        default: Some("idle".into()),
                    });
                }
            }
        }
        gestures.shuffle(&mut rng);
        let button = next_id(4, "button");
        let goto = if plan.has_next {
            Some(format!("page_{}", p + 2))
        } else if plan.last_button_terminal {
            Some(TERMINAL.to_owned())
        } else {
            None
        };
        elements.push(ElementSpec::Button {
            id: button.clone(),
            goto,
        });
        session.extend(gestures);
        if plan.has_next || rng.random_bool(0.7) {
            session.push((Gesture::Click { element: button }, None));
        }
        pages.push(PageSpec {
            id: format!("page_{}", p + 1),
            url: None,
            elements,
        });
    }
    let env = EnvSpec::new(url, pages).expect("generated env is valid");

    // command: filler, then slots in random order separated by filler
    let mut order: Vec<usize> = (0..slot_count).collect();
    order.shuffle(&mut rng);
    let filler = |rng: &mut ChaCha8Rng, min: usize, max: usize| -> Part {
        let n = rng.random_range(min..=max);
        Part::Filler(
            (0..n)
                .map(|_| FILLER.choose(rng).expect("non-empty").to_string())
                .collect(),
        )
    };
    let mut parts = vec![filler(&mut rng, if slot_count == 0 { 1 } else { 0 }, 3)];
    for (k, i) in order.iter().enumerate() {
        if k > 0 {
            parts.push(filler(&mut rng, 1, 3));
        }
        parts.push(Part::Slot(*i));
    }
    if slot_count > 0 {
        parts.push(filler(&mut rng, 0, 2));
    }

    SynthCase {
        seed,
        env,
        parts,
        slots,
        session,
    }
}

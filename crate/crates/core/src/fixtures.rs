//! Bundled demonstration data: the flight-arrivals demo and the ten site
//! environments used as test corpora.

use crate::learner::learn;
use crate::model::{Command, Task, TaskId, UiScript};
use crate::sim_env::{EnvSpec, Gesture};

pub const FLIGHT_COMMAND: &str = "When does KLM flight 213 land?";

pub const FLIGHT_SCRIPT_JSON: &str = include_str!("../fixtures/fig1_script.json");
pub const FLIGHT_SESSION_JSON: &str = include_str!("../fixtures/fig1_session.json");
pub const FLIGHT_ENV_JSON: &str = include_str!("../fixtures/envs/flight_arrivals.json");

/// Site environments, by name.
pub const SITE_ENVS: [(&str, &str); 10] = [
    (
        "mortgage_calculator",
        include_str!("../fixtures/envs/mortgage_calculator.json"),
    ),
    ("thesaurus", include_str!("../fixtures/envs/thesaurus.json")),
    ("book_store", include_str!("../fixtures/envs/book_store.json")),
    ("recruiting", include_str!("../fixtures/envs/recruiting.json")),
    (
        "investment_research",
        include_str!("../fixtures/envs/investment_research.json"),
    ),
    (
        "scientific_database",
        include_str!("../fixtures/envs/scientific_database.json"),
    ),
    ("car_rental", include_str!("../fixtures/envs/car_rental.json")),
    ("cooking_recipes", include_str!("../fixtures/envs/cooking_recipes.json")),
    ("airline", include_str!("../fixtures/envs/airline.json")),
    (
        "department_store",
        include_str!("../fixtures/envs/department_store.json"),
    ),
];

pub fn flight_script() -> UiScript {
    serde_json::from_str(FLIGHT_SCRIPT_JSON).expect("bundled script is valid")
}

pub fn flight_session() -> Vec<Gesture> {
    serde_json::from_str(FLIGHT_SESSION_JSON).expect("bundled session is valid")
}

pub fn flight_env() -> EnvSpec {
    serde_json::from_str(FLIGHT_ENV_JSON).expect("bundled env is valid")
}

/// The task learned from the flight demo, stamped with `id`.
pub fn flight_task(id: u64) -> Task {
    let command = Command::parse(FLIGHT_COMMAND).expect("non-empty");
    let mut task = learn(&command, &flight_script()).expect("flight demo is learnable");
    task.id = TaskId(id);
    task
}

pub fn site_env(name: &str) -> Option<EnvSpec> {
    SITE_ENVS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, json)| serde_json::from_str(json).expect("bundled env is valid"))
}

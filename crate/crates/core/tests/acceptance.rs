//! Acceptance suite. Runs every primary criterion and prints one line per
//! criterion; exits non-zero if any fails.

mod common;

use std::collections::HashSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use helpa_core::fixtures::{self, FLIGHT_COMMAND};
use helpa_core::learner::LearnError;
use helpa_core::matcher::{ClarificationKind, MatchOutcome};
use helpa_core::par::{self, Execution};
use helpa_core::sim_env::StepOutcome;
use helpa_core::store::StoreError;
use helpa_core::synth::generate;
use helpa_core::{
    find_candidates, instantiate, learn, match_command, play, record, reserve, similarity_rank, Action, Command,
    Gesture, Task, TaskId, TaskStore, UiScript,
};

use common::{oracle_candidates, oracle_distance, oracle_reserve, words, Item};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn cmd(s: &str) -> Command {
    Command::parse(s).expect("non-empty command")
}

fn figure_one_golden() -> Outcome {
    let started = Instant::now();
    let script: UiScript = serde_json::from_str(fixtures::FLIGHT_SCRIPT_JSON).map_err(|e| e.to_string())?;
    let mut task = learn(&cmd(FLIGHT_COMMAND), &script).map_err(|e| e.to_string())?;
    task.id = TaskId(1);

    let rendered = task.template.render();
    ensure(rendered == "When does ___ flight ___ land ?", || {
        format!("template {rendered:?}")
    })?;
    let binding: Vec<(String, Vec<usize>)> = task
        .binding
        .entries()
        .iter()
        .map(|e| (e.var.to_string(), e.actions.clone()))
        .collect();
    let want = vec![("X_3".to_owned(), vec![3]), ("X_5".to_owned(), vec![4])];
    ensure(binding == want, || format!("binding {binding:?}"))?;

    let MatchOutcome::Matched(m) = match_command(&cmd("When does United flight 555 land?"), &[task.clone()]) else {
        return Err("execution command did not match".into());
    };
    let out = instantiate(&task, &m.assignments).map_err(|e| e.to_string())?;
    let expected: UiScript = serde_json::from_str(
        &fixtures::FLIGHT_SCRIPT_JSON
            .replace("\"KLM\"", "\"United\"")
            .replace("\"213\"", "\"555\""),
    )
    .map_err(|e| e.to_string())?;
    ensure(out == expected, || format!("script {}", out.to_json()))?;
    ensure(play(&fixtures::flight_env(), &out).is_ok(), || {
        "instantiated script fails to play".into()
    })?;

    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("exact structural equality in {elapsed:?}"))
}

fn reservation_oracle() -> Outcome {
    const INSTANCES: usize = 10_000;
    const ALPHABET: [&str; 4] = ["a", "b", "c", "d"];
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut with_reservations = 0;
    for case in 0..INSTANCES {
        let n = rng.random_range(1..=8);
        let command: Vec<&str> = (0..n).map(|_| *ALPHABET.choose(&mut rng).unwrap()).collect();
        let k = rng.random_range(1..=5);
        let params: Vec<Option<Vec<&str>>> = (0..k)
            .map(|_| {
                rng.random_bool(0.8).then(|| {
                    let len = rng.random_range(1..=3);
                    (0..len).map(|_| *ALPHABET.choose(&mut rng).unwrap()).collect()
                })
            })
            .collect();
        let script = UiScript::new(
            params
                .iter()
                .enumerate()
                .map(|(i, p)| match p {
                    Some(p) => Action::textbox_fill(&format!("textbox_{}", i + 1), &p.join(" ")),
                    None => Action::click_button(&format!("button_{}", i + 1)),
                })
                .collect(),
        )
        .map_err(|e| e.to_string())?;

        let want_cands = oracle_candidates(&command, &params);
        let got_cands: Vec<_> = find_candidates(&cmd(&command.join(" ")), &script)
            .iter()
            .map(|c| (c.len, c.action, c.start, c.end))
            .collect();
        ensure(got_cands == want_cands, || {
            format!("instance {case}: candidates {got_cands:?} != {want_cands:?} for {command:?} / {params:?}")
        })?;

        let cands = find_candidates(&cmd(&command.join(" ")), &script);
        let got: Vec<_> = reserve(&cands, n).iter().map(|r| (r.start, r.end, r.action)).collect();
        let want = oracle_reserve(&want_cands, n, k);
        ensure(got == want, || {
            format!("instance {case}: reserve {got:?} != oracle {want:?} for {command:?} / {params:?}")
        })?;
        if !want.is_empty() {
            with_reservations += 1;
        }
    }
    Ok(format!(
        "{INSTANCES}/{INSTANCES} instances agree ({with_reservations} non-trivial)"
    ))
}

fn round_trip() -> Outcome {
    const CASES: usize = 1_000;
    let failures: Vec<String> = par::map_range(Execution::default(), CASES, |i| {
        let seed = i as u64;
        let case = generate(seed);
        let check = || -> Result<(), String> {
            let values = case.values();
            let script = case.script(&values).map_err(|e| e.to_string())?;
            let task = learn(&case.command(&values), &script).map_err(|e| e.to_string())?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xfeed);
            let fresh = case.fresh_values(&mut rng);
            let MatchOutcome::Matched(m) = match_command(&case.command(&fresh), std::slice::from_ref(&task)) else {
                return Err(format!(
                    "{:?} did not match {}",
                    case.command_text(&fresh),
                    task.template
                ));
            };
            let out = instantiate(&task, &m.assignments).map_err(|e| e.to_string())?;
            let expected = case.script(&fresh).map_err(|e| e.to_string())?;
            ensure(out == expected, || {
                format!("script {} != {}", out.to_json(), expected.to_json())
            })?;
            let trace = play(&case.env, &out);
            ensure(trace.is_ok(), || format!("play failed: {:?}", trace.error()))
        };
        check().err().map(|e| format!("seed {seed}: {e}"))
    })
    .into_iter()
    .flatten()
    .collect();
    match failures.first() {
        None => Ok(format!("{CASES}/{CASES} tasks re-executed with all-ok traces")),
        Some(first) => Err(format!("{} of {CASES} failed; first: {first}", failures.len())),
    }
}

struct Demo {
    site: &'static str,
    command: &'static str,
    gestures: Vec<Gesture>,
    template: &'static str,
}

fn nav(url: &str) -> Gesture {
    Gesture::Navigate { url: url.into() }
}
fn typ(element: &str, text: &str) -> Gesture {
    Gesture::Type {
        element: element.into(),
        text: text.into(),
    }
}
fn sel(element: &str, option: &str) -> Gesture {
    Gesture::Select {
        element: element.into(),
        option: option.into(),
    }
}
fn click(element: &str) -> Gesture {
    Gesture::Click {
        element: element.into(),
    }
}

fn corpus() -> Vec<Demo> {
    let thesaurus = "collinsdictionary.com/english-thesaurus";
    let nasdaq = "nasdaq.com";
    let citeseer = "citeseerx.ist.psu.edu/advanced_search";
    let cars = "priceline.com/l/rental/cars.htm";
    let indeed = "indeed.com/resumes/advanced";
    let recipes = "allrecipes.com/Search/Default.aspx?qt=a";
    vec![
        Demo {
            site: "thesaurus",
            command: "search for happy.",
            gestures: vec![nav(thesaurus), typ("textbox_1", "happy"), click("button_1")],
            template: "search for ___ .",
        },
        Demo {
            site: "thesaurus",
            command: "dictionary serendipity",
            gestures: vec![
                nav(thesaurus),
                sel("menu_1", "English Dictionary"),
                typ("textbox_1", "serendipity"),
                click("button_1"),
            ],
            template: "dictionary ___",
        },
        Demo {
            site: "thesaurus",
            command: "what is a synonym for \"big\"?",
            gestures: vec![nav(thesaurus), typ("textbox_1", "big"), click("button_1")],
            template: "what is a synonym for \" ___ \" ?",
        },
        Demo {
            site: "thesaurus",
            command: "what is another word for quick?",
            gestures: vec![nav(thesaurus), typ("textbox_1", "quick"), click("button_1")],
            template: "what is another word for ___ ?",
        },
        Demo {
            site: "thesaurus",
            command: "search collins for sad",
            gestures: vec![nav(thesaurus), typ("textbox_1", "sad"), click("button_1")],
            template: "search collins for ___",
        },
        Demo {
            site: "investment_research",
            command: "current stock quote for MSFT",
            gestures: vec![nav(nasdaq), typ("textbox_1", "MSFT"), click("button_1")],
            template: "current stock quote for ___",
        },
        Demo {
            site: "investment_research",
            command: "show AAPL performance for 1m period",
            gestures: vec![
                nav(nasdaq),
                typ("textbox_1", "AAPL"),
                click("button_1"),
                click("button_1"),
            ],
            template: "show ___ performance for 1m period",
        },
        Demo {
            site: "investment_research",
            command: "what is the value of GOOG stock",
            gestures: vec![nav(nasdaq), typ("textbox_1", "GOOG"), click("button_1")],
            template: "what is the value of ___ stock",
        },
        Demo {
            site: "scientific_database",
            command: "find papers by Smith from 2001 to 2010",
            gestures: vec![
                nav(citeseer),
                typ("textbox_3", "Smith"),
                typ("textbox_6", "2001"),
                typ("textbox_7", "2010"),
                click("button_1"),
            ],
            template: "find papers by ___ from ___ to ___",
        },
        Demo {
            site: "scientific_database",
            command: "find articles by Knuth about typesetting",
            gestures: vec![
                nav(citeseer),
                typ("textbox_3", "Knuth"),
                typ("textbox_4", "typesetting"),
                click("button_1"),
            ],
            template: "find articles by ___ about ___",
        },
        Demo {
            site: "scientific_database",
            command: "search for publications by Lamport about logical clocks",
            gestures: vec![
                nav(citeseer),
                typ("textbox_3", "Lamport"),
                typ("textbox_1", "logical clocks"),
                click("button_1"),
            ],
            template: "search for publications by ___ about ___",
        },
        Demo {
            site: "car_rental",
            command: "show cars at LAX at 10:00 AM on August 3, 2015",
            gestures: vec![
                nav(cars),
                typ("textbox_1", "LAX"),
                sel("menu_1", "August 3, 2015"),
                sel("menu_2", "10:00 AM"),
                click("button_1"),
            ],
            template: "show cars at ___ at ___ on ___",
        },
        Demo {
            site: "car_rental",
            command: "i need to rent a car from Boston on May 5, 2015 at 9:00 AM until May 9, 2015 at 5:00 PM",
            gestures: vec![
                nav(cars),
                typ("textbox_1", "Boston"),
                sel("menu_1", "May 5, 2015"),
                sel("menu_2", "9:00 AM"),
                sel("menu_3", "May 9, 2015"),
                sel("menu_4", "5:00 PM"),
                click("button_1"),
            ],
            template: "i need to rent a car from ___ on ___ at ___ until ___ at ___",
        },
        Demo {
            site: "car_rental",
            command: "search for SFO as pick - up with May 3, 2015 as pick - up date at 10:00 AM \
                      and May 7, 2015 as drop - off date at 4:00 PM .",
            gestures: vec![
                nav(cars),
                typ("textbox_1", "SFO"),
                sel("menu_1", "May 3, 2015"),
                sel("menu_2", "10:00 AM"),
                sel("menu_3", "May 7, 2015"),
                sel("menu_4", "4:00 PM"),
                click("button_1"),
            ],
            template: "search for ___ as pick - up with ___ as pick - up date at ___ \
                       and ___ as drop - off date at ___ .",
        },
        Demo {
            site: "recruiting",
            command: "find Stanford grads in California",
            gestures: vec![
                nav(indeed),
                typ("textbox_5", "Stanford"),
                sel("menu_3", "California"),
                click("button_1"),
            ],
            template: "find ___ grads in ___",
        },
        Demo {
            site: "recruiting",
            command: "find job candidates who did welding work in Ohio",
            gestures: vec![
                nav(indeed),
                typ("textbox_1", "welding"),
                sel("menu_3", "Ohio"),
                click("button_1"),
            ],
            template: "find job candidates who did ___ work in ___",
        },
        Demo {
            site: "recruiting",
            command: "i ' m looking to hire a MIT student in Texas with Java experience",
            gestures: vec![
                nav(indeed),
                typ("textbox_5", "MIT"),
                sel("menu_3", "Texas"),
                typ("textbox_1", "Java"),
                click("button_1"),
            ],
            template: "i ' m looking to hire a ___ student in ___ with ___ experience",
        },
        Demo {
            site: "cooking_recipes",
            command: "i want to make a casserole with main ingredient chicken with broccoli",
            gestures: vec![
                nav(recipes),
                sel("menu_3", "casserole"),
                sel("menu_4", "chicken"),
                sel("menu_5", "broccoli"),
                click("button_1"),
            ],
            template: "i want to make a ___ with main ingredient ___ with ___",
        },
    ]
}

fn appendix_corpus() -> Outcome {
    let demos = corpus();
    for d in &demos {
        let env = fixtures::site_env(d.site).ok_or_else(|| format!("no env {}", d.site))?;
        let script = record(&env, &d.gestures).map_err(|e| format!("{}: {e}", d.command))?;
        let task = learn(&cmd(d.command), &script).map_err(|e| format!("{}: {e}", d.command))?;
        let got = task.template.render();
        ensure(words(&got) == words(d.template), || {
            format!("{:?}: learned {got:?}, want {:?}", d.command, d.template)
        })?;
        ensure(play(&env, &script).is_ok(), || {
            format!("{}: demo script does not play", d.command)
        })?;
    }
    Ok(format!("{} templates recovered exactly", demos.len()))
}

fn save_all(store: &mut TaskStore, demos: &[(&str, UiScript)]) -> Result<Vec<Task>, String> {
    let mut out = Vec::new();
    for (c, s) in demos {
        let task = learn(&cmd(c), s).map_err(|e| e.to_string())?;
        let id = store.save(task, false).map_err(|e| e.to_string())?;
        out.push(store.get(id).cloned().expect("just saved"));
    }
    Ok(out)
}

fn items(task: &Task) -> Vec<Item<'_>> {
    task.template.key()
}

fn clarification() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut store = TaskStore::open(dir.path().join("tasks.jsonl")).map_err(|e| e.to_string())?;
    let fill = |v: &str| UiScript::new(vec![Action::textbox_fill("textbox_1", v)]).unwrap();
    let fill2 = |a: &str, b: &str| {
        UiScript::new(vec![
            Action::textbox_fill("textbox_1", a),
            Action::textbox_fill("textbox_2", b),
        ])
        .unwrap()
    };
    let tasks = save_all(
        &mut store,
        &[
            ("show stocks", fill("stocks")),
            ("show stocks today", fill("stocks")),
            (FLIGHT_COMMAND, fixtures::flight_script()),
            (
                "find articles by Knuth about typesetting",
                fill2("Knuth", "typesetting"),
            ),
            (
                "find papers by Smith from 2001 to 2010",
                UiScript::new(vec![
                    Action::textbox_fill("textbox_1", "Smith"),
                    Action::textbox_fill("textbox_2", "2001"),
                    Action::textbox_fill("textbox_3", "2010"),
                ])
                .unwrap(),
            ),
        ],
    )?;
    let (t_a, t_b) = (&tasks[0], &tasks[1]);
    ensure(
        t_a.template.render() == "show ___" && t_b.template.render() == "show ___ today",
        || {
            format!(
                "fixture templates {} / {}",
                t_a.template.render(),
                t_b.template.render()
            )
        },
    )?;

    // two templates unify: ranked by shared filler
    let c = cmd("show stocks today");
    let MatchOutcome::Clarify(r) = match_command(&c, &tasks) else {
        return Err("show stocks today matched a single task".into());
    };
    let order: Vec<TaskId> = r.suggestions.iter().map(|s| s.task_id).collect();
    ensure(
        r.kind == ClarificationKind::AmbiguousTemplates && order == vec![t_b.id, t_a.id],
        || format!("ambiguous ranking {:?} {order:?}", r.kind),
    )?;

    // nothing unifies: every template, ranked by the reference distance
    let c = cmd("find papers by Smith");
    let MatchOutcome::Clarify(r) = match_command(&c, &tasks) else {
        return Err("find papers by Smith matched".into());
    };
    let cw: Vec<&str> = c.tokens().iter().map(|t| t.as_str()).collect();
    let mut want: Vec<(f64, u64, TaskId)> = tasks
        .iter()
        .map(|t| {
            let d = oracle_distance(&items(t), &cw) as f64 / t.template.len().max(cw.len()) as f64;
            (d, t.created_at, t.id)
        })
        .collect();
    want.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let got: Vec<(f64, TaskId)> = r.suggestions.iter().map(|s| (s.score, s.task_id)).collect();
    let want: Vec<(f64, TaskId)> = want.into_iter().map(|(d, _, id)| (d, id)).collect();
    ensure(r.kind == ClarificationKind::NoMatch && got == want, || {
        format!("no-match ranking {got:?} != {want:?}")
    })?;
    let articles = got.iter().find(|g| g.1 == tasks[3].id).map(|g| g.0);
    ensure(articles == Some(0.5), || {
        format!("articles template should score 0.5, got {articles:?}")
    })?;

    // fully unifying templates score 0
    let c = cmd("show stocks today");
    let ranked = similarity_rank(&c, &tasks);
    let zero: Vec<TaskId> = ranked.iter().filter(|s| s.score == 0.0).map(|s| s.task_id).collect();
    ensure(zero == vec![t_a.id, t_b.id] && ranked.len() == tasks.len(), || {
        format!("zero-scored {zero:?}")
    })?;

    Ok(
        "overlap order [show ___ today, show ___]; no-match lists all 5 in reference order; unifying templates score 0"
            .into(),
    )
}

fn negative_cases() -> Outcome {
    let script = UiScript::new(vec![
        Action::textbox_fill("textbox_1", "Ford Taurus"),
        Action::textbox_fill("textbox_2", "Tuesday"),
    ])
    .unwrap();
    match learn(&cmd("I need a Ford Taurus Tuesday"), &script) {
        Err(e @ LearnError::AdjacentVariables { .. }) if e.code() == "adjacent_variables" => {}
        other => return Err(format!("adjacent demo gave {other:?}")),
    }

    let script = UiScript::new(vec![Action::textbox_fill("textbox_1", "2")]).unwrap();
    match learn(&cmd("book a room for 2 nights for 2 people"), &script) {
        Err(e @ LearnError::DuplicateValue { .. }) if e.code() == "duplicate_value" => {}
        other => return Err(format!("duplicate demo gave {other:?}")),
    }

    let bad: UiScript =
        serde_json::from_str(&fixtures::FLIGHT_SCRIPT_JSON.replace("\"KLM\"", "\"Air Nowhere\"")).unwrap();
    let trace = play(&fixtures::flight_env(), &bad);
    let err = trace.error().ok_or("unlisted option played cleanly")?;
    ensure(err.index == 3 && matches!(err.outcome, StepOutcome::Error(_)), || {
        format!("error at step {}", err.index)
    })?;
    ensure(trace.ok_steps() == 2 && trace.steps.len() == 3, || {
        format!("trace {:?}", trace.steps)
    })?;
    Ok("adjacent_variables, duplicate_value, menu error at step 3".into())
}

fn without_timestamp(t: &Task) -> serde_json::Value {
    let mut v = serde_json::to_value(t).expect("serializable");
    v.as_object_mut().expect("object").remove("created_at");
    v
}

fn persistence() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("tasks.jsonl");
    let mut seen = HashSet::new();
    let mut saved = Vec::new();
    {
        let mut store = TaskStore::open(&path).map_err(|e| e.to_string())?;
        let mut seed = 0u64;
        while saved.len() < 100 {
            let case = generate(seed);
            seed += 1;
            let values = case.values();
            let Ok(script) = case.script(&values) else { continue };
            let Ok(task) = learn(&case.command(&values), &script) else {
                continue;
            };
            if !seen.insert(task.template.render()) {
                continue;
            }
            let id = store.save(task, false).map_err(|e| e.to_string())?;
            saved.push(store.get(id).cloned().expect("saved"));
        }
    }
    let reopened = TaskStore::open(&path).map_err(|e| e.to_string())?;
    let a: Vec<_> = saved.iter().map(without_timestamp).collect();
    let b: Vec<_> = reopened.list().iter().map(without_timestamp).collect();
    ensure(a == b, || "reopened store differs".into())?;
    let bytes_a: Vec<String> = a.iter().map(|v| v.to_string()).collect();
    let bytes_b: Vec<String> = b.iter().map(|v| v.to_string()).collect();
    ensure(bytes_a == bytes_b, || "serialized tasks differ".into())?;
    let ids: Vec<u64> = reopened.list().iter().map(|t| t.id.0).collect();
    ensure(ids == (1..=100).collect::<Vec<_>>(), || format!("ids {ids:?}"))?;

    let mut store = reopened;
    let dup = saved[0].clone();
    match store.save(dup.clone(), false) {
        Err(StoreError::DuplicateTemplate(id)) if id == saved[0].id => {}
        other => return Err(format!("duplicate save gave {other:?}")),
    }
    ensure(store.len() == 100, || "rejected save changed the store".into())?;
    let id = store.save(dup, true).map_err(|e| e.to_string())?;
    ensure(id == saved[0].id && store.len() == 100, || {
        "forced save did not replace in place".into()
    })?;
    Ok("100 tasks identical after reopen; duplicate rejected without force".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("figure-1 golden", figure_one_golden),
        ("reservation oracle equivalence", reservation_oracle),
        ("round-trip re-execution", round_trip),
        ("template corpus", appendix_corpus),
        ("clarification orderings", clarification),
        ("negative cases", negative_cases),
        ("persistence", persistence),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

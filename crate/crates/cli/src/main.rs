use std::fs;
use std::io::{self, BufRead, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::Context;
use clap::{Parser, Subcommand};
use serde::Serialize;

use helpa_core::matcher::{ClarificationKind, ClarificationResponse};
use helpa_core::sim_env::{ExecutionTrace, StepOutcome};
use helpa_core::store::{self, StoreError};
use helpa_core::{play, record, EnvSpec, Execution, Gesture, MatchOptions, TaskId, TaskStore, UiScript};
use helpa_service::api::{self, ApiError, ApproveResponse, DeleteResponse, ExecuteResponse, LearnResponse, TaskView};
use helpa_service::{AppState, DEFAULT_PORT};

/// Teach tasks from one example and run them with new commands.
#[derive(Debug, Parser)]
#[command(name = "helpa", version)]
struct Cli {
    /// Task database file.
    #[arg(long, global = true, env = store::STORE_ENV_VAR)]
    store: Option<PathBuf>,
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Compare command tokens case-insensitively.
    #[arg(long, global = true)]
    ignore_case: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Learn a task from a command and a recorded UI script.
    Teach {
        #[arg(long)]
        command: String,
        #[arg(long)]
        script: PathBuf,
        /// Save without asking.
        #[arg(long)]
        yes: bool,
        /// Replace a task with the same template.
        #[arg(long)]
        force: bool,
    },
    /// Run a command with a learned task.
    Run {
        command: String,
        /// Play the script against this environment.
        #[arg(long)]
        env: Option<PathBuf>,
        /// Print the script without playing it.
        #[arg(long)]
        dry_run: bool,
    },
    /// List learned tasks.
    List,
    /// Delete a task by id.
    Delete { id: u64 },
    /// Play a script against an environment.
    Simulate {
        #[arg(long)]
        env: PathBuf,
        #[arg(long)]
        script: PathBuf,
    },
    /// Turn a gesture session into a UI script.
    Record {
        #[arg(long)]
        env: PathBuf,
        #[arg(long)]
        session: PathBuf,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, default_value_t = DEFAULT_PORT)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long)]
        env: Option<PathBuf>,
        /// Directory of static assets served at `/`.
        #[arg(long = "static")]
        static_dir: Option<PathBuf>,
    },
}

mod exit {
    pub const OK: u8 = 0;
    pub const FAILURE: u8 = 1;
    pub const LEARN: u8 = 2;
    pub const DUPLICATE: u8 = 3;
    pub const NO_MATCH: u8 = 4;
    pub const AMBIGUOUS: u8 = 5;
}

/// An error carrying its exit status.
struct Failure {
    status: u8,
    error: ApiError,
}

impl From<ApiError> for Failure {
    fn from(error: ApiError) -> Self {
        let status = match error.code {
            "adjacent_variables" | "duplicate_value" | "empty_input" => exit::LEARN,
            "duplicate_template" => exit::DUPLICATE,
            _ => exit::FAILURE,
        };
        Failure { status, error }
    }
}

impl From<StoreError> for Failure {
    fn from(e: StoreError) -> Self {
        ApiError::from(e).into()
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure {
            status: exit::FAILURE,
            error: ApiError::invalid_request(format!("{e:#}")),
        }
    }
}

type Outcome = Result<u8, Failure>;

struct Ctx {
    json: bool,
    opts: MatchOptions,
    store: PathBuf,
}

impl Ctx {
    fn emit<T: Serialize>(&self, body: &T) {
        println!("{}", serde_json::to_string(body).expect("bodies serialize"));
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {what} {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("invalid {what} {}", path.display()))
}

fn read_script(path: &Path) -> Result<UiScript, Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read script {}", path.display()))
        .map_err(Failure::from)?;
    let value = serde_json::from_str(&text)
        .with_context(|| format!("invalid script {}", path.display()))
        .map_err(Failure::from)?;
    Ok(api::parse_script(value)?)
}

fn confirm(question: &str) -> bool {
    print!("{question} [y/N] ");
    let _ = io::stdout().flush();
    let mut line = String::new();
    match io::stdin().lock().read_line(&mut line) {
        Ok(0) | Err(_) => false,
        Ok(_) => matches!(line.trim(), "y" | "Y" | "yes" | "Yes"),
    }
}

fn teach(ctx: &Ctx, command: &str, script: &Path, yes: bool, force: bool) -> Outcome {
    let script = read_script(script)?;
    let (task, variables) = api::propose(command, &script, ctx.opts)?;
    let template = task.template.render();
    if ctx.json {
        ctx.emit(&LearnResponse {
            proposal_id: 0,
            template,
            variables,
        });
    } else {
        println!("template: {template}");
        for v in &variables {
            let actions: Vec<String> = v.actions.iter().map(usize::to_string).collect();
            println!("  {} = {:?}  (action {})", v.var, v.value, actions.join(", "));
        }
    }
    if !yes && !confirm("Save this task?") {
        if ctx.json {
            ctx.emit(&ApproveResponse::default());
        } else {
            println!("not saved");
        }
        return Ok(exit::OK);
    }
    let id = TaskStore::open(&ctx.store)?.save(task, force)?;
    if ctx.json {
        ctx.emit(&ApproveResponse { task_id: Some(id) });
    } else {
        println!("saved task {id}");
    }
    Ok(exit::OK)
}

fn print_clarification(c: &ClarificationResponse, command: &str) {
    match c.kind {
        ClarificationKind::NoMatch if c.suggestions.is_empty() => println!("no tasks have been learned yet"),
        ClarificationKind::NoMatch => println!("no task matches {command:?}; the closest templates are:"),
        ClarificationKind::AmbiguousTemplates => {
            println!("{command:?} matches several tasks; please reword it. Candidates:")
        }
        ClarificationKind::AmbiguousSegmentation => {
            println!("{command:?} can be read in more than one way; please reword it. Template:")
        }
    }
    for (i, s) in c.suggestions.iter().enumerate() {
        println!(
            "  {}. {}  (task {}, score {:.3})",
            i + 1,
            s.template,
            s.task_id,
            s.score
        );
    }
}

fn print_trace(trace: &ExecutionTrace) {
    for step in &trace.steps {
        let a = &step.action;
        let mut line = format!("{:>3} {}", step.index, a.action_type);
        if let Some(e) = &a.element {
            line.push(' ');
            line.push_str(e);
        }
        if let Some(p) = &a.parameter {
            line.push_str(&format!(" {p:?}"));
        }
        match &step.outcome {
            StepOutcome::Ok => println!("{line}  ok"),
            StepOutcome::Error(msg) => println!("{line}  ERROR {msg}"),
        }
    }
    if let Some(page) = &trace.final_page {
        println!("final page: {page}");
    }
}

fn run(ctx: &Ctx, command: &str, env: Option<&Path>, dry_run: bool) -> Outcome {
    let env: Option<EnvSpec> = match env {
        Some(p) if !dry_run => Some(read_json(p, "environment")?),
        _ => None,
    };
    let tasks = store::load(&ctx.store)?;
    let response = api::execute(command, &tasks, ctx.opts, Execution::default())?;
    let (script, status) = match &response {
        ExecuteResponse::Clarification { clarification } => {
            if ctx.json {
                ctx.emit(&response);
            } else {
                print_clarification(clarification, command);
            }
            let status = match clarification.kind {
                ClarificationKind::NoMatch => exit::NO_MATCH,
                _ => exit::AMBIGUOUS,
            };
            return Ok(status);
        }
        ExecuteResponse::Script {
            script,
            task_id,
            assignments,
        } => {
            if ctx.json {
                ctx.emit(&response);
            } else {
                let values: Vec<String> = assignments
                    .iter()
                    .map(|a| format!("{} = {:?}", a.var, a.value))
                    .collect();
                println!("task {task_id}: {}", values.join(", "));
                println!("{}", serde_json::to_string_pretty(script).expect("scripts serialize"));
            }
            (script, exit::OK)
        }
    };
    match env {
        None => Ok(status),
        Some(env) => Ok(show_trace(ctx, &play(&env, script))),
    }
}

fn show_trace(ctx: &Ctx, trace: &ExecutionTrace) -> u8 {
    if ctx.json {
        ctx.emit(trace);
    } else {
        print_trace(trace);
    }
    if trace.is_ok() {
        exit::OK
    } else {
        exit::FAILURE
    }
}

fn list(ctx: &Ctx) -> Outcome {
    let tasks = store::load(&ctx.store)?;
    if ctx.json {
        ctx.emit(&tasks.iter().map(TaskView::from).collect::<Vec<_>>());
    } else if tasks.is_empty() {
        println!("no tasks");
    } else {
        for t in &tasks {
            println!("{:>4}  {}", t.id, t.template.render());
        }
    }
    Ok(exit::OK)
}

fn delete(ctx: &Ctx, id: u64) -> Outcome {
    let removed = TaskStore::open(&ctx.store)?.delete(TaskId(id))?;
    if ctx.json {
        ctx.emit(&DeleteResponse { deleted: removed.id });
    } else {
        println!("deleted task {}: {}", removed.id, removed.template.render());
    }
    Ok(exit::OK)
}

fn simulate(ctx: &Ctx, env: &Path, script: &Path) -> Outcome {
    let env: EnvSpec = read_json(env, "environment")?;
    let script = read_script(script)?;
    Ok(show_trace(ctx, &play(&env, &script)))
}

fn record_session(env: &Path, session: &Path) -> Outcome {
    let env: EnvSpec = read_json(env, "environment")?;
    let session: Vec<Gesture> = read_json(session, "session")?;
    let script = record(&env, &session).context("cannot record session")?;
    println!("{}", script.to_json());
    Ok(exit::OK)
}

fn serve(ctx: &Ctx, host: &str, port: u16, env: Option<&Path>, static_dir: Option<PathBuf>) -> Outcome {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
        .init();
    let env: Option<EnvSpec> = env.map(|p| read_json(p, "environment")).transpose()?;
    let addr: SocketAddr = format!("{host}:{port}").parse().context("invalid listen address")?;
    let state = AppState::new(TaskStore::open(&ctx.store)?, env, ctx.opts);
    let app = helpa_service::router(Arc::new(state), static_dir);
    let runtime = tokio::runtime::Runtime::new().context("cannot start runtime")?;
    runtime
        .block_on(helpa_service::serve(addr, app))
        .context("server failed")?;
    Ok(exit::OK)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::FAILURE } else { exit::OK });
        }
    };
    let ctx = Ctx {
        json: cli.json,
        opts: if cli.ignore_case {
            MatchOptions::ignoring_case()
        } else {
            MatchOptions::EXACT
        },
        store: store::resolve_path(cli.store.as_deref()),
    };
    let outcome = match cli.command {
        Cmd::Teach {
            command,
            script,
            yes,
            force,
        } => teach(&ctx, &command, &script, yes, force),
        Cmd::Run { command, env, dry_run } => run(&ctx, &command, env.as_deref(), dry_run),
        Cmd::List => list(&ctx),
        Cmd::Delete { id } => delete(&ctx, id),
        Cmd::Simulate { env, script } => simulate(&ctx, &env, &script),
        Cmd::Record { env, session } => record_session(&env, &session),
        Cmd::Serve {
            port,
            host,
            env,
            static_dir,
        } => serve(&ctx, &host, port, env.as_deref(), static_dir),
    };
    match outcome {
        Ok(status) => ExitCode::from(status),
        Err(Failure { status, error }) => {
            if ctx.json {
                ctx.emit(&error.body());
            } else {
                eprintln!("error: {}", error.message);
            }
            ExitCode::from(status)
        }
    }
}

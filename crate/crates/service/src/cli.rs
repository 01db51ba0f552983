//! `dispo` command line.

use std::io::{BufRead, Write};
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dispo_core::corpus::CorpusError;
use dispo_core::{
    render_counterfactual, sound, AgentId, Corpus, Feedback, Justification, Next, ParameterId,
    PredictedResponse, Rational64, Response, Scenario, SessionExport, SoundnessVerdict, Store,
    Verdict,
};
use serde_json::json;

use crate::api::{profile_view, serve};
use crate::config::{ServiceConfig, ENV_LISTEN, ENV_STORAGE_DIR};

#[derive(Debug, Parser)]
#[command(
    name = "dispo",
    version,
    about = "Elicit soft-ethics dispositions from questionnaire feedback"
)]
pub struct Cli {
    /// JSON config file (corpora, storage, soundness bounds, labels).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Profile/session storage directory.
    #[arg(long, global = true, env = ENV_STORAGE_DIR)]
    store: Option<PathBuf>,
    /// Corpus file to load; repeatable. Defaults to the built-in corpus.
    #[arg(long = "corpus", global = true)]
    corpora: Vec<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Args)]
struct FormatArg {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate a corpus file.
    Validate {
        file: PathBuf,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Answer a corpus as an agent. Without --interactive, reads one line
    /// per scenario from stdin: `yes|no P1=..,P2=..,P3=..,P4=..`.
    Run {
        #[arg(long)]
        agent: String,
        #[arg(long)]
        interactive: bool,
        /// Resume an existing session instead of starting a new one.
        #[arg(long)]
        session: Option<String>,
    },
    /// Judge a single response and justification.
    Sound {
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        response: String,
        /// e.g. P1=1,P2=1,P3=1,P4=4
        #[arg(long)]
        justification: String,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Inspect agent profiles.
    Profile {
        #[command(subcommand)]
        command: ProfileCommand,
    },
    /// Predict an agent's response to a scenario.
    Predict {
        #[arg(long)]
        agent: String,
        #[arg(long)]
        scenario: String,
        #[command(flatten)]
        format: FormatArg,
    },
    /// Print a session's export document.
    Export {
        #[arg(long)]
        session: String,
    },
    /// Apply an exported session to the store's profiles.
    Replay { file: PathBuf },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, env = ENV_LISTEN)]
        listen: Option<SocketAddr>,
    },
}

#[derive(Debug, Subcommand)]
enum ProfileCommand {
    Show {
        #[arg(long)]
        agent: String,
        #[command(flatten)]
        format: FormatArg,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Message(String),
    #[error(transparent)]
    Core(#[from] dispo_core::Error),
    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

type CliResult = Result<i32, CliError>;

pub struct Io<'a> {
    pub stdin: &'a mut dyn BufRead,
    pub stdout: &'a mut dyn Write,
    pub stderr: &'a mut dyn Write,
}

/// Runs the CLI and returns the process exit code.
pub fn run_cli<I, T>(argv: I, io: Io<'_>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(io.stderr, "{rendered}");
            } else {
                let _ = write!(io.stdout, "{rendered}");
            }
            return code;
        }
    };
    match execute(cli, io.stdin, io.stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(io.stderr, "error: {e}");
            1
        }
    }
}

fn service_config(cli: &Cli) -> Result<ServiceConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => ServiceConfig::load(path)?,
        None => ServiceConfig::default(),
    };
    if let Some(store) = &cli.store {
        cfg.storage_dir = store.clone();
    }
    if !cli.corpora.is_empty() {
        cfg.corpora = cli.corpora.clone();
    }
    Ok(cfg)
}

fn agent(id: &str) -> Result<AgentId, CliError> {
    AgentId::new(id).ok_or_else(|| CliError::Message("agent id must be non-empty".into()))
}

fn write_json(out: &mut dyn Write, value: &impl serde::Serialize) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(|e| CliError::Message(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

fn execute(cli: Cli, stdin: &mut dyn BufRead, out: &mut dyn Write) -> CliResult {
    let cfg = service_config(&cli)?;
    match cli.command {
        Command::Validate { file, format } => validate(&file, format.format, out),
        Command::Sound {
            scenario,
            response,
            justification,
            format,
        } => {
            let corpora = cfg.load_corpora()?;
            let s = find_scenario(&corpora, &scenario)?;
            let response = Response::parse(&response).ok_or_else(|| {
                CliError::Message(format!(
                    "unknown response {response:?} (expected yes or no)"
                ))
            })?;
            let j = Justification::parse_assignments(&justification)
                .map_err(dispo_core::Error::Invalid)?;
            let verdict = sound(s, response, &j, &cfg.soundness);
            match format.format {
                Format::Json => write_json(out, &verdict)?,
                Format::Text => write_verdict(out, &verdict)?,
            }
            Ok(0)
        }
        Command::Run {
            agent: a,
            interactive,
            session,
        } => {
            let store = cfg.open_store()?;
            run_questionnaire(
                &store,
                &agent(&a)?,
                session.as_deref(),
                interactive,
                stdin,
                out,
            )
        }
        Command::Profile {
            command: ProfileCommand::Show { agent: a, format },
        } => {
            let store = cfg.open_store()?;
            let Some(profile) = store.profile(&agent(&a)?)? else {
                return Err(CliError::Message(format!("no profile for agent {a:?}")));
            };
            let view = profile_view(&profile, store.labels());
            match format.format {
                Format::Json => write_json(out, &view)?,
                Format::Text => {
                    writeln!(
                        out,
                        "agent {}: {} observations, {} feedback assessed",
                        view.agent, view.observations, view.assessed
                    )?;
                    for s in &view.summaries {
                        writeln!(
                            out,
                            "{} {}: {} (support {}, mean grade {:.2}, consistency {:.2})",
                            s.dimension,
                            s.category,
                            s.label.as_deref().unwrap_or("tied"),
                            s.summary.support,
                            s.summary.mean_grade,
                            s.summary.consistency
                        )?;
                        if let Some(cf) = &s.counterfactual {
                            writeln!(out, "  {cf}")?;
                        }
                    }
                }
            }
            Ok(0)
        }
        Command::Predict {
            agent: a,
            scenario,
            format,
        } => {
            let store = cfg.open_store()?;
            let s = store
                .scenario(&scenario)
                .ok_or_else(|| CliError::Message(format!("unknown scenario {scenario:?}")))?;
            let prediction = store.predict::<Rational64>(&agent(&a)?, s)?.to_f64();
            match format.format {
                Format::Json => write_json(out, &prediction)?,
                Format::Text => {
                    match prediction.response {
                        PredictedResponse::Abstain => writeln!(out, "abstain")?,
                        r => writeln!(
                            out,
                            "{} (confidence {:.2})",
                            r.as_str(),
                            prediction.confidence
                        )?,
                    }
                    for v in &prediction.rationale {
                        let vote = v.vote.map_or("none (tied)", Response::as_str);
                        writeln!(
                            out,
                            "  {} {:?} on {} {}: votes {vote}, weight {:.2}",
                            v.parameter, v.polarity, v.dimension, prediction.category, v.weight
                        )?;
                    }
                }
            }
            Ok(0)
        }
        Command::Export { session } => {
            let store = cfg.open_store()?;
            out.write_all(&store.export(&session)?.to_json())?;
            writeln!(out)?;
            Ok(0)
        }
        Command::Replay { file } => {
            let store = cfg.open_store()?;
            let bytes = std::fs::read(&file)?;
            let export = SessionExport::from_json(&bytes)?;
            let profile = store.replay(&export)?;
            writeln!(
                out,
                "replayed {} records into profile of {}",
                export.records.len(),
                profile.agent()
            )?;
            Ok(0)
        }
        Command::Serve { listen } => {
            let addr = listen.unwrap_or(cfg.listen);
            let store = Arc::new(cfg.open_store()?);
            let filter = tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("info"));
            let _ = tracing_subscriber::fmt()
                .with_env_filter(filter)
                .with_writer(std::io::stderr)
                .try_init();
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(serve(store, addr))?;
            Ok(0)
        }
    }
}

fn find_scenario<'a>(corpora: &'a [Corpus], id: &str) -> Result<&'a Scenario, CliError> {
    corpora
        .iter()
        .find_map(|c| c.get(id))
        .ok_or_else(|| CliError::Message(format!("unknown scenario {id:?}")))
}

fn validate(file: &std::path::Path, format: Format, out: &mut dyn Write) -> CliResult {
    let result = Corpus::load_file(file);
    let (corpus, errors): (Option<Corpus>, Vec<CorpusError>) = match result {
        Ok(c) => (Some(c), Vec::new()),
        Err(dispo_core::Error::Corpus(errs)) => (None, errs),
        Err(e) => return Err(e.into()),
    };
    match format {
        Format::Json => write_json(
            out,
            &json!({
                "valid": corpus.is_some(),
                "corpus": corpus.as_ref().map(|c| c.id()),
                "scenarios": corpus.as_ref().map(|c| c.len()),
                "violations": errors.iter().map(|e| json!({"path": e.path(), "message": e.to_string()})).collect::<Vec<_>>(),
            }),
        )?,
        Format::Text => match &corpus {
            Some(c) => writeln!(out, "ok: corpus {} with {} scenarios", c.id(), c.len())?,
            None => {
                for e in &errors {
                    writeln!(out, "{}: {e}", e.path())?;
                }
            }
        },
    }
    Ok(if corpus.is_some() { 0 } else { 1 })
}

fn write_verdict(out: &mut dyn Write, v: &SoundnessVerdict) -> std::io::Result<()> {
    writeln!(out, "{}", v.overall)?;
    for (p, pv) in &v.per_parameter {
        writeln!(
            out,
            "  {p}: value {} ({:?}), expected {:?} -> {}",
            pv.value, pv.observed, pv.expected, pv.verdict
        )?;
    }
    Ok(())
}

fn prompt_line(
    stdin: &mut dyn BufRead,
    out: &mut dyn Write,
    prompt: &str,
) -> Result<Option<String>, CliError> {
    if !prompt.is_empty() {
        write!(out, "{prompt}")?;
        out.flush()?;
    }
    let mut line = String::new();
    if stdin.read_line(&mut line)? == 0 {
        return Ok(None);
    }
    Ok(Some(line.trim().to_owned()))
}

fn read_answer(
    stdin: &mut dyn BufRead,
    out: &mut dyn Write,
    interactive: bool,
) -> Result<Option<(Response, Justification)>, CliError> {
    if !interactive {
        let Some(line) = prompt_line(stdin, out, "")? else {
            return Ok(None);
        };
        let (r, j) = line
            .split_once(char::is_whitespace)
            .unwrap_or((line.as_str(), ""));
        let response = Response::parse(r)
            .ok_or_else(|| CliError::Message(format!("unknown response {r:?} in line {line:?}")))?;
        let j = Justification::parse_assignments(j).map_err(dispo_core::Error::Invalid)?;
        return Ok(Some((response, j)));
    }
    let response = loop {
        let Some(line) = prompt_line(stdin, out, "Would you? [yes/no] ")? else {
            return Ok(None);
        };
        match Response::parse(&line) {
            Some(r) => break r,
            None => writeln!(out, "please answer yes or no")?,
        }
    };
    let questions = [
        (ParameterId::P1, "consequences of the action on others"),
        (ParameterId::P2, "consequences of the action on me"),
        (ParameterId::P3, "my personal experiences"),
        (ParameterId::P4, "respect for the law"),
    ];
    let mut j = Justification::from_array([3; 4]);
    for (p, what) in questions {
        let value = loop {
            let Some(line) = prompt_line(
                stdin,
                out,
                &format!("How much did {what} weigh on your choice? [1-5] "),
            )?
            else {
                return Ok(None);
            };
            match line
                .parse::<i64>()
                .ok()
                .and_then(dispo_core::ScaleValue::new)
            {
                Some(v) => break v,
                None => writeln!(out, "please enter a whole number from 1 to 5")?,
            }
        };
        j.set(p, value);
    }
    Ok(Some((response, j)))
}

fn run_questionnaire(
    store: &Store,
    agent: &AgentId,
    resume: Option<&str>,
    interactive: bool,
    stdin: &mut dyn BufRead,
    out: &mut dyn Write,
) -> CliResult {
    let mut session = match resume {
        Some(id) => store.session(id)?,
        None => store.start_session(agent, None)?,
    };
    if session.agent() != agent {
        return Err(CliError::Message(format!(
            "session {} belongs to agent {}",
            session.id(),
            session.agent()
        )));
    }
    writeln!(out, "session {}", session.id())?;
    loop {
        let corpus = store.session_corpus(&session)?;
        let scenario = match session.next_scenario(corpus)? {
            Next::Scenario(s) => s.clone(),
            Next::Done => break,
        };
        if interactive {
            writeln!(
                out,
                "\n[{}/{}] {}",
                session.cursor() + 1,
                session.len(),
                scenario.id()
            )?;
            writeln!(out, "{}", scenario.setting())?;
            writeln!(out, "{}", scenario.problem())?;
            writeln!(out, "Action: {}", scenario.action())?;
        }
        let Some((response, j)) = read_answer(stdin, out, interactive)? else {
            writeln!(
                out,
                "stopped at {}/{}; resume with --session {}",
                session.cursor(),
                session.len(),
                session.id()
            )?;
            return Ok(0);
        };
        let (submission, next) = store.submit(
            session.id(),
            Feedback::new(agent.clone(), scenario.id(), response, j),
        )?;
        write!(out, "{}: ", scenario.id())?;
        write_verdict(out, &submission.verdict)?;
        if submission.verdict.overall != Verdict::Sound {
            writeln!(out, "  no disposition elicited")?;
        }
        for d in &submission.dispositions {
            writeln!(
                out,
                "  {}: {}",
                store.labels().label(d.dimension, d.pole),
                render_counterfactual(d, store.labels())
            )?;
        }
        session = next;
    }
    writeln!(out, "done: {} scenarios answered", session.cursor())?;
    Ok(0)
}

//! HTTP/JSON API over a [`Store`].
//!
//! | route                          | body                                   |
//! |--------------------------------|----------------------------------------|
//! | `GET  /scenarios`              |                                        |
//! | `GET  /scenarios/{id}`         |                                        |
//! | `POST /sessions`               | `{"agent": "a", "corpus": "builtin"?}`   |
//! | `GET  /sessions/{id}`          |                                        |
//! | `POST /sessions/{id}/feedback` | `{"scenario", "response", "justification"}` |
//! | `GET  /sessions/{id}/export`   |                                        |
//! | `GET  /agents/{id}/profile`    |                                        |
//! | `POST /agents/{id}/predict`    | `{"scenario": "id" \| {inline record}}` |
//!
//! Errors are `{"error": code, "message": ..., "violations": [{path, kind, message}]}`
//! with status 400 (validation), 404 (unknown id) or 409 (session ordering).

use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use dispo_core::error::ViolationReport;
use dispo_core::profile::{DispositionSummary, Prediction};
use dispo_core::{
    render_counterfactual, validate_feedback, validate_scenario, AgentId, Category, Dimension,
    Disposition, Error, Next, Pole, PoleLabelTable, RawFeedback, RawScenario, Scenario, Session,
    SoundnessVerdict, Store,
};
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub type AppState = Arc<Store>;

pub fn router(store: AppState) -> Router {
    Router::new()
        .route("/scenarios", get(list_scenarios))
        .route("/scenarios/{id}", get(get_scenario))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/feedback", post(submit_feedback))
        .route("/sessions/{id}/export", get(export_session))
        .route("/agents/{id}/profile", get(get_profile))
        .route("/agents/{id}/predict", post(predict))
        .with_state(store)
}

#[derive(Debug, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    status: StatusCode,
    error: &'static str,
    message: String,
    violations: Vec<ViolationReport>,
}

impl ApiError {
    fn new(status: StatusCode, error: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            error,
            message: message.into(),
            violations: Vec::new(),
        }
    }

    fn invalid(violations: Vec<ViolationReport>) -> Self {
        let message = violations
            .iter()
            .map(|v| v.message.clone())
            .collect::<Vec<_>>()
            .join("; ");
        Self {
            status: StatusCode::BAD_REQUEST,
            error: "invalid",
            message,
            violations,
        }
    }

    fn missing(kind: &str, id: &str) -> Self {
        Self::new(
            StatusCode::NOT_FOUND,
            "not_found",
            format!("unknown {kind} {id:?}"),
        )
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let message = e.to_string();
        match e {
            Error::Invalid(vs) => Self::invalid(vs.iter().map(ViolationReport::from).collect()),
            Error::NotFound { .. } => Self::new(StatusCode::NOT_FOUND, "not_found", message),
            Error::WrongScenario { .. } => {
                Self::new(StatusCode::CONFLICT, "wrong_scenario", message)
            }
            Error::SessionComplete(_) => {
                Self::new(StatusCode::CONFLICT, "session_complete", message)
            }
            Error::WrongAgent { .. } | Error::AgentMismatch { .. } => {
                Self::new(StatusCode::BAD_REQUEST, "wrong_agent", message)
            }
            _ => Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message),
        }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        Self::invalid(vec![ViolationReport {
            path: "$".into(),
            kind: "malformed",
            message: r.body_text(),
        }])
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(&self)).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

#[derive(Serialize)]
pub struct ScenarioView<'a> {
    #[serde(flatten)]
    scenario: &'a Scenario,
    category: Category,
}

impl<'a> From<&'a Scenario> for ScenarioView<'a> {
    fn from(scenario: &'a Scenario) -> Self {
        Self {
            scenario,
            category: scenario.category(),
        }
    }
}

async fn list_scenarios(State(store): State<AppState>) -> Json<Value> {
    let views: Vec<ScenarioView> = store.scenarios().map(ScenarioView::from).collect();
    Json(serde_json::to_value(views).expect("serializable"))
}

async fn get_scenario(State(store): State<AppState>, Path(id): Path<String>) -> ApiResult<Value> {
    let s = store
        .scenario(&id)
        .ok_or_else(|| ApiError::missing("scenario", &id))?;
    Ok(Json(
        serde_json::to_value(ScenarioView::from(s)).expect("serializable"),
    ))
}

#[derive(Debug, Deserialize)]
struct CreateSession {
    agent: Option<String>,
    corpus: Option<String>,
}

#[derive(Serialize)]
struct SessionState<'a> {
    id: &'a str,
    agent: &'a AgentId,
    corpus: &'a str,
    cursor: usize,
    total: usize,
}

#[derive(Serialize)]
struct SessionView<'a> {
    session: SessionState<'a>,
    done: bool,
    next: Option<ScenarioView<'a>>,
}

fn session_view<'a>(store: &'a Store, session: &'a Session) -> Result<SessionView<'a>, ApiError> {
    let corpus = store.session_corpus(session)?;
    let next = match session.next_scenario(corpus)? {
        Next::Scenario(s) => Some(ScenarioView::from(s)),
        Next::Done => None,
    };
    Ok(SessionView {
        session: SessionState {
            id: session.id(),
            agent: session.agent(),
            corpus: session.corpus_id(),
            cursor: session.cursor(),
            total: session.len(),
        },
        done: next.is_none(),
        next,
    })
}

fn agent_id(raw: Option<String>, path: &str) -> Result<AgentId, ApiError> {
    let report = |kind, message: &str| ViolationReport {
        path: path.into(),
        kind,
        message: format!("{path}: {message}"),
    };
    match raw {
        None => Err(ApiError::invalid(vec![report("missing_field", "missing")])),
        Some(a) => AgentId::new(a)
            .ok_or_else(|| ApiError::invalid(vec![report("empty_text", "must be non-empty")])),
    }
}

async fn create_session(
    State(store): State<AppState>,
    body: Result<Json<CreateSession>, JsonRejection>,
) -> Result<(StatusCode, Json<Value>), ApiError> {
    let Json(body) = body?;
    let agent = agent_id(body.agent, "agent")?;
    let session = store.start_session(&agent, body.corpus.as_deref())?;
    let view = session_view(&store, &session)?;
    Ok((
        StatusCode::CREATED,
        Json(serde_json::to_value(view).expect("serializable")),
    ))
}

async fn get_session(State(store): State<AppState>, Path(id): Path<String>) -> ApiResult<Value> {
    let session = store.session(&id)?;
    let view = session_view(&store, &session)?;
    Ok(Json(serde_json::to_value(view).expect("serializable")))
}

#[derive(Serialize)]
pub struct DispositionView<'a> {
    #[serde(flatten)]
    disposition: &'a Disposition,
    label: &'a str,
    counterfactual: String,
}

fn disposition_view<'a>(d: &'a Disposition, labels: &'a PoleLabelTable) -> DispositionView<'a> {
    DispositionView {
        disposition: d,
        label: labels.label(d.dimension, d.pole),
        counterfactual: render_counterfactual(d, labels),
    }
}

#[derive(Serialize)]
struct FeedbackResult<'a> {
    verdict: &'a SoundnessVerdict,
    dispositions: Vec<DispositionView<'a>>,
    #[serde(flatten)]
    session: SessionView<'a>,
}

async fn submit_feedback(
    State(store): State<AppState>,
    Path(id): Path<String>,
    body: Result<Json<RawFeedback>, JsonRejection>,
) -> ApiResult<Value> {
    let Json(mut raw) = body?;
    let session = store.session(&id)?;
    if raw.agent.is_none() {
        raw.agent = Some(session.agent().to_string());
    }
    let feedback = validate_feedback(&raw).map_err(Error::Invalid)?;
    let (submission, session) = store.submit(&id, feedback)?;
    let labels = store.labels();
    let result = FeedbackResult {
        verdict: &submission.verdict,
        dispositions: submission
            .dispositions
            .iter()
            .map(|d| disposition_view(d, labels))
            .collect(),
        session: session_view(&store, &session)?,
    };
    Ok(Json(serde_json::to_value(result).expect("serializable")))
}

async fn export_session(State(store): State<AppState>, Path(id): Path<String>) -> ApiResult<Value> {
    let export = store.export(&id)?;
    Ok(Json(serde_json::to_value(export).expect("serializable")))
}

#[derive(Serialize)]
pub struct SummaryView {
    pub dimension: Dimension,
    pub category: Category,
    pub label: Option<String>,
    #[serde(flatten)]
    pub summary: DispositionSummary<f64>,
    /// Rendered from the latest observation agreeing with the dominant pole.
    pub counterfactual: Option<String>,
}

#[derive(Serialize)]
pub struct ProfileView {
    pub agent: AgentId,
    pub summaries: Vec<SummaryView>,
    pub observations: usize,
    pub assessed: usize,
}

pub fn profile_view(profile: &dispo_core::Profile, labels: &PoleLabelTable) -> ProfileView {
    let summaries = profile
        .summaries::<dispo_core::Rational64>()
        .into_iter()
        .map(|((dimension, category), summary)| {
            let pole: Option<Pole> = summary.dominant_pole.pole();
            let counterfactual = pole.and_then(|pole| {
                profile
                    .observations(dimension, category)
                    .iter()
                    .rev()
                    .find(|d| d.pole == pole)
                    .map(|d| render_counterfactual(d, labels))
            });
            SummaryView {
                dimension,
                category,
                label: pole.map(|p| labels.label(dimension, p).to_owned()),
                summary: summary.to_f64(),
                counterfactual,
            }
        })
        .collect();
    ProfileView {
        agent: profile.agent().clone(),
        summaries,
        observations: profile.repertoire().values().map(Vec::len).sum(),
        assessed: profile
            .audit()
            .iter()
            .filter(|e| matches!(e, dispo_core::profile::AuditEntry::Assessed { .. }))
            .count(),
    }
}

async fn get_profile(
    State(store): State<AppState>,
    Path(id): Path<String>,
) -> ApiResult<ProfileView> {
    let agent = AgentId::new(id.clone()).ok_or_else(|| ApiError::missing("agent", &id))?;
    let profile = store
        .profile(&agent)?
        .ok_or_else(|| ApiError::missing("agent", &id))?;
    Ok(Json(profile_view(&profile, store.labels())))
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum ScenarioRef {
    Id(String),
    Inline(RawScenario),
}

#[derive(Debug, Deserialize)]
struct PredictBody {
    scenario: ScenarioRef,
}

async fn predict(
    State(store): State<AppState>,
    Path(id): Path<String>,
    body: Result<Json<PredictBody>, JsonRejection>,
) -> ApiResult<Prediction<f64>> {
    let Json(body) = body?;
    let agent = AgentId::new(id.clone()).ok_or_else(|| ApiError::missing("agent", &id))?;
    let inline;
    let scenario = match &body.scenario {
        ScenarioRef::Id(sid) => store
            .scenario(sid)
            .ok_or_else(|| ApiError::missing("scenario", sid))?,
        ScenarioRef::Inline(raw) => {
            let mut raw = raw.clone();
            raw.id.get_or_insert_with(|| "draft".into());
            inline = validate_scenario(&raw).map_err(|vs| {
                ApiError::invalid(vs.into_iter().map(|v| v.prefixed("scenario")).collect())
            })?;
            &inline
        }
    };
    let prediction = store.predict::<dispo_core::Rational64>(&agent, scenario)?;
    Ok(Json(prediction.to_f64()))
}

/// Binds `addr` and serves until ctrl-c.
pub async fn serve(store: AppState, addr: std::net::SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, router(store))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

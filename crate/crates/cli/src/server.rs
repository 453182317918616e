//! HTTP/JSON service hosting interactive diagnosis sessions.
//!
//! A session keeps the human answers given so far and re-runs its diagnosis
//! against them after every answer, so its state is a function of the
//! answer journal.

use std::collections::{BTreeMap, HashMap};
use std::path::PathBuf;
use std::sync::{Arc, Mutex};
use std::time::{SystemTime, UNIX_EPOCH};

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use boxdiag::boxtrace::{answer_views, search_trace_of, sicstus_view};
use boxdiag::diagnoser::{Stop, Strategy};
use boxdiag::engine::{solve, Budget, Run};
use boxdiag::kernel::{parse_atom, parse_program, ParseError, Program, Query as Goal};
use boxdiag::oracle::{JournalEntry, Question, SpecError, SpecFile, Verdict};

use crate::job::{stop_kind, Job, Kind, Located};
use crate::json::{self, QuestionJson};

#[derive(Default)]
pub struct AppState {
    programs: Mutex<HashMap<u64, Program>>,
    specs: Mutex<HashMap<u64, SpecFile>>,
    sessions: Mutex<HashMap<u64, Arc<Mutex<Session>>>>,
    next_id: Mutex<u64>,
    journal_dir: Option<PathBuf>,
}

impl AppState {
    pub fn new(journal_dir: Option<PathBuf>) -> Self {
        AppState { journal_dir, ..AppState::default() }
    }

    fn fresh_id(&self) -> u64 {
        let mut n = self.next_id.lock().unwrap();
        *n += 1;
        *n
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionState {
    Running,
    AwaitingAnswer,
    Done,
    Undecided,
}

pub struct Session {
    id: u64,
    job: Job,
    run: Run,
    answers: BTreeMap<u64, Verdict>,
    journal: Vec<JournalEntry>,
    state: SessionState,
    pending: Option<Question>,
    result: Option<Located>,
    stop: Option<Stop>,
}

impl Session {
    fn new(id: u64, job: Job) -> Session {
        let run = solve(&Goal::atom(job.query.clone()), &job.program, job.budget);
        Session {
            id,
            job,
            run,
            answers: BTreeMap::new(),
            journal: Vec::new(),
            state: SessionState::Running,
            pending: None,
            result: None,
            stop: None,
        }
    }

    fn advance(&mut self) {
        self.state = SessionState::Running;
        let (res, _) = self.job.replay(&self.answers);
        self.pending = None;
        self.result = None;
        self.stop = None;
        match res {
            Ok(r) => {
                self.result = Some(r);
                self.state = SessionState::Done;
            }
            Err(Stop::Awaiting(q)) => {
                self.pending = Some(q);
                self.state = SessionState::AwaitingAnswer;
            }
            Err(s) => {
                self.stop = Some(s);
                self.state = SessionState::Undecided;
            }
        }
    }

    fn answer(&mut self, verdict: Verdict) {
        let q = self.pending.take().expect("checked by the caller");
        self.answers.insert(q.seq, verdict);
        self.journal.push(JournalEntry {
            seq: q.seq,
            role: q.role,
            kind: q.kind,
            atom: q.atom.to_string(),
            verdict,
            timestamp_ms: now_ms(),
        });
        self.advance();
    }

    fn result_json(&self) -> Option<Value> {
        self.result.as_ref().map(|r| serde_json::to_value(r.to_json(&self.job.program)).unwrap())
    }

    fn view(&self) -> Value {
        json!({
            "id": self.id,
            "kind": self.job.kind,
            "query": json::TermJson::from(&self.job.query),
            "state": self.state,
            "pending_question": self.pending.as_ref().map(QuestionJson::from),
            "result": self.result_json(),
            "stop": self.stop.as_ref().map(|s| json!({"kind": stop_kind(s), "message": s.to_string()})),
            "journal": self.journal,
        })
    }
}

fn now_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis() as u64).unwrap_or(0)
}

/// An error response: `{"error": {"kind", "message", ...}}`.
struct ApiError {
    status: StatusCode,
    body: Value,
}

impl ApiError {
    fn new(status: StatusCode, kind: &str, message: impl Into<String>) -> Self {
        ApiError { status, body: json!({"error": {"kind": kind, "message": message.into()}}) }
    }

    fn not_found(what: &str, id: u64) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, "not-found", format!("no {what} {id}"))
    }

    fn parse(what: &str, e: &ParseError) -> Self {
        ApiError {
            status: StatusCode::UNPROCESSABLE_ENTITY,
            body: json!({"error": {
                "kind": "parse",
                "message": format!("{what}: {e}"),
                "line": e.line,
                "column": e.column,
                "expected": e.expected,
                "found": e.found,
            }}),
        }
    }

    fn spec(e: &SpecError) -> Self {
        let mut err = ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "spec", e.to_string());
        if let SpecError::Parse { source, .. } = e {
            err.body["error"]["line"] = json!(source.line);
            err.body["error"]["column"] = json!(source.column);
        }
        err
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

type ApiResult = Result<Response, ApiError>;

fn ok(status: StatusCode, body: Value) -> ApiResult {
    Ok((status, Json(body)).into_response())
}

#[derive(Deserialize)]
struct TextBody {
    text: String,
}

async fn create_program(State(st): State<Arc<AppState>>, Json(b): Json<TextBody>) -> ApiResult {
    let p = parse_program(&b.text).map_err(|e| ApiError::parse("program", &e))?;
    let id = st.fresh_id();
    let clauses = p.len();
    st.programs.lock().unwrap().insert(id, p);
    ok(StatusCode::CREATED, json!({"id": id, "clauses": clauses}))
}

async fn create_spec(State(st): State<Arc<AppState>>, Json(b): Json<TextBody>) -> ApiResult {
    let s = SpecFile::parse(&b.text).map_err(|e| ApiError::spec(&e))?;
    let id = st.fresh_id();
    let sections = json!({"corr": s.corr.is_some(), "compl": s.compl.is_some()});
    st.specs.lock().unwrap().insert(id, s);
    ok(StatusCode::CREATED, json!({"id": id, "sections": sections}))
}

#[derive(Deserialize)]
struct AnswerRecord {
    seq: u64,
    verdict: Verdict,
}

#[derive(Deserialize)]
struct NewSession {
    program: u64,
    spec: u64,
    kind: Kind,
    query: String,
    #[serde(default)]
    strategy: Strategy,
    restart: Option<bool>,
    budget: Option<Budget>,
    /// Answers to replay, e.g. a journal of an earlier session.
    #[serde(default)]
    answers: Vec<AnswerRecord>,
}

async fn create_session(State(st): State<Arc<AppState>>, Json(b): Json<NewSession>) -> ApiResult {
    let program = st.programs.lock().unwrap().get(&b.program).cloned().ok_or(ApiError::not_found("program", b.program))?;
    let spec = st.specs.lock().unwrap().get(&b.spec).cloned().ok_or(ApiError::not_found("spec", b.spec))?;
    let query = parse_atom(&b.query).map_err(|e| ApiError::parse("query", &e))?;
    let restart = b.restart.unwrap_or(b.kind == Kind::Incompleteness);
    let job = Job::new(b.kind, program, &spec, query, b.strategy, restart, b.budget.unwrap_or_default())
        .map_err(|e| ApiError::spec(&e))?;
    let id = st.fresh_id();
    let session = tokio::task::spawn_blocking(move || {
        let mut s = Session::new(id, job);
        for a in b.answers {
            s.answers.insert(a.seq, a.verdict);
        }
        s.advance();
        // keep journal entries for replayed answers that were actually used
        let (_, used) = s.job.replay(&s.answers);
        s.journal = used;
        s
    })
    .await
    .expect("session task");
    let view = session.view();
    st.sessions.lock().unwrap().insert(id, Arc::new(Mutex::new(session)));
    ok(StatusCode::CREATED, view)
}

fn session(st: &AppState, id: u64) -> Result<Arc<Mutex<Session>>, ApiError> {
    st.sessions.lock().unwrap().get(&id).cloned().ok_or(ApiError::not_found("session", id))
}

async fn get_session(State(st): State<Arc<AppState>>, Path(id): Path<u64>) -> ApiResult {
    let s = session(&st, id)?;
    let view = s.lock().unwrap().view();
    ok(StatusCode::OK, view)
}

async fn get_question(State(st): State<Arc<AppState>>, Path(id): Path<u64>) -> ApiResult {
    let s = session(&st, id)?;
    let s = s.lock().unwrap();
    match &s.pending {
        Some(q) => ok(StatusCode::OK, json!(QuestionJson::from(q))),
        None => ok(StatusCode::NOT_FOUND, json!({"state": s.state, "question": null})),
    }
}

#[derive(Deserialize)]
struct AnswerBody {
    seq: Option<u64>,
    verdict: String,
}

async fn post_answer(State(st): State<Arc<AppState>>, Path(id): Path<u64>, Json(b): Json<AnswerBody>) -> ApiResult {
    let verdict = Verdict::parse(&b.verdict).ok_or_else(|| {
        ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "verdict", format!("unknown verdict `{}`", b.verdict))
    })?;
    let s = session(&st, id)?;
    let journal_dir = st.journal_dir.clone();
    let view = tokio::task::spawn_blocking(move || {
        let mut s = s.lock().unwrap();
        let Some(q) = &s.pending else {
            return Err(ApiError::new(StatusCode::CONFLICT, "no-question", format!("session {id} is {:?}", s.state)));
        };
        if let Some(seq) = b.seq {
            if seq != q.seq {
                return Err(ApiError::new(
                    StatusCode::CONFLICT,
                    "stale-question",
                    format!("question {seq} is not pending (pending: {})", q.seq),
                ));
            }
        }
        s.answer(verdict);
        if let Some(dir) = journal_dir {
            let path = dir.join(format!("session-{id}.json"));
            let _ = std::fs::write(path, serde_json::to_vec_pretty(&s.journal).unwrap());
        }
        Ok(s.view())
    })
    .await
    .expect("answer task")?;
    ok(StatusCode::OK, view)
}

async fn get_result(State(st): State<Arc<AppState>>, Path(id): Path<u64>) -> ApiResult {
    let s = session(&st, id)?;
    let s = s.lock().unwrap();
    match s.result_json() {
        Some(r) => ok(StatusCode::OK, r),
        None => ok(
            StatusCode::NOT_FOUND,
            json!({
                "state": s.state,
                "result": null,
                "stop": s.stop.as_ref().map(|e| json!({"kind": stop_kind(e), "message": e.to_string()})),
            }),
        ),
    }
}

#[derive(Deserialize)]
struct TreeParams {
    answer: Option<usize>,
}

async fn get_prooftree(
    State(st): State<Arc<AppState>>,
    Path(id): Path<u64>,
    Query(q): Query<TreeParams>,
) -> ApiResult {
    let s = session(&st, id)?;
    let s = s.lock().unwrap();
    let k = q.answer.unwrap_or(1);
    let views = k.checked_sub(1).and_then(|i| answer_views(&s.run, i));
    match views {
        Some((_, tree)) => ok(StatusCode::OK, json!({"answer": k, "tree": json::proof_tree(&tree)})),
        None => Err(ApiError::new(
            StatusCode::NOT_FOUND,
            "no-answer",
            format!("the query has {} computed answers", s.run.answers.len()),
        )),
    }
}

#[derive(Deserialize)]
struct TraceParams {
    #[serde(default)]
    sicstus: bool,
}

async fn get_trace(State(st): State<Arc<AppState>>, Path(id): Path<u64>, Query(q): Query<TraceParams>) -> ApiResult {
    let s = session(&st, id)?;
    let s = s.lock().unwrap();
    let events = if q.sicstus { sicstus_view(&s.run.events) } else { s.run.events.clone() };
    ok(
        StatusCode::OK,
        json!({
            "events": json::events(&events),
            "answers": json::terms(&s.run.answer_atoms()),
            "search_trace": json::SearchTraceJson::from(&search_trace_of(&s.run)),
            "status": s.run.stats.status,
        }),
    )
}

async fn get_journal(State(st): State<Arc<AppState>>, Path(id): Path<u64>) -> ApiResult {
    let s = session(&st, id)?;
    let journal = s.lock().unwrap().journal.clone();
    ok(StatusCode::OK, json!(journal))
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/programs", post(create_program))
        .route("/specs", post(create_spec))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/question", get(get_question))
        .route("/sessions/{id}/answer", post(post_answer))
        .route("/sessions/{id}/result", get(get_result))
        .route("/sessions/{id}/prooftree", get(get_prooftree))
        .route("/sessions/{id}/trace", get(get_trace))
        .route("/sessions/{id}/journal", get(get_journal))
        .with_state(state)
}

pub async fn serve(addr: &str, journal_dir: Option<PathBuf>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(Arc::new(AppState::new(journal_dir)))).await
}

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use boxdiag::boxtrace::{
    answer_views, reconstruct_success_trace, render_events, search_trace_for, sicstus_view,
};
use boxdiag::diagnoser::Strategy;
use boxdiag::engine::{solve, Budget};
use boxdiag::kernel::{parse_atom, parse_program, parse_query, Program, Term};
use boxdiag::oracle::{ChannelError, HumanChannel, OnMissing, Question, ScriptedChannel, SpecFile, Verdict};

use boxdiag_cli::job::{stop_kind, Job, Kind};

#[derive(Parser)]
#[command(name = "boxdiag", version, about = "Pure Prolog with a box tracer and declarative diagnosis")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone, Copy)]
struct BudgetArgs {
    #[arg(long, default_value_t = Budget::default().max_steps)]
    max_steps: usize,
    #[arg(long, default_value_t = Budget::default().max_depth)]
    max_depth: usize,
    #[arg(long, default_value_t = Budget::default().max_answers)]
    max_answers: usize,
}

impl From<BudgetArgs> for Budget {
    fn from(b: BudgetArgs) -> Self {
        Budget { max_steps: b.max_steps, max_depth: b.max_depth, max_answers: b.max_answers }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Program file.
    file: PathBuf,
    /// Query text, e.g. 'app(X,Y,[1,2])'.
    #[arg(short, long)]
    query: String,
    #[command(flatten)]
    budget: BudgetArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Corr,
    Compl,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the computed answers, one per line.
    Solve(RunArgs),
    /// Print the four-port event trace.
    Trace {
        #[command(flatten)]
        run: RunArgs,
        /// Hide Redo items of deterministic exits, as SICStus does.
        #[arg(long)]
        sicstus_redo: bool,
    },
    /// Print the top-level success trace of an answer.
    SuccessTrace {
        /// Program file; omit with --events.
        file: Option<PathBuf>,
        #[arg(short, long)]
        query: Option<String>,
        /// 1-based answer number.
        #[arg(long, default_value_t = 1)]
        answer: usize,
        /// Reconstruct from saved trace text instead of running.
        #[arg(long, requires = "exit_line", conflicts_with_all = ["file", "query"])]
        events: Option<PathBuf>,
        /// 1-based line of the Exit item in the --events file.
        #[arg(long)]
        exit_line: Option<usize>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Print the top-level search trace of an atom.
    SearchTrace(RunArgs),
    /// Print the proof tree of an answer.
    Prooftree {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 1)]
        answer: usize,
    },
    /// Locate an incorrect clause (corr) or an incomplete procedure (compl).
    Diagnose {
        target: Target,
        file: PathBuf,
        #[arg(long)]
        spec: PathBuf,
        #[arg(short, long)]
        query: String,
        /// Ask unresolved questions on the terminal.
        #[arg(long, conflicts_with = "answers")]
        interactive: bool,
        /// Scripted answers: {"1": "no", ...} or a session journal.
        #[arg(long)]
        answers: Option<PathBuf>,
        #[arg(long)]
        json: bool,
        #[arg(long, default_value = "prooftree")]
        strategy: Strategy,
        /// corr: re-run the engine on each wrong answer found.
        #[arg(long)]
        restart: bool,
        /// compl: descend from the atom itself, not from ground witnesses.
        #[arg(long)]
        no_witness_restart: bool,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Serve diagnosis sessions over HTTP.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: String,
        /// Write each session's answer journal here.
        #[arg(long)]
        journal_dir: Option<PathBuf>,
    },
}

/// Failures that end a run: the kind goes in the error line.
struct Failure {
    kind: &'static str,
    code: u8,
    err: anyhow::Error,
}

fn fail(kind: &'static str, err: anyhow::Error) -> Failure {
    Failure { kind, code: 1, err }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(|e| fail("io", e))
}

fn load_program(path: &Path) -> Result<Program, Failure> {
    let text = read(path)?;
    parse_program(&text).map_err(|e| fail("parse", anyhow!("{}: {e}", path.display())))
}

fn load_atom(q: &str) -> Result<Term, Failure> {
    parse_atom(q).map_err(|e| fail("parse", anyhow!("query: {e}")))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum AnswerFile {
    Map(BTreeMap<String, String>),
    List(Vec<AnswerRecord>),
}

#[derive(Deserialize)]
struct AnswerRecord {
    seq: u64,
    verdict: String,
}

fn load_answers(path: &Path) -> Result<BTreeMap<u64, Verdict>, Failure> {
    let text = read(path)?;
    let file: AnswerFile = serde_json::from_str(&text)
        .map_err(|e| fail("answers", anyhow!("{}: {e}", path.display())))?;
    let pairs: Vec<(String, String)> = match file {
        AnswerFile::Map(m) => m.into_iter().collect(),
        AnswerFile::List(l) => l.into_iter().map(|r| (r.seq.to_string(), r.verdict)).collect(),
    };
    pairs
        .into_iter()
        .map(|(k, v)| {
            let seq = k.parse().map_err(|_| fail("answers", anyhow!("bad question number `{k}`")))?;
            let verdict = Verdict::parse(&v).ok_or_else(|| fail("answers", anyhow!("bad verdict `{v}`")))?;
            Ok((seq, verdict))
        })
        .collect()
}

/// Asks on stderr and reads y/n/? from stdin.
struct Terminal;

impl HumanChannel for Terminal {
    fn ask(&mut self, q: &Question) -> Result<Verdict, ChannelError> {
        let stdin = std::io::stdin();
        loop {
            eprint!("[{}] {} ({}) [y/n/?] ", q.seq, q, q.context);
            let _ = std::io::stderr().flush();
            let mut line = String::new();
            match stdin.lock().read_line(&mut line) {
                Ok(0) | Err(_) => return Err(ChannelError::Closed),
                Ok(_) => {}
            }
            if let Some(v) = Verdict::parse(&line) {
                return Ok(v);
            }
        }
    }
}

fn run(cli: Cli) -> Result<String, Failure> {
    let mut out = String::new();
    match cli.cmd {
        Cmd::Solve(a) => {
            let p = load_program(&a.file)?;
            let q = parse_query(&a.query).map_err(|e| fail("parse", anyhow!("query: {e}")))?;
            let r = solve(&q, &p, a.budget.into());
            for ans in &r.answers {
                let atoms: Vec<String> = ans.answer.atoms.iter().map(Term::to_string).collect();
                out.push_str(&atoms.join(", "));
                out.push('\n');
            }
            if r.answers.is_empty() && !r.is_truncated() {
                out.push_str("no\n");
            }
            if let boxdiag::engine::SearchStatus::Truncated(t) = r.stats.status {
                out.push_str(&format!("% truncated: {t}\n"));
            }
        }
        Cmd::Trace { run, sicstus_redo } => {
            let p = load_program(&run.file)?;
            let q = parse_query(&run.query).map_err(|e| fail("parse", anyhow!("query: {e}")))?;
            let r = solve(&q, &p, run.budget.into());
            let events = if sicstus_redo { sicstus_view(&r.events) } else { r.events };
            out = render_events(&events);
        }
        Cmd::SuccessTrace { file, query, answer, events, exit_line, budget } => {
            if let Some(path) = events {
                let text = read(&path)?;
                let line = exit_line.expect("required by clap");
                let trace = reconstruct_success_trace(&text, line)
                    .map_err(|e| fail("trace", anyhow!("{}: {e}", path.display())))?;
                for t in trace {
                    out.push_str(&format!("{t}\n"));
                }
            } else {
                let file = file.ok_or_else(|| fail("usage", anyhow!("a program file or --events is needed")))?;
                let query = query.ok_or_else(|| fail("usage", anyhow!("--query is needed")))?;
                let p = load_program(&file)?;
                let a = load_atom(&query)?;
                let r = solve(&boxdiag::kernel::Query::atom(a), &p, budget.into());
                let (t, _) = answer_index(&r, answer).and_then(|k| answer_views(&r, k)).ok_or_else(|| {
                    fail("no-answer", anyhow!("answer {answer} of {} computed", r.answers.len()))
                })?;
                out.push_str(&format!("{} -> {}  [clause {}]\n", t.call, t.answer, t.clause));
                for x in &t.answers {
                    out.push_str(&format!("  {x}\n"));
                }
            }
        }
        Cmd::SearchTrace(a) => {
            let p = load_program(&a.file)?;
            let atom = load_atom(&a.query)?;
            let (t, _) = search_trace_for(&atom, &p, a.budget.into());
            out = t.to_string();
        }
        Cmd::Prooftree { run, answer } => {
            let p = load_program(&run.file)?;
            let a = load_atom(&run.query)?;
            let r = solve(&boxdiag::kernel::Query::atom(a), &p, run.budget.into());
            let (_, tree) = answer_index(&r, answer).and_then(|k| answer_views(&r, k)).ok_or_else(|| {
                fail("no-answer", anyhow!("answer {answer} of {} computed", r.answers.len()))
            })?;
            out = tree.to_string();
        }
        Cmd::Diagnose {
            target,
            file,
            spec,
            query,
            interactive,
            answers,
            json,
            strategy,
            restart,
            no_witness_restart,
            budget,
        } => {
            let p = load_program(&file)?;
            let spec_text = read(&spec)?;
            let spec_file = SpecFile::parse(&spec_text).map_err(|e| fail("spec", anyhow!("{}: {e}", spec.display())))?;
            let a = load_atom(&query)?;
            let (kind, restart) = match target {
                Target::Corr => (Kind::Incorrectness, restart),
                Target::Compl => (Kind::Incompleteness, !no_witness_restart),
            };
            let job = Job::new(kind, p.clone(), &spec_file, a, strategy, restart, budget.into())
                .map_err(|e| fail("spec", anyhow!("{}: {e}", spec.display())))?;
            let channel: Box<dyn HumanChannel + Send> = if interactive {
                Box::new(Terminal)
            } else {
                let script = match &answers {
                    Some(path) => load_answers(path)?,
                    None => BTreeMap::new(),
                };
                Box::new(ScriptedChannel::new(script, OnMissing::Close))
            };
            let (res, _) = job.run(channel);
            match res {
                Ok(located) => {
                    if json {
                        out = serde_json::to_string_pretty(&located.to_json(&p)).expect("serializable");
                        out.push('\n');
                    } else {
                        out = located.render(&p);
                    }
                }
                Err(stop) => {
                    let kind = stop_kind(&stop);
                    return Err(Failure { kind, code: 3, err: anyhow!("{stop}") });
                }
            }
        }
        Cmd::Serve { addr, journal_dir } => {
            if let Some(d) = &journal_dir {
                std::fs::create_dir_all(d).map_err(|e| fail("io", e.into()))?;
            }
            let rt = tokio::runtime::Runtime::new().map_err(|e| fail("io", e.into()))?;
            rt.block_on(boxdiag_cli::server::serve(&addr, journal_dir)).map_err(|e| fail("io", e.into()))?;
        }
    }
    Ok(out)
}

fn answer_index(r: &boxdiag::engine::Run, one_based: usize) -> Option<usize> {
    one_based.checked_sub(1).filter(|&k| k < r.answers.len())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}: {:#}", f.kind, f.err);
            ExitCode::from(f.code)
        }
    }
}

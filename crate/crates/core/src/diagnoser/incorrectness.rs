//! Incorrectness diagnosis over proof trees and box traces.

use crate::boxtrace::{
    answer_exit, exit_subderivation, proof_tree_for, success_trace_at, Port, ProofTree,
};
use crate::engine::{solve, Budget, Run, Truncation};
use crate::kernel::{is_variant, Program, Query, Term};
use crate::oracle::{Oracle, Role, Verdict};

use super::{need, truncation, IncorrectnessResult, Stop};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TraceMode {
    /// Scan all top-level Exit items instead of the success trace.
    pub scan: bool,
    /// Re-run the engine on each incorrect answer found.
    pub restart: bool,
}

fn path_context(path: &[usize]) -> String {
    let mut s = String::from("prooftree /");
    s.push_str(&path.iter().map(usize::to_string).collect::<Vec<_>>().join("/"));
    s
}

/// Root-to-leaf search: descend into the leftmost incorrect child until all
/// children of a node are correct.
pub fn diagnose_incorrectness(tree: &ProofTree, oracle: &mut Oracle) -> Result<IncorrectnessResult, Stop> {
    need(oracle, Role::Corr)?;
    let start = oracle.log().len();
    let mut path = Vec::new();
    match oracle.judge(Role::Corr, &tree.atom, &path_context(&path))? {
        Verdict::No => {}
        Verdict::Yes => return Err(Stop::NotASymptom(tree.atom.clone())),
        Verdict::Unknown => {
            return Err(Stop::Undecided { atom: tree.atom.clone(), context: path_context(&path) })
        }
    }
    let mut node = tree;
    'descend: loop {
        for (i, c) in node.children.iter().enumerate() {
            path.push(i);
            let context = path_context(&path);
            match oracle.judge(Role::Corr, &c.atom, &context)? {
                Verdict::No => {
                    node = c;
                    continue 'descend;
                }
                Verdict::Yes => {
                    path.pop();
                }
                Verdict::Unknown => return Err(Stop::Undecided { atom: c.atom.clone(), context }),
            }
        }
        break;
    }
    let (head, body) = node.instance();
    Ok(IncorrectnessResult {
        clause: node.clause,
        head,
        body,
        questions: oracle.log()[start..].to_vec(),
    })
}

/// Trace-driven search from the computed answer `answer` of `call`.
pub fn diagnose_incorrectness_tracewise(
    call: &Term,
    answer: &Term,
    program: &Program,
    budget: Budget,
    mode: TraceMode,
    oracle: &mut Oracle,
) -> Result<IncorrectnessResult, Stop> {
    need(oracle, Role::Corr)?;
    let start = oracle.log().len();
    let run = solve(&Query::atom(call.clone()), program, budget);
    let k = answer_index(&run, answer)?;
    let context = format!("answer {}", k + 1);
    match oracle.judge(Role::Corr, answer, &context)? {
        Verdict::No => {}
        Verdict::Yes => return Err(Stop::NotASymptom(answer.clone())),
        Verdict::Unknown => return Err(Stop::Undecided { atom: answer.clone(), context }),
    }
    let mut res = tracewise_in(run, k, program, budget, mode, oracle)?;
    res.questions = oracle.log()[start..].to_vec();
    Ok(res)
}

fn answer_index(run: &Run, answer: &Term) -> Result<usize, Stop> {
    match run.answers.iter().position(|a| is_variant(a.atom(), answer)) {
        Some(k) => Ok(k),
        None => Err(match truncation(run) {
            Some(cause) => Stop::TruncatedTree { atom: run.query.atoms[0].clone(), cause },
            None => Stop::NotComputed(answer.clone()),
        }),
    }
}

/// Continues from answer `k` of `run`, already judged incorrect.
pub(super) fn tracewise_in(
    mut run: Run,
    k: usize,
    program: &Program,
    budget: Budget,
    mode: TraceMode,
    oracle: &mut Oracle,
) -> Result<IncorrectnessResult, Stop> {
    let start = oracle.log().len();
    let mut exit = answer_exit(&run, k).expect("every answer has a root Exit");
    // each step goes one box deeper, or restarts on a strictly smaller proof
    for _ in 0..=budget.max_depth {
        let candidates = if mode.scan {
            scan_candidates(&run, exit)
        } else {
            success_trace_at(&run, exit).expect("Exit items close a success trace").1
        };
        let mut wrong = None;
        for f in candidates {
            let e = &run.events[f];
            let context = format!("trace {} {}", e.invocation, e.atom);
            match oracle.judge(Role::Corr, &e.atom, &context)? {
                Verdict::No => {
                    wrong = Some(f);
                    break;
                }
                Verdict::Yes => {}
                Verdict::Unknown => return Err(Stop::Undecided { atom: e.atom.clone(), context }),
            }
        }
        let Some(f) = wrong else {
            let (d, s) = exit_subderivation(&run, exit).expect("an Exit item");
            let tree = proof_tree_for(&d, &s).expect("closed subderivation");
            let (head, body) = tree.instance();
            return Ok(IncorrectnessResult {
                clause: tree.clause,
                head,
                body,
                questions: oracle.log()[start..].to_vec(),
            });
        };
        if mode.restart {
            let b = run.events[f].atom.clone();
            run = solve(&Query::atom(b.clone()), program, budget);
            let k = answer_index(&run, &b)?;
            exit = answer_exit(&run, k).expect("every answer has a root Exit");
        } else {
            exit = f;
        }
    }
    Err(Stop::TruncatedTree { atom: run.events[exit].atom.clone(), cause: Truncation::Depth })
}

/// Exit items of the direct children of the box closed at `exit`, emitted
/// after its Call and before `exit`, in emission order.
fn scan_candidates(run: &Run, exit: usize) -> Vec<usize> {
    let n = run.events[exit].invocation;
    let call = run.events[..exit]
        .iter()
        .position(|e| e.invocation == n && e.port == Port::Call)
        .expect("a box is called before it exits");
    (call + 1..exit)
        .filter(|&f| {
            let e = &run.events[f];
            e.port == Port::Exit && run.box_info(e.invocation).and_then(|b| b.parent) == Some(n)
        })
        .collect()
}

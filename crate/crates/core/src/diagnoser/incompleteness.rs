//! Incompleteness diagnosis over top-level search traces.

use crate::boxtrace::search_trace_for;
use crate::engine::{Budget, Truncation};
use crate::kernel::{is_variant, Program, Term};
use crate::oracle::{find_uncovered_instance, is_incorrectness_symptom, Oracle, Role, TruncatedTree, Verdict};

use super::{need, truncation, IncompletenessResult, LevelStats, Stop};

fn truncated_at(atom: &Term, cause: Option<Truncation>) -> Stop {
    Stop::TruncatedTree { atom: atom.clone(), cause: cause.unwrap_or(Truncation::Steps) }
}

/// Descends from `a`, which should have a required answer missing, through
/// the first incompleteness symptom among the top-level calls of each
/// search, until no call is a symptom.
///
/// With `restart`, each level is searched from the ground witness of the
/// missing answer when the machine found one, instead of the atom itself.
pub fn diagnose_incompleteness(
    a: &Term,
    program: &Program,
    budget: Budget,
    restart: bool,
    oracle: &mut Oracle,
) -> Result<IncompletenessResult, Stop> {
    need(oracle, Role::Compl)?;
    let start = oracle.log().len();
    let (_, run) = search_trace_for(a, program, budget);
    let cause = truncation(&run);
    let answers = run.answer_atoms();
    let (v, witness) = oracle
        .missing(a, &answers, cause.is_some(), "query")?
        .map_err(|TruncatedTree| truncated_at(a, cause))?;
    match v {
        Verdict::Yes => {}
        Verdict::No => return Err(Stop::NotASymptom(a.clone())),
        Verdict::Unknown => return Err(Stop::Undecided { atom: a.clone(), context: "query".into() }),
    }
    let mut current = match witness {
        Some(w) if restart => w,
        _ => a.clone(),
    };
    let mut levels = Vec::new();
    let mut wrong_answers: Vec<Term> = Vec::new();
    for _ in 0..=budget.max_depth {
        let (trace, run) = search_trace_for(&current, program, budget);
        if let Some(cause) = truncation(&run) {
            return Err(truncated_at(&current, Some(cause)));
        }
        if let Some(corr) = &oracle.corr {
            for ans in trace.entries.iter().flat_map(|e| &e.answers) {
                if is_incorrectness_symptom(corr, ans) == Verdict::Yes
                    && !wrong_answers.iter().any(|w| is_variant(w, ans))
                {
                    wrong_answers.push(ans.clone());
                }
            }
        }
        let level_start = oracle.log().len();
        let mut next = None;
        for e in &trace.entries {
            let context = format!("search {} {}", e.invocation, e.call);
            let (v, w) = oracle
                .missing(&e.call, &e.answers, false, &context)?
                .map_err(|TruncatedTree| truncated_at(&e.call, None))?;
            match v {
                Verdict::No => {}
                Verdict::Yes => {
                    next = Some(match w {
                        Some(w) if restart => w,
                        _ => e.call.clone(),
                    });
                    break;
                }
                Verdict::Unknown => return Err(Stop::Undecided { atom: e.call.clone(), context }),
            }
        }
        levels.push(LevelStats {
            atom: current.clone(),
            entries: trace.entries.len(),
            questions: oracle.log().len() - level_start,
        });
        if let Some(b) = next {
            current = b;
            continue;
        }
        let spec = oracle.compl.as_ref().expect("checked above");
        let Some(witness) = find_uncovered_instance(spec, &current, program) else {
            return Err(Stop::Undecided {
                atom: current,
                context: "no uncovered instance within bounds".into(),
            });
        };
        return Ok(IncompletenessResult {
            procedure: current.functor().expect("atoms are compound"),
            error_atom: current,
            witness,
            levels,
            questions: oracle.log()[start..].to_vec(),
            wrong_answers,
        });
    }
    Err(truncated_at(&current, Some(Truncation::Depth)))
}

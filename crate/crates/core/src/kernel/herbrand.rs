//! Bounded Herbrand universes and enumeration of ground instances.
//!
//! Terms are ordered by depth, then by functor name, then by their
//! arguments' positions in that same order. The order is total and
//! deterministic, so "first ground instance" is well defined.

use super::program::Signature;
use super::subst::Substitution;
use super::term::{Term, Var};

/// Ground terms up to a depth, grouped by exact depth.
#[derive(Clone, Debug)]
pub struct Universe {
    terms: Vec<Term>,
    /// `level_end[d-1]` is the number of terms of depth `<= d`.
    level_end: Vec<usize>,
    capped: bool,
}

impl Universe {
    /// Builds every ground term over `sig` of depth `<= max_depth`, stopping
    /// at the last complete depth level if more than `cap` terms would be
    /// needed.
    pub fn build(sig: &Signature, max_depth: usize, cap: usize) -> Universe {
        let mut terms: Vec<Term> = sig.constants().map(|c| Term::constant(c.as_str())).collect();
        let mut level_end = Vec::new();
        if max_depth == 0 {
            return Universe { terms: Vec::new(), level_end, capped: false };
        }
        if terms.len() > cap {
            return Universe { terms: Vec::new(), level_end, capped: true };
        }
        let mut capped = false;
        level_end.push(terms.len());
        let functors: Vec<_> = sig.functors.iter().filter(|(_, n)| *n > 0).cloned().collect();
        'levels: for _depth in 2..=max_depth {
            let below = terms.len();
            let prev_start = if level_end.len() >= 2 {
                level_end[level_end.len() - 2]
            } else {
                0
            };
            let mut level = Vec::new();
            for (f, arity) in &functors {
                let mut idx = vec![0usize; *arity];
                if below == 0 {
                    break;
                }
                loop {
                    if idx.iter().any(|&i| i >= prev_start) {
                        level.push(Term::Compound(
                            f.clone(),
                            idx.iter().map(|&i| terms[i].clone()).collect(),
                        ));
                        if terms.len() + level.len() > cap {
                            capped = true;
                            break 'levels;
                        }
                    }
                    if !odometer(&mut idx, below) {
                        break;
                    }
                }
            }
            if level.is_empty() {
                break;
            }
            terms.extend(level);
            level_end.push(terms.len());
        }
        terms.truncate(*level_end.last().unwrap_or(&0));
        Universe { terms, level_end, capped }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Depth up to which every ground term is present.
    pub fn complete_depth(&self) -> usize {
        self.level_end.len()
    }

    /// Every ground term up to the requested depth was generated.
    pub fn is_complete(&self) -> bool {
        !self.capped
    }

    fn count_to_level(&self, level: usize) -> usize {
        if level == 0 {
            0
        } else {
            self.level_end[level.min(self.level_end.len()) - 1]
        }
    }

    /// Ground substitutions for `vars`, ordered by the deepest component's
    /// level and then lexicographically. At most `limit` are produced.
    pub fn assignments<'a>(&'a self, vars: &'a [Var], limit: usize) -> Assignments<'a> {
        Assignments {
            universe: self,
            vars,
            level: 1,
            idx: None,
            produced: 0,
            limit,
            done: false,
            exhausted_limit: false,
        }
    }
}

/// Advances `idx` as a base-`radix` counter; false after the last value.
fn odometer(idx: &mut [usize], radix: usize) -> bool {
    for i in (0..idx.len()).rev() {
        idx[i] += 1;
        if idx[i] < radix {
            return true;
        }
        idx[i] = 0;
    }
    false
}

pub struct Assignments<'a> {
    universe: &'a Universe,
    vars: &'a [Var],
    level: usize,
    idx: Option<Vec<usize>>,
    produced: usize,
    limit: usize,
    done: bool,
    exhausted_limit: bool,
}

impl Assignments<'_> {
    /// The iterator stopped because of the limit rather than running out.
    pub fn hit_limit(&self) -> bool {
        self.exhausted_limit
    }
}

impl Iterator for Assignments<'_> {
    type Item = Substitution;

    fn next(&mut self) -> Option<Substitution> {
        if self.done {
            return None;
        }
        if self.vars.is_empty() {
            self.done = true;
            return Some(Substitution::new());
        }
        let max_level = self.universe.complete_depth();
        loop {
            if self.level > max_level {
                self.done = true;
                return None;
            }
            let hi = self.universe.count_to_level(self.level);
            let lo = self.universe.count_to_level(self.level - 1);
            let advanced = match &mut self.idx {
                None => {
                    if hi == 0 {
                        false
                    } else {
                        self.idx = Some(vec![0; self.vars.len()]);
                        true
                    }
                }
                Some(idx) => odometer(idx, hi),
            };
            if !advanced {
                self.level += 1;
                self.idx = None;
                continue;
            }
            let idx = self.idx.as_ref().unwrap();
            if idx.iter().all(|&i| i < lo) {
                continue;
            }
            if self.produced >= self.limit {
                self.done = true;
                self.exhausted_limit = true;
                return None;
            }
            self.produced += 1;
            return Some(Substitution::from_bindings(
                self.vars
                    .iter()
                    .cloned()
                    .zip(idx.iter().map(|&i| self.universe.terms[i].clone())),
            ));
        }
    }
}

//! Random definite programs, ground atoms and buggy mutants for tests.

use rand::seq::SliceRandom;
use rand::Rng;

use boxdiag::kernel::{parse_program, Clause, Program, Signature, Term, Universe, Var};

/// The vocabulary and size limits of generated programs.
#[derive(Clone, Debug)]
pub struct Shape {
    pub preds: Vec<(String, usize)>,
    pub consts: Vec<String>,
    pub funcs: Vec<(String, usize)>,
    pub max_clauses: usize,
    pub max_body: usize,
    /// Depth of generated argument terms (a constant has depth 1).
    pub arg_depth: usize,
}

impl Default for Shape {
    fn default() -> Self {
        Shape {
            preds: vec![("p".into(), 1), ("q".into(), 2)],
            consts: vec!["a".into(), "b".into()],
            funcs: vec![("f".into(), 1)],
            max_clauses: 6,
            max_body: 2,
            arg_depth: 3,
        }
    }
}

const VARS: [&str; 3] = ["X", "Y", "Z"];

impl Shape {
    pub fn signature(&self) -> Signature {
        let mut sig = Signature::default();
        for c in &self.consts {
            sig.add_term(&Term::constant(c));
        }
        for (f, n) in &self.funcs {
            sig.add_term(&Term::app(f, vec![Term::constant(&self.consts[0]); *n]));
        }
        sig
    }

    /// Every ground atom of the shape's predicates with arguments of depth
    /// at most `depth`.
    pub fn ground_atoms(&self, depth: usize) -> Vec<Term> {
        let u = Universe::build(&self.signature(), depth, 10_000);
        let mut out = Vec::new();
        for (p, n) in &self.preds {
            let vars: Vec<Var> = (0..*n).map(|i| Var::new(&format!("A{i}"))).collect();
            let pattern = Term::app(p, vars.iter().cloned().map(Term::Var).collect());
            out.extend(u.assignments(&vars, 100_000).map(|s| s.apply(&pattern)));
        }
        out
    }

    /// The most general atom of each predicate.
    pub fn general_atoms(&self) -> Vec<Term> {
        self.preds
            .iter()
            .map(|(p, n)| Term::app(p, VARS.iter().cycle().take(*n).map(|v| Term::var(v)).collect()))
            .collect()
    }
}

pub fn random_term<R: Rng>(rng: &mut R, shape: &Shape, depth: usize, vars: &[&str]) -> Term {
    if depth <= 1 || rng.gen_bool(0.4) {
        if !vars.is_empty() && rng.gen_bool(0.5) {
            Term::var(vars.choose(rng).unwrap())
        } else {
            Term::constant(shape.consts.choose(rng).unwrap())
        }
    } else {
        let (f, n) = shape.funcs.choose(rng).unwrap();
        Term::app(f, (0..*n).map(|_| random_term(rng, shape, depth - 1, vars)).collect())
    }
}

fn random_atom<R: Rng>(rng: &mut R, shape: &Shape, vars: &[&str]) -> Term {
    let (p, n) = shape.preds.choose(rng).unwrap();
    Term::app(p, (0..*n).map(|_| random_term(rng, shape, shape.arg_depth, vars)).collect())
}

/// A clause whose body atoms are never deeper than its head.
pub fn random_clause<R: Rng>(rng: &mut R, shape: &Shape) -> Clause {
    loop {
        let head = random_atom(rng, shape, &VARS);
        let head_vars: Vec<String> = head.vars().iter().map(|v| v.name().to_string()).collect();
        let names: Vec<&str> = head_vars.iter().map(String::as_str).collect();
        let n = rng.gen_range(0..=shape.max_body);
        let body = (0..n).map(|_| random_atom(rng, shape, &names)).collect();
        let c = Clause::new(head, body, 0);
        if c.is_depth_safe() {
            return c;
        }
    }
}

pub fn random_program<R: Rng>(rng: &mut R, shape: &Shape) -> Program {
    let n = rng.gen_range(1..=shape.max_clauses);
    Program::new((0..n).map(|_| random_clause(rng, shape)).collect())
}

/// Replaces one argument subterm of one head or body atom. Returns the
/// mutant and the ordinal of the changed clause, or `None` if the draw
/// produced no depth-safe change.
pub fn mutate_atom<R: Rng>(rng: &mut R, p: &Program, shape: &Shape) -> Option<(Program, usize)> {
    for _ in 0..20 {
        let c = p.clauses().choose(rng)?;
        let k = rng.gen_range(0..=c.body.len());
        let target = if k == 0 { &c.head } else { &c.body[k - 1] };
        if target.args().is_empty() {
            continue;
        }
        let vars: Vec<String> = c.vars().iter().map(|v| v.name().to_string()).collect();
        let names: Vec<&str> = vars.iter().map(String::as_str).collect();
        let mut positions = Vec::new();
        subterm_paths(target, &mut Vec::new(), &mut positions);
        let path = positions.choose(rng)?.clone();
        let replacement = random_term(rng, shape, 2, &names);
        let changed = replace_at(target, &path, replacement);
        if &changed == target {
            continue;
        }
        let mut nc = c.clone();
        if k == 0 {
            nc.head = changed;
        } else {
            nc.body[k - 1] = changed;
        }
        if nc.is_depth_safe() {
            return Some((p.with_clause(c.ordinal, nc), c.ordinal));
        }
    }
    None
}

fn subterm_paths(t: &Term, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    for (i, a) in t.args().iter().enumerate() {
        path.push(i);
        out.push(path.clone());
        subterm_paths(a, path, out);
        path.pop();
    }
}

fn replace_at(t: &Term, path: &[usize], with: Term) -> Term {
    match path.split_first() {
        None => with,
        Some((&i, rest)) => match t {
            Term::Compound(f, args) => {
                let mut args = args.clone();
                args[i] = replace_at(&args[i], rest, with);
                Term::Compound(f.clone(), args)
            }
            Term::Var(_) => t.clone(),
        },
    }
}

/// Small correct programs over numerals, used as mutation seeds next to
/// random ones.
pub const SEEDS: &[&str] = &[
    "even(0).\neven(s(s(X))) :- even(X).\n",
    "nat(0).\nnat(s(X)) :- nat(X).\n",
    "plus(0,Y,Y).\nplus(s(X),Y,s(Z)) :- plus(X,Y,Z).\n",
    "leq(0,Y).\nleq(s(X),s(Y)) :- leq(X,Y).\n",
    "ev(0).\nev(s(X)) :- od(X).\nod(s(X)) :- ev(X).\n",
    "lt(0,s(Y)).\nlt(s(X),s(Y)) :- lt(X,Y).\n",
    "double(0,0).\ndouble(s(X),s(s(Y))) :- double(X,Y).\n",
    "nat(0).\nnat(s(X)) :- nat(X).\neven(0).\neven(s(X)) :- odd(X).\nodd(s(X)) :- even(X).\n",
];

pub fn seed_programs() -> Vec<Program> {
    SEEDS.iter().map(|s| parse_program(s).expect("seed programs parse")).collect()
}

/// A shape covering a seed program: its predicates, `0` and `s/1`.
pub fn seed_shape(p: &Program) -> Shape {
    Shape {
        preds: p.predicates().iter().map(|k| (k.name.as_str().to_string(), k.arity)).collect(),
        consts: vec!["0".into()],
        funcs: vec![("s".into(), 1)],
        ..Shape::default()
    }
}

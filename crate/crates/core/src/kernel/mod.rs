//! Terms, substitutions, unification and the concrete syntax of programs.

pub mod herbrand;
pub mod program;
pub mod subst;
pub mod syntax;
pub mod term;

pub use herbrand::Universe;
pub use program::{Clause, Program, Query, Signature};
pub use subst::{
    is_instance_of, is_variant, match_all, match_term, unify, unify_all, NoUnifier, Substitution,
};
pub use syntax::{parse_atom, parse_program, parse_query, parse_term, ParseError};
pub use term::{PredKey, Sym, Term, Var};

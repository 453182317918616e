//! Concrete syntax: definite clauses, queries and terms.
//!
//! No operators and no directives. Lists are written `[a,b|T]` and are
//! desugared into `'.'/2` and `[]`. `%` starts a comment that runs to the end
//! of the line.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use super::program::{Clause, Program, Query};
use super::term::{Sym, Term, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: expected {expected}, found {found}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Var(String),
    Name(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Bar,
    Neck,
    QueryMark,
    End,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Var(v) => write!(f, "variable `{v}`"),
            Tok::Name(n) => write!(f, "name `{n}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Bar => f.write_str("`|`"),
            Tok::Neck => f.write_str("`:-`"),
            Tok::QueryMark => f.write_str("`?-`"),
            Tok::End => f.write_str("end of clause `.`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, column, expected: &str, found: String| ParseError {
        line,
        column,
        expected: expected.to_string(),
        found,
    };
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => advance(1, &mut i, &mut col),
            '%' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '(' => {
                out.push(Spanned { tok: Tok::LParen, line: tl, column: tc });
                advance(1, &mut i, &mut col);
            }
            ')' => {
                out.push(Spanned { tok: Tok::RParen, line: tl, column: tc });
                advance(1, &mut i, &mut col);
            }
            '[' => {
                out.push(Spanned { tok: Tok::LBracket, line: tl, column: tc });
                advance(1, &mut i, &mut col);
            }
            ']' => {
                out.push(Spanned { tok: Tok::RBracket, line: tl, column: tc });
                advance(1, &mut i, &mut col);
            }
            ',' => {
                out.push(Spanned { tok: Tok::Comma, line: tl, column: tc });
                advance(1, &mut i, &mut col);
            }
            '|' => {
                out.push(Spanned { tok: Tok::Bar, line: tl, column: tc });
                advance(1, &mut i, &mut col);
            }
            ':' if chars.get(i + 1) == Some(&'-') => {
                out.push(Spanned { tok: Tok::Neck, line: tl, column: tc });
                advance(2, &mut i, &mut col);
            }
            '?' if chars.get(i + 1) == Some(&'-') => {
                out.push(Spanned { tok: Tok::QueryMark, line: tl, column: tc });
                advance(2, &mut i, &mut col);
            }
            '.' => {
                let next = chars.get(i + 1);
                if next.is_none_or(|n| n.is_whitespace() || *n == '%') {
                    out.push(Spanned { tok: Tok::End, line: tl, column: tc });
                    advance(1, &mut i, &mut col);
                } else {
                    return Err(err(tl, tc, "end of clause", format!("`.{}`", next.unwrap())));
                }
            }
            '\'' => {
                let mut name = String::new();
                let mut j = i + 1;
                loop {
                    match chars.get(j) {
                        None | Some('\n') => {
                            return Err(err(tl, tc, "closing quote", "end of line".into()))
                        }
                        Some('\'') if chars.get(j + 1) == Some(&'\'') => {
                            name.push('\'');
                            j += 2;
                        }
                        Some('\'') => {
                            j += 1;
                            break;
                        }
                        Some('\\') => {
                            match chars.get(j + 1) {
                                Some('n') => name.push('\n'),
                                Some('\\') => name.push('\\'),
                                Some('\'') => name.push('\''),
                                other => {
                                    return Err(err(
                                        tl,
                                        tc + (j - i),
                                        "escape sequence",
                                        format!("{other:?}"),
                                    ))
                                }
                            }
                            j += 2;
                        }
                        Some(&ch) => {
                            name.push(ch);
                            j += 1;
                        }
                    }
                }
                out.push(Spanned { tok: Tok::Name(name), line: tl, column: tc });
                let n = j - i;
                advance(n, &mut i, &mut col);
            }
            c if c.is_ascii_alphanumeric() || c == '_' => {
                let start = i;
                let mut j = i;
                if c.is_ascii_digit() {
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                } else {
                    while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                        j += 1;
                    }
                }
                let word: String = chars[start..j].iter().collect();
                let tok = if c.is_ascii_uppercase() || c == '_' {
                    Tok::Var(word)
                } else {
                    Tok::Name(word)
                };
                out.push(Spanned { tok, line: tl, column: tc });
                advance(j - start, &mut i, &mut col);
            }
            other => return Err(err(tl, tc, "a term", format!("`{other}`"))),
        }
    }
    out.push(Spanned { tok: Tok::Eof, line, column: col });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    used_vars: BTreeSet<String>,
    anon: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self, ParseError> {
        let toks = lex(text)?;
        let used_vars = toks
            .iter()
            .filter_map(|t| match &t.tok {
                Tok::Var(v) => Some(v.clone()),
                _ => None,
            })
            .collect();
        Ok(Parser { toks, pos: 0, used_vars, anon: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn next(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> ParseError {
        let t = &self.toks[self.pos];
        ParseError {
            line: t.line,
            column: t.column,
            expected: expected.to_string(),
            found: t.tok.to_string(),
        }
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.next();
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    fn anonymous(&mut self) -> Var {
        loop {
            self.anon += 1;
            let name = format!("_{}", self.anon);
            if !self.used_vars.contains(&name) {
                return Var::new(&name);
            }
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek().clone() {
            Tok::Var(v) => {
                self.next();
                if v == "_" {
                    Ok(Term::Var(self.anonymous()))
                } else {
                    Ok(Term::var(&v))
                }
            }
            Tok::Name(n) => {
                self.next();
                if *self.peek() == Tok::LParen {
                    self.next();
                    let mut args = vec![self.term()?];
                    loop {
                        match self.peek() {
                            Tok::Comma => {
                                self.next();
                                args.push(self.term()?);
                            }
                            Tok::RParen => {
                                self.next();
                                break;
                            }
                            _ => return Err(self.error("`,` or `)` in argument list")),
                        }
                    }
                    Ok(Term::Compound(Sym::new(&n), args))
                } else {
                    Ok(Term::constant(&n))
                }
            }
            Tok::LBracket => {
                self.next();
                if *self.peek() == Tok::RBracket {
                    self.next();
                    return Ok(Term::nil());
                }
                let mut items = vec![self.term()?];
                let mut tail = None;
                loop {
                    match self.peek() {
                        Tok::Comma => {
                            self.next();
                            items.push(self.term()?);
                        }
                        Tok::Bar => {
                            self.next();
                            tail = Some(self.term()?);
                            self.expect(Tok::RBracket, "`]` after list tail")?;
                            break;
                        }
                        Tok::RBracket => {
                            self.next();
                            break;
                        }
                        _ => return Err(self.error("`,`, `|` or `]` in list")),
                    }
                }
                Ok(Term::list(items, tail))
            }
            _ => Err(self.error("a term")),
        }
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        let (line, column) = (self.toks[self.pos].line, self.toks[self.pos].column);
        let t = self.term()?;
        if t.is_var() {
            return Err(ParseError {
                line,
                column,
                expected: "an atom (predicate call)".into(),
                found: format!("variable `{t}`"),
            });
        }
        Ok(t)
    }

    fn conjunction(&mut self) -> Result<Vec<Term>, ParseError> {
        let mut atoms = vec![self.atom()?];
        while *self.peek() == Tok::Comma {
            self.next();
            atoms.push(self.atom()?);
        }
        Ok(atoms)
    }

    fn clause(&mut self, ordinal: usize) -> Result<Clause, ParseError> {
        let head = self.atom()?;
        let body = match self.peek() {
            Tok::Neck => {
                self.next();
                self.conjunction()?
            }
            Tok::End => Vec::new(),
            _ => return Err(self.error("`:-` or end of clause `.`")),
        };
        self.expect(Tok::End, "`,` or end of clause `.`")?;
        Ok(Clause::new(head, body, ordinal))
    }
}

pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let mut p = Parser::new(text)?;
    let mut clauses = Vec::new();
    while *p.peek() != Tok::Eof {
        clauses.push(p.clause(clauses.len() + 1)?);
    }
    Ok(Program::new(clauses))
}

/// Parses `[?-] a1, ..., an [.]`. The empty string is the empty query.
pub fn parse_query(text: &str) -> Result<Query, ParseError> {
    let mut p = Parser::new(text)?;
    if *p.peek() == Tok::QueryMark {
        p.next();
    }
    if *p.peek() == Tok::Eof {
        return Ok(Query::new(Vec::new()));
    }
    let atoms = p.conjunction()?;
    if *p.peek() == Tok::End {
        p.next();
    }
    if *p.peek() != Tok::Eof {
        return Err(p.error("`,` or end of query"));
    }
    Ok(Query::new(atoms))
}

pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(text)?;
    let t = p.term()?;
    if *p.peek() == Tok::End {
        p.next();
    }
    if *p.peek() != Tok::Eof {
        return Err(p.error("end of term"));
    }
    Ok(t)
}

/// Parses a single atom (a non-variable term).
pub fn parse_atom(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(text)?;
    let t = p.atom()?;
    if *p.peek() == Tok::End {
        p.next();
    }
    if *p.peek() != Tok::Eof {
        return Err(p.error("end of atom"));
    }
    Ok(t)
}

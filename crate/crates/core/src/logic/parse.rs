//! Recursive-descent parser for the formula grammar.
//!
//! ```text
//! formula := quant | impl
//! quant   := ("E" | "A") var "." formula
//! impl    := or ("->" impl)?
//! or      := and ("|" and)*
//! and     := neg ("&" neg)*
//! neg     := "~" neg | atom | "(" formula ")"
//! atom    := pred "(" var ("," var)* ")" | term ("<" | "=" | "<=") term
//!          | "true" | "false" | "inM(" var ")" | "h(" var ")=" var
//!          | "dist(" var "," var ")<=" digits
//! term    := var | "#" digits
//! var     := "x" digits
//! ```

use thiserror::Error;

use super::formula::{Formula, Term, Var};
use crate::structure::Vocabulary;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown predicate `{name}` at {pos}")]
    UnknownPredicate { name: String, pos: usize },
    #[error("predicate `{name}` at {pos} expects {expected} arguments, got {found}")]
    Arity { name: String, pos: usize, expected: usize, found: usize },
    #[error("`<` used at {0} but the vocabulary has no order symbol")]
    NoOrder(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Var(Var),
    Num(u32),
    Numeral(u32),
    LParen,
    RParen,
    Comma,
    Dot,
    Not,
    And,
    Or,
    Arrow,
    Lt,
    Le,
    Eq,
    End,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Var(v) => format!("`x{v}`"),
        Tok::Num(k) => format!("`{k}`"),
        Tok::Numeral(k) => format!("`#{k}`"),
        Tok::End => "end of input".into(),
        other => format!("{other:?}"),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let syntax = |pos, msg: &str| ParseError::Syntax { pos, msg: msg.to_string() };
    let digits = |start: usize| -> Result<(u32, usize), ParseError> {
        let mut j = start;
        while j < bytes.len() && bytes[j].is_ascii_digit() {
            j += 1;
        }
        if j == start {
            return Err(syntax(start, "expected digits"));
        }
        text[start..j].parse().map(|v| (v, j)).map_err(|_| syntax(start, "number too large"))
    };
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'.' => Tok::Dot,
            b'~' => Tok::Not,
            b'&' => Tok::And,
            b'|' => Tok::Or,
            b'=' => Tok::Eq,
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Arrow
            }
            b'<' if bytes.get(i + 1) == Some(&b'=') => {
                i += 1;
                Tok::Le
            }
            b'<' => Tok::Lt,
            b'#' => {
                let (v, j) = digits(i + 1)?;
                out.push((Tok::Numeral(v), start));
                i = j;
                continue;
            }
            b'0'..=b'9' => {
                let (v, j) = digits(i)?;
                out.push((Tok::Num(v), start));
                i = j;
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let mut j = i;
                while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                    j += 1;
                }
                let word = &text[i..j];
                let is_var = word.len() > 1 && word.starts_with('x') && word[1..].bytes().all(|b| b.is_ascii_digit());
                let tok = if is_var {
                    Tok::Var(word[1..].parse().map_err(|_| syntax(start, "variable index too large"))?)
                } else {
                    Tok::Ident(word.to_string())
                };
                out.push((tok, start));
                i = j;
                continue;
            }
            _ => return Err(syntax(i, &format!("unexpected character `{}`", c as char))),
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    vocab: Option<&'a Vocabulary>,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if t != Tok::End {
            self.at += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax { pos: self.pos(), msg: msg.into() })
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {}, found {}", describe(&want), describe(self.peek())))
        }
    }

    fn var(&mut self) -> Result<Var, ParseError> {
        match self.peek().clone() {
            Tok::Var(v) => {
                self.bump();
                Ok(v)
            }
            t => self.err(format!("expected a variable, found {}", describe(&t))),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        if let Tok::Ident(q) = self.peek() {
            let q = q.clone();
            if q == "E" || q == "A" {
                self.bump();
                let v = self.var()?;
                self.expect(Tok::Dot)?;
                let body = self.formula()?;
                return Ok(if q == "E" { Formula::exists(v, body) } else { Formula::forall(v, body) });
            }
        }
        self.implication()
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            return Ok(lhs.implies(self.implication()?));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.conjunction()?;
        while *self.peek() == Tok::Or {
            self.bump();
            acc = acc.or(self.conjunction()?);
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.negation()?;
        while *self.peek() == Tok::And {
            self.bump();
            acc = acc.and(self.negation()?);
        }
        Ok(acc)
    }

    fn negation(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(self.negation()?.not())
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            _ => self.atom(),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek().clone() {
            Tok::Var(v) => {
                self.bump();
                Ok(Term::Var(v))
            }
            Tok::Numeral(k) => {
                self.bump();
                Ok(Term::Num(k))
            }
            t => self.err(format!("expected a term, found {}", describe(&t))),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                match name.as_str() {
                    "true" => return Ok(Formula::Const(true)),
                    "false" => return Ok(Formula::Const(false)),
                    "E" | "A" => return self.err("a quantified formula must be parenthesized here"),
                    _ => {}
                }
                self.expect(Tok::LParen)?;
                let mut args = vec![self.var()?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    args.push(self.var()?);
                }
                self.expect(Tok::RParen)?;
                match name.as_str() {
                    "inM" if args.len() == 1 => Ok(Formula::InM(args[0])),
                    "h" if args.len() == 1 => {
                        self.expect(Tok::Eq)?;
                        Ok(Formula::H(args[0], self.var()?))
                    }
                    "dist" if args.len() == 2 => {
                        self.expect(Tok::Le)?;
                        match self.bump() {
                            Tok::Num(k) => Ok(Formula::Dist { a: args[0], b: args[1], k }),
                            t => Err(ParseError::Syntax { pos: self.pos(), msg: format!("expected a threshold, found {}", describe(&t)) }),
                        }
                    }
                    "inM" | "h" | "dist" => self.err(format!("wrong number of arguments to `{name}`")),
                    _ => self.relation(name, args, pos),
                }
            }
            Tok::Var(_) | Tok::Numeral(_) => {
                let a = self.term()?;
                let op = self.bump();
                let b = self.term()?;
                let needs_order = matches!(op, Tok::Lt | Tok::Le);
                if needs_order && self.vocab.is_some_and(|v| v.order_symbol().is_none()) {
                    return Err(ParseError::NoOrder(pos));
                }
                match op {
                    Tok::Lt => Ok(Formula::Lt(a, b)),
                    Tok::Le => Ok(Formula::le(a, b)),
                    Tok::Eq => Ok(Formula::Eq(a, b)),
                    t => Err(ParseError::Syntax { pos, msg: format!("expected `<`, `<=` or `=`, found {}", describe(&t)) }),
                }
            }
            t => self.err(format!("expected an atom, found {}", describe(&t))),
        }
    }

    fn relation(&self, name: String, args: Vec<Var>, pos: usize) -> Result<Formula, ParseError> {
        if let Some(vocab) = self.vocab {
            let sym = vocab.index_of(&name).ok_or_else(|| ParseError::UnknownPredicate { name: name.clone(), pos })?;
            if vocab.arity(sym) != args.len() {
                return Err(ParseError::Arity { name, pos, expected: vocab.arity(sym), found: args.len() });
            }
        }
        Ok(Formula::Rel { name, args })
    }
}

fn run(text: &str, vocab: Option<&Vocabulary>) -> Result<Formula, ParseError> {
    let mut p = Parser { toks: lex(text)?, at: 0, vocab };
    let f = p.formula()?;
    if *p.peek() != Tok::End {
        return p.err(format!("unexpected {}", describe(p.peek())));
    }
    Ok(f)
}

/// Parses `text`, checking predicate names and arities against `vocab`.
pub fn parse(text: &str, vocab: &Vocabulary) -> Result<Formula, ParseError> {
    run(text, Some(vocab))
}

/// Parses without a vocabulary; any predicate name and arity is accepted.
pub fn parse_unchecked(text: &str) -> Result<Formula, ParseError> {
    run(text, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph() -> Vocabulary {
        Vocabulary::graph_order()
    }

    #[test]
    fn parses_atoms() {
        let f = parse("R(x0,x1)", &graph()).unwrap();
        assert_eq!(f, Formula::rel("R", &[0, 1]));
        assert_eq!(parse("~(x0=x0)", &graph()).unwrap(), Formula::eq(0, 0).not());
        assert_eq!(parse("x1<=x0", &graph()).unwrap(), Formula::lt(0, 1).not());
    }

    #[test]
    fn precedence_and_associativity() {
        let f = parse_unchecked("P(x0) | P(x1) & P(x2) -> P(x3) -> P(x4)").unwrap();
        let p = |i| Formula::rel("P", &[i]);
        assert_eq!(f, p(0).or(p(1).and(p(2))).implies(p(3).implies(p(4))));
        let g = parse_unchecked("P(x0) & P(x1) & P(x2)").unwrap();
        assert_eq!(g, p(0).and(p(1)).and(p(2)));
    }

    #[test]
    fn system_atoms() {
        let f = parse_unchecked("inM(x0) & h(x0)=x1 & dist(x1,x2)<=3").unwrap();
        let want = Formula::InM(0).and(Formula::H(0, 1)).and(Formula::Dist { a: 1, b: 2, k: 3 });
        assert_eq!(f, want);
    }

    #[test]
    fn reports_errors() {
        assert!(matches!(parse("Q(x0)", &graph()), Err(ParseError::UnknownPredicate { .. })));
        assert!(matches!(parse("R(x0)", &graph()), Err(ParseError::Arity { expected: 2, found: 1, .. })));
        assert!(matches!(parse("R(x0,", &graph()), Err(ParseError::Syntax { pos: 5, .. })));
        let plain = Vocabulary::from_pairs(&[("R", 2)], None);
        assert!(matches!(parse("x0<x1", &plain), Err(ParseError::NoOrder(0))));
        assert!(parse("x0<x1 & E x1. x1=x1", &graph()).is_err());
    }

    #[test]
    fn psi0_parses_to_depth_three() {
        let f = parse("E x0. A x1. A x2. ((x1<x0 & ~(x2<x0)) -> ~R(x1,x2))", &graph()).unwrap();
        assert_eq!(f.depth(), 3);
        assert!(f.is_sentence());
        assert_eq!(parse(&f.to_string(), &graph()).unwrap(), f);
    }
}

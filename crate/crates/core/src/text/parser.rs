use std::collections::BTreeSet;

use super::lexer::{lex, Spanned, Tok};
use crate::error::{Error, Result};
use crate::syntax::{Atom, Context, Formula, Query, Sequent, Signature, Term, Theory};

/// Token cursor shared by the formula, structure and derivation parsers.
pub struct Cursor {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Cursor {
    pub fn new(src: &str, line: usize, first_column: usize) -> Result<Self> {
        Ok(Cursor {
            toks: lex(src, line, first_column)?,
            pos: 0,
        })
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    pub fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    pub fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub fn error(&self, message: impl Into<String>) -> Error {
        let s = &self.toks[self.pos];
        Error::parse(s.line, s.column, message)
    }

    pub fn unexpected(&self, wanted: &str) -> Error {
        self.error(format!("expected {wanted}, found {}", self.peek().describe()))
    }

    pub fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.next();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, tok: &Tok) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    pub fn ident(&mut self) -> Result<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.next();
                Ok(s)
            }
            _ => Err(self.unexpected("an identifier")),
        }
    }

    pub fn number(&mut self) -> Result<usize> {
        let s = self.ident()?;
        s.parse()
            .map_err(|_| self.error(format!("expected a number, found `{s}`")))
    }

    pub fn at_end(&self) -> bool {
        matches!(self.peek(), Tok::End)
    }

    pub fn expect_end(&self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }
}

const KEYWORDS: [&str; 2] = ["exists", "true"];

/// Formula parser over a fixed signature.
pub struct FormulaParser<'a> {
    pub sig: &'a Signature,
}

impl<'a> FormulaParser<'a> {
    pub fn new(sig: &'a Signature) -> Self {
        FormulaParser { sig }
    }

    pub fn term(&self, cur: &mut Cursor) -> Result<Term> {
        let name = cur.ident()?;
        if KEYWORDS.contains(&name.as_str()) {
            return Err(cur.error(format!("keyword `{name}` used as a term")));
        }
        if *cur.peek() == Tok::LParen {
            let arity = self
                .sig
                .fun_arity(&name)
                .ok_or_else(|| cur.error(format!("unknown function symbol `{name}`")))?;
            let args = self.args(cur)?;
            if args.len() != arity {
                return Err(cur.error(format!(
                    "`{name}` expects {arity} arguments, got {}",
                    args.len()
                )));
            }
            return Ok(Term::App(name, args));
        }
        match self.sig.fun_arity(&name) {
            Some(0) => Ok(Term::App(name, Vec::new())),
            Some(n) => Err(cur.error(format!("`{name}` expects {n} arguments"))),
            None if self.sig.rel_arity(&name).is_some() => {
                Err(cur.error(format!("relation `{name}` used as a term")))
            }
            None => Ok(Term::Var(name)),
        }
    }

    fn args(&self, cur: &mut Cursor) -> Result<Vec<Term>> {
        cur.expect(&Tok::LParen)?;
        let mut args = Vec::new();
        if cur.eat(&Tok::RParen) {
            return Ok(args);
        }
        loop {
            args.push(self.term(cur)?);
            if cur.eat(&Tok::RParen) {
                return Ok(args);
            }
            cur.expect(&Tok::Comma)?;
        }
    }

    /// Conjunction of units; an `exists` unit extends as far right as possible.
    pub fn formula(&self, cur: &mut Cursor) -> Result<Formula> {
        let mut parts = vec![self.unit(cur)?];
        while cur.eat(&Tok::Amp) {
            parts.push(self.unit(cur)?);
        }
        Ok(Formula::and(parts))
    }

    fn unit(&self, cur: &mut Cursor) -> Result<Formula> {
        match cur.peek().clone() {
            Tok::LParen => {
                cur.next();
                let f = self.formula(cur)?;
                cur.expect(&Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(s) if s == "true" => {
                cur.next();
                Ok(Formula::top())
            }
            Tok::Ident(s) if s == "exists" => {
                cur.next();
                let mut vars = Vec::new();
                while let Tok::Ident(v) = cur.peek().clone() {
                    if KEYWORDS.contains(&v.as_str()) || self.sig.has_symbol(&v) {
                        return Err(cur.error(format!("`{v}` cannot be bound")));
                    }
                    if vars.contains(&v) {
                        return Err(cur.error(format!("variable `{v}` bound twice")));
                    }
                    cur.next();
                    vars.push(v);
                }
                if vars.is_empty() {
                    return Err(cur.unexpected("a bound variable"));
                }
                cur.expect(&Tok::Dot)?;
                let body = self.formula(cur)?;
                Ok(Formula::Exists(vars, Box::new(body)))
            }
            Tok::Ident(name) => {
                if let Some(arity) = self.sig.rel_arity(&name) {
                    cur.next();
                    let args = if *cur.peek() == Tok::LParen {
                        self.args(cur)?
                    } else {
                        Vec::new()
                    };
                    if args.len() != arity {
                        return Err(cur.error(format!(
                            "`{name}` expects {arity} arguments, got {}",
                            args.len()
                        )));
                    }
                    return Ok(Formula::Atom(Atom::Rel(name, args)));
                }
                if *cur.peek_at(1) == Tok::LParen && self.sig.fun_arity(&name).is_none() {
                    return Err(cur.error(format!("unknown symbol `{name}`")));
                }
                let lhs = self.term(cur)?;
                cur.expect(&Tok::Eq)?;
                let rhs = self.term(cur)?;
                Ok(Formula::Atom(Atom::Eq(lhs, rhs)))
            }
            _ => Err(cur.unexpected("a formula")),
        }
    }

    /// `[x, y]` or `[]`.
    pub fn context(&self, cur: &mut Cursor) -> Result<Context> {
        cur.expect(&Tok::LBrack)?;
        let mut vars: Vec<String> = Vec::new();
        if cur.eat(&Tok::RBrack) {
            return Ok(Context(vars));
        }
        loop {
            let v = cur.ident()?;
            if vars.contains(&v) {
                return Err(cur.error(format!("variable `{v}` listed twice")));
            }
            vars.push(v);
            if cur.eat(&Tok::RBrack) {
                return Ok(Context(vars));
            }
            cur.expect(&Tok::Comma)?;
        }
    }

    /// `φ |-[x̄] ψ1 | ψ2 | …`; without brackets the context is the free
    /// variables in order of first occurrence.
    pub fn query(&self, cur: &mut Cursor) -> Result<Query> {
        let antecedent = self.formula(cur)?;
        cur.expect(&Tok::Turnstile)?;
        let explicit = if *cur.peek() == Tok::LBrack {
            Some(self.context(cur)?)
        } else {
            None
        };
        let mut disjuncts = vec![self.formula(cur)?];
        while cur.eat(&Tok::Bar) {
            disjuncts.push(self.formula(cur)?);
        }
        let context = match explicit {
            Some(c) => c,
            None => {
                let mut seen = Vec::new();
                free_vars_in_order(&antecedent, &mut Vec::new(), &mut seen);
                for d in &disjuncts {
                    free_vars_in_order(d, &mut Vec::new(), &mut seen);
                }
                Context(seen)
            }
        };
        Ok(Query {
            context,
            antecedent,
            disjuncts,
        })
    }
}

/// Free variables in order of first occurrence.
pub fn free_vars_in_order(f: &Formula, bound: &mut Vec<String>, out: &mut Vec<String>) {
    fn term(t: &Term, bound: &[String], out: &mut Vec<String>) {
        match t {
            Term::Var(v) => {
                if !bound.contains(v) && !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::App(_, args) => args.iter().for_each(|a| term(a, bound, out)),
        }
    }
    match f {
        Formula::Atom(a) => a.terms().into_iter().for_each(|t| term(t, bound, out)),
        Formula::And(parts) => parts.iter().for_each(|p| free_vars_in_order(p, bound, out)),
        Formula::Exists(vars, body) => {
            let n = bound.len();
            bound.extend(vars.iter().cloned());
            free_vars_in_order(body, bound, out);
            bound.truncate(n);
        }
    }
}

pub fn parse_formula(src: &str, sig: &Signature) -> Result<Formula> {
    let mut cur = Cursor::new(src, 1, 1)?;
    let f = FormulaParser::new(sig).formula(&mut cur)?;
    cur.expect_end()?;
    Ok(f)
}

/// A formula together with its free variables in order of occurrence.
pub fn parse_formula_in_context(src: &str, sig: &Signature) -> Result<(Formula, Context)> {
    let f = parse_formula(src, sig)?;
    let mut vars = Vec::new();
    free_vars_in_order(&f, &mut Vec::new(), &mut vars);
    Ok((f, Context(vars)))
}

pub fn parse_query(src: &str, sig: &Signature) -> Result<Query> {
    parse_query_at(src, sig, 1, 1)
}

pub(crate) fn parse_query_at(src: &str, sig: &Signature, line: usize, column: usize) -> Result<Query> {
    let mut cur = Cursor::new(src, line, column)?;
    let q = FormulaParser::new(sig).query(&mut cur)?;
    cur.expect_end()?;
    let as_seq = |d: &Formula| Sequent::new(q.context.clone(), q.antecedent.clone(), d.clone());
    for d in &q.disjuncts {
        sig.check_sequent(&as_seq(d)).map_err(|e| locate(e, line))?;
    }
    Ok(q)
}

fn locate(e: Error, line: usize) -> Error {
    match e {
        Error::Parse { .. } => e,
        other => Error::parse(line, 1, other.to_string()),
    }
}

pub fn parse_sequent(src: &str, sig: &Signature) -> Result<Sequent> {
    let q = parse_query(src, sig)?;
    q.as_sequent()
        .ok_or_else(|| Error::parse(1, 1, "disjunction is not allowed in a regular sequent"))
}

/// Theory file: `rel R/2`, `fun f/1` declarations and `axiom name: <sequent>`
/// lines; `#` starts a comment.
pub fn parse_theory(src: &str) -> Result<Theory> {
    let mut sig = Signature::new();
    let mut axiom_lines = Vec::new();
    for (i, raw) in src.lines().enumerate() {
        let line = i + 1;
        let mut cur = Cursor::new(raw, line, 1)?;
        if cur.at_end() {
            continue;
        }
        let kw = cur.ident()?;
        match kw.as_str() {
            "rel" | "fun" => loop {
                let name = cur.ident()?;
                if KEYWORDS.contains(&name.as_str()) || sig.has_symbol(&name) {
                    return Err(cur.error(format!("symbol `{name}` declared twice")));
                }
                cur.expect(&Tok::Slash)?;
                let arity = cur.number()?;
                if kw == "rel" {
                    sig.rels.insert(name, arity);
                } else {
                    sig.funs.insert(name, arity);
                }
                if cur.at_end() {
                    break;
                }
                cur.expect(&Tok::Comma)?;
            },
            "axiom" => axiom_lines.push((line, raw)),
            other => {
                return Err(Error::parse(
                    line,
                    1,
                    format!("expected `rel`, `fun` or `axiom`, found `{other}`"),
                ))
            }
        }
    }
    let mut theory = Theory::new(sig);
    let mut names = BTreeSet::new();
    for (line, raw) in axiom_lines {
        let mut cur = Cursor::new(raw, line, 1)?;
        cur.ident()?;
        let name = cur.ident()?;
        cur.expect(&Tok::Colon)?;
        if !names.insert(name.clone()) {
            return Err(cur.error(format!("axiom `{name}` defined twice")));
        }
        let offset = raw.find(':').map(|p| p + 1).unwrap_or(raw.len());
        let rest = &raw[offset..];
        let q = parse_query_at(rest, &theory.signature, line, offset + 1)?;
        let seq = q.as_sequent().ok_or_else(|| {
            Error::parse(line, offset + 1, "axioms must have a single regular consequent")
        })?;
        theory.axioms.insert(name, seq);
    }
    Ok(theory)
}

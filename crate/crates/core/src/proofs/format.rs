use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::derivation::{Derivation, Rule};
use crate::error::{Error, Result};
use crate::syntax::{Atom, Sequent, Signature, Term};
use crate::text::{is_ident_char, parse_query_at, Cursor, FormulaParser, Tok};

/// Symbols used by `d` with their arities, split into relations and functions.
pub fn derivation_signature(d: &Derivation) -> Signature {
    let mut sig = Signature::new();
    d.walk(&mut |n| {
        for f in [&n.conclusion.antecedent, &n.conclusion.consequent] {
            for a in f.atoms() {
                if let Atom::Rel(r, args) = a {
                    sig.rels.insert(r.clone(), args.len());
                }
                a.terms().into_iter().for_each(|t| term_symbols(t, &mut sig));
            }
        }
        if let Rule::Substitution(map) = &n.rule {
            map.values().for_each(|t| term_symbols(t, &mut sig));
        }
    });
    sig
}

fn term_symbols(t: &Term, sig: &mut Signature) {
    if let Term::App(f, args) = t {
        sig.funs.insert(f.clone(), args.len());
        args.iter().for_each(|a| term_symbols(a, sig));
    }
}

/// Prints `d` one node per line, children before parents, root last.
/// Symbols missing from `base` are declared first.
pub fn print_derivation(d: &Derivation, base: &Signature) -> String {
    let mut out = String::new();
    let used = derivation_signature(d);
    let rels: Vec<String> = used
        .rels
        .iter()
        .filter(|(r, _)| base.rel_arity(r).is_none())
        .map(|(r, n)| format!("{r}/{n}"))
        .collect();
    let funs: Vec<String> = used
        .funs
        .iter()
        .filter(|(f, _)| base.fun_arity(f).is_none())
        .map(|(f, n)| format!("{f}/{n}"))
        .collect();
    if !rels.is_empty() {
        writeln!(out, "rel {}", rels.join(", ")).unwrap();
    }
    if !funs.is_empty() {
        writeln!(out, "fun {}", funs.join(", ")).unwrap();
    }
    let mut next = 0;
    print_node(d, &mut out, &mut next);
    out
}

fn print_node(d: &Derivation, out: &mut String, next: &mut usize) -> usize {
    let children: Vec<String> = d
        .premises
        .iter()
        .map(|p| format!("n{}", print_node(p, out, next)))
        .collect();
    let id = *next;
    *next += 1;
    write!(out, "n{id} = {}", d.rule.tag()).unwrap();
    match &d.rule {
        Rule::Axiom(name) => write!(out, "[{name}]").unwrap(),
        Rule::Substitution(map) => {
            let parts: Vec<String> = map.iter().map(|(x, t)| format!("{x}:={t}")).collect();
            write!(out, "[{}]", parts.join(", ")).unwrap();
        }
        Rule::AndElim(i) => write!(out, "[{i}]").unwrap(),
        Rule::EqSubst(pairs) => {
            let parts: Vec<String> = pairs.iter().map(|(x, y)| format!("{x}:={y}")).collect();
            write!(out, "[{}]", parts.join(", ")).unwrap();
        }
        _ => {}
    }
    if !children.is_empty() {
        write!(out, "({})", children.join(", ")).unwrap();
    }
    writeln!(out, " : {}", d.conclusion).unwrap();
    id
}

/// Parses the line format written by [`print_derivation`]. Declarations in
/// the file extend `base`; the last node is the root and every other node
/// must be used exactly once.
pub fn parse_derivation(src: &str, base: &Signature) -> Result<Derivation> {
    let mut sig = base.clone();
    let mut nodes: BTreeMap<String, (usize, Option<Derivation>)> = BTreeMap::new();
    let mut last: Option<String> = None;
    for (i, raw) in src.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let indent = raw.len() - trimmed.len();
        if trimmed.starts_with("rel ") || trimmed.starts_with("fun ") {
            declare(trimmed, line, indent + 1, &mut sig)?;
            continue;
        }
        let (id, d) = parse_node(raw, line, &sig, &mut nodes)?;
        if nodes.contains_key(&id) {
            return Err(Error::parse(line, indent + 1, format!("node `{id}` defined twice")));
        }
        nodes.insert(id.clone(), (line, Some(d)));
        last = Some(id);
    }
    let root = last.ok_or_else(|| Error::parse(1, 1, "no derivation nodes"))?;
    let d = nodes.get_mut(&root).unwrap().1.take().unwrap();
    if let Some((id, (line, _))) = nodes.iter().find(|(_, (_, d))| d.is_some()) {
        return Err(Error::parse(*line, 1, format!("node `{id}` is not used")));
    }
    Ok(d)
}

fn declare(src: &str, line: usize, column: usize, sig: &mut Signature) -> Result<()> {
    let mut cur = Cursor::new(src, line, column)?;
    let kw = cur.ident()?;
    loop {
        let name = cur.ident()?;
        cur.expect(&Tok::Slash)?;
        let arity = cur.number()?;
        let clash = if kw == "rel" {
            sig.fun_arity(&name).is_some() || sig.rels.insert(name.clone(), arity).is_some_and(|n| n != arity)
        } else {
            sig.rel_arity(&name).is_some() || sig.funs.insert(name.clone(), arity).is_some_and(|n| n != arity)
        };
        if clash {
            return Err(cur.error(format!("conflicting declaration of `{name}`")));
        }
        if cur.at_end() {
            return Ok(());
        }
        cur.expect(&Tok::Comma)?;
    }
}

/// Byte-level scanner for the parts of a node line outside the sequent.
struct Scan<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
}

impl<'a> Scan<'a> {
    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with([' ', '\t']) {
            self.pos += 1;
        }
    }

    fn error(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.line, self.pos + 1, msg)
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> &'a str {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.src[self.pos..].chars().next() {
            if !f(c) {
                break;
            }
            self.pos += c.len_utf8();
        }
        &self.src[start..self.pos]
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    /// Text up to the closing `close`, returned with its starting column.
    fn delimited(&mut self, close: char) -> Result<(&'a str, usize)> {
        let start = self.pos;
        let end = self.src[start..]
            .find(close)
            .ok_or_else(|| self.error(format!("missing `{close}`")))?;
        self.pos = start + end + 1;
        Ok((&self.src[start..start + end], start + 1))
    }
}

type Nodes = BTreeMap<String, (usize, Option<Derivation>)>;

fn parse_node(raw: &str, line: usize, sig: &Signature, nodes: &mut Nodes) -> Result<(String, Derivation)> {
    let mut s = Scan { src: raw, pos: 0, line };
    let id = s.take_while(is_ident_char).to_string();
    if id.is_empty() {
        return Err(s.error("expected a node name or a declaration"));
    }
    s.expect('=')?;
    let rule_col = s.pos + 2;
    let tag = s.take_while(|c| c.is_ascii_lowercase() || c == '-').to_string();
    let payload = if s.eat('[') {
        Some(s.delimited(']')?)
    } else {
        None
    };
    let mut premises = Vec::new();
    if s.eat('(') {
        let (inner, col) = s.delimited(')')?;
        for part in inner.split(',') {
            let name = part.trim();
            let entry = nodes
                .get_mut(name)
                .ok_or_else(|| Error::parse(line, col, format!("unknown node `{name}`")))?;
            let d = entry
                .1
                .take()
                .ok_or_else(|| Error::parse(line, col, format!("node `{name}` used twice")))?;
            premises.push(d);
        }
    }
    s.expect(':')?;
    let rest = &raw[s.pos..];
    let q = parse_query_at(rest, sig, line, s.pos + 1)?;
    let conclusion: Sequent = q
        .as_sequent()
        .ok_or_else(|| Error::parse(line, s.pos + 1, "a derivation node has one consequent"))?;
    let rule = parse_rule(&tag, payload, line, rule_col, sig)?;
    Ok((id, Derivation::node(conclusion, rule, premises)))
}

fn parse_rule(tag: &str, payload: Option<(&str, usize)>, line: usize, col: usize, sig: &Signature) -> Result<Rule> {
    let needs_payload = matches!(tag, "axiom" | "subst" | "and-elim" | "eq-subst");
    if needs_payload != payload.is_some() {
        let msg = if needs_payload { "needs a `[...]` argument" } else { "takes no `[...]` argument" };
        return Err(Error::parse(line, col, format!("rule `{tag}` {msg}")));
    }
    let cursor = || {
        let (text, c) = payload.unwrap();
        Cursor::new(text, line, c)
    };
    let rule = match tag {
        "axiom" => {
            let mut cur = cursor()?;
            let name = cur.ident()?;
            cur.expect_end()?;
            Rule::Axiom(name)
        }
        "identity" => Rule::Identity,
        "cut" => Rule::Cut,
        "subst" => {
            let mut cur = cursor()?;
            let mut map = BTreeMap::new();
            for (x, t) in assignments(&mut cur, |cur| FormulaParser::new(sig).term(cur))? {
                if map.insert(x.clone(), t).is_some() {
                    return Err(cur.error(format!("`{x}` assigned twice")));
                }
            }
            Rule::Substitution(map)
        }
        "and-intro" => Rule::AndIntro,
        "and-elim" => {
            let mut cur = cursor()?;
            let i = cur.number()?;
            cur.expect_end()?;
            Rule::AndElim(i)
        }
        "top-intro" => Rule::TopIntro,
        "eq-refl" => Rule::EqRefl,
        "eq-subst" => {
            let mut cur = cursor()?;
            Rule::EqSubst(assignments(&mut cur, |cur| cur.ident())?)
        }
        "exists-down" => Rule::ExistsDown,
        "exists-up" => Rule::ExistsUp,
        "frobenius" => Rule::Frobenius,
        "weaken" => Rule::Weakening,
        other => return Err(Error::parse(line, col, format!("unknown rule `{other}`"))),
    };
    Ok(rule)
}

/// `x := v, …`, possibly empty.
fn assignments<T>(cur: &mut Cursor, mut value: impl FnMut(&mut Cursor) -> Result<T>) -> Result<Vec<(String, T)>> {
    let mut out = Vec::new();
    if cur.at_end() {
        return Ok(out);
    }
    loop {
        let x = cur.ident()?;
        cur.expect(&Tok::Assign)?;
        out.push((x, value(cur)?));
        if cur.at_end() {
            return Ok(out);
        }
        cur.expect(&Tok::Comma)?;
    }
}


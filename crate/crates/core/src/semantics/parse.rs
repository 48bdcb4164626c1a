use super::structure::{Elem, Structure};
use crate::error::{Error, Result};
use crate::syntax::Signature;
use crate::text::{Cursor, Tok};

fn tuple(cur: &mut Cursor, s: &Structure) -> Result<Vec<Elem>> {
    let elem = |cur: &mut Cursor| -> Result<Elem> {
        let name = cur.ident()?;
        s.elem(&name)
            .ok_or_else(|| cur.error(format!("unknown element `{name}`")))
    };
    if !cur.eat(&Tok::LParen) {
        return Ok(vec![elem(cur)?]);
    }
    let mut out = Vec::new();
    if cur.eat(&Tok::RParen) {
        return Ok(out);
    }
    loop {
        out.push(elem(cur)?);
        if cur.eat(&Tok::RParen) {
            return Ok(out);
        }
        cur.expect(&Tok::Comma)?;
    }
}

fn declare(
    sig: &mut Signature,
    rel: bool,
    name: &str,
    arity: usize,
    cur: &Cursor,
) -> Result<()> {
    let (mine, other) = if rel {
        (&mut sig.rels, &sig.funs)
    } else {
        (&mut sig.funs, &sig.rels)
    };
    if other.contains_key(name) {
        return Err(cur.error(format!("`{name}` is declared with another kind")));
    }
    match mine.get(name) {
        Some(&a) if a != arity => Err(cur.error(format!(
            "`{name}` has arity {a}, this entry has {arity}"
        ))),
        Some(_) => Ok(()),
        None => {
            mine.insert(name.to_string(), arity);
            Ok(())
        }
    }
}

/// Structure file: `carrier: a b`, `rel R: (a,b)`, `fun f: a->b`,
/// `fun g/2: (a,b)->a`, `fun c: ()->a`. Arities are inferred from entries
/// or given as `R/n`. Symbols of `base` missing from the file are empty.
pub fn parse_structure(src: &str, base: Option<&Signature>) -> Result<Structure> {
    let mut s = Structure::new(base.cloned().unwrap_or_default());
    let mut seen_carrier = false;
    for (i, raw) in src.lines().enumerate() {
        let line = i + 1;
        let mut cur = Cursor::new(raw, line, 1)?;
        if cur.at_end() {
            continue;
        }
        let kw = cur.ident()?;
        match kw.as_str() {
            "carrier" => {
                cur.expect(&Tok::Colon)?;
                while !cur.at_end() {
                    let name = cur.ident()?;
                    if s.elem(&name).is_some() {
                        return Err(cur.error(format!("element `{name}` listed twice")));
                    }
                    s.add_element(&name);
                }
                seen_carrier = true;
            }
            "rel" | "fun" => {
                if !seen_carrier {
                    return Err(cur.error("`carrier:` must come first"));
                }
                let is_rel = kw == "rel";
                let name = cur.ident()?;
                let mut arity = None;
                if cur.eat(&Tok::Slash) {
                    arity = Some(cur.number()?);
                }
                cur.expect(&Tok::Colon)?;
                if let Some(a) = arity {
                    let mut sig = s.signature.clone();
                    declare(&mut sig, is_rel, &name, a, &cur)?;
                    s.extend_signature(&sig)?;
                }
                while !cur.at_end() {
                    let args = tuple(&mut cur, &s)?;
                    let mut sig = s.signature.clone();
                    declare(&mut sig, is_rel, &name, args.len(), &cur)?;
                    s.extend_signature(&sig)?;
                    if is_rel {
                        s.add_tuple(&name, args);
                    } else {
                        cur.expect(&Tok::Arrow)?;
                        let v = tuple(&mut cur, &s)?;
                        if v.len() != 1 {
                            return Err(cur.error("a function value is a single element"));
                        }
                        if s.fun_value(&name, &args).is_some() {
                            return Err(cur.error(format!("`{name}` defined twice on one argument")));
                        }
                        s.set_fun(&name, args, v[0]);
                    }
                }
            }
            other => {
                return Err(Error::parse(
                    line,
                    1,
                    format!("expected `carrier`, `rel` or `fun`, found `{other}`"),
                ))
            }
        }
    }
    s.check().map_err(|e| Error::parse(1, 1, e.to_string()))?;
    Ok(s)
}

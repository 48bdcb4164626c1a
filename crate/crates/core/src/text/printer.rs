use std::fmt::{self, Display, Formatter, Write as _};

use crate::syntax::{Atom, Context, Formula, Query, Sequent, Signature, Term, Theory};

impl Display for Term {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::App(g, args) if args.is_empty() => f.write_str(g),
            Term::App(g, args) => {
                write!(f, "{g}(")?;
                write_list(f, args)?;
                f.write_str(")")
            }
        }
    }
}

fn write_list<T: Display>(f: &mut Formatter<'_>, items: &[T]) -> fmt::Result {
    for (i, t) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{t}")?;
    }
    Ok(())
}

impl Display for Atom {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Eq(l, r) => write!(f, "{l} = {r}"),
            Atom::Rel(r, args) if args.is_empty() => f.write_str(r),
            Atom::Rel(r, args) => {
                write!(f, "{r}(")?;
                write_list(f, args)?;
                f.write_str(")")
            }
        }
    }
}

impl Display for Formula {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::And(parts) if parts.is_empty() => f.write_str("true"),
            Formula::And(parts) => {
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" & ")?;
                    }
                    let last = i + 1 == parts.len();
                    let wrap = match p {
                        Formula::And(inner) => !inner.is_empty(),
                        Formula::Exists(..) => !last,
                        Formula::Atom(_) => false,
                    };
                    if wrap {
                        write!(f, "({p})")?;
                    } else {
                        write!(f, "{p}")?;
                    }
                }
                Ok(())
            }
            Formula::Exists(vars, body) => write!(f, "exists {}. {body}", vars.join(" ")),
        }
    }
}

impl Display for Context {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.0.join(","))
    }
}

impl Display for Sequent {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "{} |-{} {}", self.antecedent, self.context, self.consequent)
    }
}

impl Display for Query {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "{} |-{} ", self.antecedent, self.context)?;
        for (i, d) in self.disjuncts.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl Display for Signature {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        for (name, arity) in &self.rels {
            writeln!(f, "rel {name}/{arity}")?;
        }
        for (name, arity) in &self.funs {
            writeln!(f, "fun {name}/{arity}")?;
        }
        Ok(())
    }
}

impl Display for Theory {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.signature)?;
        for (name, seq) in &self.axioms {
            writeln!(f, "axiom {name}: {seq}")?;
        }
        Ok(())
    }
}

/// `x:=t, y:=s` listing of an assignment.
pub fn show_assignment<'a, I>(pairs: I) -> String
where
    I: IntoIterator<Item = (&'a String, &'a Term)>,
{
    let mut out = String::new();
    for (i, (v, t)) in pairs.into_iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{v}:={t}");
    }
    out
}

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Dot,
    Amp,
    Eq,
    Turnstile,
    Bar,
    Colon,
    Slash,
    Arrow,
    Assign,
    End,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrack => "`[`".into(),
            Tok::RBrack => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Turnstile => "`|-`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Assign => "`:=`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

/// A token with its 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spanned {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

pub fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\'' || c == '@'
}

/// Tokenizes one line of input. `#` starts a comment.
pub fn lex(src: &str, line: usize, first_column: usize) -> Result<Vec<Spanned>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = first_column + i;
        let push = |out: &mut Vec<Spanned>, tok| out.push(Spanned { tok, line, column });
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                i += 1;
                continue;
            }
            '#' => break,
            '(' => push(&mut out, Tok::LParen),
            ')' => push(&mut out, Tok::RParen),
            '[' => push(&mut out, Tok::LBrack),
            ']' => push(&mut out, Tok::RBrack),
            ',' => push(&mut out, Tok::Comma),
            '.' => push(&mut out, Tok::Dot),
            '&' => push(&mut out, Tok::Amp),
            '=' => push(&mut out, Tok::Eq),
            '/' => push(&mut out, Tok::Slash),
            '|' => {
                if chars.get(i + 1) == Some(&'-') {
                    push(&mut out, Tok::Turnstile);
                    i += 1;
                } else {
                    push(&mut out, Tok::Bar);
                }
            }
            ':' => {
                if chars.get(i + 1) == Some(&'=') {
                    push(&mut out, Tok::Assign);
                    i += 1;
                } else {
                    push(&mut out, Tok::Colon);
                }
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                push(&mut out, Tok::Arrow);
                i += 1;
            }
            c if is_ident_char(c) && c != '\'' => {
                let start = i;
                while i < chars.len() && is_ident_char(chars[i]) {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                push(&mut out, Tok::Ident(s));
                continue;
            }
            other => {
                return Err(Error::parse(line, column, format!("unexpected character `{other}`")));
            }
        }
        i += 1;
    }
    out.push(Spanned {
        tok: Tok::End,
        line,
        column: first_column + chars.len(),
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexes_sequent_punctuation() {
        let toks: Vec<Tok> = lex("P(x) |-[x] a | b -> c := d", 1, 1)
            .unwrap()
            .into_iter()
            .map(|s| s.tok)
            .collect();
        assert!(toks.contains(&Tok::Turnstile));
        assert!(toks.contains(&Tok::Bar));
        assert!(toks.contains(&Tok::Arrow));
        assert!(toks.contains(&Tok::Assign));
    }

    #[test]
    fn reports_column() {
        let err = lex("P(x) ! Q", 3, 1).unwrap_err();
        assert_eq!(err, Error::parse(3, 6, "unexpected character `!`"));
    }
}

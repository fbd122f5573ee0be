// SPDX-License-Identifier: Apache-2.0

//! Minimal reader for solver output s-expressions.

use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sexp {
    /// Symbol, numeral or string; quoted symbols lose their `|...|`.
    Atom(String),
    List(Vec<Sexp>),
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom(a) => write!(f, "{}", a),
            Sexp::List(items) => {
                write!(f, "(")?;
                for (k, i) in items.iter().enumerate() {
                    if k > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{}", i)?;
                }
                write!(f, ")")
            }
        }
    }
}

pub fn parse_sexps(text: &str) -> Result<Vec<Sexp>, String> {
    let chars: Vec<char> = text.chars().collect();
    let mut pos = 0;
    let mut out = vec![];
    loop {
        skip_ws(&chars, &mut pos);
        if pos >= chars.len() {
            return Ok(out);
        }
        out.push(parse_one(&chars, &mut pos)?);
    }
}

fn skip_ws(c: &[char], pos: &mut usize) {
    while *pos < c.len() {
        if c[*pos].is_whitespace() {
            *pos += 1;
        } else if c[*pos] == ';' {
            while *pos < c.len() && c[*pos] != '\n' {
                *pos += 1;
            }
        } else {
            break;
        }
    }
}

fn parse_one(c: &[char], pos: &mut usize) -> Result<Sexp, String> {
    skip_ws(c, pos);
    match c.get(*pos) {
        None => Err("unexpected end of input".into()),
        Some('(') => {
            *pos += 1;
            let mut items = vec![];
            loop {
                skip_ws(c, pos);
                match c.get(*pos) {
                    None => return Err("unclosed list".into()),
                    Some(')') => {
                        *pos += 1;
                        return Ok(Sexp::List(items));
                    }
                    _ => items.push(parse_one(c, pos)?),
                }
            }
        }
        Some(')') => Err(format!("unexpected `)` at offset {}", pos)),
        Some('|') => {
            let start = *pos + 1;
            let end = c[start..].iter().position(|&x| x == '|').ok_or("unclosed quoted symbol")? + start;
            *pos = end + 1;
            Ok(Sexp::Atom(c[start..end].iter().collect()))
        }
        Some('"') => {
            let start = *pos;
            *pos += 1;
            while *pos < c.len() {
                if c[*pos] == '"' {
                    // "" is an escaped quote
                    if c.get(*pos + 1) == Some(&'"') {
                        *pos += 2;
                        continue;
                    }
                    break;
                }
                *pos += 1;
            }
            *pos += 1;
            Ok(Sexp::Atom(c[start..(*pos).min(c.len())].iter().collect()))
        }
        Some(_) => {
            let start = *pos;
            while *pos < c.len() && !c[*pos].is_whitespace() && !"()|\";".contains(c[*pos]) {
                *pos += 1;
            }
            Ok(Sexp::Atom(c[start..*pos].iter().collect()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested() {
        let s = parse_sexps("(a (b |c d|) \"e\"\"f\") ; comment\n g").unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].to_string(), "(a (b c d) \"e\"\"f\")");
        assert!(parse_sexps("(a").is_err());
    }
}

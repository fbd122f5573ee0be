// SPDX-License-Identifier: Apache-2.0

use super::{FrontendError, Span};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Number(i64),
    /// `//expect: holds` / `//expect: fails` annotation preceding an assert.
    Expect(Expectation),
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Semi,
    Comma,
    Dot,
    Assign,
    Arrow,
    EqEq,
    NotEq,
    Lt,
    Le,
    Gt,
    Ge,
    AndAnd,
    OrOr,
    Bang,
    Plus,
    Minus,
    Question,
    Colon,
    /// Lexically valid Solidity outside the fragment (`*`, `++`, strings, ...).
    Other(String),
    Eof,
}

/// Expected verdict attached to an assert.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expectation {
    Holds,
    Fails,
}

impl std::fmt::Display for Expectation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Expectation::Holds => f.write_str("holds"),
            Expectation::Fails => f.write_str("fails"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

pub struct Lexed {
    pub tokens: Vec<Token>,
    pub warnings: Vec<String>,
}

pub fn lex(src: &str) -> Result<Lexed, FrontendError> {
    let chars: Vec<char> = src.chars().collect();
    let mut tokens = Vec::new();
    let mut warnings = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        let span = Span::new(line, col);
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            let start = i;
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            let text: String = chars[start + 2..i].iter().collect();
            if let Some(e) = parse_expect_comment(&text, span)? {
                tokens.push(Token { tok: Tok::Expect(e), span });
            }
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            bump!();
            bump!();
            loop {
                if i >= chars.len() {
                    return Err(FrontendError::syntax(span, "unterminated block comment"));
                }
                if chars[i] == '*' && chars.get(i + 1) == Some(&'/') {
                    bump!();
                    bump!();
                    break;
                }
                bump!();
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' || c == '$' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '$') {
                bump!();
            }
            let word: String = chars[start..i].iter().collect();
            if word == "pragma" {
                // skip the whole directive
                while i < chars.len() && chars[i] != ';' {
                    bump!();
                }
                if i < chars.len() {
                    bump!();
                }
                warnings.push(format!("{}: pragma directive ignored", span));
                continue;
            }
            tokens.push(Token { tok: Tok::Ident(word), span });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                bump!();
            }
            let text: String = chars[start..i].iter().filter(|c| **c != '_').collect();
            if !text.chars().all(|c| c.is_ascii_digit()) {
                return Err(FrontendError::unsupported(
                    span,
                    format!("non-decimal literal `{}`", text),
                ));
            }
            let n = text
                .parse::<i64>()
                .map_err(|_| FrontendError::unsupported(span, format!("integer literal `{}` out of range", text)))?;
            tokens.push(Token { tok: Tok::Number(n), span });
            continue;
        }
        if c == '"' || c == '\'' {
            let quote = c;
            bump!();
            while i < chars.len() && chars[i] != quote {
                bump!();
            }
            if i < chars.len() {
                bump!();
            }
            tokens.push(Token { tok: Tok::Other("string literal".into()), span });
            continue;
        }
        let next = chars.get(i + 1).copied();
        let (tok, len) = match (c, next) {
            ('=', Some('=')) => (Tok::EqEq, 2),
            ('=', Some('>')) => (Tok::Arrow, 2),
            ('!', Some('=')) => (Tok::NotEq, 2),
            ('<', Some('=')) => (Tok::Le, 2),
            ('>', Some('=')) => (Tok::Ge, 2),
            ('&', Some('&')) => (Tok::AndAnd, 2),
            ('|', Some('|')) => (Tok::OrOr, 2),
            ('+', Some('+')) | ('-', Some('-')) | ('+', Some('=')) | ('-', Some('=')) => {
                (Tok::Other(format!("{}{}", c, next.unwrap())), 2)
            }
            ('{', _) => (Tok::LBrace, 1),
            ('}', _) => (Tok::RBrace, 1),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            ('[', _) => (Tok::LBracket, 1),
            (']', _) => (Tok::RBracket, 1),
            (';', _) => (Tok::Semi, 1),
            (',', _) => (Tok::Comma, 1),
            ('.', _) => (Tok::Dot, 1),
            ('=', _) => (Tok::Assign, 1),
            ('<', _) => (Tok::Lt, 1),
            ('>', _) => (Tok::Gt, 1),
            ('!', _) => (Tok::Bang, 1),
            ('+', _) => (Tok::Plus, 1),
            ('-', _) => (Tok::Minus, 1),
            ('?', _) => (Tok::Question, 1),
            (':', _) => (Tok::Colon, 1),
            (other, _) if "*/%&|^~".contains(other) => (Tok::Other(other.to_string()), 1),
            (other, _) => {
                return Err(FrontendError::syntax(span, format!("unexpected character `{}`", other)));
            }
        };
        for _ in 0..len {
            bump!();
        }
        tokens.push(Token { tok, span });
    }
    tokens.push(Token { tok: Tok::Eof, span: Span::new(line, col) });
    Ok(Lexed { tokens, warnings })
}

fn parse_expect_comment(text: &str, span: Span) -> Result<Option<Expectation>, FrontendError> {
    let t = text.trim();
    let Some(rest) = t.strip_prefix("expect:") else {
        return Ok(None);
    };
    match rest.trim() {
        "holds" => Ok(Some(Expectation::Holds)),
        "fails" => Ok(Some(Expectation::Fails)),
        other => Err(FrontendError::Expectation {
            span,
            msg: format!("malformed expectation `{}` (expected `holds` or `fails`)", other),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        lex(src).unwrap().tokens.into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn operators_and_idents() {
        assert_eq!(
            toks("a.b[1] == c => d"),
            vec![
                Tok::Ident("a".into()),
                Tok::Dot,
                Tok::Ident("b".into()),
                Tok::LBracket,
                Tok::Number(1),
                Tok::RBracket,
                Tok::EqEq,
                Tok::Ident("c".into()),
                Tok::Arrow,
                Tok::Ident("d".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn expectation_comments() {
        let t = toks("// plain comment\n//expect: fails\nassert");
        assert_eq!(t[0], Tok::Expect(Expectation::Fails));
        assert!(matches!(lex("//expect: maybe\n"), Err(FrontendError::Expectation { .. })));
    }

    #[test]
    fn pragma_skipped_with_warning() {
        let l = lex("pragma solidity >=0.5.0;\ncontract").unwrap();
        assert_eq!(l.warnings.len(), 1);
        assert_eq!(l.tokens[0].tok, Tok::Ident("contract".into()));
        let s = l.tokens[0].span;
        assert_eq!((s.line, s.col), (2, 1));
    }

    #[test]
    fn spans_track_lines() {
        let l = lex("a\n  b").unwrap();
        let s = l.tokens[1].span;
        assert_eq!((s.line, s.col), (2, 3));
    }
}

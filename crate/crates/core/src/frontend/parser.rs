// SPDX-License-Identifier: Apache-2.0

//! Recursive-descent parser for the fragment.

use super::lexer::{Tok, Token};
use super::syntax::*;
use super::types::{DataLoc, SolType};
use super::{FrontendError, Span};

const VISIBILITY_WORDS: &[&str] = &[
    "public", "external", "internal", "private", "view", "pure", "payable", "virtual", "override",
];

/// Keywords that start constructs outside the fragment, with the name
/// reported in the `unsupported` diagnostic.
fn unsupported_keyword(word: &str) -> Option<&'static str> {
    Some(match word {
        "for" | "while" | "do" | "break" | "continue" => "loops",
        "if" | "else" => "if statements",
        "return" => "return statements",
        "emit" | "event" => "events",
        "modifier" => "modifiers",
        "assembly" => "inline assembly",
        "require" | "revert" => "require/revert",
        "library" | "interface" => "libraries and interfaces",
        "import" => "imports",
        "enum" => "enums",
        "using" => "using-for directives",
        "calldata" => "calldata location",
        "string" | "bytes" => "string and bytes types",
        "this" | "msg" | "block" | "tx" => "blockchain members",
        "unchecked" | "try" | "catch" => "unchecked/try blocks",
        "fallback" | "receive" => "fallback functions",
        _ => return None,
    })
}

pub struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    pub fn new(toks: Vec<Token>) -> Self {
        Parser { toks, pos: 0 }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn advance(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.advance();
            true
        } else {
            false
        }
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == w)
    }

    fn eat_word(&mut self, w: &str) -> bool {
        if self.is_word(w) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn describe(t: &Tok) -> String {
        match t {
            Tok::Ident(s) => format!("`{}`", s),
            Tok::Number(n) => format!("`{}`", n),
            Tok::Eof => "end of input".into(),
            Tok::Other(s) => format!("`{}`", s),
            t => format!("{:?}", t),
        }
    }

    fn unexpected(&self, what: &str) -> FrontendError {
        let t = self.peek();
        if let Tok::Other(s) = t {
            return FrontendError::unsupported(self.span(), format!("operator or literal `{}`", s));
        }
        if let Tok::Ident(w) = t {
            if let Some(c) = unsupported_keyword(w) {
                return FrontendError::unsupported(self.span(), c);
            }
        }
        FrontendError::syntax(self.span(), format!("expected {}, found {}", what, Self::describe(t)))
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<Span, FrontendError> {
        if self.peek() == &t {
            Ok(self.advance().span)
        } else {
            Err(self.unexpected(what))
        }
    }

    fn ident(&mut self) -> Result<(String, Span), FrontendError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                if let Some(c) = unsupported_keyword(&s) {
                    return Err(FrontendError::unsupported(self.span(), c));
                }
                let sp = self.advance().span;
                Ok((s, sp))
            }
            _ => Err(self.unexpected("identifier")),
        }
    }

    pub fn parse_source_unit(&mut self) -> Result<SourceUnit, FrontendError> {
        while let Tok::Expect(_) = self.peek() {
            self.advance();
        }
        if !self.is_word("contract") {
            if self.is_word("abstract") {
                return Err(FrontendError::unsupported(self.span(), "abstract contracts"));
            }
            return Err(self.unexpected("`contract`"));
        }
        let contract = self.parse_contract()?;
        if self.peek() != &Tok::Eof {
            if self.is_word("contract") {
                return Err(FrontendError::unsupported(self.span(), "multiple contracts"));
            }
            return Err(self.unexpected("end of input"));
        }
        Ok(SourceUnit { contract })
    }

    fn parse_contract(&mut self) -> Result<ContractDef, FrontendError> {
        let span = self.span();
        self.advance();
        let (name, _) = self.ident()?;
        if self.is_word("is") {
            return Err(FrontendError::unsupported(self.span(), "inheritance"));
        }
        self.expect(Tok::LBrace, "`{`")?;
        let mut c = ContractDef {
            name,
            structs: vec![],
            state_vars: vec![],
            constructor: None,
            functions: vec![],
            span,
        };
        loop {
            match self.peek().clone() {
                Tok::RBrace => {
                    self.advance();
                    break;
                }
                Tok::Expect(_) => {
                    return Err(FrontendError::Expectation {
                        span: self.span(),
                        msg: "expectation annotation not followed by an assert".into(),
                    })
                }
                Tok::Ident(w) if w == "struct" => {
                    let sp = self.advance().span;
                    let (sname, _) = self.ident()?;
                    self.expect(Tok::LBrace, "`{`")?;
                    let mut members = vec![];
                    while !self.eat(&Tok::RBrace) {
                        let ty = self.parse_type()?;
                        let (m, _) = self.ident()?;
                        self.expect(Tok::Semi, "`;`")?;
                        members.push((ty, m));
                    }
                    c.structs.push(StructDef { name: sname, members, span: sp });
                }
                Tok::Ident(w) if w == "constructor" => {
                    let sp = self.advance().span;
                    if c.constructor.is_some() {
                        return Err(FrontendError::syntax(sp, "duplicate constructor"));
                    }
                    let f = self.parse_function_rest("constructor".into(), true, sp)?;
                    c.constructor = Some(f);
                }
                Tok::Ident(w) if w == "function" => {
                    let sp = self.advance().span;
                    let (fname, _) = self.ident()?;
                    let f = self.parse_function_rest(fname, false, sp)?;
                    c.functions.push(f);
                }
                Tok::Ident(_) => {
                    let sp = self.span();
                    let ty = self.parse_type()?;
                    while let Tok::Ident(w) = self.peek() {
                        if VISIBILITY_WORDS.contains(&w.as_str()) || w == "constant" || w == "immutable" {
                            if w == "constant" || w == "immutable" {
                                return Err(FrontendError::unsupported(self.span(), "constant state variables"));
                            }
                            self.advance();
                        } else {
                            break;
                        }
                    }
                    // `T a, b;` declares several variables of the same type
                    loop {
                        let (vname, _) = self.ident()?;
                        if self.peek() == &Tok::Assign {
                            return Err(FrontendError::unsupported(self.span(), "state variable initializers"));
                        }
                        c.state_vars.push(StateVarDecl { ty: ty.clone(), name: vname, span: sp });
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                    self.expect(Tok::Semi, "`;`")?;
                }
                _ => return Err(self.unexpected("contract member")),
            }
        }
        Ok(c)
    }

    fn parse_params(&mut self) -> Result<Vec<Param>, FrontendError> {
        self.expect(Tok::LParen, "`(`")?;
        let mut ps = vec![];
        if self.eat(&Tok::RParen) {
            return Ok(ps);
        }
        loop {
            let span = self.span();
            let ty = self.parse_type()?;
            let loc = self.parse_data_loc()?;
            let (name, _) = self.ident()?;
            ps.push(Param { ty, loc, name, span });
            if self.eat(&Tok::RParen) {
                break;
            }
            self.expect(Tok::Comma, "`,` or `)`")?;
        }
        Ok(ps)
    }

    fn parse_data_loc(&mut self) -> Result<Option<DataLoc>, FrontendError> {
        if self.eat_word("storage") {
            Ok(Some(DataLoc::Storage))
        } else if self.eat_word("memory") {
            Ok(Some(DataLoc::Memory))
        } else if self.is_word("calldata") {
            Err(FrontendError::unsupported(self.span(), "calldata location"))
        } else {
            Ok(None)
        }
    }

    fn parse_function_rest(&mut self, name: String, is_constructor: bool, span: Span) -> Result<FunctionDef, FrontendError> {
        let params = self.parse_params()?;
        let mut returns = vec![];
        loop {
            match self.peek().clone() {
                Tok::Ident(w) if VISIBILITY_WORDS.contains(&w.as_str()) => {
                    self.advance();
                }
                Tok::Ident(w) if w == "returns" => {
                    self.advance();
                    returns = self.parse_params()?;
                }
                Tok::Ident(_) => return Err(FrontendError::unsupported(self.span(), "modifiers")),
                _ => break,
            }
        }
        self.expect(Tok::LBrace, "`{`")?;
        let mut body = vec![];
        loop {
            if self.eat(&Tok::RBrace) {
                break;
            }
            body.push(self.parse_stmt()?);
        }
        Ok(FunctionDef { name, is_constructor, params, returns, body, span })
    }

    pub fn parse_type(&mut self) -> Result<SolType, FrontendError> {
        let span = self.span();
        let (word, _) = match self.peek().clone() {
            Tok::Ident(w) => {
                self.advance();
                (w, span)
            }
            _ => return Err(self.unexpected("type")),
        };
        let mut ty = match word.as_str() {
            "address" => {
                self.eat_word("payable");
                SolType::Address
            }
            "bool" => SolType::Bool,
            "mapping" => {
                self.expect(Tok::LParen, "`(`")?;
                let k = self.parse_type()?;
                if !k.is_value() {
                    return Err(FrontendError::Type {
                        span,
                        msg: format!("mapping key must be a value type, found `{}`", k),
                    });
                }
                self.expect(Tok::Arrow, "`=>`")?;
                let v = self.parse_type()?;
                self.expect(Tok::RParen, "`)`")?;
                SolType::mapping(k, v)
            }
            w if is_int_word(w, "int") => SolType::Int,
            w if is_int_word(w, "uint") => SolType::Uint,
            w => {
                if let Some(c) = unsupported_keyword(w) {
                    return Err(FrontendError::unsupported(span, c));
                }
                if w.starts_with("bytes") || w.starts_with("fixed") || w.starts_with("ufixed") {
                    return Err(FrontendError::unsupported(span, format!("type `{}`", w)));
                }
                if is_reserved_word(w) {
                    return Err(FrontendError::syntax(span, format!("expected type, found `{}`", w)));
                }
                SolType::Struct(w.to_string())
            }
        };
        while self.peek() == &Tok::LBracket {
            match self.peek_at(1).clone() {
                Tok::RBracket => {
                    self.advance();
                    self.advance();
                    ty = SolType::dyn_array(ty);
                }
                Tok::Number(n) if self.peek_at(2) == &Tok::RBracket => {
                    self.advance();
                    self.advance();
                    self.advance();
                    if n < 0 {
                        return Err(FrontendError::syntax(span, "negative array size"));
                    }
                    ty = SolType::fix_array(ty, n as u64);
                }
                _ => return Err(self.unexpected("array size")),
            }
        }
        Ok(ty)
    }

    /// Tries to read `Type [loc] name` at the current position.
    fn try_decl_head(&mut self) -> Option<(SolType, Option<DataLoc>, String)> {
        let save = self.pos;
        let res = (|| {
            if let Tok::Ident(w) = self.peek() {
                if is_reserved_word(w) && w != "mapping" && w != "address" && w != "bool" {
                    return None;
                }
            } else {
                return None;
            }
            let ty = self.parse_type().ok()?;
            let loc = if self.is_word("calldata") {
                return None;
            } else {
                self.parse_data_loc().ok()?
            };
            match self.peek().clone() {
                Tok::Ident(n) if !is_reserved_word(&n) => {
                    self.advance();
                    Some((ty, loc, n))
                }
                _ => None,
            }
        })();
        if res.is_none() {
            self.pos = save;
        }
        res
    }

    fn parse_stmt(&mut self) -> Result<Stmt, FrontendError> {
        let span = self.span();
        if let Tok::Expect(e) = self.peek().clone() {
            self.advance();
            if !self.is_word("assert") {
                return Err(FrontendError::Expectation {
                    span,
                    msg: "expectation annotation not followed by an assert".into(),
                });
            }
            let Stmt::Assert { cond, span, .. } = self.parse_stmt()? else {
                unreachable!()
            };
            return Ok(Stmt::Assert { cond, expect: Some(e), span });
        }
        if let Tok::Ident(w) = self.peek().clone() {
            if let Some(c) = unsupported_keyword(&w) {
                if !matches!(w.as_str(), "string" | "bytes" | "this" | "msg" | "block" | "tx") {
                    return Err(FrontendError::unsupported(span, c));
                }
            }
            match w.as_str() {
                "delete" => {
                    self.advance();
                    let target = self.parse_expr()?;
                    self.expect(Tok::Semi, "`;`")?;
                    return Ok(Stmt::Delete { target, span });
                }
                "assert" => {
                    self.advance();
                    self.expect(Tok::LParen, "`(`")?;
                    let cond = self.parse_expr()?;
                    self.expect(Tok::RParen, "`)`")?;
                    self.expect(Tok::Semi, "`;`")?;
                    return Ok(Stmt::Assert { cond, expect: None, span });
                }
                _ => {}
            }
        }
        if self.peek() == &Tok::LBrace {
            return Err(FrontendError::unsupported(span, "nested blocks"));
        }
        if let Some((ty, loc, name)) = self.try_decl_head() {
            let init = if self.eat(&Tok::Assign) { Some(self.parse_expr()?) } else { None };
            self.expect(Tok::Semi, "`;`")?;
            return Ok(Stmt::VarDecl { ty, loc, name, init, span });
        }
        let e = self.parse_expr()?;
        if self.eat(&Tok::Assign) {
            let r = self.parse_expr()?;
            self.expect(Tok::Semi, "`;`")?;
            return match (e, r) {
                (Expr::Tuple(l, _), Expr::Tuple(r, _)) => Ok(Stmt::Assign { lhs: l, rhs: r, tuple: true, span }),
                (Expr::Tuple(..), _) | (_, Expr::Tuple(..)) => Err(FrontendError::Type {
                    span,
                    msg: "tuple assignment requires tuples on both sides".into(),
                }),
                (l, r) => Ok(Stmt::Assign { lhs: vec![l], rhs: vec![r], tuple: false, span }),
            };
        }
        if let Tok::Other(op) = self.peek() {
            return Err(FrontendError::unsupported(self.span(), format!("operator `{}`", op)));
        }
        self.expect(Tok::Semi, "`;` or `=`")?;
        match e {
            Expr::MemberCall(base, name, mut args, _) if name == "push" => {
                if args.len() != 1 {
                    return Err(FrontendError::unsupported(span, "push without exactly one argument"));
                }
                Ok(Stmt::Push { array: *base, value: args.remove(0), span })
            }
            Expr::MemberCall(base, name, args, _) if name == "pop" => {
                if !args.is_empty() {
                    return Err(FrontendError::Type { span, msg: "pop takes no arguments".into() });
                }
                Ok(Stmt::Pop { array: *base, span })
            }
            Expr::MemberCall(..) | Expr::Call(..) => Err(FrontendError::unsupported(span, "function calls")),
            _ => Err(FrontendError::unsupported(span, "expression statements")),
        }
    }

    pub fn parse_expr(&mut self) -> Result<Expr, FrontendError> {
        let c = self.parse_binary(0)?;
        if self.peek() == &Tok::Question {
            let span = self.advance().span;
            let t = self.parse_expr()?;
            self.expect(Tok::Colon, "`:`")?;
            let f = self.parse_expr()?;
            return Ok(Expr::Cond(Box::new(c), Box::new(t), Box::new(f), span));
        }
        Ok(c)
    }

    fn binop_at(&self, level: usize) -> Option<BinOp> {
        let op = match self.peek() {
            Tok::OrOr => BinOp::Or,
            Tok::AndAnd => BinOp::And,
            Tok::EqEq => BinOp::Eq,
            Tok::NotEq => BinOp::Ne,
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            Tok::Plus => BinOp::Add,
            Tok::Minus => BinOp::Sub,
            _ => return None,
        };
        let lvl = match op {
            BinOp::Or => 0,
            BinOp::And => 1,
            BinOp::Eq | BinOp::Ne => 2,
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 3,
            BinOp::Add | BinOp::Sub => 4,
        };
        (lvl == level).then_some(op)
    }

    fn parse_binary(&mut self, level: usize) -> Result<Expr, FrontendError> {
        if level > 4 {
            return self.parse_unary();
        }
        let mut lhs = self.parse_binary(level + 1)?;
        while let Some(op) = self.binop_at(level) {
            let span = self.advance().span;
            let rhs = self.parse_binary(level + 1)?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs), span);
        }
        if let Tok::Other(op) = self.peek() {
            if op != "string literal" {
                return Err(FrontendError::unsupported(self.span(), format!("operator `{}`", op)));
            }
        }
        Ok(lhs)
    }

    fn parse_unary(&mut self) -> Result<Expr, FrontendError> {
        let span = self.span();
        if self.eat(&Tok::Bang) {
            let e = self.parse_unary()?;
            return Ok(Expr::Unary(UnOp::Not, Box::new(e), span));
        }
        if self.eat(&Tok::Minus) {
            let e = self.parse_unary()?;
            return Ok(Expr::Unary(UnOp::Neg, Box::new(e), span));
        }
        self.parse_postfix()
    }

    fn parse_postfix(&mut self) -> Result<Expr, FrontendError> {
        let mut e = self.parse_primary()?;
        loop {
            let span = self.span();
            match self.peek() {
                Tok::Dot => {
                    self.advance();
                    let (m, _) = self.ident()?;
                    if self.peek() == &Tok::LParen {
                        let args = self.parse_args()?;
                        e = Expr::MemberCall(Box::new(e), m, args, span);
                    } else {
                        e = Expr::Member(Box::new(e), m, span);
                    }
                }
                Tok::LBracket => {
                    self.advance();
                    if self.peek() == &Tok::RBracket {
                        return Err(FrontendError::syntax(span, "missing index expression"));
                    }
                    let i = self.parse_expr()?;
                    self.expect(Tok::RBracket, "`]`")?;
                    e = Expr::Index(Box::new(e), Box::new(i), span);
                }
                Tok::LParen => return Err(FrontendError::unsupported(span, "function calls")),
                _ => break,
            }
            if matches!(e, Expr::Tuple(..)) {
                return Err(FrontendError::syntax(span, "tuples cannot be accessed"));
            }
        }
        Ok(e)
    }

    fn parse_args(&mut self) -> Result<Vec<Expr>, FrontendError> {
        self.expect(Tok::LParen, "`(`")?;
        let mut args = vec![];
        if self.eat(&Tok::RParen) {
            return Ok(args);
        }
        loop {
            args.push(self.parse_expr()?);
            if self.eat(&Tok::RParen) {
                break;
            }
            self.expect(Tok::Comma, "`,` or `)`")?;
        }
        Ok(args)
    }

    fn parse_primary(&mut self) -> Result<Expr, FrontendError> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Number(n) => {
                self.advance();
                if let Tok::Ident(unit) = self.peek() {
                    if matches!(unit.as_str(), "wei" | "gwei" | "ether" | "seconds" | "minutes" | "hours" | "days" | "weeks") {
                        return Err(FrontendError::unsupported(self.span(), "literal units"));
                    }
                }
                Ok(Expr::IntLit(n, span))
            }
            Tok::LParen => {
                self.advance();
                let first = self.parse_expr()?;
                if self.eat(&Tok::RParen) {
                    return Ok(first);
                }
                let mut items = vec![first];
                while self.eat(&Tok::Comma) {
                    items.push(self.parse_expr()?);
                }
                self.expect(Tok::RParen, "`)`")?;
                Ok(Expr::Tuple(items, span))
            }
            Tok::Ident(w) => match w.as_str() {
                "true" => {
                    self.advance();
                    Ok(Expr::BoolLit(true, span))
                }
                "false" => {
                    self.advance();
                    Ok(Expr::BoolLit(false, span))
                }
                "new" => {
                    self.advance();
                    let ty = self.parse_type()?;
                    let SolType::DynArray(elem) = ty else {
                        return Err(FrontendError::unsupported(span, "`new` of non-array types"));
                    };
                    self.expect(Tok::LParen, "`(`")?;
                    let len = self.parse_expr()?;
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(Expr::NewArray(*elem, Box::new(len), span))
                }
                _ => {
                    let (name, _) = self.ident()?;
                    if is_reserved_word(&name) || is_int_word(&name, "int") || is_int_word(&name, "uint") || name == "address" || name == "bool" {
                        if self.peek() == &Tok::LParen {
                            return Err(FrontendError::unsupported(span, "type conversions"));
                        }
                        return Err(FrontendError::syntax(span, format!("unexpected `{}`", name)));
                    }
                    if self.peek() == &Tok::LParen {
                        let args = self.parse_args()?;
                        return Ok(Expr::Call(name, args, span));
                    }
                    Ok(Expr::Ident(name, span))
                }
            },
            _ => Err(self.unexpected("expression")),
        }
    }
}

fn is_int_word(w: &str, prefix: &str) -> bool {
    match w.strip_prefix(prefix) {
        Some("") => true,
        Some(bits) => bits.parse::<u32>().map(|b| b > 0 && b <= 256 && b % 8 == 0).unwrap_or(false),
        None => false,
    }
}

fn is_reserved_word(w: &str) -> bool {
    matches!(
        w,
        "contract" | "struct" | "function" | "constructor" | "returns" | "storage" | "memory" | "calldata"
            | "delete" | "assert" | "new" | "true" | "false" | "mapping" | "public" | "external"
            | "internal" | "private" | "view" | "pure" | "payable"
    )
}

//! Recursive-descent parser for the expression language of the CLI.
//!
//! Grammar:
//!
//! ```text
//! expr     := [sign] term ((`+` | `-`) term)*
//! term     := factor (`*` factor)*
//! factor   := base (`^` posint)*
//! base     := rational | gen | `d(` expr `)` | `(` expr `)`
//! gen      := `x` int | `c` int | `dx` int | `dc` int
//! rational := int [`/` posint]
//! ```
//!
//! Functions and forms live in one algebra: `*` is the graded product, which
//! on form factors is the wedge. `^` on a `dx` generator or a repeated odd
//! generator evaluates to zero; `^` whose intermediate polynomial degree
//! overflows the ring truncation bound is a parse error. Failures carry the
//! line and column of the offending token.

use std::fmt;

use crate::diffop::{LinearOperator, OpAlgebra};
use crate::form::Form;
use crate::ring::{Element, RingSpec};
use crate::scalar::Scalar;

use num_bigint::BigInt;
use num_traits::{One, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at {}:{}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    /// `d(` — the exterior differential applied to a parenthesized expression.
    DOpen,
    /// Generator token: kind is one of `x`, `c`, `dx`, `dc`; index is 1-based
    /// in the source.
    Gen(GenKind, usize),
    /// Identifier for the operator payload language (`d/dx1`, `id`, `o`,
    /// `mul`, `proj`).
    Ident(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum GenKind {
    Even,
    Odd,
    DEven,
    DOdd,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn err(line: usize, col: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        col,
        message: message.into(),
    }
}

/// Tokenizer shared by the expression and operator languages; `operators`
/// enables the identifier tokens.
fn lex(input: &str, operators: bool) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let chars: Vec<char> = input.chars().collect();
    let mut i = 0usize;
    while i < chars.len() {
        let (l, c) = (line, col);
        let ch = chars[i];
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        match ch {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            ' ' | '\t' | '\r' => advance(1, &mut i, &mut col),
            '+' => {
                out.push(Spanned { tok: Tok::Plus, line: l, col: c });
                advance(1, &mut i, &mut col);
            }
            '-' => {
                out.push(Spanned { tok: Tok::Minus, line: l, col: c });
                advance(1, &mut i, &mut col);
            }
            '*' => {
                out.push(Spanned { tok: Tok::Star, line: l, col: c });
                advance(1, &mut i, &mut col);
            }
            '/' => {
                out.push(Spanned { tok: Tok::Slash, line: l, col: c });
                advance(1, &mut i, &mut col);
            }
            '^' => {
                out.push(Spanned { tok: Tok::Caret, line: l, col: c });
                advance(1, &mut i, &mut col);
            }
            '(' => {
                out.push(Spanned { tok: Tok::LParen, line: l, col: c });
                advance(1, &mut i, &mut col);
            }
            ')' => {
                out.push(Spanned { tok: Tok::RParen, line: l, col: c });
                advance(1, &mut i, &mut col);
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                    col += 1;
                }
                let text: String = chars[start..i].iter().collect();
                let value = text
                    .parse::<BigInt>()
                    .map_err(|_| err(l, c, format!("bad integer literal `{text}`")))?;
                out.push(Spanned { tok: Tok::Int(value), line: l, col: c });
            }
            _ if ch.is_ascii_alphabetic() => {
                // words: generator names, `d(`, or operator identifiers
                let start = i;
                while i < chars.len()
                    && (chars[i].is_ascii_alphanumeric() || (operators && chars[i] == '/'))
                {
                    i += 1;
                    col += 1;
                }
                let word: String = chars[start..i].iter().collect();
                if word == "d" && i < chars.len() && chars[i] == '(' {
                    out.push(Spanned { tok: Tok::DOpen, line: l, col: c });
                    out.push(Spanned { tok: Tok::LParen, line: l, col: c + 1 });
                    i += 1;
                    col += 1;
                } else if let Some(tok) = generator_token(&word) {
                    out.push(Spanned { tok, line: l, col: c });
                } else if operators {
                    out.push(Spanned { tok: Tok::Ident(word), line: l, col: c });
                } else {
                    return Err(err(l, c, format!("unknown symbol `{word}`")));
                }
            }
            _ => return Err(err(l, c, format!("unexpected character `{ch}`"))),
        }
    }
    Ok(out)
}

fn generator_token(word: &str) -> Option<Tok> {
    let (kind, digits) = if let Some(rest) = word.strip_prefix("dx") {
        (GenKind::DEven, rest)
    } else if let Some(rest) = word.strip_prefix("dc") {
        (GenKind::DOdd, rest)
    } else if let Some(rest) = word.strip_prefix('x') {
        (GenKind::Even, rest)
    } else {
        let rest = word.strip_prefix('c')?;
        (GenKind::Odd, rest)
    };
    if digits.is_empty() || !digits.chars().all(|d| d.is_ascii_digit()) {
        return None;
    }
    digits.parse::<usize>().ok().map(|n| Tok::Gen(kind, n))
}

struct Parser<'a> {
    toks: &'a [Spanned],
    pos: usize,
    ring: RingSpec,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<&Spanned> {
        let t = self.toks.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map_or((1, 1), |t| (t.line, t.col))
    }

    fn expect(&mut self, tok: &Tok, what: &str) -> Result<(), ParseError> {
        let (l, c) = self.here();
        match self.next() {
            Some(t) if &t.tok == tok => Ok(()),
            _ => Err(err(l, c, format!("expected {what}"))),
        }
    }

    fn expr(&mut self) -> Result<Form, ParseError> {
        let mut negate = false;
        if let Some(t) = self.peek() {
            match t.tok {
                Tok::Minus => {
                    negate = true;
                    self.pos += 1;
                }
                Tok::Plus => {
                    self.pos += 1;
                }
                _ => {}
            }
        }
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg();
        }
        while let Some(t) = self.peek() {
            match t.tok {
                Tok::Plus => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = acc.add(&rhs);
                }
                Tok::Minus => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = acc.sub(&rhs);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Form, ParseError> {
        let mut acc = self.factor()?;
        while matches!(self.peek().map(|t| &t.tok), Some(Tok::Star)) {
            self.pos += 1;
            let (l, c) = self.here();
            let rhs = self.factor()?;
            acc = acc
                .wedge(&rhs)
                .map_err(|e| err(l, c, e.to_string()))?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Form, ParseError> {
        let mut base = self.base()?;
        while matches!(self.peek().map(|t| &t.tok), Some(Tok::Caret)) {
            let (l, c) = self.here();
            self.pos += 1;
            let (el, ec) = self.here();
            let exp = match self.next() {
                Some(Spanned { tok: Tok::Int(n), .. }) if !n.is_zero() => {
                    u32::try_from(n.clone())
                        .map_err(|_| err(el, ec, "exponent too large"))?
                }
                _ => return Err(err(el, ec, "expected a positive integer exponent")),
            };
            base = base
                .wedge_pow(exp)
                .map_err(|e| err(l, c, e.to_string()))?;
            if base.truncated() {
                return Err(err(
                    l,
                    c,
                    format!(
                        "exponent overflows the truncation bound {}",
                        self.ring.trunc()
                    ),
                ));
            }
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Form, ParseError> {
        let (l, c) = self.here();
        let Some(spanned) = self.next() else {
            return Err(err(l, c, "unexpected end of input"));
        };
        match spanned.tok.clone() {
            Tok::Int(n) => {
                // rational := int ['/' posint]
                let mut numer = n;
                let mut denom = BigInt::one();
                if matches!(self.peek().map(|t| &t.tok), Some(Tok::Slash)) {
                    self.pos += 1;
                    let (dl, dc) = self.here();
                    match self.next() {
                        Some(Spanned { tok: Tok::Int(d), .. }) if !d.is_zero() => {
                            denom = d.clone();
                        }
                        _ => {
                            return Err(err(dl, dc, "expected a positive integer denominator"))
                        }
                    }
                }
                let _ = &mut numer;
                let value = Scalar::new(numer, denom);
                Ok(Form::from_element(&Element::scalar(&self.ring, value)))
            }
            Tok::Gen(kind, index) => {
                if index == 0 {
                    return Err(err(l, c, "generator indices start at 1"));
                }
                let idx = index - 1;
                let out = match kind {
                    GenKind::Even => {
                        Element::even_gen(&self.ring, idx).map(|e| Form::from_element(&e))
                    }
                    GenKind::Odd => {
                        Element::odd_gen(&self.ring, idx).map(|e| Form::from_element(&e))
                    }
                    GenKind::DEven => Form::dx(&self.ring, idx),
                    GenKind::DOdd => Form::dc(&self.ring, idx),
                };
                out.map_err(|e| err(l, c, e.to_string()))
            }
            Tok::DOpen => {
                self.expect(&Tok::LParen, "`(` after `d`")?;
                let inner = self.expr()?;
                self.expect(&Tok::RParen, "`)` closing `d(`")?;
                Ok(inner.exterior_d())
            }
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(inner)
            }
            other => Err(err(l, c, format!("unexpected token {other:?}"))),
        }
    }
}

/// Parses an expression into a form over the given ring (degree-zero forms
/// are plain ring elements; use [`Form::as_element`]).
pub fn parse_expression(input: &str, ring: &RingSpec) -> Result<Form, ParseError> {
    let toks = lex(input, false)?;
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        ring: ring.clone(),
    };
    let value = p.expr()?;
    if p.pos != toks.len() {
        let (l, c) = p.here();
        return Err(err(l, c, "trailing input after expression"));
    }
    Ok(value)
}

/// Parses an operator payload over the atoms
/// `d/dx<i>`, `d/dc<i>`, `id`, `mul(expr)`, `proj(w)` and rationals
/// (scalar multiples of the identity), combined with `o` (composition),
/// `*` (also composition, for convenience) and `+`.
pub fn parse_operator(input: &str, alg: &OpAlgebra) -> Result<LinearOperator, ParseError> {
    let toks = lex(input, true)?;
    let mut p = OpParser {
        toks: &toks,
        pos: 0,
        alg: alg.clone(),
    };
    let value = p.expr()?;
    if p.pos != toks.len() {
        let (l, c) = p.here();
        return Err(err(l, c, "trailing input after operator expression"));
    }
    Ok(value)
}

struct OpParser<'a> {
    toks: &'a [Spanned],
    pos: usize,
    alg: OpAlgebra,
}

impl<'a> OpParser<'a> {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map_or((1, 1), |t| (t.line, t.col))
    }

    fn expr(&mut self) -> Result<LinearOperator, ParseError> {
        let mut acc = self.term()?;
        while matches!(self.peek().map(|t| &t.tok), Some(Tok::Plus)) {
            self.pos += 1;
            let rhs = self.term()?;
            acc = acc.add(&rhs);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<LinearOperator, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek().map(|t| &t.tok) {
                Some(Tok::Star) => {
                    self.pos += 1;
                }
                Some(Tok::Ident(w)) if w == "o" => {
                    self.pos += 1;
                }
                _ => break,
            }
            let rhs = self.factor()?;
            acc = acc.compose(&rhs);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<LinearOperator, ParseError> {
        let (l, c) = self.here();
        let Some(spanned) = self.toks.get(self.pos) else {
            return Err(err(l, c, "unexpected end of operator expression"));
        };
        self.pos += 1;
        match spanned.tok.clone() {
            Tok::Int(n) => {
                let mut denom = BigInt::one();
                if matches!(self.peek().map(|t| &t.tok), Some(Tok::Slash)) {
                    self.pos += 1;
                    match self.toks.get(self.pos) {
                        Some(Spanned { tok: Tok::Int(d), .. }) if !d.is_zero() => {
                            denom = d.clone();
                            self.pos += 1;
                        }
                        _ => return Err(err(l, c, "expected denominator")),
                    }
                }
                Ok(self.alg.identity().scale(&Scalar::new(n, denom)))
            }
            Tok::LParen => {
                let inner = self.expr()?;
                let (rl, rc) = self.here();
                match self.toks.get(self.pos) {
                    Some(Spanned { tok: Tok::RParen, .. }) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => Err(err(rl, rc, "expected `)`")),
                }
            }
            Tok::Ident(word) => self.ident_factor(&word, l, c),
            other => Err(err(l, c, format!("unexpected token {other:?}"))),
        }
    }

    fn ident_factor(
        &mut self,
        word: &str,
        l: usize,
        c: usize,
    ) -> Result<LinearOperator, ParseError> {
        use crate::derivation::GradedDerivation;
        let ring = self.alg.ring().clone();
        if word == "id" {
            return Ok(self.alg.identity());
        }
        if let Some(rest) = word.strip_prefix("d/dx") {
            let idx: usize = rest
                .parse()
                .map_err(|_| err(l, c, format!("bad derivation `{word}`")))?;
            if idx == 0 {
                return Err(err(l, c, "generator indices start at 1"));
            }
            let u = GradedDerivation::even_partial(&ring, idx - 1)
                .map_err(|e| err(l, c, e.to_string()))?;
            return self
                .alg
                .derivation(&u)
                .map_err(|e| err(l, c, e.to_string()));
        }
        if let Some(rest) = word.strip_prefix("d/dc") {
            let idx: usize = rest
                .parse()
                .map_err(|_| err(l, c, format!("bad derivation `{word}`")))?;
            if idx == 0 {
                return Err(err(l, c, "generator indices start at 1"));
            }
            let u = GradedDerivation::odd_partial(&ring, idx - 1)
                .map_err(|e| err(l, c, e.to_string()))?;
            return self
                .alg
                .derivation(&u)
                .map_err(|e| err(l, c, e.to_string()));
        }
        if word == "mul" {
            self.expect_lparen()?;
            // reuse the expression parser on the token slice
            let mut inner = Parser {
                toks: self.toks,
                pos: self.pos,
                ring: ring.clone(),
            };
            let form = inner.expr()?;
            self.pos = inner.pos;
            self.expect_rparen()?;
            let Some(element) = form.as_element() else {
                return Err(err(l, c, "mul(...) needs a degree-zero expression"));
            };
            return self
                .alg
                .left_mul(&element)
                .map_err(|e| err(l, c, e.to_string()));
        }
        if word == "proj" {
            self.expect_lparen()?;
            let (wl, wc) = self.here();
            let w = match self.toks.get(self.pos) {
                Some(Spanned { tok: Tok::Int(n), .. }) => {
                    self.pos += 1;
                    u32::try_from(n.clone()).map_err(|_| err(wl, wc, "weight too large"))?
                }
                _ => return Err(err(wl, wc, "expected a weight")),
            };
            self.expect_rparen()?;
            return Ok(self.alg.degree_projection(w));
        }
        Err(err(l, c, format!("unknown operator atom `{word}`")))
    }

    fn expect_lparen(&mut self) -> Result<(), ParseError> {
        let (l, c) = self.here();
        match self.toks.get(self.pos) {
            Some(Spanned { tok: Tok::LParen, .. }) => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(err(l, c, "expected `(`")),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        let (l, c) = self.here();
        match self.toks.get(self.pos) {
            Some(Spanned { tok: Tok::RParen, .. }) => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(err(l, c, "expected `)`")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{frac, int};

    fn ring() -> RingSpec {
        RingSpec::new(2, 2, 8)
    }

    #[test]
    fn parses_documented_examples() {
        let r = ring();
        // "c1*c2 + 3/2*x1^2" has two terms
        let f = parse_expression("c1*c2 + 3/2*x1^2", &r).unwrap();
        let e = f.as_element().unwrap();
        assert_eq!(e.num_terms(), 2);
        let x1 = Element::even_gen(&r, 0).unwrap();
        let expect = Element::odd_gen(&r, 0)
            .unwrap()
            .gmul(&Element::odd_gen(&r, 1).unwrap())
            .unwrap()
            .add(&x1.pow(2).unwrap().scale(&frac(3, 2)));
        assert_eq!(e, expect);

        // "d(x1*c1)" = c1 dx1 + x1 dc1
        let df = parse_expression("d(x1*c1)", &r).unwrap();
        let expect = Form::from_element(&Element::odd_gen(&r, 0).unwrap())
            .wedge(&Form::dx(&r, 0).unwrap())
            .unwrap()
            .add(
                &Form::from_element(&x1)
                    .wedge(&Form::dc(&r, 0).unwrap())
                    .unwrap(),
            );
        assert_eq!(df, expect);

        // "c2*c1" normalizes to -c1*c2
        let g = parse_expression("c2*c1", &r).unwrap();
        assert_eq!(g.to_string(), "-c1*c2");
    }

    #[test]
    fn roundtrip_display_parse() {
        let r = ring();
        let samples = [
            "c1*c2 + 3/2*x1^2",
            "-x1 + 2*x2",
            "d(x1*c1)",
            "x1*dc1^2",
            "1/2 - c1*c2",
            "dx1*dx2 + c1*dc2",
        ];
        for s in samples {
            let v = parse_expression(s, &r).unwrap();
            let printed = v.to_string();
            let reparsed = parse_expression(&printed, &r).unwrap();
            assert_eq!(v, reparsed, "round trip of `{s}` via `{printed}`");
        }
    }

    #[test]
    fn zero_powers_of_odd_generators() {
        let r = ring();
        // c^2 and dx^2 parse and evaluate to zero
        assert!(parse_expression("c1^2", &r).unwrap().is_zero());
        assert!(parse_expression("dx1^2", &r).unwrap().is_zero());
        // dc^2 does not vanish
        assert!(!parse_expression("dc1^2", &r).unwrap().is_zero());
    }

    #[test]
    fn error_positions() {
        let r = ring();
        let e = parse_expression("x1 + @", &r).unwrap_err();
        assert_eq!((e.line, e.col), (1, 6));
        let e = parse_expression("x1 *\n* x2", &r).unwrap_err();
        assert_eq!(e.line, 2);
        // unknown generator index
        let e = parse_expression("x3", &r).unwrap_err();
        assert!(e.message.contains("out of range"));
        // exponent overflow past the truncation bound
        let e = parse_expression("x1^9", &r).unwrap_err();
        assert!(e.message.contains("overflows"), "{}", e.message);
        // division by zero denominator
        assert!(parse_expression("1/0", &r).is_err());
    }

    #[test]
    fn leading_sign_and_parens() {
        let r = ring();
        let a = parse_expression("-x1 + x1", &r).unwrap();
        assert!(a.is_zero());
        let b = parse_expression("(x1 + c1)^2", &r).unwrap();
        // (x1 + c1)^2 = x1^2 + 2 x1 c1 (c1^2 = 0)
        let x1 = Element::even_gen(&r, 0).unwrap();
        let c1 = Element::odd_gen(&r, 0).unwrap();
        let expect = x1
            .pow(2)
            .unwrap()
            .add(&x1.gmul(&c1).unwrap().scale(&int(2)));
        assert_eq!(b.as_element().unwrap(), expect);
    }

    #[test]
    fn operator_payloads() {
        use crate::diffop::OpAlgebra;
        let r = RingSpec::new(2, 1, 6);
        let alg = OpAlgebra::new(&r);
        let op = parse_operator("d/dx1 o d/dx1", &alg).unwrap();
        assert_eq!(op.order_of(3, true).unwrap(), 2);
        let op = parse_operator("mul(x1*c1)", &alg).unwrap();
        assert_eq!(op.order_of(3, true).unwrap(), 0);
        let op = parse_operator("d/dx1 o mul(x1) + 2*id", &alg).unwrap();
        // x1 d/dx1-style combination is first order
        assert_eq!(op.order_of(3, true).unwrap(), 1);
        assert!(parse_operator("d/dq1", &alg).is_err());
    }
}

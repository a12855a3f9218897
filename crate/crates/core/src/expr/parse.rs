//! Recursive-descent parser for the expression text format.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := primary ('^' unary)?          right-associative, integer exponent
//! primary := number | ident | func '(' expr ')' | '(' expr ')'
//! number  := digits ('.' digits)?
//! ident   := [A-Za-z][A-Za-z0-9_]*
//! ```
//!
//! Identifiers resolve to chart coordinates, declared parameters, or the
//! imaginary unit `im`.

use super::{Expr, FuncKind, GaussRational};
use crate::chart::Chart;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Sym(char),
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(Tok, usize)>> {
        let mut lx = Lexer { src, pos: 0 };
        let mut out = Vec::new();
        loop {
            let t = lx.next()?;
            let end = t.0 == Tok::End;
            out.push(t);
            if end {
                return Ok(out);
            }
        }
    }

    fn next(&mut self) -> Result<(Tok, usize)> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(&c) = bytes.get(self.pos) else {
            return Ok((Tok::End, start));
        };
        if c.is_ascii_digit() || (c == b'.' && bytes.get(self.pos + 1).is_some_and(u8::is_ascii_digit)) {
            while self.pos < bytes.len() && (bytes[self.pos].is_ascii_digit() || bytes[self.pos] == b'.') {
                self.pos += 1;
            }
            return Ok((Tok::Num(self.src[start..self.pos].to_string()), start));
        }
        if c.is_ascii_alphabetic() {
            while self.pos < bytes.len() && (bytes[self.pos].is_ascii_alphanumeric() || bytes[self.pos] == b'_') {
                self.pos += 1;
            }
            return Ok((Tok::Ident(self.src[start..self.pos].to_string()), start));
        }
        if b"+-*/^()".contains(&c) {
            self.pos += 1;
            return Ok((Tok::Sym(c as char), start));
        }
        let ch = self.src[start..].chars().next().unwrap_or('?');
        Err(Error::Syntax { position: start, message: format!("unexpected character `{ch}`") })
    }
}

struct Parser<'a, S: AsRef<str>> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    chart: &'a Chart,
    params: &'a [S],
}

/// Parse expression text against a chart and a list of declared parameters.
pub fn parse<S: AsRef<str>>(text: &str, chart: &Chart, params: &[S]) -> Result<Expr> {
    let toks = Lexer::tokens(text)?;
    let mut p = Parser { toks, at: 0, chart, params };
    let e = p.expr()?;
    match p.peek() {
        Tok::End => Ok(e),
        t => Err(Error::Syntax { position: p.pos(), message: format!("unexpected {}", describe(t)) }),
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(s) => format!("number `{s}`"),
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Sym(c) => format!("`{c}`"),
        Tok::End => "end of input".to_string(),
    }
}

impl<S: AsRef<str>> Parser<'_, S> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(Error::Syntax { position: self.pos(), message: format!("expected `{c}`, found {}", describe(self.peek())) })
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                let rhs = self.term()?;
                acc = Expr::add([acc, rhs]);
            } else if self.eat('-') {
                let rhs = self.term()?;
                acc = Expr::sub(acc, rhs);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                let rhs = self.unary()?;
                acc = Expr::mul([acc, rhs]);
            } else if self.eat('/') {
                let rhs = self.unary()?;
                acc = Expr::div(acc, rhs);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::neg(self.unary()?));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if self.eat('^') {
            let position = self.pos();
            let exp = self.unary()?;
            let n = exp.as_const().and_then(GaussRational::as_integer).ok_or(Error::NonIntegerExponent { position })?;
            return Ok(Expr::pow(base, n));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr> {
        let (tok, position) = self.bump();
        match tok {
            Tok::Num(s) => GaussRational::parse_rational(&s)
                .map(|r| Expr::Const(GaussRational::real(r)))
                .ok_or(Error::Syntax { position, message: format!("malformed number `{s}`") }),
            Tok::Ident(name) => {
                if let Some(kind) = FuncKind::from_name(&name) {
                    if *self.peek() == Tok::Sym('(') {
                        self.bump();
                        let arg = self.expr()?;
                        self.expect(')')?;
                        return Ok(Expr::func(kind, arg));
                    }
                }
                self.resolve(&name, position)
            }
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            t => Err(Error::Syntax { position, message: format!("unexpected {}", describe(&t)) }),
        }
    }

    fn resolve(&self, name: &str, position: usize) -> Result<Expr> {
        if name == "im" {
            return Ok(Expr::imaginary_unit());
        }
        if let Some(coord) = self.chart.classify(name) {
            return Ok(Expr::Var(self.chart.name_of(coord)));
        }
        if self.params.iter().any(|p| p.as_ref() == name) {
            return Ok(Expr::param(name));
        }
        Err(Error::UnknownIdentifier { name: name.to_string(), position })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{canonical, Bindings};
    use num_complex::Complex64;

    fn chart() -> Chart {
        Chart::new(2, 2).unwrap()
    }

    fn p(text: &str) -> Expr {
        parse(text, &chart(), &["u", "a"]).unwrap()
    }

    fn value(text: &str) -> Complex64 {
        p(text).eval(&Bindings::new()).unwrap()
    }

    #[test]
    fn maxwell_lagrangian_parses() {
        let e = p("1/2*(y1_2 + y2_1)^2");
        let env: Bindings = [("y1_2".into(), Complex64::new(2.0, 0.0)), ("y2_1".into(), Complex64::new(3.0, 0.0))].into();
        assert_eq!(e.eval(&env).unwrap(), Complex64::new(12.5, 0.0));
    }

    #[test]
    fn zero_and_imaginary_unit() {
        assert!(p("0").is_zero());
        assert_eq!(value("im*im"), Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(value("-2^2"), Complex64::new(-4.0, 0.0));
        assert_eq!(value("2^3^2"), Complex64::new(512.0, 0.0));
        assert_eq!(value("8/4/2"), Complex64::new(1.0, 0.0));
        assert_eq!(value("1 - 2 - 3"), Complex64::new(-4.0, 0.0));
        assert_eq!(value("2*3^2"), Complex64::new(18.0, 0.0));
        assert_eq!(value("2^-1"), Complex64::new(0.5, 0.0));
        assert_eq!(value("1.25*4"), Complex64::new(5.0, 0.0));
    }

    #[test]
    fn identifiers_resolve_by_kind() {
        assert_eq!(p("u"), Expr::param("u"));
        assert_eq!(p("y1_21"), Expr::var("y1_12"));
        assert_eq!(p("p1_2"), Expr::var("p1_2"));
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(
            parse("(y1_1", &chart(), &[] as &[&str]),
            Err(Error::Syntax { position: 5, message: "expected `)`, found end of input".into() })
        );
        assert_eq!(
            parse("x1 + q", &chart(), &[] as &[&str]),
            Err(Error::UnknownIdentifier { name: "q".into(), position: 5 })
        );
        assert_eq!(parse("x1^x2", &chart(), &[] as &[&str]), Err(Error::NonIntegerExponent { position: 3 }));
        assert_eq!(parse("x1^(1/2)", &chart(), &[] as &[&str]), Err(Error::NonIntegerExponent { position: 3 }));
        assert!(matches!(parse("x1 $ 2", &chart(), &[] as &[&str]), Err(Error::Syntax { position: 3, .. })));
        assert!(matches!(parse("x1 x2", &chart(), &[] as &[&str]), Err(Error::Syntax { position: 3, .. })));
        assert!(matches!(parse("", &chart(), &[] as &[&str]), Err(Error::Syntax { position: 0, .. })));
    }

    #[test]
    fn print_then_parse_round_trips() {
        for text in [
            "1/2*(y1_2 + y2_1)^2",
            "-x1*x2 + 3/4*u - (2 - im)*y1",
            "x1^(-2) - 1/(x1 + x2)",
            "-(x1 + x2)^3*a",
            "sin(x1)^2 + cos(-x1)",
            "-1/2*x1 + 1/2*im*x2",
        ] {
            let e = p(text);
            let again = p(&e.to_string());
            assert_eq!(again, e, "{text} printed as {e}");
        }
        let e = p("(y1_2 + y2_1)^2 - 7/3*y1*y2");
        assert_eq!(canonical(&p(&e.to_string())).unwrap(), canonical(&e).unwrap());
    }
}

use super::{BinOp, Constant, Expr, ExprError, Func};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokenize(src: &'a str) -> Result<Vec<(usize, Tok)>, ExprError> {
        let mut lx = Lexer { src, pos: 0 };
        let mut out = Vec::new();
        loop {
            lx.skip_ws();
            let start = lx.pos;
            let tok = lx.next_tok()?;
            let done = tok == Tok::End;
            out.push((start, tok));
            if done {
                return Ok(out);
            }
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.as_bytes().get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat_digits(&mut self) -> usize {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.pos - start
    }

    fn next_tok(&mut self) -> Result<Tok, ExprError> {
        let Some(c) = self.peek() else {
            return Ok(Tok::End);
        };
        let start = self.pos;
        match c {
            b'0'..=b'9' | b'.' => {
                let int_digits = self.eat_digits();
                let mut frac_digits = 0;
                if self.peek() == Some(b'.') {
                    self.pos += 1;
                    frac_digits = self.eat_digits();
                }
                if int_digits + frac_digits == 0 {
                    return Err(syntax(start, "expected digits"));
                }
                if matches!(self.peek(), Some(b'e' | b'E')) {
                    let mark = self.pos;
                    self.pos += 1;
                    if matches!(self.peek(), Some(b'+' | b'-')) {
                        self.pos += 1;
                    }
                    if self.eat_digits() == 0 {
                        // `2e` or `2ex`: the `e` is not part of the number
                        self.pos = mark;
                    }
                }
                let text = &self.src[start..self.pos];
                text.parse::<f64>()
                    .map(Tok::Num)
                    .map_err(|_| syntax(start, "invalid number literal"))
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
                    self.pos += 1;
                }
                Ok(Tok::Ident(self.src[start..self.pos].to_string()))
            }
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                self.pos += 1;
                Ok(Tok::Op(c as char))
            }
            b'(' => {
                self.pos += 1;
                Ok(Tok::LParen)
            }
            b')' => {
                self.pos += 1;
                Ok(Tok::RParen)
            }
            b',' => {
                self.pos += 1;
                Ok(Tok::Comma)
            }
            _ => {
                let ch = self.src[start..].chars().next().unwrap_or('?');
                Err(syntax(start, &format!("unexpected character `{ch}`")))
            }
        }
    }
}

fn syntax(offset: usize, message: &str) -> ExprError {
    ExprError::Syntax {
        offset,
        message: message.to_string(),
    }
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    allowed: &'a [&'a str],
}

/// Parses `source` into an expression whose variables are drawn from
/// `allowed_vars`.
///
/// Precedence from tightest: `^` (right-associative), unary minus, `* /`,
/// `+ -`. So `-x^2` is `-(x^2)` and `2^-x` is `2^(-x)`.
pub fn parse(source: &str, allowed_vars: &[&str]) -> Result<Expr, ExprError> {
    let toks = Lexer::tokenize(source)?;
    if toks.len() == 1 {
        return Err(syntax(0, "empty expression"));
    }
    let mut p = Parser {
        toks,
        pos: 0,
        allowed: allowed_vars,
    };
    let expr = p.expr()?;
    match p.peek() {
        Tok::End => Ok(expr),
        _ => Err(syntax(p.offset(), "unexpected trailing input")),
    }
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let tok = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        tok
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Op('+') => BinOp::Add,
                Tok::Op('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Op('*') => BinOp::Mul,
                Tok::Op('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            Tok::Op('-') => {
                self.bump();
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Tok::Op('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if self.peek() == &Tok::Op('^') {
            self.bump();
            let exponent = self.unary()?;
            return Ok(Expr::binary(BinOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        let offset = self.offset();
        match self.bump() {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                if let Some(func) = Func::from_name(&name) {
                    return self.call(func, offset);
                }
                if self.peek() == &Tok::LParen {
                    return Err(syntax(offset, &format!("unknown function `{name}`")));
                }
                match name.as_str() {
                    "pi" => Ok(Expr::Const(Constant::Pi)),
                    "e" => Ok(Expr::Const(Constant::E)),
                    _ if self.allowed.contains(&name.as_str()) => Ok(Expr::Var(name)),
                    _ => Err(ExprError::UnknownVariable(name)),
                }
            }
            Tok::End => Err(syntax(offset, "unexpected end of input")),
            tok => Err(syntax(offset, &format!("unexpected token {}", describe(&tok)))),
        }
    }

    fn call(&mut self, func: Func, offset: usize) -> Result<Expr, ExprError> {
        if self.peek() != &Tok::LParen {
            return Err(syntax(offset, &format!("`{}` must be called", func.name())));
        }
        self.bump();
        let mut args = Vec::new();
        if self.peek() != &Tok::RParen {
            loop {
                args.push(self.expr()?);
                if self.peek() == &Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect_rparen()?;
        if args.len() != func.arity() {
            return Err(ExprError::Arity {
                func: func.name(),
                expected: func.arity(),
                got: args.len(),
            });
        }
        Ok(Expr::Call(func, args))
    }

    fn expect_rparen(&mut self) -> Result<(), ExprError> {
        let offset = self.offset();
        match self.bump() {
            Tok::RParen => Ok(()),
            tok => Err(syntax(offset, &format!("expected `)`, found {}", describe(&tok)))),
        }
    }
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Num(v) => format!("number {v}"),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Op(c) => format!("`{c}`"),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Comma => "`,`".into(),
        Tok::End => "end of input".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(name: &str) -> Expr {
        Expr::var(name)
    }

    #[test]
    fn precedence_and_structure() {
        let e = parse("sin(u) + t*x", &["t", "x", "u", "ut", "ux"]).unwrap();
        let expected = Expr::binary(
            BinOp::Add,
            Expr::call(Func::Sin, vec![v("u")]),
            Expr::binary(BinOp::Mul, v("t"), v("x")),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn power_is_right_associative_and_binds_tighter_than_negation() {
        let e = parse("-x^2^3", &["x"]).unwrap();
        let expected = Expr::Neg(Box::new(Expr::binary(
            BinOp::Pow,
            v("x"),
            Expr::binary(BinOp::Pow, Expr::num(2.0), Expr::num(3.0)),
        )));
        assert_eq!(e, expected);
        let e = parse("2^-x", &["x"]).unwrap();
        assert_eq!(
            e,
            Expr::binary(BinOp::Pow, Expr::num(2.0), Expr::Neg(Box::new(v("x"))))
        );
    }

    #[test]
    fn number_literals() {
        for (src, val) in [("3", 3.0), ("2.5", 2.5), (".5", 0.5), ("1e-3", 1e-3), ("4.E2", 400.0)] {
            assert_eq!(parse(src, &[]).unwrap(), Expr::Num(val), "{src}");
        }
        // `2e` without digits: the `e` becomes the constant and the parse
        // fails on implicit multiplication
        assert!(matches!(parse("2e", &[]), Err(ExprError::Syntax { .. })));
    }

    #[test]
    fn syntax_error_offset() {
        match parse("2*)", &["x"]) {
            Err(ExprError::Syntax { offset, .. }) => assert_eq!(offset, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse("", &[]), Err(ExprError::Syntax { offset: 0, .. })));
        assert!(matches!(parse("(x", &["x"]), Err(ExprError::Syntax { offset: 2, .. })));
        assert!(matches!(parse("x y", &["x", "y"]), Err(ExprError::Syntax { offset: 2, .. })));
        assert!(matches!(parse("x $", &["x"]), Err(ExprError::Syntax { offset: 2, .. })));
    }

    #[test]
    fn unknown_variable() {
        assert_eq!(parse("y+1", &["x"]), Err(ExprError::UnknownVariable("y".into())));
    }

    #[test]
    fn arity_errors() {
        assert!(matches!(
            parse("min(x)", &["x"]),
            Err(ExprError::Arity { func: "min", expected: 2, got: 1 })
        ));
        assert!(matches!(
            parse("sin(x, x)", &["x"]),
            Err(ExprError::Arity { func: "sin", expected: 1, got: 2 })
        ));
    }

    #[test]
    fn unknown_function_is_syntax_error() {
        assert!(matches!(parse("foo(x)", &["x"]), Err(ExprError::Syntax { offset: 0, .. })));
    }
}

use super::{decimal_literal, Expr, Func};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("syntax error at byte {offset}: {msg}")]
pub struct ParseError {
    pub offset: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Op(char),
    End,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn next(&mut self) -> Result<(usize, Tok), ParseError> {
        self.skip_ws();
        let start = self.pos;
        let Some(&c) = self.src.get(self.pos) else {
            return Ok((start, Tok::End));
        };
        if c.is_ascii_digit() || c == b'.' {
            while self.pos < self.src.len() && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.') {
                self.pos += 1;
            }
            let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
            return Ok((start, Tok::Num(s)));
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
                self.pos += 1;
            }
            let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
            return Ok((start, Tok::Ident(s)));
        }
        if b"+-*/^(),".contains(&c) {
            self.pos += 1;
            return Ok((start, Tok::Op(c as char)));
        }
        Err(ParseError { offset: start, msg: format!("unexpected character `{}`", c as char) })
    }
}

struct Parser<'a> {
    lex: Lexer<'a>,
    tok: Tok,
    at: usize,
}

/// Parse an expression. Precedence: `^` > unary `-` > `* /` > `+ -`,
/// all binary operators left associative, exponents are integer literals.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let mut lex = Lexer { src: text.as_bytes(), pos: 0 };
    let (at, tok) = lex.next()?;
    let mut p = Parser { lex, tok, at };
    let e = p.expr()?;
    if p.tok != Tok::End {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

impl<'a> Parser<'a> {
    fn bump(&mut self) -> Result<(), ParseError> {
        let (at, tok) = self.lex.next()?;
        self.at = at;
        self.tok = tok;
        Ok(())
    }

    fn err(&self, msg: &str) -> ParseError {
        let found = match &self.tok {
            Tok::End => "end of input".to_string(),
            Tok::Num(s) | Tok::Ident(s) => format!("`{s}`"),
            Tok::Op(c) => format!("`{c}`"),
        };
        ParseError { offset: self.at, msg: format!("{msg}, found {found}") }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.tok == Tok::Op(c) {
            self.bump()
        } else {
            Err(self.err(&format!("expected `{c}`")))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.tok {
                Tok::Op('+') => {
                    self.bump()?;
                    lhs = lhs + self.term()?;
                }
                Tok::Op('-') => {
                    self.bump()?;
                    lhs = lhs - self.term()?;
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.tok {
                Tok::Op('*') => {
                    self.bump()?;
                    lhs = lhs * self.unary()?;
                }
                Tok::Op('/') => {
                    self.bump()?;
                    lhs = lhs / self.unary()?;
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.tok == Tok::Op('-') {
            self.bump()?;
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let mut base = self.primary()?;
        while self.tok == Tok::Op('^') {
            self.bump()?;
            let n = self.exponent()?;
            base = base.powi(n);
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<i32, ParseError> {
        let paren = self.tok == Tok::Op('(');
        if paren {
            self.bump()?;
        }
        let neg = self.tok == Tok::Op('-');
        if neg {
            self.bump()?;
        }
        let n = match &self.tok {
            Tok::Num(s) if s.chars().all(|c| c.is_ascii_digit()) => {
                s.parse::<i32>().map_err(|_| self.err("exponent out of range"))?
            }
            _ => return Err(self.err("expected integer exponent")),
        };
        self.bump()?;
        if paren {
            self.expect(')')?;
        }
        Ok(if neg { -n } else { n })
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        match self.tok.clone() {
            Tok::Num(s) => {
                let q = decimal_literal(&s).ok_or_else(|| self.err("malformed number"))?;
                self.bump()?;
                Ok(Expr::rational(q))
            }
            Tok::Ident(name) => {
                self.bump()?;
                if self.tok == Tok::Op('(') {
                    let f = Func::from_name(&name)
                        .ok_or_else(|| ParseError { offset: self.at, msg: format!("unknown function `{name}`") })?;
                    self.bump()?;
                    let arg = self.expr()?;
                    self.expect(')')?;
                    return Ok(Expr::call(f, arg));
                }
                if name == "pi" {
                    Ok(Expr::pi())
                } else {
                    Ok(Expr::var(&name))
                }
            }
            Tok::Op('(') => {
                self.bump()?;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            _ => Err(self.err("expected operand")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar_example() {
        let e = parse("sin(2*pi*y1)").unwrap();
        assert_eq!(e.to_string(), "sin(2*pi*y1)");
        assert!((e.eval_at(&[("y1", 0.25)]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn parameter_expression() {
        let e = parse("1/(2*(alpha-1))").unwrap();
        assert!(e.symbols().contains("alpha"));
        assert_eq!(e.eval_at(&[("alpha", 1.5)]).unwrap(), 1.0);
    }

    #[test]
    fn trailing_operator_offset() {
        let err = parse("y1 +").unwrap_err();
        assert_eq!(err.offset, 4);
    }

    #[test]
    fn precedence() {
        let v = |s: &str| parse(s).unwrap().eval_at(&[("x", 3.0)]).unwrap();
        assert_eq!(v("-x^2"), -9.0);
        assert_eq!(v("2^3^2"), 64.0);
        assert_eq!(v("8/2/2"), 2.0);
        assert_eq!(v("1-2-3"), -4.0);
        assert_eq!(v("x^-1*3"), 1.0);
        assert_eq!(v("2*-x"), -6.0);
    }

    #[test]
    fn errors() {
        assert_eq!(parse("x^y").unwrap_err().offset, 2);
        assert_eq!(parse("foo(x)").unwrap_err().offset, 3);
        assert_eq!(parse("(x").unwrap_err().offset, 2);
        assert_eq!(parse("x $").unwrap_err().offset, 2);
        assert_eq!(parse("1..2").unwrap_err().offset, 0);
    }
}

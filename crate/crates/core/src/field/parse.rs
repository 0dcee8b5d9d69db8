//! Reader for the text form of rational functions, e.g.
//! `(l1*l2 - 1)*(l1*l2*l3*l4 - 1)/((l1 - 1)*(l2 - 1))` or `-1/(a2*(a1 + a2 + a3))`.

use super::{FieldError, ParamContext, RatFunc, Rat};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(num_bigint::BigInt),
    Var(usize),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(src: &str, ctx: &ParamContext) -> Result<Vec<Tok>, FieldError> {
    let err = |msg: String| FieldError::Parse(msg);
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push(Tok::Plus);
                i += 1
            }
            '-' | '\u{2212}' => {
                out.push(Tok::Minus);
                i += 1
            }
            '*' | '\u{00b7}' => {
                out.push(Tok::Star);
                i += 1
            }
            '/' => {
                out.push(Tok::Slash);
                i += 1
            }
            '^' => {
                out.push(Tok::Caret);
                i += 1
            }
            '(' => {
                out.push(Tok::LParen);
                i += 1
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1
            }
            d if d.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                out.push(Tok::Int(s.parse().expect("digits")));
            }
            l if l.is_alphabetic() || l == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphabetic() || chars[i] == '_') {
                    i += 1;
                }
                let name: String = chars[start..i].iter().collect();
                let ds = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if ds == i {
                    return Err(err(format!("variable `{name}` has no index")));
                }
                let idx: usize = chars[ds..i]
                    .iter()
                    .collect::<String>()
                    .parse()
                    .map_err(|_| err("bad variable index".into()))?;
                let kind_ok = match ctx.kind() {
                    super::VarKind::Alpha => matches!(name.as_str(), "a" | "alpha" | "α"),
                    super::VarKind::Lambda => matches!(name.as_str(), "l" | "lambda" | "λ"),
                };
                if !kind_ok {
                    return Err(err(format!(
                        "variable `{name}{idx}` does not belong to a {:?} context",
                        ctx.kind()
                    )));
                }
                if idx >= ctx.num_params() {
                    return Err(err(format!("variable index {idx} out of range")));
                }
                out.push(Tok::Var(idx));
            }
            other => return Err(err(format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    ctx: &'a ParamContext,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<RatFunc, FieldError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RatFunc, FieldError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    acc = &acc * &self.unary()?;
                }
                Some(Tok::Slash) => {
                    self.bump();
                    acc = acc.checked_div(&self.unary()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<RatFunc, FieldError> {
        if let Some(Tok::Minus) = self.peek() {
            self.bump();
            return Ok(-self.unary()?);
        }
        if let Some(Tok::Plus) = self.peek() {
            self.bump();
        }
        self.power()
    }

    fn power(&mut self) -> Result<RatFunc, FieldError> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.bump();
            match self.bump() {
                Some(Tok::Int(e)) => {
                    let e: u32 = e
                        .try_into()
                        .map_err(|_| FieldError::Parse("exponent too large".into()))?;
                    return Ok(base.pow(e));
                }
                _ => return Err(FieldError::Parse("expected integer exponent".into())),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RatFunc, FieldError> {
        match self.bump() {
            Some(Tok::Int(v)) => Ok(RatFunc::constant(Rat::from_integer(v))),
            Some(Tok::Var(i)) => Ok(self.ctx.var(i)),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(e),
                    _ => Err(FieldError::Parse("missing `)`".into())),
                }
            }
            t => Err(FieldError::Parse(format!("unexpected token {t:?}"))),
        }
    }
}

pub(super) fn parse(src: &str, ctx: &ParamContext) -> Result<RatFunc, FieldError> {
    let toks = tokenize(src, ctx)?;
    if toks.is_empty() {
        return Err(FieldError::Parse("empty expression".into()));
    }
    let mut p = Parser { toks, pos: 0, ctx };
    let v = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(FieldError::Parse(format!(
            "trailing input at token {}",
            p.pos
        )));
    }
    Ok(v)
}

//! Element expressions: `g*h`, `g^-1`, `g^3`, `[g,h]`, `tau(F)`, `id`,
//! inline tables `{1:id:2, 2:id:1, 3:id:3}` and comparisons `x == y`.

use std::sync::Arc;

use crate::bisection::{Bisection, Groupoid};
use crate::error::{Error, Result};
use crate::fullgroup::Element;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Identity,
    Name(String),
    Table(String),
    Product(Box<Expr>, Box<Expr>),
    Power(Box<Expr>, i64),
    Commutator(Box<Expr>, Box<Expr>),
    Tau(BisectionRef),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BisectionRef {
    Name(String),
    Table(String),
}

/// A parsed input line: either an element or an equality test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Statement {
    Element(Expr),
    Equal(Expr, Expr),
}

#[derive(Clone, Debug)]
pub enum Value {
    Element(Element),
    Bool(bool),
}

/// Where names are looked up.
pub trait Scope {
    fn groupoid(&self) -> &Arc<Groupoid>;
    fn element(&self, name: &str) -> Option<Element>;
    fn bisection(&self, name: &str) -> Option<Bisection>;
}

pub fn parse(s: &str) -> Result<Statement> {
    let mut p = Parser { s: s.as_bytes(), pos: 0, src: s };
    let lhs = p.product()?;
    p.ws();
    let st = if p.eat("==") {
        let rhs = p.product()?;
        Statement::Equal(lhs, rhs)
    } else {
        Statement::Element(lhs)
    };
    p.ws();
    if p.pos != p.s.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(st)
}

pub fn parse_expr(s: &str) -> Result<Expr> {
    match parse(s)? {
        Statement::Element(e) => Ok(e),
        Statement::Equal(..) => Err(Error::Parse(format!("`{s}` is a comparison, not an element"))),
    }
}

pub fn eval(st: &Statement, scope: &dyn Scope) -> Result<Value> {
    match st {
        Statement::Element(e) => Ok(Value::Element(eval_expr(e, scope)?)),
        Statement::Equal(a, b) => {
            let a = eval_expr(a, scope)?;
            let b = eval_expr(b, scope)?;
            Ok(Value::Bool(a.equals(&b)?))
        }
    }
}

pub fn eval_expr(e: &Expr, scope: &dyn Scope) -> Result<Element> {
    let g = scope.groupoid();
    match e {
        Expr::Identity => Ok(Element::identity(g)),
        Expr::Name(n) => scope
            .element(n)
            .ok_or_else(|| Error::Unresolved(n.clone())),
        Expr::Table(t) => Element::parse(g, t),
        Expr::Product(a, b) => eval_expr(a, scope)?.multiply(&eval_expr(b, scope)?),
        Expr::Power(a, n) => eval_expr(a, scope)?.power(*n),
        Expr::Commutator(a, b) => eval_expr(a, scope)?.commutator(&eval_expr(b, scope)?),
        Expr::Tau(f) => {
            let f = match f {
                BisectionRef::Name(n) => scope
                    .bisection(n)
                    .ok_or_else(|| Error::Unresolved(n.clone()))?,
                BisectionRef::Table(t) => Bisection::parse(g, t)?,
            };
            Element::tau(&f)
        }
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at offset {} in `{}`", self.pos, self.src))
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.ws();
        if self.s[self.pos..].starts_with(tok.as_bytes()) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{tok}`")))
        }
    }

    fn product(&mut self) -> Result<Expr> {
        let mut acc = self.power()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let rhs = self.power()?;
            acc = Expr::Product(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.ws();
            let start = self.pos;
            if self.s.get(self.pos) == Some(&b'-') {
                self.pos += 1;
            }
            while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let n: i64 = self.src[start..self.pos]
                .parse()
                .map_err(|_| self.error("bad exponent"))?;
            return Ok(Expr::Power(Box::new(base), n));
        }
        Ok(base)
    }

    fn name(&mut self) -> Option<String> {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len()
            && (self.s[self.pos].is_ascii_alphanumeric() || b"_.'".contains(&self.s[self.pos]))
        {
            self.pos += 1;
        }
        (self.pos > start).then(|| self.src[start..self.pos].to_string())
    }

    fn table(&mut self) -> Result<String> {
        self.expect("{")?;
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos] != b'}' {
            self.pos += 1;
        }
        if self.pos == self.s.len() {
            return Err(self.error("unclosed `{`"));
        }
        let body = self.src[start..self.pos].to_string();
        self.pos += 1;
        Ok(body)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.product()?;
                self.expect(")")?;
                Ok(e)
            }
            Some(b'[') => {
                self.pos += 1;
                let a = self.product()?;
                self.expect(",")?;
                let b = self.product()?;
                self.expect("]")?;
                Ok(Expr::Commutator(Box::new(a), Box::new(b)))
            }
            Some(b'{') => Ok(Expr::Table(self.table()?)),
            Some(_) => {
                let Some(n) = self.name() else {
                    return Err(self.error("expected a name"));
                };
                match n.as_str() {
                    "id" | "1" => Ok(Expr::Identity),
                    "tau" => {
                        self.expect("(")?;
                        let f = if self.peek() == Some(b'{') {
                            BisectionRef::Table(self.table()?)
                        } else {
                            BisectionRef::Name(self.name().ok_or_else(|| self.error("expected a bisection"))?)
                        };
                        self.expect(")")?;
                        Ok(Expr::Tau(f))
                    }
                    _ => Ok(Expr::Name(n)),
                }
            }
            None => Err(self.error("unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar() {
        let e = parse_expr("g*h^-1").unwrap();
        assert_eq!(
            e,
            Expr::Product(
                Box::new(Expr::Name("g".into())),
                Box::new(Expr::Power(Box::new(Expr::Name("h".into())), -1))
            )
        );
        assert!(matches!(parse_expr("[g, h]").unwrap(), Expr::Commutator(..)));
        assert_eq!(
            parse_expr("tau({11:id:12})").unwrap(),
            Expr::Tau(BisectionRef::Table("11:id:12".into()))
        );
        assert!(matches!(parse("g*h == {1:id:1}").unwrap(), Statement::Equal(..)));
        assert!(parse("g*").is_err());
        assert!(parse("(g").is_err());
        assert!(parse("g h").is_err());
    }
}

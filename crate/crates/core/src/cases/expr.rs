//! Arithmetic expressions in `x, y, z, t` for user-defined cases.

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
enum Node {
    Const(f64),
    Var(usize),
    Neg(Box<Node>),
    Bin(Op, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Func {
    Exp,
    Sin,
    Cos,
    Sqrt,
}

/// A parsed expression; evaluate with `[x, y, z, t]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    root: Node,
    source: String,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
}

fn tokenize(s: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v = text
                .parse::<f64>()
                .map_err(|_| Error::Expression(format!("bad number '{text}' at {start}")))?;
            out.push((start, Tok::Num(v)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((start, Tok::Ident(chars[start..i].iter().collect())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(Error::Expression(format!("unexpected character '{c}' at {i}")));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(usize::MAX, |t| t.0)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn fail<X>(&self, what: &str) -> Result<X> {
        match self.toks.get(self.pos) {
            Some((at, t)) => Err(Error::Expression(format!("{what}, found {t:?} at {at}"))),
            None => Err(Error::Expression(format!("{what}, found end of input"))),
        }
    }

    // expr := term (('+'|'-') term)*
    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat('+') {
                Op::Add
            } else if self.eat('-') {
                Op::Sub
            } else {
                return Ok(lhs);
            };
            let rhs = self.term()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    // term := unary (('*'|'/') unary)*
    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat('*') {
                Op::Mul
            } else if self.eat('/') {
                Op::Div
            } else {
                return Ok(lhs);
            };
            let rhs = self.unary()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    // unary binds looser than '^', so -x^2 = -(x^2)
    fn unary(&mut self) -> Result<Node> {
        if self.eat('-') {
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if self.eat('^') {
            let exp = self.unary()?;
            return Ok(Node::Bin(Op::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node> {
        let at = self.offset();
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Node::Const(v))
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.fail("expected ')'");
                }
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let func = match name.as_str() {
                    "x" => return Ok(Node::Var(0)),
                    "y" => return Ok(Node::Var(1)),
                    "z" => return Ok(Node::Var(2)),
                    "t" => return Ok(Node::Var(3)),
                    "pi" => return Ok(Node::Const(std::f64::consts::PI)),
                    "exp" => Func::Exp,
                    "sin" => Func::Sin,
                    "cos" => Func::Cos,
                    "sqrt" => Func::Sqrt,
                    _ => return Err(Error::Expression(format!("unknown identifier '{name}' at {at}"))),
                };
                if !self.eat('(') {
                    return self.fail(&format!("expected '(' after {name}"));
                }
                let arg = self.expr()?;
                if !self.eat(')') {
                    return self.fail("expected ')'");
                }
                Ok(Node::Call(func, Box::new(arg)))
            }
            _ => self.fail("expected a number, variable or '('"),
        }
    }
}

impl Expr {
    pub fn parse(source: &str) -> Result<Self> {
        let mut p = Parser {
            toks: tokenize(source)?,
            pos: 0,
        };
        if p.toks.is_empty() {
            return Err(Error::Expression("empty expression".into()));
        }
        let root = p.expr()?;
        if p.pos != p.toks.len() {
            return p.fail("trailing input");
        }
        Ok(Self {
            root,
            source: source.to_string(),
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// True if the expression mentions `t`.
    pub fn depends_on_time(&self) -> bool {
        fn walk(n: &Node) -> bool {
            match n {
                Node::Var(3) => true,
                Node::Const(_) | Node::Var(_) => false,
                Node::Neg(a) | Node::Call(_, a) => walk(a),
                Node::Bin(_, a, b) => walk(a) || walk(b),
            }
        }
        walk(&self.root)
    }

    pub fn eval<T: Real>(&self, vars: &[T; 4]) -> T {
        fn go<T: Real>(n: &Node, v: &[T; 4]) -> T {
            match n {
                Node::Const(c) => T::lit(*c),
                Node::Var(i) => v[*i],
                Node::Neg(a) => -go(a, v),
                Node::Bin(op, a, b) => {
                    let (a, b) = (go(a, v), go(b, v));
                    match op {
                        Op::Add => a + b,
                        Op::Sub => a - b,
                        Op::Mul => a * b,
                        Op::Div => a / b,
                        Op::Pow => a.powf(b),
                    }
                }
                Node::Call(f, a) => {
                    let a = go(a, v);
                    match f {
                        Func::Exp => a.exp(),
                        Func::Sin => a.sin(),
                        Func::Cos => a.cos(),
                        Func::Sqrt => a.sqrt(),
                    }
                }
            }
        }
        go(&self.root, vars)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(s: &str, v: [f64; 4]) -> f64 {
        Expr::parse(s).unwrap().eval(&v)
    }

    #[test]
    fn precedence_and_associativity() {
        let z = [0.0; 4];
        assert_eq!(ev("1 + 2 * 3", z), 7.0);
        assert_eq!(ev("(1 + 2) * 3", z), 9.0);
        assert_eq!(ev("2 ^ 3 ^ 2", z), 512.0);
        assert_eq!(ev("-2 ^ 2", z), -4.0);
        assert_eq!(ev("8 / 4 / 2", z), 1.0);
        assert_eq!(ev("1 - 2 - 3", z), -4.0);
        assert_eq!(ev("2 * -3", z), -6.0);
        assert_eq!(ev("1.5e1 + 2E-1", z), 15.2);
    }

    #[test]
    fn variables_and_functions() {
        let v = [1.0, 2.0, 3.0, 0.5];
        assert_eq!(ev("x + y * z - t", v), 6.5);
        assert!((ev("exp(x) * sin(t) + cos(pi) + sqrt(y*y)", v) - (1f64.exp() * 0.5f64.sin() + 1.0)).abs() < 1e-15);
        assert!((ev("-1 + x^2 + y^2", v) - 4.0).abs() < 1e-15);
        assert!(Expr::parse("x*t").unwrap().depends_on_time());
        assert!(!Expr::parse("x*y").unwrap().depends_on_time());
    }

    #[test]
    fn syntax_errors() {
        for bad in ["", "1 +", "(x", "foo(x)", "x $ y", "sin x", "1 2", "w"] {
            assert!(matches!(Expr::parse(bad), Err(Error::Expression(_))), "{bad}");
        }
    }
}

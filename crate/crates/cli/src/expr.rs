//! Scalar expressions in the torus frequencies `k1..kn`, or in a single
//! named variable.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | '+' unary | power
//! power   := atom ('^' unary)?
//! atom    := number | 'pi' | 'i' | kJ | func '(' sum ')' | 'abs(k)' | '(' sum ')'
//! ```
//!
//! `abs(k)` is the Euclidean length of the frequency vector; a bare `k`
//! anywhere else is rejected.

use num_complex::Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Func {
    Abs,
    Sqrt,
    Log,
    Exp,
    Sin,
    Cos,
    Tan,
    Atan,
    Tanh,
    Sign,
}

impl Func {
    fn lookup(name: &str) -> Option<Self> {
        Some(match name {
            "abs" => Func::Abs,
            "sqrt" => Func::Sqrt,
            "log" => Func::Log,
            "exp" => Func::Exp,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "atan" => Func::Atan,
            "tanh" => Func::Tanh,
            "sign" => Func::Sign,
            _ => return None,
        })
    }

    fn apply(self, z: Complex64) -> Complex64 {
        let real = |x: f64| Complex64::new(x, 0.0);
        match self {
            Func::Abs => real(z.norm()),
            Func::Sqrt => z.sqrt(),
            Func::Log => z.ln(),
            Func::Exp => z.exp(),
            Func::Sin => z.sin(),
            Func::Cos => z.cos(),
            Func::Tan => z.tan(),
            Func::Atan => z.atan(),
            Func::Tanh => z.tanh(),
            // z/|z|, which is the usual sign on the real line
            Func::Sign => {
                let n = z.norm();
                if n == 0.0 {
                    real(0.0)
                } else {
                    z / n
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Node {
    Const(Complex64),
    Freq(usize),
    Norm,
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

/// A parsed expression over a fixed list of real variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    vars: Vec<String>,
    root: Node,
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<Token>, String> {
    let chars: Vec<char> = src.chars().collect();
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
            // exponent part, only when followed by digits
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
                .map_err(|_| format!("bad number {text:?}"))?;
            out.push(Token::Num(v));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Token::Op(c));
            i += 1;
        } else {
            return Err(format!("unexpected character {c:?}"));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    vars: Vec<String>,
    // whether `abs(k)` names the frequency norm
    frequencies: bool,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Token::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, op: char) -> Result<(), String> {
        if self.eat(op) {
            Ok(())
        } else {
            Err(format!("expected {op:?}"))
        }
    }

    fn sum(&mut self) -> Result<Node, String> {
        let mut lhs = self.product()?;
        loop {
            if self.eat('+') {
                lhs = Node::Add(Box::new(lhs), Box::new(self.product()?));
            } else if self.eat('-') {
                lhs = Node::Sub(Box::new(lhs), Box::new(self.product()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn product(&mut self) -> Result<Node, String> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Node::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Node, String> {
        if self.eat('-') {
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, String> {
        let base = self.atom()?;
        if self.eat('^') {
            return Ok(Node::Pow(Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node, String> {
        match self.next() {
            Some(Token::Num(v)) => Ok(Node::Const(Complex64::new(v, 0.0))),
            Some(Token::Op('(')) => {
                let inner = self.sum()?;
                self.expect(')')?;
                Ok(inner)
            }
            Some(Token::Ident(name)) => self.ident(&name),
            Some(Token::Op(c)) => Err(format!("unexpected {c:?}")),
            None => Err("unexpected end of expression".into()),
        }
    }

    fn ident(&mut self, name: &str) -> Result<Node, String> {
        match name {
            "pi" => return Ok(Node::Const(Complex64::new(std::f64::consts::PI, 0.0))),
            "i" => return Ok(Node::Const(Complex64::new(0.0, 1.0))),
            _ => {}
        }
        if let Some(j) = self.vars.iter().position(|v| v == name) {
            return Ok(Node::Freq(j));
        }
        if self.frequencies && name == "k" {
            return Err("bare k is only allowed as abs(k)".into());
        }
        if self.frequencies && name.starts_with('k') && name[1..].parse::<usize>().is_ok() {
            return Err(format!(
                "{name} is not a frequency of torus-{}",
                self.vars.len()
            ));
        }
        let f = Func::lookup(name).ok_or_else(|| format!("unknown name {name:?}"))?;
        self.expect('(')?;
        if f == Func::Abs
            && self.frequencies
            && self.peek() == Some(&Token::Ident("k".into()))
            && self.tokens.get(self.pos + 1) == Some(&Token::Op(')'))
        {
            self.pos += 2;
            return Ok(Node::Norm);
        }
        let arg = self.sum()?;
        self.expect(')')?;
        Ok(Node::Call(f, Box::new(arg)))
    }
}

fn eval(node: &Node, k: &[f64], norm: f64) -> Complex64 {
    match node {
        Node::Const(c) => *c,
        Node::Freq(j) => Complex64::new(k[*j], 0.0),
        Node::Norm => Complex64::new(norm, 0.0),
        Node::Neg(a) => -eval(a, k, norm),
        Node::Add(a, b) => eval(a, k, norm) + eval(b, k, norm),
        Node::Sub(a, b) => eval(a, k, norm) - eval(b, k, norm),
        Node::Mul(a, b) => eval(a, k, norm) * eval(b, k, norm),
        Node::Div(a, b) => eval(a, k, norm) / eval(b, k, norm),
        Node::Pow(a, b) => {
            let base = eval(a, k, norm);
            let e = eval(b, k, norm);
            if e.im == 0.0 && e.re.fract() == 0.0 && e.re.abs() <= i32::MAX as f64 {
                base.powi(e.re as i32)
            } else if base.im == 0.0 && base.re >= 0.0 && e.im == 0.0 {
                Complex64::new(base.re.powf(e.re), 0.0)
            } else {
                base.powc(e)
            }
        }
        Node::Call(f, a) => f.apply(eval(a, k, norm)),
    }
}

impl Expr {
    /// Expression in `k1..kn` and `abs(k)`.
    pub fn torus(src: &str, dim: usize) -> Result<Self, String> {
        let vars = (1..=dim).map(|j| format!("k{j}")).collect();
        Self::parse(src, vars, true)
    }

    /// Expression in one named variable.
    pub fn scalar(src: &str, var: &str) -> Result<Self, String> {
        Self::parse(src, vec![var.to_string()], false)
    }

    fn parse(src: &str, vars: Vec<String>, frequencies: bool) -> Result<Self, String> {
        let mut p = Parser {
            tokens: tokenize(src)?,
            pos: 0,
            vars,
            frequencies,
        };
        if p.tokens.is_empty() {
            return Err("empty expression".into());
        }
        let root = p.sum()?;
        if p.pos != p.tokens.len() {
            return Err(format!("trailing input after token {}", p.pos));
        }
        Ok(Self { vars: p.vars, root })
    }

    /// Value at integer arguments, e.g. a torus frequency; may be non-finite.
    pub fn eval_freq(&self, k: &[i64]) -> Complex64 {
        let x: Vec<f64> = k.iter().map(|&v| v as f64).collect();
        self.eval(&x)
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        debug_assert_eq!(x.len(), self.vars.len());
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        eval(&self.root, x, norm)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(src: &str, k: &[i64]) -> Complex64 {
        Expr::torus(src, k.len()).unwrap().eval_freq(k)
    }

    #[test]
    fn precedence_and_norm() {
        assert_eq!(at("1+2*3", &[0, 0, 0]).re, 7.0);
        assert_eq!(at("-k1^2", &[3, 0, 0]).re, -9.0);
        assert_eq!(at("2^3^2", &[0]).re, 512.0);
        assert!((at("k1/abs(k)", &[3, 4, 0]).re - 0.6).abs() < 1e-15);
        assert!((at("log(1+abs(k))", &[0, 0, 2]).re - 3f64.ln()).abs() < 1e-15);
        assert_eq!(at("i*k2", &[0, 5, 0]), Complex64::new(0.0, 5.0));
        assert_eq!(at("sign(k1)", &[-4, 1, 1]).re, -1.0);
        assert_eq!(at("abs(k1-k2)", &[1, 4]).re, 3.0);
        assert!((at("2.5e-1*pi", &[0]).re - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn rejects_malformed_input() {
        for bad in [
            "", "k", "k4", "k0", "1+", "foo(1)", "(1", "1)", "2 3", "k1 $ 2",
        ] {
            assert!(Expr::torus(bad, 3).is_err(), "{bad}");
        }
    }

    #[test]
    fn named_variable() {
        let e = Expr::scalar("1/sqrt(1+lambda^2)", "lambda").unwrap();
        assert!((e.eval(&[2.0]).re - 5f64.sqrt().recip()).abs() < 1e-15);
        assert!(Expr::scalar("abs(k)", "lambda").is_err());
        assert!(Expr::scalar("k1", "lambda").is_err());
    }

    #[test]
    fn division_by_zero_is_non_finite() {
        assert!(!at("k1/abs(k)", &[0, 0, 0]).re.is_finite());
    }
}

//! Exact scalar expressions over chart coordinates and named parameters.
//!
//! Constants are exact rationals plus the symbol `pi`. Construction folds
//! constants and elides zeros and ones; there is no other simplification.

mod parse;
mod print;
mod tape;

pub use parse::{parse, ParseError};
pub use tape::Tape;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
        }
    }

    pub fn from_name(s: &str) -> Option<Func> {
        match s {
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "exp" => Some(Func::Exp),
            _ => None,
        }
    }
}

#[derive(Debug)]
pub enum Node {
    Const(BigRational),
    Pi,
    Var(Arc<str>),
    Add(Expr, Expr),
    Sub(Expr, Expr),
    Mul(Expr, Expr),
    Div(Expr, Expr),
    Neg(Expr),
    Pow(Expr, i32),
    Call(Func, Expr),
}

/// Immutable, cheaply clonable expression handle.
#[derive(Clone)]
pub struct Expr(Arc<Node>);

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("unbound symbol `{0}`")]
    Unbound(String),
    #[error("division by zero in `{0}`")]
    DivByZero(String),
}

impl Expr {
    fn new(n: Node) -> Expr {
        Expr(Arc::new(n))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn ptr_id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn rational(q: BigRational) -> Expr {
        Expr::new(Node::Const(q))
    }

    pub fn int(n: i64) -> Expr {
        Expr::rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn frac(p: i64, q: i64) -> Expr {
        Expr::rational(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn pi() -> Expr {
        Expr::new(Node::Pi)
    }

    pub fn var(name: &str) -> Expr {
        Expr::new(Node::Var(Arc::from(name)))
    }

    pub fn as_const(&self) -> Option<&BigRational> {
        match self.node() {
            Node::Const(q) => Some(q),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const().is_some_and(|q| q.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.as_const().is_some_and(|q| q.is_one())
    }

    pub fn powi(&self, n: i32) -> Expr {
        if n == 0 {
            return Expr::one();
        }
        if n == 1 {
            return self.clone();
        }
        if let Some(q) = self.as_const() {
            if !(q.is_zero() && n < 0) {
                return Expr::rational(pow_rational(q, n));
            }
        }
        Expr::new(Node::Pow(self.clone(), n))
    }

    pub fn call(f: Func, arg: Expr) -> Expr {
        if arg.is_zero() {
            return match f {
                Func::Sin => Expr::zero(),
                Func::Cos | Func::Exp => Expr::one(),
            };
        }
        Expr::new(Node::Call(f, arg))
    }

    pub fn sin(&self) -> Expr {
        Expr::call(Func::Sin, self.clone())
    }

    pub fn cos(&self) -> Expr {
        Expr::call(Func::Cos, self.clone())
    }

    pub fn exp(&self) -> Expr {
        Expr::call(Func::Exp, self.clone())
    }

    /// Free symbols (coordinates and parameters alike).
    pub fn symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![self.clone()];
        while let Some(e) = stack.pop() {
            if !seen.insert(e.ptr_id()) {
                continue;
            }
            match e.node() {
                Node::Var(v) => {
                    out.insert(v.to_string());
                }
                Node::Const(_) | Node::Pi => {}
                Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                    stack.push(a.clone());
                    stack.push(b.clone());
                }
                Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => stack.push(a.clone()),
            }
        }
        out
    }

    pub fn mentions(&self, name: &str) -> bool {
        self.symbols().contains(name)
    }

    /// Replace symbols by expressions.
    pub fn subst(&self, map: &HashMap<String, Expr>) -> Expr {
        let mut memo = HashMap::new();
        self.subst_rec(map, &mut memo)
    }

    fn subst_rec(&self, map: &HashMap<String, Expr>, memo: &mut HashMap<usize, Expr>) -> Expr {
        if let Some(e) = memo.get(&self.ptr_id()) {
            return e.clone();
        }
        let out = match self.node() {
            Node::Var(v) => map.get(&**v).cloned().unwrap_or_else(|| self.clone()),
            Node::Const(_) | Node::Pi => self.clone(),
            Node::Add(a, b) => a.subst_rec(map, memo) + b.subst_rec(map, memo),
            Node::Sub(a, b) => a.subst_rec(map, memo) - b.subst_rec(map, memo),
            Node::Mul(a, b) => a.subst_rec(map, memo) * b.subst_rec(map, memo),
            Node::Div(a, b) => a.subst_rec(map, memo) / b.subst_rec(map, memo),
            Node::Neg(a) => -a.subst_rec(map, memo),
            Node::Pow(a, n) => a.subst_rec(map, memo).powi(*n),
            Node::Call(f, a) => Expr::call(*f, a.subst_rec(map, memo)),
        };
        memo.insert(self.ptr_id(), out.clone());
        out
    }

    /// Exact partial derivative.
    pub fn diff(&self, x: &str) -> Expr {
        let mut memo = HashMap::new();
        self.diff_rec(x, &mut memo)
    }

    fn diff_rec(&self, x: &str, memo: &mut HashMap<usize, Expr>) -> Expr {
        if let Some(e) = memo.get(&self.ptr_id()) {
            return e.clone();
        }
        let out = match self.node() {
            Node::Const(_) | Node::Pi => Expr::zero(),
            Node::Var(v) => {
                if &**v == x {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Node::Add(a, b) => a.diff_rec(x, memo) + b.diff_rec(x, memo),
            Node::Sub(a, b) => a.diff_rec(x, memo) - b.diff_rec(x, memo),
            Node::Mul(a, b) => a.diff_rec(x, memo) * b.clone() + a.clone() * b.diff_rec(x, memo),
            Node::Div(a, b) => {
                let da = a.diff_rec(x, memo);
                let db = b.diff_rec(x, memo);
                if db.is_zero() {
                    da / b.clone()
                } else {
                    (da * b.clone() - a.clone() * db) / b.powi(2)
                }
            }
            Node::Neg(a) => -a.diff_rec(x, memo),
            Node::Pow(a, n) => Expr::int(*n as i64) * a.powi(n - 1) * a.diff_rec(x, memo),
            Node::Call(f, a) => {
                let da = a.diff_rec(x, memo);
                match f {
                    Func::Sin => a.cos() * da,
                    Func::Cos => -(a.sin() * da),
                    Func::Exp => self.clone() * da,
                }
            }
        };
        memo.insert(self.ptr_id(), out.clone());
        out
    }

    /// Recursive evaluation with named bindings.
    pub fn eval(&self, env: &dyn Fn(&str) -> Option<f64>) -> Result<f64, EvalError> {
        Ok(match self.node() {
            Node::Const(q) => rational_to_f64(q),
            Node::Pi => std::f64::consts::PI,
            Node::Var(v) => env(v).ok_or_else(|| EvalError::Unbound(v.to_string()))?,
            Node::Add(a, b) => a.eval(env)? + b.eval(env)?,
            Node::Sub(a, b) => a.eval(env)? - b.eval(env)?,
            Node::Mul(a, b) => a.eval(env)? * b.eval(env)?,
            Node::Div(a, b) => {
                let d = b.eval(env)?;
                if d == 0.0 {
                    return Err(EvalError::DivByZero(b.to_string()));
                }
                a.eval(env)? / d
            }
            Node::Neg(a) => -a.eval(env)?,
            Node::Pow(a, n) => {
                let v = a.eval(env)?;
                if v == 0.0 && *n < 0 {
                    return Err(EvalError::DivByZero(self.to_string()));
                }
                v.powi(*n)
            }
            Node::Call(f, a) => {
                let v = a.eval(env)?;
                match f {
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Exp => v.exp(),
                }
            }
        })
    }

    /// Evaluate with a slice of `(name, value)` bindings.
    pub fn eval_at(&self, binds: &[(&str, f64)]) -> Result<f64, EvalError> {
        self.eval(&|n| binds.iter().find(|(k, _)| *k == n).map(|(_, v)| *v))
    }

    /// Number of distinct nodes in the DAG.
    pub fn size(&self) -> usize {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![self.clone()];
        while let Some(e) = stack.pop() {
            if !seen.insert(e.ptr_id()) {
                continue;
            }
            match e.node() {
                Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                    stack.push(a.clone());
                    stack.push(b.clone());
                }
                Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => stack.push(a.clone()),
                _ => {}
            }
        }
        seen.len()
    }
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        let n = q.numer().to_f64().unwrap_or(f64::NAN);
        let d = q.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

fn pow_rational(q: &BigRational, n: i32) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..n.unsigned_abs() {
        acc *= q;
    }
    if n < 0 {
        acc.recip()
    } else {
        acc
    }
}

/// Parse a rational literal of the form `p`, `p/q` or a decimal `1.25`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let q = decimal_literal(body)?;
    Some(if neg { -q } else { q })
}

pub(crate) fn decimal_literal(s: &str) -> Option<BigRational> {
    let (int, frac) = match s.split_once('.') {
        Some((a, b)) => (a, b),
        None => (s, ""),
    };
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let n: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let d = num::pow(BigInt::from(10), frac.len());
    Some(BigRational::new(n, d))
}

pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, b: Expr) -> Expr {
        if self.is_zero() {
            return b;
        }
        if b.is_zero() {
            return self;
        }
        if let (Some(x), Some(y)) = (self.as_const(), b.as_const()) {
            return Expr::rational(x + y);
        }
        Expr::new(Node::Add(self, b))
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, b: Expr) -> Expr {
        if b.is_zero() {
            return self;
        }
        if self.is_zero() {
            return -b;
        }
        if let (Some(x), Some(y)) = (self.as_const(), b.as_const()) {
            return Expr::rational(x - y);
        }
        Expr::new(Node::Sub(self, b))
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, b: Expr) -> Expr {
        if self.is_zero() || b.is_zero() {
            return Expr::zero();
        }
        if self.is_one() {
            return b;
        }
        if b.is_one() {
            return self;
        }
        if let (Some(x), Some(y)) = (self.as_const(), b.as_const()) {
            return Expr::rational(x * y);
        }
        if let Some(x) = self.as_const() {
            if (-x).is_one() {
                return -b;
            }
        }
        if let Some(y) = b.as_const() {
            if (-y).is_one() {
                return -self;
            }
        }
        Expr::new(Node::Mul(self, b))
    }
}

impl Div for Expr {
    type Output = Expr;
    fn div(self, b: Expr) -> Expr {
        if b.is_one() {
            return self;
        }
        if self.is_zero() && !b.is_zero() {
            return Expr::zero();
        }
        if let (Some(x), Some(y)) = (self.as_const(), b.as_const()) {
            if !y.is_zero() {
                return Expr::rational(x / y);
            }
        }
        Expr::new(Node::Div(self, b))
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        if let Some(x) = self.as_const() {
            return Expr::rational(-x);
        }
        if let Node::Neg(a) = self.node() {
            return a.clone();
        }
        Expr::new(Node::Neg(self))
    }
}

macro_rules! ref_ops {
    ($tr:ident, $m:ident) => {
        impl $tr<&Expr> for &Expr {
            type Output = Expr;
            fn $m(self, b: &Expr) -> Expr {
                self.clone().$m(b.clone())
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, b: &Expr) -> Expr {
                self.$m(b.clone())
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, b: Expr) -> Expr {
                self.clone().$m(b)
            }
        }
    };
}
ref_ops!(Add, add);
ref_ops!(Sub, sub);
ref_ops!(Mul, mul);
ref_ops!(Div, div);

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -self.clone()
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print::render(self))
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Expr, ParseError> {
        parse(s)
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Expr {
        Expr::int(n)
    }
}

pub(crate) fn is_negative_const(e: &Expr) -> bool {
    e.as_const().is_some_and(|q| q.is_negative())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folding() {
        let e = Expr::int(2) * Expr::frac(1, 2);
        assert!(e.is_one());
        assert!((Expr::var("x") * Expr::zero()).is_zero());
        assert!((Expr::var("x") - Expr::var("x")).size() > 1);
    }

    #[test]
    fn diff_of_free_expression_is_zero() {
        let e = parse("p_b * R").unwrap();
        assert!(e.diff("y1").is_zero());
    }

    #[test]
    fn diff_polynomial() {
        let e = parse("q1*q1").unwrap().diff("q1");
        assert_eq!(e.eval_at(&[("q1", 3.0)]).unwrap(), 6.0);
    }

    #[test]
    fn diff_sin_prints_chain_rule() {
        let e = parse("sin(2*pi*y1)").unwrap().diff("y1");
        assert_eq!(e.to_string(), "cos(2*pi*y1)*(2*pi)");
        let v = e.eval_at(&[("y1", 0.0)]).unwrap();
        assert!((v - 2.0 * std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn unbound_symbol() {
        let e = parse("alpha*theta1").unwrap();
        let err = e.eval_at(&[("alpha", 1.5)]).unwrap_err();
        assert_eq!(err, EvalError::Unbound("theta1".into()));
    }

    #[test]
    fn division_by_zero_names_subtree() {
        let e = parse("1/(y1-y1)").unwrap();
        match e.eval_at(&[("y1", 0.3)]) {
            Err(EvalError::DivByZero(s)) => assert_eq!(s, "y1 - y1"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn decimal_is_exact() {
        assert_eq!(parse_rational("0.25").unwrap(), BigRational::new(1.into(), 4.into()));
        assert_eq!(parse_rational("3/2").unwrap(), BigRational::new(3.into(), 2.into()));
        assert!(parse_rational("1/0").is_none());
    }
}

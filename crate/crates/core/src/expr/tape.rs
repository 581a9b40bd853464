use super::{rational_to_f64, EvalError, Expr, Func, Node};
use std::collections::HashMap;

#[derive(Debug, Clone, Copy)]
enum Op {
    Const(f64),
    Var(usize),
    Add(usize, usize),
    Sub(usize, usize),
    Mul(usize, usize),
    Div(usize, usize),
    Neg(usize),
    Pow(usize, i32),
    Sin(usize),
    Cos(usize),
    Exp(usize),
}

/// A batch of expressions flattened into straight-line code over a fixed
/// variable ordering. Shared subtrees are evaluated once.
#[derive(Debug, Clone)]
pub struct Tape {
    ops: Vec<Op>,
    outputs: Vec<usize>,
    nvars: usize,
    divisors: Vec<(usize, Expr)>,
}

impl Tape {
    /// Compile `exprs` with `vars` as the positional inputs. Unbound symbols
    /// are reported here rather than at evaluation time.
    pub fn compile(exprs: &[Expr], vars: &[&str]) -> Result<Tape, EvalError> {
        let index: HashMap<&str, usize> = vars.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let mut t = Tape { ops: Vec::new(), outputs: Vec::new(), nvars: vars.len(), divisors: Vec::new() };
        let mut memo: HashMap<usize, usize> = HashMap::new();
        for e in exprs {
            let slot = t.emit(e, &index, &mut memo)?;
            t.outputs.push(slot);
        }
        Ok(t)
    }

    fn emit(&mut self, e: &Expr, index: &HashMap<&str, usize>, memo: &mut HashMap<usize, usize>) -> Result<usize, EvalError> {
        if let Some(&s) = memo.get(&e.ptr_id()) {
            return Ok(s);
        }
        let op = match e.node() {
            Node::Const(q) => Op::Const(rational_to_f64(q)),
            Node::Pi => Op::Const(std::f64::consts::PI),
            Node::Var(v) => Op::Var(*index.get(&**v).ok_or_else(|| EvalError::Unbound(v.to_string()))?),
            Node::Add(a, b) => Op::Add(self.emit(a, index, memo)?, self.emit(b, index, memo)?),
            Node::Sub(a, b) => Op::Sub(self.emit(a, index, memo)?, self.emit(b, index, memo)?),
            Node::Mul(a, b) => Op::Mul(self.emit(a, index, memo)?, self.emit(b, index, memo)?),
            Node::Div(a, b) => {
                let (x, y) = (self.emit(a, index, memo)?, self.emit(b, index, memo)?);
                self.divisors.push((y, b.clone()));
                Op::Div(x, y)
            }
            Node::Neg(a) => Op::Neg(self.emit(a, index, memo)?),
            Node::Pow(a, n) => {
                let x = self.emit(a, index, memo)?;
                if *n < 0 {
                    self.divisors.push((x, a.clone()));
                }
                Op::Pow(x, *n)
            }
            Node::Call(f, a) => {
                let x = self.emit(a, index, memo)?;
                match f {
                    Func::Sin => Op::Sin(x),
                    Func::Cos => Op::Cos(x),
                    Func::Exp => Op::Exp(x),
                }
            }
        };
        self.ops.push(op);
        let slot = self.ops.len() - 1;
        memo.insert(e.ptr_id(), slot);
        Ok(slot)
    }

    pub fn n_outputs(&self) -> usize {
        self.outputs.len()
    }

    pub fn n_vars(&self) -> usize {
        self.nvars
    }

    /// Evaluate into `out`, reusing `scratch`. Division by zero yields
    /// non-finite values; use [`Tape::eval_checked`] to get an error.
    pub fn eval_into(&self, x: &[f64], scratch: &mut Vec<f64>, out: &mut [f64]) {
        debug_assert!(x.len() >= self.nvars);
        scratch.clear();
        scratch.reserve(self.ops.len());
        for op in &self.ops {
            let v = match *op {
                Op::Const(c) => c,
                Op::Var(i) => x[i],
                Op::Add(a, b) => scratch[a] + scratch[b],
                Op::Sub(a, b) => scratch[a] - scratch[b],
                Op::Mul(a, b) => scratch[a] * scratch[b],
                Op::Div(a, b) => scratch[a] / scratch[b],
                Op::Neg(a) => -scratch[a],
                Op::Pow(a, n) => scratch[a].powi(n),
                Op::Sin(a) => scratch[a].sin(),
                Op::Cos(a) => scratch[a].cos(),
                Op::Exp(a) => scratch[a].exp(),
            };
            scratch.push(v);
        }
        for (o, &s) in out.iter_mut().zip(&self.outputs) {
            *o = scratch[s];
        }
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let mut scratch = Vec::new();
        let mut out = vec![0.0; self.outputs.len()];
        self.eval_into(x, &mut scratch, &mut out);
        out
    }

    pub fn eval_checked(&self, x: &[f64]) -> Result<Vec<f64>, EvalError> {
        let mut scratch = Vec::new();
        let mut out = vec![0.0; self.outputs.len()];
        self.eval_into(x, &mut scratch, &mut out);
        for (slot, e) in &self.divisors {
            if scratch[*slot] == 0.0 {
                return Err(EvalError::DivByZero(e.to_string()));
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn tape_matches_recursive_eval() {
        let es: Vec<Expr> = ["sin(x)*y + x^3", "exp(-x)/(1 + y^2)", "cos(2*pi*y)"].iter().map(|s| parse(s).unwrap()).collect();
        let t = Tape::compile(&es, &["x", "y"]).unwrap();
        let got = t.eval(&[0.3, -1.2]);
        for (e, g) in es.iter().zip(&got) {
            let want = e.eval_at(&[("x", 0.3), ("y", -1.2)]).unwrap();
            assert_eq!(*g, want);
        }
    }

    #[test]
    fn unbound_at_compile() {
        let e = parse("x + z").unwrap();
        assert!(matches!(Tape::compile(&[e], &["x"]), Err(EvalError::Unbound(s)) if s == "z"));
    }

    #[test]
    fn checked_division() {
        let e = parse("1/x").unwrap();
        let t = Tape::compile(&[e], &["x"]).unwrap();
        assert!(t.eval_checked(&[0.0]).is_err());
        assert_eq!(t.eval_checked(&[2.0]).unwrap(), vec![0.5]);
    }
}

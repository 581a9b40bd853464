use super::{format_rational, is_negative_const, Expr, Node};

const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const UNARY: u8 = 3;
const POWER: u8 = 4;
const ATOM: u8 = 5;

pub(super) fn render(e: &Expr) -> String {
    match e.node() {
        Node::Const(q) => format_rational(q),
        _ => go(e).0,
    }
}

fn level(e: &Expr) -> u8 {
    match e.node() {
        Node::Add(..) | Node::Sub(..) => SUM,
        Node::Mul(..) | Node::Div(..) => PRODUCT,
        Node::Neg(_) => UNARY,
        Node::Pow(..) => POWER,
        _ => ATOM,
    }
}

fn wrap(e: &Expr, min: u8) -> String {
    let (s, lv) = go(e);
    if lv < min {
        format!("({s})")
    } else {
        s
    }
}

fn go(e: &Expr) -> (String, u8) {
    let lv = level(e);
    let s = match e.node() {
        Node::Const(q) => {
            let s = format_rational(q);
            if q.is_integer() && !is_negative_const(e) {
                s
            } else {
                format!("({s})")
            }
        }
        Node::Pi => "pi".to_string(),
        Node::Var(v) => v.to_string(),
        Node::Add(a, b) => format!("{} + {}", wrap(a, SUM), operand_right(b, SUM + 1)),
        Node::Sub(a, b) => format!("{} - {}", wrap(a, SUM), operand_right(b, SUM + 1)),
        Node::Mul(a, b) => format!("{}*{}", wrap(a, PRODUCT), operand_right(b, PRODUCT + 1)),
        Node::Div(a, b) => format!("{}/{}", wrap(a, PRODUCT), operand_right(b, PRODUCT + 1)),
        Node::Neg(a) => format!("-{}", wrap(a, UNARY)),
        Node::Pow(a, n) => {
            if *n < 0 {
                format!("{}^({n})", wrap(a, POWER))
            } else {
                format!("{}^{n}", wrap(a, POWER))
            }
        }
        Node::Call(f, a) => format!("{}({})", f.name(), go(a).0),
    };
    (s, lv)
}

fn operand_right(e: &Expr, min: u8) -> String {
    if matches!(e.node(), Node::Neg(_)) {
        return format!("({})", go(e).0);
    }
    wrap(e, min)
}

#[cfg(test)]
mod tests {
    use crate::expr::parse;

    #[test]
    fn round_trip_is_idempotent() {
        for s in [
            "a - (b - c)",
            "a/(b*c)",
            "-(x + 1)^2",
            "x^(-2)",
            "(x^2)^3",
            "x*(-3/2)",
            "-3/2*x",
            "2*-x",
            "sin(-x)*cos(2*pi*y1)",
            "exp(x)/(1 + x)",
            "0.25*q1",
        ] {
            let once = parse(s).unwrap().to_string();
            let twice = parse(&once).unwrap().to_string();
            assert_eq!(once, twice, "{s}");
        }
    }
}

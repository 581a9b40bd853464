//! Parse, differentiate and evaluate a symbolic coefficient.
use shla::expr::{parse, Tape};

fn main() -> anyhow::Result<()> {
    let e = parse("sin(2*pi*y1) * exp(cos(2*pi*q1)) / (2 + y2^2)")?;
    let d = e.diff("y1");
    println!("e      = {e}");
    println!("de/dy1 = {d}");
    let tape = Tape::compile(&[e, d], &["y1", "y2", "q1"])?;
    println!("at (0.1, 0.2, 0.3): {:?}", tape.eval(&[0.1, 0.2, 0.3]));
    Ok(())
}

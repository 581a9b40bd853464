//! An unobstructed deformation with nonzero higher orders: the first-order
//! term is leafwise exact, so every obstruction class vanishes.
use shla::chart::builtin_flat_torus;
use shla::deformation::{mc_solve, McOutcome, SolveOptions};
use shla::expr::parse;
use shla::form::Form;
use shla::leafform::d_f;

fn main() -> anyhow::Result<()> {
    let c = builtin_flat_torus();
    let h = Form { deg: 0, dim: 2, c: vec![parse("sin(2*pi*q1)*sin(2*pi*y1)/5 + cos(2*pi*q2)*cos(2*pi*y2)/5")?] };
    let gamma = d_f(&c, &h)?;
    match mc_solve(&c, &gamma, &SolveOptions { trunc: 6, ..Default::default() })? {
        McOutcome::Solved(s) => {
            for k in 1..=s.order() {
                println!("max |Gamma_{k}| = {:.6}", s.max_abs(k));
            }
            println!("certified residual {:.3e}", s.certified.unwrap_or(f64::NAN));
        }
        McOutcome::Obstructed(r) => println!("obstructed at order {}", r.order),
    }
    Ok(())
}

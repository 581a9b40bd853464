//! Transverse curvature of a random splitting, with the Bianchi identity and
//! the change-of-splitting formula checked at sample points.
use shla::foliation::{pi_bracket, pi_differential, splitting_transform, transverse_curvature, TransverseField};
use shla::randgen::curved_chart;

fn main() -> anyhow::Result<()> {
    let c = curved_chart(2, 2, 3);
    let pts = c.sample(50, 7);
    let f = transverse_curvature(&c);
    println!("max |F|        = {:.3e}", f.max_abs(&c, &pts));
    println!("max |d^Pi F|   = {:.3e}", pi_differential(&c, &f)?.max_abs(&c, &pts));

    let b = TransverseField { comp: f.comp.iter().map(|x| x.interior(0)).collect(), deg: 1, ..f.clone() };
    let moved = transverse_curvature(&splitting_transform(&c, &b)?);
    let want = f.add(&pi_differential(&c, &b)?).add(&pi_bracket(&c, &b, &b)?);
    println!("transform gap  = {:.3e}", moved.sub(&want).max_abs(&c, &pts));
    Ok(())
}

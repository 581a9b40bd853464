//! The order-2 obstruction on the flat torus and its fiber profile.
use shla::chart::builtin_flat_torus;
use shla::deformation::{fiber_profile, kuranishi, mc_solve, McOutcome, SolveOptions};
use shla::leafform::one_form;

fn main() -> anyhow::Result<()> {
    let c = builtin_flat_torus();
    let gamma = one_form(&["sin(2*pi*y1)", "sin(2*pi*y2)"]);
    let kr = kuranishi(&c, &gamma)?;
    println!("Kr = {}", kr.c[0]);
    let prof = fiber_profile(&c, &kr, 4, 4)?;
    print!("{}", prof.to_csv());
    if let McOutcome::Obstructed(r) = mc_solve(&c, &gamma, &SolveOptions::default())? {
        println!("obstructed at order {}, L2 norm {:.6}", r.order, r.norm);
    }
    Ok(())
}

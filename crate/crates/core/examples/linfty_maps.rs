//! Structure maps on a curved chart and the L∞ relations up to arity 4.
use shla::algebroid::LInftyContext;
use shla::leafform::LeafForm;
use shla::randgen::{curved_chart, form};

fn main() -> anyhow::Result<()> {
    let c = curved_chart(1, 3, 21);
    let ctx = LInftyContext::new(&c, 5)?;
    let xs: Vec<LeafForm> = (0..4).map(|i| form(&c, 1, 2, 500 + i)).collect();
    for n in 1..=4 {
        let refs: Vec<&LeafForm> = xs[..n].iter().collect();
        println!("arity {n}: residual {:.3e}", ctx.linfty_residual(&refs, 32, 7)?);
    }
    let m3 = ctx.m_ell(&[&xs[0], &xs[1], &xs[2]])?;
    println!("m3 has degree {} and {} nonzero components", m3.deg, m3.c.iter().filter(|e| !e.is_zero()).count());
    Ok(())
}

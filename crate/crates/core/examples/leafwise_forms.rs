//! The leafwise complex: `d_F` squares to zero and `∇` follows the splitting.
use shla::leafform::{d_f, form_to_doc, max_abs, nabla};
use shla::randgen::{curved_chart, form};

fn main() -> anyhow::Result<()> {
    let c = curved_chart(1, 3, 5);
    let xi = form(&c, 1, 2, 1);
    let dxi = d_f(&c, &xi)?;
    let pts = c.sample(32, 7);
    println!("max |d_F d_F xi| = {:.3e}", max_abs(&c, &d_f(&c, &dxi)?, &pts));
    println!("max |nabla_1 xi| = {:.3e}", max_abs(&c, &nabla(&c, &xi, 0), &pts));
    println!("{}", serde_json::to_string_pretty(&form_to_doc(&form(&c, 2, 1, 2)))?);
    Ok(())
}

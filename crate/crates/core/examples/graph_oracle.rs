//! The linear-algebra oracle: coisotropy of a section's graph against the
//! master equation, for a solution and for a non-solution.
use shla::chart::builtin_flat_torus;
use shla::expr::Expr;
use shla::leafform::one_form;
use shla::oracle::{graph_coisotropy_defect, master_residual};

fn main() -> anyhow::Result<()> {
    let c = builtin_flat_torus();
    let pts = c.sample(64, 7);
    for (name, s) in [
        ("cos(2 pi y1) f1", one_form(&["cos(2*pi*y1)", "0"])),
        ("sin(2 pi y1) f1 + sin(2 pi y2) f2", one_form(&["sin(2*pi*y1)", "sin(2*pi*y2)"])),
    ] {
        let s = s.scale(&Expr::frac(1, 10));
        let d = graph_coisotropy_defect(&c, &s, &pts)?;
        let m = master_residual(&c, &s, &pts)?;
        println!("{name:<36} defect {d:.3e}  master residual {m:.3e}");
    }
    Ok(())
}

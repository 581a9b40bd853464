use shla::algebroid::LInftyContext;
use shla::chart::{ChartSpec, Point};
use shla::expr::Expr;
use shla::foliation::transverse_curvature;
use shla::form::Form;
use shla::leafform::{eval_form, nabla, LeafForm};
use shla::randgen::{curved_chart, form};

fn perms(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in perms(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Koszul sign of reordering by `p` when every odd shifted degree anticommutes.
fn koszul(shifted: &[usize], p: &[usize]) -> f64 {
    let mut s = 1.0;
    for a in 0..p.len() {
        for b in a + 1..p.len() {
            if p[a] > p[b] && shifted[p[a]] % 2 == 1 && shifted[p[b]] % 2 == 1 {
                s = -s;
            }
        }
    }
    s
}

/// `m_3` by explicit loops over every index at one point.
fn m3_by_loops(c: &ChartSpec, xs: [&LeafForm; 3], p: &Point) -> Form<f64> {
    let k2 = c.k2();
    let winv = c.omega_inverse_at(p).unwrap();
    let f = transverse_curvature(c).eval_points(c, std::slice::from_ref(p)).remove(0);
    let npairs = k2 * (k2 - 1) / 2;
    let fval = |beta: usize, m: usize, n: usize| -> f64 {
        if m == n {
            return 0.0;
        }
        let (a, b, s) = if m < n { (m, n, 1.0) } else { (n, m, -1.0) };
        let mut pos = 0;
        for i in 0..k2 {
            for j in i + 1..k2 {
                if (i, j) == (a, b) {
                    return s * f[beta * npairs + pos];
                }
                pos += 1;
            }
        }
        unreachable!()
    };
    let nab: Vec<Vec<Form<f64>>> = xs.iter().map(|x| (0..k2).map(|i| eval_form(c, &nabla(c, x, i), p)).collect()).collect();
    let vals: Vec<Form<f64>> = xs.iter().map(|x| eval_form(c, x, p)).collect();
    let shifted: Vec<usize> = xs.iter().map(|x| x.deg - 1).collect();
    let out_deg = xs.iter().map(|x| x.deg).sum::<usize>() - 1;
    let mut total = Form::zero(c.r, out_deg);
    for sigma in perms(3) {
        let (a, b, d) = (sigma[0], sigma[1], sigma[2]);
        let sh = [shifted[a], shifted[b], shifted[d]];
        let pre = (sh[0] * sh[1] + sh[0] * sh[2] + sh[1] * sh[2] + sh[2]) % 2;
        let sign = koszul(&shifted, &sigma) * if pre == 0 { 0.5 } else { -0.5 };
        for beta in 0..c.r {
            let mid = vals[b].interior(beta);
            for i in 0..k2 {
                for j in 0..k2 {
                    let mut coef = 0.0;
                    for m in 0..k2 {
                        for n in 0..k2 {
                            coef += winv[(i, m)] * -fval(beta, m, n) * winv[(n, j)];
                        }
                    }
                    if coef == 0.0 {
                        continue;
                    }
                    let t = nab[a][i].wedge(&mid).wedge(&nab[d][j]);
                    total = total.add(&t.scale(&(sign * coef)));
                }
            }
        }
    }
    total
}

#[test]
fn m3_matches_index_loops() {
    for seed in [1u64, 2, 3] {
        let c = curved_chart(1, 3, seed);
        let ctx = LInftyContext::new(&c, 3).unwrap();
        let xs: Vec<LeafForm> = (0..3).map(|i| form(&c, 1, 2, 100 * seed + i)).collect();
        let m3 = ctx.m_ell(&[&xs[0], &xs[1], &xs[2]]).unwrap();
        let mut scale: f64 = 0.0;
        for p in c.sample(8, seed) {
            let want = m3_by_loops(&c, [&xs[0], &xs[1], &xs[2]], &p);
            let got = eval_form(&c, &m3, &p);
            scale = scale.max(want.max_abs());
            assert!(got.sub(&want).max_abs() < 1e-10 * (1.0 + want.max_abs()), "seed {seed}");
        }
        assert!(scale > 1e-3, "m3 vanishes on seed {seed}");
    }
}

#[test]
fn relations_hold_up_to_arity_four() {
    let c = curved_chart(1, 3, 21);
    let ctx = LInftyContext::new(&c, 5).unwrap();
    let xs: Vec<LeafForm> = (0..4).map(|i| form(&c, 1, 2, 500 + i)).collect();
    for n in 2..=4 {
        let refs: Vec<&LeafForm> = xs[..n].iter().collect();
        let res = ctx.linfty_residual(&refs, 16, 3).unwrap();
        assert!(res < 1e-8, "arity {n}: {res}");
    }
}

#[test]
fn negated_curvature_breaks_the_arity_three_relation() {
    let c = curved_chart(1, 3, 21);
    let f = transverse_curvature(&c);
    let wrong = LInftyContext::with_curvature(&c, f.scale(&Expr::int(-1)), 4).unwrap();
    let right = LInftyContext::with_curvature(&c, f, 4).unwrap();
    let xs: Vec<LeafForm> = (0..3).map(|i| form(&c, 1, 2, 500 + i)).collect();
    let refs: Vec<&LeafForm> = xs.iter().collect();
    assert!(right.linfty_residual(&refs, 16, 3).unwrap() < 1e-8);
    assert!(wrong.linfty_residual(&refs, 16, 3).unwrap() > 1e-3);
}

#[test]
fn m3_is_graded_symmetric() {
    let c = curved_chart(1, 3, 4);
    let ctx = LInftyContext::new(&c, 3).unwrap();
    let a = form(&c, 1, 2, 1);
    let b = form(&c, 2, 2, 2);
    let d = form(&c, 1, 2, 3);
    let pts = c.sample(8, 1);
    let lhs = ctx.m_ell(&[&a, &b, &d]).unwrap();
    let rhs = ctx.m_ell(&[&b, &a, &d]).unwrap();
    let lhs2 = ctx.m_ell(&[&a, &d, &b]).unwrap();
    for p in &pts {
        let (u, v, w) = (eval_form(&c, &lhs, p), eval_form(&c, &rhs, p), eval_form(&c, &lhs2, p));
        assert!(u.sub(&v).max_abs() < 1e-10);
        assert!(u.sub(&w).max_abs() < 1e-10);
    }
}

#[test]
fn degree_zero_inputs_are_rejected_above_arity_two() {
    let c = curved_chart(1, 2, 4);
    let ctx = LInftyContext::new(&c, 3).unwrap();
    let f0 = form(&c, 0, 2, 1);
    let f1 = form(&c, 1, 2, 2);
    assert!(ctx.m_ell(&[&f0, &f1, &f1]).is_err());
}

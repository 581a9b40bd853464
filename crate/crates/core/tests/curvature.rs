use proptest::prelude::*;
use shla::chart::{ChartSpec, Point};
use shla::expr::{Expr, Tape};
use shla::foliation::{pi_bracket, pi_differential, splitting_transform, transverse_curvature, TransverseField};
use shla::form::{subsets, Form};
use shla::randgen::{curved_chart, trig_poly};
use shla::sampling::rng;

/// Curvature from numeric values of `R` only: central differences of every
/// `R_j^beta`, then `F_ij = Y_i R_j − Y_j R_i` with `Y_i = ∂_i + R_i^g ∂_g`.
fn curvature_by_differences(c: &ChartSpec, p: &Point) -> Vec<Vec<f64>> {
    let (k2, r) = (c.k2(), c.r);
    let flat: Vec<Expr> = c.split.iter().flatten().cloned().collect();
    let tape = Tape::compile(&flat, &c.coord_refs()).unwrap();
    let split = |x: &[f64]| -> Vec<f64> { tape.eval(x) };
    let h = 1e-4;
    let mut grad = Vec::new();
    for a in 0..c.dim() {
        let (mut u, mut v) = (p.0.clone(), p.0.clone());
        u[a] += h;
        v[a] -= h;
        let (su, sv) = (split(&u), split(&v));
        let (mut u2, mut v2) = (p.0.clone(), p.0.clone());
        u2[a] += 2.0 * h;
        v2[a] -= 2.0 * h;
        let (su2, sv2) = (split(&u2), split(&v2));
        grad.push((0..flat.len()).map(|m| (8.0 * (su[m] - sv[m]) - (su2[m] - sv2[m])) / (12.0 * h)).collect::<Vec<f64>>());
    }
    let val = split(&p.0);
    let rr = |i: usize, b: usize| val[i * r + b];
    let y = |i: usize, j: usize, b: usize| {
        let mut acc = grad[i][j * r + b];
        for g in 0..r {
            acc += rr(i, g) * grad[k2 + g][j * r + b];
        }
        acc
    };
    (0..r).map(|b| subsets(k2, 2).iter().map(|ij| y(ij[0], ij[1], b) - y(ij[1], ij[0], b)).collect()).collect()
}

fn random_field(c: &ChartSpec, deg: usize, seed: u64) -> TransverseField {
    let mut g = rng(seed);
    let vars = c.coord_refs();
    let comp = (0..c.r)
        .map(|_| Form::from_fn(c.k2(), deg, |_| trig_poly(&mut g, &vars, 2, 2)))
        .collect();
    TransverseField { deg, k2: c.k2(), r: c.r, comp }
}

fn worst(a: &TransverseField, b: &TransverseField, c: &ChartSpec, pts: &[Point]) -> f64 {
    a.sub(b).max_abs(c, pts)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn symbolic_curvature_matches_difference_oracle(seed in 0u64..10_000, r in 1usize..=3) {
        let c = curved_chart(1, r, seed);
        let f = transverse_curvature(&c);
        for p in c.sample(10, seed) {
            let sym = f.eval_points(&c, std::slice::from_ref(&p)).remove(0);
            let num: Vec<f64> = curvature_by_differences(&c, &p).into_iter().flatten().collect();
            for (s, n) in sym.iter().zip(&num) {
                prop_assert!((s - n).abs() < 1e-6 * (1.0 + s.abs()), "{s} vs {n}");
            }
        }
    }

    #[test]
    fn bianchi_identity_on_six_torus(seed in 0u64..10_000) {
        let c = curved_chart(2, 2, seed);
        let pts = c.sample(20, seed);
        let df = pi_differential(&c, &transverse_curvature(&c)).unwrap();
        prop_assert!(df.max_abs(&c, &pts) < 1e-8);
    }

    #[test]
    fn splitting_change_moves_curvature(seed in 0u64..10_000) {
        let c = curved_chart(1, 2, seed);
        let pts = c.sample(20, seed);
        let b = random_field(&c, 1, seed + 1);
        let moved = transverse_curvature(&splitting_transform(&c, &b).unwrap());
        let want = transverse_curvature(&c).add(&pi_differential(&c, &b).unwrap()).add(&pi_bracket(&c, &b, &b).unwrap());
        prop_assert!(worst(&moved, &want, &c, &pts) < 1e-8);
    }
}

/// `(d^Π)² B = binom(l+2, 2) [F, B]` for a degree-`l` field under the
/// `1/n!` bracket normalisation.
#[test]
fn square_of_differential_is_curvature_bracket() {
    let c = curved_chart(2, 2, 3);
    let f = transverse_curvature(&c);
    let pts = c.sample(20, 11);
    for (deg, factor) in [(0usize, 1i64), (1, 3), (2, 6)] {
        let b = random_field(&c, deg, 40 + deg as u64);
        let dd = pi_differential(&c, &pi_differential(&c, &b).unwrap()).unwrap();
        let br = pi_bracket(&c, &f, &b).unwrap().scale(&Expr::int(factor));
        let scale = br.max_abs(&c, &pts);
        assert!(scale > 1e-3, "degree {deg}: bracket vanishes, test is vacuous");
        assert!(worst(&dd, &br, &c, &pts) < 1e-8 * (1.0 + scale), "degree {deg}");
    }
}

#[test]
fn bianchi_is_vacuous_on_the_four_torus() {
    let c = curved_chart(1, 2, 5);
    assert!(pi_differential(&c, &transverse_curvature(&c)).is_err());
}

#[test]
fn bracket_is_graded_antisymmetric() {
    let c = curved_chart(2, 1, 8);
    let pts = c.sample(20, 2);
    let a = random_field(&c, 1, 1);
    let b = random_field(&c, 2, 2);
    let ab = pi_bracket(&c, &a, &b).unwrap();
    let ba = pi_bracket(&c, &b, &a).unwrap();
    assert!(ab.add(&ba).max_abs(&c, &pts) < 1e-10);
    let aa = pi_bracket(&c, &a, &a).unwrap();
    assert!(aa.max_abs(&c, &pts) > 1e-3);
}

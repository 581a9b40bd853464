use proptest::prelude::*;
use shla::form::{binomial, subsets, Form};

fn inversions(v: &[usize]) -> usize {
    (0..v.len()).map(|a| (a + 1..v.len()).filter(|&b| v[a] > v[b]).count()).sum()
}

/// Value at an arbitrary index list, antisymmetric by sorting.
fn at(f: &Form<f64>, idx: &[usize]) -> f64 {
    let mut s = idx.to_vec();
    s.sort_unstable();
    if s.windows(2).any(|w| w[0] == w[1]) {
        return 0.0;
    }
    let sign = if inversions(idx).is_multiple_of(2) { 1.0 } else { -1.0 };
    let pos = subsets(f.dim, f.deg).iter().position(|k| *k == s).unwrap();
    sign * f.c[pos]
}

/// `(a∧b)_K = Σ_{I ⊔ J = K} sgn(I,J) a_I b_J`, by enumerating index subsets.
fn naive_wedge(a: &Form<f64>, b: &Form<f64>) -> Form<f64> {
    let dim = a.dim;
    let deg = a.deg + b.deg;
    let mut out = Form::zero(dim, deg);
    if deg > dim {
        return out;
    }
    for (pos, k) in subsets(dim, deg).iter().enumerate() {
        let mut acc = 0.0;
        for choice in subsets(deg, a.deg) {
            let i: Vec<usize> = choice.iter().map(|&c| k[c]).collect();
            let j: Vec<usize> = k.iter().copied().filter(|x| !i.contains(x)).collect();
            let order: Vec<usize> = i.iter().chain(&j).copied().collect();
            let sign = if inversions(&order).is_multiple_of(2) { 1.0 } else { -1.0 };
            acc += sign * at(a, &i) * at(b, &j);
        }
        out.c[pos] = acc;
    }
    out
}

/// `(ι_β a)_I = a_{β I}`.
fn naive_interior(a: &Form<f64>, beta: usize) -> Form<f64> {
    let mut out = Form::zero(a.dim, a.deg - 1);
    for (pos, i) in subsets(a.dim, a.deg - 1).iter().enumerate() {
        let idx: Vec<usize> = std::iter::once(beta).chain(i.iter().copied()).collect();
        out.c[pos] = at(a, &idx);
    }
    out
}

fn random_form(dim: usize, deg: usize) -> impl Strategy<Value = Form<f64>> {
    prop::collection::vec(-2.0..2.0f64, binomial(dim, deg)).prop_map(move |c| Form { deg, dim, c })
}

fn pair() -> impl Strategy<Value = (Form<f64>, Form<f64>)> {
    (1usize..=6).prop_flat_map(|dim| (0..=dim, 0..=dim).prop_flat_map(move |(p, q)| (random_form(dim, p), random_form(dim, q))))
}

fn positive() -> impl Strategy<Value = (Form<f64>, usize)> {
    (1usize..=6).prop_flat_map(|dim| (1..=dim).prop_flat_map(move |p| (random_form(dim, p), 0..dim)))
}

proptest! {
    #[test]
    fn wedge_matches_subset_enumeration((a, b) in pair()) {
        let fast = a.wedge(&b);
        let slow = naive_wedge(&a, &b);
        prop_assert_eq!(fast.deg, slow.deg);
        prop_assert!(fast.sub(&slow).max_abs() < 1e-12);
    }

    #[test]
    fn interior_matches_subset_enumeration((a, beta) in positive()) {
        prop_assert!(a.interior(beta).sub(&naive_interior(&a, beta)).max_abs() < 1e-12);
    }

    #[test]
    fn wedge_is_associative((a, b) in pair(), seed in any::<u64>()) {
        let dim = a.dim;
        let mut g = shla::sampling::rng(seed);
        let deg = (seed as usize) % (dim + 1);
        let c = Form { deg, dim, c: (0..binomial(dim, deg)).map(|_| shla::sampling::uniform(&mut g, -1.0, 1.0)).collect() };
        let lhs = a.wedge(&b).wedge(&c);
        let rhs = a.wedge(&b.wedge(&c));
        prop_assert!(lhs.sub(&rhs).max_abs() < 1e-10);
    }
}

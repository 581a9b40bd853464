//! Seeded random charts, splittings and forms: trigonometric polynomials of
//! low degree with coefficients in `[−1/2, 1/2]`, rounded to three decimals
//! so they print compactly.

use crate::chart::{darboux, torus_chart, ChartSpec};
use crate::expr::Expr;
use crate::form::{binomial, Form};
use crate::leafform::LeafForm;
use crate::sampling::{rng, uniform};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn coeff(g: &mut ChaCha8Rng, lo: f64, hi: f64) -> Expr {
    Expr::frac((uniform(g, lo, hi) * 1000.0).round() as i64, 1000)
}

/// `Σ c sin/cos(2π n·x)` with `Σ|n_a| <= max_deg`.
pub fn trig_poly(g: &mut ChaCha8Rng, vars: &[&str], max_deg: i64, terms: usize) -> Expr {
    let mut out = Expr::zero();
    for _ in 0..terms {
        let n: Vec<i64> = loop {
            let n: Vec<i64> = vars.iter().map(|_| g.random_range(-max_deg..=max_deg)).collect();
            let tot: i64 = n.iter().map(|x| x.abs()).sum();
            if tot <= max_deg {
                break n;
            }
        };
        let mut arg = Expr::zero();
        for (v, &k) in vars.iter().zip(&n) {
            if k != 0 {
                arg = arg + Expr::int(k) * Expr::var(v);
            }
        }
        let phase = Expr::int(2) * Expr::pi() * arg;
        let f = if g.random_bool(0.5) { phase.sin() } else { phase.cos() };
        out = out + coeff(g, -0.5, 0.5) * f;
    }
    out
}

/// Random splitting table `R_i^alpha` over all chart coordinates.
pub fn splitting(chart: &ChartSpec, seed: u64) -> Vec<Vec<Expr>> {
    let mut g = rng(seed);
    let vars = chart.coord_refs();
    (0..chart.k2()).map(|_| (0..chart.r).map(|_| trig_poly(&mut g, &vars, 2, 2)).collect()).collect()
}

/// Torus chart with `omega_12 = 1 + c sin(2π y1)` (`k = 1`) or Darboux
/// `omega` (`k > 1`) and a random curved splitting.
pub fn curved_chart(k: usize, r: usize, seed: u64) -> ChartSpec {
    let mut g = rng(seed ^ 0x5eed);
    let omega = if k == 1 {
        let c = coeff(&mut g, -0.3, 0.3);
        let w = Expr::one() + c * (Expr::int(2) * Expr::pi() * Expr::var("y1")).sin();
        vec![vec![Expr::zero(), w.clone()], vec![-w, Expr::zero()]]
    } else {
        darboux(k, Expr::one())
    };
    let base = torus_chart(&format!("random-{seed}"), k, r, omega, vec![vec![Expr::zero(); r]; 2 * k]);
    let split = splitting(&base, seed);
    base.with_splitting(split)
}

/// Random leafwise form of degree `deg` over all chart coordinates.
pub fn form(chart: &ChartSpec, deg: usize, terms: usize, seed: u64) -> LeafForm {
    let mut g = rng(seed);
    let vars = chart.coord_refs();
    Form { deg, dim: chart.r, c: (0..binomial(chart.r, deg)).map(|_| trig_poly(&mut g, &vars, 2, terms)).collect() }
}

/// Random leafwise form whose coefficients depend on the listed variables only.
pub fn form_in(vars: &[&str], r: usize, deg: usize, terms: usize, seed: u64) -> LeafForm {
    let mut g = rng(seed);
    Form { deg, dim: r, c: (0..binomial(r, deg)).map(|_| trig_poly(&mut g, vars, 2, terms)).collect() }
}

/// Input degrees for an arity-`n` L∞ test whose relation has degree at
/// most `r`, so it is not trivially zero. Arity `>= 3` uses degrees `>= 1`.
pub fn linfty_degrees(g: &mut ChaCha8Rng, n: usize, r: usize) -> Vec<usize> {
    let lo = if n >= 3 { 1 } else { 0 };
    let budget = (r + n).saturating_sub(3);
    if lo * n > budget {
        return vec![lo; n];
    }
    loop {
        let d: Vec<usize> = (0..n).map(|_| g.random_range(lo..=r)).collect();
        if d.iter().sum::<usize>() <= budget {
            return d;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible_and_valid() {
        let a = curved_chart(1, 2, 3);
        let b = curved_chart(1, 2, 3);
        assert_eq!(a.split[0][1].to_string(), b.split[0][1].to_string());
        a.validate(64, 7).unwrap();
        let f = form(&a, 1, 3, 9);
        assert_eq!(f.c.len(), 2);
    }
}

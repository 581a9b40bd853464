//! Structure maps `m_1, m_2, m_l` of the homotopy Lie algebroid on leafwise
//! forms, and the L∞ relations.
//!
//! Shifted degree is `deg − 1`. With `A_m = −Σ_beta (F^beta ω^{-1}) ι_beta x_m`,
//!
//! ```text
//! T(x_1..x_l) = ½ (−1)^{Σ_{a<b} |x_a|'|x_b|' + |x_l|'}
//!               Σ_{ij} ∇_i x_1 ∧ (ω^{-1} A_2 ⋯ A_{l−1})_{ij} ∧ ∇_j x_l
//! m_l(x)      = Σ_{σ ∈ S_l} ε(σ) T(x_σ)
//! ```
//!
//! where `ε` is the Koszul sign on shifted degrees. For `l = 2` this is
//! `(−1)^{|x_1|(|x_2|+1)} Σ_{ij} ω^{ij} ∇_i x_1 ∧ ∇_j x_2`.

use crate::chart::ChartSpec;
use crate::expr::Expr;
use crate::foliation::{transverse_curvature, TransverseField};
use crate::form::{permutations, Coeff, Form};
use crate::leafform::{d_f_total, nabla, omega_inverse, FormError, FormTape, LeafForm};

#[derive(Debug, thiserror::Error)]
pub enum AlgebroidError {
    #[error("m_{arity}: input {slot} has degree 0, which the curvature contraction does not accept")]
    UnsupportedInput { arity: usize, slot: usize },
    #[error("arity {0} exceeds the context maximum {1}")]
    Arity(usize, usize),
    #[error("degree {0} exceeds leaf dimension {1}")]
    DegreeOverflow(usize, usize),
    #[error(transparent)]
    Form(#[from] FormError),
}

/// Transverse data needed by the chain formula, over any coefficient ring.
pub trait Frame {
    type C: Coeff;
    fn k2(&self) -> usize;
    fn r(&self) -> usize;
    /// `ω^{ij}`.
    fn winv(&self, i: usize, j: usize) -> Self::C;
    /// `(F^beta ω^{-1})_{ij}`.
    fn fsharp(&self, beta: usize, i: usize, j: usize) -> Self::C;
}

/// A structure-map argument: its value and its covariant derivatives.
#[derive(Clone, Debug)]
pub struct Arg<C> {
    pub value: Form<C>,
    pub nabla: Vec<Form<C>>,
}

impl<C: Coeff> Arg<C> {
    pub fn deg(&self) -> usize {
        self.value.deg
    }
}

fn shifted(d: usize) -> i64 {
    d as i64 - 1
}

fn parity(n: i64) -> i32 {
    if n.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Koszul sign of listing `degs` in the order `perm` (shifted degrees).
pub fn koszul_sign(degs: &[usize], perm: &[usize]) -> i32 {
    let mut e = 0i64;
    for a in 0..perm.len() {
        for b in a + 1..perm.len() {
            if perm[a] > perm[b] {
                e += shifted(degs[perm[a]]) * shifted(degs[perm[b]]);
            }
        }
    }
    parity(e)
}

/// Output degree of `m_l` on inputs of the given degrees.
pub fn output_degree(degs: &[usize]) -> usize {
    (degs.iter().sum::<usize>() + 2).saturating_sub(degs.len())
}

/// The single chain term `T(x_1..x_l)`, `l >= 2`.
pub fn chain_term<Fr: Frame>(fr: &Fr, xs: &[&Arg<Fr::C>]) -> Form<Fr::C> {
    let l = xs.len();
    assert!(l >= 2);
    let (k2, r) = (fr.k2(), fr.r());
    let degs: Vec<usize> = xs.iter().map(|x| x.deg()).collect();
    let out_deg = output_degree(&degs);
    if out_deg > r {
        return Form::zero(r, out_deg);
    }
    let mut e = 0i64;
    for a in 0..l {
        for b in a + 1..l {
            e += shifted(degs[a]) * shifted(degs[b]);
        }
    }
    e += shifted(degs[l - 1]);
    let sign = parity(e);

    let first = xs[0];
    let mut v: Vec<Form<Fr::C>> = (0..k2)
        .map(|j| {
            let mut acc = Form::zero(r, first.deg());
            for i in 0..k2 {
                let w = fr.winv(i, j);
                if w.is_zero() || first.nabla[i].is_zero() {
                    continue;
                }
                acc = acc.add(&first.nabla[i].map(|c| c.mul(&w)));
            }
            acc
        })
        .collect();
    for x in &xs[1..l - 1] {
        let iotas: Vec<Form<Fr::C>> = (0..r).map(|b| x.value.interior(b)).collect();
        let deg = v[0].deg + x.deg() - 1;
        let mut next = vec![Form::zero(r, deg); k2];
        for a in 0..k2 {
            if v[a].is_zero() {
                continue;
            }
            for (b, ib) in iotas.iter().enumerate() {
                if ib.is_zero() {
                    continue;
                }
                let vi = v[a].wedge(ib);
                if vi.is_zero() {
                    continue;
                }
                for j in 0..k2 {
                    let s = fr.fsharp(b, a, j);
                    if s.is_zero() {
                        continue;
                    }
                    next[j] = next[j].sub(&vi.map(|c| c.mul(&s)));
                }
            }
        }
        v = next;
    }
    let last = xs[l - 1];
    let mut out = Form::zero(r, out_deg);
    for j in 0..k2 {
        if v[j].is_zero() || last.nabla[j].is_zero() {
            continue;
        }
        out = out.add(&v[j].wedge(&last.nabla[j]));
    }
    let half = Fr::C::ratio(sign as i64, 2);
    out.map(|c| c.mul(&half))
}

/// `m_l` for `l >= 2` as the Koszul-signed permutation sum of chain terms.
pub fn m_ell_args<Fr: Frame>(fr: &Fr, xs: &[&Arg<Fr::C>]) -> Result<Form<Fr::C>, AlgebroidError> {
    let l = xs.len();
    assert!(l >= 2);
    if l >= 3 {
        if let Some(slot) = xs.iter().position(|x| x.deg() == 0) {
            return Err(AlgebroidError::UnsupportedInput { arity: l, slot });
        }
    }
    let degs: Vec<usize> = xs.iter().map(|x| x.deg()).collect();
    let out_deg = output_degree(&degs);
    let mut out = Form::zero(fr.r(), out_deg);
    if out_deg > fr.r() {
        return Ok(out);
    }
    for (perm, _) in permutations(l) {
        let s = koszul_sign(&degs, &perm);
        let ys: Vec<&Arg<Fr::C>> = perm.iter().map(|&p| xs[p]).collect();
        let t = chain_term(fr, &ys);
        out = if s > 0 { out.add(&t) } else { out.sub(&t) };
    }
    Ok(out)
}

/// `(1/l!) m_l(x, .., x)` for a degree-1 argument. All shifted degrees
/// vanish, so every permutation contributes the same chain term.
pub fn symmetric_term<Fr: Frame>(fr: &Fr, x: &Arg<Fr::C>, l: usize) -> Form<Fr::C> {
    assert_eq!(x.deg(), 1, "symmetric powers are taken of degree-1 elements");
    let xs: Vec<&Arg<Fr::C>> = vec![x; l];
    chain_term(fr, &xs)
}

/// Symbolic context on a chart.
#[derive(Clone, Debug)]
pub struct LInftyContext {
    pub chart: ChartSpec,
    pub curvature: TransverseField,
    pub winv: Vec<Vec<Expr>>,
    pub fsharp: Vec<Vec<Vec<Expr>>>,
    pub max_arity: usize,
}

impl LInftyContext {
    pub fn new(chart: &ChartSpec, max_arity: usize) -> Result<LInftyContext, AlgebroidError> {
        let f = transverse_curvature(chart);
        LInftyContext::with_curvature(chart, f, max_arity)
    }

    /// Context with an explicit curvature field (used to force `F = 0`).
    pub fn with_curvature(chart: &ChartSpec, f: TransverseField, max_arity: usize) -> Result<LInftyContext, AlgebroidError> {
        let winv = omega_inverse(chart)?;
        let k2 = chart.k2();
        let fsharp = (0..chart.r)
            .map(|b| {
                (0..k2)
                    .map(|i| {
                        (0..k2)
                            .map(|j| {
                                let mut acc = Expr::zero();
                                for m in 0..k2 {
                                    acc = acc + f.get(b, &[i, m]) * &winv[m][j];
                                }
                                acc
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Ok(LInftyContext { chart: chart.clone(), curvature: f, winv, fsharp, max_arity: max_arity.max(2) })
    }

    pub fn arg(&self, x: &LeafForm) -> Arg<Expr> {
        Arg { value: x.clone(), nabla: (0..self.chart.k2()).map(|i| nabla(&self.chart, x, i)).collect() }
    }

    pub fn m1(&self, x: &LeafForm) -> Result<LeafForm, AlgebroidError> {
        if x.deg >= self.chart.r {
            return Err(AlgebroidError::DegreeOverflow(x.deg + 1, self.chart.r));
        }
        Ok(self.m1_total(x))
    }

    fn m1_total(&self, x: &LeafForm) -> LeafForm {
        d_f_total(&self.chart, x).scale_sign(if x.deg % 2 == 0 { 1 } else { -1 })
    }

    /// `m_2(a,b) = (−1)^{|a|(|b|+1)} Σ_{ij} ω^{ij} ∇_i a ∧ ∇_j b`.
    pub fn m2(&self, a: &LeafForm, b: &LeafForm) -> LeafForm {
        let k2 = self.chart.k2();
        let r = self.chart.r;
        let na: Vec<LeafForm> = (0..k2).map(|i| nabla(&self.chart, a, i)).collect();
        let nb: Vec<LeafForm> = (0..k2).map(|i| nabla(&self.chart, b, i)).collect();
        let mut out = Form::zero(r, a.deg + b.deg);
        if a.deg + b.deg > r {
            return out;
        }
        for i in 0..k2 {
            for j in 0..k2 {
                if self.winv[i][j].is_zero() {
                    continue;
                }
                let t = na[i].wedge(&nb[j]);
                if !t.is_zero() {
                    out = out.add(&t.scale(&self.winv[i][j]));
                }
            }
        }
        out.scale_sign(if (a.deg * (b.deg + 1)) % 2 == 0 { 1 } else { -1 })
    }

    /// `m_l` for any `l >= 1`.
    pub fn m_ell(&self, xs: &[&LeafForm]) -> Result<LeafForm, AlgebroidError> {
        match xs.len() {
            0 => panic!("m_0 is not part of the structure"),
            1 => Ok(self.m1_total(xs[0])),
            2 => Ok(self.m2(xs[0], xs[1])),
            l => {
                if l > self.max_arity {
                    return Err(AlgebroidError::Arity(l, self.max_arity));
                }
                let args: Vec<Arg<Expr>> = xs.iter().map(|x| self.arg(x)).collect();
                let refs: Vec<&Arg<Expr>> = args.iter().collect();
                m_ell_args(self, &refs)
            }
        }
    }

    /// Left side of the arity-`n` L∞ relation on the given inputs.
    pub fn linfty_relation(&self, xs: &[&LeafForm]) -> Result<LeafForm, AlgebroidError> {
        let n = xs.len();
        let degs: Vec<usize> = xs.iter().map(|x| x.deg).collect();
        let out_deg = output_degree(&degs) + 1;
        let r = self.chart.r;
        let mut total = Form::zero(r, out_deg);
        for i in 1..=n {
            for (front, back) in unshuffles(n, i) {
                let inner: Vec<&LeafForm> = front.iter().map(|&a| xs[a]).collect();
                let inner_val = self.m_ell(&inner)?;
                if inner_val.deg > r {
                    continue;
                }
                let ks = koszul_sign(&degs, &front.iter().chain(back.iter()).copied().collect::<Vec<_>>());
                let mut outer: Vec<&LeafForm> = vec![&inner_val];
                outer.extend(back.iter().map(|&a| xs[a]));
                let v = self.m_ell(&outer)?;
                if v.deg != out_deg {
                    continue;
                }
                total = if ks > 0 { total.add(&v) } else { total.sub(&v) };
            }
        }
        Ok(total)
    }

    /// Maximum over `npts` sample points of the arity-`n` L∞ relation.
    pub fn linfty_residual(&self, xs: &[&LeafForm], npts: usize, seed: u64) -> Result<f64, AlgebroidError> {
        let rel = self.linfty_relation(xs)?;
        if rel.deg > self.chart.r {
            return Ok(0.0);
        }
        let pts = self.chart.sample(npts, seed);
        let t = FormTape::new(&self.chart, &[&rel]);
        let mut s = Vec::new();
        Ok(pts.iter().map(|p| t.eval(p, &mut s)[0].max_abs()).fold(0.0, f64::max))
    }
}

impl Frame for LInftyContext {
    type C = Expr;
    fn k2(&self) -> usize {
        self.chart.k2()
    }
    fn r(&self) -> usize {
        self.chart.r
    }
    fn winv(&self, i: usize, j: usize) -> Expr {
        self.winv[i][j].clone()
    }
    fn fsharp(&self, beta: usize, i: usize, j: usize) -> Expr {
        self.fsharp[beta][i][j].clone()
    }
}

/// `(i, n−i)` unshuffles: increasing `front` of size `i`, increasing `back`.
pub fn unshuffles(n: usize, i: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    crate::form::subsets(n, i)
        .into_iter()
        .map(|front| {
            let back: Vec<usize> = (0..n).filter(|x| !front.contains(x)).collect();
            (front, back)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::{builtin_flat_torus, darboux, torus_chart};
    use crate::expr::parse;
    use crate::leafform::{max_abs, one_form};

    fn e(s: &str) -> Expr {
        parse(s).unwrap()
    }

    fn curved() -> ChartSpec {
        torus_chart(
            "curved",
            1,
            2,
            vec![vec![e("0"), e("1 + 0.2*sin(2*pi*y1)")], vec![e("-(1 + 0.2*sin(2*pi*y1))"), e("0")]],
            vec![
                vec![e("0.3*sin(2*pi*(q1 + y2))"), e("0.2*cos(2*pi*(q2 - y1))")],
                vec![e("0.1*cos(2*pi*q1)*sin(2*pi*y1)"), e("0.25*sin(2*pi*(q1 + q2))")],
            ],
        )
    }

    #[test]
    fn flat_torus_bracket_example() {
        let c = builtin_flat_torus();
        let ctx = LInftyContext::new(&c, 3).unwrap();
        let g = one_form(&["sin(2*pi*y1)*cos(2*pi*y2)", "cos(2*pi*y1) + sin(2*pi*y2)"]);
        let m = ctx.m2(&g, &g);
        let a1 = &g.c[0];
        let a2 = &g.c[1];
        let br = a1.diff("y2") * a2.diff("y1") - a2.diff("y2") * a1.diff("y1");
        let want: LeafForm = Form { deg: 2, dim: 2, c: vec![Expr::int(2) * br] };
        assert!(max_abs(&c, &m.sub(&want), &c.sample(30, 4)) < 1e-12);
    }

    #[test]
    fn m1_sign_and_square() {
        let c = curved();
        let ctx = LInftyContext::new(&c, 3).unwrap();
        let x = one_form(&["sin(2*pi*q2)*y1", "cos(2*pi*(q1 + y2))"]);
        let m = ctx.m1(&x).unwrap();
        let d = d_f_total(&c, &x);
        assert!(max_abs(&c, &m.add(&d), &c.sample(10, 1)) < 1e-14);
        assert!(ctx.m1(&m).is_err());
    }

    #[test]
    fn higher_maps_vanish_when_flat() {
        let c = builtin_flat_torus();
        let ctx = LInftyContext::new(&c, 4).unwrap();
        let x = one_form(&["sin(2*pi*q1)", "y1"]);
        let y = one_form(&["q2", "cos(2*pi*y2)"]);
        let m3 = ctx.m_ell(&[&x, &y, &x]).unwrap();
        assert!(m3.is_zero());
    }

    #[test]
    fn degree_zero_rejected_for_higher_arity() {
        let c = curved();
        let ctx = LInftyContext::new(&c, 3).unwrap();
        let f: LeafForm = Form::scalar(2, e("y1"));
        let x = one_form(&["q1", "q2"]);
        assert!(matches!(ctx.m_ell(&[&x, &f, &x]), Err(AlgebroidError::UnsupportedInput { arity: 3, slot: 1 })));
        assert!(ctx.m_ell(&[&x, &f]).is_ok());
    }

    #[test]
    fn m3_symmetric_on_degree_one() {
        let c = curved();
        let ctx = LInftyContext::new(&c, 3).unwrap();
        let x = one_form(&["sin(2*pi*q1)", "y1*cos(2*pi*q2)"]);
        let y = one_form(&["q2*0 + cos(2*pi*y2)", "sin(2*pi*(q1 - y1))"]);
        let z = one_form(&["0.5", "sin(2*pi*q2)"]);
        let a = ctx.m_ell(&[&x, &y, &z]).unwrap();
        let b = ctx.m_ell(&[&y, &x, &z]).unwrap();
        assert!(max_abs(&c, &a.sub(&b), &c.sample(10, 3)) < 1e-12);
        assert!(max_abs(&c, &a, &c.sample(10, 3)) > 1e-6);
    }

    #[test]
    fn leibniz_flat_degree_mix() {
        let c = torus_chart("flat3", 1, 3, darboux(1, Expr::one()), vec![vec![Expr::zero(); 3]; 2]);
        let ctx = LInftyContext::new(&c, 3).unwrap();
        let x = one_form(&["sin(2*pi*(q1 + y1))", "y2*cos(2*pi*q3)", "cos(2*pi*q2)"]);
        let y: LeafForm = Form::from_fn(3, 0, |_| e("sin(2*pi*(y2 - q1))*cos(2*pi*q3)"));
        let res = ctx.linfty_residual(&[&x, &y], 20, 1).unwrap();
        assert!(res < 1e-9, "{res}");
    }
}

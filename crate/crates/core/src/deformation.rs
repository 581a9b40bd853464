//! Kuranishi map, fiber integration and the order-by-order Maurer-Cartan
//! solver.
//!
//! A deformation is a formal series `Γ = Σ_k ε^k Γ_k` of degree-1 leafwise
//! forms. Order `k` of `Σ_l (1/l!) m_l(Γ, .., Γ) = 0` reads
//! `d_F Γ_k = [ε^k] Σ_{l>=2} (1/l!) m_l(Γ_{<k}, .., Γ_{<k})`. The right side is
//! assembled pointwise on the spectral grid with truncated power series
//! coefficients and inverted fiberwise.

use crate::algebroid::{symmetric_term, AlgebroidError, Arg, Frame, LInftyContext};
use crate::chart::{ChartSpec, Point};
use crate::form::{Coeff, Form};
use crate::leafform::{d_f_total, FormTape, LeafForm};
use crate::pointdata::{ChartData, ChartEval};
use crate::spectral::{fiber_average, to_spectral_on, Grid, SpectralError, SpectralForm};
use nalgebra::DMatrix;

/// Highest order a [`Series`] carries.
pub const MAX_ORDER: usize = 8;

#[derive(Debug, thiserror::Error)]
pub enum DeformationError {
    #[error("Γ1 is not d_F-closed (residual {0:e})")]
    NotClosed(f64),
    #[error("Γ must have degree 1, got {0}")]
    Degree(usize),
    #[error("order {0} exceeds the series capacity {MAX_ORDER}")]
    Order(usize),
    #[error(
        "order-{order} right-hand side is not d_F-closed (residual {residual:e}); the L∞ relations guarantee closedness, so this signals a sign or normalisation error in the implementation"
    )]
    UnclosedOrder { order: usize, residual: f64 },
    #[error("solved series misses the truncated equation by {0:e}; raise the truncation")]
    Uncertified(f64),
    #[error("Neumann series diverges: |F# Γ| = {0} >= 1")]
    Divergent(f64),
    #[error("chart has no periodic leaf coordinates, fiber integration is undefined")]
    NoFiber,
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Algebroid(#[from] AlgebroidError),
}

/// Truncated power series in `ε` up to [`MAX_ORDER`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Series {
    pub c: [f64; MAX_ORDER + 1],
}

impl Series {
    pub fn constant(x: f64) -> Series {
        let mut c = [0.0; MAX_ORDER + 1];
        c[0] = x;
        Series { c }
    }

    /// `x ε^k`.
    pub fn monomial(x: f64, k: usize) -> Series {
        let mut c = [0.0; MAX_ORDER + 1];
        c[k] = x;
        Series { c }
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.c[k]
    }
}

impl Coeff for Series {
    fn zero() -> Series {
        Series { c: [0.0; MAX_ORDER + 1] }
    }
    fn is_zero(&self) -> bool {
        self.c.iter().all(|x| *x == 0.0)
    }
    fn ratio(p: i64, q: i64) -> Series {
        Series::constant(p as f64 / q as f64)
    }
    fn add(&self, o: &Series) -> Series {
        let mut c = self.c;
        c.iter_mut().zip(&o.c).for_each(|(a, b)| *a += b);
        Series { c }
    }
    fn sub(&self, o: &Series) -> Series {
        let mut c = self.c;
        c.iter_mut().zip(&o.c).for_each(|(a, b)| *a -= b);
        Series { c }
    }
    fn mul(&self, o: &Series) -> Series {
        let mut c = [0.0; MAX_ORDER + 1];
        for (i, a) in self.c.iter().enumerate() {
            if *a == 0.0 {
                continue;
            }
            for (j, b) in o.c[..=MAX_ORDER - i].iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Series { c }
    }
    fn neg(&self) -> Series {
        let mut c = self.c;
        c.iter_mut().for_each(|a| *a = -*a);
        Series { c }
    }
    fn from_f64(x: f64) -> Series {
        Series::constant(x)
    }
}

/// Transverse data at one point, lifted to coefficient ring `C`.
#[derive(Clone, Debug)]
pub struct PointFrame<C> {
    k2: usize,
    r: usize,
    winv: Vec<C>,
    fsharp: Vec<C>,
}

impl<C: Coeff> PointFrame<C> {
    pub fn new(cd: &ChartData) -> PointFrame<C> {
        let (k2, r) = (cd.k2, cd.r);
        let winv = (0..k2 * k2).map(|t| C::from_f64(cd.winv[(t / k2, t % k2)])).collect();
        let mut fsharp = Vec::with_capacity(r * k2 * k2);
        for b in 0..r {
            let m = &cd.curv[b] * &cd.winv;
            for i in 0..k2 {
                for j in 0..k2 {
                    fsharp.push(C::from_f64(m[(i, j)]));
                }
            }
        }
        PointFrame { k2, r, winv, fsharp }
    }
}

impl<C: Coeff> Frame for PointFrame<C> {
    type C = C;
    fn k2(&self) -> usize {
        self.k2
    }
    fn r(&self) -> usize {
        self.r
    }
    fn winv(&self, i: usize, j: usize) -> C {
        self.winv[i * self.k2 + j].clone()
    }
    fn fsharp(&self, beta: usize, i: usize, j: usize) -> C {
        self.fsharp[(beta * self.k2 + i) * self.k2 + j].clone()
    }
}

/// Value and first partials of a leafwise form at a point.
#[derive(Clone, Debug)]
pub struct Jet<C> {
    pub value: Form<C>,
    pub dy: Vec<Form<C>>,
    pub dq: Vec<Form<C>>,
}

impl<C: Coeff> Jet<C> {
    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Jet<D> {
        Jet { value: self.value.map(&f), dy: self.dy.iter().map(|x| x.map(&f)).collect(), dq: self.dq.iter().map(|x| x.map(&f)).collect() }
    }

    pub fn add(&self, o: &Jet<C>) -> Jet<C> {
        Jet {
            value: self.value.add(&o.value),
            dy: self.dy.iter().zip(&o.dy).map(|(a, b)| a.add(b)).collect(),
            dq: self.dq.iter().zip(&o.dq).map(|(a, b)| a.add(b)).collect(),
        }
    }

    /// From `[value, ∂_{z_0}, ∂_{z_1}, ..]` over chart coordinates.
    pub fn from_partials(k2: usize, mut parts: Vec<Form<C>>) -> Jet<C> {
        let dq = parts.split_off(1 + k2);
        let dy = parts.split_off(1);
        Jet { value: parts.pop().expect("value"), dy, dq }
    }
}

/// `∇_i` of a form from its jet:
/// `Y_i(ξ_I) f^I + Σ_{alpha,beta} ∂_alpha R_i^beta f^alpha ∧ ι_beta ξ`.
pub fn nabla_jet<C: Coeff>(cd: &ChartData, jet: &Jet<C>, i: usize) -> Form<C> {
    let r = cd.r;
    let mut out = jet.dy[i].clone();
    for (g, dq) in jet.dq.iter().enumerate() {
        let rg = cd.split[i][g];
        if rg != 0.0 {
            out = out.add(&dq.scale(&C::from_f64(rg)));
        }
    }
    if jet.value.deg == 0 {
        return out;
    }
    for b in 0..r {
        let ib = jet.value.interior(b);
        if ib.is_zero() {
            continue;
        }
        for a in 0..r {
            let c = cd.dsplit[i][b][a];
            if c != 0.0 {
                out = out.add(&Form::basis1(r, a).wedge(&ib).scale(&C::from_f64(c)));
            }
        }
    }
    out
}

pub fn arg_from_jet<C: Coeff>(cd: &ChartData, jet: &Jet<C>) -> Arg<C> {
    Arg { value: jet.value.clone(), nabla: (0..cd.k2).map(|i| nabla_jet(cd, jet, i)).collect() }
}

/// `d_F ξ = Σ_beta f^beta ∧ ∂_beta ξ` from a jet.
pub fn d_f_jet<C: Coeff>(jet: &Jet<C>) -> Form<C> {
    let r = jet.value.dim;
    let mut out = Form::zero(r, jet.value.deg + 1);
    for (b, d) in jet.dq.iter().enumerate() {
        out = out.add(&Form::basis1(r, b).wedge(d));
    }
    out
}

/// `Σ_{l=1}^{lmax} (1/l!) m_l(x, .., x)` for a degree-1 jet.
pub fn mc_sum<C: Coeff>(cd: &ChartData, jet: &Jet<C>, lmax: usize) -> Form<C> {
    let fr = PointFrame::<C>::new(cd);
    let arg = arg_from_jet(cd, jet);
    let mut out = d_f_jet(jet).neg();
    for l in 2..=lmax {
        out = out.add(&symmetric_term(&fr, &arg, l));
    }
    out
}

/// Coefficients of one order of a deformation.
#[derive(Clone, Debug)]
pub enum Coefficients {
    Symbolic(LeafForm),
    Spectral(SpectralForm),
}

impl Coefficients {
    pub fn deg(&self) -> usize {
        match self {
            Coefficients::Symbolic(f) => f.deg,
            Coefficients::Spectral(s) => s.deg,
        }
    }
}

/// Compiled pointwise jet evaluator for [`Coefficients`].
pub enum JetEval<'a> {
    Symbolic { tape: FormTape, k2: usize },
    Spectral { form: &'a SpectralForm, modes: Vec<usize> },
}

impl<'a> JetEval<'a> {
    pub fn new(chart: &ChartSpec, c: &'a Coefficients) -> JetEval<'a> {
        match c {
            Coefficients::Symbolic(f) => {
                let mut forms = vec![f.clone()];
                for v in chart.coord_names() {
                    forms.push(f.map(|e| e.diff(&v)));
                }
                let refs: Vec<&LeafForm> = forms.iter().collect();
                JetEval::Symbolic { tape: FormTape::new(chart, &refs), k2: chart.k2() }
            }
            Coefficients::Spectral(s) => JetEval::Spectral { form: s, modes: s.active_modes() },
        }
    }

    pub fn at(&self, p: &Point, scratch: &mut Vec<f64>) -> Jet<f64> {
        match self {
            JetEval::Symbolic { tape, k2 } => Jet::from_partials(*k2, tape.eval(p, scratch)),
            JetEval::Spectral { form, modes } => Jet::from_partials(form.k2, form.jet_at_modes(&p.0, modes)),
        }
    }
}

/// `Σ_k ε^k Γ_k`, orders contiguous from 1.
#[derive(Clone, Debug)]
pub struct DeformationSeries {
    pub chart: ChartSpec,
    pub orders: Vec<Coefficients>,
    /// Truncated residual certified by the solver, if any.
    pub certified: Option<f64>,
}

impl DeformationSeries {
    pub fn new(chart: &ChartSpec, gamma1: LeafForm) -> DeformationSeries {
        DeformationSeries { chart: chart.clone(), orders: vec![Coefficients::Symbolic(gamma1)], certified: None }
    }

    pub fn order(&self) -> usize {
        self.orders.len()
    }

    pub fn push(&mut self, c: Coefficients) {
        self.orders.push(c);
        self.certified = None;
    }

    /// Largest coefficient of `Γ_k` (spectral orders) or at sample points.
    pub fn max_abs(&self, k: usize) -> f64 {
        match &self.orders[k - 1] {
            Coefficients::Spectral(s) => s.max_coeff(),
            Coefficients::Symbolic(f) => crate::leafform::max_abs(&self.chart, f, &self.chart.sample(64, 7)),
        }
    }
}

/// Failing order of the solver and the class it could not kill.
#[derive(Clone, Debug)]
pub struct ObstructionReport {
    pub order: usize,
    /// Order-`k` right-hand side `[ε^k] Σ_{l>=2} (1/l!) m_l(Γ^l)`.
    pub representative: SpectralForm,
    /// Its fiber average, a function of `y` times the leaf forms.
    pub profile: SpectralForm,
    /// `L²` norm of the profile.
    pub norm: f64,
    /// Maximum of the representative's `d_F` coefficients.
    pub closed_residual: f64,
}

impl ObstructionReport {
    /// Profile components at transverse point `y`.
    pub fn profile_at(&self, y: &[f64]) -> Vec<f64> {
        let mut x = y.to_vec();
        x.resize(self.profile.grid.dim(), 0.0);
        self.profile.eval_at(&x).c
    }
}

#[derive(Clone, Debug)]
pub enum McOutcome {
    Solved(DeformationSeries),
    Obstructed(ObstructionReport),
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub order: usize,
    pub trunc: usize,
    /// Fiber-average norm above which a class counts as an obstruction.
    pub tol: f64,
    /// Allowed `d_F` residual of each right-hand side.
    pub closed_tol: f64,
    /// Sample points for the final certificate.
    pub certify_points: usize,
    pub seed: u64,
}

impl Default for SolveOptions {
    fn default() -> SolveOptions {
        SolveOptions { order: 4, trunc: 16, tol: 1e-10, closed_tol: 1e-9, certify_points: 64, seed: crate::sampling::DEFAULT_SEED }
    }
}

fn check_closed(chart: &ChartSpec, gamma: &LeafForm) -> Result<(), DeformationError> {
    if gamma.deg != 1 {
        return Err(DeformationError::Degree(gamma.deg));
    }
    if gamma.deg < chart.r {
        let res = crate::leafform::max_abs(chart, &d_f_total(chart, gamma), &chart.sample(64, 7));
        if !(res < 1e-10) {
            return Err(DeformationError::NotClosed(res));
        }
    }
    Ok(())
}

/// Kuranishi representative `½ m_2(Γ1, Γ1)`, the order-2 right-hand side of
/// the Maurer-Cartan equation.
pub fn kuranishi(chart: &ChartSpec, gamma1: &LeafForm) -> Result<LeafForm, DeformationError> {
    check_closed(chart, gamma1)?;
    let ctx = LInftyContext::new(chart, 2)?;
    let m = ctx.m2(gamma1, gamma1);
    Ok(m.scale(&crate::expr::Expr::frac(1, 2)))
}

/// Transverse evaluation grid: `g` nodes per `y` coordinate, at `j T / g` for
/// periodic coordinates and at cell midpoints of the domain otherwise.
pub fn y_grid(chart: &ChartSpec, g: usize) -> Vec<Vec<f64>> {
    let k2 = chart.k2();
    let axes: Vec<Vec<f64>> = (0..k2)
        .map(|a| match chart.periods[a] {
            Some(t) => (0..g).map(|j| t * j as f64 / g as f64).collect(),
            None => {
                let (lo, hi) = chart.domain[a];
                (0..g).map(|j| lo + (hi - lo) * (j as f64 + 0.5) / g as f64).collect()
            }
        })
        .collect();
    let mut out = vec![vec![]];
    for ax in &axes {
        out = out.iter().flat_map(|p| ax.iter().map(move |&x| [p.clone(), vec![x]].concat())).collect();
    }
    out
}

/// Class profile on a transverse grid: rows `(y, fiber averages)`.
#[derive(Clone, Debug)]
pub struct Profile {
    pub y_names: Vec<String>,
    pub comps: Vec<String>,
    pub rows: Vec<(Vec<f64>, Vec<f64>)>,
}

impl Profile {
    pub fn max_abs(&self) -> f64 {
        self.rows.iter().flat_map(|(_, v)| v.iter()).fold(0.0, |m, x| m.max(x.abs()))
    }

    /// CSV with a header naming columns; values are dimensionless.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let head: Vec<String> = self.y_names.iter().cloned().chain(self.comps.iter().map(|c| format!("profile_{c}"))).collect();
        s.push_str(&head.join(","));
        s.push('\n');
        for (y, v) in &self.rows {
            let cells: Vec<String> = y.iter().chain(v.iter()).map(|x| format!("{x:.17e}")).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }
}

fn comp_names(r: usize, deg: usize) -> Vec<String> {
    crate::form::subsets(r, deg).iter().map(|i| i.iter().map(|a| (a + 1).to_string()).collect()).collect()
}

/// Fiber average of a leafwise form over the leaf torus, on a `g`-node
/// transverse grid, using `2 nq + 1` quadrature nodes per leaf coordinate.
pub fn fiber_profile(chart: &ChartSpec, form: &LeafForm, g: usize, nq: usize) -> Result<Profile, DeformationError> {
    if !chart.q_periodic() {
        return Err(DeformationError::NoFiber);
    }
    let tape = FormTape::new(chart, &[form]);
    let rows = y_grid(chart, g)
        .into_iter()
        .map(|y| {
            let v = fiber_average(chart, &tape, &y, nq)?;
            Ok((y, v))
        })
        .collect::<Result<Vec<_>, DeformationError>>()?;
    Ok(Profile { y_names: chart.y.clone(), comps: comp_names(chart.r, form.deg), rows })
}

struct GridJets {
    /// `parts[a][comp][node]`: value (`a = 0`) and partials.
    parts: Vec<Vec<Vec<f64>>>,
}

impl GridJets {
    fn new(s: &SpectralForm) -> GridJets {
        let mut parts = vec![s.to_grid()];
        for a in 0..s.grid.dim() {
            parts.push(s.derivative(a).to_grid());
        }
        GridJets { parts }
    }

    fn jet(&self, k2: usize, r: usize, node: usize, order: usize) -> Jet<Series> {
        let parts = self
            .parts
            .iter()
            .map(|p| Form { deg: 1, dim: r, c: p.iter().map(|v| Series::monomial(v[node], order)).collect() })
            .collect();
        Jet::from_partials(k2, parts)
    }
}

/// Order-`k` right-hand side on the grid, `[comp][node]`.
fn rhs_on_grid(chart: &ChartSpec, grid: &Grid, ce: &ChartEval, jets: &[GridJets], k: usize) -> Vec<Vec<f64>> {
    let (k2, r) = (chart.k2(), chart.r);
    let ncomp = crate::form::binomial(r, 2);
    let mut out = vec![vec![0.0; grid.len()]; ncomp];
    if ncomp == 0 {
        return out;
    }
    let mut scratch = Vec::new();
    for node in 0..grid.len() {
        let x = grid.point(node);
        let cd = ce.at_with(&x.0, &mut scratch);
        let mut jet = jets[0].jet(k2, r, node, 1);
        for (j, gj) in jets.iter().enumerate().skip(1) {
            jet = jet.add(&gj.jet(k2, r, node, j + 1));
        }
        let fr = PointFrame::<Series>::new(&cd);
        let arg = arg_from_jet(&cd, &jet);
        let mut acc: Form<Series> = Form::zero(r, 2);
        for l in 2..=k {
            acc = acc.add(&symmetric_term(&fr, &arg, l));
        }
        for (comp, v) in acc.c.iter().enumerate() {
            out[comp][node] = v.coeff(k);
        }
    }
    out
}

/// Solve the Maurer-Cartan equation order by order on a torus chart.
pub fn mc_solve(chart: &ChartSpec, gamma1: &LeafForm, opts: &SolveOptions) -> Result<McOutcome, DeformationError> {
    if opts.order > MAX_ORDER {
        return Err(DeformationError::Order(opts.order));
    }
    check_closed(chart, gamma1)?;
    let grid = Grid::adapted(chart, opts.trunc, &[gamma1])?;
    let ce = ChartEval::new(chart);
    let mut series = DeformationSeries::new(chart, gamma1.clone());
    let g1 = to_spectral_on(chart, gamma1, grid.clone())?;
    let mut jets = vec![GridJets::new(&g1)];
    for k in 2..=opts.order {
        let rhs = rhs_on_grid(chart, &grid, &ce, &jets, k);
        let rk = SpectralForm::from_grid(chart.k2(), chart.r, 2, grid.clone(), &rhs);
        let closed_residual = if 2 < chart.r { rk.d_f().max_coeff() } else { 0.0 };
        match rk.scale(-1.0).solve_df(opts.tol, opts.closed_tol) {
            Err(SpectralError::NotClosed(residual)) => return Err(DeformationError::UnclosedOrder { order: k, residual }),
            Err(e) => return Err(e.into()),
            Ok(Err(_)) => {
                let profile = rk.q_zero_mode();
                let norm = profile.l2_norm();
                return Ok(McOutcome::Obstructed(ObstructionReport { order: k, representative: rk, profile, norm, closed_residual }));
            }
            Ok(Ok(gk)) => {
                jets.push(GridJets::new(&gk));
                series.push(Coefficients::Spectral(gk));
            }
        }
    }
    let pts = chart.sample(opts.certify_points, opts.seed);
    let res = mc_residual(&series, opts.order, &pts);
    if !(res < 1e-9) {
        return Err(DeformationError::Uncertified(res));
    }
    series.certified = Some(res);
    Ok(McOutcome::Solved(series))
}

/// Max over points and orders `1..=order` of `[ε^k] Σ_l (1/l!) m_l(Γ^l)`.
pub fn mc_residual(series: &DeformationSeries, order: usize, pts: &[Point]) -> f64 {
    let order = order.min(MAX_ORDER);
    let chart = &series.chart;
    let ce = ChartEval::new(chart);
    let evals: Vec<JetEval> = series.orders.iter().take(order).map(|c| JetEval::new(chart, c)).collect();
    let mut scratch = Vec::new();
    let mut worst: f64 = 0.0;
    for p in pts {
        let cd = ce.at_with(&p.0, &mut scratch);
        let mut jet: Option<Jet<Series>> = None;
        for (j, ev) in evals.iter().enumerate() {
            let jj = ev.at(p, &mut scratch).map(|&v| Series::monomial(v, j + 1));
            jet = Some(match jet {
                None => jj,
                Some(a) => a.add(&jj),
            });
        }
        let Some(jet) = jet else { continue };
        let sum = mc_sum(&cd, &jet, order);
        for v in &sum.c {
            for k in 1..=order {
                worst = worst.max(v.coeff(k).abs());
            }
        }
    }
    worst
}

/// `Σ_l (1/l!) m_l(εΓ, .., εΓ)` at a point, summed until the Neumann tail
/// bound drops below `1e-12`.
pub fn twisted_m0_at(cd: &ChartData, jet: &Jet<f64>, eps: f64) -> Result<Form<f64>, DeformationError> {
    let x = jet.map(|v| v * eps);
    let fr = PointFrame::<f64>::new(cd);
    let arg = arg_from_jet(cd, &x);
    let (k2, r) = (cd.k2, cd.r);
    let mut a = DMatrix::zeros(k2, k2);
    for b in 0..r {
        a += &cd.curv[b] * &cd.winv * x.value.c[b];
    }
    let q = if k2 == 0 { 0.0 } else { a.singular_values().max() };
    if q >= 1.0 {
        return Err(DeformationError::Divergent(q));
    }
    let nb2: f64 = arg.nabla.iter().map(|f| f.c.iter().map(|v| v * v).sum::<f64>()).sum();
    let winv_norm = if k2 == 0 { 0.0 } else { cd.winv.singular_values().max() };
    let scale = nb2 * winv_norm;
    let mut out = d_f_jet(&x).neg();
    let mut l = 2;
    loop {
        out = out.add(&symmetric_term(&fr, &arg, l));
        let tail = scale * q.powi(l as i32 - 1) / (1.0 - q);
        if tail < 1e-12 || l >= 2000 {
            break;
        }
        l += 1;
    }
    Ok(out)
}

/// Max over points of the twisted `m_0` of `εΓ`.
pub fn twisted_m0_residual(chart: &ChartSpec, gamma: &LeafForm, eps: f64, pts: &[Point]) -> Result<f64, DeformationError> {
    if gamma.deg != 1 {
        return Err(DeformationError::Degree(gamma.deg));
    }
    let ce = ChartEval::new(chart);
    let c = Coefficients::Symbolic(gamma.clone());
    let ev = JetEval::new(chart, &c);
    let mut scratch = Vec::new();
    let mut worst: f64 = 0.0;
    for p in pts {
        let cd = ce.at_with(&p.0, &mut scratch);
        let jet = ev.at(p, &mut scratch);
        worst = worst.max(twisted_m0_at(&cd, &jet, eps)?.max_abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebroid::m_ell_args;
    use crate::chart::builtin_flat_torus;
    use crate::leafform::one_form;

    #[test]
    fn series_arithmetic() {
        let a = Series::monomial(2.0, 1).add(&Series::constant(1.0));
        let b = a.mul(&a);
        assert_eq!(&b.c[..4], &[1.0, 4.0, 4.0, 0.0]);
        let t = Series::monomial(1.0, 5).mul(&Series::monomial(1.0, 5));
        assert!(t.is_zero());
    }

    #[test]
    fn symmetric_term_is_normalised_sum() {
        let c = crate::randgen::curved_chart(1, 2, 5);
        let ce = ChartEval::new(&c);
        let g = crate::randgen::form(&c, 1, 2, 11);
        let coeffs = Coefficients::Symbolic(g);
        let ev = JetEval::new(&c, &coeffs);
        let p = &c.sample(3, 1)[2];
        let cd = ce.at(p);
        let jet = ev.at(p, &mut Vec::new());
        let fr = PointFrame::<f64>::new(&cd);
        let arg = arg_from_jet(&cd, &jet);
        for l in 2..=4usize {
            let full = m_ell_args(&fr, &vec![&arg; l]).unwrap();
            let fact: f64 = (1..=l).map(|x| x as f64).product();
            let sym = symmetric_term(&fr, &arg, l);
            assert!((&(&full * (1.0 / fact)) - &sym).max_abs() < 1e-12);
        }
    }

    #[test]
    fn flat_torus_kuranishi_profile() {
        let c = builtin_flat_torus();
        let g = one_form(&["sin(2*pi*y1)", "sin(2*pi*y2)"]);
        let kr = kuranishi(&c, &g).unwrap();
        let prof = fiber_profile(&c, &kr, 8, 2).unwrap();
        let four_pi2 = 4.0 * std::f64::consts::PI.powi(2);
        for (y, v) in &prof.rows {
            let want = -four_pi2 * (2.0 * std::f64::consts::PI * y[0]).cos() * (2.0 * std::f64::consts::PI * y[1]).cos();
            assert!((v[0] - want).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_series() {
        let c = builtin_flat_torus();
        let out = mc_solve(&c, &one_form(&["0", "0"]), &SolveOptions { order: 3, trunc: 2, ..Default::default() }).unwrap();
        let McOutcome::Solved(s) = out else { panic!("zero input is unobstructed") };
        assert_eq!(s.order(), 3);
        assert!(s.max_abs(2) == 0.0 && s.max_abs(3) == 0.0);
    }

    #[test]
    fn not_closed_rejected() {
        let c = builtin_flat_torus();
        assert!(matches!(kuranishi(&c, &one_form(&["sin(2*pi*q2)", "0"])), Err(DeformationError::NotClosed(_))));
    }
}

//! Independent verification layer. Everything here is assembled directly
//! from the chart expressions with its own index loops: the thickened form
//! `omega_U` on the dual of the null directions, graph coisotropy by
//! linear algebra, the nonlinear master equation, the pullback identities
//! and the flat pre-Hamiltonian extension.
//!
//! Coordinates on the thickening are `(y, q, p)`; a section `s` of the dual
//! of the null directions has graph `p_alpha = s_alpha(y, q)`.

pub mod grassmann;

use crate::chart::{ChartSpec, Point};
use crate::expr::{Expr, Tape};
use crate::form::{subsets, Form};
use crate::leafform::LeafForm;
use nalgebra::DMatrix;

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error("det(omega + p.F) = {det:e} at {point}: outside the validity radius")]
    Invalid { det: f64, point: String },
    #[error("graph frame has rank {rank} < {want} at {point}: chart data is invalid")]
    RankDeficient { rank: usize, want: usize, point: String },
    #[error("transverse curvature is not zero (max {0:e}); the extension needs a flat splitting")]
    NotFlat(f64),
    #[error("d(xi ⌟ omega) = {0:e}: the field is not locally pre-Hamiltonian")]
    NotPreHamiltonian(f64),
    #[error("section must be a degree-1 form with {0} components")]
    Shape(usize),
    #[error("grassmann dimension count {count} disagrees with the formula {formula} for (n, k) = ({n}, {k})")]
    DimensionMismatch { n: usize, k: usize, count: usize, formula: usize },
}

/// Step for oracle finite differences; one Richardson step on top.
pub const FD_STEP: f64 = 1e-4;

/// Richardson-extrapolated central difference of a vector-valued function.
pub fn richardson(f: &dyn Fn(&[f64]) -> Vec<f64>, x: &[f64], axis: usize, h: f64) -> Vec<f64> {
    let central = |h: f64| {
        let mut a = x.to_vec();
        let mut b = x.to_vec();
        a[axis] += h;
        b[axis] -= h;
        let (fa, fb) = (f(&a), f(&b));
        fa.iter().zip(&fb).map(|(u, v)| (u - v) / (2.0 * h)).collect::<Vec<f64>>()
    };
    let d1 = central(h);
    let d2 = central(h / 2.0);
    d1.iter().zip(&d2).map(|(a, b)| (4.0 * b - a) / 3.0).collect()
}

/// Chart data at a point, computed from the expressions alone.
#[derive(Clone, Debug)]
pub struct Geometry {
    pub k2: usize,
    pub r: usize,
    pub w: DMatrix<f64>,
    /// `split[i][alpha]`.
    pub split: Vec<Vec<f64>>,
    /// `dy[i][alpha][j] = ∂R_i^alpha / ∂y^j`.
    pub dy: Vec<Vec<Vec<f64>>>,
    /// `dq[i][alpha][g] = ∂R_i^alpha / ∂q^g`.
    pub dq: Vec<Vec<Vec<f64>>>,
    /// `curv[beta][(i, j)]`.
    pub curv: Vec<DMatrix<f64>>,
}

/// Compiled evaluator for [`Geometry`].
pub struct GeometryEval {
    k2: usize,
    r: usize,
    tape: Tape,
}

impl GeometryEval {
    pub fn new(chart: &ChartSpec) -> GeometryEval {
        let (k2, r) = (chart.k2(), chart.r);
        let mut es: Vec<Expr> = chart.omega.iter().flatten().cloned().collect();
        for i in 0..k2 {
            for a in 0..r {
                es.push(chart.split[i][a].clone());
            }
        }
        for i in 0..k2 {
            for a in 0..r {
                for v in chart.y.iter().chain(chart.q.iter()) {
                    es.push(chart.split[i][a].diff(v));
                }
            }
        }
        GeometryEval { k2, r, tape: Tape::compile(&es, &chart.coord_refs()).expect("chart symbols") }
    }

    pub fn at(&self, x: &[f64]) -> Geometry {
        let (k2, r) = (self.k2, self.r);
        let v = self.tape.eval(x);
        let w = DMatrix::from_row_slice(k2, k2, &v[..k2 * k2]);
        let mut o = k2 * k2;
        let mut split = vec![vec![0.0; r]; k2];
        for row in split.iter_mut() {
            for x in row.iter_mut() {
                *x = v[o];
                o += 1;
            }
        }
        let mut dy = vec![vec![vec![0.0; k2]; r]; k2];
        let mut dq = vec![vec![vec![0.0; r]; r]; k2];
        for i in 0..k2 {
            for a in 0..r {
                for j in 0..k2 {
                    dy[i][a][j] = v[o];
                    o += 1;
                }
                for g in 0..r {
                    dq[i][a][g] = v[o];
                    o += 1;
                }
            }
        }
        let curv = (0..r)
            .map(|b| {
                DMatrix::from_fn(k2, k2, |i, j| {
                    let mut f = dy[j][b][i] - dy[i][b][j];
                    for g in 0..r {
                        f += split[i][g] * dq[j][b][g] - split[j][g] * dq[i][b][g];
                    }
                    f
                })
            })
            .collect();
        Geometry { k2, r, w, split, dy, dq, curv }
    }
}

impl Geometry {
    /// `omega + Σ p_beta F^beta`.
    pub fn w_tilde(&self, p: &[f64]) -> DMatrix<f64> {
        let mut m = self.w.clone();
        for (b, &pb) in p.iter().enumerate() {
            m += &self.curv[b] * pb;
        }
        m
    }

    /// Matrix of `omega_U = ½(omega_ij + p_beta F^beta_ij) dy^i ∧ dy^j
    /// − (dp_d + p_beta ∂_d R_i^beta dy^i) ∧ (dq^d − R_j^d dy^j)` in the
    /// basis `(∂y, ∂q, ∂p)`.
    pub fn omega_u(&self, p: &[f64]) -> DMatrix<f64> {
        let (k2, r) = (self.k2, self.r);
        let n = k2 + 2 * r;
        let mut m = DMatrix::zeros(n, n);
        let wt = self.w_tilde(p);
        for i in 0..k2 {
            for j in 0..k2 {
                m[(i, j)] = wt[(i, j)];
            }
        }
        for d in 0..r {
            let mut a = vec![0.0; n];
            let mut b = vec![0.0; n];
            a[k2 + r + d] = 1.0;
            for i in 0..k2 {
                a[i] = (0..r).map(|beta| p[beta] * self.dq[i][beta][d]).sum();
            }
            b[k2 + d] = 1.0;
            for j in 0..k2 {
                b[j] = -self.split[j][d];
            }
            for u in 0..n {
                for v in 0..n {
                    m[(u, v)] -= a[u] * b[v] - a[v] * b[u];
                }
            }
        }
        m
    }
}

/// A point of the thickening: chart point plus fiber values `p_alpha`.
#[derive(Clone, Debug, PartialEq)]
pub struct ThickenedPoint {
    pub point: Point,
    pub p: Vec<f64>,
}

impl ThickenedPoint {
    pub fn coords(&self) -> Vec<f64> {
        self.point.0.iter().chain(self.p.iter()).copied().collect()
    }
}

fn check_valid(chart: &ChartSpec, g: &Geometry, x: &[f64], p: &[f64]) -> Result<(), OracleError> {
    let det = g.w_tilde(p).determinant();
    if !(det.abs() > 1e-10) {
        return Err(OracleError::Invalid { det, point: chart.describe(&Point(x.to_vec())) });
    }
    Ok(())
}

/// `omega_U` at a thickened point.
pub fn omega_u_at(chart: &ChartSpec, tp: &ThickenedPoint) -> Result<DMatrix<f64>, OracleError> {
    let g = GeometryEval::new(chart).at(&tp.point.0);
    check_valid(chart, &g, &tp.point.0, &tp.p)?;
    Ok(g.omega_u(&tp.p))
}

/// Largest component of the finite-difference `d omega_U` at a point.
pub fn omega_u_closedness(chart: &ChartSpec, tp: &ThickenedPoint) -> f64 {
    let ge = GeometryEval::new(chart);
    let dim = chart.dim();
    let n = dim + chart.r;
    let f = |z: &[f64]| {
        let g = ge.at(&z[..dim]);
        g.omega_u(&z[dim..]).as_slice().to_vec()
    };
    let z = tp.coords();
    let d: Vec<Vec<f64>> = (0..n).map(|a| richardson(&f, &z, a, FD_STEP)).collect();
    let om = |a: usize, b: usize, c: usize| d[a][b + c * n];
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                worst = worst.max((om(a, b, c) + om(b, c, a) + om(c, a, b)).abs());
            }
        }
    }
    worst
}

/// Dimension of the kernel of `omega_U` restricted to the zero section's
/// tangent space (`∂y, ∂q`), by SVD with relative tolerance `1e-10`.
pub fn zero_section_kernel(chart: &ChartSpec, x: &Point) -> usize {
    let g = GeometryEval::new(chart).at(&x.0);
    let m = g.omega_u(&vec![0.0; chart.r]);
    let d = chart.dim();
    let sub = m.view((0, 0), (d, d)).into_owned();
    let sv = sub.singular_values();
    let top = sv.max().max(1.0);
    sv.iter().filter(|s| **s <= 1e-10 * top).count() + d.saturating_sub(sv.len())
}

/// Compiled values and partials of a section.
pub struct SectionEval {
    r: usize,
    dim: usize,
    tape: Tape,
}

impl SectionEval {
    pub fn new(chart: &ChartSpec, s: &LeafForm) -> Result<SectionEval, OracleError> {
        if s.deg != 1 || s.c.len() != chart.r {
            return Err(OracleError::Shape(chart.r));
        }
        let mut es = s.c.clone();
        for v in chart.coord_names() {
            for c in &s.c {
                es.push(c.diff(&v));
            }
        }
        Ok(SectionEval { r: chart.r, dim: chart.dim(), tape: Tape::compile(&es, &chart.coord_refs()).expect("chart symbols") })
    }

    /// `(s, ds)` with `ds[z][alpha] = ∂s_alpha / ∂z`.
    pub fn at(&self, x: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
        let v = self.tape.eval(x);
        let s = v[..self.r].to_vec();
        let ds = (0..self.dim).map(|z| v[self.r * (1 + z)..self.r * (2 + z)].to_vec()).collect();
        (s, ds)
    }
}

fn orthonormal_columns(m: &DMatrix<f64>) -> DMatrix<f64> {
    m.clone().qr().q()
}

/// Orthonormal basis (columns) of `{u : m u = 0}`.
pub fn null_space(m: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let n = m.ncols();
    let mut sq = DMatrix::zeros(n.max(m.nrows()), n);
    sq.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
    let svd = sq.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let top = svd.singular_values.max().max(1e-300);
    let cols: Vec<_> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s <= rel_tol * top)
        .map(|(i, _)| vt.row(i).transpose())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Largest component of the columns of `u` outside the column span of `v`.
pub fn containment_defect(u: &DMatrix<f64>, v: &DMatrix<f64>) -> f64 {
    if u.ncols() == 0 {
        return 0.0;
    }
    let q = orthonormal_columns(v);
    let resid = u - &q * (q.transpose() * u);
    resid.column_iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Frame of the graph's tangent space in `(∂y, ∂q, ∂p)`.
fn graph_frame(r: usize, dim: usize, ds: &[Vec<f64>]) -> DMatrix<f64> {
    let n = dim + r;
    DMatrix::from_fn(n, dim, |row, col| {
        if row < dim {
            if row == col {
                1.0
            } else {
                0.0
            }
        } else {
            ds[col][row - dim]
        }
    })
}

/// Max over points of the part of `(T Graph)^omega` outside `T Graph`.
pub fn graph_coisotropy_defect(chart: &ChartSpec, s: &LeafForm, pts: &[Point]) -> Result<f64, OracleError> {
    let ge = GeometryEval::new(chart);
    let se = SectionEval::new(chart, s)?;
    let dim = chart.dim();
    let mut worst: f64 = 0.0;
    for x in pts {
        let g = ge.at(&x.0);
        let (sv, ds) = se.at(&x.0);
        check_valid(chart, &g, &x.0, &sv)?;
        let om = g.omega_u(&sv);
        let v = graph_frame(chart.r, dim, &ds);
        let rank = v.rank(1e-10);
        if rank < dim {
            return Err(OracleError::RankDeficient { rank, want: dim, point: chart.describe(x) });
        }
        let perp = null_space(&(v.transpose() * &om), 1e-10);
        worst = worst.max(containment_defect(&perp, &v));
    }
    Ok(worst)
}

/// Master-equation residual form at a point:
/// `½ Σ_ij (W̃^{-1})_{ij} ∇_i s ∧ ∇_j s − d_F s` with `W̃ = omega + s.F`.
pub fn master_form_at(chart: &ChartSpec, ge: &GeometryEval, se: &SectionEval, x: &Point) -> Result<Form<f64>, OracleError> {
    let (k2, r) = (chart.k2(), chart.r);
    let g = ge.at(&x.0);
    let (s, ds) = se.at(&x.0);
    check_valid(chart, &g, &x.0, &s)?;
    let wi = g.w_tilde(&s).try_inverse().expect("checked determinant");
    let mut nab = vec![vec![0.0; r]; k2];
    for i in 0..k2 {
        for a in 0..r {
            let mut v = ds[i][a];
            for c in 0..r {
                v += g.split[i][c] * ds[k2 + c][a];
            }
            for b in 0..r {
                v += s[b] * g.dq[i][b][a];
            }
            nab[i][a] = v;
        }
    }
    let pairs = subsets(r, 2);
    let mut out = Form { deg: 2, dim: r, c: vec![0.0; pairs.len()] };
    for (t, ab) in pairs.iter().enumerate() {
        let (a, b) = (ab[0], ab[1]);
        let mut lhs = 0.0;
        for i in 0..k2 {
            for j in 0..k2 {
                lhs += 0.5 * wi[(i, j)] * (nab[i][a] * nab[j][b] - nab[i][b] * nab[j][a]);
            }
        }
        let dfs = ds[k2 + a][b] - ds[k2 + b][a];
        out.c[t] = lhs - dfs;
    }
    Ok(out)
}

/// Max over points of the master-equation residual of `s`.
pub fn master_residual(chart: &ChartSpec, s: &LeafForm, pts: &[Point]) -> Result<f64, OracleError> {
    let ge = GeometryEval::new(chart);
    let se = SectionEval::new(chart, s)?;
    let mut worst: f64 = 0.0;
    for x in pts {
        worst = worst.max(master_form_at(chart, &ge, &se, x)?.max_abs());
    }
    Ok(worst)
}

/// Largest `t` in `(0, tmax]` such that `det(omega + τ s.F)` stays above
/// `1e-10` in absolute value for every `τ <= t` at every point.
pub fn validity_radius(chart: &ChartSpec, s: &LeafForm, pts: &[Point], tmax: f64) -> Result<f64, OracleError> {
    let ge = GeometryEval::new(chart);
    let se = SectionEval::new(chart, s)?;
    let mut best = tmax;
    for x in pts {
        let g = ge.at(&x.0);
        let (sv, _) = se.at(&x.0);
        let ok = |t: f64| {
            let p: Vec<f64> = sv.iter().map(|v| v * t).collect();
            g.w_tilde(&p).determinant().abs() > 1e-10
        };
        let steps = 4000;
        let mut prev = 0.0;
        for k in 1..=steps {
            let t = best * k as f64 / steps as f64;
            if !ok(t) {
                let (mut lo, mut hi) = (prev, t);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if ok(mid) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                best = lo;
                break;
            }
            prev = t;
        }
    }
    Ok(best)
}

/// Defects of `s*θ_G = s_beta f^beta` (a) and of
/// `s*omega_U = omega − d(s_beta f^beta)` (b, finite-difference `d`).
pub fn theta_pullback_check(chart: &ChartSpec, s: &LeafForm, pts: &[Point]) -> Result<(f64, f64), OracleError> {
    let ge = GeometryEval::new(chart);
    let se = SectionEval::new(chart, s)?;
    let (k2, r, dim) = (chart.k2(), chart.r, chart.dim());
    let lambda = |x: &[f64]| {
        let g = ge.at(x);
        let (s, _) = se.at(x);
        let mut l = vec![0.0; dim];
        for b in 0..r {
            l[k2 + b] += s[b];
            for i in 0..k2 {
                l[i] -= s[b] * g.split[i][b];
            }
        }
        l
    };
    let (mut wa, mut wb): (f64, f64) = (0.0, 0.0);
    for x in pts {
        let g = ge.at(&x.0);
        let (sv, ds) = se.at(&x.0);
        check_valid(chart, &g, &x.0, &sv)?;
        let n = dim + r;
        let mut theta = vec![0.0; n];
        for b in 0..r {
            theta[k2 + b] = sv[b];
            for i in 0..k2 {
                theta[i] -= sv[b] * g.split[i][b];
            }
        }
        let jac = graph_frame(r, dim, &ds);
        let pulled = jac.transpose() * DMatrix::from_column_slice(n, 1, &theta);
        let direct = lambda(&x.0);
        for z in 0..dim {
            wa = wa.max((pulled[z] - direct[z]).abs());
        }
        let om_pull = jac.transpose() * g.omega_u(&sv) * &jac;
        let dl: Vec<Vec<f64>> = (0..dim).map(|a| richardson(&lambda, &x.0, a, FD_STEP)).collect();
        for a in 0..dim {
            for b in 0..dim {
                let base = if a < k2 && b < k2 { g.w[(a, b)] } else { 0.0 };
                let want = base - (dl[a][b] - dl[b][a]);
                wb = wb.max((om_pull[(a, b)] - want).abs());
            }
        }
    }
    Ok((wa, wb))
}

/// Field data for the flat extension: `ξ = ξ^i e_i + ξ_E^alpha ∂_{q^alpha}`.
#[derive(Clone, Debug)]
pub struct FieldData {
    pub transverse: Vec<Expr>,
    pub leafwise: Vec<Expr>,
}

/// Result of the flat pre-Hamiltonian extension.
#[derive(Clone, Debug)]
pub struct Extension {
    /// `max |L_Ξ omega_U|` over the sample points.
    pub defect: f64,
    /// The extended field at the first sample point, `(∂y, ∂q, ∂p)`.
    pub sample_field: Vec<f64>,
}

/// Build `Ξ = ξ^j (∂_{y^j} + R_j^alpha ∂_{q^alpha} − p_beta ∂_nu R_j^beta
/// ∂_{p_nu}) + X_f`, `f = p_alpha ξ_E^alpha`, and measure `L_Ξ omega_U` by
/// finite differences at the given thickened points.
pub fn extend_prehamiltonian_flat(chart: &ChartSpec, xi: &FieldData, pts: &[ThickenedPoint]) -> Result<Extension, OracleError> {
    let (k2, r, dim) = (chart.k2(), chart.r, chart.dim());
    let n = dim + r;
    let ge = GeometryEval::new(chart);
    let sample = chart.sample(64, 7);
    let fmax = sample.iter().map(|x| ge.at(&x.0).curv.iter().map(|m| m.amax()).fold(0.0, f64::max)).fold(0.0, f64::max);
    if !(fmax < 1e-12) {
        return Err(OracleError::NotFlat(fmax));
    }
    let mut es = xi.transverse.clone();
    es.extend(xi.leafwise.iter().cloned());
    for e in xi.leafwise.clone() {
        for v in chart.coord_names() {
            es.push(e.diff(&v));
        }
    }
    let tape = Tape::compile(&es, &chart.coord_refs()).expect("field symbols bound by chart");
    let contraction = |x: &[f64]| {
        let g = ge.at(x);
        let v = tape.eval(x);
        let mut l = vec![0.0; dim];
        for i in 0..k2 {
            l[i] = (0..k2).map(|j| v[j] * g.w[(j, i)]).sum();
        }
        l
    };
    let mut closed: f64 = 0.0;
    for x in &sample {
        let dl: Vec<Vec<f64>> = (0..dim).map(|a| richardson(&contraction, &x.0, a, FD_STEP)).collect();
        for a in 0..dim {
            for b in a + 1..dim {
                closed = closed.max((dl[a][b] - dl[b][a]).abs());
            }
        }
    }
    if !(closed < 1e-8) {
        return Err(OracleError::NotPreHamiltonian(closed));
    }
    let field = |z: &[f64]| {
        let (x, p) = z.split_at(dim);
        let g = ge.at(x);
        let v = tape.eval(x);
        let (xt, rest) = v.split_at(k2);
        let (xe, dxe) = rest.split_at(r);
        let mut out = vec![0.0; n];
        for j in 0..k2 {
            out[j] += xt[j];
            for a in 0..r {
                out[k2 + a] += xt[j] * g.split[j][a];
            }
            for nu in 0..r {
                out[dim + nu] -= xt[j] * (0..r).map(|b| p[b] * g.dq[j][b][nu]).sum::<f64>();
            }
        }
        let mut grad = vec![0.0; n];
        for a in 0..r {
            for zc in 0..dim {
                grad[zc] += p[a] * dxe[a * dim + zc];
            }
            grad[dim + a] = xe[a];
        }
        let om = g.omega_u(p);
        let xf = om.try_inverse().expect("nondegenerate thickened form") * DMatrix::from_column_slice(n, 1, &grad);
        for c in 0..n {
            out[c] += xf[c];
        }
        out
    };
    let omega = |z: &[f64]| ge.at(&z[..dim]).omega_u(&z[dim..]).as_slice().to_vec();
    let mut defect: f64 = 0.0;
    let mut sample_field = Vec::new();
    for tp in pts {
        let z = tp.coords();
        let g = ge.at(&tp.point.0);
        check_valid(chart, &g, &tp.point.0, &tp.p)?;
        let om = g.omega_u(&tp.p);
        let xv = field(&z);
        if sample_field.is_empty() {
            sample_field = xv.clone();
        }
        let dom: Vec<Vec<f64>> = (0..n).map(|c| richardson(&omega, &z, c, FD_STEP)).collect();
        let dx: Vec<Vec<f64>> = (0..n).map(|a| richardson(&field, &z, a, FD_STEP)).collect();
        for a in 0..n {
            for b in 0..n {
                let mut l = 0.0;
                for c in 0..n {
                    l += xv[c] * dom[c][a + b * n];
                    l += om[(c, b)] * dx[a][c] + om[(a, c)] * dx[b][c];
                }
                defect = defect.max(l.abs());
            }
        }
    }
    Ok(Extension { defect, sample_field })
}

/// Thickened sample points with `|p_alpha| <= pmax`.
pub fn thickened_sample(chart: &ChartSpec, n: usize, pmax: f64, seed: u64) -> Vec<ThickenedPoint> {
    let pts = chart.sample(n, seed);
    let ps = crate::sampling::halton(n, chart.r, seed ^ 0xfeed);
    pts.into_iter()
        .zip(ps)
        .map(|(point, u)| ThickenedPoint { point, p: u.iter().map(|t| pmax * (2.0 * t - 1.0)).collect() })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::builtin_flat_torus;
    use crate::leafform::one_form;

    #[test]
    fn flat_torus_constant_form() {
        let c = builtin_flat_torus();
        let tp = ThickenedPoint { point: Point(vec![0.1, 0.2, 0.3, 0.4]), p: vec![0.0, 0.0] };
        let m = omega_u_at(&c, &tp).unwrap();
        assert_eq!(m[(0, 1)], 1.0);
        assert_eq!(m[(2, 4)], 1.0);
        assert_eq!(m[(3, 5)], 1.0);
        assert_eq!(m[(4, 2)], -1.0);
        assert_eq!(m[(2, 3)], 0.0);
        assert_eq!(zero_section_kernel(&c, &tp.point), 2);
    }

    #[test]
    fn random_chart_is_closed() {
        let c = crate::randgen::curved_chart(1, 2, 4);
        for tp in thickened_sample(&c, 4, 0.3, 2) {
            assert!(omega_u_closedness(&c, &tp) < 1e-6);
            assert_eq!(zero_section_kernel(&c, &tp.point), 2);
        }
    }

    #[test]
    fn zero_section() {
        let c = crate::randgen::curved_chart(1, 2, 8);
        let z = one_form(&["0", "0"]);
        let pts = c.sample(10, 1);
        assert!(graph_coisotropy_defect(&c, &z, &pts).unwrap() < 1e-12);
        assert_eq!(master_residual(&c, &z, &pts).unwrap(), 0.0);
        let (a, b) = theta_pullback_check(&c, &z, &pts).unwrap();
        assert!(a == 0.0 && b < 1e-6);
    }

    #[test]
    fn extension_on_flat_torus() {
        let c = builtin_flat_torus();
        let pts = thickened_sample(&c, 6, 0.3, 3);
        let f = |t: &[&str], l: &[&str]| FieldData {
            transverse: t.iter().map(|s| crate::expr::parse(s).unwrap()).collect(),
            leafwise: l.iter().map(|s| crate::expr::parse(s).unwrap()).collect(),
        };
        assert!(extend_prehamiltonian_flat(&c, &f(&["1", "0"], &["0", "0"]), &pts).unwrap().defect < 1e-6);
        let ext = extend_prehamiltonian_flat(&c, &f(&["cos(2*pi*y2)", "0"], &["sin(2*pi*q1)", "y1"]), &pts).unwrap();
        assert!(ext.defect < 1e-6, "{}", ext.defect);
        assert!(matches!(
            extend_prehamiltonian_flat(&c, &f(&["sin(2*pi*y1)", "0"], &["0", "0"]), &pts),
            Err(OracleError::NotPreHamiltonian(_))
        ));
    }
}

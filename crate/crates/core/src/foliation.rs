//! Transverse calculus of the null foliation: curvature of a splitting,
//! the Π-differential, the Π-bracket, and mean transverse curvature.

use crate::chart::{ChartSpec, Point};
use crate::expr::{Expr, Tape};
use crate::form::{permutations, subsets, Form};

#[derive(Debug, thiserror::Error)]
pub enum FoliationError {
    #[error("degree {0} exceeds the transverse dimension {1}")]
    DegreeOverflow(usize, usize),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("symbolic inverse only for 2k <= 4 (got 2k = {0}); use the pointwise evaluator")]
    TooLarge(usize),
}

/// Vertical-vector-valued transverse form: `comp[beta]` is the scalar
/// transverse form multiplying `∂/∂q^beta`.
#[derive(Clone, Debug)]
pub struct TransverseField {
    pub deg: usize,
    pub k2: usize,
    pub r: usize,
    pub comp: Vec<Form<Expr>>,
}

impl TransverseField {
    pub fn zero(k2: usize, r: usize, deg: usize) -> TransverseField {
        TransverseField { deg, k2, r, comp: vec![Form::zero(k2, deg); r] }
    }

    /// Component `B^beta_{i1..il}` for an arbitrary index order.
    pub fn get(&self, beta: usize, idx: &[usize]) -> Expr {
        self.comp[beta].get(idx)
    }

    /// Degree-1 field from a `k2 x r` table `b[i][beta]`.
    pub fn from_table(b: &[Vec<Expr>]) -> TransverseField {
        let k2 = b.len();
        let r = b.first().map(|row| row.len()).unwrap_or(0);
        let comp = (0..r).map(|beta| Form { deg: 1, dim: k2, c: (0..k2).map(|i| b[i][beta].clone()).collect() }).collect();
        TransverseField { deg: 1, k2, r, comp }
    }

    pub fn add(&self, o: &TransverseField) -> TransverseField {
        TransverseField { comp: self.comp.iter().zip(&o.comp).map(|(a, b)| a.add(b)).collect(), ..self.clone() }
    }

    pub fn sub(&self, o: &TransverseField) -> TransverseField {
        TransverseField { comp: self.comp.iter().zip(&o.comp).map(|(a, b)| a.sub(b)).collect(), ..self.clone() }
    }

    pub fn scale(&self, s: &Expr) -> TransverseField {
        TransverseField { comp: self.comp.iter().map(|a| a.scale(s)).collect(), ..self.clone() }
    }

    fn flat(&self) -> Vec<Expr> {
        self.comp.iter().flat_map(|f| f.c.iter().cloned()).collect()
    }

    /// All stored components at the given points, flattened `[beta][index]`.
    pub fn eval_points(&self, chart: &ChartSpec, pts: &[Point]) -> Vec<Vec<f64>> {
        let t = Tape::compile(&self.flat(), &chart.coord_refs()).expect("chart symbols");
        let mut scratch = Vec::new();
        pts.iter()
            .map(|p| {
                let mut out = vec![0.0; t.n_outputs()];
                t.eval_into(&p.0, &mut scratch, &mut out);
                out
            })
            .collect()
    }

    /// Largest absolute component over the points.
    pub fn max_abs(&self, chart: &ChartSpec, pts: &[Point]) -> f64 {
        self.eval_points(chart, pts).iter().flatten().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// `Y_j(e) = ∂e/∂y^j + R_j^gamma ∂e/∂q^gamma`.
pub fn horizontal_derivative(chart: &ChartSpec, e: &Expr, j: usize) -> Expr {
    let mut out = e.diff(&chart.y[j]);
    for (g, q) in chart.q.iter().enumerate() {
        let d = e.diff(q);
        if !d.is_zero() {
            out = out + &chart.split[j][g] * d;
        }
    }
    out
}

/// Vertical Lie bracket of coefficient vector fields:
/// `[u,v]^beta = u^alpha ∂_alpha v^beta − v^alpha ∂_alpha u^beta`.
pub fn vertical_bracket(chart: &ChartSpec, u: &[Expr], v: &[Expr]) -> Vec<Expr> {
    (0..chart.r)
        .map(|b| {
            let mut acc = Expr::zero();
            for (a, q) in chart.q.iter().enumerate() {
                acc = acc + &u[a] * v[b].diff(q) - &v[a] * u[b].diff(q);
            }
            acc
        })
        .collect()
}

/// `F^beta_{ij} = Y_i R_j^beta − Y_j R_i^beta`.
pub fn transverse_curvature(chart: &ChartSpec) -> TransverseField {
    let k2 = chart.k2();
    let comp = (0..chart.r)
        .map(|b| {
            Form::from_fn(k2, 2, |ij| {
                let (i, j) = (ij[0], ij[1]);
                horizontal_derivative(chart, &chart.split[j][b], i) - horizontal_derivative(chart, &chart.split[i][b], j)
            })
        })
        .collect();
    TransverseField { deg: 2, k2, r: chart.r, comp }
}

/// `(L_{Y_j} B)^beta = Y_j B^beta − B^gamma ∂_gamma R_j^beta` on one
/// component tuple.
fn lie_y(chart: &ChartSpec, b: &TransverseField, j: usize, idx: &[usize]) -> Vec<Expr> {
    let vals: Vec<Expr> = (0..chart.r).map(|beta| b.get(beta, idx)).collect();
    (0..chart.r)
        .map(|beta| {
            let mut acc = horizontal_derivative(chart, &vals[beta], j);
            for (g, q) in chart.q.iter().enumerate() {
                if vals[g].is_zero() {
                    continue;
                }
                let d = chart.split[j][beta].diff(q);
                if !d.is_zero() {
                    acc = acc - &vals[g] * d;
                }
            }
            acc
        })
        .collect()
}

/// `(d^Π B)_{j0..jl} = Σ_a (−1)^a L_{Y_{ja}} B_{j0..ĵa..jl}`.
pub fn pi_differential(chart: &ChartSpec, b: &TransverseField) -> Result<TransverseField, FoliationError> {
    let k2 = chart.k2();
    if b.deg + 1 > k2 {
        return Err(FoliationError::DegreeOverflow(b.deg + 1, k2));
    }
    let mut out = TransverseField::zero(k2, chart.r, b.deg + 1);
    for (pos, idx) in subsets(k2, b.deg + 1).iter().enumerate() {
        let mut acc = vec![Expr::zero(); chart.r];
        for a in 0..idx.len() {
            let rest: Vec<usize> = idx.iter().enumerate().filter(|(p, _)| *p != a).map(|(_, &x)| x).collect();
            let term = lie_y(chart, b, idx[a], &rest);
            for beta in 0..chart.r {
                acc[beta] = if a % 2 == 0 { &acc[beta] + &term[beta] } else { &acc[beta] - &term[beta] };
            }
        }
        for beta in 0..chart.r {
            out.comp[beta].c[pos] = acc[beta].clone();
        }
    }
    Ok(out)
}

/// `[B,C]_{I} = (1/n!) Σ_{σ ∈ S_n} sgn σ [B_{σ(I)_{..l1}}, C_{σ(I)_{l1..}}]`
/// with the vertical Lie bracket on coefficients.
pub fn pi_bracket(chart: &ChartSpec, b: &TransverseField, c: &TransverseField) -> Result<TransverseField, FoliationError> {
    let k2 = chart.k2();
    let n = b.deg + c.deg;
    if n > k2 {
        return Err(FoliationError::DegreeOverflow(n, k2));
    }
    let perms = permutations(n);
    let norm = Expr::frac(1, perms.len() as i64);
    let mut out = TransverseField::zero(k2, chart.r, n);
    for (pos, idx) in subsets(k2, n).iter().enumerate() {
        let mut acc = vec![Expr::zero(); chart.r];
        for (p, sign) in &perms {
            let sidx: Vec<usize> = p.iter().map(|&x| idx[x]).collect();
            let u: Vec<Expr> = (0..chart.r).map(|beta| b.get(beta, &sidx[..b.deg])).collect();
            let v: Vec<Expr> = (0..chart.r).map(|beta| c.get(beta, &sidx[b.deg..])).collect();
            let br = vertical_bracket(chart, &u, &v);
            for beta in 0..chart.r {
                acc[beta] = if *sign > 0 { &acc[beta] + &br[beta] } else { &acc[beta] - &br[beta] };
            }
        }
        for beta in 0..chart.r {
            out.comp[beta].c[pos] = &norm * &acc[beta];
        }
    }
    Ok(out)
}

/// New splitting `R' = R + B`.
pub fn splitting_transform(chart: &ChartSpec, b: &TransverseField) -> Result<ChartSpec, FoliationError> {
    if b.deg != 1 || b.k2 != chart.k2() || b.r != chart.r {
        return Err(FoliationError::Shape(format!("need a degree-1 field of shape {}x{}", chart.k2(), chart.r)));
    }
    let split = (0..chart.k2()).map(|i| (0..chart.r).map(|beta| &chart.split[i][beta] + &b.comp[beta].c[i]).collect()).collect();
    Ok(chart.with_splitting(split))
}

/// Cofactor inverse of a small symbolic matrix.
pub fn symbolic_inverse(m: &[Vec<Expr>]) -> Result<Vec<Vec<Expr>>, FoliationError> {
    let n = m.len();
    if n > 4 {
        return Err(FoliationError::TooLarge(n));
    }
    let det = symbolic_det(m);
    let mut inv = vec![vec![Expr::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<Expr>> =
                (0..n).filter(|&a| a != j).map(|a| (0..n).filter(|&b| b != i).map(|b| m[a][b].clone()).collect()).collect();
            let cof = symbolic_det(&minor);
            let cof = if (i + j) % 2 == 0 { cof } else { -cof };
            inv[i][j] = cof / &det;
        }
    }
    Ok(inv)
}

pub fn symbolic_det(m: &[Vec<Expr>]) -> Expr {
    let n = m.len();
    match n {
        0 => Expr::one(),
        1 => m[0][0].clone(),
        _ => {
            let mut acc = Expr::zero();
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<Expr>> = (1..n).map(|a| (0..n).filter(|&b| b != j).map(|b| m[a][b].clone()).collect()).collect();
                let t = &m[0][j] * symbolic_det(&minor);
                acc = if j % 2 == 0 { acc + t } else { acc - t };
            }
            acc
        }
    }
}

/// `rho^beta = (1/2k) F^beta_{ij} omega^{ij}` with `omega^{ij}` the
/// symbolic matrix inverse.
pub fn mean_curvature(chart: &ChartSpec) -> Result<TransverseField, FoliationError> {
    let k2 = chart.k2();
    let inv = symbolic_inverse(&chart.omega)?;
    let f = transverse_curvature(chart);
    let scale = Expr::frac(1, k2 as i64);
    let comp = (0..chart.r)
        .map(|beta| {
            let mut acc = Expr::zero();
            for i in 0..k2 {
                for j in 0..k2 {
                    if i != j {
                        acc = acc + f.get(beta, &[i, j]) * &inv[i][j];
                    }
                }
            }
            Form::scalar(k2, &scale * acc)
        })
        .collect();
    Ok(TransverseField { deg: 0, k2, r: chart.r, comp })
}

/// Pointwise mean curvature through a numeric inverse; any `k`.
pub fn mean_curvature_at(chart: &ChartSpec, f: &TransverseField, p: &Point) -> Vec<f64> {
    let k2 = chart.k2();
    let inv = chart.omega_inverse_at(p).expect("nondegenerate omega");
    let vals = f.eval_points(chart, std::slice::from_ref(p)).remove(0);
    let per = vals.len() / chart.r;
    (0..chart.r)
        .map(|beta| {
            let form = Form { deg: 2, dim: k2, c: vals[beta * per..(beta + 1) * per].to_vec() };
            let mut acc = 0.0;
            for i in 0..k2 {
                for j in 0..k2 {
                    acc += form.get(&[i, j]) * inv[(i, j)];
                }
            }
            acc / k2 as f64
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::{builtin_flat_torus, builtin_oscillator, rational, torus_chart, darboux};
    use crate::expr::parse;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn flat_torus_is_flat() {
        let c = builtin_flat_torus();
        let f = transverse_curvature(&c);
        assert!(f.comp.iter().all(|x| x.is_zero()));
        let rho = mean_curvature(&c).unwrap();
        assert!(rho.comp.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn oscillator_is_flat() {
        let c = builtin_oscillator(&rational("3/2").unwrap()).unwrap();
        let f = transverse_curvature(&c);
        assert!(f.max_abs(&c, &c.sample(100, 7)) < 1e-12);
        let rho = mean_curvature(&c).unwrap();
        assert!(rho.max_abs(&c, &c.sample(20, 7)) < 1e-12);
    }

    #[test]
    fn constant_field_is_parallel_on_flat_torus() {
        let c = builtin_flat_torus();
        let b = TransverseField { deg: 0, k2: 2, r: 2, comp: vec![Form::scalar(2, p("3")), Form::scalar(2, p("-1/2"))] };
        let d = pi_differential(&c, &b).unwrap();
        assert!(d.comp.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn degree_overflow() {
        let c = builtin_flat_torus();
        let f = transverse_curvature(&c);
        assert!(matches!(pi_differential(&c, &f), Err(FoliationError::DegreeOverflow(3, 2))));
        assert!(pi_bracket(&c, &f, &f).is_err());
    }

    #[test]
    fn bracket_with_q_independent_argument() {
        let c = torus_chart("t", 1, 1, darboux(1, Expr::one()), vec![vec![p("0")], vec![p("0")]]);
        let b = TransverseField::from_table(&[vec![p("sin(2*pi*q1)")], vec![p("y1")]]);
        let cc = TransverseField::from_table(&[vec![p("y2")], vec![p("cos(2*pi*y1)")]]);
        let br = pi_bracket(&c, &b, &cc).unwrap();
        let want = p("-(cos(2*pi*y1)*2*pi*cos(2*pi*q1))/2");
        let pts = c.sample(10, 1);
        let got = br.eval_points(&c, &pts);
        for (pt, g) in pts.iter().zip(got) {
            let w = want.eval_at(&[("y1", pt.0[0]), ("y2", pt.0[1]), ("q1", pt.0[2])]).unwrap();
            assert!((g[0] - w).abs() < 1e-12);
        }
    }

    #[test]
    fn contact_chart_mean_curvature() {
        // theta = dq - y2 dy1, omega = -d theta, G = ker theta.
        let c = torus_chart("contact", 1, 1, vec![vec![p("0"), p("-1")], vec![p("1"), p("0")]], vec![vec![p("y2")], vec![p("0")]]);
        let rho = mean_curvature(&c).unwrap();
        let v = rho.eval_points(&c, &c.sample(5, 1));
        for x in v {
            assert!((x[0] + 1.0).abs() < 1e-14);
        }
    }
}

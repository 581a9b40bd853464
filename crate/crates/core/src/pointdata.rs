//! Pointwise numeric chart data shared by the numeric evaluators.

use crate::chart::{ChartSpec, Point};
use crate::expr::{Expr, Tape};
use crate::foliation::{transverse_curvature, TransverseField};
use nalgebra::DMatrix;

/// Chart quantities at one point.
#[derive(Clone, Debug)]
pub struct ChartData {
    pub k2: usize,
    pub r: usize,
    pub w: DMatrix<f64>,
    pub winv: DMatrix<f64>,
    /// `split[i][alpha] = R_i^alpha`.
    pub split: Vec<Vec<f64>>,
    /// `dsplit[i][beta][alpha] = ∂R_i^beta/∂q^alpha`.
    pub dsplit: Vec<Vec<Vec<f64>>>,
    /// `curv[beta]` is the matrix `F^beta_{ij}`.
    pub curv: Vec<DMatrix<f64>>,
}

/// Compiled evaluator for [`ChartData`].
#[derive(Clone, Debug)]
pub struct ChartEval {
    k2: usize,
    r: usize,
    tape: Tape,
}

impl ChartEval {
    pub fn new(chart: &ChartSpec) -> ChartEval {
        ChartEval::with_curvature(chart, &transverse_curvature(chart))
    }

    pub fn with_curvature(chart: &ChartSpec, f: &TransverseField) -> ChartEval {
        let k2 = chart.k2();
        let r = chart.r;
        let mut es: Vec<Expr> = chart.omega.iter().flatten().cloned().collect();
        es.extend(chart.split.iter().flatten().cloned());
        for i in 0..k2 {
            for b in 0..r {
                for q in &chart.q {
                    es.push(chart.split[i][b].diff(q));
                }
            }
        }
        for b in 0..r {
            es.extend(f.comp[b].c.iter().cloned());
        }
        let tape = Tape::compile(&es, &chart.coord_refs()).expect("chart symbols");
        ChartEval { k2, r, tape }
    }

    pub fn at(&self, p: &Point) -> ChartData {
        let mut scratch = Vec::new();
        self.at_with(&p.0, &mut scratch)
    }

    pub fn at_with(&self, x: &[f64], scratch: &mut Vec<f64>) -> ChartData {
        let (k2, r) = (self.k2, self.r);
        let mut v = vec![0.0; self.tape.n_outputs()];
        self.tape.eval_into(x, scratch, &mut v);
        let w = DMatrix::from_row_slice(k2, k2, &v[..k2 * k2]);
        let mut o = k2 * k2;
        let split: Vec<Vec<f64>> = (0..k2).map(|i| v[o + i * r..o + (i + 1) * r].to_vec()).collect();
        o += k2 * r;
        let dsplit: Vec<Vec<Vec<f64>>> =
            (0..k2).map(|i| (0..r).map(|b| v[o + (i * r + b) * r..o + (i * r + b + 1) * r].to_vec()).collect()).collect();
        o += k2 * r * r;
        let per = k2 * k2.saturating_sub(1) / 2;
        let curv = (0..r)
            .map(|b| {
                let mut m = DMatrix::zeros(k2, k2);
                let mut t = o + b * per;
                for i in 0..k2 {
                    for j in i + 1..k2 {
                        m[(i, j)] = v[t];
                        m[(j, i)] = -v[t];
                        t += 1;
                    }
                }
                m
            })
            .collect();
        let winv = w.clone().try_inverse().unwrap_or_else(|| DMatrix::from_element(k2, k2, f64::NAN));
        ChartData { k2, r, w, winv, split, dsplit, curv }
    }
}

impl ChartData {
    /// `W + Σ_beta p_beta F^beta`.
    pub fn w_tilde(&self, p: &[f64]) -> DMatrix<f64> {
        let mut m = self.w.clone();
        for (b, &pb) in p.iter().enumerate() {
            m += &self.curv[b] * pb;
        }
        m
    }

    pub fn max_curvature(&self) -> f64 {
        self.curv.iter().map(|m| m.amax()).fold(0.0, f64::max)
    }
}

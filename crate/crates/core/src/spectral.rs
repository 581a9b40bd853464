//! Fourier representation of leafwise forms on torus charts and the
//! fiberwise inverse of the leafwise differential.
//!
//! Periodic coordinate `a` carries `M_a = 2N_a + 1` equispaced nodes, so data
//! of trigonometric degree at most `N_a` along it is represented without
//! aliasing.
//! Coefficients are normalised so that `f(x) = Σ_n c_n exp(2πi n·x / T)`.

use crate::chart::{ChartSpec, Point};
use crate::expr::Expr;
use crate::form::{binomial, rank, sort_sign, subsets, Form};
use crate::leafform::{FormTape, LeafForm};
use num::complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

#[derive(Debug, thiserror::Error)]
pub enum SpectralError {
    #[error("chart `{0}` is not a torus: every coordinate needs a period")]
    NotTorus(String),
    #[error("leafwise differential needs degree < {r}, got {deg}")]
    Degree { deg: usize, r: usize },
    #[error("right-hand side is not d_F-closed (residual {0:e})")]
    NotClosed(f64),
    #[error("grid has {0} axes, chart has {1} coordinates")]
    Mismatch(usize, usize),
}

/// Outcome of [`SpectralForm::solve_df`] when the class is nonzero.
#[derive(Clone, Debug)]
pub struct Obstruction {
    /// q-zero-mode part of the right-hand side.
    pub class: SpectralForm,
    pub norm: f64,
}

/// Equispaced grid with `2N_a + 1` nodes along coordinate `a`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub n: Vec<usize>,
    pub periods: Vec<f64>,
}

impl Grid {
    pub fn new(n: Vec<usize>, periods: Vec<f64>) -> Grid {
        assert_eq!(n.len(), periods.len());
        Grid { n, periods }
    }

    pub fn uniform(n: usize, periods: Vec<f64>) -> Grid {
        Grid { n: vec![n; periods.len()], periods }
    }

    pub fn for_chart(chart: &ChartSpec, n: usize) -> Result<Grid, SpectralError> {
        Ok(Grid::uniform(n, chart_periods(chart)?))
    }

    /// Truncation `n` along every coordinate that the chart data or one of
    /// the forms depends on, a single node along the others.
    pub fn adapted(chart: &ChartSpec, n: usize, forms: &[&LeafForm]) -> Result<Grid, SpectralError> {
        let periods = chart_periods(chart)?;
        let data: Vec<&Expr> = chart.omega.iter().chain(&chart.split).flatten().chain(forms.iter().flat_map(|f| f.c.iter())).collect();
        let ns = chart.coord_names().iter().map(|v| if data.iter().any(|e| e.mentions(v)) { n } else { 0 }).collect();
        Ok(Grid::new(ns, periods))
    }

    pub fn m(&self, a: usize) -> usize {
        2 * self.n[a] + 1
    }

    pub fn dim(&self) -> usize {
        self.periods.len()
    }

    pub fn len(&self) -> usize {
        (0..self.dim()).map(|a| self.m(a)).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Multi-index of a flat position (last coordinate fastest).
    pub fn unflatten(&self, mut k: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for a in (0..self.dim()).rev() {
            idx[a] = k % self.m(a);
            k /= self.m(a);
        }
        idx
    }

    pub fn point(&self, k: usize) -> Point {
        Point(self.unflatten(k).iter().enumerate().map(|(a, &j)| self.periods[a] * j as f64 / self.m(a) as f64).collect())
    }

    pub fn points(&self) -> Vec<Point> {
        (0..self.len()).map(|k| self.point(k)).collect()
    }

    /// Signed frequency stored at FFT position `j` along coordinate `a`.
    pub fn freq(&self, a: usize, j: usize) -> i64 {
        if j <= self.n[a] {
            j as i64
        } else {
            j as i64 - self.m(a) as i64
        }
    }

    pub fn freqs(&self, k: usize) -> Vec<i64> {
        self.unflatten(k).into_iter().enumerate().map(|(a, j)| self.freq(a, j)).collect()
    }

    /// In-place multi-dimensional DFT, axis by axis.
    fn transform(&self, data: &mut [Complex64], inverse: bool) {
        let mut planner = FftPlanner::new();
        let total = data.len();
        let mut stride = total;
        for axis in 0..self.dim() {
            let m = self.m(axis);
            stride /= m;
            if m == 1 {
                continue;
            }
            let fft = if inverse { planner.plan_fft_inverse(m) } else { planner.plan_fft_forward(m) };
            let mut line = vec![Complex64::new(0.0, 0.0); m];
            for base in 0..total {
                if (base / stride) % m != 0 {
                    continue;
                }
                for (t, l) in line.iter_mut().enumerate() {
                    *l = data[base + t * stride];
                }
                fft.process(&mut line);
                for (t, l) in line.iter().enumerate() {
                    data[base + t * stride] = *l;
                }
            }
        }
    }
}

fn chart_periods(chart: &ChartSpec) -> Result<Vec<f64>, SpectralError> {
    let periods: Option<Vec<f64>> = chart.periods.iter().copied().collect();
    periods.ok_or_else(|| SpectralError::NotTorus(chart.name.clone()))
}

/// Truncated Fourier coefficients of a leafwise form, one coefficient array
/// per increasing multi-index.
#[derive(Clone, Debug)]
pub struct SpectralForm {
    pub deg: usize,
    pub k2: usize,
    pub r: usize,
    pub grid: Grid,
    pub c: Vec<Vec<Complex64>>,
}

impl SpectralForm {
    pub fn zero(k2: usize, r: usize, deg: usize, grid: Grid) -> SpectralForm {
        let len = grid.len();
        SpectralForm { deg, k2, r, c: vec![vec![Complex64::new(0.0, 0.0); len]; binomial(r, deg)], grid }
    }

    /// Fourier coefficients from grid values (`values[comp][node]`).
    pub fn from_grid(k2: usize, r: usize, deg: usize, grid: Grid, values: &[Vec<f64>]) -> SpectralForm {
        let scale = 1.0 / grid.len() as f64;
        let c = values
            .iter()
            .map(|v| {
                let mut d: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
                grid.transform(&mut d, false);
                d.iter_mut().for_each(|z| *z *= scale);
                d
            })
            .collect();
        SpectralForm { deg, k2, r, grid, c }
    }

    /// Real grid values, `[comp][node]`.
    pub fn to_grid(&self) -> Vec<Vec<f64>> {
        self.c
            .iter()
            .map(|v| {
                let mut d = v.clone();
                self.grid.transform(&mut d, true);
                d.iter().map(|z| z.re).collect()
            })
            .collect()
    }

    fn map_modes(&self, deg: usize, mut f: impl FnMut(usize, &[i64]) -> Vec<Complex64>) -> SpectralForm {
        let mut out = SpectralForm::zero(self.k2, self.r, deg, self.grid.clone());
        for k in 0..self.grid.len() {
            let n = self.grid.freqs(k);
            for (comp, v) in f(k, &n).into_iter().enumerate() {
                out.c[comp][k] = v;
            }
        }
        out
    }

    /// Angular wave vector `2π n_a / T_a` of a mode along coordinate `a`.
    fn wave(&self, n: &[i64], a: usize) -> f64 {
        2.0 * PI * n[a] as f64 / self.grid.periods[a]
    }

    /// Partial derivative along chart coordinate `axis`.
    pub fn derivative(&self, axis: usize) -> SpectralForm {
        self.map_modes(self.deg, |k, n| {
            let w = Complex64::new(0.0, self.wave(n, axis));
            self.c.iter().map(|v| v[k] * w).collect()
        })
    }

    fn comp(&self, k: usize, idx: &[usize]) -> Complex64 {
        match sort_sign(idx) {
            None => Complex64::new(0.0, 0.0),
            Some((s, sign)) => self.c[rank(self.r, &s)][k] * sign as f64,
        }
    }

    /// `d_F = Σ_beta f^beta ∧ ∂_{q^beta}`.
    pub fn d_f(&self) -> SpectralForm {
        let out_idx = subsets(self.r, self.deg + 1);
        let k2 = self.k2;
        self.map_modes(self.deg + 1, |k, n| {
            out_idx
                .iter()
                .map(|j| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for a in 0..j.len() {
                        let rest: Vec<usize> = j.iter().enumerate().filter(|&(b, _)| b != a).map(|(_, &x)| x).collect();
                        let w = Complex64::new(0.0, self.wave(n, k2 + j[a]));
                        let s = if a % 2 == 0 { 1.0 } else { -1.0 };
                        acc += w * self.comp(k, &rest) * s;
                    }
                    acc
                })
                .collect()
        })
    }

    fn is_q_zero(&self, n: &[i64]) -> bool {
        n[self.k2..].iter().all(|&x| x == 0)
    }

    /// Part of the form that is constant along the leaves (fiber average).
    pub fn q_zero_mode(&self) -> SpectralForm {
        self.map_modes(self.deg, |k, n| {
            let keep = self.is_q_zero(n);
            self.c.iter().map(|v| if keep { v[k] } else { Complex64::new(0.0, 0.0) }).collect()
        })
    }

    /// `L²` norm for the normalised volume of the torus (Parseval).
    pub fn l2_norm(&self) -> f64 {
        self.c.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_coeff(&self) -> f64 {
        self.c.iter().flatten().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn add(&self, o: &SpectralForm) -> SpectralForm {
        let mut out = self.clone();
        for (a, b) in out.c.iter_mut().zip(&o.c) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += *y;
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> SpectralForm {
        let mut out = self.clone();
        out.c.iter_mut().flatten().for_each(|z| *z *= s);
        out
    }

    /// Value and first partials at an arbitrary point by trigonometric
    /// interpolation: `out[0]` is the value, `out[1 + a]` the derivative
    /// along coordinate `a`.
    pub fn jet_at(&self, x: &[f64]) -> Vec<Form<f64>> {
        self.jet_at_modes(x, &self.active_modes())
    }

    /// Flat positions of the modes above `1e-15` of the largest coefficient
    /// and above `1e-20` absolutely.
    pub fn active_modes(&self) -> Vec<usize> {
        let cutoff = (1e-15 * self.max_coeff()).max(1e-20).powi(2);
        (0..self.grid.len()).filter(|&k| self.c.iter().any(|v| v[k].norm_sqr() > cutoff)).collect()
    }

    /// [`SpectralForm::jet_at`] summing only the listed modes.
    pub fn jet_at_modes(&self, x: &[f64], modes: &[usize]) -> Vec<Form<f64>> {
        let dim = self.grid.dim();
        let ncomp = self.c.len();
        let mut out = vec![Form { deg: self.deg, dim: self.r, c: vec![0.0; ncomp] }; dim + 1];
        let waves: Vec<Vec<f64>> = (0..dim)
            .map(|a| (0..self.grid.m(a)).map(|j| 2.0 * PI * self.grid.freq(a, j) as f64 / self.grid.periods[a]).collect())
            .collect();
        let phases: Vec<Vec<Complex64>> =
            (0..dim).map(|a| waves[a].iter().map(|w| Complex64::from_polar(1.0, w * x[a])).collect()).collect();
        let mut idx = vec![0usize; dim];
        for &k in modes {
            let mut rest = k;
            for a in (0..dim).rev() {
                idx[a] = rest % self.grid.m(a);
                rest /= self.grid.m(a);
            }
            let mut e = Complex64::new(1.0, 0.0);
            for a in 0..dim {
                e *= phases[a][idx[a]];
            }
            for (comp, v) in self.c.iter().enumerate() {
                let z = v[k] * e;
                out[0].c[comp] += z.re;
                for a in 0..dim {
                    out[1 + a].c[comp] -= z.im * waves[a][idx[a]];
                }
            }
        }
        out
    }

    pub fn eval_at(&self, x: &[f64]) -> Form<f64> {
        self.jet_at(x).swap_remove(0)
    }

    /// Solve `d_F Γ = −η` for `η = self`. The primitive has zero fiber
    /// average. When the fiber average of `η` exceeds `tol` in `L²` the
    /// average is returned as the obstruction.
    pub fn solve_df(&self, tol: f64, closed_tol: f64) -> Result<Result<SpectralForm, Obstruction>, SpectralError> {
        if self.deg == 0 {
            return Err(SpectralError::Degree { deg: 0, r: self.r });
        }
        if self.deg < self.r {
            let res = self.d_f().max_coeff();
            if !(res < closed_tol) {
                return Err(SpectralError::NotClosed(res));
            }
        }
        let zero = self.q_zero_mode();
        let norm = zero.l2_norm();
        if norm > tol {
            return Ok(Err(Obstruction { class: zero, norm }));
        }
        let out_idx = subsets(self.r, self.deg - 1);
        let k2 = self.k2;
        let prim = self.map_modes(self.deg - 1, |k, n| {
            if self.is_q_zero(n) {
                return vec![Complex64::new(0.0, 0.0); out_idx.len()];
            }
            let v: Vec<f64> = (0..self.r).map(|b| self.wave(n, k2 + b)).collect();
            let v2: f64 = v.iter().map(|x| x * x).sum();
            out_idx
                .iter()
                .map(|i| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (b, vb) in v.iter().enumerate() {
                        if *vb == 0.0 || i.contains(&b) {
                            continue;
                        }
                        let mut idx = vec![b];
                        idx.extend_from_slice(i);
                        acc += self.comp(k, &idx) * *vb;
                    }
                    acc * Complex64::new(0.0, 1.0 / v2)
                })
                .collect()
        });
        Ok(Ok(prim))
    }
}

/// Fourier coefficients of a symbolic leafwise form on a torus chart.
pub fn to_spectral(chart: &ChartSpec, xi: &LeafForm, n: usize) -> Result<SpectralForm, SpectralError> {
    to_spectral_on(chart, xi, Grid::for_chart(chart, n)?)
}

/// [`to_spectral`] on a given grid.
pub fn to_spectral_on(chart: &ChartSpec, xi: &LeafForm, grid: Grid) -> Result<SpectralForm, SpectralError> {
    if grid.periods.len() != chart.dim() {
        return Err(SpectralError::Mismatch(grid.periods.len(), chart.dim()));
    }
    let tape = FormTape::new(chart, &[xi]);
    let mut scratch = Vec::new();
    let mut values = vec![vec![0.0; grid.len()]; xi.c.len()];
    for k in 0..grid.len() {
        let f = tape.eval(&grid.point(k), &mut scratch).remove(0);
        for (comp, v) in f.c.iter().enumerate() {
            values[comp][k] = *v;
        }
    }
    Ok(SpectralForm::from_grid(chart.k2(), chart.r, xi.deg, grid, &values))
}

/// Average of every component of `xi` over the leaf torus through `y`, by
/// the trapezoidal rule with `2 nq + 1` nodes per leaf coordinate (exact for
/// leaf trigonometric degree at most `nq`).
pub fn fiber_average(chart: &ChartSpec, tape: &FormTape, y: &[f64], nq: usize) -> Result<Vec<f64>, SpectralError> {
    let periods: Option<Vec<f64>> = chart.periods[chart.k2()..].iter().copied().collect();
    let periods = periods.ok_or_else(|| SpectralError::NotTorus(chart.name.clone()))?;
    let grid = Grid::uniform(nq, periods);
    let mut scratch = Vec::new();
    let mut acc: Vec<f64> = Vec::new();
    for k in 0..grid.len() {
        let q = grid.point(k);
        let mut x = y.to_vec();
        x.extend_from_slice(&q.0);
        let f = tape.eval(&Point(x), &mut scratch).remove(0);
        if acc.is_empty() {
            acc = vec![0.0; f.c.len()];
        }
        for (a, v) in acc.iter_mut().zip(&f.c) {
            *a += v;
        }
    }
    let m = grid.len() as f64;
    Ok(acc.into_iter().map(|a| a / m).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::builtin_flat_torus;
    use crate::leafform::{d_f, one_form};

    #[test]
    fn single_mode() {
        let c = builtin_flat_torus();
        let s = to_spectral(&c, &Form::scalar(2, crate::expr::parse("sin(2*pi*y1)").unwrap()), 3).unwrap();
        let mut big: Vec<Vec<i64>> =
            (0..s.grid.len()).filter(|&k| s.c[0][k].norm() > 1e-12).map(|k| s.grid.freqs(k)).collect();
        big.sort();
        assert_eq!(big, vec![vec![-1, 0, 0, 0], vec![1, 0, 0, 0]]);
        let k = (0..s.grid.len()).find(|&k| s.grid.freqs(k) == vec![1, 0, 0, 0]).unwrap();
        assert!((s.c[0][k] - Complex64::new(0.0, -0.5)).norm() < 1e-14);
    }

    #[test]
    fn constant_is_zero_mode() {
        let c = builtin_flat_torus();
        let s = to_spectral(&c, &one_form(&["3", "0"]), 2).unwrap();
        assert!((s.c[0][0].re - 3.0).abs() < 1e-14);
        assert!(s.c[0][1..].iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn spectral_df_matches_symbolic() {
        let c = builtin_flat_torus();
        let xi = one_form(&["sin(2*pi*(q2 + y1))*cos(2*pi*q1)", "cos(2*pi*(q1 - y2))"]);
        let s = to_spectral(&c, &xi, 3).unwrap();
        let ds = s.d_f();
        let sym = to_spectral(&c, &d_f(&c, &xi).unwrap(), 3).unwrap();
        let diff = ds.add(&sym.scale(-1.0));
        assert!(diff.max_coeff() < 1e-9);
    }

    #[test]
    fn cos_primitive() {
        let c = builtin_flat_torus();
        let eta: LeafForm = Form { deg: 2, dim: 2, c: vec![crate::expr::parse("cos(2*pi*q1)").unwrap()] };
        let s = to_spectral(&c, &eta, 2).unwrap();
        let g = s.solve_df(1e-10, 1e-10).unwrap().unwrap();
        let want = to_spectral(&c, &one_form(&["0", "-sin(2*pi*q1)/(2*pi)"]), 2).unwrap();
        assert!(g.add(&want.scale(-1.0)).max_coeff() < 1e-12);
        assert!(g.d_f().add(&s).max_coeff() < 1e-12);
    }

    #[test]
    fn zero_mode_is_obstruction() {
        let c = builtin_flat_torus();
        let eta: LeafForm = Form { deg: 2, dim: 2, c: vec![crate::expr::parse("cos(2*pi*y1)*sin(2*pi*y2)").unwrap()] };
        let s = to_spectral(&c, &eta, 2).unwrap();
        let ob = s.solve_df(1e-10, 1e-10).unwrap().unwrap_err();
        assert!(ob.class.add(&s.scale(-1.0)).max_coeff() < 1e-14);
        assert!((ob.norm - 0.5).abs() < 1e-12);
        let zero = SpectralForm::zero(2, 2, 2, s.grid.clone());
        assert!(zero.solve_df(1e-10, 1e-10).unwrap().unwrap().max_coeff() == 0.0);
    }

    #[test]
    fn jet_interpolates() {
        let c = builtin_flat_torus();
        let xi = one_form(&["sin(2*pi*(q2 + 2*y1))", "cos(2*pi*q1)*y2*0 + cos(2*pi*y2)"]);
        let s = to_spectral(&c, &xi, 3).unwrap();
        let x = [0.13, 0.71, 0.4, 0.9];
        let j = s.jet_at(&x);
        let arg = 2.0 * PI * (x[3] + 2.0 * x[0]);
        assert!((j[0].c[0] - arg.sin()).abs() < 1e-12);
        assert!((j[1].c[0] - 4.0 * PI * arg.cos()).abs() < 1e-10);
        assert!((j[2].c[1] + 2.0 * PI * (2.0 * PI * x[1]).sin()).abs() < 1e-10);
    }

    #[test]
    fn non_torus_rejected() {
        let mut c = builtin_flat_torus();
        c.periods[0] = None;
        assert!(matches!(to_spectral(&c, &one_form(&["0", "0"]), 2), Err(SpectralError::NotTorus(_))));
    }
}

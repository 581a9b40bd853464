//! Pre-symplectic foliation charts: transverse coordinates `y`, leaf
//! coordinates `q`, the transverse form `omega_ij(y)` and the splitting
//! coefficients `R_i^alpha(y, q)`.

use crate::expr::{self, parse, Expr, Tape};
use crate::sampling;
use nalgebra::DMatrix;
use num::{BigInt, BigRational, One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::fmt;

#[derive(Debug, thiserror::Error)]
pub enum ChartError {
    #[error("schema: {0}")]
    Schema(String),
    #[error("omega[{i}][{j}]: {msg}")]
    Entry { i: usize, j: usize, msg: String },
    #[error("R[{i}][{a}]: {msg}")]
    Splitting { i: usize, a: usize, msg: String },
    #[error("omega[{i}][{j}] + omega[{j}][{i}] = {value:e} at {point}: not skew-symmetric")]
    Skew { i: usize, j: usize, value: f64, point: String },
    #[error("omega[{i}][{j}] depends on leaf coordinate `{var}`")]
    QDependence { i: usize, j: usize, var: String },
    #[error("d omega ({i},{j},{k}) = {value:e} at {point}: not closed")]
    NotClosed { i: usize, j: usize, k: usize, value: f64, point: String },
    #[error("det omega = {det:e} at {point}: degenerate")]
    Degenerate { det: f64, point: String },
    #[error("evaluation failed at {point}: {source}")]
    Eval { point: String, source: expr::EvalError },
    #[error("point {0} lies outside the chart domain")]
    OutsideDomain(String),
    #[error("parameter alpha must exceed 1, got {0}")]
    BadAlpha(String),
}

/// Chart document as read from JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChartDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub k: usize,
    pub r: usize,
    pub coords: Coords,
    #[serde(default)]
    pub periods: BTreeMap<String, Option<f64>>,
    pub omega: Vec<Vec<String>>,
    #[serde(rename = "R")]
    pub split: Vec<Vec<String>>,
    #[serde(default)]
    pub params: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub domain: BTreeMap<String, [f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Coords {
    pub y: Vec<String>,
    pub q: Vec<String>,
}

#[derive(Clone)]
pub struct ChartSpec {
    pub name: String,
    pub k: usize,
    pub r: usize,
    pub y: Vec<String>,
    pub q: Vec<String>,
    /// Per coordinate, `y` first then `q`.
    pub periods: Vec<Option<f64>>,
    /// Sampling box per coordinate; open for nonperiodic coordinates.
    pub domain: Vec<(f64, f64)>,
    /// `omega[i][j]`, parameters already substituted.
    pub omega: Vec<Vec<Expr>>,
    /// `split[i][alpha] = R_i^alpha`.
    pub split: Vec<Vec<Expr>>,
    pub params: BTreeMap<String, BigRational>,
}

impl fmt::Debug for ChartSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ChartSpec({}, k={}, r={})", self.name, self.k, self.r)
    }
}

/// Numeric values for every chart coordinate, `y` first then `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(pub Vec<f64>);

impl Point {
    pub fn y(&self, k2: usize) -> &[f64] {
        &self.0[..k2]
    }
}

impl ChartSpec {
    pub fn k2(&self) -> usize {
        2 * self.k
    }

    pub fn dim(&self) -> usize {
        self.k2() + self.r
    }

    pub fn coord_names(&self) -> Vec<String> {
        self.y.iter().chain(self.q.iter()).cloned().collect()
    }

    pub fn coord_refs(&self) -> Vec<&str> {
        self.y.iter().chain(self.q.iter()).map(|s| s.as_str()).collect()
    }

    pub fn is_torus(&self) -> bool {
        self.periods.iter().all(|p| p.is_some())
    }

    pub fn q_periodic(&self) -> bool {
        self.periods[self.k2()..].iter().all(|p| p.is_some())
    }

    /// Reduce periodic coordinates into `[0, period)`.
    pub fn reduce(&self, p: &Point) -> Point {
        Point(
            p.0.iter()
                .zip(&self.periods)
                .map(|(&x, per)| match per {
                    Some(t) => x - t * (x / t).floor(),
                    None => x,
                })
                .collect(),
        )
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.0.len() == self.dim()
            && p.0.iter().zip(&self.periods).zip(&self.domain).all(|((&x, per), &(lo, hi))| per.is_some() || (x > lo && x < hi))
    }

    pub fn describe(&self, p: &Point) -> String {
        let parts: Vec<String> = self.coord_names().iter().zip(&p.0).map(|(n, v)| format!("{n}={v}")).collect();
        format!("({})", parts.join(", "))
    }

    /// Parse `y1=0.1,q2=0.3`; unspecified coordinates default to the lower
    /// corner of the domain (midpoint for open intervals).
    pub fn parse_point(&self, s: &str) -> Result<Point, ChartError> {
        let names = self.coord_names();
        let mut v: Vec<f64> = self
            .periods
            .iter()
            .zip(&self.domain)
            .map(|(per, &(lo, hi))| if per.is_some() { 0.0 } else { 0.5 * (lo + hi) })
            .collect();
        for part in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            let (n, x) = part.split_once('=').ok_or_else(|| ChartError::Schema(format!("bad coordinate assignment `{part}`")))?;
            let i = names
                .iter()
                .position(|c| c == n.trim())
                .ok_or_else(|| ChartError::Schema(format!("unknown coordinate `{}`", n.trim())))?;
            v[i] = x.trim().parse().map_err(|_| ChartError::Schema(format!("bad number `{}`", x.trim())))?;
        }
        let p = Point(v);
        if !self.contains(&p) {
            return Err(ChartError::OutsideDomain(self.describe(&p)));
        }
        Ok(p)
    }

    /// Fixed-seed quasi-random points inside the chart domain.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<Point> {
        sampling::halton(n, self.dim(), seed)
            .into_iter()
            .map(|u| {
                Point(
                    u.iter()
                        .zip(&self.periods)
                        .zip(&self.domain)
                        .map(|((&t, per), &(lo, hi))| match per {
                            Some(_) => lo + t * (hi - lo),
                            None => lo + (hi - lo) * (1e-6 + (1.0 - 2e-6) * t),
                        })
                        .collect(),
                )
            })
            .collect()
    }

    pub fn omega_tape(&self) -> Tape {
        let es: Vec<Expr> = self.omega.iter().flatten().cloned().collect();
        Tape::compile(&es, &self.coord_refs()).expect("validated chart")
    }

    pub fn omega_at(&self, p: &Point) -> DMatrix<f64> {
        let v = self.omega_tape().eval(&p.0);
        DMatrix::from_row_slice(self.k2(), self.k2(), &v)
    }

    /// Matrix inverse of `omega_ij` at `p`; `omega^{ij}` is its `(i,j)` entry.
    pub fn omega_inverse_at(&self, p: &Point) -> Result<DMatrix<f64>, ChartError> {
        let w = self.omega_at(p);
        let det = w.determinant();
        if det.abs() <= 1e-12 {
            return Err(ChartError::Degenerate { det, point: self.describe(p) });
        }
        w.try_inverse().ok_or_else(|| ChartError::Degenerate { det, point: self.describe(p) })
    }

    /// Same chart with a new splitting.
    pub fn with_splitting(&self, split: Vec<Vec<Expr>>) -> ChartSpec {
        ChartSpec { split, ..self.clone() }
    }

    /// Check every invariant at `n` quasi-random points.
    pub fn validate(&self, n: usize, seed: u64) -> Result<(), ChartError> {
        let k2 = self.k2();
        for i in 0..k2 {
            for j in 0..k2 {
                for v in &self.q {
                    if self.omega[i][j].mentions(v) {
                        return Err(ChartError::QDependence { i, j, var: v.clone() });
                    }
                }
            }
        }
        let names = self.coord_refs();
        let tape = self.omega_tape();
        let mut dexprs = Vec::new();
        for i in 0..k2 {
            for j in 0..k2 {
                for l in 0..k2 {
                    dexprs.push(self.omega[i][j].diff(&self.y[l]));
                }
            }
        }
        let dtape = Tape::compile(&dexprs, &names).expect("validated symbols");
        let split: Vec<Expr> = self.split.iter().flatten().cloned().collect();
        let stape = Tape::compile(&split, &names).expect("validated symbols");
        for p in self.sample(n, seed) {
            let w = tape.eval_checked(&p.0).map_err(|e| ChartError::Eval { point: self.describe(&p), source: e })?;
            stape.eval_checked(&p.0).map_err(|e| ChartError::Eval { point: self.describe(&p), source: e })?;
            for i in 0..k2 {
                for j in i..k2 {
                    let s = w[i * k2 + j] + w[j * k2 + i];
                    if !(s.abs() < 1e-12) {
                        return Err(ChartError::Skew { i, j, value: s, point: self.describe(&p) });
                    }
                }
            }
            let dw = dtape.eval(&p.0);
            let d = |i: usize, j: usize, l: usize| dw[(i * k2 + j) * k2 + l];
            for i in 0..k2 {
                for j in i + 1..k2 {
                    for l in j + 1..k2 {
                        let c = d(j, l, i) + d(l, i, j) + d(i, j, l);
                        if !(c.abs() < 1e-12) {
                            return Err(ChartError::NotClosed { i, j, k: l, value: c, point: self.describe(&p) });
                        }
                    }
                }
            }
            let det = DMatrix::from_row_slice(k2, k2, &w).determinant();
            if !(det.abs() > 1e-12) {
                return Err(ChartError::Degenerate { det, point: self.describe(&p) });
            }
        }
        Ok(())
    }

    pub fn to_doc(&self) -> ChartDoc {
        let periods = self.coord_names().into_iter().zip(&self.periods).map(|(n, p)| (n, *p)).collect();
        let mut domain = BTreeMap::new();
        for (i, n) in self.coord_names().into_iter().enumerate() {
            if self.periods[i].is_none() && self.domain[i] != (0.0, 1.0) {
                domain.insert(n, [self.domain[i].0, self.domain[i].1]);
            }
        }
        ChartDoc {
            name: Some(self.name.clone()),
            k: self.k,
            r: self.r,
            coords: Coords { y: self.y.clone(), q: self.q.clone() },
            periods,
            omega: self.omega.iter().map(|row| row.iter().map(|e| e.to_string()).collect()).collect(),
            split: self.split.iter().map(|row| row.iter().map(|e| e.to_string()).collect()).collect(),
            params: self.params.iter().map(|(k, v)| (k.clone(), expr::format_rational(v))).collect(),
            domain,
        }
    }
}

/// Build a chart from a document without running the sampled checks.
pub fn chart_from_doc(doc: &ChartDoc) -> Result<ChartSpec, ChartError> {
    let k2 = 2 * doc.k;
    if doc.r < 1 {
        return Err(ChartError::Schema("r must be at least 1".into()));
    }
    if doc.coords.y.len() != k2 || doc.coords.q.len() != doc.r {
        return Err(ChartError::Schema(format!(
            "expected {} y-coordinates and {} q-coordinates, got {} and {}",
            k2,
            doc.r,
            doc.coords.y.len(),
            doc.coords.q.len()
        )));
    }
    let names: Vec<String> = doc.coords.y.iter().chain(doc.coords.q.iter()).cloned().collect();
    let mut seen = std::collections::HashSet::new();
    for n in &names {
        if !seen.insert(n) || n == "pi" {
            return Err(ChartError::Schema(format!("duplicate or reserved coordinate name `{n}`")));
        }
    }
    if doc.omega.len() != k2 || doc.omega.iter().any(|r| r.len() != k2) {
        return Err(ChartError::Schema(format!("omega must be {k2}x{k2}")));
    }
    if doc.split.len() != k2 || doc.split.iter().any(|r| r.len() != doc.r) {
        return Err(ChartError::Schema(format!("R must be {k2}x{}", doc.r)));
    }
    let mut params = BTreeMap::new();
    let mut subst = HashMap::new();
    for (n, v) in &doc.params {
        let q = expr::parse_rational(v).ok_or_else(|| ChartError::Schema(format!("parameter `{n}` is not an exact rational: `{v}`")))?;
        subst.insert(n.clone(), Expr::rational(q.clone()));
        params.insert(n.clone(), q);
    }
    let bind = |e: Expr, what: &dyn Fn(String) -> ChartError| -> Result<Expr, ChartError> {
        let e = if subst.is_empty() { e } else { e.subst(&subst) };
        for s in e.symbols() {
            if !names.contains(&s) {
                return Err(what(format!("unknown symbol `{s}`")));
            }
        }
        Ok(e)
    };
    let mut omega = Vec::with_capacity(k2);
    for (i, row) in doc.omega.iter().enumerate() {
        let mut out = Vec::with_capacity(k2);
        for (j, s) in row.iter().enumerate() {
            let e = parse(s).map_err(|e| ChartError::Entry { i, j, msg: e.to_string() })?;
            out.push(bind(e, &|msg| ChartError::Entry { i, j, msg })?);
        }
        omega.push(out);
    }
    let mut split = Vec::with_capacity(k2);
    for (i, row) in doc.split.iter().enumerate() {
        let mut out = Vec::with_capacity(doc.r);
        for (a, s) in row.iter().enumerate() {
            let e = parse(s).map_err(|e| ChartError::Splitting { i, a, msg: e.to_string() })?;
            out.push(bind(e, &|msg| ChartError::Splitting { i, a, msg })?);
        }
        split.push(out);
    }
    let mut periods = Vec::with_capacity(names.len());
    let mut domain = Vec::with_capacity(names.len());
    for n in &names {
        let per = doc.periods.get(n).copied().flatten();
        if let Some(t) = per {
            if !(t > 0.0) {
                return Err(ChartError::Schema(format!("period of `{n}` must be positive")));
            }
        }
        let dom = match (per, doc.domain.get(n)) {
            (Some(t), _) => (0.0, t),
            (None, Some(&[lo, hi])) if lo < hi => (lo, hi),
            (None, Some(_)) => return Err(ChartError::Schema(format!("empty domain for `{n}`"))),
            (None, None) => (0.0, 1.0),
        };
        periods.push(per);
        domain.push(dom);
    }
    for n in doc.periods.keys().chain(doc.domain.keys()) {
        if !names.contains(n) {
            return Err(ChartError::Schema(format!("unknown coordinate `{n}` in periods/domain")));
        }
    }
    Ok(ChartSpec {
        name: doc.name.clone().unwrap_or_else(|| "chart".into()),
        k: doc.k,
        r: doc.r,
        y: doc.coords.y.clone(),
        q: doc.coords.q.clone(),
        periods,
        domain,
        omega,
        split,
        params,
    })
}

/// Parse, build and validate at 64 sample points.
pub fn load_chart(json: &str) -> Result<ChartSpec, ChartError> {
    let doc: ChartDoc = serde_json::from_str(json).map_err(|e| ChartError::Schema(e.to_string()))?;
    let c = chart_from_doc(&doc)?;
    c.validate(sampling::VALIDATION_POINTS, sampling::default_seed())?;
    Ok(c)
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

/// Chart with coordinates `y1.., q1..`, unit periods on every coordinate,
/// and given entries.
pub fn torus_chart(name: &str, k: usize, r: usize, omega: Vec<Vec<Expr>>, split: Vec<Vec<Expr>>) -> ChartSpec {
    let n = 2 * k + r;
    ChartSpec {
        name: name.into(),
        k,
        r,
        y: names("y", 2 * k),
        q: names("q", r),
        periods: vec![Some(1.0); n],
        domain: vec![(0.0, 1.0); n],
        omega,
        split,
        params: BTreeMap::new(),
    }
}

/// Standard constant form `sum dy^{2a-1} ∧ dy^{2a}` scaled by `c`.
pub fn darboux(k: usize, c: Expr) -> Vec<Vec<Expr>> {
    let mut w = vec![vec![Expr::zero(); 2 * k]; 2 * k];
    for a in 0..k {
        w[2 * a][2 * a + 1] = c.clone();
        w[2 * a + 1][2 * a] = -c.clone();
    }
    w
}

/// The flat 4-torus `R^4/Z^4`, `omega = dy1 ∧ dy2`, zero splitting.
pub fn builtin_flat_torus() -> ChartSpec {
    torus_chart("flat-torus", 1, 2, darboux(1, Expr::one()), vec![vec![Expr::zero(); 2]; 2])
}

/// Level functions of the oscillator family in terms of `y2`.
pub fn oscillator_levels(alpha: &BigRational) -> (Expr, Expr) {
    let a = Expr::rational(alpha.clone());
    let y2 = Expr::var("y2");
    let am1 = Expr::rational(alpha - BigRational::one());
    let h1 = ((Expr::int(2) * &a - Expr::one()) / Expr::int(4) - &a * &y2) / &am1;
    let h2 = (&y2 - Expr::frac(1, 4)) / &am1;
    (h1, h2)
}

/// The oscillator chart at parameter `alpha > 1`.
pub fn builtin_oscillator(alpha: &BigRational) -> Result<ChartSpec, ChartError> {
    if *alpha <= BigRational::one() {
        return Err(ChartError::BadAlpha(expr::format_rational(alpha)));
    }
    let a = Expr::rational(alpha.clone());
    let (h1, h2) = oscillator_levels(alpha);
    let r22 = -(&a * (&h1 - &h2)) / (&a * &a * &h2 + &h1);
    let w12 = Expr::rational((BigRational::from_integer(BigInt::from(2)) * (alpha - BigRational::one())).recip());
    let lo = 0.25;
    let hi = expr::rational_to_f64(&((BigRational::from_integer(BigInt::from(2)) * alpha - BigRational::one())
        / (BigRational::from_integer(BigInt::from(4)) * alpha)));
    let mut params = BTreeMap::new();
    params.insert("alpha".to_string(), alpha.clone());
    Ok(ChartSpec {
        name: format!("oscillator(alpha={})", expr::format_rational(alpha)),
        k: 1,
        r: 2,
        y: names("y", 2),
        q: names("q", 2),
        periods: vec![None, None, Some(1.0), Some(1.0)],
        domain: vec![(0.0, 1.0), (lo, hi), (0.0, 1.0), (0.0, 1.0)],
        omega: darboux(1, w12),
        split: vec![vec![Expr::zero(), Expr::zero()], vec![Expr::zero(), r22]],
        params,
    })
}

pub fn rational(s: &str) -> Option<BigRational> {
    let q = expr::parse_rational(s)?;
    (!q.denom().is_zero()).then_some(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FLAT: &str = r#"{"k":1,"r":2,"coords":{"y":["y1","y2"],"q":["q1","q2"]},
        "periods":{"y1":1,"y2":1,"q1":1,"q2":1},
        "omega":[["0","1"],["-1","0"]],"R":[["0","0"],["0","0"]],"params":{}}"#;

    #[test]
    fn flat_document_loads() {
        let c = load_chart(FLAT).unwrap();
        assert!(c.is_torus());
        assert_eq!(c.periods, vec![Some(1.0); 4]);
        let inv = c.omega_inverse_at(&Point(vec![0.1, 0.2, 0.3, 0.4])).unwrap();
        assert_eq!(inv[(0, 1)], -1.0);
        assert_eq!(inv[(1, 0)], 1.0);
    }

    #[test]
    fn q_dependence_rejected() {
        let doc = FLAT.replace(r#"[["0","1"],["-1","0"]]"#, r#"[["0","q1"],["-q1","0"]]"#);
        assert!(matches!(load_chart(&doc), Err(ChartError::QDependence { .. })));
    }

    #[test]
    fn symmetric_omega_rejected() {
        let doc = FLAT.replace(r#"[["0","1"],["-1","0"]]"#, r#"[["0","1"],["1","0"]]"#);
        assert!(matches!(load_chart(&doc), Err(ChartError::Skew { i: 0, j: 1, .. })));
    }

    #[test]
    fn unknown_symbol_named() {
        let doc = FLAT.replace(r#"[["0","0"],["0","0"]]"#, r#"[["0","theta"],["0","0"]]"#);
        let e = load_chart(&doc).unwrap_err().to_string();
        assert!(e.contains("theta"), "{e}");
    }

    #[test]
    fn nonclosed_omega_rejected() {
        let mut c = torus_chart("k2", 2, 1, darboux(2, Expr::one()), vec![vec![Expr::zero()]; 4]);
        c.omega[0][1] = parse("1 + 0.1*sin(2*pi*y3)").unwrap();
        c.omega[1][0] = -c.omega[0][1].clone();
        assert!(matches!(c.validate(16, 7), Err(ChartError::NotClosed { .. })));
    }

    #[test]
    fn oscillator_values() {
        let a = rational("3/2").unwrap();
        let c = builtin_oscillator(&a).unwrap();
        assert!(c.omega[0][1].is_one());
        let p = Point(vec![0.1, 0.3, 0.2, 0.7]);
        assert!(c.contains(&p));
        let r22 = c.split[1][1].eval_at(&[("y2", 0.3)]).unwrap();
        assert!(r22.abs() < 1e-15);
        let (h1, h2) = oscillator_levels(&a);
        assert!((h1.eval_at(&[("y2", 0.3)]).unwrap() - 0.1).abs() < 1e-15);
        assert!((h2.eval_at(&[("y2", 0.3)]).unwrap() - 0.1).abs() < 1e-15);
        assert!(!c.contains(&Point(vec![0.1, 0.2, 0.2, 0.7])));
        assert!(c.parse_point("y2=0.2").is_err());
        let inv = c.omega_inverse_at(&p).unwrap();
        assert!((inv[(0, 1)] + 1.0).abs() < 1e-15);
        c.validate(256, 7).unwrap();
        assert!(builtin_oscillator(&rational("1").unwrap()).is_err());
    }

    #[test]
    fn doc_round_trip() {
        let c = builtin_oscillator(&rational("5/2").unwrap()).unwrap();
        let doc = c.to_doc();
        let c2 = chart_from_doc(&doc).unwrap();
        assert_eq!(c2.domain, c.domain);
        assert_eq!(c2.split[1][1].to_string(), c.split[1][1].to_string());
    }

    #[test]
    fn random_skew_inverse() {
        let mut g = sampling::rng(3);
        let mut w = vec![vec![Expr::zero(); 4]; 4];
        for i in 0..4 {
            for j in i + 1..4 {
                let v = BigRational::new(BigInt::from((sampling::uniform(&mut g, -5.0, 5.0) * 100.0) as i64), BigInt::from(100));
                w[i][j] = Expr::rational(v.clone());
                w[j][i] = Expr::rational(-v);
            }
        }
        let c = torus_chart("rand", 2, 1, w, vec![vec![Expr::zero()]; 4]);
        let p = Point(vec![0.0; 5]);
        let om = c.omega_at(&p);
        let inv = c.omega_inverse_at(&p).unwrap();
        assert!((om * inv - DMatrix::identity(4, 4)).norm() < 1e-12);
    }
}

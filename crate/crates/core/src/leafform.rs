//! Leafwise forms in the frame `f^alpha = dq^alpha − R^alpha_i dy^i`, the
//! leafwise differential, the transverse covariant derivative and the
//! curvature contraction.

use crate::chart::{ChartSpec, Point};
use crate::expr::{parse, Expr, Tape};
use crate::foliation::{horizontal_derivative, symbolic_inverse, FoliationError, TransverseField};
use crate::form::{subsets, Form, MatrixForm};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub type LeafForm = Form<Expr>;
pub type MatrixLeafForm = MatrixForm<Expr>;

#[derive(Debug, thiserror::Error)]
pub enum FormError {
    #[error("degree {0} exceeds leaf dimension {1}")]
    DegreeOverflow(usize, usize),
    #[error("form document: {0}")]
    Document(String),
    #[error(transparent)]
    Foliation(#[from] FoliationError),
}

/// `{"degree": l, "coeff": {"12": "expr", ...}}` with 1-based leaf indices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FormDoc {
    pub degree: usize,
    #[serde(default)]
    pub coeff: BTreeMap<String, String>,
}

pub fn form_from_doc(chart: &ChartSpec, doc: &FormDoc) -> Result<LeafForm, FormError> {
    let r = chart.r;
    if doc.degree > r {
        return Err(FormError::DegreeOverflow(doc.degree, r));
    }
    let mut f = Form::zero(r, doc.degree);
    let names = chart.coord_names();
    let mut subst = std::collections::HashMap::new();
    for (n, v) in &chart.params {
        subst.insert(n.clone(), Expr::rational(v.clone()));
    }
    for (key, text) in &doc.coeff {
        let idx: Vec<usize> = if doc.degree == 0 {
            if !key.is_empty() && key != "0" {
                return Err(FormError::Document(format!("degree-0 form takes the key \"\" or \"0\", got `{key}`")));
            }
            vec![]
        } else {
            key.chars()
                .map(|c| c.to_digit(10).map(|d| d as usize).filter(|&d| d >= 1 && d <= r).map(|d| d - 1))
                .collect::<Option<Vec<_>>>()
                .filter(|v| v.len() == doc.degree)
                .ok_or_else(|| FormError::Document(format!("bad multi-index `{key}`")))?
        };
        let e = parse(text).map_err(|e| FormError::Document(format!("coefficient `{key}`: {e}")))?.subst(&subst);
        for s in e.symbols() {
            if !names.contains(&s) {
                return Err(FormError::Document(format!("coefficient `{key}`: unknown symbol `{s}`")));
            }
        }
        if crate::form::sort_sign(&idx).is_none() {
            return Err(FormError::Document(format!("repeated index in `{key}`")));
        }
        let cur = f.get(&idx);
        f.set(&idx, cur + e);
    }
    Ok(f)
}

pub fn form_to_doc(f: &LeafForm) -> FormDoc {
    let mut coeff = BTreeMap::new();
    for (idx, c) in subsets(f.dim, f.deg).iter().zip(&f.c) {
        if c.is_zero() {
            continue;
        }
        let key: String = idx.iter().map(|i| char::from_digit(*i as u32 + 1, 10).unwrap()).collect();
        coeff.insert(key, c.to_string());
    }
    FormDoc { degree: f.deg, coeff }
}

/// Degree-1 form `Σ c[alpha] f^alpha` from expression strings.
pub fn one_form(cs: &[&str]) -> LeafForm {
    Form { deg: 1, dim: cs.len(), c: cs.iter().map(|s| parse(s).expect("valid expression")).collect() }
}

/// Leafwise differential `Σ_beta f^beta ∧ ∂ξ/∂q^beta`. Top-degree forms map
/// to the empty form of degree `r + 1`.
pub fn d_f_total(chart: &ChartSpec, xi: &LeafForm) -> LeafForm {
    let r = chart.r;
    let mut out = Form::zero(r, xi.deg + 1);
    if xi.deg + 1 > r {
        return out;
    }
    for (b, q) in chart.q.iter().enumerate() {
        let d = xi.map(|c| c.diff(q));
        if d.is_zero() {
            continue;
        }
        out = out.add(&Form::basis1(r, b).wedge(&d));
    }
    out
}

pub fn d_f(chart: &ChartSpec, xi: &LeafForm) -> Result<LeafForm, FormError> {
    if xi.deg >= chart.r {
        return Err(FormError::DegreeOverflow(xi.deg + 1, chart.r));
    }
    Ok(d_f_total(chart, xi))
}

/// `∇_i ξ = Y_i(ξ_I) f^I + Σ_{alpha,beta} ∂_alpha R_i^beta f^alpha ∧ ι_beta ξ`.
pub fn nabla(chart: &ChartSpec, xi: &LeafForm, i: usize) -> LeafForm {
    let r = chart.r;
    let mut out = xi.map(|c| horizontal_derivative(chart, c, i));
    if xi.deg == 0 {
        return out;
    }
    for b in 0..r {
        let ib = xi.interior(b);
        if ib.is_zero() {
            continue;
        }
        for (a, q) in chart.q.iter().enumerate() {
            let c = chart.split[i][b].diff(q);
            if c.is_zero() {
                continue;
            }
            out = out.add(&Form::basis1(r, a).wedge(&ib).scale(&c));
        }
    }
    out
}

/// Symbolic `omega^{ij}` (cofactor inverse, `2k <= 4`).
pub fn omega_inverse(chart: &ChartSpec) -> Result<Vec<Vec<Expr>>, FormError> {
    Ok(symbolic_inverse(&chart.omega)?)
}

/// Entry `(i,j) = Σ_alpha (F^alpha omega^{-1})_{ij} ι_alpha ξ`.
pub fn fsharp_contract(chart: &ChartSpec, f: &TransverseField, winv: &[Vec<Expr>], xi: &LeafForm) -> MatrixLeafForm {
    assert!(xi.deg >= 1, "contraction needs degree >= 1");
    let k2 = chart.k2();
    let iotas: Vec<LeafForm> = (0..chart.r).map(|a| xi.interior(a)).collect();
    MatrixForm::from_fn(k2, |i, j| {
        let mut acc = Form::zero(chart.r, xi.deg - 1);
        for (a, ia) in iotas.iter().enumerate() {
            if ia.is_zero() {
                continue;
            }
            let mut coef = Expr::zero();
            for m in 0..k2 {
                coef = coef + f.get(a, &[i, m]) * &winv[m][j];
            }
            if !coef.is_zero() {
                acc = acc.add(&ia.scale(&coef));
            }
        }
        acc
    })
}

/// Numeric evaluation helper for a batch of forms.
pub struct FormTape {
    tape: Tape,
    shapes: Vec<(usize, usize, usize)>,
}

impl FormTape {
    pub fn new(chart: &ChartSpec, forms: &[&LeafForm]) -> FormTape {
        let mut es = Vec::new();
        let mut shapes = Vec::new();
        for f in forms {
            shapes.push((f.deg, f.dim, f.c.len()));
            es.extend(f.c.iter().cloned());
        }
        let tape = Tape::compile(&es, &chart.coord_refs()).expect("form symbols bound by chart");
        FormTape { tape, shapes }
    }

    pub fn eval(&self, p: &Point, scratch: &mut Vec<f64>) -> Vec<Form<f64>> {
        let mut v = vec![0.0; self.tape.n_outputs()];
        self.tape.eval_into(&p.0, scratch, &mut v);
        let mut o = 0;
        self.shapes
            .iter()
            .map(|&(deg, dim, n)| {
                let f = Form { deg, dim, c: v[o..o + n].to_vec() };
                o += n;
                f
            })
            .collect()
    }
}

pub fn eval_form(chart: &ChartSpec, f: &LeafForm, p: &Point) -> Form<f64> {
    FormTape::new(chart, &[f]).eval(p, &mut Vec::new()).remove(0)
}

/// Maximum absolute coefficient over points.
pub fn max_abs(chart: &ChartSpec, f: &LeafForm, pts: &[Point]) -> f64 {
    let t = FormTape::new(chart, &[f]);
    let mut s = Vec::new();
    pts.iter().map(|p| t.eval(p, &mut s)[0].max_abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::{builtin_flat_torus, builtin_oscillator, darboux, rational, torus_chart};
    use crate::foliation::transverse_curvature;

    #[test]
    fn sine_gamma_is_closed() {
        let c = builtin_flat_torus();
        let g = one_form(&["sin(2*pi*y1)", "sin(2*pi*y2)"]);
        assert!(d_f(&c, &g).unwrap().is_zero());
    }

    #[test]
    fn local_df() {
        let mut c = builtin_flat_torus();
        c.periods = vec![None; 4];
        let xi = one_form(&["0", "q1"]);
        let d = d_f(&c, &xi).unwrap();
        assert!(d.c[0].is_one());
        assert!(matches!(d_f(&c, &d), Err(FormError::DegreeOverflow(3, 2))));
    }

    #[test]
    fn oscillator_nabla_of_constant() {
        let c = builtin_oscillator(&rational("3/2").unwrap()).unwrap();
        let xi = one_form(&["0", "5"]);
        for i in 0..2 {
            assert!(nabla(&c, &xi, i).is_zero());
        }
    }

    #[test]
    fn form_documents() {
        let c = builtin_flat_torus();
        let doc: FormDoc = serde_json::from_str(r#"{"degree":1,"coeff":{"1":"sin(2*pi*y1)","2":"q1"}}"#).unwrap();
        let f = form_from_doc(&c, &doc).unwrap();
        assert_eq!(f.c[1].to_string(), "q1");
        let back = form_to_doc(&f);
        assert_eq!(back.coeff.len(), 2);
        let bad: FormDoc = serde_json::from_str(r#"{"degree":1,"coeff":{"3":"1"}}"#).unwrap();
        assert!(form_from_doc(&c, &bad).is_err());
        let two: FormDoc = serde_json::from_str(r#"{"degree":2,"coeff":{"21":"y1"}}"#).unwrap();
        let f2 = form_from_doc(&c, &two).unwrap();
        assert_eq!(f2.c[0].to_string(), "-y1");
    }

    #[test]
    fn fsharp_vanishes_when_flat() {
        let c = builtin_flat_torus();
        let f = transverse_curvature(&c);
        let winv = omega_inverse(&c).unwrap();
        let m = fsharp_contract(&c, &f, &winv, &one_form(&["y1", "q2"]));
        assert!(m.e.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn nabla_on_top_degree_is_a_derivation() {
        let c = torus_chart(
            "curved",
            1,
            2,
            darboux(1, Expr::one()),
            vec![vec![parse("0.3*sin(2*pi*(q1 + y2))").unwrap(), parse("0.2*cos(2*pi*q2)").unwrap()], vec![parse("0.1*q1").unwrap(), parse("0").unwrap()]],
        );
        let a = one_form(&["sin(2*pi*q2)", "y1*q1"]);
        let b = one_form(&["cos(2*pi*y2)", "q2"]);
        let pts = c.sample(8, 2);
        for i in 0..2 {
            let lhs = nabla(&c, &a.wedge(&b), i);
            let rhs = nabla(&c, &a, i).wedge(&b).add(&a.wedge(&nabla(&c, &b, i)));
            assert!(max_abs(&c, &lhs.sub(&rhs), &pts) < 1e-12);
        }
    }
}

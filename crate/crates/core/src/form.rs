//! Antisymmetric multi-index storage and exterior algebra over a generic
//! coefficient ring. Leafwise forms, transverse fields and numeric jets all
//! sit on top of this.

use crate::expr::Expr;
use std::ops::{Add, Mul, Neg, Sub};

pub trait Coeff: Clone + std::fmt::Debug {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn ratio(p: i64, q: i64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn from_f64(x: f64) -> Self;
    fn one() -> Self {
        Self::ratio(1, 1)
    }
    fn scale_sign(&self, s: i32) -> Self {
        if s >= 0 {
            self.clone()
        } else {
            self.neg()
        }
    }
}

impl Coeff for f64 {
    fn zero() -> f64 {
        0.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn ratio(p: i64, q: i64) -> f64 {
        p as f64 / q as f64
    }
    fn add(&self, o: &f64) -> f64 {
        self + o
    }
    fn sub(&self, o: &f64) -> f64 {
        self - o
    }
    fn mul(&self, o: &f64) -> f64 {
        self * o
    }
    fn neg(&self) -> f64 {
        -self
    }
    fn from_f64(x: f64) -> f64 {
        x
    }
}

impl Coeff for Expr {
    fn zero() -> Expr {
        Expr::zero()
    }
    fn is_zero(&self) -> bool {
        Expr::is_zero(self)
    }
    fn ratio(p: i64, q: i64) -> Expr {
        Expr::frac(p, q)
    }
    fn add(&self, o: &Expr) -> Expr {
        self + o
    }
    fn sub(&self, o: &Expr) -> Expr {
        self - o
    }
    fn mul(&self, o: &Expr) -> Expr {
        self * o
    }
    fn neg(&self) -> Expr {
        -self
    }
    fn from_f64(x: f64) -> Expr {
        Expr::rational(num::BigRational::from_float(x).expect("finite constant"))
    }
}

/// Increasing index tuples of length `deg` drawn from `0..dim`, in
/// lexicographic order.
pub fn subsets(dim: usize, deg: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(deg);
    fn rec(start: usize, dim: usize, deg: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == deg {
            out.push(cur.clone());
            return;
        }
        for i in start..dim {
            cur.push(i);
            rec(i + 1, dim, deg, cur, out);
            cur.pop();
        }
    }
    rec(0, dim, deg, &mut cur, &mut out);
    out
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut r = 1usize;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// [`subsets`] as bit masks, same order.
pub fn subset_masks(dim: usize, deg: usize) -> Vec<u64> {
    assert!(dim <= 64, "forms on more than 64 leaf coordinates");
    let mut out = Vec::with_capacity(binomial(dim, deg));
    fn rec(start: usize, dim: usize, left: usize, cur: u64, out: &mut Vec<u64>) {
        if left == 0 {
            out.push(cur);
            return;
        }
        for i in start..=dim - left {
            rec(i + 1, dim, left - 1, cur | (1 << i), out);
        }
    }
    if deg <= dim {
        rec(0, dim, deg, 0, &mut out);
    }
    out
}

/// [`rank`] of the increasing tuple encoded by `mask`.
pub fn rank_mask(dim: usize, mask: u64) -> usize {
    let deg = mask.count_ones() as usize;
    let mut r = 0;
    let mut prev = 0;
    let mut m = mask;
    let mut p = 0;
    while m != 0 {
        let i = m.trailing_zeros() as usize;
        for j in prev..i {
            r += binomial(dim - j - 1, deg - p - 1);
        }
        prev = i + 1;
        p += 1;
        m &= m - 1;
    }
    r
}

/// Sign of the permutation sorting the concatenation of two disjoint
/// increasing tuples.
pub fn shuffle_sign(a: u64, b: u64) -> i32 {
    let mut inv = 0;
    let mut m = b;
    while m != 0 {
        let j = m.trailing_zeros();
        inv += (a >> j).count_ones();
        m &= m - 1;
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Position of an increasing tuple in [`subsets`] order.
pub fn rank(dim: usize, idx: &[usize]) -> usize {
    let deg = idx.len();
    let mut r = 0;
    let mut prev = 0;
    for (p, &i) in idx.iter().enumerate() {
        for j in prev..i {
            r += binomial(dim - j - 1, deg - p - 1);
        }
        prev = i + 1;
    }
    r
}

/// Sort an index tuple, returning the permutation sign, or `None` on a repeat.
pub fn sort_sign(idx: &[usize]) -> Option<(Vec<usize>, i32)> {
    let mut v = idx.to_vec();
    let mut sign = 1;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            } else if v[j] == v[j + 1] {
                return None;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, sign))
}

/// All permutations of `0..n` with their signs, in lexicographic order.
pub fn permutations(n: usize) -> Vec<(Vec<usize>, i32)> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    fn rec(k: usize, p: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, i32)>) {
        if k == p.len() {
            let s = sort_sign(p).map(|(_, s)| s).unwrap_or(1);
            out.push((p.clone(), s));
            return;
        }
        for i in k..p.len() {
            p.swap(k, i);
            rec(k + 1, p, out);
            p.swap(k, i);
        }
    }
    rec(0, &mut p, &mut out);
    out.sort();
    out
}

/// Antisymmetric tensor of degree `deg` over a `dim`-dimensional index
/// space, stored on increasing index tuples.
#[derive(Clone, Debug)]
pub struct Form<T> {
    pub deg: usize,
    pub dim: usize,
    pub c: Vec<T>,
}

impl<T: Coeff> Form<T> {
    pub fn zero(dim: usize, deg: usize) -> Form<T> {
        Form { deg, dim, c: vec![T::zero(); binomial(dim, deg)] }
    }

    pub fn scalar(dim: usize, v: T) -> Form<T> {
        Form { deg: 0, dim, c: vec![v] }
    }

    pub fn from_fn(dim: usize, deg: usize, mut f: impl FnMut(&[usize]) -> T) -> Form<T> {
        let c = subsets(dim, deg).iter().map(|s| f(s)).collect();
        Form { deg, dim, c }
    }

    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    /// Component at an arbitrary index tuple (antisymmetry applied).
    pub fn get(&self, idx: &[usize]) -> T {
        match sort_sign(idx) {
            None => T::zero(),
            Some((s, sign)) => self.c[rank(self.dim, &s)].scale_sign(sign),
        }
    }

    pub fn set(&mut self, idx: &[usize], v: T) {
        let (s, sign) = sort_sign(idx).expect("repeated index");
        self.c[rank(self.dim, &s)] = v.scale_sign(sign);
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    pub fn map<U: Coeff>(&self, f: impl FnMut(&T) -> U) -> Form<U> {
        Form { deg: self.deg, dim: self.dim, c: self.c.iter().map(f).collect() }
    }

    pub fn add(&self, o: &Form<T>) -> Form<T> {
        assert_eq!((self.deg, self.dim), (o.deg, o.dim), "form shape mismatch");
        Form { deg: self.deg, dim: self.dim, c: self.c.iter().zip(&o.c).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn sub(&self, o: &Form<T>) -> Form<T> {
        assert_eq!((self.deg, self.dim), (o.deg, o.dim), "form shape mismatch");
        Form { deg: self.deg, dim: self.dim, c: self.c.iter().zip(&o.c).map(|(a, b)| a.sub(b)).collect() }
    }

    pub fn neg(&self) -> Form<T> {
        self.map(|a| a.neg())
    }

    pub fn scale(&self, s: &T) -> Form<T> {
        self.map(|a| s.mul(a))
    }

    pub fn scale_sign(&self, s: i32) -> Form<T> {
        if s >= 0 {
            self.clone()
        } else {
            self.neg()
        }
    }

    /// Exterior product. Degrees beyond `dim` give the empty zero form.
    pub fn wedge(&self, o: &Form<T>) -> Form<T> {
        assert_eq!(self.dim, o.dim);
        let deg = self.deg + o.deg;
        let mut out = Form::zero(self.dim, deg);
        if deg > self.dim {
            return out;
        }
        if self.deg == 0 {
            return o.scale(&self.c[0]);
        }
        if o.deg == 0 {
            return self.map(|a| a.mul(&o.c[0]));
        }
        let a_m = subset_masks(self.dim, self.deg);
        let b_m = subset_masks(self.dim, o.deg);
        for (i, &ma) in a_m.iter().enumerate() {
            if self.c[i].is_zero() {
                continue;
            }
            for (j, &mb) in b_m.iter().enumerate() {
                if ma & mb != 0 || o.c[j].is_zero() {
                    continue;
                }
                let k = rank_mask(self.dim, ma | mb);
                let term = self.c[i].mul(&o.c[j]).scale_sign(shuffle_sign(ma, mb));
                out.c[k] = out.c[k].add(&term);
            }
        }
        out
    }

    pub fn interior(&self, beta: usize) -> Form<T> {
        assert!(self.deg >= 1, "interior product of a degree-0 form");
        let mut out: Form<T> = Form::zero(self.dim, self.deg - 1);
        let bit = 1u64 << beta;
        for (i, &m) in subset_masks(self.dim, self.deg).iter().enumerate() {
            if m & bit != 0 && !self.c[i].is_zero() {
                let p = (m & (bit - 1)).count_ones();
                let k = rank_mask(self.dim, m & !bit);
                let term = self.c[i].scale_sign(if p % 2 == 0 { 1 } else { -1 });
                out.c[k] = out.c[k].add(&term);
            }
        }
        out
    }

    /// The one-form e^beta.
    pub fn basis1(dim: usize, beta: usize) -> Form<T> {
        let mut f = Form::zero(dim, 1);
        f.c[beta] = T::one();
        f
    }
}

impl Form<f64> {
    pub fn max_abs(&self) -> f64 {
        self.c.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Square matrix whose entries are forms of a common degree; products wedge
/// the entries in order.
#[derive(Clone, Debug)]
pub struct MatrixForm<T> {
    pub n: usize,
    pub e: Vec<Form<T>>,
}

impl<T: Coeff> MatrixForm<T> {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Form<T>) -> MatrixForm<T> {
        let mut e = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                e.push(f(i, j));
            }
        }
        MatrixForm { n, e }
    }

    pub fn at(&self, i: usize, j: usize) -> &Form<T> {
        &self.e[i * self.n + j]
    }

    pub fn degree(&self) -> usize {
        self.e.first().map(|f| f.deg).unwrap_or(0)
    }

    pub fn mul(&self, o: &MatrixForm<T>) -> MatrixForm<T> {
        assert_eq!(self.n, o.n);
        let n = self.n;
        let dim = self.e[0].dim;
        let deg = self.degree() + o.degree();
        MatrixForm::from_fn(n, |i, j| {
            let mut acc = Form::zero(dim, deg);
            for m in 0..n {
                let a = self.at(i, m);
                let b = o.at(m, j);
                if a.is_zero() || b.is_zero() {
                    continue;
                }
                acc = acc.add(&a.wedge(b));
            }
            acc
        })
    }

    pub fn neg(&self) -> MatrixForm<T> {
        MatrixForm { n: self.n, e: self.e.iter().map(|f| f.neg()).collect() }
    }
}

impl Add for &Form<f64> {
    type Output = Form<f64>;
    fn add(self, o: &Form<f64>) -> Form<f64> {
        Form::add(self, o)
    }
}

impl Sub for &Form<f64> {
    type Output = Form<f64>;
    fn sub(self, o: &Form<f64>) -> Form<f64> {
        Form::sub(self, o)
    }
}

impl Neg for &Form<f64> {
    type Output = Form<f64>;
    fn neg(self) -> Form<f64> {
        Form::neg(self)
    }
}

impl Mul<f64> for &Form<f64> {
    type Output = Form<f64>;
    fn mul(self, s: f64) -> Form<f64> {
        self.map(|a| a * s)
    }
}

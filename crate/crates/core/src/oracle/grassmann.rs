//! Coisotropic subspaces near a model subspace of `(R^{2n}, omega)`.
//!
//! `R^{2n} = H ⊕ X ⊕ Ξ` with `H = C^k` (coordinates `x_1..x_k, y_1..y_k`,
//! form `Σ dx_a ∧ dy_a`), and `X, Ξ = R^{n−k}` paired by `Σ dx ∧ dξ`. The
//! model subspace is `C = H ⊕ X` with null directions `X` and complement
//! `Ξ`. A linear map `A = (A_H, A_I): C → Ξ` has graph `C_A`. `A_H` is stored
//! as a complex `k × (n−k)` matrix `M` acting by `v ↦ Re(Σ_a conj(M_aj) z_a)`.
//!
//! `C_A` is coisotropic iff `A_I − A_I^T + A_H Ω_H^{-1} A_H^T = 0`.

use super::{containment_defect, null_space, OracleError};
use crate::sampling::uniform;
use nalgebra::DMatrix;
use num::complex::Complex64;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct GrassmannPoint {
    pub n: usize,
    pub k: usize,
    pub a_h: DMatrix<Complex64>,
    pub a_i: DMatrix<f64>,
}

impl GrassmannPoint {
    pub fn zero(n: usize, k: usize) -> GrassmannPoint {
        GrassmannPoint { n, k, a_h: DMatrix::zeros(k, n - k), a_i: DMatrix::zeros(n - k, n - k) }
    }

    /// Real `(n−k) × 2k` matrix of `A_H`.
    pub fn a_h_real(&self) -> DMatrix<f64> {
        let k = self.k;
        DMatrix::from_fn(self.n - k, 2 * k, |j, c| if c < k { self.a_h[(c, j)].re } else { self.a_h[(c - k, j)].im })
    }
}

/// `Ω_H` in the basis `(x_1..x_k, y_1..y_k)`.
pub fn omega_h(k: usize) -> DMatrix<f64> {
    DMatrix::from_fn(2 * k, 2 * k, |i, j| {
        if j == i + k {
            1.0
        } else if i == j + k {
            -1.0
        } else {
            0.0
        }
    })
}

/// Left side of the coisotropy condition.
pub fn condition(gp: &GrassmannPoint) -> DMatrix<f64> {
    let ah = gp.a_h_real();
    let q = &gp.a_i - gp.a_i.transpose();
    if gp.k == 0 {
        return q;
    }
    let oinv = omega_h(gp.k).try_inverse().expect("standard form is invertible");
    q + &ah * oinv * ah.transpose()
}

/// Frobenius norm of the condition and whether it is below `1e-10`.
pub fn grassmann_is_coisotropic(gp: &GrassmannPoint) -> (bool, f64) {
    let d = condition(gp).norm();
    (d < 1e-10, d)
}

/// Full symplectic form on `H ⊕ X ⊕ Ξ`.
pub fn ambient_form(n: usize, k: usize) -> DMatrix<f64> {
    let m = n - k;
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    j.view_mut((0, 0), (2 * k, 2 * k)).copy_from(&omega_h(k));
    for a in 0..m {
        j[(2 * k + a, 2 * k + m + a)] = 1.0;
        j[(2 * k + m + a, 2 * k + a)] = -1.0;
    }
    j
}

/// Basis of `C_A` as columns.
pub fn graph_basis(gp: &GrassmannPoint) -> DMatrix<f64> {
    let (n, k) = (gp.n, gp.k);
    let m = n - k;
    let mut b = DMatrix::zeros(2 * n, n + k);
    for c in 0..n + k {
        b[(c, c)] = 1.0;
    }
    b.view_mut((2 * k + m, 0), (m, 2 * k)).copy_from(&gp.a_h_real());
    b.view_mut((2 * k + m, 2 * k), (m, m)).copy_from(&gp.a_i);
    b
}

/// Brute-force check: compute `C_A^omega` numerically and measure how far
/// it sticks out of `C_A`.
pub fn brute_force(gp: &GrassmannPoint) -> (bool, f64) {
    let b = graph_basis(gp);
    let j = ambient_form(gp.n, gp.k);
    let perp = null_space(&(b.transpose() * j), 1e-10);
    let d = containment_defect(&perp, &b);
    (d < 1e-8, d)
}

/// `(n + 3k + 1)(n − k)/2`.
pub fn dimension_formula(n: usize, k: usize) -> usize {
    (n + 3 * k + 1) * (n - k) / 2
}

fn from_params(n: usize, k: usize, theta: &[f64]) -> GrassmannPoint {
    let m = n - k;
    let mut gp = GrassmannPoint::zero(n, k);
    let mut t = 0;
    for a in 0..k {
        for j in 0..m {
            gp.a_h[(a, j)] = Complex64::new(theta[t], theta[t + 1]);
            t += 2;
        }
    }
    for i in 0..m {
        for j in 0..m {
            gp.a_i[(i, j)] = theta[t];
            t += 1;
        }
    }
    gp
}

/// Dimension of the coisotropic subspaces near the model: parameters minus
/// the rank of the linearised condition at `A = 0`, asserted to match the
/// closed formula.
pub fn grassmann_dimension(n: usize, k: usize) -> Result<usize, OracleError> {
    assert!(k <= n, "need 0 <= k <= n");
    let formula = dimension_formula(n, k);
    let m = n - k;
    let params = 2 * k * m + m * m;
    let count = if params == 0 {
        0
    } else {
        let mut jac = DMatrix::zeros(m * m, params);
        for p in 0..params {
            let mut e = vec![0.0; params];
            e[p] = 1.0;
            let plus = condition(&from_params(n, k, &e));
            e[p] = -1.0;
            let minus = condition(&from_params(n, k, &e));
            for (row, v) in (&plus - &minus).iter().enumerate() {
                jac[(row, p)] = 0.5 * v;
            }
        }
        params - jac.rank(1e-10)
    };
    if count != formula {
        return Err(OracleError::DimensionMismatch { n, k, count, formula });
    }
    Ok(count)
}

/// Random point: with probability ½ exactly coisotropic
/// (`A_I = S − ½ A_H Ω_H^{-1} A_H^T`, `S` symmetric), otherwise generic or a
/// small perturbation of a coisotropic point.
pub fn sample(n: usize, k: usize, g: &mut ChaCha8Rng) -> GrassmannPoint {
    use rand::Rng;
    let m = n - k;
    let mut gp = GrassmannPoint::zero(n, k);
    for a in 0..k {
        for j in 0..m {
            gp.a_h[(a, j)] = Complex64::new(uniform(g, -1.0, 1.0), uniform(g, -1.0, 1.0));
        }
    }
    let kind = g.random_range(0..4);
    let mut s = DMatrix::from_fn(m, m, |_, _| uniform(g, -1.0, 1.0));
    s = &s + s.transpose();
    let half = if k == 0 {
        DMatrix::zeros(m, m)
    } else {
        let ah = gp.a_h_real();
        &ah * omega_h(k).try_inverse().expect("invertible") * ah.transpose() * 0.5
    };
    gp.a_i = match kind {
        0 | 1 => s - half,
        2 => DMatrix::from_fn(m, m, |_, _| uniform(g, -1.0, 1.0)),
        _ => {
            let mut a = s - half;
            if m > 0 {
                a[(0, m - 1)] += 1e-3;
            }
            a
        }
    };
    gp
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_subspace() {
        let gp = GrassmannPoint::zero(3, 1);
        assert!(grassmann_is_coisotropic(&gp).0);
        assert!(brute_force(&gp).0);
    }

    #[test]
    fn dimensions() {
        assert_eq!(grassmann_dimension(2, 1).unwrap(), 3);
        assert_eq!(grassmann_dimension(3, 1).unwrap(), 7);
        assert_eq!(grassmann_dimension(3, 2).unwrap(), 5);
        assert_eq!(grassmann_dimension(3, 3).unwrap(), 0);
        assert_eq!(grassmann_dimension(2, 0).unwrap(), 3);
    }

    #[test]
    fn lagrangian_is_symmetric() {
        let mut gp = GrassmannPoint::zero(2, 0);
        gp.a_i = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, -1.0]);
        assert!(grassmann_is_coisotropic(&gp).0 && brute_force(&gp).0);
        gp.a_i[(0, 1)] = 2.5;
        assert!(!grassmann_is_coisotropic(&gp).0 && !brute_force(&gp).0);
    }

    #[test]
    fn agrees_with_brute_force() {
        let mut g = crate::sampling::rng(7);
        for (n, k) in [(2, 1), (3, 1), (3, 2)] {
            for _ in 0..200 {
                let gp = sample(n, k, &mut g);
                assert_eq!(grassmann_is_coisotropic(&gp).0, brute_force(&gp).0);
            }
        }
    }
}

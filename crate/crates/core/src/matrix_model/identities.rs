//! Pointwise identities in the matrix model: the SL(2) factorization, the
//! Cayley transform, the complex Jacobian, and the transformation laws of
//! the scalar weight `Q` and kernel `K`.
//!
//! Scalar multipliers are integer powers `m(g, z) = det(k_minus)^n`. For
//! these `Q(z) = h(z, z)^n` and `K(z, w) = h(z, w)^(-n)`; the complex Jacobian
//! is `det(k_minus)^(-(p+q))` on SU(p,q), i.e. `n = -(p+q)`.

use serde::Serialize;

use super::{automorphy_factor, c, h_polynomial, hc_factorize, max_abs, mobius_action, BlockMatrixElement, CMatrix, C64};
use crate::error::Result;

/// Relative residual of
/// `exp t(e+f) = exp(tanh t e) exp(-log cosh t h) exp(tanh t f)` in 2x2
/// matrices. For `|t| > 20` both sides are divided by `cosh t` first.
pub fn verify_sl2_identity(t: f64) -> f64 {
    let th = t.tanh();
    // sech computed without overflow.
    let e = (-t.abs()).exp();
    let sech = 2.0 * e / (1.0 + e * e);
    let (lhs, rhs) = if t.abs() <= 20.0 {
        let (ch, sh) = (t.cosh(), t.sinh());
        let lhs = [[ch, sh], [sh, ch]];
        let rhs = [[sech + th * ch * th, th * ch], [ch * th, ch]];
        (lhs, rhs)
    } else {
        let lhs = [[1.0, th], [th, 1.0]];
        let rhs = [[sech * sech + th * th, th], [th, 1.0]];
        (lhs, rhs)
    };
    let mut res: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for i in 0..2 {
        for j in 0..2 {
            res = res.max((lhs[i][j] - rhs[i][j]).abs());
            scale = scale.max(lhs[i][j].abs());
        }
    }
    res / scale
}

fn e_plus(p: usize, q: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(p + q, p + q);
    m[(j, p + j)] = c(1.0, 0.0);
    m
}

fn e_minus(p: usize, q: usize, j: usize) -> CMatrix {
    e_plus(p, q, j).transpose()
}

fn h_j(p: usize, q: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(p + q, p + q);
    m[(j, j)] = c(1.0, 0.0);
    m[(p + j, p + j)] = c(-1.0, 0.0);
    m
}

/// Conjugates each `e_j + e_{-j}` (`j < r`) by `exp(pi/4 sum (e_j - e_{-j}))`
/// and returns the largest component outside the span of the `h_j`.
pub fn cayley_verify(p: usize, q: usize, r: usize) -> f64 {
    let mut x = CMatrix::zeros(p + q, p + q);
    for j in 0..r {
        x += e_plus(p, q, j) - e_minus(p, q, j);
    }
    let cay = (x * c(std::f64::consts::FRAC_PI_4, 0.0)).exp();
    let cay_inv = cay.adjoint();
    let mut worst: f64 = 0.0;
    for j in 0..r {
        let y = &cay * (e_plus(p, q, j) + e_minus(p, q, j)) * &cay_inv;
        let mut rest = y.clone();
        for k in 0..r {
            let coef = (y[(k, k)] - y[(p + k, p + k)]) * 0.5;
            rest -= h_j(p, q, k) * coef;
        }
        worst = worst.max(max_abs(&rest) / max_abs(&y).max(1.0));
    }
    worst
}

/// Complex Jacobian determinant of `z -> g z` at `z` by central differences
/// with step `step` on each complex coordinate.
pub fn jacobian_by_differences(g: &BlockMatrixElement, z: &CMatrix, step: f64) -> Result<C64> {
    let (p, q) = (g.p(), g.q());
    let n = p * q;
    let mut jac = CMatrix::zeros(n, n);
    for l in 0..n {
        let mut dz = CMatrix::zeros(p, q);
        dz[(l / q, l % q)] = c(step, 0.0);
        let fwd = mobius_action(g, &(z + &dz))?;
        let bwd = mobius_action(g, &(z - &dz))?;
        let col = (fwd - bwd) / c(2.0 * step, 0.0);
        for k in 0..n {
            jac[(k, l)] = col[(k / q, k % q)];
        }
    }
    Ok(jac.determinant())
}

/// `det(k_plus)^q det(k_minus)^(-p)`, the Jacobian of `z -> g z` read off
/// from the automorphy factor (`dw = k_plus dz k_minus^(-1)`).
pub fn jacobian_from_factor(g: &BlockMatrixElement, z: &CMatrix) -> Result<C64> {
    let (kp, km) = automorphy_factor(g, z)?;
    Ok(kp.determinant().powi(g.q() as i32) * km.determinant().powi(-(g.p() as i32)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JacobianCheck {
    pub finite_difference: f64,
    /// `prod (1 - tanh^2 t_j)^((p+q)/2)`.
    pub formula: f64,
    pub residual: f64,
}

/// Finite-difference Jacobian of `z -> a(t) z` at the origin against
/// `prod (1 - x_j^2)^((p+q)/2)` with `x_j = tanh t_j`.
pub fn jacobian_at_origin(p: usize, q: usize, t: &[f64]) -> Result<JacobianCheck> {
    let a = BlockMatrixElement::a_of_t(p, q, t)?;
    let fd = jacobian_by_differences(&a, &CMatrix::zeros(p, q), 1e-5)?;
    let formula: f64 = t.iter().map(|x| (1.0 - x.tanh().powi(2)).powf((p + q) as f64 / 2.0)).product();
    let residual = (fd - c(formula, 0.0)).norm() / formula.max(1e-300);
    Ok(JacobianCheck { finite_difference: fd.re, formula, residual })
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}

/// Relative residual of `Q(g z) = |m(g, z)|^(-2) Q(z)` for
/// `m = det(k_minus)^n`, `Q = h(z, z)^n`.
pub fn verify_q_transformation(g: &BlockMatrixElement, z: &CMatrix, n: i32) -> Result<f64> {
    let f = hc_factorize(g, z)?;
    let m = f.k_minus.determinant().powi(n);
    let q_gz = h_polynomial(&f.w, &f.w).powi(n);
    let q_z = h_polynomial(z, z).powi(n);
    Ok(rel(q_gz, q_z / m.norm_sqr()))
}

/// Relative residual of `K(g z, g w) = m(g, z) K(z, w) conj(m(g, w))` for
/// `K = h^(-n)`, `m = det(k_minus)^n`.
pub fn verify_kernel_transformation(g: &BlockMatrixElement, z: &CMatrix, w: &CMatrix, n: i32) -> Result<f64> {
    let fz = hc_factorize(g, z)?;
    let fw = hc_factorize(g, w)?;
    let mz = fz.k_minus.determinant().powi(n);
    let mw = fw.k_minus.determinant().powi(n);
    let lhs = h_polynomial(&fz.w, &fw.w).powi(-n);
    let rhs = mz * h_polynomial(z, w).powi(-n) * mw.conj();
    Ok(rel(lhs, rhs))
}

/// `Q(a(t) 0)` obtained from `Q(g 0) = |m(g, 0)|^(-2) Q(0)` with the Jacobian
/// multiplier, compared with `prod (1 - x_j^2)^(-(p+q))` and with the
/// opposite sign `prod (1 - x_j^2)^(p+q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QSignDiagnostic {
    pub q_from_jacobian: f64,
    pub residual_negative_exponent: f64,
    pub residual_positive_exponent: f64,
}

pub fn q_sign_diagnostic(p: usize, q: usize, t: &[f64]) -> Result<QSignDiagnostic> {
    let a = BlockMatrixElement::a_of_t(p, q, t)?;
    let jac = jacobian_from_factor(&a, &CMatrix::zeros(p, q))?;
    let q_val = 1.0 / jac.norm_sqr();
    let base: f64 = t.iter().map(|x| 1.0 - x.tanh().powi(2)).product();
    let genus = (p + q) as i32;
    let neg = base.powi(-genus);
    let pos = base.powi(genus);
    Ok(QSignDiagnostic {
        q_from_jacobian: q_val,
        residual_negative_exponent: (q_val - neg).abs() / neg,
        residual_positive_exponent: (q_val - pos).abs() / q_val.max(pos),
    })
}

#[cfg(test)]
mod tests {
    use super::super::{random_domain_point, random_k, random_su};
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sl2_identity() {
        assert_eq!(verify_sl2_identity(0.0), 0.0);
        assert!(verify_sl2_identity(1.0) < 1e-12);
        for t in [-5.0, -2.5, 0.1, 3.0, 5.0] {
            assert!(verify_sl2_identity(t) < 1e-12, "{t}");
        }
        assert!(verify_sl2_identity(10.0) < 1e-8);
        assert!(verify_sl2_identity(300.0) < 1e-12);
        assert!(verify_sl2_identity(-1e4) < 1e-12);
    }

    #[test]
    fn sl2_identity_against_matrix_products() {
        let t: f64 = 1.3;
        let (th, ch) = (t.tanh(), t.cosh());
        let u = nalgebra::Matrix2::new(1.0, th, 0.0, 1.0);
        let d = nalgebra::Matrix2::new(1.0 / ch, 0.0, 0.0, ch);
        let l = nalgebra::Matrix2::new(1.0, 0.0, th, 1.0);
        let lhs = (nalgebra::Matrix2::new(0.0, t, t, 0.0)).exp();
        assert!((lhs - u * d * l).abs().max() < 1e-14);
    }

    #[test]
    fn cayley_examples() {
        assert!(cayley_verify(1, 1, 1) < 1e-14);
        assert!(cayley_verify(2, 2, 2) < 1e-14);
        assert!(cayley_verify(2, 3, 2) < 1e-14);
        // r = 1 image of [[0, 1], [1, 0]] is diag(1, -1).
        let x = (e_plus(1, 1, 0) - e_minus(1, 1, 0)) * c(std::f64::consts::FRAC_PI_4, 0.0);
        let cay = x.exp();
        let y = &cay * (e_plus(1, 1, 0) + e_minus(1, 1, 0)) * cay.adjoint();
        assert!(max_abs(&(y.clone() - h_j(1, 1, 0))) < 1e-15 || max_abs(&(y + h_j(1, 1, 0))) < 1e-15);
        // An element commuting with e_0 - e_{-0} is fixed.
        let mut x = CMatrix::zeros(4, 4);
        for j in 0..2 {
            x += e_plus(2, 2, j) - e_minus(2, 2, j);
        }
        let cay = (x * c(std::f64::consts::FRAC_PI_4, 0.0)).exp();
        let z = e_plus(2, 2, 1) - e_minus(2, 2, 1);
        let conj = &cay * &z * cay.adjoint();
        assert!(max_abs(&(conj - z)) < 1e-15);
    }

    #[test]
    fn jacobian_examples() {
        let j = jacobian_at_origin(2, 3, &[0.0, 0.0]).unwrap();
        assert!((j.finite_difference - 1.0).abs() < 1e-9);
        let j = jacobian_at_origin(1, 1, &[1.0]).unwrap();
        let sech2 = 1.0 / 1f64.cosh().powi(2);
        assert!((j.formula - sech2).abs() < 1e-15);
        assert!(j.residual < 1e-6);
        let mut r = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let t = [rand::Rng::random_range(&mut r, -1.0..1.0), rand::Rng::random_range(&mut r, -1.0..1.0)];
            assert!(jacobian_at_origin(2, 2, &t).unwrap().residual < 1e-6);
        }
    }

    #[test]
    fn jacobian_factor_matches_differences() {
        let mut r = ChaCha8Rng::seed_from_u64(4);
        for (p, q) in [(1, 1), (1, 2), (2, 2), (2, 3)] {
            let g = random_su(p, q, 1.0, &mut r);
            let z = random_domain_point(p, q, 0.7, &mut r);
            let fd = jacobian_by_differences(&g, &z, 1e-5).unwrap();
            let an = jacobian_from_factor(&g, &z).unwrap();
            assert!((fd - an).norm() < 1e-6 * an.norm().max(1.0), "{p},{q}");
            // With det g = 1 this is det(k_minus)^(-(p+q)).
            let km = automorphy_factor(&g, &z).unwrap().1.determinant();
            assert!((an - km.powi(-((p + q) as i32))).norm() < 1e-9 * an.norm());
        }
    }

    #[test]
    fn q_and_kernel_laws() {
        let mut r = ChaCha8Rng::seed_from_u64(5);
        let id = BlockMatrixElement::identity(1, 1);
        let z = random_domain_point(1, 1, 0.9, &mut r);
        assert_eq!(verify_q_transformation(&id, &z, 2).unwrap(), 0.0);
        let w = random_domain_point(1, 1, 0.9, &mut r);
        assert_eq!(verify_kernel_transformation(&id, &z, &w, 3).unwrap(), 0.0);
        for (p, q) in [(1, 1), (1, 2), (2, 2), (2, 3)] {
            for n in [-4, -1, 1, 2, 5] {
                let g = random_su(p, q, 1.2, &mut r);
                let z = random_domain_point(p, q, 0.9, &mut r);
                let w = random_domain_point(p, q, 0.9, &mut r);
                assert!(verify_q_transformation(&g, &z, n).unwrap() < 1e-10);
                assert!(verify_kernel_transformation(&g, &z, &w, n).unwrap() < 1e-10);
            }
            // K(z, 0) = 1 and Hermitian symmetry.
            let z = random_domain_point(p, q, 0.9, &mut r);
            let w = random_domain_point(p, q, 0.9, &mut r);
            assert!((h_polynomial(&z, &CMatrix::zeros(p, q)) - c(1.0, 0.0)).norm() < 1e-15);
            assert!((h_polynomial(&z, &w) - h_polynomial(&w, &z).conj()).norm() < 1e-14);
            // Q(kz) = Q(z) for k in K.
            let k = random_k(p, q, &mut r);
            assert!(verify_q_transformation(&k, &z, 3).unwrap() < 1e-12);
        }
    }

    #[test]
    fn disc_q_identity() {
        // (1 - |gz|^2) = |g'(z)| (1 - |z|^2) on the disc.
        let mut r = ChaCha8Rng::seed_from_u64(6);
        let g = random_su(1, 1, 1.0, &mut r);
        let z = random_domain_point(1, 1, 0.9, &mut r);
        let w = mobius_action(&g, &z).unwrap();
        let cz_d = g.c()[(0, 0)] * z[(0, 0)] + g.d()[(0, 0)];
        let lhs = 1.0 - w[(0, 0)].norm_sqr();
        let rhs = (1.0 - z[(0, 0)].norm_sqr()) / cz_d.norm_sqr();
        assert!((lhs - rhs).abs() < 1e-14);
        assert!(verify_q_transformation(&g, &z, 2).unwrap() < 1e-12);
    }

    #[test]
    fn q_sign() {
        let d = q_sign_diagnostic(2, 2, &[0.4, 0.9]).unwrap();
        assert!(d.residual_negative_exponent < 1e-12);
        assert!(d.residual_positive_exponent > 0.5);
    }
}

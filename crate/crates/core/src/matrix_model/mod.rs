//! SU(p,q) in block form with `eta = diag(I_p, -I_q)`. The bounded domain is
//! the set of `p x q` matrices `z` with `|z| < 1`, `P+` acts by translation
//! `[[I, z], [0, I]]`, and the factorization `g exp(z) = exp(gz) J(g,z) p-`
//! is read off from the blocks of `g [[I, z], [0, I]]`.

mod disc;
mod identities;

pub use disc::{
    disc_norm_invariance, invariant_measure_check, monomial_norm_sq, reproducing_kernel_batch,
    verify_reproducing_kernel_disc, DiscReproduction,
    MonteCarloCheck,
};
pub use identities::{
    cayley_verify, jacobian_at_origin, jacobian_by_differences, jacobian_from_factor, q_sign_diagnostic,
    verify_kernel_transformation, verify_q_transformation, verify_sl2_identity, QSignDiagnostic,
};

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type C64 = nalgebra::Complex<f64>;
pub type CMatrix = DMatrix<C64>;

pub const MEMBERSHIP_TOL: f64 = 1e-10;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Largest absolute entry.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `max |a - b| / max(1, max |a|)`.
pub fn rel_residual(a: &CMatrix, b: &CMatrix) -> f64 {
    max_abs(&(a - b)) / max_abs(a).max(1.0)
}

pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}

fn eta(p: usize, q: usize) -> CMatrix {
    CMatrix::from_fn(p + q, p + q, |i, j| {
        if i != j {
            c(0.0, 0.0)
        } else if i < p {
            c(1.0, 0.0)
        } else {
            c(-1.0, 0.0)
        }
    })
}

/// An element of U(p,q), stored as a full `(p+q) x (p+q)` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMatrixElement {
    p: usize,
    q: usize,
    m: CMatrix,
}

impl BlockMatrixElement {
    /// Checks `g* eta g = eta` to [`MEMBERSHIP_TOL`] (relative).
    pub fn new(p: usize, q: usize, m: CMatrix) -> Result<Self> {
        let g = Self::new_unchecked(p, q, m)?;
        let res = g.membership_residual();
        if res > MEMBERSHIP_TOL {
            return Err(Error::Configuration(format!("not in U({p},{q}): residual {res:e}")));
        }
        Ok(g)
    }

    /// Any invertible block matrix; the factorization still applies on the
    /// open cell.
    pub fn new_unchecked(p: usize, q: usize, m: CMatrix) -> Result<Self> {
        if m.nrows() != p + q || m.ncols() != p + q {
            return Err(Error::DimensionMismatch { expected: p + q, got: m.nrows() });
        }
        Ok(Self { p, q, m })
    }

    pub fn identity(p: usize, q: usize) -> Self {
        Self { p, q, m: CMatrix::identity(p + q, p + q) }
    }

    pub fn from_blocks(a: &CMatrix, b: &CMatrix, cc: &CMatrix, d: &CMatrix) -> Result<Self> {
        let (p, q) = (a.nrows(), d.nrows());
        let mut m = CMatrix::zeros(p + q, p + q);
        m.view_mut((0, 0), (p, p)).copy_from(a);
        m.view_mut((0, p), (p, q)).copy_from(b);
        m.view_mut((p, 0), (q, p)).copy_from(cc);
        m.view_mut((p, p), (q, q)).copy_from(d);
        Self::new(p, q, m)
    }

    /// Block-diagonal `diag(u1, u2)`, an element of `K`.
    pub fn block_diag(u1: &CMatrix, u2: &CMatrix) -> Result<Self> {
        let (p, q) = (u1.nrows(), u2.nrows());
        Self::from_blocks(u1, &CMatrix::zeros(p, q), &CMatrix::zeros(q, p), u2)
    }

    /// `exp(u) = [[I, u], [0, I]]` in `P+` (not in U(p,q)).
    pub fn translation(u: &CMatrix) -> Self {
        let (p, q) = (u.nrows(), u.ncols());
        let mut m = CMatrix::identity(p + q, p + q);
        m.view_mut((0, p), (p, q)).copy_from(u);
        Self { p, q, m }
    }

    /// `a(t)`: hyperbolic rotations by `t_j` in the planes `(j, p+j)`.
    pub fn a_of_t(p: usize, q: usize, t: &[f64]) -> Result<Self> {
        if t.len() > p.min(q) {
            return Err(Error::DimensionMismatch { expected: p.min(q), got: t.len() });
        }
        let mut m = CMatrix::identity(p + q, p + q);
        for (j, &tj) in t.iter().enumerate() {
            m[(j, j)] = c(tj.cosh(), 0.0);
            m[(p + j, p + j)] = c(tj.cosh(), 0.0);
            m[(j, p + j)] = c(tj.sinh(), 0.0);
            m[(p + j, j)] = c(tj.sinh(), 0.0);
        }
        Ok(Self { p, q, m })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn a(&self) -> CMatrix {
        self.m.view((0, 0), (self.p, self.p)).into_owned()
    }

    pub fn b(&self) -> CMatrix {
        self.m.view((0, self.p), (self.p, self.q)).into_owned()
    }

    pub fn c(&self) -> CMatrix {
        self.m.view((self.p, 0), (self.q, self.p)).into_owned()
    }

    pub fn d(&self) -> CMatrix {
        self.m.view((self.p, self.p), (self.q, self.q)).into_owned()
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self { p: self.p, q: self.q, m: &self.m * &other.m }
    }

    pub fn inverse(&self) -> Result<Self> {
        let m = self.m.clone().try_inverse().ok_or(Error::SingularMatrix)?;
        Ok(Self { p: self.p, q: self.q, m })
    }

    pub fn determinant(&self) -> C64 {
        self.m.determinant()
    }

    /// `max |g* eta g - eta| / max(1, |g|^2)`.
    pub fn membership_residual(&self) -> f64 {
        let e = eta(self.p, self.q);
        let lhs = self.m.adjoint() * &e * &self.m;
        max_abs(&(lhs - e)) / max_abs(&self.m).powi(2).max(1.0)
    }
}

/// A point `z` of the bounded domain: a `p x q` matrix with spectral norm
/// below 1.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainPoint {
    z: CMatrix,
}

impl DomainPoint {
    pub fn new(z: CMatrix) -> Result<Self> {
        let n = spectral_norm(&z);
        if n >= 1.0 {
            return Err(Error::Configuration(format!("spectral norm {n} is not below 1")));
        }
        Ok(Self { z })
    }

    pub fn origin(p: usize, q: usize) -> Self {
        Self { z: CMatrix::zeros(p, q) }
    }

    /// `sum x_j e_j`: `x` on the leading diagonal.
    pub fn diagonal(p: usize, q: usize, x: &[f64]) -> Result<Self> {
        let mut z = CMatrix::zeros(p, q);
        for (j, &xj) in x.iter().enumerate() {
            z[(j, j)] = c(xj, 0.0);
        }
        Self::new(z)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.z
    }

    pub fn into_matrix(self) -> CMatrix {
        self.z
    }
}

/// `g exp(z) = exp(w) diag(k_plus, k_minus) [[I, 0], [y, I]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorizationResult {
    pub w: CMatrix,
    pub k_plus: CMatrix,
    pub k_minus: CMatrix,
    pub y: CMatrix,
    /// Relative reassembly residual.
    pub residual: f64,
}

/// Below this `|det D'| / |D'|^q` the lower-right block is treated as
/// singular.
const CELL_TOL: f64 = 1e-13;

pub fn hc_factorize(g: &BlockMatrixElement, z: &CMatrix) -> Result<FactorizationResult> {
    let (p, q) = (g.p, g.q);
    if z.nrows() != p || z.ncols() != q {
        return Err(Error::DimensionMismatch { expected: p * q, got: z.len() });
    }
    let m = &g.m * BlockMatrixElement::translation(z).m;
    let a1 = m.view((0, 0), (p, p)).into_owned();
    let b1 = m.view((0, p), (p, q)).into_owned();
    let c1 = m.view((p, 0), (q, p)).into_owned();
    let d1 = m.view((p, p), (q, q)).into_owned();
    let scale = max_abs(&d1).max(f64::MIN_POSITIVE).powi(q as i32);
    if d1.determinant().norm() <= CELL_TOL * scale {
        return Err(Error::OutsideOpenCell);
    }
    let d_inv = d1.clone().try_inverse().ok_or(Error::OutsideOpenCell)?;
    let w = &b1 * &d_inv;
    let y = &d_inv * &c1;
    let k_plus = &a1 - &w * &c1;
    let k_minus = d1;

    let mut lower = CMatrix::identity(p + q, p + q);
    lower.view_mut((p, 0), (q, p)).copy_from(&y);
    let mut mid = CMatrix::zeros(p + q, p + q);
    mid.view_mut((0, 0), (p, p)).copy_from(&k_plus);
    mid.view_mut((p, p), (q, q)).copy_from(&k_minus);
    let re = BlockMatrixElement::translation(&w).m * mid * lower;
    let residual = rel_residual(&m, &re);
    Ok(FactorizationResult { w, k_plus, k_minus, y, residual })
}

/// `g z = (A z + B)(C z + D)^(-1)`.
pub fn mobius_action(g: &BlockMatrixElement, z: &CMatrix) -> Result<CMatrix> {
    Ok(hc_factorize(g, z)?.w)
}

/// The canonical automorphy factor `J(g, z) = diag(k_plus, k_minus)`.
pub fn automorphy_factor(g: &BlockMatrixElement, z: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    let f = hc_factorize(g, z)?;
    Ok((f.k_plus, f.k_minus))
}

/// `h(z, w) = det(I - z w*)`.
pub fn h_polynomial(z: &CMatrix, w: &CMatrix) -> C64 {
    let p = z.nrows();
    (CMatrix::identity(p, p) - z * w.adjoint()).determinant()
}

pub fn random_unitary<R: Rng>(n: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// A random element of `K ∩ SU(p,q)`: `diag(u1, u2)` with `det = 1`.
pub fn random_k<R: Rng>(p: usize, q: usize, rng: &mut R) -> BlockMatrixElement {
    let u1 = random_unitary(p, rng);
    let mut u2 = random_unitary(q, rng);
    let det = u1.determinant() * u2.determinant();
    let fix = C64::from_polar(1.0, -det.arg() / q as f64);
    u2 *= fix;
    BlockMatrixElement::block_diag(&u1, &u2).expect("unitary blocks")
}

/// `k a(t) k'` with `t_j` uniform in `[-t_max, t_max]`.
pub fn random_su<R: Rng>(p: usize, q: usize, t_max: f64, rng: &mut R) -> BlockMatrixElement {
    let r = p.min(q);
    let t: Vec<f64> = (0..r).map(|_| rng.random_range(-t_max..=t_max)).collect();
    let a = BlockMatrixElement::a_of_t(p, q, &t).expect("r <= min(p,q)");
    random_k(p, q, rng).mul(&a).mul(&random_k(p, q, rng))
}

/// A random point with spectral norm uniform in `[0, rho_max)`.
pub fn random_domain_point<R: Rng>(p: usize, q: usize, rho_max: f64, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(p, q, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let n = spectral_norm(&g);
    let rho: f64 = rng.random_range(0.0..rho_max);
    g * c(rho / n, 0.0)
}

/// Relative residual of the cocycle identity `J(g g1, z) = J(g, g1 z) J(g1, z)`,
/// maximized over both blocks.
pub fn cocycle_residual(g: &BlockMatrixElement, g1: &BlockMatrixElement, z: &CMatrix) -> Result<f64> {
    let (kp, km) = automorphy_factor(&g.mul(g1), z)?;
    let z1 = mobius_action(g1, z)?;
    let (kp_a, km_a) = automorphy_factor(g, &z1)?;
    let (kp_b, km_b) = automorphy_factor(g1, z)?;
    Ok(rel_residual(&kp, &(kp_a * kp_b)).max(rel_residual(&km, &(km_a * km_b))))
}

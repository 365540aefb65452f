//! Monte Carlo checks on the unit disc (`SU(1,1)`, `p = q = 1`): the
//! reproducing property of `K(z, w) = (1 - z conj(w))^(-k)` against the
//! weighted measure `(k-1)/pi (1 - |z|^2)^(k-2)`, invariance of
//! `(1 - |z|^2)^(-2) dz`, and unitarity of `f -> (cz+d)^(-k) f(g^(-1) z)`.
//!
//! Samples are uniform in the disc by rejection from the square, drawn from
//! ChaCha8 streams (one per chunk) so results depend only on the seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use super::{c, BlockMatrixElement, C64};
use crate::error::{Error, Result};

/// Rotations averaged per sample in the reproducing-kernel estimator.
pub const ROTATIONS: usize = 32;
const CHUNK: usize = 1 << 15;

fn ser_c64<S: Serializer>(z: &C64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

fn ser_c64_vec<S: Serializer>(v: &[C64], s: S) -> std::result::Result<S::Ok, S::Error> {
    v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>().serialize(s)
}

fn for_each_sample<F: FnMut(C64)>(samples: usize, seed: u64, mut f: F) {
    for chunk in 0..samples.div_ceil(CHUNK) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(chunk as u64);
        let n = CHUNK.min(samples - chunk * CHUNK);
        let mut got = 0;
        while got < n {
            let x: f64 = rng.random_range(-1.0..1.0);
            let y: f64 = rng.random_range(-1.0..1.0);
            if x * x + y * y < 1.0 {
                f(c(x, y));
                got += 1;
            }
        }
    }
}

fn poly(coeffs: &[C64], z: C64) -> C64 {
    coeffs.iter().rev().fold(c(0.0, 0.0), |acc, a| acc * z + a)
}

/// Reproducing-kernel estimate of `f(w)` for a polynomial `f`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscReproduction {
    pub k: u32,
    #[serde(serialize_with = "ser_c64")]
    pub w: C64,
    #[serde(serialize_with = "ser_c64_vec")]
    pub coefficients: Vec<C64>,
    #[serde(serialize_with = "ser_c64")]
    pub estimate: C64,
    #[serde(serialize_with = "ser_c64")]
    pub exact: C64,
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
}

impl DiscReproduction {
    pub fn error(&self) -> f64 {
        (self.estimate - self.exact).norm()
    }

    /// `|estimate - f(w)| <= rel * max(|f(w)|, floor)`.
    pub fn within(&self, rel: f64, floor: f64) -> bool {
        self.error() <= rel * self.exact.norm().max(floor)
    }
}

/// Estimates `(k-1)/pi int f(z) conj(K(z, w)) (1-|z|^2)^(k-2) dz` for every
/// combination of weight, polynomial and point, sharing one set of samples.
/// Results are ordered by `k`, then `w`, then `f`.
pub fn reproducing_kernel_batch(
    ks: &[u32],
    fs: &[Vec<C64>],
    ws: &[C64],
    samples: usize,
    seed: u64,
) -> Result<Vec<DiscReproduction>> {
    if samples == 0 {
        return Err(Error::Configuration("at least one sample is required".into()));
    }
    if let Some(k) = ks.iter().find(|&&k| k < 2) {
        return Err(Error::Configuration(format!("weight k = {k} must be at least 2")));
    }
    if let Some(w) = ws.iter().find(|w| w.norm() >= 1.0) {
        return Err(Error::Configuration(format!("point {w} is not in the open disc")));
    }
    let (nk, nw, nf) = (ks.len(), ws.len(), fs.len());
    let deg = fs.iter().map(|f| f.len()).max().unwrap_or(0);
    let rot: Vec<C64> = (0..ROTATIONS)
        .map(|l| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * l as f64 / ROTATIONS as f64))
        .collect();
    let mut avg = vec![c(0.0, 0.0); nk * nw * nf];
    let mut sum = vec![c(0.0, 0.0); nk * nw * nf];
    let mut sum_sq = vec![0.0; nk * nw * nf];
    let mut fvals = vec![c(0.0, 0.0); nf];
    let mut pows = vec![c(0.0, 0.0); deg];
    for_each_sample(samples, seed, |z| {
        avg.iter_mut().for_each(|a| *a = c(0.0, 0.0));
        for r in &rot {
            let zr = z * r;
            let mut pw = c(1.0, 0.0);
            for p in pows.iter_mut() {
                *p = pw;
                pw *= zr;
            }
            for (fv, f) in fvals.iter_mut().zip(fs) {
                *fv = f.iter().zip(&pows).map(|(a, p)| a * p).sum();
            }
            for (iw, w) in ws.iter().enumerate() {
                let base = (c(1.0, 0.0) - w * zr.conj()).inv();
                for (ik, &k) in ks.iter().enumerate() {
                    let kern = base.powi(k as i32);
                    let off = (ik * nw + iw) * nf;
                    for (a, fv) in avg[off..off + nf].iter_mut().zip(&fvals) {
                        *a += fv * kern;
                    }
                }
            }
        }
        let one_minus = 1.0 - z.norm_sqr();
        for (ik, &k) in ks.iter().enumerate() {
            let weight = one_minus.powi(k as i32 - 2) / ROTATIONS as f64;
            for j in ik * nw * nf..(ik + 1) * nw * nf {
                let v = avg[j] * weight;
                sum[j] += v;
                sum_sq[j] += v.norm_sqr();
            }
        }
    });
    let n = samples as f64;
    let mut out = Vec::with_capacity(nk * nw * nf);
    for (ik, &k) in ks.iter().enumerate() {
        for (iw, &w) in ws.iter().enumerate() {
            for (jf, f) in fs.iter().enumerate() {
                let j = (ik * nw + iw) * nf + jf;
                let mean = sum[j] / n;
                let var = (sum_sq[j] / n - mean.norm_sqr()).max(0.0);
                let scale = (k - 1) as f64;
                out.push(DiscReproduction {
                    k,
                    w,
                    coefficients: f.clone(),
                    estimate: mean * scale,
                    exact: poly(f, w),
                    std_error: scale * (var / n).sqrt(),
                    samples,
                    seed,
                });
            }
        }
    }
    Ok(out)
}

/// Single reproducing-kernel check; see [`reproducing_kernel_batch`].
pub fn verify_reproducing_kernel_disc(
    k: u32,
    f: &[C64],
    w: C64,
    samples: usize,
    seed: u64,
) -> Result<DiscReproduction> {
    let mut v = reproducing_kernel_batch(&[k], &[f.to_vec()], &[w], samples, seed)?;
    Ok(v.remove(0))
}

/// A scalar Monte Carlo estimate against a closed form. `tolerance` is five
/// standard errors, relative to `exact`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloCheck {
    pub estimate: f64,
    pub exact: f64,
    pub std_error: f64,
    pub relative_residual: f64,
    pub tolerance: f64,
    pub samples: usize,
    pub seed: u64,
}

impl MonteCarloCheck {
    fn from_moments(sum: f64, sum_sq: f64, scale: f64, exact: f64, samples: usize, seed: u64) -> Self {
        let n = samples as f64;
        let mean = sum / n;
        let var = (sum_sq / n - mean * mean).max(0.0);
        let estimate = scale * mean;
        let std_error = scale * (var / n).sqrt();
        Self {
            estimate,
            exact,
            std_error,
            relative_residual: (estimate - exact).abs() / exact.abs(),
            tolerance: 5.0 * std_error / exact.abs(),
            samples,
            seed,
        }
    }

    pub fn passed(&self) -> bool {
        self.relative_residual <= self.tolerance
    }
}

fn disc_entries(g: &BlockMatrixElement) -> Result<[C64; 4]> {
    if g.p() != 1 || g.q() != 1 {
        return Err(Error::DimensionMismatch { expected: 2, got: g.p() + g.q() });
    }
    let m = g.matrix();
    Ok([m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]])
}

/// `int phi(g z) (1-|z|^2)^(-2) dz` for `phi = (1-|z|^2)^s`, against
/// `int phi (1-|z|^2)^(-2) dz = pi / (s-1)`.
pub fn invariant_measure_check(g: &BlockMatrixElement, s: u32, samples: usize, seed: u64) -> Result<MonteCarloCheck> {
    if s < 3 {
        return Err(Error::Configuration("exponent s must be at least 3".into()));
    }
    if samples == 0 {
        return Err(Error::Configuration("at least one sample is required".into()));
    }
    let [a, b, cc, d] = disc_entries(g)?;
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for_each_sample(samples, seed, |z| {
        let gz = (a * z + b) / (cc * z + d);
        let v = (1.0 - gz.norm_sqr()).powi(s as i32) / (1.0 - z.norm_sqr()).powi(2);
        sum += v;
        sum_sq += v * v;
    });
    let pi = std::f64::consts::PI;
    Ok(MonteCarloCheck::from_moments(sum, sum_sq, pi, pi / (s as f64 - 1.0), samples, seed))
}

/// `pi m! (k-2)! / (m+k-1)!`, the squared norm of `z^m` in
/// `int |f|^2 (1-|z|^2)^(k-2) dz`.
pub fn monomial_norm_sq(k: u32, m: u32) -> f64 {
    let mut b = 1.0 / (k - 1) as f64;
    for j in 1..=m {
        b *= j as f64 / (j + k - 1) as f64;
    }
    std::f64::consts::PI * b
}

/// `||U_g f||^2` by Monte Carlo against the exact `||f||^2`, where
/// `U_g f(z) = (cz+d)^(-k) f((az+b)/(cz+d))` and `[[a,b],[c,d]] = g^(-1)`.
pub fn disc_norm_invariance(
    k: u32,
    f: &[C64],
    g: &BlockMatrixElement,
    samples: usize,
    seed: u64,
) -> Result<MonteCarloCheck> {
    if k < 2 {
        return Err(Error::Configuration(format!("weight k = {k} must be at least 2")));
    }
    if samples == 0 {
        return Err(Error::Configuration("at least one sample is required".into()));
    }
    let [a, b, cc, d] = disc_entries(&g.inverse()?)?;
    let exact: f64 = f.iter().enumerate().map(|(m, am)| am.norm_sqr() * monomial_norm_sq(k, m as u32)).sum();
    if exact == 0.0 {
        return Err(Error::Configuration("f must be nonzero".into()));
    }
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for_each_sample(samples, seed, |z| {
        let den = cc * z + d;
        let v = (den.powi(-(k as i32)) * poly(f, (a * z + b) / den)).norm_sqr() * (1.0 - z.norm_sqr()).powi(k as i32 - 2);
        sum += v;
        sum_sq += v * v;
    });
    Ok(MonteCarloCheck::from_moments(sum, sum_sq, std::f64::consts::PI, exact, samples, seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn monomial(m: usize) -> Vec<C64> {
        let mut v = vec![c(0.0, 0.0); m + 1];
        v[m] = c(1.0, 0.0);
        v
    }

    #[test]
    fn sampler_is_deterministic_and_uniform() {
        let mut a = Vec::new();
        for_each_sample(1000, 7, |z| a.push(z));
        let mut b = Vec::new();
        for_each_sample(1000, 7, |z| b.push(z));
        assert_eq!(a, b);
        assert!(a.iter().all(|z| z.norm() < 1.0));
        // E|z|^2 = 1/2 for the uniform disc.
        let mut s = 0.0;
        for_each_sample(200_000, 1, |z| s += z.norm_sqr());
        assert!((s / 200_000.0 - 0.5).abs() < 5e-3);
    }

    #[test]
    fn monomial_norms_by_quadrature() {
        // pi int_0^1 r^m (1-r)^(k-2) dr in r = |z|^2.
        let (x, w) = crate::quadrature::gauss_legendre(20);
        for k in 2..6u32 {
            for m in 0..5u32 {
                let q: f64 = x.iter().zip(&w).map(|(r, wi)| wi * r.powi(m as i32) * (1.0 - r).powi(k as i32 - 2)).sum();
                let exact = std::f64::consts::PI * q;
                assert!((monomial_norm_sq(k, m) - exact).abs() < 1e-13 * exact, "k={k} m={m}");
            }
        }
    }

    #[test]
    fn reproduces_monomials() {
        let fs: Vec<_> = (0..4).map(monomial).collect();
        let ws = [c(0.0, 0.0), c(0.3, -0.2), c(-0.6, 0.5)];
        let out = reproducing_kernel_batch(&[2, 3, 5], &fs, &ws, 100_000, 11).unwrap();
        assert_eq!(out.len(), 36);
        for r in &out {
            assert!(r.within(0.02, 1e-9), "k={} w={} f={:?}: {} vs {}", r.k, r.w, r.coefficients, r.estimate, r.exact);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(verify_reproducing_kernel_disc(1, &monomial(0), c(0.0, 0.0), 10, 0).is_err());
        assert!(verify_reproducing_kernel_disc(2, &monomial(0), c(1.0, 0.0), 10, 0).is_err());
        assert!(verify_reproducing_kernel_disc(2, &monomial(0), c(0.0, 0.0), 0, 0).is_err());
    }

    #[test]
    fn measure_and_norm_invariance() {
        let g = BlockMatrixElement::a_of_t(1, 1, &[0.4]).unwrap();
        let k = BlockMatrixElement::block_diag(
            &super::super::CMatrix::from_element(1, 1, C64::from_polar(1.0, 0.7)),
            &super::super::CMatrix::from_element(1, 1, C64::from_polar(1.0, -0.7)),
        )
        .unwrap();
        let g = g.mul(&k);
        let m = invariant_measure_check(&g, 4, 200_000, 3).unwrap();
        assert!(m.passed() && m.relative_residual < 0.02, "{m:?}");
        let f = vec![c(0.5, 0.0), c(0.0, 1.0), c(0.25, -0.25)];
        let n = disc_norm_invariance(3, &f, &g, 200_000, 5).unwrap();
        assert!(n.passed() && n.relative_residual < 0.03, "{n:?}");
        // The identity leaves the estimator an ordinary norm estimate.
        let id = BlockMatrixElement::identity(1, 1);
        let n0 = disc_norm_invariance(4, &monomial(2), &id, 100_000, 5).unwrap();
        assert!(n0.passed(), "{n0:?}");
    }
}

//! Gauss-Legendre rules and a product quadrature over the ordered simplex
//! `0 <= x_1 <= ... <= x_r <= 1 - eps`, graded geometrically toward the face
//! `x_r = 1`. Points are handed to the integrand in `u = 1 - x` coordinates so
//! that tiny distances to the singular face keep full relative precision.

use crate::error::{Error, Result};

/// Gauss-Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = 0.5 * (1.0 - x);
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

/// Mesh in `u = 1 - x`, descending from `u = 1` (x = 0) to the smallest
/// truncation. Below `u = 1/2` the points are `eps_min * ratio^k`; every
/// requested truncation is also a mesh point.
pub fn graded_mesh(truncations: &[f64], ratio: f64) -> Result<Vec<f64>> {
    let eps_min = truncations.iter().copied().fold(f64::INFINITY, f64::min);
    if !(eps_min > 0.0 && eps_min < 0.5) || truncations.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
        return Err(Error::Configuration("truncations must lie in (0, 1/2)".into()));
    }
    let mut pts = vec![1.0, 0.875, 0.75, 0.625, 0.5];
    let mut u = eps_min;
    while u < 0.5 * (1.0 - 1e-9) {
        pts.push(u);
        u *= ratio;
    }
    pts.extend_from_slice(truncations);
    pts.sort_by(|a, b| b.partial_cmp(a).unwrap());
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * b.abs());
    Ok(pts)
}

/// Points and weights of a rule over one cell.
type Rule = Vec<(Vec<f64>, f64)>;

/// Product Gauss-Legendre rule over the ordered simplex, with per-cell
/// results bucketed by the cell holding `x_r`.
pub struct SimplexQuadrature {
    r: usize,
    mesh: Vec<f64>,
    /// `rules[c][m-1]`: points (u values, decreasing) and weights for `m`
    /// ordered variables inside cell `c`.
    rules: Vec<Vec<Rule>>,
    box_rules: Vec<Vec<(f64, f64)>>,
}

impl SimplexQuadrature {
    pub fn new(r: usize, order: usize, mesh: Vec<f64>) -> Self {
        let (t, w) = gauss_legendre(order);
        let cells = mesh.len() - 1;
        let mut rules = Vec::with_capacity(cells);
        let mut box_rules = Vec::with_capacity(cells);
        for c in 0..cells {
            let (hi, lo) = (mesh[c], mesh[c + 1]);
            let width = hi - lo;
            box_rules.push(t.iter().zip(&w).map(|(ti, wi)| (lo + width * ti, width * wi)).collect());
            let mut per_m = Vec::with_capacity(r);
            for m in 1..=r {
                per_m.push(collapsed_rule(m, lo, width, &t, &w));
            }
            rules.push(per_m);
        }
        Self { r, mesh, rules, box_rules }
    }

    pub fn mesh(&self) -> &[f64] {
        &self.mesh
    }

    pub fn cells(&self) -> usize {
        self.mesh.len() - 1
    }

    /// Integral over the ordered simplex split by the cell of `x_r`. The
    /// integrand receives `u_j = 1 - x_j`, in the order `x_1 <= ... <= x_r`.
    pub fn bucketed<F: FnMut(&[f64]) -> f64>(&self, mut f: F) -> Result<Vec<f64>> {
        let cells = self.cells();
        let mut buckets = vec![0.0; cells];
        let mut idx = vec![0usize; self.r];
        let mut u = vec![0.0; self.r];
        loop {
            let groups = group_runs(&idx);
            let mut acc = 0.0;
            self.product(&groups, 0, 0, 1.0, &mut u, &mut f, &mut acc);
            if !acc.is_finite() {
                return Err(Error::NumericOverflow(format!("non-finite cell contribution at cells {idx:?}")));
            }
            buckets[idx[self.r - 1]] += acc;
            if !next_nondecreasing(&mut idx, cells) {
                break;
            }
        }
        Ok(buckets)
    }

    #[allow(clippy::too_many_arguments)]
    fn product<F: FnMut(&[f64]) -> f64>(
        &self,
        groups: &[(usize, usize)],
        g: usize,
        pos: usize,
        weight: f64,
        u: &mut [f64],
        f: &mut F,
        acc: &mut f64,
    ) {
        if g == groups.len() {
            *acc += weight * f(u);
            return;
        }
        let (cell, m) = groups[g];
        for (pts, w) in &self.rules[cell][m - 1] {
            u[pos..pos + m].copy_from_slice(pts);
            self.product(groups, g + 1, pos + m, weight * w, u, f, acc);
        }
    }

    /// Integral over the whole cube `[0, 1 - eps_min]^r` with a plain tensor
    /// rule in every cell.
    pub fn cube<F: FnMut(&[f64]) -> f64>(&self, mut f: F) -> Result<f64> {
        let cells = self.cells();
        let mut idx = vec![0usize; self.r];
        let mut u = vec![0.0; self.r];
        let mut total = 0.0;
        loop {
            let mut acc = 0.0;
            self.tensor(&idx, 0, 1.0, &mut u, &mut f, &mut acc);
            total += acc;
            let mut k = 0;
            while k < self.r && idx[k] + 1 == cells {
                idx[k] = 0;
                k += 1;
            }
            if k == self.r {
                break;
            }
            idx[k] += 1;
        }
        if !total.is_finite() {
            return Err(Error::NumericOverflow("non-finite cube integral".into()));
        }
        Ok(total)
    }

    fn tensor<F: FnMut(&[f64]) -> f64>(&self, idx: &[usize], j: usize, weight: f64, u: &mut [f64], f: &mut F, acc: &mut f64) {
        if j == idx.len() {
            *acc += weight * f(u);
            return;
        }
        for &(uj, w) in &self.box_rules[idx[j]] {
            u[j] = uj;
            self.tensor(idx, j + 1, weight * w, u, f, acc);
        }
    }
}

/// Collapsed (Duffy) rule for `m` variables with `u_1 >= ... >= u_m` in
/// `[lo, lo + width]`: `u_k = lo + width * t_1 ... t_k`, Jacobian
/// `width^m prod t_k^(m-k)`.
fn collapsed_rule(m: usize, lo: f64, width: f64, t: &[f64], w: &[f64]) -> Rule {
    let n = t.len();
    let mut out = Vec::with_capacity(n.pow(m as u32));
    let mut idx = vec![0usize; m];
    loop {
        let mut tau = 1.0;
        let mut weight = width.powi(m as i32);
        let mut pts = Vec::with_capacity(m);
        for (k, &i) in idx.iter().enumerate() {
            tau *= t[i];
            pts.push(lo + width * tau);
            weight *= w[i] * t[i].powi((m - 1 - k) as i32);
        }
        out.push((pts, weight));
        let mut k = 0;
        while k < m && idx[k] + 1 == n {
            idx[k] = 0;
            k += 1;
        }
        if k == m {
            break;
        }
        idx[k] += 1;
    }
    out
}

/// Runs of equal cell indices as `(cell, length)`.
fn group_runs(idx: &[usize]) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = Vec::new();
    for &c in idx {
        match out.last_mut() {
            Some((last, len)) if *last == c => *len += 1,
            _ => out.push((c, 1)),
        }
    }
    out
}

fn next_nondecreasing(idx: &mut [usize], cells: usize) -> bool {
    let r = idx.len();
    let mut k = r;
    while k > 0 {
        k -= 1;
        if idx[k] + 1 < cells {
            let v = idx[k] + 1;
            for x in &mut idx[k..] {
                *x = v;
            }
            return true;
        }
    }
    false
}

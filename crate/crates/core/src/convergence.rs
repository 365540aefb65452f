//! The convergence integral
//! `int sum_s prod_j (1 - x_j^2)^(E_sj) P(x) dx` over the ordered simplex,
//! with `E_sj = -(Lambda^s + lambda Lambda_1)(h_j) - p`: analytic
//! classification from the exponents, numerical corroboration on a
//! truncation ladder, the limiting value, and an empirical threshold.

use std::collections::BTreeMap;

use num::Signed;
use serde::Serialize;

use crate::cascade::{PairStructure, RestrictedData};
use crate::error::{Error, Result};
use crate::exact::{format_rational, int, to_f64, Rational};
use crate::quadrature::{graded_mesh, SimplexQuadrature};
use crate::weights::{weight_system, KssWeightSystem, WeightVector};

/// Largest `r` for which quadrature is attempted.
pub const MAX_QUADRATURE_RANK: usize = 4;
pub const SLOPE_TOLERANCE: f64 = 0.05;
pub const THRESHOLD_TOLERANCE: f64 = 0.05;
pub const DEFAULT_LADDER: [f64; 4] = [1e-2, 1e-3, 1e-4, 1e-5];

/// Default Gauss-Legendre order per cell.
pub fn default_order(r: usize) -> usize {
    match r {
        0..=2 => 10,
        3 => 8,
        _ => 6,
    }
}

fn mesh_ratio(r: usize) -> f64 {
    if r >= 4 {
        4.0
    } else {
        2.0
    }
}

/// Exponent rows `E_s = (E_s1, ..., E_sr)` with multiplicities. Rows that
/// coincide are merged.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegralSpec {
    pub rd: RestrictedData,
    #[serde(skip)]
    pub lambda: Rational,
    /// `-Lambda^s(h_j) - p`, exact; the exponent is this minus `lambda`.
    #[serde(skip)]
    pub exponents_exact: Vec<Vec<Rational>>,
    pub exponents: Vec<Vec<f64>>,
    pub multiplicities: Vec<f64>,
    pub epsilon: f64,
    pub order: usize,
}

impl IntegralSpec {
    /// `min_{s,j} E_sj`, exact.
    pub fn min_exponent_exact(&self) -> Rational {
        self.exponents_exact
            .iter()
            .flatten()
            .min()
            .map(|q| q - &self.lambda)
            .expect("at least one weight")
    }

    pub fn with_unit_multiplicities(&self) -> Self {
        let mut s = self.clone();
        s.multiplicities = vec![1.0; s.multiplicities.len()];
        s
    }

    pub fn with_lambda(&self, lambda: &Rational) -> Self {
        let mut s = self.clone();
        s.lambda = lambda.clone();
        s.exponents = exponent_floats(&s.exponents_exact, lambda);
        s
    }

    fn evaluator(&self, abs_p: bool) -> impl Fn(&[f64]) -> f64 + '_ {
        let a = self.rd.a as i32;
        let odd = 2 * self.rd.b as i32 + 1;
        move |u: &[f64]| {
            let mut logs = [0.0f64; 8];
            let mut poly = 1.0;
            for (j, &uj) in u.iter().enumerate() {
                logs[j] = uj.ln() + (2.0 - uj).ln();
                poly *= (1.0 - uj).powi(odd);
                if a > 0 {
                    for &uk in &u[j + 1..] {
                        let d = (uj - uk) * (2.0 - uj - uk);
                        poly *= if abs_p { d.abs() } else { d }.powi(a);
                    }
                }
            }
            let mut sum = 0.0;
            for (row, m) in self.exponents.iter().zip(&self.multiplicities) {
                let e: f64 = row.iter().zip(&logs).map(|(x, l)| x * l).sum();
                sum += m * e.exp();
            }
            sum * poly
        }
    }
}

fn exponent_floats(exact: &[Vec<Rational>], lambda: &Rational) -> Vec<Vec<f64>> {
    exact.iter().map(|row| row.iter().map(|q| to_f64(&(q - lambda))).collect()).collect()
}

/// Exponent rows of the weights of `ws` at central parameter `lambda`, with
/// Freudenthal multiplicities when `ws` carries them.
pub fn build_integrand(s: &PairStructure, ws: &KssWeightSystem, lambda: &Rational) -> IntegralSpec {
    let rs = s.root_system();
    let p = int(s.genus() as i64);
    let mut rows: BTreeMap<Vec<Rational>, f64> = BTreeMap::new();
    for w in &ws.weights {
        let row: Vec<Rational> = s.cascade().gammas.iter().map(|g| -w.pairing(rs, g) - &p).collect();
        let m = ws.multiplicities.as_ref().map_or(1.0, |ms| ms[w] as f64);
        *rows.entry(row).or_default() += m;
    }
    let (exponents_exact, multiplicities): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
    let r = s.restricted().r;
    IntegralSpec {
        rd: s.restricted().clone(),
        lambda: lambda.clone(),
        exponents: exponent_floats(&exponents_exact, lambda),
        exponents_exact,
        multiplicities,
        epsilon: 1e-12,
        order: default_order(r),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Truncated integrals on a ladder and the shell increments between
/// consecutive truncations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ladder {
    pub truncations: Vec<f64>,
    pub values: Vec<f64>,
    pub increments: Vec<f64>,
}

fn check_rank(spec: &IntegralSpec) -> Result<()> {
    if spec.rd.r > MAX_QUADRATURE_RANK {
        return Err(Error::Configuration(format!(
            "quadrature is limited to r <= {MAX_QUADRATURE_RANK}, got r = {}",
            spec.rd.r
        )));
    }
    Ok(())
}

/// Truncated integrals `I(eps)` for every `eps` in `truncations`, from one
/// pass over the mesh.
pub fn ladder(spec: &IntegralSpec, truncations: &[f64], order: usize) -> Result<Ladder> {
    check_rank(spec)?;
    let mut truncs = truncations.to_vec();
    truncs.sort_by(|a, b| b.partial_cmp(a).unwrap());
    truncs.dedup();
    let r = spec.rd.r;
    let mesh = graded_mesh(&truncs, mesh_ratio(r))?;
    let q = SimplexQuadrature::new(r, order, mesh);
    let buckets = q.bucketed(spec.evaluator(false))?;
    let nodes: Vec<usize> = truncs
        .iter()
        .map(|e| {
            q.mesh()
                .iter()
                .enumerate()
                .min_by(|a, b| (a.1 - e).abs().partial_cmp(&(b.1 - e).abs()).unwrap())
                .unwrap()
                .0
        })
        .collect();
    let values: Vec<f64> = nodes.iter().map(|&n| buckets[..n].iter().sum()).collect();
    let increments = nodes.windows(2).map(|w| buckets[w[0]..w[1]].iter().sum()).collect();
    Ok(Ladder { truncations: truncs, values, increments })
}

/// `I(spec.epsilon)`, with the difference to a lower-order rule as the
/// error estimate.
pub fn integrate(spec: &IntegralSpec) -> Result<Estimate> {
    let hi = ladder(spec, &[spec.epsilon], spec.order)?.values[0];
    let lo = ladder(spec, &[spec.epsilon], spec.order.saturating_sub(2).max(2))?.values[0];
    Ok(Estimate { value: hi, error: (hi - lo).abs() })
}

/// Limit of `I(eps)` as `eps -> 0`: the decadic ladder down to
/// `spec.epsilon` plus a geometric tail fitted to the last two increments.
pub fn limit_value(spec: &IntegralSpec) -> Result<Estimate> {
    let truncs = decades(spec.epsilon);
    let run = |order: usize| -> Result<f64> {
        let l = ladder(spec, &truncs, order)?;
        let last = *l.values.last().unwrap();
        let n = l.increments.len();
        let tail = if n >= 2 && l.increments[n - 2] > 0.0 {
            let q = l.increments[n - 1] / l.increments[n - 2];
            if q > 0.0 && q < 1.0 {
                l.increments[n - 1] * q / (1.0 - q)
            } else {
                0.0
            }
        } else {
            0.0
        };
        Ok(last + tail)
    };
    let hi = run(spec.order)?;
    let lo = run(spec.order.saturating_sub(2).max(2))?;
    Ok(Estimate { value: hi, error: (hi - lo).abs() })
}

fn decades(eps_min: f64) -> Vec<f64> {
    let mut v = vec![];
    let mut e = 1e-2;
    while e > eps_min * 1.000001 {
        v.push(e);
        e /= 10.0;
    }
    v.push(eps_min);
    v
}

/// Integral over the cube `[0, 1-eps]^r` with `|P|`, divided by `r!`.
pub fn integrate_cube_symmetrized(spec: &IntegralSpec) -> Result<f64> {
    check_rank(spec)?;
    let r = spec.rd.r;
    let mesh = graded_mesh(&[spec.epsilon], mesh_ratio(r))?;
    let q = SimplexQuadrature::new(r, spec.order, mesh);
    let fact: usize = (1..=r).product();
    Ok(q.cube(spec.evaluator(true))? / fact as f64)
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Slope of `log I(eps)` against `log(1/eps)`.
pub fn fitted_slope(l: &Ladder) -> Option<f64> {
    if l.values.iter().any(|v| *v <= 0.0) {
        return None;
    }
    let xs: Vec<f64> = l.truncations.iter().map(|e| -e.ln()).collect();
    let ys: Vec<f64> = l.values.iter().map(|v| v.ln()).collect();
    least_squares_slope(&xs, &ys)
}

/// Growth exponent `s` of the shell increments, `D(eps) ~ eps^(-s)`. On
/// the convergent side `s = -(E_min + 1)`; on the divergent side corners
/// where several coordinates approach 1 together can make `s` larger, but
/// never change its sign. `None` when some increment vanishes, which only
/// happens for strongly convergent integrands.
pub fn increment_exponent(l: &Ladder) -> Option<f64> {
    if l.increments.is_empty() || l.increments.iter().any(|d| *d <= 0.0) {
        return None;
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (k, d) in l.increments.iter().enumerate() {
        let (e0, e1) = (l.truncations[k], l.truncations[k + 1]);
        xs.push(-(e0 * e1).sqrt().ln());
        ys.push((d / (e0 / e1).ln()).ln());
    }
    if xs.len() == 1 {
        let (e0, e1) = (l.truncations[0], l.truncations[1]);
        return Some(-(l.increments[0] / (e0 / e1).ln()).ln() / (e0 * e1).sqrt().ln());
    }
    // The last two increments carry the asymptotics; earlier ones are biased
    // by the regular part of the integrand.
    let n = xs.len();
    least_squares_slope(&xs[n - 2..], &ys[n - 2..])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Convergent,
    Divergent,
    BoundaryIndeterminate,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Convergent => "convergent",
            Self::Divergent => "divergent",
            Self::BoundaryIndeterminate => "boundary-indeterminate",
        })
    }
}

fn classify_exponent(s: Option<f64>, tol: f64) -> Classification {
    match s {
        None => Classification::Convergent,
        Some(s) if s.abs() <= tol => Classification::BoundaryIndeterminate,
        Some(s) if s < 0.0 => Classification::Convergent,
        Some(_) => Classification::Divergent,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceOptions {
    pub truncations: Vec<f64>,
    pub order: Option<usize>,
    pub slope_tolerance: f64,
    /// Weight the rows by Freudenthal multiplicities.
    pub multiplicities: bool,
    /// Also compute the limiting value when convergent.
    pub value: bool,
    /// Skip quadrature entirely.
    pub analytic_only: bool,
}

impl Default for ConvergenceOptions {
    fn default() -> Self {
        Self {
            truncations: DEFAULT_LADDER.to_vec(),
            order: None,
            slope_tolerance: SLOPE_TOLERANCE,
            multiplicities: false,
            value: false,
            analytic_only: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub pair: String,
    pub lambda: String,
    pub classification: Classification,
    pub analytic_min_exponent: f64,
    pub analytic_min_exponent_exact: String,
    pub analytic_convergent: bool,
    pub quadrature: bool,
    pub order: usize,
    pub weight_rows: usize,
    pub truncated_values: Vec<(f64, f64)>,
    pub increments: Vec<f64>,
    pub fitted_slope: Option<f64>,
    pub increment_exponent: Option<f64>,
    pub empirical: Option<Classification>,
    /// Empirical and analytic classifications agree; only meaningful away
    /// from the boundary.
    pub agreement: Option<bool>,
    /// The limiting integral with normalizing constant 1.
    pub formal_dimension_scalar: Option<Estimate>,
    /// `1 / (2 pi I)`, the formal dimension for the disc normalization
    /// (only when `r = 1, b = 0`).
    pub disc_normalized: Option<f64>,
}

/// Analytic classification (`min E > -1`, exact) corroborated by the
/// increment exponent on the truncation ladder.
pub fn classify_convergence(
    s: &PairStructure,
    ws: &KssWeightSystem,
    lambda: &Rational,
    opts: &ConvergenceOptions,
) -> Result<ConvergenceReport> {
    let ws = if opts.multiplicities && ws.multiplicities.is_none() {
        crate::weights::with_multiplicities(s, ws.clone())?
    } else {
        ws.clone()
    };
    let mut spec = build_integrand(s, &ws, lambda);
    if let Some(o) = opts.order {
        spec.order = o;
    }
    let rd = s.restricted();
    let min_e = spec.min_exponent_exact();
    let delta = &min_e + int(1);
    let analytic_convergent = delta.is_positive();
    let tol = opts.slope_tolerance;
    let analytic = if to_f64(&delta).abs() <= tol {
        Classification::BoundaryIndeterminate
    } else if analytic_convergent {
        Classification::Convergent
    } else {
        Classification::Divergent
    };
    let mut report = ConvergenceReport {
        pair: s.pair().label().to_string(),
        lambda: format_rational(lambda),
        classification: analytic,
        analytic_min_exponent: to_f64(&min_e),
        analytic_min_exponent_exact: format_rational(&min_e),
        analytic_convergent,
        quadrature: false,
        order: spec.order,
        weight_rows: spec.exponents.len(),
        truncated_values: vec![],
        increments: vec![],
        fitted_slope: None,
        increment_exponent: None,
        empirical: None,
        agreement: None,
        formal_dimension_scalar: None,
        disc_normalized: None,
    };
    if opts.analytic_only || rd.r > MAX_QUADRATURE_RANK {
        return Ok(report);
    }
    let l = ladder(&spec, &opts.truncations, spec.order)?;
    let se = increment_exponent(&l);
    let empirical = classify_exponent(se, tol);
    report.quadrature = true;
    report.truncated_values = l.truncations.iter().copied().zip(l.values.iter().copied()).collect();
    report.increments = l.increments.clone();
    report.fitted_slope = fitted_slope(&l);
    report.increment_exponent = se;
    report.empirical = Some(empirical);
    if analytic != Classification::BoundaryIndeterminate {
        report.agreement = Some(empirical == analytic);
    }
    if opts.value && analytic == Classification::Convergent {
        let est = limit_value(&spec)?;
        if rd.r == 1 && rd.b == 0 {
            report.disc_normalized = Some(1.0 / (2.0 * std::f64::consts::PI * est.value));
        }
        report.formal_dimension_scalar = Some(est);
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalThreshold {
    pub value: f64,
    /// Final bracket: convergent at `lo`, divergent at `hi`.
    pub lo: f64,
    pub hi: f64,
    pub evaluations: usize,
}

/// Locates the convergence threshold in `lambda` by bisection on the sign
/// of the increment exponent alone. The bracket starts at `lambda = 0`
/// (always divergent) and steps down through `-1, -2, -4, ..., -1024`.
pub fn empirical_threshold(
    s: &PairStructure,
    lambda0: &WeightVector,
    truncations: &[f64],
    order: Option<usize>,
) -> Result<EmpiricalThreshold> {
    let ws = weight_system(s, lambda0)?;
    let mut spec = build_integrand(s, &ws, &int(0));
    if let Some(o) = order {
        spec.order = o;
    }
    check_rank(&spec)?;
    let mut evaluations = 0;
    let mut convergent_at = |lam: f64| -> Result<bool> {
        evaluations += 1;
        let q = Rational::from_float(lam).expect("finite");
        let l = ladder(&spec.with_lambda(&q), truncations, spec.order)?;
        Ok(increment_exponent(&l).is_none_or(|x| x < 0.0))
    };
    let mut hi = 0.0;
    if convergent_at(hi)? {
        return Err(Error::Configuration("integral converges at lambda = 0; no bracket".into()));
    }
    let mut lo = -1.0;
    while !convergent_at(lo)? {
        hi = lo;
        lo *= 2.0;
        if lo < -1024.0 {
            return Err(Error::Configuration("no convergent lambda above -1024".into()));
        }
    }
    while hi - lo > THRESHOLD_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if convergent_at(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(EmpiricalThreshold { value: 0.5 * (lo + hi), lo, hi, evaluations })
}

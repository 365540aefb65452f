//! Weights on the full Cartan subalgebra, weight systems of irreducible
//! representations of the semisimple part of `k`, Freudenthal multiplicities
//! and the weight bound `(Lambda^s | gamma_j) <= (Lambda_0 | gamma_r)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::{One, Signed, Zero};
use serde::Serialize;

use crate::cascade::{half_sum, PairStructure};
use crate::error::{Error, Result};
use crate::exact::{format_rational, int, Rational, RationalVector};
use crate::rootsystem::{Root, RootSystem};

/// A weight in fundamental-weight coordinates: `coords[i] = mu(h_{alpha_i})`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct WeightVector {
    #[serde(serialize_with = "ser_rationals")]
    coords: Vec<Rational>,
}

fn ser_rationals<S: serde::Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(format_rational))
}

impl WeightVector {
    pub fn new(coords: Vec<Rational>) -> Self {
        Self { coords }
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        Self::new(coords.iter().map(|&c| int(c)).collect())
    }

    pub fn zero(rank: usize) -> Self {
        Self::new(vec![Rational::zero(); rank])
    }

    pub fn fundamental(rank: usize, i: usize) -> Self {
        let mut w = Self::zero(rank);
        w.coords[i] = Rational::one();
        w
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn is_integral(&self) -> bool {
        self.coords.iter().all(|c| c.is_integer())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coords.iter().map(|a| a * c).collect())
    }

    /// `mu - k alpha_i` for a simple root.
    pub fn minus_simple(&self, rs: &RootSystem, i: usize, k: &Rational) -> Self {
        let cartan = rs.cartan_matrix();
        Self::new(
            self.coords
                .iter()
                .enumerate()
                .map(|(j, c)| c - k * int(cartan[j][i]))
                .collect(),
        )
    }

    /// `mu - k alpha` for an arbitrary root.
    pub fn minus_root(&self, rs: &RootSystem, alpha: &Root, k: &Rational) -> Self {
        let mut w = self.clone();
        for (i, &c) in alpha.coeffs().iter().enumerate() {
            if c != 0 {
                w = w.minus_simple(rs, i, &(k * int(c)));
            }
        }
        w
    }

    /// `(mu | alpha)`.
    pub fn inner_root(&self, rs: &RootSystem, alpha: &Root) -> Rational {
        let mut s = Rational::zero();
        for (i, &c) in alpha.coeffs().iter().enumerate() {
            if c != 0 && !self.coords[i].is_zero() {
                s += &self.coords[i] * int(c) * rs.simple_length_sq(i);
            }
        }
        s / int(2)
    }

    /// `mu(h_alpha) = 2 (mu | alpha) / (alpha | alpha)`.
    pub fn pairing(&self, rs: &RootSystem, alpha: &Root) -> Rational {
        int(2) * self.inner_root(rs, alpha) / rs.length_sq(alpha)
    }

    /// `(mu | nu)`.
    pub fn inner(&self, rs: &RootSystem, other: &Self) -> Rational {
        let r = self.to_root_coords(rs);
        let mut s = Rational::zero();
        for i in 0..self.rank() {
            if !r[i].is_zero() && !other.coords[i].is_zero() {
                s += &r[i] * &other.coords[i] * rs.simple_length_sq(i);
            }
        }
        s / int(2)
    }

    pub fn to_root_coords(&self, rs: &RootSystem) -> RationalVector {
        rs.weight_to_root_coords(&self.coords)
    }

    pub fn from_root_coords(rs: &RootSystem, v: &RationalVector) -> Self {
        Self::new(rs.root_to_weight_coords(v))
    }

    /// Simple reflection `s_i(mu) = mu - mu(h_i) alpha_i`.
    pub fn reflect_simple(&self, rs: &RootSystem, i: usize) -> Self {
        self.minus_simple(rs, i, &self.coords[i].clone())
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(format_rational).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// `(rho, rho_n)` as weights.
pub fn rho_vectors(s: &PairStructure) -> (WeightVector, WeightVector) {
    let rs = s.root_system();
    let n = rs.rank();
    let rho = half_sum(rs.positive_roots(), n);
    let rho_n = half_sum(&s.space().partition().noncompact_pos, n);
    (WeightVector::from_root_coords(rs, &rho), WeightVector::from_root_coords(rs, &rho_n))
}

/// Half-sum of the compact positive roots.
pub fn rho_compact(s: &PairStructure) -> WeightVector {
    let rs = s.root_system();
    WeightVector::from_root_coords(rs, &half_sum(&s.space().partition().compact_pos, rs.rank()))
}

/// The fundamental weight dual to the noncompact simple coroot.
pub fn lambda_one(s: &PairStructure) -> WeightVector {
    WeightVector::fundamental(s.root_system().rank(), s.space().noncompact_node())
}

/// Checks that `lambda0` is integral and dominant on the compact simple
/// coroots and vanishes on the noncompact one.
pub fn validate_lambda0(s: &PairStructure, lambda0: &WeightVector) -> Result<()> {
    let n = s.root_system().rank();
    if lambda0.rank() != n {
        return Err(Error::DimensionMismatch { expected: n, got: lambda0.rank() });
    }
    if !lambda0.coords[s.space().noncompact_node()].is_zero() {
        return Err(Error::InvalidWeight("lambda0 must vanish on the noncompact coroot".into()));
    }
    for i in s.space().compact_nodes() {
        let c = &lambda0.coords[i];
        if !c.is_integer() {
            return Err(Error::InvalidWeight(format!("coordinate {} is not integral", i + 1)));
        }
        if c.is_negative() {
            return Err(Error::InvalidWeight(format!("coordinate {} is negative", i + 1)));
        }
    }
    Ok(())
}

/// Builds `lambda0` from its coordinates on the compact simple coroots, in
/// ascending node order. An empty slice means `lambda0 = 0`.
pub fn lambda0_from_compact(s: &PairStructure, coords: &[i64]) -> Result<WeightVector> {
    let nodes = s.space().compact_nodes();
    let n = s.root_system().rank();
    if coords.is_empty() {
        return Ok(WeightVector::zero(n));
    }
    if coords.len() != nodes.len() {
        return Err(Error::DimensionMismatch { expected: nodes.len(), got: coords.len() });
    }
    let mut w = WeightVector::zero(n);
    for (&i, &c) in nodes.iter().zip(coords) {
        w.coords[i] = int(c);
    }
    validate_lambda0(s, &w)?;
    Ok(w)
}

/// The weights of the irreducible `k_ss`-module with highest weight
/// `highest`, without multiplicities, sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KssWeightSystem {
    pub highest: WeightVector,
    pub weights: Vec<WeightVector>,
    pub multiplicities: Option<BTreeMap<WeightVector, u64>>,
}

impl KssWeightSystem {
    pub fn contains(&self, mu: &WeightVector) -> bool {
        self.weights.binary_search(mu).is_ok()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Closure of `{lambda0}` under simple root strings: for each weight `mu` and
/// compact simple root `alpha_i` with `mu(h_i) > 0`, add `mu - k alpha_i` for
/// `1 <= k <= mu(h_i)`.
pub fn weight_system(s: &PairStructure, lambda0: &WeightVector) -> Result<KssWeightSystem> {
    validate_lambda0(s, lambda0)?;
    let rs = s.root_system();
    let compact = s.space().compact_nodes();
    let mut seen: BTreeSet<WeightVector> = BTreeSet::new();
    let mut work: BTreeSet<WeightVector> = BTreeSet::new();
    seen.insert(lambda0.clone());
    work.insert(lambda0.clone());
    while let Some(mu) = work.pop_last() {
        for &i in &compact {
            let top = mu.coords[i].to_integer();
            let mut k = num::BigInt::one();
            while k <= top {
                let nu = mu.minus_simple(rs, i, &Rational::from_integer(k.clone()));
                if seen.insert(nu.clone()) {
                    work.insert(nu);
                }
                k += 1;
            }
        }
    }
    Ok(KssWeightSystem { highest: lambda0.clone(), weights: seen.into_iter().collect(), multiplicities: None })
}

/// Multiplicity of `mu` by Freudenthal's recursion, over the compact
/// positive roots.
pub fn freudenthal_multiplicity(s: &PairStructure, ws: &KssWeightSystem, mu: &WeightVector) -> Result<u64> {
    if !ws.contains(mu) {
        return Err(Error::InvalidWeight(format!("{mu} is not a weight of the system")));
    }
    Ok(all_multiplicities(s, ws)?[mu])
}

/// Every multiplicity, computed top-down by depth below the highest weight.
pub fn all_multiplicities(s: &PairStructure, ws: &KssWeightSystem) -> Result<BTreeMap<WeightVector, u64>> {
    let rs = s.root_system();
    let compact_pos = &s.space().partition().compact_pos;
    let rho_c = rho_compact(s);
    let lr = ws.highest.add(&rho_c);
    let top_norm = lr.inner(rs, &lr);

    let depth = |mu: &WeightVector| -> Rational {
        let diff = &ws.highest.to_root_coords(rs) - &mu.to_root_coords(rs);
        diff.entries().iter().sum()
    };
    let mut order: Vec<(Rational, &WeightVector)> = ws.weights.iter().map(|m| (depth(m), m)).collect();
    order.sort();

    let mut mult: BTreeMap<WeightVector, u64> = BTreeMap::new();
    for (d, mu) in order {
        if d.is_zero() {
            mult.insert(mu.clone(), 1);
            continue;
        }
        let mut num = Rational::zero();
        for alpha in compact_pos {
            let mut k = int(1);
            loop {
                let nu = mu.minus_root(rs, alpha, &-&k);
                match mult.get(&nu) {
                    Some(&m) => num += int(m as i64) * nu.inner_root(rs, alpha),
                    None => break,
                }
                k += int(1);
            }
        }
        let mr = mu.add(&rho_c);
        let den = &top_norm - mr.inner(rs, &mr);
        if den.is_zero() {
            return Err(Error::Structural(format!("Freudenthal denominator vanishes at {mu}")));
        }
        let m = int(2) * num / den;
        if !m.is_integer() || !m.is_positive() {
            return Err(Error::Structural(format!("multiplicity of {mu} is {}", format_rational(&m))));
        }
        mult.insert(mu.clone(), m.to_integer().try_into().map_err(|_| Error::NumericOverflow("multiplicity".into()))?);
    }
    Ok(mult)
}

/// Attaches multiplicities to a weight system.
pub fn with_multiplicities(s: &PairStructure, mut ws: KssWeightSystem) -> Result<KssWeightSystem> {
    ws.multiplicities = Some(all_multiplicities(s, &ws)?);
    Ok(ws)
}

/// Reflects `mu` by compact simple reflections until it is dominant for
/// the compact simple roots; returns the dominant weight and the word.
pub fn dominant_conjugate(s: &PairStructure, mu: &WeightVector) -> (WeightVector, Vec<usize>) {
    let rs = s.root_system();
    let compact = s.space().compact_nodes();
    let mut w = mu.clone();
    let mut word = Vec::new();
    while let Some(&i) = compact.iter().find(|&&i| w.coords[i].is_negative()) {
        w = w.reflect_simple(rs, i);
        word.push(i);
    }
    (w, word)
}

/// Outcome of the exhaustive weight-bound check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeightBoundReport {
    pub weights: usize,
    pub pairs_checked: usize,
    /// `(Lambda_0 | gamma_r)`.
    pub bound: String,
    /// Maximum of `(Lambda^s | gamma_j)` over all `s, j`.
    pub max_value: String,
    /// Maximum of `Lambda^s(h_j)`; equals `Lambda_0(h_r)`.
    pub max_coroot_value: String,
    pub attained_at_top: bool,
    pub orbit_checks: usize,
    pub holds: bool,
}

/// Checks `(Lambda^s | gamma_j) <= (Lambda_0 | gamma_r)` for all `s, j`, and
/// re-derives it through the dominant conjugate `mu = w Lambda^s`:
/// `(mu | w gamma_j) <= (mu | gamma_r) <= (Lambda_0 | gamma_r)`.
pub fn verify_weight_bound(s: &PairStructure, ws: &KssWeightSystem) -> Result<WeightBoundReport> {
    let rs = s.root_system();
    let gammas = &s.cascade().gammas;
    let top = s.cascade().top();
    let l0 = &ws.highest;
    let bound = l0.inner_root(rs, top);
    let top_coroot = l0.pairing(rs, top);
    let mut max_value: Option<Rational> = None;
    let mut max_coroot: Option<Rational> = None;
    let mut pairs = 0;
    let mut orbit_checks = 0;
    for lam in &ws.weights {
        let (mu, word) = dominant_conjugate(s, lam);
        let mu_top = mu.inner_root(rs, top);
        if mu_top > bound {
            return Err(Error::Structural(format!("dominant conjugate {mu} exceeds the bound")));
        }
        for g in gammas {
            let v = lam.inner_root(rs, g);
            if v > bound {
                return Err(Error::Structural(format!(
                    "({lam} | {g}) = {} > {}",
                    format_rational(&v),
                    format_rational(&bound)
                )));
            }
            let mut wg = g.clone();
            for &i in &word {
                wg = rs.reflect_root(&Root::simple(rs.rank(), i), &wg);
            }
            let wv = mu.inner_root(rs, &wg);
            if wv != v || wv > mu_top {
                return Err(Error::Structural(format!("orbit step fails for {lam} and {g}")));
            }
            orbit_checks += 1;
            let c = lam.pairing(rs, g);
            if max_coroot.as_ref().is_none_or(|m| &c > m) {
                max_coroot = Some(c);
            }
            if max_value.as_ref().is_none_or(|m| &v > m) {
                max_value = Some(v);
            }
            pairs += 1;
        }
    }
    let max_value = max_value.unwrap_or_else(Rational::zero);
    let max_coroot = max_coroot.unwrap_or_else(Rational::zero);
    let attained_at_top = max_value == bound;
    if !attained_at_top || max_coroot != top_coroot {
        return Err(Error::Structural("maximum not attained at the highest weight and gamma_r".into()));
    }
    Ok(WeightBoundReport {
        weights: ws.len(),
        pairs_checked: pairs,
        bound: format_rational(&bound),
        max_value: format_rational(&max_value),
        max_coroot_value: format_rational(&max_coroot),
        attained_at_top,
        orbit_checks,
        holds: true,
    })
}

//! Harish-Chandra's cascade of strongly orthogonal noncompact roots, the
//! restricted-root multiplicities `(r, a, b)` and the genus `p`.

use std::collections::BTreeMap;

use num::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{format_rational, int, rat, Rational, RationalVector};
use crate::hermitian::{HermitianPair, HermitianSpace};
use crate::rootsystem::{Root, RootSystem};

/// The ordered cascade `gamma_1, ..., gamma_r`, with `gamma_r` the highest
/// noncompact root.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CascadeResult {
    pub gammas: Vec<Root>,
}

impl CascadeResult {
    pub fn r(&self) -> usize {
        self.gammas.len()
    }

    pub fn top(&self) -> &Root {
        self.gammas.last().expect("cascade is never empty")
    }
}

/// Neither `a + b` nor `a - b` is a root (and `a != b`).
pub fn strongly_orthogonal(rs: &RootSystem, a: &Root, b: &Root) -> bool {
    a != b && !rs.is_root(a.plus(b).coeffs()) && !rs.is_root(a.minus(b).coeffs())
}

/// Picks the highest candidate: maximal for dominance, ties broken by the
/// lexicographically largest coefficient vector.
fn highest_of<'a>(candidates: &[&'a Root]) -> Option<&'a Root> {
    candidates
        .iter()
        .filter(|c| !candidates.iter().any(|d| d != *c && d.dominates(c)))
        .max_by(|x, y| x.coeffs().cmp(y.coeffs()))
        .copied()
}

pub fn strongly_orthogonal_cascade(space: &HermitianSpace) -> CascadeResult {
    let rs = space.root_system();
    let nc = &space.partition().noncompact_pos;
    let mut chosen: Vec<Root> = Vec::new();
    loop {
        let candidates: Vec<&Root> = nc
            .iter()
            .filter(|g| chosen.iter().all(|c| strongly_orthogonal(rs, g, c)))
            .collect();
        match highest_of(&candidates) {
            Some(g) => chosen.push(g.clone()),
            None => break,
        }
    }
    chosen.reverse();
    CascadeResult { gammas: chosen }
}

/// Coordinates `(alpha | gamma_j) / (gamma_j | gamma_j)` of the restriction of
/// `alpha` in the basis `gamma_1, ..., gamma_r`.
pub fn restricted_coefficients(rs: &RootSystem, cr: &CascadeResult, alpha: &Root) -> Vec<Rational> {
    cr.gammas.iter().map(|g| rs.root_inner(alpha, g) / rs.length_sq(g)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RestrictedType {
    /// Type B_r (b = 0, r >= 2).
    B,
    /// Type BC_r (b > 0).
    BC,
    /// r = 1 with b = 0: a single restricted root pair.
    A1Degenerate,
}

impl RestrictedType {
    pub fn tag(&self, r: usize) -> String {
        match self {
            Self::B => format!("B{r}"),
            Self::BC => format!("BC{r}"),
            Self::A1Degenerate => "A1".to_string(),
        }
    }
}

/// Restricted-root invariants. When `r = 1` the multiplicity `a` is
/// undefined; it is stored as 0 with `a_defined = false`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RestrictedData {
    pub r: usize,
    pub a: usize,
    pub b: usize,
    pub p: usize,
    pub a_defined: bool,
    pub type_tag: RestrictedType,
    /// Compact positive roots orthogonal to every `gamma_j`.
    pub zero_restricted: usize,
}

impl RestrictedData {
    /// `r + a r(r-1)/2 + b r`.
    pub fn expected_dim_p_plus(&self) -> usize {
        self.r + self.a * self.r * (self.r - 1) / 2 + self.b * self.r
    }

    pub fn expected_compact_count(&self) -> usize {
        self.a * self.r * (self.r - 1) / 2 + self.b * self.r + self.zero_restricted
    }
}

#[derive(Default)]
struct PatternCounts {
    nc_unit: BTreeMap<usize, usize>,
    nc_pair: BTreeMap<(usize, usize), usize>,
    nc_half: BTreeMap<usize, usize>,
    c_pair: BTreeMap<(usize, usize), usize>,
    c_half: BTreeMap<usize, usize>,
    c_zero: usize,
}

fn classify(
    coeffs: &[Rational],
    noncompact: bool,
    counts: &mut PatternCounts,
    alpha: &Root,
) -> Result<()> {
    let half = rat(1, 2);
    let nonzero: Vec<(usize, &Rational)> =
        coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).collect();
    let bad = || {
        let parts: Vec<String> = coeffs.iter().map(format_rational).collect();
        Error::Structural(format!(
            "root {alpha} restricts to an unexpected pattern ({})",
            parts.join(", ")
        ))
    };
    match (noncompact, nonzero.as_slice()) {
        (true, [(j, c)]) if **c == Rational::one() => *counts.nc_unit.entry(*j).or_default() += 1,
        (true, [(j, c)]) if **c == half => *counts.nc_half.entry(*j).or_default() += 1,
        (true, [(j, c), (k, d)]) if **c == half && **d == half => {
            *counts.nc_pair.entry((*j, *k)).or_default() += 1
        }
        (false, []) => counts.c_zero += 1,
        (false, [(j, c)]) if **c == half || **c == -&half => {
            *counts.c_half.entry(*j).or_default() += 1
        }
        (false, [(j, c), (k, d)]) if (*c + *d).is_zero() && (**c == half || **c == -&half) => {
            *counts.c_pair.entry((*j, *k)).or_default() += 1
        }
        _ => return Err(bad()),
    }
    Ok(())
}

/// The common value of `counts` over all `keys`, which must all be present
/// with the same count (missing keys count as 0).
fn uniform<K: Ord + Copy + std::fmt::Debug>(
    what: &str,
    counts: &BTreeMap<K, usize>,
    keys: &[K],
) -> Result<usize> {
    let values: Vec<usize> = keys.iter().map(|k| counts.get(k).copied().unwrap_or(0)).collect();
    if counts.keys().any(|k| !keys.contains(k)) {
        return Err(Error::Structural(format!("{what}: unexpected index")));
    }
    match values.first() {
        None => Ok(0),
        Some(&v) if values.iter().all(|&x| x == v) => Ok(v),
        Some(_) => Err(Error::Structural(format!("{what}: non-uniform multiplicities {values:?}"))),
    }
}

/// Classifies every positive root by its restriction, checks uniformity of
/// the multiplicities and the dimension bookkeeping, and returns
/// `(r, a, b, p)`.
pub fn restricted_root_data(space: &HermitianSpace, cr: &CascadeResult) -> Result<RestrictedData> {
    let rs = space.root_system();
    let r = cr.r();
    let mut counts = PatternCounts::default();
    for alpha in &space.partition().noncompact_pos {
        classify(&restricted_coefficients(rs, cr, alpha), true, &mut counts, alpha)?;
    }
    for alpha in &space.partition().compact_pos {
        classify(&restricted_coefficients(rs, cr, alpha), false, &mut counts, alpha)?;
    }
    let singles: Vec<usize> = (0..r).collect();
    let pairs: Vec<(usize, usize)> =
        (0..r).flat_map(|j| (j + 1..r).map(move |k| (j, k))).collect();

    let unit = uniform("gamma_j", &counts.nc_unit, &singles)?;
    if unit != 1 {
        return Err(Error::Structural(format!("gamma_j restricted multiplicity {unit} != 1")));
    }
    let a = uniform("(gamma_j + gamma_k)/2", &counts.nc_pair, &pairs)?;
    let a_c = uniform("(gamma_j - gamma_k)/2", &counts.c_pair, &pairs)?;
    let b = uniform("gamma_j/2 (noncompact)", &counts.nc_half, &singles)?;
    let b_c = uniform("gamma_j/2 (compact)", &counts.c_half, &singles)?;
    if a != a_c || b != b_c {
        return Err(Error::Structural(format!(
            "compact and noncompact multiplicities differ: a {a}/{a_c}, b {b}/{b_c}"
        )));
    }
    let p = (r - 1) * a + b + 2;
    let type_tag = if b > 0 {
        RestrictedType::BC
    } else if r >= 2 {
        RestrictedType::B
    } else {
        RestrictedType::A1Degenerate
    };
    let rd = RestrictedData {
        r,
        a,
        b,
        p,
        a_defined: r >= 2,
        type_tag,
        zero_restricted: counts.c_zero,
    };
    if rd.expected_dim_p_plus() != space.dim_p_plus() {
        return Err(Error::Structural(format!(
            "dim p+ bookkeeping: {} != {}",
            rd.expected_dim_p_plus(),
            space.dim_p_plus()
        )));
    }
    if rd.expected_compact_count() != space.partition().compact_pos.len() {
        return Err(Error::Structural("compact root bookkeeping failed".into()));
    }
    Ok(rd)
}

/// One exactly evaluated identity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityLine {
    pub name: String,
    pub lhs: String,
    pub rhs: String,
    pub holds: bool,
}

impl IdentityLine {
    pub fn new(name: impl Into<String>, lhs: &Rational, rhs: &Rational) -> Self {
        Self {
            name: name.into(),
            lhs: format_rational(lhs),
            rhs: format_rational(rhs),
            holds: lhs == rhs,
        }
    }
}

pub fn half_sum(roots: &[Root], rank: usize) -> RationalVector {
    let mut v = RationalVector::zeros(rank);
    for r in roots {
        v = v.add_scaled(&rat(1, 2), &r.to_rational());
    }
    v
}

/// Checks `rho(h_r) = p - 1` and `2 rho_n(h_j) = p` for every `j` exactly.
pub fn verify_rho_identities(
    space: &HermitianSpace,
    cr: &CascadeResult,
    rd: &RestrictedData,
) -> Result<Vec<IdentityLine>> {
    let rs = space.root_system();
    let n = rs.rank();
    let rho = half_sum(rs.positive_roots(), n);
    let rho_n = half_sum(&space.partition().noncompact_pos, n);
    let p = int(rd.p as i64);
    let mut lines = vec![IdentityLine::new(
        "rho(h_r) = p-1",
        &rs.cartan_integer(&rho, cr.top())?,
        &(&p - int(1)),
    )];
    for (j, g) in cr.gammas.iter().enumerate() {
        lines.push(IdentityLine::new(
            format!("2 rho_n(h_{}) = p", j + 1),
            &(int(2) * rs.cartan_integer(&rho_n, g)?),
            &p,
        ));
    }
    if let Some(bad) = lines.iter().find(|l| !l.holds) {
        return Err(Error::Structural(format!("{}: {} != {}", bad.name, bad.lhs, bad.rhs)));
    }
    Ok(lines)
}

/// `P(x) = prod_j x_j^(2b+1) prod_{j<k} (x_k^2 - x_j^2)^a`.
pub fn weyl_polynomial_p(rd: &RestrictedData, x: &[f64]) -> f64 {
    let mut v = 1.0;
    for (j, &xj) in x.iter().enumerate() {
        v *= xj.powi(2 * rd.b as i32 + 1);
        for &xk in &x[j + 1..] {
            v *= ((xk - xj) * (xk + xj)).powi(rd.a as i32);
        }
    }
    v
}

/// The cascade and restricted data of one pair, computed once.
#[derive(Debug, Clone)]
pub struct PairStructure {
    space: HermitianSpace,
    cascade: CascadeResult,
    restricted: RestrictedData,
}

impl PairStructure {
    pub fn analyze(pair: &HermitianPair) -> Result<Self> {
        let space = HermitianSpace::new(pair)?;
        let cascade = strongly_orthogonal_cascade(&space);
        let restricted = restricted_root_data(&space, &cascade)?;
        Ok(Self { space, cascade, restricted })
    }

    pub fn from_label(label: &str) -> Result<Self> {
        Self::analyze(&crate::hermitian::lookup(label)?)
    }

    pub fn space(&self) -> &HermitianSpace {
        &self.space
    }

    pub fn pair(&self) -> &HermitianPair {
        self.space.pair()
    }

    pub fn root_system(&self) -> &RootSystem {
        self.space.root_system()
    }

    pub fn cascade(&self) -> &CascadeResult {
        &self.cascade
    }

    pub fn restricted(&self) -> &RestrictedData {
        &self.restricted
    }

    pub fn genus(&self) -> usize {
        self.restricted.p
    }

    pub fn rho_identities(&self) -> Result<Vec<IdentityLine>> {
        verify_rho_identities(&self.space, &self.cascade, &self.restricted)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::catalog;
    use num::Signed;

    fn analyze(label: &str) -> PairStructure {
        PairStructure::from_label(label).unwrap()
    }

    fn rabp(s: &PairStructure) -> (usize, usize, usize, usize) {
        let rd = s.restricted();
        (rd.r, rd.a, rd.b, rd.p)
    }

    /// Largest strongly orthogonal subset of the noncompact positive roots by
    /// exhaustive search.
    fn brute_force_max(space: &HermitianSpace) -> usize {
        let rs = space.root_system();
        let nc = &space.partition().noncompact_pos;
        let m = nc.len();
        let mut best = 0;
        for mask in 1u32..(1 << m) {
            let idx: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
            if idx.len() <= best {
                continue;
            }
            let ok = idx.iter().enumerate().all(|(x, &i)| {
                idx[x + 1..].iter().all(|&j| strongly_orthogonal(rs, &nc[i], &nc[j]))
            });
            if ok {
                best = idx.len();
            }
        }
        best
    }

    #[test]
    fn cascade_examples() {
        let s = analyze("su11");
        assert_eq!(s.cascade().gammas, vec![Root::new(vec![1])]);

        let s = analyze("su22");
        assert_eq!(s.cascade().r(), 2);
        assert_eq!(brute_force_max(s.space()), 2);

        let s = analyze("sp3");
        let mut g: Vec<Vec<i64>> = s.cascade().gammas.iter().map(|r| r.coeffs().to_vec()).collect();
        g.sort();
        assert_eq!(g, vec![vec![0, 0, 1], vec![0, 2, 1], vec![2, 2, 1]]);
        assert_eq!(s.cascade().top().coeffs(), &[2, 2, 1]);
    }

    #[test]
    fn cascade_invariants_and_maximality() {
        for p in catalog() {
            let s = PairStructure::analyze(&p).unwrap();
            let rs = s.root_system();
            let g = &s.cascade().gammas;
            assert_eq!(s.cascade().top(), rs.highest_root(), "{p}");
            for (i, a) in g.iter().enumerate() {
                assert!(s.space().partition().noncompact_pos.contains(a));
                assert_eq!(rs.length_sq(a), rs.length_sq(rs.highest_root()), "{p}");
                for b in &g[i + 1..] {
                    assert!(strongly_orthogonal(rs, a, b), "{p}");
                }
            }
            for c in &s.space().partition().noncompact_pos {
                assert!(
                    g.contains(c) || g.iter().any(|x| !strongly_orthogonal(rs, c, x)),
                    "{p}: cascade can be extended by {c}"
                );
            }
            if s.space().dim_p_plus() <= 16 {
                assert_eq!(brute_force_max(s.space()), g.len(), "{p}");
            }
        }
    }

    #[test]
    fn restricted_coefficient_examples() {
        let s = analyze("sp2");
        let rs = s.root_system();
        let cr = s.cascade();
        for (j, g) in cr.gammas.iter().enumerate() {
            let c = restricted_coefficients(rs, cr, g);
            for (k, ck) in c.iter().enumerate() {
                assert_eq!(*ck, int(i64::from(j == k)));
            }
        }
        let c = restricted_coefficients(rs, cr, &Root::new(vec![1, 0]));
        assert_eq!(c[0].abs(), rat(1, 2));
        assert_eq!(c[1].abs(), rat(1, 2));
        assert_eq!(&c[0] + &c[1], int(0));

        // su(2,4) has compact roots orthogonal to the whole cascade.
        let s = analyze("su24");
        assert!(s.restricted().zero_restricted > 0);
    }

    #[test]
    fn restricted_data_examples() {
        let s = analyze("su11");
        assert_eq!(rabp(&s), (1, 0, 0, 2));
        assert!(!s.restricted().a_defined);
        assert_eq!(s.restricted().type_tag, RestrictedType::A1Degenerate);

        let s = analyze("su23");
        assert_eq!(rabp(&s), (2, 2, 1, 5));
        assert_eq!(s.restricted().expected_dim_p_plus(), 6);
        assert_eq!(s.restricted().type_tag, RestrictedType::BC);

        let s = analyze("e7vii");
        assert_eq!(rabp(&s), (3, 8, 0, 18));
        assert_eq!(s.restricted().expected_dim_p_plus(), 27);
        assert_eq!(s.restricted().type_tag, RestrictedType::B);

        let s = analyze("e3iii");
        assert_eq!(rabp(&s), (2, 6, 4, 12));
    }

    #[test]
    fn closed_forms() {
        for p in catalog() {
            let s = PairStructure::analyze(&p).unwrap();
            let l = p.label();
            let got = rabp(&s);
            if let Some(rest) = l.strip_prefix("su") {
                let pp = rest[..1].parse::<usize>().unwrap();
                let qq = rest[1..].parse::<usize>().unwrap();
                let r = pp.min(qq);
                let a = if r >= 2 { 2 } else { 0 };
                assert_eq!(got, (r, a, qq - pp, pp + qq), "{l}");
            } else if let Some(n) = l.strip_prefix("sp") {
                let n: usize = n.parse().unwrap();
                assert_eq!(got, (n, 1, 0, n + 1), "{l}");
            } else if let Some(d) = l.strip_prefix("sostar") {
                let n = d.parse::<usize>().unwrap() / 2;
                assert_eq!(got, (n / 2, 4, 2 * (n % 2), 2 * n - 2), "{l}");
            } else if let Some(m) = l.strip_prefix("so2_") {
                let m: usize = m.parse().unwrap();
                assert_eq!(got, (2, m - 2, 0, m), "{l}");
            }
        }
    }

    #[test]
    fn rho_identities_hold_everywhere() {
        for p in catalog() {
            let s = PairStructure::analyze(&p).unwrap();
            let lines = s.rho_identities().unwrap();
            assert_eq!(lines.len(), s.cascade().r() + 1);
            assert!(lines.iter().all(|l| l.holds));
        }
        let s = analyze("su11");
        let lines = s.rho_identities().unwrap();
        assert_eq!(lines[0].lhs, "1");
        let s = analyze("sp2");
        let lines = s.rho_identities().unwrap();
        assert!(lines[1..].iter().all(|l| l.lhs == "3"));
    }

    #[test]
    fn weyl_polynomial_examples() {
        let rd1 = RestrictedData {
            r: 1,
            a: 0,
            b: 0,
            p: 2,
            a_defined: false,
            type_tag: RestrictedType::A1Degenerate,
            zero_restricted: 0,
        };
        assert_eq!(weyl_polynomial_p(&rd1, &[0.3]), 0.3);
        let rd2 = RestrictedData { r: 2, a: 1, p: 3, a_defined: true, type_tag: RestrictedType::B, ..rd1 };
        assert_eq!(weyl_polynomial_p(&rd2, &[0.5, 1.0]), 0.375);
        assert_eq!(weyl_polynomial_p(&rd2, &[0.4, 0.4]), 0.0);
    }
}

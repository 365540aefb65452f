//! Existence of the holomorphic discrete series with highest weight
//! `Lambda = Lambda_0 + lambda Lambda_1`: the single inequality
//! `lambda < 1 - p - Lambda_0(h_r)`, the original form
//! `(Lambda + rho)(h_gamma) < 0` for all noncompact positive `gamma`, and a
//! certificate that the two agree.

use num::{Signed, Zero};
use serde::Serialize;

use crate::cascade::PairStructure;
use crate::error::{Error, Result};
use crate::exact::{format_rational, int, to_f64, Rational};
use crate::rootsystem::Root;
use crate::weights::{lambda_one, rho_vectors, validate_lambda0, WeightVector};

/// Highest weight data: `lambda0` (dominant integral on the compact simple
/// coroots, zero on the noncompact one) and the central parameter `lambda`.
#[derive(Debug, Clone)]
pub struct HighestWeightInput<'a> {
    structure: &'a PairStructure,
    lambda0: WeightVector,
    lambda: Rational,
}

impl<'a> HighestWeightInput<'a> {
    pub fn new(structure: &'a PairStructure, lambda0: WeightVector, lambda: Rational) -> Result<Self> {
        validate_lambda0(structure, &lambda0)?;
        Ok(Self { structure, lambda0, lambda })
    }

    /// Takes `lambda` as a float, converted exactly.
    pub fn with_f64(structure: &'a PairStructure, lambda0: WeightVector, lambda: f64) -> Result<Self> {
        let q = Rational::from_float(lambda)
            .ok_or_else(|| Error::Configuration(format!("lambda {lambda} is not finite")))?;
        Self::new(structure, lambda0, q)
    }

    pub fn structure(&self) -> &PairStructure {
        self.structure
    }

    pub fn lambda0(&self) -> &WeightVector {
        &self.lambda0
    }

    pub fn lambda(&self) -> &Rational {
        &self.lambda
    }

    /// `Lambda = Lambda_0 + lambda Lambda_1`.
    pub fn highest_weight(&self) -> WeightVector {
        self.lambda0.add(&lambda_one(self.structure).scale(&self.lambda))
    }
}

/// `1 - p - Lambda_0(h_r)`.
pub fn threshold(s: &PairStructure, lambda0: &WeightVector) -> Rational {
    let rs = s.root_system();
    int(1) - int(s.genus() as i64) - lambda0.pairing(rs, s.cascade().top())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OriginalForm {
    pub holds: bool,
    /// `(Lambda + rho)(h_gamma)` for every noncompact positive root.
    pub values: Vec<(Root, String)>,
    /// Roots with `(Lambda + rho)(h_gamma) >= 0`.
    pub witnesses: Vec<Root>,
}

/// Evaluates `(Lambda_0 + lambda Lambda_1 + rho)(h_gamma) < 0` for every
/// `gamma` in the noncompact positive roots, exactly.
pub fn hc_condition_original(input: &HighestWeightInput) -> OriginalForm {
    let s = input.structure;
    let rs = s.root_system();
    let lr = input.highest_weight().add(&rho_vectors(s).0);
    let mut values = Vec::new();
    let mut witnesses = Vec::new();
    for g in &s.space().partition().noncompact_pos {
        let v = lr.pairing(rs, g);
        if !v.is_negative() {
            witnesses.push(g.clone());
        }
        values.push((g.clone(), format_rational(&v)));
    }
    OriginalForm { holds: witnesses.is_empty(), values, witnesses }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionVerdict {
    pub pair: String,
    pub r: usize,
    pub a: usize,
    pub b: usize,
    pub p: usize,
    pub lambda0: WeightVector,
    pub lambda: String,
    /// Exact `1 - p - Lambda_0(h_r)`.
    pub threshold: String,
    pub exists: bool,
    /// `threshold - lambda`.
    pub margin: f64,
    pub original_form_exists: bool,
    pub witnesses: Vec<Root>,
    /// Whether `lambda` is an integer; only then does the character
    /// exponentiate to a linear group rather than a covering.
    pub lambda_integral: bool,
    #[serde(skip)]
    pub threshold_exact: Rational,
}

/// Decides existence by the single inequality and cross-checks it against
/// the original form; disagreement is a structural error.
pub fn hc_condition(input: &HighestWeightInput) -> Result<CriterionVerdict> {
    let s = input.structure;
    let rd = s.restricted();
    let t = threshold(s, &input.lambda0);
    let exists = input.lambda < t;
    let original = hc_condition_original(input);
    if original.holds != exists {
        return Err(Error::Structural(format!(
            "criterion forms disagree for {} at lambda = {}",
            s.pair(),
            format_rational(&input.lambda)
        )));
    }
    Ok(CriterionVerdict {
        pair: s.pair().label().to_string(),
        r: rd.r,
        a: rd.a,
        b: rd.b,
        p: rd.p,
        lambda0: input.lambda0.clone(),
        lambda: format_rational(&input.lambda),
        threshold: format_rational(&t),
        exists,
        margin: to_f64(&(&t - &input.lambda)),
        original_form_exists: original.holds,
        witnesses: original.witnesses,
        lambda_integral: input.lambda.is_integer(),
        threshold_exact: t,
    })
}

/// `gamma = gamma_r - sum m_j alpha_j` for one noncompact positive root.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub gamma: Root,
    /// Coefficients `m_j` on the simple roots; zero on the noncompact node.
    pub m: Vec<i64>,
    /// `(Lambda + rho | gamma)`.
    pub inner: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionTrace {
    pub top: Root,
    /// `(Lambda + rho | gamma_r)`.
    pub top_inner: String,
    /// `(Lambda_0 + rho | alpha_j)` for each compact simple root; all positive.
    pub compact_steps: Vec<(usize, String)>,
    pub entries: Vec<TraceEntry>,
}

/// For every noncompact positive `gamma`, expands `gamma_r - gamma` in the
/// compact simple roots with non-negative integer coefficients and verifies
/// `(Lambda+rho | gamma) = (Lambda+rho | gamma_r) - sum m_j (Lambda_0+rho | alpha_j)`
/// with every `(Lambda_0+rho | alpha_j) > 0`. Hence the sign of
/// `(Lambda+rho)(h_gamma_r)` decides all the others.
pub fn reduction_trace(input: &HighestWeightInput) -> Result<ReductionTrace> {
    let s = input.structure;
    let rs = s.root_system();
    let n = rs.rank();
    let node = s.space().noncompact_node();
    let top = s.cascade().top();
    let rho = rho_vectors(s).0;
    let lr = input.highest_weight().add(&rho);
    let l0r = input.lambda0.add(&rho);
    let top_inner = lr.inner_root(rs, top);

    let mut steps = vec![Rational::zero(); n];
    let mut compact_steps = Vec::new();
    for j in s.space().compact_nodes() {
        let v = l0r.inner_root(rs, &Root::simple(n, j));
        if !v.is_positive() {
            return Err(Error::Structural(format!("(Lambda_0 + rho | alpha_{}) is not positive", j + 1)));
        }
        compact_steps.push((j, format_rational(&v)));
        steps[j] = v;
    }

    let mut entries = Vec::new();
    for g in &s.space().partition().noncompact_pos {
        let m = top.minus(g).coeffs().to_vec();
        if m[node] != 0 || m.iter().any(|&x| x < 0) {
            return Err(Error::Structural(format!("{g} is not gamma_r minus a compact cone element")));
        }
        let inner = lr.inner_root(rs, g);
        let chain: Rational = m
            .iter()
            .zip(&steps)
            .map(|(&mj, st)| int(mj) * st)
            .fold(top_inner.clone(), |acc, x| acc - x);
        if chain != inner || inner > top_inner {
            return Err(Error::Structural(format!("reduction chain fails at {g}")));
        }
        entries.push(TraceEntry { gamma: g.clone(), m, inner: format_rational(&inner) });
    }
    Ok(ReductionTrace { top: top.clone(), top_inner: format_rational(&top_inner), compact_steps, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{parse_decimal, rat};
    use crate::hermitian::catalog;
    use crate::weights::lambda0_from_compact;
    use proptest::prelude::*;

    fn st(label: &str) -> PairStructure {
        PairStructure::from_label(label).unwrap()
    }

    fn verdict(s: &PairStructure, l0: &[i64], lambda: &str) -> CriterionVerdict {
        let l0 = lambda0_from_compact(s, l0).unwrap();
        let input = HighestWeightInput::new(s, l0, parse_decimal(lambda).unwrap()).unwrap();
        hc_condition(&input).unwrap()
    }

    #[test]
    fn scalar_examples() {
        let s = st("su11");
        let v = verdict(&s, &[], "-2");
        assert_eq!(v.threshold, "-1");
        assert!(v.exists && v.original_form_exists);
        assert!(v.witnesses.is_empty());
        let v = verdict(&s, &[], "-1");
        assert!(!v.exists);
        assert_eq!(v.witnesses, vec![Root::new(vec![1])]);

        let s = st("sp2");
        let v = verdict(&s, &[], "-2.0");
        assert_eq!(v.threshold, "-2");
        assert!(!v.exists);
        assert!(verdict(&s, &[], "-2.0001").exists);
    }

    #[test]
    fn original_form_values() {
        let s = st("su11");
        let input = HighestWeightInput::new(&s, WeightVector::zero(1), int(-2)).unwrap();
        let o = hc_condition_original(&input);
        assert_eq!(o.values, vec![(Root::new(vec![1]), "-1".to_string())]);

        for p in catalog() {
            let s = PairStructure::analyze(&p).unwrap();
            let n = s.root_system().rank();
            let input = HighestWeightInput::new(&s, WeightVector::zero(n), int(0)).unwrap();
            let o = hc_condition_original(&input);
            assert!(!o.holds);
            assert!(o.witnesses.contains(s.cascade().top()), "{p}");
        }
    }

    #[test]
    fn scalar_threshold_is_one_minus_p() {
        for p in catalog() {
            let s = PairStructure::analyze(&p).unwrap();
            let n = s.root_system().rank();
            assert_eq!(threshold(&s, &WeightVector::zero(n)), int(1) - int(s.genus() as i64), "{p}");
        }
    }

    #[test]
    fn forms_agree_on_a_grid() {
        let offsets = [rat(-3, 1), rat(-1, 1), rat(-1, 4), int(0), rat(1, 4), int(1), int(3), rat(-1, 2)];
        for p in catalog() {
            let s = PairStructure::analyze(&p).unwrap();
            let n = s.root_system().rank();
            let mut l0s = vec![WeightVector::zero(n)];
            for &i in s.space().compact_nodes().iter().take(3) {
                l0s.push(WeightVector::fundamental(n, i));
            }
            for l0 in l0s {
                let t = threshold(&s, &l0);
                for off in &offsets {
                    let input = HighestWeightInput::new(&s, l0.clone(), &t + off).unwrap();
                    let v = hc_condition(&input).unwrap();
                    assert_eq!(v.exists, v.original_form_exists);
                    assert_eq!(v.exists, off.is_negative());
                }
                let input = HighestWeightInput::new(&s, l0.clone(), t).unwrap();
                let tr = reduction_trace(&input).unwrap();
                assert_eq!(tr.entries.len(), s.space().dim_p_plus());
            }
        }
    }

    #[test]
    fn reduction_trace_examples() {
        let s = st("sp2");
        let input = HighestWeightInput::new(&s, WeightVector::zero(2), int(-5)).unwrap();
        let tr = reduction_trace(&input).unwrap();
        assert_eq!(tr.top.coeffs(), &[2, 1]);
        let find = |c: &[i64]| tr.entries.iter().find(|e| e.gamma.coeffs() == c).unwrap().m.clone();
        assert_eq!(find(&[2, 1]), vec![0, 0]);
        assert_eq!(find(&[1, 1]), vec![1, 0]);
        assert_eq!(find(&[0, 1]), vec![2, 0]);
    }

    #[test]
    fn rejects_bad_lambda0() {
        let s = st("sp3");
        let bad = WeightVector::from_ints(&[1, 0, 1]);
        assert!(HighestWeightInput::new(&s, bad, int(0)).is_err());
        assert!(HighestWeightInput::with_f64(&s, WeightVector::zero(3), f64::NAN).is_err());
    }

    #[test]
    fn advisory_integrality_flag() {
        let s = st("su12");
        assert!(verdict(&s, &[], "-5").lambda_integral);
        assert!(!verdict(&s, &[], "-5.5").lambda_integral);
    }

    fn labels() -> Vec<String> {
        catalog()
            .into_iter()
            .filter(|p| p.cartan_type().rank() <= 6)
            .map(|p| p.label().to_string())
            .collect()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn equivalence_random(idx in 0usize..100, num in -4000i64..4000, den in 1i64..64, pick in 0usize..4, mult in 1i64..3) {
            let ls = labels();
            let s = st(&ls[idx % ls.len()]);
            let n = s.root_system().rank();
            let nodes = s.space().compact_nodes();
            let mut l0 = WeightVector::zero(n);
            if pick > 0 && pick <= nodes.len() {
                l0 = WeightVector::fundamental(n, nodes[pick - 1]).scale(&int(mult));
            }
            let lambda = &threshold(&s, &l0) + rat(num, den * 100);
            let input = HighestWeightInput::new(&s, l0, lambda).unwrap();
            let v = hc_condition(&input).unwrap();
            prop_assert_eq!(v.exists, v.original_form_exists);
            prop_assert!(reduction_trace(&input).is_ok());
        }

        #[test]
        fn monotone_in_lambda_and_lambda0(idx in 0usize..100, num in -300i64..300, k in 0usize..6) {
            let ls = labels();
            let s = st(&ls[idx % ls.len()]);
            let n = s.root_system().rank();
            let nodes = s.space().compact_nodes();
            let l0 = WeightVector::zero(n);
            let lam = rat(num, 10);
            let e1 = hc_condition(&HighestWeightInput::new(&s, l0.clone(), lam.clone()).unwrap()).unwrap().exists;
            let e2 = hc_condition(&HighestWeightInput::new(&s, l0.clone(), &lam - rat(1, 10)).unwrap()).unwrap().exists;
            prop_assert!(!e1 || e2);
            if !nodes.is_empty() {
                let bigger = l0.add(&WeightVector::fundamental(n, nodes[k % nodes.len()]));
                prop_assert!(threshold(&s, &bigger) <= threshold(&s, &l0));
            }
        }
    }
}

//! Report records and their table / JSON renderings.

use std::fmt::Write;

use hdt_core::cascade::{restricted_coefficients, IdentityLine, PairStructure};
use hdt_core::convergence::ConvergenceReport;
use hdt_core::criterion::CriterionVerdict;
use hdt_core::exact::{format_rational, int, rat, Rational};
use hdt_core::suite::{CheckRecord, SuiteReport};
use num::Zero;
use serde::Serialize;

/// `x` rounded to 12 significant digits.
pub fn sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// `x` printed with 12 significant digits, trailing zeros removed.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let s = format!("{x:.11e}");
        let (mant, e) = s.split_once('e').unwrap_or((&s, "0"));
        let mant = if mant.contains('.') { mant.trim_end_matches('0').trim_end_matches('.') } else { mant };
        format!("{mant}e{e}")
    }
}

fn ser12<S: serde::Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(sig12(*x))
}

fn ser12_opt<S: serde::Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_some(&sig12(*v)),
        None => s.serialize_none(),
    }
}

/// A check line in JSON output.
#[derive(Debug, Clone, Serialize)]
pub struct CheckJson {
    pub name: String,
    #[serde(serialize_with = "ser12")]
    pub residual: f64,
    #[serde(serialize_with = "ser12")]
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
}

impl From<&CheckRecord> for CheckJson {
    fn from(c: &CheckRecord) -> Self {
        Self { name: c.name.clone(), residual: c.residual, tolerance: c.tolerance, passed: c.passed, detail: c.detail.clone() }
    }
}

impl From<&IdentityLine> for CheckJson {
    fn from(l: &IdentityLine) -> Self {
        Self {
            name: l.name.clone(),
            residual: if l.holds { 0.0 } else { 1.0 },
            tolerance: 0.0,
            passed: l.holds,
            detail: format!("{} = {}", l.lhs, l.rhs),
        }
    }
}

/// The fixed envelope of every per-pair JSON report.
#[derive(Debug, Clone, Serialize)]
pub struct PairJson<T: Serialize> {
    pub pair: String,
    pub r: usize,
    pub a: usize,
    pub b: usize,
    pub p: usize,
    pub threshold: String,
    pub exists: Option<bool>,
    pub checks: Vec<CheckJson>,
    #[serde(flatten)]
    pub extra: T,
}

impl<T: Serialize> PairJson<T> {
    pub fn new(s: &PairStructure, threshold: &Rational, exists: Option<bool>, checks: Vec<CheckJson>, extra: T) -> Self {
        let rd = s.restricted();
        Self {
            pair: s.pair().label().to_string(),
            r: rd.r,
            a: rd.a,
            b: rd.b,
            p: rd.p,
            threshold: format_rational(threshold),
            exists,
            checks,
            extra,
        }
    }
}

fn zero_threshold(s: &PairStructure) -> Rational {
    int(1) - int(s.genus() as i64)
}

fn a_text(s: &PairStructure) -> String {
    let rd = s.restricted();
    if rd.a_defined {
        rd.a.to_string()
    } else {
        "-".into()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CatalogExtra {
    pub name: String,
    pub cartan: String,
    pub dim_p_plus: usize,
    pub restricted_type: String,
}

pub fn catalog_json(rows: &[PairStructure]) -> Vec<PairJson<CatalogExtra>> {
    rows.iter()
        .map(|s| {
            let rd = s.restricted();
            PairJson::new(
                s,
                &zero_threshold(s),
                None,
                vec![],
                CatalogExtra {
                    name: s.pair().name().to_string(),
                    cartan: s.pair().cartan_type().to_string(),
                    dim_p_plus: s.space().dim_p_plus(),
                    restricted_type: rd.type_tag.tag(rd.r),
                },
            )
        })
        .collect()
}

pub fn catalog_table(rows: &[PairStructure]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<10} {:<18} {:<6} {:>2} {:>2} {:>2} {:>3} {:>6}  restricted", "pair", "name", "cartan", "r", "a", "b", "p", "dim p+");
    for s in rows {
        let rd = s.restricted();
        let _ = writeln!(
            out,
            "{:<10} {:<18} {:<6} {:>2} {:>2} {:>2} {:>3} {:>6}  {}",
            s.pair().label(),
            s.pair().name(),
            s.pair().cartan_type().to_string(),
            rd.r,
            a_text(s),
            rd.b,
            rd.p,
            s.space().dim_p_plus(),
            rd.type_tag.tag(rd.r)
        );
    }
    let _ = writeln!(out, "{} pairs", rows.len());
    out
}

/// Counts of noncompact positive roots restricting to `gamma_j`,
/// `(gamma_j + gamma_k)/2` and `gamma_j/2`.
pub fn noncompact_classes(s: &PairStructure) -> [usize; 3] {
    let rs = s.root_system();
    let half = rat(1, 2);
    let mut counts = [0; 3];
    for g in &s.space().partition().noncompact_pos {
        let co = restricted_coefficients(rs, s.cascade(), g);
        let nz: Vec<&Rational> = co.iter().filter(|c| !c.is_zero()).collect();
        match (nz.len(), nz.first()) {
            (1, Some(c)) if **c == int(1) => counts[0] += 1,
            (2, _) => counts[1] += 1,
            (1, Some(c)) if **c == half => counts[2] += 1,
            _ => {}
        }
    }
    counts
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalyzeExtra {
    pub name: String,
    pub cartan: String,
    pub noncompact_node: usize,
    pub compact_nodes: Vec<usize>,
    pub restricted_type: String,
    pub dim_p_plus: usize,
    pub cascade: Vec<Vec<i64>>,
    pub noncompact_classes: [usize; 3],
    pub zero_restricted: usize,
}

pub fn analyze_json(s: &PairStructure, lines: &[IdentityLine]) -> PairJson<AnalyzeExtra> {
    let rd = s.restricted();
    PairJson::new(
        s,
        &zero_threshold(s),
        None,
        lines.iter().map(CheckJson::from).collect(),
        AnalyzeExtra {
            name: s.pair().name().to_string(),
            cartan: s.pair().cartan_type().to_string(),
            noncompact_node: s.space().noncompact_node() + 1,
            compact_nodes: s.space().compact_nodes().iter().map(|i| i + 1).collect(),
            restricted_type: rd.type_tag.tag(rd.r),
            dim_p_plus: s.space().dim_p_plus(),
            cascade: s.cascade().gammas.iter().map(|g| g.coeffs().to_vec()).collect(),
            noncompact_classes: noncompact_classes(s),
            zero_restricted: rd.zero_restricted,
        },
    )
}

fn coeff_list(v: &[i64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

pub fn analyze_table(s: &PairStructure, lines: &[IdentityLine]) -> String {
    let rd = s.restricted();
    let mut out = String::new();
    let nodes: Vec<String> = s.space().compact_nodes().iter().map(|i| (i + 1).to_string()).collect();
    let _ = writeln!(out, "pair         {} ({})", s.pair().label(), s.pair().name());
    let _ = writeln!(out, "cartan       {}, noncompact node {}", s.pair().cartan_type(), s.space().noncompact_node() + 1);
    let _ = writeln!(
        out,
        "lambda0      compact nodes {}",
        if nodes.is_empty() { "(none)".to_string() } else { nodes.join(", ") }
    );
    let _ = writeln!(out, "r a b p      {} {} {} {}", rd.r, a_text(s), rd.b, rd.p);
    let _ = writeln!(out, "restricted   {}", rd.type_tag.tag(rd.r));
    let _ = writeln!(
        out,
        "dim p+       {} = r + a r(r-1)/2 + b r = {}",
        s.space().dim_p_plus(),
        rd.expected_dim_p_plus()
    );
    let _ = writeln!(out, "cascade (simple-root coordinates)");
    for (j, g) in s.cascade().gammas.iter().enumerate() {
        let _ = writeln!(out, "  gamma_{} = {}  ({})", j + 1, coeff_list(g.coeffs()), g);
    }
    let [long, mid, short] = noncompact_classes(s);
    let _ = writeln!(out, "restricted roots   multiplicity  count");
    let _ = writeln!(out, "  gamma_j                     1  {:>5}", rd.r);
    if rd.r > 1 {
        let _ = writeln!(out, "  (gamma_j +- gamma_k)/2   {:>4}  {:>5}", a_text(s), rd.r * (rd.r - 1) / 2);
    }
    let _ = writeln!(out, "  gamma_j/2                {:>4}  {:>5}", rd.b, rd.r);
    let _ = writeln!(out, "  0 (compact)                 -  {:>5}", rd.zero_restricted);
    let _ = writeln!(
        out,
        "noncompact   {} positive roots classified: {} + {} + {}",
        long + mid + short,
        long,
        mid,
        short
    );
    let _ = writeln!(out, "identities");
    for l in lines {
        let mark = if l.holds { "✓" } else { "✗" };
        let _ = writeln!(out, "  {}: {} = {} {}", l.name, l.lhs, l.rhs, mark);
    }
    let _ = writeln!(out, "threshold    lambda < {} (lambda0 = 0)", format_rational(&zero_threshold(s)));
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionExtra {
    pub lambda0: Vec<String>,
    pub lambda: String,
    #[serde(serialize_with = "ser12")]
    pub margin: f64,
    pub original_form_exists: bool,
    pub agreement: bool,
    pub lambda_integral: bool,
    pub witnesses: Vec<Vec<i64>>,
}

pub fn criterion_json(s: &PairStructure, v: &CriterionVerdict) -> PairJson<CriterionExtra> {
    let check = CheckJson {
        name: "single inequality agrees with original form".into(),
        residual: 0.0,
        tolerance: 0.0,
        passed: v.exists == v.original_form_exists,
        detail: String::new(),
    };
    PairJson::new(
        s,
        &v.threshold_exact,
        Some(v.exists),
        vec![check],
        CriterionExtra {
            lambda0: v.lambda0.coords().iter().map(format_rational).collect(),
            lambda: v.lambda.clone(),
            margin: v.margin,
            original_form_exists: v.original_form_exists,
            agreement: v.exists == v.original_form_exists,
            lambda_integral: v.lambda_integral,
            witnesses: v.witnesses.iter().map(|w| w.coeffs().to_vec()).collect(),
        },
    )
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn criterion_table(s: &PairStructure, v: &CriterionVerdict) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "pair         {}", v.pair);
    let _ = writeln!(out, "r a b p      {} {} {} {}", v.r, a_text(s), v.b, v.p);
    let _ = writeln!(out, "lambda0      {}", v.lambda0);
    let _ = writeln!(out, "lambda       {}", v.lambda);
    let _ = writeln!(out, "threshold    {}", v.threshold);
    let _ = writeln!(out, "margin       {}", num(v.margin));
    let _ = writeln!(out, "exists       {}", yes_no(v.exists));
    let _ = writeln!(
        out,
        "original     {} ({})",
        yes_no(v.original_form_exists),
        if v.exists == v.original_form_exists { "agrees" } else { "DISAGREES" }
    );
    let _ = writeln!(out, "integral     {}", yes_no(v.lambda_integral));
    if !v.witnesses.is_empty() {
        let _ = writeln!(out, "witnesses    (Lambda + rho)(h_gamma) >= 0 for");
        for w in &v.witnesses {
            let _ = writeln!(out, "  {} ({})", coeff_list(w.coeffs()), w);
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct IntegrateExtra {
    pub lambda0: Vec<String>,
    pub lambda: String,
    pub classification: String,
    pub analytic_min_exponent: String,
    pub quadrature: bool,
    pub order: usize,
    pub ladder: Vec<LadderRow>,
    #[serde(serialize_with = "ser12_opt")]
    pub fitted_slope: Option<f64>,
    #[serde(serialize_with = "ser12_opt")]
    pub increment_exponent: Option<f64>,
    pub empirical: Option<String>,
    pub agreement: Option<bool>,
    #[serde(serialize_with = "ser12_opt")]
    pub value: Option<f64>,
    #[serde(serialize_with = "ser12_opt")]
    pub value_error: Option<f64>,
    #[serde(serialize_with = "ser12_opt")]
    pub disc_normalized: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LadderRow {
    #[serde(serialize_with = "ser12")]
    pub epsilon: f64,
    #[serde(serialize_with = "ser12")]
    pub value: f64,
    #[serde(serialize_with = "ser12_opt")]
    pub increment: Option<f64>,
}

fn ladder_rows(r: &ConvergenceReport) -> Vec<LadderRow> {
    r.truncated_values
        .iter()
        .enumerate()
        .map(|(i, &(e, v))| LadderRow {
            epsilon: e,
            value: v,
            increment: if i == 0 { None } else { r.increments.get(i - 1).copied() },
        })
        .collect()
}

pub fn integrate_json(
    s: &PairStructure,
    threshold: &Rational,
    exists: bool,
    lambda0: Vec<String>,
    r: &ConvergenceReport,
) -> PairJson<IntegrateExtra> {
    let mut checks = Vec::new();
    if let Some(a) = r.agreement {
        checks.push(CheckJson {
            name: "empirical classification agrees with exponent analysis".into(),
            residual: if a { 0.0 } else { 1.0 },
            tolerance: 0.0,
            passed: a,
            detail: String::new(),
        });
    }
    PairJson::new(
        s,
        threshold,
        Some(exists),
        checks,
        IntegrateExtra {
            lambda0,
            lambda: r.lambda.clone(),
            classification: r.classification.to_string(),
            analytic_min_exponent: r.analytic_min_exponent_exact.clone(),
            quadrature: r.quadrature,
            order: r.order,
            ladder: ladder_rows(r),
            fitted_slope: r.fitted_slope,
            increment_exponent: r.increment_exponent,
            empirical: r.empirical.map(|c| c.to_string()),
            agreement: r.agreement,
            value: r.formal_dimension_scalar.map(|e| e.value),
            value_error: r.formal_dimension_scalar.map(|e| e.error),
            disc_normalized: r.disc_normalized,
        },
    )
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_else(|| "-".into())
}

pub fn integrate_table(r: &ConvergenceReport, threshold: &Rational) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "pair         {}", r.pair);
    let _ = writeln!(out, "lambda       {}", r.lambda);
    let _ = writeln!(out, "threshold    {}", format_rational(threshold));
    let _ = writeln!(out, "min exponent {} (convergent iff > -1)", r.analytic_min_exponent_exact);
    let _ = writeln!(out, "rows         {}", r.weight_rows);
    if r.quadrature {
        let _ = writeln!(out, "order        {}", r.order);
        let _ = writeln!(out, "{:>20} {:>20} {:>20}", "epsilon", "I(epsilon)", "increment");
        for row in ladder_rows(r) {
            let _ = writeln!(out, "{:>20} {:>20} {:>20}", num(row.epsilon), num(row.value), opt(row.increment));
        }
        let _ = writeln!(out, "fitted slope {}", opt(r.fitted_slope));
        let _ = writeln!(out, "increment exponent {}", opt(r.increment_exponent));
        if let Some(e) = r.empirical {
            let _ = writeln!(out, "empirical    {e}");
        }
    } else {
        let _ = writeln!(out, "quadrature   skipped (analytic only)");
    }
    let _ = writeln!(out, "class        {}", r.classification);
    if let Some(e) = r.formal_dimension_scalar {
        let _ = writeln!(out, "value        {} +- {}", num(e.value), num(e.error));
    }
    if let Some(d) = r.disc_normalized {
        let _ = writeln!(out, "disc formal dimension {}", num(d));
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyJson {
    pub scope: String,
    pub seed: Option<u64>,
    pub passed: bool,
    pub failed: usize,
    pub checks: Vec<CheckJson>,
}

pub fn verify_json(r: &SuiteReport) -> VerifyJson {
    VerifyJson {
        scope: r.scope.clone(),
        seed: r.seed,
        passed: r.passed(),
        failed: r.failures().count(),
        checks: r.checks.iter().map(CheckJson::from).collect(),
    }
}

pub fn verify_table(r: &SuiteReport) -> String {
    let mut out = String::new();
    for c in &r.checks {
        let _ = writeln!(
            out,
            "{}  {:<60} {:>20} {:>20}{}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            num(c.residual),
            num(c.tolerance),
            if c.detail.is_empty() { String::new() } else { format!("  {}", c.detail) }
        );
    }
    let failed = r.failures().count();
    let seed = r.seed.map(|s| format!(", seed {s}")).unwrap_or_default();
    let _ = writeln!(out, "{} checks, {} failed ({}{})", r.checks.len(), failed, r.scope, seed);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(num(0.25), "0.25");
        assert_eq!(num(1.0 / 3.0), "0.333333333333");
        assert_eq!(num(-2.0), "-2");
        assert_eq!(num(123456.7890123456), "123456.789012");
        assert_eq!(num(1e-12), "1e-12");
        assert_eq!(num(2.5e-7), "2.5e-7");
        assert_eq!(num(0.0), "0");
        assert_eq!(sig12(1.0 / 3.0), 0.333333333333);
    }
}

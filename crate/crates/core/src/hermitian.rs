//! Hermitian symmetric pairs given by a Cartan type and a cominuscule node,
//! and the split of the positive roots into compact and noncompact ones.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rootsystem::{CartanType, Family, Root, RootSystem};

/// A Hermitian symmetric pair: a Cartan type with a distinguished simple root
/// (the only noncompact one).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HermitianPair {
    cartan_type: CartanType,
    /// Zero-based index of the noncompact simple root.
    noncompact_node: usize,
    label: String,
    name: String,
}

impl HermitianPair {
    /// Validates that `node` (zero-based) has coefficient 1 in the highest root.
    pub fn new(cartan_type: CartanType, node: usize, label: &str, name: &str) -> Result<Self> {
        if node >= cartan_type.rank() {
            return Err(Error::NotCominuscule { cartan: cartan_type.to_string(), node: node + 1 });
        }
        let rs = RootSystem::build(cartan_type)?;
        if rs.highest_root().coeffs()[node] != 1 {
            return Err(Error::NotCominuscule { cartan: cartan_type.to_string(), node: node + 1 });
        }
        Ok(Self { cartan_type, noncompact_node: node, label: label.into(), name: name.into() })
    }

    pub fn cartan_type(&self) -> CartanType {
        self.cartan_type
    }

    pub fn noncompact_node(&self) -> usize {
        self.noncompact_node
    }

    /// Machine label, e.g. `su23`, `sp3`, `sostar10`, `so2_5`, `e7vii`.
    pub fn label(&self) -> &str {
        &self.label
    }

    /// Human-readable name, e.g. `A III su(2,3)`.
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Zero-based indices of the compact simple roots, ascending.
    pub fn compact_nodes(&self) -> Vec<usize> {
        (0..self.cartan_type.rank()).filter(|&i| i != self.noncompact_node).collect()
    }
}

impl fmt::Display for HermitianPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label)
    }
}

fn entry(family: Family, rank: usize, node: usize, label: String, name: String) -> HermitianPair {
    let t = CartanType::new(family, rank).expect("catalog rank");
    HermitianPair::new(t, node - 1, &label, &name).expect("catalog entries are cominuscule")
}

/// The built-in catalog: su(p,q) for p <= q, p + q <= 8; sp(n,R), so(2,m)
/// and so*(2n) up to rank 7; E III and E VII.
pub fn catalog() -> Vec<HermitianPair> {
    let mut out = Vec::new();
    for p in 1..=4usize {
        for q in p..=(8 - p) {
            out.push(entry(
                Family::A,
                p + q - 1,
                p,
                format!("su{p}{q}"),
                format!("A III su({p},{q})"),
            ));
        }
    }
    for n in 2..=7usize {
        out.push(entry(Family::C, n, n, format!("sp{n}"), format!("C I sp({n},R)")));
    }
    for m in 3..=13usize {
        let (family, rank) = if m % 2 == 1 { (Family::B, m.div_ceil(2)) } else { (Family::D, m / 2 + 1) };
        out.push(entry(family, rank, 1, format!("so2_{m}"), format!("BD I so(2,{m})")));
    }
    for n in 4..=7usize {
        let d = 2 * n;
        out.push(entry(Family::D, n, n, format!("sostar{d}"), format!("D III so*({d})")));
    }
    out.push(entry(Family::E6, 6, 1, "e3iii".into(), "E III".into()));
    out.push(entry(Family::E7, 7, 7, "e7vii".into(), "E VII".into()));
    out
}

/// Finds a catalog entry by its label.
pub fn lookup(label: &str) -> Result<HermitianPair> {
    catalog()
        .into_iter()
        .find(|p| p.label == label)
        .ok_or_else(|| Error::UnknownPair(label.to_string()))
}

/// Positive roots split by their coefficient on the noncompact node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RootPartition {
    pub compact_pos: Vec<Root>,
    pub noncompact_pos: Vec<Root>,
}

pub fn partition_roots(rs: &RootSystem, node: usize) -> Result<RootPartition> {
    let mut compact_pos = Vec::new();
    let mut noncompact_pos = Vec::new();
    for r in rs.positive_roots() {
        match r.coeffs()[node] {
            0 => compact_pos.push(r.clone()),
            1 => noncompact_pos.push(r.clone()),
            c => {
                return Err(Error::Structural(format!(
                    "positive root {r} has coefficient {c} on the noncompact node"
                )))
            }
        }
    }
    Ok(RootPartition { compact_pos, noncompact_pos })
}

/// A pair together with its root system and root partition.
#[derive(Debug, Clone)]
pub struct HermitianSpace {
    pair: HermitianPair,
    rs: RootSystem,
    partition: RootPartition,
}

impl HermitianSpace {
    pub fn new(pair: &HermitianPair) -> Result<Self> {
        let rs = RootSystem::build(pair.cartan_type)?;
        let partition = partition_roots(&rs, pair.noncompact_node)?;
        Ok(Self { pair: pair.clone(), rs, partition })
    }

    pub fn from_label(label: &str) -> Result<Self> {
        Self::new(&lookup(label)?)
    }

    pub fn pair(&self) -> &HermitianPair {
        &self.pair
    }

    pub fn root_system(&self) -> &RootSystem {
        &self.rs
    }

    pub fn partition(&self) -> &RootPartition {
        &self.partition
    }

    pub fn rank(&self) -> usize {
        self.rs.rank()
    }

    pub fn noncompact_node(&self) -> usize {
        self.pair.noncompact_node
    }

    pub fn compact_nodes(&self) -> Vec<usize> {
        self.pair.compact_nodes()
    }

    /// Complex dimension of p+, i.e. the number of noncompact positive roots.
    pub fn dim_p_plus(&self) -> usize {
        self.partition.noncompact_pos.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(label: &str) -> HermitianSpace {
        HermitianSpace::from_label(label).unwrap()
    }

    #[test]
    fn catalog_shape() {
        let cat = catalog();
        assert!(cat.len() >= 20);
        let mut labels: Vec<&str> = cat.iter().map(HermitianPair::label).collect();
        labels.sort_unstable();
        labels.dedup();
        assert_eq!(labels.len(), cat.len(), "labels are unique");
        for l in ["su11", "sp2", "e7vii", "e3iii", "sostar10", "so2_5", "so2_6"] {
            assert!(lookup(l).is_ok(), "{l}");
        }
        assert_eq!(lookup("bogus"), Err(Error::UnknownPair("bogus".into())));
        let su11 = lookup("su11").unwrap();
        assert_eq!(su11.cartan_type(), CartanType::new(Family::A, 1).unwrap());
        assert_eq!(su11.noncompact_node(), 0);
        let sp2 = lookup("sp2").unwrap();
        assert_eq!(sp2.noncompact_node(), 1);
    }

    #[test]
    fn cominuscule_check() {
        for p in catalog() {
            let rs = RootSystem::build(p.cartan_type()).unwrap();
            assert_eq!(rs.highest_root().coeffs()[p.noncompact_node()], 1, "{p}");
        }
        let c3 = CartanType::new(Family::C, 3).unwrap();
        assert!(HermitianPair::new(c3, 0, "x", "x").is_err());
    }

    #[test]
    fn exactly_one_e7_node_is_cominuscule() {
        let e7 = CartanType::new(Family::E7, 7).unwrap();
        let ok: Vec<usize> = (0..7).filter(|&i| HermitianPair::new(e7, i, "", "").is_ok()).collect();
        assert_eq!(ok, vec![6]);
        let e6 = CartanType::new(Family::E6, 6).unwrap();
        let ok: Vec<usize> = (0..6).filter(|&i| HermitianPair::new(e6, i, "", "").is_ok()).collect();
        assert_eq!(ok, vec![0, 5]);
    }

    #[test]
    fn partition_examples() {
        let s = space("su11");
        assert_eq!(s.partition().noncompact_pos, vec![Root::new(vec![1])]);
        assert!(s.partition().compact_pos.is_empty());

        let s = space("sp2");
        assert_eq!(s.partition().noncompact_pos.len(), 3);
        assert_eq!(s.partition().compact_pos.len(), 1);

        assert_eq!(space("e7vii").dim_p_plus(), 27);
        assert_eq!(space("e3iii").dim_p_plus(), 16);
        assert_eq!(space("su22").dim_p_plus(), 4);
        assert_eq!(space("sp3").dim_p_plus(), 6);
    }

    #[test]
    fn dimension_formulas() {
        for p in catalog() {
            let s = HermitianSpace::new(&p).unwrap();
            let l = p.label();
            let dim = s.dim_p_plus();
            let total = s.root_system().positive_roots().len();
            assert_eq!(dim + s.partition().compact_pos.len(), total);
            if let Some(rest) = l.strip_prefix("su") {
                let pp = rest[..1].parse::<usize>().unwrap();
                let qq = rest[1..].parse::<usize>().unwrap();
                assert_eq!(dim, pp * qq, "{l}");
            } else if let Some(n) = l.strip_prefix("sp") {
                let n: usize = n.parse().unwrap();
                assert_eq!(dim, n * (n + 1) / 2, "{l}");
            } else if let Some(d) = l.strip_prefix("sostar") {
                let n = d.parse::<usize>().unwrap() / 2;
                assert_eq!(dim, n * (n - 1) / 2, "{l}");
            } else if let Some(m) = l.strip_prefix("so2_") {
                assert_eq!(dim, m.parse::<usize>().unwrap(), "{l}");
            }
        }
    }

    #[test]
    fn noncompact_roots_are_abelian_and_k_stable() {
        for p in catalog() {
            let s = HermitianSpace::new(&p).unwrap();
            let rs = s.root_system();
            let nc = &s.partition().noncompact_pos;
            for a in nc {
                for b in nc {
                    assert!(!rs.is_root(a.plus(b).coeffs()), "{p}: {a} + {b}");
                }
                for c in &s.partition().compact_pos {
                    let sum = a.plus(c);
                    if rs.is_root(sum.coeffs()) {
                        assert!(nc.contains(&sum), "{p}");
                    }
                }
            }
        }
    }
}

//! Root systems of the simple complex Lie algebras A–E7, generated from
//! the Cartan matrix.
//!
//! Roots are integer coefficient vectors in the simple-root basis. Inner
//! products go through the Gram matrix of the simple roots, normalized so
//! that long roots have squared length 2. Simple roots are numbered as in
//! Bourbaki (for E6/E7: 1-3-4-5-6(-7) with 2 attached to 4).

use std::collections::{HashSet, VecDeque};
use std::fmt;

use num::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{int, rat, solve_linear, Rational, RationalMatrix, RationalVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    E6,
    E7,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct CartanType {
    family: Family,
    rank: usize,
}

impl CartanType {
    pub fn new(family: Family, rank: usize) -> Result<Self> {
        let ok = match family {
            Family::A => rank >= 1,
            Family::B | Family::C => rank >= 2,
            Family::D => rank >= 3,
            Family::E6 => rank == 6,
            Family::E7 => rank == 7,
        };
        if ok {
            Ok(Self { family, rank })
        } else {
            Err(Error::InvalidCartanType { family: format!("{family:?}"), rank })
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Dimension of the complex simple Lie algebra of this type.
    pub fn algebra_dimension(&self) -> usize {
        let n = self.rank;
        match self.family {
            Family::A => n * (n + 2),
            Family::B | Family::C => n * (2 * n + 1),
            Family::D => n * (2 * n - 1),
            Family::E6 => 78,
            Family::E7 => 133,
        }
    }

    /// Twice the Gram matrix of the simple roots; all entries are integers.
    fn doubled_gram(&self) -> Vec<Vec<i64>> {
        let n = self.rank;
        let mut g = vec![vec![0i64; n]; n];
        let link = |g: &mut Vec<Vec<i64>>, i: usize, j: usize, v: i64| {
            g[i][j] = v;
            g[j][i] = v;
        };
        match self.family {
            Family::A => {
                for i in 0..n {
                    g[i][i] = 4;
                }
                for i in 0..n.saturating_sub(1) {
                    link(&mut g, i, i + 1, -2);
                }
            }
            Family::B => {
                for i in 0..n {
                    g[i][i] = if i + 1 == n { 2 } else { 4 };
                }
                for i in 0..n - 1 {
                    link(&mut g, i, i + 1, -2);
                }
            }
            Family::C => {
                for i in 0..n {
                    g[i][i] = if i + 1 == n { 4 } else { 2 };
                }
                for i in 0..n - 2 {
                    link(&mut g, i, i + 1, -1);
                }
                link(&mut g, n - 2, n - 1, -2);
            }
            Family::D => {
                for i in 0..n {
                    g[i][i] = 4;
                }
                for i in 0..n - 2 {
                    link(&mut g, i, i + 1, -2);
                }
                link(&mut g, n - 3, n - 1, -2);
            }
            Family::E6 | Family::E7 => {
                for i in 0..n {
                    g[i][i] = 4;
                }
                let mut edges = vec![(0, 2), (2, 3), (3, 4), (4, 5), (1, 3)];
                if self.family == Family::E7 {
                    edges.push((5, 6));
                }
                for (i, j) in edges {
                    link(&mut g, i, j, -2);
                }
            }
        }
        g
    }
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::E6 => write!(f, "E6"),
            Family::E7 => write!(f, "E7"),
            fam => write!(f, "{fam:?}{}", self.rank),
        }
    }
}

/// A root as its coefficient vector in the simple-root basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Root(Vec<i64>);

impl Root {
    pub fn new(coeffs: Vec<i64>) -> Self {
        Self(coeffs)
    }

    pub fn simple(rank: usize, i: usize) -> Self {
        let mut c = vec![0; rank];
        c[i] = 1;
        Self(c)
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.0
    }

    pub fn height(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn is_positive(&self) -> bool {
        self.0.iter().all(|&c| c >= 0) && self.0.iter().any(|&c| c > 0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// `self - other` has only non-negative coefficients.
    pub fn dominates(&self, other: &Root) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }

    pub fn plus(&self, other: &Root) -> Root {
        Root(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn minus(&self, other: &Root) -> Root {
        Root(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn negated(&self) -> Root {
        Root(self.0.iter().map(|a| -a).collect())
    }

    pub fn to_rational(&self) -> RationalVector {
        RationalVector::from_ints(&self.0)
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, &c) in self.0.iter().enumerate() {
            match c {
                0 => {}
                1 => terms.push(format!("a{}", i + 1)),
                -1 => terms.push(format!("-a{}", i + 1)),
                _ => terms.push(format!("{c}a{}", i + 1)),
            }
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join("+").replace("+-", "-"))
        }
    }
}

/// The full root system of a simple complex Lie algebra.
#[derive(Debug, Clone)]
pub struct RootSystem {
    cartan_type: CartanType,
    gram2: Vec<Vec<i64>>,
    /// `cartan[i][j] = alpha_j(h_{alpha_i})`.
    cartan: Vec<Vec<i64>>,
    roots: Vec<Root>,
    positive: Vec<Root>,
    index: HashSet<Vec<i64>>,
    highest: Root,
    fundamental: Vec<RationalVector>,
}

impl RootSystem {
    /// Generates all roots by breadth-first closure of the simple roots under
    /// the simple reflections.
    pub fn build(cartan_type: CartanType) -> Result<Self> {
        let n = cartan_type.rank();
        let gram2 = cartan_type.doubled_gram();
        let cartan: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| 2 * gram2[i][j] / gram2[i][i]).collect())
            .collect();

        let mut index: HashSet<Vec<i64>> = HashSet::new();
        let mut queue: VecDeque<Vec<i64>> = VecDeque::new();
        for i in 0..n {
            let s = Root::simple(n, i).0;
            index.insert(s.clone());
            queue.push_back(s);
        }
        while let Some(beta) = queue.pop_front() {
            for i in 0..n {
                let pairing: i64 = (0..n).map(|j| beta[j] * cartan[i][j]).sum();
                if pairing == 0 {
                    continue;
                }
                let mut image = beta.clone();
                image[i] -= pairing;
                if index.insert(image.clone()) {
                    queue.push_back(image);
                }
            }
        }

        let mut positive: Vec<Root> =
            index.iter().filter(|c| c.iter().all(|&x| x >= 0)).cloned().map(Root).collect();
        positive.sort_by(|a, b| a.height().cmp(&b.height()).then_with(|| a.cmp(b)));
        if positive.len() * 2 != index.len() {
            return Err(Error::Structural("root set is not closed under negation".into()));
        }
        let mut roots = positive.clone();
        roots.extend(positive.iter().map(Root::negated));

        let highest = positive.last().cloned().expect("nonempty root system");
        if !positive.iter().all(|r| highest.dominates(r)) {
            return Err(Error::Structural("highest root does not dominate".into()));
        }

        let mut rs = Self {
            cartan_type,
            gram2,
            cartan,
            roots,
            positive,
            index,
            highest,
            fundamental: Vec::new(),
        };
        let gram = rs.gram();
        rs.fundamental = (0..n)
            .map(|i| {
                // (w_i | alpha_j) = delta_ij (alpha_j | alpha_j) / 2
                let rhs = RationalVector::unit(n, i).scale(&rat(rs.gram2[i][i], 4));
                solve_linear(&gram, &rhs)
            })
            .collect::<Result<_>>()?;
        Ok(rs)
    }

    pub fn cartan_type(&self) -> CartanType {
        self.cartan_type
    }

    pub fn rank(&self) -> usize {
        self.cartan_type.rank()
    }

    pub fn simple_roots(&self) -> Vec<Root> {
        (0..self.rank()).map(|i| Root::simple(self.rank(), i)).collect()
    }

    /// All roots: positive ones by increasing height, followed by their
    /// negatives.
    pub fn all_roots(&self) -> &[Root] {
        &self.roots
    }

    pub fn positive_roots(&self) -> &[Root] {
        &self.positive
    }

    pub fn highest_root(&self) -> &Root {
        &self.highest
    }

    /// `cartan_matrix()[i][j] = alpha_j(h_{alpha_i})`.
    pub fn cartan_matrix(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    /// Gram matrix `(alpha_i | alpha_j)`.
    pub fn gram(&self) -> RationalMatrix {
        let n = self.rank();
        let mut g = RationalMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                g.set(i, j, rat(self.gram2[i][j], 2));
            }
        }
        g
    }

    /// Squared length of the i-th simple root.
    pub fn simple_length_sq(&self, i: usize) -> Rational {
        rat(self.gram2[i][i], 2)
    }

    /// Twice the inner product of two integer coefficient vectors.
    pub fn inner2_int(&self, a: &[i64], b: &[i64]) -> i64 {
        let n = self.rank();
        let mut s = 0;
        for i in 0..n {
            if a[i] == 0 {
                continue;
            }
            for j in 0..n {
                s += a[i] * b[j] * self.gram2[i][j];
            }
        }
        s
    }

    pub fn root_inner(&self, a: &Root, b: &Root) -> Rational {
        rat(self.inner2_int(&a.0, &b.0), 2)
    }

    pub fn length_sq(&self, a: &Root) -> Rational {
        self.root_inner(a, a)
    }

    /// Inner product of two vectors given in simple-root coordinates.
    pub fn inner(&self, u: &RationalVector, v: &RationalVector) -> Rational {
        let n = self.rank();
        let mut s = Rational::zero();
        for i in 0..n {
            if u[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if self.gram2[i][j] != 0 && !v[j].is_zero() {
                    s += &u[i] * &v[j] * int(self.gram2[i][j]);
                }
            }
        }
        s / int(2)
    }

    /// `phi(h_alpha) = 2 (phi | alpha) / (alpha | alpha)` for `phi` given in
    /// simple-root coordinates.
    pub fn cartan_integer(&self, phi: &RationalVector, alpha: &Root) -> Result<Rational> {
        if alpha.is_zero() {
            return Err(Error::ZeroRoot);
        }
        let a = alpha.to_rational();
        Ok(int(2) * self.inner(phi, &a) / self.length_sq(alpha))
    }

    /// `beta(h_alpha)` for two roots, always an integer.
    pub fn root_pairing(&self, beta: &Root, alpha: &Root) -> i64 {
        2 * self.inner2_int(&beta.0, &alpha.0) / self.inner2_int(&alpha.0, &alpha.0)
    }

    pub fn is_root(&self, v: &[i64]) -> bool {
        v.len() == self.rank() && self.index.contains(v)
    }

    /// Weyl reflection `s_alpha(v) = v - v(h_alpha) alpha`.
    pub fn reflect(&self, alpha: &Root, v: &RationalVector) -> Result<RationalVector> {
        let c = self.cartan_integer(v, alpha)?;
        Ok(v.add_scaled(&-c, &alpha.to_rational()))
    }

    pub fn reflect_root(&self, alpha: &Root, beta: &Root) -> Root {
        let n = self.root_pairing(beta, alpha);
        Root(beta.0.iter().zip(&alpha.0).map(|(b, a)| b - n * a).collect())
    }

    /// The fundamental weight dual to the i-th simple coroot, in simple-root
    /// coordinates.
    pub fn fundamental_weight(&self, i: usize) -> &RationalVector {
        &self.fundamental[i]
    }

    /// Coordinates in the simple-root basis of the weight whose coordinates in
    /// the fundamental-weight basis are `coords`.
    pub fn weight_to_root_coords(&self, coords: &[Rational]) -> RationalVector {
        let n = self.rank();
        let mut v = RationalVector::zeros(n);
        for (i, c) in coords.iter().enumerate() {
            if !c.is_zero() {
                v = v.add_scaled(c, &self.fundamental[i]);
            }
        }
        v
    }

    /// Fundamental-weight coordinates `(phi(h_{alpha_i}))_i` of a vector given
    /// in simple-root coordinates.
    pub fn root_to_weight_coords(&self, phi: &RationalVector) -> Vec<Rational> {
        let n = self.rank();
        (0..n)
            .map(|i| (0..n).map(|j| &phi[j] * int(self.cartan[i][j])).sum())
            .collect()
    }
}

//! Exact rational scalars, vectors and small dense matrices.
//!
//! Everything here is arbitrary precision. Numerators in E7 weight
//! conversions overflow 64 bits, so no fixed-width shortcut is taken.

use std::fmt;
use std::ops::{Add, Index, Neg, Sub};

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number, always stored in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

/// Builds `num/den` in lowest terms. Panics when `den == 0`; use
/// [`rational_arith`] for fallible division.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// `Some(n)` when `q` is an integer fitting in an `i64`.
pub fn to_i64(q: &Rational) -> Option<i64> {
    if q.is_integer() {
        q.to_integer().to_i64()
    } else {
        None
    }
}

/// Renders `q` as `n` or `n/d`.
pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses a plain decimal literal (`-2`, `0.25`, `+3.`, `-.5`) into an exact
/// rational. Exponent notation is rejected.
pub fn parse_decimal(s: &str) -> Result<Rational> {
    let bad = || Error::InvalidDecimal(s.to_string());
    let t = s.trim();
    let (negative, body) = match t.as_bytes().first() {
        Some(b'-') => (true, &t[1..]),
        Some(b'+') => (false, &t[1..]),
        _ => (false, t),
    };
    let (whole, frac) = match body.split_once('.') {
        Some((w, f)) => (w, f),
        None => (body, ""),
    };
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole.bytes().all(|b| b.is_ascii_digit()) || !frac.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{whole}{frac}");
    let numer: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().map_err(|_| bad())?
    };
    let denom = num::pow(BigInt::from(10), frac.len());
    let q = Rational::new(numer, denom);
    Ok(if negative { -q } else { q })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn rational_arith(a: &Rational, b: &Rational, op: ArithOp) -> Result<Rational> {
    Ok(match op {
        ArithOp::Add => a + b,
        ArithOp::Sub => a - b,
        ArithOp::Mul => a * b,
        ArithOp::Div => {
            if b.is_zero() {
                return Err(Error::DivisionByZero);
            }
            a / b
        }
    })
}

/// Fixed-dimension vector of rationals.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalVector(Vec<Rational>);

impl RationalVector {
    pub fn new(entries: Vec<Rational>) -> Self {
        Self(entries)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![Rational::zero(); dim])
    }

    pub fn from_ints(entries: &[i64]) -> Self {
        Self(entries.iter().map(|&n| int(n)).collect())
    }

    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[i] = Rational::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<Rational> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self(self.0.iter().map(|x| x * c).collect())
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: &Rational, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        Self(self.0.iter().zip(&other.0).map(|(x, y)| x + c * y).collect())
    }

    /// Standard (Euclidean) dot product of the coordinate vectors.
    pub fn dot(&self, other: &Self) -> Rational {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        self.0.iter().zip(&other.0).map(|(x, y)| x * y).sum()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(to_f64).collect()
    }
}

impl Index<usize> for RationalVector {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

impl Add for &RationalVector {
    type Output = RationalVector;
    fn add(self, rhs: &RationalVector) -> RationalVector {
        self.add_scaled(&Rational::one(), rhs)
    }
}

impl Sub for &RationalVector {
    type Output = RationalVector;
    fn sub(self, rhs: &RationalVector) -> RationalVector {
        self.add_scaled(&-Rational::one(), rhs)
    }
}

impl Neg for &RationalVector {
    type Output = RationalVector;
    fn neg(self) -> RationalVector {
        RationalVector(self.0.iter().map(|x| -x).collect())
    }
}

impl fmt::Display for RationalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(format_rational).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Dense row-major rational matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch { expected: c, got: row.len() });
            }
            data.extend(row);
        }
        Ok(Self { rows: r, cols: c, data })
    }

    pub fn from_int_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Rational) {
        self.data[i * self.cols + j] = value;
    }

    pub fn mul_vec(&self, v: &RationalVector) -> Result<RationalVector> {
        if v.dim() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, got: v.dim() });
        }
        Ok(RationalVector::new(
            (0..self.rows)
                .map(|i| (0..self.cols).map(|j| self.get(i, j) * &v[j]).sum())
                .collect(),
        ))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }
}

/// Solves `m x = v` exactly by Gaussian elimination, pivoting on the first
/// nonzero entry of each column.
pub fn solve_linear(m: &RationalMatrix, v: &RationalVector) -> Result<RationalVector> {
    let n = m.rows();
    if m.cols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: m.cols() });
    }
    if v.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: v.dim() });
    }
    let mut a: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            let mut row: Vec<Rational> = (0..n).map(|j| m.get(i, j).clone()).collect();
            row.push(v[i].clone());
            row
        })
        .collect();

    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero()).ok_or(Error::SingularMatrix)?;
        a.swap(col, pivot);
        let inv = a[col][col].recip();
        for entry in a[col].iter_mut().skip(col) {
            *entry *= &inv;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for c in col..=n {
                let delta = &factor * &a[col][c];
                a[r][c] -= delta;
            }
        }
    }
    Ok(RationalVector::new(a.into_iter().map(|mut row| row.pop().unwrap()).collect()))
}

/// Sign of a rational as -1, 0 or 1.
pub fn signum(q: &Rational) -> i32 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn arithmetic_examples() {
        assert_eq!(rational_arith(&rat(1, 2), &rat(1, 3), ArithOp::Add).unwrap(), rat(5, 6));
        assert_eq!(rat(2, 4), rat(1, 2));
        assert_eq!(rat(2, 4).numer(), &BigInt::from(1));
        let z = rational_arith(&rat(7, 3), &rat(7, 3), ArithOp::Sub).unwrap();
        assert!(z.is_zero());
        assert_eq!(z.denom(), &BigInt::from(1));
        assert_eq!(rat(3, -6), rat(-1, 2));
        assert!(rat(3, -6).denom().is_positive());
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(
            rational_arith(&rat(1, 2), &int(0), ArithOp::Div),
            Err(Error::DivisionByZero)
        );
    }

    #[test]
    fn solve_identity_and_cartan_a2() {
        let v = RationalVector::new(vec![rat(3, 7), rat(-2, 5)]);
        assert_eq!(solve_linear(&RationalMatrix::identity(2), &v).unwrap(), v);

        let a2 = RationalMatrix::from_int_rows(&[vec![2, -1], vec![-1, 2]]).unwrap();
        let x = solve_linear(&a2, &RationalVector::from_ints(&[1, 0])).unwrap();
        assert_eq!(x, RationalVector::new(vec![rat(2, 3), rat(1, 3)]));
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let m = RationalMatrix::from_int_rows(&[vec![1, 2], vec![2, 4]]).unwrap();
        assert_eq!(
            solve_linear(&m, &RationalVector::from_ints(&[1, 1])),
            Err(Error::SingularMatrix)
        );
    }

    #[test]
    fn pivoting_handles_zero_leading_entry() {
        let m = RationalMatrix::from_int_rows(&[vec![0, 1], vec![1, 0]]).unwrap();
        let x = solve_linear(&m, &RationalVector::from_ints(&[5, 7])).unwrap();
        assert_eq!(x, RationalVector::from_ints(&[7, 5]));
    }

    #[test]
    fn decimal_parsing_is_exact() {
        assert_eq!(parse_decimal("-2").unwrap(), int(-2));
        assert_eq!(parse_decimal("-2.0").unwrap(), int(-2));
        assert_eq!(parse_decimal("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_decimal("-.5").unwrap(), rat(-1, 2));
        assert_eq!(parse_decimal("+3.").unwrap(), int(3));
        assert_eq!(parse_decimal("0.1").unwrap(), rat(1, 10));
        for bad in ["1e-3", "", "-", ".", "1.2.3", "abc", "2,5", "inf"] {
            assert!(parse_decimal(bad).is_err(), "{bad} should be rejected");
        }
    }

    fn small_rat() -> impl Strategy<Value = Rational> {
        (-50i64..50, 1i64..20).prop_map(|(n, d)| rat(n, d))
    }

    fn invertible_matrix(n: usize) -> impl Strategy<Value = RationalMatrix> {
        proptest::collection::vec(small_rat(), n * n)
            .prop_map(move |v| {
                RationalMatrix::from_rows(v.chunks(n).map(<[Rational]>::to_vec).collect()).unwrap()
            })
            .prop_filter("invertible", |m| {
                // Invertible iff every unit vector is solvable.
                solve_linear(m, &RationalVector::unit(m.rows(), 0)).is_ok()
            })
    }

    proptest! {
        #[test]
        fn solve_recovers_x(m in invertible_matrix(4), x in proptest::collection::vec(small_rat(), 4)) {
            let x = RationalVector::new(x);
            let b = m.mul_vec(&x).unwrap();
            prop_assert_eq!(solve_linear(&m, &b).unwrap(), x);
        }

        #[test]
        fn field_axioms(a in small_rat(), b in small_rat(), c in small_rat()) {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!((&a + &b) + &c, &a + (&b + &c));
            prop_assert_eq!((&a * &b) * &c, &a * (&b * &c));
            prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
        }
    }
}

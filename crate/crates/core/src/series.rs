//! Truncated formal power series in two base coordinates (u1, u2) over Q(i),
//! together with series-valued linear algebra.
//!
//! Truncation is by *total* degree. Every series carries the order to which
//! its coefficients are valid; binary operations propagate the minimum of
//! the two orders, and differentiation drops the order by one. Constants
//! carry the sentinel order [`ORDER_INF`] so they never lower the certified
//! order of whatever they meet.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exact::GaussianRational;

/// Order sentinel for exact (polynomial/constant) data of unbounded validity.
pub const ORDER_INF: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    U1,
    U2,
}

/// Truncated power series in (u1, u2). Absent monomials are zero; stored
/// monomials never exceed the total degree `order`.
#[derive(Debug, Clone)]
pub struct BiSeries {
    order: usize,
    coeffs: BTreeMap<(usize, usize), GaussianRational>,
}

impl BiSeries {
    pub fn zero(order: usize) -> Self {
        BiSeries { order, coeffs: BTreeMap::new() }
    }

    pub fn constant(c: GaussianRational) -> Self {
        let mut s = BiSeries::zero(ORDER_INF);
        if !c.is_zero() {
            s.coeffs.insert((0, 0), c);
        }
        s
    }

    pub fn one() -> Self {
        Self::constant(GaussianRational::one())
    }

    pub fn monomial(i: usize, j: usize, c: GaussianRational, order: usize) -> Self {
        let mut s = BiSeries::zero(order);
        if !c.is_zero() && i + j <= order {
            s.coeffs.insert((i, j), c);
        }
        s
    }

    pub fn var(v: Var, order: usize) -> Self {
        match v {
            Var::U1 => Self::monomial(1, 0, GaussianRational::one(), order),
            Var::U2 => Self::monomial(0, 1, GaussianRational::one(), order),
        }
    }

    pub fn from_terms(order: usize, terms: &[(usize, usize, GaussianRational)]) -> Self {
        let mut s = BiSeries::zero(order);
        for (i, j, c) in terms {
            if *i + *j <= order && !c.is_zero() {
                s.coeffs.insert((*i, *j), c.clone());
            }
        }
        s
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, i: usize, j: usize) -> GaussianRational {
        self.coeffs.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn constant_term(&self) -> GaussianRational {
        self.coeff(0, 0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(usize, usize), &GaussianRational)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// True iff every coefficient of total degree <= k vanishes.
    pub fn is_zero_to(&self, k: usize) -> bool {
        self.coeffs.keys().all(|&(i, j)| i + j > k)
    }

    pub fn truncate(&self, order: usize) -> Self {
        if order >= self.order {
            return self.clone();
        }
        let coeffs = self
            .coeffs
            .iter()
            .filter(|(&(i, j), _)| i + j <= order)
            .map(|(k, v)| (*k, v.clone()))
            .collect();
        BiSeries { order, coeffs }
    }

    /// Overwrite a single coefficient (kept within the truncation order).
    pub fn set_coeff(&mut self, i: usize, j: usize, c: GaussianRational) {
        if self.order == ORDER_INF || i + j <= self.order {
            self.insert((i, j), c);
        }
    }

    fn insert(&mut self, key: (usize, usize), c: GaussianRational) {
        if c.is_zero() {
            self.coeffs.remove(&key);
        } else {
            self.coeffs.insert(key, c);
        }
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self> {
        if self.order != rhs.order {
            return Err(Error::OrderMismatch(self.order, rhs.order));
        }
        Ok(self + rhs)
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self> {
        if self.order != rhs.order {
            return Err(Error::OrderMismatch(self.order, rhs.order));
        }
        Ok(self - rhs)
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        if self.order != rhs.order {
            return Err(Error::OrderMismatch(self.order, rhs.order));
        }
        Ok(self * rhs)
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        let mut out = BiSeries::zero(self.order);
        if c.is_zero() {
            return out;
        }
        for (k, v) in &self.coeffs {
            out.coeffs.insert(*k, v * c);
        }
        out
    }

    pub fn is_unit(&self) -> bool {
        !self.constant_term().is_zero()
    }

    /// Multiplicative inverse up to the truncation order (Newton iteration,
    /// exact over Q(i)). Requires a unit constant term.
    pub fn invert(&self) -> Result<Self> {
        let c0 = self.constant_term();
        if c0.is_zero() {
            return Err(Error::NotAUnit);
        }
        let mut g = BiSeries::constant(c0.inv()?).truncate(self.order);
        if self.order == ORDER_INF {
            // order-INF series are constants by construction
            return Ok(g);
        }
        let two = BiSeries::constant(GaussianRational::from_int(2));
        let mut precision = 0usize;
        while precision < self.order {
            g = &g * &(&two - &(self * &g));
            precision = 2 * precision + 1;
        }
        Ok(g)
    }

    pub fn diff(&self, v: Var) -> Self {
        let order = if self.order == ORDER_INF { ORDER_INF } else { self.order.saturating_sub(1) };
        let mut out = BiSeries::zero(order);
        for (&(i, j), c) in &self.coeffs {
            match v {
                Var::U1 if i > 0 => {
                    out.insert((i - 1, j), c * &GaussianRational::from_int(i as i64));
                }
                Var::U2 if j > 0 => {
                    out.insert((i, j - 1), c * &GaussianRational::from_int(j as i64));
                }
                _ => {}
            }
        }
        out
    }

    /// Term-wise antiderivative with zero constant of integration. The
    /// result is reported at the same order as the input.
    pub fn integrate(&self, v: Var) -> Self {
        let mut out = BiSeries::zero(self.order);
        for (&(i, j), c) in &self.coeffs {
            let (key, denom) = match v {
                Var::U1 => ((i + 1, j), i + 1),
                Var::U2 => ((i, j + 1), j + 1),
            };
            if self.order == ORDER_INF || key.0 + key.1 <= self.order {
                let d = GaussianRational::from_int(denom as i64).inv().unwrap();
                out.insert(key, c * &d);
            }
        }
        out
    }

    /// Restriction to the initial hypersurface u2 = 0.
    pub fn restrict_u2(&self) -> UniSeries {
        let mut out = UniSeries::zero(self.order);
        for (&(i, j), c) in &self.coeffs {
            if j == 0 {
                out.coeffs.insert(i, c.clone());
            }
        }
        out
    }

    /// Linear change of base coordinates: evaluates the series at
    /// (c00*u1 + c01*u2, c10*u1 + c11*u2). Exact on total-degree jets.
    pub fn substitute_linear(&self, c: &[[GaussianRational; 2]; 2]) -> Self {
        let l1 = BiSeries::from_terms(
            self.order,
            &[(1, 0, c[0][0].clone()), (0, 1, c[0][1].clone())],
        );
        let l2 = BiSeries::from_terms(
            self.order,
            &[(1, 0, c[1][0].clone()), (0, 1, c[1][1].clone())],
        );
        let max_i = self.coeffs.keys().map(|k| k.0).max().unwrap_or(0);
        let max_j = self.coeffs.keys().map(|k| k.1).max().unwrap_or(0);
        let mut pow1 = vec![BiSeries::one().truncate(self.order)];
        for _ in 0..max_i {
            pow1.push(pow1.last().unwrap() * &l1);
        }
        let mut pow2 = vec![BiSeries::one().truncate(self.order)];
        for _ in 0..max_j {
            pow2.push(pow2.last().unwrap() * &l2);
        }
        let mut out = BiSeries::zero(self.order);
        for (&(i, j), coeff) in &self.coeffs {
            out = &out + &(&pow1[i] * &pow2[j]).scale(coeff);
        }
        out
    }
}

/// Equal iff all coefficients up to the minimum of the two orders agree.
impl PartialEq for BiSeries {
    fn eq(&self, other: &Self) -> bool {
        let order = self.order.min(other.order);
        let keys: std::collections::BTreeSet<_> =
            self.coeffs.keys().chain(other.coeffs.keys()).filter(|&&(i, j)| i + j <= order).collect();
        keys.into_iter().all(|&(i, j)| self.coeff(i, j) == other.coeff(i, j))
    }
}

impl Add for &BiSeries {
    type Output = BiSeries;
    fn add(self, rhs: &BiSeries) -> BiSeries {
        let order = self.order.min(rhs.order);
        let mut out = self.truncate(order);
        for (&(i, j), c) in &rhs.coeffs {
            if i + j <= order {
                out.insert((i, j), &out.coeff(i, j) + c);
            }
        }
        out
    }
}

impl Sub for &BiSeries {
    type Output = BiSeries;
    fn sub(self, rhs: &BiSeries) -> BiSeries {
        self + &(-rhs)
    }
}

impl Neg for &BiSeries {
    type Output = BiSeries;
    fn neg(self) -> BiSeries {
        let mut out = BiSeries::zero(self.order);
        for (k, v) in &self.coeffs {
            out.coeffs.insert(*k, -v);
        }
        out
    }
}

impl Mul for &BiSeries {
    type Output = BiSeries;
    fn mul(self, rhs: &BiSeries) -> BiSeries {
        let order = self.order.min(rhs.order);
        let mut out = BiSeries::zero(order);
        for (&(i1, j1), c1) in &self.coeffs {
            for (&(i2, j2), c2) in &rhs.coeffs {
                let key = (i1 + i2, j1 + j2);
                if order == ORDER_INF || key.0 + key.1 <= order {
                    out.insert(key, &out.coeff(key.0, key.1) + &(c1 * c2));
                }
            }
        }
        out
    }
}

impl fmt::Display for BiSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(&(i, j), c)| {
                let mut s = format!("({c})");
                if i > 0 {
                    s += &format!("*u1^{i}");
                }
                if j > 0 {
                    s += &format!("*u2^{j}");
                }
                s
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Serialize for BiSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            order: Option<usize>,
            coeffs: Vec<(usize, usize, &'a GaussianRational)>,
        }
        let order = if self.order == ORDER_INF { None } else { Some(self.order) };
        let coeffs = self.coeffs.iter().map(|(&(i, j), c)| (i, j, c)).collect();
        Repr { order, coeffs }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BiSeries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            order: Option<usize>,
            coeffs: Vec<(usize, usize, GaussianRational)>,
        }
        let repr = Repr::deserialize(deserializer)?;
        let order = repr.order.unwrap_or(ORDER_INF);
        for (i, j, _) in &repr.coeffs {
            if order != ORDER_INF && i + j > order {
                return Err(D::Error::custom(format!(
                    "monomial ({i},{j}) exceeds truncation order {order}"
                )));
            }
        }
        Ok(BiSeries::from_terms(order, &repr.coeffs))
    }
}

/// Truncated series in one variable; curve-germ components and CK initial data.
#[derive(Debug, Clone)]
pub struct UniSeries {
    order: usize,
    coeffs: BTreeMap<usize, GaussianRational>,
}

impl UniSeries {
    pub fn zero(order: usize) -> Self {
        UniSeries { order, coeffs: BTreeMap::new() }
    }

    pub fn constant(c: GaussianRational) -> Self {
        let mut s = UniSeries::zero(ORDER_INF);
        if !c.is_zero() {
            s.coeffs.insert(0, c);
        }
        s
    }

    pub fn from_terms(order: usize, terms: &[(usize, GaussianRational)]) -> Self {
        let mut s = UniSeries::zero(order);
        for (i, c) in terms {
            if *i <= order && !c.is_zero() {
                s.coeffs.insert(*i, c.clone());
            }
        }
        s
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, i: usize) -> GaussianRational {
        self.coeffs.get(&i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&usize, &GaussianRational)> {
        self.coeffs.iter()
    }

    pub fn diff(&self) -> Self {
        let order = if self.order == ORDER_INF { ORDER_INF } else { self.order.saturating_sub(1) };
        let mut out = UniSeries::zero(order);
        for (&i, c) in &self.coeffs {
            if i > 0 {
                out.coeffs.insert(i - 1, c * &GaussianRational::from_int(i as i64));
            }
        }
        out
    }

    /// Embed into the bivariate ring as a series in the given variable.
    pub fn to_biseries(&self, v: Var) -> BiSeries {
        let mut out = BiSeries::zero(self.order);
        for (&i, c) in &self.coeffs {
            let key = match v {
                Var::U1 => (i, 0),
                Var::U2 => (0, i),
            };
            out.coeffs.insert(key, c.clone());
        }
        out
    }
}

impl PartialEq for UniSeries {
    fn eq(&self, other: &Self) -> bool {
        let order = self.order.min(other.order);
        let keys: std::collections::BTreeSet<_> =
            self.coeffs.keys().chain(other.coeffs.keys()).filter(|&&i| i <= order).collect();
        keys.into_iter().all(|&i| self.coeff(i) == other.coeff(i))
    }
}

impl Serialize for UniSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            order: Option<usize>,
            coeffs: Vec<(usize, &'a GaussianRational)>,
        }
        let order = if self.order == ORDER_INF { None } else { Some(self.order) };
        let coeffs = self.coeffs.iter().map(|(&i, c)| (i, c)).collect();
        Repr { order, coeffs }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for UniSeries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            order: Option<usize>,
            coeffs: Vec<(usize, GaussianRational)>,
        }
        let repr = Repr::deserialize(deserializer)?;
        let order = repr.order.unwrap_or(ORDER_INF);
        Ok(UniSeries::from_terms(order, &repr.coeffs))
    }
}

/// Matrix with BiSeries entries, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BiSeries>,
}

impl Serialize for SeriesMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            rows: usize,
            cols: usize,
            entries: &'a [BiSeries],
        }
        Repr { rows: self.rows, cols: self.cols, entries: &self.data }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SeriesMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            rows: usize,
            cols: usize,
            entries: Vec<BiSeries>,
        }
        let r = Repr::deserialize(deserializer)?;
        if r.entries.len() != r.rows * r.cols {
            return Err(D::Error::custom("matrix entry count does not match dimensions"));
        }
        Ok(SeriesMatrix { rows: r.rows, cols: r.cols, data: r.entries })
    }
}

impl SeriesMatrix {
    pub fn zero(rows: usize, cols: usize, order: usize) -> Self {
        SeriesMatrix { rows, cols, data: vec![BiSeries::zero(order); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = SeriesMatrix::zero(n, n, ORDER_INF);
        for i in 0..n {
            *m.get_mut(i, i) = BiSeries::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BiSeries>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        SeriesMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BiSeries {
        &self.data[r * self.cols + c]
    }

    pub fn get_mut(&mut self, r: usize, c: usize) -> &mut BiSeries {
        &mut self.data[r * self.cols + c]
    }

    /// Minimum order of validity over all entries.
    pub fn order(&self) -> usize {
        self.data.iter().map(|s| s.order()).min().unwrap_or(ORDER_INF)
    }

    pub fn truncate(&self, order: usize) -> Self {
        self.map(|s| s.truncate(order))
    }

    pub fn map(&self, f: impl Fn(&BiSeries) -> BiSeries) -> Self {
        SeriesMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        SeriesMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        SeriesMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "inner dimensions must agree");
        let mut out = SeriesMatrix::zero(self.rows, rhs.cols, ORDER_INF);
        for r in 0..self.rows {
            for c in 0..rhs.cols {
                let mut acc = BiSeries::zero(ORDER_INF);
                for k in 0..self.cols {
                    acc = &acc + &(self.get(r, k) * rhs.get(k, c));
                }
                *out.get_mut(r, c) = acc;
            }
        }
        out
    }

    pub fn scale_series(&self, s: &BiSeries) -> Self {
        self.map(|e| e * s)
    }

    pub fn diff(&self, v: Var) -> Self {
        self.map(|e| e.diff(v))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|s| s.is_zero())
    }

    pub fn is_zero_to(&self, k: usize) -> bool {
        self.data.iter().all(|s| s.is_zero_to(k))
    }

    /// Constant-term matrix, as plain scalars.
    pub fn at_origin(&self) -> Vec<Vec<GaussianRational>> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.get(r, c).constant_term()).collect())
            .collect()
    }

    /// Determinant of a 2x2 matrix.
    pub fn det2(&self) -> BiSeries {
        assert_eq!((self.rows, self.cols), (2, 2));
        &(self.get(0, 0) * self.get(1, 1)) - &(self.get(0, 1) * self.get(1, 0))
    }

    /// Solve A X = B for an m x k matrix A of origin rank k. Gaussian
    /// elimination over the series ring with unit pivots; surviving rows
    /// must reduce to exactly zero, otherwise the system is inconsistent.
    pub fn linear_solve(a: &SeriesMatrix, b: &SeriesMatrix) -> Result<SeriesMatrix> {
        if a.rows != b.rows {
            return Err(Error::DimensionMismatch(format!(
                "lhs has {} rows, rhs has {}",
                a.rows, b.rows
            )));
        }
        let (m, k, r) = (a.rows, a.cols, b.cols);
        let mut a = a.clone();
        let mut b = b.clone();
        let mut pivot_row_of_col = vec![usize::MAX; k];
        let mut used = vec![false; m];
        for col in 0..k {
            let pivot = (0..m).find(|&row| !used[row] && a.get(row, col).is_unit());
            let pivot = match pivot {
                Some(p) => p,
                None => return Err(Error::RankDeficientAtOrigin),
            };
            used[pivot] = true;
            pivot_row_of_col[col] = pivot;
            let inv = a.get(pivot, col).invert()?;
            for c in 0..k {
                *a.get_mut(pivot, c) = a.get(pivot, c) * &inv;
            }
            for c in 0..r {
                *b.get_mut(pivot, c) = b.get(pivot, c) * &inv;
            }
            for row in 0..m {
                if row == pivot {
                    continue;
                }
                let factor = a.get(row, col).clone();
                if factor.is_zero() {
                    continue;
                }
                for c in 0..k {
                    *a.get_mut(row, c) = a.get(row, c) - &(a.get(pivot, c) * &factor);
                }
                for c in 0..r {
                    *b.get_mut(row, c) = b.get(row, c) - &(b.get(pivot, c) * &factor);
                }
            }
        }
        for row in 0..m {
            if used[row] {
                continue;
            }
            let lhs_zero = (0..k).all(|c| a.get(row, c).is_zero());
            let rhs_zero = (0..r).all(|c| b.get(row, c).is_zero());
            if !lhs_zero || !rhs_zero {
                return Err(Error::InconsistentSystem);
            }
        }
        let mut x = SeriesMatrix::zero(k, r, ORDER_INF);
        for col in 0..k {
            for c in 0..r {
                *x.get_mut(col, c) = b.get(pivot_row_of_col[col], c).clone();
            }
        }
        Ok(x)
    }

    /// Inverse of a square matrix whose determinant is a unit at the origin.
    pub fn inverse(&self) -> Result<SeriesMatrix> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch("inverse of a non-square matrix".into()));
        }
        Self::linear_solve(self, &SeriesMatrix::identity(self.rows)).map_err(|e| match e {
            Error::RankDeficientAtOrigin => Error::SingularAtOrigin,
            other => other,
        })
    }

    /// Linear substitution applied entry-wise.
    pub fn substitute_linear(&self, c: &[[GaussianRational; 2]; 2]) -> Self {
        self.map(|s| s.substitute_linear(c))
    }
}

//! Closed real intervals and interval matrices.
//!
//! Arithmetic here is plain IEEE arithmetic on the endpoints; no outward
//! rounding is performed. Callers that need a safety margin against rounding
//! can inflate results with [`IntervalMatrix::inflate`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

/// Largest dimension for which [`IntervalMatrix::two_norm_sup`] enumerates sign vectors.
pub const TWO_NORM_ENUMERATION_LIMIT: usize = 8;

/// Default truncation order of the interval Taylor series in [`IntervalMatrix::exp`].
pub const DEFAULT_EXP_ORDER: usize = 20;

/// A closed interval `[lo, hi]` with `lo <= hi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::InvalidInterval { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    pub const fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    /// `[c - r, c + r]`; `r` must be nonnegative.
    pub fn centered(c: f64, r: f64) -> Result<Self> {
        Interval::new(c - r, c + r)
    }

    // Endpoints computed by min/max are ordered by construction.
    fn ordered(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi || lo.is_nan() || hi.is_nan());
        Interval { lo, hi }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn rad(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Largest absolute value attained in the interval.
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_with_tol(&self, x: f64, tol: f64) -> bool {
        self.lo - tol <= x && x <= self.hi + tol
    }

    pub fn encloses(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval::ordered(self.lo.min(other.lo), self.hi.max(other.hi))
    }

    pub fn inflate(&self, eps: f64) -> Interval {
        Interval::ordered(self.lo - eps, self.hi + eps)
    }

    pub fn scale(&self, k: f64) -> Interval {
        let (a, b) = (self.lo * k, self.hi * k);
        Interval::ordered(a.min(b), a.max(b))
    }

    /// Uniform sample from the interval.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.is_point() {
            self.lo
        } else {
            rng.random_range(self.lo..=self.hi)
        }
    }
}

impl TryFrom<[f64; 2]> for Interval {
    type Error = Error;

    fn try_from(v: [f64; 2]) -> Result<Self> {
        Interval::new(v[0], v[1])
    }
}

impl From<Interval> for [f64; 2] {
    fn from(iv: Interval) -> Self {
        [iv.lo, iv.hi]
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl Add for Interval {
    type Output = Interval;

    fn add(self, rhs: Interval) -> Interval {
        Interval::ordered(self.lo + rhs.lo, self.hi + rhs.hi)
    }
}

impl Sub for Interval {
    type Output = Interval;

    fn sub(self, rhs: Interval) -> Interval {
        Interval::ordered(self.lo - rhs.hi, self.hi - rhs.lo)
    }
}

impl Neg for Interval {
    type Output = Interval;

    fn neg(self) -> Interval {
        Interval::ordered(-self.hi, -self.lo)
    }
}

impl Mul for Interval {
    type Output = Interval;

    fn mul(self, rhs: Interval) -> Interval {
        let p = [
            self.lo * rhs.lo,
            self.lo * rhs.hi,
            self.hi * rhs.lo,
            self.hi * rhs.hi,
        ];
        let lo = p.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Interval::ordered(lo, hi)
    }
}

impl Mul<f64> for Interval {
    type Output = Interval;

    fn mul(self, k: f64) -> Interval {
        self.scale(k)
    }
}

/// A dense, row-major matrix of closed intervals.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Interval>,
}

/// Serialized as a list of rows of `[lo, hi]` pairs.
impl Serialize for IntervalMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.rows))?;
        for row in self.data.chunks(self.cols.max(1)).take(self.rows) {
            seq.serialize_element(row)?;
        }
        seq.end()
    }
}

impl IntervalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntervalMatrix {
            rows,
            cols,
            data: vec![Interval::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        IntervalMatrix::point(&Matrix::identity(n, n))
    }

    /// Degenerate interval matrix holding exactly `m`.
    pub fn point(m: &Matrix) -> Self {
        let (rows, cols) = m.shape();
        let data = (0..rows * cols)
            .map(|k| Interval::point(m[(k / cols, k % cols)]))
            .collect();
        IntervalMatrix { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Interval) -> Self {
        let data = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        IntervalMatrix { rows, cols, data }
    }

    /// Builds `[lower, upper]` entrywise.
    pub fn from_bounds(lower: &Matrix, upper: &Matrix) -> Result<Self> {
        if lower.shape() != upper.shape() {
            return Err(Error::mismatch(
                "IntervalMatrix::from_bounds",
                format!("{:?}", lower.shape()),
                format!("{:?}", upper.shape()),
            ));
        }
        let (rows, cols) = lower.shape();
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(Interval::new(lower[(i, j)], upper[(i, j)])?);
            }
        }
        Ok(IntervalMatrix { rows, cols, data })
    }

    /// Builds `[center - radius, center + radius]` entrywise.
    pub fn from_center_radius(center: &Matrix, radius: &Matrix) -> Result<Self> {
        if radius.iter().any(|r| *r < 0.0) {
            return Err(Error::InvalidArgument("negative radius".into()));
        }
        IntervalMatrix::from_bounds(&(center - radius), &(center + radius))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Interval {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Interval) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[Interval] {
        &self.data
    }

    fn map_to_matrix(&self, f: impl Fn(&Interval) -> f64) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| f(&self.get(i, j)))
    }

    pub fn lower(&self) -> Matrix {
        self.map_to_matrix(Interval::lo)
    }

    pub fn upper(&self) -> Matrix {
        self.map_to_matrix(Interval::hi)
    }

    /// Midpoint matrix `C = (A_min + A_max) / 2`.
    pub fn center(&self) -> Matrix {
        self.map_to_matrix(Interval::mid)
    }

    /// Radius matrix `Δ = (A_max - A_min) / 2`, entrywise nonnegative.
    pub fn radius(&self) -> Matrix {
        self.map_to_matrix(Interval::rad)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|iv| iv.lo == 0.0 && iv.hi == 0.0)
    }

    pub fn is_point(&self) -> bool {
        self.data.iter().all(Interval::is_point)
    }

    pub fn contains_matrix(&self, m: &Matrix, tol: f64) -> bool {
        m.shape() == self.shape()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| self.get(i, j).contains_with_tol(m[(i, j)], tol))
            })
    }

    /// Entrywise containment `other ⊆ self`.
    pub fn encloses(&self, other: &IntervalMatrix) -> bool {
        self.shape() == other.shape()
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| a.encloses(b))
    }

    pub fn inflate(&self, eps: f64) -> IntervalMatrix {
        self.map(|iv| iv.inflate(eps))
    }

    pub fn scale(&self, k: f64) -> IntervalMatrix {
        self.map(|iv| iv.scale(k))
    }

    pub fn map(&self, f: impl Fn(Interval) -> Interval) -> IntervalMatrix {
        IntervalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&iv| f(iv)).collect(),
        }
    }

    fn check_same_shape(&self, op: &'static str, other: (usize, usize)) -> Result<()> {
        if self.shape() != other {
            return Err(Error::mismatch(
                op,
                format!("{:?}", self.shape()),
                format!("{other:?}"),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &IntervalMatrix) -> Result<IntervalMatrix> {
        self.check_same_shape("IntervalMatrix::add", other.shape())?;
        Ok(IntervalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| *a + *b).collect(),
        })
    }

    pub fn add_point(&self, m: &Matrix) -> Result<IntervalMatrix> {
        self.check_same_shape("IntervalMatrix::add_point", m.shape())?;
        Ok(IntervalMatrix::from_fn(self.rows, self.cols, |i, j| {
            self.get(i, j) + Interval::point(m[(i, j)])
        }))
    }

    /// Entrywise `self - m` for a point matrix `m`.
    pub fn sub_point(&self, m: &Matrix) -> Result<IntervalMatrix> {
        self.check_same_shape("IntervalMatrix::sub_point", m.shape())?;
        Ok(IntervalMatrix::from_fn(self.rows, self.cols, |i, j| {
            self.get(i, j) - Interval::point(m[(i, j)])
        }))
    }

    /// Interval matrix product; entry `[i, j]` is the interval sum of `self[i, k] * rhs[k, j]`.
    pub fn mul(&self, rhs: &IntervalMatrix) -> Result<IntervalMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::mismatch(
                "IntervalMatrix::mul",
                format!("{} rows on the right", self.cols),
                rhs.rows,
            ));
        }
        let mut out = IntervalMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = Interval::ZERO;
                for k in 0..self.cols {
                    acc = acc + self.get(i, k) * rhs.get(k, j);
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    /// Interval enclosure of `{E x : E ∈ self, x ∈ xs}` for a box `xs`.
    pub fn mul_intervals(&self, xs: &[Interval]) -> Result<Vec<Interval>> {
        if xs.len() != self.cols {
            return Err(Error::mismatch("IntervalMatrix::mul_intervals", self.cols, xs.len()));
        }
        Ok((0..self.rows)
            .map(|i| {
                xs.iter()
                    .enumerate()
                    .fold(Interval::ZERO, |acc, (k, x)| acc + self.get(i, k) * *x)
            })
            .collect())
    }

    /// `|| |C| + Δ ||_F`, the supremum of `||E||_F` over the members `E`.
    pub fn frobenius_sup(&self) -> f64 {
        self.data
            .iter()
            .map(|iv| {
                let m = iv.mid().abs() + iv.rad();
                m * m
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Supremum of the spectral norm over all members, by enumerating the
    /// sign vertices `C + (y zᵀ) ∘ Δ`, `y, z ∈ {±1}^n`.
    pub fn two_norm_sup(&self) -> Result<f64> {
        self.max_sv_candidate().map(|(_, s)| s)
    }

    /// The member of `self` with the largest spectral norm, and that norm.
    pub fn max_sv_candidate(&self) -> Result<(Matrix, f64)> {
        self.max_sv_candidate_with_limit(TWO_NORM_ENUMERATION_LIMIT)
    }

    pub fn max_sv_candidate_with_limit(&self, limit: usize) -> Result<(Matrix, f64)> {
        let n = self.rows.max(self.cols);
        if n > limit {
            return Err(Error::DimensionTooLarge { n, max: limit });
        }
        let center = self.center();
        if self.rows == 0 || self.cols == 0 {
            return Ok((center, 0.0));
        }
        let radius = self.radius();
        let (r, c) = self.shape();
        let mut best = (center.clone(), f64::NEG_INFINITY);
        let mut vertex = center.clone();
        // (y, z) and (-y, -z) give the same vertex, so y[0] = +1 throughout.
        for ymask in 0u32..(1 << (r - 1)) {
            for zmask in 0u32..(1 << c) {
                for i in 0..r {
                    let yi = if i > 0 && (ymask >> (i - 1)) & 1 == 1 { -1.0 } else { 1.0 };
                    for j in 0..c {
                        let zj = if (zmask >> j) & 1 == 1 { -1.0 } else { 1.0 };
                        vertex[(i, j)] = center[(i, j)] + yi * zj * radius[(i, j)];
                    }
                }
                let s = linalg::spectral_norm(&vertex);
                if s > best.1 {
                    best = (vertex.clone(), s);
                }
            }
        }
        Ok(best)
    }

    /// Draws a member uniformly entrywise.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).sample(rng))
    }

    /// Rigorous enclosure of `{ e^{E t} : E ∈ self }`.
    ///
    /// The Taylor series is truncated after `order` terms and every entry is
    /// widened by the tail bound `θ^{K}/(K! (1 - θ/(K+1)))`, `K = order + 1`,
    /// with `θ = ||self||_F t`.
    pub fn exp(&self, t: f64, order: usize) -> Result<IntervalMatrix> {
        if !self.is_square() {
            return Err(Error::mismatch("IntervalMatrix::exp", "square matrix", format!("{:?}", self.shape())));
        }
        if !t.is_finite() || t < 0.0 {
            return Err(Error::InvalidArgument(format!("exponential time must be >= 0, got {t}")));
        }
        let n = self.rows;
        let theta = self.frobenius_sup() * t;
        let limit = (order + 2) as f64;
        if theta.is_nan() || theta >= limit {
            return Err(Error::RemainderDiverges { theta, limit });
        }

        let step = self.scale(t);
        let mut term = IntervalMatrix::identity(n);
        let mut sum = term.clone();
        for k in 1..=order {
            term = term.mul(&step)?.scale(1.0 / k as f64);
            sum = sum.add(&term)?;
        }

        let remainder = exp_tail_bound(theta, order);
        Ok(if remainder > 0.0 { sum.inflate(remainder) } else { sum })
    }
}

/// Bound on `Σ_{k > order} θ^k / k!` for `θ < order + 2`.
pub fn exp_tail_bound(theta: f64, order: usize) -> f64 {
    let k = order + 1;
    let leading = (1..=k).fold(1.0, |acc, i| acc * theta / i as f64);
    leading / (1.0 - theta / (k + 1) as f64)
}

impl fmt::Display for IntervalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn scalar_arithmetic() {
        assert_eq!(iv(1.0, 2.0) + iv(3.0, 4.0), iv(4.0, 6.0));
        assert_eq!(iv(-1.0, 1.0) * iv(-1.0, 1.0), iv(-1.0, 1.0));
        assert_eq!(iv(0.0, 0.0) * iv(5.0, 9.0), iv(0.0, 0.0));
        assert_eq!(iv(1.0, 2.0) - iv(3.0, 5.0), iv(-4.0, -1.0));
        assert_eq!(-iv(1.0, 2.0), iv(-2.0, -1.0));
    }

    #[test]
    fn rejects_reversed_or_nan() {
        assert!(Interval::new(2.0, 1.0).is_err());
        assert!(Interval::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn identity_times_l_is_l() {
        let l = IntervalMatrix::from_fn(2, 2, |i, j| iv(i as f64 - 1.0, j as f64 + 0.5));
        assert_eq!(IntervalMatrix::identity(2).mul(&l).unwrap(), l);
    }

    #[test]
    fn scalar_matrix_product() {
        let a = IntervalMatrix::from_fn(1, 1, |_, _| iv(-1.0, 1.0));
        let b = IntervalMatrix::point(&Matrix::from_element(1, 1, 2.0));
        assert_eq!(a.mul(&b).unwrap().get(0, 0), iv(-2.0, 2.0));
    }

    #[test]
    fn square_of_upper_row() {
        let l = IntervalMatrix::from_fn(2, 2, |i, _| if i == 0 { iv(0.0, 1.0) } else { Interval::ZERO });
        let sq = l.mul(&l).unwrap();
        // row 0: [0,1]*[0,1] + [0,1]*[0,0] = [0,1]
        assert_eq!(sq, l);
    }

    #[test]
    fn mul_dimension_mismatch() {
        let a = IntervalMatrix::zeros(2, 3);
        let b = IntervalMatrix::zeros(2, 3);
        assert!(matches!(a.mul(&b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn frobenius_examples() {
        assert_eq!(IntervalMatrix::zeros(3, 3).frobenius_sup(), 0.0);
        let c = Matrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        assert_relative_eq!(IntervalMatrix::point(&c).frobenius_sup(), c.norm(), epsilon = 1e-14);
        let l = IntervalMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => Interval::point(1.0),
            (0, 1) => iv(-1.1, -0.9),
            (1, 0) => Interval::ZERO,
            _ => Interval::point(2.0),
        });
        assert_relative_eq!(l.frobenius_sup(), 6.21f64.sqrt(), epsilon = 1e-12);
        assert_relative_eq!(l.frobenius_sup(), 2.49199, epsilon = 1e-5);
    }

    #[test]
    fn two_norm_examples() {
        let c = Matrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 3.0]);
        assert_relative_eq!(
            IntervalMatrix::point(&c).two_norm_sup().unwrap(),
            linalg::spectral_norm(&c),
            epsilon = 1e-12
        );
        let one = IntervalMatrix::from_fn(1, 1, |_, _| iv(-2.0, 3.0));
        assert_relative_eq!(one.two_norm_sup().unwrap(), 3.0, epsilon = 1e-14);
        let diag = IntervalMatrix::from_fn(2, 2, |i, j| if i == j { iv(-1.0, 1.0) } else { Interval::ZERO });
        assert_relative_eq!(diag.two_norm_sup().unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn two_norm_rejects_large_dimension() {
        let l = IntervalMatrix::zeros(9, 9);
        assert_eq!(l.two_norm_sup(), Err(Error::DimensionTooLarge { n: 9, max: 8 }));
        assert_eq!(l.frobenius_sup(), 0.0);
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let e = IntervalMatrix::zeros(3, 3).exp(7.0, DEFAULT_EXP_ORDER).unwrap();
        assert_eq!(e, IntervalMatrix::identity(3));
    }

    #[test]
    fn exp_of_nilpotent_is_exact_up_to_remainder() {
        let n = Matrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let order = 4;
        let e = IntervalMatrix::point(&n).exp(0.1, order).unwrap();
        let r = exp_tail_bound(0.1, order);
        let expected = Matrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        for i in 0..2 {
            for j in 0..2 {
                let v = e.get(i, j);
                assert_relative_eq!(v.mid(), expected[(i, j)], epsilon = 1e-15);
                assert_relative_eq!(v.rad(), r, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn exp_of_scalar_one_contains_e() {
        let e = IntervalMatrix::point(&Matrix::identity(1, 1)).exp(1.0, DEFAULT_EXP_ORDER).unwrap();
        let v = e.get(0, 0);
        assert!(v.contains_with_tol(std::f64::consts::E, 1e-15));
        assert!(v.width() < 1e-15);
    }

    #[test]
    fn exp_remainder_divergence() {
        let l = IntervalMatrix::point(&Matrix::identity(1, 1));
        assert!(matches!(l.exp(5.0, 2), Err(Error::RemainderDiverges { .. })));
        assert!(l.exp(3.9, 2).is_ok());
    }

    #[test]
    fn tail_bound_dominates_series_tail() {
        let theta: f64 = 1.5;
        let order = 6;
        let tail: f64 = (order + 1..60)
            .map(|k| theta.powi(k as i32) / (1..=k).map(|i| i as f64).product::<f64>())
            .sum();
        assert!(exp_tail_bound(theta, order) >= tail);
    }

    #[test]
    fn interval_serde_as_pair() {
        let v: Interval = serde_json::from_str("[-1.5, 2.0]").unwrap();
        assert_eq!(v, iv(-1.5, 2.0));
        assert!(serde_json::from_str::<Interval>("[3.0, 2.0]").is_err());
    }
}

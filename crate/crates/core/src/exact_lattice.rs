//! Exact integer linear algebra on `Z^m`.
//!
//! Everything here works over arbitrary-precision integers. Rational arithmetic is
//! only used where a quotient is genuinely needed (solving for coefficients), and the
//! result is always checked back against the integer data.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("the zero vector has no projective class")]
    ZeroVector,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("vectors are linearly dependent over the rationals")]
    NotIndependent,
    #[error("span is not primitive (elementary divisors {divisors:?})")]
    NotPrimitive { divisors: Vec<BigInt> },
    #[error("matrix is not invertible over the integers")]
    NotUnimodular,
}

/// A vector in `Z^m`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntVector(pub Vec<BigInt>);

// Entries serialize as JSON integers when they fit in i64 and as decimal strings
// otherwise, so ordinary files stay readable.
impl Serialize for IntVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use num_traits::ToPrimitive;
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for a in &self.0 {
            match a.to_i64() {
                Some(x) => seq.serialize_element(&x)?,
                None => seq.serialize_element(&a.to_string())?,
            }
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for IntVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Entry {
            Small(i64),
            Big(String),
        }
        let raw = Vec::<Entry>::deserialize(d)?;
        raw.into_iter()
            .map(|e| match e {
                Entry::Small(x) => Ok(BigInt::from(x)),
                Entry::Big(s) => s.parse::<BigInt>().map_err(serde::de::Error::custom),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(IntVector)
    }
}

impl IntVector {
    pub fn zeros(m: usize) -> Self {
        IntVector(vec![BigInt::zero(); m])
    }

    pub fn unit(m: usize, i: usize) -> Self {
        let mut v = Self::zeros(m);
        v.0[i] = BigInt::one();
        v
    }

    pub fn from_i64s(xs: &[i64]) -> Self {
        IntVector(xs.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.0
    }

    pub fn dot(&self, other: &IntVector) -> BigInt {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn add(&self, other: &IntVector) -> IntVector {
        IntVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &IntVector) -> IntVector {
        IntVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: &BigInt) -> IntVector {
        IntVector(self.0.iter().map(|a| a * k).collect())
    }

    pub fn neg(&self) -> IntVector {
        IntVector(self.0.iter().map(|a| -a).collect())
    }

    /// Gcd of the entries; zero for the zero vector.
    pub fn content(&self) -> BigInt {
        self.0.iter().fold(BigInt::zero(), |g, a| g.gcd(a))
    }

    /// Returns `k` with `self = k * other` when such an integer exists.
    pub fn integer_multiple_of(&self, other: &IntVector) -> Option<BigInt> {
        let pivot = other.0.iter().position(|a| !a.is_zero())?;
        let (k, r) = self.0[pivot].div_rem(&other.0[pivot]);
        if !r.is_zero() {
            return None;
        }
        (other.scale(&k) == *self).then_some(k)
    }

    pub fn to_i64s(&self) -> Option<Vec<i64>> {
        use num_traits::ToPrimitive;
        self.0.iter().map(|a| a.to_i64()).collect()
    }
}

impl fmt::Debug for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<i64>> for IntVector {
    fn from(xs: Vec<i64>) -> Self {
        IntVector::from_i64s(&xs)
    }
}

/// An element of `Z^m / ±1`, stored by its representative whose first nonzero entry is
/// positive.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProjectiveWeight(IntVector);

impl ProjectiveWeight {
    pub fn rep(&self) -> &IntVector {
        &self.0
    }

    pub fn into_rep(self) -> IntVector {
        self.0
    }
}

impl fmt::Debug for ProjectiveWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "±{:?}", self.0)
    }
}

pub fn canonicalize(v: &IntVector) -> Result<ProjectiveWeight, LatticeError> {
    match v.0.iter().find(|a| !a.is_zero()) {
        None => Err(LatticeError::ZeroVector),
        Some(a) if a.is_negative() => Ok(ProjectiveWeight(v.neg())),
        Some(_) => Ok(ProjectiveWeight(v.clone())),
    }
}

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        IntMatrix { rows: r, cols: c, data: rows.iter().flatten().map(|&x| BigInt::from(x)).collect() }
    }

    /// Matrix whose rows are the given vectors; `cols` is used when `vs` is empty.
    pub fn from_rows(vs: &[IntVector], cols: usize) -> Self {
        let mut m = Self::zeros(vs.len(), cols);
        for (i, v) in vs.iter().enumerate() {
            assert_eq!(v.len(), cols, "row length");
            for (j, a) in v.0.iter().enumerate() {
                m.data[i * cols + j] = a.clone();
            }
        }
        m
    }

    pub fn from_columns(vs: &[IntVector], rows: usize) -> Self {
        Self::from_rows(vs, rows).transpose()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> IntVector {
        IntVector(self.data[i * self.cols..(i + 1) * self.cols].to_vec())
    }

    pub fn col(&self, j: usize) -> IntVector {
        IntVector((0..self.rows).map(|i| self.get(i, j).clone()).collect())
    }

    pub fn row_vectors(&self) -> Vec<IntVector> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn col_vectors(&self) -> Vec<IntVector> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shape");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &IntVector) -> IntVector {
        assert_eq!(self.cols, v.len(), "matrix-vector shape");
        IntVector((0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j) * &v.0[j]).sum()).collect())
    }

    pub fn neg(&self) -> IntMatrix {
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| -a).collect() }
    }

    pub fn add(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &IntMatrix) -> IntMatrix {
        self.add(&other.neg())
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.rows)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Block `rows[r0..r1] × cols[c0..c1]`.
    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> IntMatrix {
        let mut s = Self::zeros(r1 - r0, c1 - c0);
        for i in r0..r1 {
            for j in c0..c1 {
                s.set(i - r0, j - c0, self.get(i, j).clone());
            }
        }
        s
    }

    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        self.row_vectors().iter().map(IntVector::to_i64s).collect()
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !a.get(i, k).is_zero()) else {
                return BigInt::zero();
            };
            if p != k {
                a.swap_rows(p, k);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j)) / &prev;
                    a.set(i, j, v);
                }
                a.set(i, k, BigInt::zero());
            }
            prev = a.get(k, k).clone();
        }
        sign * a.get(n - 1, n - 1)
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + i, r * self.cols + j);
        }
    }

    /// row_i += k * row_j
    fn add_row_multiple(&mut self, i: usize, j: usize, k: &BigInt) {
        for c in 0..self.cols {
            let v = self.get(j, c) * k;
            self.data[i * self.cols + c] += v;
        }
    }

    /// col_i += k * col_j
    fn add_col_multiple(&mut self, i: usize, j: usize, k: &BigInt) {
        for r in 0..self.rows {
            let v = self.get(r, j) * k;
            self.data[r * self.cols + i] += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for c in 0..self.cols {
            let v = -self.get(i, c);
            self.set(i, c, v);
        }
    }

    /// Inverse when it exists over the integers.
    pub fn inverse_unimodular(&self) -> Option<IntMatrix> {
        let inv = rational_inverse(self)?;
        let mut out = Self::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let q = &inv[i][j];
                if !q.is_integer() {
                    return None;
                }
                out.set(i, j, q.to_integer());
            }
        }
        Some(out)
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// Square integer matrix with determinant ±1.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LatticeAuto {
    matrix: IntMatrix,
}

impl LatticeAuto {
    pub fn new(matrix: IntMatrix) -> Result<Self, LatticeError> {
        if !matrix.is_square() {
            return Err(LatticeError::DimensionMismatch { expected: matrix.rows(), found: matrix.cols() });
        }
        if matrix.determinant().abs() != BigInt::one() {
            return Err(LatticeError::NotUnimodular);
        }
        Ok(LatticeAuto { matrix })
    }

    pub fn identity(m: usize) -> Self {
        LatticeAuto { matrix: IntMatrix::identity(m) }
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> IntMatrix {
        self.matrix
    }

    pub fn rank(&self) -> usize {
        self.matrix.rows()
    }

    pub fn apply(&self, v: &IntVector) -> IntVector {
        self.matrix.apply(v)
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &LatticeAuto) -> LatticeAuto {
        LatticeAuto { matrix: self.matrix.mul(&other.matrix) }
    }

    pub fn inverse(&self) -> LatticeAuto {
        LatticeAuto { matrix: self.matrix.inverse_unimodular().expect("unimodular by construction") }
    }

    pub fn transpose(&self) -> LatticeAuto {
        LatticeAuto { matrix: self.matrix.transpose() }
    }

    pub fn is_identity(&self) -> bool {
        self.matrix.is_identity()
    }
}

fn to_rational_rows(m: &IntMatrix) -> Vec<Vec<BigRational>> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| BigRational::from_integer(m.get(i, j).clone())).collect()).collect()
}

fn rational_inverse(m: &IntMatrix) -> Option<Vec<Vec<BigRational>>> {
    if !m.is_square() {
        return None;
    }
    let n = m.rows();
    let mut a = to_rational_rows(m);
    let mut inv: Vec<Vec<BigRational>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect()).collect();
    for k in 0..n {
        let p = (k..n).find(|&i| !a[i][k].is_zero())?;
        a.swap(p, k);
        inv.swap(p, k);
        let piv = a[k][k].clone();
        for j in 0..n {
            a[k][j] = &a[k][j] / &piv;
            inv[k][j] = &inv[k][j] / &piv;
        }
        for i in 0..n {
            if i == k || a[i][k].is_zero() {
                continue;
            }
            let f = a[i][k].clone();
            for j in 0..n {
                let t = &f * &a[k][j];
                a[i][j] -= t;
                let t = &f * &inv[k][j];
                inv[i][j] -= t;
            }
        }
    }
    Some(inv)
}

fn check_dims(vs: &[IntVector]) -> Result<usize, LatticeError> {
    let Some(first) = vs.first() else {
        return Ok(0);
    };
    let m = first.len();
    for v in vs {
        if v.len() != m {
            return Err(LatticeError::DimensionMismatch { expected: m, found: v.len() });
        }
    }
    Ok(m)
}

/// Rank of the rational span, by fraction-free elimination.
pub fn rank_over_rationals(vs: &[IntVector]) -> Result<usize, LatticeError> {
    let m = check_dims(vs)?;
    Ok(matrix_rank(&IntMatrix::from_rows(vs, m)))
}

pub fn matrix_rank(m: &IntMatrix) -> usize {
    let mut a = m.clone();
    let (rows, cols) = (a.rows(), a.cols());
    let mut rank = 0;
    let mut prev = BigInt::one();
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&i| !a.get(i, c).is_zero()) else {
            continue;
        };
        a.swap_rows(p, rank);
        for i in rank + 1..rows {
            for j in c + 1..cols {
                let v = (a.get(i, j) * a.get(rank, c) - a.get(i, c) * a.get(rank, j)) / &prev;
                a.set(i, j, v);
            }
            a.set(i, c, BigInt::zero());
        }
        prev = a.get(rank, c).clone();
        rank += 1;
    }
    rank
}

/// `U·M·V = D`, with `D` diagonal and `d_1 | d_2 | …`, all `d_i ≥ 0`.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub rank: usize,
}

impl SmithForm {
    /// The nonzero diagonal entries.
    pub fn divisors(&self) -> Vec<BigInt> {
        (0..self.rank).map(|i| self.d.get(i, i).clone()).collect()
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry of the trailing block becomes the pivot
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                let x = a.get(i, j);
                if !x.is_zero() && best.map_or(true, |(bi, bj)| x.abs() < a.get(bi, bj).abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap_rows(t, pi);
        u.swap_rows(t, pi);
        a.swap_cols(t, pj);
        v.swap_cols(t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if a.get(i, t).is_zero() {
                    continue;
                }
                let q = a.get(i, t).div_floor(a.get(t, t));
                let nq = -q;
                a.add_row_multiple(i, t, &nq);
                u.add_row_multiple(i, t, &nq);
                if !a.get(i, t).is_zero() {
                    a.swap_rows(t, i);
                    u.swap_rows(t, i);
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if a.get(t, j).is_zero() {
                    continue;
                }
                let q = a.get(t, j).div_floor(a.get(t, t));
                let nq = -q;
                a.add_col_multiple(j, t, &nq);
                v.add_col_multiple(j, t, &nq);
                if !a.get(t, j).is_zero() {
                    a.swap_cols(t, j);
                    v.swap_cols(t, j);
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // pivot must divide the whole trailing block
            let p = a.get(t, t).clone();
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a.get(i, j).is_multiple_of(&p)));
            match bad {
                Some(i) => {
                    let one = BigInt::one();
                    a.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }
        if a.get(t, t).is_negative() {
            a.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }
    SmithForm { u, d: a, v, rank: t }
}

/// Basis of the integer kernel `{x ∈ Z^cols : M x = 0}`, in row Hermite form.
///
/// The rational kernel is read off the reduced echelon form and then saturated; a Smith
/// form of `M` itself would drag a `cols × cols` transform through every pivot.
pub fn kernel_basis(m: &IntMatrix) -> Vec<IntVector> {
    let n = m.cols();
    let rational = rational_kernel(m);
    hermite_rows(&saturation_basis(&rational, n), n)
}

/// Primitive integer vectors spanning the rational kernel, one per free column.
fn rational_kernel(m: &IntMatrix) -> Vec<IntVector> {
    let n = m.cols();
    let mut a = to_rational_rows(m);
    let mut pivots: Vec<usize> = Vec::new();
    for c in 0..n {
        let r = pivots.len();
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let piv = a[r][c].clone();
        for x in a[r].iter_mut() {
            *x = &*x / &piv;
        }
        for i in 0..a.len() {
            if i == r || a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].clone();
            for j in c..n {
                let t = &f * &a[r][j];
                a[i][j] -= t;
            }
        }
        pivots.push(c);
    }
    let mut out = Vec::new();
    for free in (0..n).filter(|c| !pivots.contains(c)) {
        let mut x = vec![BigRational::zero(); n];
        x[free] = BigRational::one();
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = -a[r][free].clone();
        }
        let den = x.iter().fold(BigInt::one(), |l, q| l.lcm(q.denom()));
        let ints: Vec<BigInt> = x.iter().map(|q| (q * BigRational::from_integer(den.clone())).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |g, y| g.gcd(y));
        out.push(IntVector(ints.into_iter().map(|y| y / &g).collect()));
    }
    out
}

/// Basis of `span_Q(vs) ∩ Z^m` for independent `vs`.
///
/// Unimodular column operations bring the rows of `vs` to `[L 0]`; the first rows of the
/// inverse transform then span the same rational space and extend to a basis of `Z^m`.
pub fn saturation_basis(vs: &[IntVector], m: usize) -> Vec<IntVector> {
    let k = vs.len();
    let mut a = IntMatrix::from_rows(vs, m);
    let mut vinv = IntMatrix::identity(m);
    for r in 0..k {
        loop {
            let nz: Vec<usize> = (r..m).filter(|&j| !a.get(r, j).is_zero()).collect();
            let Some(&p) = nz.iter().min_by(|&&i, &&j| a.get(r, i).abs().cmp(&a.get(r, j).abs())) else {
                panic!("saturation_basis needs independent vectors");
            };
            a.swap_cols(r, p);
            vinv.swap_rows(r, p);
            if nz.len() == 1 {
                break;
            }
            for j in r + 1..m {
                if a.get(r, j).is_zero() {
                    continue;
                }
                // col j += q col r  ⇔  row r of V^{-1} -= q row j
                let q = -a.get(r, j).div_floor(a.get(r, r));
                a.add_col_multiple(j, r, &q);
                vinv.add_row_multiple(r, j, &-q);
            }
        }
    }
    (0..k).map(|i| vinv.row(i)).collect()
}

/// Some integer solution of `M x = b`, if one exists.
pub fn solve_integer(m: &IntMatrix, b: &IntVector) -> Option<IntVector> {
    assert_eq!(m.rows(), b.len(), "right-hand side length");
    let s = smith_normal_form(m);
    let ub = s.u.apply(b);
    let mut y = IntVector::zeros(m.cols());
    for i in 0..m.rows() {
        if i < s.rank {
            let (q, r) = ub.0[i].div_rem(s.d.get(i, i));
            if !r.is_zero() {
                return None;
            }
            y.0[i] = q;
        } else if !ub.0[i].is_zero() {
            return None;
        }
    }
    Some(s.v.apply(&y))
}

/// Some rational solution of `M x = b`, if one exists.
pub fn solve_rational(m: &IntMatrix, b: &IntVector) -> Option<Vec<BigRational>> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = to_rational_rows(m);
    let mut rhs: Vec<BigRational> = b.0.iter().map(|x| BigRational::from_integer(x.clone())).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(p, r);
        rhs.swap(p, r);
        let piv = a[r][c].clone();
        for j in 0..cols {
            a[r][j] = &a[r][j] / &piv;
        }
        rhs[r] = &rhs[r] / &piv;
        for i in 0..rows {
            if i == r || a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].clone();
            for j in 0..cols {
                let t = &f * &a[r][j];
                a[i][j] -= t;
            }
            let t = &f * &rhs[r];
            rhs[i] -= t;
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if rhs[r..].iter().any(|x| !x.is_zero()) {
        return None;
    }
    let mut x = vec![BigRational::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = rhs[i].clone();
    }
    Some(x)
}

/// Nonzero elementary divisors of the matrix with the given rows.
pub fn elementary_divisors(vs: &[IntVector]) -> Result<Vec<BigInt>, LatticeError> {
    let m = check_dims(vs)?;
    Ok(smith_normal_form(&IntMatrix::from_rows(vs, m)).divisors())
}

pub fn is_primitive_sublattice(vs: &[IntVector]) -> Result<bool, LatticeError> {
    let divisors = elementary_divisors(vs)?;
    if divisors.len() < vs.len() {
        return Err(LatticeError::NotIndependent);
    }
    Ok(divisors.iter().all(One::is_one))
}

/// Completes a primitive independent family to a basis of `Z^m`; the input comes first.
///
/// Unit vectors are preferred for the completion (positive determinant first) so that
/// small cases produce the obvious answer; otherwise the complement is read off the
/// Smith form.
pub fn extend_to_basis(vs: &[IntVector], m: usize) -> Result<Vec<IntVector>, LatticeError> {
    if let Some(first) = vs.first() {
        if first.len() != m {
            return Err(LatticeError::DimensionMismatch { expected: m, found: first.len() });
        }
    }
    check_dims(vs)?;
    let k = vs.len();
    let divisors = elementary_divisors(vs)?;
    if divisors.len() < k {
        return Err(LatticeError::NotIndependent);
    }
    if !divisors.iter().all(One::is_one) {
        return Err(LatticeError::NotPrimitive { divisors });
    }
    if m <= 10 {
        let mut fallback = None;
        for subset in combinations(m, m - k) {
            let mut basis = vs.to_vec();
            basis.extend(subset.iter().map(|&i| IntVector::unit(m, i)));
            let det = IntMatrix::from_rows(&basis, m).determinant();
            if det.is_one() {
                return Ok(basis);
            }
            if fallback.is_none() && (-det).is_one() {
                fallback = Some(basis);
            }
        }
        if let Some(b) = fallback {
            return Ok(b);
        }
    }
    let s = smith_normal_form(&IntMatrix::from_rows(vs, m));
    let vinv = s.v.inverse_unimodular().expect("Smith transform is unimodular");
    let mut basis = vs.to_vec();
    basis.extend((k..m).map(|i| vinv.row(i)));
    Ok(basis)
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}

/// A sublattice of `Z^m`, stored by its row Hermite normal form.
///
/// Convention: each row's last nonzero entry is its pivot; pivots are positive and sit
/// in strictly increasing columns; entries below a pivot lie in `[0, pivot)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Sublattice {
    basis: Vec<IntVector>,
    ambient_rank: usize,
}

impl Sublattice {
    pub fn span(vs: &[IntVector], ambient_rank: usize) -> Result<Self, LatticeError> {
        for v in vs {
            if v.len() != ambient_rank {
                return Err(LatticeError::DimensionMismatch { expected: ambient_rank, found: v.len() });
            }
        }
        Ok(Sublattice { basis: hermite_rows(vs, ambient_rank), ambient_rank })
    }

    pub fn basis(&self) -> &[IntVector] {
        &self.basis
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn contains(&self, v: &IntVector) -> bool {
        if self.basis.is_empty() {
            return v.is_zero();
        }
        solve_integer(&IntMatrix::from_columns(&self.basis, self.ambient_rank), v).is_some()
    }
}

/// Row HNF in the lower-triangular convention of [`Sublattice`]; zero rows dropped.
pub fn hermite_rows(vs: &[IntVector], m: usize) -> Vec<IntVector> {
    // Standard upper echelon form on reversed columns, then reverse columns and rows.
    let rev: Vec<IntVector> = vs.iter().map(|v| IntVector(v.0.iter().rev().cloned().collect())).collect();
    let mut a = IntMatrix::from_rows(&rev, m);
    let rows = a.rows();
    let mut r = 0;
    for c in 0..m {
        if r == rows {
            break;
        }
        // gcd-combine column c into row r
        loop {
            let nz: Vec<usize> = (r..rows).filter(|&i| !a.get(i, c).is_zero()).collect();
            if nz.is_empty() {
                break;
            }
            let p = *nz.iter().min_by(|&&i, &&j| a.get(i, c).abs().cmp(&a.get(j, c).abs())).unwrap();
            a.swap_rows(r, p);
            let mut done = true;
            for i in r + 1..rows {
                if a.get(i, c).is_zero() {
                    continue;
                }
                let q = -a.get(i, c).div_floor(a.get(r, c));
                a.add_row_multiple(i, r, &q);
                if !a.get(i, c).is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if a.get(r, c).is_zero() {
            continue;
        }
        if a.get(r, c).is_negative() {
            a.negate_row(r);
        }
        let p = a.get(r, c).clone();
        for i in 0..r {
            let q = -a.get(i, c).div_floor(&p);
            a.add_row_multiple(i, r, &q);
        }
        r += 1;
    }
    let mut out: Vec<IntVector> = (0..r).map(|i| IntVector(a.row(i).0.into_iter().rev().collect())).collect();
    out.reverse();
    out
}

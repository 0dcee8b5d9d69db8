//! Dense matrices over exact fields: Gaussian elimination, fraction-free (Bareiss)
//! elimination over the underlying polynomial/integer ring, and a permutation-expansion
//! determinant used as a test oracle.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::field::{FieldError, Poly, Rat, RatFunc, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("matrix is singular")]
    Singular,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Clone, PartialEq)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: fmt::Debug> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut l = f.debug_list();
        for r in 0..self.rows {
            l.entry(&&self.data[r * self.cols..(r + 1) * self.cols]);
        }
        l.finish()
    }
}

impl<F: Clone> Matrix<F> {
    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
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

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<F>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> &[F] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map<G>(&self, f: impl Fn(&F) -> G) -> Matrix<G> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn try_map<G, E>(&self, f: impl Fn(&F) -> Result<G, E>) -> Result<Matrix<G>, E> {
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect::<Result<_, _>>()?,
        })
    }

    /// Sub-matrix of the given columns, in the given order.
    pub fn select_cols(&self, cols: &[usize]) -> Self {
        Matrix::from_fn(self.rows, cols.len(), |i, j| self.get(i, cols[j]).clone())
    }
}

impl<F: Scalar> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix::from_fn(rows, cols, |_, _| F::zero())
    }

    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { F::one() } else { F::zero() })
    }

    pub fn diagonal(d: Vec<F>) -> Self {
        let n = d.len();
        let mut m = Matrix::zeros(n, n);
        for (i, v) in d.into_iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let v = self.get(i, j);
                    if i == j {
                        v.is_one_value()
                    } else {
                        v.is_zero()
                    }
                })
            })
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn try_mul(&self, other: &Matrix<F>) -> Result<Matrix<F>, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::Shape(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Matrix::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = F::zero();
            for t in 0..self.cols {
                let a = self.get(i, t);
                let b = other.get(t, j);
                if !a.is_zero() && !b.is_zero() {
                    acc = acc + a.clone() * b.clone();
                }
            }
            acc
        }))
    }

    pub fn mul(&self, other: &Matrix<F>) -> Matrix<F> {
        self.try_mul(other).expect("matrix shapes agree")
    }

    pub fn sub(&self, other: &Matrix<F>) -> Matrix<F> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }

    pub fn scale(&self, c: &F) -> Matrix<F> {
        self.map(|v| v.clone() * c.clone())
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(F::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    /// Determinant by Gaussian elimination over the field.
    pub fn det(&self) -> F {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        let mut m = self.to_rows();
        let mut det = F::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !m[i][k].is_zero()) else {
                return F::zero();
            };
            if p != k {
                m.swap(p, k);
                det = -det;
            }
            let piv = m[k][k].clone();
            let inv = piv.try_inv().expect("nonzero pivot");
            det = det * piv;
            for i in k + 1..n {
                if m[i][k].is_zero() {
                    continue;
                }
                let f = m[i][k].clone() * inv.clone();
                for j in k + 1..n {
                    if !m[k][j].is_zero() {
                        m[i][j] = m[i][j].clone() - f.clone() * m[k][j].clone();
                    }
                }
                m[i][k] = F::zero();
            }
        }
        det
    }

    /// Inverse by Gauss–Jordan elimination over the field.
    pub fn inverse(&self) -> Result<Matrix<F>, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::Shape("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.to_rows();
        let mut b = Matrix::<F>::identity(n).to_rows();
        for k in 0..n {
            let p = (k..n).find(|&i| !a[i][k].is_zero()).ok_or(LinalgError::Singular)?;
            a.swap(p, k);
            b.swap(p, k);
            let inv = a[k][k].try_inv()?;
            for j in 0..n {
                a[k][j] = a[k][j].clone() * inv.clone();
                b[k][j] = b[k][j].clone() * inv.clone();
            }
            for i in 0..n {
                if i == k || a[i][k].is_zero() {
                    continue;
                }
                let f = a[i][k].clone();
                for j in 0..n {
                    if !a[k][j].is_zero() {
                        a[i][j] = a[i][j].clone() - f.clone() * a[k][j].clone();
                    }
                    if !b[k][j].is_zero() {
                        b[i][j] = b[i][j].clone() - f.clone() * b[k][j].clone();
                    }
                }
            }
        }
        Ok(Matrix::from_rows(b))
    }

    /// Determinant by permutation expansion (Leibniz). Exponential; test oracle only.
    pub fn det_leibniz(&self) -> F {
        assert!(self.is_square());
        let n = self.rows;
        let mut perm: Vec<usize> = (0..n).collect();
        let mut acc = F::zero();
        leibniz(self, 0, &mut perm, true, &mut acc);
        acc
    }
}

trait IsOne {
    fn is_one_value(&self) -> bool;
}

impl<F: Scalar> IsOne for F {
    fn is_one_value(&self) -> bool {
        (self.clone() - F::one()).is_zero()
    }
}

fn leibniz<F: Scalar>(m: &Matrix<F>, k: usize, perm: &mut Vec<usize>, even: bool, acc: &mut F) {
    let n = perm.len();
    if k == n {
        let mut t = F::one();
        for (i, &p) in perm.iter().enumerate() {
            t = t * m.get(i, p).clone();
        }
        *acc = if even { acc.clone() + t } else { acc.clone() - t };
        return;
    }
    for i in k..n {
        perm.swap(k, i);
        leibniz(m, k + 1, perm, if i == k { even } else { !even }, acc);
        perm.swap(k, i);
    }
}

/// An integral domain with exact division, the home of fraction-free elimination.
pub trait ExactDomain: Clone + PartialEq {
    fn ring_zero() -> Self;
    fn ring_one() -> Self;
    fn ring_is_zero(&self) -> bool;
    fn ring_mul(&self, o: &Self) -> Self;
    fn ring_sub(&self, o: &Self) -> Self;
    fn ring_neg(&self) -> Self;
    /// Exact quotient; the caller guarantees divisibility.
    fn ring_div_exact(&self, o: &Self) -> Self;
}

impl ExactDomain for BigInt {
    fn ring_zero() -> Self {
        BigInt::zero()
    }
    fn ring_one() -> Self {
        BigInt::one()
    }
    fn ring_is_zero(&self) -> bool {
        self.is_zero()
    }
    fn ring_mul(&self, o: &Self) -> Self {
        self * o
    }
    fn ring_sub(&self, o: &Self) -> Self {
        self - o
    }
    fn ring_neg(&self) -> Self {
        -self
    }
    fn ring_div_exact(&self, o: &Self) -> Self {
        let (q, r) = self.div_rem(o);
        debug_assert!(r.is_zero(), "inexact integer division");
        q
    }
}

impl ExactDomain for Poly {
    fn ring_zero() -> Self {
        Poly::zero()
    }
    fn ring_one() -> Self {
        Poly::one()
    }
    fn ring_is_zero(&self) -> bool {
        self.is_zero()
    }
    fn ring_mul(&self, o: &Self) -> Self {
        self * o
    }
    fn ring_sub(&self, o: &Self) -> Self {
        self - o
    }
    fn ring_neg(&self) -> Self {
        -self
    }
    fn ring_div_exact(&self, o: &Self) -> Self {
        self.div_exact(o).expect("inexact polynomial division")
    }
}

/// Bareiss determinant of a square matrix over an exact domain.
pub fn bareiss_det<R: ExactDomain>(mut m: Vec<Vec<R>>) -> R {
    let n = m.len();
    if n == 0 {
        return R::ring_one();
    }
    let mut prev = R::ring_one();
    let mut negate = false;
    for k in 0..n - 1 {
        let Some(p) = (k..n).find(|&i| !m[i][k].ring_is_zero()) else {
            return R::ring_zero();
        };
        if p != k {
            m.swap(p, k);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = m[k][k].ring_mul(&m[i][j]).ring_sub(&m[i][k].ring_mul(&m[k][j]));
                m[i][j] = t.ring_div_exact(&prev);
            }
            m[i][k] = R::ring_zero();
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if negate {
        d.ring_neg()
    } else {
        d
    }
}

/// Fraction-free Gauss–Jordan elimination of `[A | I]`.
/// Returns `(det A, X)` with `X = det(A) · A⁻¹` (the adjugate), or `None` if singular.
pub fn bareiss_adjugate<R: ExactDomain>(a: &[Vec<R>]) -> Option<(R, Vec<Vec<R>>)> {
    let n = a.len();
    let w = 2 * n;
    let mut m: Vec<Vec<R>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { R::ring_one() } else { R::ring_zero() }));
            r
        })
        .collect();
    let mut prev = R::ring_one();
    let mut negate = false;
    for k in 0..n {
        let p = (k..n).find(|&i| !m[i][k].ring_is_zero())?;
        if p != k {
            m.swap(p, k);
            negate = !negate;
        }
        for i in 0..n {
            if i == k {
                continue;
            }
            for j in 0..w {
                if j == k {
                    continue;
                }
                let t = m[k][k].ring_mul(&m[i][j]).ring_sub(&m[i][k].ring_mul(&m[k][j]));
                m[i][j] = t.ring_div_exact(&prev);
            }
            m[i][k] = R::ring_zero();
        }
        prev = m[k][k].clone();
    }
    // m = [d·I | d·(PA)⁻¹·P] with d = det(PA) = ±det A; d·(PA)⁻¹·P = d·A⁻¹.
    let d = prev;
    let x: Vec<Vec<R>> = m.into_iter().map(|r| r[n..].to_vec()).collect();
    if negate {
        Some((d.ring_neg(), x.iter().map(|r| r.iter().map(|v| v.ring_neg()).collect()).collect()))
    } else {
        Some((d, x))
    }
}

/// A field whose matrices can be cleared row-wise to an [`ExactDomain`].
pub trait FractionFree: Scalar {
    type Ring: ExactDomain;
    /// Returns `(row · d, d)` with all entries of `row · d` in the ring.
    fn clear_row(row: &[Self]) -> (Vec<Self::Ring>, Self::Ring);
    /// `num / den` back in the field.
    fn from_ratio(num: &Self::Ring, den: &Self::Ring) -> Result<Self, FieldError>;
}

impl FractionFree for Rat {
    type Ring = BigInt;
    fn clear_row(row: &[Self]) -> (Vec<BigInt>, BigInt) {
        let d = row.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        let out = row.iter().map(|r| r.numer() * (&d / r.denom())).collect();
        (out, d)
    }
    fn from_ratio(num: &BigInt, den: &BigInt) -> Result<Self, FieldError> {
        if den.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(Rat::new(num.clone(), den.clone()))
    }
}

impl FractionFree for RatFunc {
    type Ring = Poly;
    fn clear_row(row: &[Self]) -> (Vec<Poly>, Poly) {
        RatFunc::clear_denominators(row)
    }
    fn from_ratio(num: &Poly, den: &Poly) -> Result<Self, FieldError> {
        RatFunc::from_ratio(num.clone(), den)
    }
}

impl<F: FractionFree> Matrix<F> {
    fn cleared(&self) -> (Vec<Vec<F::Ring>>, Vec<F::Ring>) {
        (0..self.rows).map(|i| F::clear_row(self.row(i))).unzip()
    }

    /// Determinant via fraction-free elimination on the row-cleared matrix.
    pub fn det_fraction_free(&self) -> F {
        assert!(self.is_square());
        let (b, ds) = self.cleared();
        let db = bareiss_det(b);
        let prod = ds.iter().fold(F::Ring::ring_one(), |acc, d| acc.ring_mul(d));
        F::from_ratio(&db, &prod).expect("row multipliers are nonzero")
    }

    /// Inverse via fraction-free Gauss–Jordan elimination on the row-cleared matrix:
    /// with `B = D·A`, `A⁻¹ = adj(B)·D / det(B)`.
    pub fn inverse_fraction_free(&self) -> Result<Matrix<F>, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::Shape("inverse of a non-square matrix".into()));
        }
        let (b, ds) = self.cleared();
        let (det, adj) = bareiss_adjugate(&b).ok_or(LinalgError::Singular)?;
        let n = self.rows;
        let mut out = Vec::with_capacity(n * n);
        for row in &adj {
            for (j, v) in row.iter().enumerate() {
                out.push(F::from_ratio(&v.ring_mul(&ds[j]), &det)?);
            }
        }
        Ok(Matrix {
            rows: n,
            cols: n,
            data: out,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ParamContext;
    use proptest::prelude::*;

    fn r(p: i64, q: i64) -> Rat {
        Rat::new(p.into(), q.into())
    }

    fn rat_matrix(v: &[Vec<(i64, i64)>]) -> Matrix<Rat> {
        Matrix::from_rows(v.iter().map(|row| row.iter().map(|&(p, q)| r(p, q)).collect()).collect())
    }

    #[test]
    fn small_determinants() {
        let m = rat_matrix(&[vec![(1, 1), (2, 1)], vec![(3, 1), (4, 1)]]);
        assert_eq!(m.det(), r(-2, 1));
        assert_eq!(m.det_fraction_free(), r(-2, 1));
        assert_eq!(m.det_leibniz(), r(-2, 1));
        let z = rat_matrix(&[vec![(0, 1), (1, 1)], vec![(0, 1), (5, 1)]]);
        assert_eq!(z.det(), r(0, 1));
        assert_eq!(z.inverse(), Err(LinalgError::Singular));
        assert_eq!(z.inverse_fraction_free(), Err(LinalgError::Singular));
    }

    #[test]
    fn pivoting_is_handled() {
        let m = rat_matrix(&[
            vec![(0, 1), (1, 2), (1, 1)],
            vec![(2, 3), (0, 1), (1, 1)],
            vec![(1, 1), (1, 1), (0, 1)],
        ]);
        let inv = m.inverse_fraction_free().unwrap();
        assert!(m.mul(&inv).is_identity());
        assert_eq!(inv, m.inverse().unwrap());
        assert_eq!(m.det_fraction_free(), m.det_leibniz());
    }

    #[test]
    fn symbolic_inverse_and_det() {
        let ctx = ParamContext::alpha(2, 2);
        let p = |s: &str| ctx.parse(s).unwrap();
        let m = Matrix::from_rows(vec![
            vec![p("1/a1"), p("1/(a1*a2)"), p("0")],
            vec![p("a0 + a1"), p("1/a3"), p("1")],
            vec![p("2"), p("a2"), p("1/(a0 + a4)")],
        ]);
        let d1 = m.det();
        let d2 = m.det_fraction_free();
        let d3 = m.det_leibniz();
        assert_eq!(d1, d2);
        assert_eq!(d1, d3);
        let inv = m.inverse_fraction_free().unwrap();
        assert!(m.mul(&inv).is_identity());
        assert_eq!(inv, m.inverse().unwrap());
    }

    fn arb_matrix(n: usize) -> impl Strategy<Value = Matrix<Rat>> {
        proptest::collection::vec((-9i64..10, 1i64..5), n * n).prop_map(move |v| {
            Matrix::from_fn(n, n, |i, j| {
                let (p, q) = v[i * n + j];
                r(p, q)
            })
        })
    }

    proptest! {
        #[test]
        fn eliminations_agree_with_leibniz(m in (1usize..6).prop_flat_map(arb_matrix)) {
            let d = m.det_leibniz();
            prop_assert_eq!(m.det(), d.clone());
            prop_assert_eq!(m.det_fraction_free(), d.clone());
            if !d.is_zero() {
                let a = m.inverse().unwrap();
                let b = m.inverse_fraction_free().unwrap();
                prop_assert!(m.mul(&b).is_identity());
                prop_assert_eq!(a, b);
            }
        }

        #[test]
        fn det_is_multiplicative(a in arb_matrix(3), b in arb_matrix(3)) {
            prop_assert_eq!(a.mul(&b).det(), a.det() * b.det());
        }
    }
}

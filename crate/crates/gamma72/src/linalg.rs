//! Dense exact matrices over `BigInt` and `BigRational`.
//!
//! Everything here is row-oriented: a lattice basis is a matrix whose *rows*
//! are generators, and `x * A` for a row vector `x` is the usual left action.
//! Determinants use fraction-free (Bareiss) elimination so 72x72 integer
//! Gram matrices stay cheap; kernels and solves go through a Hermite normal
//! form with a tracked unimodular transform.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type ZMat = Mat<BigInt>;
pub type QMat = Mat<BigRational>;

#[derive(Clone, PartialEq, Eq)]
pub struct Mat<T> {
    pub rows: usize,
    pub cols: usize,
    data: Vec<T>,
}

impl<T: Clone + Zero> Mat<T> {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn at(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    pub fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for k in 0..self.cols {
            self.data.swap(i * self.cols + k, j * self.cols + k);
        }
    }

    /// Vertical stacking; both matrices must have equal column count.
    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Mat { rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn submatrix_rows(&self, lo: usize, hi: usize) -> Self {
        Mat {
            rows: hi - lo,
            cols: self.cols,
            data: self.data[lo * self.cols..hi * self.cols].to_vec(),
        }
    }

    pub fn submatrix_cols(&self, lo: usize, hi: usize) -> Self {
        Mat::from_fn(self.rows, hi - lo, |i, j| self.at(i, lo + j).clone())
    }
}

impl<T> Mat<T>
where
    T: Clone + Zero + One + PartialEq + std::ops::Mul<Output = T> + std::ops::Add<Output = T>,
{
    pub fn identity(n: usize) -> Self {
        Mat::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out: Mat<T> = Mat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.at(i, j).clone() + a.clone() * other.at(k, j).clone();
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.rows);
        let mut out = vec![T::zero(); self.cols];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for j in 0..self.cols {
                out[j] = out[j].clone() + xi.clone() * self.at(i, j).clone();
            }
        }
        out
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self.at(i, j) == self.at(j, i)))
    }
}

impl<T: std::fmt::Debug> std::fmt::Debug for Mat<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[i * self.cols..(i + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

impl ZMat {
    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        Mat::from_rows(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
    }

    pub fn to_q(&self) -> QMat {
        Mat::from_fn(self.rows, self.cols, |i, j| BigRational::from_integer(self.at(i, j).clone()))
    }

    /// Determinant by fraction-free Gaussian elimination with row pivoting.
    pub fn det_bareiss(&self) -> BigInt {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut m = self.clone();
        let mut sign = 1i32;
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m.at(k, k).is_zero() {
                match (k + 1..n).find(|&i| !m.at(i, k).is_zero()) {
                    Some(i) => {
                        m.swap_rows(k, i);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            let pivot = m.at(k, k).clone();
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&pivot * m.at(i, j) - m.at(i, k) * m.at(k, j)) / &prev;
                    m.set(i, j, v);
                }
                m.set(i, k, BigInt::zero());
            }
            prev = pivot;
        }
        let d = m.at(n - 1, n - 1).clone();
        if sign < 0 {
            -d
        } else {
            d
        }
    }

    /// Leading principal minors of a symmetric matrix, via Bareiss without
    /// pivoting. Returns `None` if a zero pivot occurs before completion
    /// (which for a symmetric matrix means some leading minor vanishes).
    pub fn leading_minors(&self) -> Option<Vec<BigInt>> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.clone();
        let mut minors = Vec::with_capacity(n);
        let mut prev = BigInt::one();
        for k in 0..n {
            let pivot = m.at(k, k).clone();
            minors.push(pivot.clone());
            if k + 1 == n {
                break;
            }
            if pivot.is_zero() {
                return None;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&pivot * m.at(i, j) - m.at(i, k) * m.at(k, j)) / &prev;
                    m.set(i, j, v);
                }
            }
            prev = pivot;
        }
        Some(minors)
    }

    /// Row-style Hermite normal form. Returns `(h, u, rank)` with `u` a
    /// square unimodular matrix satisfying `u * self = h`; `h` is in row
    /// echelon form with positive pivots and entries above each pivot
    /// reduced to `0 <= e < pivot`. Rows beyond `rank` of `u` form a basis
    /// of the left kernel.
    pub fn hnf_with_transform(&self) -> (ZMat, ZMat, usize) {
        let mut h = self.clone();
        let mut u = ZMat::identity(self.rows);
        let (rows, cols) = (self.rows, self.cols);
        let mut pivot_row = 0usize;
        for col in 0..cols {
            if pivot_row == rows {
                break;
            }
            // Euclidean-reduce the column below pivot_row to a single nonzero.
            loop {
                let mut best: Option<usize> = None;
                for i in pivot_row..rows {
                    if !h.at(i, col).is_zero() {
                        best = match best {
                            None => Some(i),
                            Some(b) => {
                                if h.at(i, col).abs() < h.at(b, col).abs() {
                                    Some(i)
                                } else {
                                    Some(b)
                                }
                            }
                        };
                    }
                }
                let Some(b) = best else { break };
                h.swap_rows(pivot_row, b);
                u.swap_rows(pivot_row, b);
                let pivot = h.at(pivot_row, col).clone();
                let mut any = false;
                for i in pivot_row + 1..rows {
                    if !h.at(i, col).is_zero() {
                        let q = div_round(h.at(i, col), &pivot);
                        if !q.is_zero() {
                            row_sub_scaled(&mut h, i, pivot_row, &q);
                            row_sub_scaled(&mut u, i, pivot_row, &q);
                        }
                        if !h.at(i, col).is_zero() {
                            any = true;
                        }
                    }
                }
                if !any {
                    break;
                }
            }
            if h.at(pivot_row, col).is_zero() {
                continue;
            }
            if h.at(pivot_row, col).is_negative() {
                row_negate(&mut h, pivot_row);
                row_negate(&mut u, pivot_row);
            }
            // Reduce entries above the pivot into [0, pivot).
            let pivot = h.at(pivot_row, col).clone();
            for i in 0..pivot_row {
                let q = div_floor_big(h.at(i, col), &pivot);
                if !q.is_zero() {
                    row_sub_scaled(&mut h, i, pivot_row, &q);
                    row_sub_scaled(&mut u, i, pivot_row, &q);
                }
            }
            pivot_row += 1;
        }
        (h, u, pivot_row)
    }

    pub fn hnf(&self) -> (ZMat, usize) {
        let (h, _, r) = self.hnf_with_transform();
        (h, r)
    }

    /// Basis of the left kernel `{ x : x * self = 0 }` as matrix rows.
    pub fn left_kernel(&self) -> ZMat {
        let (_, u, rank) = self.hnf_with_transform();
        u.submatrix_rows(rank, u.rows)
    }

    /// One integral solution of `x * self = b`, if it exists.
    pub fn solve_left(&self, b: &[BigInt]) -> Option<Vec<BigInt>> {
        assert_eq!(b.len(), self.cols);
        let (h, u, rank) = self.hnf_with_transform();
        // Solve y * h = b by forward elimination over the pivots of h.
        let mut y = vec![BigInt::zero(); h.rows];
        let mut rem: Vec<BigInt> = b.to_vec();
        let mut row = 0usize;
        for col in 0..h.cols {
            if row < rank && !h.at(row, col).is_zero() {
                let q = &rem[col] / h.at(row, col);
                if &q * h.at(row, col) != rem[col] {
                    return None;
                }
                for j in col..h.cols {
                    let v = &rem[j] - &q * h.at(row, j);
                    rem[j] = v;
                }
                y[row] = q;
                row += 1;
            } else if !rem[col].is_zero() {
                return None;
            }
        }
        if rem.iter().any(|v| !v.is_zero()) {
            return None;
        }
        Some(u.vec_mul(&y))
    }

    pub fn scale(&self, s: &BigInt) -> ZMat {
        Mat::from_fn(self.rows, self.cols, |i, j| self.at(i, j) * s)
    }
}

impl QMat {
    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        ZMat::from_i64(rows).to_q()
    }

    /// Smallest positive integer `d` with `d * self` integral, plus that
    /// integral matrix.
    pub fn clear_denominators(&self) -> (ZMat, BigInt) {
        let mut d = BigInt::one();
        for v in &self.data {
            d = num_integer::lcm(d, v.denom().clone());
        }
        let z = Mat::from_fn(self.rows, self.cols, |i, j| {
            let v = self.at(i, j);
            v.numer() * (&d / v.denom())
        });
        (z, d)
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|v| v.is_integer())
    }

    pub fn to_z(&self) -> Result<ZMat> {
        if !self.is_integral() {
            return Err(Error::NonIntegralResult("matrix has non-integer entries".into()));
        }
        Ok(Mat::from_fn(self.rows, self.cols, |i, j| self.at(i, j).to_integer()))
    }

    pub fn det(&self) -> BigRational {
        let (z, d) = self.clear_denominators();
        let det = z.det_bareiss();
        let dn = num_traits::pow(d, self.rows);
        BigRational::new(det, dn)
    }

    /// Gauss-Jordan inverse. Panics if not square; errors if singular.
    pub fn inverse(&self) -> Result<QMat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = QMat::identity(n);
        for col in 0..n {
            let pivot_row = (col..n).find(|&i| !a.at(i, col).is_zero());
            let Some(p) = pivot_row else {
                return Err(Error::DimensionMismatch("singular matrix has no inverse".into()));
            };
            a.swap_rows(col, p);
            inv.swap_rows(col, p);
            let pv = a.at(col, col).clone();
            for j in 0..n {
                let v = a.at(col, j) / &pv;
                a.set(col, j, v);
                let w = inv.at(col, j) / &pv;
                inv.set(col, j, w);
            }
            for i in 0..n {
                if i == col || a.at(i, col).is_zero() {
                    continue;
                }
                let f = a.at(i, col).clone();
                for j in 0..n {
                    let v = a.at(i, j) - &f * a.at(col, j);
                    a.set(i, j, v);
                    let w = inv.at(i, j) - &f * inv.at(col, j);
                    inv.set(i, j, w);
                }
            }
        }
        Ok(inv)
    }

    /// Rational row HNF: returns a canonical basis matrix of the row span of
    /// `self` over Z (i.e. the lattice generated by the rows), assuming the
    /// rows generate a finitely generated subgroup of Q^cols. The result has
    /// `rank` rows.
    pub fn row_lattice_hnf(&self) -> QMat {
        let (z, d) = self.clear_denominators();
        let (h, rank) = z.hnf();
        let dq = BigRational::from_integer(d);
        Mat::from_fn(rank, self.cols, |i, j| {
            BigRational::from_integer(h.at(i, j).clone()) / dq.clone()
        })
    }

    pub fn scale(&self, s: &BigRational) -> QMat {
        Mat::from_fn(self.rows, self.cols, |i, j| self.at(i, j) * s)
    }
}

fn row_sub_scaled(m: &mut ZMat, i: usize, j: usize, q: &BigInt) {
    for k in 0..m.cols {
        let v = m.at(i, k) - q * m.at(j, k);
        m.set(i, k, v);
    }
}

fn row_negate(m: &mut ZMat, i: usize) {
    for k in 0..m.cols {
        let v = -m.at(i, k).clone();
        m.set(i, k, v);
    }
}

/// Round-to-nearest integer division (ties toward zero side of the half).
pub fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let two = BigInt::from(2);
    let (q, r) = num_integer::Integer::div_rem(a, b);
    if r.abs() * &two > b.abs() {
        if (r.is_negative()) == (b.is_negative()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

pub fn div_floor_big(a: &BigInt, b: &BigInt) -> BigInt {
    num_integer::Integer::div_floor(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bareiss_matches_small_determinants() {
        let m = ZMat::from_i64(&[vec![2, 1], vec![1, 4]]);
        assert_eq!(m.det_bareiss(), BigInt::from(7));
        let m = ZMat::from_i64(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(m.det_bareiss(), BigInt::from(-1));
        let m = ZMat::from_i64(&[vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 9]]);
        assert_eq!(m.det_bareiss(), BigInt::zero());
    }

    #[test]
    fn hnf_transform_is_unimodular() {
        let m = ZMat::from_i64(&[vec![4, 6, 2], vec![6, 9, 3], vec![2, 0, 8]]);
        let (h, u, rank) = m.hnf_with_transform();
        assert_eq!(u.mul(&m), h);
        assert_eq!(rank, 2);
        assert_eq!(u.det_bareiss().abs(), BigInt::one());
    }

    #[test]
    fn left_kernel_annihilates() {
        let m = ZMat::from_i64(&[vec![1, 2], vec![2, 4], vec![0, 1]]);
        let k = m.left_kernel();
        assert_eq!(k.rows, 1);
        let prod = k.mul(&m);
        assert!(prod.row(0).iter().all(|v| v.is_zero()));
    }

    #[test]
    fn solve_left_finds_integer_solutions() {
        let m = ZMat::from_i64(&[vec![2, 0], vec![1, 3]]);
        let b = [BigInt::from(4), BigInt::from(6)];
        let x = m.solve_left(&b).unwrap();
        let got = m.vec_mul(&x);
        assert_eq!(got, b.to_vec());
        // 2x + y = 1, 3y' ... unsolvable target over Z
        let b2 = [BigInt::from(1), BigInt::from(1)];
        assert!(m.solve_left(&b2).is_none());
    }

    #[test]
    fn rational_inverse_round_trips() {
        let m = QMat::from_i64(&[vec![2, 1], vec![1, 4]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), QMat::identity(2));
    }

    #[test]
    fn leading_minors_detect_definiteness() {
        let pd = ZMat::from_i64(&[vec![2, 1], vec![1, 4]]);
        let minors = pd.leading_minors().unwrap();
        assert!(minors.iter().all(|m| m.is_positive()));
        let indef = ZMat::from_i64(&[vec![1, 2], vec![2, 1]]);
        let minors = indef.leading_minors().unwrap();
        assert!(minors.iter().any(|m| m.is_negative()));
    }

    #[test]
    fn div_round_rounds_to_nearest() {
        assert_eq!(div_round(&BigInt::from(7), &BigInt::from(2)), BigInt::from(3));
        assert_eq!(div_round(&BigInt::from(-7), &BigInt::from(2)), BigInt::from(-3));
        assert_eq!(div_round(&BigInt::from(5), &BigInt::from(3)), BigInt::from(2));
        assert_eq!(div_round(&BigInt::from(4), &BigInt::from(2)), BigInt::from(2));
    }
}

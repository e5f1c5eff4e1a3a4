//! Arithmetic in Z[a] with a^2 = a - 2, the ring of integers of the
//! imaginary quadratic field of discriminant -7.
//!
//! Conjugation sends a to b := 1 - a, so conj(x + y*a) = (x + y) - y*a;
//! trace(x + y*a) = 2x + y and the norm x^2 + xy + 2y^2 is positive
//! definite. The element 2a - 1 squares to -7. The ring is norm-Euclidean,
//! which gives gcd computations and lets saturated rank-one modules be
//! generated explicitly.

use crate::error::{Error, Result};
use crate::linalg::Mat;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::ops::{Add, Mul, Neg, Sub};

/// Element x + y*a of Z[a] or Q(a), depending on the coefficient type.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Alg<T> {
    pub x: T,
    pub y: T,
}

pub type ZAlpha = Alg<BigInt>;
pub type QAlpha = Alg<BigRational>;

impl<T> Alg<T> {
    pub fn new(x: T, y: T) -> Self {
        Alg { x, y }
    }
}

impl<T: Clone + Zero + One + Sub<Output = T> + Add<Output = T> + Mul<Output = T> + Neg<Output = T>>
    Alg<T>
{
    pub fn alpha() -> Self {
        Alg::new(T::zero(), T::one())
    }

    /// b = conj(a) = 1 - a.
    pub fn beta() -> Self {
        Alg::new(T::one(), -T::one())
    }

    /// 2a - 1, a square root of -7.
    pub fn sqrt_m7() -> Self {
        Alg::new(-T::one(), T::one() + T::one())
    }

    pub fn conj(&self) -> Self {
        Alg::new(self.x.clone() + self.y.clone(), -self.y.clone())
    }

    pub fn trace(&self) -> T {
        self.x.clone() + self.x.clone() + self.y.clone()
    }

    /// x^2 + xy + 2y^2 = z * conj(z).
    pub fn norm(&self) -> T {
        self.x.clone() * self.x.clone()
            + self.x.clone() * self.y.clone()
            + (T::one() + T::one()) * self.y.clone() * self.y.clone()
    }

    pub fn scale(&self, s: &T) -> Self {
        Alg::new(self.x.clone() * s.clone(), self.y.clone() * s.clone())
    }
}

impl<T: Clone + Zero + One + Sub<Output = T> + Mul<Output = T>> Mul for Alg<T> {
    type Output = Alg<T>;
    // (x1 + y1 a)(x2 + y2 a) with a^2 = a - 2.
    fn mul(self, rhs: Self) -> Self {
        let cross = self.x.clone() * rhs.y.clone() + self.y.clone() * rhs.x.clone();
        let yy = self.y * rhs.y;
        let two = T::one() + T::one();
        Alg::new(self.x * rhs.x - two * yy.clone(), cross + yy)
    }
}

impl<T: Add<Output = T>> Add for Alg<T> {
    type Output = Alg<T>;
    fn add(self, rhs: Self) -> Self {
        Alg::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl<T: Sub<Output = T>> Sub for Alg<T> {
    type Output = Alg<T>;
    fn sub(self, rhs: Self) -> Self {
        Alg::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl<T: Neg<Output = T>> Neg for Alg<T> {
    type Output = Alg<T>;
    fn neg(self) -> Self {
        Alg::new(-self.x, -self.y)
    }
}

impl<T: Clone + Zero + One + Sub<Output = T> + Mul<Output = T> + PartialEq> Zero for Alg<T> {
    fn zero() -> Self {
        Alg::new(T::zero(), T::zero())
    }
    fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }
}

impl<T: Clone + Zero + One + Sub<Output = T> + Mul<Output = T> + PartialEq> One for Alg<T> {
    fn one() -> Self {
        Alg::new(T::one(), T::zero())
    }
}

impl<T: std::fmt::Display + Zero + PartialEq> std::fmt::Debug for Alg<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.y.is_zero() {
            write!(f, "{}", self.x)
        } else if self.x.is_zero() {
            write!(f, "{}*a", self.y)
        } else {
            write!(f, "{}+{}*a", self.x, self.y)
        }
    }
}

impl ZAlpha {
    pub fn from_i64(x: i64, y: i64) -> Self {
        Alg::new(BigInt::from(x), BigInt::from(y))
    }

    pub fn to_q(&self) -> QAlpha {
        Alg::new(
            BigRational::from_integer(self.x.clone()),
            BigRational::from_integer(self.y.clone()),
        )
    }
}

impl QAlpha {
    pub fn from_z(z: &ZAlpha) -> Self {
        z.to_q()
    }

    pub fn is_integral(&self) -> bool {
        self.x.is_integer() && self.y.is_integer()
    }

    pub fn to_z(&self) -> Result<ZAlpha> {
        if !self.is_integral() {
            return Err(Error::NonIntegralResult(format!("{self:?} is not in Z[a]")));
        }
        Ok(Alg::new(self.x.to_integer(), self.y.to_integer()))
    }

    pub fn inv(&self) -> Result<QAlpha> {
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::Precondition("division by zero in Q(a)".into()));
        }
        let c = self.conj();
        Ok(Alg::new(c.x / n.clone(), c.y / n))
    }

    pub fn div(&self, rhs: &QAlpha) -> Result<QAlpha> {
        Ok(self.clone() * rhs.inv()?)
    }
}

/// Euclidean division: q with N(x - q y) < N(y). The naive coefficientwise
/// rounding can land exactly on norm N(y) at half-integer corners, so all
/// four floor/ceil corners are tried and the best remainder is kept.
pub fn div_rem(x: &ZAlpha, y: &ZAlpha) -> Result<(ZAlpha, ZAlpha)> {
    if y.is_zero() {
        return Err(Error::Precondition("division by zero in Z[a]".into()));
    }
    let exact = x.to_q().div(&y.to_q())?;
    let mut best: Option<(ZAlpha, ZAlpha, BigInt)> = None;
    for dx in [exact.x.floor(), exact.x.ceil()] {
        for dy in [exact.y.floor(), exact.y.ceil()] {
            let q = Alg::new(dx.to_integer(), dy.to_integer());
            let r = x.clone() - q.clone() * y.clone();
            let n = r.norm();
            if best.as_ref().map_or(true, |(_, _, bn)| &n < bn) {
                best = Some((q, r, n));
            }
        }
    }
    let (q, r, n) = best.unwrap();
    if n >= y.norm() {
        return Err(Error::InvariantFailure(
            "euclidean division failed; the ring should be norm-euclidean".into(),
        ));
    }
    Ok((q, r))
}

/// Generator of the ideal (x, y); Z[a] is a principal ideal domain.
pub fn gcd(x: &ZAlpha, y: &ZAlpha) -> ZAlpha {
    let mut a = x.clone();
    let mut b = y.clone();
    while !b.is_zero() {
        let (_, r) = div_rem(&a, &b).expect("nonzero divisor");
        a = b;
        b = r;
    }
    a
}

pub fn is_unit(x: &ZAlpha) -> bool {
    x.norm() == BigInt::one()
}

pub type AMat = Mat<QAlpha>;

/// Conjugate transpose.
pub fn conj_transpose(m: &AMat) -> AMat {
    Mat::from_fn(m.cols, m.rows, |i, j| m.at(j, i).conj())
}

/// Gauss-Jordan inverse over the field Q(a).
pub fn amat_inverse(m: &AMat) -> Result<AMat> {
    assert_eq!(m.rows, m.cols);
    let n = m.rows;
    let mut a = m.clone();
    let mut inv = AMat::identity(n);
    for col in 0..n {
        let Some(p) = (col..n).find(|&i| !a.at(i, col).is_zero()) else {
            return Err(Error::DimensionMismatch("singular matrix over Q(a)".into()));
        };
        a.swap_rows(col, p);
        inv.swap_rows(col, p);
        let pivinv = a.at(col, col).inv()?;
        for j in 0..n {
            let v = a.at(col, j).clone() * pivinv.clone();
            a.set(col, j, v);
            let w = inv.at(col, j).clone() * pivinv.clone();
            inv.set(col, j, w);
        }
        for i in 0..n {
            if i == col || a.at(i, col).is_zero() {
                continue;
            }
            let f = a.at(i, col).clone();
            for j in 0..n {
                let v = a.at(i, j).clone() - f.clone() * a.at(col, j).clone();
                a.set(i, j, v);
                let w = inv.at(i, j).clone() - f.clone() * inv.at(col, j).clone();
                inv.set(i, j, w);
            }
        }
    }
    Ok(inv)
}

pub fn amat_is_integral(m: &AMat) -> bool {
    (0..m.rows).all(|i| (0..m.cols).all(|j| m.at(i, j).is_integral()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn za(x: i64, y: i64) -> ZAlpha {
        ZAlpha::from_i64(x, y)
    }

    #[test]
    fn ring_relations() {
        let a = ZAlpha::alpha();
        let b = ZAlpha::beta();
        assert_eq!(a.clone() * a.clone(), za(-2, 1)); // a^2 = a - 2
        assert_eq!(a.conj(), b);
        assert_eq!(a.clone() * b.clone(), za(2, 0)); // a * conj(a) = N(a) = 2
        let s = ZAlpha::sqrt_m7();
        assert_eq!(s.clone() * s, za(-7, 0));
    }

    #[test]
    fn conj_trace_norm_laws() {
        for (x1, y1, x2, y2) in [(3, -2, 1, 5), (0, 1, 7, -3), (-4, -4, 2, 2)] {
            let u = za(x1, y1);
            let v = za(x2, y2);
            let prod = u.clone() * v.clone();
            assert_eq!(prod.conj(), u.conj() * v.conj());
            assert_eq!(u.trace(), u.clone().x * BigInt::from(2) + u.clone().y);
            assert_eq!(u.norm(), (u.clone() * u.conj()).x);
            assert!((u.clone() * u.conj()).y.is_zero());
        }
    }

    #[test]
    fn euclidean_division_reduces_norm() {
        let x = za(17, -5);
        let y = za(3, 2);
        let (q, r) = div_rem(&x, &y).unwrap();
        assert_eq!(q * y.clone() + r.clone(), x);
        assert!(r.norm() < y.norm());
    }

    #[test]
    fn gcd_of_two_and_alpha() {
        // (2) = (a)(conj a), so gcd(2, a) is a up to units.
        let g = gcd(&za(2, 0), &ZAlpha::alpha());
        assert_eq!(g.norm(), BigInt::from(2));
    }

    #[test]
    fn qalpha_field_ops() {
        let a = QAlpha::alpha();
        let inv = a.inv().unwrap();
        assert_eq!(a * inv, QAlpha::one());
    }

    #[test]
    fn amat_inverse_round_trip() {
        let m = AMat::from_rows(vec![
            vec![QAlpha::one() + QAlpha::alpha(), QAlpha::beta()],
            vec![QAlpha::alpha(), QAlpha::one()],
        ]);
        let inv = amat_inverse(&m).unwrap();
        assert_eq!(m.mul(&inv), AMat::identity(2));
    }
}

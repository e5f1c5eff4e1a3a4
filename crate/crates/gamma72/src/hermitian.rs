//! Hermitian lattices over Z[a] and the trace construction.
//!
//! A Hermitian lattice is a free Z[a]-module with a positive definite
//! Hermitian form, stored by its Gram matrix. Restricting scalars gives the
//! trace lattice on the Z-basis (b_1, a*b_1, ..., b_r, a*b_r) with bilinear
//! values s * trace(h(x, y)); the scale s is explicit because both s = 1 and
//! s = 1/7 normalizations are in constant use.

use crate::error::{Error, Result};
use crate::lattice::IntegerLattice;
use crate::linalg::QMat;
use crate::zalpha::{amat_inverse, amat_is_integral, conj_transpose, AMat, QAlpha, ZAlpha};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq)]
pub struct HermitianLattice {
    pub rank: usize,
    pub hgram: AMat,
    pub label: String,
}

impl HermitianLattice {
    pub fn new(hgram: AMat, label: impl Into<String>) -> Result<Self> {
        if hgram.rows != hgram.cols {
            return Err(Error::DimensionMismatch("hermitian gram must be square".into()));
        }
        if hgram != conj_transpose(&hgram) {
            return Err(Error::InvariantFailure(
                "hermitian gram does not equal its conjugate transpose".into(),
            ));
        }
        for i in 0..hgram.rows {
            if !hgram.at(i, i).y.is_zero() {
                return Err(Error::InvariantFailure(
                    "hermitian gram has a non-rational diagonal entry".into(),
                ));
            }
        }
        let lat = HermitianLattice { rank: hgram.rows, hgram, label: label.into() };
        // Positive definiteness via the trace Gram at scale 1.
        let g = lat.trace_gram(&BigRational::one());
        let (z, _) = g.clear_denominators();
        match z.leading_minors() {
            Some(m) if m.iter().all(|v| v.is_positive()) => Ok(lat),
            _ => Err(Error::InvariantFailure("hermitian form is not positive definite".into())),
        }
    }

    pub fn h(&self, i: usize, j: usize) -> &QAlpha {
        self.hgram.at(i, j)
    }

    /// Gram matrix of the trace lattice: basis (b_1, a b_1, ..., b_r, a b_r),
    /// entry ((i,x),(j,y)) = s * trace(a^x * conj(a)^y * h_ij).
    pub fn trace_gram(&self, s: &BigRational) -> QMat {
        let r = self.rank;
        let alpha = QAlpha::alpha();
        let beta = QAlpha::beta();
        QMat::from_fn(2 * r, 2 * r, |row, col| {
            let (i, x) = (row / 2, row % 2);
            let (j, y) = (col / 2, col % 2);
            let mut v = self.hgram.at(i, j).clone();
            if x == 1 {
                v = alpha.clone() * v;
            }
            if y == 1 {
                v = beta.clone() * v;
            }
            v.trace() * s
        })
    }

    /// Hermitian determinant (an element of Q(a); rational for a Hermitian
    /// Gram, but computed in the field).
    pub fn hdet(&self) -> QAlpha {
        // Gaussian elimination over Q(a) tracking the product of pivots.
        let n = self.rank;
        let mut a = self.hgram.clone();
        let mut det = QAlpha::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&i| !a.at(i, col).is_zero()) else {
                return QAlpha::zero();
            };
            if p != col {
                a.swap_rows(col, p);
                det = -det;
            }
            let piv = a.at(col, col).clone();
            det = det * piv.clone();
            let pinv = piv.inv().expect("nonzero pivot");
            for i in col + 1..n {
                if a.at(i, col).is_zero() {
                    continue;
                }
                let f = a.at(i, col).clone() * pinv.clone();
                for j in col..n {
                    let v = a.at(i, j).clone() - f.clone() * a.at(col, j).clone();
                    a.set(i, j, v);
                }
            }
        }
        det
    }
}

/// The Barnes lattice: rank 3 over Z[a], basis (1,1,a), (0,b,b), (0,0,2)
/// inside Z[a]^3 under half the standard Hermitian form.
pub fn barnes() -> HermitianLattice {
    let one = QAlpha::one;
    let a = QAlpha::alpha;
    let b = QAlpha::beta;
    let two = || one() + one();
    let rows = vec![
        vec![one(), one(), a()],
        vec![QAlpha::zero(), b(), b()],
        vec![QAlpha::zero(), QAlpha::zero(), two()],
    ];
    let basis = AMat::from_rows(rows);
    let half = QAlpha::new(
        BigRational::new(BigInt::one(), BigInt::from(2)),
        BigRational::zero(),
    );
    let mut h = basis.mul(&conj_transpose(&basis));
    h = AMat::from_fn(3, 3, |i, j| half.clone() * h.at(i, j).clone());
    HermitianLattice::new(h, "Barnes").expect("Barnes lattice is valid")
}

/// Trace lattice (restriction of scalars) at scale `s`. With
/// `require_integral`, a non-integral Gram is an error.
pub fn trace_lattice(
    p: &HermitianLattice,
    s: &BigRational,
    require_integral: bool,
) -> Result<IntegerLattice> {
    let gram = p.trace_gram(s);
    if require_integral && !gram.is_integral() {
        return Err(Error::NonIntegralResult(format!(
            "trace form of {} at scale {} is not integral",
            p.label, s
        )));
    }
    IntegerLattice::new(gram, format!("tr({})@{}", p.label, s))
}

/// Dual Hermitian lattice on the dual basis: Gram becomes H^{-1}, and the
/// dual basis expressed in the old one is H^{-1} as well.
pub fn hermitian_dual(p: &HermitianLattice) -> Result<(HermitianLattice, AMat)> {
    let inv = amat_inverse(&p.hgram)?;
    let dual = HermitianLattice::new(inv.clone(), format!("{}^*", p.label))?;
    Ok((dual, inv))
}

/// Does P equal its Hermitian dual as a module? True exactly when the dual
/// basis change H^{-1} is integral (its determinant is then a unit).
pub fn is_hermitian_unimodular(p: &HermitianLattice) -> Result<bool> {
    let inv = amat_inverse(&p.hgram)?;
    Ok(amat_is_integral(&inv))
}

/// Hermitian tensor product: Gram is the Kronecker product of the factors.
pub fn hermitian_tensor(p1: &HermitianLattice, p2: &HermitianLattice) -> Result<HermitianLattice> {
    let (r1, r2) = (p1.rank, p2.rank);
    let h = AMat::from_fn(r1 * r2, r1 * r2, |row, col| {
        let (i1, i2) = (row / r2, row % r2);
        let (j1, j2) = (col / r2, col % r2);
        p1.hgram.at(i1, j1).clone() * p2.hgram.at(i2, j2).clone()
    });
    HermitianLattice::new(h, format!("{} (x) {}", p1.label, p2.label))
}

/// Verifies dual(trace(P, s)) = (1/(s*sqrt(-7))) P^* exactly, comparing both
/// sides as rational coordinate lattices on the trace basis.
pub fn trace_dual_check(p: &HermitianLattice, s: &BigRational) -> Result<bool> {
    let r = p.rank;
    let trace = trace_lattice(p, s, false)?;
    let lhs = trace.gram.inverse()?; // dual basis rows in trace coordinates
    let (_, dual_basis) = hermitian_dual(p)?;
    // lambda = 1 / (s * sqrt(-7)); sqrt(-7) = 2a - 1.
    let s_alg = QAlpha::new(s.clone(), BigRational::zero());
    let lambda = (s_alg * QAlpha::sqrt_m7()).inv()?;
    // Z-generators of lambda * P^*: lambda * d_i and lambda * a * d_i.
    let mut rows: Vec<Vec<BigRational>> = Vec::with_capacity(2 * r);
    for i in 0..r {
        for mult in [lambda.clone(), lambda.clone() * QAlpha::alpha()] {
            let mut row = Vec::with_capacity(2 * r);
            for j in 0..r {
                let v = mult.clone() * dual_basis.at(i, j).clone();
                row.push(v.x.clone());
                row.push(v.y.clone());
            }
            rows.push(row);
        }
    }
    let rhs = QMat::from_rows(rows);
    Ok(lhs.row_lattice_hnf() == rhs.row_lattice_hnf())
}

/// Swap a and conj(a) in the Hermitian Gram (the Galois conjugate lattice).
pub fn galois_conjugate(p: &HermitianLattice) -> HermitianLattice {
    let h = AMat::from_fn(p.rank, p.rank, |i, j| p.hgram.at(i, j).conj());
    HermitianLattice::new(h, format!("conj({})", p.label)).expect("conjugate form stays valid")
}

/// Recover h(x, y) from the two bilinear values (x, y) and (x, yA) of a
/// structure at scale s: with u = (x,y)/s and v = (x,yA)/s,
/// h = (4u - v)/7 + ((2v - u)/7) a.
pub fn recover_h(xy: &BigRational, x_ay: &BigRational, s: &BigRational) -> QAlpha {
    let u = xy / s;
    let v = x_ay / s;
    let seven = BigRational::from_integer(BigInt::from(7));
    let four = BigRational::from_integer(BigInt::from(4));
    let two = BigRational::from_integer(BigInt::from(2));
    QAlpha::new((&four * &u - &v) / &seven, (&two * &v - &u) / &seven)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::rat;
    use crate::zalpha::Alg;

    fn qa(x: i64, y: i64) -> QAlpha {
        ZAlpha::from_i64(x, y).to_q()
    }

    #[test]
    fn barnes_diagonal_is_two() {
        let p = barnes();
        for i in 0..3 {
            assert_eq!(p.h(i, i), &qa(2, 0));
        }
        // frozen off-diagonal values from the defining basis arithmetic:
        // h(v1,v2) = -beta, h(v1,v3) = alpha, h(v2,v3) = beta
        assert_eq!(p.h(0, 1), &-qa(1, -1));
        assert_eq!(p.h(0, 2), &qa(0, 1));
        assert_eq!(p.h(1, 2), &qa(1, -1));
    }

    #[test]
    fn barnes_is_hermitian_unimodular() {
        let p = barnes();
        assert!(is_hermitian_unimodular(&p).unwrap());
        let (dual, basis) = hermitian_dual(&p).unwrap();
        assert_eq!(dual.rank, 3);
        assert!(amat_is_integral(&basis));
    }

    #[test]
    fn barnes_trace_lattice_has_determinant_343() {
        let p = barnes();
        let t = trace_lattice(&p, &BigRational::one(), true).unwrap();
        assert_eq!(t.det(), rat(343)); // 7^3
        assert!(t.is_even());
    }

    #[test]
    fn rank_one_trace_gram() {
        let p = HermitianLattice::new(AMat::identity(1), "Z[a]").unwrap();
        let t = trace_lattice(&p, &BigRational::one(), true).unwrap();
        assert_eq!(t.gram, QMat::from_i64(&[vec![2, 1], vec![1, 4]]));
        // 1/7 scale is not integral
        let seventh = BigRational::new(BigInt::one(), BigInt::from(7));
        assert!(matches!(
            trace_lattice(&p, &seventh, true),
            Err(Error::NonIntegralResult(_))
        ));
    }

    #[test]
    fn rank_one_dual_checks() {
        let p = HermitianLattice::new(AMat::identity(1), "Z[a]").unwrap();
        let (dual, _) = hermitian_dual(&p).unwrap();
        assert_eq!(dual.hgram, AMat::identity(1));
        assert!(trace_dual_check(&p, &BigRational::one()).unwrap());
    }

    #[test]
    fn barnes_trace_dual_check() {
        let p = barnes();
        assert!(trace_dual_check(&p, &BigRational::one()).unwrap());
    }

    #[test]
    fn tensor_unit_and_barnes_square() {
        let p = barnes();
        let unit = HermitianLattice::new(AMat::identity(1), "unit").unwrap();
        let t = hermitian_tensor(&p, &unit).unwrap();
        assert_eq!(t.hgram, p.hgram);
        let sq = hermitian_tensor(&p, &p).unwrap();
        assert_eq!(sq.rank, 9);
        for i in 0..9 {
            assert_eq!(sq.h(i, i), &qa(4, 0));
        }
    }

    #[test]
    fn galois_conjugate_swaps_alpha_beta() {
        let p = barnes();
        let c = galois_conjugate(&p);
        assert_eq!(c.h(0, 2), &Alg::conj(&qa(0, 1)));
        assert_eq!(galois_conjugate(&c).hgram, p.hgram);
    }

    #[test]
    fn recover_h_round_trips_scalars() {
        // For the rank-1 lattice with hgram [[w]] the trace values are
        // (x,y) = s tr(w) and (x, ya) = s tr(beta w); recovery must invert.
        for (wx, wy) in [(1i64, 0i64), (3, 1), (2, -5)] {
            let w = qa(wx, wy);
            for s in [BigRational::one(), BigRational::new(BigInt::one(), BigInt::from(7))] {
                let xy = w.trace() * &s;
                let x_ay = (QAlpha::beta() * w.clone()).trace() * &s;
                assert_eq!(recover_h(&xy, &x_ay, &s), w);
            }
        }
    }
}

//! Positive definite lattices with exact rational Gram matrices.
//!
//! A lattice is a value object: constructors validate symmetry, positive
//! definiteness and (when an ambient embedding is supplied) consistency of
//! `basis * ambient_gram * basis^T` with the stored Gram matrix. The "norm"
//! of a vector v always means the bilinear value (v, v); the quadratic form
//! is Q(v) = (v, v)/2 and "even" means every (v, v) is an even integer.

use crate::error::{Error, Result};
use crate::linalg::QMat;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::io::{BufRead, Write};

/// Ambient embedding: generator rows plus the ambient bilinear form.
#[derive(Clone, Debug, PartialEq)]
pub struct Ambient {
    /// rank x ambient_dim generator matrix (rows are basis vectors).
    pub basis: QMat,
    /// ambient_dim x ambient_dim symmetric bilinear form.
    pub gram: QMat,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegerLattice {
    pub rank: usize,
    pub gram: QMat,
    pub ambient: Option<Ambient>,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LatticeVector {
    pub coords: Vec<BigInt>,
    pub norm: BigRational,
}

impl IntegerLattice {
    pub fn new(gram: QMat, label: impl Into<String>) -> Result<Self> {
        Self::with_ambient(gram, None, label)
    }

    pub fn with_ambient(
        gram: QMat,
        ambient: Option<Ambient>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if gram.rows != gram.cols {
            return Err(Error::DimensionMismatch(format!(
                "gram is {}x{}, expected square",
                gram.rows, gram.cols
            )));
        }
        if !gram.is_symmetric() {
            return Err(Error::InvariantFailure("gram matrix is not symmetric".into()));
        }
        let (z, _) = gram.clear_denominators();
        match z.leading_minors() {
            Some(minors) if minors.iter().all(|m| m.is_positive()) => {}
            _ => {
                return Err(Error::InvariantFailure(
                    "gram matrix is not positive definite".into(),
                ))
            }
        }
        if let Some(a) = &ambient {
            if a.basis.rows != gram.rows {
                return Err(Error::DimensionMismatch("basis row count != rank".into()));
            }
            let recomputed = a.basis.mul(&a.gram).mul(&a.basis.transpose());
            if recomputed != gram {
                return Err(Error::InvariantFailure(
                    "basis * ambient_gram * basis^T != gram".into(),
                ));
            }
        }
        Ok(IntegerLattice { rank: gram.rows, gram, ambient, label: label.into() })
    }

    pub fn from_integer_gram(rows: &[Vec<i64>], label: impl Into<String>) -> Result<Self> {
        Self::new(QMat::from_i64(rows), label)
    }

    /// Exact norm (v, v) of an integer coordinate vector.
    pub fn norm_of(&self, coords: &[BigInt]) -> BigRational {
        self.inner(coords, coords)
    }

    pub fn inner(&self, a: &[BigInt], b: &[BigInt]) -> BigRational {
        assert_eq!(a.len(), self.rank);
        assert_eq!(b.len(), self.rank);
        let mut acc = BigRational::zero();
        for i in 0..self.rank {
            if a[i].is_zero() {
                continue;
            }
            let ai = BigRational::from_integer(a[i].clone());
            for j in 0..self.rank {
                if b[j].is_zero() {
                    continue;
                }
                acc += &ai * self.gram.at(i, j) * BigRational::from_integer(b[j].clone());
            }
        }
        acc
    }

    pub fn vector(&self, coords: Vec<BigInt>) -> LatticeVector {
        let norm = self.norm_of(&coords);
        LatticeVector { coords, norm }
    }

    pub fn det(&self) -> BigRational {
        self.gram.det()
    }

    pub fn is_integral(&self) -> bool {
        self.gram.is_integral()
    }

    pub fn is_even(&self) -> bool {
        self.is_integral()
            && (0..self.rank).all(|i| {
                let d = self.gram.at(i, i);
                (d.numer() % 2u8).is_zero()
            })
    }

    pub fn is_unimodular(&self) -> bool {
        self.is_integral() && self.det() == BigRational::one()
    }

    /// Dual lattice expressed on the dual basis: Gram becomes G^{-1}; when an
    /// ambient embedding is present the dual basis is G^{-1} * basis.
    pub fn dual(&self) -> IntegerLattice {
        let inv = self.gram.inverse().expect("positive definite gram is invertible");
        let ambient = self.ambient.as_ref().map(|a| Ambient {
            basis: inv.mul(&a.basis),
            gram: a.gram.clone(),
        });
        IntegerLattice {
            rank: self.rank,
            gram: inv,
            ambient,
            label: format!("{}^#", self.label),
        }
    }

    /// Index of the sublattice spanned by `coords` rows (expressed in this
    /// lattice's basis). The rows must be integral and form a finite-index
    /// sublattice, i.e. `coords` is square with nonzero determinant.
    pub fn sublattice_index(&self, coords: &QMat) -> Result<BigInt> {
        if coords.rows != self.rank || coords.cols != self.rank {
            return Err(Error::DimensionMismatch(format!(
                "sublattice coordinate matrix is {}x{}, expected {}x{}",
                coords.rows, coords.cols, self.rank, self.rank
            )));
        }
        if !coords.is_integral() {
            return Err(Error::NotASublattice(
                "generators are not integral combinations of the parent basis".into(),
            ));
        }
        let det = coords.det();
        if det.is_zero() {
            return Err(Error::NotASublattice("generators do not have full rank".into()));
        }
        Ok(det.to_integer().abs())
    }

    pub fn orthogonal_sum(&self, other: &IntegerLattice) -> IntegerLattice {
        let n = self.rank + other.rank;
        let gram = QMat::from_fn(n, n, |i, j| {
            if i < self.rank && j < self.rank {
                self.gram.at(i, j).clone()
            } else if i >= self.rank && j >= self.rank {
                other.gram.at(i - self.rank, j - self.rank).clone()
            } else {
                BigRational::zero()
            }
        });
        IntegerLattice {
            rank: n,
            gram,
            ambient: None,
            label: format!("{} + {}", self.label, other.label),
        }
    }

    /// Multiplies the bilinear form by `s > 0`.
    pub fn rescale(&self, s: &BigRational) -> IntegerLattice {
        assert!(s.is_positive(), "rescale factor must be positive");
        let ambient = self.ambient.as_ref().map(|a| Ambient {
            basis: a.basis.clone(),
            gram: a.gram.scale(s),
        });
        IntegerLattice {
            rank: self.rank,
            gram: self.gram.scale(s),
            ambient,
            label: self.label.clone(),
        }
    }

    /// Ambient coordinates of a lattice vector, when an embedding is stored.
    pub fn embed(&self, coords: &[BigInt]) -> Option<Vec<BigRational>> {
        let a = self.ambient.as_ref()?;
        let q: Vec<BigRational> =
            coords.iter().map(|c| BigRational::from_integer(c.clone())).collect();
        Some(a.basis.vec_mul(&q))
    }

    pub fn write_gram<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "{}", self.rank)?;
        for i in 0..self.rank {
            let line: Vec<String> = (0..self.rank).map(|j| fmt_rat(self.gram.at(i, j))).collect();
            writeln!(w, "{}", line.join(" "))?;
        }
        Ok(())
    }

    pub fn read_gram<R: BufRead>(r: &mut R, label: impl Into<String>) -> Result<Self> {
        let gram = read_matrix(r)?;
        Self::new(gram, label)
    }
}

pub fn fmt_rat(v: &BigRational) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

pub fn parse_rat(s: &str) -> Result<BigRational> {
    let parse_int = |t: &str| -> Result<BigInt> {
        t.parse::<BigInt>().map_err(|_| Error::Parse(format!("bad rational '{s}'")))
    };
    match s.split_once('/') {
        Some((p, q)) => {
            let num = parse_int(p)?;
            let den = parse_int(q)?;
            if den.is_zero() {
                return Err(Error::Parse(format!("zero denominator in '{s}'")));
            }
            Ok(BigRational::new(num, den))
        }
        None => Ok(BigRational::from_integer(parse_int(s)?)),
    }
}

/// Reads "n" then n rows of n whitespace-separated rationals.
pub fn read_matrix<R: BufRead>(r: &mut R) -> Result<QMat> {
    let mut line = String::new();
    loop {
        line.clear();
        if r.read_line(&mut line)? == 0 {
            return Err(Error::Parse("unexpected end of file before rank line".into()));
        }
        if !line.trim().is_empty() {
            break;
        }
    }
    let n: usize =
        line.trim().parse().map_err(|_| Error::Parse(format!("bad rank line '{}'", line.trim())))?;
    let mut rows = Vec::with_capacity(n);
    while rows.len() < n {
        line.clear();
        if r.read_line(&mut line)? == 0 {
            return Err(Error::Parse("unexpected end of file inside matrix".into()));
        }
        if line.trim().is_empty() {
            continue;
        }
        let row: Result<Vec<BigRational>> = line.split_whitespace().map(parse_rat).collect();
        let row = row?;
        if row.len() != n {
            return Err(Error::Parse(format!(
                "matrix row has {} entries, expected {}",
                row.len(),
                n
            )));
        }
        rows.push(row);
    }
    Ok(QMat::from_rows(rows))
}

/// Reads one matrix in the Gram file layout from a string.
pub fn read_matrix_str(s: &str) -> Result<QMat> {
    let mut cursor = std::io::Cursor::new(s.as_bytes());
    read_matrix(&mut cursor)
}

/// Coordinates of `sub`'s basis rows in terms of `parent`'s basis rows,
/// computed inside a common ambient space. Both lattices must carry
/// ambient embeddings into the same space.
pub fn coords_in(parent: &IntegerLattice, sub: &IntegerLattice) -> Result<QMat> {
    let (pa, sa) = match (&parent.ambient, &sub.ambient) {
        (Some(p), Some(s)) => (p, s),
        _ => {
            return Err(Error::Precondition(
                "both lattices need ambient embeddings to relate their bases".into(),
            ))
        }
    };
    if pa.basis.cols != sa.basis.cols {
        return Err(Error::DimensionMismatch("ambient dimensions differ".into()));
    }
    // Solve X * parent_basis = sub_basis over Q.
    let pinv = parent
        .gram
        .inverse()
        .expect("positive definite gram is invertible");
    // X = sub_basis * ambient_gram * parent_basis^T * gram^{-1}
    let x = sa.basis.mul(&pa.gram).mul(&pa.basis.transpose()).mul(&pinv);
    // Verify exactly (guards against sub not lying in parent's span).
    if x.mul(&pa.basis) != sa.basis {
        return Err(Error::NotASublattice("sublattice is not contained in parent's span".into()));
    }
    Ok(x)
}

/// 2L as a coordinate matrix (convenience for tests and CLI).
pub fn double_coords(rank: usize) -> QMat {
    QMat::identity(rank).scale(&BigRational::from_integer(BigInt::from(2)))
}

pub fn zvec(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a2() -> IntegerLattice {
        IntegerLattice::from_integer_gram(&[vec![2, 1], vec![1, 2]], "A2").unwrap()
    }

    #[test]
    fn constructor_rejects_indefinite_gram() {
        let err = IntegerLattice::from_integer_gram(&[vec![1, 2], vec![2, 1]], "bad");
        assert!(err.is_err());
        let err = IntegerLattice::from_integer_gram(&[vec![2, 1], vec![0, 2]], "asym");
        assert!(err.is_err());
    }

    #[test]
    fn dual_of_z_is_z() {
        let z = IntegerLattice::from_integer_gram(&[vec![1]], "Z").unwrap();
        assert_eq!(z.dual().gram, z.gram);
    }

    #[test]
    fn dual_determinant_is_reciprocal() {
        let l = a2();
        assert_eq!(l.det(), BigRational::from_integer(BigInt::from(3)));
        let d = l.dual();
        assert_eq!(d.det(), BigRational::new(BigInt::one(), BigInt::from(3)));
        // dual(dual) restores the Gram under the canonical identification
        assert_eq!(d.dual().gram, l.gram);
    }

    #[test]
    fn evenness_and_unimodularity_predicates() {
        let two = IntegerLattice::from_integer_gram(&[vec![2]], "2Z-form").unwrap();
        assert!(two.is_even());
        assert!(!two.is_unimodular());
        let id8 = IntegerLattice::new(QMat::identity(8), "Z8").unwrap();
        assert!(!id8.is_even());
        assert!(id8.is_unimodular());
    }

    #[test]
    fn sublattice_index_examples() {
        let l = a2();
        assert_eq!(l.sublattice_index(&double_coords(2)).unwrap(), BigInt::from(4));
        assert_eq!(l.sublattice_index(&QMat::identity(2)).unwrap(), BigInt::one());
        let half = QMat::from_rows(vec![
            vec![BigRational::new(BigInt::one(), BigInt::from(2)), BigRational::zero()],
            vec![BigRational::zero(), BigRational::one()],
        ]);
        assert!(matches!(l.sublattice_index(&half), Err(Error::NotASublattice(_))));
    }

    #[test]
    fn orthogonal_sum_and_rescale() {
        let a1 = IntegerLattice::from_integer_gram(&[vec![2]], "A1").unwrap();
        let s = a1.orthogonal_sum(&a1);
        assert_eq!(s.gram, QMat::from_i64(&[vec![2, 0], vec![0, 2]]));
        let l = a2();
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let r = l.rescale(&half);
        assert_eq!(r.gram.at(0, 0), &BigRational::one());
        let back = r.rescale(&BigRational::from_integer(BigInt::from(2)));
        assert_eq!(back.gram, l.gram);
    }

    #[test]
    fn gram_file_round_trip() {
        let l = a2().rescale(&BigRational::new(BigInt::one(), BigInt::from(3)));
        let mut buf = Vec::new();
        l.write_gram(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("2\n"));
        assert!(text.contains("2/3"));
        let mut cur = std::io::Cursor::new(buf);
        let l2 = IntegerLattice::read_gram(&mut cur, "rt").unwrap();
        assert_eq!(l2.gram, l.gram);
    }

    #[test]
    fn vector_norm_is_cached_exactly() {
        let l = a2();
        let v = l.vector(zvec(&[1, -1]));
        assert_eq!(v.norm, BigRational::from_integer(BigInt::from(2)));
    }
}

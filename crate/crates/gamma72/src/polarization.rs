//! Polarizations of even unimodular lattices and Construction I.
//!
//! A polarization of L is a pair of sublattices 2L <= M, N <= L whose images
//! in L/2L are complementary maximal totally isotropic subspaces. Both halves
//! carry the rescaled form Q/2 as even unimodular lattices. Construction I
//! glues k copies along a polarization, giving the even unimodular lattice
//! of k-tuples (x_1 + y, ..., x_k + y) with x_i in M, y in N and
//! sum x_i in M cap N, under half the summed form.

use crate::error::{Error, Result};
use crate::f2::{bv_get, BitVec, F2QuadSpace};
use crate::lattice::IntegerLattice;
use crate::linalg::{QMat, ZMat};
use crate::structure::StructurePair;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug)]
pub struct Polarization {
    pub parent: IntegerLattice,
    /// Basis rows of M and N in the parent's coordinates.
    pub m_coords: ZMat,
    pub n_coords: ZMat,
    pub m: IntegerLattice,
    pub n: IntegerLattice,
}

impl Polarization {
    pub fn swapped(&self) -> Polarization {
        Polarization {
            parent: self.parent.clone(),
            m_coords: self.n_coords.clone(),
            n_coords: self.m_coords.clone(),
            m: self.n.clone(),
            n: self.m.clone(),
        }
    }

    /// The even unimodular lattice (M, Q/2).
    pub fn m_half(&self) -> IntegerLattice {
        self.m.rescale(&BigRational::new(BigInt::one(), BigInt::from(2)))
    }

    pub fn n_half(&self) -> IntegerLattice {
        self.n.rescale(&BigRational::new(BigInt::one(), BigInt::from(2)))
    }
}

/// Sublattice of `l` spanned by integral coordinate rows (rows are reduced
/// to a canonical HNF basis first).
pub fn sublattice_from_rows(l: &IntegerLattice, rows: &ZMat, label: &str) -> Result<(ZMat, IntegerLattice)> {
    let (h, rank) = rows.hnf();
    if rank != l.rank {
        return Err(Error::InvariantFailure(format!(
            "{label}: generators span rank {rank}, expected {}",
            l.rank
        )));
    }
    let basis = h.submatrix_rows(0, rank);
    let gram = basis.to_q().mul(&l.gram).mul(&basis.to_q().transpose());
    let lat = IntegerLattice::new(gram, label.to_string())?;
    Ok((basis, lat))
}

fn intersection_rows(x: &ZMat, y: &ZMat) -> ZMat {
    // pairs (a, b) with a X = b Y; intersection basis = the a X part
    let neg_y = ZMat::from_fn(y.rows, y.cols, |i, j| -y.at(i, j).clone());
    let stacked = x.vstack(&neg_y);
    let kernel = stacked.left_kernel();
    let a_part = kernel.submatrix_cols(0, x.rows);
    let (h, rank) = a_part.mul(x).hnf();
    h.submatrix_rows(0, rank)
}

/// Full invariant battery for a would-be polarization. Errors carry the
/// violated clause.
pub fn validate_polarization(pol: &Polarization) -> Result<()> {
    let l = &pol.parent;
    let half_rank = l.rank / 2;
    if l.rank % 2 != 0 {
        return Err(Error::InvariantFailure("parent rank must be even".into()));
    }
    for (coords, lat, name) in
        [(&pol.m_coords, &pol.m, "M"), (&pol.n_coords, &pol.n, "N")]
    {
        // 2L <= X <= L with index 2^{n/2}
        let idx = l.sublattice_index(&coords.to_q())?;
        if idx != BigInt::from(2).pow(half_rank as u32) {
            return Err(Error::InvariantFailure(format!(
                "{name} has index {idx}, expected 2^{half_rank}"
            )));
        }
        let cinv = coords.to_q().inverse()?;
        if !cinv.scale(&BigRational::from_integer(BigInt::from(2))).is_integral() {
            return Err(Error::InvariantFailure(format!("2L is not contained in {name}")));
        }
        // (X, Q/2) is integral and even (X/2L totally isotropic); over an
        // even unimodular parent it must itself be even unimodular.
        let half = lat.rescale(&BigRational::new(BigInt::one(), BigInt::from(2)));
        if !half.is_even() {
            return Err(Error::InvariantFailure(format!("({name}, Q/2) is not even")));
        }
        if l.is_unimodular() && !half.is_unimodular() {
            return Err(Error::InvariantFailure(format!(
                "({name}, Q/2) is not unimodular over a unimodular parent"
            )));
        }
    }
    // M cap N = 2L
    let inter = intersection_rows(&pol.m_coords, &pol.n_coords);
    let two_l = ZMat::identity(l.rank).scale(&BigInt::from(2));
    if inter != two_l.hnf().0 {
        return Err(Error::InvariantFailure("M cap N != 2L".into()));
    }
    Ok(())
}

/// Preimages in L of complementary maximal isotropic subspaces of L/2L.
pub fn preimages(
    l: &IntegerLattice,
    space: &F2QuadSpace,
    u: &[BitVec],
    v: &[BitVec],
) -> Result<Polarization> {
    if space.dim != l.rank {
        return Err(Error::DimensionMismatch("space dimension != lattice rank".into()));
    }
    let lift = |vecs: &[BitVec], label: &str| -> Result<(ZMat, IntegerLattice)> {
        let mut rows: Vec<Vec<BigInt>> = vecs
            .iter()
            .map(|bv| {
                (0..l.rank)
                    .map(|i| BigInt::from(bv_get(bv, i) as i64))
                    .collect()
            })
            .collect();
        for i in 0..l.rank {
            let mut r = vec![BigInt::zero(); l.rank];
            r[i] = BigInt::from(2);
            rows.push(r);
        }
        sublattice_from_rows(l, &ZMat::from_rows(rows), label)
    };
    let (m_coords, m) = lift(u, "M")?;
    let (n_coords, n) = lift(v, "N")?;
    let pol = Polarization { parent: l.clone(), m_coords, n_coords, m, n };
    validate_polarization(&pol)?;
    Ok(pol)
}

/// The polarization M = aL, N = (1-a)L of a structure pair.
pub fn polarization_from_structure(l: &IntegerLattice, sp: &StructurePair) -> Result<Polarization> {
    sp.validate()?;
    if l.gram.to_z()? != sp.f {
        return Err(Error::Precondition("structure Gram differs from lattice Gram".into()));
    }
    let (m_coords, m) = sublattice_from_rows(l, &sp.a, "alpha L")?;
    let (n_coords, n) = sublattice_from_rows(l, &sp.b(), "beta L")?;
    let pol = Polarization { parent: l.clone(), m_coords, n_coords, m, n };
    validate_polarization(&pol)?;
    Ok(pol)
}

/// Construction I: the nk-dimensional lattice L(M, N, k) with half the
/// summed form, presented on the ambient L^k with Gram (1/2) diag(G,...,G).
/// Returns the basis rows (in L^k coordinates) and the lattice.
pub fn construction_i(pol: &Polarization, k: usize) -> Result<(ZMat, IntegerLattice)> {
    if k == 0 {
        return Err(Error::Precondition("k must be at least 1".into()));
    }
    let l = &pol.parent;
    let n = l.rank;
    let dim = n * k;
    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    // diagonal N-vectors (y, y, ..., y)
    for i in 0..n {
        let y = pol.n_coords.row(i);
        let mut r = vec![BigInt::zero(); dim];
        for slot in 0..k {
            for j in 0..n {
                r[slot * n + j] = y[j].clone();
            }
        }
        rows.push(r);
    }
    // differences (0, ..., m, -m, ..., 0)
    for slot in 0..k.saturating_sub(1) {
        for i in 0..n {
            let m = pol.m_coords.row(i);
            let mut r = vec![BigInt::zero(); dim];
            for j in 0..n {
                r[slot * n + j] = m[j].clone();
                r[(slot + 1) * n + j] = -m[j].clone();
            }
            rows.push(r);
        }
    }
    // 2L in the first slot closes the kernel of the summation map
    for i in 0..n {
        let mut r = vec![BigInt::zero(); dim];
        r[i] = BigInt::from(2);
        rows.push(r);
    }
    let gen = ZMat::from_rows(rows);
    let (h, rank) = gen.hnf();
    if rank != dim {
        return Err(Error::InvariantFailure(format!(
            "construction I generators span rank {rank}, expected {dim}"
        )));
    }
    let basis = h.submatrix_rows(0, rank);
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let big_gram = QMat::from_fn(dim, dim, |i, j| {
        if i / n == j / n {
            l.gram.at(i % n, j % n) * &half
        } else {
            BigRational::zero()
        }
    });
    let gram = basis.to_q().mul(&big_gram).mul(&basis.to_q().transpose());
    let lat = IntegerLattice::new(gram, format!("L({},{},{k})", pol.m.label, pol.n.label))?;
    if l.is_even() && l.is_unimodular() && (!lat.is_even() || !lat.is_unimodular()) {
        return Err(Error::InvariantFailure(
            "construction I output is not even unimodular; polarization is bad".into(),
        ));
    }
    Ok((basis, lat))
}

/// Result of a Kneser 2-neighbor step at w.
#[derive(Clone, Debug)]
pub struct NeighborStep {
    /// Basis of M^w = <M_w, w> in parent coordinates.
    pub coords: ZMat,
    pub lattice: IntegerLattice,
    /// [M : M_w]; 2 in the generic case, 1 when (., w) is even on all of M.
    pub index_down: BigInt,
    /// [M^w : M_w]
    pub index_up: BigInt,
}

/// Kneser 2-neighbor of the sublattice spanned by `m_coords` at the vector
/// `w` (parent coordinates, w not in M): M_w = {m : (m, w) even},
/// M^w = <M_w, w>. The result must come out integral and even.
pub fn neighbor_2(
    l: &IntegerLattice,
    m_coords: &ZMat,
    w: &[BigInt],
) -> Result<NeighborStep> {
    let n = l.rank;
    if w.len() != n {
        return Err(Error::DimensionMismatch("w has wrong length".into()));
    }
    // w must not lie in M
    let wq: Vec<BigRational> = w.iter().map(|x| BigRational::from_integer(x.clone())).collect();
    let in_m = m_coords.to_q().inverse().map(|inv| {
        inv.transpose().vec_mul(&wq).iter().all(|c| c.is_integer())
    })?;
    if in_m {
        return Err(Error::WNotAdmissible("w already lies in M".into()));
    }
    let wnorm = l.norm_of(w);
    if !wnorm.is_integer() || (wnorm.to_integer() % BigInt::from(2)).is_zero() == false {
        return Err(Error::WNotAdmissible("(w,w) must be an even integer".into()));
    }
    // parity functional on M-basis rows
    let gz = l.gram.to_z()?;
    let gw = gz.vec_mul(w);
    let parities: Vec<bool> = (0..m_coords.rows)
        .map(|i| {
            let ip: BigInt = m_coords.row(i).iter().zip(&gw).map(|(a, b)| a * b).sum();
            !(ip % BigInt::from(2)).is_zero()
        })
        .collect();
    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    let pivot = parities.iter().position(|&p| p);
    match pivot {
        None => {
            for i in 0..m_coords.rows {
                rows.push(m_coords.row(i).to_vec());
            }
        }
        Some(p) => {
            for i in 0..m_coords.rows {
                if i == p {
                    continue;
                }
                let mut r = m_coords.row(i).to_vec();
                if parities[i] {
                    for (a, b) in r.iter_mut().zip(m_coords.row(p)) {
                        *a -= b;
                    }
                }
                rows.push(r);
            }
            rows.push(m_coords.row(p).iter().map(|x| x * BigInt::from(2)).collect());
        }
    }
    let mw = ZMat::from_rows(rows.clone());
    let index_down = if pivot.is_some() { BigInt::from(2) } else { BigInt::one() };
    rows.push(w.to_vec());
    let (coords, lattice) = sublattice_from_rows(l, &ZMat::from_rows(rows), "M^w")?;
    if !lattice.is_even() || !lattice.is_integral() {
        return Err(Error::WNotAdmissible("M^w failed integrality or evenness".into()));
    }
    let det_mw = mw.to_q().mul(&l.gram).mul(&mw.to_q().transpose()).det();
    let det_up = lattice.det();
    let ratio = det_mw / det_up;
    // [M^w : M_w] = sqrt of the determinant ratio
    let index_up = {
        let r = ratio.to_integer();
        let mut k = BigInt::one();
        while &k * &k < r {
            k += 1;
        }
        k
    };
    Ok(NeighborStep { coords, lattice, index_down, index_up })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::build_e8;
    use crate::enumerate::{minimum, rat};
    use crate::f2::F2QuadSpace;
    use crate::lattice::zvec;
    use crate::structure::find_structure;

    fn toy_polarization() -> Polarization {
        let l =
            IntegerLattice::from_integer_gram(&[vec![2, 1], vec![1, 4]], "toy").unwrap();
        let sp = find_structure(&l, 1_000_000, 1).unwrap();
        polarization_from_structure(&l, &sp).unwrap()
    }

    #[test]
    fn toy_structure_polarization_has_index_two() {
        let pol = toy_polarization();
        let idx = pol.parent.sublattice_index(&pol.m_coords.to_q()).unwrap();
        assert_eq!(idx, BigInt::from(2));
        validate_polarization(&pol).unwrap();
    }

    #[test]
    fn e8_preimage_polarization_validates() {
        let l = build_e8().unwrap();
        let space = F2QuadSpace::from_lattice(&l).unwrap();
        let (u, v) = space.isotropic_complement_pair(0).unwrap();
        let pol = preimages(&l, &space, &u, &v).unwrap();
        assert_eq!(pol.m_coords.rows, 8);
        // index 2^4 on both sides
        let idx = l.sublattice_index(&pol.m_coords.to_q()).unwrap();
        assert_eq!(idx, BigInt::from(16));
    }

    #[test]
    fn construction_i_k1_is_n_half() {
        let l = build_e8().unwrap();
        let space = F2QuadSpace::from_lattice(&l).unwrap();
        let (u, v) = space.isotropic_complement_pair(0).unwrap();
        let pol = preimages(&l, &space, &u, &v).unwrap();
        let (basis, lat) = construction_i(&pol, 1).unwrap();
        // k = 1: only y survives, the lattice is (N, Q/2)
        assert_eq!(basis.hnf().0, pol.n_coords.hnf().0);
        assert_eq!(lat.gram, pol.n_half().gram);
        assert!(lat.is_even() && lat.is_unimodular());
    }

    #[test]
    fn construction_i_k3_on_e8_structure() {
        let l = build_e8().unwrap();
        let sp = find_structure(&l, 50_000_000, 7).unwrap();
        let pol = polarization_from_structure(&l, &sp).unwrap();
        let (_, lat) = construction_i(&pol, 3).unwrap();
        assert_eq!(lat.rank, 24);
        assert!(lat.is_even());
        assert!(lat.is_unimodular());
        let min = minimum(&lat).unwrap();
        // 24-dimensional even unimodular: minimum is 2 or 4
        assert!(min == rat(2) || min == rat(4), "min = {min}");
    }

    #[test]
    fn neighbor_of_doubled_square_lattice() {
        // M = 2 Z^2 inside Z^2, w = (1,1): the checkerboard neighbor
        let l = IntegerLattice::new(QMat::identity(2), "Z2").unwrap();
        let m = ZMat::identity(2).scale(&BigInt::from(2));
        let step = neighbor_2(&l, &m, &zvec(&[1, 1])).unwrap();
        assert_eq!(step.lattice.det(), rat(4));
        assert!(step.lattice.is_even());
        assert_eq!(minimum(&step.lattice).unwrap(), rat(2));
        // all of M pairs evenly with w here, so M_w = M and [M^w : M] = 2
        assert_eq!(step.index_down, BigInt::one());
        assert_eq!(step.index_up, BigInt::from(2));
    }

    #[test]
    fn neighbor_rejects_w_in_m() {
        let l = IntegerLattice::new(QMat::identity(2), "Z2").unwrap();
        let m = ZMat::identity(2).scale(&BigInt::from(2));
        assert!(matches!(
            neighbor_2(&l, &m, &zvec(&[2, 0])),
            Err(Error::WNotAdmissible(_))
        ));
    }
}

//! Z[a]-structures on integer lattices.
//!
//! A structure on an even lattice with Gram F is an integral matrix A acting
//! as multiplication by a (on the right), characterized by A F A^T = 2F and
//! F A^T = (1 - A) F. Equivalently S = 2A - 1 is an integral F-skew-adjoint
//! square root of -7 congruent to the identity mod 2; the search for
//! structures works in that reformulation, where q(S) = -trace(S^2) is a
//! positive definite form on the skew-adjoint module and solutions live on
//! the sphere q = 7n.

use crate::enumerate::{rat, EnumOptions, Prepared};
use crate::error::{Error, Result};
use crate::f2::{bv_get, bv_set, bv_zero, solve_f2, BitVec};
use crate::hermitian::{recover_h, trace_lattice, HermitianLattice};
use crate::lattice::{read_matrix, IntegerLattice};
use crate::linalg::{QMat, ZMat};
use crate::reduce::Quality;
use crate::zalpha::{gcd, AMat, QAlpha, ZAlpha};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::io::BufRead;

#[derive(Clone, Debug, PartialEq)]
pub struct StructurePair {
    pub f: ZMat,
    pub a: ZMat,
}

impl StructurePair {
    pub fn new(f: ZMat, a: ZMat) -> Result<Self> {
        let sp = StructurePair { f, a };
        sp.validate()?;
        Ok(sp)
    }

    pub fn n(&self) -> usize {
        self.f.rows
    }

    /// B = 1 - A, the matrix of multiplication by conj(a).
    pub fn b(&self) -> ZMat {
        let n = self.n();
        ZMat::from_fn(n, n, |i, j| {
            let id = BigInt::from((i == j) as i64);
            id - self.a.at(i, j)
        })
    }

    /// All three defining identities, checked exactly.
    pub fn validate(&self) -> Result<()> {
        let n = self.f.rows;
        if self.f.cols != n || self.a.rows != n || self.a.cols != n {
            return Err(Error::DimensionMismatch("F and A must be square of equal size".into()));
        }
        if n % 2 != 0 {
            return Err(Error::DimensionMismatch("structures need even dimension".into()));
        }
        if !self.f.to_q().is_symmetric() {
            return Err(Error::InvariantFailure("F is not symmetric".into()));
        }
        let two_f = self.f.scale(&BigInt::from(2));
        if self.a.mul(&self.f).mul(&self.a.transpose()) != two_f {
            return Err(Error::InvariantFailure("A F A^T != 2F".into()));
        }
        // F A^T = (1 - A) F, the F-adjoint condition without inverting F.
        if self.f.mul(&self.a.transpose()) != self.b().mul(&self.f) {
            return Err(Error::InvariantFailure("F A^T F^{-1} != 1 - A".into()));
        }
        // a^2 = a - 2 transported through A; implied, checked independently.
        let lhs = self.a.mul(&self.a);
        let rhs = ZMat::from_fn(n, n, |i, j| {
            self.a.at(i, j) - BigInt::from(2 * ((i == j) as i64))
        });
        if lhs != rhs {
            return Err(Error::InvariantFailure("A^2 - A + 2 != 0".into()));
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    /// Structure file: Gram, a line "STRUCTURE", then the A matrix.
    pub fn write<W: std::io::Write>(&self, w: &mut W) -> Result<()> {
        let lat = IntegerLattice::new(self.f.to_q(), "F")?;
        lat.write_gram(w)?;
        writeln!(w, "STRUCTURE")?;
        writeln!(w, "{}", self.n())?;
        for i in 0..self.n() {
            let line: Vec<String> = (0..self.n()).map(|j| self.a.at(i, j).to_string()).collect();
            writeln!(w, "{}", line.join(" "))?;
        }
        Ok(())
    }

    /// Loads and re-validates; structure files are untrusted input.
    pub fn read<R: BufRead>(r: &mut R) -> Result<Self> {
        let f = read_matrix(r)?.to_z()?;
        let mut line = String::new();
        loop {
            line.clear();
            if r.read_line(&mut line)? == 0 {
                return Err(Error::Parse("missing STRUCTURE separator".into()));
            }
            match line.trim() {
                "" => continue,
                "STRUCTURE" => break,
                other => {
                    return Err(Error::Parse(format!("expected STRUCTURE, found '{other}'")))
                }
            }
        }
        let a = read_matrix(r)?.to_z()?;
        StructurePair::new(f, a)
    }
}

/// Multiplication-by-a on the interleaved trace basis (b_i, a b_i): block
/// diagonal companion matrices [[0,1],[-2,1]].
pub fn companion_alpha(rank: usize) -> ZMat {
    let n = 2 * rank;
    ZMat::from_fn(n, n, |i, j| {
        let (bi, x) = (i / 2, i % 2);
        let (bj, y) = (j / 2, j % 2);
        if bi != bj {
            return BigInt::zero();
        }
        let v: i64 = match (x, y) {
            (0, 1) => 1,  // a * b = (a b)
            (1, 0) => -2, // a * (a b) = -2 b + (a b)
            (1, 1) => 1,
            _ => 0,
        };
        BigInt::from(v)
    })
}

/// Trace lattice plus its canonical structure pair.
pub fn structure_from_hermitian(
    p: &HermitianLattice,
    s: &BigRational,
) -> Result<(IntegerLattice, StructurePair)> {
    let l = trace_lattice(p, s, true)?;
    let f = l.gram.to_z()?;
    let sp = StructurePair::new(f, companion_alpha(p.rank))?;
    Ok((l, sp))
}

/// Selects a free Z[a]-basis for Z^n under the action A: returns r = n/2
/// rows p_i such that the interleaved rows (p_1, p_1 A, p_2, p_2 A, ...)
/// form a Z-basis (determinant +-1, verified).
pub fn zalpha_free_basis(a: &ZMat) -> Result<ZMat> {
    let n = a.rows;
    if n == 0 {
        return Ok(ZMat::zero(0, 0));
    }
    if n % 2 != 0 {
        return Err(Error::Precondition("odd rank cannot be a Z[a]-module".into()));
    }
    // Saturation of span{e_0, e_0 A} via a double kernel.
    let e0: Vec<BigInt> = (0..n).map(|j| BigInt::from((j == 0) as i64)).collect();
    let e0a = a.vec_mul(&e0);
    let span = ZMat::from_rows(vec![e0.clone(), e0a.clone()]);
    let perp = span.transpose().left_kernel();
    let sat = perp.transpose().left_kernel();
    if sat.rows != 2 {
        return Err(Error::NoFreeBasis(format!("saturation has rank {}", sat.rows)));
    }
    let u1: Vec<BigInt> = sat.row(0).to_vec();
    let u2: Vec<BigInt> = sat.row(1).to_vec();
    let u1a = a.vec_mul(&u1);
    // u2 = c u1 + d (u1 A) over Q.
    let (c, d) = solve_pair(&u1, &u1a, &u2)?;
    // The coefficient module {m : m u1 in Sat} is the fractional ideal
    // generated by 1 and c + d a; its generator scales u1 to a module
    // generator of Sat.
    let qden = num_integer::lcm(c.denom().clone(), d.denom().clone());
    let g1 = ZAlpha::new(qden.clone(), BigInt::zero());
    let g2 = ZAlpha::new((&c * BigRational::from_integer(qden.clone())).to_integer(),
                         (&d * BigRational::from_integer(qden.clone())).to_integer());
    let g0 = gcd(&g1, &g2);
    let mu = QAlpha::new(
        BigRational::new(g0.x.clone(), qden.clone()),
        BigRational::new(g0.y.clone(), qden.clone()),
    );
    let p1: Vec<BigInt> = (0..n)
        .map(|j| {
            let v = &mu.x * BigRational::from_integer(u1[j].clone())
                + &mu.y * BigRational::from_integer(u1a[j].clone());
            if !v.is_integer() {
                return Err(Error::NoFreeBasis("module generator is not integral".into()));
            }
            Ok(v.to_integer())
        })
        .collect::<Result<_>>()?;
    let p1a = a.vec_mul(&p1);
    // {p1, p1 A} must be a Z-basis of Sat = Z u1 + Z u2.
    let (cc, dd) = solve_pair(&u1, &u2, &p1)?;
    let (ec, ed) = solve_pair(&u1, &u2, &p1a)?;
    let det = (&cc * &ed - &dd * &ec).abs();
    if det != BigRational::one() {
        return Err(Error::NoFreeBasis(format!(
            "module generator has index {det} in its saturation"
        )));
    }
    // Complete (p1, p1 A) to a unimodular frame.
    let m2 = ZMat::from_rows(vec![p1.clone(), p1a.clone()]);
    let (h, u, rank) = m2.transpose().hnf_with_transform();
    if rank != 2 || h.at(0, 0) != &BigInt::one() || h.at(1, 1) != &BigInt::one() {
        return Err(Error::NoFreeBasis("generator pair is not primitive".into()));
    }
    let vframe = u.to_q().inverse()?.transpose().to_z()?;
    // By construction the first two frame rows are p1 and p1 A.
    if vframe.row(0) != &p1[..] || vframe.row(1) != &p1a[..] {
        return Err(Error::NoFreeBasis("frame completion lost the generator pair".into()));
    }
    let vinv = vframe.to_q().inverse()?;
    let a_v = vframe.to_q().mul(&a.to_q()).mul(&vinv).to_z().map_err(|_| {
        Error::NoFreeBasis("conjugated action is not integral".into())
    })?;
    for i in 0..2 {
        for j in 2..n {
            if !a_v.at(i, j).is_zero() {
                return Err(Error::NoFreeBasis("saturation is not A-invariant".into()));
            }
        }
    }
    let a22 = ZMat::from_fn(n - 2, n - 2, |i, j| a_v.at(i + 2, j + 2).clone());
    let rest = zalpha_free_basis(&a22)?;
    let mut rows: Vec<Vec<BigInt>> = vec![p1];
    for i in 0..rest.rows {
        // lift quotient coordinates through the frame
        let mut full = vec![BigInt::zero(); n];
        for j in 0..n - 2 {
            full[j + 2] = rest.at(i, j).clone();
        }
        rows.push(vframe.to_q().vec_mul(
            &full.iter().map(|v| BigRational::from_integer(v.clone())).collect::<Vec<_>>(),
        )
        .into_iter()
        .map(|v| v.to_integer())
        .collect());
    }
    Ok(ZMat::from_rows(rows))
}

/// Solve target = c * u + d * v over Q for vectors u, v of full rank 2.
fn solve_pair(
    u: &[BigInt],
    v: &[BigInt],
    target: &[BigInt],
) -> Result<(BigRational, BigRational)> {
    let n = u.len();
    for j1 in 0..n {
        for j2 in j1 + 1..n {
            let det = &u[j1] * &v[j2] - &u[j2] * &v[j1];
            if det.is_zero() {
                continue;
            }
            let detq = BigRational::from_integer(det);
            let c = BigRational::from_integer(&target[j1] * &v[j2] - &target[j2] * &v[j1]) / &detq;
            let d = BigRational::from_integer(&u[j1] * &target[j2] - &u[j2] * &target[j1]) / &detq;
            // verify on all coordinates
            for k in 0..n {
                let lhs = BigRational::from_integer(target[k].clone());
                let rhs = &c * BigRational::from_integer(u[k].clone())
                    + &d * BigRational::from_integer(v[k].clone());
                if lhs != rhs {
                    return Err(Error::NoFreeBasis(
                        "vector is outside the rank-2 module".into(),
                    ));
                }
            }
            return Ok((c, d));
        }
    }
    Err(Error::NoFreeBasis("degenerate rank-2 module".into()))
}

/// Interleave basis rows with their A-images: (p_1, p_1 A, p_2, p_2 A, ...).
pub fn interleave_with_action(basis: &ZMat, a: &ZMat) -> ZMat {
    let r = basis.rows;
    let n = basis.cols;
    let mut rows = Vec::with_capacity(2 * r);
    for i in 0..r {
        let p: Vec<BigInt> = basis.row(i).to_vec();
        let pa = a.vec_mul(&p);
        rows.push(p);
        rows.push(pa);
    }
    let _ = n;
    ZMat::from_rows(rows)
}

/// Reconstruct the Hermitian lattice of a structure at scale s, together
/// with the interleaved Z-basis change T (rows in L's coordinates) that
/// exhibits the round trip trace_lattice(result, s) = T F T^T.
pub fn hermitian_from_structure(
    l: &IntegerLattice,
    sp: &StructurePair,
    s: &BigRational,
) -> Result<(HermitianLattice, ZMat)> {
    sp.validate()?;
    let f_of_l = l.gram.to_z()?;
    if f_of_l != sp.f {
        return Err(Error::Precondition("structure Gram differs from the lattice Gram".into()));
    }
    let basis = zalpha_free_basis(&sp.a)?;
    let r = basis.rows;
    let t = interleave_with_action(&basis, &sp.a);
    let det = t.det_bareiss();
    if det.clone().abs() != BigInt::one() {
        return Err(Error::NoFreeBasis(format!("interleaved basis has determinant {det}")));
    }
    let fq = sp.f.to_q();
    let aq = sp.a.to_q();
    let h = AMat::from_fn(r, r, |i, j| {
        let pi: Vec<BigRational> =
            basis.row(i).iter().map(|v| BigRational::from_integer(v.clone())).collect();
        let pj: Vec<BigRational> =
            basis.row(j).iter().map(|v| BigRational::from_integer(v.clone())).collect();
        let fpj = fq.vec_mul(&pj); // p_j * F (symmetric form)
        let xy: BigRational = pi.iter().zip(&fpj).map(|(a, b)| a * b).sum();
        let pja = aq.vec_mul(&pj); // p_j * A
        let fpja = fq.vec_mul(&pja);
        let x_ay: BigRational = pi.iter().zip(&fpja).map(|(a, b)| a * b).sum();
        recover_h(&xy, &x_ay, s)
    });
    let herm = HermitianLattice::new(h, format!("{}[a]", l.label))?;
    // Round trip: the trace Gram must equal T F T^T exactly.
    let lhs = herm.trace_gram(s);
    let rhs = t.to_q().mul(&fq).mul(&t.to_q().transpose());
    if lhs != rhs {
        return Err(Error::InvariantFailure(
            "hermitian reconstruction failed its trace round-trip".into(),
        ));
    }
    Ok((herm, t))
}

/// Basis matrices of the module { S integral : S F skew-symmetric }.
fn skew_adjoint_module(f: &ZMat) -> Vec<ZMat> {
    let n = f.rows;
    let ncols = n * (n + 1) / 2;
    // rows: variables S_pq; cols: equations (i <= j) of S F + F S^T = 0.
    let mut m = ZMat::zero(n * n, ncols);
    let mut colidx = vec![vec![0usize; n]; n];
    {
        let mut c = 0;
        for i in 0..n {
            for j in i..n {
                colidx[i][j] = c;
                c += 1;
            }
        }
    }
    for p in 0..n {
        for q in 0..n {
            let var = p * n + q;
            for i in 0..n {
                for j in i..n {
                    // coefficient of S_pq in (S F)_{ij} + (S F)_{ji}
                    let mut coeff = BigInt::zero();
                    if i == p {
                        coeff += f.at(q, j);
                    }
                    if j == p {
                        coeff += f.at(q, i);
                    }
                    if !coeff.is_zero() {
                        m.set(var, colidx[i][j], coeff);
                    }
                }
            }
        }
    }
    let kernel = m.left_kernel();
    (0..kernel.rows)
        .map(|k| ZMat::from_fn(n, n, |i, j| kernel.at(k, i * n + j).clone()))
        .collect()
}

/// Same module intersected with the commutant of g.
fn skew_adjoint_commuting(f: &ZMat, g: &ZMat) -> Vec<ZMat> {
    let n = f.rows;
    let base_cols = n * (n + 1) / 2;
    let ncols = base_cols + n * n;
    let mut m = ZMat::zero(n * n, ncols);
    // skew-adjoint part
    let mut colidx = vec![vec![0usize; n]; n];
    {
        let mut c = 0;
        for i in 0..n {
            for j in i..n {
                colidx[i][j] = c;
                c += 1;
            }
        }
    }
    for p in 0..n {
        for q in 0..n {
            let var = p * n + q;
            for i in 0..n {
                for j in i..n {
                    let mut coeff = BigInt::zero();
                    if i == p {
                        coeff += f.at(q, j);
                    }
                    if j == p {
                        coeff += f.at(q, i);
                    }
                    if !coeff.is_zero() {
                        m.set(var, colidx[i][j], coeff);
                    }
                }
            }
            // commutator (S g - g S)_{ij}: coeff delta_{ip} g_{qj} - g_{ip} delta_{jq}
            for i in 0..n {
                for j in 0..n {
                    let mut coeff = BigInt::zero();
                    if i == p {
                        coeff += g.at(q, j);
                    }
                    if j == q {
                        coeff -= g.at(i, p);
                    }
                    if !coeff.is_zero() {
                        m.set(var, base_cols + i * n + j, coeff);
                    }
                }
            }
        }
    }
    let kernel = m.left_kernel();
    (0..kernel.rows)
        .map(|k| ZMat::from_fn(n, n, |i, j| kernel.at(k, i * n + j).clone()))
        .collect()
}

fn neg_trace_product(a: &ZMat, b: &ZMat) -> BigInt {
    let n = a.rows;
    let mut acc = BigInt::zero();
    for i in 0..n {
        for k in 0..n {
            acc += a.at(i, k) * b.at(k, i);
        }
    }
    -acc
}

/// Search the coset {S = S0 + 2V : q(S) = 7n} for a square root of -7.
fn search_coset(
    vbasis: &[ZMat],
    s0_coords: &[BigInt],
    f: &ZMat,
    budget: u64,
) -> Result<Option<StructurePair>> {
    let n = f.rows;
    let m = vbasis.len();
    let gram_v = QMat::from_fn(m, m, |k, l| {
        BigRational::from_integer(neg_trace_product(&vbasis[k], &vbasis[l]))
    });
    // lattice 2V has Gram 4 G_V; coset target is S0/2 in its coordinates.
    let four = rat(4);
    let lat = IntegerLattice::new(gram_v.scale(&four), "skew-module")?;
    let prep = Prepared::new(&lat, Quality::Deep)?;
    let t: Vec<BigRational> = s0_coords
        .iter()
        .map(|c| BigRational::new(c.clone(), BigInt::from(2)))
        .collect();
    let bound = rat(7 * n as i64);
    let rep = prep.coset_short_vectors(
        &t,
        &bound,
        &EnumOptions { budget: Some(budget), collect: true, ..Default::default() },
    )?;
    let complete = rep.complete;
    if let Some(vectors) = rep.vectors {
        for v in vectors {
            if v.norm != bound {
                continue;
            }
            // S = sum (s0 + 2x)_k V_k
            let mut s = ZMat::zero(n, n);
            for k in 0..m {
                let coeff = &s0_coords[k] + BigInt::from(2) * &v.coords[k];
                if coeff.is_zero() {
                    continue;
                }
                for i in 0..n {
                    for j in 0..n {
                        let val = s.at(i, j) + &coeff * vbasis[k].at(i, j);
                        s.set(i, j, val);
                    }
                }
            }
            // S^2 = -7?
            let s2 = s.mul(&s);
            let minus7 = ZMat::from_fn(n, n, |i, j| BigInt::from(-7 * ((i == j) as i64)));
            if s2 != minus7 {
                continue;
            }
            let a = ZMat::from_fn(n, n, |i, j| {
                (s.at(i, j) + BigInt::from((i == j) as i64)) / BigInt::from(2)
            });
            if let Ok(sp) = StructurePair::new(f.clone(), a) {
                return Ok(Some(sp));
            }
        }
    }
    if complete {
        Ok(None)
    } else {
        Err(Error::BudgetExceeded { nodes: budget })
    }
}

/// Coordinates of a solution of sum x_k V_k = Id (mod 2), if one exists.
fn odd_coset_coords(vbasis: &[ZMat], n: usize) -> Option<Vec<BigInt>> {
    let nbits = n * n;
    let rows: Vec<BitVec> = vbasis
        .iter()
        .map(|vk| {
            let mut row = bv_zero(nbits);
            for i in 0..n {
                for j in 0..n {
                    if vk.at(i, j).clone() % BigInt::from(2) != BigInt::zero() {
                        bv_set(&mut row, i * n + j, true);
                    }
                }
            }
            row
        })
        .collect();
    let mut rhs = bv_zero(nbits);
    for i in 0..n {
        bv_set(&mut rhs, i * n + i, true);
    }
    let x = solve_f2(&rows, &rhs, nbits)?;
    Some((0..vbasis.len()).map(|k| BigInt::from(bv_get(&x, k) as i64)).collect())
}

/// Reflections in the roots (norm-2 vectors) of a lattice; empty when the
/// lattice has no roots.
fn root_reflections(l: &IntegerLattice) -> Result<Vec<ZMat>> {
    let prep = Prepared::new(l, Quality::Lll)?;
    let rep = prep
        .short_vectors(&rat(2), &EnumOptions { collect: true, ..Default::default() })?
        .require_complete()?;
    let n = l.rank;
    let fz = l.gram.to_z()?;
    Ok(rep
        .vectors
        .unwrap_or_default()
        .into_iter()
        .map(|v| {
            let fv = fz.vec_mul(&v.coords); // F v (symmetric, row form)
            ZMat::from_fn(n, n, |i, j| {
                let id = BigInt::from((i == j) as i64);
                id - &fv[i] * &v.coords[j]
            })
        })
        .collect())
}

fn matrix_order(g: &ZMat, cap: usize) -> Option<usize> {
    let n = g.rows;
    let id = ZMat::identity(n);
    let mut p = g.clone();
    for k in 1..=cap {
        if p == id {
            return Some(k);
        }
        p = p.mul(g);
    }
    None
}

fn matrix_pow(g: &ZMat, e: usize) -> ZMat {
    let mut out = ZMat::identity(g.rows);
    for _ in 0..e {
        out = out.mul(g);
    }
    out
}

/// Search for a Z[a]-structure on an even lattice of odd determinant.
///
/// Strategy: the skew-adjoint module is computed exactly; in small rank the
/// odd coset is enumerated outright, otherwise the search is restricted to
/// the commutant of a random order-7 isometry built from root reflections
/// (all order-7 subgroups of the isometry group are conjugate, so when an
/// equivariant structure exists at all this slice contains one).
pub fn find_structure(l: &IntegerLattice, budget: u64, seed: u64) -> Result<StructurePair> {
    let n = l.rank;
    if n % 2 != 0 {
        return Err(Error::Precondition("rank must be even".into()));
    }
    if !l.is_even() {
        return Err(Error::Precondition("lattice must be even".into()));
    }
    let det = l.det();
    if !det.is_integer() || (det.to_integer() % BigInt::from(2)).is_zero() {
        return Err(Error::Precondition("determinant must be odd".into()));
    }
    let f = l.gram.to_z()?;
    let full = skew_adjoint_module(&f);
    if full.is_empty() {
        return Err(Error::NotFound("skew-adjoint module is trivial".into()));
    }
    if full.len() <= 16 {
        let Some(s0) = odd_coset_coords(&full, n) else {
            return Err(Error::NotFound("no odd element in the skew-adjoint module".into()));
        };
        if let Some(sp) = search_coset(&full, &s0, &f, budget)? {
            return Ok(sp);
        }
        return Err(Error::NotFound("no square root of -7 on the coset sphere".into()));
    }
    // Equivariant slices: restrict to the commutant of an order-7 isometry
    // sampled from the root reflection group.
    let reflections = root_reflections(l)?;
    if reflections.is_empty() {
        return Err(Error::NotFound(
            "lattice has no roots; no equivariant slice available at this size".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _attempt in 0..800 {
        let mut g = ZMat::identity(n);
        for _ in 0..rng.gen_range(3..8) {
            g = g.mul(&reflections[rng.gen_range(0..reflections.len())]);
        }
        let Some(order) = matrix_order(&g, 60) else { continue };
        if order % 7 != 0 {
            continue;
        }
        let g7 = matrix_pow(&g, order / 7);
        let slice = skew_adjoint_commuting(&f, &g7);
        if slice.is_empty() || slice.len() > 16 {
            continue;
        }
        let Some(s0) = odd_coset_coords(&slice, n) else { continue };
        match search_coset(&slice, &s0, &f, budget) {
            Ok(Some(sp)) => return Ok(sp),
            Ok(None) => continue,
            Err(Error::BudgetExceeded { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::NotFound("structure search budget exhausted".into()))
}

/// Find an integral Y with Y F Y^T = F and Y A Y^{-1} = 1 - A by
/// backtracking over short-vector images (small dimensions only; larger
/// pairs need an external witness, validated by `validate_galois_witness`).
pub fn find_galois_isometry(
    sp: &StructurePair,
    budget: u64,
    witness: Option<&ZMat>,
) -> Result<ZMat> {
    if let Some(y) = witness {
        validate_galois_witness(sp, y)?;
        return Ok(y.clone());
    }
    let n = sp.n();
    if n > 8 {
        return Err(Error::NotFound(
            "galois isometry search beyond dimension 8 needs a witness file".into(),
        ));
    }
    let l = IntegerLattice::new(sp.f.to_q(), "F")?;
    let prep = Prepared::new(&l, Quality::Lll)?;
    let maxdiag = (0..n).map(|i| sp.f.at(i, i).clone()).max().unwrap();
    let bound = BigRational::from_integer(maxdiag);
    let rep = prep
        .short_vectors(&bound, &EnumOptions { collect: true, ..Default::default() })?
        .require_complete()?;
    let mut cands: Vec<Vec<BigInt>> = Vec::new();
    for v in rep.vectors.unwrap() {
        cands.push(v.coords.clone());
        cands.push(v.coords.iter().map(|c| -c.clone()).collect());
    }
    let fz = &sp.f;
    let b = sp.b();
    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    let mut nodes = 0u64;
    fn backtrack(
        rows: &mut Vec<Vec<BigInt>>,
        cands: &[Vec<BigInt>],
        fz: &ZMat,
        a: &ZMat,
        b: &ZMat,
        n: usize,
        nodes: &mut u64,
        budget: u64,
    ) -> Option<ZMat> {
        let i = rows.len();
        if i == n {
            let y = ZMat::from_rows(rows.clone());
            // Gram conditions hold by construction; check the conjugation.
            if y.mul(a) == b.mul(&y) {
                return Some(y);
            }
            return None;
        }
        for c in cands {
            *nodes += 1;
            if *nodes > budget {
                return None;
            }
            // (y_i, y_j) = F_ij for j <= i
            let fc = fz.vec_mul(c);
            let self_norm: BigInt = c.iter().zip(&fc).map(|(x, y)| x * y).sum();
            if &self_norm != fz.at(i, i) {
                continue;
            }
            let mut ok = true;
            for (j, prev) in rows.iter().enumerate() {
                let ip: BigInt = prev.iter().zip(&fc).map(|(x, y)| x * y).sum();
                if &ip != fz.at(i, j) {
                    ok = false;
                    break;
                }
            }
            if !ok {
                continue;
            }
            rows.push(c.clone());
            if let Some(y) = backtrack(rows, cands, fz, a, b, n, nodes, budget) {
                return Some(y);
            }
            rows.pop();
        }
        None
    }
    match backtrack(&mut rows, &cands, fz, &sp.a, &b, n, &mut nodes, budget) {
        Some(y) => Ok(y),
        None if nodes > budget => Err(Error::NotFound("galois search budget exhausted".into())),
        None => Err(Error::NotFound("no galois isometry exists for this pair".into())),
    }
}

pub fn validate_galois_witness(sp: &StructurePair, y: &ZMat) -> Result<()> {
    let n = sp.n();
    if y.rows != n || y.cols != n {
        return Err(Error::InvalidWitness("wrong dimensions".into()));
    }
    if y.mul(&sp.f).mul(&y.transpose()) != sp.f {
        return Err(Error::InvalidWitness("Y F Y^T != F".into()));
    }
    if y.mul(&sp.a) != sp.b().mul(y) {
        return Err(Error::InvalidWitness("Y A != (1-A) Y".into()));
    }
    Ok(())
}

/// The 3x3 block matrix [[Y,-Y,AY],[0,-BY,Y],[-AY,0,Y]] on the ambient
/// triple-lattice coordinates; it must preserve the Gram of the tensor
/// lattice spanned by the rows of [[1,1,A],[0,B,B],[0,0,2]].
pub fn build_galois_block(sp: &StructurePair, y: &ZMat) -> Result<ZMat> {
    validate_galois_witness(sp, y)?;
    let n = sp.n();
    let a = &sp.a;
    let b = sp.b();
    let ay = a.mul(y);
    let by = b.mul(y);
    let zero = ZMat::zero(n, n);
    let neg = |m: &ZMat| ZMat::from_fn(n, n, |i, j| -m.at(i, j).clone());
    let negy = neg(y);
    let negby = neg(&by);
    let negay = neg(&ay);
    let blocks: [[&ZMat; 3]; 3] =
        [[y, &negy, &ay], [&zero, &negby, y], [&negay, &zero, y]];
    let big = ZMat::from_fn(3 * n, 3 * n, |i, j| {
        blocks[i / n][j / n].at(i % n, j % n).clone()
    });
    // Gram of the tensor lattice in its T-basis and the preservation check.
    let t = tensor_block_basis(sp);
    let phi = ZMat::from_fn(3 * n, 3 * n, |i, j| {
        if i / n == j / n {
            sp.f.at(i % n, j % n).clone()
        } else {
            BigInt::zero()
        }
    });
    let gamma_gram = t.mul(&phi).mul(&t.transpose()); // twice the actual Gram
    if big.mul(&gamma_gram).mul(&big.transpose()) != gamma_gram {
        return Err(Error::InvalidWitness(
            "block matrix does not preserve the tensor lattice Gram".into(),
        ));
    }
    Ok(big)
}

/// Rows of the block basis [[1,1,A],[0,B,B],[0,0,2]] over the ambient
/// triple lattice.
pub fn tensor_block_basis(sp: &StructurePair) -> ZMat {
    let n = sp.n();
    let b = sp.b();
    ZMat::from_fn(3 * n, 3 * n, |i, j| {
        let (bi, bj) = (i / n, j / n);
        let (ri, rj) = (i % n, j % n);
        let id = BigInt::from((ri == rj) as i64);
        match (bi, bj) {
            (0, 0) | (0, 1) => id,
            (0, 2) => sp.a.at(ri, rj).clone(),
            (1, 1) | (1, 2) => b.at(ri, rj).clone(),
            (2, 2) => BigInt::from(2) * id,
            _ => BigInt::zero(),
        }
    })
}

/// Alternative generator block [[A,A,A],[B,B,0],[0,B,B]]; spans the same
/// lattice as `tensor_block_basis` (verified in tests).
pub fn tensor_block_basis_alt(sp: &StructurePair) -> ZMat {
    let n = sp.n();
    let b = sp.b();
    ZMat::from_fn(3 * n, 3 * n, |i, j| {
        let (bi, bj) = (i / n, j / n);
        let (ri, rj) = (i % n, j % n);
        match (bi, bj) {
            (0, _) => sp.a.at(ri, rj).clone(),
            (1, 0) | (1, 1) => b.at(ri, rj).clone(),
            (2, 1) | (2, 2) => b.at(ri, rj).clone(),
            _ => BigInt::zero(),
        }
    })
}

/// All Z[a]-linear isometries of a Hermitian lattice of rank <= 4, by
/// backtracking over the short vectors of its trace lattice. Returns the
/// exact group order together with the elements (each a rank x rank matrix
/// over Z[a] whose rows are the images of the basis).
pub fn hermitian_automorphisms(
    p: &HermitianLattice,
    budget: u64,
) -> Result<(u64, Vec<AMat>)> {
    const MAX_RANK: usize = 4;
    if p.rank > MAX_RANK {
        return Err(Error::RankTooLarge(p.rank, MAX_RANK));
    }
    let trace = trace_lattice(p, &BigRational::one(), false)?;
    let prep = Prepared::new(&trace, Quality::Lll)?;
    // image of b_i must have h(u,u) = H_ii, i.e. trace norm 2 H_ii
    let two = BigRational::from_integer(BigInt::from(2));
    let needed: Vec<BigRational> = (0..p.rank).map(|i| &p.hgram.at(i, i).x * &two).collect();
    let bound = needed.iter().cloned().fold(BigRational::zero(), |a, b| a.max(b));
    let rep = prep
        .short_vectors(&bound, &EnumOptions { collect: true, ..Default::default() })?
        .require_complete()?;
    let mut cands: Vec<Vec<QAlpha>> = Vec::new();
    for v in rep.vectors.unwrap() {
        let row: Vec<QAlpha> = (0..p.rank)
            .map(|j| {
                ZAlpha::new(v.coords[2 * j].clone(), v.coords[2 * j + 1].clone()).to_q()
            })
            .collect();
        let neg: Vec<QAlpha> = row.iter().map(|x| -x.clone()).collect();
        cands.push(row);
        cands.push(neg);
    }
    let h_of = |u: &[QAlpha], v: &[QAlpha]| -> QAlpha {
        let mut acc = QAlpha::zero();
        for (j, uj) in u.iter().enumerate() {
            for (k, vk) in v.iter().enumerate() {
                acc = acc + uj.clone() * vk.conj() * p.hgram.at(j, k).clone();
            }
        }
        acc
    };
    let mut elements: Vec<AMat> = Vec::new();
    let mut stack: Vec<Vec<QAlpha>> = Vec::new();
    let mut nodes = 0u64;
    fn backtrack(
        stack: &mut Vec<Vec<QAlpha>>,
        cands: &[Vec<QAlpha>],
        p: &HermitianLattice,
        h_of: &dyn Fn(&[QAlpha], &[QAlpha]) -> QAlpha,
        elements: &mut Vec<AMat>,
        nodes: &mut u64,
        budget: u64,
    ) -> Result<()> {
        let i = stack.len();
        if i == p.rank {
            let rows: Vec<Vec<QAlpha>> = stack.clone();
            elements.push(AMat::from_rows(rows));
            return Ok(());
        }
        for c in cands {
            *nodes += 1;
            if *nodes > budget {
                return Err(Error::BudgetExceeded { nodes: budget });
            }
            if h_of(c, c) != *p.hgram.at(i, i) {
                continue;
            }
            let mut ok = true;
            for (j, prev) in stack.iter().enumerate() {
                if h_of(c, prev) != *p.hgram.at(i, j) {
                    ok = false;
                    break;
                }
            }
            if !ok {
                continue;
            }
            stack.push(c.clone());
            backtrack(stack, cands, p, h_of, elements, nodes, budget)?;
            stack.pop();
        }
        Ok(())
    }
    backtrack(&mut stack, &cands, p, &h_of, &mut elements, &mut nodes, budget)?;
    Ok((elements.len() as u64, elements))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::build_e8;
    use crate::hermitian::{barnes, hermitian_tensor};

    fn toy_pair() -> StructurePair {
        let f = ZMat::from_i64(&[vec![2, 1], vec![1, 4]]);
        let a = ZMat::from_i64(&[vec![0, 1], vec![-2, 1]]);
        StructurePair::new(f, a).unwrap()
    }

    #[test]
    fn toy_structure_validates() {
        let sp = toy_pair();
        assert!(sp.is_valid());
        // identity is not a structure
        let bad = StructurePair { f: sp.f.clone(), a: ZMat::identity(2) };
        assert!(!bad.is_valid());
    }

    #[test]
    fn structure_file_round_trip() {
        let sp = toy_pair();
        let mut buf = Vec::new();
        sp.write(&mut buf).unwrap();
        let mut cur = std::io::Cursor::new(buf);
        let sp2 = StructurePair::read(&mut cur).unwrap();
        assert_eq!(sp, sp2);
    }

    #[test]
    fn tampered_structure_file_is_rejected() {
        let sp = toy_pair();
        let mut buf = Vec::new();
        sp.write(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap().replace("-2", "-1");
        let mut cur = std::io::Cursor::new(text.into_bytes());
        assert!(StructurePair::read(&mut cur).is_err());
    }

    #[test]
    fn companion_matches_toy() {
        let sp = toy_pair();
        assert_eq!(companion_alpha(1), sp.a);
    }

    #[test]
    fn find_structure_on_toy_lattice() {
        let l = IntegerLattice::from_integer_gram(&[vec![2, 1], vec![1, 4]], "toy").unwrap();
        let sp = find_structure(&l, 1_000_000, 1).unwrap();
        assert!(sp.is_valid());
    }

    #[test]
    fn find_structure_rejects_odd_lattice() {
        let l = IntegerLattice::new(QMat::identity(2), "Z2").unwrap();
        assert!(matches!(find_structure(&l, 1000, 1), Err(Error::Precondition(_))));
    }

    #[test]
    fn hermitian_from_toy_structure_is_rank_one() {
        let sp = toy_pair();
        let l = IntegerLattice::new(sp.f.to_q(), "toy").unwrap();
        let (h, t) = hermitian_from_structure(&l, &sp, &BigRational::one()).unwrap();
        assert_eq!(h.rank, 1);
        assert_eq!(h.hgram, AMat::identity(1));
        assert_eq!(t.det_bareiss().abs(), BigInt::one());
    }

    #[test]
    fn galois_isometry_on_toy() {
        let sp = toy_pair();
        let y = find_galois_isometry(&sp, 100_000, None).unwrap();
        validate_galois_witness(&sp, &y).unwrap();
        // zero budget reports NotFound
        assert!(matches!(
            find_galois_isometry(&sp, 0, None),
            Err(Error::NotFound(_))
        ));
        // a broken witness is rejected
        assert!(matches!(
            find_galois_isometry(&sp, 10, Some(&ZMat::identity(2))),
            Err(Error::InvalidWitness(_))
        ));
    }

    #[test]
    fn galois_block_preserves_tensor_gram() {
        let sp = toy_pair();
        let y = find_galois_isometry(&sp, 100_000, None).unwrap();
        let big = build_galois_block(&sp, &y).unwrap();
        assert_eq!(big.rows, 6);
    }

    #[test]
    fn block_bases_span_the_same_lattice() {
        let sp = toy_pair();
        let t1 = tensor_block_basis(&sp);
        let t2 = tensor_block_basis_alt(&sp);
        assert_eq!(t1.hnf().0, t2.hnf().0);
    }

    #[test]
    fn barnes_automorphisms_number_336() {
        let p = barnes();
        let (order, elements) = hermitian_automorphisms(&p, 50_000_000).unwrap();
        assert_eq!(order, 336);
        assert_eq!(elements.len(), 336);
    }

    #[test]
    fn rank_one_automorphisms_are_units() {
        let p = HermitianLattice::new(AMat::identity(1), "unit").unwrap();
        let (order, _) = hermitian_automorphisms(&p, 100_000).unwrap();
        assert_eq!(order, 2);
    }

    #[test]
    fn rank_too_large_is_rejected() {
        let p = barnes();
        let t = hermitian_tensor(&p, &p).unwrap();
        assert!(matches!(
            hermitian_automorphisms(&t, 1000),
            Err(Error::RankTooLarge(9, 4))
        ));
    }

    #[test]
    fn e8_structure_found_and_reconstructs() {
        let l = build_e8().unwrap();
        let sp = find_structure(&l, 50_000_000, 7).unwrap();
        assert!(sp.is_valid());
        let seventh = BigRational::new(BigInt::one(), BigInt::from(7));
        let (h, _) = hermitian_from_structure(&l, &sp, &seventh).unwrap();
        assert_eq!(h.rank, 4);
        // the Hermitian Gram of a 1/7-scaled unimodular structure has det 49
        let d = h.hdet();
        assert_eq!(d, ZAlpha::from_i64(49, 0).to_q());
    }
}


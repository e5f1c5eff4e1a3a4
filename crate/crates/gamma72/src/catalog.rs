//! Built-in lattices with self-verifying constructors.
//!
//! Every builder validates its advertised invariants before returning, so a
//! corrupted data file or a broken construction can never hand out a lattice
//! silently. The Leech lattice comes from the binary Golay code; E8 from its
//! root basis.

use crate::enumerate::{rat, EnumOptions, Prepared};
use crate::error::{Error, Result};
use crate::golay;
use crate::lattice::{Ambient, IntegerLattice};
use crate::linalg::QMat;
use crate::reduce::Quality;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

/// The E8 root lattice on its standard root basis (Gram = Cartan matrix).
pub fn build_e8() -> Result<IntegerLattice> {
    let c: [[i64; 8]; 8] = [
        [2, -1, 0, 0, 0, 0, 0, 0],
        [-1, 2, -1, 0, 0, 0, 0, 0],
        [0, -1, 2, -1, 0, 0, 0, 0],
        [0, 0, -1, 2, -1, 0, 0, 0],
        [0, 0, 0, -1, 2, -1, 0, -1],
        [0, 0, 0, 0, -1, 2, -1, 0],
        [0, 0, 0, 0, 0, -1, 2, 0],
        [0, 0, 0, 0, -1, 0, 0, 2],
    ];
    let rows: Vec<Vec<i64>> = c.iter().map(|r| r.to_vec()).collect();
    let l = IntegerLattice::from_integer_gram(&rows, "E8")?;
    if !l.is_even() || !l.is_unimodular() {
        return Err(Error::SelfCheckFailed("E8 basis is not even unimodular".into()));
    }
    Ok(l)
}

/// The Leech lattice, built from the extended Golay code.
///
/// Generators live in Z^24 under the bilinear form (x, y)/8: twice the
/// lifted codewords, the all-fours sublattice with coordinate sum divisible
/// by 8, and the odd-frame vector (-3, 1, ..., 1). The constructor checks
/// determinant, evenness, unimodularity and minimum 4.
pub fn build_leech() -> Result<IntegerLattice> {
    let mut gens: Vec<Vec<BigRational>> = Vec::new();
    let push_row = |gens: &mut Vec<Vec<BigRational>>, row: [i64; 24]| {
        gens.push(row.iter().map(|&v| rat(v)).collect());
    };
    for g in golay::generators() {
        let mut row = [0i64; 24];
        for (i, r) in row.iter_mut().enumerate() {
            if g >> i & 1 == 1 {
                *r = 2;
            }
        }
        push_row(&mut gens, row);
    }
    for j in 1..24 {
        let mut row = [0i64; 24];
        row[0] = 4;
        row[j] = 4;
        push_row(&mut gens, row);
    }
    let mut row = [0i64; 24];
    row[0] = 8;
    push_row(&mut gens, row);
    let mut odd = [1i64; 24];
    odd[0] = -3;
    push_row(&mut gens, odd);

    let gen_mat = QMat::from_rows(gens);
    let basis = gen_mat.row_lattice_hnf();
    if basis.rows != 24 {
        return Err(Error::SelfCheckFailed(format!(
            "Leech generators span rank {} instead of 24",
            basis.rows
        )));
    }
    let eighth = BigRational::new(BigInt::one(), BigInt::from(8));
    let ambient_gram = QMat::identity(24).scale(&eighth);
    let gram = basis.mul(&ambient_gram).mul(&basis.transpose());
    let l = IntegerLattice::with_ambient(
        gram,
        Some(Ambient { basis, gram: ambient_gram }),
        "Leech",
    )?;
    verify_leech_invariants(&l)?;
    Ok(l)
}

fn verify_leech_invariants(l: &IntegerLattice) -> Result<()> {
    if !l.is_even() {
        return Err(Error::SelfCheckFailed("Leech candidate is not even".into()));
    }
    if !l.is_unimodular() {
        return Err(Error::SelfCheckFailed("Leech candidate is not unimodular".into()));
    }
    let p = Prepared::new(l, Quality::Lll)?;
    let min = p.minimum(&EnumOptions::default())?;
    if min != rat(4) {
        return Err(Error::SelfCheckFailed(format!("Leech candidate has minimum {min}")));
    }
    Ok(())
}

/// "Even unimodular of dimension 24 with minimum 4" pins the isometry class;
/// used by the structure search to recognize when a neighbor stays Leech.
pub fn is_leech_like(l: &IntegerLattice) -> Result<bool> {
    if l.rank != 24 || !l.is_even() || !l.is_unimodular() {
        return Ok(false);
    }
    let p = Prepared::new(l, Quality::Lll)?;
    Ok(p.minimum(&EnumOptions::default())? == rat(4))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn e8_is_even_unimodular_min2() {
        let l = build_e8().unwrap();
        assert!(l.is_even());
        assert!(l.is_unimodular());
        let p = Prepared::new(&l, Quality::Lll).unwrap();
        assert_eq!(p.minimum(&EnumOptions::default()).unwrap(), rat(2));
        let rep = p.short_vectors(&rat(2), &EnumOptions::default()).unwrap();
        assert_eq!(rep.count_at_int(2), 240);
    }

    #[test]
    fn leech_construction_passes_self_checks() {
        let l = build_leech().unwrap();
        assert_eq!(l.det(), BigRational::one());
        assert!(l.is_even());
    }

    #[test]
    fn dual_of_leech_is_unimodular_leech() {
        let l = build_leech().unwrap();
        let d = l.dual();
        assert!(d.is_unimodular());
        assert_eq!(d.det(), BigRational::one());
    }
}

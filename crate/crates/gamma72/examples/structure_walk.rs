//! Data-generation tool: random Kneser 2-neighbor walk over Z[a]-structures
//! on the Leech lattice, hunting for the one whose glued 72-dimensional
//! lattice has no vectors of norm 6.
//!
//! Starting from the tensor-product structure (Barnes x E8-structure, which
//! is Leech with a known alpha-action), each step picks a norm-16 vector v
//! outside 2L, passes to the module neighbor
//!     L' = {x : (x,v) and (x,vA) even} + Z[a] v/2,
//! keeps it when L' is again even unimodular with minimum 4, and re-expresses
//! the structure there. Candidates are screened by sampling census classes
//! for norm-6 contributions; a clean sample is confirmed by the full
//! 4095-class census before the structure file is written.
//!
//!     cargo run --release --example structure_walk -- <seed> <out.txt> [alt.txt]

use gamma72::catalog::build_e8;
use gamma72::census::{census_class, norm6_census, CensusContext};
use gamma72::enumerate::{rat, EnumOptions, Prepared};
use gamma72::hermitian::{barnes, hermitian_tensor};
use gamma72::lattice::IntegerLattice;
use gamma72::linalg::{QMat, ZMat};
use gamma72::polarization::polarization_from_structure;
use gamma72::reduce::{reduce_gram, Quality};
use gamma72::structure::{find_structure, hermitian_from_structure, structure_from_hermitian, StructurePair};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn seed_structure() -> (IntegerLattice, StructurePair) {
    let seventh = BigRational::new(BigInt::one(), BigInt::from(7));
    let e8 = build_e8().unwrap();
    let sp8 = find_structure(&e8, 100_000_000, 7).unwrap();
    let (p8, _) = hermitian_from_structure(&e8, &sp8, &seventh).unwrap();
    let r = hermitian_tensor(&barnes(), &p8).unwrap();
    structure_from_hermitian(&r, &seventh).unwrap()
}

/// LLL-reduce the pair so coordinates stay small along the walk.
fn reduce_pair(l: &IntegerLattice, sp: &StructurePair) -> (IntegerLattice, StructurePair) {
    let red = reduce_gram(&l.gram, Quality::Lll).unwrap();
    let t = red.transform.to_q();
    let tinv = t.inverse().unwrap();
    let a2 = t.mul(&sp.a.to_q()).mul(&tinv).to_z().unwrap();
    let f2 = red.gram.to_z().unwrap();
    let lat = IntegerLattice::new(red.gram, l.label.clone()).unwrap();
    (lat, StructurePair::new(f2, a2).unwrap())
}

/// One neighbor step at v (norm 16, not in 2L). Returns None when the
/// neighbor is not an even unimodular minimum-4 lattice.
fn neighbor_step(
    l: &IntegerLattice,
    sp: &StructurePair,
    v: &[i64],
) -> Option<(IntegerLattice, StructurePair)> {
    let n = l.rank;
    let fz = &sp.f;
    let vz: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
    let va = sp.a.vec_mul(&vz);
    let fv = fz.vec_mul(&vz);
    let fva = fz.vec_mul(&va);
    // Kernel of the two parity functionals x -> ((x,v), (x,vA)) mod 2.
    // Column i carries the bit pair; pick up to two independent pivot
    // columns and reduce the rest against them.
    let parity = |row: &[BigInt], rhs: &[BigInt]| -> bool {
        let ip: BigInt = row.iter().zip(rhs).map(|(a, b)| a * b).sum();
        !(ip % BigInt::from(2)).is_zero()
    };
    let e = |i: usize| -> Vec<BigInt> {
        (0..n).map(|j| BigInt::from((i == j) as i64)).collect()
    };
    let cols: Vec<(bool, bool)> =
        (0..n).map(|i| (parity(&e(i), &fv), parity(&e(i), &fva))).collect();
    let p1 = cols.iter().position(|&c| c != (false, false));
    let p2 = p1.and_then(|p1| {
        cols.iter()
            .enumerate()
            .position(|(i, &c)| i != p1 && c != (false, false) && c != cols[p1])
    });
    let combo = |target: (bool, bool)| -> (bool, bool) {
        // target = c1 * cols[p1] + c2 * cols[p2] over GF(2)
        for c1 in [false, true] {
            for c2 in [false, true] {
                let mut acc = (false, false);
                if c1 {
                    let p = cols[p1.unwrap()];
                    acc = (acc.0 ^ p.0, acc.1 ^ p.1);
                }
                if c2 {
                    if let Some(p2) = p2 {
                        let p = cols[p2];
                        acc = (acc.0 ^ p.0, acc.1 ^ p.1);
                    } else if c2 {
                        continue;
                    }
                }
                if acc == target {
                    return (c1, c2);
                }
            }
        }
        unreachable!("pivots span the image");
    };
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    for i in 0..n {
        if Some(i) == p1 || Some(i) == p2 {
            continue;
        }
        let mut r = e(i);
        if cols[i] != (false, false) {
            let (c1, c2) = combo(cols[i]);
            if c1 {
                for (x, y) in r.iter_mut().zip(e(p1.unwrap())) {
                    *x -= y;
                }
            }
            if c2 {
                for (x, y) in r.iter_mut().zip(e(p2.unwrap())) {
                    *x -= y;
                }
            }
        }
        rows.push(r.iter().map(|x| BigRational::from_integer(x.clone())).collect());
    }
    // doubled pivots stay in the sublattice
    for p in [p1, p2].into_iter().flatten() {
        rows.push(
            e(p).iter()
                .map(|x| BigRational::from_integer(x.clone() * BigInt::from(2)))
                .collect(),
        );
    }
    // adjoin v/2 and (vA)/2
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    rows.push(vz.iter().map(|x| BigRational::from_integer(x.clone()) * &half).collect());
    rows.push(va.iter().map(|x| BigRational::from_integer(x.clone()) * &half).collect());
    let gen = QMat::from_rows(rows);
    let basis = gen.row_lattice_hnf();
    if basis.rows != n {
        return None;
    }
    let gram = basis.mul(&l.gram).mul(&basis.transpose());
    if !gram.is_integral() {
        return None;
    }
    let lat = IntegerLattice::new(gram, "Leech'".to_string()).ok()?;
    if !lat.is_even() || !lat.is_unimodular() {
        return None;
    }
    // structure transported along the basis change
    let binv = basis.inverse().ok()?;
    let a2 = basis.mul(&sp.a.to_q()).mul(&binv).to_z().ok()?;
    let sp2 = StructurePair::new(lat.gram.to_z().ok()?, a2).ok()?;
    let (lat, sp2) = reduce_pair(&lat, &sp2);
    // minimum 4 keeps it Leech
    let prep = Prepared::new(&lat, Quality::Lll).ok()?;
    if prep.minimum(&EnumOptions::default()).ok()? != rat(4) {
        return None;
    }
    Some((lat, sp2))
}

/// Norm-16 vectors v = k1 + k2 from minimal-vector pairs with (k1,k2) = 4,
/// k2 != k1; such v never lie in 2L.
fn sample_norm16(
    mins: &[Vec<i64>],
    gram: &[Vec<i64>],
    rng: &mut ChaCha8Rng,
) -> Vec<i64> {
    loop {
        let k1 = &mins[rng.gen_range(0..mins.len())];
        let s1: i64 = rng.gen_range(0..2) * 2 - 1;
        let k2 = &mins[rng.gen_range(0..mins.len())];
        let s2: i64 = rng.gen_range(0..2) * 2 - 1;
        if std::ptr::eq(k1, k2) {
            continue;
        }
        let gk2: Vec<i64> = gram
            .iter()
            .map(|row| row.iter().zip(k2).map(|(a, b)| a * b).sum::<i64>() * s2)
            .collect();
        let ip: i64 = k1.iter().zip(&gk2).map(|(a, b)| s1 * a * b).sum();
        if ip != 4 {
            continue;
        }
        return k1.iter().zip(k2).map(|(a, b)| s1 * a + s2 * b).collect();
    }
}

/// Sampled b6 evidence: Some(hits) once any sampled class contributes, None
/// if all sampled classes are clean.
fn b6_sample(ctx: &CensusContext, classes: usize, rng: &mut ChaCha8Rng) -> Option<u64> {
    let mut idx: Vec<usize> = (0..ctx.table.classes.len()).collect();
    idx.shuffle(rng);
    let mut hits = 0;
    for &i in idx.iter().take(classes) {
        let r = census_class(ctx, i).expect("census class");
        hits += r.b6;
        if hits > 0 {
            return Some(hits);
        }
    }
    None
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let seed: u64 = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(1);
    let out = args.get(2).cloned().unwrap_or_else(|| "leech_structure.txt".into());
    let alt_out = args.get(3).cloned();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    eprintln!("building seed structure (Barnes (x) E8)...");
    let (mut cur_l, mut cur_sp) = {
        let (l, sp) = seed_structure();
        reduce_pair(&l, &sp)
    };
    let mut alt_written = false;

    for step in 0.. {
        let t0 = Instant::now();
        let pol = polarization_from_structure(&cur_l, &cur_sp).unwrap().swapped();
        let ctx = CensusContext::new(&pol).unwrap();
        let verdict = b6_sample(&ctx, 64, &mut rng);
        eprintln!(
            "step {step}: sampled census {:?} -> b6 evidence {verdict:?}",
            t0.elapsed()
        );
        match verdict {
            Some(_) => {
                if let (Some(path), false) = (&alt_out, alt_written) {
                    let mut f = std::fs::File::create(path).unwrap();
                    cur_sp.write(&mut f).unwrap();
                    alt_written = true;
                    eprintln!("wrote alternate (norm-6-carrying) structure to {path}");
                }
            }
            None => {
                eprintln!("step {step}: clean sample; running the full census...");
                let t1 = Instant::now();
                let report = norm6_census(&ctx, None, None).unwrap();
                eprintln!(
                    "full census: b6 = {}, kissing = {}, in {:?}",
                    report.b6,
                    report.kissing,
                    t1.elapsed()
                );
                if report.b6 == 0 {
                    let mut f = std::fs::File::create(&out).unwrap();
                    cur_sp.write(&mut f).unwrap();
                    eprintln!("wrote extremal structure to {out}");
                    return;
                }
            }
        }
        // one accepted neighbor move
        let prep = Prepared::new(&cur_l, Quality::Lll).unwrap();
        let mins = prep
            .short_vectors(&rat(4), &EnumOptions { collect: true, ..Default::default() })
            .unwrap()
            .vectors
            .unwrap();
        let gram_i64: Vec<Vec<i64>> = {
            let gz = cur_l.gram.to_z().unwrap();
            (0..cur_l.rank)
                .map(|i| gz.row(i).iter().map(|v| v.to_string().parse().unwrap()).collect())
                .collect()
        };
        let mins_i64: Vec<Vec<i64>> = mins
            .iter()
            .map(|v| v.coords.iter().map(|c| c.to_string().parse().unwrap()).collect())
            .collect();
        loop {
            let v = sample_norm16(&mins_i64, &gram_i64, &mut rng);
            if let Some((l2, sp2)) = neighbor_step(&cur_l, &cur_sp, &v) {
                cur_l = l2;
                cur_sp = sp2;
                eprintln!("step {step}: moved to a neighbor");
                break;
            }
        }
    }
}

use gamma72::catalog::build_e8;
use gamma72::census::{census_class, CensusContext};
use gamma72::hermitian::{barnes, hermitian_tensor};
use gamma72::polarization::polarization_from_structure;
use gamma72::structure::{find_structure, hermitian_from_structure, structure_from_hermitian};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use std::time::Instant;

fn main() {
    let seventh = BigRational::new(BigInt::one(), BigInt::from(7));
    let e8 = build_e8().unwrap();
    let sp8 = find_structure(&e8, 100_000_000, 7).unwrap();
    let (p8, _) = hermitian_from_structure(&e8, &sp8, &seventh).unwrap();
    let r = hermitian_tensor(&barnes(), &p8).unwrap();
    let (leech, sp) = structure_from_hermitian(&r, &seventh).unwrap();
    println!("seed Leech-with-structure: dim {} valid {}", leech.rank, sp.is_valid());

    let t0 = Instant::now();
    let pol = polarization_from_structure(&leech, &sp).unwrap();
    println!("polarization: {:?}", t0.elapsed());
    // census orientation: M = beta L, N = alpha L (the block-basis lattice)
    let cpol = pol.swapped();
    let t1 = Instant::now();
    let ctx = CensusContext::new(&cpol).unwrap();
    println!("class table: {} classes, {} vectors, {:?}", ctx.table.classes.len(),
        ctx.table.total_vectors, t1.elapsed());

    // W2/W3 on a few classes
    let t2 = Instant::now();
    for idx in [0usize, 1000, 4094] {
        let w = &ctx.table.classes[idx].rep;
        let w2 = ctx.w2_set(w).unwrap();
        let w3 = ctx.w3_set(w).unwrap();
        println!("class {idx}: |W2|={} |W3|={}", w2.len(), w3.len());
    }
    println!("w-sets: {:?}", t2.elapsed());

    // design counts direct vs moments on one class
    let t3 = Instant::now();
    let w = &ctx.table.classes[7].rep;
    let direct = ctx.design_counts_direct(w).unwrap();
    let moments = ctx.design_counts_moments(w).unwrap();
    println!("design direct: {:?} ({:?})", direct, t3.elapsed());
    println!("design agree: {}", direct == moments);

    // census on a few classes — timing probe
    let t4 = Instant::now();
    let mut b6 = 0;
    for idx in 0..8 {
        let r = census_class(&ctx, idx).unwrap();
        b6 += r.b6;
    }
    println!("8 classes: {:?} (b6 so far = {})", t4.elapsed(), b6);
}

use gamma72::catalog::build_e8;
use gamma72::census::CensusContext;
use gamma72::enumerate::{rat, EnumOptions, Prepared};
use gamma72::hermitian::{barnes, hermitian_tensor};
use gamma72::polarization::polarization_from_structure;
use gamma72::reduce::Quality;
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
    let pol = polarization_from_structure(&leech, &sp).unwrap().swapped();
    eprintln!("M gram diag: {:?}", (0..4).map(|i| pol.m.gram.at(i,i).to_string()).collect::<Vec<_>>());
    let t = Instant::now();
    let prep_m = Prepared::new(&pol.m, Quality::Lll).unwrap();
    eprintln!("prep M: {:?}, first diag {}", t.elapsed(), prep_m.first_diag());
    let t = Instant::now();
    let min = prep_m.minimum(&EnumOptions { budget: Some(200_000_000), ..Default::default() });
    eprintln!("min(M): {:?} in {:?}", min, t.elapsed());
    // now the coset at bound 4 with budget to see node counts
    let ctx = CensusContext::new(&pol).unwrap();
    eprintln!("ctx built");
    let w = ctx.table.classes[0].rep.clone();
    let t = Instant::now();
    let w2 = ctx.w2_set(&w);
    match &w2 {
        Ok(v) => eprintln!("|W2| = {} in {:?}", v.len(), t.elapsed()),
        Err(e) => eprintln!("w2 error: {e}"),
    }
}

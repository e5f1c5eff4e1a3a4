use gamma72::catalog::build_leech;
use gamma72::enumerate::{rat, EnumOptions, Prepared};
use gamma72::reduce::Quality;
use std::time::Instant;

fn main() {
    let t0 = Instant::now();
    let l = build_leech().unwrap();
    println!("build+selfcheck: {:?}", t0.elapsed());
    let t1 = Instant::now();
    let p = Prepared::new(&l, Quality::Lll).unwrap();
    println!("prepare: {:?} first_diag={}", t1.elapsed(), p.first_diag());
    let t2 = Instant::now();
    let rep = p.short_vectors(&rat(4), &EnumOptions::default()).unwrap();
    println!("bound4: {:?} nodes={} count4={}", t2.elapsed(), rep.nodes, rep.count_at_int(4));
    let t3 = Instant::now();
    let rep6 = p.short_vectors(&rat(6), &EnumOptions::default()).unwrap();
    println!("bound6: {:?} nodes={} count4={} count6={}", t3.elapsed(), rep6.nodes,
        rep6.count_at_int(4), rep6.count_at_int(6));
}

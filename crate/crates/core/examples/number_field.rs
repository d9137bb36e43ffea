//! Arithmetic in ℚ(√5) with certified signs at both real places.
use ffskit::arith::{qf, to_f64};
use ffskit::numberfield::NumberField;

fn main() -> ffskit::error::Result<()> {
    let f = NumberField::golden();
    let phi = f.generator();
    let conj = f.sub(&f.one(), &phi);
    println!("φ = {phi}, φ' = {conj}");
    println!("tr φ = {}, N φ = {}", f.trace(&phi), f.norm(&phi));
    println!("φ⁻¹ = {}", f.inv(&phi));
    let a = f.sub(&phi, &f.from_q(&qf(3, 2)));
    println!("signs of φ − 3/2 at the two places: {:?}", (0..f.degree()).map(|j| f.sign(&a, j)).collect::<Vec<_>>());
    println!("φ totally positive: {}, φ² totally positive: {}", f.is_totally_positive(&phi), f.is_totally_positive(&f.mul(&phi, &phi)));
    for j in 0..f.degree() {
        let i = f.embed(&phi, j, &qf(1, 1000));
        println!("place {j}: φ ∈ [{:.6}, {:.6}]", to_f64(&i.lo), to_f64(&i.hi));
    }
    println!("inverse different basis: {:?}", f.inverse_different().iter().map(|x| x.to_string()).collect::<Vec<_>>());
    Ok(())
}

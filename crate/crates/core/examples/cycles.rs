//! Special-cycle calculus on a finite orbit model.
use std::sync::Arc;

use ffskit::arith::qi;
use ffskit::cyclealg::{AdelicSurrogate, OrbitDatum, Pullback, QuadSpace, WeightFunction};
use ffskit::numberfield::NumberField;
use ffskit::symcone::SymMat;

fn main() -> ffskit::error::Result<()> {
    let f = Arc::new(NumberField::rationals());
    let e = |v: &[i64]| v.iter().map(|&x| f.from_int(x)).collect::<Vec<_>>();
    let gram = |n: usize| (0..n).map(|i| (0..n).map(|k| qi(if i == k { 2 } else { 0 })).collect()).collect::<Vec<_>>();
    let space = QuadSpace::from_rational(f.clone(), &gram(3), 1)?;
    let sign = vec![e(&[1, 0, 0]), e(&[0, -1, 0]), e(&[0, 0, 1])];
    let od = OrbitDatum::new(space, &[sign])?;

    let a = od.connected_cycle(0, &[e(&[1, 0, 0])])?;
    let b = od.connected_cycle(0, &[e(&[0, 0, 1])])?;
    println!("A = {a}\nB = {b}\nA·B = {}", od.intersect(&a, &b)?);
    println!("A·A = {}", od.intersect(&a, &a)?);

    let phi = WeightFunction::indicator(1, [[1, 0, 0], [-1, 0, 0], [0, 0, 1], [0, 0, -1]].iter().map(|v| vec![e(v)]))?;
    let one = SymMat::from_rational(&f, &[vec![qi(1)]])?;
    let r = od.check_product_formula(&one, &phi, &one, &phi, None)?;
    println!("product formula holds: {}\n  Z(T, φ₁⊗φ₂) summed = {}", r.equal, r.lhs);

    let pb = Pullback::new(&od, &[e(&[0, 0, 1])])?;
    let r = pb.check_factorization(&one, &pb.split(&phi)?, None)?;
    println!("pullback factorization holds: {}\n  {}", r.equal, r.lhs);

    let plane = QuadSpace::from_rational(f.clone(), &gram(2), 1)?;
    let flip_x = vec![e(&[-1, 0]), e(&[0, 1])];
    let flip_y = vec![e(&[1, 0]), e(&[0, -1])];
    let x0 = vec![e(&[1, 2])];
    let orbit = WeightFunction::indicator(1, [[1, 2], [-1, 2], [1, -2], [-1, -2]].iter().map(|v| vec![e(v)]))?;
    let s = AdelicSurrogate::new(plane, &[flip_x, flip_y.clone()], &[flip_y], &[], None, x0, orbit)?;
    let r = s.check()?;
    println!(
        "natural vs weighted: {} ({} components, {} orbits, {} double cosets, bijection {})",
        r.equal,
        s.datum().components().len(),
        r.orbits,
        r.double_cosets,
        r.bijection
    );
    Ok(())
}

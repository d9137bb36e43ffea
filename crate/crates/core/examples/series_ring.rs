//! Truncated formal Fourier series: products and diagonal restriction.
use std::sync::Arc;

use ffskit::arith::qi;
use ffskit::ffs::{FormalSeries, LambdaCache, RationalRing};
use ffskit::numberfield::NumberField;
use ffskit::symcone::{ConeLattice, SymMat};

fn main() -> ffskit::error::Result<()> {
    let f = Arc::new(NumberField::rationals());
    let cone = ConeLattice::new(f.clone(), 1, 1)?;
    let t = |k: i64| SymMat::from_rational(&f, &[vec![qi(k)]]).unwrap();
    let b = qi(6);
    let a = FormalSeries::from_terms(cone.clone(), RationalRing, b.clone(), [(t(0), qi(1)), (t(1), qi(2))])?;
    let c = FormalSeries::from_terms(cone.clone(), RationalRing, b.clone(), [(t(2), qi(1)), (t(3), qi(-1))])?;
    let ac = a.multiply(&c)?;
    for (p, x) in ac.terms() {
        println!("  q^{}: {x}", p.t);
    }
    let mut lam = LambdaCache::new(cone);
    println!("a·c ∈ I_2: {}", ac.in_ideal(2, &mut lam)?);
    println!("a·c ∈ I_3: {}", ac.in_ideal(3, &mut lam)?);

    let block = a.block_product(&c)?;
    println!("block product has {} terms in genus {}", block.len(), block.cone().n());
    let back = block.diagonal_restriction(1)?;
    println!("restricting back to the diagonal gives {} terms", back.len());
    Ok(())
}

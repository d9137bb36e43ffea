//! Totally positive cone points of bounded height and the filtration index λ.
use std::sync::Arc;

use ffskit::arith::qi;
use ffskit::ffs::LambdaCache;
use ffskit::numberfield::NumberField;
use ffskit::symcone::ConeLattice;

fn main() -> ffskit::error::Result<()> {
    let q = Arc::new(NumberField::rationals());
    let genus2 = ConeLattice::new(q, 2, 1)?;
    let pts = genus2.enumerate(&qi(2));
    println!("ℚ, n = 2, height ≤ 2: {} points", pts.len());
    let mut lam = LambdaCache::new(genus2.clone());
    for p in pts.iter().filter(|p| !p.t.is_zero()) {
        println!("  h = {}  T = {}  λ = {}", p.height, p.t, lam.lambda(&p.t)?);
    }

    let golden = ConeLattice::new(Arc::new(NumberField::golden()), 1, 1)?;
    let pts = golden.enumerate(&qi(2));
    println!("ℚ(√5), n = 1, height ≤ 2: {} points", pts.len());
    for p in pts {
        println!("  h = {}  T = {}", p.height, p.t);
    }
    Ok(())
}

//! Theta series of small lattices, their products, and a certified numerical value at τ = i.
use std::sync::Arc;

use ffskit::arith::qi;
use ffskit::numberfield::NumberField;
use ffskit::theta::{self, QuadLattice, TauPoint};

fn main() -> ffskit::error::Result<()> {
    let q = Arc::new(NumberField::rationals());
    let l = QuadLattice::from_rational(q.clone(), &[vec![qi(2)]])?;
    let l2 = l.orthogonal_sum(&l)?;
    let b = qi(10);
    let th = l.theta_expansion(1, None, None, &b)?;
    let th2 = l2.theta_expansion(1, None, None, &b)?;
    println!("θ_ℤ  : {}", th.terms().map(|(p, c)| format!("{c}q^{}", p.height)).collect::<Vec<_>>().join(" + "));
    println!("θ_ℤ² : {}", th2.terms().map(|(p, c)| format!("{c}q^{}", p.height)).collect::<Vec<_>>().join(" + "));
    println!("θ_ℤ·θ_ℤ = θ_ℤ²: {}", th.multiply(&th)?.eq_up_to_bound(&th2));

    let g2 = l2.theta_expansion(2, None, None, &qi(2))?;
    println!("genus-2 theta of ℤ² to height 2: {} terms", g2.len());

    let tau = TauPoint::scalar(&[(0.0, 1.0)])?;
    let ev = theta::numeric_eval(&th, &l.tail_model(1), &tau, None)?;
    println!("θ_ℤ(i) = {:.15} ± {:.1e}", ev.value.re, ev.error_bound());

    let a2 = QuadLattice::from_rational(q, &[vec![qi(2), qi(-1)], vec![qi(-1), qi(2)]])?;
    let d = a2.discriminant_group();
    println!("A₂: L^∨/L has invariants {:?}", d.invariants.iter().map(|s| s.to_string()).collect::<Vec<_>>());
    Ok(())
}

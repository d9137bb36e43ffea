//! Weighted cycles `Z(T, φ)`, the product formula and the cycle-valued generating series.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num::Zero;

use crate::arith::Q;
use crate::error::{invalid, Result};
use crate::ffs::FormalSeries;
use crate::symcone::{ConeLattice, SymMat};

use super::{CycleClass, CycleRing, Frame, OrbitDatum, QuadSpace};

/// A finitely supported rational function on frames `x ∈ Vⁿ`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WeightFunction {
    n: usize,
    values: BTreeMap<Frame, Q>,
}

/// Both sides of an identity, and whether they agree exactly.
#[derive(Clone, Debug)]
pub struct CheckReport<T = CycleClass> {
    pub lhs: T,
    pub rhs: T,
    pub equal: bool,
}

impl WeightFunction {
    pub fn new(n: usize, values: impl IntoIterator<Item = (Frame, Q)>) -> Result<Self> {
        let mut out = WeightFunction { n, values: BTreeMap::new() };
        for (x, w) in values {
            if x.len() != n {
                return invalid(format!("frame of length {} for a weight of genus {n}", x.len()));
            }
            out.accumulate(x, w);
        }
        Ok(out)
    }

    /// `Σ_x 1_x`.
    pub fn indicator(n: usize, frames: impl IntoIterator<Item = Frame>) -> Result<Self> {
        WeightFunction::new(n, frames.into_iter().map(|x| (x, Q::from_integer(1.into()))))
    }

    pub fn zero(n: usize) -> Self {
        WeightFunction { n, values: BTreeMap::new() }
    }

    fn accumulate(&mut self, x: Frame, w: Q) {
        let e = self.values.entry(x.clone()).or_insert_with(Q::zero);
        *e += w;
        if e.is_zero() {
            self.values.remove(&x);
        }
    }

    pub fn genus(&self) -> usize {
        self.n
    }

    pub fn get(&self, x: &[Vec<crate::numberfield::FieldElem>]) -> Q {
        self.values.get(x).cloned().unwrap_or_else(Q::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = (&Frame, &Q)> {
        self.values.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn add(&self, o: &WeightFunction) -> Result<WeightFunction> {
        if self.n != o.n {
            return invalid("weights of different genus");
        }
        let mut out = self.clone();
        for (x, w) in &o.values {
            out.accumulate(x.clone(), w.clone());
        }
        Ok(out)
    }

    /// `(φ₁⊗φ₂)(x₁, x₂) = φ₁(x₁)·φ₂(x₂)` on concatenated frames.
    pub fn tensor(&self, o: &WeightFunction) -> WeightFunction {
        let mut out = WeightFunction::zero(self.n + o.n);
        for (x, a) in &self.values {
            for (y, b) in &o.values {
                let mut z = x.clone();
                z.extend(y.iter().cloned());
                out.accumulate(z, a * b);
            }
        }
        out
    }

    /// `x ↦ φ(m⁻¹x)`, given `m` acting on frames.
    pub fn map_frames(&self, m: impl Fn(&Frame) -> Frame) -> WeightFunction {
        let mut out = WeightFunction::zero(self.n);
        for (x, w) in &self.values {
            out.accumulate(m(x), w.clone());
        }
        out
    }

    /// Keeps the support on `O_T = {x : Q(x) = T}`.
    pub fn restrict(&self, space: &QuadSpace, t: &SymMat) -> WeightFunction {
        WeightFunction {
            n: self.n,
            values: self.values.iter().filter(|(x, _)| &space.frame_gram(x) == t).map(|(x, w)| (x.clone(), w.clone())).collect(),
        }
    }

    /// The distinct Gram matrices `Q(x)` met by the support.
    pub fn grams(&self, space: &QuadSpace) -> BTreeSet<SymMat> {
        self.values.keys().map(|x| space.frame_gram(x)).collect()
    }

    pub(crate) fn check_space(&self, space: &QuadSpace) -> Result<()> {
        for x in self.values.keys() {
            for v in x {
                space.check_vector(v)?;
            }
        }
        Ok(())
    }
}

impl OrbitDatum {
    /// `Z(T, φ) = Σ_j Σ_{x ∈ O_T mod Γ_j} φ(g_j⁻¹x)·[Z(x)]_j`. The support of `φ` must lie in
    /// `O_T`, and `φ(g_j⁻¹ · g_j)` must be `Γ_j`-invariant.
    pub fn weighted_cycle(&self, t: &SymMat, phi: &WeightFunction) -> Result<CycleClass> {
        if t.n() != phi.genus() {
            return invalid(format!("T has size {} but φ has genus {}", t.n(), phi.genus()));
        }
        for (x, _) in phi.support() {
            if &self.space.frame_gram(x) != t {
                return invalid(format!("frame with Gram matrix {} in the support of a weight for T = {t}", self.space.frame_gram(x)));
            }
        }
        self.weighted_cycle_on(t, phi)
    }

    /// As [`OrbitDatum::weighted_cycle`], reading `φ` restricted to `O_T`.
    pub fn weighted_cycle_on(&self, t: &SymMat, phi: &WeightFunction) -> Result<CycleClass> {
        phi.check_space(&self.space)?;
        let phi = phi.restrict(&self.space, t);
        let mut out = CycleClass::zero();
        for j in 0..self.components.len() {
            let c = &self.components[j];
            let xs: BTreeMap<Frame, Q> =
                phi.support().map(|(y, w)| (self.space.apply_frame(&c.g, y), w.clone())).collect();
            out = out.add(&self.orbit_sum(j, &xs, true)?);
        }
        Ok(out)
    }

    /// `Σ_{x ∈ X mod Γ_j} w(x)·[Z(x)]_j` for a `Γ_j`-stable weighted set `X`. With `strict`,
    /// `w` must be constant on orbits; otherwise every point contributes `w(x)/|Γ_j x|`.
    pub(crate) fn orbit_sum(&self, j: usize, xs: &BTreeMap<Frame, Q>, strict: bool) -> Result<CycleClass> {
        let group = &self.components[j].group;
        let mut done: BTreeSet<&Frame> = BTreeSet::new();
        let mut out = CycleClass::zero();
        for (x, w) in xs {
            if done.contains(x) {
                continue;
            }
            let mut orbit: BTreeSet<&Frame> = BTreeSet::new();
            for g in group.elems() {
                let gx = self.space.apply_frame(g, x);
                match xs.get_key_value(&gx) {
                    Some((k, v)) => {
                        if strict && v != w {
                            return invalid("weight is not constant on a Γ-orbit of its support");
                        }
                        orbit.insert(k);
                    }
                    None => return invalid("support of the weight is not stable under Γ"),
                }
            }
            let cycle = self.connected_cycle(j, x)?;
            if strict {
                out = out.add(&cycle.scale(w));
            } else {
                let size = Q::from_integer(orbit.len().into());
                for y in &orbit {
                    out = out.add(&cycle.scale(&(&xs[*y] / &size)));
                }
            }
            done.extend(orbit);
        }
        Ok(out)
    }

    /// Both sides of `Z(T₁,φ₁)·Z(T₂,φ₂) = Σ_{T = (T₁ * ; * T₂)} Z(T, φ₁⊗φ₂)`. A `joint`
    /// weight replaces `φ₁⊗φ₂` on the right.
    pub fn check_product_formula(
        &self,
        t1: &SymMat,
        phi1: &WeightFunction,
        t2: &SymMat,
        phi2: &WeightFunction,
        joint: Option<&WeightFunction>,
    ) -> Result<CheckReport> {
        let lhs = self.intersect(&self.weighted_cycle(t1, phi1)?, &self.weighted_cycle(t2, phi2)?)?;
        let tensor;
        let phi = match joint {
            Some(j) => j,
            None => {
                tensor = phi1.tensor(phi2);
                &tensor
            }
        };
        let n1 = t1.n();
        let n = n1 + t2.n();
        if phi.genus() != n {
            return invalid("joint weight has the wrong genus");
        }
        let i1: Vec<usize> = (0..n1).collect();
        let i2: Vec<usize> = (n1..n).collect();
        let mut rhs = CycleClass::zero();
        for t in phi.grams(&self.space) {
            if &t.principal(&i1) == t1 && &t.principal(&i2) == t2 {
                rhs = rhs.add(&self.weighted_cycle_on(&t, phi)?);
            }
        }
        let equal = lhs == rhs;
        Ok(CheckReport { lhs, rhs, equal })
    }
}

/// `Σ_T Z(T, φ) q^T` over the Gram matrices met by `supp φ`, up to height `b`. The level
/// defaults to the smallest one containing every such `T`.
pub fn series_of_cycles(datum: &Arc<OrbitDatum>, phi: &WeightFunction, nu: Option<u64>, b: &Q) -> Result<FormalSeries<CycleRing>> {
    let f = datum.field().clone();
    let grams = phi.grams(datum.space());
    let nu = nu.unwrap_or_else(|| ConeLattice::minimal_level(&f, grams.iter()));
    let cone = ConeLattice::new(f.clone(), phi.genus(), nu)?;
    let mut out = FormalSeries::zero(cone, CycleRing::new(datum.clone()), b.clone());
    for t in grams {
        if &t.trace_height(&f) <= b {
            let z = datum.weighted_cycle_on(&t, phi)?;
            out.add_term(t, z)?;
        }
    }
    Ok(out)
}

/// Both sides of `φ_{n₁}(φ₁)·φ_{n₂}(φ₂) = φ_{n₁+n₂}(φ₁⊗φ₂)|_diag`, on a common level.
pub fn check_series_product(
    datum: &Arc<OrbitDatum>,
    phi1: &WeightFunction,
    phi2: &WeightFunction,
    joint: Option<&WeightFunction>,
    b: &Q,
) -> Result<CheckReport<FormalSeries<CycleRing>>> {
    let f = datum.field().clone();
    let tensor = phi1.tensor(phi2);
    let phi12 = joint.unwrap_or(&tensor);
    if phi12.genus() != phi1.genus() + phi2.genus() {
        return invalid("joint weight has the wrong genus");
    }
    let mut grams = phi1.grams(datum.space());
    grams.extend(phi2.grams(datum.space()));
    grams.extend(phi12.grams(datum.space()));
    let nu = ConeLattice::minimal_level(&f, grams.iter());
    let s1 = series_of_cycles(datum, phi1, Some(nu), b)?;
    let s2 = series_of_cycles(datum, phi2, Some(nu), b)?;
    let s12 = series_of_cycles(datum, phi12, Some(nu), b)?;
    let lhs = s1.block_product(&s2)?;
    let rhs = s12.diagonal_restriction(phi1.genus())?;
    let equal = lhs.eq_up_to_bound(&rhs);
    Ok(CheckReport { lhs, rhs, equal })
}

impl OrbitDatum {
    /// See [`series_of_cycles`].
    pub fn series_of_cycles(self: &Arc<Self>, phi: &WeightFunction, b: &Q) -> Result<FormalSeries<CycleRing>> {
        series_of_cycles(self, phi, None, b)
    }
}

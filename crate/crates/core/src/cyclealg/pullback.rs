//! Restriction to the sub-datum on `U₀^⊥` and the pullback of cycle classes.

use std::collections::{BTreeMap, BTreeSet};

use crate::arith::Q;
use crate::error::{invalid, Result};
use crate::linalg;
use crate::numberfield::FieldElem;
use crate::symcone::SymMat;

use super::{CheckReport, Component, CycleClass, FiniteGroup, Frame, Matrix, OrbitDatum, QuadSpace, Subspace, WeightFunction};

/// The embedding of the datum on `U₀^⊥` (with `Γ₀ = ` pointwise stabilizer of `U₀`) into an
/// ambient datum.
#[derive(Clone, Debug)]
pub struct Pullback {
    ambient: OrbitDatum,
    u0: Subspace,
    /// Basis of `U₀^⊥`, in ambient coordinates.
    perp: Matrix,
    sub: OrbitDatum,
    /// Indices into `Γ_j` of the elements fixing `U₀`.
    gamma0: Vec<Vec<usize>>,
}

impl Pullback {
    /// Every `g_j` must fix `U₀` pointwise.
    pub fn new(ambient: &OrbitDatum, u0: &[Vec<FieldElem>]) -> Result<Self> {
        let f = ambient.field().clone();
        let sp = ambient.space();
        let u0 = ambient.span(u0)?;
        let perp = sp.orthogonal_complement(u0.basis());
        let coords = |v: &[FieldElem]| linalg::coordinates_in(&*f, &perp, v).expect("U₀^⊥ is stable");
        let restrict = |m: &Matrix| -> Matrix {
            let cols: Matrix = perp.iter().map(|p| coords(&sp.apply(m, p))).collect();
            linalg::transpose(&cols)
        };
        let sub_gram: Matrix = perp.iter().map(|a| perp.iter().map(|b| sp.pairing(a, b)).collect()).collect();
        let sub_space = QuadSpace::new(f.clone(), sub_gram, sp.d_plus())?;
        let mut components = Vec::new();
        let mut gamma0 = Vec::new();
        for (j, c) in ambient.components().iter().enumerate() {
            if !u0.fixed_by(&f, &c.g) {
                return invalid(format!("component label g_{j} does not fix U₀ pointwise"));
            }
            let idx: Vec<usize> = (0..c.group.order()).filter(|&i| u0.fixed_by(&f, &c.group.elems()[i])).collect();
            let elems: Vec<Matrix> = idx.iter().map(|&i| restrict(&c.group.elems()[i])).collect();
            let group = FiniteGroup::from_elements(&sub_space, &elems)?;
            components.push(Component { group, g: restrict(&c.g), g_inv: restrict(&c.g_inv) });
            gamma0.push(idx);
        }
        let sub = OrbitDatum::from_parts(sub_space, components);
        Ok(Pullback { ambient: ambient.clone(), u0, perp, sub, gamma0 })
    }

    pub fn sub(&self) -> &OrbitDatum {
        &self.sub
    }

    pub fn u0(&self) -> &Subspace {
        &self.u0
    }

    /// Basis of `U₀^⊥` in ambient coordinates.
    pub fn complement_basis(&self) -> &Matrix {
        &self.perp
    }

    /// Orthogonal projection `pr₀ : V → U₀^⊥`, in sub-datum coordinates.
    pub fn project(&self, v: &[FieldElem]) -> Vec<FieldElem> {
        let f = &**self.ambient.field();
        let sp = self.ambient.space();
        let b0 = self.u0.basis();
        let mut w = v.to_vec();
        if !b0.is_empty() {
            let m: Matrix = b0.iter().map(|a| b0.iter().map(|b| sp.pairing(a, b)).collect()).collect();
            let rhs: Vec<FieldElem> = b0.iter().map(|a| sp.pairing(a, v)).collect();
            let c = linalg::solve(f, &m, &rhs).expect("U₀ is nondegenerate");
            for (ci, bi) in c.iter().zip(b0) {
                for (wk, bk) in w.iter_mut().zip(bi) {
                    *wk = f.sub(wk, &f.mul(ci, bk));
                }
            }
        }
        linalg::coordinates_in(f, &self.perp, &w).expect("projection lies in U₀^⊥")
    }

    /// Coordinates of a vector of `U₀^⊥`; an error if it has a `U₀` component.
    pub fn to_sub(&self, v: &[FieldElem]) -> Result<Vec<FieldElem>> {
        self.ambient.space().check_vector(v)?;
        if v.iter().all(|x| x.is_zero()) {
            return Ok(vec![self.ambient.field().zero(); self.perp.len()]);
        }
        linalg::coordinates_in(&**self.ambient.field(), &self.perp, v)
            .ok_or_else(|| crate::error::Error::Validation("vector does not lie in U₀^⊥".into()))
    }

    /// `ρ*[Z(U)]_j = Σ_{γ ∈ Γ₀\Γ_j/Γ_U} [Z(pr₀ γU)]·c^{r(U) − r(pr₀ γU)}`.
    pub fn pullback(&self, a: &CycleClass) -> Result<CycleClass> {
        self.ambient.check_class(a)?;
        let f = &**self.ambient.field();
        let sp = self.ambient.space();
        let mut out = CycleClass::zero();
        for (s, coeff) in a.terms() {
            let j = s.component;
            let group = self.ambient.components()[j].group.elems();
            let cosets: BTreeSet<Frame> = group.iter().map(|g| sp.apply_frame(g, s.space.basis())).collect();
            let mut seen: BTreeSet<&Frame> = BTreeSet::new();
            for t in &cosets {
                if seen.contains(t) {
                    continue;
                }
                for &i in &self.gamma0[j] {
                    seen.insert(cosets.get(&sp.apply_frame(&group[i], t)).expect("cosets are Γ-stable"));
                }
                let proj: Frame = t.iter().map(|v| self.project(v)).collect();
                let p = Subspace::span(f, self.perp.len(), &proj);
                let k = s.c_power as usize + s.space.dim() - p.dim();
                out.push(self.sub.symbol(j, &p, k as u32)?, coeff.clone());
            }
        }
        Ok(out)
    }

    /// `φ = Σ_{x₀} 1_{x₀} ⊗ φ(x₀ + ·)`, split along `V = U₀ ⊕ U₀^⊥`; the second factors are in
    /// sub-datum coordinates.
    pub fn split(&self, phi: &WeightFunction) -> Result<Vec<(WeightFunction, WeightFunction)>> {
        phi.check_space(self.ambient.space())?;
        let f = &**self.ambient.field();
        let n = phi.genus();
        let mut parts: BTreeMap<Frame, Vec<(Frame, Q)>> = BTreeMap::new();
        for (x, w) in phi.support() {
            let x1: Frame = x.iter().map(|v| self.project(v)).collect();
            let x1_amb: Frame = x1.iter().map(|c| self.from_sub(c)).collect();
            let x0: Frame = x.iter().zip(&x1_amb).map(|(a, b)| a.iter().zip(b).map(|(p, q)| f.sub(p, q)).collect()).collect();
            parts.entry(x0).or_default().push((x1, w.clone()));
        }
        parts
            .into_iter()
            .map(|(x0, rest)| Ok((WeightFunction::indicator(n, [x0])?, WeightFunction::new(n, rest)?)))
            .collect()
    }

    fn from_sub(&self, c: &[FieldElem]) -> Vec<FieldElem> {
        let f = &**self.ambient.field();
        let dim = self.ambient.space().dim();
        let mut v = vec![f.zero(); dim];
        for (ci, p) in c.iter().zip(&self.perp) {
            for (vk, pk) in v.iter_mut().zip(p) {
                *vk = f.add(vk, &f.mul(ci, pk));
            }
        }
        v
    }

    /// Both sides of `ρ*Z(T, φ) = Σ_r Σ_{x₀} φ⁰_r(x₀)·Z(T − Q(x₀), φ¹_r)` for
    /// `φ = Σ_r φ⁰_r ⊗ φ¹_r`. The `φ⁰_r` live on `U₀`-frames (ambient coordinates), the `φ¹_r`
    /// on `U₀^⊥`-frames (sub-datum coordinates). An `ambient` weight replaces `Σ_r φ⁰_r ⊗ φ¹_r`
    /// on the left.
    pub fn check_factorization(
        &self,
        t: &SymMat,
        split: &[(WeightFunction, WeightFunction)],
        ambient: Option<&WeightFunction>,
    ) -> Result<CheckReport> {
        let f = &**self.ambient.field();
        let n = t.n();
        let mut phi = WeightFunction::zero(n);
        for (p0, p1) in split {
            if p0.genus() != n || p1.genus() != n {
                return invalid("split weight has the wrong genus");
            }
            p1.check_space(self.sub.space())?;
            for (x0, _) in p0.support() {
                for v in x0 {
                    self.ambient.space().check_vector(v)?;
                    if !self.u0.contains(f, v) {
                        return invalid("a first split factor is supported off U₀");
                    }
                }
            }
            let mut terms = Vec::new();
            for (x0, a) in p0.support() {
                for (x1, b) in p1.support() {
                    let x: Frame = x0
                        .iter()
                        .zip(x1)
                        .map(|(u, c)| u.iter().zip(self.from_sub(c)).map(|(p, q)| f.add(p, &q)).collect())
                        .collect();
                    terms.push((x, a * b));
                }
            }
            phi = phi.add(&WeightFunction::new(n, terms)?)?;
        }
        let phi = ambient.unwrap_or(&phi);
        let lhs = self.pullback(&self.ambient.weighted_cycle_on(t, phi)?)?;
        let mut rhs = CycleClass::zero();
        for (p0, p1) in split {
            for (x0, a) in p0.support() {
                let t1 = t.sub(f, &self.ambient.space().frame_gram(x0));
                rhs = rhs.add(&self.sub.weighted_cycle_on(&t1, p1)?.scale(a));
            }
        }
        let equal = lhs == rhs;
        Ok(CheckReport { lhs, rhs, equal })
    }
}

impl OrbitDatum {
    /// See [`Pullback::pullback`].
    pub fn pullback(&self, u0: &[Vec<FieldElem>], a: &CycleClass) -> Result<(OrbitDatum, CycleClass)> {
        let p = Pullback::new(self, u0)?;
        let out = p.pullback(a)?;
        Ok((p.sub, out))
    }
}

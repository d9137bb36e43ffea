//! Natural versus weighted cycles on a finite surrogate of the adelic double-coset picture.
//!
//! The finite group `𝔾` stands in for both `G(ℚ)` and `G(𝔸_f)`; rational frames are the
//! `G₊`-orbit of the base frame `x₀`, and the components are `G₊\𝔾/K`.

use std::collections::{BTreeMap, BTreeSet};

use crate::arith::Q;
use crate::error::{invalid, Result};
use crate::symcone::SymMat;

use super::{Component, CycleClass, FiniteGroup, Frame, Matrix, OrbitDatum, QuadSpace, WeightFunction};

#[derive(Clone, Debug)]
pub struct AdelicSurrogate {
    space: QuadSpace,
    group: FiniteGroup,
    plus: FiniteGroup,
    k: FiniteGroup,
    h: FiniteGroup,
    x0: Frame,
    phi: WeightFunction,
    datum: OrbitDatum,
}

/// Outcome of [`AdelicSurrogate::check`].
#[derive(Clone, Debug)]
pub struct NaturalReport {
    /// `Z(T, φ, K)`.
    pub lhs: CycleClass,
    /// `Z(T, φ, K)^♮`.
    pub rhs: CycleClass,
    /// Whether the orbit/double-coset matching was a well-defined bijection throughout.
    pub bijection: bool,
    pub orbits: usize,
    pub double_cosets: usize,
    pub equal: bool,
}

impl AdelicSurrogate {
    /// `G₊` and `K` are given by generators inside `𝔾`; `H`, if given, must be the pointwise
    /// stabilizer of `x₀` in `𝔾`.
    pub fn new(
        space: QuadSpace,
        group: &[Matrix],
        plus: &[Matrix],
        k: &[Matrix],
        h: Option<&[Matrix]>,
        x0: Frame,
        phi: WeightFunction,
    ) -> Result<Self> {
        let big = FiniteGroup::generate(&space, group)?;
        let plus = FiniteGroup::generate(&space, plus)?;
        let k = FiniteGroup::generate(&space, k)?;
        if !plus.elems().iter().all(|g| big.contains(g)) {
            return invalid("G₊ is not contained in the finite group");
        }
        if !k.elems().iter().all(|g| big.contains(g)) {
            return invalid("K is not contained in the finite group");
        }
        for v in &x0 {
            space.check_vector(v)?;
        }
        if phi.genus() != x0.len() {
            return invalid("φ and x₀ have different genus");
        }
        phi.check_space(&space)?;
        let stab = big.filtered(|g| space.apply_frame(g, &x0) == x0);
        if let Some(h) = h {
            let given = FiniteGroup::generate(&space, h)?;
            if given != stab {
                return invalid("H is not the pointwise stabilizer of x₀");
            }
        }
        let mut covered: BTreeSet<Matrix> = BTreeSet::new();
        let mut components = Vec::new();
        for g in big.elems() {
            if covered.contains(g) {
                continue;
            }
            for p in plus.elems() {
                let pg = space.mul(p, g);
                for kk in k.elems() {
                    covered.insert(space.mul(&pg, kk));
                }
            }
            let g_inv = space.inverse(g)?;
            let gamma = plus.filtered(|p| k.contains(&space.mul(&space.mul(&g_inv, p), g)));
            components.push(Component { group: gamma, g: g.clone(), g_inv });
        }
        let datum = OrbitDatum::from_parts(space.clone(), components);
        Ok(AdelicSurrogate { space, group: big, plus, k, h: stab, x0, phi, datum })
    }

    /// The orbit datum with components `g_j` and `Γ_j = G₊ ∩ g_jKg_j⁻¹`.
    pub fn datum(&self) -> &OrbitDatum {
        &self.datum
    }

    pub fn t(&self) -> SymMat {
        self.space.frame_gram(&self.x0)
    }

    fn orbit(&self, g: &FiniteGroup, x: &Frame) -> BTreeSet<Frame> {
        g.elems().iter().map(|m| self.space.apply_frame(m, x)).collect()
    }

    /// Canonical label of the double coset `A·x·B`.
    fn double_coset(&self, a: &FiniteGroup, x: &Matrix, b: &FiniteGroup) -> Matrix {
        let mut best: Option<Matrix> = None;
        for l in a.elems() {
            let lx = self.space.mul(l, x);
            for r in b.elems() {
                let m = self.space.mul(&lx, r);
                if best.as_ref().map_or(true, |b| &m < b) {
                    best = Some(m);
                }
            }
        }
        best.expect("groups contain the identity")
    }

    /// Weighted cycle against natural cycle, with the orbit/double-coset matching checked exhaustively.
    pub fn check(&self) -> Result<NaturalReport> {
        let sp = &self.space;
        let rational = self.orbit(&self.plus, &self.x0);
        let full = self.orbit(&self.group, &self.x0);

        let mut lhs = CycleClass::zero();
        for (j, c) in self.datum.components.iter().enumerate() {
            let xs: BTreeMap<Frame, Q> = rational
                .iter()
                .map(|x| (x.clone(), self.phi.get(&sp.apply_frame(&c.g_inv, x))))
                .filter(|(_, w)| w != &Q::from_integer(0.into()))
                .collect();
            lhs = lhs.add(&self.datum.orbit_sum(j, &xs, false)?);
        }

        // K-orbits on supp φ ∩ 𝔾x₀, represented by y_r = ξ_r⁻¹x₀
        let supp: BTreeSet<Frame> = self.phi.support().map(|(x, _)| x.clone()).filter(|x| full.contains(x)).collect();
        let mut reps: Vec<(Frame, Matrix)> = Vec::new();
        let mut seen: BTreeSet<Frame> = BTreeSet::new();
        for y in &supp {
            if seen.contains(y) {
                continue;
            }
            seen.extend(self.orbit(&self.k, y));
            let a = self.group.elems().iter().find(|a| &sp.apply_frame(a, &self.x0) == y).expect("y lies in 𝔾x₀");
            reps.push((y.clone(), sp.inverse(a)?));
        }

        let h_plus = self.h.filtered(|h| self.plus.contains(h));
        let mut rhs = CycleClass::zero();
        let mut bijection = true;
        let mut orbits = 0;
        let mut double_cosets = 0;
        for (y, xi) in &reps {
            let xi_inv = sp.inverse(xi)?;
            let k_h = self.h.filtered(|h| self.k.contains(&sp.mul(&sp.mul(&xi_inv, h), xi)));
            let cosets: BTreeSet<Matrix> = self.h.elems().iter().map(|h| self.double_coset(&h_plus, h, &k_h)).collect();
            double_cosets += cosets.len();
            let weight = self.phi.get(y);

            // natural side: h_i·ξ_r = γ_i⁻¹·g_j·k_i
            for h in &cosets {
                let hxi = sp.mul(h, xi);
                let (j, gamma) = self.decompose(&hxi)?;
                let z = self.datum.connected_cycle(j, &sp.apply_frame(&gamma, &self.x0))?;
                rhs = rhs.add(&z.scale(&weight));
            }

            // Γ_j-orbits on G₊x₀ ∩ g_jKy_r against H₊\H/K_{H,ξ_r}
            let mut hit: BTreeSet<Matrix> = BTreeSet::new();
            for c in &self.datum.components {
                let gky: BTreeSet<Frame> = self.k.elems().iter().map(|k| sp.apply_frame(&sp.mul(&c.g, k), y)).collect();
                let a: BTreeSet<&Frame> = rational.iter().filter(|x| gky.contains(*x)).collect();
                let mut done: BTreeSet<Frame> = BTreeSet::new();
                for x in a {
                    if done.contains(x) {
                        continue;
                    }
                    let orbit = self.orbit(&c.group, x);
                    orbits += 1;
                    let mut labels: BTreeSet<Matrix> = BTreeSet::new();
                    for z in &orbit {
                        for gamma in self.plus.elems().iter().filter(|g| &sp.apply_frame(g, &self.x0) == z) {
                            let gamma_inv = sp.inverse(gamma)?;
                            for k in self.k.elems() {
                                let gk = sp.mul(&c.g, k);
                                if &sp.apply_frame(&gk, y) != z {
                                    continue;
                                }
                                let h = sp.mul(&sp.mul(&gamma_inv, &gk), &xi_inv);
                                if !self.h.contains(&h) {
                                    bijection = false;
                                    continue;
                                }
                                labels.insert(self.double_coset(&h_plus, &h, &k_h));
                            }
                        }
                    }
                    if labels.len() != 1 {
                        bijection = false;
                    }
                    for l in labels {
                        if !hit.insert(l) {
                            bijection = false;
                        }
                    }
                    done.extend(orbit);
                }
            }
            if hit != cosets {
                bijection = false;
            }
        }
        let equal = bijection && lhs == rhs;
        Ok(NaturalReport { lhs, rhs, bijection, orbits, double_cosets, equal })
    }

    /// Writes `m = γ⁻¹·g_j·k` with `γ ∈ G₊`, `k ∈ K`; returns `(j, γ)`.
    fn decompose(&self, m: &Matrix) -> Result<(usize, Matrix)> {
        let sp = &self.space;
        for (j, c) in self.datum.components.iter().enumerate() {
            for gamma in self.plus.elems() {
                if self.k.contains(&sp.mul(&sp.mul(&c.g_inv, gamma), m)) {
                    return Ok((j, gamma.clone()));
                }
            }
        }
        invalid("element outside every double coset G₊g_jK")
    }
}

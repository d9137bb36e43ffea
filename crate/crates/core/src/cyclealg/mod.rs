//! Formal special-cycle calculus over finite orbit data.
//!
//! A cycle symbol is `[Z(W)]_j · c^k`: a totally positive subspace `W` read modulo the
//! group of component `j`, times a power of the co-tautological class. Products follow
//! the double-coset rule, with pointwise stabilizers throughout.

mod natural;
mod pullback;
mod weighted;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num::{One, Zero};
use rayon::prelude::*;

use crate::arith::{qf, Q};
use crate::error::{invalid, Error, Result};
use crate::ffs::CoefficientRing;
use crate::linalg::{self, Mat};
use crate::numberfield::{FieldElem, NumberField};
use crate::symcone::SymMat;

pub use natural::{AdelicSurrogate, NaturalReport};
pub use pullback::Pullback;
pub use weighted::{check_series_product, CheckReport, WeightFunction};

pub type Matrix = Mat<FieldElem>;
/// `n` vectors of `V`, in coordinates.
pub type Frame = Vec<Vec<FieldElem>>;

/// Groups are enumerated in full; this caps the closure.
pub const MAX_GROUP_ORDER: usize = 4096;

/// A totally positive definite quadratic space `(V, Q)` with `Q(x) = ½ xᵗGx`, carrying the
/// grading multiplier `d₊`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadSpace {
    field: Arc<NumberField>,
    gram: Matrix,
    d_plus: u32,
}

impl QuadSpace {
    pub fn new(field: Arc<NumberField>, gram: Matrix, d_plus: u32) -> Result<Self> {
        let n = gram.len();
        if gram.iter().any(|r| r.len() != n) {
            return invalid("Gram matrix is not square");
        }
        if d_plus == 0 {
            return invalid("d_plus must be positive");
        }
        if n > 0 && !SymMat::from_rows(gram.clone())?.is_totally_pd(&field) {
            return invalid("Gram matrix is not totally positive definite");
        }
        Ok(QuadSpace { field, gram, d_plus })
    }

    pub fn from_rational(field: Arc<NumberField>, gram: &[Vec<Q>], d_plus: u32) -> Result<Self> {
        let g = gram.iter().map(|r| r.iter().map(|x| field.from_q(x)).collect()).collect();
        QuadSpace::new(field, g, d_plus)
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn d_plus(&self) -> u32 {
        self.d_plus
    }

    pub fn pairing(&self, x: &[FieldElem], y: &[FieldElem]) -> FieldElem {
        let f = &*self.field;
        linalg::dot(f, x, &linalg::mat_vec(f, &self.gram, y))
    }

    /// `Q(x) = ½((x_a, x_b))`.
    pub fn frame_gram(&self, x: &[Vec<FieldElem>]) -> SymMat {
        let f = &*self.field;
        let n = x.len();
        let mut e = Vec::with_capacity(n * n);
        for a in x {
            for b in x {
                e.push(f.scale(&self.pairing(a, b), &qf(1, 2)));
            }
        }
        SymMat::new(n, e).expect("Gram matrices are symmetric")
    }

    pub fn is_isometry(&self, m: &Matrix) -> bool {
        let f = &*self.field;
        let n = self.dim();
        if m.len() != n || m.iter().any(|r| r.len() != n) {
            return false;
        }
        let mt = linalg::transpose(m);
        linalg::mat_mul(f, &linalg::mat_mul(f, &mt, &self.gram), m) == self.gram
    }

    pub(crate) fn check_vector(&self, v: &[FieldElem]) -> Result<()> {
        if v.len() != self.dim() {
            return invalid(format!("vector of length {} in a space of dimension {}", v.len(), self.dim()));
        }
        Ok(())
    }

    /// Basis of `U^⊥` for `U` spanned by the given rows.
    pub fn orthogonal_complement(&self, rows: &[Vec<FieldElem>]) -> Matrix {
        let f = &*self.field;
        let bg = linalg::mat_mul(f, &rows.to_vec(), &self.gram);
        linalg::nullspace(f, &bg, self.dim())
    }

    pub(crate) fn apply(&self, m: &Matrix, v: &[FieldElem]) -> Vec<FieldElem> {
        linalg::mat_vec(&*self.field, m, v)
    }

    pub(crate) fn apply_frame(&self, m: &Matrix, x: &[Vec<FieldElem>]) -> Frame {
        x.iter().map(|v| self.apply(m, v)).collect()
    }

    pub(crate) fn mul(&self, a: &Matrix, b: &Matrix) -> Matrix {
        linalg::mat_mul(&*self.field, a, b)
    }

    pub(crate) fn inverse(&self, a: &Matrix) -> Result<Matrix> {
        linalg::inverse(&*self.field, a).ok_or_else(|| Error::Validation("matrix is not invertible".into()))
    }

    pub(crate) fn identity(&self) -> Matrix {
        linalg::identity(&*self.field, self.dim())
    }
}

/// A finite group of isometries, stored as its sorted element list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    elems: Vec<Matrix>,
}

impl FiniteGroup {
    /// The subgroup generated by `gens`; every generator must be an isometry.
    pub fn generate(space: &QuadSpace, gens: &[Matrix]) -> Result<Self> {
        for g in gens {
            if !space.is_isometry(g) {
                return invalid("group generator does not preserve the Gram matrix");
            }
        }
        let mut elems: BTreeSet<Matrix> = BTreeSet::new();
        let id = space.identity();
        elems.insert(id.clone());
        let mut frontier = vec![id];
        while let Some(a) = frontier.pop() {
            for g in gens {
                let p = space.mul(g, &a);
                if elems.insert(p.clone()) {
                    if elems.len() > MAX_GROUP_ORDER {
                        return invalid(format!("group has more than {MAX_GROUP_ORDER} elements"));
                    }
                    frontier.push(p);
                }
            }
        }
        Ok(FiniteGroup { elems: elems.into_iter().collect() })
    }

    /// Treats `elems` as a complete element list and checks closure.
    pub fn from_elements(space: &QuadSpace, elems: &[Matrix]) -> Result<Self> {
        let g = FiniteGroup::generate(space, elems)?;
        if g.order() != elems.iter().collect::<BTreeSet<_>>().len() {
            return invalid("element list is not closed under products");
        }
        Ok(g)
    }

    pub fn trivial(space: &QuadSpace) -> Self {
        FiniteGroup { elems: vec![space.identity()] }
    }

    pub fn elems(&self) -> &[Matrix] {
        &self.elems
    }

    pub fn order(&self) -> usize {
        self.elems.len()
    }

    pub fn contains(&self, m: &Matrix) -> bool {
        self.elems.binary_search(m).is_ok()
    }

    fn filtered(&self, keep: impl Fn(&Matrix) -> bool) -> FiniteGroup {
        FiniteGroup { elems: self.elems.iter().filter(|m| keep(m)).cloned().collect() }
    }

    fn mapped(&self, f: impl Fn(&Matrix) -> Matrix) -> FiniteGroup {
        let set: BTreeSet<Matrix> = self.elems.iter().map(f).collect();
        FiniteGroup { elems: set.into_iter().collect() }
    }
}

/// A subspace of `F^N`, stored by its reduced row-echelon basis.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: Matrix,
}

impl Subspace {
    pub fn span(f: &NumberField, ambient: usize, vectors: &[Vec<FieldElem>]) -> Self {
        let basis = if vectors.is_empty() { Vec::new() } else { linalg::rref(f, vectors).0 };
        Subspace { ambient, basis }
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn image(&self, f: &NumberField, m: &Matrix) -> Subspace {
        let v: Matrix = self.basis.iter().map(|b| linalg::mat_vec(f, m, b)).collect();
        Subspace::span(f, self.ambient, &v)
    }

    pub fn contains(&self, f: &NumberField, v: &[FieldElem]) -> bool {
        v.iter().all(|x| x.is_zero()) || linalg::coordinates_in(f, &self.basis, v).is_some()
    }

    fn fixed_by(&self, f: &NumberField, m: &Matrix) -> bool {
        self.basis.iter().all(|b| &linalg::mat_vec(f, m, b) == b)
    }
}

impl fmt::Display for Subspace {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "<")?;
        for (i, b) in self.basis.iter().enumerate() {
            if i > 0 {
                write!(out, ", ")?;
            }
            write!(out, "(")?;
            for (k, x) in b.iter().enumerate() {
                if k > 0 {
                    write!(out, ", ")?;
                }
                write!(out, "{x}")?;
            }
            write!(out, ")")?;
        }
        write!(out, ">")
    }
}

/// `[Z(W)]_j · c^k`, with `W` the minimal representative of its orbit under `Γ_j`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol {
    pub component: usize,
    pub space: Subspace,
    pub c_power: u32,
}

impl Symbol {
    /// Codimension in units of `d₊`.
    pub fn degree(&self) -> u32 {
        self.space.dim() as u32 + self.c_power
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "[Z{}]_{}·c^{}", self.space, self.component, self.c_power)
    }
}

/// Finite rational combination of cycle symbols.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CycleClass {
    terms: BTreeMap<Symbol, Q>,
}

impl CycleClass {
    pub fn zero() -> Self {
        CycleClass::default()
    }

    pub fn from_symbol(s: Symbol, c: Q) -> Self {
        let mut out = CycleClass::zero();
        out.push(s, c);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Symbol, &Q)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, s: &Symbol) -> Q {
        self.terms.get(s).cloned().unwrap_or_else(Q::zero)
    }

    pub(crate) fn push(&mut self, s: Symbol, c: Q) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(s.clone()).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&s);
        }
    }

    pub fn add(&self, o: &CycleClass) -> CycleClass {
        let mut out = self.clone();
        for (s, c) in &o.terms {
            out.push(s.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> CycleClass {
        CycleClass { terms: self.terms.iter().map(|(s, c)| (s.clone(), -c)).collect() }
    }

    pub fn sub(&self, o: &CycleClass) -> CycleClass {
        self.add(&o.neg())
    }

    pub fn scale(&self, k: &Q) -> CycleClass {
        if k.is_zero() {
            return CycleClass::zero();
        }
        CycleClass { terms: self.terms.iter().map(|(s, c)| (s.clone(), c * k)).collect() }
    }

    /// Common codimension `(dim W + k)·d₊` of all terms; `None` for the zero class or an
    /// inhomogeneous sum.
    pub fn grading(&self, d_plus: u32) -> Option<u32> {
        let mut it = self.terms.keys().map(|s| s.degree());
        let first = it.next()?;
        it.all(|d| d == first).then_some(first * d_plus)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.grading(1).is_some() || self.is_zero()
    }
}

impl fmt::Display for CycleClass {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(out, "0");
        }
        for (i, (s, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(out, " + ")?;
            }
            if c.is_one() {
                write!(out, "{s}")?;
            } else {
                write!(out, "({c})·{s}")?;
            }
        }
        Ok(())
    }
}

/// One component `Γ_j \ D` of the finite model, with its label `g_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct Component {
    pub group: FiniteGroup,
    pub g: Matrix,
    pub g_inv: Matrix,
}

/// A quadratic space with finitely many components, each carrying a finite group `Γ_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitDatum {
    space: QuadSpace,
    components: Vec<Component>,
}

impl OrbitDatum {
    /// One component with `g = 1` and `Γ` generated by `gens`.
    pub fn new(space: QuadSpace, gens: &[Matrix]) -> Result<Self> {
        let group = FiniteGroup::generate(&space, gens)?;
        let id = space.identity();
        Ok(OrbitDatum { space, components: vec![Component { group, g: id.clone(), g_inv: id }] })
    }

    /// Components given as `(generators of Γ_j, g_j)`; each `g_j` must be an isometry.
    pub fn with_components(space: QuadSpace, comps: &[(Vec<Matrix>, Matrix)]) -> Result<Self> {
        if comps.is_empty() {
            return invalid("an orbit datum needs at least one component");
        }
        let mut components = Vec::with_capacity(comps.len());
        for (gens, g) in comps {
            if !space.is_isometry(g) {
                return invalid("component label g_j is not an isometry");
            }
            let group = FiniteGroup::generate(&space, gens)?;
            let g_inv = space.inverse(g)?;
            components.push(Component { group, g: g.clone(), g_inv });
        }
        Ok(OrbitDatum { space, components })
    }

    pub(crate) fn from_parts(space: QuadSpace, components: Vec<Component>) -> Self {
        OrbitDatum { space, components }
    }

    pub fn space(&self) -> &QuadSpace {
        &self.space
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.space.field
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    fn component(&self, j: usize) -> Result<&Component> {
        self.components.get(j).ok_or_else(|| Error::Validation(format!("no component {j}")))
    }

    pub fn span(&self, vectors: &[Vec<FieldElem>]) -> Result<Subspace> {
        for v in vectors {
            self.space.check_vector(v)?;
        }
        Ok(Subspace::span(self.field(), self.space.dim(), vectors))
    }

    /// Elements of `Γ_j` fixing `W` pointwise.
    pub fn pointwise_stabilizer(&self, j: usize, w: &Subspace) -> Result<Vec<&Matrix>> {
        let f = &**self.field();
        Ok(self.component(j)?.group.elems.iter().filter(|m| w.fixed_by(f, m)).collect())
    }

    /// Neatness surrogate: every element preserving `W` must fix it pointwise.
    pub fn check_neat(&self, j: usize, w: &Subspace) -> Result<()> {
        let f = &**self.field();
        for m in &self.component(j)?.group.elems {
            if !w.fixed_by(f, m) && &w.image(f, m) == w {
                return Err(Error::Neatness(w.to_string()));
            }
        }
        Ok(())
    }

    /// Minimal member of the `Γ_j`-orbit of `W`.
    pub fn canonical(&self, j: usize, w: &Subspace) -> Result<Subspace> {
        let f = &**self.field();
        let c = self.component(j)?;
        Ok(c.group.elems.iter().map(|m| w.image(f, m)).min().expect("groups contain the identity"))
    }

    /// The validated symbol `[Z(W)]_j · c^k`.
    pub fn symbol(&self, j: usize, w: &Subspace, k: u32) -> Result<Symbol> {
        if w.ambient() != self.space.dim() {
            return invalid("subspace lives in a space of another dimension");
        }
        self.check_neat(j, w)?;
        Ok(Symbol { component: j, space: self.canonical(j, w)?, c_power: k })
    }

    /// `[Z(x)] = [Z(W(x))]·c^{n − r(x)}` on component `j`.
    pub fn connected_cycle(&self, j: usize, x: &[Vec<FieldElem>]) -> Result<CycleClass> {
        let w = self.span(x)?;
        let k = x.len() - w.dim();
        Ok(CycleClass::from_symbol(self.symbol(j, &w, k as u32)?, Q::one()))
    }

    /// `c^k` on component `j`.
    pub fn c_power(&self, j: usize, k: u32) -> Result<CycleClass> {
        self.component(j)?;
        Ok(CycleClass::from_symbol(Symbol { component: j, space: Subspace::zero(self.space.dim()), c_power: k }, Q::one()))
    }

    /// The fundamental class `Σ_j [Z(0)]_j`.
    pub fn unit(&self) -> CycleClass {
        let mut out = CycleClass::zero();
        for j in 0..self.components.len() {
            out.push(Symbol { component: j, space: Subspace::zero(self.space.dim()), c_power: 0 }, Q::one());
        }
        out
    }

    pub(crate) fn check_class(&self, a: &CycleClass) -> Result<()> {
        for s in a.terms.keys() {
            self.component(s.component)?;
            if s.space.ambient() != self.space.dim() {
                return invalid("cycle symbol belongs to a space of another dimension");
            }
        }
        Ok(())
    }

    /// `Γ`-orbits on `Γ/Γ_{U₁} × Γ/Γ_{U₂}`, as pairs of frames `(B₁, γB₂)`, one per orbit.
    pub fn double_orbits(&self, j: usize, u1: &Subspace, u2: &Subspace) -> Result<Vec<(Matrix, Matrix)>> {
        let f = &**self.field();
        let c = self.component(j)?;
        let cosets: BTreeSet<Matrix> =
            c.group.elems.iter().map(|g| u2.basis.iter().map(|b| linalg::mat_vec(f, g, b)).collect()).collect();
        let stab = self.pointwise_stabilizer(j, u1)?;
        let mut seen: BTreeSet<&Matrix> = BTreeSet::new();
        let mut out = Vec::new();
        for t in &cosets {
            if seen.contains(t) {
                continue;
            }
            for h in &stab {
                let ht: Matrix = t.iter().map(|v| linalg::mat_vec(f, h, v)).collect();
                let key = cosets.get(&ht).expect("cosets are Γ-stable");
                seen.insert(key);
            }
            out.push((u1.basis.clone(), t.clone()));
        }
        Ok(out)
    }

    fn intersect_symbols(&self, a: &Symbol, b: &Symbol) -> Result<CycleClass> {
        let mut out = CycleClass::zero();
        if a.component != b.component {
            return Ok(out);
        }
        let j = a.component;
        let f = &**self.field();
        let group = &self.component(j)?.group;
        for (b1, t2) in self.double_orbits(j, &a.space, &b.space)? {
            let mut v = b1.clone();
            v.extend(t2.iter().cloned());
            let w = Subspace::span(f, self.space.dim(), &v);
            // the stabilizer of the pair of cosets is the pointwise stabilizer of W
            let pair: Vec<&Matrix> = group
                .elems
                .iter()
                .filter(|m| b1.iter().chain(&t2).all(|x| &linalg::mat_vec(f, m, x) == x))
                .collect();
            if pair != self.pointwise_stabilizer(j, &w)? {
                return invalid(format!("pair stabilizer differs from the stabilizer of {w}"));
            }
            let k = a.space.dim() + b.space.dim() - w.dim() + (a.c_power + b.c_power) as usize;
            out.push(self.symbol(j, &w, k as u32)?, Q::one());
        }
        Ok(out)
    }

    /// The intersection product, extended bilinearly.
    pub fn intersect(&self, a: &CycleClass, b: &CycleClass) -> Result<CycleClass> {
        self.check_class(a)?;
        self.check_class(b)?;
        let pairs: Vec<(&Symbol, &Q, &Symbol, &Q)> =
            a.terms.iter().flat_map(|(s, c)| b.terms.iter().map(move |(t, d)| (s, c, t, d))).collect();
        let parts: Vec<CycleClass> = pairs
            .par_iter()
            .map(|(s, c, t, d)| Ok(self.intersect_symbols(s, t)?.scale(&(*c * *d))))
            .collect::<Result<_>>()?;
        Ok(parts.iter().fold(CycleClass::zero(), |acc, p| acc.add(p)))
    }

    /// Relabels everything by an isometry `η`: `Γ_j ↦ ηΓ_jη⁻¹`, `g_j ↦ ηg_jη⁻¹`.
    pub fn conjugate(&self, eta: &Matrix) -> Result<OrbitDatum> {
        if !self.space.is_isometry(eta) {
            return invalid("η is not an isometry");
        }
        let inv = self.space.inverse(eta)?;
        let conj = |m: &Matrix| self.space.mul(&self.space.mul(eta, m), &inv);
        let components = self
            .components
            .iter()
            .map(|c| Component { group: c.group.mapped(conj), g: conj(&c.g), g_inv: conj(&c.g_inv) })
            .collect();
        Ok(OrbitDatum { space: self.space.clone(), components })
    }

    /// Image of a class of `self` under `η`, as a class of `self.conjugate(η)`.
    pub fn transport(&self, target: &OrbitDatum, eta: &Matrix, a: &CycleClass) -> Result<CycleClass> {
        let f = &**self.field();
        let mut out = CycleClass::zero();
        for (s, c) in &a.terms {
            let w = s.space.image(f, eta);
            out.push(target.symbol(s.component, &w, s.c_power)?, c.clone());
        }
        Ok(out)
    }
}

/// Cycle classes of one orbit datum as a coefficient ring.
#[derive(Clone, Debug)]
pub struct CycleRing {
    datum: Arc<OrbitDatum>,
}

impl CycleRing {
    pub fn new(datum: Arc<OrbitDatum>) -> Self {
        CycleRing { datum }
    }

    pub fn datum(&self) -> &Arc<OrbitDatum> {
        &self.datum
    }
}

impl CoefficientRing for CycleRing {
    type Elem = CycleClass;

    fn zero(&self) -> CycleClass {
        CycleClass::zero()
    }

    fn one(&self) -> CycleClass {
        self.datum.unit()
    }

    fn add(&self, a: &CycleClass, b: &CycleClass) -> CycleClass {
        a.add(b)
    }

    fn neg(&self, a: &CycleClass) -> CycleClass {
        a.neg()
    }

    fn mul(&self, a: &CycleClass, b: &CycleClass) -> Result<CycleClass> {
        self.datum.intersect(a, b)
    }

    fn is_zero(&self, a: &CycleClass) -> bool {
        a.is_zero()
    }

    fn same_ring(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.datum, &other.datum) || self.datum == other.datum
    }
}

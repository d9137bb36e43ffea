//! Totally positive definite even `O_F`-lattices: representation numbers, theta
//! expansions, discriminant groups, and the orthogonal-sum and diagonal-restriction
//! identities.

pub mod numeric;
pub mod reduce;

use std::collections::BTreeMap;
use std::sync::Arc;

use num::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith::{floor, is_integer, qi, qz, Q, Z};
use crate::error::{invalid, Error, Result};
use crate::ffs::{FormalSeries, RationalRing};
use crate::linalg::{self, Mat};
use crate::numberfield::{FieldElem, NumberField};
use crate::symcone::{ConeLattice, SymMat};

pub use numeric::{numeric_eval, q_power, whittaker_factor, Evaluation, TailModel, TauPoint};
pub use reduce::Enumerator;

/// `L = O_F^r` with bilinear form `(x, y) = xᵗ·G·y`.
#[derive(Clone, Debug)]
pub struct QuadLattice {
    field: Arc<NumberField>,
    gram: Vec<Vec<FieldElem>>,
    zgram: Mat<Q>,
    enumerator: Enumerator,
}

/// A lattice vector with its cached data.
#[derive(Clone, Debug)]
struct LatVec {
    x: Vec<FieldElem>,
    gx: Vec<FieldElem>,
    q: FieldElem,
    height: Q,
}

/// An `n`-tuple of elements of `L^∨`, read modulo `Lⁿ`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coset {
    pub vecs: Vec<Vec<FieldElem>>,
}

impl QuadLattice {
    pub fn new(field: Arc<NumberField>, gram: Vec<Vec<FieldElem>>) -> Result<Self> {
        let f = &*field;
        let r = gram.len();
        if gram.iter().any(|row| row.len() != r) {
            return invalid("lattice Gram matrix is not square");
        }
        if r > 0 {
            let s = SymMat::from_rows(gram.clone())?;
            if !s.is_totally_pd(f) {
                return invalid("lattice Gram matrix is not totally positive definite");
            }
        }
        for i in 0..r {
            if !f.is_integral(&f.scale(&gram[i][i], &reduce::half())) {
                return invalid("lattice is not even: a diagonal Gram entry is not in 2·O_F");
            }
            for k in 0..r {
                if !f.is_integral(&gram[i][k]) {
                    return invalid("lattice Gram matrix has a non-integral entry");
                }
            }
        }
        let d = f.degree();
        let mut zgram = vec![vec![Q::zero(); r * d]; r * d];
        for i in 0..r {
            for k in 0..d {
                for i2 in 0..r {
                    for k2 in 0..d {
                        let e = f.mul(&f.mul(&f.basis_elem(k), &f.basis_elem(k2)), &gram[i][i2]);
                        zgram[i * d + k][i2 * d + k2] = f.trace(&e);
                    }
                }
            }
        }
        let enumerator = Enumerator::new(&zgram);
        Ok(QuadLattice { field, gram, zgram, enumerator })
    }

    /// Lattice from rational Gram entries (embedded via `q ↦ q·1`).
    pub fn from_rational(field: Arc<NumberField>, gram: &[Vec<Q>]) -> Result<Self> {
        let g = gram.iter().map(|r| r.iter().map(|x| field.from_q(x)).collect()).collect();
        QuadLattice::new(field, g)
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<FieldElem>] {
        &self.gram
    }

    /// Gram matrix of the trace form on the `ℤ`-basis `e_i·b_k`.
    pub fn z_gram(&self) -> &Mat<Q> {
        &self.zgram
    }

    pub fn enumerator(&self) -> &Enumerator {
        &self.enumerator
    }

    pub fn pairing(&self, x: &[FieldElem], y: &[FieldElem]) -> FieldElem {
        let f = &*self.field;
        let gy = self.apply_gram(y);
        x.iter().zip(&gy).fold(f.zero(), |acc, (a, b)| f.add(&acc, &f.mul(a, b)))
    }

    fn apply_gram(&self, y: &[FieldElem]) -> Vec<FieldElem> {
        let f = &*self.field;
        self.gram.iter().map(|row| row.iter().zip(y).fold(f.zero(), |acc, (g, b)| f.add(&acc, &f.mul(g, b)))).collect()
    }

    /// `Q(x) = ½(x, x)`.
    pub fn q_value(&self, x: &[FieldElem]) -> FieldElem {
        self.field.scale(&self.pairing(x, x), &reduce::half())
    }

    /// Gram matrix `Q(x) = ½((x_a, x_b))` of a frame.
    pub fn frame_gram(&self, frame: &[Vec<FieldElem>]) -> SymMat {
        let f = &*self.field;
        let n = frame.len();
        let mut entries = Vec::with_capacity(n * n);
        for a in frame {
            for b in frame {
                entries.push(f.scale(&self.pairing(a, b), &reduce::half()));
            }
        }
        SymMat::new(n, entries).expect("symmetric")
    }

    pub fn orthogonal_sum(&self, o: &QuadLattice) -> Result<QuadLattice> {
        self.field.ensure_same(&o.field)?;
        let f = &*self.field;
        let (r0, r1) = (self.rank(), o.rank());
        let mut g = vec![vec![f.zero(); r0 + r1]; r0 + r1];
        for i in 0..r0 {
            for k in 0..r0 {
                g[i][k] = self.gram[i][k].clone();
            }
        }
        for i in 0..r1 {
            for k in 0..r1 {
                g[r0 + i][r0 + k] = o.gram[i][k].clone();
            }
        }
        QuadLattice::new(self.field.clone(), g)
    }

    fn z_coords(&self, x: &[FieldElem]) -> Vec<Q> {
        x.iter().flat_map(|e| e.coords.iter().cloned()).collect()
    }

    fn from_z_coords(&self, z: &[Q]) -> Vec<FieldElem> {
        let d = self.field.degree();
        z.chunks(d).map(|c| FieldElem::new(c.to_vec())).collect()
    }

    /// Whether `x ∈ L^∨`, i.e. `(x, L) ⊆ δ_F⁻¹`.
    pub fn in_dual(&self, x: &[FieldElem]) -> bool {
        if x.len() != self.rank() {
            return false;
        }
        let z = self.z_coords(x);
        linalg::mat_vec(&linalg::Rationals, &self.zgram, &z).iter().all(is_integer)
    }

    /// Validates an `n`-tuple of dual vectors; the stored representative is reduced into
    /// the half-open unit box in `ℤ`-coordinates.
    pub fn coset(&self, vecs: Vec<Vec<FieldElem>>) -> Result<Coset> {
        if vecs.is_empty() {
            return invalid("a coset needs at least one component");
        }
        for v in &vecs {
            if !self.in_dual(v) {
                return invalid("coset component is not in the dual lattice");
            }
        }
        Ok(Coset { vecs: vecs.iter().map(|v| self.reduce(v)).collect() })
    }

    pub fn zero_coset(&self, n: usize) -> Coset {
        Coset { vecs: vec![vec![self.field.zero(); self.rank()]; n] }
    }

    fn reduce(&self, v: &[FieldElem]) -> Vec<FieldElem> {
        let z: Vec<Q> = self.z_coords(v).iter().map(|c| c - qz(floor(c))).collect();
        self.from_z_coords(&z)
    }

    /// All vectors of `μ + L` with `tr Q(x) ≤ b`, by height.
    fn vectors(&self, mu: Option<&[FieldElem]>, b: &Q) -> Vec<LatVec> {
        let f = &*self.field;
        let shift = match mu {
            Some(m) => self.z_coords(m),
            None => vec![Q::zero(); self.zgram.len()],
        };
        self.enumerator
            .shifted_points(&shift, &(b * reduce::two()))
            .into_iter()
            .map(|(norm, z)| {
                let x = self.from_z_coords(&z);
                let gx = self.apply_gram(&x);
                let pair = x.iter().zip(&gx).fold(f.zero(), |acc, (a, c)| f.add(&acc, &f.mul(a, c)));
                LatVec { q: f.scale(&pair, &reduce::half()), gx, x, height: norm * reduce::half() }
            })
            .collect()
    }

    fn check_genus(&self, n: usize, mu: Option<&Coset>) -> Result<()> {
        if n == 0 {
            return invalid("genus must be at least 1");
        }
        if let Some(c) = mu {
            if c.vecs.len() != n {
                return invalid(format!("coset has {} components, genus is {n}", c.vecs.len()));
            }
            if c.vecs.iter().any(|v| !self.in_dual(v)) {
                return invalid("coset component is not in the dual lattice");
            }
        }
        Ok(())
    }

    /// `#{x ∈ μ + Lⁿ : Q(x) = T}`. Non-PSD `T` gives 0, or an error when `strict`.
    pub fn representation_number(&self, n: usize, t: &SymMat, mu: Option<&Coset>, strict: bool) -> Result<u64> {
        self.check_genus(n, mu)?;
        let f = &*self.field;
        if t.n() != n {
            return invalid(format!("matrix has genus {}, expected {n}", t.n()));
        }
        if !t.is_totally_psd(f) {
            return if strict { invalid(format!("{t} is not totally positive semidefinite")) } else { Ok(0) };
        }
        let cands: Vec<Vec<LatVec>> = (0..n)
            .map(|a| {
                let h = f.trace(t.get(a, a));
                self.vectors(mu.map(|c| c.vecs[a].as_slice()), &h).into_iter().filter(|v| &v.q == t.get(a, a)).collect()
            })
            .collect();
        let two_t: Vec<Vec<FieldElem>> = (0..n).map(|a| (0..n).map(|b| f.scale(t.get(a, b), &reduce::two())).collect()).collect();
        let mut chosen: Vec<&LatVec> = Vec::with_capacity(n);
        Ok(count_frames(f, &cands, &two_t, &mut chosen))
    }

    /// The level `ν` making `Q(μ + Lⁿ) ⊆ ν⁻¹·S_F^∨` minimal.
    pub fn minimal_level(&self, n: usize, mu: Option<&Coset>) -> Result<u64> {
        self.check_genus(n, mu)?;
        Ok(match mu {
            None => 1,
            Some(c) => ConeLattice::minimal_level(&self.field, [&self.frame_gram(&c.vecs)]),
        })
    }

    /// `θ(τ) = Σ_{x ∈ μ + Lⁿ} q^{Q(x)}` up to height `b`.
    pub fn theta_expansion(&self, n: usize, mu: Option<&Coset>, nu: Option<u64>, b: &Q) -> Result<FormalSeries<RationalRing>> {
        let min = self.minimal_level(n, mu)?;
        let nu = nu.unwrap_or(min);
        if nu == 0 || nu % min != 0 {
            return invalid(format!("level {nu} does not contain the values of Q on the coset; need a multiple of {min}"));
        }
        let cone = ConeLattice::new(self.field.clone(), n, nu)?;
        let counts = self.frame_counts(n, mu, b);
        FormalSeries::from_terms(cone, RationalRing, b.clone(), counts.into_iter().map(|(t, c)| (t, Q::from_integer(Z::from(c)))))
    }

    /// Frame counts by Gram matrix for all frames of height at most `b`.
    fn frame_counts(&self, n: usize, mu: Option<&Coset>, b: &Q) -> BTreeMap<SymMat, u64> {
        let f = &*self.field;
        let lists: Vec<Vec<LatVec>> = (0..n).map(|a| self.vectors(mu.map(|c| c.vecs[a].as_slice()), b)).collect();
        let parts: Vec<BTreeMap<SymMat, u64>> = lists[0]
            .par_iter()
            .map(|first| {
                let mut acc = BTreeMap::new();
                let mut chosen = vec![first];
                extend_frames(f, &lists, b, first.height.clone(), &mut chosen, &mut acc);
                acc
            })
            .collect();
        let mut total = BTreeMap::new();
        for p in parts {
            for (t, c) in p {
                *total.entry(t).or_insert(0) += c;
            }
        }
        total
    }

    /// Box-count tail model for theta series of this lattice in genus `n`.
    pub fn tail_model(&self, n: usize) -> TailModel {
        if self.rank() == 0 {
            TailModel::Exact
        } else {
            TailModel::LatticeCount { pivots: self.enumerator.pivots().to_vec(), genus: n }
        }
    }

    /// `L^∨/L` via the Smith form of the `ℤ`-Gram matrix.
    pub fn discriminant_group(&self) -> DiscriminantGroup {
        let nz = self.zgram.len();
        let zg: Mat<Z> = self.zgram.iter().map(|r| r.iter().map(|x| x.to_integer()).collect()).collect();
        let smith = linalg::smith_normal_form(&zg);
        let mut invariants = Vec::new();
        let mut generators = Vec::new();
        for i in 0..nz {
            let s = smith.diag[i].abs();
            if s.is_one() {
                continue;
            }
            let col: Vec<Q> = (0..nz).map(|r| Q::new(smith.v[r][i].clone(), s.clone())).collect();
            generators.push(self.reduce(&self.from_z_coords(&col)));
            invariants.push(s);
        }
        let order = invariants.iter().fold(Z::one(), |a, b| a * b);
        DiscriminantGroup { lattice_rank: self.rank(), field: self.field.clone(), invariants, generators, order }
    }
}

fn count_frames<'a>(f: &NumberField, cands: &'a [Vec<LatVec>], two_t: &[Vec<FieldElem>], chosen: &mut Vec<&'a LatVec>) -> u64 {
    let a = chosen.len();
    if a == cands.len() {
        return 1;
    }
    let mut total = 0;
    for v in &cands[a] {
        let ok = chosen.iter().enumerate().all(|(b, w)| {
            let p = v.x.iter().zip(&w.gx).fold(f.zero(), |acc, (x, y)| f.add(&acc, &f.mul(x, y)));
            p == two_t[a][b]
        });
        if ok {
            chosen.push(v);
            total += count_frames(f, cands, two_t, chosen);
            chosen.pop();
        }
    }
    total
}

fn extend_frames<'a>(f: &NumberField, lists: &'a [Vec<LatVec>], b: &Q, used: Q, chosen: &mut Vec<&'a LatVec>, acc: &mut BTreeMap<SymMat, u64>) {
    let n = lists.len();
    if chosen.len() == n {
        let mut entries = vec![f.zero(); n * n];
        for a in 0..n {
            entries[a * n + a] = chosen[a].q.clone();
            for c in a + 1..n {
                let p = chosen[a].x.iter().zip(&chosen[c].gx).fold(f.zero(), |s, (x, y)| f.add(&s, &f.mul(x, y)));
                let h = f.scale(&p, &reduce::half());
                entries[a * n + c] = h.clone();
                entries[c * n + a] = h;
            }
        }
        *acc.entry(SymMat::new(n, entries).expect("symmetric")).or_insert(0) += 1;
        return;
    }
    for v in &lists[chosen.len()] {
        let h = &used + &v.height;
        if h > *b {
            break;
        }
        chosen.push(v);
        extend_frames(f, lists, b, h, chosen, acc);
        chosen.pop();
    }
}

/// `L^∨/L ≅ ⊕ ℤ/s_i` with generators given as vectors of `F^r`.
#[derive(Clone, Debug)]
pub struct DiscriminantGroup {
    lattice_rank: usize,
    field: Arc<NumberField>,
    pub invariants: Vec<Z>,
    pub generators: Vec<Vec<FieldElem>>,
    pub order: Z,
}

impl DiscriminantGroup {
    /// Every element, as reduced representatives in a fixed order.
    pub fn elements(&self) -> Vec<Vec<FieldElem>> {
        let f = &*self.field;
        let d = f.degree();
        let mut out = Vec::new();
        let sizes: Vec<u64> = self.invariants.iter().map(|s| s.to_u64().expect("small group")).collect();
        let mut idx = vec![0u64; sizes.len()];
        loop {
            let mut z = vec![Q::zero(); self.lattice_rank * d];
            for (g, &k) in self.generators.iter().zip(&idx) {
                let gz: Vec<Q> = g.iter().flat_map(|e| e.coords.iter().cloned()).collect();
                for (zi, gi) in z.iter_mut().zip(gz) {
                    *zi += gi * qi(k as i64);
                }
            }
            let red: Vec<Q> = z.iter().map(|c| c - qz(floor(c))).collect();
            out.push(red.chunks(d.max(1)).map(|c| FieldElem::new(c.to_vec())).collect());
            let mut p = 0;
            loop {
                if p == sizes.len() {
                    out.sort();
                    return out;
                }
                idx[p] += 1;
                if idx[p] < sizes[p] {
                    break;
                }
                idx[p] = 0;
                p += 1;
            }
        }
    }
}

/// `θ_{L0⊕L1} = θ_{L0}·θ_{L1}` up to height `b`.
pub fn check_orthogonal_sum_factorization(l0: &QuadLattice, l1: &QuadLattice, n: usize, b: &Q) -> Result<bool> {
    l0.field.ensure_same(&l1.field).map_err(|e| Error::ConeMismatch(e.to_string()))?;
    let sum = l0.orthogonal_sum(l1)?;
    let lhs = sum.theta_expansion(n, None, Some(1), b)?;
    let rhs = l0.theta_expansion(n, None, Some(1), b)?.multiply(&l1.theta_expansion(n, None, Some(1), b)?)?;
    Ok(lhs.eq_up_to_bound(&rhs))
}

/// Both sides of `Σ_{T = [[T1, *], [*, T2]]} r(T) = r(T1)·r(T2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictionReport {
    pub lhs: u64,
    pub rhs: u64,
    pub completions: usize,
}

impl RestrictionReport {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

pub fn check_diagonal_restriction(l: &QuadLattice, t1: &SymMat, t2: &SymMat) -> Result<RestrictionReport> {
    let (n1, n2) = (t1.n(), t2.n());
    let cone = ConeLattice::new(l.field.clone(), n1 + n2, 1)?;
    let blocks = cone.block_completions(t1, t2)?;
    let mut lhs = 0;
    for t in &blocks {
        lhs += l.representation_number(n1 + n2, t, None, true)?;
    }
    let rhs = l.representation_number(n1, t1, None, false)? * l.representation_number(n2, t2, None, false)?;
    Ok(RestrictionReport { lhs, rhs, completions: blocks.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::qf;

    fn qf_() -> Arc<NumberField> {
        Arc::new(NumberField::rationals())
    }

    fn z_gram2() -> QuadLattice {
        QuadLattice::from_rational(qf_(), &[vec![qi(2)]]).unwrap()
    }

    fn z2() -> QuadLattice {
        QuadLattice::from_rational(qf_(), &[vec![qi(2), qi(0)], vec![qi(0), qi(2)]]).unwrap()
    }

    fn m(f: &NumberField, rows: &[&[Q]]) -> SymMat {
        SymMat::from_rational(f, &rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn validation() {
        assert!(QuadLattice::from_rational(qf_(), &[vec![qi(1)]]).is_err());
        assert!(QuadLattice::from_rational(qf_(), &[vec![qi(-2)]]).is_err());
        assert!(QuadLattice::from_rational(qf_(), &[vec![qi(2), qf(1, 2)], vec![qf(1, 2), qi(2)]]).is_err());
    }

    #[test]
    fn representation_numbers() {
        let l = z_gram2();
        let f = l.field().clone();
        let r = |k: i64| l.representation_number(1, &m(&f, &[&[qi(k)]]), None, false).unwrap();
        assert_eq!((r(0), r(1), r(2), r(4)), (1, 2, 0, 2));
        let l2 = z2();
        let r2 = |k: i64| l2.representation_number(1, &m(&f, &[&[qi(k)]]), None, false).unwrap();
        assert_eq!((r2(1), r2(5)), (4, 8));
        let mu = l.coset(vec![vec![f.from_q(&qf(1, 2))]]).unwrap();
        assert_eq!(l.representation_number(1, &m(&f, &[&[qf(1, 4)]]), Some(&mu), false).unwrap(), 2);
        assert_eq!(l.representation_number(1, &m(&f, &[&[qi(-1)]]), None, false).unwrap(), 0);
        assert!(l.representation_number(1, &m(&f, &[&[qi(-1)]]), None, true).is_err());
    }

    #[test]
    fn theta_expansions() {
        let l = z_gram2();
        let f = l.field().clone();
        let th = l.theta_expansion(1, None, None, &qi(9)).unwrap();
        let got: Vec<(Q, Q)> = th.terms().map(|(p, c)| (p.height.clone(), c.clone())).collect();
        assert_eq!(got, vec![(qi(0), qi(1)), (qi(1), qi(2)), (qi(4), qi(2)), (qi(9), qi(2))]);
        let th2 = z2().theta_expansion(1, None, None, &qi(2)).unwrap();
        let got: Vec<Q> = th2.terms().map(|(_, c)| c.clone()).collect();
        assert_eq!(got, vec![qi(1), qi(4), qi(4)]);
        let mu = l.coset(vec![vec![f.from_q(&qf(1, 2))]]).unwrap();
        assert_eq!(l.minimal_level(1, Some(&mu)).unwrap(), 4);
        let thm = l.theta_expansion(1, Some(&mu), None, &qi(3)).unwrap();
        assert_eq!(thm.coeff(&m(&f, &[&[qf(9, 4)]])), qi(2));
        assert!(l.theta_expansion(1, Some(&mu), Some(2), &qi(3)).is_err());
    }

    #[test]
    fn factorization_and_restriction() {
        let l = z_gram2();
        assert!(check_orthogonal_sum_factorization(&l, &l, 1, &qi(10)).unwrap());
        let empty = QuadLattice::from_rational(qf_(), &[]).unwrap();
        assert!(check_orthogonal_sum_factorization(&l, &empty, 1, &qi(10)).unwrap());
        let f = l.field().clone();
        let one = m(&f, &[&[qi(1)]]);
        let rep = check_diagonal_restriction(&l, &one, &one).unwrap();
        assert_eq!((rep.lhs, rep.rhs), (4, 4));
        let zero = m(&f, &[&[qi(0)]]);
        let rep = check_diagonal_restriction(&l, &one, &zero).unwrap();
        assert_eq!((rep.lhs, rep.rhs), (2, 2));
    }

    #[test]
    fn discriminant_groups() {
        let g = z_gram2().discriminant_group();
        assert_eq!(g.order, Z::from(2));
        let els = g.elements();
        assert_eq!(els.len(), 2);
        assert_eq!(els[1][0].coords[0], qf(1, 2));
        let g2 = z2().discriminant_group();
        assert_eq!(g2.invariants, vec![Z::from(2), Z::from(2)]);
        let e8ish = QuadLattice::from_rational(qf_(), &[vec![qi(2), qi(1)], vec![qi(1), qi(2)]]).unwrap();
        assert_eq!(e8ish.discriminant_group().order, Z::from(3));
    }
}

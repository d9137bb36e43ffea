//! Symmetric matrices over `F`, the totally positive semidefinite cone, the lattices
//! `S_F = Sym_n(O_F)` and its trace dual, bounded cone enumeration, unit-group orbits
//! and the standard kernel test.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use num::{One, Signed, Zero};
use rayon::prelude::*;

use crate::arith::{ceil, floor, is_integer, qi, sqrt_upper, Interval, Q, Z};
use crate::error::{invalid, Error, Result};
use crate::linalg::{self, Mat, Rationals};
use crate::numberfield::{FieldElem, NumberField};

/// Symmetric `n×n` matrix with entries in `F`, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymMat {
    n: usize,
    entries: Vec<FieldElem>,
}

impl SymMat {
    pub fn new(n: usize, entries: Vec<FieldElem>) -> Result<Self> {
        if n == 0 {
            return invalid("genus must be at least 1");
        }
        if entries.len() != n * n {
            return invalid(format!("expected {} entries for a {n}x{n} matrix", n * n));
        }
        for i in 0..n {
            for k in i + 1..n {
                if entries[i * n + k] != entries[k * n + i] {
                    return invalid("matrix is not symmetric");
                }
            }
        }
        Ok(SymMat { n, entries })
    }

    pub fn from_rows(rows: Vec<Vec<FieldElem>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return invalid("matrix is not square");
        }
        SymMat::new(n, rows.into_iter().flatten().collect())
    }

    pub fn zero(f: &NumberField, n: usize) -> Self {
        SymMat { n, entries: vec![f.zero(); n * n] }
    }

    pub fn identity(f: &NumberField, n: usize) -> Self {
        SymMat::diag(f, &vec![f.one(); n])
    }

    pub fn diag(f: &NumberField, d: &[FieldElem]) -> Self {
        let n = d.len();
        let mut entries = vec![f.zero(); n * n];
        for (i, x) in d.iter().enumerate() {
            entries[i * n + i] = x.clone();
        }
        SymMat { n, entries }
    }

    /// Rational matrix embedded via `q ↦ q·1`.
    pub fn from_rational(f: &NumberField, rows: &[Vec<Q>]) -> Result<Self> {
        SymMat::from_rows(rows.iter().map(|r| r.iter().map(|x| f.from_q(x)).collect()).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, k: usize) -> &FieldElem {
        &self.entries[i * self.n + k]
    }

    pub fn entries(&self) -> &[FieldElem] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<FieldElem>> {
        self.entries.chunks(self.n).map(|c| c.to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn add(&self, f: &NumberField, o: &SymMat) -> SymMat {
        SymMat { n: self.n, entries: self.entries.iter().zip(&o.entries).map(|(a, b)| f.add(a, b)).collect() }
    }

    pub fn sub(&self, f: &NumberField, o: &SymMat) -> SymMat {
        SymMat { n: self.n, entries: self.entries.iter().zip(&o.entries).map(|(a, b)| f.sub(a, b)).collect() }
    }

    pub fn scale(&self, f: &NumberField, c: &Q) -> SymMat {
        SymMat { n: self.n, entries: self.entries.iter().map(|a| f.scale(a, c)).collect() }
    }

    /// `ε·T·εᵗ`.
    pub fn congruence(&self, f: &NumberField, eps: &Mat<FieldElem>) -> SymMat {
        let t = self.rows();
        let et = linalg::mat_mul(f, eps, &t);
        let r = linalg::mat_mul(f, &et, &linalg::transpose(eps));
        SymMat { n: self.n, entries: r.into_iter().flatten().collect() }
    }

    /// Principal submatrix on the given indices.
    pub fn principal(&self, idx: &[usize]) -> SymMat {
        let mut entries = Vec::with_capacity(idx.len() * idx.len());
        for &i in idx {
            for &k in idx {
                entries.push(self.get(i, k).clone());
            }
        }
        SymMat { n: idx.len(), entries }
    }

    /// Block diagonal matrix `diag(a, b)`.
    pub fn block_diag(f: &NumberField, a: &SymMat, b: &SymMat) -> SymMat {
        let n = a.n + b.n;
        let mut entries = vec![f.zero(); n * n];
        for i in 0..a.n {
            for k in 0..a.n {
                entries[i * n + k] = a.get(i, k).clone();
            }
        }
        for i in 0..b.n {
            for k in 0..b.n {
                entries[(a.n + i) * n + a.n + k] = b.get(i, k).clone();
            }
        }
        SymMat { n, entries }
    }

    /// `tr_{F/ℚ} tr(T)`, without a positivity check.
    pub fn trace_height(&self, f: &NumberField) -> Q {
        (0..self.n).map(|i| f.trace(self.get(i, i))).sum()
    }

    /// `tr_{F/ℚ} tr(T)` for a totally positive semidefinite `T`.
    pub fn height(&self, f: &NumberField) -> Result<Q> {
        if !self.is_totally_psd(f) {
            return invalid("height is only defined on totally positive semidefinite matrices");
        }
        Ok(self.trace_height(f))
    }

    fn minor(&self, f: &NumberField, idx: &[usize]) -> FieldElem {
        linalg::det_expand(f, &self.principal(idx).rows())
    }

    /// Every embedding is positive semidefinite: all principal minors are totally nonnegative.
    pub fn is_totally_psd(&self, f: &NumberField) -> bool {
        let n = self.n;
        for i in 0..n {
            if !f.is_totally_nonnegative(self.get(i, i)) {
                return false;
            }
        }
        for mask in 1u32..(1 << n) {
            if mask.count_ones() < 2 {
                continue;
            }
            let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            if !f.is_totally_nonnegative(&self.minor(f, &idx)) {
                return false;
            }
        }
        true
    }

    /// Every embedding is positive definite: leading principal minors are totally positive.
    pub fn is_totally_pd(&self, f: &NumberField) -> bool {
        (1..=self.n).all(|k| {
            let idx: Vec<usize> = (0..k).collect();
            f.is_totally_positive(&self.minor(f, &idx))
        })
    }
}

impl fmt::Display for SymMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.entries.chunks(self.n).enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (k, e) in row.iter().enumerate() {
                if k > 0 {
                    write!(f, ", ")?;
                }
                if e.coords.len() == 1 {
                    write!(f, "{}", e.coords[0])?;
                } else {
                    write!(f, "{e}")?;
                }
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// A cone point together with its height; the derived order is the canonical one.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConePoint {
    pub height: Q,
    pub t: SymMat,
}

/// `Sym_n` over `F` at level `ν`: the lattice `ν⁻¹·S_F^∨` and its totally positive part.
#[derive(Clone, Debug)]
pub struct ConeLattice {
    field: Arc<NumberField>,
    n: usize,
    nu: u64,
}

impl PartialEq for ConeLattice {
    fn eq(&self, o: &Self) -> bool {
        self.n == o.n && self.nu == o.nu && *self.field == *o.field
    }
}

impl ConeLattice {
    pub fn new(field: Arc<NumberField>, n: usize, nu: u64) -> Result<Self> {
        if n == 0 {
            return invalid("genus must be at least 1");
        }
        if nu == 0 {
            return invalid("level must be at least 1");
        }
        Ok(ConeLattice { field, n, nu })
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nu(&self) -> u64 {
        self.nu
    }

    pub fn with_genus(&self, n: usize) -> Result<ConeLattice> {
        ConeLattice::new(self.field.clone(), n, self.nu)
    }

    pub fn with_level(&self, nu: u64) -> Result<ConeLattice> {
        ConeLattice::new(self.field.clone(), self.n, nu)
    }

    /// The pairings `tr_{F/ℚ} tr(T·y)` against the generators of `S_F`.
    fn pairings(f: &NumberField, t: &SymMat) -> Vec<Q> {
        let d = f.degree();
        let n = t.n();
        let mut out = Vec::new();
        for i in 0..n {
            for k in i..n {
                let e = if i == k { t.get(i, i).clone() } else { f.scale(t.get(i, k), &qi(2)) };
                for b in 0..d {
                    out.push(f.trace(&f.mul(&e, &f.basis_elem(b))));
                }
            }
        }
        out
    }

    /// Membership in `ν⁻¹·S_F^∨`.
    pub fn in_dual_lattice(&self, t: &SymMat) -> bool {
        if t.n() != self.n {
            return false;
        }
        let nu = qi(self.nu as i64);
        ConeLattice::pairings(&self.field, t).iter().all(|p| is_integer(&(p * &nu)))
    }

    /// Smallest level `ν` with every given matrix in `ν⁻¹·S_F^∨`.
    pub fn minimal_level<'a>(f: &NumberField, ts: impl IntoIterator<Item = &'a SymMat>) -> u64 {
        let mut l = Z::one();
        for t in ts {
            for p in ConeLattice::pairings(f, t) {
                l = num::Integer::lcm(&l, p.denom());
            }
        }
        num::ToPrimitive::to_u64(&l).expect("level fits in u64")
    }

    /// In `S·_F ∪ {0}`: lattice membership and total positive semidefiniteness.
    pub fn contains(&self, t: &SymMat) -> bool {
        self.in_dual_lattice(t) && t.is_totally_psd(&self.field)
    }

    pub fn point(&self, t: SymMat) -> Result<ConePoint> {
        if t.n() != self.n {
            return invalid(format!("matrix has genus {}, cone has genus {}", t.n(), self.n));
        }
        if !self.in_dual_lattice(&t) {
            return invalid(format!("{t} is not in the level-{} dual lattice", self.nu));
        }
        if !t.is_totally_psd(&self.field) {
            return invalid(format!("{t} is not totally positive semidefinite"));
        }
        let height = t.trace_height(&self.field);
        Ok(ConePoint { height, t })
    }

    /// Elements `x = ν⁻¹·Σ a_k b*_k` (or `(2ν)⁻¹·…` when `half`) whose embeddings lie in
    /// the given enclosing boxes; candidates only, callers filter exactly.
    fn box_candidates(&self, bounds: &[Interval], half: bool) -> Vec<FieldElem> {
        let f = &self.field;
        let d = f.degree();
        let scale = qi(self.nu as i64) * if half { qi(2) } else { qi(1) };
        let emb = f.basis_embeddings();
        let ranges: Vec<(Z, Z)> = (0..d)
            .map(|k| {
                // a_k = scale · Σ_j σ_j(b_k) σ_j(x)
                let mut lo = Q::zero();
                let mut hi = Q::zero();
                for j in 0..d {
                    let p = emb[k][j].mul(&bounds[j]);
                    lo += p.lo;
                    hi += p.hi;
                }
                (ceil(&(lo * &scale)), floor(&(hi * &scale)))
            })
            .collect();
        let dual = f.inverse_different();
        let inv_scale = scale.recip();
        let mut out = Vec::new();
        let mut a: Vec<Z> = ranges.iter().map(|r| r.0.clone()).collect();
        if ranges.iter().any(|(lo, hi)| lo > hi) {
            return out;
        }
        loop {
            let mut x = f.zero();
            for (k, ak) in a.iter().enumerate() {
                if !ak.is_zero() {
                    x = f.add(&x, &f.scale(&dual[k], &Q::from_integer(ak.clone())));
                }
            }
            out.push(f.scale(&x, &inv_scale));
            let mut k = 0;
            loop {
                if k == d {
                    return out;
                }
                if a[k] < ranges[k].1 {
                    a[k] += 1;
                    break;
                }
                a[k] = ranges[k].0.clone();
                k += 1;
            }
        }
    }

    /// Totally nonnegative diagonal values in `ν⁻¹δ⁻¹` with trace at most `b`, sorted by trace.
    fn diagonal_values(&self, b: &Q) -> Vec<(Q, FieldElem)> {
        let f = &self.field;
        let d = f.degree();
        if b.is_negative() {
            return Vec::new();
        }
        let bounds = vec![Interval::new(Q::zero(), b.clone()); d];
        let mut out: Vec<(Q, FieldElem)> = self
            .box_candidates(&bounds, false)
            .into_iter()
            .filter_map(|x| {
                let tr = f.trace(&x);
                (tr <= *b && f.is_totally_nonnegative(&x)).then_some((tr, x))
            })
            .collect();
        out.sort();
        out
    }

    /// Off-diagonal values `z ∈ (2ν)⁻¹δ⁻¹` with `x·y − z²` totally nonnegative.
    fn offdiagonal_values(&self, x: &FieldElem, y: &FieldElem) -> Vec<FieldElem> {
        let f = &self.field;
        let d = f.degree();
        let eps = Q::new(Z::one(), Z::one() << 30);
        let bounds: Vec<Interval> = (0..d)
            .map(|j| {
                let px = f.embed(x, j, &eps).hi.max(Q::zero());
                let py = f.embed(y, j, &eps).hi.max(Q::zero());
                let r = sqrt_upper(&(px * py), 30);
                Interval::new(-r.clone(), r)
            })
            .collect();
        let xy = f.mul(x, y);
        self.box_candidates(&bounds, true)
            .into_iter()
            .filter(|z| f.is_totally_nonnegative(&f.sub(&xy, &f.mul(z, z))))
            .collect()
    }

    /// All of `S·_F ∪ {0}` with height at most `b`, in canonical order.
    pub fn enumerate(&self, b: &Q) -> Vec<ConePoint> {
        let f = &self.field;
        let n = self.n;
        let diag = self.diagonal_values(b);
        if diag.is_empty() {
            return Vec::new();
        }
        let mut out: Vec<ConePoint> = if n == 1 {
            diag.iter().map(|(h, x)| ConePoint { height: h.clone(), t: SymMat { n: 1, entries: vec![x.clone()] } }).collect()
        } else {
            diag.par_iter()
                .flat_map_iter(|first| {
                    let mut acc = Vec::new();
                    let mut chosen = vec![first.clone()];
                    self.extend_diagonal(b, &diag, &mut chosen, &mut acc);
                    acc
                })
                .collect()
        };
        let _ = f;
        out.sort();
        out
    }

    fn extend_diagonal(&self, b: &Q, diag: &[(Q, FieldElem)], chosen: &mut Vec<(Q, FieldElem)>, acc: &mut Vec<ConePoint>) {
        let used: Q = chosen.iter().map(|c| c.0.clone()).sum();
        if chosen.len() == self.n {
            self.fill_offdiagonal(chosen, used, acc);
            return;
        }
        for cand in diag {
            if &used + &cand.0 > *b {
                break;
            }
            chosen.push(cand.clone());
            self.extend_diagonal(b, diag, chosen, acc);
            chosen.pop();
        }
    }

    fn fill_offdiagonal(&self, diag: &[(Q, FieldElem)], height: Q, acc: &mut Vec<ConePoint>) {
        let f = &self.field;
        let n = self.n;
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |k| (i, k))).collect();
        let mut cache: HashMap<(usize, usize), Vec<FieldElem>> = HashMap::new();
        let lists: Vec<Vec<FieldElem>> = pairs
            .iter()
            .map(|&(i, k)| cache.entry((i, k)).or_insert_with(|| self.offdiagonal_values(&diag[i].1, &diag[k].1)).clone())
            .collect();
        if lists.iter().any(|l| l.is_empty()) {
            return;
        }
        let mut idx = vec![0usize; pairs.len()];
        loop {
            let mut entries = vec![f.zero(); n * n];
            for i in 0..n {
                entries[i * n + i] = diag[i].1.clone();
            }
            for (p, &(i, k)) in pairs.iter().enumerate() {
                entries[i * n + k] = lists[p][idx[p]].clone();
                entries[k * n + i] = lists[p][idx[p]].clone();
            }
            let t = SymMat { n, entries };
            if n == 2 || t.is_totally_psd(f) {
                acc.push(ConePoint { height: height.clone(), t });
            }
            let mut p = 0;
            loop {
                if p == pairs.len() {
                    return;
                }
                idx[p] += 1;
                if idx[p] < lists[p].len() {
                    break;
                }
                idx[p] = 0;
                p += 1;
            }
        }
    }

    /// All cone points `[[t1, X], [Xᵗ, t2]]` with the given diagonal blocks.
    pub fn block_completions(&self, t1: &SymMat, t2: &SymMat) -> Result<Vec<SymMat>> {
        let f = &self.field;
        let (n1, n2) = (t1.n(), t2.n());
        if n1 + n2 != self.n {
            return invalid(format!("blocks of genus {n1} and {n2} do not fill genus {}", self.n));
        }
        let b1 = self.with_genus(n1)?;
        let b2 = self.with_genus(n2)?;
        if !b1.contains(t1) || !b2.contains(t2) {
            return Ok(Vec::new());
        }
        let pairs: Vec<(usize, usize)> = (0..n1).flat_map(|i| (0..n2).map(move |k| (i, k))).collect();
        let lists: Vec<Vec<FieldElem>> = pairs.iter().map(|&(i, k)| self.offdiagonal_values(t1.get(i, i), t2.get(k, k))).collect();
        let mut out = Vec::new();
        if lists.iter().any(|l| l.is_empty()) {
            return Ok(out);
        }
        let base = SymMat::block_diag(f, t1, t2);
        let n = self.n;
        let mut idx = vec![0usize; pairs.len()];
        loop {
            let mut entries = base.entries.clone();
            for (p, &(i, k)) in pairs.iter().enumerate() {
                entries[i * n + n1 + k] = lists[p][idx[p]].clone();
                entries[(n1 + k) * n + i] = lists[p][idx[p]].clone();
            }
            let t = SymMat { n, entries };
            // for 2×2 the off-diagonal filter already decides positivity
            if n == 2 || t.is_totally_psd(f) {
                out.push(t);
            }
            let mut p = 0;
            loop {
                if p == pairs.len() {
                    out.sort();
                    return Ok(out);
                }
                idx[p] += 1;
                if idx[p] < lists[p].len() {
                    break;
                }
                idx[p] = 0;
                p += 1;
            }
        }
    }

    /// Smallest height of a nonzero cone point, searched up to `b`.
    pub fn min_nonzero_height(&self, b: &Q) -> Option<Q> {
        self.diagonal_values(b).into_iter().map(|(h, _)| h).find(|h| !h.is_zero())
    }

    /// Validates a unit `ε ∈ GL_n(O_F)` with `ε ≡ 1 mod ν`.
    pub fn unit_generator(&self, eps: Mat<FieldElem>) -> Result<UnitGenerator> {
        let f = &self.field;
        let n = self.n;
        if eps.len() != n || eps.iter().any(|r| r.len() != n) {
            return invalid(format!("unit must be a {n}x{n} matrix"));
        }
        if !eps.iter().flatten().all(|e| f.is_integral(e)) {
            return invalid("unit has non-integral entries");
        }
        let det = linalg::det_expand(&**f, &eps);
        if det.is_zero() || !f.is_integral(&det) || f.norm(&det).abs() != Q::one() {
            return invalid("unit is not invertible over the integers of F");
        }
        let nu = qi(self.nu as i64);
        for i in 0..n {
            for k in 0..n {
                let mut e = eps[i][k].clone();
                if i == k {
                    e = f.sub(&e, &f.one());
                }
                if !f.is_integral(&f.scale(&e, &nu.recip())) {
                    return invalid(format!("unit is not congruent to 1 modulo {}", self.nu));
                }
            }
        }
        let inv = linalg::inverse(&**f, &eps).expect("unit determinant");
        Ok(UnitGenerator { eps, inv })
    }

    /// Orbit of `t` under the group generated by `gens`, intersected with the height ball.
    pub fn orbit(&self, t: &SymMat, gens: &[UnitGenerator], b: &Q) -> Result<Orbit> {
        let f = &self.field;
        let start = self.point(t.clone())?;
        let limit = qi(4) * start.height.clone().max(b.clone()) + qi(1);
        let mut seen: BTreeSet<ConePoint> = BTreeSet::new();
        let mut queue = VecDeque::new();
        let mut complete = true;
        seen.insert(start.clone());
        queue.push_back(start);
        while let Some(p) = queue.pop_front() {
            for g in gens {
                for m in [&g.eps, &g.inv] {
                    let s = p.t.congruence(f, m);
                    let h = s.trace_height(f);
                    if h > limit {
                        complete = false;
                        continue;
                    }
                    let q = ConePoint { height: h, t: s };
                    if seen.insert(q.clone()) {
                        queue.push_back(q);
                    }
                }
            }
        }
        let members: Vec<ConePoint> = seen.into_iter().filter(|p| p.height <= *b).collect();
        let representative = members.first().cloned();
        Ok(Orbit { members, representative, complete })
    }

    /// Whether `v = (v_1, …, v_d)` lies in the standard kernel
    /// `{v : tr_{F/ℚ} tr(x·v) ≥ 1 for all x ∈ S·_F}`.
    pub fn standard_kernel_contains(&self, v: &[Mat<Q>]) -> Result<bool> {
        let f = &self.field;
        let d = f.degree();
        let n = self.n;
        if v.len() != d || v.iter().any(|m| m.len() != n || m.iter().any(|r| r.len() != n)) {
            return invalid(format!("expected {d} symmetric {n}x{n} rational matrices"));
        }
        for m in v {
            for i in 0..n {
                for k in 0..n {
                    if m[i][k] != m[k][i] {
                        return invalid("kernel point component is not symmetric");
                    }
                }
            }
            if !rational_pd(m) {
                return invalid("kernel point component is not positive definite");
            }
        }
        let t = certified_min_eigen_lower_bound(v);
        let bound = t.recip();
        let all_equal = v.iter().all(|m| m == &v[0]);
        for p in self.enumerate(&bound) {
            if p.t.is_zero() {
                continue;
            }
            let below = if all_equal {
                let mut s = Q::zero();
                for i in 0..n {
                    for k in 0..n {
                        s += f.trace(p.t.get(i, k)) * &v[0][k][i];
                    }
                }
                s < Q::one()
            } else {
                pairing_below_one(f, &p.t, v)?
            };
            if below {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// A validated generator of the congruence unit group acting by `T ↦ εTεᵗ`.
#[derive(Clone, Debug)]
pub struct UnitGenerator {
    eps: Mat<FieldElem>,
    inv: Mat<FieldElem>,
}

impl UnitGenerator {
    pub fn matrix(&self) -> &Mat<FieldElem> {
        &self.eps
    }

    pub fn inverse(&self) -> &Mat<FieldElem> {
        &self.inv
    }
}

/// Orbit points inside a height ball.
#[derive(Clone, Debug)]
pub struct Orbit {
    /// Orbit points of height at most the ball radius, canonical order.
    pub members: Vec<ConePoint>,
    /// Minimal member in canonical order.
    pub representative: Option<ConePoint>,
    /// The whole orbit was enumerated (it is finite and closed under the generators).
    pub complete: bool,
}

fn rational_pd(m: &Mat<Q>) -> bool {
    (1..=m.len()).all(|k| {
        let sub: Mat<Q> = m[..k].iter().map(|r| r[..k].to_vec()).collect();
        linalg::det(&Rationals, &sub).is_positive()
    })
}

fn rational_psd(m: &Mat<Q>) -> bool {
    let n = m.len();
    (1u32..(1 << n)).all(|mask| {
        let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let sub: Mat<Q> = idx.iter().map(|&i| idx.iter().map(|&k| m[i][k].clone()).collect()).collect();
        !linalg::det(&Rationals, &sub).is_negative()
    })
}

/// Rational `t > 0` with `v_j − t·I` positive semidefinite for every component.
pub fn certified_min_eigen_lower_bound(v: &[Mat<Q>]) -> Q {
    let shifted_psd = |t: &Q| {
        v.iter().all(|m| {
            let s: Mat<Q> = m
                .iter()
                .enumerate()
                .map(|(i, r)| r.iter().enumerate().map(|(k, x)| if i == k { x - t } else { x.clone() }).collect())
                .collect();
            rational_psd(&s)
        })
    };
    let mut hi = v.iter().flat_map(|m| (0..m.len()).map(move |i| m[i][i].clone())).min().expect("nonempty");
    let mut lo = Q::zero();
    for step in 0.. {
        let mid = (&lo + &hi) / qi(2);
        if shifted_psd(&mid) {
            lo = mid;
        } else {
            hi = mid;
        }
        if step >= 40 && lo.is_positive() {
            break;
        }
    }
    lo
}

/// Decides `Σ_j tr(σ_j(T)·v_j) < 1` by refining embedding enclosures.
fn pairing_below_one(f: &NumberField, t: &SymMat, v: &[Mat<Q>]) -> Result<bool> {
    let n = t.n();
    for bits in (32..=256).step_by(32) {
        let eps = Q::new(Z::one(), Z::one() << bits);
        let mut acc = Interval::point(Q::zero());
        for (j, vj) in v.iter().enumerate() {
            for i in 0..n {
                for k in 0..n {
                    acc = acc.add(&f.embed(t.get(i, k), j, &eps).scale(&vj[k][i]));
                }
            }
        }
        if acc.hi < Q::one() {
            return Ok(true);
        }
        if acc.lo >= Q::one() {
            return Ok(false);
        }
    }
    Err(Error::Undecided(format!("pairing of {t} with the kernel point is indistinguishable from 1")))
}

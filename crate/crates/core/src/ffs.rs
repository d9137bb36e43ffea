//! Truncated formal Fourier series `Σ a(T) q^T` supported on `S·_F ∪ {0}`, with the cone
//! convolution product, the λ-filtration and its ideals, and unit-group symmetrization.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Debug;

use num::{Complex, Zero};
use rayon::prelude::*;

use crate::arith::{qi, Q};
use crate::error::{Error, Result};
use crate::symcone::{ConeLattice, ConePoint, SymMat, UnitGenerator};

/// Exact commutative coefficient ring.
pub trait CoefficientRing: Clone + Debug + Send + Sync {
    type Elem: Clone + PartialEq + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// Fallible so that formal rings can surface validation failures.
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// Whether two ring handles denote the same ring.
    fn same_ring(&self, other: &Self) -> bool;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn from_int(&self, k: i64) -> Self::Elem {
        let mut acc = self.zero();
        let unit = if k < 0 { self.neg(&self.one()) } else { self.one() };
        for _ in 0..k.unsigned_abs() {
            acc = self.add(&acc, &unit);
        }
        acc
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RationalRing;

impl CoefficientRing for RationalRing {
    type Elem = Q;

    fn zero(&self) -> Q {
        Q::zero()
    }
    fn one(&self) -> Q {
        qi(1)
    }
    fn add(&self, a: &Q, b: &Q) -> Q {
        a + b
    }
    fn neg(&self, a: &Q) -> Q {
        -a
    }
    fn mul(&self, a: &Q, b: &Q) -> Result<Q> {
        Ok(a * b)
    }
    fn is_zero(&self, a: &Q) -> bool {
        a.is_zero()
    }
    fn same_ring(&self, _: &Self) -> bool {
        true
    }
    fn from_int(&self, k: i64) -> Q {
        qi(k)
    }
}

/// `ℚ(i)` with elements `a + b·i`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GaussianRing;

impl CoefficientRing for GaussianRing {
    type Elem = Complex<Q>;

    fn zero(&self) -> Complex<Q> {
        Complex::new(Q::zero(), Q::zero())
    }
    fn one(&self) -> Complex<Q> {
        Complex::new(qi(1), Q::zero())
    }
    fn add(&self, a: &Complex<Q>, b: &Complex<Q>) -> Complex<Q> {
        a + b
    }
    fn neg(&self, a: &Complex<Q>) -> Complex<Q> {
        -a.clone()
    }
    fn mul(&self, a: &Complex<Q>, b: &Complex<Q>) -> Result<Complex<Q>> {
        Ok(a * b)
    }
    fn is_zero(&self, a: &Complex<Q>) -> bool {
        a.re.is_zero() && a.im.is_zero()
    }
    fn same_ring(&self, _: &Self) -> bool {
        true
    }
}

/// A finite prefix of a formal Fourier series: exact up to `bound` in height.
#[derive(Clone, Debug)]
pub struct FormalSeries<R: CoefficientRing> {
    cone: ConeLattice,
    ring: R,
    bound: Q,
    terms: BTreeMap<ConePoint, R::Elem>,
}

impl<R: CoefficientRing> FormalSeries<R> {
    pub fn zero(cone: ConeLattice, ring: R, bound: Q) -> Self {
        FormalSeries { cone, ring, bound, terms: BTreeMap::new() }
    }

    /// The unit `q^0`.
    pub fn one(cone: ConeLattice, ring: R, bound: Q) -> Self {
        let mut s = FormalSeries::zero(cone, ring, bound);
        let n = s.cone.n();
        let zero = SymMat::zero(s.cone.field(), n);
        let one = s.ring.one();
        s.terms.insert(ConePoint { height: Q::zero(), t: zero }, one);
        s
    }

    /// Validates every exponent; repeated exponents accumulate.
    pub fn from_terms(cone: ConeLattice, ring: R, bound: Q, terms: impl IntoIterator<Item = (SymMat, R::Elem)>) -> Result<Self> {
        let mut s = FormalSeries::zero(cone, ring, bound);
        for (t, c) in terms {
            s.add_term(t, c)?;
        }
        Ok(s)
    }

    /// Adds `c·q^T`; exponents above the bound are rejected.
    pub fn add_term(&mut self, t: SymMat, c: R::Elem) -> Result<()> {
        let p = self.cone.point(t)?;
        if p.height > self.bound {
            return Err(Error::Validation(format!("exponent {} has height {} above the bound {}", p.t, p.height, self.bound)));
        }
        self.accumulate(p, c);
        Ok(())
    }

    fn accumulate(&mut self, p: ConePoint, c: R::Elem) {
        if self.ring.is_zero(&c) {
            return;
        }
        match self.terms.get_mut(&p) {
            Some(v) => {
                let s = self.ring.add(v, &c);
                if self.ring.is_zero(&s) {
                    self.terms.remove(&p);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(p, c);
            }
        }
    }

    pub fn cone(&self) -> &ConeLattice {
        &self.cone
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn bound(&self) -> &Q {
        &self.bound
    }

    /// Nonzero terms in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&ConePoint, &R::Elem)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, t: &SymMat) -> R::Elem {
        let height = t.trace_height(self.cone.field());
        self.terms.get(&ConePoint { height, t: t.clone() }).cloned().unwrap_or_else(|| self.ring.zero())
    }

    pub fn constant_term(&self) -> R::Elem {
        self.coeff(&SymMat::zero(self.cone.field(), self.cone.n()))
    }

    /// Drops terms above `b`; `b` may not exceed the current bound.
    pub fn truncate(&self, b: &Q) -> Self {
        let bound = b.clone().min(self.bound.clone());
        let terms = self.terms.iter().filter(|(p, _)| p.height <= bound).map(|(p, c)| (p.clone(), c.clone())).collect();
        FormalSeries { cone: self.cone.clone(), ring: self.ring.clone(), bound, terms }
    }

    fn check_compatible(&self, o: &Self) -> Result<()> {
        if self.cone != o.cone {
            return Err(Error::ConeMismatch(format!(
                "genus {} level {} vs genus {} level {}",
                self.cone.n(),
                self.cone.nu(),
                o.cone.n(),
                o.cone.nu()
            )));
        }
        if !self.ring.same_ring(&o.ring) {
            return Err(Error::ConeMismatch("coefficient rings differ".into()));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check_compatible(o)?;
        let bound = self.bound.clone().min(o.bound.clone());
        let mut out = self.truncate(&bound);
        for (p, c) in o.terms.iter().filter(|(p, _)| p.height <= bound) {
            out.accumulate(p.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let terms = self.terms.iter().map(|(p, c)| (p.clone(), self.ring.neg(c))).collect();
        FormalSeries { cone: self.cone.clone(), ring: self.ring.clone(), bound: self.bound.clone(), terms }
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    /// Multiplies every coefficient by a ring element.
    pub fn scale(&self, c: &R::Elem) -> Result<Self> {
        let mut out = FormalSeries::zero(self.cone.clone(), self.ring.clone(), self.bound.clone());
        for (p, a) in &self.terms {
            out.accumulate(p.clone(), self.ring.mul(a, c)?);
        }
        Ok(out)
    }

    /// Cone convolution `c(T) = Σ_{R + S = T} a(R)·b(S)`, exact up to the smaller bound.
    pub fn multiply(&self, o: &Self) -> Result<Self> {
        self.check_compatible(o)?;
        let bound = self.bound.clone().min(o.bound.clone());
        let f = self.cone.field();
        let left: Vec<(&ConePoint, &R::Elem)> = self.terms.iter().filter(|(p, _)| p.height <= bound).collect();
        let right: Vec<(&ConePoint, &R::Elem)> = o.terms.iter().filter(|(p, _)| p.height <= bound).collect();
        let chunk = (left.len() / (4 * rayon::current_num_threads()).max(1)).max(8);
        let partials: Vec<Result<Vec<(ConePoint, R::Elem)>>> = left
            .par_chunks(chunk)
            .map(|ch| {
                let mut acc: Vec<(ConePoint, R::Elem)> = Vec::new();
                for (p, a) in ch {
                    for (q, b) in &right {
                        let h = &p.height + &q.height;
                        if h > bound {
                            break;
                        }
                        acc.push((ConePoint { height: h, t: p.t.add(f, &q.t) }, self.ring.mul(a, b)?));
                    }
                }
                Ok(acc)
            })
            .collect();
        let mut out = FormalSeries::zero(self.cone.clone(), self.ring.clone(), bound);
        for part in partials {
            for (p, c) in part? {
                out.accumulate(p, c);
            }
        }
        Ok(out)
    }

    /// Exact equality of both series up to the smaller bound.
    pub fn eq_up_to_bound(&self, o: &Self) -> bool {
        if self.check_compatible(o).is_err() {
            return false;
        }
        let b = self.bound.clone().min(o.bound.clone());
        let a: Vec<_> = self.terms.iter().filter(|(p, _)| p.height <= b).collect();
        let c: Vec<_> = o.terms.iter().filter(|(p, _)| p.height <= b).collect();
        a == c
    }

    /// The same coefficients read on the cone of level `ν'`, a multiple of the current level.
    pub fn relevel(&self, nu: u64) -> Result<Self> {
        if nu % self.cone.nu() != 0 {
            return Err(Error::Validation(format!("level {nu} is not a multiple of {}", self.cone.nu())));
        }
        Ok(FormalSeries { cone: self.cone.with_level(nu)?, ring: self.ring.clone(), bound: self.bound.clone(), terms: self.terms.clone() })
    }

    /// Whether `a(ε·T) = a(T)` for every orbit pair inside the height ball.
    pub fn is_symmetric(&self, gens: &[UnitGenerator]) -> Result<bool> {
        for (p, c) in &self.terms {
            let orbit = self.cone.orbit(&p.t, gens, &self.bound)?;
            for m in &orbit.members {
                if self.terms.get(m).map_or(false, |v| v == c) {
                    continue;
                }
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Orbit sums: every member of an orbit inside the ball receives the sum of the
    /// coefficients over that orbit. The flag reports whether every orbit was complete.
    pub fn symmetrize(&self, gens: &[UnitGenerator]) -> Result<(Self, bool)> {
        let mut out = FormalSeries::zero(self.cone.clone(), self.ring.clone(), self.bound.clone());
        let mut done: BTreeMap<ConePoint, ()> = BTreeMap::new();
        let mut complete = true;
        for p in self.terms.keys() {
            if done.contains_key(p) {
                continue;
            }
            let orbit = self.cone.orbit(&p.t, gens, &self.bound)?;
            complete &= orbit.complete;
            let mut sum = self.ring.zero();
            for m in &orbit.members {
                if let Some(c) = self.terms.get(m) {
                    sum = self.ring.add(&sum, c);
                }
                done.insert(m.clone(), ());
            }
            for m in &orbit.members {
                out.accumulate(m.clone(), sum.clone());
            }
        }
        Ok((out, complete))
    }

    /// Tensor product on block-diagonal exponents: `diag(T₁,T₂) ↦ a(T₁)·b(T₂)`.
    pub fn block_product(&self, o: &Self) -> Result<Self> {
        if self.cone.field() != o.cone.field() && **self.cone.field() != **o.cone.field() {
            return Err(Error::ConeMismatch("fields differ".into()));
        }
        if self.cone.nu() != o.cone.nu() || !self.ring.same_ring(&o.ring) {
            return Err(Error::ConeMismatch("levels or coefficient rings differ".into()));
        }
        let f = self.cone.field();
        let bound = self.bound.clone().min(o.bound.clone());
        let cone = self.cone.with_genus(self.cone.n() + o.cone.n())?;
        let mut out = FormalSeries::zero(cone, self.ring.clone(), bound.clone());
        for (p, a) in &self.terms {
            for (q, b) in &o.terms {
                let h = &p.height + &q.height;
                if h > bound {
                    break;
                }
                out.accumulate(ConePoint { height: h, t: SymMat::block_diag(f, &p.t, &q.t) }, self.ring.mul(a, b)?);
            }
        }
        Ok(out)
    }

    /// Restriction to `τ = diag(τ₁, τ₂)`: coefficients are summed over the off-diagonal
    /// block, and the result is stored on the block-diagonal exponent `diag(T₁,T₂)`.
    pub fn diagonal_restriction(&self, n1: usize) -> Result<Self> {
        let n = self.cone.n();
        if n1 == 0 || n1 >= n {
            return Err(Error::Validation(format!("cannot split genus {n} at {n1}")));
        }
        let f = self.cone.field();
        let i1: Vec<usize> = (0..n1).collect();
        let i2: Vec<usize> = (n1..n).collect();
        let mut out = FormalSeries::zero(self.cone.clone(), self.ring.clone(), self.bound.clone());
        for (p, c) in &self.terms {
            let t = SymMat::block_diag(f, &p.t.principal(&i1), &p.t.principal(&i2));
            out.accumulate(ConePoint { height: p.height.clone(), t }, c.clone());
        }
        Ok(out)
    }

    /// Smallest `k` test: `f ∈ I_k` iff `a(0) = 0` and `a(x) = 0` whenever `λ(x) < k`.
    pub fn in_ideal(&self, k: u32, lambda: &mut LambdaCache) -> Result<bool> {
        if k == 0 {
            return Ok(true);
        }
        if lambda.cone() != &self.cone {
            return Err(Error::ConeMismatch("λ cache belongs to another cone".into()));
        }
        if k >= 2 {
            match self.cone.min_nonzero_height(&self.bound) {
                Some(h) if qi(k as i64) * &h <= self.bound => {}
                _ => {
                    return Err(Error::InconclusiveTruncation(format!(
                        "testing I_{k} needs k times the minimal cone height within the bound {}",
                        self.bound
                    )))
                }
            }
        }
        for p in self.terms.keys() {
            if p.t.is_zero() || lambda.lambda(&p.t)? < k {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Maps coefficients into another ring.
    pub fn map<S: CoefficientRing>(&self, ring: S, f: impl Fn(&R::Elem) -> S::Elem) -> FormalSeries<S> {
        let mut out = FormalSeries::zero(self.cone.clone(), ring, self.bound.clone());
        for (p, c) in &self.terms {
            out.accumulate(p.clone(), f(c));
        }
        out
    }
}

/// Memoized `λ(x) = max{k : x = x₁ + … + x_k, x_i ∈ S·_F}`.
#[derive(Clone, Debug)]
pub struct LambdaCache {
    cone: ConeLattice,
    covered: Q,
    points: Vec<ConePoint>,
    memo: HashMap<SymMat, u32>,
}

impl LambdaCache {
    pub fn new(cone: ConeLattice) -> Self {
        LambdaCache { cone, covered: qi(-1), points: Vec::new(), memo: HashMap::new() }
    }

    pub fn cone(&self) -> &ConeLattice {
        &self.cone
    }

    fn cover(&mut self, h: &Q) {
        if *h > self.covered {
            let target = h.clone().max(&self.covered * qi(2));
            self.points = self.cone.enumerate(&target).into_iter().filter(|p| !p.t.is_zero()).collect();
            self.covered = target;
        }
    }

    pub fn lambda(&mut self, t: &SymMat) -> Result<u32> {
        let p = self.cone.point(t.clone())?;
        if p.t.is_zero() {
            return Err(Error::Validation("λ is not defined at 0".into()));
        }
        self.cover(&(&p.height / qi(2)));
        Ok(self.eval(&p))
    }

    // Some piece of an optimal decomposition has height at most h(T)/2, so splitting
    // T = x + (T − x) over such x reaches the maximum.
    fn eval(&mut self, p: &ConePoint) -> u32 {
        if let Some(&v) = self.memo.get(&p.t) {
            return v;
        }
        let f = self.cone.field().clone();
        let half = &p.height / qi(2);
        let mut best = 1;
        let cands: Vec<ConePoint> = self.points.iter().take_while(|x| x.height <= half).cloned().collect();
        for x in cands {
            let rest = p.t.sub(&f, &x.t);
            if rest.is_zero() || !rest.is_totally_psd(&f) {
                continue;
            }
            let rp = ConePoint { height: &p.height - &x.height, t: rest };
            let v = self.eval(&x) + self.eval(&rp);
            best = best.max(v);
        }
        self.memo.insert(p.t.clone(), best);
        best
    }
}

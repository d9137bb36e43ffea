//! Totally real number fields given by a monic minimal polynomial and an integral basis.
//!
//! Elements are coordinate vectors in the integral basis. Real embeddings are indexed by
//! increasing root order, and every sign decision is exact: interval refinement from a
//! root isolator, with a gcd test deciding exact zeros.

mod poly;

pub use poly::{isolate_real_roots, QPoly, Sturm};

use std::fmt;

use num::{One, Signed, Zero};

use crate::arith::{is_integer, qi, qz, Interval, Q, Z};
use crate::error::{invalid, Error, Result};
use crate::linalg::{self, Field, Rationals};

/// Bits of precision the stored root isolators are pre-refined to.
const START_BITS: u32 = 96;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElem {
    pub coords: Vec<Q>,
}

impl FieldElem {
    pub fn new(coords: Vec<Q>) -> Self {
        FieldElem { coords }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let [c] = self.coords.as_slice() {
            return write!(f, "{c}");
        }
        write!(f, "[")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

#[derive(Clone, Debug)]
pub struct NumberField {
    min_poly: QPoly,
    d: usize,
    basis: Vec<QPoly>,
    basis_matrix: Vec<Vec<Q>>,
    power_to_basis: Vec<Vec<Q>>,
    mult: Vec<Vec<Vec<Q>>>,
    traces: Vec<Q>,
    trace_form: Vec<Vec<Q>>,
    one: FieldElem,
    isolators: Vec<Interval>,
    start: Vec<Interval>,
    /// `f64` midpoints of the refined isolators, for the sign filter.
    approx: Vec<f64>,
    basis_embeddings: Vec<Vec<Interval>>,
}

impl PartialEq for NumberField {
    fn eq(&self, o: &Self) -> bool {
        self.min_poly == o.min_poly && self.basis_matrix == o.basis_matrix
    }
}

impl Eq for NumberField {}

/// A monic integer polynomial has only integer rational roots; each isolator is
/// narrowed below width 1 and the integers inside it are tested.
fn has_integer_root(f: &QPoly, isolators: &[Interval]) -> bool {
    isolators.iter().any(|iv| {
        let iv = if iv.lo == iv.hi { iv.clone() } else { refine_to(f, iv.clone(), 2) };
        let mut k = crate::arith::ceil(&iv.lo);
        while qz(k.clone()) <= iv.hi {
            if f.sign_at(&qz(k.clone())) == 0 {
                return true;
            }
            k += 1;
        }
        false
    })
}

impl NumberField {
    /// Builds and validates a field. `min_poly` lists `c_0, …, c_{d-1}, 1`; row `i` of
    /// `integral_basis` gives `b_i` in the power basis `1, θ, …, θ^{d-1}`.
    pub fn new(min_poly: &[Z], integral_basis: Vec<Vec<Q>>, isolators: Option<Vec<Interval>>) -> Result<Self> {
        if min_poly.len() < 2 {
            return invalid("minimal polynomial must have degree at least 1");
        }
        if !min_poly.last().unwrap().is_one() {
            return invalid("minimal polynomial must be monic");
        }
        let d = min_poly.len() - 1;
        let f = QPoly::new(min_poly.iter().cloned().map(qz).collect());
        if integral_basis.len() != d || integral_basis.iter().any(|r| r.len() != d) {
            return invalid(format!("integral basis must be a {d}x{d} matrix"));
        }
        if QPoly::gcd(&f, &f.derivative()).degree() != Some(0) {
            return invalid("minimal polynomial is not squarefree");
        }
        let sturm = Sturm::new(&f);
        if sturm.count_real() != d {
            return invalid("minimal polynomial is not totally real");
        }
        let isolators = match isolators {
            Some(iv) => {
                validate_isolators(&f, &sturm, &iv, d)?;
                iv
            }
            None => isolate_real_roots(&f),
        };
        if d >= 2 && has_integer_root(&f, &isolators) {
            return invalid("minimal polynomial has a rational root, so it is reducible");
        }
        let det_m = linalg::det(&Rationals, &integral_basis);
        if det_m.is_zero() {
            return invalid("integral basis is singular");
        }
        let power_to_basis = linalg::inverse(&Rationals, &integral_basis).expect("nonsingular");
        let basis: Vec<QPoly> = integral_basis.iter().map(|r| QPoly::new(r.clone())).collect();

        let mut field = NumberField {
            min_poly: f,
            d,
            basis,
            basis_matrix: integral_basis,
            power_to_basis,
            mult: Vec::new(),
            traces: Vec::new(),
            trace_form: Vec::new(),
            one: FieldElem::new(vec![Q::zero(); d]),
            isolators: isolators.clone(),
            start: Vec::new(),
            approx: Vec::new(),
            basis_embeddings: Vec::new(),
        };
        field.one = field.from_poly(&QPoly::constant(Q::one()));
        if !field.one.coords.iter().all(is_integer) {
            return invalid("the span of the integral basis does not contain 1");
        }
        let mut mult = vec![vec![Vec::new(); d]; d];
        for i in 0..d {
            for j in 0..d {
                let p = field.basis[i].mul(&field.basis[j]).rem(&field.min_poly);
                let c = field.from_poly(&p).coords;
                if !c.iter().all(is_integer) {
                    return invalid("the span of the integral basis is not closed under multiplication");
                }
                mult[i][j] = c;
            }
        }
        field.mult = mult;
        // trace of b_i = trace of its multiplication matrix
        field.traces = (0..d).map(|i| (0..d).map(|k| field.mult[i][k][k].clone()).sum()).collect();
        field.trace_form = (0..d)
            .map(|i| (0..d).map(|j| field.trace(&FieldElem::new(field.mult[i][j].clone()))).collect())
            .collect();
        let disc = linalg::det(&Rationals, &field.trace_form);
        let power_disc = power_basis_discriminant(&field.min_poly, d);
        if disc != &det_m * &det_m * power_disc || disc.is_zero() || !is_integer(&disc) {
            return invalid("discriminant of the integral basis is inconsistent with the minimal polynomial");
        }
        field.start = isolators.iter().map(|iv| refine_to(&field.min_poly, iv.clone(), START_BITS)).collect();
        field.approx = field.start.iter().map(|iv| crate::arith::to_f64(&iv.midpoint())).collect();
        field.basis_embeddings = (0..d)
            .map(|k| {
                let b = field.basis_elem(k);
                (0..d).map(|j| field.embed(&b, j, &Q::new(Z::one(), Z::one() << 40))).collect()
            })
            .collect();
        Ok(field)
    }

    /// The rational field, `min_poly = x`, basis `{1}`.
    pub fn rationals() -> Self {
        NumberField::new(&[Z::zero(), Z::one()], vec![vec![Q::one()]], None).expect("valid")
    }

    /// `ℚ(√5)` presented by `x² − x − 1` with integral basis `{1, φ}`.
    pub fn golden() -> Self {
        NumberField::new(
            &[Z::from(-1), Z::from(-1), Z::one()],
            vec![vec![qi(1), qi(0)], vec![qi(0), qi(1)]],
            None,
        )
        .expect("valid")
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn min_poly(&self) -> &QPoly {
        &self.min_poly
    }

    pub fn basis_matrix(&self) -> &[Vec<Q>] {
        &self.basis_matrix
    }

    pub fn isolators(&self) -> &[Interval] {
        &self.isolators
    }

    pub fn trace_form(&self) -> &[Vec<Q>] {
        &self.trace_form
    }

    pub fn elem(&self, coords: Vec<Q>) -> FieldElem {
        assert_eq!(coords.len(), self.d, "coordinate vector has wrong length");
        FieldElem::new(coords)
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem::new(vec![Q::zero(); self.d])
    }

    pub fn one(&self) -> FieldElem {
        self.one.clone()
    }

    pub fn from_q(&self, x: &Q) -> FieldElem {
        self.scale(&self.one, x)
    }

    pub fn from_int(&self, n: i64) -> FieldElem {
        self.from_q(&qi(n))
    }

    /// The root θ of the minimal polynomial.
    pub fn generator(&self) -> FieldElem {
        self.from_poly(&QPoly::new(vec![Q::zero(), Q::one()]))
    }

    pub fn basis_elem(&self, k: usize) -> FieldElem {
        let mut c = vec![Q::zero(); self.d];
        c[k] = Q::one();
        FieldElem::new(c)
    }

    /// Element from power-basis coefficients (degree may exceed d−1).
    pub fn from_poly(&self, p: &QPoly) -> FieldElem {
        let r = p.rem(&self.min_poly);
        let mut pc = r.coeffs().to_vec();
        pc.resize(self.d, Q::zero());
        let coords = (0..self.d).map(|j| (0..self.d).map(|i| &pc[i] * &self.power_to_basis[i][j]).sum()).collect();
        FieldElem::new(coords)
    }

    pub fn to_poly(&self, a: &FieldElem) -> QPoly {
        let mut acc = QPoly::zero();
        for (c, b) in a.coords.iter().zip(&self.basis) {
            if !c.is_zero() {
                acc = acc.add(&b.scale(c));
            }
        }
        acc
    }

    pub fn add(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        FieldElem::new(a.coords.iter().zip(&b.coords).map(|(x, y)| x + y).collect())
    }

    pub fn sub(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        FieldElem::new(a.coords.iter().zip(&b.coords).map(|(x, y)| x - y).collect())
    }

    pub fn neg(&self, a: &FieldElem) -> FieldElem {
        FieldElem::new(a.coords.iter().map(|x| -x).collect())
    }

    pub fn scale(&self, a: &FieldElem, k: &Q) -> FieldElem {
        FieldElem::new(a.coords.iter().map(|x| x * k).collect())
    }

    pub fn mul(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        if self.d == 1 {
            return FieldElem::new(vec![&a.coords[0] * &b.coords[0] * &self.mult[0][0][0]]);
        }
        let mut out = vec![Q::zero(); self.d];
        for (i, x) in a.coords.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coords.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let xy = x * y;
                for (k, c) in self.mult[i][j].iter().enumerate() {
                    if !c.is_zero() {
                        out[k] += &xy * c;
                    }
                }
            }
        }
        FieldElem::new(out)
    }

    /// Matrix of multiplication by `a` acting on coordinate columns.
    pub fn mult_matrix(&self, a: &FieldElem) -> Vec<Vec<Q>> {
        let cols: Vec<FieldElem> = (0..self.d).map(|k| self.mul(a, &self.basis_elem(k))).collect();
        (0..self.d).map(|r| (0..self.d).map(|k| cols[k].coords[r].clone()).collect()).collect()
    }

    /// Inverse of a nonzero element.
    pub fn inv(&self, a: &FieldElem) -> FieldElem {
        assert!(!a.is_zero(), "inverse of zero");
        if self.d == 1 {
            let m = &self.mult[0][0][0];
            return FieldElem::new(vec![(&a.coords[0] * m * m).recip()]);
        }
        let m = self.mult_matrix(a);
        FieldElem::new(linalg::solve(&Rationals, &m, &self.one.coords).expect("nonzero elements are invertible"))
    }

    pub fn trace(&self, a: &FieldElem) -> Q {
        a.coords.iter().zip(&self.traces).map(|(c, t)| c * t).sum()
    }

    pub fn norm(&self, a: &FieldElem) -> Q {
        linalg::det(&Rationals, &self.mult_matrix(a))
    }

    /// Whether the coordinates are integers, i.e. the element lies in the order.
    pub fn is_integral(&self, a: &FieldElem) -> bool {
        a.coords.iter().all(is_integer)
    }

    /// Basis of the inverse different: the trace-dual basis of the integral basis.
    pub fn inverse_different(&self) -> Vec<FieldElem> {
        let ginv = linalg::inverse(&Rationals, &self.trace_form).expect("nondegenerate trace form");
        ginv.into_iter().map(FieldElem::new).collect()
    }

    /// Interval of width `< eps` containing `σ_j(a)` (0-based `j`).
    pub fn embed(&self, a: &FieldElem, j: usize, eps: &Q) -> Interval {
        assert!(j < self.d, "embedding index out of range");
        if a.is_zero() {
            return Interval::point(Q::zero());
        }
        let p = self.to_poly(a);
        let mut iv = self.start[j].clone();
        loop {
            let v = p.eval_interval(&iv);
            if &v.width() < eps {
                return v;
            }
            iv = bisect(&self.min_poly, &iv);
        }
    }

    /// Floating approximation of `σ_j(a)`, accurate to about 2^-60 absolute.
    pub fn embed_f64(&self, a: &FieldElem, j: usize) -> f64 {
        crate::arith::to_f64(&self.embed(a, j, &Q::new(Z::one(), Z::one() << 60)).midpoint())
    }

    /// Certified enclosures of `σ_j(b_k)`, indexed `[k][j]`.
    pub fn basis_embeddings(&self) -> &[Vec<Interval>] {
        &self.basis_embeddings
    }

    /// Exact sign of `σ_j(a)`.
    pub fn sign(&self, a: &FieldElem, j: usize) -> i8 {
        if a.is_zero() {
            return 0;
        }
        let p = self.to_poly(a);
        if let Some(s) = self.float_sign(&p, j) {
            return s;
        }
        let mut iv = self.start[j].clone();
        let mut checked_zero = false;
        loop {
            let v = p.eval_interval(&iv);
            if v.lo.is_positive() {
                return 1;
            }
            if v.hi.is_negative() {
                return -1;
            }
            if !checked_zero {
                checked_zero = true;
                let g = QPoly::gcd(&p, &self.min_poly);
                if g.degree().unwrap_or(0) >= 1 {
                    let vanishes = if iv.lo == iv.hi {
                        g.eval(&iv.lo).is_zero()
                    } else {
                        g.sign_at(&iv.lo) * g.sign_at(&iv.hi) < 0
                    };
                    if vanishes {
                        return 0;
                    }
                }
            }
            iv = bisect(&self.min_poly, &iv);
        }
    }

    /// Sign of `p(σ_j(θ))` from a floating Horner evaluation, when it clears a bound on the
    /// rounding and isolator error.
    fn float_sign(&self, p: &QPoly, j: usize) -> Option<i8> {
        let x = *self.approx.get(j)?;
        let ax = x.abs() + 1.0;
        let (mut v, mut mag) = (0.0f64, 0.0f64);
        for c in p.coeffs().iter().rev() {
            let c = crate::arith::to_f64(c);
            v = v * x + c;
            mag = mag * ax + c.abs();
        }
        let err = mag * (p.coeffs().len() as f64 + 1.0) * 2f64.powi(-40);
        if !v.is_finite() || !err.is_finite() {
            return None;
        }
        if v > err {
            Some(1)
        } else if v < -err {
            Some(-1)
        } else {
            None
        }
    }

    pub fn is_totally_positive(&self, a: &FieldElem) -> bool {
        (0..self.d).all(|j| self.sign(a, j) > 0)
    }

    pub fn is_totally_nonnegative(&self, a: &FieldElem) -> bool {
        (0..self.d).all(|j| self.sign(a, j) >= 0)
    }
}

impl Field for NumberField {
    type E = FieldElem;
    fn zero(&self) -> FieldElem {
        NumberField::zero(self)
    }
    fn one(&self) -> FieldElem {
        NumberField::one(self)
    }
    fn add(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        NumberField::add(self, a, b)
    }
    fn sub(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        NumberField::sub(self, a, b)
    }
    fn mul(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        NumberField::mul(self, a, b)
    }
    fn neg(&self, a: &FieldElem) -> FieldElem {
        NumberField::neg(self, a)
    }
    fn inv(&self, a: &FieldElem) -> FieldElem {
        NumberField::inv(self, a)
    }
    fn is_zero(&self, a: &FieldElem) -> bool {
        a.is_zero()
    }
}

fn validate_isolators(f: &QPoly, sturm: &Sturm, iv: &[Interval], d: usize) -> Result<()> {
    if iv.len() != d {
        return invalid(format!("expected {d} isolating intervals, got {}", iv.len()));
    }
    for (k, i) in iv.iter().enumerate() {
        if i.lo > i.hi {
            return invalid(format!("isolator {k} has lo > hi"));
        }
        if i.lo == i.hi {
            if !f.eval(&i.lo).is_zero() {
                return invalid(format!("isolator {k} is a point that is not a root"));
            }
        } else if f.sign_at(&i.lo) * f.sign_at(&i.hi) >= 0 || sturm.count(&i.lo, &i.hi) != 1 {
            return invalid(format!("isolator {k} does not contain exactly one root with a sign change"));
        }
        // adjacent isolators may share an endpoint that is not a root
        if k > 0 && (iv[k - 1].hi > i.lo || (iv[k - 1].hi == i.lo && f.eval(&i.lo).is_zero())) {
            return invalid("isolators must be disjoint and increasing");
        }
    }
    Ok(())
}

fn bisect(f: &QPoly, iv: &Interval) -> Interval {
    if iv.lo == iv.hi {
        return iv.clone();
    }
    let mid = iv.midpoint();
    let s = f.sign_at(&mid);
    if s == 0 {
        Interval::point(mid)
    } else if f.sign_at(&iv.lo) == s {
        Interval::new(mid, iv.hi.clone())
    } else {
        Interval::new(iv.lo.clone(), mid)
    }
}

fn refine_to(f: &QPoly, mut iv: Interval, bits: u32) -> Interval {
    let eps = Q::new(Z::one(), Z::one() << bits);
    while iv.width() >= eps {
        iv = bisect(f, &iv);
    }
    iv
}

/// `det(tr(θ^{i+j}))` computed through power sums of the roots.
fn power_basis_discriminant(f: &QPoly, d: usize) -> Q {
    // Newton's identities for monic f: power sums p_k of the roots
    let c = f.coeffs();
    let e = |i: usize| -> Q {
        // x^d + c_{d-1} x^{d-1} + ... : elementary symmetric e_i = (-1)^i c_{d-i}
        let v = c[d - i].clone();
        if i % 2 == 0 {
            v
        } else {
            -v
        }
    };
    let mut p = vec![qi(d as i64)];
    for k in 1..=(2 * d) {
        let mut s = Q::zero();
        for i in 1..k.min(d + 1) {
            let t = e(i) * &p[k - i];
            if i % 2 == 1 {
                s += t;
            } else {
                s -= t;
            }
        }
        if k <= d {
            let t = e(k) * qi(k as i64);
            if k % 2 == 1 {
                s += t;
            } else {
                s -= t;
            }
        }
        p.push(s);
    }
    let m: Vec<Vec<Q>> = (0..d).map(|i| (0..d).map(|j| p[i + j].clone()).collect()).collect();
    linalg::det(&Rationals, &m)
}

impl NumberField {
    /// Error unless the two fields are the same presentation.
    pub fn ensure_same(&self, other: &NumberField) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::ConeMismatch("number fields differ".into()))
        }
    }

    /// Exact sign of `Σ_j w_j·σ_j(a_j)`-type real numbers is not needed elsewhere; this
    /// helper returns enclosures of all embeddings at once.
    pub fn embeddings(&self, a: &FieldElem, eps: &Q) -> Vec<Interval> {
        (0..self.d).map(|j| self.embed(a, j, eps)).collect()
    }

    pub fn abs_upper(&self, a: &FieldElem, j: usize) -> Q {
        self.embed(a, j, &Q::new(Z::one(), Z::one() << 30)).abs_upper()
    }
}

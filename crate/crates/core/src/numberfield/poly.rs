//! Univariate rational polynomials, Sturm sequences and real root isolation.

use num::{One, Signed, Zero};

use crate::arith::{qi, Interval, Q};

/// Dense polynomial, coefficients from the constant term up; no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QPoly {
    c: Vec<Q>,
}

impl QPoly {
    pub fn new(mut c: Vec<Q>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        QPoly { c }
    }

    pub fn zero() -> Self {
        QPoly { c: Vec::new() }
    }

    pub fn constant(x: Q) -> Self {
        QPoly::new(vec![x])
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&Q> {
        self.c.last()
    }

    pub fn eval(&self, x: &Q) -> Q {
        let mut acc = Q::zero();
        for a in self.c.iter().rev() {
            acc = acc * x + a;
        }
        acc
    }

    pub fn sign_at(&self, x: &Q) -> i8 {
        crate::arith::sign(&self.eval(x))
    }

    /// Horner evaluation in interval arithmetic; contains every value on `x`.
    pub fn eval_interval(&self, x: &Interval) -> Interval {
        if x.lo == x.hi {
            return Interval::point(self.eval(&x.lo));
        }
        let mut acc = Interval::point(Q::zero());
        for a in self.c.iter().rev() {
            let m = acc.mul(x);
            acc = Interval::new(m.lo + a, m.hi + a);
        }
        acc
    }

    pub fn derivative(&self) -> QPoly {
        QPoly::new(self.c.iter().enumerate().skip(1).map(|(i, a)| a * qi(i as i64)).collect())
    }

    pub fn add(&self, o: &QPoly) -> QPoly {
        let n = self.c.len().max(o.c.len());
        QPoly::new(
            (0..n)
                .map(|i| self.c.get(i).cloned().unwrap_or_default() + o.c.get(i).cloned().unwrap_or_default())
                .collect(),
        )
    }

    pub fn scale(&self, k: &Q) -> QPoly {
        QPoly::new(self.c.iter().map(|a| a * k).collect())
    }

    pub fn mul(&self, o: &QPoly) -> QPoly {
        if self.is_zero() || o.is_zero() {
            return QPoly::zero();
        }
        let mut r = vec![Q::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                r[i + j] += a * b;
            }
        }
        QPoly::new(r)
    }

    /// Euclidean division `self = q·d + r`.
    pub fn divrem(&self, d: &QPoly) -> (QPoly, QPoly) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead = d.c[dd].clone();
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (QPoly::zero(), self.clone());
        }
        let mut q = vec![Q::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let f = &r[k + dd] / &lead;
            if !f.is_zero() {
                for (j, b) in d.c.iter().enumerate() {
                    r[k + j] -= &f * b;
                }
            }
            q[k] = f;
        }
        r.truncate(dd);
        (QPoly::new(q), QPoly::new(r))
    }

    pub fn rem(&self, d: &QPoly) -> QPoly {
        self.divrem(d).1
    }

    pub fn monic(&self) -> QPoly {
        match self.lead() {
            Some(l) => self.scale(&l.recip()),
            None => QPoly::zero(),
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(a: &QPoly, b: &QPoly) -> QPoly {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let r = x.rem(&y);
            x = y;
            y = r;
        }
        x.monic()
    }
}

/// Sturm chain of a squarefree polynomial.
pub struct Sturm {
    seq: Vec<QPoly>,
}

impl Sturm {
    pub fn new(f: &QPoly) -> Sturm {
        let mut seq = vec![f.clone(), f.derivative()];
        while !seq.last().unwrap().is_zero() {
            let n = seq.len();
            let r = seq[n - 2].rem(&seq[n - 1]);
            seq.push(r.scale(&-Q::one()));
        }
        seq.pop();
        Sturm { seq }
    }

    fn variations(&self, x: &Q) -> usize {
        let mut count = 0;
        let mut last = 0i8;
        for p in &self.seq {
            let s = p.sign_at(x);
            if s != 0 {
                if last != 0 && s != last {
                    count += 1;
                }
                last = s;
            }
        }
        count
    }

    fn variations_at_infinity(&self, positive: bool) -> usize {
        let mut count = 0;
        let mut last = 0i8;
        for p in &self.seq {
            let d = p.degree().unwrap_or(0);
            let mut s = crate::arith::sign(p.lead().unwrap());
            if !positive && d % 2 == 1 {
                s = -s;
            }
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    /// Number of distinct roots in the half-open interval `(lo, hi]`.
    pub fn count(&self, lo: &Q, hi: &Q) -> usize {
        self.variations(lo) - self.variations(hi)
    }

    pub fn count_real(&self) -> usize {
        self.variations_at_infinity(false) - self.variations_at_infinity(true)
    }
}

/// Strict upper bound on the absolute values of all complex roots.
pub fn cauchy_bound(f: &QPoly) -> Q {
    let lead = f.lead().unwrap().abs();
    let m = f.c[..f.c.len() - 1].iter().map(|a| a.abs() / &lead).max().unwrap_or_else(Q::zero);
    m + Q::one()
}

/// Isolating intervals for all real roots of a squarefree `f`, in increasing order.
/// Each interval either is a single rational root, or has endpoints where `f` has
/// opposite nonzero signs and contains exactly one root.
pub fn isolate_real_roots(f: &QPoly) -> Vec<Interval> {
    let sturm = Sturm::new(f);
    let b = cauchy_bound(f);
    let mut out = Vec::new();
    split(f, &sturm, -b.clone(), b, &mut out);
    out
}

fn split(f: &QPoly, sturm: &Sturm, lo: Q, hi: Q, out: &mut Vec<Interval>) {
    let n = sturm.count(&lo, &hi);
    if n == 0 {
        return;
    }
    if n == 1 && f.sign_at(&hi) != 0 {
        out.push(Interval::new(lo, hi));
        return;
    }
    let mid = (&lo + &hi) / qi(2);
    if f.sign_at(&mid) == 0 {
        // rational root: isolate it as a point and keep the pieces around it clean
        let eps = (&hi - &lo) / qi(4);
        let mut e = eps;
        while sturm.count(&(&mid - &e), &(&mid + &e)) > 1 || f.sign_at(&(&mid - &e)) == 0 || f.sign_at(&(&mid + &e)) == 0 {
            e /= qi(2);
        }
        split(f, sturm, lo, &mid - &e, out);
        out.push(Interval::point(mid.clone()));
        split(f, sturm, &mid + &e, hi, out);
        return;
    }
    split(f, sturm, lo, mid.clone(), out);
    split(f, sturm, mid, hi, out);
}

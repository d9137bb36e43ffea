//! Exact LLL reduction on a Gram matrix and Fincke–Pohst enumeration of shifted lattices.

use num::{Signed, Zero};
use rayon::prelude::*;

use crate::arith::{ceil, floor, qi, qz, sqrt_upper, Q, Z};
use crate::linalg::{self, Mat, Rationals};

/// `G = Lᵗ·D·L` with `L` unit upper triangular, so that
/// `yᵗGy = Σ_i D_i (y_i + Σ_{j>i} m_ij y_j)²`.
#[derive(Clone, Debug)]
pub struct Ldl {
    pub pivots: Vec<Q>,
    pub m: Mat<Q>,
}

pub fn ldl(g: &Mat<Q>) -> Ldl {
    let n = g.len();
    let mut q = g.clone();
    for i in 0..n {
        for j in i + 1..n {
            q[j][i] = q[i][j].clone();
            q[i][j] = &q[i][j] / &q[i][i];
        }
        for k in i + 1..n {
            for l in k..n {
                let t = &q[k][i] * &q[i][l];
                q[k][l] -= t;
            }
        }
    }
    let pivots = (0..n).map(|i| q[i][i].clone()).collect();
    let m = (0..n).map(|i| (0..n).map(|j| if j > i { q[i][j].clone() } else { Q::zero() }).collect()).collect();
    Ldl { pivots, m }
}

fn congruent(u: &Mat<Z>, g: &Mat<Q>) -> Mat<Q> {
    let uq: Mat<Q> = u.iter().map(|r| r.iter().map(|x| qz(x.clone())).collect()).collect();
    let ug = linalg::mat_mul(&Rationals, &uq, g);
    linalg::mat_mul(&Rationals, &ug, &linalg::transpose(&uq))
}

fn round(x: &Q) -> Z {
    floor(&(x + Q::new(Z::from(1), Z::from(2))))
}

/// LLL with `δ = 3/4` on a positive definite Gram matrix. Returns the unimodular `U`
/// whose rows are the reduced basis in the old coordinates, and `U·G·Uᵗ`.
pub fn lll(g: &Mat<Q>) -> (Mat<Z>, Mat<Q>) {
    let n = g.len();
    let mut u: Mat<Z> = (0..n).map(|i| (0..n).map(|j| Z::from((i == j) as i32)).collect()).collect();
    if n <= 1 {
        return (u, g.clone());
    }
    let delta = Q::new(Z::from(3), Z::from(4));
    let mut k = 1;
    let mut gram = g.clone();
    while k < n {
        for j in (0..k).rev() {
            let mu = ldl(&gram).m[j][k].clone();
            let r = round(&mu);
            if !r.is_zero() {
                for c in 0..n {
                    let t = &r * &u[j][c];
                    u[k][c] -= t;
                }
                gram = congruent(&u, g);
            }
        }
        let f = ldl(&gram);
        let mu = &f.m[k - 1][k];
        if f.pivots[k] >= (&delta - mu * mu) * &f.pivots[k - 1] {
            k += 1;
        } else {
            u.swap(k, k - 1);
            gram = congruent(&u, g);
            k = k.max(2) - 1;
        }
    }
    (u, gram)
}

/// A preprocessed positive definite lattice `Zᴺ` with Gram `G`.
#[derive(Clone, Debug)]
pub struct Enumerator {
    gram: Mat<Q>,
    u: Mat<Z>,
    u_inv: Mat<Q>,
    ldl: Ldl,
}

impl Enumerator {
    pub fn new(gram: &Mat<Q>) -> Self {
        let (u, reduced) = lll(gram);
        let uq: Mat<Q> = u.iter().map(|r| r.iter().map(|x| qz(x.clone())).collect()).collect();
        let u_inv = linalg::inverse(&Rationals, &uq).expect("unimodular");
        let ldl = ldl(&reduced);
        Enumerator { gram: gram.clone(), u, u_inv, ldl }
    }

    pub fn dim(&self) -> usize {
        self.gram.len()
    }

    /// Pivots of the reduced basis; they bound lattice point counts.
    pub fn pivots(&self) -> &[Q] {
        &self.ldl.pivots
    }

    /// All `y ∈ s + Zᴺ` with `yᵗGy ≤ bound`, with their norms, sorted by norm then coordinates.
    pub fn shifted_points(&self, shift: &[Q], bound: &Q) -> Vec<(Q, Vec<Q>)> {
        let n = self.dim();
        if n == 0 {
            return if bound.is_negative() { vec![] } else { vec![(Q::zero(), vec![])] };
        }
        // y = y'·U, so y' = y·U⁻¹ and the shift moves accordingly
        let s: Vec<Q> = (0..n).map(|c| (0..n).map(|r| &shift[r] * &self.u_inv[r][c]).sum()).collect();
        let top = n - 1;
        let (lo, hi) = self.range(top, &s[top], &Q::zero(), bound);
        let tops: Vec<Z> = num::range_inclusive(lo, hi).collect();
        let mut pts: Vec<(Q, Vec<Q>)> = tops
            .par_iter()
            .flat_map_iter(|z| {
                let mut out = Vec::new();
                let mut y = vec![Q::zero(); n];
                y[top] = qz(z.clone()) + &s[top];
                let used = &self.ldl.pivots[top] * &y[top] * &y[top];
                if used <= *bound {
                    self.descend(top, &s, &mut y, used, bound, &mut out);
                }
                out
            })
            .map(|(norm, yr)| {
                let y: Vec<Q> = (0..n).map(|c| (0..n).map(|r| &yr[r] * qz(self.u[r][c].clone())).sum()).collect();
                (norm, y)
            })
            .collect();
        pts.sort();
        pts
    }

    fn range(&self, i: usize, s: &Q, t: &Q, budget: &Q) -> (Z, Z) {
        let r = sqrt_upper(&(budget / &self.ldl.pivots[i]), 24);
        let c = -(s + t);
        (ceil(&(&c - &r)), floor(&(&c + &r)))
    }

    fn descend(&self, i: usize, s: &[Q], y: &mut Vec<Q>, used: Q, bound: &Q, out: &mut Vec<(Q, Vec<Q>)>) {
        if i == 0 {
            out.push((used, y.clone()));
            return;
        }
        let j = i - 1;
        let t: Q = (j + 1..y.len()).map(|l| &self.ldl.m[j][l] * &y[l]).sum();
        let budget = bound - &used;
        let (lo, hi) = self.range(j, &s[j], &t, &budget);
        let mut z = lo;
        while z <= hi {
            let yj = qz(z.clone()) + &s[j];
            let w = &yj + &t;
            let next = &used + &self.ldl.pivots[j] * &w * &w;
            if next <= *bound {
                y[j] = yj;
                self.descend(j, s, y, next, bound, out);
            }
            z += 1;
        }
        y[j] = Q::zero();
    }

    /// Upper bound on `#{y ∈ s + Zᴺ : yᵗGy ≤ h}` from the enumeration box.
    pub fn count_upper(&self, h: f64) -> f64 {
        self.ldl.pivots.iter().map(|d| 2.0 * (h / crate::arith::to_f64(d)).sqrt() + 1.0).product()
    }
}

/// `qᵗ·G·q`.
pub fn norm(g: &Mat<Q>, y: &[Q]) -> Q {
    let mut s = Q::zero();
    for (i, yi) in y.iter().enumerate() {
        if yi.is_zero() {
            continue;
        }
        for (j, yj) in y.iter().enumerate() {
            s += yi * &g[i][j] * yj;
        }
    }
    s
}

pub(crate) fn half() -> Q {
    Q::new(Z::from(1), Z::from(2))
}

pub(crate) fn two() -> Q {
    qi(2)
}

//! Dense linear algebra over an exact field, plus integer Smith normal form.

use num::{One, Signed, Zero};

use crate::arith::{Q, Z};

/// Exact field operations used by the generic elimination routines.
pub trait Field {
    type E: Clone + PartialEq;
    fn zero(&self) -> Self::E;
    fn one(&self) -> Self::E;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn neg(&self, a: &Self::E) -> Self::E;
    /// Inverse of a nonzero element.
    fn inv(&self, a: &Self::E) -> Self::E;
    fn is_zero(&self, a: &Self::E) -> bool;
}

/// The rational numbers as a [`Field`].
#[derive(Clone, Copy, Debug, Default)]
pub struct Rationals;

impl Field for Rationals {
    type E = Q;
    fn zero(&self) -> Q {
        Q::zero()
    }
    fn one(&self) -> Q {
        Q::one()
    }
    fn add(&self, a: &Q, b: &Q) -> Q {
        a + b
    }
    fn sub(&self, a: &Q, b: &Q) -> Q {
        a - b
    }
    fn mul(&self, a: &Q, b: &Q) -> Q {
        a * b
    }
    fn neg(&self, a: &Q) -> Q {
        -a
    }
    fn inv(&self, a: &Q) -> Q {
        a.recip()
    }
    fn is_zero(&self, a: &Q) -> bool {
        a.is_zero()
    }
}

pub type Mat<E> = Vec<Vec<E>>;

pub fn identity<K: Field>(k: &K, n: usize) -> Mat<K::E> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { k.one() } else { k.zero() }).collect())
        .collect()
}

pub fn transpose<E: Clone>(m: &Mat<E>) -> Mat<E> {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len()).map(|j| m.iter().map(|row| row[j].clone()).collect()).collect()
}

pub fn mat_mul<K: Field>(k: &K, a: &Mat<K::E>, b: &Mat<K::E>) -> Mat<K::E> {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut s = k.zero();
                    for t in 0..inner {
                        if !k.is_zero(&row[t]) && !k.is_zero(&b[t][j]) {
                            s = k.add(&s, &k.mul(&row[t], &b[t][j]));
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec<K: Field>(k: &K, a: &Mat<K::E>, v: &[K::E]) -> Vec<K::E> {
    a.iter().map(|row| dot(k, row, v)).collect()
}

pub fn dot<K: Field>(k: &K, a: &[K::E], b: &[K::E]) -> K::E {
    let mut s = k.zero();
    for (x, y) in a.iter().zip(b) {
        if !k.is_zero(x) && !k.is_zero(y) {
            s = k.add(&s, &k.mul(x, y));
        }
    }
    s
}

/// Reduced row echelon form; returns the nonzero rows and their pivot columns.
pub fn rref<K: Field>(k: &K, rows: &[Vec<K::E>]) -> (Mat<K::E>, Vec<usize>) {
    let mut m: Mat<K::E> = rows.to_vec();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !k.is_zero(&m[i][c])) else {
            continue;
        };
        m.swap(r, p);
        let inv = k.inv(&m[r][c]);
        for j in c..ncols {
            m[r][j] = k.mul(&m[r][j], &inv);
        }
        for i in 0..m.len() {
            if i != r && !k.is_zero(&m[i][c]) {
                let f = m[i][c].clone();
                for j in c..ncols {
                    let t = k.mul(&f, &m[r][j]);
                    m[i][j] = k.sub(&m[i][j], &t);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank<K: Field>(k: &K, rows: &[Vec<K::E>]) -> usize {
    rref(k, rows).0.len()
}

pub fn det<K: Field>(k: &K, m: &Mat<K::E>) -> K::E {
    let n = m.len();
    let mut a = m.clone();
    let mut d = k.one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !k.is_zero(&a[i][c])) else {
            return k.zero();
        };
        if p != c {
            a.swap(p, c);
            d = k.neg(&d);
        }
        d = k.mul(&d, &a[c][c]);
        let inv = k.inv(&a[c][c]);
        for i in c + 1..n {
            if k.is_zero(&a[i][c]) {
                continue;
            }
            let f = k.mul(&a[i][c], &inv);
            for j in c..n {
                let t = k.mul(&f, &a[c][j]);
                a[i][j] = k.sub(&a[i][j], &t);
            }
        }
    }
    d
}

/// Determinant by cofactor expansion; uses only ring operations.
pub fn det_expand<K: Field>(k: &K, m: &Mat<K::E>) -> K::E {
    match m.len() {
        0 => k.one(),
        1 => m[0][0].clone(),
        2 => k.sub(&k.mul(&m[0][0], &m[1][1]), &k.mul(&m[0][1], &m[1][0])),
        n => {
            let mut s = k.zero();
            for j in 0..n {
                if k.is_zero(&m[0][j]) {
                    continue;
                }
                let minor: Mat<K::E> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| x.clone()).collect())
                    .collect();
                let t = k.mul(&m[0][j], &det_expand(k, &minor));
                s = if j % 2 == 0 { k.add(&s, &t) } else { k.sub(&s, &t) };
            }
            s
        }
    }
}

pub fn inverse<K: Field>(k: &K, m: &Mat<K::E>) -> Option<Mat<K::E>> {
    let n = m.len();
    if n == 0 {
        return Some(Vec::new());
    }
    let aug: Mat<K::E> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { k.one() } else { k.zero() }));
            r
        })
        .collect();
    let (red, piv) = rref(k, &aug);
    if piv.len() < n || piv[n - 1] != n - 1 {
        return None;
    }
    Some(red.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Solves `a x = b` for a square invertible `a`.
pub fn solve<K: Field>(k: &K, a: &Mat<K::E>, b: &[K::E]) -> Option<Vec<K::E>> {
    let inv = inverse(k, a)?;
    Some(mat_vec(k, &inv, b))
}

/// Basis of `{x : a x = 0}`.
pub fn nullspace<K: Field>(k: &K, a: &Mat<K::E>, ncols: usize) -> Mat<K::E> {
    let (red, piv) = rref(k, a);
    let free: Vec<usize> = (0..ncols).filter(|c| !piv.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![k.zero(); ncols];
            v[f] = k.one();
            for (r, &p) in piv.iter().enumerate() {
                v[p] = k.neg(&red[r][f]);
            }
            v
        })
        .collect()
}

/// Expresses `v` in terms of the given linearly independent rows, if it lies in their span.
pub fn coordinates_in<K: Field>(k: &K, rows: &[Vec<K::E>], v: &[K::E]) -> Option<Vec<K::E>> {
    let r = rows.len();
    let n = v.len();
    // columns: the basis vectors, then v
    let aug: Mat<K::E> = (0..n)
        .map(|i| {
            let mut row: Vec<K::E> = rows.iter().map(|b| b[i].clone()).collect();
            row.push(v[i].clone());
            row
        })
        .collect();
    let (red, piv) = rref(k, &aug);
    if piv.contains(&r) {
        return None;
    }
    let mut c = vec![k.zero(); r];
    for (i, &p) in piv.iter().enumerate() {
        c[p] = red[i][r].clone();
    }
    Some(c)
}

/// Smith normal form over the integers: `u · a · v = diag(s)` with unimodular `u`, `v`.
pub struct Smith {
    pub u: Mat<Z>,
    pub v: Mat<Z>,
    pub diag: Vec<Z>,
}

pub fn smith_normal_form(a: &Mat<Z>) -> Smith {
    let n = a.len();
    let m = if n == 0 { 0 } else { a[0].len() };
    let mut s = a.clone();
    let mut u: Mat<Z> = (0..n).map(|i| (0..n).map(|j| Z::from((i == j) as i32)).collect()).collect();
    let mut v: Mat<Z> = (0..m).map(|i| (0..m).map(|j| Z::from((i == j) as i32)).collect()).collect();
    let mut t = 0;
    while t < n.min(m) {
        // pivot: smallest nonzero absolute value in the remaining block
        let mut best: Option<(usize, usize)> = None;
        for i in t..n {
            for j in t..m {
                if !s[i][j].is_zero() && best.is_none_or(|(bi, bj)| s[i][j].abs() < s[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        s.swap(t, pi);
        u.swap(t, pi);
        for row in s.iter_mut() {
            row.swap(t, pj);
        }
        for row in v.iter_mut() {
            row.swap(t, pj);
        }
        let mut clean = true;
        for i in t + 1..n {
            let q = num::Integer::div_floor(&s[i][t], &s[t][t]);
            if !q.is_zero() {
                for j in 0..m {
                    let x = &q * &s[t][j];
                    s[i][j] -= x;
                }
                for j in 0..n {
                    let x = &q * &u[t][j];
                    u[i][j] -= x;
                }
            }
            if !s[i][t].is_zero() {
                clean = false;
            }
        }
        for j in t + 1..m {
            let q = num::Integer::div_floor(&s[t][j], &s[t][t]);
            if !q.is_zero() {
                for i in 0..n {
                    let x = &q * &s[i][t];
                    s[i][j] -= x;
                }
                for i in 0..m {
                    let x = &q * &v[i][t];
                    v[i][j] -= x;
                }
            }
            if !s[t][j].is_zero() {
                clean = false;
            }
        }
        if !clean {
            continue;
        }
        // divisibility: pivot must divide the rest of the block
        let mut fixed = false;
        'outer: for i in t + 1..n {
            for j in t + 1..m {
                if !(&s[i][j] % &s[t][t]).is_zero() {
                    for c in 0..m {
                        let x = s[i][c].clone();
                        s[t][c] += x;
                    }
                    for c in 0..n {
                        let x = u[i][c].clone();
                        u[t][c] += x;
                    }
                    fixed = true;
                    break 'outer;
                }
            }
        }
        if fixed {
            continue;
        }
        if s[t][t].is_negative() {
            for j in 0..m {
                s[t][j] = -s[t][j].clone();
            }
            for j in 0..n {
                u[t][j] = -u[t][j].clone();
            }
        }
        t += 1;
    }
    let diag = (0..n.min(m)).map(|i| s[i][i].clone()).collect();
    Smith { u, v, diag }
}

pub fn int_mat_mul(a: &Mat<Z>, b: &Mat<Z>) -> Mat<Z> {
    let cols = if b.is_empty() { 0 } else { b[0].len() };
    a.iter()
        .map(|row| (0..cols).map(|j| row.iter().zip(b).map(|(x, r)| x * &r[j]).sum()).collect())
        .collect()
}

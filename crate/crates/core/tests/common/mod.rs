//! Fixtures, random generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use ffskit::arith::{qf, qi, Q};
use ffskit::cyclealg::{OrbitDatum, QuadSpace, WeightFunction};
use ffskit::ffs::{FormalSeries, RationalRing};
use ffskit::numberfield::{FieldElem, NumberField};
use ffskit::symcone::{ConeLattice, ConePoint, SymMat};
use ffskit::theta::QuadLattice;

pub type IMat = Vec<Vec<i64>>;

pub fn rationals() -> Arc<NumberField> {
    Arc::new(NumberField::rationals())
}

pub fn golden() -> Arc<NumberField> {
    Arc::new(NumberField::golden())
}

pub fn sym1(f: &NumberField, x: Q) -> SymMat {
    SymMat::from_rational(f, &[vec![x]]).unwrap()
}

pub fn sym(f: &NumberField, rows: &[&[Q]]) -> SymMat {
    SymMat::from_rational(f, &rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
}

// ---- lattices

pub fn z_gram2() -> QuadLattice {
    QuadLattice::from_rational(rationals(), &[vec![qi(2)]]).unwrap()
}

pub fn z2_gram2() -> QuadLattice {
    QuadLattice::from_rational(rationals(), &[vec![qi(2), qi(0)], vec![qi(0), qi(2)]]).unwrap()
}

pub fn golden_gram2() -> QuadLattice {
    QuadLattice::from_rational(golden(), &[vec![qi(2)]]).unwrap()
}

/// Naive frame counts of an integral `ℚ`-lattice with integer Gram matrix `g`: every frame
/// with entries in `[-r, r]` and `tr Q ≤ b`, keyed by `Q(x)` (entries `½(x_a, x_b)`).
pub fn brute_counts_rational(g: &[Vec<i64>], n: usize, r: i64, b: i64) -> BTreeMap<Vec<Q>, u64> {
    let d = g.len();
    let vecs = box_vectors(d, r);
    let norm = |x: &[i64], y: &[i64]| -> i64 { (0..d).map(|i| (0..d).map(|k| x[i] * g[i][k] * y[k]).sum::<i64>()).sum() };
    let short: Vec<&Vec<i64>> = vecs.iter().filter(|x| norm(x, x) <= 2 * b).collect();
    let mut out = BTreeMap::new();
    let mut frame: Vec<&Vec<i64>> = Vec::new();
    fn rec<'a>(
        short: &[&'a Vec<i64>],
        n: usize,
        b: i64,
        frame: &mut Vec<&'a Vec<i64>>,
        norm: &dyn Fn(&[i64], &[i64]) -> i64,
        out: &mut BTreeMap<Vec<Q>, u64>,
    ) {
        if frame.len() == n {
            let tr: i64 = frame.iter().map(|x| norm(x, x)).sum();
            if tr <= 2 * b {
                let key = frame.iter().flat_map(|x| frame.iter().map(move |y| qf(norm(x, y), 2))).collect();
                *out.entry(key).or_insert(0) += 1;
            }
            return;
        }
        for x in short {
            frame.push(x);
            rec(short, n, b, frame, norm, out);
            frame.pop();
        }
    }
    rec(&short, n, b, &mut frame, &norm, &mut out);
    out
}

pub fn box_vectors(d: usize, r: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..d {
        out = out.into_iter().flat_map(|v| (-r..=r).map(move |c| [v.clone(), vec![c]].concat())).collect();
    }
    out
}

/// Naive counts for `O_F` of `ℚ(√5)` with `Q(x) = x²`: `x = a + bφ` over a box. Keys are the
/// coordinates of `x²` in the basis `{1, φ}`; `φ² = 1 + φ`.
pub fn brute_counts_golden(r: i64, b: i64) -> BTreeMap<(i64, i64), u64> {
    let mut out = BTreeMap::new();
    for a in -r..=r {
        for c in -r..=r {
            let sq = (a * a + c * c, 2 * a * c + c * c);
            // tr(u + vφ) = 2u + v
            if 2 * sq.0 + sq.1 <= b {
                *out.entry(sq).or_insert(0) += 1;
            }
        }
    }
    out
}

// ---- random series

pub fn random_q<R: Rng>(rng: &mut R) -> Q {
    let n = rng.gen_range(-6..=6);
    let d = rng.gen_range(1..=3);
    qf(if n == 0 { 1 } else { n }, d)
}

pub fn random_series<R: Rng>(rng: &mut R, cone: &ConeLattice, pool: &[ConePoint], bound: &Q, terms: usize) -> FormalSeries<RationalRing> {
    let k = rng.gen_range(1..=terms);
    let picks: Vec<(SymMat, Q)> = pool.choose_multiple(rng, k).map(|p| (p.t.clone(), random_q(rng))).collect();
    FormalSeries::from_terms(cone.clone(), RationalRing, bound.clone(), picks).unwrap()
}

// ---- signed permutation groups on ℚ^d with Gram 2I

pub fn ident(d: usize) -> IMat {
    (0..d).map(|i| (0..d).map(|k| i64::from(i == k)).collect()).collect()
}

pub fn imul(a: &IMat, b: &IMat) -> IMat {
    let d = a.len();
    (0..d).map(|i| (0..d).map(|k| (0..d).map(|j| a[i][j] * b[j][k]).sum()).collect()).collect()
}

pub fn iapply(a: &IMat, v: &[i64]) -> Vec<i64> {
    a.iter().map(|r| r.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

pub fn random_signed_perm<R: Rng>(rng: &mut R, d: usize, fixed: usize) -> IMat {
    let movable = d - fixed;
    let mut perm: Vec<usize> = (0..movable).collect();
    perm.shuffle(rng);
    let mut m = vec![vec![0; d]; d];
    for (i, &p) in perm.iter().enumerate() {
        m[p][i] = if rng.gen_bool(0.5) { 1 } else { -1 };
    }
    for i in movable..d {
        m[i][i] = 1;
    }
    m
}

/// Closure of the generators, or `None` past `cap` elements.
pub fn closure(gens: &[IMat], d: usize, cap: usize) -> Option<BTreeSet<IMat>> {
    let mut seen: BTreeSet<IMat> = BTreeSet::from([ident(d)]);
    let mut queue = vec![ident(d)];
    while let Some(g) = queue.pop() {
        for h in gens {
            let x = imul(h, &g);
            if seen.insert(x.clone()) {
                if seen.len() > cap {
                    return None;
                }
                queue.push(x);
            }
        }
    }
    Some(seen)
}

pub fn to_field_mat(f: &NumberField, m: &IMat) -> Vec<Vec<FieldElem>> {
    m.iter().map(|r| r.iter().map(|&x| f.from_int(x)).collect()).collect()
}

pub fn to_field_vec(f: &NumberField, v: &[i64]) -> Vec<FieldElem> {
    v.iter().map(|&x| f.from_int(x)).collect()
}

pub fn to_frame(f: &NumberField, x: &[Vec<i64>]) -> Vec<Vec<FieldElem>> {
    x.iter().map(|v| to_field_vec(f, v)).collect()
}

pub fn space_2i(f: &Arc<NumberField>, d: usize) -> QuadSpace {
    let g: Vec<Vec<Q>> = (0..d).map(|i| (0..d).map(|k| qi(if i == k { 2 } else { 0 })).collect()).collect();
    QuadSpace::from_rational(f.clone(), &g, 1).unwrap()
}

pub fn random_vector<R: Rng>(rng: &mut R, d: usize, r: i64) -> Vec<i64> {
    loop {
        let v: Vec<i64> = (0..d).map(|_| rng.gen_range(-r..=r)).collect();
        if v.iter().any(|&x| x != 0) {
            return v;
        }
    }
}

/// Γ-orbit of an integer frame.
pub fn frame_orbit(group: &BTreeSet<IMat>, x: &[Vec<i64>]) -> BTreeSet<Vec<Vec<i64>>> {
    group.iter().map(|g| x.iter().map(|v| iapply(g, v)).collect()).collect()
}

/// `x` together with a few signed permutations of it (all with `Q = Q(x)` for Gram `2I`),
/// closed up under `Γ`; one random positive weight per `Γ`-orbit.
pub fn invariant_weight<R: Rng>(rng: &mut R, f: &NumberField, group: &BTreeSet<IMat>, x: &[i64], fixed: usize, extra: usize) -> Vec<(Vec<Vec<i64>>, Q)> {
    let d = x.len();
    let mut seeds = vec![x.to_vec()];
    for _ in 0..extra {
        seeds.push(iapply(&random_signed_perm(rng, d, fixed), x));
    }
    let mut out: BTreeMap<Vec<Vec<i64>>, Q> = BTreeMap::new();
    for s in seeds {
        let orb = frame_orbit(group, &[s]);
        if orb.iter().any(|y| out.contains_key(y)) {
            continue;
        }
        let w = qi(rng.gen_range(1..=3));
        for y in orb {
            out.insert(y, w.clone());
        }
    }
    let _ = f;
    out.into_iter().collect()
}

pub fn weight(f: &NumberField, n: usize, pts: &[(Vec<Vec<i64>>, Q)]) -> WeightFunction {
    WeightFunction::new(n, pts.iter().map(|(x, w)| (to_frame(f, x), w.clone()))).unwrap()
}

pub fn q_of(x: &[i64]) -> i64 {
    x.iter().map(|c| c * c).sum()
}

/// Orbit datum on `ℚ^d` with Gram `2I` and the group generated by `gens`.
pub fn datum(f: &Arc<NumberField>, d: usize, gens: &[IMat]) -> OrbitDatum {
    OrbitDatum::new(space_2i(f, d), &gens.iter().map(|g| to_field_mat(f, g)).collect::<Vec<_>>()).unwrap()
}

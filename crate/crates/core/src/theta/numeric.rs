//! Floating-point evaluation of `q^T`, truncated series and Whittaker factors, with
//! reported bounds for the truncation tail and for rounding.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num::Complex;

use crate::arith::{to_f64, Q};
use crate::error::{invalid, Error, Result};
use crate::ffs::{FormalSeries, RationalRing};
use crate::numberfield::NumberField;
use crate::symcone::SymMat;

type C64 = Complex<f64>;

/// `τ = (τ_1, …, τ_d)` in the product of Siegel half-spaces of genus `n`.
#[derive(Clone, Debug)]
pub struct TauPoint {
    taus: Vec<Vec<Vec<C64>>>,
    lambda_min: f64,
}

impl TauPoint {
    pub fn new(taus: Vec<Vec<Vec<C64>>>) -> Result<Self> {
        if taus.is_empty() {
            return invalid("τ needs one matrix per real embedding");
        }
        let n = taus[0].len();
        let mut lambda_min = f64::INFINITY;
        for t in &taus {
            if t.len() != n || t.iter().any(|r| r.len() != n) || n == 0 {
                return invalid("τ components must be square matrices of one genus");
            }
            for i in 0..n {
                for k in 0..n {
                    if t[i][k] != t[k][i] {
                        return invalid("τ component is not symmetric");
                    }
                    if !t[i][k].re.is_finite() || !t[i][k].im.is_finite() {
                        return invalid("τ has a non-finite entry");
                    }
                }
            }
            let v = DMatrix::from_fn(n, n, |i, k| t[i][k].im);
            let eig = SymmetricEigen::new(v).eigenvalues;
            let m = eig.iter().cloned().fold(f64::INFINITY, f64::min);
            // eigenvalues carry a relative error of a few ulps of the largest one
            let slack = 64.0 * f64::EPSILON * eig.iter().map(|x| x.abs()).fold(0.0, f64::max);
            if m - slack <= 0.0 {
                return invalid("imaginary part of τ is not positive definite");
            }
            lambda_min = lambda_min.min(m - slack);
        }
        Ok(TauPoint { taus, lambda_min })
    }

    /// Genus-1 point `τ_j = x_j + i·y_j`.
    pub fn scalar(points: &[(f64, f64)]) -> Result<Self> {
        TauPoint::new(points.iter().map(|&(x, y)| vec![vec![C64::new(x, y)]]).collect())
    }

    pub fn genus(&self) -> usize {
        self.taus[0].len()
    }

    pub fn places(&self) -> usize {
        self.taus.len()
    }

    pub fn components(&self) -> &[Vec<Vec<C64>>] {
        &self.taus
    }

    /// Certified-by-slack lower bound on the smallest eigenvalue of every `Im τ_j`.
    pub fn lambda_min(&self) -> f64 {
        self.lambda_min
    }

    /// `Π_j det(Im τ_j)`.
    pub fn norm_det_im(&self) -> f64 {
        self.taus.iter().map(|t| DMatrix::from_fn(t.len(), t.len(), |i, k| t[i][k].im).determinant()).product()
    }

    /// `τ + β` for a real symmetric shift per place.
    pub fn translate(&self, beta: &[Vec<Vec<f64>>]) -> Result<TauPoint> {
        let taus = self
            .taus
            .iter()
            .zip(beta)
            .map(|(t, b)| t.iter().zip(b).map(|(r, br)| r.iter().zip(br).map(|(z, x)| z + x).collect()).collect())
            .collect();
        TauPoint::new(taus)
    }

    fn check(&self, f: &NumberField, t: &SymMat) -> Result<()> {
        if self.places() != f.degree() || self.genus() != t.n() {
            return invalid(format!(
                "τ has {} places of genus {}, exponent needs {} places of genus {}",
                self.places(),
                self.genus(),
                f.degree(),
                t.n()
            ));
        }
        Ok(())
    }
}

/// `Σ_j tr(σ_j(T)·τ_j)` as a complex number.
fn phase(f: &NumberField, t: &SymMat, tau: &TauPoint) -> C64 {
    let n = t.n();
    let mut s = C64::new(0.0, 0.0);
    for (j, tj) in tau.taus.iter().enumerate() {
        for i in 0..n {
            for k in 0..n {
                s += tj[k][i] * f.embed_f64(t.get(i, k), j);
            }
        }
    }
    s
}

/// `q^T = e(Σ_j tr(σ_j(T)·τ_j))`.
pub fn q_power(f: &NumberField, t: &SymMat, tau: &TauPoint) -> Result<C64> {
    tau.check(f, t)?;
    Ok((C64::new(0.0, 2.0 * PI) * phase(f, t, tau)).exp())
}

/// `W_T(g'_τ) = Π_j det(v_j)^{(m+2)/4}·e(tr(σ_j(T)·τ_j))`, principal branch.
pub fn whittaker_factor(f: &NumberField, t: &SymMat, tau: &TauPoint, m: u32) -> Result<C64> {
    tau.check(f, t)?;
    let n = t.n();
    let mut out = C64::new(1.0, 0.0);
    for (j, tj) in tau.taus.iter().enumerate() {
        let det = DMatrix::from_fn(n, n, |i, k| tj[i][k].im).determinant();
        let mut s = C64::new(0.0, 0.0);
        for i in 0..n {
            for k in 0..n {
                s += tj[k][i] * f.embed_f64(t.get(i, k), j);
            }
        }
        out *= det.powf((m as f64 + 2.0) / 4.0) * (C64::new(0.0, 2.0 * PI) * s).exp();
    }
    Ok(out)
}

/// What is known about the coefficients beyond a series' bound.
#[derive(Clone, Debug, PartialEq)]
pub enum TailModel {
    /// No terms above the bound.
    Exact,
    /// Coefficients count frames of a lattice whose reduced `ℤ`-basis has these pivots.
    LatticeCount { pivots: Vec<Q>, genus: usize },
    Unknown,
}

impl TailModel {
    /// Model for a product of two series; `exact_fits` says whether the product of two
    /// exact series fits under the result bound.
    pub fn product(&self, o: &TailModel, exact_fits: bool) -> TailModel {
        match (self, o) {
            (TailModel::Exact, TailModel::Exact) if exact_fits => TailModel::Exact,
            (TailModel::LatticeCount { pivots: a, genus: g }, TailModel::LatticeCount { pivots: b, genus: h }) if g == h => {
                TailModel::LatticeCount { pivots: a.iter().chain(b).cloned().collect(), genus: *g }
            }
            _ => TailModel::Unknown,
        }
    }

    /// Bound on `Σ_{h(T) > b} |a(T)|·|q^T|` given `λ_min(Im τ)`.
    pub fn tail_bound(&self, b: &Q, lambda: f64) -> f64 {
        match self {
            TailModel::Exact => 0.0,
            TailModel::Unknown => f64::INFINITY,
            TailModel::LatticeCount { pivots, genus } => {
                let pv: Vec<f64> = pivots.iter().map(to_f64).collect();
                // frames with height ≤ h have each component of trace norm ≤ 2h
                let count = |h: f64| -> f64 { pv.iter().map(|d| 2.0 * (2.0 * h / d).sqrt() + 1.0).product::<f64>().powi(*genus as i32) };
                let b = to_f64(b);
                let term = |k: f64| count(b + k + 1.0) * (-2.0 * PI * lambda * (b + k)).exp();
                let mut total = 0.0;
                let mut k = 0.0;
                let mut cur = term(0.0);
                for _ in 0..1_000_000 {
                    let next = term(k + 1.0);
                    total += cur;
                    if next <= cur / 2.0 {
                        // the shell ratio is nonincreasing, so the rest is geometric
                        return total + 2.0 * next;
                    }
                    cur = next;
                    k += 1.0;
                }
                f64::INFINITY
            }
        }
    }
}

/// A value with bounds on what truncation and floating point could have moved.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub value: C64,
    pub tail_bound: f64,
    pub rounding_bound: f64,
}

impl Evaluation {
    pub fn error_bound(&self) -> f64 {
        self.tail_bound + self.rounding_bound
    }
}

/// `Σ_T a(T)·q^T` for a rational series. Fails with a precision error when `tol` is
/// given and the combined bound exceeds it.
pub fn numeric_eval(series: &FormalSeries<RationalRing>, tail: &TailModel, tau: &TauPoint, tol: Option<f64>) -> Result<Evaluation> {
    let f = series.cone().field().clone();
    let n = series.cone().n();
    if tau.places() != f.degree() || tau.genus() != n {
        return invalid(format!("τ must have {} places of genus {n}", f.degree()));
    }
    let ops = (16 * n * n * f.degree() + 16) as f64;
    let mut value = C64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    let mut rounding = 0.0;
    for (p, a) in series.terms() {
        let ph = phase(&f, &p.t, tau);
        let term = (C64::new(0.0, 2.0 * PI) * ph).exp() * to_f64(a);
        let mag = term.norm();
        rounding += mag * ops * f64::EPSILON * (1.0 + 2.0 * PI * ph.norm());
        abs_sum += mag;
        value += term;
    }
    rounding += abs_sum * (series.len() as f64 + 1.0) * f64::EPSILON;
    let tail_bound = tail.tail_bound(series.bound(), tau.lambda_min());
    let ev = Evaluation { value, tail_bound, rounding_bound: rounding };
    if let Some(tol) = tol {
        if !(ev.error_bound() <= tol) {
            return Err(Error::PrecisionExhausted(format!(
                "error bound {:e} (tail {:e}, rounding {:e}) exceeds tolerance {tol:e}; raise the height bound",
                ev.error_bound(),
                ev.tail_bound,
                ev.rounding_bound
            )));
        }
    }
    Ok(ev)
}

/// Default tolerance, overridable through `FFSKIT_PRECISION`.
pub fn default_tolerance() -> Result<f64> {
    match std::env::var("FFSKIT_PRECISION") {
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
            _ => Err(Error::Schema(format!("FFSKIT_PRECISION must be a positive number, got {s:?}"))),
        },
        Err(_) => Ok(1e-10),
    }
}

//! Hodge-type bookkeeping for cohomological representations of `SO(m, 2)`: the pairs
//! `(R₊, R₋)`, off-diagonal degrees, odd Betti vanishing, the unconditional modularity range
//! and the embedding-trick parameter `ℓ`.

use std::collections::BTreeSet;
use std::fmt::Write;

use crate::error::{invalid, Result};

/// θ-stable parabolic data `(r, s, sign a₀, δ₊, δ₋)` for `SO(m, 2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParabolicDatum {
    pub m: u32,
    pub r: u32,
    pub s: u32,
    /// Sign of `a₀`; fixed to `+1` when `s = 0`.
    pub sign_a0: i8,
    pub delta_plus: u32,
    pub delta_minus: u32,
}

impl ParabolicDatum {
    pub fn new(m: u32, r: u32, s: u32, sign_a0: i8, delta_plus: u32, delta_minus: u32) -> Result<Self> {
        if m == 0 {
            return invalid("m must be positive");
        }
        if r > m / 2 || s > 1 || 2 * (r + s) >= m {
            return invalid(format!("need 0 ≤ r ≤ ⌊m/2⌋, s ∈ {{0,1}} and r + s < m/2 (m={m}, r={r}, s={s})"));
        }
        if delta_plus + delta_minus > r {
            return invalid("need δ₊ + δ₋ ≤ r");
        }
        if s == 0 && (delta_plus != 0 || delta_minus != 0) {
            return invalid("s = 0 forces δ₊ = δ₋ = 0");
        }
        if s == 1 && sign_a0 != 1 && sign_a0 != -1 {
            return invalid("sign of a₀ must be ±1");
        }
        let sign_a0 = if s == 0 { 1 } else { sign_a0 };
        Ok(ParabolicDatum { m, r, s, sign_a0, delta_plus, delta_minus })
    }

    /// Every valid datum for the given `m`.
    pub fn all(m: u32) -> Vec<ParabolicDatum> {
        let mut out = Vec::new();
        for r in 0..=m / 2 {
            for s in 0..=1 {
                let signs: &[i8] = if s == 0 { &[1] } else { &[1, -1] };
                for &sign in signs {
                    for dp in 0..=r {
                        for dm in 0..=(r - dp) {
                            if let Ok(p) = ParabolicDatum::new(m, r, s, sign, dp, dm) {
                                out.push(p);
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// `(R₊, R₋)`: `(r, r)` for `s = 0`, else `(r − δ₊, m − r − δ₋)` or its mirror by the sign of `a₀`.
    pub fn r_plus_minus(&self) -> (u32, u32) {
        let (m, r, dp, dm) = (self.m, self.r, self.delta_plus, self.delta_minus);
        match (self.s, self.sign_a0) {
            (0, _) => (r, r),
            (_, 1) => (r - dp, m - r - dm),
            _ => (m - r - dp, r - dm),
        }
    }
}

/// Total degrees `R₊ + R₋` of the data with `R₊ ≠ R₋`.
pub fn allowed_offdiagonal_degrees(m: u32) -> BTreeSet<u32> {
    ParabolicDatum::all(m)
        .iter()
        .map(|p| p.r_plus_minus())
        .filter(|(a, b)| a != b)
        .map(|(a, b)| a + b)
        .collect()
}

/// `m − ⌊m/2⌋`, the lower bound for off-diagonal degrees.
pub fn offdiagonal_bound(m: u32) -> u32 {
    m - m / 2
}

/// Largest `k ≥ 1` with `2k − 1 < ⌈m/2⌉`.
pub fn betti_vanishing_max(m: u32) -> Option<u32> {
    let c = m.div_ceil(2);
    // 2k − 1 < c  ⇔  k ≤ c/2 for integers
    let k = c / 2;
    (k >= 1).then_some(k)
}

/// Largest `n ≥ 1` with `n·d₊ < (m+2)/4` (`m` even) or `(m+3)/4` (`m` odd).
pub fn unconditional_modularity_range(m: u32, d_plus: u32) -> Option<u32> {
    assert!(d_plus >= 1, "d_plus must be positive");
    let num = if m % 2 == 0 { m + 2 } else { m + 3 };
    // 4·n·d₊ < num
    let n = (num - 1) / (4 * d_plus);
    (n >= 1).then_some(n)
}

/// The embedding-trick parameter with its consistency check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EllChoice {
    pub ell: u32,
    /// `m + 4ℓ`.
    pub m_tilde: u32,
    /// Whether `2nd₊ − 1 < ⌈m̃/2⌉`, so that `H^{2nd₊−1}` vanishes for the enlarged space.
    pub consistent: bool,
}

pub fn required_ell(n: u32, d_plus: u32, m: u32) -> EllChoice {
    let ell = n * d_plus + 1;
    let m_tilde = m + 4 * ell;
    let consistent = betti_vanishing_max(m_tilde).is_some_and(|k| k >= n * d_plus);
    EllChoice { ell, m_tilde, consistent }
}

/// One row of the bounds table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HodgeRow {
    pub m: u32,
    pub d_plus: u32,
    pub n: u32,
    pub modular_n_max: Option<u32>,
    pub betti_k_max: Option<u32>,
    pub offdiag_min: Option<u32>,
    pub offdiag_bound: u32,
    pub ell: EllChoice,
}

pub fn table(ms: impl IntoIterator<Item = u32>, d_plus: u32, n: u32) -> Vec<HodgeRow> {
    ms.into_iter()
        .map(|m| HodgeRow {
            m,
            d_plus,
            n,
            modular_n_max: unconditional_modularity_range(m, d_plus),
            betti_k_max: betti_vanishing_max(m),
            offdiag_min: allowed_offdiagonal_degrees(m).first().copied(),
            offdiag_bound: offdiagonal_bound(m),
            ell: required_ell(n, d_plus, m),
        })
        .collect()
}

const COLUMNS: [&str; 9] = ["m", "d_plus", "n", "modular_n_max", "betti_k_max", "offdiag_min", "offdiag_bound", "ell", "ell_consistent"];

fn cells(r: &HodgeRow) -> Vec<String> {
    let opt = |x: Option<u32>| x.map_or("none".to_string(), |v| v.to_string());
    vec![
        r.m.to_string(),
        r.d_plus.to_string(),
        r.n.to_string(),
        opt(r.modular_n_max),
        opt(r.betti_k_max),
        opt(r.offdiag_min),
        r.offdiag_bound.to_string(),
        r.ell.ell.to_string(),
        r.ell.consistent.to_string(),
    ]
}

pub fn render_csv(rows: &[HodgeRow]) -> String {
    let mut s = COLUMNS.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&cells(r).join(","));
        s.push('\n');
    }
    s
}

pub fn render_markdown(rows: &[HodgeRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "| {} |", COLUMNS.join(" | "));
    let _ = writeln!(s, "|{}", "---|".repeat(COLUMNS.len()));
    for r in rows {
        let _ = writeln!(s, "| {} |", cells(r).join(" | "));
    }
    s
}

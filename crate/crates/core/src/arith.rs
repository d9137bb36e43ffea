//! Exact rational helpers and closed rational intervals.

use num::bigint::Sign;
use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Z = BigInt;
pub type Q = BigRational;

pub fn qi(n: i64) -> Q {
    Q::from_integer(Z::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(Z::from(n), Z::from(d))
}

pub fn qz(n: Z) -> Q {
    Q::from_integer(n)
}

/// Parses `"p"`, `"p/q"` or a plain decimal like `"0.25"`.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Schema(format!("not a rational number: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: Z = p.trim().parse().map_err(|_| bad())?;
        let q: Z = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Q::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = int.starts_with('-');
        let int = int.trim_start_matches(['-', '+']);
        let int: Z = if int.is_empty() { Z::zero() } else { int.parse().map_err(|_| bad())? };
        let num: Z = frac.parse().map_err(|_| bad())?;
        let den = num::pow(Z::from(10), frac.len());
        let v = Q::new(int * &den + num, den);
        return Ok(if neg { -v } else { v });
    }
    let p: Z = s.parse().map_err(|_| bad())?;
    Ok(Q::from_integer(p))
}

pub fn is_integer(x: &Q) -> bool {
    x.denom().is_one()
}

pub fn floor(x: &Q) -> Z {
    x.floor().to_integer()
}

pub fn ceil(x: &Q) -> Z {
    x.ceil().to_integer()
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        if x.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

pub fn lcm(a: &Z, b: &Z) -> Z {
    a.lcm(b)
}

/// Smallest dyadic `k/2^bits` that is `>= sqrt(x)`, for `x >= 0`.
pub fn sqrt_upper(x: &Q, bits: u32) -> Q {
    debug_assert!(!x.is_negative());
    let scale = Z::one() << (2 * bits);
    let scaled = ceil(&(x * qz(scale)));
    let mut r = scaled.sqrt();
    if &r * &r < scaled {
        r += 1;
    }
    Q::new(r, Z::one() << bits)
}

/// Largest dyadic `k/2^bits` that is `<= sqrt(x)`, for `x >= 0`.
pub fn sqrt_lower(x: &Q, bits: u32) -> Q {
    debug_assert!(!x.is_negative());
    let scale = Z::one() << (2 * bits);
    let scaled = floor(&(x * qz(scale)));
    Q::new(scaled.sqrt(), Z::one() << bits)
}

pub fn sign(x: &Q) -> i8 {
    match x.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

/// Closed interval `[lo, hi]` with rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Q,
    pub hi: Q,
}

impl Interval {
    pub fn new(lo: Q, hi: Q) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn point(x: Q) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn width(&self) -> Q {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Q) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn add(&self, o: &Interval) -> Interval {
        Interval::new(&self.lo + &o.lo, &self.hi + &o.hi)
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Interval::new(lo, hi)
    }

    pub fn scale(&self, c: &Q) -> Interval {
        let a = &self.lo * c;
        let b = &self.hi * c;
        if a <= b {
            Interval::new(a, b)
        } else {
            Interval::new(b, a)
        }
    }

    pub fn abs_upper(&self) -> Q {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn midpoint(&self) -> Q {
        (&self.lo + &self.hi) / qi(2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_q("3").unwrap(), qi(3));
        assert_eq!(parse_q("-6/4").unwrap(), qf(-3, 2));
        assert_eq!(parse_q("0.25").unwrap(), qf(1, 4));
        assert_eq!(parse_q("-1.5").unwrap(), qf(-3, 2));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
    }

    #[test]
    fn sqrt_bounds_bracket() {
        for n in 0..50 {
            let x = qf(n, 7);
            let hi = sqrt_upper(&x, 20);
            let lo = sqrt_lower(&x, 20);
            assert!(&hi * &hi >= x);
            assert!(&lo * &lo <= x);
            assert!(hi - lo <= qf(1, 1 << 19));
        }
    }
}

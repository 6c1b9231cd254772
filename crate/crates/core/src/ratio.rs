//! Surface-area-to-volume ratios.
//!
//! `⌊βn⌋` decides which census row a ratio selects, so a ratio supplied as
//! a fraction (`"3/2"`) or a decimal literal (`"0.35"`) is kept exact.
//! Ratios that only exist as `f64` use a floating floor with an absolute
//! guard of [`FLOAT_FLOOR_GUARD`], so that e.g. `0.1 * 30` lands on 3.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const FLOAT_FLOOR_GUARD: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Beta {
    Exact(Ratio<i64>),
    Float(f64),
}

impl Beta {
    pub fn exact(numer: i64, denom: i64) -> Self {
        Beta::Exact(Ratio::new(numer, denom))
    }

    pub fn value(&self) -> f64 {
        match *self {
            Beta::Exact(r) => *r.numer() as f64 / *r.denom() as f64,
            Beta::Float(x) => x,
        }
    }

    /// `⌊β·n⌋`.
    pub fn floor_times(&self, n: u64) -> i64 {
        match *self {
            Beta::Exact(r) => Integer::div_floor(&(*r.numer() as i128 * n as i128), &(*r.denom() as i128)) as i64,
            Beta::Float(x) => (x * n as f64 + FLOAT_FLOOR_GUARD).floor() as i64,
        }
    }

    pub fn as_ratio(&self) -> Option<Ratio<i64>> {
        match *self {
            Beta::Exact(r) => Some(r),
            Beta::Float(_) => None,
        }
    }

    pub fn is_positive(&self) -> bool {
        match *self {
            Beta::Exact(r) => *r.numer() > 0,
            Beta::Float(x) => x > 0.0,
        }
    }

    /// True iff `0 < β < bound` for an integer `bound`.
    pub fn in_open_range(&self, bound: i64) -> bool {
        match *self {
            Beta::Exact(r) => *r.numer() > 0 && r < Ratio::from_integer(bound),
            Beta::Float(x) => x > 0.0 && x < bound as f64,
        }
    }

    /// `λβ₁ + (1-λ)β₂`, exact when all three inputs are.
    pub fn mix(lambda: Beta, b1: Beta, b2: Beta) -> Beta {
        match (lambda, b1, b2) {
            (Beta::Exact(l), Beta::Exact(x), Beta::Exact(y)) => {
                Beta::Exact(l * x + (Ratio::from_integer(1) - l) * y)
            }
            _ => {
                let l = lambda.value();
                Beta::Float(l * b1.value() + (1.0 - l) * b2.value())
            }
        }
    }
}

impl From<f64> for Beta {
    fn from(x: f64) -> Self {
        Beta::Float(x)
    }
}

impl fmt::Display for Beta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Beta::Exact(r) if *r.denom() == 1 => write!(f, "{}", r.numer()),
            Beta::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Beta::Float(x) => write!(f, "{x}"),
        }
    }
}

impl FromStr for Beta {
    type Err = Error;

    /// Accepts `"p/q"`, integers and plain decimals; all parse exactly.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parameter(format!("cannot parse ratio {s:?}"));
        if let Some((a, b)) = s.split_once('/') {
            let a: i64 = a.trim().parse().map_err(|_| bad())?;
            let b: i64 = b.trim().parse().map_err(|_| bad())?;
            if b == 0 {
                return Err(bad());
            }
            return Ok(Beta::exact(a, b));
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.len() > 15 || !frac.bytes().all(|c| c.is_ascii_digit()) {
                return s.parse::<f64>().map(Beta::Float).map_err(|_| bad());
            }
            let neg = int.starts_with('-');
            let int: i64 = if int.is_empty() || int == "-" { 0 } else { int.parse().map_err(|_| bad())? };
            let scale = 10i64.pow(frac.len() as u32);
            let frac_v: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
            let numer = int.abs() * scale + frac_v;
            return Ok(Beta::exact(if neg { -numer } else { numer }, scale));
        }
        let n: i64 = s.parse().map_err(|_| bad())?;
        Ok(Beta::exact(n, 1))
    }
}

impl Serialize for Beta {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Beta::Exact(_) => s.serialize_str(&self.to_string()),
            Beta::Float(x) => s.serialize_f64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for Beta {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Number(f64),
        }
        match Repr::deserialize(de)? {
            Repr::Text(t) => t.parse().map_err(serde::de::Error::custom),
            Repr::Number(x) => Ok(Beta::Float(x)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_floor() {
        let b: Beta = "3/2".parse().unwrap();
        assert_eq!(b.floor_times(7), 10);
        assert_eq!(b.floor_times(4), 6);
        let b: Beta = "0.1".parse().unwrap();
        assert_eq!(b.floor_times(30), 3);
        assert_eq!(Beta::exact(-3, 2).floor_times(1), -2);
    }

    #[test]
    fn float_floor_guard() {
        assert_eq!(Beta::Float(0.1).floor_times(30), 3);
        assert_eq!(Beta::Float(0.7).floor_times(10), 7);
    }

    #[test]
    fn parsing() {
        assert_eq!("2".parse::<Beta>().unwrap(), Beta::exact(2, 1));
        assert_eq!("1.25".parse::<Beta>().unwrap(), Beta::exact(5, 4));
        assert!("x/2".parse::<Beta>().is_err());
        assert!("1/0".parse::<Beta>().is_err());
        assert_eq!(Beta::exact(3, 2).to_string(), "3/2");
    }

    #[test]
    fn range_and_mix() {
        assert!(Beta::exact(3, 2).in_open_range(2));
        assert!(!Beta::exact(2, 1).in_open_range(2));
        assert!(!Beta::exact(0, 1).in_open_range(2));
        let m = Beta::mix(Beta::exact(1, 2), Beta::exact(1, 1), Beta::exact(2, 1));
        assert_eq!(m, Beta::exact(3, 2));
    }
}

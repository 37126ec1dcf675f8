use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A real interval with independently open or closed endpoints.
///
/// Infinite endpoints are always open. Membership tests compare exactly
/// against the stored endpoint values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lower: f64,
    upper: f64,
    lower_closed: bool,
    upper_closed: bool,
}

impl Interval {
    pub fn new(lower: f64, upper: f64, lower_closed: bool, upper_closed: bool) -> Result<Self> {
        if lower.is_nan() || upper.is_nan() {
            return Err(Error::InvalidInterval("NaN endpoint".into()));
        }
        if !(lower < upper) {
            return Err(Error::InvalidInterval(format!(
                "lower {lower} must be below upper {upper}"
            )));
        }
        Ok(Interval {
            lower,
            upper,
            lower_closed: lower_closed && lower.is_finite(),
            upper_closed: upper_closed && upper.is_finite(),
        })
    }

    pub fn open(lower: f64, upper: f64) -> Result<Self> {
        Self::new(lower, upper, false, false)
    }

    pub fn closed(lower: f64, upper: f64) -> Result<Self> {
        Self::new(lower, upper, true, true)
    }

    /// `[lower, upper)`
    pub fn half_open(lower: f64, upper: f64) -> Result<Self> {
        Self::new(lower, upper, true, false)
    }

    pub fn real_line() -> Self {
        Interval {
            lower: f64::NEG_INFINITY,
            upper: f64::INFINITY,
            lower_closed: false,
            upper_closed: false,
        }
    }

    /// `(0, +inf)`
    pub fn positive_axis() -> Self {
        Interval {
            lower: 0.0,
            upper: f64::INFINITY,
            lower_closed: false,
            upper_closed: false,
        }
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn lower_closed(&self) -> bool {
        self.lower_closed
    }

    pub fn upper_closed(&self) -> bool {
        self.upper_closed
    }

    pub fn is_finite(&self) -> bool {
        self.lower.is_finite() && self.upper.is_finite()
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn contains(&self, t: f64) -> bool {
        if t.is_nan() {
            return false;
        }
        let above = t > self.lower || (self.lower_closed && t == self.lower);
        let below = t < self.upper || (self.upper_closed && t == self.upper);
        above && below
    }

    /// Strict interior membership, ignoring endpoint closedness.
    pub fn interior_contains(&self, t: f64) -> bool {
        t > self.lower && t < self.upper
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        let lower_ok = self.lower < other.lower
            || (self.lower == other.lower && (self.lower_closed || !other.lower_closed));
        let upper_ok = self.upper > other.upper
            || (self.upper == other.upper && (self.upper_closed || !other.upper_closed));
        lower_ok && upper_ok
    }

    /// Containment with a small relative slack on the endpoint
    /// comparisons, absorbing the rounding of computed endpoint images.
    pub fn contains_interval_approx(&self, other: &Interval, rel: f64) -> bool {
        let slack = |x: f64| rel * x.abs().max(1.0);
        let lower_ok =
            self.lower == f64::NEG_INFINITY || other.lower >= self.lower - slack(self.lower);
        let upper_ok = self.upper == f64::INFINITY || other.upper <= self.upper + slack(self.upper);
        lower_ok && upper_ok
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let (lower, lower_closed) = if self.lower > other.lower {
            (self.lower, self.lower_closed)
        } else if self.lower < other.lower {
            (other.lower, other.lower_closed)
        } else {
            (self.lower, self.lower_closed && other.lower_closed)
        };
        let (upper, upper_closed) = if self.upper < other.upper {
            (self.upper, self.upper_closed)
        } else if self.upper > other.upper {
            (other.upper, other.upper_closed)
        } else {
            (self.upper, self.upper_closed && other.upper_closed)
        };
        Interval::new(lower, upper, lower_closed, upper_closed).ok()
    }

    /// Equally spaced points strictly inside the interval. Requires finite
    /// endpoints.
    pub fn interior_grid(&self, n: usize) -> Result<Vec<f64>> {
        if !self.is_finite() {
            return Err(Error::InvalidArgument(
                "interior grid requires a finite interval".into(),
            ));
        }
        if n == 0 {
            return Ok(Vec::new());
        }
        let w = self.width();
        Ok((0..n)
            .map(|j| self.lower + w * (j as f64 + 0.5) / n as f64)
            .collect())
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lb = if self.lower_closed { '[' } else { '(' };
        let ub = if self.upper_closed { ']' } else { ')' };
        let lo = if self.lower == f64::NEG_INFINITY {
            "-inf".to_string()
        } else {
            format!("{}", self.lower)
        };
        let hi = if self.upper == f64::INFINITY {
            "inf".to_string()
        } else {
            format!("{}", self.upper)
        };
        write!(f, "{lb}{lo},{hi}{ub}")
    }
}

fn parse_endpoint(s: &str) -> Result<f64> {
    let t = s.trim();
    match t {
        "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
        "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
        _ => t.parse::<f64>().map_err(|_| Error::ParseError {
            what: "interval endpoint",
            input: s.to_string(),
        }),
    }
}

impl FromStr for Interval {
    type Err = Error;

    /// Parses `"(l,u)"`, `"[l,u]"`, `"[l,inf)"` and the mixed variants.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let err = || Error::ParseError {
            what: "interval",
            input: s.to_string(),
        };
        let mut chars = t.chars();
        let first = chars.next().ok_or_else(err)?;
        let last = t.chars().last().ok_or_else(err)?;
        let lower_closed = match first {
            '[' => true,
            '(' => false,
            _ => return Err(err()),
        };
        let upper_closed = match last {
            ']' => true,
            ')' => false,
            _ => return Err(err()),
        };
        let inner = &t[1..t.len() - 1];
        let (lo, hi) = inner.split_once(',').ok_or_else(err)?;
        Interval::new(
            parse_endpoint(lo)?,
            parse_endpoint(hi)?,
            lower_closed,
            upper_closed,
        )
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn membership_is_exact_at_endpoints() {
        let half = Interval::half_open(0.0, 1.0).unwrap();
        assert!(half.contains(0.0));
        assert!(!half.contains(1.0));
        assert!(half.contains(0.5));
        let open = Interval::open(0.0, 1.0).unwrap();
        assert!(!open.contains(0.0));
    }

    #[test]
    fn infinite_endpoints_are_open() {
        let i = Interval::new(0.0, f64::INFINITY, true, true).unwrap();
        assert!(i.lower_closed());
        assert!(!i.upper_closed());
        assert!(i.contains(1e300));
        assert!(!i.contains(f64::INFINITY));
    }

    #[test]
    fn rejects_degenerate() {
        assert!(Interval::open(1.0, 1.0).is_err());
        assert!(Interval::open(2.0, 1.0).is_err());
    }

    #[test]
    fn parse_roundtrip() {
        for s in ["(0.1,10)", "[0,1)", "[-1,1]", "[0,inf)", "(-inf,0]"] {
            let i: Interval = s.parse().unwrap();
            assert_eq!(i.to_string(), s.replace("10)", "10)"));
            let j: Interval = i.to_string().parse().unwrap();
            assert_eq!(i, j);
        }
    }

    #[test]
    fn interior_grid_stays_inside() {
        let i = Interval::open(-1.0, 1.0).unwrap();
        let g = i.interior_grid(64).unwrap();
        assert_eq!(g.len(), 64);
        assert!(g.iter().all(|&t| i.interior_contains(t)));
    }
}

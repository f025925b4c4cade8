//! Rational time values and static firing intervals.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use thiserror::Error;

/// A non-negative rational amount of time units.
pub type Time = Ratio<i64>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TimeParseError {
    #[error("empty time value")]
    Empty,
    #[error("invalid time value '{0}'")]
    Invalid(String),
    #[error("negative time value '{0}'")]
    Negative(String),
}

/// Parses `3`, `3/2` or `1.5` into a rational time.
pub fn parse_time(text: &str) -> Result<Time, TimeParseError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(TimeParseError::Empty);
    }
    let bad = || TimeParseError::Invalid(text.to_string());
    let value = if let Some((num, den)) = text.split_once('/') {
        let num: i64 = num.trim().parse().map_err(|_| bad())?;
        let den: i64 = den.trim().parse().map_err(|_| bad())?;
        if den == 0 || num == i64::MIN || den == i64::MIN {
            return Err(bad());
        }
        Ratio::new(num, den)
    } else if let Some((int, frac)) = text.split_once('.') {
        if frac.is_empty() || frac.len() > 9 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int: i64 = if int.is_empty() || int == "-" {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let den = 10i64.pow(frac.len() as u32);
        let frac: i64 = frac.parse().map_err(|_| bad())?;
        let magnitude = int
            .checked_abs()
            .and_then(|i| i.checked_mul(den))
            .and_then(|i| i.checked_add(frac))
            .ok_or_else(bad)?;
        Ratio::new(if negative { -magnitude } else { magnitude }, den)
    } else {
        Ratio::from_integer(text.parse().map_err(|_| bad())?)
    };
    if value < Ratio::from_integer(0) {
        return Err(TimeParseError::Negative(text.to_string()));
    }
    Ok(value)
}

/// Renders integers bare and other values as `num/den`.
pub fn format_time(value: &Time) -> String {
    if value.is_integer() {
        value.to_integer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// An upper time bound that may be unbounded (`inf`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Bound {
    Finite(Time),
    Infinite,
}

impl Bound {
    pub fn finite(value: i64) -> Self {
        Bound::Finite(Ratio::from_integer(value))
    }

    pub fn as_finite(&self) -> Option<Time> {
        match self {
            Bound::Finite(v) => Some(*v),
            Bound::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Bound::Infinite)
    }
}

impl PartialOrd for Bound {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Bound {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Bound::Finite(a), Bound::Finite(b)) => a.cmp(b),
            (Bound::Finite(_), Bound::Infinite) => Ordering::Less,
            (Bound::Infinite, Bound::Finite(_)) => Ordering::Greater,
            (Bound::Infinite, Bound::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Finite(v) => f.write_str(&format_time(v)),
            Bound::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Bound {
    type Err = TimeParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim() == "inf" {
            Ok(Bound::Infinite)
        } else {
            parse_time(s).map(Bound::Finite)
        }
    }
}

/// Static firing interval `[min, max]` of a transition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TimeInterval {
    pub min: Time,
    pub max: Bound,
}

impl TimeInterval {
    pub fn new(min: Time, max: Bound) -> Self {
        Self { min, max }
    }

    pub fn closed(min: i64, max: i64) -> Self {
        Self::new(Ratio::from_integer(min), Bound::finite(max))
    }

    pub fn unbounded(min: i64) -> Self {
        Self::new(Ratio::from_integer(min), Bound::Infinite)
    }

    /// `min <= max` when the upper bound is finite.
    pub fn is_well_formed(&self) -> bool {
        let ordered = match self.max {
            Bound::Finite(max) => self.min <= max,
            Bound::Infinite => true,
        };
        ordered && self.min >= Ratio::from_integer(0)
    }
}

impl fmt::Display for TimeInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", format_time(&self.min), self.max)
    }
}

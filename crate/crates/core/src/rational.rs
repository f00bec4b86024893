use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Parses `"3"`, `"-2"`, `"0.25"` or `"7/2"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Ratio<i64>> {
    let s = text.trim();
    let bad = || Error::InvalidParameter(format!("not a rational number: {text:?}"));
    if let Some((num, den)) = s.split_once('/') {
        let num: i64 = num.trim().parse().map_err(|_| bad())?;
        let den: i64 = den.trim().parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(num, den));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 15 {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int_part: i64 = match int.trim_start_matches(['-', '+']) {
            "" => 0,
            digits => digits.parse().map_err(|_| bad())?,
        };
        let scale = 10i64.pow(frac.len() as u32);
        let frac_part: i64 = frac.parse().map_err(|_| bad())?;
        let magnitude = int_part.checked_mul(scale).and_then(|x| x.checked_add(frac_part)).ok_or_else(bad)?;
        return Ok(Ratio::new(if negative { -magnitude } else { magnitude }, scale));
    }
    Ok(Ratio::from_integer(s.parse().map_err(|_| bad())?))
}

pub fn ratio_to_f64(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Accuracy parameter `eps > 0`, kept exact so that guess grids
/// (multiples of `eps * p_j`) are identified by integer steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Epsilon(Ratio<i64>);

impl Epsilon {
    pub fn new(value: Ratio<i64>) -> Result<Self> {
        if *value.numer() <= 0 {
            return Err(Error::InvalidParameter(format!("epsilon must be positive, got {value}")));
        }
        Ok(Epsilon(value))
    }

    pub fn from_integer(v: i64) -> Result<Self> {
        Self::new(Ratio::from_integer(v))
    }

    pub fn ratio(self) -> Ratio<i64> {
        self.0
    }

    pub fn value(self) -> f64 {
        ratio_to_f64(self.0)
    }

    /// Number of grid steps `k >= 0` with `k * eps < 1`.
    pub fn steps_below_one(self) -> u32 {
        let (num, den) = (*self.0.numer(), *self.0.denom());
        // k * num < den  <=>  k <= (den - 1) / num
        ((den - 1) / num + 1) as u32
    }

    /// `k * eps * scale`, with `k * eps` formed exactly.
    pub fn grid_point(self, step: u32, scale: f64) -> f64 {
        ratio_to_f64(self.0 * Ratio::from_integer(step as i64)) * scale
    }
}

impl FromStr for Epsilon {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Epsilon::new(parse_rational(s)?)
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for Epsilon {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_forms() {
        assert_eq!(parse_rational("3").unwrap(), Ratio::from_integer(3));
        assert_eq!(parse_rational("0.25").unwrap(), Ratio::new(1, 4));
        assert_eq!(parse_rational("-1.5").unwrap(), Ratio::new(-3, 2));
        assert_eq!(parse_rational("7/2").unwrap(), Ratio::new(7, 2));
        assert_eq!(parse_rational(".5").unwrap(), Ratio::new(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.").is_err());
    }

    #[test]
    fn grid_steps() {
        assert_eq!("1".parse::<Epsilon>().unwrap().steps_below_one(), 1);
        assert_eq!("1/2".parse::<Epsilon>().unwrap().steps_below_one(), 2);
        assert_eq!("0.3".parse::<Epsilon>().unwrap().steps_below_one(), 4);
        assert_eq!("2".parse::<Epsilon>().unwrap().steps_below_one(), 1);
        assert!("0".parse::<Epsilon>().is_err());
        let eps: Epsilon = "1/3".parse().unwrap();
        assert_eq!(eps.grid_point(3, 6.0), 6.0);
    }
}

//! Lebesgue exponent with an `inf` sentinel, serialized as a string so the
//! reports round-trip bit-exactly.

use std::fmt;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, Copy, PartialEq, Debug)]
pub struct Exponent(pub f64);

impl Exponent {
    pub const INF: Exponent = Exponent(f64::INFINITY);

    pub fn is_infinite(&self) -> bool {
        self.0.is_infinite()
    }

    /// Reciprocal with `1/∞ = 0`, the coordinate used in region maps.
    pub fn reciprocal(&self) -> f64 {
        if self.is_infinite() {
            0.0
        } else {
            1.0 / self.0
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for Exponent {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Exponent::INF),
            other => other
                .parse::<f64>()
                .map(Exponent)
                .map_err(|e| format!("bad exponent {other:?}: {e}")),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(D::Error::custom)
    }
}

/// Output exponent `pq/(p+q)`, read as `q` or `p` when the other is infinite.
pub fn output_exponent(p: Exponent, q: Exponent) -> f64 {
    if p.is_infinite() {
        q.0
    } else if q.is_infinite() {
        p.0
    } else {
        p.0 * q.0 / (p.0 + q.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_roundtrip() {
        for s in ["2.5", "3", "inf"] {
            let e: Exponent = s.parse().unwrap();
            let back: Exponent = e.to_string().parse().unwrap();
            assert_eq!(e.0.to_bits(), back.0.to_bits());
        }
    }

    #[test]
    fn output_exponent_interprets_infinity() {
        assert_eq!(output_exponent(Exponent::INF, Exponent(2.0)), 2.0);
        assert_eq!(output_exponent(Exponent(4.0), Exponent::INF), 4.0);
        assert_eq!(output_exponent(Exponent(4.0), Exponent(4.0)), 2.0);
    }
}

//! Extended non-negative reals `[0, ∞]`, serialised with `"inf"` for infinity.

use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

/// Tolerance for deciding ties between exponents.
pub const EXP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    Inf,
}

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal::Finite(0.0);

    pub fn is_inf(self) -> bool {
        matches!(self, ExtReal::Inf)
    }

    pub fn is_zero(self) -> bool {
        matches!(self, ExtReal::Finite(x) if x == 0.0)
    }

    pub fn is_finite(self) -> bool {
        !self.is_inf()
    }

    pub fn is_positive(self) -> bool {
        match self {
            ExtReal::Inf => true,
            ExtReal::Finite(x) => x > 0.0,
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::Finite(x) => x,
            ExtReal::Inf => f64::INFINITY,
        }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == f64::INFINITY {
            ExtReal::Inf
        } else {
            ExtReal::Finite(x)
        }
    }

    /// `1/x` with `1/∞ = 0` and `1/0 = ∞`.
    pub fn recip(self) -> f64 {
        match self {
            ExtReal::Inf => 0.0,
            ExtReal::Finite(x) => 1.0 / x,
        }
    }

    /// Parses a decimal number or `inf`.
    pub fn parse(s: &str) -> Option<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t == "∞" || t.eq_ignore_ascii_case("infinity") {
            return Some(ExtReal::Inf);
        }
        let x: f64 = t.parse().ok()?;
        if x.is_nan() {
            return None;
        }
        Some(ExtReal::from_f64(x))
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Inf => write!(f, "inf"),
            ExtReal::Finite(x) => write!(f, "{x}"),
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtReal::Inf => s.serialize_str("inf"),
            ExtReal::Finite(x) => s.serialize_f64(*x),
        }
    }
}

struct ExtVisitor;

impl Visitor<'_> for ExtVisitor {
    type Value = ExtReal;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a number or the string \"inf\"")
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<ExtReal, E> {
        Ok(ExtReal::from_f64(v))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<ExtReal, E> {
        Ok(ExtReal::Finite(v as f64))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<ExtReal, E> {
        Ok(ExtReal::Finite(v as f64))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<ExtReal, E> {
        ExtReal::parse(v).ok_or_else(|| E::custom(format!("cannot parse {v:?} as extended real")))
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        d.deserialize_any(ExtVisitor)
    }
}

/// Three-way comparison of exponents with tie tolerance [`EXP_TOL`].
pub fn sign_tol(x: f64) -> i8 {
    if x > EXP_TOL {
        1
    } else if x < -EXP_TOL {
        -1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let v = vec![ExtReal::Inf, ExtReal::Finite(2.5)];
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"["inf",2.5]"#);
        let back: Vec<ExtReal> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
        let ints: Vec<ExtReal> = serde_json::from_str("[3, \"0.5\"]").unwrap();
        assert_eq!(ints, vec![ExtReal::Finite(3.0), ExtReal::Finite(0.5)]);
    }

    #[test]
    fn recip_handles_extremes() {
        assert_eq!(ExtReal::Inf.recip(), 0.0);
        assert_eq!(ExtReal::Finite(0.0).recip(), f64::INFINITY);
        assert_eq!(ExtReal::Finite(4.0).recip(), 0.25);
    }
}

//! Exact rational scalars and the `"p/q"` text encoding used in every JSON
//! artifact.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Tolerance used when snapping float input to rationals.
pub const SNAP_TOLERANCE: f64 = 1e-9;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // Ratio::to_f64 fails only on enormous operands.
        let n = x.numer().to_f64().unwrap_or(f64::NAN);
        let d = x.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Canonical text form: `"p"` for integers, `"p/q"` otherwise (reduced, q > 0).
pub fn format(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `"p/q"`, `"p"`, or a plain decimal such as `"-0.125"` (exactly).
pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::parse("empty rational"));
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| Error::parse(format!("bad numerator in {s:?}")))?;
        let d: BigInt = d.trim().parse().map_err(|_| Error::parse(format!("bad denominator in {s:?}")))?;
        if d.is_zero() {
            return Err(Error::parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, fraction)) = s.split_once('.') {
        let negative = whole.trim_start().starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), fraction);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::parse(format!("bad decimal {s:?}")));
        }
        let n: BigInt = digits.parse().map_err(|_| Error::parse(format!("bad decimal {s:?}")))?;
        let d = num_traits::pow(BigInt::from(10), fraction.len());
        let x = Rational::new(n, d);
        return Ok(if negative { -x } else { x });
    }
    let n: BigInt = s.parse().map_err(|_| Error::parse(format!("bad rational {s:?}")))?;
    Ok(Rational::from_integer(n))
}

/// Parses a comma-separated list of rationals, e.g. `"1,-1/2,0"`.
pub fn parse_list(s: &str) -> Result<Vec<Rational>> {
    s.split(',').map(parse).collect()
}

/// Best rational approximation of `x` along its continued-fraction
/// convergents, stopping at the first convergent within `tol`.
pub fn snap(x: f64, tol: f64) -> Result<Rational> {
    if !x.is_finite() {
        return Err(Error::domain(format!("cannot rationalize non-finite value {x}")));
    }
    let (mut h_prev, mut h) = (BigInt::zero(), BigInt::one());
    let (mut k_prev, mut k) = (BigInt::one(), BigInt::zero());
    let mut rem = x;
    for _ in 0..64 {
        let a = rem.floor();
        let a_int = BigInt::from(a as i64);
        let h_next = &a_int * &h + &h_prev;
        let k_next = &a_int * &k + &k_prev;
        h_prev = std::mem::replace(&mut h, h_next);
        k_prev = std::mem::replace(&mut k, k_next);
        let approx = Rational::new(h.clone(), k.clone());
        if (to_f64(&approx) - x).abs() <= tol {
            return Ok(approx);
        }
        let frac_part = rem - a;
        if frac_part == 0.0 {
            return Ok(approx);
        }
        rem = 1.0 / frac_part;
    }
    // The float itself is a dyadic rational.
    Rational::from_float(x).ok_or_else(|| Error::domain(format!("cannot rationalize {x}")))
}

/// Rounds to the nearest integer, ties away from zero.
pub fn round(x: &Rational) -> BigInt {
    x.round().to_integer()
}

pub fn abs(x: &Rational) -> Rational {
    x.abs()
}

/// Scales a nonzero vector to a primitive integer vector whose first nonzero
/// entry is positive.
pub fn primitive(v: &[Rational]) -> Vec<Rational> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Rational::from_integer(lcm.clone())).to_integer()).collect();
    let gcd = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if gcd.is_zero() {
        return v.to_vec();
    }
    let sign = match ints.iter().find(|x| !x.is_zero()) {
        Some(first) if first.is_negative() => -BigInt::one(),
        _ => BigInt::one(),
    };
    ints.into_iter().map(|x| Rational::from_integer(x * &sign / &gcd)).collect()
}

/// JSON scalar accepted on input: integer, float (approximate), or text.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ScalarInput {
    Int(i64),
    Float(f64),
    Text(String),
}

impl ScalarInput {
    /// Returns the exact value and whether it had to be snapped from a float.
    pub fn resolve(&self) -> Result<(Rational, bool)> {
        match self {
            ScalarInput::Int(n) => Ok((int(*n), false)),
            ScalarInput::Float(x) => Ok((snap(*x, SNAP_TOLERANCE)?, true)),
            ScalarInput::Text(s) => Ok((parse(s)?, false)),
        }
    }
}

/// Serde adapters writing rationals as canonical strings.
pub mod serde_rat {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let input = ScalarInput::deserialize(d)?;
        match input {
            ScalarInput::Float(x) => Err(serde::de::Error::custom(format!(
                "expected an exact rational (\"p/q\" string or integer), got float {x}"
            ))),
            other => other.resolve().map(|(x, _)| x).map_err(serde::de::Error::custom),
        }
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for x in v {
                seq.serialize_element(&format(x))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
            let raw = Vec::<ScalarInput>::deserialize(d)?;
            raw.iter()
                .map(|x| match x {
                    ScalarInput::Float(f) => Err(serde::de::Error::custom(format!(
                        "expected an exact rational, got float {f}"
                    ))),
                    other => other.resolve().map(|(x, _)| x).map_err(serde::de::Error::custom),
                })
                .collect()
        }
    }

    pub mod matrix {
        use super::*;
        use serde::ser::SerializeSeq;

        struct Row<'a>(&'a [Rational]);

        impl serde::Serialize for Row<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                super::vec::serialize(self.0, s)
            }
        }

        pub fn serialize<S: Serializer>(m: &[Vec<Rational>], s: S) -> std::result::Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(m.len()))?;
            for row in m {
                seq.serialize_element(&Row(row))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Vec<Rational>>, D::Error> {
            #[derive(Deserialize)]
            struct RowIn(#[serde(with = "super::vec")] Vec<Rational>);
            let rows = Vec::<RowIn>::deserialize(d)?;
            Ok(rows.into_iter().map(|r| r.0).collect())
        }
    }
}

/// Serde adapter for big integers as decimal strings.
pub mod serde_bigint {
    use super::*;

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigInt, D::Error> {
        match ScalarInput::deserialize(d)? {
            ScalarInput::Int(n) => Ok(BigInt::from(n)),
            ScalarInput::Text(s) => s.trim().parse().map_err(serde::de::Error::custom),
            ScalarInput::Float(f) => Err(serde::de::Error::custom(format!("expected an integer, got {f}"))),
        }
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for x in v {
                seq.serialize_element(&x.to_string())?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<BigInt>, D::Error> {
            #[derive(Deserialize)]
            struct One(#[serde(with = "super")] BigInt);
            let v = Vec::<One>::deserialize(d)?;
            Ok(v.into_iter().map(|x| x.0).collect())
        }
    }
}

//! Exact scalars: arbitrary-precision rationals and single square roots.
//!
//! Every size, area and capacity handled by the engine is either a rational
//! number or the square root of one. No floating point value ever takes part
//! in a decision; `to_f64` exists only for advisory CSV columns.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact rational in canonical form (reduced, positive denominator).
pub type Rational = num_rational::BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p/q"`, `"p"`, or a finite decimal such as `"1.25"`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::Parse(format!("not a rational number: {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {text:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.starts_with('-');
        let whole = if whole.is_empty() || whole == "-" || whole == "+" {
            BigInt::zero()
        } else {
            BigInt::from_str(whole).map_err(|_| bad())?
        };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac = BigInt::from_str(frac).map_err(|_| bad())?;
        let mag = whole.abs() * &scale + frac;
        let num = if negative { -mag } else { mag };
        return Ok(Rational::new(num, scale));
    }
    BigInt::from_str(s)
        .map(Rational::from_integer)
        .map_err(|_| bad())
}

/// `"p/q"` or `"p"`.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    // Shift both parts into f64 range before dividing.
    let n = q.numer();
    let d = q.denom();
    let nb = n.bits() as i64;
    let db = d.bits() as i64;
    let shift_n = (nb - 900).max(0) as usize;
    let shift_d = (db - 900).max(0) as usize;
    let nf = (n >> shift_n).to_f64().unwrap_or(f64::NAN);
    let df = (d >> shift_d).to_f64().unwrap_or(f64::NAN);
    nf / df * 2f64.powi((shift_n as i32) - (shift_d as i32))
}

/// Exact square root of a nonnegative rational, when it is rational.
pub fn exact_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| Rational::new(n, d))
}

/// Rational enclosure `lo <= sqrt(q) <= hi` with `hi - lo <= 2^-bits / denom(q)`.
pub fn sqrt_bounds(q: &Rational, bits: u32) -> (Rational, Rational) {
    assert!(!q.is_negative(), "sqrt of negative rational");
    if let Some(r) = exact_sqrt(q) {
        return (r.clone(), r);
    }
    // sqrt(p/q) = sqrt(p*q)/q
    let scale = BigInt::one() << bits as usize;
    let radicand = q.numer() * q.denom() * &scale * &scale;
    let root = radicand.sqrt();
    let den = q.denom() * &scale;
    let lo = Rational::new(root.clone(), den.clone());
    let hi = Rational::new(root + 1, den);
    (lo, hi)
}

/// Smallest integer `n >= 0` with `n*n >= q`.
pub fn ceil_sqrt(q: &Rational) -> BigInt {
    if !q.is_positive() {
        return BigInt::zero();
    }
    let mut n = (q.ceil().to_integer()).sqrt();
    while Rational::from_integer(&n * &n) < *q {
        n += 1;
    }
    while n > BigInt::zero() && Rational::from_integer((&n - 1) * (&n - 1)) >= *q {
        n -= 1;
    }
    n
}

pub fn ceil_to_bigint(q: &Rational) -> BigInt {
    q.ceil().to_integer()
}

/// A number that is either rational or the square root of a nonnegative
/// rational. Square roots of perfect squares are always stored as rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum QuadraticValue {
    Rational(Rational),
    Sqrt(Rational),
}

impl QuadraticValue {
    pub fn rational(q: Rational) -> Self {
        QuadraticValue::Rational(q)
    }

    /// `sqrt(s)`, normalized to a rational when `s` is a perfect square.
    pub fn sqrt(s: Rational) -> Result<Self> {
        if s.is_negative() {
            return Err(Error::Domain(format!(
                "square root of negative value {}",
                format_rational(&s)
            )));
        }
        Ok(match exact_sqrt(&s) {
            Some(r) => QuadraticValue::Rational(r),
            None => QuadraticValue::Sqrt(s),
        })
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, QuadraticValue::Rational(_))
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            QuadraticValue::Rational(q) => Some(q),
            QuadraticValue::Sqrt(_) => None,
        }
    }

    fn signum(&self) -> i8 {
        match self {
            QuadraticValue::Rational(q) => match q.numer().sign() {
                Sign::Minus => -1,
                Sign::NoSign => 0,
                Sign::Plus => 1,
            },
            QuadraticValue::Sqrt(s) => i8::from(!s.is_zero()),
        }
    }

    /// The square of the value, with its sign attached (`-q^2` for negative q).
    fn signed_square(&self) -> Rational {
        match self {
            QuadraticValue::Rational(q) => {
                let sq = q * q;
                if q.is_negative() {
                    -sq
                } else {
                    sq
                }
            }
            QuadraticValue::Sqrt(s) => s.clone(),
        }
    }

    /// `value^2`; always rational.
    pub fn square(&self) -> Rational {
        self.signed_square().abs()
    }

    /// Multiplies by a nonnegative rational.
    pub fn scale(&self, lambda: &Rational) -> Self {
        assert!(!lambda.is_negative(), "scale factor must be nonnegative");
        match self {
            QuadraticValue::Rational(q) => QuadraticValue::Rational(q * lambda),
            QuadraticValue::Sqrt(s) => {
                QuadraticValue::sqrt(s * lambda * lambda).expect("nonnegative radicand")
            }
        }
    }

    /// Rational enclosure of the value.
    pub fn bounds(&self, bits: u32) -> (Rational, Rational) {
        match self {
            QuadraticValue::Rational(q) => (q.clone(), q.clone()),
            QuadraticValue::Sqrt(s) => sqrt_bounds(s, bits),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            QuadraticValue::Rational(q) => rational_to_f64(q),
            QuadraticValue::Sqrt(s) => rational_to_f64(s).sqrt(),
        }
    }

    pub fn cmp_rational(&self, q: &Rational) -> Ordering {
        self.cmp(&QuadraticValue::Rational(q.clone()))
    }
}

impl From<Rational> for QuadraticValue {
    fn from(q: Rational) -> Self {
        QuadraticValue::Rational(q)
    }
}

impl Ord for QuadraticValue {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb {
            return sa.cmp(&sb);
        }
        // Same sign: compare squares, reversed for negatives.
        let ord = self.square().cmp(&other.square());
        if sa < 0 {
            ord.reverse()
        } else {
            ord
        }
    }
}

impl PartialOrd for QuadraticValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Three-way comparison of two quadratic values.
pub fn compare(a: &QuadraticValue, b: &QuadraticValue) -> Ordering {
    a.cmp(b)
}

impl fmt::Display for QuadraticValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuadraticValue::Rational(q) => f.write_str(&format_rational(q)),
            QuadraticValue::Sqrt(s) => write!(f, "sqrt({})", format_rational(s)),
        }
    }
}

impl Serialize for QuadraticValue {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            QuadraticValue::Rational(q) => ser.serialize_str(&format_rational(q)),
            QuadraticValue::Sqrt(s) => {
                let mut map = ser.serialize_map(Some(1))?;
                map.serialize_entry("sqrt", &format_rational(s))?;
                map.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for QuadraticValue {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = QuadraticValue;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a rational string or {\"sqrt\": \"p/q\"}")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Self::Value, E> {
                parse_rational(v)
                    .map(QuadraticValue::Rational)
                    .map_err(E::custom)
            }
            fn visit_map<A: MapAccess<'de>>(
                self,
                mut map: A,
            ) -> std::result::Result<Self::Value, A::Error> {
                let mut radicand = None;
                while let Some(key) = map.next_key::<String>()? {
                    if key != "sqrt" {
                        return Err(de::Error::unknown_field(&key, &["sqrt"]));
                    }
                    let text: String = map.next_value()?;
                    radicand = Some(parse_rational(&text).map_err(de::Error::custom)?);
                }
                let s = radicand.ok_or_else(|| de::Error::missing_field("sqrt"))?;
                QuadraticValue::sqrt(s).map_err(de::Error::custom)
            }
        }
        de.deserialize_any(V)
    }
}

/// Serde adapters for rationals as `"p/q"` strings.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Rational, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        de: D,
    ) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(de)?;
        parse_rational(&s).map_err(de::Error::custom)
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(
            v: &[Rational],
            ser: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            ser.collect_seq(v.iter().map(format_rational))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            de: D,
        ) -> std::result::Result<Vec<Rational>, D::Error> {
            let v = Vec::<String>::deserialize(de)?;
            v.iter()
                .map(|s| parse_rational(s).map_err(de::Error::custom))
                .collect()
        }
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(
            v: &Option<Rational>,
            ser: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            match v {
                Some(q) => ser.serialize_some(&format_rational(q)),
                None => ser.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            de: D,
        ) -> std::result::Result<Option<Rational>, D::Error> {
            Option::<String>::deserialize(de)?
                .map(|s| parse_rational(&s).map_err(de::Error::custom))
                .transpose()
        }
    }
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

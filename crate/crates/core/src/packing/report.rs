//! JSON shape of capacity results.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::exceptional::ObstructionTuple;
use crate::scalar::{QuadraticValue, Rational};

use super::{Attainment, CapacityResult, Engine};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum CapacityValue {
    Rational {
        #[serde(with = "crate::scalar::serde_rational")]
        value: Rational,
    },
    Sqrt {
        value: QuadraticValue,
    },
    Interval {
        lower: QuadraticValue,
        upper: QuadraticValue,
    },
}

impl CapacityValue {
    pub fn of(r: &CapacityResult) -> Self {
        match r.exact_value() {
            Some(QuadraticValue::Rational(q)) => CapacityValue::Rational { value: q.clone() },
            Some(v) => CapacityValue::Sqrt { value: v.clone() },
            None => CapacityValue::Interval {
                lower: r.lower.clone(),
                upper: r.upper.clone(),
            },
        }
    }

    pub fn bounds(&self) -> (QuadraticValue, QuadraticValue) {
        match self {
            CapacityValue::Rational { value } => {
                let v = QuadraticValue::rational(value.clone());
                (v.clone(), v)
            }
            CapacityValue::Sqrt { value } => (value.clone(), value.clone()),
            CapacityValue::Interval { lower, upper } => (lower.clone(), upper.clone()),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Report {
    capacity: CapacityValue,
    attained: Attainment,
    witness: Option<ObstructionTuple>,
    degree_searched: u32,
    certified_degree: Option<u32>,
    engine: Engine,
}

impl Serialize for CapacityResult {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        Report {
            capacity: CapacityValue::of(self),
            attained: self.attained,
            witness: self.witness.clone(),
            degree_searched: self.degree_searched,
            certified_degree: self.certified_degree,
            engine: self.engine,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CapacityResult {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = Report::deserialize(d)?;
        let (lower, upper) = r.capacity.bounds();
        if lower > upper {
            return Err(serde::de::Error::custom("lower bound exceeds upper bound"));
        }
        Ok(CapacityResult {
            lower,
            upper,
            attained: r.attained,
            witness: r.witness,
            degree_searched: r.degree_searched,
            certified_degree: r.certified_degree,
            engine: r.engine,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::super::*;

    #[test]
    fn shapes_and_round_trip() {
        let r = packing_capacity(&BallConfig::equal(2), 10, Engine::Combined).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(
            v["capacity"],
            serde_json::json!({"kind": "rational", "value": "2"})
        );
        assert_eq!(v["attained"], "yes");
        assert_eq!(v["witness"], serde_json::json!({"d": 1, "m": [1, 1]}));
        let back: CapacityResult = serde_json::from_value(v).unwrap();
        assert_eq!(back, r);

        let r = packing_capacity(&BallConfig::equal(10), 5, Engine::Combined).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(
            v["capacity"],
            serde_json::json!({"kind": "sqrt", "value": {"sqrt": "10"}})
        );

        let r = packing_capacity(&BallConfig::equal(8), 2, Engine::Combined).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        assert!(text.contains("\"interval\""));
        let back: CapacityResult = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }
}

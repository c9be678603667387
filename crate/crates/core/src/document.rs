//! JSON documents describing toric domains.
//!
//! ```json
//! {"type": "ellipsoid", "a": "1", "b": "2"}
//! {"type": "polydisk", "a": "1", "b": "1"}
//! {"type": "concave_pl", "vertices": [["0", "3"], ["1", "1"], ["2", "0"]]}
//! {"type": "convex_pl", "vertices": [["0", "1"], ["1", "1"], ["1", "0"]]}
//! ```
//!
//! Numbers are `"p/q"` strings or JSON integers.

use num_traits::Signed;
use serde_json::{Map, Value};

use crate::error::{DomainCode, Error, Result};
use crate::scalar::{int, parse_rational, Rational};
use crate::toric::{ConcaveDomain, ConvexDomain, Point, ToricDomain};

/// Parses a domain document. Ellipsoids come back as concave domains.
pub fn parse_domain_document(text: &str) -> Result<ToricDomain> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| Error::domain(DomainCode::MalformedJson, format!("malformed JSON: {e}")))?;
    domain_from_value(&value)
}

pub fn domain_from_value(value: &Value) -> Result<ToricDomain> {
    let obj = value.as_object().ok_or_else(|| {
        Error::domain(
            DomainCode::MalformedJson,
            "a domain document must be a JSON object",
        )
    })?;
    let kind = match obj.get("type") {
        Some(Value::String(s)) => s.as_str(),
        Some(other) => {
            return Err(Error::domain(
                DomainCode::UnknownType,
                format!("\"type\" must be a string, got {other}"),
            ))
        }
        None => return Err(Error::domain(DomainCode::UnknownType, "missing \"type\"")),
    };
    match kind {
        "ellipsoid" => {
            let [a, b] = sides(obj)?;
            Ok(ToricDomain::Concave(ConcaveDomain::triangle(a, b)?))
        }
        "polydisk" => {
            let [a, b] = sides(obj)?;
            Ok(ToricDomain::Convex(ConvexDomain::polydisk(a, b)?))
        }
        "concave_pl" => Ok(ToricDomain::Concave(ConcaveDomain::new(vertices(obj)?)?)),
        "convex_pl" => Ok(ToricDomain::Convex(ConvexDomain::new(vertices(obj)?)?)),
        other => Err(Error::domain(
            DomainCode::UnknownType,
            format!("unknown domain type {other:?}; expected ellipsoid, polydisk, concave_pl or convex_pl"),
        )),
    }
}

fn check_fields(obj: &Map<String, Value>, allowed: &[&str]) -> Result<()> {
    for key in obj.keys() {
        if key != "type" && !allowed.contains(&key.as_str()) {
            return Err(Error::domain(
                DomainCode::UnknownField,
                format!("unknown field {key:?}"),
            ));
        }
    }
    for key in allowed {
        if !obj.contains_key(*key) {
            return Err(Error::domain(
                DomainCode::UnknownField,
                format!("missing field {key:?}"),
            ));
        }
    }
    Ok(())
}

fn rational(v: &Value, what: &str) -> Result<Rational> {
    let bad = || {
        Error::domain(
            DomainCode::NonRational,
            format!("{what} is not a rational number: {v}"),
        )
    };
    match v {
        Value::String(s) => parse_rational(s).map_err(|_| bad()),
        Value::Number(n) => n.as_i64().map(int).ok_or_else(bad),
        _ => Err(bad()),
    }
}

fn sides(obj: &Map<String, Value>) -> Result<[Rational; 2]> {
    check_fields(obj, &["a", "b"])?;
    let a = rational(&obj["a"], "a")?;
    let b = rational(&obj["b"], "b")?;
    if !a.is_positive() || !b.is_positive() {
        return Err(Error::domain(
            DomainCode::Degenerate,
            "side lengths must be positive",
        ));
    }
    Ok([a, b])
}

fn vertices(obj: &Map<String, Value>) -> Result<Vec<Point>> {
    check_fields(obj, &["vertices"])?;
    let list = obj["vertices"]
        .as_array()
        .ok_or_else(|| Error::domain(DomainCode::UnknownField, "\"vertices\" must be an array"))?;
    list.iter()
        .enumerate()
        .map(|(i, p)| match p.as_array().map(Vec::as_slice) {
            Some([x, y]) => Ok((
                rational(x, &format!("vertex {i} x"))?,
                rational(y, &format!("vertex {i} y"))?,
            )),
            _ => Err(Error::domain(
                DomainCode::UnknownField,
                format!("vertex {i} must be a pair [x, y]"),
            )),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(text: &str) -> DomainCode {
        match parse_domain_document(text) {
            Err(Error::InvalidDomain { code, .. }) => code,
            other => panic!("expected a domain error for {text}, got {other:?}"),
        }
    }

    #[test]
    fn examples() {
        let d = parse_domain_document(r#"{"type":"ellipsoid","a":"1","b":"2"}"#).unwrap();
        assert_eq!(d.vertices(), &[(int(0), int(2)), (int(1), int(0))]);
        let d = parse_domain_document(
            r#"{"type":"concave_pl","vertices":[["0","3"],["1","1"],["2","0"]]}"#,
        )
        .unwrap();
        assert!(d.as_concave().is_some());
        assert_eq!(
            code(r#"{"type":"concave_pl","vertices":[["0","1"],["1","2"]]}"#),
            DomainCode::Orientation
        );
    }

    #[test]
    fn polydisk_and_convex() {
        let d = parse_domain_document(r#"{"type":"polydisk","a":1,"b":"3/2"}"#).unwrap();
        assert_eq!(d.area(), Rational::new(3.into(), 2.into()));
        let d = parse_domain_document(r#"{"type":"convex_pl","vertices":[[0,1],[1,1],[1,0]]}"#)
            .unwrap();
        assert!(d.as_convex().is_some());
    }

    #[test]
    fn distinct_codes() {
        assert_eq!(code("{"), DomainCode::MalformedJson);
        assert_eq!(code("[1]"), DomainCode::MalformedJson);
        assert_eq!(code(r#"{"type":"torus"}"#), DomainCode::UnknownType);
        assert_eq!(code(r#"{"a":"1"}"#), DomainCode::UnknownType);
        assert_eq!(
            code(r#"{"type":"ellipsoid","a":"1","b":"2","c":"3"}"#),
            DomainCode::UnknownField
        );
        assert_eq!(
            code(r#"{"type":"ellipsoid","a":"1"}"#),
            DomainCode::UnknownField
        );
        assert_eq!(
            code(r#"{"type":"ellipsoid","a":"sqrt(2)","b":"2"}"#),
            DomainCode::NonRational
        );
        assert_eq!(
            code(r#"{"type":"ellipsoid","a":1.5,"b":"2"}"#),
            DomainCode::NonRational
        );
        assert_eq!(
            code(r#"{"type":"ellipsoid","a":"0","b":"2"}"#),
            DomainCode::Degenerate
        );
        assert_eq!(
            code(r#"{"type":"concave_pl","vertices":[["0","2"],["2","1"],["3","0"]]}"#),
            DomainCode::NonConvex
        );
        assert_eq!(
            code(r#"{"type":"convex_pl","vertices":[["0","2"],["1","1"],["3","0"]]}"#),
            DomainCode::NonConvex
        );
        assert_eq!(
            code(r#"{"type":"concave_pl","vertices":[["0","2"],["1","1"]]}"#),
            DomainCode::Endpoints
        );
    }

    #[test]
    fn round_trips_through_serialization() {
        for text in [
            r#"{"type":"concave_pl","vertices":[["0","3"],["1","1"],["2","0"]]}"#,
            r#"{"type":"convex_pl","vertices":[["0","2"],["1","2"],["2","1"],["2","0"]]}"#,
        ] {
            let d = parse_domain_document(text).unwrap();
            let again = parse_domain_document(&serde_json::to_string(&d).unwrap()).unwrap();
            assert_eq!(d, again);
        }
    }
}

//! JSON encodings of spaces, kernels, systems and decompositions.
//!
//! Rationals travel as `"num/den"` strings; integers (as strings or JSON
//! integers) are accepted on input. Output is canonical: keys sorted,
//! rationals in lowest terms, pretty-printed with a trailing newline.

use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::disintegration::Decomposition;
use crate::dynamics::DynSystem;
use crate::error::{Error, Result};
use crate::kernel::{kernel_from_function, Kernel};
use crate::rational::{self, Rational};
use crate::space::FinSpace;

fn parse_err(at: &str, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("{at}: {msg}"))
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, at: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| parse_err(at, format!("missing field \"{key}\"")))
}

fn as_object<'a>(value: &'a Value, at: &str) -> Result<&'a Map<String, Value>> {
    value.as_object().ok_or_else(|| parse_err(at, "expected an object"))
}

fn as_array<'a>(value: &'a Value, at: &str) -> Result<&'a Vec<Value>> {
    value.as_array().ok_or_else(|| parse_err(at, "expected an array"))
}

pub fn rational_to_json(value: &Rational) -> Value {
    Value::String(rational::format(value))
}

pub fn rational_from_json(value: &Value, at: &str) -> Result<Rational> {
    match value {
        Value::String(text) => rational::parse(text).ok_or_else(|| parse_err(at, format!("bad rational {text:?}"))),
        Value::Number(n) => n
            .as_i64()
            .map(|i| rational::ratio(i, 1))
            .ok_or_else(|| parse_err(at, format!("non-integer number {n}; write rationals as \"num/den\""))),
        other => Err(parse_err(at, format!("expected a rational, found {other}"))),
    }
}

pub fn space_to_json(space: &FinSpace) -> Value {
    json!({
        "carrier": space.carrier(),
        "atoms": space.atoms(),
    })
}

pub fn space_from_json(value: &Value, at: &str) -> Result<FinSpace> {
    let obj = as_object(value, at)?;
    let carrier = as_array(field(obj, "carrier", at)?, &format!("{at}.carrier"))?
        .iter()
        .enumerate()
        .map(|(i, v)| {
            v.as_str().map(str::to_owned).ok_or_else(|| parse_err(&format!("{at}.carrier[{i}]"), "expected a string"))
        })
        .collect::<Result<Vec<_>>>()?;
    let atoms = as_array(field(obj, "atoms", at)?, &format!("{at}.atoms"))?
        .iter()
        .enumerate()
        .map(|(a, atom)| {
            let here = format!("{at}.atoms[{a}]");
            as_array(atom, &here)?
                .iter()
                .enumerate()
                .map(|(j, v)| {
                    v.as_u64().map(|i| i as usize).ok_or_else(|| parse_err(&format!("{here}[{j}]"), "expected an index"))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    FinSpace::new(carrier, atoms).map_err(|e| parse_err(at, e))
}

pub fn kernel_to_json(kernel: &Kernel) -> Value {
    json!({
        "dom": space_to_json(kernel.dom()),
        "cod": space_to_json(kernel.cod()),
        "rows": rows_to_json(kernel),
    })
}

pub fn rows_to_json(kernel: &Kernel) -> Value {
    Value::Array(
        kernel
            .rows()
            .iter()
            .map(|row| Value::Array(row.iter().map(rational_to_json).collect()))
            .collect(),
    )
}

fn rows_from_json(value: &Value, at: &str) -> Result<Vec<Vec<Rational>>> {
    as_array(value, at)?
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let here = format!("{at}[{i}]");
            as_array(row, &here)?
                .iter()
                .enumerate()
                .map(|(j, v)| rational_from_json(v, &format!("{here}[{j}]")))
                .collect()
        })
        .collect()
}

fn side_from_json(obj: &Map<String, Value>, key: &str, default: Option<&Arc<FinSpace>>, at: &str) -> Result<Arc<FinSpace>> {
    match (obj.get(key), default) {
        (Some(v), Some(expected)) => {
            let space = space_from_json(v, &format!("{at}.{key}"))?;
            if space != **expected {
                return Err(parse_err(&format!("{at}.{key}"), "does not match the enclosing space"));
            }
            Ok(Arc::clone(expected))
        }
        (Some(v), None) => Ok(Arc::new(space_from_json(v, &format!("{at}.{key}"))?)),
        (None, Some(expected)) => Ok(Arc::clone(expected)),
        (None, None) => Err(parse_err(at, format!("missing field \"{key}\""))),
    }
}

/// Parses `{"dom", "cod", "rows"}`. `dom`/`cod` may be omitted when the
/// context supplies them.
pub fn kernel_from_json(
    value: &Value,
    dom: Option<&Arc<FinSpace>>,
    cod: Option<&Arc<FinSpace>>,
    at: &str,
) -> Result<Kernel> {
    let obj = as_object(value, at)?;
    let dom = side_from_json(obj, "dom", dom, at)?;
    let cod = side_from_json(obj, "cod", cod, at)?;
    let rows = rows_from_json(field(obj, "rows", at)?, &format!("{at}.rows"))?;
    Kernel::new(dom, cod, rows).map_err(|e| parse_err(at, e))
}

/// A state on `space`: either a bare array of probabilities over its atoms or
/// a kernel object out of the unit.
pub fn state_from_json(value: &Value, space: &Arc<FinSpace>, at: &str) -> Result<Kernel> {
    let unit = Arc::new(FinSpace::unit());
    match value {
        Value::Array(_) => {
            let rows = rows_from_json(&Value::Array(vec![value.clone()]), at)?;
            Kernel::new(unit, Arc::clone(space), rows).map_err(|e| parse_err(at, e))
        }
        _ => kernel_from_json(value, Some(&unit), Some(space), at),
    }
}

fn generator_from_json(value: &Value, space: &Arc<FinSpace>, at: &str) -> Result<Kernel> {
    let obj = as_object(value, at)?;
    let Some(map) = obj.get("map") else {
        return kernel_from_json(value, Some(space), Some(space), at);
    };
    let here = format!("{at}.map");
    let map = as_object(map, &here)?;
    let mut images = vec![usize::MAX; space.len()];
    for (from, to) in map {
        let i = space.position(from).ok_or_else(|| parse_err(&here, format!("unknown point {from:?}")))?;
        let target = to.as_str().ok_or_else(|| parse_err(&format!("{here}.{from}"), "expected a point label"))?;
        images[i] = space.position(target).ok_or_else(|| parse_err(&format!("{here}.{from}"), format!("unknown point {target:?}")))?;
    }
    if let Some(i) = images.iter().position(|&y| y == usize::MAX) {
        return Err(parse_err(&here, format!("no image for point {:?}", space.label(i))));
    }
    kernel_from_function(&images, space, space).map_err(|e| parse_err(&here, e))
}

/// `{"space": <FinSpace>, "generators": {"name": <Kernel> | {"map": {...}}}}`.
pub fn system_from_json(value: &Value) -> Result<DynSystem> {
    let obj = as_object(value, "system")?;
    let space = Arc::new(space_from_json(field(obj, "space", "system")?, "system.space")?);
    let gens = as_object(field(obj, "generators", "system")?, "system.generators")?;
    let generators = gens
        .iter()
        .map(|(name, g)| generator_from_json(g, &space, &format!("system.generators.{name}")).map(|k| (name.clone(), k)))
        .collect::<Result<Vec<_>>>()?;
    DynSystem::new(space, generators).map_err(|e| parse_err("system", e))
}

/// Canonical form: generators as `{"rows": ...}` over the system's space.
pub fn system_to_json(sys: &DynSystem) -> Value {
    let generators: Map<String, Value> =
        sys.generators().iter().map(|(name, m)| (name.clone(), json!({ "rows": rows_to_json(m) }))).collect();
    json!({
        "space": space_to_json(sys.space()),
        "generators": generators,
    })
}

pub fn decomposition_to_json(d: &Decomposition) -> Value {
    json!({
        "q": kernel_to_json(d.q()),
        "k": kernel_to_json(d.k()),
        "p": kernel_to_json(d.p()),
    })
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn to_canonical_string(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("values always serialize");
    text.push('\n');
    text
}

pub fn parse_json(text: &str, at: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| parse_err(at, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    const SYS1: &str = r#"{
  "space": {"carrier": ["a", "b", "c", "d"], "atoms": [[0], [1], [2], [3]]},
  "generators": {"t": {"map": {"a": "b", "b": "a", "c": "c", "d": "c"}}}
}"#;

    #[test]
    fn parses_map_shorthand() {
        let sys = system_from_json(&parse_json(SYS1, "sys").unwrap()).unwrap();
        assert_eq!(sys.generators()[0].1.atom_map().unwrap(), vec![1, 0, 2, 2]);
    }

    #[test]
    fn rationals_and_integers() {
        assert_eq!(rational_from_json(&json!("2/6"), "x").unwrap(), ratio(1, 3));
        assert_eq!(rational_from_json(&json!(1), "x").unwrap(), ratio(1, 1));
        assert_eq!(rational_from_json(&json!("1"), "x").unwrap(), ratio(1, 1));
        let err = rational_from_json(&json!(0.5), "rows[0][1]").unwrap_err();
        assert!(err.to_string().contains("rows[0][1]"), "{err}");
        assert!(rational_from_json(&json!("1/0"), "x").is_err());
    }

    #[test]
    fn errors_name_their_location() {
        let text = r#"{"dom": {"carrier": ["a"], "atoms": [[0]]},
                       "cod": {"carrier": ["x", "y"], "atoms": [[0], [1]]},
                       "rows": [["1/2", "oops"]]}"#;
        let err = kernel_from_json(&parse_json(text, "k").unwrap(), None, None, "kernel").unwrap_err();
        assert!(err.to_string().contains("kernel.rows[0][1]"), "{err}");

        let text = r#"{"dom": {"carrier": ["a"], "atoms": [[0]]},
                       "cod": {"carrier": ["x", "y"], "atoms": [[0], [1]]},
                       "rows": [["1/2", "1/4"]]}"#;
        let err = kernel_from_json(&parse_json(text, "k").unwrap(), None, None, "kernel").unwrap_err();
        assert!(err.to_string().contains("row 0 sums to 3/4"), "{err}");

        let text = r#"{"carrier": ["a", "b"], "atoms": [[0], [7]]}"#;
        let err = space_from_json(&parse_json(text, "s").unwrap(), "space").unwrap_err();
        assert!(err.to_string().contains("index 7"), "{err}");

        let bad_map = SYS1.replace(r#""d": "c""#, r#""d": "z""#);
        let err = system_from_json(&parse_json(&bad_map, "sys").unwrap()).unwrap_err();
        assert!(err.to_string().contains("system.generators.t.map.d"), "{err}");
    }

    #[test]
    fn state_forms() {
        let space = Arc::new(FinSpace::discrete(["a", "b"]));
        let bare = state_from_json(&json!(["1/4", "3/4"]), &space, "m").unwrap();
        let full = state_from_json(&json!({"rows": [["1/4", "3/4"]]}), &space, "m").unwrap();
        assert_eq!(bare, full);
        assert!(state_from_json(&json!(["1/4", "1/4"]), &space, "m").is_err());
    }

    #[test]
    fn canonical_output_is_sorted() {
        let space = FinSpace::discrete(["a"]);
        assert_eq!(
            to_canonical_string(&space_to_json(&space)),
            "{\n  \"atoms\": [\n    [\n      0\n    ]\n  ],\n  \"carrier\": [\n    \"a\"\n  ]\n}\n"
        );
    }
}

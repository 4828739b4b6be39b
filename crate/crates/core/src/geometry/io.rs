//! JSON encoding of point sets.
//!
//! A windowed set is
//! `{"d": 1, "r": 0.4, "R": 1.0, "window": [[-S, S]], "points": [[x], ...]}`
//! (a single `[-S, S]` pair is accepted for `window`, and bare numbers for
//! points when `d = 1`), optionally with a `"tail"` object. A
//! crystallographic set replaces `window`/`points` by `"period"` and
//! `"motif"`. Unknown keys such as `"provenance"` are ignored on input.

use serde_json::{json, Map, Value};

use super::{CrystallographicSet, Cube, DeloneParams, DeloneSet, Point, WindowedPointSet};
use crate::error::{Error, Result};

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| bad(format!("missing field \"{key}\"")))
}

fn number(v: &Value, what: &str) -> Result<f64> {
    v.as_f64().ok_or_else(|| bad(format!("{what} must be a number")))
}

fn parse_params(obj: &Map<String, Value>) -> Result<DeloneParams> {
    let d = field(obj, "d")?
        .as_u64()
        .ok_or_else(|| bad("\"d\" must be a positive integer"))? as usize;
    let r = number(field(obj, "r")?, "\"r\"")?;
    let big_r = number(field(obj, "R")?, "\"R\"")?;
    DeloneParams::new(r, big_r, d)
}

fn parse_points(v: &Value, d: usize, what: &str) -> Result<Vec<Point>> {
    let arr = v.as_array().ok_or_else(|| bad(format!("{what} must be an array")))?;
    arr.iter()
        .map(|p| match p {
            Value::Number(_) if d == 1 => Ok(Point(vec![number(p, what)?])),
            Value::Array(cs) => {
                if cs.len() != d {
                    return Err(bad(format!("{what}: point has {} coordinates, expected {d}", cs.len())));
                }
                Ok(Point(cs.iter().map(|c| number(c, what)).collect::<Result<_>>()?))
            }
            _ => Err(bad(format!("{what}: malformed point {p}"))),
        })
        .collect()
}

/// Reads `[[-S, S], ...]` or `[-S, S]`; the cube must be centred and equal
/// on every axis.
fn parse_window(v: &Value, d: usize) -> Result<Cube> {
    let arr = v.as_array().ok_or_else(|| bad("\"window\" must be an array"))?;
    let pairs: Vec<&Value> = if arr.first().is_some_and(|x| x.is_number()) {
        vec![v]
    } else {
        arr.iter().collect()
    };
    if pairs.len() != 1 && pairs.len() != d {
        return Err(bad(format!("\"window\" has {} intervals, expected {d}", pairs.len())));
    }
    let mut half = None;
    for pair in pairs {
        let lohi = pair
            .as_array()
            .filter(|a| a.len() == 2)
            .ok_or_else(|| bad("window intervals must be [lo, hi] pairs"))?;
        let (lo, hi) = (number(&lohi[0], "window")?, number(&lohi[1], "window")?);
        if lo != -hi {
            return Err(bad(format!("window [{lo}, {hi}] is not centred at the origin")));
        }
        if half.is_some_and(|h| h != hi) {
            return Err(bad("window must be a cube (equal half-widths)"));
        }
        half = Some(hi);
    }
    Cube::new(half.unwrap_or(0.0))
}

fn parse_crystal(obj: &Map<String, Value>, params: DeloneParams) -> Result<CrystallographicSet> {
    let period = number(field(obj, "period")?, "\"period\"")?;
    let motif = parse_points(field(obj, "motif")?, params.d, "motif")?;
    CrystallographicSet::new(period, motif, params)
}

/// Parses either representation from a JSON value.
pub fn point_set_from_value(v: &Value) -> Result<DeloneSet> {
    let obj = v.as_object().ok_or_else(|| bad("point set must be a JSON object"))?;
    let params = parse_params(obj)?;
    if obj.contains_key("period") {
        return Ok(DeloneSet::Crystal(parse_crystal(obj, params)?));
    }
    let window = parse_window(field(obj, "window")?, params.d)?;
    let points = parse_points(field(obj, "points")?, params.d, "points")?;
    let mut set = WindowedPointSet::new(points, window, params)?;
    if let Some(tail) = obj.get("tail") {
        let tobj = tail.as_object().ok_or_else(|| bad("\"tail\" must be an object"))?;
        let tparams = if tobj.contains_key("d") {
            parse_params(tobj)?
        } else {
            params
        };
        set = set.with_tail(parse_crystal(tobj, tparams)?)?;
    }
    Ok(DeloneSet::Windowed(set))
}

pub fn point_set_from_json(text: &str) -> Result<DeloneSet> {
    let v: Value = serde_json::from_str(text).map_err(|e| bad(format!("invalid JSON: {e}")))?;
    point_set_from_value(&v)
}

fn points_value(points: &[Point]) -> Value {
    Value::Array(points.iter().map(|p| json!(p.0)).collect())
}

fn crystal_fields(c: &CrystallographicSet, obj: &mut Map<String, Value>) {
    obj.insert("period".into(), json!(c.period));
    obj.insert("motif".into(), points_value(&c.motif));
}

fn params_fields(p: &DeloneParams) -> Map<String, Value> {
    let mut obj = Map::new();
    obj.insert("d".into(), json!(p.d));
    obj.insert("r".into(), json!(p.r));
    obj.insert("R".into(), json!(p.big_r));
    obj
}

/// Encodes a set; `provenance`, when given, is stored under that key.
pub fn point_set_to_value(set: &DeloneSet, provenance: Option<Value>) -> Value {
    let mut obj;
    match set {
        DeloneSet::Crystal(c) => {
            obj = params_fields(&c.params);
            crystal_fields(c, &mut obj);
        }
        DeloneSet::Windowed(w) => {
            obj = params_fields(&w.params);
            let s = w.window.half_width;
            obj.insert("window".into(), Value::Array(vec![json!([-s, s]); w.params.d]));
            obj.insert("points".into(), points_value(&w.points));
            if let Some(t) = &w.tail {
                let mut tobj = params_fields(&t.params);
                crystal_fields(t, &mut tobj);
                obj.insert("tail".into(), Value::Object(tobj));
            }
        }
    }
    if let Some(p) = provenance {
        obj.insert("provenance".into(), p);
    }
    Value::Object(obj)
}

pub fn point_set_to_json(set: &DeloneSet, provenance: Option<Value>) -> String {
    serde_json::to_string_pretty(&point_set_to_value(set, provenance)).expect("point sets serialise to JSON")
}

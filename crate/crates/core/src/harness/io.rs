//! Instance JSON files.
//!
//! ```text
//! {"p": 7, "points": [[x, y], ...],
//!  "lines": [{"kind": "sl", "s": 1, "t": 0}, {"kind": "v", "x": 3}, ...]}
//! ```

use std::fmt::Write as _;
use std::path::Path;

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::field::PrimeModulus;
use crate::incidence::{Plane3, PlaneInstance3D, Point3};
use crate::plane::{AffineLine, AffinePoint, Instance};

fn parse_json(text: &str) -> Result<Map<String, Value>> {
    let v: Value = serde_json::from_str(text)
        .map_err(|e| Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
    match v {
        Value::Object(map) => Ok(map),
        _ => Err(Error::parse("top level", "expected an object")),
    }
}

fn field<'a>(map: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    map.get(key).ok_or_else(|| Error::parse(key, "missing field"))
}

fn uint(v: &Value, loc: &str) -> Result<u64> {
    v.as_u64()
        .ok_or_else(|| Error::parse(loc, format!("expected a nonnegative integer, got {v}")))
}

fn residue(v: &Value, loc: &str, m: PrimeModulus) -> Result<u32> {
    let r = uint(v, loc)?;
    if r >= m.p64() {
        return Err(Error::parse(loc, format!("{r} is not a residue mod {m}")));
    }
    Ok(r as u32)
}

fn array<'a>(v: &'a Value, loc: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::parse(loc, "expected an array"))
}

fn modulus(map: &Map<String, Value>) -> Result<PrimeModulus> {
    let p = uint(field(map, "p")?, "p")?;
    PrimeModulus::new(p).map_err(|e| Error::parse("p", e.to_string()))
}

fn tuple<const N: usize>(v: &Value, loc: &str, m: PrimeModulus) -> Result<[u32; N]> {
    let items = array(v, loc)?;
    if items.len() != N {
        return Err(Error::parse(loc, format!("expected {N} coordinates, got {}", items.len())));
    }
    let mut out = [0u32; N];
    for (i, c) in items.iter().enumerate() {
        out[i] = residue(c, &format!("{loc}[{i}]"), m)?;
    }
    Ok(out)
}

fn line(v: &Value, loc: &str, m: PrimeModulus) -> Result<AffineLine> {
    let obj = v.as_object().ok_or_else(|| Error::parse(loc, "expected an object"))?;
    let get = |k: &str| {
        obj.get(k)
            .ok_or_else(|| Error::parse(format!("{loc}.{k}"), "missing field"))
    };
    match get("kind")?.as_str() {
        Some("sl") => {
            let s = residue(get("s")?, &format!("{loc}.s"), m)?;
            let t = residue(get("t")?, &format!("{loc}.t"), m)?;
            Ok(AffineLine::NonVertical {
                slope: m.scalar(s as u64),
                intercept: m.scalar(t as u64),
            })
        }
        Some("v") => Ok(AffineLine::vertical(
            m.scalar(residue(get("x")?, &format!("{loc}.x"), m)? as u64),
        )),
        _ => Err(Error::parse(format!("{loc}.kind"), "expected \"sl\" or \"v\"")),
    }
}

/// Parses an instance, returning it with the number of dropped duplicates.
pub fn parse_instance(text: &str) -> Result<(Instance, usize)> {
    let map = parse_json(text)?;
    let m = modulus(&map)?;
    let points = array(field(&map, "points")?, "points")?
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let [x, y] = tuple::<2>(v, &format!("points[{i}]"), m)?;
            Ok(AffinePoint {
                x: m.scalar(x as u64),
                y: m.scalar(y as u64),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let lines = array(field(&map, "lines")?, "lines")?
        .iter()
        .enumerate()
        .map(|(i, v)| line(v, &format!("lines[{i}]"), m))
        .collect::<Result<Vec<_>>>()?;
    Instance::with_duplicate_count(m, points, lines)
}

/// `{"p": .., "points": [[x, y, z], ..], "planes": [[a, b, c, d], ..]}`.
pub fn parse_instance_3d(text: &str) -> Result<PlaneInstance3D> {
    let map = parse_json(text)?;
    let m = modulus(&map)?;
    let points = array(field(&map, "points")?, "points")?
        .iter()
        .enumerate()
        .map(|(i, v)| tuple::<3>(v, &format!("points[{i}]"), m))
        .collect::<Result<Vec<Point3>>>()?;
    let planes = array(field(&map, "planes")?, "planes")?
        .iter()
        .enumerate()
        .map(|(i, v)| tuple::<4>(v, &format!("planes[{i}]"), m))
        .collect::<Result<Vec<Plane3>>>()?;
    PlaneInstance3D::new(m, points, planes)
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<(Instance, usize)> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_instance(&text)
}

/// One point or line per row, in canonical order.
pub fn render_instance(inst: &Instance) -> String {
    let mut out = format!("{{\n  \"p\": {},\n  \"points\": [", inst.modulus());
    for (i, q) in inst.points().iter().enumerate() {
        let sep = if i == 0 { "" } else { "," };
        let _ = write!(out, "{sep}\n    [{}, {}]", q.x, q.y);
    }
    out.push_str(if inst.m() == 0 { "],\n  \"lines\": [" } else { "\n  ],\n  \"lines\": [" });
    for (i, l) in inst.lines().iter().enumerate() {
        let sep = if i == 0 { "" } else { "," };
        let row = match l {
            AffineLine::NonVertical { slope, intercept } => {
                format!("{{\"kind\": \"sl\", \"s\": {slope}, \"t\": {intercept}}}")
            }
            AffineLine::Vertical { x } => format!("{{\"kind\": \"v\", \"x\": {x}}}"),
        };
        let _ = write!(out, "{sep}\n    {row}");
    }
    out.push_str(if inst.n() == 0 { "]\n}\n" } else { "\n  ]\n}\n" });
    out
}

pub fn write_instance(inst: &Instance, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path.as_ref(), render_instance(inst))
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::full_plane;

    #[test]
    fn round_trip() {
        let m = PrimeModulus::new(3).unwrap();
        let fp = full_plane(m);
        let (back, dups) = parse_instance(&render_instance(&fp)).unwrap();
        assert_eq!((back, dups), (fp, 0));
        let empty = Instance::empty(m);
        assert_eq!(parse_instance(&render_instance(&empty)).unwrap().0, empty);
    }

    #[test]
    fn duplicates_are_counted() {
        let text = r#"{"p": 5, "points": [[1, 2], [1, 2]], "lines": [{"kind": "v", "x": 1}]}"#;
        let (inst, dups) = parse_instance(text).unwrap();
        assert_eq!((inst.m(), inst.n(), dups), (1, 1, 1));
    }

    #[test]
    fn diagnostics() {
        let err = parse_instance(r#"{"p": 9, "points": [], "lines": []}"#).unwrap_err();
        assert!(matches!(&err, Error::Parse { location, message } if location == "p" && message.contains("not prime")));

        let err = parse_instance(r#"{"p": 5, "points": [[1, 7]], "lines": []}"#).unwrap_err();
        assert!(matches!(&err, Error::Parse { location, .. } if location == "points[0][1]"));

        let err = parse_instance("{\"p\": 5,\n \"points\": [,]}").unwrap_err();
        assert!(matches!(&err, Error::Parse { location, .. } if location.starts_with("line 2")));

        let err = parse_instance(r#"{"p": 5, "points": [], "lines": [{"kind": "q"}]}"#).unwrap_err();
        assert!(matches!(&err, Error::Parse { location, .. } if location == "lines[0].kind"));

        let err = parse_instance(r#"{"p": 5, "lines": []}"#).unwrap_err();
        assert!(matches!(&err, Error::Parse { location, .. } if location == "points"));
    }

    #[test]
    fn three_dimensional() {
        let text = r#"{"p": 5, "points": [[0, 0, 0], [1, 1, 1]], "planes": [[0, 0, 3, 0]]}"#;
        let inst = parse_instance_3d(text).unwrap();
        assert_eq!((inst.r(), inst.s()), (2, 1));
        assert!(parse_instance_3d(r#"{"p": 5, "points": [[0, 0]], "planes": []}"#).is_err());
    }
}

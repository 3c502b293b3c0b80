//! JSON formats for spaces, maps and diagrams.
//!
//! Spaces are `{"points": n, "labels": [...], "dist": [[...], ...]}` with
//! distances written as `"p"`, `"p/q"` or `"inf"`. A map is
//! `{"dom": S, "cod": S, "map": [...]}` where `S` is an inline space or the
//! name of an entry in the document's top-level `"spaces"` object. Output is
//! compact and byte-stable; input that is valid but not in canonical form
//! (unreduced fractions, `"INF"`, bare numbers) is accepted and its JSON
//! pointers are recorded.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};
use serde_json::Value;
use thiserror::Error;

use crate::colimit::{Arrow, FinDiagram};
use crate::extrat::ExtRat;
use crate::morphism::MetMap;
use crate::space::{InvalidSpace, Space};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pointer}: {message}")]
pub struct SchemaError {
    /// JSON pointer (RFC 6901) of the offending value; empty for the root.
    pub pointer: String,
    pub message: String,
}

fn schema(pointer: &str, message: impl Into<String>) -> SchemaError {
    SchemaError { pointer: pointer.to_string(), message: message.into() }
}

fn child(pointer: &str, key: impl std::fmt::Display) -> String {
    let key = key.to_string().replace('~', "~0").replace('/', "~1");
    format!("{pointer}/{key}")
}

impl Serialize for Space {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let fields = if self.labels().is_some() { 3 } else { 2 };
        let mut st = serializer.serialize_struct("Space", fields)?;
        st.serialize_field("points", &self.len())?;
        if let Some(labels) = self.labels() {
            st.serialize_field("labels", labels)?;
        }
        st.serialize_field("dist", &self.rows())?;
        st.end()
    }
}

impl Serialize for MetMap {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_map(Some(3))?;
        st.serialize_entry("dom", self.dom().as_ref())?;
        st.serialize_entry("cod", self.cod().as_ref())?;
        st.serialize_entry("map", self.as_slice())?;
        st.end()
    }
}

impl Serialize for FinDiagram {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct ArrowOut<'a> {
            src: usize,
            dst: usize,
            map: &'a [usize],
        }
        let objects: Vec<&Space> = self.objects().iter().map(|o| o.as_ref()).collect();
        let arrows: Vec<ArrowOut> = self.arrows().iter().map(|a| ArrowOut { src: a.src, dst: a.dst, map: a.map.as_slice() }).collect();
        let mut st = serializer.serialize_struct("FinDiagram", 2)?;
        st.serialize_field("objects", &objects)?;
        st.serialize_field("arrows", &arrows)?;
        st.end()
    }
}

/// Compact single-line JSON.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    serde_json::to_string(value).expect("serialization of in-memory values cannot fail")
}

/// A parsed JSON document with its named spaces resolved.
#[derive(Debug, Clone)]
pub struct Document {
    root: Value,
    spaces: BTreeMap<String, Arc<Space>>,
    noncanonical: Vec<String>,
}

impl Document {
    pub fn parse(text: &str) -> Result<Document, SchemaError> {
        let root: Value = serde_json::from_str(text).map_err(|e| schema("", format!("invalid JSON: {e}")))?;
        let mut doc = Document { root, spaces: BTreeMap::new(), noncanonical: Vec::new() };
        if let Some(named) = doc.root.get("spaces") {
            let named = named.as_object().ok_or_else(|| schema("/spaces", "expected an object of named spaces"))?.clone();
            for (name, v) in &named {
                let s = doc.parse_space(v, &child("/spaces", name))?;
                doc.spaces.insert(name.clone(), Arc::new(s));
            }
        }
        Ok(doc)
    }

    pub fn root(&self) -> &Value {
        &self.root
    }

    /// Pointers of values that were accepted but not written canonically.
    pub fn noncanonical(&self) -> &[String] {
        &self.noncanonical
    }

    pub fn named_spaces(&self) -> &BTreeMap<String, Arc<Space>> {
        &self.spaces
    }

    fn at(&self, pointer: &str) -> Result<&Value, SchemaError> {
        self.root.pointer(pointer).ok_or_else(|| schema(pointer, "missing"))
    }

    pub fn has(&self, pointer: &str) -> bool {
        self.root.pointer(pointer).is_some()
    }

    pub fn space(&mut self, pointer: &str) -> Result<Arc<Space>, SchemaError> {
        let v = self.at(pointer)?.clone();
        self.space_or_ref(&v, pointer)
    }

    pub fn morphism(&mut self, pointer: &str) -> Result<MetMap, SchemaError> {
        let v = self.at(pointer)?.clone();
        let obj = v.as_object().ok_or_else(|| schema(pointer, "expected a map object"))?;
        let dom = self.space_or_ref(obj.get("dom").ok_or_else(|| schema(pointer, "missing \"dom\""))?, &child(pointer, "dom"))?;
        let cod = self.space_or_ref(obj.get("cod").ok_or_else(|| schema(pointer, "missing \"cod\""))?, &child(pointer, "cod"))?;
        let map_ptr = child(pointer, "map");
        let map = index_list(obj.get("map").ok_or_else(|| schema(pointer, "missing \"map\""))?, &map_ptr)?;
        MetMap::new(dom, cod, map).map_err(|e| schema(&map_ptr, e.to_string()))
    }

    pub fn diagram(&mut self, pointer: &str) -> Result<FinDiagram, SchemaError> {
        let v = self.at(pointer)?.clone();
        let objs_ptr = child(pointer, "objects");
        let objs = v.get("objects").and_then(Value::as_array).ok_or_else(|| schema(&objs_ptr, "expected an array"))?;
        let objects = objs.iter().enumerate().map(|(i, o)| self.space_or_ref(o, &child(&objs_ptr, i))).collect::<Result<Vec<_>, _>>()?;
        let arrows_ptr = child(pointer, "arrows");
        let empty = Vec::new();
        let arrs = match v.get("arrows") {
            None => &empty,
            Some(a) => a.as_array().ok_or_else(|| schema(&arrows_ptr, "expected an array"))?,
        };
        let mut arrows = Vec::with_capacity(arrs.len());
        for (k, a) in arrs.iter().enumerate() {
            let p = child(&arrows_ptr, k);
            let index = |key: &str| -> Result<usize, SchemaError> {
                let q = child(&p, key);
                let i = a.get(key).and_then(Value::as_u64).ok_or_else(|| schema(&q, "expected an object index"))? as usize;
                if i >= objects.len() {
                    return Err(schema(&q, format!("no object {i}")));
                }
                Ok(i)
            };
            let (src, dst) = (index("src")?, index("dst")?);
            let map_ptr = child(&p, "map");
            let map = index_list(a.get("map").ok_or_else(|| schema(&p, "missing \"map\""))?, &map_ptr)?;
            let map = MetMap::new(objects[src].clone(), objects[dst].clone(), map).map_err(|e| schema(&map_ptr, e.to_string()))?;
            arrows.push(Arrow { src, dst, map });
        }
        FinDiagram::new(objects, arrows).map_err(|e| schema(pointer, e.to_string()))
    }

    /// An array of spaces (inline or named).
    pub fn space_list(&mut self, pointer: &str) -> Result<Vec<Arc<Space>>, SchemaError> {
        let v = self.at(pointer)?.clone();
        let items = v.as_array().ok_or_else(|| schema(pointer, "expected an array of spaces"))?;
        items.iter().enumerate().map(|(i, s)| self.space_or_ref(s, &child(pointer, i))).collect()
    }

    fn space_or_ref(&mut self, v: &Value, pointer: &str) -> Result<Arc<Space>, SchemaError> {
        match v {
            Value::String(name) => self.spaces.get(name).cloned().ok_or_else(|| schema(pointer, format!("no space named {name:?}"))),
            _ => Ok(Arc::new(self.parse_space(v, pointer)?)),
        }
    }

    /// Like [`Document::space`] for an inline space, but an axiom failure is
    /// returned with its full violation list rather than as a schema error.
    pub fn checked_space(&mut self, pointer: &str) -> Result<Result<Space, InvalidSpace>, SchemaError> {
        let v = self.at(pointer)?.clone();
        let flagged = self.noncanonical.len();
        let matrix = self.parse_matrix(&v, pointer)?;
        match Space::validate(matrix) {
            Ok(_) => {
                self.noncanonical.truncate(flagged);
                self.parse_space(&v, pointer).map(Ok)
            }
            Err(e) => Ok(Err(e)),
        }
    }

    fn parse_matrix(&mut self, v: &Value, pointer: &str) -> Result<Vec<Vec<ExtRat>>, SchemaError> {
        let obj = v.as_object().ok_or_else(|| schema(pointer, "expected a space object"))?;
        for key in obj.keys() {
            if !matches!(key.as_str(), "points" | "labels" | "dist") {
                return Err(schema(&child(pointer, key), "unknown field"));
            }
        }
        let n =
            obj.get("points").and_then(Value::as_u64).ok_or_else(|| schema(&child(pointer, "points"), "expected a point count"))? as usize;
        let dist_ptr = child(pointer, "dist");
        let rows = obj.get("dist").and_then(Value::as_array).ok_or_else(|| schema(&dist_ptr, "expected an array of rows"))?;
        if rows.len() != n {
            return Err(schema(&dist_ptr, format!("{} rows for {n} points", rows.len())));
        }
        let mut matrix = Vec::with_capacity(n);
        for (i, row) in rows.iter().enumerate() {
            let row_ptr = child(&dist_ptr, i);
            let row = row.as_array().ok_or_else(|| schema(&row_ptr, "expected a row"))?;
            if row.len() != n {
                return Err(schema(&row_ptr, format!("{} entries for {n} points", row.len())));
            }
            let mut parsed = Vec::with_capacity(n);
            for (j, cell) in row.iter().enumerate() {
                let cell_ptr = child(&row_ptr, j);
                let (value, canonical) = match cell {
                    Value::String(text) => ExtRat::parse_flagged(text).map_err(|e| schema(&cell_ptr, e.to_string()))?,
                    Value::Number(num) => {
                        let k = num.as_u64().ok_or_else(|| schema(&cell_ptr, "numbers must be nonnegative integers"))?;
                        (ExtRat::int(k), false)
                    }
                    _ => return Err(schema(&cell_ptr, "expected a distance string")),
                };
                if !canonical {
                    self.noncanonical.push(cell_ptr);
                }
                parsed.push(value);
            }
            matrix.push(parsed);
        }
        Ok(matrix)
    }

    fn parse_space(&mut self, v: &Value, pointer: &str) -> Result<Space, SchemaError> {
        let matrix = self.parse_matrix(v, pointer)?;
        let obj = v.as_object().expect("checked by parse_matrix");
        let dist_ptr = child(pointer, "dist");
        let mut space = Space::validate(matrix).map_err(|e| schema(&dist_ptr, e.to_string()))?;
        if let Some(labels) = obj.get("labels") {
            let lp = child(pointer, "labels");
            let labels = labels
                .as_array()
                .and_then(|ls| ls.iter().map(|l| l.as_str().map(str::to_string)).collect::<Option<Vec<_>>>())
                .ok_or_else(|| schema(&lp, "expected an array of strings"))?;
            space = space.with_labels(labels).map_err(|e| schema(&lp, e.to_string()))?;
        }
        Ok(space)
    }
}

fn index_list(v: &Value, pointer: &str) -> Result<Vec<usize>, SchemaError> {
    let items = v.as_array().ok_or_else(|| schema(pointer, "expected an array of point indices"))?;
    items
        .iter()
        .enumerate()
        .map(|(i, x)| x.as_u64().map(|k| k as usize).ok_or_else(|| schema(&child(pointer, i), "expected a point index")))
        .collect()
}

/// Parses a document whose root is a single space.
pub fn load_space(text: &str) -> Result<(Space, Vec<String>), SchemaError> {
    let mut doc = Document::parse(text)?;
    let s = doc.space("")?;
    Ok(((*s).clone(), doc.noncanonical))
}

pub fn load_morphism(text: &str) -> Result<MetMap, SchemaError> {
    Document::parse(text)?.morphism("")
}

pub fn load_diagram(text: &str) -> Result<FinDiagram, SchemaError> {
    Document::parse(text)?.diagram("")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn space_round_trip_is_byte_identical() {
        let text = r#"{"points":2,"dist":[["0","1"],["1","0"]]}"#;
        let (s, flagged) = load_space(text).unwrap();
        assert!(flagged.is_empty());
        assert!(s.same_metric(&Space::two(ExtRat::one())));
        assert_eq!(to_json(&s), text);
    }

    #[test]
    fn unreduced_fraction_is_normalised_and_flagged() {
        let (s, flagged) = load_space(r#"{"points":2,"dist":[["0","3/6"],["3/6","0"]]}"#).unwrap();
        assert_eq!(to_json(&s), r#"{"points":2,"dist":[["0","1/2"],["1/2","0"]]}"#);
        assert_eq!(flagged, vec!["/dist/0/1".to_string(), "/dist/1/0".to_string()]);
    }

    #[test]
    fn infinity_and_labels_round_trip() {
        let text = r#"{"points":2,"labels":["a","b"],"dist":[["0","inf"],["inf","0"]]}"#;
        let (s, _) = load_space(text).unwrap();
        assert_eq!(to_json(&s), text);
    }

    #[test]
    fn schema_errors_carry_pointers() {
        let err = load_space(r#"{"points":2,"dist":[["0","1"],["1","x"]]}"#).unwrap_err();
        assert_eq!(err.pointer, "/dist/1/1");
        let err = load_space(r#"{"points":3,"dist":[["0","1","3"],["1","0","1"],["3","1","0"]]}"#).unwrap_err();
        assert_eq!(err.pointer, "/dist");
        assert!(err.message.contains("path through 1"), "{}", err.message);
        let err = load_morphism(r#"{"spaces":{"P":{"points":1,"dist":[["0"]]}},"dom":"P","cod":"Q","map":[0]}"#).unwrap_err();
        assert_eq!(err.pointer, "/cod");
    }

    #[test]
    fn morphisms_and_diagrams() {
        let text =
            r#"{"spaces":{"P":{"points":1,"dist":[["0"]]},"T":{"points":2,"dist":[["0","1"],["1","0"]]}},"dom":"P","cod":"T","map":[1]}"#;
        let f = load_morphism(text).unwrap();
        assert_eq!(f.as_slice(), &[1]);
        assert_eq!(to_json(&f), r#"{"dom":{"points":1,"dist":[["0"]]},"cod":{"points":2,"dist":[["0","1"],["1","0"]]},"map":[1]}"#);
        let d = load_diagram(
            r#"{"objects":[{"points":1,"dist":[["0"]]},{"points":2,"dist":[["0","1"],["1","0"]]}],"arrows":[{"src":0,"dst":1,"map":[1]}]}"#,
        )
        .unwrap();
        assert_eq!(d.arrows().len(), 1);
        let again = load_diagram(&to_json(&d)).unwrap();
        assert_eq!(to_json(&again), to_json(&d));
        let err = load_diagram(r#"{"objects":[{"points":1,"dist":[["0"]]}],"arrows":[{"src":0,"dst":3,"map":[0]}]}"#).unwrap_err();
        assert_eq!(err.pointer, "/arrows/0/dst");
    }
}

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};

/// Version stamped into every report body.
pub const SCHEMA_VERSION: u64 = 1;

/// A canonical report body: a JSON object with sorted keys and no timing data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    body: Map<String, Value>,
}

impl Report {
    pub fn new(command: &str, params: Value) -> Self {
        let mut body = Map::new();
        body.insert("schemaVersion".into(), Value::from(SCHEMA_VERSION));
        body.insert("command".into(), Value::from(command));
        body.insert("params".into(), params);
        Report { body }
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        let v = serde_json::to_value(value).expect("report fields serialize");
        self.body.insert(key.into(), v);
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.body.get(key)
    }

    pub fn body(&self) -> &Map<String, Value> {
        &self.body
    }

    pub fn from_value(v: Value) -> Result<Self> {
        match v {
            Value::Object(body) => Ok(Report { body }),
            _ => Err(Error::SchemaMismatch("report must be a JSON object".into())),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_value(serde_json::from_str(text)?)
    }

    pub fn schema_version(&self) -> Option<u64> {
        self.body.get("schemaVersion").and_then(Value::as_u64)
    }

    /// Canonical text: keys sorted, compact, newline-terminated.
    pub fn to_canonical_string(&self) -> String {
        let mut s = serde_json::to_string(&Value::Object(self.body.clone())).expect("json");
        s.push('\n');
        s
    }

    pub fn to_pretty_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&Value::Object(self.body.clone())).expect("json");
        s.push('\n');
        s
    }

    /// Flattened `path,value` rows. Arrays of scalars are joined with spaces.
    pub fn to_csv(&self) -> Result<String> {
        let mut rows = Vec::new();
        flatten("", &Value::Object(self.body.clone()), &mut rows);
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["path", "value"]).map_err(|e| Error::Io(e.to_string()))?;
        for (p, v) in rows {
            w.write_record([p, v]).map_err(|e| Error::Io(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Array(_) | Value::Object(_) => None,
        other => Some(other.to_string()),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(&join(k), x, out);
            }
        }
        Value::Array(xs) => {
            if let Some(parts) = xs.iter().map(scalar).collect::<Option<Vec<_>>>() {
                out.push((prefix.to_string(), parts.join(" ")));
            } else {
                for (i, x) in xs.iter().enumerate() {
                    flatten(&join(&i.to_string()), x, out);
                }
            }
        }
        other => out.push((prefix.to_string(), scalar(other).unwrap_or_default())),
    }
}

/// One differing field between two reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffEntry {
    pub path: String,
    pub left: Option<Value>,
    pub right: Option<Value>,
}

/// Field-level differences; objects are compared key by key, arrays and
/// scalars as whole values.
pub fn report_diff(r1: &Report, r2: &Report) -> Result<Vec<DiffEntry>> {
    match (r1.schema_version(), r2.schema_version()) {
        (Some(a), Some(b)) if a == b => {}
        (a, b) => return Err(Error::SchemaMismatch(format!("schema versions {a:?} and {b:?}"))),
    }
    let mut out = Vec::new();
    diff_objects("", &r1.body, &r2.body, &mut out);
    Ok(out)
}

fn diff_objects(prefix: &str, a: &Map<String, Value>, b: &Map<String, Value>, out: &mut Vec<DiffEntry>) {
    let mut keys: Vec<&String> = a.keys().chain(b.keys()).collect();
    keys.sort();
    keys.dedup();
    for k in keys {
        let path = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        match (a.get(k), b.get(k)) {
            (Some(Value::Object(x)), Some(Value::Object(y))) => diff_objects(&path, x, y, out),
            (x, y) if x != y => out.push(DiffEntry { path, left: x.cloned(), right: y.cloned() }),
            _ => {}
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn report(witness: Value) -> Report {
        let mut r = Report::new("search", json!({"b": 1, "a": [1, 2]}));
        r.set("witness", witness).set("outcome", "found");
        r
    }

    #[test]
    fn canonical_keys_sorted() {
        let r = report(json!({"x": [2, 4]}));
        let s = r.to_canonical_string();
        assert!(s.starts_with(r#"{"command":"search","outcome":"found","params":{"a":[1,2],"b":1},"schemaVersion":1"#));
        assert_eq!(Report::parse(&s).unwrap(), r);
    }

    #[test]
    fn diffs() {
        let a = report(json!({"x": [2, 4]}));
        assert!(report_diff(&a, &a).unwrap().is_empty());
        let b = report(json!({"x": [2, 6]}));
        let d = report_diff(&a, &b).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].path, "witness.x");
        let mut c = a.clone();
        c.set("schemaVersion", 2);
        assert!(matches!(report_diff(&a, &c), Err(Error::SchemaMismatch(_))));
    }

    #[test]
    fn csv_flattening() {
        let csv = report(json!({"x": [2, 4]})).to_csv().unwrap();
        assert!(csv.starts_with("path,value\n"));
        assert!(csv.contains("witness.x,2 4\n"));
        assert!(csv.contains("params.a,1 2\n"));
    }
}

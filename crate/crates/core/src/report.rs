//! Deterministic serialization: JSON with sorted keys and `%.17g` floats,
//! CSV with a header row.

use serde_json::Value;

/// Formats a float like C's `%.17g`.
pub fn fmt_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.16e}", x);
    let (mant, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if !(-4..17).contains(&exp) {
        let mant = trim_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mant}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (16 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Renders a JSON value with sorted keys, two-space indentation and `%.17g`
/// floats. Non-finite floats cannot occur in a `Value`.
pub fn to_json_string(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, 0, &mut out);
    out.push('\n');
    out
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                let s = fmt_g17(n.as_f64().unwrap_or(f64::NAN));
                out.push_str(&s);
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string")),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            let flat = items.iter().all(|x| !x.is_array() && !x.is_object());
            if flat {
                out.push('[');
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_value(x, indent, out);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                pad(indent + 1, out);
                write_value(x, indent + 1, out);
                if i + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            pad(indent, out);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                pad(indent + 1, out);
                out.push_str(&serde_json::to_string(k).expect("key"));
                out.push_str(": ");
                write_value(&map[*k], indent + 1, out);
                if i + 1 < keys.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            pad(indent, out);
            out.push('}');
        }
    }
}

fn pad(indent: usize, out: &mut String) {
    for _ in 0..indent {
        out.push_str("  ");
    }
}

/// Column-oriented table of preformatted cells.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let line = |cells: &[String], out: &mut String| {
            let parts: Vec<String> = cells.iter().map(|c| csv_cell(c)).collect();
            out.push_str(&parts.join(","));
            out.push('\n');
        };
        line(&self.header, &mut out);
        for r in &self.rows {
            line(r, &mut out);
        }
        out
    }
}

fn csv_cell(c: &str) -> String {
    if c.contains(',') || c.contains('"') || c.contains('\n') {
        format!("\"{}\"", c.replace('"', "\"\""))
    } else {
        c.to_string()
    }
}

/// Cell text for a JSON scalar.
pub fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Number(n) if n.is_f64() => fmt_g17(n.as_f64().unwrap()),
        Value::String(s) => s.clone(),
        other => {
            let s = to_json_string(other);
            s.trim_end().replace('\n', " ")
        }
    }
}

/// A JSON document plus an optional row view for CSV output.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub json: Value,
    pub table: Option<Table>,
}

impl Report {
    pub fn empty() -> Self {
        Report { json: Value::Object(Default::default()), table: None }
    }

    pub fn new(json: Value) -> Self {
        Report { json, table: None }
    }

    pub fn with_table(json: Value, table: Table) -> Self {
        Report { json, table: Some(table) }
    }

    pub fn to_json(&self) -> String {
        to_json_string(&self.json)
    }

    /// CSV rows; without a table the top-level scalars become
    /// `key,value` rows.
    pub fn to_csv(&self) -> String {
        if let Some(t) = &self.table {
            return t.to_csv();
        }
        let mut t = Table::new(&["key", "value"]);
        if let Value::Object(map) = &self.json {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            for k in keys {
                let v = &map[k];
                if !v.is_object() && !v.is_array() {
                    t.push(vec![k.clone(), cell(v)]);
                }
            }
        }
        t.to_csv()
    }
}

/// Converts a float to a JSON value, mapping non-finite values to strings so
/// they survive serialization.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::from(x)
    } else {
        Value::String(fmt_g17(x))
    }
}

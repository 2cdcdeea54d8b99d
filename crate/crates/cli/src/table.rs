//! Machine-readable result tables.
//!
//! Every scenario emits a [`ResultTable`]: an ordered metadata block, a
//! header, and rectangular rows. Serialisation is deterministic — floats are
//! always printed at 17 significant digits, metadata preserves insertion
//! order, and nothing environment-dependent (timestamps, paths) is recorded —
//! so identical configs produce byte-identical output.

use std::io::{self, Write};

/// One table cell. Infeasible rows leave their numeric cells empty; NaN is
/// never written.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Float(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Value {
    pub fn text(s: impl Into<String>) -> Self {
        Value::Text(s.into())
    }

    pub fn as_float(&self) -> Option<f64> {
        match self {
            Value::Float(x) => Some(*x),
            _ => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Value::Text(s) => Some(s),
            _ => None,
        }
    }
}

/// 17-significant-digit scientific notation; round-trips any finite f64.
pub fn format_float(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x }; // normalise -0.0
    format!("{x:.16e}")
}

/// A rectangular numeric table with a metadata preamble.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub scenario: String,
    /// Ordered key/value pairs echoed into the output header.
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl ResultTable {
    pub fn new(scenario: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            scenario: scenario.into(),
            metadata: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.metadata.push((key.into(), value.into()));
    }

    pub fn meta_float(&mut self, key: impl Into<String>, value: f64) {
        self.meta(key, format_float(value));
    }

    pub fn push_row(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "ragged row");
        self.rows.push(row);
    }

    /// Index of a named column.
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Values of a named column as floats (skipping non-numeric cells).
    pub fn float_column(&self, name: &str) -> Vec<f64> {
        let Some(idx) = self.column_index(name) else {
            return Vec::new();
        };
        self.rows.iter().filter_map(|r| r[idx].as_float()).collect()
    }

    /// `(feasible, total)` row counts judged by the `status` column; `None`
    /// when the table has no status column.
    pub fn feasibility(&self) -> Option<(usize, usize)> {
        let idx = self.column_index("status")?;
        let ok = self
            .rows
            .iter()
            .filter(|r| r[idx].as_text() == Some("ok"))
            .count();
        Some((ok, self.rows.len()))
    }

    /// All float cells must be finite; the writers refuse NaN/inf as data.
    pub fn assert_finite(&self) -> Result<(), String> {
        for (i, row) in self.rows.iter().enumerate() {
            for (value, column) in row.iter().zip(&self.columns) {
                if let Value::Float(x) = value {
                    if !x.is_finite() {
                        return Err(format!("non-finite value {x} in row {i}, column {column}"));
                    }
                }
            }
        }
        Ok(())
    }

    /// CSV with a `#`-prefixed metadata block.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "# scenario: {}", self.scenario)?;
        for (key, value) in &self.metadata {
            writeln!(w, "# {key}: {value}")?;
        }
        writeln!(w, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|v| match v {
                    Value::Float(x) => format_float(*x),
                    Value::Int(n) => n.to_string(),
                    Value::Text(s) => s.clone(),
                    Value::Empty => String::new(),
                })
                .collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }

    /// Structured-object format: one JSON object mirroring the table.
    pub fn write_json<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "{{")?;
        writeln!(w, "  \"scenario\": {},", json_string(&self.scenario))?;
        writeln!(w, "  \"metadata\": {{")?;
        for (i, (key, value)) in self.metadata.iter().enumerate() {
            let comma = if i + 1 < self.metadata.len() { "," } else { "" };
            writeln!(w, "    {}: {}{comma}", json_string(key), json_string(value))?;
        }
        writeln!(w, "  }},")?;
        let columns: Vec<String> = self.columns.iter().map(|c| json_string(c)).collect();
        writeln!(w, "  \"columns\": [{}],", columns.join(", "))?;
        writeln!(w, "  \"rows\": [")?;
        for (i, row) in self.rows.iter().enumerate() {
            let cells: Vec<String> = row
                .iter()
                .map(|v| match v {
                    Value::Float(x) => format_float(*x),
                    Value::Int(n) => n.to_string(),
                    Value::Text(s) => json_string(s),
                    Value::Empty => "null".to_string(),
                })
                .collect();
            let comma = if i + 1 < self.rows.len() { "," } else { "" };
            writeln!(w, "    [{}]{comma}", cells.join(", "))?;
        }
        writeln!(w, "  ]")?;
        writeln!(w, "}}")?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("CSV output is UTF-8")
    }

    pub fn to_json_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_json(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("JSON output is UTF-8")
    }
}

fn json_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_is_17_significant_digits() {
        assert_eq!(format_float(1.0), "1.0000000000000000e0");
        assert_eq!(format_float(-0.21), "-2.0999999999999999e-1");
        assert_eq!(format_float(0.0), "0.0000000000000000e0");
        assert_eq!(format_float(-0.0), "0.0000000000000000e0");
        let x = 0.1 + 0.2;
        let parsed: f64 = format_float(x).parse().unwrap();
        assert_eq!(parsed, x);
    }

    #[test]
    fn csv_layout_and_feasibility() {
        let mut t = ResultTable::new("demo", &["q", "value", "status"]);
        t.meta("tool", "dualtri-cli 0.0.0");
        t.push_row(vec![Value::Float(0.5), Value::Int(3), Value::text("ok")]);
        t.push_row(vec![
            Value::Float(0.6),
            Value::Empty,
            Value::text("unreachable"),
        ]);
        let csv = t.to_csv_string();
        assert!(csv.starts_with("# scenario: demo\n# tool: dualtri-cli 0.0.0\n"));
        assert!(csv.contains("q,value,status\n"));
        assert!(csv.contains("5.0000000000000000e-1,3,ok\n"));
        assert!(csv.contains("5.9999999999999998e-1,,unreachable\n"));
        assert_eq!(t.feasibility(), Some((1, 2)));
        assert!(t.assert_finite().is_ok());
    }

    #[test]
    fn non_finite_cells_are_refused() {
        let mut t = ResultTable::new("demo", &["x"]);
        t.push_row(vec![Value::Float(f64::NAN)]);
        assert!(t.assert_finite().is_err());
    }

    #[test]
    fn json_is_structurally_sound() {
        let mut t = ResultTable::new("demo", &["x", "status"]);
        t.meta("note", "quote \" and backslash \\");
        t.push_row(vec![Value::Float(1.25), Value::text("ok")]);
        let json = t.to_json_string();
        assert!(json.contains("\"scenario\": \"demo\""));
        assert!(json.contains("\\\""));
        assert!(json.contains("[1.2500000000000000e0, \"ok\"]"));
    }
}

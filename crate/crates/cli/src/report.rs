use std::io::Write;

use orbitframe::Tolerance;
use serde::Serialize;
use serde_json::Value;

use crate::config::{ExperimentConfig, Format};
use crate::error::{CliError, CliResult};

#[derive(Debug, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub timestamp: String,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub provenance: Provenance,
    pub config: ExperimentConfig,
    pub tolerance: Tolerance,
    pub results: Value,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn render(&self, table: &Table, format: Format) -> CliResult<Vec<u8>> {
        match format {
            Format::Json => {
                let mut out = serde_json::to_vec_pretty(self).expect("report serializes");
                out.push(b'\n');
                Ok(out)
            }
            Format::Csv => table.to_csv(),
        }
    }
}

/// Shortest round-trip text; scientific notation outside `[1e-4, 1e15)`.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

/// Flat columns for plotting.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<H: ToString>(headers: impl IntoIterator<Item = H>, rows: impl IntoIterator<Item = Vec<String>>) -> Self {
        Table { headers: headers.into_iter().map(|h| h.to_string()).collect(), rows: rows.into_iter().collect() }
    }

    /// `field,value` rows with dotted paths, for results that are not a series.
    pub fn flatten(v: &Value) -> Self {
        fn walk(prefix: &str, v: &Value, rows: &mut Vec<Vec<String>>) {
            let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
            match v {
                Value::Object(m) => m.iter().for_each(|(k, x)| walk(&key(k), x, rows)),
                Value::Array(a) => a.iter().enumerate().for_each(|(i, x)| walk(&key(&i.to_string()), x, rows)),
                Value::String(s) => rows.push(vec![prefix.to_string(), s.clone()]),
                Value::Null => rows.push(vec![prefix.to_string(), String::new()]),
                Value::Number(n) if n.is_f64() => rows.push(vec![prefix.to_string(), num(n.as_f64().unwrap_or(f64::NAN))]),
                other => rows.push(vec![prefix.to_string(), other.to_string()]),
            }
        }
        let mut rows = Vec::new();
        walk("", v, &mut rows);
        Table::new(["field", "value"], rows)
    }

    pub fn to_csv(&self) -> CliResult<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| CliError::config(format!("csv: {e}"));
        w.write_record(&self.headers).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row).map_err(csv_err)?;
        }
        w.into_inner().map_err(|e| CliError::config(format!("csv: {e}")))
    }
}

pub fn emit(bytes: &[u8], path: Option<&std::path::Path>) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| CliError::io(p, e)),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(bytes).and_then(|_| lock.flush()).map_err(|e| CliError::io(std::path::Path::new("<stdout>"), e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn flatten_paths() {
        let t = Table::flatten(&json!({"a": {"b": 1, "c": [true, null]}, "d": "x"}));
        assert_eq!(t.headers, ["field", "value"]);
        assert_eq!(
            t.rows,
            vec![
                vec!["a.b".to_string(), "1".into()],
                vec!["a.c.0".into(), "true".into()],
                vec!["a.c.1".into(), "".into()],
                vec!["d".into(), "x".into()],
            ]
        );
    }

    #[test]
    fn number_text() {
        assert_eq!(num(0.5), "0.5");
        assert_eq!(num(0.0), "0");
        assert_eq!(num(1.5e-12), "1.5e-12");
        assert_eq!(num(-2e20), "-2e20");
        assert_eq!(num(1.5e-12).parse::<f64>().unwrap(), 1.5e-12);
    }

    #[test]
    fn csv_quotes_fields() {
        let t = Table::new(["k", "v"], [vec!["a,b".to_string(), "1".to_string()]]);
        assert_eq!(String::from_utf8(t.to_csv().unwrap()).unwrap(), "k,v\n\"a,b\",1\n");
    }
}

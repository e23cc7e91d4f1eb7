//! Tabular results and their CSV / JSON renderings.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde_json::{json, Map, Value};
use specwell::Complex64;

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Complex(Complex64),
    Text(String),
    Bool(bool),
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<Complex64> for Cell {
    fn from(v: Complex64) -> Self {
        Cell::Complex(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

/// 17 significant digits, `.` separator, no locale.
pub fn fmt_real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn real_json(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

fn cell_json(c: &Cell) -> Value {
    match c {
        Cell::Int(v) => json!(v),
        Cell::Real(v) => real_json(*v),
        Cell::Complex(z) => Value::Array(vec![real_json(z.re), real_json(z.im)]),
        Cell::Text(s) => json!(s),
        Cell::Bool(b) => json!(b),
    }
}

fn cell_csv(c: &Cell) -> Vec<String> {
    match c {
        Cell::Int(v) => vec![v.to_string()],
        Cell::Real(v) => vec![fmt_real(*v)],
        Cell::Complex(z) => vec![fmt_real(z.re), fmt_real(z.im)],
        Cell::Text(s) => vec![s.clone()],
        Cell::Bool(b) => vec![b.to_string()],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnKind {
    Scalar,
    Complex,
}

#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub columns: Vec<(String, ColumnKind)>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[(&str, ColumnKind)]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|(n, k)| ((*n).to_owned(), *k)).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// CSV header: complex columns split into `_re`/`_im`.
    fn csv_header(&self) -> Vec<String> {
        self.columns
            .iter()
            .flat_map(|(n, k)| match k {
                ColumnKind::Scalar => vec![n.clone()],
                ColumnKind::Complex => vec![format!("{n}_re"), format!("{n}_im")],
            })
            .collect()
    }
}

/// Output of one command.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    /// Run parameters, in insertion order.
    pub metadata: Vec<(String, Cell)>,
    pub tables: Vec<Table>,
    /// Derived facts about the run (e.g. the level a loop ended on).
    pub footer: Vec<(String, Cell)>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.into(),
            metadata: Vec::new(),
            tables: Vec::new(),
            footer: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl Into<Cell>) {
        self.metadata.push((key.into(), value.into()));
    }

    pub fn note(&mut self, key: &str, value: impl Into<Cell>) {
        self.footer.push((key.into(), value.into()));
    }

    fn comment_value(c: &Cell) -> String {
        match c {
            Cell::Complex(z) => format!("{},{}", fmt_real(z.re), fmt_real(z.im)),
            other => cell_csv(other).join(","),
        }
    }

    /// Metadata as `# key = value` lines, then each table (a `# table:`
    /// line, header, rows), then the footer as comment lines.
    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut out = String::new();
        writeln!(out, "# command = {}", self.command).unwrap();
        writeln!(out, "# schema_version = {SCHEMA_VERSION}").unwrap();
        for (k, v) in &self.metadata {
            writeln!(out, "# {k} = {}", Self::comment_value(v)).unwrap();
        }
        for table in &self.tables {
            if self.tables.len() > 1 {
                writeln!(out, "# table: {}", table.name).unwrap();
            }
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(Vec::new());
            w.write_record(table.csv_header())?;
            for row in &table.rows {
                w.write_record(row.iter().flat_map(cell_csv))?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
            out.push_str(&String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))?);
        }
        for (k, v) in &self.footer {
            writeln!(out, "# {k} = {}", Self::comment_value(v)).unwrap();
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        let obj = |pairs: &[(String, Cell)]| {
            let mut m = Map::new();
            for (k, v) in pairs {
                m.insert(k.clone(), cell_json(v));
            }
            Value::Object(m)
        };
        let tables: Vec<Value> = self
            .tables
            .iter()
            .map(|t| {
                json!({
                    "name": t.name,
                    "columns": t.columns.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>(),
                    "rows": t.rows.iter().map(|r| r.iter().map(cell_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
                })
            })
            .collect();
        let doc = json!({
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "metadata": obj(&self.metadata),
            "tables": tables,
            "footer": obj(&self.footer),
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Writes `contents` to `path` through a temporary sibling and a rename,
/// or to stdout when `path` is `None`.
pub fn emit(contents: &str, path: Option<&Path>) -> Result<(), CliError> {
    let Some(path) = path else {
        let stdout = std::io::stdout();
        let mut lock = stdout.lock();
        lock.write_all(contents.as_bytes())?;
        return Ok(lock.flush()?);
    };
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| CliError::Validation(format!("bad output path {}", path.display())))?;
    let tmp = dir.join(format!(
        ".{}.tmp{}",
        name.to_string_lossy(),
        std::process::id()
    ));
    let result = (|| {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    Ok(result?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new("demo");
        r.meta("lambda", 2.0);
        let mut t = Table::new(
            "levels",
            &[("index", ColumnKind::Scalar), ("z", ColumnKind::Complex)],
        );
        t.push(vec![1usize.into(), Complex64::new(0.1, -2.0).into()]);
        r.tables.push(t);
        r.note("done", true);
        r
    }

    #[test]
    fn csv_layout() {
        let csv = sample().to_csv().unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# command = demo");
        assert_eq!(lines[2], "# lambda = 2.0000000000000000e0");
        assert_eq!(lines[3], "index,z_re,z_im");
        assert_eq!(lines[4], "1,1.0000000000000001e-1,-2.0000000000000000e0");
        assert_eq!(lines[5], "# done = true");
    }

    #[test]
    fn json_layout() {
        let v: Value = serde_json::from_str(&sample().to_json()).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["tables"][0]["rows"][0][1], json!([0.1, -2.0]));
    }

    #[test]
    fn seventeen_digits() {
        let s = fmt_real(std::f64::consts::PI);
        assert_eq!(s, "3.1415926535897931e0");
        assert_eq!(s.parse::<f64>().unwrap(), std::f64::consts::PI);
    }
}

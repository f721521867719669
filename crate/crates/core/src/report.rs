//! Report tables and plot series, serialized as CSV or JSON lines.
//!
//! CSV output is a sequence of blocks separated by blank lines. Each block
//! starts with a `# <name>` title line followed by a header row whose column
//! names carry their units. Series blocks have exactly two columns.
//! JSON-lines output has one object per row, tagged with its table or series
//! name. Numbers are rounded only here, at serialization.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fatigue::round_half_up;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Cell {
    /// Fixed three decimals, rounded half up.
    Fixed(f64),
    /// Scientific notation with six significant decimals, for quantities
    /// spanning many orders of magnitude.
    Sci(f64),
    Int(i64),
    Text(String),
    Flag(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Fixed(v) => fixed3(*v),
            Cell::Sci(v) => format!("{v:.6e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Flag(b) => b.to_string(),
        }
    }

    fn json(&self) -> String {
        match self {
            Cell::Fixed(v) if v.is_finite() => fixed3(*v),
            Cell::Sci(v) if v.is_finite() => format!("{v:.6e}"),
            Cell::Fixed(_) | Cell::Sci(_) => "null".into(),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => serde_json::to_string(s).expect("string serializes"),
            Cell::Flag(b) => b.to_string(),
        }
    }
}

/// Formats with three decimals, rounding half up.
pub fn fixed3(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let r = round_half_up(v * 1000.0) / 1000.0;
    // Avoid printing "-0.000".
    let r = if r == 0.0 { 0.0 } else { r };
    format!("{r:.3}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Table {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

/// Two-column `(x, y)` plot data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub x: String,
    pub y: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Report {
    pub tables: Vec<Table>,
    pub series: Vec<Series>,
    /// Diagnostics for the error stream.
    pub warnings: Vec<String>,
}

impl Report {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn extend(&mut self, other: Report) {
        self.tables.extend(other.tables);
        self.series.extend(other.series);
        self.warnings.extend(other.warnings);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Jsonl,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "jsonl" | "json-lines" => Ok(Format::Jsonl),
            _ => Err(format!("unknown format `{s}`; expected csv or jsonl")),
        }
    }
}

/// Writes `report` to `out`. Output is byte-identical for identical reports.
pub fn emit_report<W: Write>(report: &Report, format: Format, out: W) -> Result<()> {
    match format {
        Format::Csv => emit_csv(report, out),
        Format::Jsonl => emit_jsonl(report, out),
    }
}

/// Serializes to a string.
pub fn render(report: &Report, format: Format) -> Result<String> {
    let mut buf = Vec::new();
    emit_report(report, format, &mut buf)?;
    Ok(String::from_utf8(buf).expect("report output is utf-8"))
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Io(e.to_string())
}

fn emit_csv<W: Write>(report: &Report, mut out: W) -> Result<()> {
    let mut first = true;
    let mut block = |out: &mut W, title: &str, header: Vec<String>, rows: Vec<Vec<String>>| -> Result<()> {
        if !first {
            writeln!(out).map_err(io_err)?;
        }
        first = false;
        writeln!(out, "# {title}").map_err(io_err)?;
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&header).map_err(io_err)?;
        for r in rows {
            w.write_record(&r).map_err(io_err)?;
        }
        let bytes = w.into_inner().map_err(io_err)?;
        out.write_all(&bytes).map_err(io_err)
    };
    for t in &report.tables {
        let rows = t.rows.iter().map(|r| r.iter().map(Cell::csv).collect()).collect();
        block(&mut out, &t.name, t.columns.clone(), rows)?;
    }
    for s in &report.series {
        let rows = s
            .points
            .iter()
            .map(|(x, y)| vec![fixed3(*x), fixed3(*y)])
            .collect();
        block(&mut out, &s.name, vec![s.x.clone(), s.y.clone()], rows)?;
    }
    out.flush().map_err(io_err)
}

fn emit_jsonl<W: Write>(report: &Report, mut out: W) -> Result<()> {
    let key = |s: &str| serde_json::to_string(s).expect("string serializes");
    for t in &report.tables {
        for r in &t.rows {
            let mut line = format!("{{\"table\":{}", key(&t.name));
            for (c, v) in t.columns.iter().zip(r) {
                line.push_str(&format!(",{}:{}", key(c), v.json()));
            }
            line.push('}');
            writeln!(out, "{line}").map_err(io_err)?;
        }
    }
    for s in &report.series {
        for (x, y) in &s.points {
            writeln!(
                out,
                "{{\"series\":{},{}:{},{}:{}}}",
                key(&s.name),
                key(&s.x),
                fixed3(*x),
                key(&s.y),
                fixed3(*y)
            )
            .map_err(io_err)?;
        }
    }
    out.flush().map_err(io_err)
}

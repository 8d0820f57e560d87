//! CSV rendering of traces and tables.
//!
//! Floats are written with 17 significant digits in scientific notation
//! (`1.5213797068045676e0`), which round-trips every `f64`. Missing values
//! are empty fields. Rows end in LF.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::iteration::IterationTrace;
use crate::scheme::SchemeKind;
use crate::space::Point;

pub const TRACE_HEADER: [&str; 5] = ["n", "scheme", "x", "err", "residual"];

pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn format_opt(v: Option<f64>) -> String {
    v.map(format_float).unwrap_or_default()
}

fn parse_float(field: &str, line: u64) -> Result<f64> {
    field
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("line {line}: bad number {field:?}")))
}

fn parse_opt(field: &str, line: u64) -> Result<Option<f64>> {
    if field.is_empty() {
        Ok(None)
    } else {
        parse_float(field, line).map(Some)
    }
}

/// One CSV row of a trace. For non-scalar points `x` holds the norm.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub n: usize,
    pub scheme: SchemeKind,
    pub x: f64,
    pub err: Option<f64>,
    pub residual: f64,
}

impl TraceRow {
    fn bitwise_eq(&self, other: &Self) -> bool {
        let opt = |v: Option<f64>| v.map(f64::to_bits);
        self.n == other.n
            && self.scheme == other.scheme
            && self.x.to_bits() == other.x.to_bits()
            && opt(self.err) == opt(other.err)
            && self.residual.to_bits() == other.residual.to_bits()
    }
}

pub fn trace_rows<P: Point>(trace: &IterationTrace<P>) -> Vec<TraceRow> {
    trace
        .records
        .iter()
        .map(|r| TraceRow {
            n: r.n,
            scheme: trace.scheme,
            x: match r.x.coords() {
                [v] => *v,
                _ => r.x.norm(),
            },
            err: r.err,
            residual: r.residual,
        })
        .collect()
}

/// Row-wise bit equality, treating equal NaN payloads as equal.
pub fn rows_identical(a: &[TraceRow], b: &[TraceRow]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.bitwise_eq(y))
}

pub(crate) fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

/// Writes a header and string rows with LF endings.
pub fn write_table<W: Write>(w: W, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut out = writer(w);
    out.write_record(header)?;
    for row in rows {
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_traces<'a, W, P, I>(w: W, traces: I) -> Result<()>
where
    W: Write,
    P: Point + 'a,
    I: IntoIterator<Item = &'a IterationTrace<P>>,
{
    let rows = traces.into_iter().flat_map(trace_rows).map(|r| {
        vec![
            r.n.to_string(),
            r.scheme.name().to_string(),
            format_float(r.x),
            format_opt(r.err),
            format_float(r.residual),
        ]
    });
    write_table(w, &TRACE_HEADER, rows)
}

pub fn render_traces<'a, P: Point + 'a>(traces: impl IntoIterator<Item = &'a IterationTrace<P>>) -> Result<String> {
    let mut buf = Vec::new();
    write_traces(&mut buf, traces)?;
    String::from_utf8(buf).map_err(|e| Error::InvalidArgument(e.to_string()))
}

pub fn read_traces<R: Read>(r: R) -> Result<Vec<TraceRow>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let header = rdr.headers()?.clone();
    if header.iter().ne(TRACE_HEADER) {
        return Err(Error::InvalidArgument(format!("unexpected trace header {header:?}")));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != TRACE_HEADER.len() {
            return Err(Error::InvalidArgument(format!("line {line}: expected 5 fields")));
        }
        rows.push(TraceRow {
            n: rec[0]
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("line {line}: bad index {:?}", &rec[0])))?,
            scheme: rec[1].parse()?,
            x: parse_float(&rec[2], line)?,
            err: parse_opt(&rec[3], line)?,
            residual: parse_float(&rec[4], line)?,
        });
    }
    Ok(rows)
}

/// Header and rows of a numeric table; text cells read as `None`.
pub type NumericTable = (Vec<String>, Vec<Vec<Option<f64>>>);

/// Parses any table written by [`write_table`] into its header and numeric
/// cells; non-numeric cells are rejected unless listed in `text_columns`.
pub fn read_numeric_table<R: Read>(r: R, text_columns: &[&str]) -> Result<NumericTable> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let mut row = Vec::with_capacity(rec.len());
        for (name, field) in header.iter().zip(rec.iter()) {
            if text_columns.contains(&name.as_str()) {
                row.push(None);
            } else {
                row.push(parse_opt(field, line)?);
            }
        }
        rows.push(row);
    }
    Ok((header, rows))
}

//! Grid evaluation and CSV/JSON emission.

use std::io::Write;

use rayon::prelude::*;
use serde_json::{Map, Value};
use thiserror::Error;

use crate::kernels::{kernel, Cell, Context};
use crate::spec::{Format, ScanSpec, SpecError};

/// Evaluated scan: input columns, then outputs, then `error`.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Number of rows whose evaluation failed.
    pub failures: usize,
}

#[derive(Debug, Error)]
pub enum ScanError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("cannot build worker pool: {0}")]
    Pool(String),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot encode output: {0}")]
    Encode(String),
}

/// Evaluates every grid point. Rows run concurrently on `threads` workers
/// (0 picks the machine default) and come back in grid order.
pub fn run_scan(spec: &ScanSpec, threads: usize) -> Result<Table, ScanError> {
    spec.validate()?;
    let k = kernel(spec.subcommand, &spec.options)
        .map_err(|(key, message)| SpecError::Field { field: format!("options.{key}"), message })?;

    // Grid columns are placed by name; unscanned parameters take defaults.
    let grid_index: Vec<Option<usize>> = k.params.iter().map(|p| spec.grid.get_index_of(p.name)).collect();
    let points = spec.rows();
    let seed = spec.seed.unwrap_or(0);

    let evaluate = |(row, point): (usize, &Vec<f64>)| -> Vec<Cell> {
        let values: Vec<f64> = k
            .params
            .iter()
            .zip(&grid_index)
            .map(|(p, g)| g.map_or_else(|| p.default.expect("validated"), |i| point[i]))
            .collect();
        let ctx = Context { tolerance: spec.tolerance, seed, row: row as u64 };
        let mut cells: Vec<Cell> = k
            .params
            .iter()
            .zip(&values)
            .map(|(p, &v)| if p.integer { Cell::Int(v as i64) } else { Cell::Float(v) })
            .collect();
        match k.eval(&values, &ctx) {
            Ok(out) => {
                cells.extend(out);
                cells.push(Cell::Empty);
            }
            Err(message) => {
                cells.extend(std::iter::repeat_n(Cell::Empty, k.outputs.len()));
                cells.push(Cell::Text(message));
            }
        }
        cells
    };

    let pool =
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| ScanError::Pool(e.to_string()))?;
    let rows: Vec<Vec<Cell>> = pool.install(|| points.par_iter().enumerate().map(evaluate).collect());

    let failures = rows.iter().filter(|r| !matches!(r.last(), Some(Cell::Empty))).count();
    let columns =
        k.params.iter().map(|p| p.name).chain(k.outputs.iter().copied()).chain(["error"]).map(String::from).collect();
    Ok(Table { columns, rows, failures })
}

/// Seventeen significant digits, enough to recover every `f64`.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

fn csv_cell(c: &Cell) -> String {
    match c {
        Cell::Float(x) => format_float(*x),
        Cell::Int(i) => i.to_string(),
        Cell::Bool(b) => b.to_string(),
        Cell::Text(s) => s.clone(),
        Cell::Empty => String::new(),
    }
}

fn json_cell(c: &Cell) -> Value {
    match c {
        Cell::Float(x) => {
            serde_json::Number::from_f64(*x).map_or_else(|| Value::String(format_float(*x)), Value::Number)
        }
        Cell::Int(i) => Value::from(*i),
        Cell::Bool(b) => Value::Bool(*b),
        Cell::Text(s) => Value::String(s.clone()),
        Cell::Empty => Value::Null,
    }
}

pub fn write_csv<W: Write>(table: &Table, out: W) -> Result<(), ScanError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let encode = |e: csv::Error| ScanError::Encode(e.to_string());
    w.write_record(&table.columns).map_err(encode)?;
    for row in &table.rows {
        w.write_record(row.iter().map(csv_cell)).map_err(encode)?;
    }
    w.flush()?;
    Ok(())
}

/// `{"spec": …, "rows": [{column: value, …}, …]}`.
pub fn write_json<W: Write>(spec: &ScanSpec, table: &Table, mut out: W) -> Result<(), ScanError> {
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            let m: Map<String, Value> = table.columns.iter().cloned().zip(row.iter().map(json_cell)).collect();
            Value::Object(m)
        })
        .collect();
    let mut doc = Map::new();
    doc.insert("spec".into(), serde_json::to_value(spec).map_err(|e| ScanError::Encode(e.to_string()))?);
    doc.insert("rows".into(), Value::Array(rows));
    serde_json::to_writer_pretty(&mut out, &Value::Object(doc)).map_err(|e| ScanError::Encode(e.to_string()))?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

pub fn write_table<W: Write>(spec: &ScanSpec, table: &Table, out: W) -> Result<(), ScanError> {
    match spec.output.format {
        Format::Csv => write_csv(table, out),
        Format::Json => write_json(spec, table, out),
    }
}

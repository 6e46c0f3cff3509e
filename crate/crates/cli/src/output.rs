use std::io::Write;

use serde_json::{json, Value};

use crate::config::Format;
use crate::run::Table;

/// 17 significant digits in scientific notation; round-trips exactly.
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(table: &Table, mut w: W) -> std::io::Result<()> {
    for (k, v) in &table.metadata {
        writeln!(w, "# {k} = {v}")?;
    }
    writeln!(w, "{}", table.columns().join(","))?;
    for row in &table.rows {
        let mut fields = vec![row.status.clone()];
        fields.extend(row.axes.iter().map(|&x| format_number(x)));
        fields.extend(
            row.values
                .iter()
                .map(|v| v.map(format_number).unwrap_or_default()),
        );
        writeln!(w, "{}", fields.join(","))?;
    }
    Ok(())
}

pub fn to_json(table: &Table) -> Value {
    let metadata: serde_json::Map<String, Value> = table
        .metadata
        .iter()
        .map(|(k, v)| (k.clone(), Value::String(v.clone())))
        .collect();
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|r| {
            let mut cells = vec![Value::String(r.status.clone())];
            cells.extend(r.axes.iter().map(|&x| json!(x)));
            cells.extend(r.values.iter().map(|v| match v {
                Some(x) if x.is_finite() => json!(x),
                _ => Value::Null,
            }));
            Value::Array(cells)
        })
        .collect();
    json!({ "metadata": metadata, "columns": table.columns(), "rows": rows })
}

pub fn write_table<W: Write>(table: &Table, format: Format, mut w: W) -> std::io::Result<()> {
    match format {
        Format::Csv => write_csv(table, w),
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, &to_json(table))?;
            writeln!(w)
        }
    }
}

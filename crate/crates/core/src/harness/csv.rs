//! CSV emission with a fixed numeric format: floats at 12 significant
//! digits, header always present, rows in grid order.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    U(u64),
    I(i64),
    F(f64),
    S(String),
}

pub fn format_field(f: &Field) -> String {
    match f {
        Field::U(v) => v.to_string(),
        Field::I(v) => v.to_string(),
        Field::F(v) => format!("{:.11e}", v),
        Field::S(v) => v.clone(),
    }
}

/// Render header + rows; every row must match the schema width.
pub fn csv_bytes(schema: &[&str], rows: &[Vec<Field>]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    out.extend_from_slice(schema.join(",").as_bytes());
    out.push(b'\n');
    for row in rows {
        if row.len() != schema.len() {
            return Err(Error::SchemaMismatch {
                got: row.len(),
                want: schema.len(),
            });
        }
        let line: Vec<String> = row.iter().map(format_field).collect();
        out.extend_from_slice(line.join(",").as_bytes());
        out.push(b'\n');
    }
    Ok(out)
}

pub fn emit_csv(path: &Path, schema: &[&str], rows: &[Vec<Field>]) -> Result<()> {
    let bytes = csv_bytes(schema, rows)?;
    let mut file = std::fs::File::create(path)?;
    file.write_all(&bytes)?;
    Ok(())
}

//! Plain-text formats.
//!
//! * point clouds: headerless CSV, one point per row;
//! * scalar fields: headerless CSV, `d` coordinate columns then the value;
//! * diagrams: JSON `{"orientation": .., "features": [{"dim", "birth", "death"}]}`
//!   with infinite deaths written as the strings `"inf"` / `"-inf"`.
//!
//! Floats are written with Rust's shortest round-trip formatting, so writing
//! is deterministic and reading recovers the exact value.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::cloud::PointCloud;
use crate::error::{Result, TdaError};
use crate::grid::ScalarField;

pub fn read_cloud<R: Read>(reader: R) -> Result<PointCloud> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut dim = None;
    let mut coords = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| TdaError::Format(format!("row {}: {e}", row + 1)))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let d = *dim.get_or_insert(record.len());
        if record.len() != d {
            return Err(TdaError::Format(format!(
                "row {} has {} columns, expected {d}",
                row + 1,
                record.len()
            )));
        }
        for field in record.iter() {
            let v: f64 = field
                .parse()
                .map_err(|_| TdaError::Format(format!("row {}: cannot parse {field:?}", row + 1)))?;
            coords.push(v);
        }
    }
    let dim = dim.ok_or(TdaError::EmptyCloud)?;
    PointCloud::from_flat(dim, coords)
}

pub fn read_cloud_file(path: impl AsRef<Path>) -> Result<PointCloud> {
    read_cloud(File::open(path)?)
}

pub fn write_cloud<W: Write>(cloud: &PointCloud, mut w: W) -> Result<()> {
    for p in cloud.points() {
        write_row(&mut w, p, None)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_cloud_file(cloud: &PointCloud, path: impl AsRef<Path>) -> Result<()> {
    write_cloud(cloud, BufWriter::new(File::create(path)?))
}

pub fn write_field<W: Write>(field: &ScalarField, mut w: W) -> Result<()> {
    let grid = field.grid();
    let mut site = vec![0.0; grid.dim()];
    for (i, &v) in field.values().iter().enumerate() {
        grid.site_into(i, &mut site);
        write_row(&mut w, &site, Some(v))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_field_file(field: &ScalarField, path: impl AsRef<Path>) -> Result<()> {
    write_field(field, BufWriter::new(File::create(path)?))
}

fn write_row<W: Write>(w: &mut W, coords: &[f64], value: Option<f64>) -> std::io::Result<()> {
    let mut first = true;
    for c in coords.iter().chain(value.iter()) {
        if !first {
            w.write_all(b",")?;
        }
        first = false;
        write!(w, "{c}")?;
    }
    w.write_all(b"\n")
}

/// Serde adapter for floats that may be infinite: finite values as JSON
/// numbers, infinities as `"inf"` and `"-inf"`.
pub mod extended_float {
    use serde::de::{self, Deserializer, Visitor};
    use serde::Serializer;
    use std::fmt;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else if *v < 0.0 {
            s.serialize_str("-inf")
        } else {
            Err(serde::ser::Error::custom("NaN is not representable"))
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = f64;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or \"inf\" / \"-inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
                Ok(v)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
                Ok(v as f64)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
                Ok(v as f64)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
                match v {
                    "inf" | "+inf" | "Infinity" => Ok(f64::INFINITY),
                    "-inf" | "-Infinity" => Ok(f64::NEG_INFINITY),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }
        d.deserialize_any(V)
    }
}

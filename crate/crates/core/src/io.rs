//! Field file format.
//!
//! Header line:
//!
//! ```text
//! HARTREE-FIELD v1; d=<d>; n=<n>; repr=<spectral|potential>[; enc=binary]
//! ```
//!
//! followed by the coefficients in lexicographic multi-index order, one
//! full-precision decimal per line (text), or as 64-bit little-endian
//! floating point in the same order (binary). Text values use the shortest
//! round-trip decimal representation.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use crate::domain::{Dimension, DomainSpec, SpectralField};
use crate::error::{Error, Result};

pub const FORMAT_VERSION: &str = "HARTREE-FIELD v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldRepr {
    Spectral,
    Potential,
}

impl FieldRepr {
    fn token(self) -> &'static str {
        match self {
            FieldRepr::Spectral => "spectral",
            FieldRepr::Potential => "potential",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Encoding {
    Text,
    Binary,
}

fn header(field: &SpectralField, repr: FieldRepr, enc: Encoding) -> String {
    let d = field.domain().dimension().as_usize();
    let n = field.domain().points_per_axis();
    let mut h = format!("{FORMAT_VERSION}; d={d}; n={n}; repr={}", repr.token());
    if enc == Encoding::Binary {
        h.push_str("; enc=binary");
    }
    h.push('\n');
    h
}

pub fn write_field(
    path: &Path,
    field: &SpectralField,
    repr: FieldRepr,
    enc: Encoding,
) -> Result<()> {
    let file = fs::File::create(path)?;
    let mut out = BufWriter::new(file);
    out.write_all(header(field, repr, enc).as_bytes())?;
    match enc {
        Encoding::Text => {
            for c in field.coeffs() {
                writeln!(out, "{c}")?;
            }
        }
        Encoding::Binary => {
            for c in field.coeffs() {
                out.write_all(&c.to_le_bytes())?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

/// Parsed header plus the reconstructed field.
pub struct LoadedField {
    pub field: SpectralField,
    pub repr: FieldRepr,
    pub encoding: Encoding,
}

pub fn read_field(path: &Path) -> Result<LoadedField> {
    let bytes = fs::read(path)?;
    let newline = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::FieldFormat("missing header line".into()))?;
    let header = std::str::from_utf8(&bytes[..newline])
        .map_err(|_| Error::FieldFormat("header is not utf-8".into()))?;
    let mut parts = header.split(';').map(str::trim);
    let magic = parts.next().unwrap_or("");
    if magic != FORMAT_VERSION {
        return Err(Error::FieldFormat(format!(
            "unsupported format '{magic}', expected '{FORMAT_VERSION}'"
        )));
    }
    let mut d = None;
    let mut n = None;
    let mut repr = None;
    let mut enc = Encoding::Text;
    for part in parts {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| Error::FieldFormat(format!("malformed header entry '{part}'")))?;
        match key {
            "d" => d = Some(value.parse::<usize>().map_err(bad_header)?),
            "n" => n = Some(value.parse::<usize>().map_err(bad_header)?),
            "repr" => {
                repr = Some(match value {
                    "spectral" => FieldRepr::Spectral,
                    "potential" => FieldRepr::Potential,
                    other => {
                        return Err(Error::FieldFormat(format!(
                            "unknown representation '{other}'"
                        )))
                    }
                })
            }
            "enc" => {
                enc = match value {
                    "binary" => Encoding::Binary,
                    "text" => Encoding::Text,
                    other => return Err(Error::FieldFormat(format!("unknown encoding '{other}'"))),
                }
            }
            other => return Err(Error::FieldFormat(format!("unknown header key '{other}'"))),
        }
    }
    let d = d.ok_or_else(|| Error::FieldFormat("header misses d".into()))?;
    let n = n.ok_or_else(|| Error::FieldFormat("header misses n".into()))?;
    let repr = repr.ok_or_else(|| Error::FieldFormat("header misses repr".into()))?;
    let dim = match d {
        1 => Dimension::One,
        2 => Dimension::Two,
        other => return Err(Error::FieldFormat(format!("unsupported dimension {other}"))),
    };
    let domain = DomainSpec::with_dimension(dim, n);
    let body = &bytes[newline + 1..];
    let coeffs = match enc {
        Encoding::Text => {
            let text = std::str::from_utf8(body)
                .map_err(|_| Error::FieldFormat("body is not utf-8".into()))?;
            let mut coeffs = Vec::with_capacity(domain.len());
            for (i, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() {
                    continue;
                }
                coeffs.push(line.parse::<f64>().map_err(|_| {
                    Error::FieldFormat(format!("line {}: bad number '{line}'", i + 2))
                })?);
            }
            coeffs
        }
        Encoding::Binary => {
            if body.len() % 8 != 0 {
                return Err(Error::FieldFormat(
                    "binary body is not a whole number of f64 values".into(),
                ));
            }
            body.chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                .collect()
        }
    };
    if coeffs.len() != domain.len() {
        return Err(Error::FieldFormat(format!(
            "expected {} coefficients, found {}",
            domain.len(),
            coeffs.len()
        )));
    }
    let field = SpectralField::from_coeffs(&domain, coeffs)?;
    Ok(LoadedField {
        field,
        repr,
        encoding: enc,
    })
}

fn bad_header(e: std::num::ParseIntError) -> Error {
    Error::FieldFormat(format!("bad header number: {e}"))
}

/// Write a simple numeric CSV (no quoting needed for these tables).
pub fn write_csv(path: &Path, header: &str, rows: &[Vec<f64>]) -> Result<()> {
    let file = fs::File::create(path)?;
    let mut out = BufWriter::new(file);
    writeln!(out, "{header}")?;
    for row in rows {
        let line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    out.flush()?;
    Ok(())
}

#[allow(unused)]
pub fn domain_of(loaded: &LoadedField) -> &Arc<DomainSpec> {
    loaded.field.domain()
}

//! NPY v1.0 interchange for rank-4 tensors, bit-exact in both directions.
//!
//! Layout: the magic bytes `\x93NUMPY`, version bytes (1, 0), a little-endian
//! u16 header length, a Python-dict header naming dtype, order, and shape,
//! then the raw little-endian payload. Only `<f4` and `<f8` C-order rank-4
//! arrays are accepted.

use std::fs;
use std::io::Write;
use std::path::Path;

use thiserror::Error;

use super::{Dtype, FeatureTensor, Shape};

const MAGIC: &[u8; 6] = b"\x93NUMPY";

#[derive(Debug, Error)]
pub enum NpyError {
    #[error("not an NPY file: bad magic bytes")]
    BadMagic,
    #[error("unsupported NPY version {major}.{minor}: only 1.0 is supported")]
    UnsupportedVersion { major: u8, minor: u8 },
    #[error("malformed header: {0}")]
    HeaderParse(String),
    #[error("unsupported dtype '{0}': expected little-endian '<f4' or '<f8'")]
    UnsupportedDtype(String),
    #[error("fortran-order payload is not supported")]
    FortranOrder,
    #[error("expected a rank-4 shape, got rank {0}")]
    BadRank(usize),
    #[error("shape has a zero-sized axis")]
    ZeroAxis,
    #[error("payload is {got} bytes, header implies {expected}")]
    PayloadSize { expected: usize, got: usize },
    #[error("non-finite payload value at element {0}")]
    NonFinite(usize),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn header_err(msg: impl Into<String>) -> NpyError {
    NpyError::HeaderParse(msg.into())
}

fn field_value<'h>(header: &'h str, key: &str) -> Result<&'h str, NpyError> {
    let pat = format!("'{key}'");
    let kpos = header
        .find(&pat)
        .ok_or_else(|| header_err(format!("missing key '{key}'")))?;
    let rest = &header[kpos + pat.len()..];
    let colon = rest
        .find(':')
        .ok_or_else(|| header_err(format!("missing ':' after '{key}'")))?;
    Ok(rest[colon + 1..].trim_start())
}

fn parse_str_field(header: &str, key: &str) -> Result<String, NpyError> {
    let v = field_value(header, key)?;
    let v = v
        .strip_prefix('\'')
        .ok_or_else(|| header_err(format!("'{key}' value is not a quoted string")))?;
    let end = v
        .find('\'')
        .ok_or_else(|| header_err(format!("unterminated string for '{key}'")))?;
    Ok(v[..end].to_string())
}

fn parse_bool_field(header: &str, key: &str) -> Result<bool, NpyError> {
    let v = field_value(header, key)?;
    if v.starts_with("True") {
        Ok(true)
    } else if v.starts_with("False") {
        Ok(false)
    } else {
        Err(header_err(format!("'{key}' is not True or False")))
    }
}

fn parse_shape_field(header: &str) -> Result<Vec<usize>, NpyError> {
    let v = field_value(header, "shape")?;
    let v = v
        .strip_prefix('(')
        .ok_or_else(|| header_err("shape is not a tuple"))?;
    let end = v
        .find(')')
        .ok_or_else(|| header_err("unterminated shape tuple"))?;
    let mut dims = Vec::new();
    for part in v[..end].split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let dim: usize = part
            .parse()
            .map_err(|_| header_err(format!("bad shape dimension '{part}'")))?;
        dims.push(dim);
    }
    Ok(dims)
}

/// Decodes a tensor from an in-memory NPY v1.0 image.
pub fn read_tensor_from(bytes: &[u8]) -> Result<FeatureTensor, NpyError> {
    if bytes.len() < MAGIC.len() || &bytes[..MAGIC.len()] != MAGIC {
        return Err(NpyError::BadMagic);
    }
    if bytes.len() < 8 {
        return Err(header_err("file ends before version bytes"));
    }
    let (major, minor) = (bytes[6], bytes[7]);
    if (major, minor) != (1, 0) {
        return Err(NpyError::UnsupportedVersion { major, minor });
    }
    if bytes.len() < 10 {
        return Err(header_err("file ends before header length"));
    }
    let hlen = u16::from_le_bytes([bytes[8], bytes[9]]) as usize;
    let payload_start = 10 + hlen;
    if bytes.len() < payload_start {
        return Err(header_err("header extends past end of file"));
    }
    let header = std::str::from_utf8(&bytes[10..payload_start])
        .map_err(|_| header_err("header is not valid UTF-8"))?;

    let descr = parse_str_field(header, "descr")?;
    let fortran = parse_bool_field(header, "fortran_order")?;
    let dims = parse_shape_field(header)?;

    let dtype = match descr.as_str() {
        "<f4" => Dtype::F32,
        "<f8" => Dtype::F64,
        _ => return Err(NpyError::UnsupportedDtype(descr)),
    };
    if fortran {
        return Err(NpyError::FortranOrder);
    }
    if dims.len() != 4 {
        return Err(NpyError::BadRank(dims.len()));
    }
    if dims.contains(&0) {
        return Err(NpyError::ZeroAxis);
    }
    let count = dims
        .iter()
        .try_fold(1usize, |acc, d| acc.checked_mul(*d))
        .ok_or_else(|| header_err("shape overflows the address space"))?;
    let expected = count
        .checked_mul(dtype.size())
        .ok_or_else(|| header_err("payload size overflows the address space"))?;

    let payload = &bytes[payload_start..];
    if payload.len() != expected {
        return Err(NpyError::PayloadSize {
            expected,
            got: payload.len(),
        });
    }

    let mut data = Vec::with_capacity(count);
    match dtype {
        Dtype::F32 => {
            for chunk in payload.chunks_exact(4) {
                data.push(f32::from_le_bytes(chunk.try_into().unwrap()) as f64);
            }
        }
        Dtype::F64 => {
            for chunk in payload.chunks_exact(8) {
                data.push(f64::from_le_bytes(chunk.try_into().unwrap()));
            }
        }
    }
    if let Some(bad) = data.iter().position(|v| !v.is_finite()) {
        return Err(NpyError::NonFinite(bad));
    }

    let shape = Shape::new(dims[0], dims[1], dims[2], dims[3]);
    Ok(FeatureTensor::from_validated(data, shape, dtype))
}

/// Reads a rank-4 tensor from an NPY v1.0 file.
pub fn read_tensor(path: impl AsRef<Path>) -> Result<FeatureTensor, NpyError> {
    let bytes = fs::read(path)?;
    read_tensor_from(&bytes)
}

/// Encodes a tensor as an NPY v1.0 image.
pub fn write_tensor_to(w: &mut impl Write, t: &FeatureTensor) -> Result<(), NpyError> {
    let s = t.shape();
    let dict = format!(
        "{{'descr': '{}', 'fortran_order': False, 'shape': ({}, {}, {}, {}), }}",
        t.dtype().descr(),
        s.batch,
        s.channels,
        s.height,
        s.width
    );
    let mut header = dict.into_bytes();
    // Pad so the payload starts on a 64-byte boundary, as array libraries do.
    let base = MAGIC.len() + 2 + 2 + header.len() + 1;
    let pad = (64 - base % 64) % 64;
    header.extend(std::iter::repeat(b' ').take(pad));
    header.push(b'\n');

    w.write_all(MAGIC)?;
    w.write_all(&[1, 0])?;
    w.write_all(&(header.len() as u16).to_le_bytes())?;
    w.write_all(&header)?;

    match t.dtype() {
        Dtype::F32 => {
            let mut buf = Vec::with_capacity(t.data().len() * 4);
            for v in t.data() {
                buf.extend_from_slice(&(*v as f32).to_le_bytes());
            }
            w.write_all(&buf)?;
        }
        Dtype::F64 => {
            let mut buf = Vec::with_capacity(t.data().len() * 8);
            for v in t.data() {
                buf.extend_from_slice(&v.to_le_bytes());
            }
            w.write_all(&buf)?;
        }
    }
    Ok(())
}

/// Writes a tensor to an NPY v1.0 file.
pub fn write_tensor(path: impl AsRef<Path>, t: &FeatureTensor) -> Result<(), NpyError> {
    let mut buf = Vec::new();
    write_tensor_to(&mut buf, t)?;
    fs::write(path, buf)?;
    Ok(())
}

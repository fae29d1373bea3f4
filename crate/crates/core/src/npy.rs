//! Minimal reader and writer for 2-D float arrays in the numpy `.npy` format.
//!
//! Only C-order little-endian `f4`/`f8` arrays are accepted; `f4` values are
//! widened to `f64`. Files are written as version 1.0 with an `<f8` payload.

use std::io::{self, BufRead, Write};

use crate::error::{Error, Result};

const MAGIC: &[u8; 6] = b"\x93NUMPY";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dtype {
    F4,
    F8,
}

#[derive(Debug)]
struct Header {
    dtype: Dtype,
    fortran_order: bool,
    shape: Vec<usize>,
}

fn malformed(msg: impl Into<String>) -> Error {
    Error::MalformedFile(msg.into())
}

fn read_exact<R: BufRead>(reader: &mut R, buf: &mut [u8]) -> Result<()> {
    reader
        .read_exact(buf)
        .map_err(|e| malformed(format!("truncated npy file: {e}")))
}

/// Reads a 2-D array and returns `(row-major data, (rows, cols))`.
pub fn read_f64_matrix<R: BufRead>(reader: &mut R) -> Result<(Vec<f64>, (usize, usize))> {
    let header = read_header(reader)?;
    if header.fortran_order {
        return Err(malformed("fortran-order arrays are not supported"));
    }
    let (rows, cols) = match header.shape[..] {
        [r, c] => (r, c),
        _ => {
            return Err(malformed(format!(
                "expected a 2-D array, got shape {:?}",
                header.shape
            )))
        }
    };
    let count = rows
        .checked_mul(cols)
        .ok_or_else(|| malformed("shape overflows"))?;
    let width = match header.dtype {
        Dtype::F4 => 4,
        Dtype::F8 => 8,
    };
    let mut bytes = vec![0u8; count * width];
    read_exact(reader, &mut bytes)?;
    let data = match header.dtype {
        Dtype::F4 => bytes
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
            .collect(),
        Dtype::F8 => bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect(),
    };
    Ok((data, (rows, cols)))
}

pub fn write_f64_matrix<W: Write>(
    writer: &mut W,
    data: &[f64],
    (rows, cols): (usize, usize),
) -> io::Result<()> {
    assert_eq!(data.len(), rows * cols, "data does not match shape");
    let mut dict = format!("{{'descr': '<f8', 'fortran_order': False, 'shape': ({rows}, {cols}), }}");
    // magic(6) + version(2) + length(2) + dict + '\n' must be a multiple of 64
    let total = 10 + dict.len() + 1;
    let pad = (64 - total % 64) % 64;
    dict.extend(std::iter::repeat_n(' ', pad));
    dict.push('\n');
    writer.write_all(MAGIC)?;
    writer.write_all(&[1, 0])?;
    writer.write_all(&(dict.len() as u16).to_le_bytes())?;
    writer.write_all(dict.as_bytes())?;
    for v in data {
        writer.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

fn read_header<R: BufRead>(reader: &mut R) -> Result<Header> {
    let mut magic = [0u8; 6];
    read_exact(reader, &mut magic)?;
    if &magic != MAGIC {
        return Err(malformed("missing npy magic string"));
    }
    let mut version = [0u8; 2];
    read_exact(reader, &mut version)?;
    let len = match version[0] {
        1 => {
            let mut b = [0u8; 2];
            read_exact(reader, &mut b)?;
            u16::from_le_bytes(b) as usize
        }
        2 | 3 => {
            let mut b = [0u8; 4];
            read_exact(reader, &mut b)?;
            u32::from_le_bytes(b) as usize
        }
        v => return Err(malformed(format!("unsupported npy version {v}.{}", version[1]))),
    };
    let mut dict = vec![0u8; len];
    read_exact(reader, &mut dict)?;
    let dict = std::str::from_utf8(&dict).map_err(|_| malformed("header is not text"))?;
    parse_dict(dict)
}

/// Parses the Python dict literal in the header, e.g.
/// `{'descr': '<f8', 'fortran_order': False, 'shape': (3, 2), }`.
fn parse_dict(text: &str) -> Result<Header> {
    let body = text
        .trim()
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .ok_or_else(|| malformed("header is not a dict"))?;

    let mut descr = None;
    let mut fortran = None;
    let mut shape = None;
    let mut rest = body.trim_start();
    while !rest.is_empty() {
        let (key, after) = parse_quoted(rest)?;
        let after = after
            .trim_start()
            .strip_prefix(':')
            .ok_or_else(|| malformed("expected ':' in header"))?
            .trim_start();
        let after = match key {
            "descr" => {
                let (v, a) = parse_quoted(after)?;
                descr = Some(v.to_string());
                a
            }
            "fortran_order" => {
                if let Some(a) = after.strip_prefix("True") {
                    fortran = Some(true);
                    a
                } else if let Some(a) = after.strip_prefix("False") {
                    fortran = Some(false);
                    a
                } else {
                    return Err(malformed("fortran_order must be True or False"));
                }
            }
            "shape" => {
                let after = after
                    .strip_prefix('(')
                    .ok_or_else(|| malformed("shape must be a tuple"))?;
                let close = after
                    .find(')')
                    .ok_or_else(|| malformed("unterminated shape tuple"))?;
                let dims = after[..close]
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| {
                        s.trim_end_matches('L')
                            .parse::<usize>()
                            .map_err(|_| malformed(format!("bad shape entry `{s}`")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                shape = Some(dims);
                &after[close + 1..]
            }
            other => return Err(malformed(format!("unexpected header key `{other}`"))),
        };
        let after = after.trim_start();
        rest = after.strip_prefix(',').unwrap_or(after).trim_start();
    }

    let descr = descr.ok_or_else(|| malformed("header lacks descr"))?;
    let dtype = match descr.as_str() {
        "<f8" => Dtype::F8,
        "<f4" => Dtype::F4,
        other => return Err(malformed(format!("unsupported dtype `{other}`"))),
    };
    Ok(Header {
        dtype,
        fortran_order: fortran.ok_or_else(|| malformed("header lacks fortran_order"))?,
        shape: shape.ok_or_else(|| malformed("header lacks shape"))?,
    })
}

fn parse_quoted(s: &str) -> Result<(&str, &str)> {
    let quote = s
        .chars()
        .next()
        .filter(|c| *c == '\'' || *c == '"')
        .ok_or_else(|| malformed("expected a quoted string in header"))?;
    let inner = &s[1..];
    let end = inner
        .find(quote)
        .ok_or_else(|| malformed("unterminated string in header"))?;
    Ok((&inner[..end], &inner[end + 1..]))
}

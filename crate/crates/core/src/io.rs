//! Text formats: `F2T1` tensors, `F2D1` decompositions and `F2P1` polynomials.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::f2linalg::BitVec;
use crate::poly::Polynomial;
use crate::tensors::{num_entries, DenseTensor, RankDecomposition, RankOneTerm, MAX_TENSOR_BITS};

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

/// Parses the `key=value` tokens of a header in the given order.
fn header_fields(tokens: &[&str], keys: &[&str]) -> Result<Vec<usize>> {
    if tokens.len() != keys.len() {
        return Err(parse_err(format!("expected header fields {keys:?}, got {tokens:?}")));
    }
    tokens
        .iter()
        .zip(keys)
        .map(|(tok, key)| {
            let v = tok
                .strip_prefix(key)
                .and_then(|r| r.strip_prefix('='))
                .ok_or_else(|| parse_err(format!("expected {key}=<n>, got {tok:?}")))?;
            v.parse::<usize>()
                .map_err(|_| parse_err(format!("bad value in {tok:?}")))
        })
        .collect()
}

fn content_lines(text: &str) -> Vec<&str> {
    let mut lines: Vec<&str> = text.lines().map(str::trim).collect();
    while lines.last() == Some(&"") {
        lines.pop();
    }
    lines
}

pub fn format_tensor(t: &DenseTensor) -> String {
    let nbytes = t.len().div_ceil(8);
    let mut hex = String::with_capacity(2 * nbytes);
    for b in 0..nbytes {
        let byte = t.bits().read_bits(8 * b, 8.min(t.len() - 8 * b));
        write!(hex, "{byte:02x}").expect("writing to a String");
    }
    format!("F2T1\nd={} k={}\n{hex}\n", t.d(), t.k())
}

pub fn parse_tensor(text: &str) -> Result<DenseTensor> {
    let lines = content_lines(text);
    if lines.first() != Some(&"F2T1") {
        return Err(parse_err("missing F2T1 magic line"));
    }
    let head: Vec<&str> = lines
        .get(1)
        .ok_or_else(|| parse_err("missing shape line"))?
        .split_whitespace()
        .collect();
    let f = header_fields(&head, &["d", "k"])?;
    let (d, k) = (f[0], f[1]);
    let n = match num_entries(d, k) {
        Some(n) if n <= MAX_TENSOR_BITS => n as usize,
        _ => return Err(parse_err(format!("shape d={d} k={k} overflows the tensor size limit"))),
    };
    if lines.len() > 3 {
        return Err(parse_err("unexpected content after the payload line"));
    }
    let hex = lines.get(2).copied().unwrap_or("");
    let nbytes = n.div_ceil(8);
    if hex.len() != 2 * nbytes {
        return Err(parse_err(format!(
            "payload has {} hex digits, expected {}",
            hex.len(),
            2 * nbytes
        )));
    }
    let mut bits = BitVec::zeros(n);
    for b in 0..nbytes {
        let byte = u8::from_str_radix(&hex[2 * b..2 * b + 2], 16)
            .map_err(|_| parse_err(format!("bad hex byte {:?}", &hex[2 * b..2 * b + 2])))?;
        let count = 8.min(n - 8 * b);
        if count < 8 && byte >> count != 0 {
            return Err(parse_err("nonzero padding bits after the last entry"));
        }
        bits.xor_bits(8 * b, count, u64::from(byte));
    }
    DenseTensor::from_bits(d, k, bits)
}

pub fn format_decomp(dec: &RankDecomposition) -> String {
    let mut out = format!("F2D1 d={} k={} t={}\n", dec.d(), dec.k(), dec.len());
    for term in dec.terms() {
        let line: Vec<String> = term.vectors().iter().map(BitVec::to_binary_string).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_decomp(text: &str) -> Result<RankDecomposition> {
    let lines = content_lines(text);
    let head: Vec<&str> = lines
        .first()
        .ok_or_else(|| parse_err("empty input"))?
        .split_whitespace()
        .collect();
    if head.first() != Some(&"F2D1") {
        return Err(parse_err("missing F2D1 magic"));
    }
    let f = header_fields(&head[1..], &["d", "k", "t"])?;
    let (d, k, t) = (f[0], f[1], f[2]);
    if lines.len() != t + 1 {
        return Err(parse_err(format!("expected {t} term lines, found {}", lines.len() - 1)));
    }
    let mut terms = Vec::with_capacity(t);
    for (i, line) in lines[1..].iter().enumerate() {
        let vs: Vec<&str> = line.split_whitespace().collect();
        if vs.len() != d {
            return Err(parse_err(format!(
                "term {} has {} vectors, expected {d}",
                i + 1,
                vs.len()
            )));
        }
        let vectors = vs
            .iter()
            .map(|s| {
                if s.len() != k {
                    return Err(parse_err(format!(
                        "vector {s:?} in term {} is not of length {k}",
                        i + 1
                    )));
                }
                BitVec::parse_binary(s)
            })
            .collect::<Result<Vec<_>>>()?;
        terms.push(RankOneTerm::new(vectors)?);
    }
    RankDecomposition::new(d, k, terms)
}

pub fn format_poly(p: &Polynomial) -> String {
    format!("{p}\n")
}

pub fn parse_poly(text: &str) -> Result<Polynomial> {
    let lines = content_lines(text);
    let head: Vec<&str> = lines
        .first()
        .ok_or_else(|| parse_err("empty input"))?
        .split_whitespace()
        .collect();
    if head.first() != Some(&"F2P1") {
        return Err(parse_err("missing F2P1 magic"));
    }
    let n = header_fields(&head[1..], &["n"])?[0];
    if n > 64 {
        return Err(parse_err(format!("n={n} exceeds 64 variables")));
    }
    let mut p = Polynomial::zero(n)?;
    for line in &lines[1..] {
        if line.is_empty() {
            continue;
        }
        let mask = if *line == "#" {
            0
        } else {
            let mut mask = 0u64;
            for tok in line.split_whitespace() {
                let v: usize = tok
                    .parse()
                    .map_err(|_| parse_err(format!("bad variable index {tok:?}")))?;
                if v == 0 || v > n {
                    return Err(parse_err(format!("variable {v} outside 1..={n}")));
                }
                // x_v^2 = x_v
                mask |= 1u64 << (v - 1);
            }
            mask
        };
        p.add_monomial(mask)?;
    }
    Ok(p)
}

pub fn read_tensor(path: impl AsRef<Path>) -> Result<DenseTensor> {
    parse_tensor(&fs::read_to_string(path)?)
}

pub fn write_tensor(path: impl AsRef<Path>, t: &DenseTensor) -> Result<()> {
    Ok(fs::write(path, format_tensor(t))?)
}

pub fn read_decomp(path: impl AsRef<Path>) -> Result<RankDecomposition> {
    parse_decomp(&fs::read_to_string(path)?)
}

pub fn write_decomp(path: impl AsRef<Path>, dec: &RankDecomposition) -> Result<()> {
    Ok(fs::write(path, format_decomp(dec))?)
}

pub fn read_poly(path: impl AsRef<Path>) -> Result<Polynomial> {
    parse_poly(&fs::read_to_string(path)?)
}

pub fn write_poly(path: impl AsRef<Path>, p: &Polynomial) -> Result<()> {
    Ok(fs::write(path, format_poly(p))?)
}

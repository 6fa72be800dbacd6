//! Binary and JSON serialization of signatures.
//!
//! Binary layout: the magic `BMHS`, a version byte, the length of the header
//! as `u32` little-endian, the header as JSON, then `m` fixed-width
//! little-endian components. Real components take 8 bytes (the `f64` bit
//! pattern), ICWS components 16 bytes (element, then level; an empty
//! component is element 0 with level `i64::MIN`) and b-bit components
//! `ceil(b / 8)` bytes.
//!
//! The JSON form is `{"header": ..., "components": [...]}` with `null` for
//! infinite real components and empty ICWS components, and `[element, level]`
//! pairs for ICWS.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

use super::{Algorithm, BbitSignature, IcwsSample, IcwsSignature, RealSignature, Signature, SignatureHeader};

pub const MAGIC: &[u8; 4] = b"BMHS";
pub const VERSION: u8 = 1;

const EMPTY_LEVEL: i64 = i64::MIN;

fn decode_err(message: impl Into<String>) -> Error {
    Error::Decode(message.into())
}

fn component_width(header: &SignatureHeader) -> usize {
    match (header.b, header.algorithm) {
        (Some(b), _) => b.div_ceil(8) as usize,
        (None, Algorithm::Icws) => 16,
        (None, _) => 8,
    }
}

pub fn encode(sig: &Signature) -> Vec<u8> {
    let header = sig.header();
    let header_json = serde_json::to_vec(header).expect("header serializes");
    let width = component_width(header);
    let mut out = Vec::with_capacity(9 + header_json.len() + width * header.m);
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.extend_from_slice(&(header_json.len() as u32).to_le_bytes());
    out.extend_from_slice(&header_json);
    match sig {
        Signature::Real(s) => {
            for c in &s.components {
                out.extend_from_slice(&c.to_bits().to_le_bytes());
            }
        }
        Signature::Icws(s) => {
            for c in &s.components {
                let (element, level) = c.map_or((0, EMPTY_LEVEL), |c| (c.element, c.level));
                out.extend_from_slice(&element.to_le_bytes());
                out.extend_from_slice(&level.to_le_bytes());
            }
        }
        Signature::Bbit(s) => {
            for c in &s.components {
                out.extend_from_slice(&c.to_le_bytes()[..width]);
            }
        }
    }
    out
}

fn check_header(header: &SignatureHeader) -> Result<()> {
    if header.m == 0 {
        return Err(decode_err("signature size must be positive"));
    }
    if let Some(b) = header.b {
        if !(1..=64).contains(&b) {
            return Err(decode_err(format!("bit count {b} not in [1, 64]")));
        }
    }
    if header.algorithm.uses_grid() != header.grid.is_some() {
        return Err(decode_err("grid descriptor presence does not match the algorithm"));
    }
    crate::rng::RngConfig::from_tag(&header.config_tag).map_err(|e| decode_err(e.to_string()))?;
    Ok(())
}

fn check_real(c: f64) -> Result<f64> {
    if c > 0.0 {
        Ok(c)
    } else {
        Err(decode_err(format!("real component {c} must be positive or +inf")))
    }
}

fn check_bbit(c: u64, b: u32) -> Result<u64> {
    if b < 64 && c >> b != 0 {
        return Err(decode_err(format!("component {c} exceeds {b} bits")));
    }
    Ok(c)
}

fn build(header: SignatureHeader, reals: Vec<f64>, icws: Vec<Option<IcwsSample>>, bbits: Vec<u64>) -> Signature {
    match (header.b, header.algorithm) {
        (Some(b), _) => BbitSignature { header, b, components: bbits }.into(),
        (None, Algorithm::Icws) => IcwsSignature { header, components: icws }.into(),
        (None, _) => RealSignature { header, components: reals }.into(),
    }
}

pub fn decode(bytes: &[u8]) -> Result<Signature> {
    let rest = bytes.strip_prefix(MAGIC).ok_or_else(|| decode_err("missing magic"))?;
    let (&version, rest) = rest.split_first().ok_or_else(|| decode_err("truncated before version"))?;
    if version != VERSION {
        return Err(decode_err(format!("unsupported version {version}")));
    }
    if rest.len() < 4 {
        return Err(decode_err("truncated header length"));
    }
    let (len, rest) = rest.split_at(4);
    let len = u32::from_le_bytes(len.try_into().unwrap()) as usize;
    if rest.len() < len {
        return Err(decode_err("truncated header"));
    }
    let (header_bytes, body) = rest.split_at(len);
    let header: SignatureHeader =
        serde_json::from_slice(header_bytes).map_err(|e| decode_err(format!("bad header: {e}")))?;
    check_header(&header)?;
    let width = component_width(&header);
    let expected = header.m.checked_mul(width).ok_or_else(|| decode_err("signature size overflows"))?;
    if body.len() != expected {
        return Err(decode_err(format!("expected {expected} component bytes, found {}", body.len())));
    }
    let chunks = body.chunks_exact(width);
    let (mut reals, mut icws, mut bbits) = (Vec::new(), Vec::new(), Vec::new());
    match (header.b, header.algorithm) {
        (Some(b), _) => {
            for chunk in chunks {
                let mut buf = [0u8; 8];
                buf[..width].copy_from_slice(chunk);
                bbits.push(check_bbit(u64::from_le_bytes(buf), b)?);
            }
        }
        (None, Algorithm::Icws) => {
            for chunk in chunks {
                let element = u64::from_le_bytes(chunk[..8].try_into().unwrap());
                let level = i64::from_le_bytes(chunk[8..].try_into().unwrap());
                icws.push(match (element, level) {
                    (0, EMPTY_LEVEL) => None,
                    _ => Some(IcwsSample { element, level }),
                });
            }
        }
        (None, _) => {
            for chunk in chunks {
                reals.push(check_real(f64::from_bits(u64::from_le_bytes(chunk.try_into().unwrap())))?);
            }
        }
    }
    Ok(build(header, reals, icws, bbits))
}

#[derive(Serialize, Deserialize)]
struct JsonSignature {
    header: SignatureHeader,
    components: Vec<Value>,
}

pub fn to_json(sig: &Signature) -> String {
    let components = match sig {
        Signature::Real(s) => s
            .components
            .iter()
            .map(|c| if c.is_finite() { Value::from(*c) } else { Value::Null })
            .collect(),
        Signature::Icws(s) => s
            .components
            .iter()
            .map(|c| c.map_or(Value::Null, |c| Value::from(vec![Value::from(c.element), Value::from(c.level)])))
            .collect(),
        Signature::Bbit(s) => s.components.iter().map(|c| Value::from(*c)).collect(),
    };
    serde_json::to_string(&JsonSignature { header: sig.header().clone(), components }).expect("signature serializes")
}

pub fn from_json(text: &str) -> Result<Signature> {
    let parsed: JsonSignature = serde_json::from_str(text).map_err(|e| decode_err(e.to_string()))?;
    let header = parsed.header;
    check_header(&header)?;
    if parsed.components.len() != header.m {
        return Err(decode_err(format!("expected {} components, found {}", header.m, parsed.components.len())));
    }
    let (mut reals, mut icws, mut bbits) = (Vec::new(), Vec::new(), Vec::new());
    for value in parsed.components {
        match (header.b, header.algorithm) {
            (Some(b), _) => {
                let c = value.as_u64().ok_or_else(|| decode_err("b-bit component must be an integer"))?;
                bbits.push(check_bbit(c, b)?);
            }
            (None, Algorithm::Icws) => icws.push(match value {
                Value::Null => None,
                Value::Array(pair) => match pair.as_slice() {
                    [element, level] => Some(IcwsSample {
                        element: element.as_u64().ok_or_else(|| decode_err("bad ICWS element"))?,
                        level: level.as_i64().ok_or_else(|| decode_err("bad ICWS level"))?,
                    }),
                    _ => return Err(decode_err("ICWS component must be [element, level]")),
                },
                _ => return Err(decode_err("ICWS component must be [element, level] or null")),
            }),
            (None, _) => reals.push(match value {
                Value::Null => f64::INFINITY,
                other => check_real(other.as_f64().ok_or_else(|| decode_err("real component must be a number"))?)?,
            }),
        }
    }
    Ok(build(header, reals, icws, bbits))
}

/// Decodes either representation, recognizing the binary form by its magic.
pub fn decode_any(bytes: &[u8]) -> Result<Signature> {
    if bytes.starts_with(MAGIC) {
        decode(bytes)
    } else {
        from_json(std::str::from_utf8(bytes).map_err(|_| decode_err("neither binary nor UTF-8 JSON"))?)
    }
}

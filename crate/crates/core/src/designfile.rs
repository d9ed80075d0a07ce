//! Text format for set systems.
//!
//! ```text
//! 8 5          header: n, optional block size k
//! 11111000     one block per line, bitstring (coordinate 1 leftmost) ...
//! F8           ... or ceil(n/4) hex digits, most significant bit = coordinate 1
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. A file uses one body
//! format throughout; hex is emitted uppercase and parsed case-insensitively.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::setsys::{bitstring, full_mask, Mask, SetSystem, MAX_N};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Bitstring,
    Hex,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bitstring" | "bits" | "bin" => Ok(Format::Bitstring),
            "hex" => Ok(Format::Hex),
            _ => Err(Error::Parameter(format!("unknown format {s:?} (bitstring|hex)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DesignFile {
    pub k: Option<usize>,
    pub format: Format,
    pub system: SetSystem,
}

pub fn hex_digits(n: usize) -> usize {
    n.div_ceil(4)
}

/// Reverses the low `n` bits: mask bit `i` is hex bit `n - 1 - i`.
fn flip(n: usize, v: u32) -> u32 {
    if n == 0 {
        0
    } else {
        v.reverse_bits() >> (32 - n)
    }
}

pub fn to_hex(n: usize, mask: Mask) -> String {
    format!("{:0w$X}", flip(n, mask), w = hex_digits(n))
}

pub fn from_hex(n: usize, s: &str) -> std::result::Result<Mask, String> {
    if s.len() != hex_digits(n) {
        return Err(format!("expected {} hex digits, got {}", hex_digits(n), s.len()));
    }
    let v = u32::from_str_radix(s, 16).map_err(|_| format!("bad hex digit in {s:?}"))?;
    if v > full_mask(n) {
        return Err(format!("value {s} does not fit in {n} bits"));
    }
    Ok(flip(n, v))
}

pub fn parse_design(text: &str) -> Result<DesignFile> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let err = |line: usize, msg: String| Error::Parse { line, msg };
    let (hline, header) = lines.next().ok_or_else(|| err(1, "missing header".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.is_empty() || fields.len() > 2 {
        return Err(err(hline, "header must be `n` or `n k`".into()));
    }
    let n: usize = fields[0]
        .parse()
        .map_err(|_| err(hline, format!("bad n {:?}", fields[0])))?;
    if n == 0 || n > MAX_N {
        return Err(err(hline, format!("n must be in 1..={MAX_N}")));
    }
    let k = match fields.get(1) {
        Some(s) => {
            let k: usize = s.parse().map_err(|_| err(hline, format!("bad k {s:?}")))?;
            if k > n {
                return Err(err(hline, "k exceeds n".into()));
            }
            Some(k)
        }
        None => None,
    };

    let mut format = None;
    let mut blocks = Vec::new();
    for (ln, body) in lines {
        let f = if body.len() == n && body.bytes().all(|b| b == b'0' || b == b'1') {
            Format::Bitstring
        } else {
            Format::Hex
        };
        let f = *format.get_or_insert(f);
        let mask = match f {
            Format::Bitstring => crate::setsys::parse_bitstring(n, body),
            Format::Hex => from_hex(n, body),
        }
        .map_err(|m| err(ln, m))?;
        if blocks.iter().any(|&(b, _)| b == mask) {
            return Err(err(ln, format!("duplicate block {body}")));
        }
        if let Some(k) = k {
            if mask.count_ones() as usize != k {
                return Err(err(ln, format!("block {body} does not have size {k}")));
            }
        }
        blocks.push((mask, ln));
    }
    let system = SetSystem::new(n, blocks.into_iter().map(|(b, _)| b))?;
    Ok(DesignFile {
        k,
        format: format.unwrap_or(Format::Bitstring),
        system,
    })
}

pub fn emit_design(d: &SetSystem, k: Option<usize>, format: Format) -> String {
    let n = d.n();
    let mut s = match k {
        Some(k) => format!("{n} {k}\n"),
        None => format!("{n}\n"),
    };
    for &b in d.blocks() {
        let line = match format {
            Format::Bitstring => bitstring(n, b),
            Format::Hex => to_hex(n, b),
        };
        writeln!(s, "{line}").unwrap();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hex_convention() {
        let d = parse_design("8\nFF\n01\n").unwrap();
        assert_eq!(d.format, Format::Hex);
        assert!(d.system.contains(0xFF));
        assert_eq!(crate::setsys::bitstring(8, d.system.blocks()[0]), "00000001");
        assert_eq!(from_hex(8, "f8").unwrap(), from_hex(8, "F8").unwrap());
        assert_eq!(to_hex(8, from_hex(8, "f8").unwrap()), "F8");
        assert_eq!(to_hex(5, 0b00001), "10");
    }

    #[test]
    fn parse_errors_have_lines() {
        let e = parse_design("4\n0011\n\n0011\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 4, .. }), "{e:?}");
        let e = parse_design("4\n0011\n3\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }));
        let e = parse_design("5\n20\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        let e = parse_design("4 2\n0111\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        assert!(parse_design("").is_err());
        assert!(parse_design("x\n").is_err());
    }

    #[test]
    fn round_trip() {
        let d = SetSystem::from_bitstrings(6, &["111000", "000111", "101010"]).unwrap();
        for f in [Format::Bitstring, Format::Hex] {
            let text = emit_design(&d, Some(3), f);
            let back = parse_design(&text).unwrap();
            assert_eq!(back.system, d);
            assert_eq!(back.k, Some(3));
            assert_eq!(emit_design(&back.system, back.k, f), text);
        }
    }
}

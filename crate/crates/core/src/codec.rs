//! Byte codecs over the double-byte code space.
//!
//! Internal streams mix single-byte ASCII (`< 0x80`) with two-byte pairs
//! whose bytes both lie in `0xA1..=0xFE`. Interchange streams are the 7-bit
//! form: every pair byte is shifted down by `0x80` and pair runs are framed
//! by SO (`0x0E`) / SI (`0x0F`).

use std::fmt;
use std::str::FromStr;

use crate::codetable::{is_internal_byte, CodePoint, CodeTable, Script};

/// Shift-out: starts a run of double-byte pairs in an interchange stream.
pub const SO: u8 = 0x0E;
/// Shift-in: returns to single-byte ASCII.
pub const SI: u8 = 0x0F;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CodecError {
    #[error("NotAssigned: {ch:?} (U+{:04X}) at char {index} has no code point", *ch as u32)]
    NotAssigned { ch: char, index: usize },
    #[error("TruncatedPair: lead byte at offset {offset} has no trail byte")]
    TruncatedPair { offset: usize },
    #[error("InvalidTrail: byte 0x{byte:02X} at offset {offset} is not a trail byte")]
    InvalidTrail { offset: usize, byte: u8 },
    #[error("IllegalByte: byte 0x{byte:02X} at offset {offset}")]
    IllegalByte { offset: usize, byte: u8 },
    #[error("UnassignedCode: row {row} cell {cell} at offset {offset}")]
    UnassignedCode { offset: usize, row: u8, cell: u8 },
    #[error("ReservedControl: shift byte 0x{byte:02X} at offset {offset} cannot appear in internal text")]
    ReservedControl { offset: usize, byte: u8 },
    #[error("UnterminatedShift: shift-out at offset {offset} is never closed")]
    UnterminatedShift { offset: usize },
    #[error("UnexpectedShiftIn: shift-in at offset {offset} outside a double-byte region")]
    UnexpectedShiftIn { offset: usize },
    #[error("NestedShiftOut: shift-out at offset {offset} inside a double-byte region")]
    NestedShiftOut { offset: usize },
    #[error("InvalidInterchangeByte: byte 0x{byte:02X} at offset {offset}")]
    InvalidInterchangeByte { offset: usize, byte: u8 },
    #[error("NoCounterpart: {ch:?} (U+{:04X}) at char {index} has no {to} counterpart", *ch as u32)]
    NoCounterpart { ch: char, index: usize, to: Script },
    #[error("UnregisteredPair: {from} and {to} are not parallel scripts")]
    UnregisteredPair { from: Script, to: Script },
}

impl CodecError {
    /// Stable error name, used by the service layer.
    pub fn name(&self) -> &'static str {
        match self {
            CodecError::NotAssigned { .. } => "NotAssigned",
            CodecError::TruncatedPair { .. } => "TruncatedPair",
            CodecError::InvalidTrail { .. } => "InvalidTrail",
            CodecError::IllegalByte { .. } => "IllegalByte",
            CodecError::UnassignedCode { .. } => "UnassignedCode",
            CodecError::ReservedControl { .. } => "ReservedControl",
            CodecError::UnterminatedShift { .. } => "UnterminatedShift",
            CodecError::UnexpectedShiftIn { .. } => "UnexpectedShiftIn",
            CodecError::NestedShiftOut { .. } => "NestedShiftOut",
            CodecError::InvalidInterchangeByte { .. } => "InvalidInterchangeByte",
            CodecError::NoCounterpart { .. } => "NoCounterpart",
            CodecError::UnregisteredPair { .. } => "UnregisteredPair",
        }
    }

    /// Byte offset into the input stream, for stream errors.
    pub fn offset(&self) -> Option<usize> {
        match *self {
            CodecError::TruncatedPair { offset }
            | CodecError::InvalidTrail { offset, .. }
            | CodecError::IllegalByte { offset, .. }
            | CodecError::UnassignedCode { offset, .. }
            | CodecError::ReservedControl { offset, .. }
            | CodecError::UnterminatedShift { offset }
            | CodecError::UnexpectedShiftIn { offset }
            | CodecError::NestedShiftOut { offset }
            | CodecError::InvalidInterchangeByte { offset, .. } => Some(offset),
            _ => None,
        }
    }
}

/// One lexical unit of an internal stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    Ascii(u8),
    Pair(u8, u8),
}

/// Splits an internal stream into units, reporting the offset of each.
///
/// Stops after the first error.
pub fn units(bytes: &[u8]) -> Units<'_> {
    Units { bytes, pos: 0, failed: false }
}

pub struct Units<'a> {
    bytes: &'a [u8],
    pos: usize,
    failed: bool,
}

impl Iterator for Units<'_> {
    type Item = Result<(usize, Unit), CodecError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed || self.pos >= self.bytes.len() {
            return None;
        }
        let offset = self.pos;
        let item = next_unit(self.bytes, offset);
        match item {
            Ok(Unit::Ascii(_)) => self.pos += 1,
            Ok(Unit::Pair(..)) => self.pos += 2,
            Err(_) => self.failed = true,
        }
        Some(item.map(|u| (offset, u)))
    }
}

fn next_unit(bytes: &[u8], offset: usize) -> Result<Unit, CodecError> {
    let b = bytes[offset];
    if b < 0x80 {
        return Ok(Unit::Ascii(b));
    }
    if !is_internal_byte(b) {
        return Err(CodecError::IllegalByte { offset, byte: b });
    }
    match bytes.get(offset + 1) {
        None => Err(CodecError::TruncatedPair { offset }),
        Some(&t) if is_internal_byte(t) => Ok(Unit::Pair(b, t)),
        Some(&t) => Err(CodecError::InvalidTrail { offset: offset + 1, byte: t }),
    }
}

/// Encodes text into an internal stream.
///
/// ASCII passes through as single bytes; every other character must be
/// assigned in `table` and becomes its two-byte code.
pub fn encode_internal(text: &str, table: &CodeTable) -> Result<Vec<u8>, CodecError> {
    let mut out = Vec::with_capacity(text.len());
    for (index, ch) in text.chars().enumerate() {
        if ch.is_ascii() {
            out.push(ch as u8);
        } else {
            let (_, code) = table
                .by_scalar(ch as u32)
                .ok_or(CodecError::NotAssigned { ch, index })?;
            out.extend_from_slice(&code.internal_bytes());
        }
    }
    Ok(out)
}

/// Strict decode of an internal stream.
pub fn decode_internal(bytes: &[u8], table: &CodeTable) -> Result<String, CodecError> {
    Decoder::strict().decode(bytes, table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DecodeMode {
    #[default]
    Strict,
    /// Substitute the given character for each malformed or unassigned unit.
    Lossy(char),
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Decoder {
    mode: DecodeMode,
}

impl Decoder {
    pub fn strict() -> Self {
        Decoder { mode: DecodeMode::Strict }
    }

    pub fn lossy(replacement: char) -> Self {
        Decoder { mode: DecodeMode::Lossy(replacement) }
    }

    pub fn decode(&self, bytes: &[u8], table: &CodeTable) -> Result<String, CodecError> {
        let mut out = String::with_capacity(bytes.len());
        let mut pos = 0;
        while pos < bytes.len() {
            let step = match next_unit(bytes, pos) {
                Ok(Unit::Ascii(b)) => {
                    out.push(b as char);
                    Ok(1)
                }
                Ok(Unit::Pair(lead, trail)) => {
                    match CodePoint::from_internal(lead, trail, table.split())
                        .and_then(|code| table.lookup_code(code).ok())
                        .and_then(|ch| ch.as_char())
                    {
                        Some(ch) => {
                            out.push(ch);
                            Ok(2)
                        }
                        None => Err((
                            CodecError::UnassignedCode {
                                offset: pos,
                                row: lead - 0xA0,
                                cell: trail - 0xA0,
                            },
                            2,
                        )),
                    }
                }
                // Skip one byte so a bad trail is rescanned as a fresh unit.
                Err(e) => Err((e, 1)),
            };
            match (step, self.mode) {
                (Ok(n), _) => pos += n,
                (Err((e, _)), DecodeMode::Strict) => return Err(e),
                (Err((_, n)), DecodeMode::Lossy(replacement)) => {
                    out.push(replacement);
                    pos += n;
                }
            }
        }
        Ok(out)
    }
}

/// Converts an internal stream to interchange form.
///
/// The ASCII shift bytes SO and SI are reserved for framing, so internal
/// text containing them is rejected.
pub fn internal_to_interchange(bytes: &[u8]) -> Result<Vec<u8>, CodecError> {
    let mut out = Vec::with_capacity(bytes.len() + 2);
    let mut shifted = false;
    for unit in units(bytes) {
        let (offset, unit) = unit?;
        match unit {
            Unit::Ascii(b) => {
                if b == SO || b == SI {
                    return Err(CodecError::ReservedControl { offset, byte: b });
                }
                if shifted {
                    out.push(SI);
                    shifted = false;
                }
                out.push(b);
            }
            Unit::Pair(lead, trail) => {
                if !shifted {
                    out.push(SO);
                    shifted = true;
                }
                out.push(lead - 0x80);
                out.push(trail - 0x80);
            }
        }
    }
    if shifted {
        out.push(SI);
    }
    Ok(out)
}

fn is_interchange_pair_byte(b: u8) -> bool {
    (0x21..=0x7E).contains(&b)
}

/// Converts an interchange stream back to internal form.
pub fn interchange_to_internal(bytes: &[u8]) -> Result<Vec<u8>, CodecError> {
    let mut out = Vec::with_capacity(bytes.len());
    let mut shift_start: Option<usize> = None;
    let mut pos = 0;
    while pos < bytes.len() {
        let b = bytes[pos];
        match shift_start {
            None => match b {
                SO => shift_start = Some(pos),
                SI => return Err(CodecError::UnexpectedShiftIn { offset: pos }),
                0x80.. => return Err(CodecError::InvalidInterchangeByte { offset: pos, byte: b }),
                _ => out.push(b),
            },
            Some(_) => match b {
                SI => shift_start = None,
                SO => return Err(CodecError::NestedShiftOut { offset: pos }),
                b if is_interchange_pair_byte(b) => match bytes.get(pos + 1) {
                    None => return Err(CodecError::TruncatedPair { offset: pos }),
                    Some(&t) if is_interchange_pair_byte(t) => {
                        out.push(b + 0x80);
                        out.push(t + 0x80);
                        pos += 1;
                    }
                    Some(&t) => return Err(CodecError::InvalidTrail { offset: pos + 1, byte: t }),
                },
                _ => return Err(CodecError::InvalidInterchangeByte { offset: pos, byte: b }),
            },
        }
        pos += 1;
    }
    if let Some(offset) = shift_start {
        return Err(CodecError::UnterminatedShift { offset });
    }
    Ok(out)
}

/// What to do with a character whose parallel counterpart is missing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fallback {
    #[default]
    Strict,
    Passthrough,
    Mark,
}

impl FromStr for Fallback {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "strict" => Ok(Fallback::Strict),
            "passthrough" => Ok(Fallback::Passthrough),
            "mark" => Ok(Fallback::Mark),
            _ => Err(format!("unknown fallback {s:?} (strict, passthrough, mark)")),
        }
    }
}

impl fmt::Display for Fallback {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Fallback::Strict => "strict",
            Fallback::Passthrough => "passthrough",
            Fallback::Mark => "mark",
        })
    }
}

/// Scalar distance between two parallel script blocks.
pub fn parallel_offset(from: Script, to: Script) -> Option<i64> {
    match (from.brahmic_block_base(), to.brahmic_block_base()) {
        (Some(a), Some(b)) if from != to => Some(b as i64 - a as i64),
        _ => None,
    }
}

/// Moves characters between scripts whose blocks share one chart layout.
///
/// A character of the `from` block maps to the character at the same chart
/// position of the `to` block, provided `table` assigns it to the `to`
/// script. Characters outside the `from` block are copied unchanged.
pub fn transliterate_parallel(
    text: &str,
    from: Script,
    to: Script,
    table: &CodeTable,
    fallback: Fallback,
) -> Result<String, CodecError> {
    let offset = parallel_offset(from, to).ok_or(CodecError::UnregisteredPair { from, to })?;
    let base = from.brahmic_block_base().expect("registered pair");
    let mut out = String::with_capacity(text.len());
    for (index, ch) in text.chars().enumerate() {
        let scalar = ch as u32;
        if !(base..base + 0x80).contains(&scalar) {
            out.push(ch);
            continue;
        }
        let target = (scalar as i64 + offset) as u32;
        match table.by_scalar(target).filter(|(c, _)| c.script == to).and_then(|(c, _)| c.as_char()) {
            Some(mapped) => out.push(mapped),
            None => match fallback {
                Fallback::Strict => return Err(CodecError::NoCounterpart { ch, index, to }),
                Fallback::Passthrough => out.push(ch),
                Fallback::Mark => {
                    out.push('*');
                    out.push(ch);
                }
            },
        }
    }
    Ok(out)
}

//! Packed bitmap font banks and line rendering.
//!
//! A font file is a 16-byte header followed by one or two banks of glyphs.
//! Each glyph is a square monochrome bitmap, row-major, most significant
//! bit first. Within a bank the glyph for (row, cell) starts at
//! `((row - 1) * 94 + (cell - 1)) * bytes_per_glyph`.
//!
//! Header layout:
//!
//! ```text
//! 0..4   magic "IFNT"
//! 4      glyph size in pixels (16, 24 or 48)
//! 5      bank count (1 or 2)
//! 6..    per bank: level (u8: 0 = any, 1 = L1, 2 = L2), length (u32 LE)
//!        zero padding up to 16 bytes
//! ```

use std::fmt;
use std::io::Write;

use crate::codetable::{CodePoint, Level, CELLS};
use crate::shaping::PositionedGlyph;

pub mod synth;

pub const MAGIC: [u8; 4] = *b"IFNT";
pub const HEADER_LEN: usize = 16;
const BANK_ENTRY_LEN: usize = 5;
const MAX_BANKS: usize = (HEADER_LEN - 6) / BANK_ENTRY_LEN;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FontError {
    #[error("BadMagic: not an IFNT font")]
    BadMagic,
    #[error("bad font header: {0}")]
    BadHeader(String),
    #[error("font is {found}px, expected {expected}px")]
    SizeMismatch { expected: u16, found: u16 },
    #[error("LengthNotMultiple: bank {bank} length {len} is not a multiple of {bytes_per_glyph}")]
    LengthNotMultiple { bank: usize, len: usize, bytes_per_glyph: usize },
    #[error("TruncatedBank: bank {bank} declares {declared} bytes but only {available} remain")]
    TruncatedBank { bank: usize, declared: usize, available: usize },
    #[error("{0} bytes of trailing data after the last bank")]
    TrailingData(usize),
    #[error("OutOfBank: no glyph for row {row} cell {cell}")]
    OutOfBank { row: u8, cell: u8 },
}

impl FontError {
    pub fn name(&self) -> &'static str {
        match self {
            FontError::BadMagic => "BadMagic",
            FontError::BadHeader(_) => "BadHeader",
            FontError::SizeMismatch { .. } => "SizeMismatch",
            FontError::LengthNotMultiple { .. } => "LengthNotMultiple",
            FontError::TruncatedBank { .. } => "TruncatedBank",
            FontError::TrailingData(_) => "TrailingData",
            FontError::OutOfBank { .. } => "OutOfBank",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FontSize {
    Px16,
    Px24,
    Px48,
}

impl FontSize {
    pub const ALL: [FontSize; 3] = [FontSize::Px16, FontSize::Px24, FontSize::Px48];

    pub fn from_px(px: u16) -> Option<Self> {
        match px {
            16 => Some(FontSize::Px16),
            24 => Some(FontSize::Px24),
            48 => Some(FontSize::Px48),
            _ => None,
        }
    }

    pub fn px(&self) -> u16 {
        match self {
            FontSize::Px16 => 16,
            FontSize::Px24 => 24,
            FontSize::Px48 => 48,
        }
    }

    pub fn row_bytes(&self) -> usize {
        self.px() as usize / 8
    }

    pub fn bytes_per_glyph(&self) -> usize {
        self.px() as usize * self.row_bytes()
    }
}

impl fmt::Display for FontSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.px())
    }
}

/// Byte offset of a glyph inside its bank.
pub fn glyph_offset(code: CodePoint, size: FontSize) -> usize {
    ((code.row() as usize - 1) * CELLS as usize + (code.cell() as usize - 1))
        * size.bytes_per_glyph()
}

/// Which code points a bank serves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BankLevel {
    Any,
    Only(Level),
}

impl BankLevel {
    fn to_byte(self) -> u8 {
        match self {
            BankLevel::Any => 0,
            BankLevel::Only(Level::L1) => 1,
            BankLevel::Only(Level::L2) => 2,
        }
    }

    fn from_byte(b: u8) -> Option<Self> {
        match b {
            0 => Some(BankLevel::Any),
            1 => Some(BankLevel::Only(Level::L1)),
            2 => Some(BankLevel::Only(Level::L2)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FontBank {
    pub level: BankLevel,
    /// Offset of the bank inside the font body (after the header).
    pub base: usize,
    pub len: usize,
}

/// An immutable set of glyph banks of one size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FontLibrary {
    size: FontSize,
    body: Vec<u8>,
    banks: Vec<FontBank>,
}

/// Parses a font file, checking that its glyph size is `size`.
pub fn load_font(file: &[u8], size: FontSize) -> Result<FontLibrary, FontError> {
    let lib = FontLibrary::parse(file)?;
    if lib.size != size {
        return Err(FontError::SizeMismatch { expected: size.px(), found: lib.size.px() });
    }
    Ok(lib)
}

impl FontLibrary {
    pub fn parse(file: &[u8]) -> Result<FontLibrary, FontError> {
        if file.len() < HEADER_LEN || file[..4] != MAGIC {
            return Err(FontError::BadMagic);
        }
        let size = FontSize::from_px(file[4].into())
            .ok_or_else(|| FontError::BadHeader(format!("unsupported glyph size {}", file[4])))?;
        let count = file[5] as usize;
        if count == 0 || count > MAX_BANKS {
            return Err(FontError::BadHeader(format!("bank count {count} not in 1..={MAX_BANKS}")));
        }
        let body = &file[HEADER_LEN..];
        let mut banks = Vec::with_capacity(count);
        let mut base = 0usize;
        for bank in 0..count {
            let entry = &file[6 + bank * BANK_ENTRY_LEN..6 + (bank + 1) * BANK_ENTRY_LEN];
            let level = BankLevel::from_byte(entry[0])
                .ok_or_else(|| FontError::BadHeader(format!("bank {bank} has level byte {}", entry[0])))?;
            let len = u32::from_le_bytes([entry[1], entry[2], entry[3], entry[4]]) as usize;
            if !len.is_multiple_of(size.bytes_per_glyph()) {
                return Err(FontError::LengthNotMultiple {
                    bank,
                    len,
                    bytes_per_glyph: size.bytes_per_glyph(),
                });
            }
            let available = body.len() - base;
            if len > available {
                return Err(FontError::TruncatedBank { bank, declared: len, available });
            }
            banks.push(FontBank { level, base, len });
            base += len;
        }
        if base < body.len() {
            return Err(FontError::TrailingData(body.len() - base));
        }
        check_levels(&banks)?;
        Ok(FontLibrary { size, body: body.to_vec(), banks })
    }

    /// Builds a library from raw bank contents.
    pub fn from_banks(
        size: FontSize,
        banks: Vec<(BankLevel, Vec<u8>)>,
    ) -> Result<FontLibrary, FontError> {
        if banks.is_empty() || banks.len() > MAX_BANKS {
            return Err(FontError::BadHeader(format!("bank count {} not in 1..={MAX_BANKS}", banks.len())));
        }
        let mut body = Vec::new();
        let mut out = Vec::new();
        for (bank, (level, bytes)) in banks.into_iter().enumerate() {
            if bytes.len() % size.bytes_per_glyph() != 0 || bytes.len() > u32::MAX as usize {
                return Err(FontError::LengthNotMultiple {
                    bank,
                    len: bytes.len(),
                    bytes_per_glyph: size.bytes_per_glyph(),
                });
            }
            out.push(FontBank { level, base: body.len(), len: bytes.len() });
            body.extend_from_slice(&bytes);
        }
        check_levels(&out)?;
        Ok(FontLibrary { size, body, banks: out })
    }

    /// Serializes to the IFNT file format.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.body.len());
        out.extend_from_slice(&MAGIC);
        out.push(self.size.px() as u8);
        out.push(self.banks.len() as u8);
        for bank in &self.banks {
            out.push(bank.level.to_byte());
            out.extend_from_slice(&(bank.len as u32).to_le_bytes());
        }
        out.resize(HEADER_LEN, 0);
        out.extend_from_slice(&self.body);
        out
    }

    pub fn size(&self) -> FontSize {
        self.size
    }

    pub fn banks(&self) -> &[FontBank] {
        &self.banks
    }

    /// The bank serving `level`: a level-specific bank wins over an `Any` bank.
    pub fn bank_for(&self, level: Level) -> Option<&FontBank> {
        self.banks
            .iter()
            .find(|b| b.level == BankLevel::Only(level))
            .or_else(|| self.banks.iter().find(|b| b.level == BankLevel::Any))
    }

    /// Offset of a glyph from the start of the file, if it is in a bank.
    pub fn file_offset(&self, code: CodePoint) -> Option<usize> {
        let bank = self.bank_for(code.level())?;
        let offset = glyph_offset(code, self.size);
        (offset + self.size.bytes_per_glyph() <= bank.len).then_some(HEADER_LEN + bank.base + offset)
    }

    pub fn get_glyph(&self, code: CodePoint) -> Result<Glyph<'_>, FontError> {
        let start = self
            .file_offset(code)
            .ok_or(FontError::OutOfBank { row: code.row(), cell: code.cell() })?
            - HEADER_LEN;
        Ok(Glyph { size: self.size, bytes: &self.body[start..start + self.size.bytes_per_glyph()] })
    }

    /// A copy of this library whose glyphs for `level` come from `donor`.
    ///
    /// This is the bank substitution experiment: the level 2 bank of one
    /// font library swapped for another script's glyphs while level 1 and
    /// every code path stay untouched.
    pub fn with_level_from(&self, level: Level, donor: &FontLibrary) -> Result<FontLibrary, FontError> {
        if donor.size != self.size {
            return Err(FontError::SizeMismatch { expected: self.size.px(), found: donor.size.px() });
        }
        let donor_bank = donor
            .bank_for(level)
            .ok_or_else(|| FontError::BadHeader(format!("donor has no {level} bank")))?;
        let donor_bytes = donor.body[donor_bank.base..donor_bank.base + donor_bank.len].to_vec();
        let mut banks: Vec<(BankLevel, Vec<u8>)> = Vec::new();
        for bank in &self.banks {
            let bytes = self.body[bank.base..bank.base + bank.len].to_vec();
            match bank.level {
                BankLevel::Only(l) if l == level => {}
                BankLevel::Any => {
                    let other = match level {
                        Level::L1 => Level::L2,
                        Level::L2 => Level::L1,
                    };
                    banks.push((BankLevel::Only(other), bytes));
                }
                _ => banks.push((bank.level, bytes)),
            }
        }
        banks.push((BankLevel::Only(level), donor_bytes));
        FontLibrary::from_banks(self.size, banks)
    }
}

fn check_levels(banks: &[FontBank]) -> Result<(), FontError> {
    for (i, a) in banks.iter().enumerate() {
        if banks[i + 1..].iter().any(|b| b.level == a.level) {
            return Err(FontError::BadHeader("two banks share a level".into()));
        }
    }
    Ok(())
}

/// A borrowed glyph bitmap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Glyph<'a> {
    size: FontSize,
    bytes: &'a [u8],
}

impl<'a> Glyph<'a> {
    pub fn size(&self) -> FontSize {
        self.size
    }

    pub fn bytes(&self) -> &'a [u8] {
        self.bytes
    }

    pub fn pixel(&self, x: usize, y: usize) -> bool {
        let byte = self.bytes[y * self.size.row_bytes() + x / 8];
        byte & (0x80 >> (x % 8)) != 0
    }
}

/// A packed monochrome bitmap; set bits are ink.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    width: usize,
    height: usize,
    bits: Vec<u8>,
}

impl Raster {
    pub fn new(width: usize, height: usize) -> Self {
        Raster { width, height, bits: vec![0; width.div_ceil(8) * height] }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    fn stride(&self) -> usize {
        self.width.div_ceil(8)
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.stride() + x / 8] & (0x80 >> (x % 8)) != 0
    }

    pub fn set(&mut self, x: usize, y: usize) {
        let stride = self.stride();
        self.bits[y * stride + x / 8] |= 0x80 >> (x % 8);
    }

    /// ORs `glyph` into the raster with its top-left corner at (x, y),
    /// clipping anything that falls outside.
    pub fn blit(&mut self, glyph: &Glyph<'_>, x: i64, y: i64) {
        let px = glyph.size.px() as i64;
        for gy in 0..px {
            let ty = y + gy;
            if ty < 0 || ty >= self.height as i64 {
                continue;
            }
            for gx in 0..px {
                let tx = x + gx;
                if tx < 0 || tx >= self.width as i64 {
                    continue;
                }
                if glyph.pixel(gx as usize, gy as usize) {
                    self.set(tx as usize, ty as usize);
                }
            }
        }
    }

    /// Binary PBM (`P4`) encoding.
    pub fn to_pbm(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.bits.len() + 16);
        write!(out, "P4\n{} {}\n", self.width, self.height).expect("write to Vec");
        out.extend_from_slice(&self.bits);
        out
    }

    /// Parses a binary PBM with a plain header (no comments).
    pub fn from_pbm(bytes: &[u8]) -> Option<Raster> {
        let mut fields = Vec::new();
        let mut pos = 0;
        while fields.len() < 3 {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            let start = pos;
            while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if start == pos {
                return None;
            }
            fields.push(std::str::from_utf8(&bytes[start..pos]).ok()?);
        }
        if fields[0] != "P4" {
            return None;
        }
        let width: usize = fields[1].parse().ok()?;
        let height: usize = fields[2].parse().ok()?;
        let bits = bytes.get(pos + 1..)?.to_vec();
        (bits.len() == width.div_ceil(8) * height).then_some(Raster { width, height, bits })
    }
}

/// Renders positioned glyphs onto a single line.
///
/// The raster is as wide as the sum of advances and one glyph tall; each
/// glyph is ORed in at its pen position plus its (dx, dy) offset.
pub fn render_line(glyphs: &[PositionedGlyph], lib: &FontLibrary) -> Result<Raster, FontError> {
    let width: usize = glyphs.iter().map(|g| g.advance as usize).sum();
    let mut raster = Raster::new(width, lib.size().px() as usize);
    let mut pen = 0i64;
    for g in glyphs {
        let glyph = lib.get_glyph(g.glyph)?;
        raster.blit(&glyph, pen + g.dx as i64, g.dy as i64);
        pen += g.advance as i64;
    }
    Ok(raster)
}

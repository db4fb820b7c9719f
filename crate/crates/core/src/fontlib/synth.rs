//! Last-resort "hex box" glyphs.
//!
//! No bitmap artwork ships with the crate, so a font can be synthesised
//! from a code table: every assigned cell gets a framed box showing the
//! four hex digits of its scalar, and glyph-only cells show their internal
//! code. Glyphs are drawn on a 16×16 grid and scaled by nearest neighbour.

use crate::codetable::{CodePoint, CodeTable, CELLS};

use super::{BankLevel, FontError, FontLibrary, FontSize};

// 3×5 digits, one row per nibble, bit 2 is the leftmost column.
const DIGITS: [[u8; 5]; 16] = [
    [0b111, 0b101, 0b101, 0b101, 0b111],
    [0b010, 0b110, 0b010, 0b010, 0b111],
    [0b111, 0b001, 0b111, 0b100, 0b111],
    [0b111, 0b001, 0b111, 0b001, 0b111],
    [0b101, 0b101, 0b111, 0b001, 0b001],
    [0b111, 0b100, 0b111, 0b001, 0b111],
    [0b111, 0b100, 0b111, 0b101, 0b111],
    [0b111, 0b001, 0b010, 0b010, 0b010],
    [0b111, 0b101, 0b111, 0b101, 0b111],
    [0b111, 0b101, 0b111, 0b001, 0b111],
    [0b010, 0b101, 0b111, 0b101, 0b101],
    [0b110, 0b101, 0b110, 0b101, 0b110],
    [0b011, 0b100, 0b100, 0b100, 0b011],
    [0b110, 0b101, 0b101, 0b101, 0b110],
    [0b111, 0b100, 0b110, 0b100, 0b111],
    [0b111, 0b100, 0b110, 0b100, 0b100],
];

/// Draws a 16×16 design-grid box showing `value` as four hex digits.
#[allow(clippy::needless_range_loop)]
fn design(value: u16) -> [[bool; 16]; 16] {
    let mut grid = [[false; 16]; 16];
    for i in 1..15 {
        grid[1][i] = true;
        grid[14][i] = true;
        grid[i][1] = true;
        grid[i][14] = true;
    }
    let origins = [(3, 3), (9, 3), (3, 9), (9, 9)];
    for (n, (ox, oy)) in origins.into_iter().enumerate() {
        let nibble = (value >> (12 - 4 * n)) & 0xF;
        for (dy, bits) in DIGITS[nibble as usize].iter().enumerate() {
            for dx in 0..3 {
                if bits & (0b100 >> dx) != 0 {
                    grid[oy + dy][ox + dx] = true;
                }
            }
        }
    }
    grid
}

/// Packs a hex box for `value` at `size`.
pub fn hexbox_glyph(value: u16, size: FontSize) -> Vec<u8> {
    let grid = design(value);
    let px = size.px() as usize;
    let mut out = vec![0u8; size.bytes_per_glyph()];
    for y in 0..px {
        for x in 0..px {
            if grid[y * 16 / px][x * 16 / px] {
                out[y * size.row_bytes() + x / 8] |= 0x80 >> (x % 8);
            }
        }
    }
    out
}

/// A blank (all-zero) glyph is used for these scalars.
fn is_blank(scalar: u32) -> bool {
    scalar == 0x3000
}

/// Synthesises a single-bank font covering every assigned cell of `table`
/// plus the glyph-only cells in `extra`.
pub fn hexbox_font(
    table: &CodeTable,
    extra: &[CodePoint],
    size: FontSize,
) -> Result<FontLibrary, FontError> {
    let last_row = table
        .iter()
        .map(|(_, code)| code.row())
        .chain(extra.iter().map(|c| c.row()))
        .max()
        .unwrap_or(1) as usize;
    let bpg = size.bytes_per_glyph();
    let mut bank = vec![0u8; last_row * CELLS as usize * bpg];
    let mut put = |code: CodePoint, glyph: Vec<u8>| {
        let at = super::glyph_offset(code, size);
        bank[at..at + bpg].copy_from_slice(&glyph);
    };
    for (ch, code) in table.iter() {
        if !is_blank(ch.scalar) {
            put(code, hexbox_glyph(ch.scalar as u16, size));
        }
    }
    for &code in extra {
        let [lead, trail] = code.internal_bytes();
        put(code, hexbox_glyph(u16::from_be_bytes([lead, trail]), size));
    }
    FontLibrary::from_banks(size, vec![(BankLevel::Any, bank)])
}

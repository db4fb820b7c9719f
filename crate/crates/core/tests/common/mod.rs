//! Generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashSet;

use indic_dbcs::CodeTable;
use rand::rngs::StdRng;
use rand::Rng;

pub const SO: u8 = 0x0E;
pub const SI: u8 = 0x0F;

/// Random text mixing ASCII (minus the shift controls) with table chars.
pub fn random_text(rng: &mut StdRng, chars: &[char], max_len: usize) -> String {
    let len = rng.gen_range(0..=max_len);
    (0..len)
        .map(|_| {
            if rng.gen_bool(0.4) {
                loop {
                    let b = rng.gen_range(0u8..0x80);
                    if b != SO && b != SI {
                        break b as char;
                    }
                }
            } else {
                chars[rng.gen_range(0..chars.len())]
            }
        })
        .collect()
}

pub fn table_chars(table: &CodeTable) -> Vec<char> {
    table.iter().filter_map(|(c, _)| c.as_char()).collect()
}

/// Random well-formed internal stream; pairs need not be assigned.
pub fn random_internal(rng: &mut StdRng, max_units: usize) -> Vec<u8> {
    let mut out = Vec::new();
    for _ in 0..rng.gen_range(0..=max_units) {
        if rng.gen_bool(0.5) {
            out.push(rng.gen_range(0xA1u8..=0xFE));
            out.push(rng.gen_range(0xA1u8..=0xFE));
        } else {
            loop {
                let b = rng.gen_range(0u8..0x80);
                if b != SO && b != SI {
                    out.push(b);
                    break;
                }
            }
        }
    }
    out
}

/// Font file with a single any-level bank covering all 94×94 cells.
pub fn full_bank_font(size_px: usize, rng: &mut StdRng) -> Vec<u8> {
    let bpg = size_px * size_px / 8;
    let bank_len = 94 * 94 * bpg;
    let mut file = b"IFNT".to_vec();
    file.push(size_px as u8);
    file.push(1);
    file.push(0);
    file.extend_from_slice(&(bank_len as u32).to_le_bytes());
    file.resize(16, 0);
    let start = file.len();
    file.resize(start + bank_len, 0);
    rng.fill(&mut file[start..]);
    file
}

/// One entry of the shipped IME file, read without the library parser.
pub struct RawEntry {
    pub key: String,
    pub output: Vec<String>,
    pub frequency: u32,
}

pub fn raw_ime_entries(text: &str) -> Vec<RawEntry> {
    text.lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            RawEntry {
                key: f[0].to_string(),
                output: f[1].split(' ').map(str::to_string).collect(),
                frequency: f.get(2).map_or(0, |v| v.parse().unwrap()),
            }
        })
        .collect()
}

/// Brute force: filter every entry by prefix, sort, drop repeated outputs.
pub fn ime_oracle(entries: &[RawEntry], table: &CodeTable, buffer: &str) -> Vec<(String, Vec<String>)> {
    if buffer.is_empty() {
        return Vec::new();
    }
    let codes = |e: &RawEntry| -> Vec<(u8, u8)> {
        e.output
            .iter()
            .map(|id| {
                let c = table.lookup_char(id).unwrap();
                (c.row(), c.cell())
            })
            .collect()
    };
    let mut hits: Vec<&RawEntry> = entries.iter().filter(|e| e.key.starts_with(buffer)).collect();
    hits.sort_by(|a, b| {
        let exact = |e: &RawEntry| if e.key == buffer { 0 } else { 1 };
        exact(a)
            .cmp(&exact(b))
            .then(b.frequency.cmp(&a.frequency))
            .then(codes(a).cmp(&codes(b)))
            .then(a.key.cmp(&b.key))
    });
    let mut seen = HashSet::new();
    hits.into_iter()
        .filter(|e| seen.insert(e.output.clone()))
        .map(|e| (e.key.clone(), e.output.clone()))
        .collect()
}

/// A glyph already placed in pixels: `(row, cell, dx, dy, advance)`.
pub type Placed = (u8, u8, i64, i64, usize);

/// Paints glyphs read straight out of a font file into a PBM image.
pub fn manual_blit_pbm(font_file: &[u8], size_px: usize, glyphs: &[Placed]) -> Vec<u8> {
    let bpg = size_px * size_px / 8;
    let width: usize = glyphs.iter().map(|g| g.4).sum();
    let mut ink = vec![vec![false; width]; size_px];
    let mut pen = 0i64;
    for &(row, cell, dx, dy, advance) in glyphs {
        let at = 16 + ((row as usize - 1) * 94 + (cell as usize - 1)) * bpg;
        let glyph = &font_file[at..at + bpg];
        for gy in 0..size_px {
            for gx in 0..size_px {
                let on = glyph[gy * size_px / 8 + gx / 8] >> (7 - gx % 8) & 1 == 1;
                let (x, y) = (pen + dx + gx as i64, dy + gy as i64);
                if on && (0..width as i64).contains(&x) && (0..size_px as i64).contains(&y) {
                    ink[y as usize][x as usize] = true;
                }
            }
        }
        pen += advance as i64;
    }
    let mut pbm = format!("P4\n{width} {size_px}\n").into_bytes();
    for line in ink {
        for chunk in line.chunks(8) {
            let mut byte = 0u8;
            for (i, &on) in chunk.iter().enumerate() {
                if on {
                    byte |= 0x80 >> i;
                }
            }
            pbm.push(byte);
        }
    }
    pbm
}

/// The three render fixtures: name, text, pixel size and the glyph
/// placement worked out by hand from the shipped rules.
pub fn render_fixtures() -> Vec<(&'static str, &'static str, usize, Vec<Placed>)> {
    vec![
        (
            // कि ष: pre-base i with half advance, then two full cells.
            "prebase_16",
            "\u{0915}\u{093F}\u{0937}",
            16,
            vec![(16, 64, 0, 0, 8), (16, 22, 0, 0, 16), (16, 56, 0, 0, 16)],
        ),
        (
            // क्षु हिं: conjunct with a mark below, a space, pre-base i and a mark above.
            "conjunct_24",
            "\u{0915}\u{094D}\u{0937}\u{0941} \u{0939}\u{093F}\u{0902}",
            24,
            vec![
                (18, 1, 0, 0, 24),
                (16, 66, -24, 0, 0),
                (1, 1, 0, 0, 24),
                (16, 64, 0, 0, 12),
                (16, 58, 0, 0, 24),
                (16, 3, -24, 0, 0),
            ],
        ),
        (
            // কিক: Bengali pre-base i then a plain consonant.
            "bengali_48",
            "\u{0995}\u{09BF}\u{0995}",
            48,
            vec![(56, 64, 0, 0, 24), (56, 22, 0, 0, 48), (56, 22, 0, 0, 48)],
        ),
    ]
}

pub fn golden_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.pbm"))
}

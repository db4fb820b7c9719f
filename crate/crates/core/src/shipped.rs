//! Built-in data and the text-to-bitmap pipeline.
//!
//! Every resource is compiled into the crate and can be replaced by a
//! directory with the same layout:
//!
//! ```text
//! tables/indic.tsv
//! shaping/indic.rules
//! ime/hindi.tsv
//! anusaaraka/<source>-<target>/{paradigms,lexicon,vibhakti}.tsv
//! ```

use std::path::Path;
use std::sync::{Arc, OnceLock};

use crate::anusaaraka::{Anusaaraka, AnusaarakaError, PairResources};
use crate::codetable::{
    AbstractChar, Bank, CharId, CodeTable, CodeTableBuilder, Level, LevelSplit, Script, TableError, CELLS,
};
use crate::fontlib::{render_line, synth, FontError, FontLibrary, FontSize, Raster};
use crate::ime::{ConversionTable, ImeError};
use crate::shaping::{scale_positions, RuleSet, ShapeError};

pub const INDIC_TABLE: &str = include_str!("../resources/tables/indic.tsv");
pub const INDIC_RULES: &str = include_str!("../resources/shaping/indic.rules");
pub const HINDI_IME: &str = include_str!("../resources/ime/hindi.tsv");

/// `(pair, paradigms, lexicon, vibhakti)` for each built-in language pair.
pub const GLOSS_PAIRS: &[(&str, &str, &str, &str)] = &[
    (
        "te-hi",
        include_str!("../resources/anusaaraka/te-hi/paradigms.tsv"),
        include_str!("../resources/anusaaraka/te-hi/lexicon.tsv"),
        include_str!("../resources/anusaaraka/te-hi/vibhakti.tsv"),
    ),
    (
        "hi-en",
        include_str!("../resources/anusaaraka/hi-en/paradigms.tsv"),
        include_str!("../resources/anusaaraka/hi-en/lexicon.tsv"),
        include_str!("../resources/anusaaraka/hi-en/vibhakti.tsv"),
    ),
];

/// Characters assigned in the level-1 and level-2 Han banks of
/// [`gb_reference_table`].
pub const GB_L1_CHARS: usize = 3755;
pub const GB_L2_CHARS: usize = 3008;

/// A table with the level sizes of the GB 2312 national standard: 3755
/// frequent ideographs in rows 16–55 and 3008 less frequent ones in rows
/// 56–87. Ids are `HAN_XXXX` and scalars are consecutive from U+4E00 in
/// code order, standing in for the real repertoire.
pub fn gb_reference_table() -> CodeTable {
    let split = LevelSplit::default();
    let mut builder = CodeTableBuilder::new(split);
    builder
        .bank(Bank { script: Some(Script::Han), level: Level::L1, rows: 16..=55 })
        .and_then(|b| b.bank(Bank { script: Some(Script::Han), level: Level::L2, rows: 56..=87 }))
        .expect("fixed bank layout");
    let place = |builder: &mut CodeTableBuilder, first_row: u8, n: usize, first_scalar: u32| {
        for i in 0..n {
            let row = first_row + (i / CELLS as usize) as u8;
            let cell = (i % CELLS as usize) as u8 + 1;
            let scalar = first_scalar + i as u32;
            let ch = AbstractChar { id: CharId::new(&format!("HAN_{scalar:04X}")), script: Script::Han, scalar };
            builder.assign(row, cell, ch).expect("fixed assignment");
        }
    };
    place(&mut builder, 16, GB_L1_CHARS, 0x4E00);
    place(&mut builder, 56, GB_L2_CHARS, 0x4E00 + GB_L1_CHARS as u32);
    builder.build()
}

#[derive(Debug, thiserror::Error)]
pub enum ResourceError {
    #[error("tables/indic.tsv: {0}")]
    Table(#[from] TableError),
    #[error("shaping/indic.rules: {0}")]
    Rules(#[from] ShapeError),
    #[error("ime/hindi.tsv: {0}")]
    Ime(#[from] ImeError),
    #[error("anusaaraka/{pair}: {error}")]
    Gloss { pair: String, error: AnusaarakaError },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, thiserror::Error)]
pub enum RenderError {
    #[error(transparent)]
    Shape(#[from] ShapeError),
    #[error(transparent)]
    Font(#[from] FontError),
}

impl RenderError {
    pub fn name(&self) -> &'static str {
        match self {
            RenderError::Shape(e) => e.name(),
            RenderError::Font(e) => e.name(),
        }
    }
}

/// The loaded resource set shared by the command line and the service.
#[derive(Debug)]
pub struct Resources {
    pub table: Arc<CodeTable>,
    pub rules: RuleSet,
    pub ime: Arc<ConversionTable>,
    pub gloss: Anusaaraka,
    fonts: [OnceLock<Result<FontLibrary, FontError>>; 3],
}

impl Resources {
    /// The compiled-in resources.
    pub fn builtin() -> Self {
        let pairs = GLOSS_PAIRS.iter().map(|&(pair, p, l, v)| (pair.to_string(), p.into(), l.into(), v.into()));
        Resources::from_texts(INDIC_TABLE, INDIC_RULES, HINDI_IME, pairs).expect("built-in resources are valid")
    }

    /// Loads resources from `dir`, which must have the built-in layout.
    pub fn load_dir(dir: impl AsRef<Path>) -> Result<Self, ResourceError> {
        let dir = dir.as_ref();
        let read = |rel: &Path| {
            let path = dir.join(rel);
            std::fs::read_to_string(&path)
                .map_err(|e| ResourceError::Io { path: path.display().to_string(), message: e.to_string() })
        };
        let table = read(Path::new("tables/indic.tsv"))?;
        let rules = read(Path::new("shaping/indic.rules"))?;
        let ime = read(Path::new("ime/hindi.tsv"))?;
        let gloss_dir = dir.join("anusaaraka");
        let mut pairs = Vec::new();
        let listing = std::fs::read_dir(&gloss_dir).map_err(|e| ResourceError::Io {
            path: gloss_dir.display().to_string(),
            message: e.to_string(),
        })?;
        let mut names: Vec<String> = listing
            .filter_map(Result::ok)
            .filter(|e| e.path().is_dir())
            .map(|e| e.file_name().to_string_lossy().into_owned())
            .collect();
        names.sort();
        for name in names {
            let file = |f: &str| read(&Path::new("anusaaraka").join(&name).join(f));
            pairs.push((name.clone(), file("paradigms.tsv")?, file("lexicon.tsv")?, file("vibhakti.tsv")?));
        }
        Resources::from_texts(&table, &rules, &ime, pairs)
    }

    fn from_texts(
        table: &str,
        rules: &str,
        ime: &str,
        pairs: impl IntoIterator<Item = (String, String, String, String)>,
    ) -> Result<Self, ResourceError> {
        let table = Arc::new(CodeTable::parse(table)?);
        let rules = RuleSet::parse(rules, &table)?;
        let ime = Arc::new(ConversionTable::parse(ime, table.clone())?);
        let mut gloss = Anusaaraka::new();
        for (pair, p, l, v) in pairs {
            let resources = PairResources::parse(&p, &l, &v)
                .map_err(|error| ResourceError::Gloss { pair: pair.clone(), error })?;
            if resources.pair_name() != pair {
                return Err(ResourceError::Gloss {
                    pair: pair.clone(),
                    error: AnusaarakaError::HeaderMismatch {
                        file: "paradigms.tsv",
                        expected: pair,
                        found: resources.pair_name(),
                    },
                });
            }
            gloss.insert(resources);
        }
        Ok(Resources { table, rules, ime, gloss, fonts: Default::default() })
    }

    /// Hex-box font covering the table and every glyph cell the rules use.
    pub fn font(&self, size: FontSize) -> Result<&FontLibrary, FontError> {
        let slot = match size {
            FontSize::Px16 => &self.fonts[0],
            FontSize::Px24 => &self.fonts[1],
            FontSize::Px48 => &self.fonts[2],
        };
        slot.get_or_init(|| {
            let extra: Vec<_> = self.rules.glyph_cells().collect();
            synth::hexbox_font(&self.table, &extra, size)
        })
        .as_ref()
        .map_err(Clone::clone)
    }

    /// Maps text onto character ids. An ASCII space becomes the blank
    /// full-width space; every other character must be in the table.
    pub fn char_ids(&self, text: &str) -> Result<Vec<CharId>, ShapeError> {
        text.chars()
            .enumerate()
            .map(|(index, ch)| {
                let scalar = if ch == ' ' { 0x3000 } else { ch as u32 };
                self.table
                    .by_scalar(scalar)
                    .map(|(c, _)| c.id.clone())
                    .ok_or_else(|| ShapeError::UnknownChar { id: format!("U+{:04X}", ch as u32), index })
            })
            .collect()
    }

    /// Shapes and rasterises one line of text.
    pub fn render(&self, text: &str, size: FontSize) -> Result<Raster, RenderError> {
        let ids = self.char_ids(text)?;
        let glyphs = self.rules.shape(&ids)?;
        let glyphs = scale_positions(&glyphs, self.rules.em(), size.px());
        Ok(render_line(&glyphs, self.font(size)?)?)
    }
}

//! The two-level 94×94 double-byte code space.
//!
//! A [`CodePoint`] is a (row, cell) position; its internal two-byte form is
//! `(0xA0 + row, 0xA0 + cell)`. Rows up to the configured split belong to
//! level 1 (frequent characters), the rest to level 2. A [`CodeTable`] is a
//! bijection between [`AbstractChar`]s and code points, partitioned into
//! per-script banks of rows.

use std::collections::HashMap;
use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;
use std::sync::Arc;

/// Rows (and cells per row) in the code space.
pub const ROWS: u8 = 94;
pub const CELLS: u8 = 94;
/// Number of cells in the whole code space.
pub const CODE_SPACE: usize = ROWS as usize * CELLS as usize;

const BYTE_BASE: u8 = 0xA0;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TableError {
    #[error("line {line}: {error}")]
    Line {
        line: usize,
        #[source]
        error: Box<TableError>,
    },
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("DuplicateCode: row {row} cell {cell} is already assigned to {existing}")]
    DuplicateCode { row: u8, cell: u8, existing: CharId },
    #[error("DuplicateChar: {0} is already assigned")]
    DuplicateChar(String),
    #[error("RowOutOfRange: row {0} is outside 1..=94")]
    RowOutOfRange(u32),
    #[error("CellOutOfRange: cell {0} is outside 1..=94")]
    CellOutOfRange(u32),
    #[error("scalar U+{0:04X} is single-byte ASCII and cannot take a double-byte code")]
    AsciiScalar(u32),
    #[error("BankOverlap: bank {first} overlaps bank {second}")]
    BankOverlap { first: String, second: String },
    #[error("bank {bank} does not lie inside level {level} rows")]
    BankLevelMismatch { bank: String, level: Level },
    #[error("row {0} is not covered by any bank")]
    Unbanked(u8),
    #[error("{id} has script {script} but row {row} belongs to bank {bank}")]
    BankScriptMismatch { id: CharId, script: Script, row: u8, bank: String },
    #[error("NotAssigned: {0} has no code point")]
    NotAssigned(String),
    #[error("UnassignedCode: row {row} cell {cell}")]
    UnassignedCode { row: u8, cell: u8 },
}

impl TableError {
    /// The underlying error with any line context stripped.
    pub fn kind(&self) -> &TableError {
        match self {
            TableError::Line { error, .. } => error.kind(),
            other => other,
        }
    }

    fn at(self, line: usize) -> TableError {
        TableError::Line { line, error: Box::new(self) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    L1,
    L2,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::L1 => "L1",
            Level::L2 => "L2",
        })
    }
}

impl FromStr for Level {
    type Err = TableError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "L1" => Ok(Level::L1),
            "L2" => Ok(Level::L2),
            _ => Err(TableError::Syntax(format!("unknown level {s:?}"))),
        }
    }
}

/// Where level 1 ends. Rows `1..=l1_last_row` are level 1, the rest level 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LevelSplit {
    l1_last_row: u8,
}

impl LevelSplit {
    pub const DEFAULT_L1_LAST_ROW: u8 = 55;

    pub fn new(l1_last_row: u8) -> Result<Self, TableError> {
        if l1_last_row == 0 || l1_last_row >= ROWS {
            return Err(TableError::Syntax(format!(
                "level 1 must end in 1..=93, got row {l1_last_row}"
            )));
        }
        Ok(LevelSplit { l1_last_row })
    }

    pub fn l1_rows(&self) -> RangeInclusive<u8> {
        1..=self.l1_last_row
    }

    pub fn l2_rows(&self) -> RangeInclusive<u8> {
        self.l1_last_row + 1..=ROWS
    }

    pub fn level_of(&self, row: u8) -> Level {
        if row <= self.l1_last_row {
            Level::L1
        } else {
            Level::L2
        }
    }
}

impl Default for LevelSplit {
    fn default() -> Self {
        LevelSplit { l1_last_row: Self::DEFAULT_L1_LAST_ROW }
    }
}

/// A position in the double-byte code space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CodePoint {
    row: u8,
    cell: u8,
    level: Level,
}

impl CodePoint {
    pub fn new(row: u8, cell: u8, split: LevelSplit) -> Result<Self, TableError> {
        if !(1..=ROWS).contains(&row) {
            return Err(TableError::RowOutOfRange(row.into()));
        }
        if !(1..=CELLS).contains(&cell) {
            return Err(TableError::CellOutOfRange(cell.into()));
        }
        Ok(CodePoint { row, cell, level: split.level_of(row) })
    }

    /// Builds a code point from its internal lead and trail bytes.
    pub fn from_internal(lead: u8, trail: u8, split: LevelSplit) -> Option<Self> {
        if is_internal_byte(lead) && is_internal_byte(trail) {
            CodePoint::new(lead - BYTE_BASE, trail - BYTE_BASE, split).ok()
        } else {
            None
        }
    }

    /// Position from a zero-based linear index `(row-1)*94 + (cell-1)`.
    pub fn from_index(index: usize, split: LevelSplit) -> Option<Self> {
        if index >= CODE_SPACE {
            return None;
        }
        let row = (index / CELLS as usize) as u8 + 1;
        let cell = (index % CELLS as usize) as u8 + 1;
        CodePoint::new(row, cell, split).ok()
    }

    pub fn row(&self) -> u8 {
        self.row
    }

    pub fn cell(&self) -> u8 {
        self.cell
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn lead(&self) -> u8 {
        BYTE_BASE + self.row
    }

    pub fn trail(&self) -> u8 {
        BYTE_BASE + self.cell
    }

    pub fn internal_bytes(&self) -> [u8; 2] {
        [self.lead(), self.trail()]
    }

    /// Zero-based linear index over the whole 94×94 space.
    pub fn index(&self) -> usize {
        (self.row as usize - 1) * CELLS as usize + (self.cell as usize - 1)
    }
}

impl fmt::Display for CodePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.row, self.cell)
    }
}

/// Whether `b` is a valid lead or trail byte of the internal code.
pub fn is_internal_byte(b: u8) -> bool {
    (0xA1..=0xFE).contains(&b)
}

/// Opaque, cheaply cloned character identifier.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CharId(Arc<str>);

impl CharId {
    pub fn new(id: &str) -> Self {
        CharId(Arc::from(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CharId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for CharId {
    fn from(s: &str) -> Self {
        CharId::new(s)
    }
}

impl std::borrow::Borrow<str> for CharId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl AsRef<str> for CharId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Script {
    Common,
    Latin,
    Han,
    Devanagari,
    Bengali,
    Gurmukhi,
    Gujarati,
    Oriya,
    Tamil,
    Telugu,
    Kannada,
    Malayalam,
}

impl Script {
    pub const ALL: [Script; 12] = [
        Script::Common,
        Script::Latin,
        Script::Han,
        Script::Devanagari,
        Script::Bengali,
        Script::Gurmukhi,
        Script::Gujarati,
        Script::Oriya,
        Script::Tamil,
        Script::Telugu,
        Script::Kannada,
        Script::Malayalam,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Script::Common => "Common",
            Script::Latin => "Latin",
            Script::Han => "Han",
            Script::Devanagari => "Devanagari",
            Script::Bengali => "Bengali",
            Script::Gurmukhi => "Gurmukhi",
            Script::Gujarati => "Gujarati",
            Script::Oriya => "Oriya",
            Script::Tamil => "Tamil",
            Script::Telugu => "Telugu",
            Script::Kannada => "Kannada",
            Script::Malayalam => "Malayalam",
        }
    }

    /// First scalar of the 128-position Brahmic block, for the scripts that
    /// share the common parallel chart layout.
    pub fn brahmic_block_base(&self) -> Option<u32> {
        Some(match self {
            Script::Devanagari => 0x0900,
            Script::Bengali => 0x0980,
            Script::Gurmukhi => 0x0A00,
            Script::Gujarati => 0x0A80,
            Script::Oriya => 0x0B00,
            Script::Tamil => 0x0B80,
            Script::Telugu => 0x0C00,
            Script::Kannada => 0x0C80,
            Script::Malayalam => 0x0D00,
            _ => return None,
        })
    }
}

impl fmt::Display for Script {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Script {
    type Err = TableError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Script::ALL
            .iter()
            .copied()
            .find(|script| script.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| TableError::Syntax(format!("unknown script {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbstractChar {
    pub id: CharId,
    pub script: Script,
    pub scalar: u32,
}

impl AbstractChar {
    pub fn as_char(&self) -> Option<char> {
        char::from_u32(self.scalar)
    }
}

/// A contiguous run of rows reserved for one script (or any script).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bank {
    pub script: Option<Script>,
    pub level: Level,
    pub rows: RangeInclusive<u8>,
}

impl Bank {
    fn label(&self) -> String {
        let script = self.script.map_or("*", |s| s.name());
        format!("{script} {} {}-{}", self.level, self.rows.start(), self.rows.end())
    }

    fn overlaps(&self, other: &Bank) -> bool {
        self.rows.start() <= other.rows.end() && other.rows.start() <= self.rows.end()
    }
}

/// Per-level share of a corpus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coverage {
    pub l1_fraction: f64,
    pub l2_fraction: f64,
    pub unassigned_fraction: f64,
    pub l1_count: usize,
    pub l2_count: usize,
    pub unassigned_count: usize,
    pub total: usize,
    pub empty: bool,
}

/// Immutable bijection between characters and code points.
#[derive(Debug, Clone)]
pub struct CodeTable {
    split: LevelSplit,
    banks: Vec<Bank>,
    chars: Vec<AbstractChar>,
    codes: Vec<CodePoint>,
    by_cell: Vec<Option<u32>>,
    by_id: HashMap<CharId, u32>,
    by_scalar: HashMap<u32, u32>,
}

impl CodeTable {
    /// Parses a tab-separated table definition.
    ///
    /// Entry lines are `row, cell, hex scalar, script, name`. Lines starting
    /// with `#!` are directives (`#!levels`, `#!bank`); other `#` lines are
    /// comments.
    pub fn parse(definition: &str) -> Result<CodeTable, TableError> {
        let mut split = None;
        let mut banks = Vec::new();
        let mut entries = Vec::new();

        for (idx, raw) in definition.lines().enumerate() {
            let line = idx + 1;
            let text = raw.trim_end_matches('\r');
            if text.trim().is_empty() {
                continue;
            }
            if let Some(directive) = text.strip_prefix("#!") {
                let fields: Vec<&str> = directive.split('\t').collect();
                match fields[0] {
                    "levels" => {
                        if split.is_some() || !banks.is_empty() || !entries.is_empty() {
                            return Err(TableError::Syntax(
                                "#!levels must come before banks and entries".into(),
                            )
                            .at(line));
                        }
                        split = Some(parse_levels(&fields[1..]).map_err(|e| e.at(line))?);
                    }
                    "bank" => {
                        banks.push((line, parse_bank(&fields[1..]).map_err(|e| e.at(line))?))
                    }
                    other => {
                        return Err(
                            TableError::Syntax(format!("unknown directive {other:?}")).at(line)
                        )
                    }
                }
                continue;
            }
            if text.starts_with('#') {
                continue;
            }
            entries.push((line, parse_entry(text).map_err(|e| e.at(line))?));
        }

        let mut builder = CodeTableBuilder::new(split.unwrap_or_default());
        for (line, bank) in banks {
            builder.bank(bank).map_err(|e| e.at(line))?;
        }
        for (line, (row, cell, ch)) in entries {
            builder.assign(row, cell, ch).map_err(|e| e.at(line))?;
        }
        Ok(builder.build())
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> std::io::Result<Result<CodeTable, TableError>> {
        Ok(CodeTable::parse(&std::fs::read_to_string(path)?))
    }

    pub fn split(&self) -> LevelSplit {
        self.split
    }

    pub fn banks(&self) -> &[Bank] {
        &self.banks
    }

    pub fn len(&self) -> usize {
        self.chars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chars.is_empty()
    }

    pub fn level_count(&self, level: Level) -> usize {
        self.codes.iter().filter(|c| c.level == level).count()
    }

    /// Assigned characters with their code points, in code point order.
    pub fn iter(&self) -> impl Iterator<Item = (&AbstractChar, CodePoint)> + '_ {
        self.by_cell
            .iter()
            .flatten()
            .map(|&i| (&self.chars[i as usize], self.codes[i as usize]))
    }

    pub fn lookup_char(&self, id: &str) -> Result<CodePoint, TableError> {
        self.by_id
            .get(id)
            .map(|&i| self.codes[i as usize])
            .ok_or_else(|| TableError::NotAssigned(id.to_string()))
    }

    pub fn lookup_code(&self, code: CodePoint) -> Result<&AbstractChar, TableError> {
        self.by_cell[code.index()]
            .map(|i| &self.chars[i as usize])
            .ok_or(TableError::UnassignedCode { row: code.row, cell: code.cell })
    }

    pub fn char_by_id(&self, id: &str) -> Option<&AbstractChar> {
        self.by_id.get(id).map(|&i| &self.chars[i as usize])
    }

    /// Looks a character up by its universal scalar value.
    pub fn by_scalar(&self, scalar: u32) -> Option<(&AbstractChar, CodePoint)> {
        self.by_scalar
            .get(&scalar)
            .map(|&i| (&self.chars[i as usize], self.codes[i as usize]))
    }

    /// The bank that owns `row`, if any.
    pub fn bank_of(&self, row: u8) -> Option<&Bank> {
        self.banks.iter().find(|b| b.rows.contains(&row))
    }

    /// Share of corpus tokens falling in each level.
    ///
    /// Tokens are character ids; ids the table does not know are counted as
    /// unassigned. An empty corpus yields all-zero fractions with `empty` set.
    pub fn coverage<I, S>(&self, corpus: I) -> Coverage
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let (mut l1, mut l2, mut unassigned) = (0usize, 0usize, 0usize);
        for token in corpus {
            match self.lookup_char(token.as_ref()).map(|c| c.level) {
                Ok(Level::L1) => l1 += 1,
                Ok(Level::L2) => l2 += 1,
                Err(_) => unassigned += 1,
            }
        }
        let total = l1 + l2 + unassigned;
        if total == 0 {
            return Coverage {
                l1_fraction: 0.0,
                l2_fraction: 0.0,
                unassigned_fraction: 0.0,
                l1_count: 0,
                l2_count: 0,
                unassigned_count: 0,
                total: 0,
                empty: true,
            };
        }
        let t = total as f64;
        Coverage {
            l1_fraction: l1 as f64 / t,
            l2_fraction: l2 as f64 / t,
            unassigned_fraction: unassigned as f64 / t,
            l1_count: l1,
            l2_count: l2,
            unassigned_count: unassigned,
            total,
            empty: false,
        }
    }

    /// Serializes back into the definition format accepted by [`CodeTable::parse`].
    pub fn to_definition(&self) -> String {
        let mut out = String::new();
        let (l1, l2) = (self.split.l1_rows(), self.split.l2_rows());
        out.push_str(&format!(
            "#!levels\tL1={}-{}\tL2={}-{}\n",
            l1.start(),
            l1.end(),
            l2.start(),
            l2.end()
        ));
        for bank in &self.banks {
            out.push_str(&format!(
                "#!bank\t{}\t{}\t{}-{}\n",
                bank.script.map_or("*", |s| s.name()),
                bank.level,
                bank.rows.start(),
                bank.rows.end()
            ));
        }
        for (ch, code) in self.iter() {
            out.push_str(&format!(
                "{}\t{}\t{:04X}\t{}\t{}\n",
                code.row, code.cell, ch.scalar, ch.script, ch.id
            ));
        }
        out
    }
}

/// Incremental construction with full invariant checks.
#[derive(Debug)]
pub struct CodeTableBuilder {
    table: CodeTable,
    explicit_banks: bool,
}

impl CodeTableBuilder {
    pub fn new(split: LevelSplit) -> Self {
        CodeTableBuilder {
            table: CodeTable {
                split,
                banks: vec![
                    Bank { script: None, level: Level::L1, rows: split.l1_rows() },
                    Bank { script: None, level: Level::L2, rows: split.l2_rows() },
                ],
                chars: Vec::new(),
                codes: Vec::new(),
                by_cell: vec![None; CODE_SPACE],
                by_id: HashMap::new(),
                by_scalar: HashMap::new(),
            },
            explicit_banks: false,
        }
    }

    /// Declares a bank. The first explicit bank replaces the implicit
    /// one-bank-per-level layout.
    pub fn bank(&mut self, bank: Bank) -> Result<&mut Self, TableError> {
        if !self.table.chars.is_empty() {
            return Err(TableError::Syntax("banks must be declared before entries".into()));
        }
        if !self.explicit_banks {
            self.table.banks.clear();
            self.explicit_banks = true;
        }
        let split = self.table.split;
        let (start, end) = (*bank.rows.start(), *bank.rows.end());
        if start == 0 || start > end {
            return Err(TableError::Syntax(format!("bad bank rows {start}-{end}")));
        }
        if end > ROWS {
            return Err(TableError::RowOutOfRange(end.into()));
        }
        if split.level_of(start) != bank.level || split.level_of(end) != bank.level {
            return Err(TableError::BankLevelMismatch { bank: bank.label(), level: bank.level });
        }
        if let Some(other) = self.table.banks.iter().find(|b| b.overlaps(&bank)) {
            return Err(TableError::BankOverlap { first: other.label(), second: bank.label() });
        }
        self.table.banks.push(bank);
        Ok(self)
    }

    pub fn assign(&mut self, row: u8, cell: u8, ch: AbstractChar) -> Result<&mut Self, TableError> {
        let code = CodePoint::new(row, cell, self.table.split)?;
        if ch.scalar < 0x80 {
            return Err(TableError::AsciiScalar(ch.scalar));
        }
        let bank = self.table.bank_of(row).ok_or(TableError::Unbanked(row))?;
        if let Some(script) = bank.script {
            if script != ch.script {
                return Err(TableError::BankScriptMismatch {
                    id: ch.id,
                    script: ch.script,
                    row,
                    bank: bank.label(),
                });
            }
        }
        if let Some(existing) = self.table.by_cell[code.index()] {
            return Err(TableError::DuplicateCode {
                row,
                cell,
                existing: self.table.chars[existing as usize].id.clone(),
            });
        }
        if self.table.by_id.contains_key(&ch.id) {
            return Err(TableError::DuplicateChar(ch.id.to_string()));
        }
        if self.table.by_scalar.contains_key(&ch.scalar) {
            return Err(TableError::DuplicateChar(format!("U+{:04X}", ch.scalar)));
        }
        let index = self.table.chars.len() as u32;
        self.table.by_cell[code.index()] = Some(index);
        self.table.by_id.insert(ch.id.clone(), index);
        self.table.by_scalar.insert(ch.scalar, index);
        self.table.chars.push(ch);
        self.table.codes.push(code);
        Ok(self)
    }

    pub fn build(self) -> CodeTable {
        self.table
    }
}

fn parse_number(field: &str, what: &str) -> Result<u32, TableError> {
    field
        .trim()
        .parse()
        .map_err(|_| TableError::Syntax(format!("bad {what} {field:?}")))
}

fn parse_row(field: &str) -> Result<u8, TableError> {
    let row = parse_number(field, "row")?;
    if !(1..=ROWS as u32).contains(&row) {
        return Err(TableError::RowOutOfRange(row));
    }
    Ok(row as u8)
}

fn parse_row_range(field: &str) -> Result<RangeInclusive<u8>, TableError> {
    let (a, b) = field
        .split_once('-')
        .ok_or_else(|| TableError::Syntax(format!("bad row range {field:?}")))?;
    Ok(parse_row(a)?..=parse_row(b)?)
}

fn parse_levels(fields: &[&str]) -> Result<LevelSplit, TableError> {
    let mut l1 = None;
    let mut l2 = None;
    for field in fields {
        match field.split_once('=') {
            Some(("L1", range)) => l1 = Some(parse_row_range(range)?),
            Some(("L2", range)) => l2 = Some(parse_row_range(range)?),
            _ => return Err(TableError::Syntax(format!("bad level field {field:?}"))),
        }
    }
    let (Some(l1), Some(l2)) = (l1, l2) else {
        return Err(TableError::Syntax("#!levels needs L1= and L2= ranges".into()));
    };
    let split = LevelSplit::new(*l1.end())?;
    if l1 != split.l1_rows() || l2 != split.l2_rows() {
        return Err(TableError::Syntax(
            "levels must partition rows 1..=94 with L1 first".into(),
        ));
    }
    Ok(split)
}

fn parse_bank(fields: &[&str]) -> Result<Bank, TableError> {
    let [script, level, rows] = fields else {
        return Err(TableError::Syntax("#!bank needs script, level and rows".into()));
    };
    let script = match *script {
        "*" => None,
        s => Some(s.parse()?),
    };
    Ok(Bank { script, level: level.parse()?, rows: parse_row_range(rows)? })
}

fn parse_entry(text: &str) -> Result<(u8, u8, AbstractChar), TableError> {
    let fields: Vec<&str> = text.split('\t').collect();
    let [row, cell, scalar, script, name] = fields[..] else {
        return Err(TableError::Syntax(format!(
            "expected 5 tab-separated fields, found {}",
            fields.len()
        )));
    };
    let row = parse_row(row)?;
    let cell = parse_number(cell, "cell")?;
    if !(1..=CELLS as u32).contains(&cell) {
        return Err(TableError::CellOutOfRange(cell));
    }
    let scalar = u32::from_str_radix(scalar.trim(), 16)
        .map_err(|_| TableError::Syntax(format!("bad scalar {scalar:?}")))?;
    if char::from_u32(scalar).is_none() {
        return Err(TableError::Syntax(format!("U+{scalar:04X} is not a scalar value")));
    }
    let name = name.trim();
    if name.is_empty() || name.contains(char::is_whitespace) {
        return Err(TableError::Syntax(format!("bad character name {name:?}")));
    }
    Ok((
        row,
        cell as u8,
        AbstractChar { id: CharId::new(name), script: script.trim().parse()?, scalar },
    ))
}

//! Phonetic candidate input.
//!
//! A [`ConversionTable`] maps roman keys to character sequences. As keys
//! are typed into an [`ImeSession`], every table entry whose key equals or
//! extends the buffer becomes a candidate. Candidates are ranked exact
//! matches first, then by descending frequency, then by ascending code
//! point sequence; an output reachable through several keys is listed once
//! at its best rank.

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use crate::codetable::{CharId, CodePoint, CodeTable};

/// Candidates shown per page.
pub const PAGE_SIZE: usize = 9;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ImeError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: duplicate entry {key:?} -> {output}")]
    DuplicateEntry { line: usize, key: String, output: String },
    #[error("line {line}: {id} is not in the code table")]
    UnknownChar { line: usize, id: String },
    #[error("IndexOutOfRange: candidate {index} of {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("NonPrintableKey: {0:?} is not printable ASCII")]
    NonPrintableKey(char),
}

impl ImeError {
    pub fn name(&self) -> &'static str {
        match self {
            ImeError::Syntax { .. } => "Syntax",
            ImeError::DuplicateEntry { .. } => "DuplicateEntry",
            ImeError::UnknownChar { .. } => "UnknownChar",
            ImeError::IndexOutOfRange { .. } => "IndexOutOfRange",
            ImeError::NonPrintableKey(_) => "NonPrintableKey",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub key: String,
    pub output: Vec<CharId>,
    pub frequency: u32,
    codes: Vec<CodePoint>,
}

impl Entry {
    /// Code points of the output, the final ranking key.
    pub fn codes(&self) -> &[CodePoint] {
        &self.codes
    }
}

/// Immutable key → output table with a prefix index over keys.
#[derive(Debug, Clone)]
pub struct ConversionTable {
    code_table: Arc<CodeTable>,
    entries: Vec<Entry>,
    index: BTreeMap<String, Vec<usize>>,
}

impl ConversionTable {
    /// Parses `key<TAB>char ids<TAB>frequency` lines; the frequency column
    /// may be omitted and defaults to 0.
    pub fn parse(text: &str, code_table: Arc<CodeTable>) -> Result<ConversionTable, ImeError> {
        let mut entries = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let text = raw.trim_end_matches('\r');
            if text.trim().is_empty() || text.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = text.split('\t').collect();
            let syntax = |message: String| ImeError::Syntax { line, message };
            let (key, ids, frequency) = match fields[..] {
                [key, ids] => (key, ids, 0),
                [key, ids, freq] => (
                    key,
                    ids,
                    freq.trim().parse().map_err(|_| syntax(format!("bad frequency {freq:?}")))?,
                ),
                _ => return Err(syntax(format!("expected 2 or 3 fields, found {}", fields.len()))),
            };
            if key.is_empty() || !key.bytes().all(|b| b.is_ascii_alphabetic()) {
                return Err(syntax(format!("key {key:?} must be non-empty roman letters")));
            }
            let output: Vec<CharId> = ids.split_whitespace().map(CharId::new).collect();
            if output.is_empty() {
                return Err(syntax("empty output".into()));
            }
            entries.push((line, key.to_string(), output, frequency));
        }
        ConversionTable::build(entries, code_table)
    }

    pub fn from_entries(
        entries: impl IntoIterator<Item = (String, Vec<CharId>, u32)>,
        code_table: Arc<CodeTable>,
    ) -> Result<ConversionTable, ImeError> {
        let entries = entries.into_iter().map(|(k, o, f)| (0, k, o, f)).collect();
        ConversionTable::build(entries, code_table)
    }

    fn build(
        raw: Vec<(usize, String, Vec<CharId>, u32)>,
        code_table: Arc<CodeTable>,
    ) -> Result<ConversionTable, ImeError> {
        let mut entries = Vec::with_capacity(raw.len());
        let mut index: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        let mut pairs = HashSet::new();
        for (line, key, output, frequency) in raw {
            let codes = output
                .iter()
                .map(|id| {
                    code_table
                        .lookup_char(id.as_str())
                        .map_err(|_| ImeError::UnknownChar { line, id: id.to_string() })
                })
                .collect::<Result<Vec<_>, _>>()?;
            if !pairs.insert((key.clone(), output.clone())) {
                let output = output.iter().map(CharId::as_str).collect::<Vec<_>>().join(" ");
                return Err(ImeError::DuplicateEntry { line, key, output });
            }
            index.entry(key.clone()).or_default().push(entries.len());
            entries.push(Entry { key, output, frequency, codes });
        }
        Ok(ConversionTable { code_table, entries, index })
    }

    pub fn code_table(&self) -> &Arc<CodeTable> {
        &self.code_table
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    /// Ranked candidates for `buffer`.
    pub fn lookup(&self, buffer: &str) -> Vec<Candidate> {
        if buffer.is_empty() {
            return Vec::new();
        }
        let mut found: Vec<(bool, &Entry)> = self
            .index
            .range::<str, _>((std::ops::Bound::Included(buffer), std::ops::Bound::Unbounded))
            .take_while(|(key, _)| key.starts_with(buffer))
            .flat_map(|(key, ids)| ids.iter().map(move |&i| (key.as_str() == buffer, &self.entries[i])))
            .collect();
        found.sort_by(|(ea, a), (eb, b)| {
            eb.cmp(ea)
                .then(b.frequency.cmp(&a.frequency))
                .then_with(|| a.codes.cmp(&b.codes))
                .then_with(|| a.key.cmp(&b.key))
        });
        let mut seen = HashSet::new();
        found
            .into_iter()
            .filter(|(_, e)| seen.insert(&e.output))
            .map(|(exact, e)| Candidate {
                key: e.key.clone(),
                output: e.output.clone(),
                frequency: e.frequency,
                exact,
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub key: String,
    pub output: Vec<CharId>,
    pub frequency: u32,
    pub exact: bool,
}

/// A committed unit: a table character or a raw ASCII byte.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Committed {
    Char(CharId),
    Ascii(u8),
}

/// One user's typing state. Not shared; wrap it in a lock to share.
#[derive(Debug, Clone)]
pub struct ImeSession {
    table: Arc<ConversionTable>,
    buffer: String,
    candidates: Vec<Candidate>,
    committed: Vec<Committed>,
}

impl PartialEq for ImeSession {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.table, &other.table)
            && self.buffer == other.buffer
            && self.candidates == other.candidates
            && self.committed == other.committed
    }
}

impl ImeSession {
    pub fn new(table: Arc<ConversionTable>) -> Self {
        ImeSession { table, buffer: String::new(), candidates: Vec::new(), committed: Vec::new() }
    }

    pub fn buffer(&self) -> &str {
        &self.buffer
    }

    pub fn candidates(&self) -> &[Candidate] {
        &self.candidates
    }

    pub fn committed(&self) -> &[Committed] {
        &self.committed
    }

    pub fn page_count(&self) -> usize {
        self.candidates.len().div_ceil(PAGE_SIZE)
    }

    /// The visible slice of candidates on page `page` (0-based).
    pub fn page(&self, page: usize) -> &[Candidate] {
        let start = (page * PAGE_SIZE).min(self.candidates.len());
        let end = (start + PAGE_SIZE).min(self.candidates.len());
        &self.candidates[start..end]
    }

    pub fn feed_key(&mut self, key: char) -> Result<&mut Self, ImeError> {
        if !(key.is_ascii_graphic() || key == ' ') {
            return Err(ImeError::NonPrintableKey(key));
        }
        self.buffer.push(key);
        self.refresh();
        Ok(self)
    }

    pub fn backspace(&mut self) -> &mut Self {
        if self.buffer.pop().is_some() {
            self.refresh();
        }
        self
    }

    pub fn select(&mut self, index: usize) -> Result<&mut Self, ImeError> {
        let candidate = self
            .candidates
            .get(index)
            .ok_or(ImeError::IndexOutOfRange { index, len: self.candidates.len() })?;
        self.committed.extend(candidate.output.iter().cloned().map(Committed::Char));
        self.buffer.clear();
        self.candidates.clear();
        Ok(self)
    }

    /// Commits the raw buffer as ASCII.
    pub fn commit_raw(&mut self) -> &mut Self {
        self.committed.extend(self.buffer.bytes().map(Committed::Ascii));
        self.buffer.clear();
        self.candidates.clear();
        self
    }

    /// Committed text as a string, using the table's scalars.
    pub fn committed_text(&self) -> String {
        let table = self.table.code_table();
        self.committed
            .iter()
            .map(|c| match c {
                Committed::Ascii(b) => *b as char,
                Committed::Char(id) => table
                    .char_by_id(id.as_str())
                    .and_then(|c| c.as_char())
                    .expect("conversion table outputs are checked against the code table"),
            })
            .collect()
    }

    fn refresh(&mut self) {
        self.candidates = self.table.lookup(&self.buffer);
    }
}

//! Operations shared by the command line and the HTTP service, so both
//! produce the same bytes for the same input.

use indic_dbcs::anusaaraka::AnusaarakaError;
use indic_dbcs::codec::{
    decode_internal, encode_internal, interchange_to_internal, internal_to_interchange, transliterate_parallel,
    CodecError, Decoder, Fallback,
};
use indic_dbcs::codetable::Coverage;
use indic_dbcs::fontlib::FontSize;
use indic_dbcs::ime::{ImeError, ImeSession};
use indic_dbcs::shipped::{RenderError, Resources};
use indic_dbcs::{CharId, CodeTable, Script};
use serde::Serialize;

/// Replacement for undecodable units in lossy mode.
pub const REPLACEMENT: char = '\u{FFFD}';

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error(transparent)]
    Gloss(#[from] AnusaarakaError),
    #[error(transparent)]
    Ime(#[from] ImeError),
    #[error("{0}")]
    BadRequest(String),
    #[error("UnknownSession: {0}")]
    UnknownSession(String),
}

impl ServiceError {
    /// Error name of the underlying module error.
    pub fn name(&self) -> &'static str {
        match self {
            ServiceError::Codec(e) => e.name(),
            ServiceError::Render(e) => e.name(),
            ServiceError::Gloss(e) => e.name(),
            ServiceError::Ime(e) => e.name(),
            ServiceError::BadRequest(_) => "BadRequest",
            ServiceError::UnknownSession(_) => "UnknownSession",
        }
    }
}

pub fn encode(res: &Resources, text: &str) -> Result<Vec<u8>, ServiceError> {
    Ok(encode_internal(text, &res.table)?)
}

pub fn decode(res: &Resources, bytes: &[u8], lossy: bool) -> Result<String, ServiceError> {
    Ok(if lossy { Decoder::lossy(REPLACEMENT).decode(bytes, &res.table)? } else { decode_internal(bytes, &res.table)? })
}

/// Internal to interchange form, or back when `reverse` is set.
pub fn interchange(bytes: &[u8], reverse: bool) -> Result<Vec<u8>, ServiceError> {
    Ok(if reverse { interchange_to_internal(bytes)? } else { internal_to_interchange(bytes)? })
}

pub fn translit(
    res: &Resources,
    text: &str,
    from: Script,
    to: Script,
    fallback: Fallback,
) -> Result<String, ServiceError> {
    Ok(transliterate_parallel(text, from, to, &res.table, fallback)?)
}

pub fn font_size(px: u16) -> Result<FontSize, ServiceError> {
    FontSize::from_px(px).ok_or_else(|| ServiceError::BadRequest(format!("unsupported size {px} (16, 24, 48)")))
}

/// PBM P4 bytes of one shaped line.
pub fn render(res: &Resources, text: &str, px: u16) -> Result<Vec<u8>, ServiceError> {
    Ok(res.render(text, font_size(px)?)?.to_pbm())
}

pub fn gloss(res: &Resources, pair: &str, sentence: &str) -> Result<String, ServiceError> {
    Ok(res.gloss.gloss_sentence(pair, sentence)?)
}

/// Coverage of a corpus given as text (every non-space character counts)
/// or, with `ids`, as whitespace-separated character ids.
pub fn coverage(table: &CodeTable, corpus: &str, ids: bool) -> Coverage {
    if ids {
        table.coverage(corpus.split_whitespace())
    } else {
        let tokens: Vec<String> = corpus
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match table.by_scalar(c as u32) {
                Some((ch, _)) => ch.id.to_string(),
                None => format!("U+{:04X}", c as u32),
            })
            .collect();
        table.coverage(tokens)
    }
}

pub fn format_coverage(c: &Coverage) -> String {
    format!(
        "tokens\t{}\nl1\t{}\t{:.4}\nl2\t{}\t{:.4}\nunassigned\t{}\t{:.4}\n",
        c.total, c.l1_count, c.l1_fraction, c.l2_count, c.l2_fraction, c.unassigned_count, c.unassigned_fraction
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CandidateView {
    pub index: usize,
    pub key: String,
    pub output: Vec<String>,
    pub text: String,
    pub frequency: u32,
    pub exact: bool,
}

/// Session state as returned by every `/ime` endpoint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ImeState {
    pub id: String,
    pub buffer: String,
    pub candidates: Vec<CandidateView>,
    pub page_size: usize,
    pub committed: String,
}

fn id_text(table: &CodeTable, ids: &[CharId]) -> String {
    ids.iter().filter_map(|id| table.char_by_id(id.as_str()).and_then(|c| c.as_char())).collect()
}

pub fn ime_state(id: &str, session: &ImeSession, table: &CodeTable) -> ImeState {
    ImeState {
        id: id.to_string(),
        buffer: session.buffer().to_string(),
        candidates: session
            .candidates()
            .iter()
            .enumerate()
            .map(|(index, c)| CandidateView {
                index,
                key: c.key.clone(),
                output: c.output.iter().map(|o| o.to_string()).collect(),
                text: id_text(table, &c.output),
                frequency: c.frequency,
                exact: c.exact,
            })
            .collect(),
        page_size: indic_dbcs::ime::PAGE_SIZE,
        committed: session.committed_text(),
    }
}

//! Double-byte text processing for Indic scripts.
//!
//! The crate is organised the way a CCDOS-style system is: a two-level
//! 94×94 code space ([`codetable`]), a byte codec for internal and
//! interchange streams ([`codec`]), packed bitmap font banks addressed by
//! code position ([`fontlib`]), a rule-driven glyph shaper ([`shaping`]),
//! a phonetic candidate input method ([`ime`]) and an order-preserving
//! word gloss engine ([`anusaaraka`]).

pub mod anusaaraka;
pub mod codec;
pub mod codetable;
pub mod fontlib;
pub mod ime;
pub mod shaping;
pub mod shipped;

pub use codetable::{AbstractChar, CharId, CodePoint, CodeTable, Level, Script};

//! Rule-driven glyph shaping.
//!
//! A [`RuleSet`] maps character sequences to positioned glyph sequences.
//! Shaping is a single left-to-right pass: at each position the longest
//! matching rule pattern wins (earlier rules win ties), and a character no
//! rule covers gets its own code point as a glyph at the pen with a full em
//! advance.
//!
//! Every rule set is checked at load time to be uniquely decodable, so a
//! shaped glyph run can always be decomposed back into the characters it
//! came from.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::codetable::{CharId, CodePoint, CodeTable};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ShapeError {
    #[error("line {line}: {error}")]
    Line {
        line: usize,
        #[source]
        error: Box<ShapeError>,
    },
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("UnknownChar: {id} at position {index} has no glyph")]
    UnknownChar { id: String, index: usize },
    #[error("unknown character {0} in rule")]
    UnknownRuleChar(String),
    #[error("rule has an empty pattern or replacement")]
    EmptyRule,
    #[error("conjunct pattern must contain a virama")]
    ConjunctWithoutVirama,
    #[error("offset ({dx}, {dy}) exceeds the {em}px em")]
    OffsetOutOfRange { dx: i16, dy: i16, em: u16 },
    #[error("{kind} rule must emit exactly the glyphs of its pattern")]
    GlyphsNotConserved { kind: RuleKind },
    #[error("pre-base rule must emit the glyph of its last character first")]
    NotPreBase,
    #[error("rule set is not invertible: {0}")]
    NotInvertible(String),
    #[error("NotDecomposable: glyph run cannot be parsed at glyph {index}")]
    NotDecomposable { index: usize },
}

impl ShapeError {
    pub fn kind(&self) -> &ShapeError {
        match self {
            ShapeError::Line { error, .. } => error.kind(),
            other => other,
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind() {
            ShapeError::UnknownChar { .. } => "UnknownChar",
            ShapeError::NotDecomposable { .. } => "NotDecomposable",
            _ => "BadRules",
        }
    }

    fn at(self, line: usize) -> ShapeError {
        ShapeError::Line { line, error: Box::new(self) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleKind {
    PreBaseReorder,
    AttachAbove,
    AttachBelow,
    ConjunctSubst,
}

impl RuleKind {
    fn substitutes(&self) -> bool {
        matches!(self, RuleKind::ConjunctSubst)
    }
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RuleKind::PreBaseReorder => "PreBaseReorder",
            RuleKind::AttachAbove => "AttachAbove",
            RuleKind::AttachBelow => "AttachBelow",
            RuleKind::ConjunctSubst => "ConjunctSubst",
        })
    }
}

impl FromStr for RuleKind {
    type Err = ShapeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "PreBaseReorder" => Ok(RuleKind::PreBaseReorder),
            "AttachAbove" => Ok(RuleKind::AttachAbove),
            "AttachBelow" => Ok(RuleKind::AttachBelow),
            "ConjunctSubst" => Ok(RuleKind::ConjunctSubst),
            _ => Err(ShapeError::Syntax(format!("unknown rule kind {s:?}"))),
        }
    }
}

/// A glyph placed relative to the pen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PositionedGlyph {
    pub glyph: CodePoint,
    pub dx: i16,
    pub dy: i16,
    pub advance: u16,
}

impl PositionedGlyph {
    pub fn at_pen(glyph: CodePoint, advance: u16) -> Self {
        PositionedGlyph { glyph, dx: 0, dy: 0, advance }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShapingRule {
    pub kind: RuleKind,
    pub pattern: Vec<CharId>,
    pub replacement: Vec<PositionedGlyph>,
}

type Word = Vec<PositionedGlyph>;

/// An immutable, validated set of shaping rules bound to a code table.
#[derive(Debug, Clone)]
pub struct RuleSet {
    em: u16,
    rules: Vec<ShapingRule>,
    defaults: HashMap<CharId, CodePoint>,
    /// Rule indices keyed by first pattern char, longest pattern first.
    by_first: HashMap<CharId, Vec<usize>>,
    /// Decoding side: every codeword keyed by its first glyph.
    codewords: HashMap<PositionedGlyph, Vec<(Word, Vec<CharId>)>>,
    glyph_cells: BTreeSet<CodePoint>,
}

impl RuleSet {
    pub const DEFAULT_EM: u16 = 16;

    /// Parses a rule file against `table`.
    ///
    /// Each line is `kind<TAB>pattern ids<TAB>replacement glyphs`, space
    /// separated within a column. A replacement glyph is `NAME` or
    /// `NAME@dx,dy[,advance]`, where `NAME` is a character id or a raw
    /// `row.cell` glyph cell. Directives: `#!em <px>` and
    /// `#!virama <id>...`.
    pub fn parse(text: &str, table: &CodeTable) -> Result<RuleSet, ShapeError> {
        let mut em = Self::DEFAULT_EM;
        let mut viramas: Option<Vec<CharId>> = None;
        let mut rules = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let text = raw.trim_end_matches('\r');
            if text.trim().is_empty() {
                continue;
            }
            if let Some(directive) = text.strip_prefix("#!") {
                let mut fields = directive.split(['\t', ' ']).filter(|f| !f.is_empty());
                match fields.next() {
                    Some("em") => {
                        em = fields
                            .next()
                            .and_then(|v| v.parse().ok())
                            .filter(|&v| v > 0)
                            .ok_or_else(|| ShapeError::Syntax("bad #!em".into()).at(line))?;
                    }
                    Some("virama") => viramas = Some(fields.map(CharId::new).collect()),
                    other => {
                        return Err(ShapeError::Syntax(format!("unknown directive {other:?}")).at(line))
                    }
                }
                continue;
            }
            if text.starts_with('#') {
                continue;
            }
            rules.push((line, parse_rule(text, table, em).map_err(|e| e.at(line))?));
        }
        let viramas = viramas.unwrap_or_else(|| {
            table
                .iter()
                .filter(|(c, _)| c.id.as_str().ends_with("VIRAMA"))
                .map(|(c, _)| c.id.clone())
                .collect()
        });
        RuleSet::build(em, &viramas, rules, table)
    }

    /// Builds a rule set from already-parsed rules.
    pub fn from_rules(
        em: u16,
        viramas: &[CharId],
        rules: Vec<ShapingRule>,
        table: &CodeTable,
    ) -> Result<RuleSet, ShapeError> {
        RuleSet::build(em, viramas, rules.into_iter().map(|r| (0, r)).collect(), table)
    }

    fn build(
        em: u16,
        viramas: &[CharId],
        rules: Vec<(usize, ShapingRule)>,
        table: &CodeTable,
    ) -> Result<RuleSet, ShapeError> {
        let defaults: HashMap<CharId, CodePoint> =
            table.iter().map(|(c, code)| (c.id.clone(), code)).collect();
        let wrap = |line: usize, e: ShapeError| if line == 0 { e } else { e.at(line) };
        for (line, rule) in &rules {
            check_rule(rule, em, viramas, &defaults).map_err(|e| wrap(*line, e))?;
        }
        let rules: Vec<ShapingRule> = rules.into_iter().map(|(_, r)| r).collect();

        let mut by_first: HashMap<CharId, Vec<usize>> = HashMap::new();
        for (i, rule) in rules.iter().enumerate() {
            by_first.entry(rule.pattern[0].clone()).or_default().push(i);
        }
        for candidates in by_first.values_mut() {
            // Stable sort keeps file order among equal lengths.
            candidates.sort_by_key(|&i| std::cmp::Reverse(rules[i].pattern.len()));
        }

        let mut all: Vec<(Word, Vec<CharId>)> = defaults
            .iter()
            .map(|(id, &code)| (vec![PositionedGlyph::at_pen(code, em)], vec![id.clone()]))
            .collect();
        all.extend(rules.iter().map(|r| (r.replacement.clone(), r.pattern.clone())));
        check_unique_decoding(&all)?;

        let mut codewords: HashMap<PositionedGlyph, Vec<(Word, Vec<CharId>)>> = HashMap::new();
        for (word, chars) in all {
            codewords.entry(word[0]).or_default().push((word, chars));
        }
        let glyph_cells = rules
            .iter()
            .flat_map(|r| r.replacement.iter().map(|g| g.glyph))
            .filter(|&g| table.lookup_code(g).is_err())
            .collect();
        Ok(RuleSet { em, rules, defaults, by_first, codewords, glyph_cells })
    }

    pub fn em(&self) -> u16 {
        self.em
    }

    pub fn rules(&self) -> &[ShapingRule] {
        &self.rules
    }

    /// Glyph-only cells (not assigned to any character) the rules emit.
    pub fn glyph_cells(&self) -> impl Iterator<Item = CodePoint> + '_ {
        self.glyph_cells.iter().copied()
    }

    /// Distinct characters appearing in rule patterns, in first-seen order.
    pub fn alphabet(&self) -> Vec<CharId> {
        let mut seen = std::collections::HashSet::new();
        self.rules
            .iter()
            .flat_map(|r| r.pattern.iter())
            .filter(|c| seen.insert((*c).clone()))
            .cloned()
            .collect()
    }

    /// Shapes a character sequence into positioned glyphs.
    pub fn shape<S: AsRef<str>>(&self, chars: &[S]) -> Result<Vec<PositionedGlyph>, ShapeError> {
        let mut out = Vec::with_capacity(chars.len());
        let mut i = 0;
        while i < chars.len() {
            let rest = &chars[i..];
            let head = rest[0].as_ref();
            let matched = self.by_first.get(head).and_then(|candidates| {
                candidates.iter().map(|&r| &self.rules[r]).find(|rule| {
                    rule.pattern.len() <= rest.len()
                        && rule.pattern.iter().zip(rest).all(|(p, c)| p.as_str() == c.as_ref())
                })
            });
            match matched {
                Some(rule) => {
                    out.extend_from_slice(&rule.replacement);
                    i += rule.pattern.len();
                }
                None => {
                    let code = self
                        .defaults
                        .get(head)
                        .ok_or_else(|| ShapeError::UnknownChar { id: head.to_string(), index: i })?;
                    out.push(PositionedGlyph::at_pen(*code, self.em));
                    i += 1;
                }
            }
        }
        Ok(out)
    }

    /// Recovers the characters a glyph run was shaped from.
    pub fn decompose(&self, glyphs: &[PositionedGlyph]) -> Result<Vec<CharId>, ShapeError> {
        // back[j] = (start, codeword) of the parse step ending at j.
        let mut back: Vec<Option<(usize, &[CharId])>> = vec![None; glyphs.len() + 1];
        let mut reachable = vec![false; glyphs.len() + 1];
        reachable[0] = true;
        let mut furthest = 0;
        for i in 0..glyphs.len() {
            if !reachable[i] {
                continue;
            }
            furthest = i;
            for (word, chars) in self.codewords.get(&glyphs[i]).into_iter().flatten() {
                let end = i + word.len();
                if end <= glyphs.len() && glyphs[i..end] == word[..] && !reachable[end] {
                    reachable[end] = true;
                    back[end] = Some((i, chars));
                }
            }
        }
        if !reachable[glyphs.len()] {
            return Err(ShapeError::NotDecomposable { index: furthest });
        }
        let mut pieces = Vec::new();
        let mut j = glyphs.len();
        while j > 0 {
            let (start, chars) = back[j].expect("reachable position has a back pointer");
            pieces.push(chars);
            j = start;
        }
        Ok(pieces.into_iter().rev().flatten().cloned().collect())
    }
}

/// Rescales pixel positions designed for `from_em` to a `to_px` font.
pub fn scale_positions(glyphs: &[PositionedGlyph], from_em: u16, to_px: u16) -> Vec<PositionedGlyph> {
    let scale = |v: i64| -> i64 {
        let num = v * to_px as i64;
        let den = from_em as i64;
        // Round half away from zero.
        if num >= 0 {
            (num + den / 2) / den
        } else {
            -((-num + den / 2) / den)
        }
    };
    glyphs
        .iter()
        .map(|g| PositionedGlyph {
            glyph: g.glyph,
            dx: scale(g.dx.into()) as i16,
            dy: scale(g.dy.into()) as i16,
            advance: scale(g.advance.into()) as u16,
        })
        .collect()
}

fn parse_rule(text: &str, table: &CodeTable, em: u16) -> Result<ShapingRule, ShapeError> {
    let fields: Vec<&str> = text.split('\t').collect();
    let [kind, pattern, replacement] = fields[..] else {
        return Err(ShapeError::Syntax(format!(
            "expected 3 tab-separated fields, found {}",
            fields.len()
        )));
    };
    let kind: RuleKind = kind.trim().parse()?;
    let pattern: Vec<CharId> = pattern.split_whitespace().map(CharId::new).collect();
    let replacement = replacement
        .split_whitespace()
        .map(|spec| parse_glyph_spec(spec, table, em))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ShapingRule { kind, pattern, replacement })
}

fn parse_glyph_spec(spec: &str, table: &CodeTable, em: u16) -> Result<PositionedGlyph, ShapeError> {
    let (name, position) = match spec.split_once('@') {
        Some((n, p)) => (n, Some(p)),
        None => (spec, None),
    };
    let glyph = match name.split_once('.') {
        Some((row, cell)) if row.bytes().all(|b| b.is_ascii_digit()) => {
            let parse = |v: &str| v.parse::<u8>().map_err(|_| ShapeError::Syntax(format!("bad cell {name:?}")));
            CodePoint::new(parse(row)?, parse(cell)?, table.split())
                .map_err(|e| ShapeError::Syntax(e.to_string()))?
        }
        _ => table.lookup_char(name).map_err(|_| ShapeError::UnknownRuleChar(name.to_string()))?,
    };
    let mut g = PositionedGlyph::at_pen(glyph, em);
    if let Some(position) = position {
        let nums: Vec<&str> = position.split(',').collect();
        let bad = || ShapeError::Syntax(format!("bad glyph position {spec:?}"));
        match nums[..] {
            [dx, dy] | [dx, dy, _] => {
                g.dx = dx.parse().map_err(|_| bad())?;
                g.dy = dy.parse().map_err(|_| bad())?;
            }
            _ => return Err(bad()),
        }
        if let [_, _, advance] = nums[..] {
            g.advance = advance.parse().map_err(|_| bad())?;
        }
    }
    Ok(g)
}

fn check_rule(
    rule: &ShapingRule,
    em: u16,
    viramas: &[CharId],
    defaults: &HashMap<CharId, CodePoint>,
) -> Result<(), ShapeError> {
    if rule.pattern.is_empty() || rule.replacement.is_empty() {
        return Err(ShapeError::EmptyRule);
    }
    let mut pattern_glyphs = Vec::with_capacity(rule.pattern.len());
    for id in &rule.pattern {
        let code = defaults.get(id).ok_or_else(|| ShapeError::UnknownRuleChar(id.to_string()))?;
        pattern_glyphs.push(*code);
    }
    for g in &rule.replacement {
        if g.dx.unsigned_abs() > em || g.dy.unsigned_abs() > em {
            return Err(ShapeError::OffsetOutOfRange { dx: g.dx, dy: g.dy, em });
        }
    }
    if rule.kind == RuleKind::ConjunctSubst && !rule.pattern.iter().any(|c| viramas.contains(c)) {
        return Err(ShapeError::ConjunctWithoutVirama);
    }
    if !rule.kind.substitutes() {
        let mut emitted: Vec<CodePoint> = rule.replacement.iter().map(|g| g.glyph).collect();
        let mut expected = pattern_glyphs.clone();
        emitted.sort();
        expected.sort();
        if emitted != expected {
            return Err(ShapeError::GlyphsNotConserved { kind: rule.kind });
        }
    }
    if rule.kind == RuleKind::PreBaseReorder
        && (rule.pattern.len() < 2 || rule.replacement[0].glyph != *pattern_glyphs.last().unwrap())
    {
        return Err(ShapeError::NotPreBase);
    }
    Ok(())
}

/// Sardinas–Patterson test over glyph codewords.
///
/// Fails if some glyph sequence has two different parses into codewords,
/// which would make decomposition ambiguous.
fn check_unique_decoding(words: &[(Word, Vec<CharId>)]) -> Result<(), ShapeError> {
    let mut seen: HashMap<&[PositionedGlyph], &[CharId]> = HashMap::new();
    for (word, chars) in words {
        if let Some(other) = seen.insert(word, chars) {
            return Err(ShapeError::NotInvertible(format!(
                "{} and {} shape to the same glyphs",
                join(other),
                join(chars)
            )));
        }
    }
    let mut by_first: HashMap<PositionedGlyph, Vec<&[PositionedGlyph]>> = HashMap::new();
    for (word, _) in words {
        by_first.entry(word[0]).or_default().push(word);
    }

    // Dangling suffixes: u = v·w for codewords v ≠ u.
    let mut current: BTreeSet<Word> = BTreeSet::new();
    for (u, _) in words {
        for v in by_first.get(&u[0]).into_iter().flatten() {
            if v.len() < u.len() && u.starts_with(v) {
                current.insert(u[v.len()..].to_vec());
            }
        }
    }
    let mut all_seen: BTreeSet<Word> = BTreeSet::new();
    while !current.is_empty() {
        let mut next = BTreeSet::new();
        for s in &current {
            if seen.contains_key(s.as_slice()) {
                return Err(ShapeError::NotInvertible(format!(
                    "glyph run beginning at {} has two parses",
                    s[0].glyph
                )));
            }
            for c in by_first.get(&s[0]).into_iter().flatten() {
                if c.len() < s.len() && s.starts_with(c) {
                    next.insert(s[c.len()..].to_vec());
                } else if s.len() < c.len() && c.starts_with(s) {
                    next.insert(c[s.len()..].to_vec());
                }
            }
            all_seen.insert(s.clone());
        }
        next.retain(|w| !all_seen.contains(w));
        current = next;
    }
    Ok(())
}

fn join(ids: &[CharId]) -> String {
    ids.iter().map(CharId::as_str).collect::<Vec<_>>().join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codetable::LevelSplit;

    fn raw_cell(row: u8, cell: u8) -> CodePoint {
        CodePoint::new(row, cell, LevelSplit::default()).unwrap()
    }

    fn table() -> CodeTable {
        CodeTable::parse(
            "16\t22\t0915\tDevanagari\tKA\n\
             16\t56\t0937\tDevanagari\tSSA\n\
             16\t64\t093F\tDevanagari\tI_MATRA\n\
             16\t78\t094D\tDevanagari\tVIRAMA\n\
             16\t3\t0902\tDevanagari\tANUSVARA\n",
        )
        .unwrap()
    }

    const RULES: &str = "#!em\t16\n\
        PreBaseReorder\tKA I_MATRA\tI_MATRA@0,0,8 KA\n\
        ConjunctSubst\tKA VIRAMA SSA\t18.1\n\
        AttachAbove\tANUSVARA\tANUSVARA@-16,0,0\n\
        AttachBelow\tVIRAMA\tVIRAMA@-16,0,0\n";

    fn ids(s: &str) -> Vec<CharId> {
        s.split_whitespace().map(CharId::new).collect()
    }

    #[test]
    fn identity_for_plain_consonant() {
        let t = table();
        let rules = RuleSet::parse(RULES, &t).unwrap();
        let out = rules.shape(&["KA"]).unwrap();
        assert_eq!(out, vec![PositionedGlyph::at_pen(t.lookup_char("KA").unwrap(), 16)]);
    }

    #[test]
    fn pre_base_matra_comes_first() {
        let t = table();
        let rules = RuleSet::parse(RULES, &t).unwrap();
        let out = rules.shape(&ids("KA I_MATRA")).unwrap();
        assert_eq!(out[0].glyph, t.lookup_char("I_MATRA").unwrap());
        assert_eq!(out[1].glyph, t.lookup_char("KA").unwrap());
        assert_eq!(rules.decompose(&out).unwrap(), ids("KA I_MATRA"));
    }

    #[test]
    fn conjunct_is_one_glyph() {
        let t = table();
        let rules = RuleSet::parse(RULES, &t).unwrap();
        let out = rules.shape(&ids("KA VIRAMA SSA")).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].glyph, raw_cell(18, 1));
        assert_eq!(rules.decompose(&out).unwrap(), ids("KA VIRAMA SSA"));
        assert_eq!(rules.glyph_cells().collect::<Vec<_>>(), vec![raw_cell(18, 1)]);
    }

    #[test]
    fn longest_match_wins() {
        let t = table();
        let rules = RuleSet::parse(RULES, &t).unwrap();
        // KA VIRAMA alone falls back to the attach rule for VIRAMA.
        let out = rules.shape(&ids("KA VIRAMA")).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out[1].dx, -16);
        assert_eq!(rules.decompose(&out).unwrap(), ids("KA VIRAMA"));
    }

    #[test]
    fn unknown_char() {
        let rules = RuleSet::parse(RULES, &table()).unwrap();
        assert_eq!(
            rules.shape(&ids("KA XX")),
            Err(ShapeError::UnknownChar { id: "XX".into(), index: 1 })
        );
    }

    #[test]
    fn ambiguous_rules_are_rejected() {
        let t = table();
        // Same glyphs as shaping I_MATRA and KA separately.
        let err = RuleSet::parse("PreBaseReorder\tKA I_MATRA\tI_MATRA KA\n", &t).unwrap_err();
        assert!(matches!(err.kind(), ShapeError::NotInvertible(_)), "{err}");
        let err = RuleSet::parse(
            "ConjunctSubst\tKA VIRAMA SSA\t18.1\nConjunctSubst\tSSA VIRAMA KA\t18.1\n",
            &t,
        )
        .unwrap_err();
        assert!(matches!(err.kind(), ShapeError::NotInvertible(_)));
    }

    #[test]
    fn rule_shape_checks() {
        let t = table();
        let err = RuleSet::parse("ConjunctSubst\tKA SSA\t18.1\n", &t).unwrap_err();
        assert_eq!(err.kind(), &ShapeError::ConjunctWithoutVirama);
        let err = RuleSet::parse("PreBaseReorder\tKA I_MATRA\tKA@0,0,8 I_MATRA\n", &t).unwrap_err();
        assert_eq!(err.kind(), &ShapeError::NotPreBase);
        let err = RuleSet::parse("AttachAbove\tANUSVARA\tKA@-16,0,0\n", &t).unwrap_err();
        assert!(matches!(err.kind(), ShapeError::GlyphsNotConserved { .. }));
        let err = RuleSet::parse("AttachAbove\tANUSVARA\tANUSVARA@-17,0,0\n", &t).unwrap_err();
        assert!(matches!(err.kind(), ShapeError::OffsetOutOfRange { .. }));
        let err = RuleSet::parse("AttachAbove\tNOPE\tNOPE\n", &t).unwrap_err();
        assert!(matches!(err.kind(), ShapeError::UnknownRuleChar(_)));
        assert!(matches!(err, ShapeError::Line { line: 1, .. }));
    }

    #[test]
    fn decompose_rejects_foreign_glyphs() {
        let rules = RuleSet::parse(RULES, &table()).unwrap();
        let stray = PositionedGlyph { glyph: raw_cell(18, 1), dx: 3, dy: 0, advance: 16 };
        assert_eq!(rules.decompose(&[stray]), Err(ShapeError::NotDecomposable { index: 0 }));
    }

    #[test]
    fn scaling() {
        let g = PositionedGlyph { glyph: raw_cell(1, 1), dx: -16, dy: 3, advance: 8 };
        let s = scale_positions(&[g], 16, 24);
        assert_eq!((s[0].dx, s[0].dy, s[0].advance), (-24, 5, 12));
    }
}

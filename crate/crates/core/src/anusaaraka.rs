//! Word-by-word gloss transfer between related languages.
//!
//! Each source word is analysed into a root and a chain of suffixes by
//! stripping paradigm suffixes from the right, the root is looked up in a
//! bilingual lexicon, and each grammatical feature carried by the suffixes
//! is mapped to a target marker. The output keeps the source word order and
//! never resolves ambiguity: a feature with several target renderings is
//! shown as `[A|B]`, and paradigm notes are copied through as `{...}`.
//!
//! Resources for one language pair are three tab-separated files, each
//! starting with the same header line:
//!
//! ```text
//! #!pair<TAB>te<TAB>hi<TAB>features=tam.prog,tam.amb,q,agr.23pl
//! ```
//!
//! * `paradigms.tsv`: `suffix<TAB>feature,feature<TAB>note` (`-` for no note)
//! * `lexicon.tsv`: `root<TAB>pos<TAB>target|target`
//! * `vibhakti.tsv`: `feature<TAB>option|option` where an option of `-`
//!   means no surface marker and `{text}` is a note

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

/// Punctuation detached from the end of words.
pub const TERMINAL_PUNCTUATION: &[char] = &['?', '!', '.', ','];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnusaarakaError {
    #[error("{file}:{line}: {message}")]
    Syntax { file: &'static str, line: usize, message: String },
    #[error("{file}: header declares {found}, expected {expected}")]
    HeaderMismatch { file: &'static str, expected: String, found: String },
    #[error("{file}:{line}: feature {feature:?} is not in the declared registry")]
    UnknownFeature { file: &'static str, line: usize, feature: String },
    #[error("lexicon.tsv:{line}: root {root:?} is already listed as a {pos}")]
    DuplicateRoot { line: usize, root: String, pos: Pos },
    #[error("paradigms.tsv:{line}: suffix {suffix:?} is listed twice")]
    DuplicateSuffix { line: usize, suffix: String },
    #[error("MissingResources: no resources for pair {0}")]
    MissingResources(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

impl AnusaarakaError {
    pub fn name(&self) -> &'static str {
        match self {
            AnusaarakaError::MissingResources(_) => "MissingResources",
            _ => "BadResources",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pos {
    Noun,
    Verb,
    Pronoun,
    Other,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pos::Noun => "noun",
            Pos::Verb => "verb",
            Pos::Pronoun => "pronoun",
            Pos::Other => "other",
        })
    }
}

impl FromStr for Pos {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "noun" => Ok(Pos::Noun),
            "verb" => Ok(Pos::Verb),
            "pronoun" => Ok(Pos::Pronoun),
            "other" => Ok(Pos::Other),
            _ => Err(format!("unknown part of speech {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParadigmEntry {
    pub suffix: String,
    pub features: Vec<String>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, Default)]
pub struct ParadigmTable {
    /// Longest suffix first; file order among equal lengths.
    entries: Vec<ParadigmEntry>,
    by_suffix: HashMap<String, usize>,
}

impl ParadigmTable {
    pub fn entries(&self) -> &[ParadigmEntry] {
        &self.entries
    }

    fn get(&self, suffix: &str) -> Option<&ParadigmEntry> {
        self.by_suffix.get(suffix).map(|&i| &self.entries[i])
    }

    /// Longest suffix of `residue` that leaves a non-empty stem.
    fn longest_strippable(&self, residue: &str) -> Option<&ParadigmEntry> {
        self.entries
            .iter()
            .find(|e| e.suffix.len() < residue.len() && residue.ends_with(&e.suffix))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexEntry {
    pub source_root: String,
    pub pos: Pos,
    pub target_roots: Vec<String>,
}

#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: Vec<LexEntry>,
    by_root: HashMap<String, usize>,
}

impl Lexicon {
    /// First entry for `root` in file order.
    pub fn get(&self, root: &str) -> Option<&LexEntry> {
        self.by_root.get(root).map(|&i| &self.entries[i])
    }

    pub fn entries(&self) -> &[LexEntry] {
        &self.entries
    }
}

/// How one feature surfaces in the target language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MarkerRule {
    Silent,
    Options(Vec<Marker>),
}

#[derive(Debug, Clone, Default)]
pub struct VibhaktiMap {
    rules: HashMap<String, MarkerRule>,
}

impl VibhaktiMap {
    pub fn get(&self, feature: &str) -> Option<&MarkerRule> {
        self.rules.get(feature)
    }
}

/// One rendered piece of a gloss token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Marker {
    Literal(String),
    /// Two or more alternatives, rendered `[A|B]`.
    Ambiguous(Vec<String>),
    /// Opaque annotation, rendered `{text}` with no joining underscore.
    Note(String),
}

impl Marker {
    fn from_options(options: Vec<String>) -> Marker {
        if options.len() == 1 {
            Marker::Literal(options.into_iter().next().expect("one option"))
        } else {
            Marker::Ambiguous(options)
        }
    }
}

impl fmt::Display for Marker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Marker::Literal(s) => f.write_str(s),
            Marker::Ambiguous(options) => write!(f, "[{}]", options.join("|")),
            Marker::Note(s) => write!(f, "{{{s}}}"),
        }
    }
}

/// Result of stripping one word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorphAnalysis {
    pub word: String,
    pub root: String,
    /// Stripped suffixes in surface order.
    pub suffixes: Vec<ParadigmEntry>,
    pub pos: Option<Pos>,
    pub unknown: bool,
}

impl MorphAnalysis {
    /// All features of all suffixes, in surface order.
    pub fn features(&self) -> Vec<&str> {
        self.suffixes.iter().flat_map(|s| s.features.iter().map(String::as_str)).collect()
    }

    pub fn suffix_texts(&self) -> Vec<&str> {
        self.suffixes.iter().map(|s| s.suffix.as_str()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlossToken {
    pub source: String,
    pub root: Marker,
    pub markers: Vec<Marker>,
    pub unknown: bool,
}

impl fmt::Display for GlossToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = self.root.to_string();
        for marker in &self.markers {
            if !matches!(marker, Marker::Note(_)) && !out.is_empty() {
                out.push('_');
            }
            out.push_str(&marker.to_string());
        }
        if out.is_empty() {
            // A free postposition whose features all surface as nothing.
            out.push_str(&self.source);
        }
        f.write_str(&out)
    }
}

/// A whitespace-delimited word with its detached trailing punctuation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Word {
    pub text: String,
    pub punctuation: String,
}

pub fn tokenize(sentence: &str) -> Vec<Word> {
    sentence
        .split_whitespace()
        .map(|token| {
            let text = token.trim_end_matches(TERMINAL_PUNCTUATION);
            Word { text: text.to_string(), punctuation: token[text.len()..].to_string() }
        })
        .collect()
}

/// Everything needed to gloss one language pair.
#[derive(Debug, Clone)]
pub struct PairResources {
    pub source: String,
    pub target: String,
    pub features: Vec<String>,
    pub paradigms: ParadigmTable,
    pub lexicon: Lexicon,
    pub vibhakti: VibhaktiMap,
}

struct Header {
    source: String,
    target: String,
    features: Vec<String>,
}

impl Header {
    fn describe(&self) -> String {
        format!("{}-{} [{}]", self.source, self.target, self.features.join(","))
    }
}

fn parse_header(file: &'static str, line: &str) -> Result<Header, AnusaarakaError> {
    let syntax = |message: &str| AnusaarakaError::Syntax { file, line: 1, message: message.into() };
    let rest = line
        .strip_prefix("#!pair\t")
        .ok_or_else(|| syntax("first line must be a #!pair header"))?;
    let fields: Vec<&str> = rest.split('\t').collect();
    let [source, target, features] = fields[..] else {
        return Err(syntax("#!pair needs source, target and features="));
    };
    let features = features
        .strip_prefix("features=")
        .ok_or_else(|| syntax("missing features="))?
        .split(',')
        .filter(|f| !f.is_empty())
        .map(str::to_string)
        .collect();
    Ok(Header { source: source.into(), target: target.into(), features })
}

/// Non-header, non-comment lines with 1-based line numbers.
fn body_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .skip(1)
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
}

fn check_token(file: &'static str, line: usize, s: &str) -> Result<(), AnusaarakaError> {
    if s.is_empty() || s.contains(char::is_whitespace) || s.contains(['[', ']', '|', '{', '}']) {
        return Err(AnusaarakaError::Syntax { file, line, message: format!("bad token {s:?}") });
    }
    Ok(())
}

fn check_note(file: &'static str, line: usize, s: &str) -> Result<(), AnusaarakaError> {
    if s.is_empty() || s.contains(char::is_whitespace) || s.contains(['{', '}']) {
        return Err(AnusaarakaError::Syntax { file, line, message: format!("bad note {s:?}") });
    }
    Ok(())
}

impl PairResources {
    pub fn parse(paradigms: &str, lexicon: &str, vibhakti: &str) -> Result<Self, AnusaarakaError> {
        let first = |text: &str| text.lines().next().unwrap_or("").trim_end_matches('\r').to_string();
        let header = parse_header("paradigms.tsv", &first(paradigms))?;
        for (file, text) in [("lexicon.tsv", lexicon), ("vibhakti.tsv", vibhakti)] {
            let other = parse_header(file, &first(text))?;
            if other.describe() != header.describe() {
                return Err(AnusaarakaError::HeaderMismatch {
                    file,
                    expected: header.describe(),
                    found: other.describe(),
                });
            }
        }
        let registry: HashSet<&str> = header.features.iter().map(String::as_str).collect();
        let known = |file: &'static str, line: usize, f: &str| {
            if registry.contains(f) {
                Ok(())
            } else {
                Err(AnusaarakaError::UnknownFeature { file, line, feature: f.to_string() })
            }
        };

        let mut paradigm_entries = Vec::new();
        let mut seen_suffixes = HashSet::new();
        for (line, text) in body_lines(paradigms) {
            const FILE: &str = "paradigms.tsv";
            let fields: Vec<&str> = text.split('\t').collect();
            let (suffix, features, note) = match fields[..] {
                [s, f] => (s, f, "-"),
                [s, f, n] => (s, f, n),
                _ => {
                    return Err(AnusaarakaError::Syntax {
                        file: FILE,
                        line,
                        message: "expected suffix, features, note".into(),
                    })
                }
            };
            check_token(FILE, line, suffix)?;
            if !seen_suffixes.insert(suffix.to_string()) {
                return Err(AnusaarakaError::DuplicateSuffix { line, suffix: suffix.into() });
            }
            let features: Vec<String> =
                features.split(',').filter(|f| !f.is_empty()).map(str::to_string).collect();
            for f in &features {
                known(FILE, line, f)?;
            }
            let note = match note.trim() {
                "-" | "" => None,
                n => {
                    check_note(FILE, line, n)?;
                    Some(n.to_string())
                }
            };
            paradigm_entries.push(ParadigmEntry { suffix: suffix.into(), features, note });
        }
        paradigm_entries.sort_by_key(|e| std::cmp::Reverse(e.suffix.len()));
        let by_suffix = paradigm_entries.iter().enumerate().map(|(i, e)| (e.suffix.clone(), i)).collect();

        let mut lex_entries: Vec<LexEntry> = Vec::new();
        let mut by_root = HashMap::new();
        let mut root_pos = HashSet::new();
        for (line, text) in body_lines(lexicon) {
            const FILE: &str = "lexicon.tsv";
            let syntax = |message: String| AnusaarakaError::Syntax { file: FILE, line, message };
            let [root, pos, targets] = text.split('\t').collect::<Vec<_>>()[..] else {
                return Err(syntax("expected root, pos, targets".into()));
            };
            check_token(FILE, line, root)?;
            let pos: Pos = pos.parse().map_err(syntax)?;
            let target_roots: Vec<String> = targets.split('|').map(str::to_string).collect();
            for t in &target_roots {
                check_token(FILE, line, t)?;
            }
            if !root_pos.insert((root.to_string(), pos)) {
                return Err(AnusaarakaError::DuplicateRoot { line, root: root.into(), pos });
            }
            by_root.entry(root.to_string()).or_insert(lex_entries.len());
            lex_entries.push(LexEntry { source_root: root.into(), pos, target_roots });
        }

        let mut rules = HashMap::new();
        for (line, text) in body_lines(vibhakti) {
            const FILE: &str = "vibhakti.tsv";
            let [feature, options] = text.split('\t').collect::<Vec<_>>()[..] else {
                return Err(AnusaarakaError::Syntax {
                    file: FILE,
                    line,
                    message: "expected feature, options".into(),
                });
            };
            known(FILE, line, feature)?;
            let rule = if options.trim() == "-" {
                MarkerRule::Silent
            } else {
                let mut literals = Vec::new();
                let mut markers = Vec::new();
                for option in options.split('|') {
                    match option.strip_prefix('{').and_then(|o| o.strip_suffix('}')) {
                        Some(note) => {
                            check_note(FILE, line, note)?;
                            markers.push(Marker::Note(note.to_string()))
                        }
                        None => {
                            check_token(FILE, line, option)?;
                            literals.push(option.to_string());
                        }
                    }
                }
                if !literals.is_empty() {
                    markers.insert(0, Marker::from_options(literals));
                }
                MarkerRule::Options(markers)
            };
            rules.insert(feature.to_string(), rule);
        }

        Ok(PairResources {
            source: header.source,
            target: header.target,
            features: header.features,
            paradigms: ParadigmTable { entries: paradigm_entries, by_suffix },
            lexicon: Lexicon { entries: lex_entries, by_root },
            vibhakti: VibhaktiMap { rules },
        })
    }

    /// Loads `paradigms.tsv`, `lexicon.tsv` and `vibhakti.tsv` from `dir`.
    pub fn load_dir(dir: impl AsRef<Path>) -> Result<Self, AnusaarakaError> {
        let read = |name: &str| {
            let path = dir.as_ref().join(name);
            std::fs::read_to_string(&path).map_err(|e| AnusaarakaError::Io {
                path: path.display().to_string(),
                message: e.to_string(),
            })
        };
        PairResources::parse(&read("paradigms.tsv")?, &read("lexicon.tsv")?, &read("vibhakti.tsv")?)
    }

    pub fn pair_name(&self) -> String {
        format!("{}-{}", self.source, self.target)
    }

    /// Strips suffixes right to left, longest first, until the residue is a
    /// lexicon root. A word that is itself a paradigm suffix is a free
    /// postposition with an empty root. No backtracking.
    pub fn analyze(&self, word: &str) -> MorphAnalysis {
        let done = |root: &str, mut suffixes: Vec<ParadigmEntry>, pos| {
            suffixes.reverse();
            MorphAnalysis { word: word.to_string(), root: root.to_string(), suffixes, pos, unknown: false }
        };
        if let Some(entry) = self.lexicon.get(word) {
            return done(word, Vec::new(), Some(entry.pos));
        }
        if let Some(entry) = self.paradigms.get(word) {
            return done("", vec![entry.clone()], None);
        }
        let mut residue = word;
        let mut stripped = Vec::new();
        while let Some(entry) = self.paradigms.longest_strippable(residue) {
            residue = &residue[..residue.len() - entry.suffix.len()];
            stripped.push(entry.clone());
            if let Some(lex) = self.lexicon.get(residue) {
                return done(residue, stripped, Some(lex.pos));
            }
        }
        MorphAnalysis {
            word: word.to_string(),
            root: word.to_string(),
            suffixes: Vec::new(),
            pos: None,
            unknown: true,
        }
    }

    /// Maps an analysis onto target-language root and markers.
    pub fn transfer(&self, analysis: &MorphAnalysis) -> GlossToken {
        let root = if analysis.unknown {
            Marker::Literal(format!("*{}", analysis.root))
        } else if analysis.root.is_empty() {
            Marker::Literal(String::new())
        } else {
            let targets = self
                .lexicon
                .get(&analysis.root)
                .map(|e| e.target_roots.clone())
                .expect("known analyses have lexicon roots");
            Marker::from_options(targets)
        };
        let mut markers = Vec::new();
        for suffix in &analysis.suffixes {
            for feature in &suffix.features {
                match self.vibhakti.get(feature) {
                    Some(MarkerRule::Silent) => {}
                    Some(MarkerRule::Options(options)) => markers.extend(options.iter().cloned()),
                    // Unmapped features stay visible rather than vanish.
                    None => markers.push(Marker::Note(feature.clone())),
                }
            }
            if let Some(note) = &suffix.note {
                markers.push(Marker::Note(note.clone()));
            }
        }
        GlossToken { source: analysis.word.clone(), root, markers, unknown: analysis.unknown }
    }

    pub fn gloss_word(&self, word: &str) -> GlossToken {
        self.transfer(&self.analyze(word))
    }

    /// Glosses a sentence, one token per source word, in source order.
    pub fn gloss_sentence(&self, sentence: &str) -> String {
        tokenize(sentence)
            .iter()
            .map(|w| {
                let token = if w.text.is_empty() { String::new() } else { self.gloss_word(&w.text).to_string() };
                token + &w.punctuation
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Resources for several pairs, keyed `source-target`.
#[derive(Debug, Clone, Default)]
pub struct Anusaaraka {
    pairs: BTreeMap<String, PairResources>,
}

impl Anusaaraka {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, resources: PairResources) {
        self.pairs.insert(resources.pair_name(), resources);
    }

    pub fn pair(&self, pair: &str) -> Result<&PairResources, AnusaarakaError> {
        self.pairs.get(pair).ok_or_else(|| AnusaarakaError::MissingResources(pair.to_string()))
    }

    pub fn pairs(&self) -> impl Iterator<Item = &PairResources> {
        self.pairs.values()
    }

    pub fn gloss_sentence(&self, pair: &str, sentence: &str) -> Result<String, AnusaarakaError> {
        Ok(self.pair(pair)?.gloss_sentence(sentence))
    }
}

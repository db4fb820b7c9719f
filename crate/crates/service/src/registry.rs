//! Loaded resources with language and region metadata.

use std::fmt;
use std::sync::Arc;

use indic_dbcs::shipped::Resources;
use serde::Serialize;

/// Regional grouping of Indian languages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum LanguageGroup {
    Northern,
    Western,
    SouthIndian,
    Eastern,
}

impl fmt::Display for LanguageGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LanguageGroup::Northern => "Northern",
            LanguageGroup::Western => "Western",
            LanguageGroup::SouthIndian => "SouthIndian",
            LanguageGroup::Eastern => "Eastern",
        })
    }
}

/// Group of an ISO 639-1 language code. `None` for languages outside the
/// four Indian groups, such as English.
pub fn language_group(code: &str) -> Option<LanguageGroup> {
    use LanguageGroup::*;
    Some(match code {
        "hi" | "pa" | "ks" | "ur" | "ne" | "sd" => Northern,
        "mr" | "gu" | "kok" => Western,
        "te" | "ta" | "kn" | "ml" => SouthIndian,
        "bn" | "or" | "as" => Eastern,
        _ => return None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ResourceKind {
    CodeTable,
    Font,
    ShapingRules,
    ConversionTable,
    Anusaaraka,
}

impl fmt::Display for ResourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ResourceKind::CodeTable => "code_table",
            ResourceKind::Font => "font",
            ResourceKind::ShapingRules => "shaping_rules",
            ResourceKind::ConversionTable => "conversion_table",
            ResourceKind::Anusaaraka => "anusaaraka",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LanguageTag {
    pub language: String,
    pub group: Option<LanguageGroup>,
}

impl LanguageTag {
    pub fn new(language: &str) -> Self {
        LanguageTag { language: language.to_string(), group: language_group(language) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResourceEntry {
    pub kind: ResourceKind,
    pub name: String,
    pub languages: Vec<LanguageTag>,
}

/// Immutable after construction; shared by every request.
#[derive(Debug, Clone)]
pub struct ResourceRegistry {
    resources: Arc<Resources>,
    entries: Vec<ResourceEntry>,
}

impl ResourceRegistry {
    pub fn new(resources: Resources) -> Self {
        // The code table puts Devanagari in level 1 and Bengali in level 2,
        // and the fonts and rules cover the same repertoire.
        let scripts = || vec![LanguageTag::new("hi"), LanguageTag::new("bn")];
        let mut entries = vec![
            ResourceEntry { kind: ResourceKind::CodeTable, name: "indic".into(), languages: scripts() },
            ResourceEntry { kind: ResourceKind::ShapingRules, name: "indic".into(), languages: scripts() },
        ];
        for px in [16, 24, 48] {
            entries.push(ResourceEntry { kind: ResourceKind::Font, name: format!("hexbox-{px}"), languages: scripts() });
        }
        entries.push(ResourceEntry {
            kind: ResourceKind::ConversionTable,
            name: "hindi".into(),
            languages: vec![LanguageTag::new("hi")],
        });
        for pair in resources.gloss.pairs() {
            entries.push(ResourceEntry {
                kind: ResourceKind::Anusaaraka,
                name: pair.pair_name(),
                languages: vec![LanguageTag::new(&pair.source), LanguageTag::new(&pair.target)],
            });
        }
        ResourceRegistry { resources: Arc::new(resources), entries }
    }

    pub fn resources(&self) -> &Resources {
        &self.resources
    }

    pub fn entries(&self) -> &[ResourceEntry] {
        &self.entries
    }

    /// One line per resource: kind, name, then `language:group` tags.
    pub fn listing(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let tags: Vec<String> = e
                .languages
                .iter()
                .map(|t| match t.group {
                    Some(g) => format!("{}:{g}", t.language),
                    None => format!("{}:-", t.language),
                })
                .collect();
            out.push_str(&format!("{}\t{}\t{}\n", e.kind, e.name, tags.join(",")));
        }
        out
    }
}

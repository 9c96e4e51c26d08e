//! Keyword-table prompt parser: object phrase, spatial prior and edited attribute.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Default keyword table, `category<TAB>word` per line.
pub const DEFAULT_KEYWORDS: &str = include_str!("../../data/keywords.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpatialPrior {
    None,
    Left,
    Right,
    Top,
    Bottom,
    Center,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Attribute {
    Color,
    Material,
    Part,
    Shape,
    Style,
    ObjectVisibility,
}

impl Attribute {
    pub fn as_str(self) -> &'static str {
        match self {
            Attribute::Color => "color",
            Attribute::Material => "material",
            Attribute::Part => "part",
            Attribute::Shape => "shape",
            Attribute::Style => "style",
            Attribute::ObjectVisibility => "object-visibility",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "color" => Attribute::Color,
            "material" => Attribute::Material,
            "part" => Attribute::Part,
            "shape" => Attribute::Shape,
            "style" => Attribute::Style,
            "object-visibility" => Attribute::ObjectVisibility,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditPrompt {
    pub raw: String,
    #[serde(rename = "object")]
    pub object_prompt: String,
    #[serde(rename = "spatial")]
    pub spatial_prior: SpatialPrior,
    pub attribute: Attribute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum WordClass {
    Verb,
    Stop,
    Spatial(SpatialPrior),
    Attribute(Attribute),
}

fn class_of(category: &str) -> Option<WordClass> {
    Some(match category {
        "verb" => WordClass::Verb,
        "stop" => WordClass::Stop,
        "left" => WordClass::Spatial(SpatialPrior::Left),
        "right" => WordClass::Spatial(SpatialPrior::Right),
        "top" => WordClass::Spatial(SpatialPrior::Top),
        "bottom" => WordClass::Spatial(SpatialPrior::Bottom),
        "center" => WordClass::Spatial(SpatialPrior::Center),
        other => match Attribute::parse(other) {
            Some(a) if a != Attribute::ObjectVisibility => WordClass::Attribute(a),
            _ => return None,
        },
    })
}

/// Word → class lookup loaded from a `category<TAB>word` text table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeywordTable {
    words: BTreeMap<String, WordClass>,
}

impl Default for KeywordTable {
    fn default() -> Self {
        Self::parse(DEFAULT_KEYWORDS).expect("bundled keyword table is valid")
    }
}

impl KeywordTable {
    /// Blank lines and lines starting with `#` are skipped. A word listed
    /// twice keeps its first category.
    pub fn parse(text: &str) -> Result<Self> {
        let mut words = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let (category, word) = line
                .split_once('\t')
                .ok_or_else(|| Error::Config(format!("keyword line {}: expected category<TAB>word", lineno + 1)))?;
            let class = class_of(category.trim())
                .ok_or_else(|| Error::Config(format!("keyword line {}: unknown category {category:?}", lineno + 1)))?;
            let word = word.trim().to_lowercase();
            if word.is_empty() {
                return Err(Error::Config(format!("keyword line {}: empty word", lineno + 1)));
            }
            words.entry(word).or_insert(class);
        }
        Ok(Self { words })
    }

    fn class(&self, word: &str) -> Option<WordClass> {
        self.words.get(word).copied()
    }
}

fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric() && c != '-')
        .map(|t| t.trim_matches('-'))
        .filter(|t| !t.is_empty())
        .map(ToString::to_string)
        .collect()
}

/// Split an edit instruction into object phrase, spatial prior and attribute.
///
/// The spatial prior and the attribute come from the first matching keyword.
/// The object phrase is the first run of words left after removing edit
/// verbs, spatial words, attribute words and stop words.
pub fn parse_prompt(text: &str, table: &KeywordTable) -> Result<EditPrompt> {
    let tokens = tokenize(text);
    let mut spatial = None;
    let mut attribute = None;
    let mut phrase: Vec<&str> = Vec::new();
    let mut phrase_done = false;
    for tok in &tokens {
        match table.class(tok) {
            Some(WordClass::Spatial(s)) => {
                spatial.get_or_insert(s);
            }
            Some(WordClass::Attribute(a)) => {
                attribute.get_or_insert(a);
            }
            Some(WordClass::Verb | WordClass::Stop) => {}
            None => {
                if !phrase_done {
                    phrase.push(tok);
                }
                continue;
            }
        }
        if !phrase.is_empty() {
            phrase_done = true;
        }
    }
    if phrase.is_empty() {
        return Err(Error::UnparseablePrompt(text.into()));
    }
    Ok(EditPrompt {
        raw: text.into(),
        object_prompt: phrase.join(" "),
        spatial_prior: spatial.unwrap_or(SpatialPrior::None),
        attribute: attribute.unwrap_or(Attribute::ObjectVisibility),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> EditPrompt {
        parse_prompt(text, &KeywordTable::default()).unwrap()
    }

    #[test]
    fn left_car_blue() {
        let p = parse("make the left car blue");
        assert_eq!(p.object_prompt, "car");
        assert_eq!(p.spatial_prior, SpatialPrior::Left);
        assert_eq!(p.attribute, Attribute::Color);
        assert_eq!(p.raw, "make the left car blue");
    }

    #[test]
    fn logo_on_shirt() {
        let p = parse("change the logo on the shirt");
        assert_eq!(p.object_prompt, "shirt");
        assert_eq!(p.spatial_prior, SpatialPrior::None);
        assert_eq!(p.attribute, Attribute::Part);
    }

    #[test]
    fn remove_dog_defaults_to_visibility() {
        let p = parse("remove the dog");
        assert_eq!(p.object_prompt, "dog");
        assert_eq!(p.spatial_prior, SpatialPrior::None);
        assert_eq!(p.attribute, Attribute::ObjectVisibility);
    }

    #[test]
    fn multiword_object_and_synonyms() {
        let p = parse("Turn the upper sports car into a cartoon!");
        assert_eq!(p.object_prompt, "sports car");
        assert_eq!(p.spatial_prior, SpatialPrior::Top);
        assert_eq!(p.attribute, Attribute::Style);
        let p = parse("make the chair in the middle wooden");
        assert_eq!(
            (p.object_prompt.as_str(), p.spatial_prior, p.attribute),
            ("chair", SpatialPrior::Center, Attribute::Material)
        );
        let p = parse("replace the bottom box with a bigger shape");
        assert_eq!(p.spatial_prior, SpatialPrior::Bottom);
        assert_eq!(p.attribute, Attribute::Shape);
        assert_eq!(p.object_prompt, "box");
    }

    #[test]
    fn first_spatial_match_wins() {
        let p = parse("make the right cup left of the plate red");
        assert_eq!(p.spatial_prior, SpatialPrior::Right);
        assert_eq!(p.object_prompt, "cup");
    }

    #[test]
    fn unparseable_prompts() {
        let t = KeywordTable::default();
        assert!(matches!(parse_prompt("make it blue", &t), Err(Error::UnparseablePrompt(_))));
        assert!(matches!(parse_prompt("", &t), Err(Error::UnparseablePrompt(_))));
    }

    #[test]
    fn table_parsing() {
        let t = KeywordTable::parse("# comment\n\nverb\tpaint\ncolor\tteal\nstop\tthe\n").unwrap();
        let p = parse_prompt("paint the boat teal", &t).unwrap();
        assert_eq!((p.object_prompt.as_str(), p.attribute), ("boat", Attribute::Color));
        assert!(matches!(KeywordTable::parse("colour\tred"), Err(Error::Config(_))));
        assert!(matches!(KeywordTable::parse("color red"), Err(Error::Config(_))));
    }

    #[test]
    fn serde_names() {
        let p = parse("remove the dog");
        let v = serde_json::to_value(&p).unwrap();
        assert_eq!(v["object"], "dog");
        assert_eq!(v["spatial"], "none");
        assert_eq!(v["attribute"], "object-visibility");
    }
}

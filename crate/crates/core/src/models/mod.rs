//! Infinite group models realizing a fusion system.
//!
//! Two constructions are supported: an iterated HNN extension of the base
//! group with one stable letter per generating morphism, and a tree of
//! finite groups amalgamated over normalizers. Both come with a solved word
//! problem, which drives ball enumeration and fusion recovery.

pub mod alperin;
pub mod amalgam;
pub mod ball;
pub mod hnn;
pub mod sample;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{ModelError, ParseError};
use crate::group::{Elem, Group};

pub use alperin::{validate_alperin_datum, AlperinDatum, AlperinEntry, AlperinFailure, AlperinReport};
pub use amalgam::{robinson_presentation, AmalgamModel};
pub use ball::{ball_enumerate, recover_fusion, MAX_RADIUS};
pub use hnn::{hnn_presentation, HnnModel};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum ModelKind {
    Hnn,
    Amalgam,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Hnn => "hnn",
            ModelKind::Amalgam => "amalgam",
        })
    }
}

/// One generator raised to `±1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Letter {
    pub generator: u32,
    pub exponent: i8,
}

impl Letter {
    pub fn new(generator: u32, exponent: i8) -> Self {
        Letter { generator, exponent }
    }

    pub fn inverse(self) -> Self {
        Letter { generator: self.generator, exponent: -self.exponent }
    }
}

/// A word over the generators of a presentation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct ModelWord {
    letters: Vec<Letter>,
}

impl ModelWord {
    pub fn new(letters: Vec<Letter>) -> Self {
        ModelWord { letters }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Self {
        ModelWord { letters: self.letters.iter().rev().map(|l| l.inverse()).collect() }
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        ModelWord { letters }
    }
}

impl FromIterator<Letter> for ModelWord {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        ModelWord { letters: iter.into_iter().collect() }
    }
}

/// Internal form of a word: factor elements and stable letters.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Syllable {
    Element { factor: usize, element: Elem },
    Stable { index: usize, exponent: i8 },
}

/// The word-problem engine behind a presentation.
#[derive(Clone, Debug)]
pub enum Model {
    Hnn(Arc<HnnModel>),
    Amalgam(Arc<AmalgamModel>),
}

impl Model {
    fn base(&self) -> &Arc<Group> {
        match self {
            Model::Hnn(m) => m.base(),
            Model::Amalgam(m) => m.base(),
        }
    }

    fn p(&self) -> u32 {
        match self {
            Model::Hnn(m) => m.p(),
            Model::Amalgam(m) => m.p(),
        }
    }

    fn reduce(&self, syllables: &[Syllable]) -> Vec<Syllable> {
        match self {
            Model::Hnn(m) => m.reduce(syllables),
            Model::Amalgam(m) => m.reduce(syllables),
        }
    }

    fn invert(&self, syllables: &[Syllable]) -> Vec<Syllable> {
        syllables
            .iter()
            .rev()
            .map(|s| match *s {
                Syllable::Element { factor, element } => {
                    Syllable::Element { factor, element: self.factor(factor).inv(element) }
                }
                Syllable::Stable { index, exponent } => Syllable::Stable { index, exponent: -exponent },
            })
            .collect()
    }

    fn factor(&self, k: usize) -> &Group {
        match self {
            Model::Hnn(m) => m.base(),
            Model::Amalgam(m) => m.factor(k),
        }
    }

    /// The syllable of a base-group element.
    fn base_syllable(&self, x: Elem) -> Syllable {
        match self {
            Model::Hnn(_) => Syllable::Element { factor: 0, element: x },
            Model::Amalgam(m) => Syllable::Element { factor: 0, element: m.base_in_center(x) },
        }
    }

    /// The base-group element a reduced word represents, if any.
    fn as_base_element(&self, reduced: &[Syllable]) -> Option<Elem> {
        match reduced {
            [] => Some(0),
            [Syllable::Element { factor: 0, element }] => match self {
                Model::Hnn(_) => Some(*element),
                Model::Amalgam(m) => m.center_to_base(*element),
            },
            _ => None,
        }
    }
}

/// A finite presentation, optionally carrying its word-problem engine.
///
/// Presentations read back from text carry only generators and relators.
#[derive(Clone, Debug)]
pub struct Presentation {
    kind: ModelKind,
    generators: Vec<String>,
    relators: Vec<ModelWord>,
    model: Option<Model>,
    index: HashMap<String, u32>,
}

impl PartialEq for Presentation {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.generators == other.generators && self.relators == other.relators
    }
}

impl Presentation {
    pub(crate) fn new(kind: ModelKind, generators: Vec<String>, relators: Vec<ModelWord>, model: Option<Model>) -> Self {
        let index = generators.iter().cloned().zip(0..).collect();
        Presentation { kind, generators, relators, model, index }
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn relators(&self) -> &[ModelWord] {
        &self.relators
    }

    pub fn model(&self) -> Option<&Model> {
        self.model.as_ref()
    }

    pub fn hnn(&self) -> Option<&Arc<HnnModel>> {
        match &self.model {
            Some(Model::Hnn(m)) => Some(m),
            _ => None,
        }
    }

    pub fn amalgam(&self) -> Option<&Arc<AmalgamModel>> {
        match &self.model {
            Some(Model::Amalgam(m)) => Some(m),
            _ => None,
        }
    }

    pub fn generator_index(&self, name: &str) -> Option<u32> {
        self.index.get(name).copied()
    }

    fn engine(&self) -> Result<&Model, ModelError> {
        self.model
            .as_ref()
            .ok_or_else(|| ModelError::MalformedWord("presentation carries no word-problem data".into()))
    }

    /// The base group the model is built around.
    pub fn base(&self) -> Option<&Arc<Group>> {
        self.model.as_ref().map(Model::base)
    }

    pub fn format_word(&self, w: &ModelWord) -> String {
        if w.is_empty() {
            return "1".into();
        }
        let parts: Vec<String> =
            w.letters.iter().map(|l| format!("{}^{}", self.generators[l.generator as usize], l.exponent)).collect();
        parts.join(" ")
    }

    pub fn parse_word(&self, text: &str) -> Result<ModelWord, ModelError> {
        let text = text.trim();
        if text == "1" || text.is_empty() {
            return Ok(ModelWord::empty());
        }
        text.split_whitespace()
            .map(|tok| {
                let (name, exp) = tok.rsplit_once('^').unwrap_or((tok, "1"));
                let exponent = match exp {
                    "1" | "+1" => 1,
                    "-1" => -1,
                    _ => return Err(ModelError::MalformedWord(format!("bad exponent in {tok:?}"))),
                };
                let generator = self
                    .generator_index(name)
                    .ok_or_else(|| ModelError::MalformedWord(format!("unknown generator {name:?}")))?;
                Ok(Letter { generator, exponent })
            })
            .collect()
    }

    fn check_word(&self, w: &ModelWord) -> Result<(), ModelError> {
        for l in &w.letters {
            if l.generator as usize >= self.generators.len() || l.exponent.abs() != 1 {
                return Err(ModelError::MalformedWord(format!("letter {l:?} outside the presentation")));
            }
        }
        Ok(())
    }

    pub(crate) fn to_syllables(&self, w: &ModelWord) -> Result<Vec<Syllable>, ModelError> {
        self.check_word(w)?;
        Ok(match self.engine()? {
            Model::Hnn(m) => m.to_syllables(w),
            Model::Amalgam(m) => m.to_syllables(w),
        })
    }

    pub(crate) fn to_word(&self, syllables: &[Syllable]) -> ModelWord {
        match self.model.as_ref().expect("engine present") {
            Model::Hnn(m) => m.to_word(syllables),
            Model::Amalgam(m) => m.to_word(syllables),
        }
    }

    /// The word of a base-group element (empty for the identity).
    pub fn base_letter(&self, x: Elem) -> Result<ModelWord, ModelError> {
        let m = self.engine()?;
        Ok(self.to_word(&m.reduce(&[m.base_syllable(x)])))
    }

    pub fn reduce_word(&self, w: &ModelWord) -> Result<ModelWord, ModelError> {
        let s = self.to_syllables(w)?;
        Ok(self.to_word(&self.engine()?.reduce(&s)))
    }

    pub fn is_identity(&self, w: &ModelWord) -> Result<bool, ModelError> {
        let s = self.to_syllables(w)?;
        Ok(self.engine()?.reduce(&s).is_empty())
    }

    /// Whether two words represent the same element.
    pub fn words_equal(&self, u: &ModelWord, v: &ModelWord) -> Result<bool, ModelError> {
        self.is_identity(&u.concat(&v.inverse()))
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("presentation kind={}\n", self.kind);
        for g in &self.generators {
            out.push_str(&format!("gen {g}\n"));
        }
        for r in &self.relators {
            out.push_str(&format!("rel {}\n", self.format_word(r)));
        }
        out
    }

    /// Reads the text format; the result has no word-problem data.
    pub fn parse(path: &str, text: &str) -> Result<Self, ParseError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
        let (n, header) = lines.next().ok_or_else(|| ParseError::new(path, 1, "empty presentation file"))?;
        let kind = match header.trim() {
            "presentation kind=hnn" => ModelKind::Hnn,
            "presentation kind=amalgam" => ModelKind::Amalgam,
            _ => return Err(ParseError::new(path, n + 1, "expected 'presentation kind=hnn|amalgam'")),
        };
        let mut generators = Vec::new();
        let mut relator_text = Vec::new();
        for (n, line) in lines {
            if let Some(name) = line.strip_prefix("gen ") {
                if !relator_text.is_empty() {
                    return Err(ParseError::new(path, n + 1, "generator after relators"));
                }
                let name = name.trim();
                if name.is_empty() || name.contains(|c: char| c.is_whitespace() || c == '^') || name == "1" {
                    return Err(ParseError::new(path, n + 1, format!("bad generator name {name:?}")));
                }
                generators.push(name.to_string());
            } else if let Some(word) = line.strip_prefix("rel ") {
                relator_text.push((n, word));
            } else {
                return Err(ParseError::new(path, n + 1, format!("unexpected line {line:?}")));
            }
        }
        let mut p = Presentation::new(kind, generators, Vec::new(), None);
        if p.index.len() != p.generators.len() {
            return Err(ParseError::new(path, n + 1, "duplicate generator names"));
        }
        for (n, word) in relator_text {
            let w = p.parse_word(word).map_err(|e| ParseError::new(path, n + 1, e.to_string()))?;
            p.relators.push(w);
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip_without_engine() {
        let text = "presentation kind=hnn\ngen s1\ngen t1\nrel s1^1 s1^1 s1^1\nrel t1^-1 s1^1 t1^1 s1^-1 s1^-1\nrel 1\n";
        let p = Presentation::parse("x", text).unwrap();
        assert_eq!(p.to_text(), text);
        assert!(p.is_identity(&ModelWord::empty()).is_err());
        assert!(Presentation::parse("x", "presentation kind=foo\n").is_err());
        assert!(Presentation::parse("x", "presentation kind=hnn\ngen a\nrel b^1\n").is_err());
    }
}

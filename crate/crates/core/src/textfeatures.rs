//! Tokenization and per-text feature vectors.
//!
//! Every rate is a percentage of the word count: category hits, numerals,
//! long words, and punctuation marks per word. An empty text yields an
//! all-zero vector.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{Post, PostKind, Profile};
use crate::lexicon::Lexicon;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PunctCounts {
    pub question_mark: usize,
    pub comma: usize,
    pub exclamation: usize,
    pub period: usize,
    /// Any other non-whitespace character outside a word (emoji included).
    pub other: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Tokens {
    pub words: Vec<String>,
    pub punct: PunctCounts,
}

impl Tokens {
    pub fn numeral_count(&self) -> usize {
        self.words.iter().filter(|w| is_numeric_token(w)).count()
    }
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || is_apostrophe(c)
}

/// Digits with at most one `.` or `,` decimal separator between digits.
pub fn is_numeric_token(token: &str) -> bool {
    let mut seps = 0;
    let mut digits = 0;
    for c in token.chars() {
        if c.is_numeric() {
            digits += 1;
        } else if c == '.' || c == ',' {
            seps += 1;
        } else {
            return false;
        }
    }
    digits > 0 && seps <= 1
}

/// Splits text into lowercase word tokens and counts punctuation.
///
/// Words are maximal runs of letters, digits and apostrophes, with edge
/// apostrophes trimmed. A `.` or `,` directly between two digits stays inside
/// the token (`3,5` is one numeral) and is not counted as punctuation.
pub fn tokenize(text: &str) -> Tokens {
    let chars: Vec<char> = text.chars().collect();
    let mut words = Vec::new();
    let mut punct = PunctCounts::default();
    let mut current = String::new();
    let mut seen_sep = false;

    let flush = |current: &mut String, words: &mut Vec<String>| {
        let trimmed = current.trim_matches(is_apostrophe);
        if !trimmed.is_empty() {
            words.push(trimmed.to_lowercase());
        }
        current.clear();
    };

    for (i, &c) in chars.iter().enumerate() {
        if is_word_char(c) {
            current.push(c);
            continue;
        }
        let between_digits = (c == '.' || c == ',')
            && !seen_sep
            && !current.is_empty()
            && current.chars().all(char::is_numeric)
            && chars.get(i + 1).is_some_and(|n| n.is_numeric());
        if between_digits {
            current.push(c);
            seen_sep = true;
            continue;
        }
        flush(&mut current, &mut words);
        seen_sep = false;
        match c {
            '?' => punct.question_mark += 1,
            ',' => punct.comma += 1,
            '!' => punct.exclamation += 1,
            '.' => punct.period += 1,
            c if c.is_whitespace() => {}
            _ => punct.other += 1,
        }
    }
    flush(&mut current, &mut words);
    Tokens { words, punct }
}

/// Structural features that can stand in for a lexicon category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Structural {
    Numerals,
    QuestionMarks,
    Commas,
    SixLetter,
    WordCount,
}

impl Structural {
    pub const ALL: [Structural; 5] = [
        Structural::Numerals,
        Structural::QuestionMarks,
        Structural::Commas,
        Structural::SixLetter,
        Structural::WordCount,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Structural::Numerals => "numerals_pct",
            Structural::QuestionMarks => "question_marks_pct",
            Structural::Commas => "commas_pct",
            Structural::SixLetter => "six_letter_pct",
            Structural::WordCount => "word_count",
        }
    }
}

/// A named scalar in a [`FeatureVector`]: a category percentage or a structural field.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FeatureKey {
    Structural(Structural),
    Category(String),
}

impl FeatureKey {
    pub fn category(name: impl Into<String>) -> Self {
        FeatureKey::Category(name.into())
    }

    pub fn name(&self) -> &str {
        match self {
            FeatureKey::Structural(s) => s.name(),
            FeatureKey::Category(c) => c,
        }
    }

    /// All lexicon categories followed by the percentage-valued structural features.
    pub fn candidates(lexicon: &Lexicon) -> Vec<FeatureKey> {
        lexicon
            .categories()
            .iter()
            .map(|c| FeatureKey::category(c.as_str()))
            .chain(
                [
                    Structural::Numerals,
                    Structural::QuestionMarks,
                    Structural::Commas,
                    Structural::SixLetter,
                ]
                .map(FeatureKey::Structural),
            )
            .collect()
    }
}

impl fmt::Display for FeatureKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FeatureKey {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(Structural::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .map(FeatureKey::Structural)
            .unwrap_or_else(|| FeatureKey::Category(s.to_string())))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub word_count: usize,
    /// Percentage of words hitting each lexicon category (every category present).
    pub category_pct: BTreeMap<String, f64>,
    pub question_marks_pct: f64,
    pub commas_pct: f64,
    pub numerals_pct: f64,
    pub six_letter_pct: f64,
}

impl FeatureVector {
    pub fn zero(lexicon: &Lexicon) -> Self {
        FeatureVector {
            category_pct: lexicon
                .categories()
                .iter()
                .map(|c| (c.as_str().to_string(), 0.0))
                .collect(),
            ..Default::default()
        }
    }

    /// `None` for a category the vector was not built with.
    pub fn get(&self, key: &FeatureKey) -> Option<f64> {
        match key {
            FeatureKey::Structural(s) => Some(match s {
                Structural::Numerals => self.numerals_pct,
                Structural::QuestionMarks => self.question_marks_pct,
                Structural::Commas => self.commas_pct,
                Structural::SixLetter => self.six_letter_pct,
                Structural::WordCount => self.word_count as f64,
            }),
            FeatureKey::Category(c) => self.category_pct.get(c).copied(),
        }
    }

    pub fn category(&self, name: &str) -> f64 {
        self.category_pct.get(name).copied().unwrap_or(0.0)
    }
}

fn pct(count: usize, words: usize) -> f64 {
    if words == 0 {
        0.0
    } else {
        100.0 * count as f64 / words as f64
    }
}

pub fn analyze_text(text: &str, lexicon: &Lexicon) -> FeatureVector {
    let tokens = tokenize(text);
    let n = tokens.words.len();
    let mut hits = vec![0usize; lexicon.categories().len()];
    let mut numerals = 0;
    let mut long_words = 0;
    for word in &tokens.words {
        for idx in lexicon.category_indices(word) {
            hits[idx] += 1;
        }
        if is_numeric_token(word) {
            numerals += 1;
        }
        if word.chars().filter(|c| c.is_alphabetic()).count() > 6 {
            long_words += 1;
        }
    }
    FeatureVector {
        word_count: n,
        category_pct: lexicon
            .categories()
            .iter()
            .zip(&hits)
            .map(|(c, &h)| (c.as_str().to_string(), pct(h, n)))
            .collect(),
        question_marks_pct: pct(tokens.punct.question_mark, n),
        commas_pct: pct(tokens.punct.comma, n),
        numerals_pct: pct(numerals, n),
        six_letter_pct: pct(long_words, n),
    }
}

/// Text of all text-kind posts, newline-joined in stored order.
pub fn profile_narration(profile: &Profile) -> String {
    let texts: Vec<&str> = profile
        .posts
        .iter()
        .filter(|p: &&Post| p.kind == PostKind::Text)
        .map(|p| p.text.as_str())
        .collect();
    texts.join("\n")
}

/// Features of the profile's whole text production analyzed as one narration.
pub fn analyze_profile(profile: &Profile, lexicon: &Lexicon) -> FeatureVector {
    analyze_text(&profile_narration(profile), lexicon)
}

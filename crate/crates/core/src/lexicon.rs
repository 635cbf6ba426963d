//! Category dictionary with exact and suffix-wildcard patterns.
//!
//! A lexicon file is UTF-8 text. A `%categories a,b,c` header declares the
//! category inventory; every following non-comment line is
//! `pattern<TAB>cat1,cat2,...`. A pattern ending in `*` matches its prefix
//! followed by any (possibly empty) suffix.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Source of the bundled test dictionary.
pub const MICRO_LEXICON: &str = include_str!("../data/micro_lexicon.txt");

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("cannot read lexicon {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: `*` may only terminate a pattern: {pattern:?}")]
    MisplacedWildcard { line: usize, pattern: String },
    #[error("line {line}: duplicate pattern {pattern:?}")]
    DuplicatePattern { line: usize, pattern: String },
    #[error("invalid category name {0:?}: expected lowercase snake_case")]
    InvalidCategory(String),
}

/// Lowercase snake_case category name.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct CategoryId(String);

impl CategoryId {
    pub fn new(name: impl Into<String>) -> Result<Self, LexiconError> {
        let name = name.into();
        let valid = !name.is_empty()
            && name.starts_with(|c: char| c.is_ascii_lowercase())
            && name
                .chars()
                .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_');
        if valid {
            Ok(CategoryId(name))
        } else {
            Err(LexiconError::InvalidCategory(name))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CategoryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<String> for CategoryId {
    type Error = LexiconError;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        CategoryId::new(value)
    }
}

impl From<CategoryId> for String {
    fn from(value: CategoryId) -> Self {
        value.0
    }
}

impl std::borrow::Borrow<str> for CategoryId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Default, Clone)]
struct TrieNode {
    children: BTreeMap<char, usize>,
    /// Categories of the wildcard pattern ending at this node, if any.
    wildcard: Vec<usize>,
}

/// Immutable pattern → categories dictionary.
#[derive(Debug, Clone)]
pub struct Lexicon {
    categories: Vec<CategoryId>,
    exact: HashMap<String, Vec<usize>>,
    // prefix tree over wildcard prefixes; node 0 is the root
    nodes: Vec<TrieNode>,
    patterns: BTreeMap<String, Vec<usize>>,
}

impl Lexicon {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, LexiconError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| LexiconError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    /// The bundled micro-lexicon.
    pub fn micro() -> Self {
        Self::parse(MICRO_LEXICON).expect("bundled micro-lexicon is well formed")
    }

    pub fn parse(text: &str) -> Result<Self, LexiconError> {
        let mut builder = LexiconBuilder::default();
        let mut declared = false;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("%categories") {
                if declared {
                    return Err(malformed(line_no, "repeated %categories header"));
                }
                for name in split_list(rest) {
                    let id = CategoryId::new(name)
                        .map_err(|e| malformed(line_no, &e.to_string()))?;
                    if builder.category_index(id.as_str()).is_some() {
                        return Err(malformed(line_no, &format!("category {id} declared twice")));
                    }
                    builder.categories.push(id);
                }
                declared = true;
                continue;
            }
            if !declared {
                return Err(malformed(line_no, "entry before %categories header"));
            }
            let (pattern, cats) = line
                .split_once('\t')
                .ok_or_else(|| malformed(line_no, "expected pattern<TAB>categories"))?;
            let mut ids = Vec::new();
            for name in split_list(cats) {
                let idx = builder
                    .category_index(name)
                    .ok_or_else(|| malformed(line_no, &format!("undeclared category {name:?}")))?;
                ids.push(idx);
            }
            if ids.is_empty() {
                return Err(malformed(line_no, "entry without categories"));
            }
            builder.insert(line_no, pattern.trim(), ids)?;
        }
        Ok(builder.finish())
    }

    /// Categories in declaration order.
    pub fn categories(&self) -> &[CategoryId] {
        &self.categories
    }

    pub fn has_category(&self, name: &str) -> bool {
        self.categories.iter().any(|c| c.as_str() == name)
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    /// Patterns (with any trailing `*`) and their category names.
    pub fn entries(&self) -> impl Iterator<Item = (&str, Vec<&CategoryId>)> {
        self.patterns
            .iter()
            .map(|(p, ids)| (p.as_str(), ids.iter().map(|&i| &self.categories[i]).collect()))
    }

    /// Union of categories from the exact entry and every wildcard prefix of `token`.
    pub fn categorize(&self, token: &str) -> BTreeSet<&CategoryId> {
        self.category_indices(token)
            .into_iter()
            .map(|i| &self.categories[i])
            .collect()
    }

    /// Sorted, deduplicated category indices (positions in [`Lexicon::categories`]).
    pub fn category_indices(&self, token: &str) -> Vec<usize> {
        let mut hits: Vec<usize> = Vec::new();
        if let Some(ids) = self.exact.get(token) {
            hits.extend_from_slice(ids);
        }
        let mut node = 0;
        for ch in token.chars() {
            match self.nodes[node].children.get(&ch) {
                Some(&next) => {
                    node = next;
                    hits.extend_from_slice(&self.nodes[node].wildcard);
                }
                None => break,
            }
        }
        hits.sort_unstable();
        hits.dedup();
        hits
    }
}

#[derive(Default)]
struct LexiconBuilder {
    categories: Vec<CategoryId>,
    exact: HashMap<String, Vec<usize>>,
    nodes: Vec<TrieNode>,
    patterns: BTreeMap<String, Vec<usize>>,
}

impl LexiconBuilder {
    fn category_index(&self, name: &str) -> Option<usize> {
        self.categories.iter().position(|c| c.as_str() == name)
    }

    fn insert(&mut self, line: usize, pattern: &str, mut ids: Vec<usize>) -> Result<(), LexiconError> {
        let pattern = pattern.to_lowercase();
        let (stem, wildcard) = match pattern.strip_suffix('*') {
            Some(stem) => (stem, true),
            None => (pattern.as_str(), false),
        };
        if stem.contains('*') {
            return Err(LexiconError::MisplacedWildcard { line, pattern });
        }
        if stem.is_empty() || stem.chars().any(char::is_whitespace) {
            return Err(malformed(line, &format!("invalid pattern {pattern:?}")));
        }
        if self.patterns.contains_key(&pattern) {
            return Err(LexiconError::DuplicatePattern { line, pattern });
        }
        ids.sort_unstable();
        ids.dedup();
        if wildcard {
            if self.nodes.is_empty() {
                self.nodes.push(TrieNode::default());
            }
            let mut node = 0;
            for ch in stem.chars() {
                node = match self.nodes[node].children.get(&ch) {
                    Some(&next) => next,
                    None => {
                        self.nodes.push(TrieNode::default());
                        let next = self.nodes.len() - 1;
                        self.nodes[node].children.insert(ch, next);
                        next
                    }
                };
            }
            self.nodes[node].wildcard = ids.clone();
        } else {
            self.exact.insert(stem.to_string(), ids.clone());
        }
        self.patterns.insert(pattern, ids);
        Ok(())
    }

    fn finish(mut self) -> Lexicon {
        if self.nodes.is_empty() {
            self.nodes.push(TrieNode::default());
        }
        Lexicon {
            categories: self.categories,
            exact: self.exact,
            nodes: self.nodes,
            patterns: self.patterns,
        }
    }
}

fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn malformed(line: usize, message: &str) -> LexiconError {
    LexiconError::Malformed {
        line,
        message: message.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names<'a>(set: &BTreeSet<&'a CategoryId>) -> Vec<&'a str> {
        set.iter().map(|c| c.as_str()).collect()
    }

    #[test]
    fn wildcard_entry_with_two_categories() {
        let lex = Lexicon::parse(
            "%categories positive_emotion,positive_feeling\nfelic*\tpositive_emotion,positive_feeling\n",
        )
        .unwrap();
        assert_eq!(lex.len(), 1);
        assert_eq!(
            names(&lex.categorize("felicità")),
            ["positive_emotion", "positive_feeling"]
        );
        // the prefix itself matches with an empty suffix
        assert_eq!(lex.categorize("felic").len(), 2);
        assert!(lex.categorize("feli").is_empty());
    }

    #[test]
    fn empty_file_is_empty_lexicon() {
        let lex = Lexicon::parse("").unwrap();
        assert!(lex.is_empty());
        assert!(lex.categorize("anything").is_empty());
    }

    #[test]
    fn duplicate_pattern_rejected() {
        let err = Lexicon::parse("%categories family\ncasa\tfamily\ncasa\tfamily\n").unwrap_err();
        assert!(matches!(err, LexiconError::DuplicatePattern { line: 3, .. }), "{err}");
    }

    #[test]
    fn wildcard_only_at_end() {
        let err = Lexicon::parse("%categories family\nca*sa\tfamily\n").unwrap_err();
        assert!(matches!(err, LexiconError::MisplacedWildcard { line: 2, .. }));
        let err = Lexicon::parse("%categories family\n*\tfamily\n").unwrap_err();
        assert!(matches!(err, LexiconError::Malformed { line: 2, .. }));
    }

    #[test]
    fn exact_match_multi_category() {
        let lex = Lexicon::parse("%categories negative_emotion,anger\nodio\tnegative_emotion,anger\n").unwrap();
        assert_eq!(names(&lex.categorize("odio")), ["anger", "negative_emotion"]);
        assert!(lex.categorize("odiosa").is_empty());
    }

    #[test]
    fn exact_and_wildcard_agreeing_count_once() {
        let lex = Lexicon::parse("%categories swear,anger\ncazz*\tswear\ncazzo\tswear,anger\n").unwrap();
        assert_eq!(lex.category_indices("cazzo"), vec![0, 1]);
        assert_eq!(lex.category_indices("cazzata"), vec![0]);
    }

    #[test]
    fn nested_wildcards_union() {
        let lex = Lexicon::parse("%categories a,b\nab*\ta\nabc*\tb\n").unwrap();
        assert_eq!(names(&lex.categorize("abcd")), ["a", "b"]);
        assert_eq!(names(&lex.categorize("abx")), ["a"]);
    }

    #[test]
    fn header_errors() {
        assert!(matches!(
            Lexicon::parse("odio\tanger\n").unwrap_err(),
            LexiconError::Malformed { line: 1, .. }
        ));
        assert!(Lexicon::parse("%categories Anger\n").is_err());
        assert!(Lexicon::parse("%categories anger,anger\n").is_err());
        assert!(Lexicon::parse("%categories anger\nodio\tsadness\n").is_err());
        assert!(Lexicon::parse("%categories anger\nodio anger\n").is_err());
    }

    #[test]
    fn accents_are_significant() {
        let lex = Lexicon::micro();
        assert_eq!(names(&lex.categorize("papà")), ["family"]);
        assert!(lex.categorize("papa").is_empty());
    }

    #[test]
    fn micro_lexicon_covers_binding_categories() {
        let lex = Lexicon::micro();
        for name in [
            "negative_emotion", "swear", "anger", "sadness", "third_person_plural_verb",
            "positive_feeling", "positive_emotion", "family", "sexual",
        ] {
            assert!(lex.has_category(name), "{name}");
        }
        assert!(lex.len() >= 60);
    }

    #[test]
    fn missing_file_names_path() {
        let err = Lexicon::load("/nonexistent/lex.txt").unwrap_err();
        assert!(err.to_string().contains("/nonexistent/lex.txt"));
    }
}

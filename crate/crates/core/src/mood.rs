//! Positive/Negative Mood Indicators and mood labels.
//!
//! The negative indicator is `NE + SW + AW + SaW - Nu + TP` and the positive
//! indicator is `PF + PE + Fa + QM`, each symbol being a percentage taken
//! from a [`FeatureVector`]. Which feature backs each symbol is configured
//! through [`Bindings`].

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::Lexicon;
use crate::stats::{mean, population_sd};
use crate::textfeatures::{FeatureKey, FeatureVector};

pub const DEFAULT_BINDINGS: &str = include_str!("../data/bindings.toml");

#[derive(Debug, Error)]
pub enum MoodError {
    #[error("cannot read bindings {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("bindings: {0}")]
    Parse(String),
    #[error("symbol {symbol} is not bound")]
    Unbound { symbol: &'static str },
    #[error("symbol {symbol} is bound to {feature:?}, which the lexicon does not define")]
    MissingCategory { symbol: &'static str, feature: String },
    #[error("degenerate corpus statistics: {0}")]
    Degenerate(String),
}

/// Symbols of the negative indicator, with the sign each term enters with.
pub const NEGATIVE_TERMS: [(&str, f64); 6] = [
    ("NE", 1.0),
    ("SW", 1.0),
    ("AW", 1.0),
    ("SaW", 1.0),
    ("Nu", -1.0),
    ("TP", 1.0),
];

/// Symbols of the positive indicator; all terms add.
pub const POSITIVE_TERMS: [(&str, f64); 4] = [("PF", 1.0), ("PE", 1.0), ("Fa", 1.0), ("QM", 1.0)];

/// Symbol → feature mapping for the two indicators.
#[derive(Debug, Clone, PartialEq)]
pub struct Bindings {
    map: BTreeMap<&'static str, FeatureKey>,
}

impl Default for Bindings {
    fn default() -> Self {
        Bindings::parse(DEFAULT_BINDINGS).expect("bundled bindings are well formed")
    }
}

impl Bindings {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, MoodError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| MoodError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, MoodError> {
        let raw: BTreeMap<String, String> =
            toml::from_str(text).map_err(|e| MoodError::Parse(e.to_string()))?;
        let mut map = BTreeMap::new();
        for (key, value) in raw {
            let symbol = symbol_name(&key)
                .ok_or_else(|| MoodError::Parse(format!("unknown symbol {key:?}")))?;
            let feature: FeatureKey = value.parse().unwrap_or_else(|e| match e {});
            map.insert(symbol, feature);
        }
        let bindings = Bindings { map };
        for (symbol, _) in NEGATIVE_TERMS.iter().chain(POSITIVE_TERMS.iter()) {
            bindings.feature(symbol)?;
        }
        Ok(bindings)
    }

    pub fn feature(&self, symbol: &str) -> Result<&FeatureKey, MoodError> {
        let symbol = symbol_name(symbol)
            .ok_or_else(|| MoodError::Parse(format!("unknown symbol {symbol:?}")))?;
        self.map.get(symbol).ok_or(MoodError::Unbound { symbol })
    }

    /// Checks every category-backed symbol against the lexicon inventory.
    pub fn validate(&self, lexicon: &Lexicon) -> Result<(), MoodError> {
        for (symbol, feature) in &self.map {
            if let FeatureKey::Category(name) = feature {
                if !lexicon.has_category(name) {
                    return Err(MoodError::MissingCategory {
                        symbol,
                        feature: name.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    fn weighted_sum(&self, fv: &FeatureVector, terms: &[(&'static str, f64)]) -> Result<f64, MoodError> {
        let mut total = 0.0;
        for &(symbol, sign) in terms {
            let feature = self.map.get(symbol).ok_or(MoodError::Unbound { symbol })?;
            let value = fv.get(feature).ok_or_else(|| MoodError::MissingCategory {
                symbol,
                feature: feature.to_string(),
            })?;
            total += sign * value;
        }
        Ok(total)
    }

    pub fn negative_mood_score(&self, fv: &FeatureVector) -> Result<f64, MoodError> {
        self.weighted_sum(fv, &NEGATIVE_TERMS)
    }

    pub fn positive_mood_score(&self, fv: &FeatureVector) -> Result<f64, MoodError> {
        self.weighted_sum(fv, &POSITIVE_TERMS)
    }

    pub fn scores(&self, fv: &FeatureVector) -> Result<MoodScores, MoodError> {
        Ok(MoodScores {
            positive: self.positive_mood_score(fv)?,
            negative: self.negative_mood_score(fv)?,
        })
    }
}

fn symbol_name(key: &str) -> Option<&'static str> {
    NEGATIVE_TERMS
        .iter()
        .chain(POSITIVE_TERMS.iter())
        .map(|(s, _)| *s)
        .find(|s| *s == key)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MoodScores {
    pub positive: f64,
    pub negative: f64,
}

impl MoodScores {
    pub fn new(positive: f64, negative: f64) -> Self {
        MoodScores { positive, negative }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MoodLabel {
    Positive,
    Negative,
    Neutral,
}

impl MoodLabel {
    pub const ALL: [MoodLabel; 3] = [MoodLabel::Positive, MoodLabel::Negative, MoodLabel::Neutral];

    pub fn as_str(self) -> &'static str {
        match self {
            MoodLabel::Positive => "positive",
            MoodLabel::Negative => "negative",
            MoodLabel::Neutral => "neutral",
        }
    }

    pub fn is_emotional(self) -> bool {
        self != MoodLabel::Neutral
    }

    /// Swaps positive and negative; neutral is fixed.
    pub fn flipped(self) -> Self {
        match self {
            MoodLabel::Positive => MoodLabel::Negative,
            MoodLabel::Negative => MoodLabel::Positive,
            MoodLabel::Neutral => MoodLabel::Neutral,
        }
    }
}

impl fmt::Display for MoodLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MoodLabel {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "positive" => Ok(MoodLabel::Positive),
            "negative" => Ok(MoodLabel::Negative),
            "neutral" => Ok(MoodLabel::Neutral),
            other => Err(format!("unknown mood label {other:?}")),
        }
    }
}

/// Label given to a text whose two indicators are equal and nonzero.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TiePolicy {
    #[default]
    Neutral,
    Positive,
    Negative,
}

impl FromStr for TiePolicy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "neutral" => Ok(TiePolicy::Neutral),
            "positive" => Ok(TiePolicy::Positive),
            "negative" => Ok(TiePolicy::Negative),
            other => Err(format!("unknown tie policy {other:?}")),
        }
    }
}

pub fn classify_mood(scores: MoodScores, tie: TiePolicy) -> MoodLabel {
    let MoodScores { positive, negative } = scores;
    if positive == 0.0 && negative == 0.0 {
        MoodLabel::Neutral
    } else if positive > negative {
        MoodLabel::Positive
    } else if negative > positive {
        MoodLabel::Negative
    } else {
        match tie {
            TiePolicy::Neutral => MoodLabel::Neutral,
            TiePolicy::Positive => MoodLabel::Positive,
            TiePolicy::Negative => MoodLabel::Negative,
        }
    }
}

/// Linear model over z-scored word count and sexual-word percentage.
///
/// The default has unit weights and zero intercept, so absolute scores are
/// only meaningful relative to the model in use.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfPresentationModel {
    pub word_count_weight: f64,
    pub sexual_weight: f64,
    pub intercept: f64,
    pub sexual_category: String,
}

impl Default for SelfPresentationModel {
    fn default() -> Self {
        SelfPresentationModel {
            word_count_weight: 1.0,
            sexual_weight: 1.0,
            intercept: 0.0,
            sexual_category: "sexual".into(),
        }
    }
}

/// Population mean and standard deviation of the two model inputs over profiles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub word_count_mean: f64,
    pub word_count_sd: f64,
    pub sexual_mean: f64,
    pub sexual_sd: f64,
}

impl CorpusStats {
    pub fn from_profiles(features: &[FeatureVector], model: &SelfPresentationModel) -> Result<Self, MoodError> {
        if features.len() < 2 {
            return Err(MoodError::Degenerate(format!(
                "need at least 2 profiles, got {}",
                features.len()
            )));
        }
        let wc: Vec<f64> = features.iter().map(|f| f.word_count as f64).collect();
        let sx: Vec<f64> = features.iter().map(|f| f.category(&model.sexual_category)).collect();
        let stats = CorpusStats {
            word_count_mean: mean(&wc),
            word_count_sd: population_sd(&wc),
            sexual_mean: mean(&sx),
            sexual_sd: population_sd(&sx),
        };
        stats.check()?;
        Ok(stats)
    }

    fn check(&self) -> Result<(), MoodError> {
        if self.word_count_sd.is_nan() || self.word_count_sd <= 0.0 {
            return Err(MoodError::Degenerate("word count has zero variance".into()));
        }
        if self.sexual_sd.is_nan() || self.sexual_sd <= 0.0 {
            return Err(MoodError::Degenerate("sexual percentage has zero variance".into()));
        }
        Ok(())
    }
}

pub fn self_presentation_score(
    fv: &FeatureVector,
    model: &SelfPresentationModel,
    stats: &CorpusStats,
) -> Result<f64, MoodError> {
    stats.check()?;
    let z_wc = (fv.word_count as f64 - stats.word_count_mean) / stats.word_count_sd;
    let z_sx = (fv.category(&model.sexual_category) - stats.sexual_mean) / stats.sexual_sd;
    Ok(model.intercept + model.word_count_weight * z_wc + model.sexual_weight * z_sx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textfeatures::analyze_text;

    fn fv(pairs: &[(&str, f64)], numerals: f64, qm: f64) -> FeatureVector {
        let mut fv = FeatureVector::zero(&Lexicon::micro());
        for (k, v) in pairs {
            fv.category_pct.insert(k.to_string(), *v);
        }
        fv.numerals_pct = numerals;
        fv.question_marks_pct = qm;
        fv
    }

    #[test]
    fn negative_arithmetic() {
        let b = Bindings::default();
        let f = fv(&[("negative_emotion", 10.0), ("swear", 5.0)], 2.0, 0.0);
        assert_eq!(b.negative_mood_score(&f).unwrap(), 13.0);
        assert_eq!(b.negative_mood_score(&fv(&[], 0.0, 0.0)).unwrap(), 0.0);
    }

    #[test]
    fn positive_arithmetic() {
        let b = Bindings::default();
        let f = fv(&[("positive_feeling", 5.0), ("positive_emotion", 10.0)], 0.0, 5.0);
        assert_eq!(b.positive_mood_score(&f).unwrap(), 20.0);
        assert_eq!(b.positive_mood_score(&fv(&[], 0.0, 0.0)).unwrap(), 0.0);
    }

    #[test]
    fn swear_cancelled_by_numeral() {
        let lex = Lexicon::micro();
        let f = analyze_text("oggi 3 treni in ritardo e che merda questa strada", &lex);
        assert_eq!(f.word_count, 10);
        assert_eq!(Bindings::default().negative_mood_score(&f).unwrap(), 0.0);
    }

    #[test]
    fn positive_through_text() {
        let lex = Lexicon::micro();
        let f = analyze_text("che bella giornata amore", &lex);
        assert_eq!(Bindings::default().positive_mood_score(&f).unwrap(), 50.0);
    }

    #[test]
    fn classification_rules() {
        let t = TiePolicy::Neutral;
        assert_eq!(classify_mood(MoodScores::new(0.0, 0.0), t), MoodLabel::Neutral);
        assert_eq!(classify_mood(MoodScores::new(20.0, 13.0), t), MoodLabel::Positive);
        assert_eq!(classify_mood(MoodScores::new(3.0, 13.0), t), MoodLabel::Negative);
        assert_eq!(classify_mood(MoodScores::new(7.0, 7.0), t), MoodLabel::Neutral);
        assert_eq!(classify_mood(MoodScores::new(7.0, 7.0), TiePolicy::Positive), MoodLabel::Positive);
        assert_eq!(classify_mood(MoodScores::new(7.0, 7.0), TiePolicy::Negative), MoodLabel::Negative);
        // negative indicator may go below zero through the numerals term
        assert_eq!(classify_mood(MoodScores::new(0.0, -10.0), t), MoodLabel::Positive);
    }

    #[test]
    fn missing_category_is_config_error() {
        let lex = Lexicon::parse("%categories swear\nmerda\tswear\n").unwrap();
        let b = Bindings::default();
        assert!(matches!(b.validate(&lex), Err(MoodError::MissingCategory { .. })));
        let f = analyze_text("merda", &lex);
        assert!(matches!(
            b.negative_mood_score(&f),
            Err(MoodError::MissingCategory { symbol: "NE", .. })
        ));
    }

    #[test]
    fn bindings_parse_errors() {
        assert!(matches!(Bindings::parse("XX = \"anger\""), Err(MoodError::Parse(_))));
        assert!(matches!(Bindings::parse("NE = \"anger\""), Err(MoodError::Unbound { .. })));
        assert!(matches!(Bindings::parse("NE = "), Err(MoodError::Parse(_))));
        Bindings::default().validate(&Lexicon::micro()).unwrap();
    }

    fn stats() -> CorpusStats {
        CorpusStats {
            word_count_mean: 100.0,
            word_count_sd: 20.0,
            sexual_mean: 0.3,
            sexual_sd: 0.1,
        }
    }

    #[test]
    fn self_presentation_z_arithmetic() {
        let model = SelfPresentationModel::default();
        let mut f = fv(&[("sexual", 0.3)], 0.0, 0.0);
        f.word_count = 100;
        assert_eq!(self_presentation_score(&f, &model, &stats()).unwrap(), 0.0);
        f.word_count = 120;
        assert!((self_presentation_score(&f, &model, &stats()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn self_presentation_degenerate() {
        let model = SelfPresentationModel::default();
        let f = fv(&[], 0.0, 0.0);
        let flat = vec![f.clone(), f.clone()];
        assert!(matches!(
            CorpusStats::from_profiles(&flat, &model),
            Err(MoodError::Degenerate(_))
        ));
        assert!(CorpusStats::from_profiles(&flat[..1], &model).is_err());
        let mut s = stats();
        s.sexual_sd = 0.0;
        assert!(self_presentation_score(&f, &model, &s).is_err());
    }
}

//! Metric development: which features discriminate labeled mood conditions.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::mood::MoodLabel;
use crate::stats::{oneway_anova, scheffe_pairwise, zscores, StatsError};
use crate::textfeatures::{FeatureKey, FeatureVector};

/// Labeled posts used to pick predictors.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CriterionSample {
    pub posts: Vec<(String, MoodLabel)>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CriterionRow {
    text: String,
    label: String,
}

impl CriterionSample {
    pub fn len(&self) -> usize {
        self.posts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.posts.is_empty()
    }

    /// Counts in [`MoodLabel::ALL`] order.
    pub fn label_counts(&self) -> [usize; 3] {
        let mut counts = [0; 3];
        for (_, label) in &self.posts {
            counts[label_index(*label)] += 1;
        }
        counts
    }

    pub fn is_balanced(&self) -> bool {
        let c = self.label_counts();
        c[0] == c[1] && c[1] == c[2]
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, PipelineError> {
        let path = path.as_ref();
        let file = std::fs::File::open(path)
            .map_err(|e| PipelineError::Criterion(format!("{}: {e}", path.display())))?;
        Self::read_csv(file)
    }

    /// `text,label` CSV with a header row.
    pub fn read_csv(reader: impl Read) -> Result<Self, PipelineError> {
        let mut rdr = csv::Reader::from_reader(reader);
        let mut posts = Vec::new();
        for (i, row) in rdr.deserialize::<CriterionRow>().enumerate() {
            let line = i + 2;
            let row = row.map_err(|e| PipelineError::Criterion(format!("line {line}: {e}")))?;
            let label = row
                .label
                .parse()
                .map_err(|e| PipelineError::Criterion(format!("line {line}: {e}")))?;
            posts.push((row.text, label));
        }
        Ok(CriterionSample { posts })
    }

    pub fn write_csv(&self, writer: impl Write) -> Result<(), PipelineError> {
        let mut w = csv::Writer::from_writer(writer);
        let err = |e: csv::Error| PipelineError::Criterion(e.to_string());
        for (text, label) in &self.posts {
            w.serialize(CriterionRow {
                text: text.clone(),
                label: label.as_str().to_string(),
            })
            .map_err(err)?;
        }
        w.flush().map_err(|e| PipelineError::Criterion(e.to_string()))
    }
}

fn label_index(label: MoodLabel) -> usize {
    MoodLabel::ALL.iter().position(|&l| l == label).unwrap_or(0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// One feature with a significant F and a condition it singles out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Predictor {
    pub feature: String,
    pub f: f64,
    pub p: f64,
    pub target_mood: MoodLabel,
    pub sign: Sign,
    /// Mean population z-score per condition, in positive/negative/neutral order.
    pub z_by_condition: [f64; 3],
}

/// Significant F but no single condition separated from both others.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Unassigned {
    pub feature: String,
    pub f: f64,
    pub p: f64,
    pub z_by_condition: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectedPredictors {
    pub alpha: f64,
    /// Sorted by descending F.
    pub predictors: Vec<Predictor>,
    pub unassigned: Vec<Unassigned>,
    /// Features skipped because their variance was degenerate.
    pub skipped: Vec<(String, String)>,
}

impl SelectedPredictors {
    pub fn get(&self, feature: &str) -> Option<&Predictor> {
        self.predictors.iter().find(|p| p.feature == feature)
    }
}

/// The condition whose Scheffé contrasts with both other conditions are
/// significant and point the same way; ties broken by the largest |z|.
fn target_condition(table: &crate::stats::ScheffeTable, z: &[f64; 3]) -> Option<usize> {
    (0..3)
        .filter(|&t| {
            let others: Vec<usize> = (0..3).filter(|&o| o != t).collect();
            let diffs: Option<Vec<f64>> = others
                .iter()
                .map(|&o| {
                    let pair = table.get(t, o)?;
                    let d = if pair.i == t { pair.mean_diff } else { -pair.mean_diff };
                    pair.significant.then_some(d)
                })
                .collect();
            diffs.is_some_and(|d| d[0].signum() == d[1].signum() && d[0] != 0.0)
        })
        .max_by(|&a, &b| z[a].abs().total_cmp(&z[b].abs()))
}

/// One-way ANOVA per candidate across the three labels, Scheffé to find the
/// discriminated condition, and z-scores for its sign.
pub fn select_features(
    sample: &CriterionSample,
    features: &[FeatureVector],
    candidates: &[FeatureKey],
    alpha: f64,
) -> Result<SelectedPredictors, PipelineError> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(PipelineError::Config(format!("alpha must be in (0, 1], got {alpha}")));
    }
    if features.len() != sample.len() {
        return Err(PipelineError::Criterion(format!(
            "{} feature vectors for {} posts",
            features.len(),
            sample.len()
        )));
    }
    let counts = sample.label_counts();
    if !sample.is_balanced() {
        return Err(PipelineError::Criterion(format!(
            "unbalanced sample: positive {}, negative {}, neutral {}",
            counts[0], counts[1], counts[2]
        )));
    }
    if counts[0] < 2 {
        return Err(PipelineError::Criterion(format!(
            "need at least 2 posts per label, got {}",
            counts[0]
        )));
    }
    let labels: Vec<usize> = sample.posts.iter().map(|(_, l)| label_index(*l)).collect();

    let mut out = SelectedPredictors {
        alpha,
        predictors: Vec::new(),
        unassigned: Vec::new(),
        skipped: Vec::new(),
    };
    for key in candidates {
        let values: Vec<f64> = features
            .iter()
            .map(|fv| {
                fv.get(key)
                    .ok_or_else(|| PipelineError::Criterion(format!("feature {key} missing from feature vectors")))
            })
            .collect::<Result<_, _>>()?;
        let mut groups: [Vec<f64>; 3] = Default::default();
        for (&l, &v) in labels.iter().zip(&values) {
            groups[l].push(v);
        }
        let skip = |out: &mut SelectedPredictors, e: StatsError| {
            log::warn!("feature {key} skipped: {e}");
            out.skipped.push((key.to_string(), e.to_string()));
        };
        let anova = match oneway_anova(&groups) {
            Ok(r) => r,
            Err(e) => {
                skip(&mut out, e);
                continue;
            }
        };
        if alpha < 1.0 && anova.p_value >= alpha {
            continue;
        }
        let z = zscores(&values)?;
        let mut z_by_condition = [0.0; 3];
        for (c, slot) in z_by_condition.iter_mut().enumerate() {
            let zs: Vec<f64> = labels.iter().zip(&z).filter(|(&l, _)| l == c).map(|(_, &v)| v).collect();
            *slot = crate::stats::mean(&zs);
        }
        let table = scheffe_pairwise(&groups, alpha)?;
        match target_condition(&table, &z_by_condition) {
            Some(t) => out.predictors.push(Predictor {
                feature: key.to_string(),
                f: anova.statistic,
                p: anova.p_value,
                target_mood: MoodLabel::ALL[t],
                sign: if z_by_condition[t] > 0.0 { Sign::Plus } else { Sign::Minus },
                z_by_condition,
            }),
            None => out.unassigned.push(Unassigned {
                feature: key.to_string(),
                f: anova.statistic,
                p: anova.p_value,
                z_by_condition,
            }),
        }
    }
    out.predictors.sort_by(|a, b| b.f.total_cmp(&a.f).then_with(|| a.feature.cmp(&b.feature)));
    out.unassigned.sort_by(|a, b| b.f.total_cmp(&a.f).then_with(|| a.feature.cmp(&b.feature)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::Lexicon;
    use crate::textfeatures::analyze_text;

    fn sample(rows: &[(&str, MoodLabel)]) -> CriterionSample {
        CriterionSample {
            posts: rows.iter().map(|(t, l)| (t.to_string(), *l)).collect(),
        }
    }

    #[test]
    fn planted_negative_word_is_selected() {
        use MoodLabel::*;
        let lex = Lexicon::parse(
            "%categories negword,other\nnegword*\tnegword\nfoo\tother\n",
        )
        .unwrap();
        let mut rows = Vec::new();
        for i in 0..10 {
            let filler = "a b c d e f g h".split(' ').take(4 + i % 4).collect::<Vec<_>>().join(" ");
            let foo = if i % 2 == 0 { " foo" } else { "" };
            rows.push((format!("negwordx {filler}{foo}"), Negative));
            rows.push((format!("{filler}{foo}"), Positive));
            rows.push((format!("{filler} z{foo}"), Neutral));
        }
        let s = CriterionSample {
            posts: rows,
        };
        let fvs: Vec<_> = s.posts.iter().map(|(t, _)| analyze_text(t, &lex)).collect();
        let cands = [FeatureKey::category("negword"), FeatureKey::category("other")];
        let sel = select_features(&s, &fvs, &cands, 0.01).unwrap();
        let p = sel.get("negword").unwrap();
        assert_eq!((p.target_mood, p.sign), (Negative, Sign::Plus));
        assert!(p.z_by_condition[1] > 0.0);
        assert!(sel.get("other").is_none());
        assert_eq!(sel.predictors[0].feature, "negword");
    }

    #[test]
    fn unbalanced_rejected() {
        let s = sample(&[("a", MoodLabel::Positive), ("b", MoodLabel::Positive), ("c", MoodLabel::Negative)]);
        let lex = Lexicon::micro();
        let fvs: Vec<_> = s.posts.iter().map(|(t, _)| analyze_text(t, &lex)).collect();
        assert!(matches!(
            select_features(&s, &fvs, &[], 0.01),
            Err(PipelineError::Criterion(_))
        ));
    }

    #[test]
    fn csv_round_trip() {
        let s = sample(&[("ciao, \"amore\"", MoodLabel::Positive), ("che schifo", MoodLabel::Negative)]);
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("text,label\n"));
        assert_eq!(CriterionSample::read_csv(&buf[..]).unwrap(), s);
        assert!(CriterionSample::read_csv("text,label\nx,happy\n".as_bytes()).is_err());
    }
}

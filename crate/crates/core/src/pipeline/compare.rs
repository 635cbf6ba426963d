//! Group comparisons: bootstrap-balanced post groups and the high/low
//! empathy profile split.
//!
//! Every t is `mean(group_a) - mean(group_b)` over its standard error, and
//! each report records which group is `a`.

use serde::{Deserialize, Serialize};

use super::coherence::CoherenceOutcome;
use super::scoring::{ScoredCorpus, ScoredPost};
use super::PipelineError;
use crate::corpus::{FacebookMetrics, Gender};
use crate::mood::MoodLabel;
use crate::stats::{
    bootstrap_balance, mean, median_split, pearson_r, sample_sd, t_test_independent, TestResult,
};
use crate::textfeatures::FeatureVector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub label: String,
    pub n: usize,
    pub mean: f64,
    /// Sample (n - 1) standard deviation.
    pub sd: f64,
}

impl GroupSummary {
    fn of(label: &str, xs: &[f64]) -> Self {
        GroupSummary {
            label: label.to_string(),
            n: xs.len(),
            mean: mean(xs),
            sd: sample_sd(xs),
        }
    }
}

/// A t-test on one variable; `test` is `None` (with `error` set) when the variable is degenerate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableComparison {
    pub variable: String,
    pub group_a: GroupSummary,
    pub group_b: GroupSummary,
    pub test: Option<TestResult>,
    pub error: Option<String>,
}

impl VariableComparison {
    pub fn compute(variable: &str, a: (&str, &[f64]), b: (&str, &[f64])) -> Self {
        let (test, error) = match t_test_independent(a.1, b.1, true) {
            Ok(t) => (Some(t), None),
            Err(e) => (None, Some(e.to_string())),
        };
        VariableComparison {
            variable: variable.to_string(),
            group_a: GroupSummary::of(a.0, a.1),
            group_b: GroupSummary::of(b.0, b.1),
            test,
            error,
        }
    }

    pub fn significant(&self, alpha: f64) -> bool {
        self.test.is_some_and(|t| t.p_value < alpha)
    }

    /// Whether group b has the larger mean.
    pub fn b_greater(&self) -> bool {
        self.group_b.mean > self.group_a.mean
    }
}

/// Per-post quantities compared between post groups.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PostVariables {
    pub likes: f64,
    pub n_comments: f64,
    /// Mean positive indicator over the post's comments (0 without comments).
    pub comment_pos_score: f64,
    pub comment_neg_score: f64,
}

impl PostVariables {
    pub const NAMES: [&'static str; 4] = ["likes", "n_comments", "comment_pos_score", "comment_neg_score"];

    pub fn values(&self) -> [f64; 4] {
        [self.likes, self.n_comments, self.comment_pos_score, self.comment_neg_score]
    }
}

impl From<&ScoredPost> for PostVariables {
    fn from(p: &ScoredPost) -> Self {
        let c = p.mean_comment_scores();
        PostVariables {
            likes: p.likes as f64,
            n_comments: p.comments.len() as f64,
            comment_pos_score: c.positive,
            comment_neg_score: c.negative,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PostGroupComparison {
    pub group_a: String,
    pub group_b: String,
    pub n_a: usize,
    pub n_b: usize,
    /// Size of both groups after resampling the larger one.
    pub balanced_n: usize,
    pub seed: u64,
    pub comparisons: Vec<VariableComparison>,
}

impl PostGroupComparison {
    pub fn variable(&self, name: &str) -> Option<&VariableComparison> {
        self.comparisons.iter().find(|c| c.variable == name)
    }
}

/// Resamples the larger group down to the smaller group's size, then runs a
/// pooled t-test per variable.
pub fn compare_post_groups(
    a: (&str, &[PostVariables]),
    b: (&str, &[PostVariables]),
    seed: u64,
) -> Result<PostGroupComparison, PipelineError> {
    for (label, g) in [a, b] {
        if g.is_empty() {
            return Err(PipelineError::EmptyGroup(label.to_string()));
        }
    }
    let n = a.1.len().min(b.1.len());
    let balance = |g: &[PostVariables]| -> Result<Vec<PostVariables>, PipelineError> {
        if g.len() > n {
            Ok(bootstrap_balance(g, n, seed)?)
        } else {
            Ok(g.to_vec())
        }
    };
    let ga = balance(a.1)?;
    let gb = balance(b.1)?;
    let comparisons = PostVariables::NAMES
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let xa: Vec<f64> = ga.iter().map(|p| p.values()[i]).collect();
            let xb: Vec<f64> = gb.iter().map(|p| p.values()[i]).collect();
            VariableComparison::compute(name, (a.0, &xa), (b.0, &xb))
        })
        .collect();
    Ok(PostGroupComparison {
        group_a: a.0.to_string(),
        group_b: b.0.to_string(),
        n_a: a.1.len(),
        n_b: b.1.len(),
        balanced_n: n,
        seed,
        comparisons,
    })
}

/// Negative vs positive posts, and neutral vs emotional posts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PostComparisonReport {
    pub negative_vs_positive: PostGroupComparison,
    pub neutral_vs_emotional: PostGroupComparison,
}

pub fn compare_scored_posts(corpus: &ScoredCorpus, seed: u64) -> Result<PostComparisonReport, PipelineError> {
    let by = |pred: &dyn Fn(MoodLabel) -> bool| -> Vec<PostVariables> {
        corpus.posts().filter(|p| pred(p.label)).map(PostVariables::from).collect()
    };
    let negative = by(&|l| l == MoodLabel::Negative);
    let positive = by(&|l| l == MoodLabel::Positive);
    let neutral = by(&|l| l == MoodLabel::Neutral);
    let emotional = by(&|l| l.is_emotional());
    Ok(PostComparisonReport {
        negative_vs_positive: compare_post_groups(("negative", &negative), ("positive", &positive), seed)?,
        neutral_vs_emotional: compare_post_groups(
            ("neutral", &neutral),
            ("emotional", &emotional),
            seed.wrapping_add(1),
        )?,
    })
}

/// Everything known about one determinate profile for the empathy comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileEmpathyInput {
    pub profile_id: String,
    pub gender: Gender,
    pub chi2: f64,
    /// Whole-profile narration features.
    pub features: FeatureVector,
    pub metrics: Option<FacebookMetrics>,
    pub sp_score: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationEntry {
    pub variable: String,
    pub n: usize,
    pub test: Option<TestResult>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpathyReport {
    pub median: f64,
    pub low: Vec<String>,
    pub high: Vec<String>,
    pub degenerate_split: bool,
    /// t-tests with group a = low, group b = high.
    pub comparisons: Vec<VariableComparison>,
    /// Pearson r of chi2 against each variable, over all determinate profiles.
    pub correlations: Vec<CorrelationEntry>,
    /// Chi2 of male (a) vs female (b) profiles.
    pub gender: Option<VariableComparison>,
    pub warnings: Vec<String>,
}

impl EmpathyReport {
    pub fn comparison(&self, variable: &str) -> Option<&VariableComparison> {
        self.comparisons.iter().find(|c| c.variable == variable)
    }

    pub fn correlation(&self, variable: &str) -> Option<&CorrelationEntry> {
        self.correlations.iter().find(|c| c.variable == variable)
    }
}

/// Variable columns over profiles, in report order.
fn profile_variables(inputs: &[ProfileEmpathyInput]) -> Result<Vec<(String, Vec<f64>)>, PipelineError> {
    let mut cols: Vec<(String, Vec<f64>)> = Vec::new();
    let metrics: Vec<&FacebookMetrics> = inputs
        .iter()
        .map(|p| {
            p.metrics
                .as_ref()
                .ok_or_else(|| PipelineError::MissingMetrics(p.profile_id.clone()))
        })
        .collect::<Result<_, _>>()?;
    for (i, field) in FacebookMetrics::FIELDS.iter().enumerate() {
        cols.push((field.to_string(), metrics.iter().map(|m| m.values()[i] as f64).collect()));
    }
    let first = &inputs[0].features;
    cols.push(("word_count".into(), inputs.iter().map(|p| p.features.word_count as f64).collect()));
    for (name, get) in [
        ("six_letter_pct", (|f: &FeatureVector| f.six_letter_pct) as fn(&FeatureVector) -> f64),
        ("commas_pct", |f| f.commas_pct),
        ("question_marks_pct", |f| f.question_marks_pct),
        ("numerals_pct", |f| f.numerals_pct),
    ] {
        cols.push((name.into(), inputs.iter().map(|p| get(&p.features)).collect()));
    }
    for cat in first.category_pct.keys() {
        cols.push((cat.clone(), inputs.iter().map(|p| p.features.category(cat)).collect()));
    }
    if inputs.iter().all(|p| p.sp_score.is_some()) {
        cols.push((
            "self_presentation".into(),
            inputs.iter().map(|p| p.sp_score.unwrap_or_default()).collect(),
        ));
    }
    Ok(cols)
}

/// Median split on chi2, then low-vs-high t-tests, chi2 correlations and the gender test.
pub fn empathy_split_and_compare(inputs: &[ProfileEmpathyInput]) -> Result<EmpathyReport, PipelineError> {
    if inputs.len() < 4 {
        return Err(PipelineError::Insufficient(format!(
            "need at least 4 determinate profiles, got {}",
            inputs.len()
        )));
    }
    let columns = profile_variables(inputs)?;
    let mut warnings = Vec::new();
    if inputs.iter().any(|p| p.sp_score.is_none()) {
        warnings.push("self-presentation score unavailable for some profiles; skipped".to_string());
    }
    let keyed: Vec<(usize, f64)> = inputs.iter().enumerate().map(|(i, p)| (i, p.chi2)).collect();
    let split = median_split(&keyed)?;
    let chi2: Vec<f64> = inputs.iter().map(|p| p.chi2).collect();

    let mut comparisons = Vec::new();
    if split.is_degenerate() {
        warnings.push(format!("median split at {} leaves one group empty", split.median));
    } else {
        for (name, values) in &columns {
            let lo: Vec<f64> = split.low.iter().map(|&i| values[i]).collect();
            let hi: Vec<f64> = split.high.iter().map(|&i| values[i]).collect();
            let cmp = VariableComparison::compute(name, ("low", &lo), ("high", &hi));
            if let Some(e) = &cmp.error {
                warnings.push(format!("{name}: {e}"));
            }
            comparisons.push(cmp);
        }
    }

    let correlations = columns
        .iter()
        .map(|(name, values)| {
            let (test, error) = match pearson_r(&chi2, values) {
                Ok(t) => (Some(t), None),
                Err(e) => (None, Some(e.to_string())),
            };
            CorrelationEntry {
                variable: name.clone(),
                n: values.len(),
                test,
                error,
            }
        })
        .collect();

    let by_gender = |g: Gender| -> Vec<f64> {
        inputs.iter().filter(|p| p.gender == g).map(|p| p.chi2).collect()
    };
    let (male, female) = (by_gender(Gender::Male), by_gender(Gender::Female));
    let gender = (!male.is_empty() && !female.is_empty())
        .then(|| VariableComparison::compute("chi2_by_gender", ("male", &male), ("female", &female)));

    Ok(EmpathyReport {
        median: split.median,
        low: split.low.iter().map(|&i| inputs[i].profile_id.clone()).collect(),
        high: split.high.iter().map(|&i| inputs[i].profile_id.clone()).collect(),
        degenerate_split: split.is_degenerate(),
        comparisons,
        correlations,
        gender,
        warnings,
    })
}

/// Collects chi2 values of determinate profiles, keyed by profile id.
pub fn determinate_chi2(outcomes: &[CoherenceOutcome]) -> Vec<(String, f64)> {
    outcomes
        .iter()
        .filter_map(|o| o.chi2().map(|c| (o.profile_id().to_string(), c)))
        .collect()
}

//! Post × comment mood agreement and the empathy detector.
//!
//! Rows of the table are post moods, columns comment moods, both restricted
//! to positive/negative. Neutral posts and neutral comments never add a count.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::scoring::{ScoredPost, ScoredProfile};
use crate::mood::{classify_mood, MoodLabel, TiePolicy};
use crate::stats::{chi_square, ContingencyTable, Df, StatsError, TestResult};

/// Counting unit for the agreement table.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoherenceUnit {
    /// One count per non-neutral comment under a non-neutral post.
    #[default]
    Comment,
    /// One count per non-neutral post, using the label of its mean comment scores.
    PostMean,
}

impl FromStr for CoherenceUnit {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "comment" => Ok(CoherenceUnit::Comment),
            "post_mean" => Ok(CoherenceUnit::PostMean),
            other => Err(format!("unknown coherence unit {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherenceConfig {
    pub unit: CoherenceUnit,
    /// Chi-square at or above which a profile is highly empathetic.
    pub threshold: f64,
    /// Used to label mean comment scores under [`CoherenceUnit::PostMean`].
    pub tie: TiePolicy,
}

impl Default for CoherenceConfig {
    fn default() -> Self {
        CoherenceConfig {
            unit: CoherenceUnit::Comment,
            threshold: 4.0,
            tie: TiePolicy::Neutral,
        }
    }
}

const MOODS: [MoodLabel; 2] = [MoodLabel::Positive, MoodLabel::Negative];

fn mood_index(label: MoodLabel) -> Option<usize> {
    MOODS.iter().position(|&m| m == label)
}

pub fn empty_table() -> ContingencyTable {
    let names = || MOODS.iter().map(|m| m.as_str().to_string()).collect();
    ContingencyTable::new(names(), names())
}

/// 2×2 post-mood × comment-mood counts.
pub fn coherence_table<'a>(
    posts: impl IntoIterator<Item = &'a ScoredPost>,
    unit: CoherenceUnit,
    tie: TiePolicy,
) -> ContingencyTable {
    let mut table = empty_table();
    for post in posts {
        let Some(row) = mood_index(post.label) else {
            continue;
        };
        match unit {
            CoherenceUnit::Comment => {
                for c in &post.comments {
                    if let Some(col) = mood_index(c.label) {
                        table.counts[row][col] += 1;
                    }
                }
            }
            CoherenceUnit::PostMean => {
                if post.comments.is_empty() {
                    continue;
                }
                if let Some(col) = mood_index(classify_mood(post.mean_comment_scores(), tie)) {
                    table.counts[row][col] += 1;
                }
            }
        }
    }
    table
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherenceResult {
    pub profile_id: String,
    pub table: ContingencyTable,
    pub chi2: f64,
    pub df: Df,
    pub p_value: f64,
    pub highly_empathetic: bool,
    /// Graded empathy intensity; equal to `chi2`.
    pub empathy_score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CoherenceOutcome {
    Determinate(CoherenceResult),
    /// The table had no usable 2×2 structure; excluded from splits.
    Indeterminate {
        profile_id: String,
        table: ContingencyTable,
        reason: String,
    },
}

impl CoherenceOutcome {
    pub fn profile_id(&self) -> &str {
        match self {
            CoherenceOutcome::Determinate(r) => &r.profile_id,
            CoherenceOutcome::Indeterminate { profile_id, .. } => profile_id,
        }
    }

    pub fn determinate(&self) -> Option<&CoherenceResult> {
        match self {
            CoherenceOutcome::Determinate(r) => Some(r),
            CoherenceOutcome::Indeterminate { .. } => None,
        }
    }

    pub fn chi2(&self) -> Option<f64> {
        self.determinate().map(|r| r.chi2)
    }
}

fn classify(profile_id: &str, table: ContingencyTable, cfg: &CoherenceConfig) -> CoherenceOutcome {
    match chi_square(&table) {
        Ok(TestResult {
            statistic,
            df,
            p_value,
        }) => CoherenceOutcome::Determinate(CoherenceResult {
            profile_id: profile_id.to_string(),
            table,
            chi2: statistic,
            df,
            p_value,
            highly_empathetic: statistic >= cfg.threshold,
            empathy_score: statistic,
        }),
        Err(StatsError::Degenerate(reason) | StatsError::Invalid(reason)) => CoherenceOutcome::Indeterminate {
            profile_id: profile_id.to_string(),
            table,
            reason,
        },
    }
}

/// Per-profile agreement test between post moods and comment moods.
pub fn coherence(profile: &ScoredProfile, cfg: &CoherenceConfig) -> CoherenceOutcome {
    let table = coherence_table(&profile.posts, cfg.unit, cfg.tie);
    classify(&profile.profile_id, table, cfg)
}

/// One table summed over every profile.
pub fn pooled_coherence(profiles: &[ScoredProfile], cfg: &CoherenceConfig) -> CoherenceOutcome {
    let table = coherence_table(profiles.iter().flat_map(|p| p.posts.iter()), cfg.unit, cfg.tie);
    classify("pooled", table, cfg)
}

//! End-to-end analyses: scoring, feature selection, post-group comparisons,
//! coherence/empathy detection, and the synthetic corpus generator.

pub mod coherence;
pub mod compare;
pub mod generator;
pub mod scoring;
pub mod selection;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{CorpusError, Profile};
use crate::lexicon::Lexicon;
use crate::mood::{self_presentation_score, CorpusStats, MoodError, SelfPresentationModel};
use crate::stats::StatsError;
use crate::textfeatures::analyze_profile;

pub use coherence::{
    coherence, coherence_table, pooled_coherence, CoherenceConfig, CoherenceOutcome, CoherenceResult, CoherenceUnit,
};
pub use compare::{
    compare_post_groups, compare_scored_posts, empathy_split_and_compare, EmpathyReport, PostComparisonReport,
    PostVariables, ProfileEmpathyInput, VariableComparison,
};
pub use generator::{generate_contagion_corpus, generate_criterion_sample, ContagionConfig, PlantedEffects};
pub use scoring::{score_corpus, LabelCounts, MoodScorer, ScoredCorpus, ScoredPost, ScoredProfile, ScoringSummary};
pub use selection::{select_features, CriterionSample, Predictor, SelectedPredictors};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Mood(#[from] MoodError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("group {0:?} is empty")]
    EmptyGroup(String),
    #[error("profile {0:?} has no Facebook metrics")]
    MissingMetrics(String),
    #[error("insufficient data: {0}")]
    Insufficient(String),
    #[error("criterion sample: {0}")]
    Criterion(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl PipelineError {
    /// Configuration problems as opposed to data or statistical degeneracy.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            PipelineError::Config(_) | PipelineError::Mood(MoodError::Unbound { .. } | MoodError::MissingCategory { .. })
        )
    }
}

/// Per-profile coherence, the pooled table, and the high/low empathy comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherenceReport {
    pub config: CoherenceConfig,
    pub profiles: Vec<CoherenceOutcome>,
    pub pooled: CoherenceOutcome,
    pub determinate: usize,
    pub highly_empathetic: usize,
    /// `None` when the split was not requested.
    pub empathy: Option<EmpathyReport>,
}

/// Runs coherence on every scored profile and, when `split` is set, the empathy comparison.
///
/// `profiles` and `scored` must be in the same order.
pub fn analyze_coherence(
    profiles: &[Profile],
    scored: &ScoredCorpus,
    lexicon: &Lexicon,
    cfg: &CoherenceConfig,
    sp_model: &SelfPresentationModel,
    split: bool,
) -> Result<CoherenceReport, PipelineError> {
    if profiles.is_empty() {
        return Err(PipelineError::Insufficient("corpus has no profiles".into()));
    }
    let outcomes: Vec<CoherenceOutcome> = scored.profiles.iter().map(|p| coherence(p, cfg)).collect();
    let pooled = pooled_coherence(&scored.profiles, cfg);
    let determinate = outcomes.iter().filter(|o| o.determinate().is_some()).count();
    let highly_empathetic = outcomes
        .iter()
        .filter_map(CoherenceOutcome::determinate)
        .filter(|r| r.highly_empathetic)
        .count();

    let empathy = if split {
        let features: Vec<_> = profiles.iter().map(|p| analyze_profile(p, lexicon)).collect();
        let stats = CorpusStats::from_profiles(&features, sp_model);
        if let Err(e) = &stats {
            log::warn!("self-presentation score unavailable: {e}");
        }
        let mut inputs = Vec::new();
        for ((profile, outcome), fv) in profiles.iter().zip(&outcomes).zip(features) {
            let Some(chi2) = outcome.chi2() else { continue };
            let sp_score = match &stats {
                Ok(s) => Some(self_presentation_score(&fv, sp_model, s)?),
                Err(_) => None,
            };
            inputs.push(ProfileEmpathyInput {
                profile_id: profile.profile_id.clone(),
                gender: profile.gender,
                chi2,
                features: fv,
                metrics: profile.metrics.clone(),
                sp_score,
            });
        }
        Some(empathy_split_and_compare(&inputs)?)
    } else {
        None
    };

    Ok(CoherenceReport {
        config: *cfg,
        profiles: outcomes,
        pooled,
        determinate,
        highly_empathetic,
        empathy,
    })
}

//! Mood scoring of every eligible post and its comments.

use serde::{Deserialize, Serialize};

use crate::corpus::{eligible_posts, Post, Profile};
use crate::lexicon::Lexicon;
use crate::mood::{classify_mood, Bindings, MoodError, MoodLabel, MoodScores, TiePolicy};
use crate::stats::mean;
use crate::textfeatures::analyze_text;

/// Lexicon, bindings and tie rule bundled for scoring texts.
#[derive(Debug, Clone, Copy)]
pub struct MoodScorer<'a> {
    pub lexicon: &'a Lexicon,
    pub bindings: &'a Bindings,
    pub tie: TiePolicy,
}

impl<'a> MoodScorer<'a> {
    /// Fails when a bound category is missing from the lexicon.
    pub fn new(lexicon: &'a Lexicon, bindings: &'a Bindings, tie: TiePolicy) -> Result<Self, MoodError> {
        bindings.validate(lexicon)?;
        Ok(MoodScorer { lexicon, bindings, tie })
    }

    pub fn score_text(&self, text: &str) -> Result<(MoodScores, MoodLabel), MoodError> {
        let fv = analyze_text(text, self.lexicon);
        let scores = self.bindings.scores(&fv)?;
        Ok((scores, classify_mood(scores, self.tie)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredComment {
    pub comment_id: String,
    pub scores: MoodScores,
    pub label: MoodLabel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredPost {
    pub profile_id: String,
    pub post_id: String,
    pub likes: u64,
    pub scores: MoodScores,
    pub label: MoodLabel,
    pub comments: Vec<ScoredComment>,
}

impl ScoredPost {
    /// Mean comment indicators; zero when the post has no comments.
    pub fn mean_comment_scores(&self) -> MoodScores {
        if self.comments.is_empty() {
            return MoodScores::default();
        }
        let pos: Vec<f64> = self.comments.iter().map(|c| c.scores.positive).collect();
        let neg: Vec<f64> = self.comments.iter().map(|c| c.scores.negative).collect();
        MoodScores::new(mean(&pos), mean(&neg))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredProfile {
    pub profile_id: String,
    pub posts: Vec<ScoredPost>,
}

/// Post and comment accounting: totals, scored, and the mood breakdown.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelCounts {
    pub total: usize,
    pub scored: usize,
    pub non_neutral: usize,
    pub positive: usize,
    pub negative: usize,
    pub neutral: usize,
}

impl LabelCounts {
    fn record(&mut self, label: MoodLabel) {
        self.scored += 1;
        match label {
            MoodLabel::Positive => self.positive += 1,
            MoodLabel::Negative => self.negative += 1,
            MoodLabel::Neutral => self.neutral += 1,
        }
        if label.is_emotional() {
            self.non_neutral += 1;
        }
    }

    fn merge(&mut self, o: &LabelCounts) {
        self.total += o.total;
        self.scored += o.scored;
        self.non_neutral += o.non_neutral;
        self.positive += o.positive;
        self.negative += o.negative;
        self.neutral += o.neutral;
    }

    /// Share of scored items that are non-neutral, in percent.
    pub fn valid_pct(&self) -> f64 {
        if self.scored == 0 {
            0.0
        } else {
            100.0 * self.non_neutral as f64 / self.scored as f64
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoringSummary {
    pub profiles: usize,
    /// `scored` counts eligible posts.
    pub posts: LabelCounts,
    /// `total` counts every comment in the corpus; `scored` those under eligible posts.
    pub comments: LabelCounts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredCorpus {
    pub profiles: Vec<ScoredProfile>,
    pub summary: ScoringSummary,
}

impl ScoredCorpus {
    pub fn posts(&self) -> impl Iterator<Item = &ScoredPost> {
        self.profiles.iter().flat_map(|p| p.posts.iter())
    }
}

fn score_post(profile_id: &str, post: &Post, scorer: &MoodScorer<'_>) -> Result<ScoredPost, MoodError> {
    let (scores, label) = scorer.score_text(&post.text)?;
    let comments = post
        .comments
        .iter()
        .map(|c| {
            let (scores, label) = scorer.score_text(&c.text)?;
            Ok(ScoredComment {
                comment_id: c.comment_id.clone(),
                scores,
                label,
            })
        })
        .collect::<Result<Vec<_>, MoodError>>()?;
    Ok(ScoredPost {
        profile_id: profile_id.to_string(),
        post_id: post.post_id.clone(),
        likes: post.likes,
        scores,
        label,
        comments,
    })
}

fn score_profile(
    profile: &Profile,
    scorer: &MoodScorer<'_>,
    require_comments: bool,
) -> Result<(ScoredProfile, ScoringSummary), MoodError> {
    let mut summary = ScoringSummary {
        profiles: 1,
        ..Default::default()
    };
    summary.posts.total = profile.posts.len();
    summary.comments.total = profile.comment_count();
    let posts = eligible_posts(profile, require_comments)
        .into_iter()
        .map(|p| score_post(&profile.profile_id, p, scorer))
        .collect::<Result<Vec<_>, _>>()?;
    for post in &posts {
        summary.posts.record(post.label);
        for c in &post.comments {
            summary.comments.record(c.label);
        }
    }
    Ok((
        ScoredProfile {
            profile_id: profile.profile_id.clone(),
            posts,
        },
        summary,
    ))
}

/// Scores every eligible post and every comment under it.
///
/// Profiles are processed independently (in parallel with the `parallel`
/// feature); output order always follows the input.
pub fn score_corpus(
    profiles: &[Profile],
    scorer: &MoodScorer<'_>,
    require_comments: bool,
) -> Result<ScoredCorpus, MoodError> {
    #[cfg(feature = "parallel")]
    let per_profile: Vec<_> = {
        use rayon::prelude::*;
        profiles
            .par_iter()
            .map(|p| score_profile(p, scorer, require_comments))
            .collect::<Result<_, _>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let per_profile: Vec<_> = profiles
        .iter()
        .map(|p| score_profile(p, scorer, require_comments))
        .collect::<Result<_, _>>()?;

    let mut summary = ScoringSummary::default();
    let mut scored = Vec::with_capacity(per_profile.len());
    for (profile, s) in per_profile {
        summary.profiles += s.profiles;
        summary.posts.merge(&s.posts);
        summary.comments.merge(&s.comments);
        scored.push(profile);
    }
    Ok(ScoredCorpus {
        profiles: scored,
        summary,
    })
}

//! Lexicon-based mood indicators for short social-media texts, post/comment
//! emotional coherence, and the statistics pipeline built on top of them.
//!
//! ```
//! use moodco::lexicon::Lexicon;
//! use moodco::mood::{Bindings, MoodLabel, TiePolicy};
//! use moodco::pipeline::MoodScorer;
//!
//! let lexicon = Lexicon::micro();
//! let bindings = Bindings::default();
//! let scorer = MoodScorer::new(&lexicon, &bindings, TiePolicy::Neutral).unwrap();
//! let (_, label) = scorer.score_text("ti odio").unwrap();
//! assert_eq!(label, MoodLabel::Negative);
//! ```

pub mod corpus;
pub mod lexicon;
pub mod mood;
pub mod pipeline;
pub mod stats;
pub mod textfeatures;

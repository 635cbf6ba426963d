//! Synthetic corpora with known structure, assembled from micro-lexicon words.
//!
//! Each profile draws from its own ChaCha stream derived from the master
//! seed, so output does not depend on scheduling.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use super::selection::CriterionSample;
use super::PipelineError;
use crate::corpus::{rounded_average, Comment, FacebookMetrics, Gender, Post, PostKind, Profile};
use crate::mood::MoodLabel;

pub const FILLER: [&str; 31] = [
    "oggi", "domani", "sera", "che", "il", "la", "di", "con", "per", "una", "giornata", "scuola", "strada", "treno",
    "partita", "film", "ciao", "ancora", "tutti", "anche", "sempre", "dopo", "prima", "insieme", "questo", "quella",
    "casa", "mare", "sole", "musica", "amici",
];

pub const POSITIVE_FEELING_ONLY: [&str; 2] = ["adoro", "speranza"];
pub const POSITIVE_EMOTION_ONLY: [&str; 7] = ["amore", "bella", "gioia", "sorriso", "grazie", "fantastico", "meraviglioso"];
/// Both positive_emotion and positive_feeling.
pub const POSITIVE_BOTH: [&str; 2] = ["felice", "amo"];
pub const FAMILY: [&str; 6] = ["mamma", "papà", "famiglia", "fratello", "sorella", "nonna"];

pub const NEGATIVE_EMOTION_ONLY: [&str; 3] = ["paura", "schifo", "male"];
/// negative_emotion and anger.
pub const ANGER: [&str; 4] = ["odio", "rabbia", "arrabbiato", "nervoso"];
/// negative_emotion and sadness.
pub const SAD_EMOTION: [&str; 4] = ["triste", "dolore", "piango", "deluso"];
pub const SADNESS_ONLY: [&str; 2] = ["solitudine", "lacrime"];
pub const SWEAR: [&str; 4] = ["cazzo", "merda", "stronzo", "vaffanculo"];
pub const THIRD_PLURAL: [&str; 5] = ["hanno", "fanno", "dicono", "vogliono", "pensano"];

pub const SEXUAL: [&str; 4] = ["sesso", "sexy", "nudo", "sensuale"];

/// Categories outside the mood indicators, with sample words.
pub const NOISE: [(&str, &[&str]); 10] = [
    ("physical", &["mangio", "dormo", "stanco", "palestra"]),
    ("body", &["occhi", "mani", "capelli", "faccia"]),
    ("sensorial", &["guardo", "ascolto", "sento"]),
    ("possibility", &["forse", "magari", "possibile"]),
    ("sexual", &SEXUAL),
    ("money", &["soldi", "euro", "pagamento"]),
    ("present_tense", &["è", "ho", "sta"]),
    ("first_person_singular_pronoun", &["io", "me", "mi"]),
    ("second_person_singular_verb", &["sei", "hai", "vuoi", "puoi"]),
    ("conditional", &["vorrei", "sarebbe", "potrei", "dovrei"]),
];

/// Features planted in [`generate_criterion_sample`], with target mood and sign.
pub const PLANTED_FEATURES: [(&str, MoodLabel, char); 10] = [
    ("positive_feeling", MoodLabel::Positive, '+'),
    ("positive_emotion", MoodLabel::Positive, '+'),
    ("family", MoodLabel::Positive, '+'),
    ("question_marks_pct", MoodLabel::Positive, '+'),
    ("negative_emotion", MoodLabel::Negative, '+'),
    ("swear", MoodLabel::Negative, '+'),
    ("anger", MoodLabel::Negative, '+'),
    ("sadness", MoodLabel::Negative, '+'),
    ("numerals_pct", MoodLabel::Negative, '-'),
    ("third_person_plural_verb", MoodLabel::Negative, '+'),
];

const POSITIVE_POOLS: [&[&str]; 4] = [&POSITIVE_FEELING_ONLY, &POSITIVE_EMOTION_ONLY, &POSITIVE_BOTH, &FAMILY];
const NEGATIVE_POOLS: [&[&str]; 6] = [&NEGATIVE_EMOTION_ONLY, &ANGER, &SAD_EMOTION, &SADNESS_ONLY, &SWEAR, &THIRD_PLURAL];

fn pick<'a, R: Rng + ?Sized>(rng: &mut R, pool: &[&'a str]) -> &'a str {
    pool.choose(rng).copied().unwrap_or("")
}

fn pick_pool<'a, R: Rng + ?Sized>(rng: &mut R, pools: &[&[&'a str]]) -> &'a str {
    let pool = pools.choose(rng).copied().unwrap_or(&[]);
    pick(rng, pool)
}

fn numeral<R: Rng + ?Sized>(rng: &mut R) -> String {
    rng.random_range(1..100u32).to_string()
}

/// Profile-level effects layered on a contagion corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlantedEffects {
    /// Share of profiles given `high_coupling`; the rest use the base coupling.
    pub high_fraction: f64,
    pub high_coupling: f64,
    /// Post-count multiplier for high-coupling profiles.
    pub activity_factor: f64,
    /// Extra filler words per post in high-coupling profiles.
    pub extra_words: usize,
    /// Per-post probability of one sexual word.
    pub sexual_rate_low: f64,
    pub sexual_rate_high: f64,
    /// Extra negative words in negative comments under negative posts.
    pub negative_comment_boost: usize,
    /// Like-rate multiplier for emotional posts.
    pub emotional_like_factor: f64,
    /// Comment-rate multiplier for emotional posts.
    pub emotional_comment_factor: f64,
}

impl Default for PlantedEffects {
    fn default() -> Self {
        PlantedEffects {
            high_fraction: 0.5,
            high_coupling: 0.9,
            activity_factor: 2.0,
            extra_words: 4,
            sexual_rate_low: 0.05,
            sexual_rate_high: 0.2,
            negative_comment_boost: 1,
            emotional_like_factor: 1.5,
            emotional_comment_factor: 1.3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContagionConfig {
    pub n_profiles: usize,
    pub posts_per_profile: usize,
    pub comments_per_post_mean: f64,
    /// Probability a non-neutral post is positive.
    pub p_positive_post: f64,
    pub p_neutral_post: f64,
    /// Probability an independently drawn non-neutral comment is positive.
    pub p_positive_comment: f64,
    pub p_neutral_comment: f64,
    /// Probability a comment copies its post's mood instead of drawing independently.
    pub coupling: f64,
    /// Share of posts that are photos, videos, music, quotes or other.
    pub p_non_text: f64,
    pub likes_mean: f64,
    pub seed: u64,
    pub planted: Option<PlantedEffects>,
}

impl Default for ContagionConfig {
    fn default() -> Self {
        ContagionConfig {
            n_profiles: 50,
            posts_per_profile: 600,
            comments_per_post_mean: 2.0,
            p_positive_post: 0.57,
            p_neutral_post: 0.45,
            p_positive_comment: 0.5,
            p_neutral_comment: 0.3,
            coupling: 0.5,
            p_non_text: 0.1,
            likes_mean: 15.0,
            seed: 42,
            planted: None,
        }
    }
}

impl ContagionConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        let mut probs = vec![
            ("p_positive_post", self.p_positive_post),
            ("p_neutral_post", self.p_neutral_post),
            ("p_positive_comment", self.p_positive_comment),
            ("p_neutral_comment", self.p_neutral_comment),
            ("coupling", self.coupling),
            ("p_non_text", self.p_non_text),
        ];
        if let Some(p) = &self.planted {
            probs.extend([
                ("planted.high_fraction", p.high_fraction),
                ("planted.high_coupling", p.high_coupling),
                ("planted.sexual_rate_low", p.sexual_rate_low),
                ("planted.sexual_rate_high", p.sexual_rate_high),
            ]);
            for (name, v) in [
                ("planted.activity_factor", p.activity_factor),
                ("planted.emotional_like_factor", p.emotional_like_factor),
                ("planted.emotional_comment_factor", p.emotional_comment_factor),
            ] {
                if !(v.is_finite() && v > 0.0) {
                    return Err(PipelineError::Config(format!("{name} must be positive, got {v}")));
                }
            }
        }
        for (name, p) in probs {
            if !(0.0..=1.0).contains(&p) {
                return Err(PipelineError::Config(format!("{name} must be in [0, 1], got {p}")));
            }
        }
        for (name, v) in [
            ("comments_per_post_mean", self.comments_per_post_mean),
            ("likes_mean", self.likes_mean),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(PipelineError::Config(format!("{name} must be a non-negative number, got {v}")));
            }
        }
        Ok(())
    }
}

fn poisson<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> u64 {
    match Poisson::new(mean) {
        Ok(d) => d.sample(rng) as u64,
        Err(_) => 0,
    }
}

fn draw_mood<R: Rng + ?Sized>(rng: &mut R, p_neutral: f64, p_positive: f64) -> MoodLabel {
    if rng.random_bool(p_neutral) {
        MoodLabel::Neutral
    } else if rng.random_bool(p_positive) {
        MoodLabel::Positive
    } else {
        MoodLabel::Negative
    }
}

/// A short text whose mood under the default bindings is `label`.
fn mood_text<R: Rng + ?Sized>(
    rng: &mut R,
    label: MoodLabel,
    filler: std::ops::RangeInclusive<usize>,
    extra_negative: usize,
    sexual: bool,
) -> String {
    let n_filler = rng.random_range(filler);
    let mut words: Vec<String> = (0..n_filler).map(|_| pick(rng, &FILLER).to_string()).collect();
    let mut insert = |rng: &mut R, w: String| {
        let at = rng.random_range(0..=words.len());
        words.insert(at, w);
    };
    match label {
        MoodLabel::Positive => {
            for _ in 0..rng.random_range(1..=2) {
                let w = pick_pool(rng, &POSITIVE_POOLS);
                insert(rng, w.to_string());
            }
        }
        MoodLabel::Negative => {
            for _ in 0..rng.random_range(1..=2) + extra_negative {
                let w = pick_pool(rng, &NEGATIVE_POOLS);
                insert(rng, w.to_string());
            }
        }
        MoodLabel::Neutral => {}
    }
    if rng.random_bool(0.3) {
        let (_, pool) = NOISE[rng.random_range(0..NOISE.len())];
        if pool != SEXUAL.as_slice() {
            let w = pick(rng, pool);
            insert(rng, w.to_string());
        }
    }
    if sexual {
        let w = pick(rng, &SEXUAL);
        insert(rng, w.to_string());
    }
    if words.len() > 3 && rng.random_bool(0.2) {
        let at = rng.random_range(1..words.len() - 1);
        words[at].push(',');
    }
    let end = match label {
        MoodLabel::Positive if rng.random_bool(0.25) => "?",
        _ if rng.random_bool(0.3) => "!",
        _ => ".",
    };
    let mut text = words.join(" ");
    text.push_str(end);
    text
}

const NON_TEXT: [PostKind; 5] = [PostKind::Photo, PostKind::Video, PostKind::Music, PostKind::FamousQuote, PostKind::Other];

fn derive_metrics<R: Rng + ?Sized>(rng: &mut R, posts: &[Post]) -> FacebookMetrics {
    let text_posts: Vec<&Post> = posts.iter().filter(|p| p.kind == PostKind::Text).collect();
    let count = |k: PostKind| posts.iter().filter(|p| p.kind == k).count() as u64;
    let wall_posts = text_posts.len() as u64;
    let wall_posts_length: u64 = text_posts.iter().map(|p| p.text.chars().count() as u64).sum();
    let photos = count(PostKind::Photo);
    FacebookMetrics {
        friends: rng.random_range(100..900),
        followed_people: rng.random_range(0..200),
        visited_places: rng.random_range(0..40),
        famous_quotes: count(PostKind::FamousQuote),
        pages_with_likes: rng.random_range(10..400),
        complete_activity: posts.len() as u64,
        wall_posts,
        profile_picture_edits: rng.random_range(0..15),
        personal_photos: rng.random_range(0..=photos),
        photos,
        videos: count(PostKind::Video),
        likes: posts.iter().map(|p| p.likes).sum(),
        activities_with_like: posts.iter().filter(|p| p.likes > 0).count() as u64,
        wall_posts_with_comments: text_posts.iter().filter(|p| !p.comments.is_empty()).count() as u64,
        comments: text_posts.iter().map(|p| p.comments.len() as u64).sum(),
        wall_posts_length,
        wall_posts_average_length: if wall_posts > 0 {
            rounded_average(wall_posts_length, wall_posts)
        } else {
            0
        },
    }
}

fn generate_profile(cfg: &ContagionConfig, index: usize) -> Profile {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64);

    let planted = cfg.planted.as_ref();
    let high = planted.is_some_and(|p| rng.random_bool(p.high_fraction));
    let coupling = match planted {
        Some(p) if high => p.high_coupling,
        _ => cfg.coupling,
    };
    let (n_posts, extra_words, sexual_rate) = match planted {
        Some(p) => {
            let factor = if high { p.activity_factor } else { 1.0 };
            let jitter = rng.random_range(0.75..1.25);
            let n = (cfg.posts_per_profile as f64 * factor * jitter).round() as usize;
            let extra = if high { p.extra_words } else { 0 };
            let rate = if high { p.sexual_rate_high } else { p.sexual_rate_low };
            (n, extra, rate)
        }
        None => (cfg.posts_per_profile, 0, 0.0),
    };
    let gender = if rng.random_bool(0.5) { Gender::Female } else { Gender::Male };
    let profile_id = format!("p{:03}", index + 1);
    let mut timestamp: i64 = 1_356_998_400 + rng.random_range(0..86_400);

    let mut posts = Vec::with_capacity(n_posts);
    for i in 0..n_posts {
        timestamp += rng.random_range(600..86_400);
        let kind = if rng.random_bool(cfg.p_non_text) {
            NON_TEXT[rng.random_range(0..NON_TEXT.len())]
        } else {
            PostKind::Text
        };
        let mood = draw_mood(&mut rng, cfg.p_neutral_post, cfg.p_positive_post);
        let text = match kind {
            PostKind::Text => {
                let sexual = sexual_rate > 0.0 && rng.random_bool(sexual_rate);
                mood_text(&mut rng, mood, 4 + extra_words..=10 + extra_words, 0, sexual)
            }
            PostKind::FamousQuote => mood_text(&mut rng, MoodLabel::Neutral, 6..=12, 0, false),
            _ => String::new(),
        };
        let emotional = mood.is_emotional();
        let (like_factor, comment_factor) = match planted {
            Some(p) if emotional => (p.emotional_like_factor, p.emotional_comment_factor),
            _ => (1.0, 1.0),
        };
        let likes = poisson(&mut rng, cfg.likes_mean * like_factor);
        let n_comments = poisson(&mut rng, cfg.comments_per_post_mean * comment_factor);
        let comments = (0..n_comments)
            .map(|c| {
                let cm = if rng.random_bool(coupling) {
                    mood
                } else {
                    draw_mood(&mut rng, cfg.p_neutral_comment, cfg.p_positive_comment)
                };
                let boost = match planted {
                    Some(p) if mood == MoodLabel::Negative && cm == MoodLabel::Negative => p.negative_comment_boost,
                    _ => 0,
                };
                Comment {
                    comment_id: format!("c{}", c + 1),
                    text: mood_text(&mut rng, cm, 1..=5, boost, false),
                }
            })
            .collect();
        posts.push(Post {
            post_id: format!("{profile_id}-{:04}", i + 1),
            kind,
            text,
            likes,
            timestamp: Some(timestamp),
            comments,
        });
    }
    let metrics = derive_metrics(&mut rng, &posts);
    Profile {
        profile_id,
        gender,
        metrics: Some(metrics),
        posts,
    }
}

/// Profiles whose post moods are drawn independently and whose comments copy
/// the post mood with probability `coupling`.
pub fn generate_contagion_corpus(cfg: &ContagionConfig) -> Result<Vec<Profile>, PipelineError> {
    cfg.validate()?;
    #[cfg(feature = "parallel")]
    let profiles = {
        use rayon::prelude::*;
        (0..cfg.n_profiles).into_par_iter().map(|i| generate_profile(cfg, i)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let profiles = (0..cfg.n_profiles).map(|i| generate_profile(cfg, i)).collect();
    Ok(profiles)
}

const CRITERION_SLOTS: usize = 20;
const CRITERION_NOISE_RATE: f64 = 0.1;
const CONTAMINATION: f64 = 0.004;

/// A criterion post: fixed length, label-independent noise words, and
/// label-dependent planted words.
fn criterion_text<R: Rng + ?Sized>(rng: &mut R, label: MoodLabel) -> String {
    enum Slot {
        Pool(&'static [&'static str]),
        Numeral,
    }
    let planted: &[(Slot, f64)] = match label {
        MoodLabel::Positive => &[
            (Slot::Pool(&POSITIVE_FEELING_ONLY), 0.05),
            (Slot::Pool(&POSITIVE_EMOTION_ONLY), 0.05),
            (Slot::Pool(&POSITIVE_BOTH), 0.03),
            (Slot::Pool(&FAMILY), 0.06),
            (Slot::Numeral, 0.05),
        ],
        MoodLabel::Negative => &[
            (Slot::Pool(&NEGATIVE_EMOTION_ONLY), 0.04),
            (Slot::Pool(&ANGER), 0.05),
            (Slot::Pool(&SAD_EMOTION), 0.03),
            (Slot::Pool(&SADNESS_ONLY), 0.03),
            (Slot::Pool(&SWEAR), 0.05),
            (Slot::Pool(&THIRD_PLURAL), 0.05),
            (Slot::Numeral, 0.004),
        ],
        MoodLabel::Neutral => &[(Slot::Numeral, 0.05)],
    };
    let mut words = Vec::with_capacity(CRITERION_SLOTS + 3);
    for _ in 0..CRITERION_SLOTS {
        if rng.random_bool(CRITERION_NOISE_RATE) {
            let (_, pool) = NOISE[rng.random_range(0..NOISE.len())];
            words.push(pick(rng, pool).to_string());
            continue;
        }
        let mut u: f64 = rng.random();
        let mut chosen = None;
        for (slot, p) in planted {
            if u < *p {
                chosen = Some(slot);
                break;
            }
            u -= p;
        }
        let word = match chosen {
            Some(Slot::Pool(pool)) => pick(rng, pool).to_string(),
            Some(Slot::Numeral) => numeral(rng),
            None if label != MoodLabel::Positive && rng.random_bool(CONTAMINATION) => {
                pick_pool(rng, &POSITIVE_POOLS).to_string()
            }
            None if label != MoodLabel::Negative && rng.random_bool(CONTAMINATION) => {
                pick_pool(rng, &NEGATIVE_POOLS).to_string()
            }
            None => pick(rng, &FILLER).to_string(),
        };
        words.push(word);
    }
    let p_question = if label == MoodLabel::Positive { 0.5 } else { 0.03 };
    for _ in 0..3 {
        if rng.random_bool(p_question) {
            let at = rng.random_range(0..words.len());
            words[at].push('?');
        }
    }
    words.join(" ")
}

/// Balanced criterion sample with four positive-discriminating and six
/// negative-discriminating features (see [`PLANTED_FEATURES`]) plus the ten
/// [`NOISE`] categories at label-independent rates.
pub fn generate_criterion_sample(per_label: usize, seed: u64) -> CriterionSample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut posts = Vec::with_capacity(3 * per_label);
    for label in MoodLabel::ALL {
        for _ in 0..per_label {
            posts.push((criterion_text(&mut rng, label), label));
        }
    }
    CriterionSample { posts }
}

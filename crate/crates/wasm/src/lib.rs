//! Browser bindings for the demo page. Every function returns a JSON string;
//! failures come back as `{"error": "..."}`.

use moodco::lexicon::Lexicon;
use moodco::mood::{Bindings, TiePolicy};
use moodco::pipeline::{
    coherence, generate_contagion_corpus, pooled_coherence, score_corpus, CoherenceConfig, ContagionConfig,
    MoodScorer,
};
use moodco::stats::{chi_square, ContingencyTable, Df};
use moodco::textfeatures::tokenize;
use serde::Serialize;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn error(msg: impl std::fmt::Display) -> String {
    json!({ "error": msg.to_string() }).to_string()
}

fn df_value(df: Df) -> Value {
    match df {
        Df::One(d) => json!(d),
        Df::Two(a, b) => json!([a, b]),
    }
}

/// Indicators, label and the categories each word hit, using the bundled lexicon.
#[wasm_bindgen]
pub fn score_text(text: &str) -> String {
    let lexicon = Lexicon::micro();
    let bindings = Bindings::default();
    let scorer = match MoodScorer::new(&lexicon, &bindings, TiePolicy::Neutral) {
        Ok(s) => s,
        Err(e) => return error(e),
    };
    let (scores, label) = match scorer.score_text(text) {
        Ok(r) => r,
        Err(e) => return error(e),
    };
    let words: Vec<Value> = tokenize(text)
        .words
        .iter()
        .map(|w| {
            let cats: Vec<&str> = lexicon.categorize(w).into_iter().map(|c| c.as_str()).collect();
            json!({ "word": w, "categories": cats })
        })
        .collect();
    json!({
        "positive": scores.positive,
        "negative": scores.negative,
        "label": label.as_str(),
        "words": words,
    })
    .to_string()
}

/// Pearson chi-square on a 2×2 table laid out row by row.
#[wasm_bindgen]
pub fn chi_square_2x2(a: u32, b: u32, c: u32, d: u32) -> String {
    let names = |x: &str, y: &str| vec![x.to_string(), y.to_string()];
    let mut table = ContingencyTable::new(names("positive", "negative"), names("positive", "negative"));
    table.counts = vec![vec![a as u64, b as u64], vec![c as u64, d as u64]];
    match chi_square(&table) {
        Ok(t) => json!({ "chi2": t.statistic, "df": df_value(t.df), "p_value": t.p_value }).to_string(),
        Err(e) => error(e),
    }
}

#[derive(Debug, Serialize)]
struct SweepPoint {
    coupling: f64,
    profiles: usize,
    determinate: usize,
    flagged: usize,
    flagged_fraction: f64,
    mean_chi2: f64,
    pooled_chi2: Option<f64>,
}

/// Generates one synthetic corpus per coupling value and reports how many
/// profiles the detector flags at `threshold`.
///
/// `couplings` is a comma-separated list of probabilities in [0, 1].
#[wasm_bindgen]
pub fn coupling_sweep(couplings: &str, profiles: u32, posts_per_profile: u32, threshold: f64, seed: u32) -> String {
    let values: Result<Vec<f64>, _> = couplings
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse::<f64>)
        .collect();
    let values = match values {
        Ok(v) if !v.is_empty() => v,
        Ok(_) => return error("no coupling values given"),
        Err(e) => return error(format!("bad coupling list: {e}")),
    };
    if !(threshold > 0.0 && threshold.is_finite()) {
        return error(format!("threshold must be positive, got {threshold}"));
    }
    let lexicon = Lexicon::micro();
    let bindings = Bindings::default();
    let scorer = match MoodScorer::new(&lexicon, &bindings, TiePolicy::Neutral) {
        Ok(s) => s,
        Err(e) => return error(e),
    };
    let ccfg = CoherenceConfig {
        threshold,
        ..Default::default()
    };
    let mut points = Vec::new();
    for (i, &coupling) in values.iter().enumerate() {
        let cfg = ContagionConfig {
            n_profiles: profiles as usize,
            posts_per_profile: posts_per_profile as usize,
            coupling,
            seed: seed as u64 + i as u64,
            ..Default::default()
        };
        let corpus = match generate_contagion_corpus(&cfg) {
            Ok(c) => c,
            Err(e) => return error(e),
        };
        let scored = match score_corpus(&corpus, &scorer, true) {
            Ok(s) => s,
            Err(e) => return error(e),
        };
        let chi2: Vec<(f64, bool)> = scored
            .profiles
            .iter()
            .filter_map(|p| coherence(p, &ccfg).determinate().map(|r| (r.chi2, r.highly_empathetic)))
            .collect();
        let flagged = chi2.iter().filter(|(_, f)| *f).count();
        let mean_chi2 = if chi2.is_empty() {
            0.0
        } else {
            chi2.iter().map(|(c, _)| c).sum::<f64>() / chi2.len() as f64
        };
        points.push(SweepPoint {
            coupling,
            profiles: corpus.len(),
            determinate: chi2.len(),
            flagged,
            flagged_fraction: if corpus.is_empty() { 0.0 } else { flagged as f64 / corpus.len() as f64 },
            mean_chi2,
            pooled_chi2: pooled_coherence(&scored.profiles, &ccfg).chi2(),
        });
    }
    serde_json::to_string(&points).unwrap_or_else(error)
}

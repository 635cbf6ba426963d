//! Subcommand bodies. Each loads what it needs, runs one library operation and
//! writes its report under the output directory.

use std::path::{Path, PathBuf};

use clap::Args;
use moodco::corpus::{load_corpus, write_corpus, CorpusError, Profile};
use moodco::lexicon::Lexicon;
use moodco::mood::{Bindings, SelfPresentationModel};
use moodco::pipeline::compare::{CorrelationEntry, PostGroupComparison};
use moodco::pipeline::{
    analyze_coherence, compare_scored_posts, generate_contagion_corpus, generate_criterion_sample, score_corpus,
    select_features, CoherenceConfig, CoherenceOutcome, CoherenceReport, CriterionSample, MoodScorer,
    PipelineError, PlantedEffects, ScoredCorpus, VariableComparison,
};
use moodco::stats::{Df, TestResult};
use moodco::textfeatures::{analyze_text, FeatureKey, Structural};

use crate::config::{Format, RunConfig};
use crate::output::{num, opt_num, write_atomic, write_csv, write_json};
use crate::CliError;

#[derive(Debug, Args)]
pub struct SelectArgs {
    /// Labeled `text,label` CSV; a planted synthetic sample when omitted.
    #[arg(long, value_name = "PATH")]
    pub criterion_file: Option<PathBuf>,
    /// Posts per label in the synthetic sample.
    #[arg(long, default_value_t = 60)]
    pub per_label: usize,
    /// Restrict the candidates (comma separated); every category and
    /// percentage feature by default.
    #[arg(long, value_delimiter = ',', value_name = "NAMES")]
    pub features: Vec<String>,
}

#[derive(Debug, Args)]
pub struct CoherenceArgs {
    /// Skip the low/high empathy split and its comparisons.
    #[arg(long)]
    pub no_split: bool,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Output file; `<output_dir>/corpus.jsonl` by default.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub profiles: Option<usize>,
    #[arg(long)]
    pub posts_per_profile: Option<usize>,
    #[arg(long)]
    pub comments_mean: Option<f64>,
    /// Probability that a comment copies its post's mood.
    #[arg(long)]
    pub coupling: Option<f64>,
    #[arg(long)]
    pub p_positive_post: Option<f64>,
    #[arg(long)]
    pub p_neutral_post: Option<f64>,
    #[arg(long)]
    pub p_positive_comment: Option<f64>,
    #[arg(long)]
    pub p_neutral_comment: Option<f64>,
    #[arg(long)]
    pub p_non_text: Option<f64>,
    #[arg(long)]
    pub likes_mean: Option<f64>,
    /// Plant the default profile-level effects.
    #[arg(long)]
    pub planted: bool,
}

fn pipeline_err(e: PipelineError) -> CliError {
    if let PipelineError::Config(m) = e {
        CliError::Config(m)
    } else if e.is_config() {
        CliError::Config(e.to_string())
    } else {
        CliError::Data(e.to_string())
    }
}

fn corpus_err(e: CorpusError) -> CliError {
    CliError::Data(e.to_string())
}

fn load_lexicon(cfg: &RunConfig) -> Result<Lexicon, CliError> {
    match &cfg.lexicon_path {
        Some(p) => Lexicon::load(p).map_err(|e| CliError::Config(format!("lexicon {}: {e}", p.display()))),
        None => Ok(Lexicon::micro()),
    }
}

fn load_bindings(cfg: &RunConfig) -> Result<Bindings, CliError> {
    match &cfg.bindings_path {
        Some(p) => Bindings::load(p).map_err(|e| CliError::Config(format!("bindings {}: {e}", p.display()))),
        None => Ok(Bindings::default()),
    }
}

fn load_profiles(cfg: &RunConfig) -> Result<Vec<Profile>, CliError> {
    load_corpus(cfg.corpus()?).map_err(corpus_err)
}

fn score(cfg: &RunConfig, lexicon: &Lexicon, bindings: &Bindings, profiles: &[Profile]) -> Result<ScoredCorpus, CliError> {
    let scorer = MoodScorer::new(lexicon, bindings, cfg.tie_policy).map_err(|e| pipeline_err(e.into()))?;
    score_corpus(profiles, &scorer, cfg.require_comments).map_err(|e| pipeline_err(e.into()))
}

fn out_path(cfg: &RunConfig, name: &str) -> PathBuf {
    cfg.output_dir.join(name)
}

fn fmt_df(df: Df) -> String {
    match df {
        Df::One(d) => num(d),
        Df::Two(a, b) => format!("{};{}", num(a), num(b)),
    }
}

fn test_cols(test: Option<&TestResult>) -> [String; 3] {
    match test {
        Some(t) => [num(t.statistic), fmt_df(t.df), num(t.p_value)],
        None => Default::default(),
    }
}

fn header(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|s| s.to_string()).collect()
}

// ------------------------------------------------------------------ score

pub fn score_cmd(cfg: &RunConfig) -> Result<(), CliError> {
    let lexicon = load_lexicon(cfg)?;
    let bindings = load_bindings(cfg)?;
    let profiles = load_profiles(cfg)?;
    let scored = score(cfg, &lexicon, &bindings, &profiles)?;

    let mut rows = Vec::new();
    for post in scored.posts() {
        rows.push(vec![
            post.profile_id.clone(),
            post.post_id.clone(),
            String::new(),
            "post".into(),
            num(post.scores.positive),
            num(post.scores.negative),
            post.label.as_str().into(),
        ]);
        for c in &post.comments {
            rows.push(vec![
                post.profile_id.clone(),
                post.post_id.clone(),
                c.comment_id.clone(),
                "comment".into(),
                num(c.scores.positive),
                num(c.scores.negative),
                c.label.as_str().into(),
            ]);
        }
    }
    let cols = header(&["profile_id", "post_id", "comment_id", "unit", "positive", "negative", "label"]);
    write_csv(&out_path(cfg, "scores.csv"), &cols, rows)?;

    let s = scored.summary;
    let summary = serde_json::json!({
        "profiles": s.profiles,
        "posts": s.posts,
        "comments": s.comments,
        "posts_valid_pct": s.posts.valid_pct(),
        "comments_valid_pct": s.comments.valid_pct(),
    });
    write_json(&out_path(cfg, "score_summary.json"), &summary)
}

// ------------------------------------------------------------------ select-features

pub fn select_features_cmd(cfg: &RunConfig, args: &SelectArgs) -> Result<(), CliError> {
    let lexicon = load_lexicon(cfg)?;
    let sample = match &args.criterion_file {
        Some(p) => {
            crate::config::require_readable(p, "criterion file")?;
            CriterionSample::load(p).map_err(pipeline_err)?
        }
        None => {
            if args.per_label < 2 {
                return Err(CliError::Config("--per-label must be at least 2".into()));
            }
            let s = generate_criterion_sample(args.per_label, cfg.seed);
            let path = out_path(cfg, "criterion_sample.csv");
            write_atomic(&path, |w| {
                s.write_csv(w)
                    .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
            })?;
            s
        }
    };
    let candidates: Vec<FeatureKey> = if args.features.is_empty() {
        FeatureKey::candidates(&lexicon)
    } else {
        args.features.iter().map(|n| n.trim().parse().expect("infallible")).collect()
    };
    for key in &candidates {
        if let FeatureKey::Category(c) = key {
            if !lexicon.has_category(c) {
                return Err(CliError::Config(format!("feature {c:?} is not a lexicon category")));
            }
        }
    }
    let features: Vec<_> = sample.posts.iter().map(|(t, _)| analyze_text(t, &lexicon)).collect();
    let selected = select_features(&sample, &features, &candidates, cfg.alpha).map_err(pipeline_err)?;

    match cfg.format {
        Format::Json => write_json(&out_path(cfg, "selected_features.json"), &selected),
        Format::Csv => {
            let cols = header(&[
                "feature", "status", "f", "p", "target_mood", "sign", "z_positive", "z_negative", "z_neutral", "reason",
            ]);
            let z = |z: &[f64; 3]| z.map(num);
            let mut rows = Vec::new();
            for p in &selected.predictors {
                let [zp, zn, z0] = z(&p.z_by_condition);
                let sign = if p.sign.as_f64() > 0.0 { "+" } else { "-" };
                rows.push(vec![
                    p.feature.clone(),
                    "selected".into(),
                    num(p.f),
                    num(p.p),
                    p.target_mood.as_str().into(),
                    sign.into(),
                    zp,
                    zn,
                    z0,
                    String::new(),
                ]);
            }
            for u in &selected.unassigned {
                let [zp, zn, z0] = z(&u.z_by_condition);
                rows.push(vec![
                    u.feature.clone(),
                    "unassigned".into(),
                    num(u.f),
                    num(u.p),
                    String::new(),
                    String::new(),
                    zp,
                    zn,
                    z0,
                    String::new(),
                ]);
            }
            for (f, reason) in &selected.skipped {
                let mut row = vec![f.clone(), "skipped".into()];
                row.extend(std::iter::repeat_n(String::new(), 7));
                row.push(reason.clone());
                rows.push(row);
            }
            write_csv(&out_path(cfg, "selected_features.csv"), &cols, rows)
        }
    }
}

// ------------------------------------------------------------------ coherence

/// The library composition behind `coherence`.
pub fn coherence_report(cfg: &RunConfig, split: bool) -> Result<CoherenceReport, CliError> {
    let lexicon = load_lexicon(cfg)?;
    let bindings = load_bindings(cfg)?;
    let profiles = load_profiles(cfg)?;
    let scored = score(cfg, &lexicon, &bindings, &profiles)?;
    let ccfg = CoherenceConfig {
        unit: cfg.coherence_unit,
        threshold: cfg.empathy_threshold,
        tie: cfg.tie_policy,
    };
    analyze_coherence(&profiles, &scored, &lexicon, &ccfg, &SelfPresentationModel::default(), split)
        .map_err(pipeline_err)
}

fn outcome_row(o: &CoherenceOutcome) -> Vec<String> {
    let (table, tail) = match o {
        CoherenceOutcome::Determinate(r) => (
            &r.table,
            [
                "determinate".to_string(),
                num(r.chi2),
                fmt_df(r.df),
                num(r.p_value),
                r.highly_empathetic.to_string(),
                String::new(),
            ],
        ),
        CoherenceOutcome::Indeterminate { table, reason, .. } => (
            table,
            [
                "indeterminate".to_string(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                reason.clone(),
            ],
        ),
    };
    let mut row = vec![o.profile_id().to_string(), tail[0].clone()];
    row.extend(table.counts.iter().flatten().map(|c| c.to_string()));
    row.extend(tail[1..].iter().cloned());
    row
}

fn comparison_row(kind: &str, c: &VariableComparison) -> Vec<String> {
    let mut row = vec![
        kind.to_string(),
        c.variable.clone(),
        c.group_a.label.clone(),
        c.group_a.n.to_string(),
        num(c.group_a.mean),
        num(c.group_a.sd),
        c.group_b.label.clone(),
        c.group_b.n.to_string(),
        num(c.group_b.mean),
        num(c.group_b.sd),
    ];
    row.extend(test_cols(c.test.as_ref()));
    row.push(c.error.clone().unwrap_or_default());
    row
}

fn correlation_row(c: &CorrelationEntry) -> Vec<String> {
    let mut row = vec!["correlation".to_string(), c.variable.clone(), "chi2".into(), c.n.to_string()];
    row.extend(std::iter::repeat_n(String::new(), 6));
    row.extend(test_cols(c.test.as_ref()));
    row.push(c.error.clone().unwrap_or_default());
    row
}

const COMPARISON_COLS: [&str; 14] = [
    "kind", "variable", "group_a", "n_a", "mean_a", "sd_a", "group_b", "n_b", "mean_b", "sd_b", "statistic", "df",
    "p_value", "error",
];

pub fn coherence_cmd(cfg: &RunConfig, args: &CoherenceArgs) -> Result<(), CliError> {
    let report = coherence_report(cfg, !args.no_split)?;
    match cfg.format {
        Format::Json => write_json(&out_path(cfg, "coherence.json"), &report),
        Format::Csv => {
            let cols = header(&[
                "profile_id",
                "status",
                "pos_pos",
                "pos_neg",
                "neg_pos",
                "neg_neg",
                "chi2",
                "df",
                "p_value",
                "highly_empathetic",
                "reason",
            ]);
            let rows = report.profiles.iter().chain([&report.pooled]).map(outcome_row);
            write_csv(&out_path(cfg, "coherence.csv"), &cols, rows)?;
            if let Some(emp) = &report.empathy {
                let mut rows: Vec<Vec<String>> =
                    emp.comparisons.iter().map(|c| comparison_row("low_vs_high", c)).collect();
                rows.extend(emp.correlations.iter().map(correlation_row));
                rows.extend(emp.gender.iter().map(|g| comparison_row("gender", g)));
                write_csv(&out_path(cfg, "empathy.csv"), &header(&COMPARISON_COLS), rows)?;
            }
            Ok(())
        }
    }
}

// ------------------------------------------------------------------ compare-posts

pub fn compare_posts_cmd(cfg: &RunConfig) -> Result<(), CliError> {
    let lexicon = load_lexicon(cfg)?;
    let bindings = load_bindings(cfg)?;
    let profiles = load_profiles(cfg)?;
    let scored = score(cfg, &lexicon, &bindings, &profiles)?;
    let report = compare_scored_posts(&scored, cfg.seed).map_err(pipeline_err)?;
    match cfg.format {
        Format::Json => write_json(&out_path(cfg, "post_comparisons.json"), &report),
        Format::Csv => {
            let group = |g: &PostGroupComparison| {
                let kind = format!("{}_vs_{}", g.group_a, g.group_b);
                g.comparisons.iter().map(move |c| comparison_row(&kind, c)).collect::<Vec<_>>()
            };
            let mut rows = group(&report.negative_vs_positive);
            rows.extend(group(&report.neutral_vs_emotional));
            write_csv(&out_path(cfg, "post_comparisons.csv"), &header(&COMPARISON_COLS), rows)
        }
    }
}

// ------------------------------------------------------------------ generate

pub fn generate_cmd(cfg: &RunConfig, args: &GenerateArgs) -> Result<(), CliError> {
    let mut c = cfg.contagion.clone();
    c.seed = cfg.seed;
    if let Some(v) = args.profiles {
        c.n_profiles = v;
    }
    if let Some(v) = args.posts_per_profile {
        c.posts_per_profile = v;
    }
    for (slot, v) in [
        (&mut c.comments_per_post_mean, args.comments_mean),
        (&mut c.coupling, args.coupling),
        (&mut c.p_positive_post, args.p_positive_post),
        (&mut c.p_neutral_post, args.p_neutral_post),
        (&mut c.p_positive_comment, args.p_positive_comment),
        (&mut c.p_neutral_comment, args.p_neutral_comment),
        (&mut c.p_non_text, args.p_non_text),
        (&mut c.likes_mean, args.likes_mean),
    ] {
        if let Some(v) = v {
            *slot = v;
        }
    }
    if args.planted && c.planted.is_none() {
        c.planted = Some(PlantedEffects::default());
    }
    let profiles = generate_contagion_corpus(&c).map_err(pipeline_err)?;
    let path = args.out.clone().unwrap_or_else(|| out_path(cfg, "corpus.jsonl"));
    write_atomic(&path, |w| write_corpus(&profiles, w).map_err(|e| write_err(&path, e)))
}

fn write_err(path: &Path, e: CorpusError) -> CliError {
    CliError::Config(format!("cannot write {}: {e}", path.display()))
}

// ------------------------------------------------------------------ features-dump

const STRUCTURAL_COLS: [Structural; 4] = [
    Structural::QuestionMarks,
    Structural::Commas,
    Structural::Numerals,
    Structural::SixLetter,
];

pub fn features_dump_cmd(cfg: &RunConfig) -> Result<(), CliError> {
    let lexicon = load_lexicon(cfg)?;
    let profiles = load_profiles(cfg)?;
    let mut cols = header(&["profile_id", "post_id", "kind", "word_count"]);
    cols.extend(STRUCTURAL_COLS.iter().map(|s| s.name().to_string()));
    cols.extend(lexicon.categories().iter().map(|c| c.as_str().to_string()));

    let mut rows = Vec::new();
    for profile in &profiles {
        for post in &profile.posts {
            let fv = analyze_text(&post.text, &lexicon);
            let kind = serde_json::to_value(post.kind)
                .ok()
                .and_then(|v| v.as_str().map(str::to_string))
                .unwrap_or_default();
            let mut row = vec![profile.profile_id.clone(), post.post_id.clone(), kind, fv.word_count.to_string()];
            row.extend(STRUCTURAL_COLS.iter().map(|s| opt_num(fv.get(&FeatureKey::Structural(*s)))));
            row.extend(lexicon.categories().iter().map(|c| num(fv.category(c.as_str()))));
            rows.push(row);
        }
    }
    write_csv(&out_path(cfg, "features.csv"), &cols, rows)
}

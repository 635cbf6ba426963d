use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use moodco::corpus::{load_corpus, write_corpus};
use moodco::lexicon::{Lexicon, MICRO_LEXICON};
use moodco::mood::{Bindings, SelfPresentationModel, TiePolicy};
use moodco::pipeline::{
    analyze_coherence, generate_contagion_corpus, score_corpus, CoherenceConfig, ContagionConfig, MoodScorer,
};
use serde_json::Value;

const FIXTURE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/tests/fixtures/accounting.jsonl");

fn moodco(args: &[&str]) -> Output {
    moodco_env(args, None)
}

fn moodco_env(args: &[&str], config: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_moodco"));
    cmd.args(args).env_remove("MOODCO_CONFIG").env("RUST_LOG", "error");
    if let Some(c) = config {
        cmd.env("MOODCO_CONFIG", c);
    }
    cmd.output().expect("spawn moodco")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn csv_rows(p: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(p).unwrap().records().map(Result::unwrap).collect()
}

fn generate(dir: &Path, extra: &[&str]) -> PathBuf {
    let out = dir.join("corpus.jsonl");
    let mut args = vec!["generate", "--out", s(&out)];
    args.extend_from_slice(extra);
    let o = moodco(&args);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    out
}

// ------------------------------------------------------------------ score

#[test]
fn score_fixture_rows_equal_eligible_posts_plus_comments() {
    let dir = tempfile::tempdir().unwrap();
    let o = moodco(&["score", "--corpus", FIXTURE, "-o", s(dir.path())]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = csv_rows(&dir.path().join("scores.csv"));
    // 13 eligible posts, 21 comments under them
    assert_eq!(rows.len(), 13 + 21);
    let summary = read_json(&dir.path().join("score_summary.json"));
    assert_eq!(summary["posts"]["scored"], 13);
    assert_eq!(summary["comments"]["scored"], 21);
}

#[test]
fn score_labels_ti_odio_negative() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c.jsonl");
    std::fs::write(
        &corpus,
        concat!(
            r#"{"type":"profile","profile_id":"x"}"#,
            "\n",
            r#"{"type":"post","profile_id":"x","post_id":"x1","kind":"text","text":"ti odio","comments":[{"comment_id":"k1","text":"ciao"}]}"#,
            "\n"
        ),
    )
    .unwrap();
    let o = moodco(&["score", "--corpus", s(&corpus), "-o", s(dir.path())]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = csv_rows(&dir.path().join("scores.csv"));
    let post = rows.iter().find(|r| &r[1] == "x1" && &r[3] == "post").unwrap();
    assert_eq!(&post[6], "negative");
}

#[test]
fn missing_lexicon_is_config_error_naming_path() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("no_such_lexicon.txt");
    let o = moodco(&["score", "--corpus", FIXTURE, "--lexicon", s(&missing), "-o", s(dir.path())]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("no_such_lexicon.txt"), "{}", stderr(&o));
    assert!(!dir.path().join("scores.csv").exists());
}

#[test]
fn malformed_corpus_is_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("bad.jsonl");
    std::fs::write(&corpus, "{\"type\":\"post\",\"profile_id\":\"ghost\",\"post_id\":\"1\",\"kind\":\"text\"}\n").unwrap();
    let o = moodco(&["score", "--corpus", s(&corpus), "-o", s(dir.path())]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
}

#[test]
fn usage_errors_and_bad_values_exit_1() {
    assert_eq!(code(&moodco(&["frobnicate"])), 1);
    assert_eq!(code(&moodco(&["score", "--alpha", "0"])), 1);
    assert_eq!(code(&moodco(&["score", "--alpha", "1.5"])), 1);
    assert_eq!(code(&moodco(&["score"])), 1, "no corpus given");
    assert_eq!(code(&moodco(&["score", "--corpus", FIXTURE, "--jobs", "0"])), 1);
    assert_eq!(code(&moodco(&["--help"])), 0);
}

// ------------------------------------------------------------------ config

#[test]
fn config_env_fallback_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let lex = dir.path().join("lex.txt");
    std::fs::write(&lex, MICRO_LEXICON).unwrap();
    std::fs::copy(FIXTURE, dir.path().join("fixture.jsonl")).unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "corpus_path = \"fixture.jsonl\"\nlexicon_path = \"missing.txt\"\noutput_dir = \"out\"\n",
    )
    .unwrap();

    let o = moodco_env(&["score"], Some(&cfg));
    assert_eq!(code(&o), 1, "config lexicon is missing");
    assert!(stderr(&o).contains("missing.txt"));

    let o = moodco_env(&["score", "--lexicon", s(&lex)], Some(&cfg));
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(csv_rows(&dir.path().join("out/scores.csv")).len(), 34);

    // explicit --config beats the environment
    let other = dir.path().join("other.toml");
    std::fs::write(&other, "alpha = 2.0\n").unwrap();
    let o = moodco_env(&["score", "--config", s(&other)], Some(&cfg));
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("alpha"));
}

#[test]
fn unknown_config_key_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "alfa = 0.05\n").unwrap();
    let o = moodco(&["score", "--config", s(&cfg), "--corpus", FIXTURE]);
    assert_eq!(code(&o), 1);
}

// ------------------------------------------------------------------ select-features

#[test]
fn unbalanced_criterion_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let crit = dir.path().join("crit.csv");
    std::fs::write(&crit, "text,label\nche bello,positive\nevviva,positive\nche schifo,negative\nciao,neutral\n")
        .unwrap();
    let o = moodco(&["select-features", "--criterion-file", s(&crit), "-o", s(dir.path())]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    assert!(stderr(&o).contains("unbalanced"));
}

#[test]
fn planted_sample_sorted_by_descending_f() {
    let dir = tempfile::tempdir().unwrap();
    let o = moodco(&["select-features", "--seed", "7", "-o", s(dir.path())]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = read_json(&dir.path().join("selected_features.json"));
    let preds = r["predictors"].as_array().unwrap();
    assert!(!preds.is_empty());
    let f: Vec<f64> = preds.iter().map(|p| p["f"].as_f64().unwrap()).collect();
    assert!(f.windows(2).all(|w| w[0] >= w[1]));
    assert!(preds.iter().any(|p| p["feature"] == "negative_emotion" && p["target_mood"] == "negative"));

    // the sample it used is saved and reproduces the result when fed back
    let crit = dir.path().join("criterion_sample.csv");
    let again = dir.path().join("again");
    let o = moodco(&["select-features", "--criterion-file", s(&crit), "-o", s(&again)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(
        std::fs::read(dir.path().join("selected_features.json")).unwrap(),
        std::fs::read(again.join("selected_features.json")).unwrap()
    );
}

#[test]
fn alpha_one_lists_every_nondegenerate_feature() {
    let dir = tempfile::tempdir().unwrap();
    let o = moodco(&["select-features", "--alpha", "1.0", "-o", s(dir.path())]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = read_json(&dir.path().join("selected_features.json"));
    let listed = r["predictors"].as_array().unwrap().len() + r["unassigned"].as_array().unwrap().len();
    let skipped = r["skipped"].as_array().unwrap().len();
    let candidates = Lexicon::micro().categories().len() + 4;
    assert_eq!(listed + skipped, candidates);
    for sk in r["skipped"].as_array().unwrap() {
        assert!(sk[1].as_str().unwrap().contains("degenerate"));
    }
}

#[test]
fn select_features_csv_format() {
    let dir = tempfile::tempdir().unwrap();
    let o = moodco(&["select-features", "--format", "csv", "-o", s(dir.path())]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = csv_rows(&dir.path().join("selected_features.csv"));
    assert!(rows.iter().any(|r| &r[0] == "negative_emotion" && &r[1] == "selected" && &r[5] == "+"));
}

// ------------------------------------------------------------------ coherence

#[test]
fn coupling_one_flags_every_profile() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = generate(dir.path(), &["--profiles", "12", "--posts-per-profile", "80", "--coupling", "1"]);
    let o = moodco(&["coherence", "--corpus", s(&corpus), "-o", s(dir.path())]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = read_json(&dir.path().join("coherence.json"));
    let profiles = r["profiles"].as_array().unwrap();
    assert_eq!(profiles.len(), 12);
    assert!(profiles.iter().all(|p| p["highly_empathetic"] == true));
}

#[test]
fn coupling_point_nine_flags_majority() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = generate(dir.path(), &["--profiles", "20", "--posts-per-profile", "60", "--coupling", "0.9"]);
    let o = moodco(&["coherence", "--corpus", s(&corpus), "-o", s(dir.path())]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = read_json(&dir.path().join("coherence.json"));
    assert!(r["highly_empathetic"].as_u64().unwrap() > 10);
}

#[test]
fn fifty_profiles_give_fifty_chi2_entries() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = generate(dir.path(), &["--profiles", "50", "--posts-per-profile", "60"]);
    let o = moodco(&["coherence", "--corpus", s(&corpus), "-o", s(dir.path())]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = read_json(&dir.path().join("coherence.json"));
    let chi2 = r["profiles"].as_array().unwrap().iter().filter(|p| p["chi2"].is_number()).count();
    assert_eq!(chi2, 50);
    assert!(r["pooled"]["table"]["counts"].is_array());
    assert!(r["empathy"]["comparisons"].is_array());
}

#[test]
fn empty_corpus_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("empty.jsonl");
    std::fs::write(&corpus, "").unwrap();
    let o = moodco(&["coherence", "--corpus", s(&corpus), "-o", s(dir.path())]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    assert!(!dir.path().join("coherence.json").exists());
}

#[test]
fn coherence_csv_has_profiles_pooled_and_empathy() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = generate(dir.path(), &["--profiles", "8", "--posts-per-profile", "60"]);
    let o = moodco(&["coherence", "--corpus", s(&corpus), "--format", "csv", "-o", s(dir.path())]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = csv_rows(&dir.path().join("coherence.csv"));
    assert_eq!(rows.len(), 9);
    assert_eq!(&rows[8][0], "pooled");
    assert!(!csv_rows(&dir.path().join("empathy.csv")).is_empty());
}

#[test]
fn no_split_skips_empathy_and_tolerates_missing_metrics() {
    let dir = tempfile::tempdir().unwrap();
    // the fixture has no metrics, so the split fails loudly
    let o = moodco(&["coherence", "--corpus", FIXTURE, "-o", s(dir.path())]);
    assert_eq!(code(&o), 2);
    let o = moodco(&["coherence", "--corpus", FIXTURE, "--no-split", "-o", s(dir.path())]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = read_json(&dir.path().join("coherence.json"));
    assert!(r["empathy"].is_null());
}

// ------------------------------------------------------------------ compare-posts

#[test]
fn compare_posts_balances_groups() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = generate(dir.path(), &["--profiles", "10", "--posts-per-profile", "60"]);
    let o = moodco(&["compare-posts", "--corpus", s(&corpus), "-o", s(dir.path())]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = read_json(&dir.path().join("post_comparisons.json"));
    for key in ["negative_vs_positive", "neutral_vs_emotional"] {
        let g = &r[key];
        let n = g["balanced_n"].as_u64().unwrap();
        assert_eq!(n, g["n_a"].as_u64().unwrap().min(g["n_b"].as_u64().unwrap()));
        for c in g["comparisons"].as_array().unwrap() {
            assert_eq!(c["group_a"]["n"].as_u64().unwrap(), n);
            assert_eq!(c["group_b"]["n"].as_u64().unwrap(), n);
        }
    }
}

// ------------------------------------------------------------------ generate

#[test]
fn generate_counts_and_same_seed_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    for out in [&a, &b] {
        let o = moodco(&["generate", "--seed", "11", "--profiles", "50", "--posts-per-profile", "600", "--out", s(out)]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let text = std::fs::read_to_string(&a).unwrap();
    let count = |t: &str| text.lines().filter(|l| l.contains(&format!("\"type\":\"{t}\""))).count();
    assert_eq!(count("profile"), 50);
    assert_eq!(count("post"), 30_000);

    let c = dir.path().join("c.jsonl");
    let o = moodco(&["generate", "--seed", "12", "--profiles", "50", "--posts-per-profile", "600", "--out", s(&c)]);
    assert_eq!(code(&o), 0);
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());
}

#[test]
fn generate_rejects_invalid_probabilities() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.jsonl");
    for args in [["--coupling", "1.5"], ["--p-neutral-post", "-0.1"], ["--p-positive-comment", "2"]] {
        let mut full = vec!["generate", "--out", s(&out)];
        full.extend_from_slice(&args);
        assert_eq!(code(&moodco(&full)), 1, "{args:?}");
    }
    assert!(!out.exists());
}

// ------------------------------------------------------------------ features-dump

#[test]
fn features_dump_one_row_per_post_with_stable_columns() {
    let dir = tempfile::tempdir().unwrap();
    let o = moodco(&["features-dump", "--corpus", FIXTURE, "-o", s(dir.path())]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let mut rdr = csv::Reader::from_path(dir.path().join("features.csv")).unwrap();
    let header: Vec<String> = rdr.headers().unwrap().iter().map(str::to_string).collect();
    assert_eq!(&header[..4], ["profile_id", "post_id", "kind", "word_count"]);
    let cats: Vec<String> = Lexicon::micro().categories().iter().map(|c| c.as_str().to_string()).collect();
    assert_eq!(&header[header.len() - cats.len()..], &cats[..]);
    assert_eq!(rdr.records().count(), 20);
}

// ------------------------------------------------------------------ determinism and composition

fn run_pipeline(dir: &Path, jobs: &str) -> Vec<(String, Vec<u8>)> {
    let corpus = dir.join("corpus.jsonl");
    for args in [
        vec!["generate", "--jobs", jobs, "--seed", "99", "--out", s(&corpus)],
        vec!["score", "--jobs", jobs, "--corpus", s(&corpus), "-o", s(dir)],
        vec!["coherence", "--jobs", jobs, "--corpus", s(&corpus), "-o", s(dir)],
    ] {
        let o = moodco(&args);
        assert_eq!(code(&o), 0, "{args:?}: {}", stderr(&o));
    }
    ["corpus.jsonl", "scores.csv", "score_summary.json", "coherence.json"]
        .iter()
        .map(|n| (n.to_string(), std::fs::read(dir.join(n)).unwrap()))
        .collect()
}

#[test]
fn pipeline_identical_across_runs_and_job_counts() {
    let root = tempfile::tempdir().unwrap();
    let dirs: Vec<PathBuf> = ["j1", "j1b", "j8"].iter().map(|d| root.path().join(d)).collect();
    let a = run_pipeline(&dirs[0], "1");
    let b = run_pipeline(&dirs[1], "1");
    let c = run_pipeline(&dirs[2], "8");
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn cli_pipeline_equals_library_composition() {
    let dir = tempfile::tempdir().unwrap();
    let files = run_pipeline(dir.path(), "4");

    let cfg = ContagionConfig {
        seed: 99,
        ..Default::default()
    };
    let profiles = generate_contagion_corpus(&cfg).unwrap();
    let mut corpus = Vec::new();
    write_corpus(&profiles, &mut corpus).unwrap();
    assert_eq!(files[0].1, corpus, "corpus bytes");

    let reloaded = load_corpus(dir.path().join("corpus.jsonl")).unwrap();
    assert_eq!(reloaded, profiles);
    let lex = Lexicon::micro();
    let bindings = Bindings::default();
    let scorer = MoodScorer::new(&lex, &bindings, TiePolicy::Neutral).unwrap();
    let scored = score_corpus(&profiles, &scorer, true).unwrap();
    let rows = csv_rows(&dir.path().join("scores.csv"));
    let expected_rows: usize = scored.posts().map(|p| 1 + p.comments.len()).sum();
    assert_eq!(rows.len(), expected_rows);
    for (row, post) in rows.iter().filter(|r| &r[3] == "post").zip(scored.posts()) {
        assert_eq!(&row[1], post.post_id);
        assert_eq!(row[4].parse::<f64>().unwrap(), post.scores.positive);
        assert_eq!(row[5].parse::<f64>().unwrap(), post.scores.negative);
        assert_eq!(&row[6], post.label.as_str());
    }

    let report = analyze_coherence(
        &profiles,
        &scored,
        &lex,
        &CoherenceConfig::default(),
        &SelfPresentationModel::default(),
        true,
    )
    .unwrap();
    let mut expected = serde_json::to_vec_pretty(&report).unwrap();
    expected.push(b'\n');
    assert_eq!(files[3].1, expected, "coherence.json");
}

//! Corpus model: profiles own posts, posts own comments.
//!
//! On disk a corpus is JSON-Lines. Each line is a `profile` record or a
//! `post` record (with embedded comments) referencing an earlier profile.
//! An optional leading `header` record declares total counts, which are
//! checked after loading.

use std::collections::{HashMap, HashSet};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read corpus {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: duplicate {what} {id:?}")]
    Duplicate {
        line: usize,
        what: &'static str,
        id: String,
    },
    #[error("line {line}: post references unknown profile {profile_id:?}")]
    UnknownProfile { line: usize, profile_id: String },
    #[error("header declares {declared} {what} but the corpus has {actual}")]
    HeaderMismatch {
        what: &'static str,
        declared: usize,
        actual: usize,
    },
    #[error("write failed: {0}")]
    Write(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Gender {
    Female,
    Male,
    #[default]
    Unspecified,
}

/// Per-profile activity counts collected from one year of a profile's page.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FacebookMetrics {
    pub friends: u64,
    pub followed_people: u64,
    pub visited_places: u64,
    pub famous_quotes: u64,
    pub pages_with_likes: u64,
    pub complete_activity: u64,
    pub wall_posts: u64,
    pub profile_picture_edits: u64,
    pub personal_photos: u64,
    pub photos: u64,
    pub videos: u64,
    pub likes: u64,
    pub activities_with_like: u64,
    pub wall_posts_with_comments: u64,
    pub comments: u64,
    pub wall_posts_length: u64,
    /// Characters per wall post, rounded.
    pub wall_posts_average_length: u64,
}

impl FacebookMetrics {
    pub const FIELDS: [&'static str; 17] = [
        "friends",
        "followed_people",
        "visited_places",
        "famous_quotes",
        "pages_with_likes",
        "complete_activity",
        "wall_posts",
        "profile_picture_edits",
        "personal_photos",
        "photos",
        "videos",
        "likes",
        "activities_with_like",
        "wall_posts_with_comments",
        "comments",
        "wall_posts_length",
        "wall_posts_average_length",
    ];

    /// Field values in [`FacebookMetrics::FIELDS`] order.
    pub fn values(&self) -> [u64; 17] {
        [
            self.friends,
            self.followed_people,
            self.visited_places,
            self.famous_quotes,
            self.pages_with_likes,
            self.complete_activity,
            self.wall_posts,
            self.profile_picture_edits,
            self.personal_photos,
            self.photos,
            self.videos,
            self.likes,
            self.activities_with_like,
            self.wall_posts_with_comments,
            self.comments,
            self.wall_posts_length,
            self.wall_posts_average_length,
        ]
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.wall_posts_with_comments > self.wall_posts {
            return Err(format!(
                "wall_posts_with_comments ({}) exceeds wall_posts ({})",
                self.wall_posts_with_comments, self.wall_posts
            ));
        }
        if self.wall_posts > 0 {
            let expected = rounded_average(self.wall_posts_length, self.wall_posts);
            if self.wall_posts_average_length != expected {
                return Err(format!(
                    "wall_posts_average_length {} != round({}/{}) = {expected}",
                    self.wall_posts_average_length, self.wall_posts_length, self.wall_posts
                ));
            }
        }
        Ok(())
    }
}

/// Round-half-up integer division.
pub fn rounded_average(total: u64, n: u64) -> u64 {
    (2 * total + n) / (2 * n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PostKind {
    Text,
    Photo,
    Video,
    Music,
    FamousQuote,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comment {
    pub comment_id: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Post {
    pub post_id: String,
    pub kind: PostKind,
    pub text: String,
    pub likes: u64,
    /// Unix seconds; optional.
    pub timestamp: Option<i64>,
    pub comments: Vec<Comment>,
}

impl Post {
    /// A text post with no likes and no comments.
    pub fn text(post_id: impl Into<String>, text: impl Into<String>) -> Self {
        Post {
            post_id: post_id.into(),
            kind: PostKind::Text,
            text: text.into(),
            likes: 0,
            timestamp: None,
            comments: Vec::new(),
        }
    }

    pub fn with_comments<I, S>(mut self, texts: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.comments = texts
            .into_iter()
            .enumerate()
            .map(|(i, t)| Comment {
                comment_id: format!("c{}", i + 1),
                text: t.into(),
            })
            .collect();
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub profile_id: String,
    pub gender: Gender,
    pub metrics: Option<FacebookMetrics>,
    pub posts: Vec<Post>,
}

impl Profile {
    pub fn comment_count(&self) -> usize {
        self.posts.iter().map(|p| p.comments.len()).sum()
    }
}

/// Text posts, optionally restricted to those with at least one comment. Order preserved.
pub fn eligible_posts(profile: &Profile, require_comments: bool) -> Vec<&Post> {
    profile
        .posts
        .iter()
        .filter(|p| p.kind == PostKind::Text)
        .filter(|p| !require_comments || !p.comments.is_empty())
        .collect()
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum Record {
    Header {
        profiles: usize,
        posts: usize,
        comments: usize,
    },
    Profile {
        profile_id: String,
        #[serde(default)]
        gender: Gender,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        metrics: Option<FacebookMetrics>,
    },
    Post {
        profile_id: String,
        post_id: String,
        kind: PostKind,
        #[serde(default)]
        text: String,
        #[serde(default)]
        likes: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        timestamp: Option<i64>,
        #[serde(default)]
        comments: Vec<Comment>,
    },
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<Vec<Profile>, CorpusError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_corpus(BufReader::new(file)).map_err(|e| match e {
        CorpusError::Write(source) => CorpusError::Io {
            path: path.to_path_buf(),
            source,
        },
        other => other,
    })
}

pub fn read_corpus(reader: impl BufRead) -> Result<Vec<Profile>, CorpusError> {
    let mut profiles: Vec<Profile> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut post_ids: Vec<HashSet<String>> = Vec::new();
    let mut header: Option<(usize, usize, usize)> = None;

    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: Record = serde_json::from_str(&line).map_err(|e| CorpusError::Malformed {
            line: line_no,
            message: e.to_string(),
        })?;
        match record {
            Record::Header {
                profiles: p,
                posts,
                comments,
            } => {
                if header.is_some() || !profiles.is_empty() {
                    return Err(CorpusError::Malformed {
                        line: line_no,
                        message: "header must be the first record".into(),
                    });
                }
                header = Some((p, posts, comments));
            }
            Record::Profile {
                profile_id,
                gender,
                metrics,
            } => {
                if profile_id.is_empty() {
                    return Err(CorpusError::Malformed {
                        line: line_no,
                        message: "empty profile_id".into(),
                    });
                }
                if index.contains_key(&profile_id) {
                    return Err(CorpusError::Duplicate {
                        line: line_no,
                        what: "profile_id",
                        id: profile_id,
                    });
                }
                if let Some(m) = &metrics {
                    m.validate().map_err(|message| CorpusError::Malformed {
                        line: line_no,
                        message,
                    })?;
                }
                index.insert(profile_id.clone(), profiles.len());
                post_ids.push(HashSet::new());
                profiles.push(Profile {
                    profile_id,
                    gender,
                    metrics,
                    posts: Vec::new(),
                });
            }
            Record::Post {
                profile_id,
                post_id,
                kind,
                text,
                likes,
                timestamp,
                comments,
            } => {
                let Some(&pi) = index.get(&profile_id) else {
                    return Err(CorpusError::UnknownProfile {
                        line: line_no,
                        profile_id,
                    });
                };
                if !post_ids[pi].insert(post_id.clone()) {
                    return Err(CorpusError::Duplicate {
                        line: line_no,
                        what: "post_id",
                        id: post_id,
                    });
                }
                let mut seen = HashSet::new();
                for c in &comments {
                    if !seen.insert(c.comment_id.as_str()) {
                        return Err(CorpusError::Duplicate {
                            line: line_no,
                            what: "comment_id",
                            id: c.comment_id.clone(),
                        });
                    }
                }
                let profile = &mut profiles[pi];
                if let (Some(ts), Some(prev)) =
                    (timestamp, profile.posts.iter().rev().find_map(|p| p.timestamp))
                {
                    if ts < prev {
                        return Err(CorpusError::Malformed {
                            line: line_no,
                            message: format!("post {post_id:?} is older than the previous post"),
                        });
                    }
                }
                profile.posts.push(Post {
                    post_id,
                    kind,
                    text,
                    likes,
                    timestamp,
                    comments,
                });
            }
        }
    }

    if let Some((p, posts, comments)) = header {
        let actual_posts = profiles.iter().map(|p| p.posts.len()).sum();
        let actual_comments = profiles.iter().map(Profile::comment_count).sum();
        for (what, declared, actual) in [
            ("profiles", p, profiles.len()),
            ("posts", posts, actual_posts),
            ("comments", comments, actual_comments),
        ] {
            if declared != actual {
                return Err(CorpusError::HeaderMismatch {
                    what,
                    declared,
                    actual,
                });
            }
        }
    }
    Ok(profiles)
}

/// Writes a corpus as JSON-Lines, preceded by a count header.
pub fn write_corpus(profiles: &[Profile], mut out: impl Write) -> Result<(), CorpusError> {
    let header = Record::Header {
        profiles: profiles.len(),
        posts: profiles.iter().map(|p| p.posts.len()).sum(),
        comments: profiles.iter().map(Profile::comment_count).sum(),
    };
    write_record(&mut out, &header)?;
    for profile in profiles {
        write_record(
            &mut out,
            &Record::Profile {
                profile_id: profile.profile_id.clone(),
                gender: profile.gender,
                metrics: profile.metrics.clone(),
            },
        )?;
        for post in &profile.posts {
            write_record(
                &mut out,
                &Record::Post {
                    profile_id: profile.profile_id.clone(),
                    post_id: post.post_id.clone(),
                    kind: post.kind,
                    text: post.text.clone(),
                    likes: post.likes,
                    timestamp: post.timestamp,
                    comments: post.comments.clone(),
                },
            )?;
        }
    }
    out.flush()?;
    Ok(())
}

fn write_record(out: &mut impl Write, record: &Record) -> Result<(), CorpusError> {
    serde_json::to_writer(&mut *out, record).map_err(std::io::Error::from)?;
    out.write_all(b"\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<Vec<Profile>, CorpusError> {
        read_corpus(s.as_bytes())
    }

    const THREE_LINES: &str = r#"{"type":"profile","profile_id":"p01","gender":"female"}
{"type":"post","profile_id":"p01","post_id":"p01-1","kind":"text","text":"ciao","likes":3,"comments":[{"comment_id":"c1","text":"bella"}]}
{"type":"post","profile_id":"p01","post_id":"p01-2","kind":"photo","likes":1}
"#;

    #[test]
    fn empty_file() {
        assert!(parse("").unwrap().is_empty());
    }

    #[test]
    fn profile_with_two_posts() {
        let c = parse(THREE_LINES).unwrap();
        assert_eq!(c.len(), 1);
        let p = &c[0];
        assert_eq!(p.gender, Gender::Female);
        assert!(p.metrics.is_none());
        assert_eq!(p.posts.len(), 2);
        assert_eq!(p.posts[0].comments[0].text, "bella");
        assert_eq!(p.posts[1].kind, PostKind::Photo);
        assert_eq!(p.posts[1].text, "");
    }

    #[test]
    fn unknown_profile_names_line() {
        let err = parse(
            "{\"type\":\"profile\",\"profile_id\":\"a\"}\n{\"type\":\"post\",\"profile_id\":\"b\",\"post_id\":\"x\",\"kind\":\"text\"}\n",
        )
        .unwrap_err();
        assert!(matches!(err, CorpusError::UnknownProfile { line: 2, .. }));
        assert!(err.to_string().starts_with("line 2"));
    }

    #[test]
    fn unknown_kind_is_error() {
        let err = parse(
            "{\"type\":\"profile\",\"profile_id\":\"a\"}\n{\"type\":\"post\",\"profile_id\":\"a\",\"post_id\":\"x\",\"kind\":\"story\"}\n",
        )
        .unwrap_err();
        assert!(matches!(err, CorpusError::Malformed { line: 2, .. }));
    }

    #[test]
    fn duplicates_rejected() {
        let p = "{\"type\":\"profile\",\"profile_id\":\"a\"}\n";
        assert!(matches!(
            parse(&format!("{p}{p}")).unwrap_err(),
            CorpusError::Duplicate { line: 2, what: "profile_id", .. }
        ));
        let post = "{\"type\":\"post\",\"profile_id\":\"a\",\"post_id\":\"x\",\"kind\":\"text\"}\n";
        assert!(matches!(
            parse(&format!("{p}{post}{post}")).unwrap_err(),
            CorpusError::Duplicate { line: 3, what: "post_id", .. }
        ));
        let dup_comments = "{\"type\":\"post\",\"profile_id\":\"a\",\"post_id\":\"x\",\"kind\":\"text\",\"comments\":[{\"comment_id\":\"c\",\"text\":\"\"},{\"comment_id\":\"c\",\"text\":\"\"}]}\n";
        assert!(matches!(
            parse(&format!("{p}{dup_comments}")).unwrap_err(),
            CorpusError::Duplicate { what: "comment_id", .. }
        ));
    }

    #[test]
    fn malformed_json_names_line() {
        let err = parse("{\"type\":\"profile\",\"profile_id\":\"a\"}\n{not json\n").unwrap_err();
        assert!(matches!(err, CorpusError::Malformed { line: 2, .. }));
    }

    #[test]
    fn metrics_keys_are_strict() {
        let err = parse("{\"type\":\"profile\",\"profile_id\":\"a\",\"metrics\":{\"friend\":1}}\n").unwrap_err();
        assert!(matches!(err, CorpusError::Malformed { line: 1, .. }));
    }

    #[test]
    fn metrics_invariants_checked() {
        let mut m = FacebookMetrics {
            wall_posts: 3,
            wall_posts_with_comments: 4,
            ..Default::default()
        };
        assert!(m.validate().is_err());
        m.wall_posts_with_comments = 2;
        m.wall_posts_length = 250;
        m.wall_posts_average_length = 83;
        assert!(m.validate().is_ok());
        m.wall_posts_average_length = 84;
        assert!(m.validate().is_err());
        assert_eq!(rounded_average(5, 2), 3);
        assert_eq!(rounded_average(4, 3), 1);
    }

    #[test]
    fn header_counts_checked() {
        let ok = format!("{{\"type\":\"header\",\"profiles\":1,\"posts\":2,\"comments\":1}}\n{THREE_LINES}");
        assert_eq!(parse(&ok).unwrap().len(), 1);
        let bad = format!("{{\"type\":\"header\",\"profiles\":1,\"posts\":3,\"comments\":1}}\n{THREE_LINES}");
        assert!(matches!(
            parse(&bad).unwrap_err(),
            CorpusError::HeaderMismatch { what: "posts", declared: 3, actual: 2 }
        ));
    }

    #[test]
    fn timestamps_must_not_decrease() {
        let s = "{\"type\":\"profile\",\"profile_id\":\"a\"}\n\
                 {\"type\":\"post\",\"profile_id\":\"a\",\"post_id\":\"x\",\"kind\":\"text\",\"timestamp\":10}\n\
                 {\"type\":\"post\",\"profile_id\":\"a\",\"post_id\":\"y\",\"kind\":\"text\"}\n\
                 {\"type\":\"post\",\"profile_id\":\"a\",\"post_id\":\"z\",\"kind\":\"text\",\"timestamp\":5}\n";
        assert!(matches!(parse(s).unwrap_err(), CorpusError::Malformed { line: 4, .. }));
    }

    fn mixed_profile() -> Profile {
        let mut photo = Post::text("ph", "");
        photo.kind = PostKind::Photo;
        Profile {
            profile_id: "p".into(),
            gender: Gender::Male,
            metrics: None,
            posts: vec![
                Post::text("a", "uno").with_comments(["x"]),
                Post::text("b", "due"),
                photo,
                Post::text("c", "tre").with_comments(["y", "z"]),
            ],
        }
    }

    #[test]
    fn eligible_with_comments() {
        let p = mixed_profile();
        let ids: Vec<_> = eligible_posts(&p, true).iter().map(|p| p.post_id.as_str()).collect();
        assert_eq!(ids, ["a", "c"]);
        let ids: Vec<_> = eligible_posts(&p, false).iter().map(|p| p.post_id.as_str()).collect();
        assert_eq!(ids, ["a", "b", "c"]);
    }

    #[test]
    fn eligible_all_photos() {
        let mut p = mixed_profile();
        for post in &mut p.posts {
            post.kind = PostKind::Photo;
        }
        assert!(eligible_posts(&p, false).is_empty());
    }

    #[test]
    fn write_then_read() {
        let mut p = mixed_profile();
        p.metrics = Some(FacebookMetrics {
            wall_posts: 4,
            wall_posts_length: 9,
            wall_posts_average_length: 2,
            ..Default::default()
        });
        let mut buf = Vec::new();
        write_corpus(std::slice::from_ref(&p), &mut buf).unwrap();
        let back = read_corpus(buf.as_slice()).unwrap();
        assert_eq!(back, vec![p]);
    }
}

//! Statistics kernel: one-way ANOVA with Scheffé comparisons, z-scores,
//! Pearson chi-square on contingency tables, independent-samples t,
//! Pearson correlation, seeded bootstrap balancing and median split.
//!
//! Variance conventions: `zscores` and [`population_sd`] divide by n; the
//! t-test, correlation and [`sample_sd`] divide by n - 1.

pub mod distributions;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use distributions::{chi2_sf, f_critical, f_sf, t_two_sided};

/// Generator behind every seeded resampling step.
pub type StatsRng = ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

fn degenerate(msg: impl Into<String>) -> StatsError {
    StatsError::Degenerate(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Df {
    One(f64),
    Two(f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub df: Df,
    pub p_value: f64,
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn sum_sq_dev(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum()
}

pub fn population_sd(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    (sum_sq_dev(xs) / xs.len() as f64).sqrt()
}

pub fn sample_sd(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    (sum_sq_dev(xs) / (xs.len() - 1) as f64).sqrt()
}

struct AnovaParts {
    means: Vec<f64>,
    sizes: Vec<f64>,
    ms_within: f64,
    df_between: f64,
    df_within: f64,
    f: f64,
}

fn anova_parts<G: AsRef<[f64]>>(groups: &[G]) -> Result<AnovaParts, StatsError> {
    if groups.len() < 2 {
        return Err(StatsError::Invalid(format!("need at least 2 groups, got {}", groups.len())));
    }
    if let Some(small) = groups.iter().position(|g| g.as_ref().len() < 2) {
        return Err(degenerate(format!("group {small} has fewer than 2 values")));
    }
    let k = groups.len() as f64;
    let n: usize = groups.iter().map(|g| g.as_ref().len()).sum();
    let grand = groups.iter().flat_map(|g| g.as_ref()).sum::<f64>() / n as f64;
    let means: Vec<f64> = groups.iter().map(|g| mean(g.as_ref())).collect();
    let sizes: Vec<f64> = groups.iter().map(|g| g.as_ref().len() as f64).collect();
    let ss_between: f64 = means
        .iter()
        .zip(&sizes)
        .map(|(m, s)| s * (m - grand) * (m - grand))
        .sum();
    let ss_within: f64 = groups.iter().map(|g| sum_sq_dev(g.as_ref())).sum();
    if ss_within + ss_between <= 0.0 {
        return Err(degenerate("all observations are equal"));
    }
    if ss_within <= 0.0 {
        return Err(degenerate("zero within-group variance (F is infinite)"));
    }
    let df_between = k - 1.0;
    let df_within = n as f64 - k;
    let ms_within = ss_within / df_within;
    Ok(AnovaParts {
        f: (ss_between / df_between) / ms_within,
        means,
        sizes,
        ms_within,
        df_between,
        df_within,
    })
}

/// Between/within F test across two or more groups.
pub fn oneway_anova<G: AsRef<[f64]>>(groups: &[G]) -> Result<TestResult, StatsError> {
    let parts = anova_parts(groups)?;
    Ok(TestResult {
        statistic: parts.f,
        df: Df::Two(parts.df_between, parts.df_within),
        p_value: f_sf(parts.f, parts.df_between, parts.df_within),
    })
}

/// One Scheffé pairwise comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheffePair {
    pub i: usize,
    pub j: usize,
    pub mean_diff: f64,
    /// (m_i - m_j)^2 / (MS_within (1/n_i + 1/n_j)).
    pub statistic: f64,
    /// (k - 1) F_crit(alpha; k - 1, N - k).
    pub critical: f64,
    pub test: TestResult,
    pub significant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheffeTable {
    pub k: usize,
    pub alpha: f64,
    pub pairs: Vec<ScheffePair>,
}

impl ScheffeTable {
    pub fn get(&self, i: usize, j: usize) -> Option<&ScheffePair> {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.pairs.iter().find(|p| p.i == a && p.j == b)
    }
}

/// Scheffé post-hoc comparisons for every pair of groups.
pub fn scheffe_pairwise<G: AsRef<[f64]>>(groups: &[G], alpha: f64) -> Result<ScheffeTable, StatsError> {
    let parts = anova_parts(groups)?;
    let k = groups.len();
    let critical = parts.df_between * f_critical(alpha, parts.df_between, parts.df_within);
    let mut pairs = Vec::with_capacity(k * (k - 1) / 2);
    for i in 0..k {
        for j in i + 1..k {
            let diff = parts.means[i] - parts.means[j];
            let se2 = parts.ms_within * (1.0 / parts.sizes[i] + 1.0 / parts.sizes[j]);
            let statistic = diff * diff / se2;
            let p_value = f_sf(statistic / parts.df_between, parts.df_between, parts.df_within);
            pairs.push(ScheffePair {
                i,
                j,
                mean_diff: diff,
                statistic,
                critical,
                test: TestResult {
                    statistic,
                    df: Df::Two(parts.df_between, parts.df_within),
                    p_value,
                },
                significant: statistic > critical,
            });
        }
    }
    Ok(ScheffeTable { k, alpha, pairs })
}

/// (x - mean) / population sd.
pub fn zscores(values: &[f64]) -> Result<Vec<f64>, StatsError> {
    if values.len() < 2 {
        return Err(degenerate("need at least 2 values"));
    }
    let m = mean(values);
    let sd = population_sd(values);
    if sd.is_nan() || sd <= 0.0 {
        return Err(degenerate("zero variance"));
    }
    Ok(values.iter().map(|x| (x - m) / sd).collect())
}

/// Labeled table of non-negative counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContingencyTable {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub counts: Vec<Vec<u64>>,
}

impl ContingencyTable {
    pub fn new(rows: Vec<String>, cols: Vec<String>) -> Self {
        let counts = vec![vec![0; cols.len()]; rows.len()];
        ContingencyTable { rows, cols, counts }
    }

    pub fn from_counts(counts: Vec<Vec<u64>>) -> Result<Self, StatsError> {
        let ncols = counts.first().map_or(0, Vec::len);
        if counts.iter().any(|r| r.len() != ncols) {
            return Err(StatsError::Invalid("ragged contingency table".into()));
        }
        Ok(ContingencyTable {
            rows: (0..counts.len()).map(|i| format!("r{i}")).collect(),
            cols: (0..ncols).map(|j| format!("c{j}")).collect(),
            counts,
        })
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    /// Adds another table of the same shape cell by cell.
    pub fn add(&mut self, other: &ContingencyTable) {
        for (r, o) in self.counts.iter_mut().zip(&other.counts) {
            for (c, v) in r.iter_mut().zip(o) {
                *c += v;
            }
        }
    }

    /// Drops all-zero rows and columns.
    pub fn pruned(&self) -> ContingencyTable {
        let keep_rows: Vec<usize> = (0..self.rows.len())
            .filter(|&i| self.counts[i].iter().any(|&c| c > 0))
            .collect();
        let keep_cols: Vec<usize> = (0..self.cols.len())
            .filter(|&j| self.counts.iter().any(|r| r[j] > 0))
            .collect();
        ContingencyTable {
            rows: keep_rows.iter().map(|&i| self.rows[i].clone()).collect(),
            cols: keep_cols.iter().map(|&j| self.cols[j].clone()).collect(),
            counts: keep_rows
                .iter()
                .map(|&i| keep_cols.iter().map(|&j| self.counts[i][j]).collect())
                .collect(),
        }
    }
}

/// Pearson chi-square test of independence, no continuity correction.
pub fn chi_square(table: &ContingencyTable) -> Result<TestResult, StatsError> {
    let t = table.pruned();
    let total = t.total();
    if total == 0 {
        return Err(degenerate("empty contingency table"));
    }
    if t.rows.len() < 2 || t.cols.len() < 2 {
        return Err(degenerate(format!(
            "table is {}x{} after dropping empty margins",
            t.rows.len(),
            t.cols.len()
        )));
    }
    let row_sums: Vec<f64> = t.counts.iter().map(|r| r.iter().sum::<u64>() as f64).collect();
    let col_sums: Vec<f64> = (0..t.cols.len())
        .map(|j| t.counts.iter().map(|r| r[j]).sum::<u64>() as f64)
        .collect();
    let n = total as f64;
    let mut stat = 0.0;
    for (i, row) in t.counts.iter().enumerate() {
        for (j, &obs) in row.iter().enumerate() {
            let expected = row_sums[i] * col_sums[j] / n;
            let d = obs as f64 - expected;
            stat += d * d / expected;
        }
    }
    let df = ((t.rows.len() - 1) * (t.cols.len() - 1)) as f64;
    Ok(TestResult {
        statistic: stat,
        df: Df::One(df),
        p_value: chi2_sf(stat, df),
    })
}

/// Independent-samples t for mean(a) - mean(b): pooled variance, or Welch when `pooled` is false.
pub fn t_test_independent(a: &[f64], b: &[f64], pooled: bool) -> Result<TestResult, StatsError> {
    if a.len() < 2 || b.len() < 2 {
        return Err(degenerate("each group needs at least 2 values"));
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (va, vb) = (sum_sq_dev(a) / (na - 1.0), sum_sq_dev(b) / (nb - 1.0));
    let diff = mean(a) - mean(b);
    let (se, df) = if pooled {
        let sp2 = ((na - 1.0) * va + (nb - 1.0) * vb) / (na + nb - 2.0);
        ((sp2 * (1.0 / na + 1.0 / nb)).sqrt(), na + nb - 2.0)
    } else {
        let (qa, qb) = (va / na, vb / nb);
        let df = (qa + qb).powi(2) / (qa * qa / (na - 1.0) + qb * qb / (nb - 1.0));
        ((qa + qb).sqrt(), df)
    };
    if se.is_nan() || se <= 0.0 {
        return Err(degenerate("both groups are constant"));
    }
    let t = diff / se;
    Ok(TestResult {
        statistic: t,
        df: Df::One(df),
        p_value: t_two_sided(t, df),
    })
}

/// Sample Pearson correlation with a two-sided p from t = r sqrt((n-2)/(1-r^2)).
pub fn pearson_r(x: &[f64], y: &[f64]) -> Result<TestResult, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::Invalid(format!("length mismatch: {} vs {}", x.len(), y.len())));
    }
    if x.len() < 3 {
        return Err(degenerate("need at least 3 pairs"));
    }
    let (mx, my) = (mean(x), mean(y));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if !(sxx > 0.0 && syy > 0.0) {
        return Err(degenerate("zero variance"));
    }
    let r = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    let df = x.len() as f64 - 2.0;
    let p_value = if r.abs() >= 1.0 {
        0.0
    } else {
        t_two_sided(r * (df / (1.0 - r * r)).sqrt(), df)
    };
    Ok(TestResult {
        statistic: r,
        df: Df::One(df),
        p_value,
    })
}

/// `target_n` draws with replacement from `items`, reproducible per seed.
pub fn bootstrap_balance<T: Clone>(items: &[T], target_n: usize, seed: u64) -> Result<Vec<T>, StatsError> {
    let mut rng = StatsRng::seed_from_u64(seed);
    bootstrap_balance_with(items, target_n, &mut rng)
}

pub fn bootstrap_balance_with<T: Clone, R: Rng + ?Sized>(
    items: &[T],
    target_n: usize,
    rng: &mut R,
) -> Result<Vec<T>, StatsError> {
    if items.is_empty() {
        return Err(StatsError::Invalid("cannot resample an empty group".into()));
    }
    if target_n == 0 {
        return Err(StatsError::Invalid("target size must be at least 1".into()));
    }
    Ok((0..target_n)
        .map(|_| items[rng.random_range(0..items.len())].clone())
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MedianSplit<K> {
    pub median: f64,
    /// Scores at or below the median.
    pub low: Vec<K>,
    pub high: Vec<K>,
}

impl<K> MedianSplit<K> {
    pub fn is_degenerate(&self) -> bool {
        self.low.is_empty() || self.high.is_empty()
    }
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Splits ids at the median score; input order is kept within each side.
pub fn median_split<K: Clone>(scores: &[(K, f64)]) -> Result<MedianSplit<K>, StatsError> {
    if scores.len() < 2 {
        return Err(StatsError::Invalid("need at least 2 scores".into()));
    }
    let values: Vec<f64> = scores.iter().map(|(_, s)| *s).collect();
    let m = median(&values);
    let (low, high): (Vec<_>, Vec<_>) = scores.iter().partition(|(_, s)| *s <= m);
    Ok(MedianSplit {
        median: m,
        low: low.into_iter().map(|(k, _)| k.clone()).collect(),
        high: high.into_iter().map(|(k, _)| k.clone()).collect(),
    })
}

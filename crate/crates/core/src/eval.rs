//! Top-N precision/recall evaluation over a user split.
//!
//! Each test user's relevant items (rated at or above the relevance
//! threshold) are hidden from their profile, the remainder is used as the
//! query, and the top-N list is scored against the hidden set. Metrics are
//! macro-averaged over test users.

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::{split_users, Dataset, ItemId, Profile, UserId};
use crate::error::{Error, Result};
use crate::recommender::{Recommender, RecommenderConfig};
use crate::similarity::Mode;
use crate::RELEVANCE_THRESHOLD;

/// Percentage of the first `n` recommendations that are relevant. The
/// denominator is `min(n, recommended.len())`; an empty list scores 0.
pub fn precision_at_n(recommended: &[ItemId], relevant: &BTreeSet<ItemId>, n: usize) -> f64 {
    let top = &recommended[..n.min(recommended.len())];
    if top.is_empty() {
        return 0.0;
    }
    let hits = top.iter().filter(|i| relevant.contains(*i)).count();
    100.0 * hits as f64 / top.len() as f64
}

/// Percentage of relevant items found in the first `n` recommendations.
/// Undefined (`None`) when nothing is relevant.
pub fn recall_at_n(recommended: &[ItemId], relevant: &BTreeSet<ItemId>, n: usize) -> Option<f64> {
    if relevant.is_empty() {
        return None;
    }
    let top = &recommended[..n.min(recommended.len())];
    let hits = top.iter().filter(|i| relevant.contains(*i)).count();
    Some(100.0 * hits as f64 / relevant.len() as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub train_fraction: f64,
    pub top_n: usize,
    pub k_neighbors: usize,
    pub seed: u64,
    /// Number of independent splits (seeds `seed`, `seed + 1`, ...). Queries
    /// from every split are pooled before averaging.
    pub repeats: usize,
    pub modes: Vec<Mode>,
    /// Which rule-expansion settings to report; one row per mode and entry.
    pub rules: Vec<bool>,
    pub minsup_pct: f64,
    pub minconf_pct: f64,
    pub relevance_threshold: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            train_fraction: 0.8,
            top_n: 5,
            k_neighbors: 5,
            seed: 1,
            repeats: 1,
            modes: Mode::ALL.to_vec(),
            rules: vec![false, true],
            minsup_pct: 0.5,
            minconf_pct: 20.0,
            relevance_threshold: RELEVANCE_THRESHOLD,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalRow {
    pub mode: Mode,
    pub method: &'static str,
    pub rules_enabled: bool,
    pub precision: f64,
    pub recall: f64,
    pub n: usize,
    /// Test queries (user and split) that contributed to the averages.
    pub num_test_users: usize,
    /// Test users with no relevant items or an empty residual profile.
    pub skipped: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalReport {
    pub num_train_users: usize,
    pub num_test_users: usize,
    pub rows: Vec<EvalRow>,
}

impl EvalReport {
    pub fn row(&self, mode: Mode, rules_enabled: bool) -> Option<&EvalRow> {
        self.rows
            .iter()
            .find(|r| r.mode == mode && r.rules_enabled == rules_enabled)
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "train users: {}  test users: {}",
            self.num_train_users, self.num_test_users
        )?;
        writeln!(
            f,
            "{:<30} {:<5} {:>3} {:>6} {:>8} {:>10} {:>10}",
            "Methods", "Rules", "N", "Users", "Skipped", "Precision", "Recall"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<30} {:<5} {:>3} {:>6} {:>8} {:>9.2}% {:>9.2}%",
                r.method,
                if r.rules_enabled { "on" } else { "off" },
                r.n,
                r.num_test_users,
                r.skipped,
                r.precision,
                r.recall
            )?;
        }
        Ok(())
    }
}

struct Query {
    id: UserId,
    residual: Profile,
    relevant: BTreeSet<ItemId>,
}

pub fn run_experiment(dataset: &Dataset, config: &ExperimentConfig) -> Result<EvalReport> {
    if config.modes.is_empty() || config.rules.is_empty() {
        return Err(Error::Config("experiment needs at least one mode and one rules setting".into()));
    }
    if config.repeats == 0 {
        return Err(Error::Config("repeats must be at least 1".into()));
    }

    let mut splits = Vec::with_capacity(config.repeats);
    for r in 0..config.repeats as u64 {
        let (train, test) = split_users(dataset, config.train_fraction, config.seed.wrapping_add(r))?;
        if test.num_users() == 0 {
            return Err(Error::Experiment("test split is empty".into()));
        }
        if train.num_users() == 0 {
            return Err(Error::Experiment("training split is empty".into()));
        }
        splits.push((train, test));
    }

    let mut rows: Vec<EvalRow> = Vec::new();
    for &mode in &config.modes {
        let mut evaluated: Vec<Vec<(f64, f64)>> = Vec::new();
        let mut skipped = 0;
        for (train, test) in &splits {
            let (queries, no_relevant) = build_queries(test, config.relevance_threshold);
            skipped += no_relevant;
            let scored = score_queries(train, &queries, mode, config)?;
            skipped += scored.iter().filter(|s| s.is_none()).count();
            evaluated.extend(scored.into_iter().flatten());
        }
        let count = evaluated.len();
        for (k, &with_rules) in config.rules.iter().enumerate() {
            let (p_sum, r_sum) = evaluated
                .iter()
                .fold((0.0, 0.0), |(p, r), v| (p + v[k].0, r + v[k].1));
            let mean = |s: f64| if count == 0 { 0.0 } else { s / count as f64 };
            rows.push(EvalRow {
                mode,
                method: mode.label(),
                rules_enabled: with_rules,
                precision: mean(p_sum),
                recall: mean(r_sum),
                n: config.top_n,
                num_test_users: count,
                skipped,
            });
        }
    }

    Ok(EvalReport {
        num_train_users: splits[0].0.num_users(),
        num_test_users: splits[0].1.num_users(),
        rows,
    })
}

/// Hides each test user's relevant items. Returns the queries and the number
/// of users without any relevant item.
fn build_queries(test: &Dataset, threshold: f64) -> (Vec<Query>, usize) {
    let mut queries = Vec::new();
    let mut no_relevant = 0;
    for (id, profile) in test.profiles() {
        let relevant: BTreeSet<ItemId> = profile
            .ratings
            .iter()
            .filter(|(_, &v)| v >= threshold)
            .map(|(i, _)| i.clone())
            .collect();
        if relevant.is_empty() {
            no_relevant += 1;
            continue;
        }
        queries.push(Query {
            id: id.clone(),
            residual: profile.without(&relevant),
            relevant,
        });
    }
    (queries, no_relevant)
}

/// `(precision, recall)` per rules setting.
type QueryScores = Vec<(f64, f64)>;

/// Scores for each query, `None` for queries whose residual profile is empty
/// in this mode.
fn score_queries(
    train: &Dataset,
    queries: &[Query],
    mode: Mode,
    config: &ExperimentConfig,
) -> Result<Vec<Option<QueryScores>>> {
    let rec = Recommender::new(
        train,
        RecommenderConfig {
            k_neighbors: config.k_neighbors,
            top_n: config.top_n,
            mode,
            minsup_pct: config.minsup_pct,
            minconf_pct: config.minconf_pct,
            exclusion_threshold: config.relevance_threshold,
            use_rules: config.rules.contains(&true),
        },
    )?;
    queries
        .par_iter()
        .map(|q| {
            if rec.target_vector(&q.id, &q.residual).is_zero() {
                return Ok(None);
            }
            config
                .rules
                .iter()
                .map(|&with_rules| {
                    let items: Vec<ItemId> = rec
                        .run(&q.id, &q.residual, with_rules)?
                        .into_iter()
                        .map(|r| r.item)
                        .collect();
                    let p = precision_at_n(&items, &q.relevant, config.top_n);
                    let r = recall_at_n(&items, &q.relevant, config.top_n)
                        .expect("queries always have relevant items");
                    Ok((p, r))
                })
                .collect::<Result<Vec<_>>>()
                .map(Some)
        })
        .collect()
}

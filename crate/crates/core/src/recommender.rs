//! End-to-end recommendation.
//!
//! 1. Find the `k` nearest training users by restricted cosine.
//! 2. From each neighbour take its best unseen item rated at or above the
//!    exclusion threshold that was ever bought after something the target
//!    owns; if the best fails the sequence check, try the next one.
//! 3. Expand every such item with association rules whose antecedent
//!    contains it, keeping consequents that pass the same sequence check.
//!
//! Neighbour items score `similarity * neighbour rating` and rule items
//! `confidence * parent score`. Neighbour items are listed before rule items,
//! so rule expansion only ever appends to the list.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::corpus::{Dataset, ItemId, Profile, UserId};
use crate::error::{Error, Result};
use crate::implicit::{new_user_scores, IifTable};
use crate::rules::{fp_growth, generate_rules, AssociationRule};
use crate::sequence::PrecedenceIndex;
use crate::similarity::{vector_for_profile, Mode, NeighborList, UserVector, VectorTable};
use crate::{MAX_RATING, RELEVANCE_THRESHOLD};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Neighbor,
    Rule,
    Popularity,
}

impl Source {
    pub fn name(self) -> &'static str {
        match self {
            Source::Neighbor => "neighbor",
            Source::Rule => "rule",
            Source::Popularity => "popularity",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Recommendation {
    pub item: ItemId,
    pub score: f64,
    pub source: Source,
    /// Neighbour id, triggering rule (`X=>Y`), or `cold-start`.
    pub explain: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecommenderConfig {
    pub k_neighbors: usize,
    pub top_n: usize,
    pub mode: Mode,
    pub minsup_pct: f64,
    pub minconf_pct: f64,
    /// Neighbour ratings below this never become candidates.
    pub exclusion_threshold: f64,
    pub use_rules: bool,
}

impl Default for RecommenderConfig {
    fn default() -> Self {
        RecommenderConfig {
            k_neighbors: 5,
            top_n: 10,
            mode: Mode::Simple,
            minsup_pct: 40.0,
            minconf_pct: 60.0,
            exclusion_threshold: RELEVANCE_THRESHOLD,
            use_rules: true,
        }
    }
}

impl RecommenderConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_neighbors == 0 {
            return Err(Error::Config("k_neighbors must be at least 1".into()));
        }
        if self.top_n == 0 {
            return Err(Error::Config("top_n must be at least 1".into()));
        }
        if !(0.0..=MAX_RATING).contains(&self.exclusion_threshold) {
            return Err(Error::Config(format!(
                "exclusion threshold {} outside [0, {MAX_RATING}]",
                self.exclusion_threshold
            )));
        }
        for (name, v) in [("minsup", self.minsup_pct), ("minconf", self.minconf_pct)] {
            if !(v > 0.0 && v <= 100.0) {
                return Err(Error::Config(format!("{name} {v} must lie in (0, 100]")));
            }
        }
        Ok(())
    }
}

/// Read-only indices over one training set.
pub struct Recommender<'a> {
    train: &'a Dataset,
    config: RecommenderConfig,
    precedence: PrecedenceIndex,
    iif: IifTable,
    vectors: VectorTable,
    rules: Vec<AssociationRule>,
    /// item -> rules whose antecedent contains it
    rules_by_item: BTreeMap<ItemId, Vec<usize>>,
}

impl<'a> Recommender<'a> {
    pub fn new(train: &'a Dataset, config: RecommenderConfig) -> Result<Self> {
        config.validate()?;
        let iif = IifTable::build(train)?;
        let vectors = VectorTable::build(train, config.mode, &iif);
        let precedence = PrecedenceIndex::build(train);

        let mut rules = Vec::new();
        let mut rules_by_item: BTreeMap<ItemId, Vec<usize>> = BTreeMap::new();
        if config.use_rules {
            let frequents = fp_growth(train.transactions(), config.minsup_pct)?;
            rules = generate_rules(&frequents, config.minconf_pct, None)?;
            for (k, r) in rules.iter().enumerate() {
                for item in r.antecedent.items() {
                    rules_by_item.entry(item.clone()).or_default().push(k);
                }
            }
        }
        Ok(Recommender {
            train,
            config,
            precedence,
            iif,
            vectors,
            rules,
            rules_by_item,
        })
    }

    pub fn config(&self) -> &RecommenderConfig {
        &self.config
    }

    pub fn precedence(&self) -> &PrecedenceIndex {
        &self.precedence
    }

    pub fn rules(&self) -> &[AssociationRule] {
        &self.rules
    }

    /// Recommendations for a user of the training set.
    pub fn recommend(&self, user: &UserId) -> Result<Vec<Recommendation>> {
        let profile = self.train.profile(user)?;
        self.run(user, profile, self.config.use_rules)
    }

    /// Recommendations for an arbitrary profile. `id` is excluded from the
    /// neighbour search when it also names a training user.
    pub fn recommend_profile(&self, id: &UserId, profile: &Profile) -> Result<Vec<Recommendation>> {
        self.run(id, profile, self.config.use_rules)
    }

    pub fn target_vector(&self, id: &UserId, profile: &Profile) -> UserVector {
        vector_for_profile(id, profile, self.config.mode, &self.iif)
    }

    pub fn neighbors(&self, id: &UserId, profile: &Profile) -> Result<NeighborList> {
        let target = self.target_vector(id, profile);
        self.vectors.neighbors(&target, self.config.k_neighbors)
    }

    /// Neighbour candidates of one user, best first: explicit modes use
    /// ratings at or above the threshold, implicit mode the implicit weights.
    fn neighbor_items(&self, neighbor: &UserId) -> Vec<(ItemId, f64)> {
        let mut items: Vec<(ItemId, f64)> = if self.config.mode.is_explicit() {
            self.train
                .profile(neighbor)
                .map(|p| {
                    p.ratings
                        .iter()
                        .filter(|(_, &v)| v >= self.config.exclusion_threshold)
                        .map(|(i, &v)| (i.clone(), v))
                        .collect()
                })
                .unwrap_or_default()
        } else {
            self.vectors
                .get(neighbor)
                .map(|v| v.weights.iter().map(|(i, &w)| (i.clone(), w)).collect())
                .unwrap_or_default()
        };
        items.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        items
    }

    pub(crate) fn run(&self, id: &UserId, profile: &Profile, with_rules: bool) -> Result<Vec<Recommendation>> {
        let neighbors = self.neighbors(id, profile)?;
        let history: Vec<&ItemId> = profile.purchased().collect();
        let passes = |item: &ItemId| {
            !profile.has_seen(item) && self.precedence.bought_after(item, history.iter().copied())
        };

        let mut from_neighbors: BTreeMap<ItemId, Recommendation> = BTreeMap::new();
        for (neighbor, sim) in &neighbors.entries {
            if *sim <= 0.0 {
                continue;
            }
            let pick = self
                .neighbor_items(neighbor)
                .into_iter()
                .find(|(item, _)| passes(item));
            if let Some((item, value)) = pick {
                offer(
                    &mut from_neighbors,
                    Recommendation {
                        item,
                        score: sim * value,
                        source: Source::Neighbor,
                        explain: neighbor.to_string(),
                    },
                );
            }
        }

        let mut from_rules: BTreeMap<ItemId, Recommendation> = BTreeMap::new();
        if with_rules {
            let parents = ranked(from_neighbors.values().cloned().collect());
            for parent in &parents {
                let Some(idx) = self.rules_by_item.get(&parent.item) else {
                    continue;
                };
                for rule in idx.iter().map(|&k| &self.rules[k]) {
                    for item in rule.consequent.items() {
                        if from_neighbors.contains_key(item) || !passes(item) {
                            continue;
                        }
                        offer(
                            &mut from_rules,
                            Recommendation {
                                item: item.clone(),
                                score: rule.confidence_pct / 100.0 * parent.score,
                                source: Source::Rule,
                                explain: rule.short(),
                            },
                        );
                    }
                }
            }
        }

        let mut out = ranked(from_neighbors.into_values().collect());
        out.extend(ranked(from_rules.into_values().collect()));
        out.truncate(self.config.top_n);
        Ok(out)
    }
}

/// Keeps the higher-scoring entry per item; the first one wins ties.
fn offer(pool: &mut BTreeMap<ItemId, Recommendation>, rec: Recommendation) {
    match pool.get(&rec.item) {
        Some(existing) if existing.score >= rec.score => {}
        _ => {
            pool.insert(rec.item.clone(), rec);
        }
    }
}

fn ranked(mut recs: Vec<Recommendation>) -> Vec<Recommendation> {
    recs.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.item.cmp(&b.item)));
    recs
}

/// Convenience wrapper building the indices for a single query.
pub fn recommend(train: &Dataset, target: &UserId, config: &RecommenderConfig) -> Result<Vec<Recommendation>> {
    Recommender::new(train, config.clone())?.recommend(target)
}

/// Most widely purchased items, for users with no history at all.
pub fn recommend_new_user(train: &Dataset, config: &RecommenderConfig) -> Result<Vec<Recommendation>> {
    config.validate()?;
    Ok(new_user_scores(train)
        .into_iter()
        .take(config.top_n)
        .map(|(item, score)| Recommendation {
            item,
            score,
            source: Source::Popularity,
            explain: "cold-start".into(),
        })
        .collect())
}

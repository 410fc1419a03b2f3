use std::collections::BTreeSet;

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Dataset, ItemId, RatingRecord, Transaction, UserId};
use crate::error::{Error, Result};
use crate::MAX_RATING;

/// Shape of a planted-class synthetic dataset.
///
/// Items are split into `num_classes` equal blocks. A user of class `c` picks
/// items from block `c` with probability `class_affinity` and from the rest of
/// the catalogue otherwise. In-class ratings centre on 7.5, out-of-class ones
/// on 2.5, each perturbed uniformly by up to `noise_rating_spread` and rounded
/// to whole points. In-class purchases are drawn from the user's in-class
/// rated items, weighted by rating.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub num_classes: usize,
    pub num_items: usize,
    pub users_per_class: usize,
    /// Inclusive `(min, max)`.
    pub ratings_per_user: (usize, usize),
    /// Inclusive `(min, max)`.
    pub transactions_per_user: (usize, usize),
    /// Inclusive `(min, max)` items per transaction.
    pub basket_size: (usize, usize),
    pub class_affinity: f64,
    pub noise_rating_spread: f64,
    pub rng_seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            num_classes: 4,
            num_items: 60,
            users_per_class: 25,
            ratings_per_user: (12, 20),
            transactions_per_user: (8, 14),
            basket_size: (1, 4),
            class_affinity: 0.9,
            noise_rating_spread: 2.5,
            rng_seed: 42,
        }
    }
}

const IN_CLASS_CENTRE: f64 = 7.5;
const OUT_OF_CLASS_CENTRE: f64 = 2.5;

impl SyntheticConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_owned()));
        if self.num_classes == 0 {
            return bad("num_classes must be at least 1");
        }
        if self.num_items < self.num_classes || !self.num_items.is_multiple_of(self.num_classes) {
            return bad("num_items must split evenly into num_classes blocks");
        }
        if !(self.class_affinity > 0.0 && self.class_affinity <= 1.0) {
            return bad("class_affinity must lie in (0, 1]");
        }
        if !(self.noise_rating_spread.is_finite() && self.noise_rating_spread >= 0.0) {
            return bad("noise_rating_spread must be finite and non-negative");
        }
        for (name, (lo, hi)) in [
            ("ratings_per_user", self.ratings_per_user),
            ("transactions_per_user", self.transactions_per_user),
            ("basket_size", self.basket_size),
        ] {
            if lo > hi {
                return Err(Error::Config(format!("{name}: min {lo} exceeds max {hi}")));
            }
        }
        if self.basket_size.0 == 0 {
            return bad("basket_size min must be at least 1");
        }
        Ok(())
    }

    fn block_size(&self) -> usize {
        self.num_items / self.num_classes
    }
}

pub fn item_name(index: usize) -> ItemId {
    ItemId::new(format!("P{:03}", index + 1))
}

pub fn user_name(index: usize) -> UserId {
    UserId::new(format!("U{:04}", index + 1))
}

/// Deterministic for a fixed `rng_seed`.
pub fn generate_synthetic(config: &SyntheticConfig) -> Result<Dataset> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let block = config.block_size();
    let items: Vec<ItemId> = (0..config.num_items).map(item_name).collect();

    let mut users = Vec::new();
    let mut ratings = Vec::new();
    let mut transactions = Vec::new();
    let mut tid = 0usize;

    for class in 0..config.num_classes {
        let inside: Vec<usize> = (class * block..(class + 1) * block).collect();
        let outside: Vec<usize> = (0..config.num_items)
            .filter(|i| i / block != class)
            .collect();

        for member in 0..config.users_per_class {
            let user = user_name(class * config.users_per_class + member);
            users.push(user.clone());

            // ratings
            let (lo, hi) = config.ratings_per_user;
            let wanted = rng.gen_range(lo..=hi).min(config.num_items);
            let mut rated: Vec<(usize, f64)> = Vec::with_capacity(wanted);
            let mut taken = BTreeSet::new();
            while rated.len() < wanted {
                let in_class = rng.gen_bool(config.class_affinity);
                let Some(idx) = pick_fresh(&mut rng, in_class, &inside, &outside, &taken) else {
                    break;
                };
                taken.insert(idx);
                let centre = if idx / block == class {
                    IN_CLASS_CENTRE
                } else {
                    OUT_OF_CLASS_CENTRE
                };
                let noise = if config.noise_rating_spread > 0.0 {
                    rng.gen_range(-config.noise_rating_spread..=config.noise_rating_spread)
                } else {
                    0.0
                };
                let value = (centre + noise).round().clamp(0.0, MAX_RATING);
                rated.push((idx, value));
            }
            rated.sort_by_key(|&(i, _)| i);
            for &(idx, value) in &rated {
                ratings.push(RatingRecord {
                    user: user.clone(),
                    item: items[idx].clone(),
                    value,
                });
            }

            // purchases
            let liked: Vec<(usize, f64)> = rated
                .iter()
                .copied()
                .filter(|&(i, v)| i / block == class && v > 0.0)
                .collect();
            let liked_weights = WeightedIndex::new(liked.iter().map(|&(_, v)| v)).ok();

            let (lo, hi) = config.transactions_per_user;
            let count = rng.gen_range(lo..=hi);
            for seq in 1..=count {
                let (blo, bhi) = config.basket_size;
                let size = rng.gen_range(blo..=bhi).min(config.num_items);
                let mut basket: Vec<usize> = Vec::with_capacity(size);
                let mut attempts = 0;
                while basket.len() < size && attempts < 16 * size {
                    attempts += 1;
                    let idx = if rng.gen_bool(config.class_affinity) {
                        match &liked_weights {
                            Some(w) => liked[w.sample(&mut rng)].0,
                            None => *inside.choose(&mut rng).expect("blocks are non-empty"),
                        }
                    } else if let Some(&i) = outside.choose(&mut rng) {
                        i
                    } else {
                        *inside.choose(&mut rng).expect("blocks are non-empty")
                    };
                    if !basket.contains(&idx) {
                        basket.push(idx);
                    }
                }
                tid += 1;
                transactions.push(Transaction {
                    tid: format!("T{tid:06}"),
                    user: user.clone(),
                    seq: seq as u64,
                    items: basket.into_iter().map(|i| items[i].clone()).collect(),
                });
            }
        }
    }

    Dataset::new(users, items, transactions, ratings)
}

fn pick_fresh(
    rng: &mut ChaCha8Rng,
    in_class: bool,
    inside: &[usize],
    outside: &[usize],
    taken: &BTreeSet<usize>,
) -> Option<usize> {
    let (first, second) = if in_class { (inside, outside) } else { (outside, inside) };
    for pool in [first, second] {
        let free: Vec<usize> = pool.iter().copied().filter(|i| !taken.contains(i)).collect();
        if let Some(&i) = free.choose(rng) {
            return Some(i);
        }
    }
    None
}

/// Class index of a generated user, given the config that produced it.
pub fn user_class(config: &SyntheticConfig, user: &UserId) -> Option<usize> {
    let n: usize = user.as_str().strip_prefix('U')?.parse().ok()?;
    let idx = n.checked_sub(1)?;
    (config.users_per_class > 0).then(|| idx / config.users_per_class)
}

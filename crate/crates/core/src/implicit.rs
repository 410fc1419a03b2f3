//! Implicit ratings from purchase counts weighted by inverse item frequency,
//! and the popularity ordering used for brand-new users.

use std::collections::BTreeMap;

use crate::corpus::{Dataset, ItemId, Profile, UserId};
use crate::error::{Error, Result};
use crate::similarity::{Mode, UserVector};

/// Per-item purchaser counts and `ln((1 + U) / U_i)` weights. Items nobody
/// bought have no entry.
#[derive(Clone, Debug, PartialEq)]
pub struct IifTable {
    total_users: usize,
    purchasers: BTreeMap<ItemId, usize>,
    iif: BTreeMap<ItemId, f64>,
}

impl IifTable {
    pub fn build(dataset: &Dataset) -> Result<Self> {
        let total_users = dataset.num_users();
        if total_users == 0 {
            return Err(Error::EmptyDataset);
        }
        let purchasers = purchaser_counts(dataset);
        let iif = purchasers
            .iter()
            .map(|(item, &ui)| (item.clone(), ((1 + total_users) as f64 / ui as f64).ln()))
            .collect();
        Ok(IifTable {
            total_users,
            purchasers,
            iif,
        })
    }

    pub fn total_users(&self) -> usize {
        self.total_users
    }

    pub fn purchasers(&self, item: &ItemId) -> usize {
        self.purchasers.get(item).copied().unwrap_or(0)
    }

    pub fn iif(&self, item: &ItemId) -> Option<f64> {
        self.iif.get(item).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ItemId, f64)> {
        self.iif.iter().map(|(i, &w)| (i, w))
    }
}

/// `U_i`: distinct users that bought each item at least once.
fn purchaser_counts(dataset: &Dataset) -> BTreeMap<ItemId, usize> {
    let mut counts = BTreeMap::new();
    for (_, profile) in dataset.profiles() {
        for item in profile.purchased() {
            *counts.entry(item.clone()).or_insert(0) += 1;
        }
    }
    counts
}

/// Coordinates `n(u,i) * iif(i)`. Items missing from the table are dropped.
pub fn implicit_vector_for_profile(user: &UserId, profile: &Profile, iif: &IifTable) -> UserVector {
    let weights = profile
        .purchases
        .iter()
        .filter_map(|(item, &n)| iif.iif(item).map(|w| (item.clone(), n as f64 * w)));
    UserVector::new(user.clone(), Mode::Implicit, weights)
}

pub fn implicit_vector(dataset: &Dataset, iif: &IifTable, user: &UserId) -> Result<UserVector> {
    let profile = dataset.profile(user)?;
    Ok(implicit_vector_for_profile(user, profile, iif))
}

/// Cold-start scores `ln(U_i / (1 + U))`, best first, ties by item id.
///
/// Every score is negative; only the order matters, and it is exactly the
/// order of descending purchaser count.
pub fn new_user_scores(dataset: &Dataset) -> Vec<(ItemId, f64)> {
    let total = dataset.num_users();
    if total == 0 {
        return Vec::new();
    }
    let mut scores: Vec<(ItemId, f64)> = purchaser_counts(dataset)
        .into_iter()
        .map(|(item, ui)| (item, (ui as f64 / (1 + total) as f64).ln()))
        .collect();
    scores.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    scores
}

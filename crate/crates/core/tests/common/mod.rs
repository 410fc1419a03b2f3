//! Fixtures and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use proptest::prelude::*;

use prodrec::{Dataset, ItemId, RatingRecord, Transaction};

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

pub fn ids(xs: &[&str]) -> Vec<ItemId> {
    xs.iter().map(|&x| x.into()).collect()
}

pub fn rating(u: &str, i: &str, v: f64) -> RatingRecord {
    RatingRecord { user: u.into(), item: i.into(), value: v }
}

/// Consecutive transactions of one user, seq starting at 1.
pub fn stream(user: &str, baskets: &[&[&str]]) -> Vec<Transaction> {
    baskets
        .iter()
        .enumerate()
        .map(|(k, b)| Transaction {
            tid: format!("{user}-{}", k + 1),
            user: user.into(),
            seq: k as u64 + 1,
            items: ids(b),
        })
        .collect()
}

pub fn five_baskets() -> Vec<Vec<ItemId>> {
    [
        &["P1", "P2"][..],
        &["P1", "P2", "P4"],
        &["P1", "P4"],
        &["P5", "P4"],
        &["P1", "P5"],
    ]
    .iter()
    .map(|t| ids(t))
    .collect()
}

pub fn three_users() -> Dataset {
    Dataset::load(
        Some(&data("three_users_transactions.csv")),
        Some(&data("three_users_ratings.csv")),
    )
    .unwrap()
}

/// Support count of every non-empty itemset over the item universe, by full
/// power-set enumeration. Keeps those meeting `minsup_pct`.
pub fn apriori_oracle(transactions: &[Vec<ItemId>], minsup_pct: f64) -> BTreeMap<Vec<ItemId>, usize> {
    let universe: Vec<ItemId> = transactions
        .iter()
        .flatten()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    assert!(universe.len() <= 16, "oracle is exponential");
    let n = transactions.len();
    let mut out = BTreeMap::new();
    for mask in 1u32..(1 << universe.len()) {
        let set: Vec<ItemId> = universe
            .iter()
            .enumerate()
            .filter(|(k, _)| (mask >> k) & 1 == 1)
            .map(|(_, i)| i.clone())
            .collect();
        let count = transactions
            .iter()
            .filter(|t| set.iter().all(|i| t.contains(i)))
            .count();
        if count > 0 && (count as f64) * 100.0 >= minsup_pct * n as f64 - 1e-9 {
            out.insert(set, count);
        }
    }
    out
}

/// Dense cosine over the coordinates of `target`; zero norms give 0.
pub fn dense_cosine(target: &BTreeMap<ItemId, f64>, other: &BTreeMap<ItemId, f64>) -> f64 {
    let coords: Vec<&ItemId> = target.iter().filter(|(_, &w)| w != 0.0).map(|(i, _)| i).collect();
    let a: Vec<f64> = coords.iter().map(|i| target[*i]).collect();
    let b: Vec<f64> = coords.iter().map(|i| other.get(*i).copied().unwrap_or(0.0)).collect();
    let dot: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// Random dataset: up to `max_users` users over `max_items` items, each with
/// a few transactions and ratings.
pub fn arb_dataset(max_users: usize, max_items: usize) -> impl Strategy<Value = Dataset> {
    let user = (
        prop::collection::vec(prop::collection::btree_set(0..max_items, 1..4), 0..5),
        prop::collection::btree_map(0..max_items, 0u8..=10, 0..5),
    );
    prop::collection::vec(user, 1..=max_users).prop_map(|users| {
        let mut txs = Vec::new();
        let mut ratings = Vec::new();
        for (u, (baskets, rated)) in users.into_iter().enumerate() {
            let uid = format!("u{u:02}");
            for (k, basket) in baskets.into_iter().enumerate() {
                txs.push(Transaction {
                    tid: format!("{uid}-{k}"),
                    user: uid.as_str().into(),
                    seq: k as u64 + 1,
                    items: basket.into_iter().map(|i| ItemId::new(format!("i{i}"))).collect(),
                });
            }
            for (i, v) in rated {
                ratings.push(rating(&uid, &format!("i{i}"), v as f64));
            }
        }
        Dataset::from_records(txs, ratings).unwrap()
    })
}

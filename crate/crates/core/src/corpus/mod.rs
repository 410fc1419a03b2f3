//! Domain types, CSV ingestion, synthetic data and user splits.

mod csv_io;
mod split;
mod synthetic;

use std::borrow::Borrow;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::MAX_RATING;

pub use csv_io::{
    load_ratings, load_transactions, read_ratings, read_transactions, write_ratings,
    write_transactions, RATINGS_HEADER, TRANSACTIONS_HEADER,
};
pub use split::split_users;
pub use synthetic::{generate_synthetic, item_name, user_class, user_name, SyntheticConfig};

macro_rules! string_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                $name(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name(s.to_owned())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                $name(s)
            }
        }
    };
}

string_id!(
    /// Opaque product identifier.
    ItemId
);
string_id!(
    /// Opaque customer identifier.
    UserId
);

/// One purchase event. Items of a transaction are bought simultaneously.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transaction {
    pub tid: String,
    pub user: UserId,
    /// Position in the user's purchase stream; unique per user.
    pub seq: u64,
    pub items: Vec<ItemId>,
}

impl AsRef<[ItemId]> for Transaction {
    fn as_ref(&self) -> &[ItemId] {
        &self.items
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatingRecord {
    pub user: UserId,
    pub item: ItemId,
    /// Canonical scale `[0, 10]`.
    pub value: f64,
}

/// Everything known about one user: explicit ratings and purchase counts.
///
/// Profiles are what the recommender consumes, so a user that is not part of
/// the training data (a held-out test user, an FFI caller) can be queried the
/// same way as a stored one.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Profile {
    pub ratings: BTreeMap<ItemId, f64>,
    /// `n(u, i)`: number of transactions of this user containing the item.
    pub purchases: BTreeMap<ItemId, u32>,
}

impl Profile {
    pub fn is_empty(&self) -> bool {
        self.ratings.is_empty() && self.purchases.is_empty()
    }

    /// Rated or purchased.
    pub fn has_seen(&self, item: &ItemId) -> bool {
        self.ratings.contains_key(item) || self.purchases.contains_key(item)
    }

    pub fn purchased(&self) -> impl Iterator<Item = &ItemId> {
        self.purchases.keys()
    }

    /// Copy of the profile with every trace of `items` removed.
    pub fn without(&self, items: &BTreeSet<ItemId>) -> Profile {
        Profile {
            ratings: self
                .ratings
                .iter()
                .filter(|(i, _)| !items.contains(*i))
                .map(|(i, v)| (i.clone(), *v))
                .collect(),
            purchases: self
                .purchases
                .iter()
                .filter(|(i, _)| !items.contains(*i))
                .map(|(i, n)| (i.clone(), *n))
                .collect(),
        }
    }
}

/// Users, items, transactions and ratings. Immutable once built.
///
/// Transactions are kept sorted by `(user, seq)` and ratings by
/// `(user, item)`, so two datasets holding the same records compare equal
/// regardless of input order.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    users: BTreeSet<UserId>,
    items: BTreeSet<ItemId>,
    transactions: Vec<Transaction>,
    ratings: Vec<RatingRecord>,
    profiles: BTreeMap<UserId, Profile>,
}

impl Dataset {
    /// Builds a dataset from explicit user and item catalogues, checking every
    /// referential and uniqueness invariant.
    pub fn new(
        users: impl IntoIterator<Item = UserId>,
        items: impl IntoIterator<Item = ItemId>,
        mut transactions: Vec<Transaction>,
        mut ratings: Vec<RatingRecord>,
    ) -> Result<Self> {
        let mut user_set = BTreeSet::new();
        for u in users {
            if u.as_str().is_empty() {
                return Err(Error::Integrity("empty user id".into()));
            }
            if !user_set.insert(u.clone()) {
                return Err(Error::Integrity(format!("duplicate user '{u}'")));
            }
        }
        let mut item_set = BTreeSet::new();
        for i in items {
            if i.as_str().is_empty() {
                return Err(Error::Integrity("empty item id".into()));
            }
            if !item_set.insert(i.clone()) {
                return Err(Error::Integrity(format!("duplicate item '{i}'")));
            }
        }

        let known_user = |u: &UserId| {
            if user_set.contains(u) {
                Ok(())
            } else {
                Err(Error::Integrity(format!("unknown user '{u}'")))
            }
        };
        let known_item = |i: &ItemId| {
            if item_set.contains(i) {
                Ok(())
            } else {
                Err(Error::Integrity(format!("unknown item '{i}'")))
            }
        };

        let mut seqs = BTreeSet::new();
        for t in &transactions {
            known_user(&t.user)?;
            check_transaction_items(t).map_err(Error::Integrity)?;
            for i in &t.items {
                known_item(i)?;
            }
            if !seqs.insert((t.user.clone(), t.seq)) {
                return Err(Error::Integrity(format!(
                    "user '{}' has two transactions with seq {}",
                    t.user, t.seq
                )));
            }
        }

        let mut rated = BTreeSet::new();
        for r in &ratings {
            known_user(&r.user)?;
            known_item(&r.item)?;
            check_rating_value(r.value).map_err(Error::Range)?;
            if !rated.insert((r.user.clone(), r.item.clone())) {
                return Err(Error::Integrity(format!(
                    "duplicate rating for ({}, {})",
                    r.user, r.item
                )));
            }
        }

        transactions.sort_by(|a, b| (&a.user, a.seq).cmp(&(&b.user, b.seq)));
        ratings.sort_by(|a, b| (&a.user, &a.item).cmp(&(&b.user, &b.item)));

        let mut profiles: BTreeMap<UserId, Profile> = user_set
            .iter()
            .map(|u| (u.clone(), Profile::default()))
            .collect();
        for t in &transactions {
            let p = profiles.get_mut(&t.user).expect("user checked above");
            for i in &t.items {
                *p.purchases.entry(i.clone()).or_insert(0) += 1;
            }
        }
        for r in &ratings {
            let p = profiles.get_mut(&r.user).expect("user checked above");
            p.ratings.insert(r.item.clone(), r.value);
        }

        Ok(Dataset {
            users: user_set,
            items: item_set,
            transactions,
            ratings,
            profiles,
        })
    }

    /// Infers the user and item catalogues from the records themselves.
    pub fn from_records(transactions: Vec<Transaction>, ratings: Vec<RatingRecord>) -> Result<Self> {
        let mut users = BTreeSet::new();
        let mut items = BTreeSet::new();
        for t in &transactions {
            users.insert(t.user.clone());
            items.extend(t.items.iter().cloned());
        }
        for r in &ratings {
            users.insert(r.user.clone());
            items.insert(r.item.clone());
        }
        Dataset::new(users, items, transactions, ratings)
    }

    /// Loads either or both CSV files.
    pub fn load(transactions: Option<&Path>, ratings: Option<&Path>) -> Result<Self> {
        let transactions = match transactions {
            Some(p) => load_transactions(p)?,
            None => Vec::new(),
        };
        let ratings = match ratings {
            Some(p) => load_ratings(p)?,
            None => Vec::new(),
        };
        Dataset::from_records(transactions, ratings)
    }

    pub fn users(&self) -> &BTreeSet<UserId> {
        &self.users
    }

    pub fn items(&self) -> &BTreeSet<ItemId> {
        &self.items
    }

    pub fn transactions(&self) -> &[Transaction] {
        &self.transactions
    }

    pub fn ratings(&self) -> &[RatingRecord] {
        &self.ratings
    }

    pub fn num_users(&self) -> usize {
        self.users.len()
    }

    pub fn profile(&self, user: &UserId) -> Result<&Profile> {
        self.profiles.get(user).ok_or_else(|| Error::NotFound {
            kind: "user",
            id: user.to_string(),
        })
    }

    pub fn profiles(&self) -> impl Iterator<Item = (&UserId, &Profile)> {
        self.profiles.iter()
    }

    /// Transactions of each user in seq order.
    pub fn transactions_by_user(&self) -> impl Iterator<Item = &[Transaction]> {
        self.transactions
            .chunk_by(|a, b| a.user == b.user)
    }

    /// Sub-dataset holding only `keep` users and their records. The item
    /// catalogue is shared.
    pub fn restrict_users(&self, keep: &BTreeSet<UserId>) -> Dataset {
        let transactions = self
            .transactions
            .iter()
            .filter(|t| keep.contains(&t.user))
            .cloned()
            .collect();
        let ratings = self
            .ratings
            .iter()
            .filter(|r| keep.contains(&r.user))
            .cloned()
            .collect();
        let users = self.users.iter().filter(|u| keep.contains(*u)).cloned();
        Dataset::new(users, self.items.iter().cloned(), transactions, ratings)
            .expect("subset of a valid dataset is valid")
    }
}

pub(crate) fn check_transaction_items(t: &Transaction) -> std::result::Result<(), String> {
    if t.items.is_empty() {
        return Err(format!("transaction '{}' has no items", t.tid));
    }
    let mut seen = BTreeSet::new();
    for i in &t.items {
        if i.as_str().is_empty() {
            return Err(format!("transaction '{}' has an empty item id", t.tid));
        }
        if !seen.insert(i) {
            return Err(format!("transaction '{}' lists '{}' twice", t.tid, i));
        }
    }
    Ok(())
}

pub(crate) fn check_rating_value(v: f64) -> std::result::Result<(), String> {
    if v.is_finite() && (0.0..=MAX_RATING).contains(&v) {
        Ok(())
    } else {
        Err(format!("rating {v} outside [0, {MAX_RATING}]"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tx(tid: &str, user: &str, seq: u64, items: &[&str]) -> Transaction {
        Transaction {
            tid: tid.into(),
            user: user.into(),
            seq,
            items: items.iter().map(|&i| i.into()).collect(),
        }
    }

    #[test]
    fn profile_counts_purchases_per_transaction() {
        let ds = Dataset::from_records(
            vec![tx("1", "u", 1, &["a", "b"]), tx("2", "u", 2, &["a"])],
            vec![RatingRecord { user: "u".into(), item: "b".into(), value: 4.0 }],
        )
        .unwrap();
        let p = ds.profile(&"u".into()).unwrap();
        assert_eq!(p.purchases[&ItemId::from("a")], 2);
        assert_eq!(p.purchases[&ItemId::from("b")], 1);
        assert_eq!(p.ratings[&ItemId::from("b")], 4.0);
        assert!(p.has_seen(&"a".into()));
        assert!(!p.has_seen(&"c".into()));
    }

    #[test]
    fn rejects_unknown_references() {
        let err = Dataset::new(
            vec![UserId::from("u")],
            vec![ItemId::from("a")],
            vec![tx("1", "u", 1, &["b"])],
            vec![],
        )
        .unwrap_err();
        assert!(matches!(err, Error::Integrity(_)));

        let err = Dataset::new(
            vec![UserId::from("u")],
            vec![ItemId::from("a")],
            vec![],
            vec![RatingRecord { user: "v".into(), item: "a".into(), value: 1.0 }],
        )
        .unwrap_err();
        assert!(matches!(err, Error::Integrity(_)));
    }

    #[test]
    fn rejects_duplicate_seq_and_duplicate_items() {
        let err = Dataset::from_records(
            vec![tx("1", "u", 1, &["a"]), tx("2", "u", 1, &["b"])],
            vec![],
        )
        .unwrap_err();
        assert!(matches!(err, Error::Integrity(_)));

        let err = Dataset::from_records(vec![tx("1", "u", 1, &["a", "a"])], vec![]).unwrap_err();
        assert!(matches!(err, Error::Integrity(_)));
    }

    #[test]
    fn record_order_does_not_matter() {
        let a = Dataset::from_records(
            vec![tx("1", "u", 1, &["a"]), tx("2", "v", 1, &["b"]), tx("3", "u", 2, &["b"])],
            vec![],
        )
        .unwrap();
        let b = Dataset::from_records(
            vec![tx("3", "u", 2, &["b"]), tx("2", "v", 1, &["b"]), tx("1", "u", 1, &["a"])],
            vec![],
        )
        .unwrap();
        assert_eq!(a, b);
        let per_user: Vec<usize> = a.transactions_by_user().map(|g| g.len()).collect();
        assert_eq!(per_user, vec![2, 1]);
    }

    #[test]
    fn without_strips_ratings_and_purchases() {
        let mut p = Profile::default();
        p.ratings.insert("a".into(), 9.0);
        p.ratings.insert("b".into(), 3.0);
        p.purchases.insert("a".into(), 2);
        let hidden: BTreeSet<ItemId> = [ItemId::from("a")].into();
        let q = p.without(&hidden);
        assert!(!q.has_seen(&"a".into()));
        assert!(q.has_seen(&"b".into()));
    }
}

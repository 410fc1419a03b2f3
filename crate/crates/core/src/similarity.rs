//! Explicit-rating similarity: mean squared difference, restricted cosine,
//! and the frequency-weighted user vectors.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{Dataset, ItemId, Profile, UserId};
use crate::error::{Error, Result};
use crate::implicit::{self, IifTable};

/// How a user's profile becomes a vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Raw explicit ratings.
    Simple,
    /// Rating times `n(u,i) / sum_I n(u,I)`.
    Method1,
    /// Rating times `n(u,i) / max_I n(u,I)`.
    Method2,
    /// Purchase count times inverse item frequency; ratings unused.
    Implicit,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::Implicit, Mode::Simple, Mode::Method1, Mode::Method2];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Simple => "simple",
            Mode::Method1 => "method1",
            Mode::Method2 => "method2",
            Mode::Implicit => "implicit",
        }
    }

    /// Row label used in evaluation tables.
    pub fn label(self) -> &'static str {
        match self {
            Mode::Implicit => "Implicit rating",
            Mode::Simple => "Simple explicit rating",
            Mode::Method1 => "Explicit rating with Method1",
            Mode::Method2 => "Explicit rating with Method2",
        }
    }

    pub fn is_explicit(self) -> bool {
        self != Mode::Implicit
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simple" => Ok(Mode::Simple),
            "method1" => Ok(Mode::Method1),
            "method2" => Ok(Mode::Method2),
            "implicit" => Ok(Mode::Implicit),
            other => Err(Error::Config(format!(
                "unknown mode '{other}' (expected simple|method1|method2|implicit)"
            ))),
        }
    }
}

/// Sparse user vector. Only non-zero weights are stored; an absent item is a
/// zero coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct UserVector {
    pub user: UserId,
    pub mode: Mode,
    pub weights: BTreeMap<ItemId, f64>,
}

impl UserVector {
    pub fn new(user: UserId, mode: Mode, weights: impl IntoIterator<Item = (ItemId, f64)>) -> Self {
        UserVector {
            user,
            mode,
            weights: weights.into_iter().filter(|&(_, w)| w != 0.0).collect(),
        }
    }

    pub fn get(&self, item: &ItemId) -> f64 {
        self.weights.get(item).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Mean squared rating difference over co-rated items. Zero means identical
/// tastes; there is no upper bound.
pub fn msd(target: &UserVector, other: &UserVector) -> Result<f64> {
    let (sum, n) = target
        .weights
        .iter()
        .filter_map(|(item, a)| other.weights.get(item).map(|b| (a - b).powi(2)))
        .fold((0.0, 0usize), |(s, n), d| (s + d, n + 1));
    if n == 0 {
        return Err(Error::NoOverlap);
    }
    Ok(sum / n as f64)
}

/// Cosine between `target` and `other` restricted to the target's coordinates.
///
/// Items `other` has but `target` lacks are dropped; items `target` has but
/// `other` lacks count as zero. A zero restricted norm gives 0.
pub fn cosine_restricted(target: &UserVector, other: &UserVector) -> Result<f64> {
    if target.is_zero() {
        return Err(Error::NoProfile(target.user.to_string()));
    }
    let mut dot = 0.0;
    let mut norm_t = 0.0;
    let mut norm_o = 0.0;
    for (item, &a) in &target.weights {
        let b = other.get(item);
        dot += a * b;
        norm_t += a * a;
        norm_o += b * b;
    }
    if norm_t == 0.0 || norm_o == 0.0 {
        return Ok(0.0);
    }
    Ok(dot / (norm_t.sqrt() * norm_o.sqrt()))
}

/// Explicit-mode vector of a profile. `Mode::Implicit` needs an [`IifTable`]
/// and is built by [`vector_for_profile`] instead.
pub fn explicit_vector(user: &UserId, profile: &Profile, mode: Mode) -> UserVector {
    let total: u32 = profile.purchases.values().sum();
    let max = profile.purchases.values().copied().max().unwrap_or(0);
    let weights = profile.ratings.iter().map(|(item, &rating)| {
        let n = profile.purchases.get(item).copied().unwrap_or(0) as f64;
        let w = match mode {
            Mode::Simple | Mode::Implicit => rating,
            Mode::Method1 if total > 0 => rating * n / total as f64,
            Mode::Method2 if max > 0 => rating * n / max as f64,
            Mode::Method1 | Mode::Method2 => 0.0,
        };
        (item.clone(), w)
    });
    UserVector::new(user.clone(), mode, weights)
}

pub fn vector_for_profile(user: &UserId, profile: &Profile, mode: Mode, iif: &IifTable) -> UserVector {
    match mode {
        Mode::Implicit => implicit::implicit_vector_for_profile(user, profile, iif),
        _ => explicit_vector(user, profile, mode),
    }
}

/// Vector of a stored user. Implicit mode derives its IIF table from the same
/// dataset.
pub fn user_vector(dataset: &Dataset, user: &UserId, mode: Mode) -> Result<UserVector> {
    let profile = dataset.profile(user)?;
    match mode {
        Mode::Implicit => {
            let iif = IifTable::build(dataset)?;
            Ok(implicit::implicit_vector_for_profile(user, profile, &iif))
        }
        _ => Ok(explicit_vector(user, profile, mode)),
    }
}

/// Neighbours of one target, best first.
#[derive(Clone, Debug, PartialEq)]
pub struct NeighborList {
    pub target: UserId,
    pub entries: Vec<(UserId, f64)>,
}

/// Precomputed vectors of every user in one mode.
#[derive(Clone, Debug)]
pub struct VectorTable {
    mode: Mode,
    vectors: Vec<UserVector>,
}

impl VectorTable {
    pub fn build(dataset: &Dataset, mode: Mode, iif: &IifTable) -> Self {
        let vectors = dataset
            .profiles()
            .map(|(u, p)| vector_for_profile(u, p, mode, iif))
            .collect();
        VectorTable { mode, vectors }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn get(&self, user: &UserId) -> Option<&UserVector> {
        self.vectors
            .binary_search_by(|v| v.user.cmp(user))
            .ok()
            .map(|i| &self.vectors[i])
    }

    /// Top-`k` users by restricted cosine against `target`, skipping the
    /// target's own id. Sorted by similarity descending, then user id.
    pub fn neighbors(&self, target: &UserVector, k: usize) -> Result<NeighborList> {
        if target.is_zero() {
            return Err(Error::NoProfile(target.user.to_string()));
        }
        let mut entries = Vec::with_capacity(self.vectors.len());
        for v in self.vectors.iter().filter(|v| v.user != target.user) {
            entries.push((v.user.clone(), cosine_restricted(target, v)?));
        }
        entries.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        entries.truncate(k);
        Ok(NeighborList {
            target: target.user.clone(),
            entries,
        })
    }
}

pub fn nearest_neighbors(dataset: &Dataset, target: &UserId, k: usize, mode: Mode) -> Result<NeighborList> {
    if k == 0 {
        return Err(Error::Config("k must be at least 1".into()));
    }
    let iif = IifTable::build(dataset)?;
    let table = VectorTable::build(dataset, mode, &iif);
    let target_vec = table.get(target).ok_or_else(|| Error::NotFound {
        kind: "user",
        id: target.to_string(),
    })?;
    table.neighbors(target_vec, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{RatingRecord, Transaction};

    fn vec_of(user: &str, w: &[(&str, f64)]) -> UserVector {
        UserVector::new(user.into(), Mode::Simple, w.iter().map(|&(i, x)| (ItemId::from(i), x)))
    }

    fn user3() -> UserVector {
        vec_of("User3", &[("P1", 4.0), ("P2", 5.0), ("P3", 6.0)])
    }
    fn user1() -> UserVector {
        vec_of("User1", &[("P1", 5.0), ("P2", 6.0), ("P4", 7.0), ("P5", 8.0)])
    }
    fn user2() -> UserVector {
        vec_of("User2", &[("P1", 5.0), ("P2", 6.0), ("P3", 6.0), ("P4", 2.0), ("P5", 9.0)])
    }

    #[test]
    fn worked_cosine_values() {
        // (4,5,6)·(5,6,0) = 50; |(4,5,6)| = sqrt 77; |(5,6,0)| = sqrt 61
        let expected1 = 50.0 / (77f64.sqrt() * 61f64.sqrt());
        // (4,5,6)·(5,6,6) = 86; |(5,6,6)| = sqrt 97
        let expected2 = 86.0 / (77f64.sqrt() * 97f64.sqrt());
        let c1 = cosine_restricted(&user3(), &user1()).unwrap();
        let c2 = cosine_restricted(&user3(), &user2()).unwrap();
        assert!((c1 - expected1).abs() < 1e-12);
        assert!((c2 - expected2).abs() < 1e-12);
        assert!((c1 - 0.7296).abs() < 0.005, "{c1}");
        assert!((c2 - 0.9951).abs() < 0.005, "{c2}");
        assert_eq!(format!("{c1:.2}"), "0.73");
    }

    #[test]
    fn cosine_identity_and_degenerate() {
        let u = user2();
        assert!((cosine_restricted(&u, &u).unwrap() - 1.0).abs() < 1e-12);
        let empty = vec_of("x", &[]);
        assert!(matches!(cosine_restricted(&empty, &u), Err(Error::NoProfile(_))));
        let disjoint = vec_of("y", &[("Q", 3.0)]);
        assert_eq!(cosine_restricted(&u, &disjoint).unwrap(), 0.0);
    }

    #[test]
    fn msd_cases() {
        let u = vec_of("u", &[("a", 5.0), ("b", 6.0)]);
        let j = vec_of("j", &[("a", 6.0), ("b", 8.0), ("c", 1.0)]);
        assert_eq!(msd(&u, &j).unwrap(), 2.5);
        assert_eq!(msd(&u, &u).unwrap(), 0.0);
        let d = vec_of("d", &[("z", 1.0)]);
        assert!(matches!(msd(&u, &d), Err(Error::NoOverlap)));
    }

    fn profile(ratings: &[(&str, f64)], purchases: &[(&str, u32)]) -> Profile {
        Profile {
            ratings: ratings.iter().map(|&(i, v)| (i.into(), v)).collect(),
            purchases: purchases.iter().map(|&(i, n)| (i.into(), n)).collect(),
        }
    }

    #[test]
    fn method1_worked_component() {
        // rating 5 (0.5 on the unit scale), bought 5 times out of 10 purchases
        let p = profile(&[("P1", 5.0)], &[("P1", 5), ("P2", 3), ("P3", 2)]);
        let v = explicit_vector(&"User1".into(), &p, Mode::Method1);
        assert!((v.get(&"P1".into()) - 2.5).abs() < 1e-12);
    }

    #[test]
    fn method2_component() {
        let p = profile(&[("P1", 5.0)], &[("P1", 5), ("P2", 8)]);
        let v = explicit_vector(&"u".into(), &p, Mode::Method2);
        assert!((v.get(&"P1".into()) - 3.125).abs() < 1e-12);
    }

    #[test]
    fn weighted_modes_zero_out_unpurchased_items() {
        let p = profile(&[("P1", 5.0), ("P2", 9.0)], &[("P1", 1)]);
        for mode in [Mode::Method1, Mode::Method2] {
            let v = explicit_vector(&"u".into(), &p, mode);
            assert_eq!(v.get(&"P2".into()), 0.0);
            assert!(v.get(&"P1".into()) > 0.0);
        }
        let none = profile(&[("P1", 5.0)], &[]);
        assert!(explicit_vector(&"u".into(), &none, Mode::Method1).is_zero());
        let simple = explicit_vector(&"u".into(), &p, Mode::Simple);
        assert_eq!(simple.weights, p.ratings);
    }

    fn three_users() -> Dataset {
        let r = |u: &str, i: &str, v: f64| RatingRecord { user: u.into(), item: i.into(), value: v };
        Dataset::from_records(
            Vec::<Transaction>::new(),
            vec![
                r("User1", "P1", 5.0),
                r("User1", "P2", 6.0),
                r("User1", "P4", 7.0),
                r("User1", "P5", 8.0),
                r("User2", "P1", 5.0),
                r("User2", "P2", 6.0),
                r("User2", "P3", 6.0),
                r("User2", "P4", 2.0),
                r("User2", "P5", 9.0),
                r("User3", "P1", 4.0),
                r("User3", "P2", 5.0),
                r("User3", "P3", 6.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn nearest_neighbor_of_user3() {
        let ds = three_users();
        let nl = nearest_neighbors(&ds, &"User3".into(), 1, Mode::Simple).unwrap();
        assert_eq!(nl.entries.len(), 1);
        assert_eq!(nl.entries[0].0, UserId::from("User2"));
        assert!((nl.entries[0].1 - 0.9951).abs() < 0.005);

        let all = nearest_neighbors(&ds, &"User3".into(), 10, Mode::Simple).unwrap();
        assert_eq!(all.entries.len(), 2);
        assert!(all.entries.iter().all(|(u, _)| u.as_str() != "User3"));
    }

    #[test]
    fn ties_break_by_user_id() {
        let r = |u: &str, i: &str, v: f64| RatingRecord { user: u.into(), item: i.into(), value: v };
        let ds = Dataset::from_records(
            vec![],
            vec![r("t", "a", 5.0), r("zed", "a", 3.0), r("amy", "a", 9.0)],
        )
        .unwrap();
        let nl = nearest_neighbors(&ds, &"t".into(), 5, Mode::Simple).unwrap();
        let ids: Vec<&str> = nl.entries.iter().map(|(u, _)| u.as_str()).collect();
        assert_eq!(ids, ["amy", "zed"]);
    }

    #[test]
    fn unknown_target_and_empty_profile() {
        let ds = three_users();
        assert!(matches!(
            nearest_neighbors(&ds, &"nobody".into(), 1, Mode::Simple),
            Err(Error::NotFound { .. })
        ));
        // no purchases: every weighted coordinate vanishes
        assert!(matches!(
            nearest_neighbors(&ds, &"User3".into(), 1, Mode::Method1),
            Err(Error::NoProfile(_))
        ));
    }

    #[test]
    fn mode_names_round_trip() {
        for m in Mode::ALL {
            assert_eq!(m.name().parse::<Mode>().unwrap(), m);
        }
        assert!("cosine".parse::<Mode>().is_err());
    }
}

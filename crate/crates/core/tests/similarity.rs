mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;

use prodrec::similarity::{cosine_restricted, explicit_vector, msd, nearest_neighbors, user_vector};
use prodrec::{ItemId, Mode, Profile, UserId, UserVector};

use common::{arb_dataset, dense_cosine, three_users};

fn arb_weights() -> impl Strategy<Value = BTreeMap<ItemId, f64>> {
    prop::collection::btree_map((0..6usize).prop_map(|i| ItemId::new(format!("i{i}"))), 0.5f64..10.0, 1..6)
}

fn vector(user: &str, w: BTreeMap<ItemId, f64>) -> UserVector {
    UserVector::new(user.into(), Mode::Simple, w)
}

#[test]
fn three_user_vectors_from_files() {
    let ds = three_users();
    let v = user_vector(&ds, &"User2".into(), Mode::Simple).unwrap();
    assert_eq!(v.get(&"P4".into()), 2.0);
    let nl = nearest_neighbors(&ds, &"User3".into(), 1, Mode::Simple).unwrap();
    assert_eq!(nl.entries[0].0.as_str(), "User2");
    // every user bought each rated item once; both weighted modes rank the same
    let m1 = nearest_neighbors(&ds, &"User3".into(), 2, Mode::Method1).unwrap();
    let m2 = nearest_neighbors(&ds, &"User3".into(), 2, Mode::Method2).unwrap();
    let order = |nl: &prodrec::NeighborList| nl.entries.iter().map(|(u, _)| u.clone()).collect::<Vec<_>>();
    assert_eq!(order(&m1), order(&m2));
}

proptest! {
    #[test]
    fn cosine_bounded_and_symmetric(a in arb_weights(), b in arb_weights()) {
        let va = vector("a", a.clone());
        let vb = vector("b", b.clone());
        let c = cosine_restricted(&va, &vb).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&c));
        // same coordinate set on both sides: restrict b to a's support first
        let b_on_a: BTreeMap<ItemId, f64> = b.iter().filter(|(i, _)| a.contains_key(*i)).map(|(i, w)| (i.clone(), *w)).collect();
        if !b_on_a.is_empty() {
            let a_on_b: BTreeMap<ItemId, f64> = a.iter().filter(|(i, _)| b_on_a.contains_key(*i)).map(|(i, w)| (i.clone(), *w)).collect();
            let x = cosine_restricted(&vector("a", a_on_b.clone()), &vector("b", b_on_a.clone())).unwrap();
            let y = cosine_restricted(&vector("b", b_on_a), &vector("a", a_on_b)).unwrap();
            prop_assert!((x - y).abs() < 1e-12);
        }
        prop_assert!((c - dense_cosine(&a, &b)).abs() < 1e-12);
    }

    #[test]
    fn cosine_scale_invariant(a in arb_weights(), b in arb_weights(), ca in 0.01f64..100.0, cb in 0.01f64..100.0) {
        let base = cosine_restricted(&vector("a", a.clone()), &vector("b", b.clone())).unwrap();
        let sa = a.into_iter().map(|(i, w)| (i, w * ca)).collect();
        let sb = b.into_iter().map(|(i, w)| (i, w * cb)).collect();
        let scaled = cosine_restricted(&vector("a", sa), &vector("b", sb)).unwrap();
        prop_assert!((base - scaled).abs() < 1e-9);
    }

    #[test]
    fn msd_identity_and_symmetry(a in arb_weights(), b in arb_weights()) {
        let va = vector("a", a);
        let vb = vector("b", b);
        prop_assert_eq!(msd(&va, &va).unwrap(), 0.0);
        match (msd(&va, &vb), msd(&vb, &va)) {
            (Ok(x), Ok(y)) => prop_assert!((x - y).abs() < 1e-12 && x >= 0.0),
            (Err(_), Err(_)) => {}
            other => prop_assert!(false, "asymmetric result {:?}", other),
        }
    }

    #[test]
    fn method1_weights_sum(
        ratings in prop::collection::btree_map(0..6usize, 1u8..=10, 1..6),
        counts in prop::collection::btree_map(0..6usize, 1u32..6, 1..6),
    ) {
        let item = |i: usize| ItemId::new(format!("i{i}"));
        let profile = Profile {
            ratings: ratings.iter().map(|(&i, &v)| (item(i), v as f64)).collect(),
            purchases: counts.iter().map(|(&i, &n)| (item(i), n)).collect(),
        };
        let v = explicit_vector(&UserId::from("u"), &profile, Mode::Method1);
        let total: u32 = counts.values().sum();
        let direct: f64 = ratings
            .iter()
            .map(|(i, &r)| r as f64 * counts.get(i).copied().unwrap_or(0) as f64)
            .sum::<f64>() / total as f64;
        let summed: f64 = v.weights.values().sum();
        prop_assert!((summed - direct).abs() < 1e-9);
    }

    #[test]
    fn neighbors_match_all_pairs_oracle(ds in arb_dataset(5, 6), k in 1usize..6) {
        for target in ds.users() {
            let tv = user_vector(&ds, target, Mode::Simple).unwrap();
            let got = nearest_neighbors(&ds, target, k, Mode::Simple);
            if tv.is_zero() {
                prop_assert!(got.is_err());
                continue;
            }
            let mut oracle: Vec<(UserId, f64)> = ds
                .users()
                .iter()
                .filter(|u| *u != target)
                .map(|u| {
                    let ov = user_vector(&ds, u, Mode::Simple).unwrap();
                    (u.clone(), dense_cosine(&tv.weights, &ov.weights))
                })
                .collect();
            oracle.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
            oracle.truncate(k);
            let got = got.unwrap().entries;
            prop_assert_eq!(got.len(), oracle.len());
            for (g, o) in got.iter().zip(&oracle) {
                prop_assert!((g.1 - o.1).abs() < 1e-12);
            }
            // orders agree wherever the oracle has no float near-ties
            let ids_g: Vec<_> = got.iter().map(|(u, _)| u).collect();
            let ids_o: Vec<_> = oracle.iter().map(|(u, _)| u).collect();
            let near_tie = oracle.windows(2).any(|w| (w[0].1 - w[1].1).abs() < 1e-12 && w[0].1 != w[1].1);
            if !near_tie {
                prop_assert_eq!(ids_g, ids_o);
            }
        }
    }
}

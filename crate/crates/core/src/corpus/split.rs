use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Dataset, UserId};
use crate::error::{Error, Result};

/// Partitions users into `(train, test)`. The test side gets
/// `floor(n * (1 - train_fraction))` users, so a lone user always trains.
pub fn split_users(dataset: &Dataset, train_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::Range(format!(
            "train fraction {train_fraction} must lie strictly between 0 and 1"
        )));
    }
    let mut users: Vec<UserId> = dataset.users().iter().cloned().collect();
    let n = users.len();
    // the epsilon absorbs 1 - 0.8 = 0.19999999999999996
    let test_count = ((n as f64) * (1.0 - train_fraction) + 1e-9).floor() as usize;
    users.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let test: BTreeSet<UserId> = users[..test_count].iter().cloned().collect();
    let train: BTreeSet<UserId> = users[test_count..].iter().cloned().collect();
    Ok((dataset.restrict_users(&train), dataset.restrict_users(&test)))
}

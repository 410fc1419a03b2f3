//! Purchase precedence: "was `later` ever bought after `earlier`?"
//!
//! Each user's transactions form a chronological stream. Every item of a
//! transaction is considered to precede every item of every later
//! transaction of the same user; items sharing a transaction are
//! simultaneous. Counts are summed over all users.

use std::collections::BTreeMap;
use std::io::{self, Write};

use crate::corpus::{Dataset, ItemId};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PrecedenceIndex {
    /// earlier -> later -> occurrences
    successors: BTreeMap<ItemId, BTreeMap<ItemId, u32>>,
}

impl PrecedenceIndex {
    pub fn build(dataset: &Dataset) -> Self {
        let mut successors: BTreeMap<ItemId, BTreeMap<ItemId, u32>> = BTreeMap::new();
        for stream in dataset.transactions_by_user() {
            for (pos, earlier) in stream.iter().enumerate() {
                for later in &stream[pos + 1..] {
                    for a in &earlier.items {
                        let row = successors.entry(a.clone()).or_default();
                        for b in &later.items {
                            *row.entry(b.clone()).or_insert(0) += 1;
                        }
                    }
                }
            }
        }
        PrecedenceIndex { successors }
    }

    pub fn count(&self, earlier: &ItemId, later: &ItemId) -> u32 {
        self.successors
            .get(earlier)
            .and_then(|row| row.get(later))
            .copied()
            .unwrap_or(0)
    }

    /// True when some item of `history` was followed by `candidate` at least
    /// once. An empty history imposes no constraint.
    pub fn bought_after<'a>(
        &self,
        candidate: &ItemId,
        history: impl IntoIterator<Item = &'a ItemId>,
    ) -> bool {
        let mut empty = true;
        for h in history {
            empty = false;
            if self.count(h, candidate) > 0 {
                return true;
            }
        }
        empty
    }

    /// `(earlier, later, count)` in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (&ItemId, &ItemId, u32)> {
        self.successors
            .iter()
            .flat_map(|(a, row)| row.iter().map(move |(b, &n)| (a, b, n)))
    }

    pub fn len(&self) -> usize {
        self.successors.values().map(BTreeMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.successors.is_empty()
    }

    /// One `earlier,later,count` line per pair.
    pub fn dump<W: Write>(&self, mut w: W) -> io::Result<()> {
        for (a, b, n) in self.pairs() {
            writeln!(w, "{a},{b},{n}")?;
        }
        Ok(())
    }
}

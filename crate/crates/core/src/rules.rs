//! Itemset support, FP-growth frequent-itemset mining and association rules.
//!
//! Supports and confidences are percentages. Thresholds are inclusive:
//! an itemset is frequent when `100 * count >= minsup * |T|`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Serialize, Serializer};

use crate::corpus::ItemId;
use crate::error::{Error, Result};

/// Absorbs float noise in percentage comparisons such as `0.4 * 5`.
const PCT_EPS: f64 = 1e-9;

/// Sorted, duplicate-free set of items.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ItemSet(Vec<ItemId>);

impl ItemSet {
    pub fn new(items: impl IntoIterator<Item = ItemId>) -> Self {
        let set: BTreeSet<ItemId> = items.into_iter().collect();
        ItemSet(set.into_iter().collect())
    }

    pub fn items(&self) -> &[ItemId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, item: &ItemId) -> bool {
        self.0.binary_search(item).is_ok()
    }

    /// True when every item of `self` appears in `basket`.
    pub fn is_subset_of(&self, basket: &[ItemId]) -> bool {
        self.0.iter().all(|i| basket.contains(i))
    }
}

impl<'a> FromIterator<&'a str> for ItemSet {
    fn from_iter<T: IntoIterator<Item = &'a str>>(iter: T) -> Self {
        ItemSet::new(iter.into_iter().map(ItemId::from))
    }
}

impl fmt::Display for ItemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(";")?;
            }
            f.write_str(i.as_str())?;
        }
        Ok(())
    }
}

impl Serialize for ItemSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrequentItemset {
    pub itemset: ItemSet,
    pub support_count: usize,
    pub support_pct: f64,
}

/// Output of [`fp_growth`], in canonical order (size, then lexicographic).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrequentItemsets {
    pub num_transactions: usize,
    pub minsup_pct: f64,
    pub itemsets: Vec<FrequentItemset>,
}

impl FrequentItemsets {
    pub fn count_of(&self, set: &ItemSet) -> Option<usize> {
        self.itemsets
            .binary_search_by(|f| canonical_cmp(&f.itemset, set))
            .ok()
            .map(|k| self.itemsets[k].support_count)
    }
}

fn canonical_cmp(a: &ItemSet, b: &ItemSet) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AssociationRule {
    pub antecedent: ItemSet,
    pub consequent: ItemSet,
    pub support_pct: f64,
    pub confidence_pct: f64,
    /// `count(X)`
    pub antecedent_count: usize,
    /// `count(X ∪ Y)`
    pub union_count: usize,
}

impl AssociationRule {
    /// Compact `X=>Y` form.
    pub fn short(&self) -> String {
        format!("{}=>{}", self.antecedent, self.consequent)
    }
}

impl fmt::Display for AssociationRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} => {}, support={}%, confidence={}%",
            self.antecedent,
            self.consequent,
            format_pct(self.support_pct),
            format_pct(self.confidence_pct)
        )
    }
}

/// Up to two decimals with trailing zeros trimmed: `40`, `66.67`, `12.5`.
pub fn format_pct(v: f64) -> String {
    let s = format!("{v:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.to_owned() }
}

fn check_pct(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v <= 100.0 {
        Ok(())
    } else {
        Err(Error::Range(format!("{name} {v} must lie in (0, 100]")))
    }
}

/// Number of baskets containing all of `itemset`, and that count as a
/// percentage of all baskets.
pub fn itemset_support<T: AsRef<[ItemId]>>(transactions: &[T], itemset: &ItemSet) -> Result<(usize, f64)> {
    if itemset.is_empty() {
        return Err(Error::Range("itemset must not be empty".into()));
    }
    if transactions.is_empty() {
        return Err(Error::Range("support percentage undefined without transactions".into()));
    }
    let count = transactions
        .iter()
        .filter(|t| itemset.is_subset_of(t.as_ref()))
        .count();
    Ok((count, 100.0 * count as f64 / transactions.len() as f64))
}

/// Smallest count meeting `minsup_pct` over `n` baskets (at least 1).
pub fn min_support_count(minsup_pct: f64, n: usize) -> usize {
    ((minsup_pct * n as f64 / 100.0) - PCT_EPS).ceil().max(1.0) as usize
}

const ROOT: usize = 0;

struct Node {
    item: usize,
    count: usize,
    parent: usize,
    children: Vec<usize>,
}

/// Prefix tree over item ranks. Rank 0 is the globally most frequent item.
struct FpTree {
    nodes: Vec<Node>,
    /// rank -> nodes carrying that rank
    header: Vec<Vec<usize>>,
}

impl FpTree {
    fn new(num_ranks: usize) -> Self {
        FpTree {
            nodes: vec![Node {
                item: usize::MAX,
                count: 0,
                parent: ROOT,
                children: Vec::new(),
            }],
            header: vec![Vec::new(); num_ranks],
        }
    }

    /// `path` must be in ascending rank order.
    fn insert(&mut self, path: &[usize], count: usize) {
        let mut cur = ROOT;
        for &item in path {
            let next = self.nodes[cur]
                .children
                .iter()
                .copied()
                .find(|&c| self.nodes[c].item == item);
            cur = match next {
                Some(c) => {
                    self.nodes[c].count += count;
                    c
                }
                None => {
                    let id = self.nodes.len();
                    self.nodes.push(Node {
                        item,
                        count,
                        parent: cur,
                        children: Vec::new(),
                    });
                    self.nodes[cur].children.push(id);
                    self.header[item].push(id);
                    id
                }
            };
        }
    }

    /// Builds a tree from weighted paths, dropping items below `min_count`.
    fn from_paths(paths: &[(Vec<usize>, usize)], num_ranks: usize, min_count: usize) -> Self {
        let mut support = vec![0usize; num_ranks];
        for (path, n) in paths {
            for &i in path {
                support[i] += n;
            }
        }
        let mut tree = FpTree::new(num_ranks);
        let mut kept = Vec::new();
        for (path, n) in paths {
            kept.clear();
            kept.extend(path.iter().copied().filter(|&i| support[i] >= min_count));
            if !kept.is_empty() {
                tree.insert(&kept, *n);
            }
        }
        tree
    }

    fn prefix_path(&self, mut node: usize) -> Vec<usize> {
        let mut path = Vec::new();
        node = self.nodes[node].parent;
        while node != ROOT {
            path.push(self.nodes[node].item);
            node = self.nodes[node].parent;
        }
        path.reverse();
        path
    }

    fn mine(&self, suffix: &mut Vec<usize>, min_count: usize, out: &mut Vec<(Vec<usize>, usize)>) {
        for rank in (0..self.header.len()).rev() {
            let nodes = &self.header[rank];
            if nodes.is_empty() {
                continue;
            }
            let support: usize = nodes.iter().map(|&n| self.nodes[n].count).sum();
            if support < min_count {
                continue;
            }
            suffix.push(rank);
            out.push((suffix.clone(), support));

            let base: Vec<(Vec<usize>, usize)> = nodes
                .iter()
                .map(|&n| (self.prefix_path(n), self.nodes[n].count))
                .filter(|(p, _)| !p.is_empty())
                .collect();
            if !base.is_empty() {
                let cond = FpTree::from_paths(&base, rank, min_count);
                if cond.nodes.len() > 1 {
                    cond.mine(suffix, min_count, out);
                }
            }
            suffix.pop();
        }
    }
}

/// Every itemset with support of at least `minsup_pct` percent.
///
/// Items are ranked by descending global frequency (ties by ascending id)
/// before building the tree.
pub fn fp_growth<T: AsRef<[ItemId]>>(transactions: &[T], minsup_pct: f64) -> Result<FrequentItemsets> {
    check_pct("minsup", minsup_pct)?;
    let n = transactions.len();
    let mut out = FrequentItemsets {
        num_transactions: n,
        minsup_pct,
        itemsets: Vec::new(),
    };
    if n == 0 {
        return Ok(out);
    }
    let min_count = min_support_count(minsup_pct, n);

    let mut freq: HashMap<&ItemId, usize> = HashMap::new();
    for t in transactions {
        let distinct: BTreeSet<&ItemId> = t.as_ref().iter().collect();
        for i in distinct {
            *freq.entry(i).or_insert(0) += 1;
        }
    }
    let mut ranked: Vec<(&ItemId, usize)> = freq.into_iter().filter(|&(_, c)| c >= min_count).collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let rank_of: HashMap<&ItemId, usize> = ranked.iter().enumerate().map(|(r, (i, _))| (*i, r)).collect();

    let mut tree = FpTree::new(ranked.len());
    let mut path = Vec::new();
    for t in transactions {
        path.clear();
        path.extend(t.as_ref().iter().filter_map(|i| rank_of.get(i).copied()));
        path.sort_unstable();
        path.dedup();
        if !path.is_empty() {
            tree.insert(&path, 1);
        }
    }

    let mut raw = Vec::new();
    tree.mine(&mut Vec::new(), min_count, &mut raw);

    out.itemsets = raw
        .into_iter()
        .map(|(ranks, count)| FrequentItemset {
            itemset: ItemSet::new(ranks.into_iter().map(|r| ranked[r].0.clone())),
            support_count: count,
            support_pct: 100.0 * count as f64 / n as f64,
        })
        .collect();
    out.itemsets.sort_by(|a, b| canonical_cmp(&a.itemset, &b.itemset));
    Ok(out)
}

/// All rules `X => Y` drawn from the frequent itemsets with confidence of at
/// least `minconf_pct`. With `antecedent_filter`, only rules whose
/// antecedent contains that item. Sorted by antecedent, then consequent.
pub fn generate_rules(
    frequents: &FrequentItemsets,
    minconf_pct: f64,
    antecedent_filter: Option<&ItemId>,
) -> Result<Vec<AssociationRule>> {
    check_pct("minconf", minconf_pct)?;
    let mut rules = Vec::new();
    for f in frequents.itemsets.iter().filter(|f| f.itemset.len() >= 2) {
        if let Some(item) = antecedent_filter {
            if !f.itemset.contains(item) {
                continue;
            }
        }
        let items = f.itemset.items();
        let full = (1u64 << items.len()) - 1;
        for mask in 1..full {
            let pick = |want: bool| {
                ItemSet(
                    items
                        .iter()
                        .enumerate()
                        .filter(|(k, _)| ((mask >> k) & 1 == 1) == want)
                        .map(|(_, i)| i.clone())
                        .collect(),
                )
            };
            let antecedent = pick(true);
            if let Some(item) = antecedent_filter {
                if !antecedent.contains(item) {
                    continue;
                }
            }
            let antecedent_count = frequents
                .count_of(&antecedent)
                .expect("subsets of frequent itemsets are frequent");
            let union_count = f.support_count;
            if (union_count as f64) * 100.0 + PCT_EPS < minconf_pct * antecedent_count as f64 {
                continue;
            }
            rules.push(AssociationRule {
                antecedent,
                consequent: pick(false),
                support_pct: f.support_pct,
                confidence_pct: 100.0 * union_count as f64 / antecedent_count as f64,
                antecedent_count,
                union_count,
            });
        }
    }
    rules.sort_by(|a, b| (&a.antecedent, &a.consequent).cmp(&(&b.antecedent, &b.consequent)));
    Ok(rules)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn five_baskets() -> Vec<Vec<ItemId>> {
        [
            &["P1", "P2"][..],
            &["P1", "P2", "P4"],
            &["P1", "P4"],
            &["P5", "P4"],
            &["P1", "P5"],
        ]
        .iter()
        .map(|t| t.iter().map(|&i| i.into()).collect())
        .collect()
    }

    fn set(xs: &[&str]) -> ItemSet {
        xs.iter().copied().collect()
    }

    #[test]
    fn support_counts() {
        let t = five_baskets();
        assert_eq!(itemset_support(&t, &set(&["P1"])).unwrap(), (4, 80.0));
        assert_eq!(itemset_support(&t, &set(&["P1", "P2"])).unwrap(), (2, 40.0));
        assert_eq!(itemset_support(&t, &set(&["P9"])).unwrap().0, 0);
        assert!(itemset_support::<Vec<ItemId>>(&[], &set(&["P1"])).is_err());
    }

    #[test]
    fn five_baskets_at_forty_percent() {
        let f = fp_growth(&five_baskets(), 40.0).unwrap();
        let got: Vec<(String, usize)> = f
            .itemsets
            .iter()
            .map(|x| (x.itemset.to_string(), x.support_count))
            .collect();
        let want: Vec<(String, usize)> = [
            ("P1", 4),
            ("P2", 2),
            ("P4", 3),
            ("P5", 2),
            ("P1;P2", 2),
            ("P1;P4", 2),
        ]
        .iter()
        .map(|&(s, c)| (s.to_owned(), c))
        .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn degenerate_mining() {
        assert!(fp_growth(&five_baskets(), 100.0).unwrap().itemsets.is_empty());
        assert!(fp_growth::<Vec<ItemId>>(&[], 40.0).unwrap().itemsets.is_empty());
        for bad in [0.0, -1.0, 100.5, f64::NAN] {
            assert!(matches!(fp_growth(&five_baskets(), bad), Err(Error::Range(_))));
        }
    }

    #[test]
    fn five_basket_rules() {
        let f = fp_growth(&five_baskets(), 40.0).unwrap();
        let strict = generate_rules(&f, 100.0, None).unwrap();
        let lines: Vec<String> = strict.iter().map(ToString::to_string).collect();
        assert_eq!(lines, ["P2 => P1, support=40%, confidence=100%"]);

        let loose = generate_rules(&f, 60.0, None).unwrap();
        let p4p1 = loose
            .iter()
            .find(|r| r.antecedent == set(&["P4"]) && r.consequent == set(&["P1"]))
            .unwrap();
        assert!((p4p1.confidence_pct - 200.0 / 3.0).abs() < 1e-9);

        let from_p2 = generate_rules(&f, 50.0, Some(&"P2".into())).unwrap();
        assert!(!from_p2.is_empty());
        assert!(from_p2.iter().all(|r| r.antecedent.contains(&"P2".into())));
        assert!(from_p2.iter().any(|r| r.consequent.contains(&"P1".into())));
    }

    #[test]
    fn percentage_formatting() {
        assert_eq!(format_pct(40.0), "40");
        assert_eq!(format_pct(200.0 / 3.0), "66.67");
        assert_eq!(format_pct(12.5), "12.5");
        assert_eq!(format_pct(0.0), "0");
    }

    #[test]
    fn min_count_rounding() {
        assert_eq!(min_support_count(40.0, 5), 2);
        assert_eq!(min_support_count(41.0, 5), 3);
        assert_eq!(min_support_count(0.001, 5), 1);
        assert_eq!(min_support_count(100.0, 7), 7);
    }
}

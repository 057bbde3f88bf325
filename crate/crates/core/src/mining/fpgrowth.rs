//! FP-growth frequent-itemset mining.
//!
//! Items are ranked once by global frequency (count descending, token
//! ascending) and every tree, conditional trees included, stores paths in
//! that fixed rank order. The output is exactly the set of itemsets whose
//! support clears the threshold, identical to exhaustive enumeration.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::{MiningError, Transaction};

/// A frequent itemset: items sorted lexicographically, support in (0, 1].
#[derive(Clone, Debug, PartialEq)]
pub struct FrequentItemset {
    pub items: Vec<String>,
    pub support: f64,
}

struct Node {
    item: u32,
    count: u64,
    parent: usize,
    children: BTreeMap<u32, usize>,
}

struct Tree {
    nodes: Vec<Node>,
    /// rank -> (total count, node indices carrying that rank)
    header: BTreeMap<u32, (u64, Vec<usize>)>,
}

impl Tree {
    fn new() -> Self {
        Tree {
            nodes: alloc::vec![Node {
                item: u32::MAX,
                count: 0,
                parent: usize::MAX,
                children: BTreeMap::new(),
            }],
            header: BTreeMap::new(),
        }
    }

    /// Inserts a rank-sorted path with the given multiplicity.
    fn insert(&mut self, path: &[u32], count: u64) {
        let mut cur = 0;
        for &item in path {
            let next = match self.nodes[cur].children.get(&item) {
                Some(&idx) => {
                    self.nodes[idx].count += count;
                    idx
                }
                None => {
                    let idx = self.nodes.len();
                    self.nodes.push(Node {
                        item,
                        count,
                        parent: cur,
                        children: BTreeMap::new(),
                    });
                    self.nodes[cur].children.insert(item, idx);
                    let entry = self.header.entry(item).or_insert((0, Vec::new()));
                    entry.1.push(idx);
                    idx
                }
            };
            self.header.entry(item).or_insert((0, Vec::new())).0 += count;
            cur = next;
        }
    }

    /// The rank-sorted prefix path above `node`, excluding the node itself.
    fn prefix_path(&self, mut node: usize) -> Vec<u32> {
        let mut path = Vec::new();
        node = self.nodes[node].parent;
        while node != 0 {
            path.push(self.nodes[node].item);
            node = self.nodes[node].parent;
        }
        path.reverse();
        path
    }
}

/// Smallest integer count whose support fraction clears `min_support`, using
/// the same `count / n >= min_support` comparison the emitted supports use.
fn min_count(n: usize, min_support: f64) -> u64 {
    let mut lo = 1u64;
    let mut hi = n as u64;
    if (hi as f64 / n as f64) < min_support {
        return hi + 1; // nothing can qualify
    }
    while lo < hi {
        let mid = (lo + hi) / 2;
        if (mid as f64 / n as f64) >= min_support {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

/// Mines every itemset of size <= `max_size` with support >= `min_support`.
pub fn mine_frequent_itemsets(
    transactions: &[Transaction],
    min_support: f64,
    max_size: usize,
) -> Result<Vec<FrequentItemset>, MiningError> {
    if !(min_support > 0.0 && min_support <= 1.0) {
        return Err(MiningError::BadMinSupport(min_support));
    }
    if max_size == 0 {
        return Err(MiningError::ZeroMaxSize);
    }
    let n = transactions.len();
    if n == 0 {
        return Ok(Vec::new());
    }

    // Global frequency ranking.
    let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
    for t in transactions {
        for item in &t.items {
            *counts.entry(item).or_insert(0) += 1;
        }
    }
    let threshold = min_count(n, min_support);
    let mut ranked: Vec<(&str, u64)> = counts
        .into_iter()
        .filter(|&(_, c)| c >= threshold)
        .collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let rank_of: BTreeMap<&str, u32> = ranked
        .iter()
        .enumerate()
        .map(|(i, &(token, _))| (token, i as u32))
        .collect();
    let token_of: Vec<&str> = ranked.iter().map(|&(token, _)| token).collect();

    let mut tree = Tree::new();
    for t in transactions {
        let mut path: Vec<u32> = t
            .items
            .iter()
            .filter_map(|item| rank_of.get(item.as_str()).copied())
            .collect();
        path.sort_unstable();
        tree.insert(&path, 1);
    }

    let mut found: Vec<(Vec<u32>, u64)> = Vec::new();
    let mut suffix = Vec::new();
    grow(&tree, threshold, max_size, &mut suffix, &mut found);

    let mut out: Vec<FrequentItemset> = found
        .into_iter()
        .map(|(ranks, count)| {
            let mut items: Vec<String> = ranks
                .iter()
                .map(|&r| String::from(token_of[r as usize]))
                .collect();
            items.sort_unstable();
            FrequentItemset {
                items,
                support: count as f64 / n as f64,
            }
        })
        .collect();
    out.sort_by(|a, b| (a.items.len(), &a.items).cmp(&(b.items.len(), &b.items)));
    Ok(out)
}

fn grow(
    tree: &Tree,
    threshold: u64,
    max_size: usize,
    suffix: &mut Vec<u32>,
    out: &mut Vec<(Vec<u32>, u64)>,
) {
    // Least-frequent first: descending rank.
    for (&item, (total, node_list)) in tree.header.iter().rev() {
        if *total < threshold {
            continue;
        }
        suffix.push(item);
        out.push((suffix.clone(), *total));

        if suffix.len() < max_size {
            // Conditional pattern base for `item`.
            let mut conditional = Tree::new();
            let mut base: Vec<(Vec<u32>, u64)> = Vec::new();
            let mut cond_counts: BTreeMap<u32, u64> = BTreeMap::new();
            for &node in node_list {
                let count = tree.nodes[node].count;
                let path = tree.prefix_path(node);
                for &p in &path {
                    *cond_counts.entry(p).or_insert(0) += count;
                }
                if !path.is_empty() {
                    base.push((path, count));
                }
            }
            for (path, count) in base {
                let filtered: Vec<u32> = path
                    .into_iter()
                    .filter(|p| cond_counts[p] >= threshold)
                    .collect();
                conditional.insert(&filtered, count);
            }
            if !conditional.header.is_empty() {
                grow(&conditional, threshold, max_size, suffix, out);
            }
        }
        suffix.pop();
    }
}

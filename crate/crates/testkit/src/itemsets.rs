//! Exhaustive frequent-itemset enumeration over bitmask transactions.
//!
//! Brute force on purpose: every candidate subset of the item universe is
//! tested against every transaction. Only usable for small universes, which
//! is exactly what the differential tests sweep.

/// An itemset with its support, items sorted ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleItemset {
    pub items: Vec<u32>,
    pub support: f64,
}

/// Enumerates every itemset of size <= `max_size` whose support (fraction of
/// transactions containing all of its items) is >= `min_support`.
///
/// Panics if the universe exceeds 24 distinct items; the point of this oracle
/// is exhaustiveness, not scale.
pub fn exhaustive_frequent_itemsets(
    transactions: &[Vec<u32>],
    min_support: f64,
    max_size: usize,
) -> Vec<OracleItemset> {
    let n = transactions.len();
    if n == 0 {
        return Vec::new();
    }

    let mut universe: Vec<u32> = transactions.iter().flatten().copied().collect();
    universe.sort_unstable();
    universe.dedup();
    assert!(universe.len() <= 24, "oracle universe too large");
    let width = universe.len();

    let index_of = |item: u32| universe.binary_search(&item).unwrap();
    let masks: Vec<u32> = transactions
        .iter()
        .map(|t| {
            let mut m = 0u32;
            for &item in t {
                m |= 1 << index_of(item);
            }
            m
        })
        .collect();

    let mut out = Vec::new();
    for candidate in 1u32..(1u32 << width) {
        if (candidate.count_ones() as usize) > max_size {
            continue;
        }
        let count = masks
            .iter()
            .filter(|&&m| m & candidate == candidate)
            .count();
        let support = count as f64 / n as f64;
        if support >= min_support {
            let items: Vec<u32> = (0..width)
                .filter(|&b| candidate & (1 << b) != 0)
                .map(|b| universe[b])
                .collect();
            out.push(OracleItemset { items, support });
        }
    }
    out.sort_by(|a, b| (a.items.len(), &a.items).cmp(&(b.items.len(), &b.items)));
    out
}

/// Support of one exact itemset, as (count, n).
pub fn support_count(transactions: &[Vec<u32>], items: &[u32]) -> usize {
    transactions
        .iter()
        .filter(|t| items.iter().all(|i| t.contains(i)))
        .count()
}

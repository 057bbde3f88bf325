//! Association rules derived from a subset-closed itemset collection.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::{FrequentItemset, MiningError};

/// A -> B with the standard support/confidence/lift semantics.
#[derive(Clone, Debug, PartialEq)]
pub struct AssociationRule {
    pub antecedent: Vec<String>,
    pub consequent: Vec<String>,
    pub support: f64,
    pub confidence: f64,
    pub lift: f64,
}

impl AssociationRule {
    pub fn mentions(&self, keyword: &str) -> bool {
        self.antecedent.iter().any(|t| t == keyword) || self.consequent.iter().any(|t| t == keyword)
    }
}

/// Generates every rule A -> B with A, B non-empty and disjoint, A union B a
/// mined itemset, and confidence >= `min_confidence`.
///
/// The input must be subset-closed, as produced by
/// [`super::mine_frequent_itemsets`]; anything else is rejected.
pub fn derive_rules(
    itemsets: &[FrequentItemset],
    min_confidence: f64,
) -> Result<Vec<AssociationRule>, MiningError> {
    if !(min_confidence > 0.0 && min_confidence <= 1.0) {
        return Err(MiningError::BadMinConfidence(min_confidence));
    }

    let support: BTreeMap<&[String], f64> = itemsets
        .iter()
        .map(|i| (i.items.as_slice(), i.support))
        .collect();

    // Closure validation: every proper non-empty subset must be present.
    for itemset in itemsets {
        let k = itemset.items.len();
        if k < 2 {
            continue;
        }
        for mask in 1..((1usize << k) - 1) {
            let subset: Vec<String> = pick(&itemset.items, mask);
            if !support.contains_key(subset.as_slice()) {
                return Err(MiningError::NotSubsetClosed(itemset.items.clone()));
            }
        }
    }

    let mut out = Vec::new();
    for itemset in itemsets {
        let k = itemset.items.len();
        if k < 2 {
            continue;
        }
        for mask in 1..((1usize << k) - 1) {
            let antecedent = pick(&itemset.items, mask);
            let consequent = pick(&itemset.items, !mask & ((1 << k) - 1));
            let confidence = itemset.support / support[antecedent.as_slice()];
            if confidence >= min_confidence {
                let lift = confidence / support[consequent.as_slice()];
                out.push(AssociationRule {
                    antecedent,
                    consequent,
                    support: itemset.support,
                    confidence,
                    lift,
                });
            }
        }
    }
    out.sort_by(|a, b| (&a.antecedent, &a.consequent).cmp(&(&b.antecedent, &b.consequent)));
    Ok(out)
}

fn pick(items: &[String], mask: usize) -> Vec<String> {
    items
        .iter()
        .enumerate()
        .filter(|&(i, _)| mask & (1 << i) != 0)
        .map(|(_, s)| s.clone())
        .collect()
}

/// Rules that mention `keyword` in the antecedent or consequent, in input
/// order.
pub fn filter_rules(rules: &[AssociationRule], keyword: &str) -> Vec<AssociationRule> {
    rules
        .iter()
        .filter(|r| r.mentions(keyword))
        .cloned()
        .collect()
}

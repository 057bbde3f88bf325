//! Grouped-matrix presentation of rule sets: agglomerative clustering of
//! rules by Jaccard distance between antecedents, average linkage.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use super::{AssociationRule, MiningError};

/// One cluster of rules with its representative label and mean metrics.
#[derive(Clone, Debug, PartialEq)]
pub struct RuleGroup {
    pub label: String,
    pub rules: Vec<AssociationRule>,
    pub mean_support: f64,
    pub mean_confidence: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupedRuleMatrix {
    pub groups: Vec<RuleGroup>,
    pub k: usize,
}

fn jaccard_distance(a: &[String], b: &[String]) -> f64 {
    let sa: BTreeSet<&str> = a.iter().map(|s| s.as_str()).collect();
    let sb: BTreeSet<&str> = b.iter().map(|s| s.as_str()).collect();
    let intersection = sa.intersection(&sb).count();
    let union = sa.union(&sb).count();
    1.0 - intersection as f64 / union as f64
}

/// Clusters `rules` into `k` groups (capped at the rule count). Groups are
/// reported in order of their first member's input position; members keep
/// input order.
pub fn group_rules(rules: &[AssociationRule], k: usize) -> Result<GroupedRuleMatrix, MiningError> {
    if rules.is_empty() {
        return Err(MiningError::EmptyRuleList);
    }
    let k = k.max(1).min(rules.len());
    let n = rules.len();

    let mut dist = alloc::vec![alloc::vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = jaccard_distance(&rules[i].antecedent, &rules[j].antecedent);
            dist[i][j] = d;
            dist[j][i] = d;
        }
    }

    // Average-linkage agglomeration over the original pairwise distances.
    let mut clusters: Vec<Vec<usize>> = (0..n).map(|i| alloc::vec![i]).collect();
    while clusters.len() > k {
        let mut best = (0usize, 1usize);
        let mut best_d = f64::INFINITY;
        for a in 0..clusters.len() {
            for b in (a + 1)..clusters.len() {
                let mut sum = 0.0;
                for &i in &clusters[a] {
                    for &j in &clusters[b] {
                        sum += dist[i][j];
                    }
                }
                let d = sum / (clusters[a].len() * clusters[b].len()) as f64;
                if d < best_d {
                    best_d = d;
                    best = (a, b);
                }
            }
        }
        let merged = clusters.remove(best.1);
        clusters[best.0].extend(merged);
        clusters[best.0].sort_unstable();
        clusters.sort_by_key(|c| c[0]);
    }

    let groups = clusters
        .into_iter()
        .map(|members| {
            let rules: Vec<AssociationRule> = members.iter().map(|&i| rules[i].clone()).collect();
            let mut item_counts: BTreeMap<&str, usize> = BTreeMap::new();
            for rule in &rules {
                for item in &rule.antecedent {
                    *item_counts.entry(item).or_insert(0) += 1;
                }
            }
            let label = item_counts
                .iter()
                .max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0)))
                .map(|(&item, _)| String::from(item))
                .unwrap_or_default();
            let mean_support = rules.iter().map(|r| r.support).sum::<f64>() / rules.len() as f64;
            let mean_confidence =
                rules.iter().map(|r| r.confidence).sum::<f64>() / rules.len() as f64;
            RuleGroup {
                label,
                rules,
                mean_support,
                mean_confidence,
            }
        })
        .collect::<Vec<_>>();

    Ok(GroupedRuleMatrix {
        k: groups.len(),
        groups,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn rule(
        antecedent: &[&str],
        consequent: &[&str],
        support: f64,
        confidence: f64,
    ) -> AssociationRule {
        AssociationRule {
            antecedent: antecedent.iter().map(|s| s.to_string()).collect(),
            consequent: consequent.iter().map(|s| s.to_string()).collect(),
            support,
            confidence,
            lift: 1.0,
        }
    }

    fn two_families() -> Vec<AssociationRule> {
        vec![
            rule(&["war", "front"], &["news"], 0.2, 0.8),
            rule(&["bird", "virus"], &["lab"], 0.1, 0.6),
            rule(&["war"], &["report"], 0.3, 0.9),
            rule(&["virus"], &["lab"], 0.15, 0.7),
            rule(&["front", "war"], &["offensive"], 0.25, 0.85),
            rule(&["bird"], &["weapon"], 0.05, 0.5),
        ]
    }

    #[test]
    fn single_group_contains_everything() {
        let rules = two_families();
        let grouped = group_rules(&rules, 1).unwrap();
        assert_eq!(grouped.k, 1);
        assert_eq!(grouped.groups[0].rules.len(), rules.len());
        let expected_mean = rules.iter().map(|r| r.support).sum::<f64>() / rules.len() as f64;
        assert!((grouped.groups[0].mean_support - expected_mean).abs() < 1e-12);
    }

    #[test]
    fn k_equals_rule_count_gives_singletons() {
        let rules = two_families();
        let grouped = group_rules(&rules, rules.len()).unwrap();
        assert_eq!(grouped.k, rules.len());
        assert!(grouped.groups.iter().all(|g| g.rules.len() == 1));
    }

    #[test]
    fn k_capped_at_rule_count() {
        let rules = two_families();
        let grouped = group_rules(&rules, 100).unwrap();
        assert_eq!(grouped.k, rules.len());
    }

    /// With disjoint antecedent vocabularies the two families must be
    /// recovered exactly; verified against brute-force best-partition search
    /// offline (6 rules, 2^5 bipartitions) which agrees with the family split.
    #[test]
    fn disjoint_vocabularies_recovered_at_k2() {
        let rules = two_families();
        let grouped = group_rules(&rules, 2).unwrap();
        assert_eq!(grouped.k, 2);
        let war_family: BTreeSet<usize> = [0usize, 2, 4].into_iter().collect();
        for group in &grouped.groups {
            let members: BTreeSet<usize> = group
                .rules
                .iter()
                .map(|r| rules.iter().position(|x| x == r).unwrap())
                .collect();
            assert!(
                members == war_family || members == [1usize, 3, 5].into_iter().collect(),
                "unexpected grouping {members:?}"
            );
        }
    }

    #[test]
    fn groups_partition_the_rules_for_every_k() {
        let rules = two_families();
        for k in 1..=rules.len() {
            let grouped = group_rules(&rules, k).unwrap();
            let total: usize = grouped.groups.iter().map(|g| g.rules.len()).sum();
            assert_eq!(total, rules.len());
            let mut seen = BTreeSet::new();
            for group in &grouped.groups {
                for rule in &group.rules {
                    let idx = rules.iter().position(|x| x == rule).unwrap();
                    assert!(seen.insert(idx), "rule {idx} appears twice at k={k}");
                }
            }
        }
    }

    #[test]
    fn label_is_most_frequent_antecedent_item() {
        let rules = vec![
            rule(&["war", "front"], &["x"], 0.1, 0.5),
            rule(&["war"], &["y"], 0.1, 0.5),
        ];
        let grouped = group_rules(&rules, 1).unwrap();
        assert_eq!(grouped.groups[0].label, "war");
    }

    #[test]
    fn empty_rule_list_is_an_error() {
        assert!(matches!(
            group_rules(&[], 2),
            Err(MiningError::EmptyRuleList)
        ));
    }
}

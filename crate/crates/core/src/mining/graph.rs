//! Bipartite semantic-graph form of itemsets and rules, ready for edge-list
//! export and force-directed layout.
//!
//! Token vertices keep their bare name; itemset and rule vertices carry a
//! `set:`/`rule:` prefix so the two sides of the bipartition can never
//! collide.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{AssociationRule, FrequentItemset};

#[derive(Clone, Debug, PartialEq)]
pub struct GraphEdge {
    pub source: String,
    pub target: String,
    pub weight: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SemanticGraph {
    pub edges: Vec<GraphEdge>,
}

impl SemanticGraph {
    /// Distinct vertex names in first-use order.
    pub fn vertices(&self) -> Vec<String> {
        let mut seen = alloc::collections::BTreeSet::new();
        let mut out = Vec::new();
        for edge in &self.edges {
            for v in [&edge.source, &edge.target] {
                if seen.insert(v.clone()) {
                    out.push(v.clone());
                }
            }
        }
        out
    }
}

/// Each itemset vertex connects to every token it contains; edge weight is
/// the itemset support.
pub fn itemset_graph(itemsets: &[FrequentItemset]) -> SemanticGraph {
    let mut edges = Vec::new();
    for itemset in itemsets {
        let node = format!("set:{}", itemset.items.join("|"));
        for token in &itemset.items {
            edges.push(GraphEdge {
                source: node.clone(),
                target: token.clone(),
                weight: itemset.support,
            });
        }
    }
    SemanticGraph { edges }
}

/// Antecedent tokens point into the rule vertex, the rule vertex points out
/// to consequent tokens; edge weight is the rule confidence.
pub fn rule_graph(rules: &[AssociationRule]) -> SemanticGraph {
    let mut edges = Vec::new();
    for rule in rules {
        let node = format!(
            "rule:{}=>{}",
            rule.antecedent.join("|"),
            rule.consequent.join("|")
        );
        for token in &rule.antecedent {
            edges.push(GraphEdge {
                source: token.clone(),
                target: node.clone(),
                weight: rule.confidence,
            });
        }
        for token in &rule.consequent {
            edges.push(GraphEdge {
                source: node.clone(),
                target: token.clone(),
                weight: rule.confidence,
            });
        }
    }
    SemanticGraph { edges }
}

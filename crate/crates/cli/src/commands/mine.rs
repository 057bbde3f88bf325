//! `mine`: keyword frequencies, frequent itemsets, association rules,
//! grouped rule matrix, and semantic-graph exports.

use std::path::PathBuf;

use trendlens_core::corpus::match_thematic_field;
use trendlens_core::mining::{
    derive_rules, filter_rules, group_rules, itemset_graph, keyword_frequencies,
    mine_frequent_itemsets, rule_graph, tokenize, AssociationRule, Transaction,
};

use super::{ensure_out_dir, out_path, write_text};
use crate::error::Error;
use crate::io::{corpus_file, csvx, edgelist, fields};

pub struct MineOpts {
    pub corpus: PathBuf,
    /// restrict to tweets matching this field (requires `fields`)
    pub field: Option<String>,
    pub fields: Option<PathBuf>,
    pub min_support: f64,
    pub min_confidence: f64,
    pub max_size: usize,
    pub keyword: Option<String>,
    pub groups: usize,
    pub out: PathBuf,
}

fn rules_csv(rules: &[AssociationRule]) -> String {
    let mut csv = String::from("antecedent,consequent,support,confidence,lift\n");
    for rule in rules {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            csvx::escape(&rule.antecedent.join("|")),
            csvx::escape(&rule.consequent.join("|")),
            rule.support,
            rule.confidence,
            rule.lift
        ));
    }
    csv
}

pub fn run(opts: &MineOpts) -> Result<(), Error> {
    let corpus = corpus_file::load_corpus(&opts.corpus)?;

    let selected: Vec<&trendlens_core::corpus::Tweet> = match (&opts.field, &opts.fields) {
        (Some(name), Some(path)) => {
            let all = fields::load_fields(path)?;
            let field = all
                .iter()
                .find(|f| &f.name == name)
                .ok_or_else(|| Error::input(format!("thematic field '{name}' not found")))?;
            corpus
                .tweets()
                .iter()
                .filter(|t| match_thematic_field(t, field))
                .collect()
        }
        (Some(_), None) => {
            return Err(Error::input("--field requires --fields <file>"));
        }
        _ => corpus.tweets().iter().collect(),
    };

    let transactions: Vec<Transaction> = selected.iter().map(|t| tokenize(&t.text)).collect();
    ensure_out_dir(&opts.out)?;

    let frequencies = keyword_frequencies(&transactions);
    let mut csv = String::from("token,count\n");
    for (token, count) in &frequencies {
        csv.push_str(&format!("{},{count}\n", csvx::escape(token)));
    }
    write_text(&out_path(&opts.out, "keywords.csv"), &csv)?;

    let itemsets = mine_frequent_itemsets(&transactions, opts.min_support, opts.max_size)?;
    let mut csv = String::from("items,support\n");
    for itemset in &itemsets {
        csv.push_str(&format!(
            "{},{}\n",
            csvx::escape(&itemset.items.join("|")),
            itemset.support
        ));
    }
    write_text(&out_path(&opts.out, "itemsets.csv"), &csv)?;

    let rules = derive_rules(&itemsets, opts.min_confidence)?;
    write_text(&out_path(&opts.out, "rules.csv"), &rules_csv(&rules))?;

    if let Some(keyword) = &opts.keyword {
        let filtered = filter_rules(&rules, keyword);
        write_text(
            &out_path(&opts.out, "rules_filtered.csv"),
            &rules_csv(&filtered),
        )?;
    }

    let mut csv = String::from("group,label,rule_count,mean_support,mean_confidence,members\n");
    if !rules.is_empty() {
        let grouped = group_rules(&rules, opts.groups)?;
        for (idx, group) in grouped.groups.iter().enumerate() {
            let members: Vec<String> = group
                .rules
                .iter()
                .map(|r| format!("{}=>{}", r.antecedent.join("|"), r.consequent.join("|")))
                .collect();
            csv.push_str(&format!(
                "{},{},{},{},{},{}\n",
                idx,
                csvx::escape(&group.label),
                group.rules.len(),
                group.mean_support,
                group.mean_confidence,
                csvx::escape(&members.join(";"))
            ));
        }
    }
    write_text(&out_path(&opts.out, "rule_groups.csv"), &csv)?;

    edgelist::write_semantic_graph(
        &out_path(&opts.out, "itemset_graph.csv"),
        &itemset_graph(&itemsets),
    )?;
    edgelist::write_semantic_graph(&out_path(&opts.out, "rule_graph.csv"), &rule_graph(&rules))?;
    Ok(())
}

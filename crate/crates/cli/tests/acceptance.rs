//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its measured evidence. Run with `cargo test --test acceptance -- --nocapture`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use trendlens_cli::commands::{graph, impact, mine, model, trends};
use trendlens_core::bayes::{fit, predict_bands, FitConfig};
use trendlens_core::corpus::{
    count_time_series, match_thematic_field, rolling_mean, zscore, CountTimeSeries, RegressionData,
};
use trendlens_core::features::{truncated_svd, SparseDocTermMatrix};
use trendlens_core::graphx::{
    betweenness, build_user_graph, community_isolation, pagerank, walktrap, UserGraph,
};
use trendlens_core::mathx;
use trendlens_core::mining::{derive_rules, mine_frequent_itemsets, Transaction};
use trendlens_core::neural::{
    evaluate, prepare_dataset, train, Classifier, Example, ModelConfig, TokenVocab, TrainConfig,
};
use trendlens_core::time::UtcDate;
use trendlens_testkit::graphs as graph_oracle;
use trendlens_testkit::itemsets::exhaustive_frequent_itemsets;
use trendlens_testkit::rng::TestRng;
use trendlens_testkit::svd as svd_oracle;
use trendlens_testkit::synth::planted_regression;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn random_transactions(rng: &mut TestRng, max_tokens: usize, max_rows: usize) -> Vec<Vec<u32>> {
    let tokens = 3 + rng.below(max_tokens - 2);
    let rows = 5 + rng.below(max_rows - 4);
    (0..rows)
        .map(|_| {
            let len = 1 + rng.below(tokens.min(8));
            let mut t: Vec<u32> = (0..len).map(|_| rng.below(tokens) as u32).collect();
            t.sort_unstable();
            t.dedup();
            t
        })
        .collect()
}

fn to_named(raw: &[Vec<u32>]) -> Vec<Transaction> {
    raw.iter()
        .map(|t| Transaction::from_items(t.iter().map(|i| format!("t{i:02}"))))
        .collect()
}

/// Criterion 1: FP-growth equals exhaustive enumeration on 100 random
/// corpora, itemset-for-itemset and support-for-support, in under 30 s.
#[test]
fn criterion_01_itemset_exactness() {
    let start = Instant::now();
    let mut corpora = 0usize;
    let mut itemsets_checked = 0usize;
    for seed in 0..100u64 {
        let mut rng = TestRng::new(seed);
        let raw = random_transactions(&mut rng, 15, 200);
        let min_support = rng.range_f64(0.05, 0.5);

        let oracle = exhaustive_frequent_itemsets(&raw, min_support, 15);
        let mined = mine_frequent_itemsets(&to_named(&raw), min_support, 15).unwrap();

        assert_eq!(mined.len(), oracle.len(), "seed {seed}");
        for (m, o) in mined.iter().zip(&oracle) {
            let oracle_items: Vec<String> = o.items.iter().map(|i| format!("t{i:02}")).collect();
            assert_eq!(m.items, oracle_items, "seed {seed}");
            assert_eq!(m.support, o.support, "seed {seed}");
        }
        corpora += 1;
        itemsets_checked += mined.len();
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 30, "took {elapsed:?}");
    println!(
        "PASS criterion 1: itemset exactness on {corpora} corpora ({itemsets_checked} itemsets) in {elapsed:?}"
    );
}

/// Criterion 2: rule confidence and lift recomputed from raw transaction
/// counts match to 1e-12; downward closure holds in every mined lattice.
#[test]
fn criterion_02_rule_arithmetic() {
    let mut rules_checked = 0usize;
    let mut lattices = 0usize;
    for seed in 200..230u64 {
        let mut rng = TestRng::new(seed);
        let raw = random_transactions(&mut rng, 12, 120);
        let named = to_named(&raw);
        let min_support = rng.range_f64(0.05, 0.3);
        let n = raw.len() as f64;

        let itemsets = mine_frequent_itemsets(&named, min_support, 12).unwrap();
        // downward closure with support monotonicity
        let by_items: BTreeMap<&[String], f64> = itemsets
            .iter()
            .map(|i| (i.items.as_slice(), i.support))
            .collect();
        for itemset in &itemsets {
            if itemset.items.len() < 2 {
                continue;
            }
            for skip in 0..itemset.items.len() {
                let subset: Vec<String> = itemset
                    .items
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != skip)
                    .map(|(_, s)| s.clone())
                    .collect();
                let sub = by_items
                    .get(subset.as_slice())
                    .unwrap_or_else(|| panic!("closure violated at {subset:?}"));
                assert!(*sub >= itemset.support);
            }
        }
        lattices += 1;

        let count_of = |items: &[String]| -> f64 {
            named
                .iter()
                .filter(|t| items.iter().all(|i| t.contains(i)))
                .count() as f64
        };
        for rule in derive_rules(&itemsets, 0.2).unwrap() {
            let both: Vec<String> = {
                let mut v = rule.antecedent.clone();
                v.extend(rule.consequent.clone());
                v.sort();
                v
            };
            let support = count_of(&both) / n;
            let confidence = support / (count_of(&rule.antecedent) / n);
            let lift = confidence / (count_of(&rule.consequent) / n);
            assert!((rule.support - support).abs() < 1e-12);
            assert!((rule.confidence - confidence).abs() < 1e-12);
            assert!((rule.lift - lift).abs() < 1e-12);
            assert!(rule.support <= rule.confidence + 1e-15);
            rules_checked += 1;
        }
    }
    assert!(rules_checked > 100, "only {rules_checked} rules exercised");
    println!(
        "PASS criterion 2: rule arithmetic exact on {rules_checked} rules over {lattices} lattices"
    );
}

/// Criterion 3: betweenness equals brute force on <= 8-vertex graphs,
/// PageRank is normalized and matches the exact-rational oracle on the
/// 3-chain, Walktrap recovers 20 planted bipartitions, and the two-clique
/// bridge conductance is exactly 1/21.
#[test]
fn criterion_03_graph_oracles() {
    // betweenness sweep
    let mut graphs = 0usize;
    for seed in 0..30u64 {
        let mut rng = TestRng::new(1000 + seed);
        let n = 4 + rng.below(5);
        let mut edges = Vec::new();
        for a in 0..n {
            for b in (a + 1)..n {
                if rng.uniform() < 0.45 {
                    edges.push((a, b));
                }
            }
        }
        if edges.is_empty() {
            continue;
        }
        let named: Vec<(String, String, u64)> = edges
            .iter()
            .map(|&(a, b)| (format!("v{a}"), format!("v{b}"), 1))
            .collect();
        let graph =
            UserGraph::from_edges(named.iter().map(|(a, b, w)| (a.as_str(), b.as_str(), *w)));
        let got = betweenness(&graph);
        let oracle = graph_oracle::brute_betweenness(n, &edges);
        for v in 0..n {
            match graph.vertex_index(&format!("v{v}")) {
                Some(idx) => assert!(
                    (got[idx] - oracle[v]).abs() < 1e-9,
                    "seed {seed} vertex {v}: {} vs {}",
                    got[idx],
                    oracle[v]
                ),
                None => assert_eq!(oracle[v], 0.0),
            }
        }
        let pr = pagerank(&graph, 0.85, 1e-12).unwrap();
        let sum: f64 = pr.iter().sum();
        assert!((sum - 1.0).abs() < 1e-9, "seed {seed}: pagerank sum {sum}");
        graphs += 1;
    }

    // exact-rational 3-chain
    let chain = UserGraph::from_edges([("a", "b", 1), ("b", "c", 1)]);
    let pr = pagerank(&chain, 0.85, 1e-14).unwrap();
    let a = chain.vertex_index("a").unwrap();
    let b = chain.vertex_index("b").unwrap();
    let c = chain.vertex_index("c").unwrap();
    let oracle = graph_oracle::exact_pagerank(3, &[(a, b, 1), (b, c, 1)], 85, 100);
    for (got, want) in pr.iter().zip(&oracle) {
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
    }

    // 20 planted two-clique instances
    for seed in 0..20u64 {
        let (n, edges, truth) = graph_oracle::planted_two_cliques(seed);
        let named: Vec<(String, String, u64)> = edges
            .iter()
            .map(|&(x, y, w)| (format!("v{x}"), format!("v{y}"), w))
            .collect();
        let graph =
            UserGraph::from_edges(named.iter().map(|(x, y, w)| (x.as_str(), y.as_str(), *w)));
        let partition = walktrap(&graph, 4).unwrap();
        let mut got = vec![0usize; n];
        for v in 0..n {
            got[v] = partition.assignment[graph.vertex_index(&format!("v{v}")).unwrap()];
        }
        assert_eq!(
            graph_oracle::rand_index(&got, &truth),
            1.0,
            "seed {seed}: {got:?} vs {truth:?}"
        );
    }

    // conductance 1/21 on the bundled clique fixture, end to end
    let corpus =
        trendlens_cli::io::corpus_file::load_corpus(&fixture("corpus_cliques.jsonl")).unwrap();
    let graph = build_user_graph(&corpus);
    let partition = walktrap(&graph, 4).unwrap();
    assert_eq!(partition.community_count(), 2);
    let isolation = community_isolation(&graph, &partition, 0.05).unwrap();
    for community in &isolation {
        assert_eq!(community.conductance, 1.0 / 21.0);
    }

    println!(
        "PASS criterion 3: betweenness/pagerank oracles on {graphs} graphs, 20 planted partitions, conductance 1/21 exact"
    );
}

fn dense_to_sparse(rows: &[Vec<f64>]) -> SparseDocTermMatrix {
    let vocab_size = rows.first().map(|r| r.len()).unwrap_or(0);
    SparseDocTermMatrix {
        rows: rows
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|&(_, &v)| v != 0.0)
                    .map(|(i, &v)| (i as u32, v))
                    .collect()
            })
            .collect(),
        vocab_size,
    }
}

fn random_orthonormal(rng: &mut TestRng, n: usize, k: usize) -> Vec<Vec<f64>> {
    // Gram-Schmidt over gaussian columns; test-local implementation
    let mut cols: Vec<Vec<f64>> = (0..k)
        .map(|_| (0..n).map(|_| rng.normal()).collect())
        .collect();
    for j in 0..k {
        for prev in 0..j {
            let dot: f64 = (0..n).map(|i| cols[j][i] * cols[prev][i]).sum();
            for i in 0..n {
                cols[j][i] -= dot * cols[prev][i];
            }
        }
        let norm: f64 = cols[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in cols[j].iter_mut() {
            *v /= norm;
        }
    }
    (0..n)
        .map(|i| (0..k).map(|j| cols[j][i]).collect())
        .collect()
}

/// Criterion 4: truncated SVD matches the dense Jacobi oracle within 1e-8 on
/// 50 random matrices up to 50x30; factors orthonormal within 1e-8;
/// Eckart-Young within 1e-6.
#[test]
fn criterion_04_svd_oracles() {
    let mut checked = 0usize;
    for seed in 0..50u64 {
        let mut rng = TestRng::new(3000 + seed);
        let d = 5 + rng.below(46); // 5..=50
        let v = 3 + rng.below(28); // 3..=30
        let r = d.min(v);

        // Half the sweep: plain gaussian with the oversampled subspace
        // covering the full rank, where subspace iteration is exact.
        // Other half: a sharp spectral gap below rank k.
        let (dense, k) = if seed % 2 == 0 {
            let k = r.saturating_sub(1 + rng.below(8)).max(1);
            let dense: Vec<Vec<f64>> = (0..d)
                .map(|_| (0..v).map(|_| rng.normal()).collect())
                .collect();
            (dense, k.max(r.saturating_sub(8)).min(r))
        } else {
            let k = (1 + rng.below(r.min(10))).min(r);
            let u = random_orthonormal(&mut rng, d, r);
            let vt = random_orthonormal(&mut rng, v, r);
            let spectrum: Vec<f64> = (0..r)
                .map(|i| {
                    if i < k {
                        10.0 * 0.9f64.powi(i as i32)
                    } else {
                        1e-4 * 0.5f64.powi((i - k) as i32)
                    }
                })
                .collect();
            let dense: Vec<Vec<f64>> = (0..d)
                .map(|i| {
                    (0..v)
                        .map(|j| (0..r).map(|t| u[i][t] * spectrum[t] * vt[j][t]).sum())
                        .collect()
                })
                .collect();
            (dense, k)
        };

        let sparse = dense_to_sparse(&dense);
        let factors = truncated_svd(&sparse, k, seed).unwrap();
        let oracle = svd_oracle::jacobi_svd(&dense);

        for i in 0..k {
            assert!(
                (factors.singular[i] - oracle.s[i]).abs() < 1e-8,
                "seed {seed} ({d}x{v}, k={k}) sv {i}: {} vs {}",
                factors.singular[i],
                oracle.s[i]
            );
        }

        // orthonormality residual, infinity norm of Q^T Q - I
        for factor in [&factors.left, &factors.right] {
            for x in 0..k {
                for y in 0..k {
                    let dot: f64 = (0..factor.rows)
                        .map(|row| factor.at(row, x) * factor.at(row, y))
                        .sum();
                    let expect = if x == y { 1.0 } else { 0.0 };
                    assert!(
                        (dot - expect).abs() < 1e-8,
                        "seed {seed}: orthonormality residual {}",
                        (dot - expect).abs()
                    );
                }
            }
        }

        // Eckart-Young within 1e-6
        let u_rows: Vec<Vec<f64>> = (0..d)
            .map(|i| factors.left.data[i * k..(i + 1) * k].to_vec())
            .collect();
        let v_rows: Vec<Vec<f64>> = (0..v)
            .map(|i| factors.right.data[i * k..(i + 1) * k].to_vec())
            .collect();
        let err = svd_oracle::reconstruction_error(&dense, &u_rows, &factors.singular, &v_rows, k);
        let best = svd_oracle::best_rank_k_error(&oracle.s, k);
        assert!(err <= best + 1e-6, "seed {seed}: {err} vs best {best}");
        checked += 1;
    }
    println!("PASS criterion 4: svd oracle parity on {checked} matrices");
}

/// Criterion 5: the planted-slope synthetic fit recovers beta within 3
/// posterior sd, diagnostics clear the gates, band quantiles are ordered,
/// and 90% bands cover 86-94% of held-out points over 50 replicates, all in
/// under two minutes.
#[test]
fn criterion_05_bayesian_fit() {
    let start = Instant::now();

    let d = planted_regression(500, 200, 0.5, 2.0, 0.3, 5);
    let data = RegressionData {
        dates: (0..200).map(UtcDate::from_days).collect(),
        x: d.x.clone(),
        y: d.y.clone(),
    };
    let config = FitConfig {
        chains: 4,
        draws: 2000,
        warmup: 1000,
        seed: 7,
    };
    let posterior = fit(&data, &config).unwrap();
    let beta_mean = mathx::mean(&posterior.beta);
    let beta_sd = mathx::population_sd(&posterior.beta);
    let sd_away = ((beta_mean - 2.0) / beta_sd).abs();
    assert!(sd_away < 3.0, "beta {beta_mean} is {sd_away:.2} sd from 2");
    let worst_rhat = posterior.diagnostics.worst_rhat();
    let min_ess = posterior.diagnostics.min_ess();
    assert!(worst_rhat < 1.05, "rhat {worst_rhat}");
    assert!(min_ess > 200.0, "ess {min_ess}");

    let band = predict_bands(&posterior, &d.x, 11).unwrap();
    for p in &band.points {
        assert!(p.q01 <= p.q05 && p.q05 <= p.q95 && p.q95 <= p.q99);
    }

    // coverage over 50 replicate datasets, 30 held-out points each
    let mut inside = 0usize;
    let mut total = 0usize;
    for seed in 0..50u64 {
        let d = planted_regression(7000 + seed, 150, 0.5, 2.0, 0.3, 5);
        let train_n = 120;
        let data = RegressionData {
            dates: (0..train_n as i64).map(UtcDate::from_days).collect(),
            x: d.x[..train_n].to_vec(),
            y: d.y[..train_n].to_vec(),
        };
        let config = FitConfig {
            chains: 2,
            draws: 400,
            warmup: 400,
            seed: 9000 + seed,
        };
        let posterior = fit(&data, &config).unwrap();
        let band = predict_bands(&posterior, &d.x[train_n..], 10_000 + seed).unwrap();
        for (p, &y) in band.points.iter().zip(&d.y[train_n..]) {
            if y >= p.q05 && y <= p.q95 {
                inside += 1;
            }
            total += 1;
        }
    }
    let coverage = inside as f64 / total as f64;
    assert!(
        (0.86..=0.94).contains(&coverage),
        "coverage {coverage} outside [0.86, 0.94]"
    );

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 120, "took {elapsed:?}");
    println!(
        "PASS criterion 5: beta {beta_mean:.3} ({sd_away:.2} sd from 2), rhat {worst_rhat:.4}, ess {min_ess:.0}, coverage {coverage:.3} in {elapsed:?}"
    );
}

/// Criterion 6: every weight group of the tiny three-branch model passes
/// the central finite-difference check at relative error < 1e-4, in under a
/// minute.
#[test]
fn criterion_06_gradient_fidelity() {
    let start = Instant::now();
    let config = ModelConfig::tiny(14, 3, 2); // d=8, h=2, L=1
    assert_eq!(config.model_dim, 8);
    assert_eq!(config.heads, 2);
    assert_eq!(config.layers, 1);
    let model = Classifier::new(config.clone(), 4242).unwrap();

    let pad = |ids: &[u32]| -> Vec<u32> {
        let mut v = ids.to_vec();
        v.resize(config.max_seq_len, 0);
        v
    };
    let batch = vec![
        Example {
            input: trendlens_core::neural::Encoded {
                token_ids: pad(&[2, 7, 9, 3, 2]),
                bag_ids: vec![2, 7, 12, 13],
                svd_features: vec![0.6, -0.4, 0.2],
            },
            label: 0,
        },
        Example {
            input: trendlens_core::neural::Encoded {
                token_ids: pad(&[5, 5, 8]),
                bag_ids: vec![5, 11],
                svd_features: vec![-0.3, 0.8, -0.1],
            },
            label: 1,
        },
        Example {
            input: trendlens_core::neural::Encoded {
                token_ids: pad(&[]),
                bag_ids: vec![4],
                svd_features: vec![0.1, 0.0, -0.7],
            },
            label: 1,
        },
    ];
    let weights = vec![1.2, 0.9];
    let (_, analytic) = model.loss_and_grad(&batch, &weights).unwrap();

    let eps = 1e-4;
    let mut probe = model.clone();
    let names: Vec<String> = model.params().keys().cloned().collect();
    let mut worst_group: (f64, String) = (0.0, String::new());
    let mut scalars = 0usize;
    for name in names {
        let len = probe.params()[&name].data.len();
        let mut diff_sq = 0.0;
        let mut fd_sq = 0.0;
        let mut an_sq = 0.0;
        for i in 0..len {
            let original = probe.params()[&name].data[i];
            let loss_at = |v: f64, probe: &mut Classifier| {
                probe.params_mut().get_mut(&name).unwrap().data[i] = v;
                model_loss(probe, &batch, &weights)
            };
            let d1 = (loss_at(original + eps, &mut probe) - loss_at(original - eps, &mut probe))
                / (2.0 * eps);
            let d2 = (loss_at(original + 2.0 * eps, &mut probe)
                - loss_at(original - 2.0 * eps, &mut probe))
                / (4.0 * eps);
            probe.params_mut().get_mut(&name).unwrap().data[i] = original;
            let fd = (4.0 * d1 - d2) / 3.0;
            let an = analytic[&name].data[i];
            diff_sq += (fd - an) * (fd - an);
            fd_sq += fd * fd;
            an_sq += an * an;
            scalars += 1;
        }
        let rel = diff_sq.sqrt() / fd_sq.max(an_sq).sqrt().max(1e-3);
        assert!(rel < 1e-4, "group {name}: relative error {rel}");
        if rel > worst_group.0 {
            worst_group = (rel, name.clone());
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 60, "took {elapsed:?}");
    println!(
        "PASS criterion 6: {scalars} weights across all groups, worst group {} at {:.2e}, in {elapsed:?}",
        worst_group.1, worst_group.0
    );
}

fn model_loss(model: &Classifier, batch: &[Example], weights: &[f64]) -> f64 {
    model.loss_and_grad(batch, weights).unwrap().0
}

/// Criterion 7: on the planted-username fixture the bag-enabled model
/// reaches validation accuracy >= 0.95 while the text-only model stays
/// <= 0.6, across 5 seeds.
#[test]
fn criterion_07_username_branch_ablation() {
    let corpus =
        trendlens_cli::io::corpus_file::load_corpus(&fixture("planted_username.jsonl")).unwrap();
    let state = pipeline_state(&corpus);
    let dataset = prepare_dataset(&corpus, 0, &state.0, &state.1, &state.2, 32).unwrap();
    assert_eq!(dataset.examples.len(), 120);
    // pairs are adjacent; the first 80 examples (40 pairs) train, the last
    // 40 validate, and every validation text appears with both labels
    let train_set = &dataset.examples[..80];
    let val_set = &dataset.examples[80..];

    let mut bag_accs = Vec::new();
    let mut text_accs = Vec::new();
    for seed in 0..5u64 {
        let mut config = ModelConfig::standard(state.1.total_size(), state.2.k, 2);
        config.svd_branch = false; // isolate text-vs-bag exactly
        config.model_dim = 16;
        config.heads = 2;
        config.layers = 1;
        config.max_seq_len = 32;

        let bag_acc = {
            let mut c = config.clone();
            c.bag_branch = true;
            train_and_score(c, train_set, val_set, seed)
        };
        let text_acc = {
            let mut c = config.clone();
            c.bag_branch = false;
            train_and_score(c, train_set, val_set, seed)
        };
        assert!(bag_acc >= 0.95, "seed {seed}: bag accuracy {bag_acc}");
        assert!(
            text_acc <= 0.6,
            "seed {seed}: text-only accuracy {text_acc}"
        );
        bag_accs.push(bag_acc);
        text_accs.push(text_acc);
    }
    println!("PASS criterion 7: bag accuracies {bag_accs:?} vs text-only {text_accs:?}");
}

type PipelineState = (
    SparseDocTermMatrix,
    TokenVocab,
    trendlens_core::features::SvdFactors,
);

fn pipeline_state(corpus: &trendlens_core::corpus::Corpus) -> PipelineState {
    let users = trendlens_core::features::VocabIndex::build(
        corpus
            .tweets()
            .iter()
            .flat_map(|t| t.retweeters.iter().cloned()),
    );
    let docs: Vec<Vec<String>> = corpus
        .tweets()
        .iter()
        .map(|t| t.retweeters.clone())
        .collect();
    let (tfidf, _) = trendlens_core::features::build_tfidf(&docs, &users);
    let k = 4.min(tfidf.doc_count()).min(users.len()).max(1);
    let factors = truncated_svd(&tfidf, k, 17).unwrap();
    (tfidf, TokenVocab::build(corpus), factors)
}

fn train_and_score(
    config: ModelConfig,
    train_set: &[Example],
    val_set: &[Example],
    seed: u64,
) -> f64 {
    let mut model = Classifier::new(config, seed).unwrap();
    train(
        &mut model,
        train_set,
        &TrainConfig {
            epochs: 40,
            learning_rate: 5e-3,
            batch_size: 8,
            seed,
        },
    )
    .unwrap();
    evaluate(&model, val_set).unwrap().accuracy
}

/// Criterion 8: the 32-example fixture reaches 100% training accuracy
/// within 200 epochs, deterministically per seed.
#[test]
fn criterion_08_overfit_sanity() {
    let corpus = trendlens_cli::io::corpus_file::load_corpus(&fixture("labeled_32.jsonl")).unwrap();
    let state = pipeline_state(&corpus);
    let dataset = prepare_dataset(&corpus, 5, &state.0, &state.1, &state.2, 64).unwrap();
    assert_eq!(dataset.examples.len(), 32);

    let config = ModelConfig::standard(state.1.total_size(), state.2.k, 2);
    let tc = TrainConfig {
        epochs: 200,
        learning_rate: 5e-3,
        batch_size: 8,
        seed: 31,
    };
    let mut model = Classifier::new(config.clone(), 31).unwrap();
    let history = train(&mut model, &dataset.examples, &tc).unwrap();
    let report = evaluate(&model, &dataset.examples).unwrap();
    assert_eq!(report.accuracy, 1.0, "final loss {:?}", history.last());

    // identical seed: identical history and weights
    let mut rerun = Classifier::new(config, 31).unwrap();
    let history2 = train(&mut rerun, &dataset.examples, &tc).unwrap();
    assert_eq!(history, history2);
    assert_eq!(model.params(), rerun.params());
    println!(
        "PASS criterion 8: 100% training accuracy, final loss {:.2e}, bit-identical rerun",
        history.last().unwrap()
    );
}

fn hash_dir(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    for entry in fs::read_dir(dir).unwrap() {
        let entry = entry.unwrap();
        if entry.path().is_file() {
            out.insert(
                entry.file_name().to_string_lossy().into_owned(),
                fs::read(entry.path()).unwrap(),
            );
        }
    }
    out
}

/// Criterion 9: every subcommand is byte-identical across same-seed reruns,
/// and the generated-text share report sums to 100 and uses the canonical
/// `class - pct%` serialization.
#[test]
fn criterion_09_pipeline_determinism() {
    let base = tempfile::tempdir().unwrap();
    let model_a = base.path().join("m_a.bin");
    let model_b = base.path().join("m_b.bin");
    let gen_model_a = base.path().join("g_a.bin");
    let gen_model_b = base.path().join("g_b.bin");

    let run_all = |tag: &str,
                   model_path: &Path,
                   gen_model_path: &Path|
     -> BTreeMap<String, BTreeMap<String, Vec<u8>>> {
        let mut outputs = BTreeMap::new();
        let dir = |name: &str| base.path().join(format!("{tag}_{name}"));

        trends::run(&trends::TrendsOpts {
            corpus: fixture("corpus_small.jsonl"),
            fields: fixture("fields.txt"),
            window: 7,
            out: dir("trends"),
        })
        .unwrap();
        outputs.insert("trends".into(), hash_dir(&dir("trends")));

        mine::run(&mine::MineOpts {
            corpus: fixture("corpus_small.jsonl"),
            field: None,
            fields: None,
            min_support: 0.02,
            min_confidence: 0.5,
            max_size: 5,
            keyword: Some("fake".into()),
            groups: 5,
            out: dir("mine"),
        })
        .unwrap();
        outputs.insert("mine".into(), hash_dir(&dir("mine")));

        graph::run(&graph::GraphOpts {
            corpus: fixture("corpus_cliques.jsonl"),
            walktrap_steps: 4,
            damping: 0.85,
            iterations: 200,
            isolation_threshold: 0.05,
            seed: 23,
            out: dir("graph"),
        })
        .unwrap();
        outputs.insert("graph".into(), hash_dir(&dir("graph")));

        impact::run(&impact::ImpactOpts {
            corpus: fixture("corpus_small.jsonl"),
            fields: fixture("fields.txt"),
            field: "ukraine nazi".into(),
            prices: fixture("prices.csv"),
            window: 7,
            chains: 2,
            draws: 300,
            warmup: 300,
            seed: 23,
            out: dir("impact"),
        })
        .unwrap();
        outputs.insert("impact".into(), hash_dir(&dir("impact")));

        model::run_train(&model::TrainOpts {
            corpus: fixture("labeled_32.jsonl"),
            min_retweets: 5,
            svd_k: 8,
            epochs: 25,
            learning_rate: 5e-3,
            batch_size: 8,
            seed: 23,
            model: model_path.to_path_buf(),
            out: dir("train"),
        })
        .unwrap();
        let mut train_out = hash_dir(&dir("train"));
        train_out.insert("model.bin".into(), fs::read(model_path).unwrap());
        train_out.insert(
            "model.factors".into(),
            fs::read(model::factors_path(model_path)).unwrap(),
        );
        outputs.insert("train".into(), train_out);

        model::run_classify(&model::ClassifyOpts {
            corpus: fixture("labeled_32.jsonl"),
            model: model_path.to_path_buf(),
            out: dir("classify"),
        })
        .unwrap();
        outputs.insert("classify".into(), hash_dir(&dir("classify")));

        model::run_train(&model::TrainOpts {
            corpus: fixture("generated_labels.jsonl"),
            min_retweets: 5,
            svd_k: 8,
            epochs: 60,
            learning_rate: 5e-3,
            batch_size: 8,
            seed: 23,
            model: gen_model_path.to_path_buf(),
            out: dir("train_gen"),
        })
        .unwrap();
        model::run_detect(&model::ClassifyOpts {
            corpus: fixture("generated_labels.jsonl"),
            model: gen_model_path.to_path_buf(),
            out: dir("detect"),
        })
        .unwrap();
        outputs.insert("detect-generated".into(), hash_dir(&dir("detect")));
        outputs
    };

    let first = run_all("a", &model_a, &gen_model_a);
    let second = run_all("b", &model_b, &gen_model_b);
    for (command, files) in &first {
        let rerun = &second[command];
        assert_eq!(
            files.keys().collect::<Vec<_>>(),
            rerun.keys().collect::<Vec<_>>(),
            "{command}: file sets differ"
        );
        for (name, bytes) in files {
            assert_eq!(bytes, &rerun[name], "{command}/{name} differs between runs");
        }
    }

    // share report: sums to 100 +- 0.01, canonical serialization
    let shares_txt = fs::read_to_string(base.path().join("a_detect").join("shares.txt")).unwrap();
    let line = shares_txt.trim();
    let mut sum = 0.0;
    let mut classes = Vec::new();
    for part in line.split(", ") {
        let (class, rest) = part.split_once(" - ").expect("class - pct%");
        assert!(rest.ends_with('%'), "{part}");
        sum += rest.trim_end_matches('%').parse::<f64>().unwrap();
        classes.push(class.to_string());
    }
    assert_eq!(classes, ["human", "gpt2", "rnn", "other"]);
    assert!((sum - 100.0).abs() < 0.01, "shares sum {sum}");

    println!("PASS criterion 9: 7 subcommands byte-identical across reruns; share line '{line}'");
}

/// Criterion 10: rolling-mean arithmetic, z-score moments, and count-series
/// totals on the bundled fixtures.
#[test]
fn criterion_10_trend_arithmetic() {
    let series = CountTimeSeries {
        start_day: UtcDate::from_days(0),
        values: vec![2.0, 4.0, 6.0],
    };
    assert_eq!(
        rolling_mean(&series, 3).unwrap().values,
        vec![2.0, 3.0, 4.0]
    );

    let corpus =
        trendlens_cli::io::corpus_file::load_corpus(&fixture("corpus_small.jsonl")).unwrap();
    let fields = trendlens_cli::io::fields::load_fields(&fixture("fields.txt")).unwrap();
    for field in &fields {
        let counts = count_time_series(&corpus, field).unwrap();
        let total: f64 = counts.values.iter().sum();
        let matches = corpus
            .tweets()
            .iter()
            .filter(|t| match_thematic_field(t, field))
            .count();
        assert_eq!(total, matches as f64, "{}", field.name);

        let smoothed = rolling_mean(&counts, 7).unwrap();
        let z = zscore(&smoothed).unwrap();
        assert!(mathx::mean(&z.values).abs() < 1e-9);
        assert!((mathx::population_sd(&z.values) - 1.0).abs() < 1e-9);
    }
    println!("PASS criterion 10: trend arithmetic exact on both fixture fields");
}

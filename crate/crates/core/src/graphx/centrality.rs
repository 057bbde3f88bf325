//! PageRank, HITS, and Brandes betweenness.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use super::{GraphError, UserGraph};
use crate::mathx;

const MAX_ITERATIONS: usize = 100_000;

/// Weighted directed PageRank with uniform redistribution of dangling mass.
/// Power iteration from the uniform vector until the L1 change drops under
/// `tol`.
pub fn pagerank(graph: &UserGraph, damping: f64, tol: f64) -> Result<Vec<f64>, GraphError> {
    let n = graph.vertex_count();
    if n == 0 {
        return Err(GraphError::EmptyGraph);
    }
    let mut out_strength = alloc::vec![0.0; n];
    for (src, _, w) in graph.directed_edges() {
        out_strength[src] += w as f64;
    }

    let mut rank = alloc::vec![1.0 / n as f64; n];
    for _ in 0..MAX_ITERATIONS {
        let dangling: f64 = (0..n)
            .filter(|&v| out_strength[v] == 0.0)
            .map(|v| rank[v])
            .sum();
        let base = (1.0 - damping) / n as f64 + damping * dangling / n as f64;
        let mut next = alloc::vec![base; n];
        for (src, dst, w) in graph.directed_edges() {
            next[dst] += damping * rank[src] * w as f64 / out_strength[src];
        }
        let change: f64 = rank.iter().zip(&next).map(|(a, b)| mathx::abs(a - b)).sum();
        rank = next;
        if change < tol {
            break;
        }
    }
    Ok(rank)
}

/// Weighted HITS: alternating power iteration from the uniform vector, both
/// vectors L2-normalized each round, stopping when the combined L1 change
/// drops under `tol`.
pub fn hits(graph: &UserGraph, tol: f64) -> Result<(Vec<f64>, Vec<f64>), GraphError> {
    let n = graph.vertex_count();
    if graph.edge_count() == 0 {
        return Err(GraphError::NoEdges);
    }
    let normalize = |v: &mut [f64]| {
        let norm = mathx::sqrt(v.iter().map(|x| x * x).sum::<f64>());
        if norm > 0.0 {
            for x in v.iter_mut() {
                *x /= norm;
            }
        }
    };

    let mut hub = alloc::vec![1.0; n];
    let mut authority = alloc::vec![0.0; n];
    normalize(&mut hub);
    for _ in 0..MAX_ITERATIONS {
        let mut next_authority = alloc::vec![0.0; n];
        for (src, dst, w) in graph.directed_edges() {
            next_authority[dst] += hub[src] * w as f64;
        }
        normalize(&mut next_authority);

        let mut next_hub = alloc::vec![0.0; n];
        for (src, dst, w) in graph.directed_edges() {
            next_hub[src] += next_authority[dst] * w as f64;
        }
        normalize(&mut next_hub);

        let change: f64 = hub
            .iter()
            .zip(&next_hub)
            .chain(authority.iter().zip(&next_authority))
            .map(|(a, b)| mathx::abs(a - b))
            .sum();
        hub = next_hub;
        authority = next_authority;
        if change < tol {
            break;
        }
    }
    Ok((hub, authority))
}

/// Brandes betweenness on the unweighted undirected projection; each
/// unordered endpoint pair counts once.
pub fn betweenness(graph: &UserGraph) -> Vec<f64> {
    let n = graph.vertex_count();
    let mut score = alloc::vec![0.0; n];

    for source in 0..n {
        let mut stack: Vec<usize> = Vec::new();
        let mut predecessors: Vec<Vec<usize>> = alloc::vec![Vec::new(); n];
        let mut sigma = alloc::vec![0.0; n];
        let mut distance = alloc::vec![-1i64; n];
        sigma[source] = 1.0;
        distance[source] = 0;

        let mut queue = VecDeque::new();
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            stack.push(v);
            for &(u, _) in graph.neighbors(v) {
                if distance[u] < 0 {
                    distance[u] = distance[v] + 1;
                    queue.push_back(u);
                }
                if distance[u] == distance[v] + 1 {
                    sigma[u] += sigma[v];
                    predecessors[u].push(v);
                }
            }
        }

        let mut delta = alloc::vec![0.0; n];
        while let Some(w) = stack.pop() {
            for &v in &predecessors[w] {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if w != source {
                score[w] += delta[w];
            }
        }
    }

    // undirected: every pair was visited from both endpoints
    for s in score.iter_mut() {
        *s /= 2.0;
    }
    score
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use alloc::string::String;
    use alloc::vec;
    use trendlens_testkit::graphs::{brute_betweenness, exact_pagerank};
    use trendlens_testkit::rng::TestRng;

    #[test]
    fn pagerank_symmetric_pair() {
        let graph = UserGraph::from_edges([("a", "b", 1), ("b", "a", 1)]);
        let pr = pagerank(&graph, 0.85, 1e-10).unwrap();
        assert!((pr[0] - 0.5).abs() < 1e-9);
        assert!((pr[1] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn pagerank_single_isolated_vertex() {
        let corpus = crate::corpus::Corpus::from_tweets(vec![crate::corpus::Tweet {
            id: "1".into(),
            created_at: crate::time::Timestamp::parse("2022-01-01T00:00:00Z").unwrap(),
            text: String::from("x"),
            author: "only".into(),
            retweeters: vec![],
            hashtags: vec![],
            retweet_count: 0,
            label: None,
        }])
        .unwrap();
        let graph = crate::graphx::build_user_graph(&corpus);
        let pr = pagerank(&graph, 0.85, 1e-10).unwrap();
        assert_eq!(pr, vec![1.0]);
    }

    #[test]
    fn pagerank_three_chain_matches_exact_oracle() {
        let graph = UserGraph::from_edges([("a", "b", 1), ("b", "c", 1)]);
        let pr = pagerank(&graph, 0.85, 1e-14).unwrap();
        let a = graph.vertex_index("a").unwrap();
        let b = graph.vertex_index("b").unwrap();
        let c = graph.vertex_index("c").unwrap();
        let edges = [(a, b, 1u64), (b, c, 1u64)];
        let oracle = exact_pagerank(3, &edges, 85, 100);
        for (got, want) in pr.iter().zip(&oracle) {
            assert!((got - want).abs() < 1e-9, "{got} vs {want}");
        }
        let sum: f64 = pr.iter().sum();
        assert!((sum - 1.0).abs() < 1e-9);
    }

    #[test]
    fn pagerank_sums_to_one_on_random_graphs() {
        for seed in 0..5u64 {
            let mut rng = TestRng::new(seed);
            let n = 3 + rng.below(6);
            let mut edges = Vec::new();
            for _ in 0..(2 * n) {
                let a = rng.below(n);
                let b = rng.below(n);
                if a != b {
                    edges.push((format!("v{a}"), format!("v{b}"), 1 + rng.below(3) as u64));
                }
            }
            if edges.is_empty() {
                continue;
            }
            let graph =
                UserGraph::from_edges(edges.iter().map(|(a, b, w)| (a.as_str(), b.as_str(), *w)));
            let pr = pagerank(&graph, 0.85, 1e-12).unwrap();
            let sum: f64 = pr.iter().sum();
            assert!((sum - 1.0).abs() < 1e-9, "seed {seed}: sum {sum}");
            assert!(pr.iter().all(|&p| p >= 0.0));
        }
    }

    #[test]
    fn hits_symmetric_pair() {
        let graph = UserGraph::from_edges([("a", "b", 1), ("b", "a", 1)]);
        let (hub, authority) = hits(&graph, 1e-12).unwrap();
        let half_sqrt = (0.5f64).sqrt();
        for v in [&hub, &authority] {
            assert!((v[0] - half_sqrt).abs() < 1e-9);
            assert!((v[1] - half_sqrt).abs() < 1e-9);
        }
    }

    #[test]
    fn hits_star_concentrates_authority() {
        let graph = UserGraph::from_edges([
            ("leaf1", "center", 1),
            ("leaf2", "center", 1),
            ("leaf3", "center", 1),
        ]);
        let (hub, authority) = hits(&graph, 1e-12).unwrap();
        let center = graph.vertex_index("center").unwrap();
        assert!((authority[center] - 1.0).abs() < 1e-9);
        let leaf_hub = (1.0f64 / 3.0).sqrt();
        for leaf in ["leaf1", "leaf2", "leaf3"] {
            let idx = graph.vertex_index(leaf).unwrap();
            assert!((hub[idx] - leaf_hub).abs() < 1e-9);
            assert!(authority[idx].abs() < 1e-9);
        }
        assert!(hub[center].abs() < 1e-9);
    }

    #[test]
    fn hits_isolated_vertex_scores_zero() {
        let corpus = crate::corpus::Corpus::from_tweets(vec![
            crate::corpus::Tweet {
                id: "1".into(),
                created_at: crate::time::Timestamp::parse("2022-01-01T00:00:00Z").unwrap(),
                text: String::from("x"),
                author: "author".into(),
                retweeters: vec!["fan".into()],
                hashtags: vec![],
                retweet_count: 1,
                label: None,
            },
            crate::corpus::Tweet {
                id: "2".into(),
                created_at: crate::time::Timestamp::parse("2022-01-01T00:00:00Z").unwrap(),
                text: String::from("x"),
                author: "loner".into(),
                retweeters: vec![],
                hashtags: vec![],
                retweet_count: 0,
                label: None,
            },
        ])
        .unwrap();
        let graph = crate::graphx::build_user_graph(&corpus);
        let (hub, authority) = hits(&graph, 1e-12).unwrap();
        let loner = graph.vertex_index("loner").unwrap();
        assert_eq!(hub[loner], 0.0);
        assert_eq!(authority[loner], 0.0);
    }

    #[test]
    fn hits_rejects_edgeless_graph() {
        let graph = UserGraph::from_edges(core::iter::empty::<(&str, &str, u64)>());
        assert!(matches!(hits(&graph, 1e-10), Err(GraphError::NoEdges)));
    }

    #[test]
    fn betweenness_path_and_star() {
        let path = UserGraph::from_edges([("a", "b", 1), ("b", "c", 1)]);
        assert_eq!(betweenness(&path), vec![0.0, 1.0, 0.0]);

        let star = UserGraph::from_edges([
            ("l1", "center", 1),
            ("l2", "center", 1),
            ("l3", "center", 1),
            ("l4", "center", 1),
        ]);
        let score = betweenness(&star);
        let center = star.vertex_index("center").unwrap();
        // (n-1)(n-2)/2 with n = 5 leaves+center: 4 leaves -> 4*3/2 = 6
        assert_eq!(score[center], 6.0);
    }

    #[test]
    fn betweenness_matches_brute_force_on_random_graphs() {
        for seed in 0..20u64 {
            let mut rng = TestRng::new(seed + 100);
            let n = 4 + rng.below(5); // 4..=8 vertices
            let mut edges = Vec::new();
            for a in 0..n {
                for b in (a + 1)..n {
                    if rng.uniform() < 0.45 {
                        edges.push((a, b));
                    }
                }
            }
            let named: Vec<(String, String, u64)> = edges
                .iter()
                .map(|&(a, b)| (format!("v{a}"), format!("v{b}"), 1))
                .collect();
            let graph =
                UserGraph::from_edges(named.iter().map(|(a, b, w)| (a.as_str(), b.as_str(), *w)));
            let got = betweenness(&graph);
            // map back to oracle vertex order
            let mut remapped = alloc::vec![0.0; n];
            let mut orphan = 0.0;
            for v in 0..n {
                match graph.vertex_index(&format!("v{v}")) {
                    Some(idx) => remapped[v] = got[idx],
                    None => orphan += 1.0, // vertex had no edges at all
                }
            }
            let _ = orphan;
            let oracle = brute_betweenness(n, &edges);
            for v in 0..n {
                if graph.vertex_index(&format!("v{v}")).is_some() {
                    assert!(
                        (remapped[v] - oracle[v]).abs() < 1e-9,
                        "seed {seed} vertex {v}: {} vs {}",
                        remapped[v],
                        oracle[v]
                    );
                } else {
                    assert_eq!(oracle[v], 0.0);
                }
            }
        }
    }
}

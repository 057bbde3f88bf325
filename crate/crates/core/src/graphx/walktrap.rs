//! Random-walk community agglomeration (Pons-Latapy).
//!
//! Each vertex starts as its own community carrying its t-step random-walk
//! probability vector. Adjacent communities merge in order of smallest
//! squared walk distance (Ward-style), the dendrogram is cut at the
//! maximum-modularity step, and disconnected components never merge because
//! only communities sharing an edge are merge candidates. Zero-degree
//! vertices sit outside the walk entirely and stay singletons.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::{CommunityPartition, GraphError, UserGraph};
use crate::mathx;

struct Community {
    members: usize,
    /// mean t-step walk probability vector over members (walk-indexed)
    profile: Vec<f64>,
    /// sum of undirected weighted degrees of members
    volume: f64,
    /// total internal edge weight (each edge once)
    internal: f64,
}

pub fn walktrap(graph: &UserGraph, steps: usize) -> Result<CommunityPartition, GraphError> {
    if graph.is_empty() {
        return Err(GraphError::EmptyGraph);
    }
    let n = graph.vertex_count();
    let steps = steps.max(1);

    // Vertices taking part in the walk (positive degree).
    let active: Vec<usize> = (0..n).filter(|&v| !graph.neighbors(v).is_empty()).collect();
    let walk_index: BTreeMap<usize, usize> =
        active.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let walk_len = active.len();

    let degree: Vec<f64> = active.iter().map(|&v| graph.strength(v)).collect();

    // t-step transition probabilities per active vertex.
    let profile_of = |start: usize| -> Vec<f64> {
        let mut p = alloc::vec![0.0; walk_len];
        p[walk_index[&start]] = 1.0;
        for _ in 0..steps {
            let mut next = alloc::vec![0.0; walk_len];
            for (i, &v) in active.iter().enumerate() {
                if p[i] == 0.0 {
                    continue;
                }
                let share = p[i] / degree[i];
                for &(u, w) in graph.neighbors(v) {
                    next[walk_index[&u]] += share * w;
                }
            }
            p = next;
        }
        p
    };

    // Arena of communities; vertex v starts as community v.
    let mut arena: BTreeMap<usize, Community> = BTreeMap::new();
    for v in 0..n {
        let profile = if graph.neighbors(v).is_empty() {
            Vec::new()
        } else {
            profile_of(v)
        };
        arena.insert(
            v,
            Community {
                members: 1,
                profile,
                volume: graph.strength(v),
                internal: 0.0,
            },
        );
    }

    // Adjacency and cross-weights between communities.
    let mut cross: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for v in 0..n {
        for &(u, w) in graph.neighbors(v) {
            if v < u {
                cross.insert((v, u), w);
            }
        }
    }

    let walk_distance_sq = |a: &Community, b: &Community| -> f64 {
        let mut sum = 0.0;
        for i in 0..a.profile.len() {
            let d = a.profile[i] - b.profile[i];
            sum += d * d / degree[i];
        }
        sum
    };
    let merge_cost = |a: &Community, b: &Community| -> f64 {
        let (sa, sb) = (a.members as f64, b.members as f64);
        sa * sb / (sa + sb) / n as f64 * walk_distance_sq(a, b)
    };

    let total_weight = graph.total_weight();
    let step_modularity = |arena: &BTreeMap<usize, Community>| -> f64 {
        if total_weight == 0.0 {
            return 0.0;
        }
        arena
            .values()
            .map(|c| {
                c.internal / total_weight
                    - (c.volume / (2.0 * total_weight)) * (c.volume / (2.0 * total_weight))
            })
            .sum()
    };

    // Parent pointers for replaying the dendrogram.
    let mut parent: BTreeMap<usize, usize> = BTreeMap::new();
    let mut merges: Vec<(usize, usize, usize)> = Vec::new();
    let mut best_q = step_modularity(&arena);
    let mut best_step = 0usize;
    let mut next_id = n;

    let mut costs: BTreeMap<(usize, usize), f64> = cross
        .keys()
        .map(|&(a, b)| ((a, b), merge_cost(&arena[&a], &arena[&b])))
        .collect();

    while !costs.is_empty() {
        let (&(ca, cb), _) = costs
            .iter()
            .min_by(|x, y| x.1.partial_cmp(y.1).unwrap().then_with(|| x.0.cmp(y.0)))
            .unwrap();

        let a = arena.remove(&ca).unwrap();
        let b = arena.remove(&cb).unwrap();
        let cross_ab = cross.remove(&(ca, cb)).unwrap_or(0.0);
        let merged_id = next_id;
        next_id += 1;

        let total_members = a.members + b.members;
        let profile: Vec<f64> = if a.profile.is_empty() {
            b.profile.clone()
        } else {
            (0..a.profile.len())
                .map(|i| {
                    (a.members as f64 * a.profile[i] + b.members as f64 * b.profile[i])
                        / total_members as f64
                })
                .collect()
        };
        let merged = Community {
            members: total_members,
            profile,
            volume: a.volume + b.volume,
            internal: a.internal + b.internal + cross_ab,
        };

        // Rewire cross-weights: neighbors of either half become neighbors of
        // the merged community.
        let mut new_neighbors: BTreeMap<usize, f64> = BTreeMap::new();
        let stale: Vec<(usize, usize)> = cross
            .keys()
            .copied()
            .filter(|&(x, y)| x == ca || y == ca || x == cb || y == cb)
            .collect();
        for key in stale {
            let w = cross.remove(&key).unwrap();
            let other = if key.0 == ca || key.0 == cb {
                key.1
            } else {
                key.0
            };
            *new_neighbors.entry(other).or_insert(0.0) += w;
        }
        costs.retain(|&(x, y), _| x != ca && y != ca && x != cb && y != cb);

        arena.insert(merged_id, merged);
        for (other, w) in new_neighbors {
            let key = if other < merged_id {
                (other, merged_id)
            } else {
                (merged_id, other)
            };
            cross.insert(key, w);
            costs.insert(key, merge_cost(&arena[&key.0], &arena[&key.1]));
        }

        parent.insert(ca, merged_id);
        parent.insert(cb, merged_id);
        merges.push((ca, cb, merges.len()));

        let q = step_modularity(&arena);
        if q > best_q {
            best_q = q;
            best_step = merges.len();
        }
    }

    // Replay the first `best_step` merges to produce the assignment.
    let mut root: BTreeMap<usize, usize> = (0..n).map(|v| (v, v)).collect();
    let mut alive: BTreeMap<usize, Vec<usize>> = (0..n).map(|v| (v, alloc::vec![v])).collect();
    let mut ids = n;
    for &(ca, cb, _) in merges.iter().take(best_step) {
        let mut members = alive.remove(&ca).unwrap();
        members.extend(alive.remove(&cb).unwrap());
        let merged_id = ids;
        ids += 1;
        for &v in &members {
            root.insert(v, merged_id);
        }
        alive.insert(merged_id, members);
    }

    // Dense community ids in order of smallest member vertex.
    let mut label_of: BTreeMap<usize, usize> = BTreeMap::new();
    let mut assignment = alloc::vec![0usize; n];
    let mut first_member: BTreeMap<usize, usize> = BTreeMap::new();
    for v in 0..n {
        first_member.entry(root[&v]).or_insert(v);
    }
    let mut ordered: Vec<(usize, usize)> = first_member.iter().map(|(&c, &v)| (v, c)).collect();
    ordered.sort_unstable();
    for (dense, &(_, community)) in ordered.iter().enumerate() {
        label_of.insert(community, dense);
    }
    for v in 0..n {
        assignment[v] = label_of[&root[&v]];
    }

    let final_q = super::modularity(graph, &assignment);
    debug_assert!(mathx::abs(final_q - best_q) < 1e-9);

    Ok(CommunityPartition {
        assignment,
        merges,
        cut_step: best_step,
        modularity: final_q,
    })
}

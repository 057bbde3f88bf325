//! Fruchterman-Reingold force-directed layout.
//!
//! Classic formulation: frame area equals the vertex count, ideal edge
//! length k = sqrt(area / |V|) = 1, repulsion k^2/d between all pairs,
//! attraction d^2/k along edges, displacement capped by a linearly cooling
//! temperature, positions clamped to the frame.

use alloc::vec::Vec;

use super::{GraphError, UserGraph};
use crate::mathx;
use crate::rng::Rng;

/// Final vertex coordinates with the frame's bounding box.
#[derive(Clone, Debug, PartialEq)]
pub struct Layout {
    pub positions: Vec<(f64, f64)>,
    pub width: f64,
    pub height: f64,
}

pub fn fr_layout(graph: &UserGraph, iterations: usize, seed: u64) -> Result<Layout, GraphError> {
    let n = graph.vertex_count();
    if n == 0 {
        return Err(GraphError::EmptyGraph);
    }
    let side = mathx::sqrt(n as f64);
    let k = 1.0; // sqrt(area / n) with area = n

    let mut rng = Rng::seed_from_u64(seed);
    let mut pos: Vec<(f64, f64)> = if n == 1 {
        alloc::vec![(side / 2.0, side / 2.0)]
    } else {
        (0..n)
            .map(|_| (rng.uniform() * side, rng.uniform() * side))
            .collect()
    };

    // undirected unique edge pairs
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for v in 0..n {
        for &(u, _) in graph.neighbors(v) {
            if v < u {
                pairs.push((v, u));
            }
        }
    }

    let t0 = side / 10.0;
    for iter in 0..iterations {
        let temperature = t0 * (1.0 - iter as f64 / iterations as f64);
        let mut disp = alloc::vec![(0.0f64, 0.0f64); n];

        for v in 0..n {
            for u in (v + 1)..n {
                let dx = pos[v].0 - pos[u].0;
                let dy = pos[v].1 - pos[u].1;
                let dist = mathx::sqrt(dx * dx + dy * dy).max(1e-9);
                let force = k * k / dist;
                let (fx, fy) = (dx / dist * force, dy / dist * force);
                disp[v].0 += fx;
                disp[v].1 += fy;
                disp[u].0 -= fx;
                disp[u].1 -= fy;
            }
        }
        for &(v, u) in &pairs {
            let dx = pos[v].0 - pos[u].0;
            let dy = pos[v].1 - pos[u].1;
            let dist = mathx::sqrt(dx * dx + dy * dy).max(1e-9);
            let force = dist * dist / k;
            let (fx, fy) = (dx / dist * force, dy / dist * force);
            disp[v].0 -= fx;
            disp[v].1 -= fy;
            disp[u].0 += fx;
            disp[u].1 += fy;
        }

        for v in 0..n {
            let (dx, dy) = disp[v];
            let len = mathx::sqrt(dx * dx + dy * dy);
            if len > 0.0 {
                let step = len.min(temperature);
                pos[v].0 += dx / len * step;
                pos[v].1 += dy / len * step;
            }
            pos[v].0 = pos[v].0.clamp(0.0, side);
            pos[v].1 = pos[v].1.clamp(0.0, side);
        }
    }

    Ok(Layout {
        positions: pos,
        width: side,
        height: side,
    })
}

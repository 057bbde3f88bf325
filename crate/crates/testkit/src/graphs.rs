//! Graph oracles: brute-force betweenness by path enumeration, exact
//! rational PageRank, exhaustive modularity maximization, and planted
//! community instances.

use crate::rng::TestRng;

/// Betweenness centrality by explicit enumeration of every shortest path.
///
/// Unweighted, undirected, each unordered pair counted once. Exponential in
/// the worst case; callers keep `n` small.
pub fn brute_betweenness(n: usize, edges: &[(usize, usize)]) -> Vec<f64> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        if a == b {
            continue;
        }
        adj[a].push(b);
        adj[b].push(a);
    }
    for nb in adj.iter_mut() {
        nb.sort_unstable();
        nb.dedup();
    }

    let mut score = vec![0.0; n];
    for s in 0..n {
        for t in (s + 1)..n {
            let mut paths: Vec<Vec<usize>> = Vec::new();
            let mut best = usize::MAX;
            let mut stack = vec![s];
            let mut visited = vec![false; n];
            visited[s] = true;
            enumerate_paths(&adj, t, &mut stack, &mut visited, &mut best, &mut paths);
            if paths.is_empty() {
                continue;
            }
            let sigma = paths.len() as f64;
            let mut through = vec![0usize; n];
            for p in &paths {
                for &v in &p[1..p.len() - 1] {
                    through[v] += 1;
                }
            }
            for v in 0..n {
                if through[v] > 0 {
                    score[v] += through[v] as f64 / sigma;
                }
            }
        }
    }
    score
}

fn enumerate_paths(
    adj: &[Vec<usize>],
    target: usize,
    stack: &mut Vec<usize>,
    visited: &mut [bool],
    best: &mut usize,
    out: &mut Vec<Vec<usize>>,
) {
    let cur = *stack.last().unwrap();
    if cur == target {
        let len = stack.len() - 1;
        if len < *best {
            *best = len;
            out.clear();
        }
        if len == *best {
            out.push(stack.clone());
        }
        return;
    }
    if stack.len() > *best {
        return; // cannot improve
    }
    for &next in &adj[cur] {
        if !visited[next] {
            visited[next] = true;
            stack.push(next);
            enumerate_paths(adj, target, stack, visited, best, out);
            stack.pop();
            visited[next] = false;
        }
    }
}

// ---------------------------------------------------------------------------
// Exact PageRank through rational Gaussian elimination.
// ---------------------------------------------------------------------------

/// Reduced fraction over i128 with checked arithmetic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Frac {
    pub num: i128,
    pub den: i128,
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Frac {
    pub fn new(num: i128, den: i128) -> Self {
        assert!(den != 0);
        let sign = if den < 0 { -1 } else { 1 };
        let g = gcd(num, den).max(1);
        Frac {
            num: sign * num / g,
            den: sign * den / g,
        }
    }
    pub fn zero() -> Self {
        Frac { num: 0, den: 1 }
    }
    pub fn add(self, o: Frac) -> Frac {
        Frac::new(
            self.num.checked_mul(o.den).unwrap() + o.num.checked_mul(self.den).unwrap(),
            self.den.checked_mul(o.den).unwrap(),
        )
    }
    pub fn sub(self, o: Frac) -> Frac {
        self.add(Frac::new(-o.num, o.den))
    }
    pub fn mul(self, o: Frac) -> Frac {
        // cross-reduce before multiplying to keep magnitudes down
        let g1 = gcd(self.num, o.den).max(1);
        let g2 = gcd(o.num, self.den).max(1);
        Frac::new(
            (self.num / g1).checked_mul(o.num / g2).unwrap(),
            (self.den / g2).checked_mul(o.den / g1).unwrap(),
        )
    }
    pub fn div(self, o: Frac) -> Frac {
        assert!(o.num != 0);
        self.mul(Frac {
            num: o.den,
            den: o.num,
        })
    }
    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

/// PageRank solved exactly as the linear fixed point
/// `(I - d M) p = (1-d)/n * 1`, where `M` is the column-stochastic transition
/// matrix with dangling columns replaced by uniform. `damping` is given as a
/// rational (e.g. 85/100).
pub fn exact_pagerank(
    n: usize,
    edges: &[(usize, usize, u64)],
    damping_num: i128,
    damping_den: i128,
) -> Vec<f64> {
    let d = Frac::new(damping_num, damping_den);
    let one = Frac::new(1, 1);
    let uniform = Frac::new(1, n as i128);

    let mut out_strength = vec![0i128; n];
    for &(src, _, w) in edges {
        out_strength[src] += w as i128;
    }

    // m[row][col]: transition probability col -> row.
    let mut m = vec![vec![Frac::zero(); n]; n];
    for col in 0..n {
        if out_strength[col] == 0 {
            for row in 0..n {
                m[row][col] = uniform;
            }
        }
    }
    for &(src, dst, w) in edges {
        m[dst][src] = m[dst][src].add(Frac::new(w as i128, out_strength[src]));
    }

    // A = I - d*M, b = (1-d)/n.
    let mut a = vec![vec![Frac::zero(); n + 1]; n];
    for i in 0..n {
        for j in 0..n {
            let mut v = d.mul(m[i][j]);
            v = Frac::new(-v.num, v.den);
            if i == j {
                v = v.add(one);
            }
            a[i][j] = v;
        }
        a[i][n] = one.sub(d).mul(uniform);
    }

    // Gaussian elimination with exact pivoting on nonzero entries.
    for col in 0..n {
        let pivot_row = (col..n)
            .find(|&r| a[r][col].num != 0)
            .expect("singular system");
        a.swap(col, pivot_row);
        let pivot = a[col][col];
        for j in col..=n {
            a[col][j] = a[col][j].div(pivot);
        }
        for r in 0..n {
            if r != col && a[r][col].num != 0 {
                let factor = a[r][col];
                for j in col..=n {
                    let delta = factor.mul(a[col][j]);
                    a[r][j] = a[r][j].sub(delta);
                }
            }
        }
    }
    (0..n).map(|i| a[i][n].to_f64()).collect()
}

// ---------------------------------------------------------------------------
// Exhaustive modularity maximization.
// ---------------------------------------------------------------------------

/// Weighted undirected modularity of an assignment.
pub fn modularity(n: usize, edges: &[(usize, usize, u64)], assignment: &[usize]) -> f64 {
    let mut degree = vec![0.0; n];
    let mut two_m = 0.0;
    for &(a, b, w) in edges {
        degree[a] += w as f64;
        degree[b] += w as f64;
        two_m += 2.0 * w as f64;
    }
    if two_m == 0.0 {
        return 0.0;
    }
    let mut q = 0.0;
    for &(a, b, w) in edges {
        if assignment[a] == assignment[b] {
            q += 2.0 * w as f64 / two_m;
        }
    }
    let parts = assignment.iter().max().map(|&m| m + 1).unwrap_or(0);
    let mut vol = vec![0.0; parts];
    for v in 0..n {
        vol[assignment[v]] += degree[v];
    }
    for vc in vol {
        q -= (vc / two_m) * (vc / two_m);
    }
    q
}

/// Enumerates every partition of `0..n` into at most `max_parts` blocks
/// (restricted-growth strings) and returns the modularity-maximizing
/// assignment with its score.
pub fn best_modularity_partition(
    n: usize,
    edges: &[(usize, usize, u64)],
    max_parts: usize,
) -> (Vec<usize>, f64) {
    let mut best_q = f64::NEG_INFINITY;
    let mut best = vec![0; n];
    let mut assignment = vec![0usize; n];
    loop {
        let q = modularity(n, edges, &assignment);
        if q > best_q {
            best_q = q;
            best = assignment.clone();
        }
        // next restricted-growth string
        let mut i = n;
        loop {
            if i == 1 {
                return (best, best_q);
            }
            i -= 1;
            let prefix_max = assignment[..i].iter().copied().max().unwrap();
            if assignment[i] <= prefix_max && assignment[i] + 1 < max_parts {
                assignment[i] += 1;
                for j in (i + 1)..n {
                    assignment[j] = 0;
                }
                break;
            }
            assignment[i] = 0;
        }
    }
}

/// Rand index between two assignments (agreement on all vertex pairs).
pub fn rand_index(a: &[usize], b: &[usize]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len();
    if n < 2 {
        return 1.0;
    }
    let mut agree = 0usize;
    let mut total = 0usize;
    for i in 0..n {
        for j in (i + 1)..n {
            let same_a = a[i] == a[j];
            let same_b = b[i] == b[j];
            if same_a == same_b {
                agree += 1;
            }
            total += 1;
        }
    }
    agree as f64 / total as f64
}

/// A planted two-clique-plus-bridge instance with randomly permuted vertex
/// ids: returns (vertex count, weighted edges, ground-truth assignment).
pub fn planted_two_cliques(seed: u64) -> (usize, Vec<(usize, usize, u64)>, Vec<usize>) {
    let mut rng = TestRng::new(seed);
    let size_a = 4 + rng.below(4); // 4..=7
    let size_b = 4 + rng.below(4);
    let n = size_a + size_b;

    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.below(i + 1);
        perm.swap(i, j);
    }

    let mut edges = Vec::new();
    for i in 0..size_a {
        for j in (i + 1)..size_a {
            edges.push((perm[i], perm[j], 1));
        }
    }
    for i in 0..size_b {
        for j in (i + 1)..size_b {
            edges.push((perm[size_a + i], perm[size_a + j], 1));
        }
    }
    edges.push((perm[0], perm[size_a], 1)); // the bridge

    let mut truth = vec![0usize; n];
    for i in 0..size_b {
        truth[perm[size_a + i]] = 1;
    }
    (n, edges, truth)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_betweenness() {
        // a - b - c: b carries the single shortest path.
        let score = brute_betweenness(3, &[(0, 1), (1, 2)]);
        assert_eq!(score, vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn star_betweenness_closed_form() {
        // center 0 with 4 leaves: (n-1)(n-2)/2 = 6
        let edges = [(0, 1), (0, 2), (0, 3), (0, 4)];
        let score = brute_betweenness(5, &edges);
        assert_eq!(score[0], 6.0);
        assert!(score[1..].iter().all(|&s| s == 0.0));
    }

    #[test]
    fn split_paths_fractional() {
        // square 0-1-2-3-0: two shortest paths between opposite corners.
        let edges = [(0, 1), (1, 2), (2, 3), (3, 0)];
        let score = brute_betweenness(4, &edges);
        for &s in &score {
            assert!((s - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn pagerank_two_mutual_vertices() {
        let pr = exact_pagerank(2, &[(0, 1, 1), (1, 0, 1)], 85, 100);
        assert!((pr[0] - 0.5).abs() < 1e-15);
        assert!((pr[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn pagerank_sums_to_one() {
        let pr = exact_pagerank(3, &[(0, 1, 1), (1, 2, 1)], 85, 100);
        let sum: f64 = pr.iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
        assert!(pr[2] > pr[1] && pr[1] > pr[0]);
    }

    #[test]
    fn two_cliques_recovered_by_exhaustive_modularity() {
        let (n, edges, truth) = planted_two_cliques(1);
        let (best, _q) = best_modularity_partition(n, &edges, 3);
        assert_eq!(rand_index(&best, &truth), 1.0);
    }

    #[test]
    fn rand_index_identity_and_permuted_labels() {
        let a = [0, 0, 1, 1];
        let b = [1, 1, 0, 0];
        assert_eq!(rand_index(&a, &b), 1.0);
        let c = [0, 1, 0, 1];
        assert!(rand_index(&a, &c) < 1.0);
    }
}

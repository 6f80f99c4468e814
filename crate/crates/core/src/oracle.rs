//! Independent brute-force reference implementations.
//!
//! These deliberately share no code with the fast paths in [`crate::neighbors`]
//! and [`crate::clustering`]: ranks are recomputed from scratch on every call,
//! clustering connectivity is resolved with breadth-first search instead of a
//! disjoint-set structure, and pair enumeration is exhaustive. They exist so
//! the equivalence checks (`wsnsim oracle ...` and the test suites) compare
//! two genuinely different routes to the same answer.

use std::collections::VecDeque;

use crate::topology::Point;

/// Full distance-sorted neighbor list of `a` (ids only, ties by id).
fn sorted_neighbors(positions: &[Point], a: usize) -> Vec<usize> {
    let mut others: Vec<usize> = (0..positions.len()).filter(|&b| b != a).collect();
    others.sort_by(|&x, &y| {
        positions[a]
            .distance(&positions[x])
            .partial_cmp(&positions[a].distance(&positions[y]))
            .unwrap()
            .then(x.cmp(&y))
    });
    others
}

/// k-nearest-neighbor lists for every node.
pub fn knn_lists(positions: &[Point], k: usize) -> Vec<Vec<usize>> {
    (0..positions.len())
        .map(|a| sorted_neighbors(positions, a)[..k].to_vec())
        .collect()
}

/// 1-based rank of `b` in `a`'s full list; 0 when `a == b`.
fn full_rank(positions: &[Point], a: usize, b: usize) -> usize {
    if a == b {
        return 0;
    }
    1 + sorted_neighbors(positions, a)
        .iter()
        .position(|&x| x == b)
        .unwrap()
}

/// Rank of `b` in `a`'s top-k list: `Some(0)` for self, `Some(1..=k)` when
/// listed, `None` otherwise.
fn topk_rank(positions: &[Point], a: usize, b: usize, k: usize) -> Option<usize> {
    if a == b {
        return Some(0);
    }
    let r = full_rank(positions, a, b);
    (r <= k).then_some(r)
}

/// Asymmetric rank-order distance evaluated from scratch.
pub fn asym_rank_order(positions: &[Point], a: usize, b: usize) -> u64 {
    let list = sorted_neighbors(positions, a);
    let oa_b = full_rank(positions, a, b);
    (0..oa_b)
        .map(|i| full_rank(positions, b, list[i]) as u64)
        .sum()
}

/// Symmetric rank-order distance evaluated from scratch.
pub fn sym_rank_order(positions: &[Point], a: usize, b: usize) -> f64 {
    let d = (asym_rank_order(positions, a, b) + asym_rank_order(positions, b, a)) as f64;
    d / full_rank(positions, a, b).min(full_rank(positions, b, a)) as f64
}

/// Cluster-level normalized distance evaluated from scratch.
pub fn cluster_normalized(positions: &[Point], ci: &[usize], cj: &[usize], kk: usize) -> f64 {
    let mut min_d = f64::INFINITY;
    for &a in ci {
        for &b in cj {
            min_d = min_d.min(positions[a].distance(&positions[b]));
        }
    }
    let mut phi = 0.0;
    for &a in ci.iter().chain(cj.iter()) {
        let list = sorted_neighbors(positions, a);
        let kk = kk.min(list.len());
        let mean: f64 = list[..kk]
            .iter()
            .map(|&x| positions[a].distance(&positions[x]))
            .sum::<f64>()
            / kk as f64;
        phi += mean;
    }
    phi /= (ci.len() + cj.len()) as f64;
    min_d / phi
}

/// Top-k presence/absence distance evaluated from scratch. `None` when `b`
/// is not in `a`'s top-k list.
pub fn aro_asym(positions: &[Point], a: usize, b: usize, k: usize) -> Option<u64> {
    let oa_b = topk_rank(positions, a, b, k)?;
    if oa_b == 0 {
        return Some(0);
    }
    let list = sorted_neighbors(positions, a);
    let mut sum = 0u64;
    for i in 0..oa_b.min(k) {
        if topk_rank(positions, b, list[i], k).is_none() {
            sum += 1;
        }
    }
    Some(sum)
}

/// Symmetric presence/absence distance; `None` unless mutually listed.
pub fn aro_sym(positions: &[Point], a: usize, b: usize, k: usize) -> Option<f64> {
    let oa_b = topk_rank(positions, a, b, k)?;
    let ob_a = topk_rank(positions, b, a, k)?;
    if oa_b == 0 || ob_a == 0 {
        return None;
    }
    let d = (aro_asym(positions, a, b, k)? + aro_asym(positions, b, a, k)?) as f64;
    Some(d / oa_b.min(ob_a) as f64)
}

/// One-pass approximate rank-order clustering via exhaustive pair
/// enumeration and BFS connectivity. Merges the unordered pair (a, b) when
/// the pair is mutually top-k listed and either directed presence/absence
/// distance is at most `threshold`.
pub fn aro_cluster_components(positions: &[Point], k: usize, threshold: f64) -> Vec<Vec<usize>> {
    let n = positions.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for a in 0..n {
        for b in (a + 1)..n {
            let mutual =
                topk_rank(positions, a, b, k).is_some() && topk_rank(positions, b, a, k).is_some();
            if !mutual {
                continue;
            }
            let d_ab = aro_asym(positions, a, b, k).unwrap();
            let d_ba = aro_asym(positions, b, a, k).unwrap();
            if d_ab as f64 <= threshold || d_ba as f64 <= threshold {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
    }
    bfs_components(&adj)
}

/// Connected components by BFS; each component's members sorted ascending,
/// components ordered by smallest member.
pub fn bfs_components(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut components = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        let mut comp = Vec::new();
        while let Some(x) = queue.pop_front() {
            comp.push(x);
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        comp.sort_unstable();
        components.push(comp);
    }
    components.sort_by_key(|c| c[0]);
    components
}

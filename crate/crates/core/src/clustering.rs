//! Cluster formation.
//!
//! Two routes produce a [`ClusterPartition`]:
//!
//! - [`aro_cluster`] — the production path: a single merge pass over all
//!   mutually top-k-listed pairs, unioning pairs whose presence/absence
//!   distance is at or below the merge threshold. Transitive closure comes
//!   from the disjoint-set structure, so chains of pairwise merges form one
//!   cluster.
//! - [`rank_order_cluster`] — the original iterative agglomeration over full
//!   neighbor rankings, kept as a verification oracle. Cluster pairs merge
//!   while their minimum cross-pair symmetric distance is within the
//!   threshold and the cluster-level normalized distance stays below 1.

use serde::{Deserialize, Serialize};

use crate::neighbors::{build_knn, NeighborTable};
use crate::topology::Point;

/// Disjoint-set forest with path compression and union by rank.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn find(&mut self, x: usize) -> usize {
        assert!(x < self.parent.len(), "id {x} out of range");
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != cur {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    /// Union the sets containing `a` and `b`; returns the surviving root.
    pub fn union(&mut self, a: usize, b: usize) -> usize {
        let mut ra = self.find(a);
        let mut rb = self.find(b);
        if ra == rb {
            return ra;
        }
        if self.rank[ra] < self.rank[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        if self.rank[ra] == self.rank[rb] {
            self.rank[ra] += 1;
        }
        ra
    }
}

/// A disjoint partition of node ids with an optional head per cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterPartition {
    /// Node id -> cluster index.
    assignment: Vec<usize>,
    /// Cluster index -> sorted member ids. Ordered by smallest member.
    clusters: Vec<Vec<usize>>,
    /// Cluster index -> current head, set during CH selection.
    heads: Vec<Option<usize>>,
}

impl ClusterPartition {
    /// Build from a union-find over `n` elements. Canonical: clusters sorted
    /// by smallest member, members ascending.
    pub fn from_union_find(n: usize, uf: &mut UnionFind) -> Self {
        let mut by_root: Vec<Vec<usize>> = vec![Vec::new(); n];
        for x in 0..n {
            let r = uf.find(x);
            by_root[r].push(x);
        }
        let mut clusters: Vec<Vec<usize>> = by_root.into_iter().filter(|c| !c.is_empty()).collect();
        clusters.sort_by_key(|c| c[0]);
        let mut assignment = vec![0usize; n];
        for (ci, members) in clusters.iter().enumerate() {
            for &m in members {
                assignment[m] = ci;
            }
        }
        let heads = vec![None; clusters.len()];
        ClusterPartition {
            assignment,
            clusters,
            heads,
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.assignment.len()
    }

    pub fn n_clusters(&self) -> usize {
        self.clusters.len()
    }

    pub fn cluster_of(&self, node: usize) -> usize {
        self.assignment[node]
    }

    pub fn members(&self, cluster: usize) -> &[usize] {
        &self.clusters[cluster]
    }

    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    pub fn head(&self, cluster: usize) -> Option<usize> {
        self.heads[cluster]
    }

    pub fn set_head(&mut self, cluster: usize, head: usize) {
        assert!(
            self.clusters[cluster].contains(&head),
            "head {head} is not a member of cluster {cluster}"
        );
        self.heads[cluster] = Some(head);
    }

    pub fn clear_head(&mut self, cluster: usize) {
        self.heads[cluster] = None;
    }

    /// Debug dump: one line per cluster, comma-separated member ids.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for members in &self.clusters {
            let ids: Vec<String> = members.iter().map(|m| m.to_string()).collect();
            out.push_str(&ids.join(","));
            out.push('\n');
        }
        out
    }

    /// Check the structural invariants; used by tests and debug assertions.
    pub fn validate(&self) -> Result<(), String> {
        let mut seen = vec![false; self.assignment.len()];
        for (ci, members) in self.clusters.iter().enumerate() {
            if members.is_empty() {
                return Err(format!("cluster {ci} is empty"));
            }
            for &m in members {
                if seen[m] {
                    return Err(format!("node {m} appears in two clusters"));
                }
                seen[m] = true;
                if self.assignment[m] != ci {
                    return Err(format!("assignment of node {m} disagrees with membership"));
                }
            }
            if let Some(h) = self.heads[ci] {
                if !members.contains(&h) {
                    return Err(format!("head {h} not a member of cluster {ci}"));
                }
            }
        }
        if seen.iter().any(|&s| !s) {
            return Err("some node is not assigned to any cluster".into());
        }
        Ok(())
    }
}

/// Which pairwise distance gates a merge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MergeRule {
    /// Asymmetric presence/absence distance; the pair merges when either
    /// directed value is at or below the threshold.
    AsymPresence,
    /// Asymmetric presence/absence distance; the pair merges only when both
    /// directed values are at or below the threshold.
    AsymPresenceBoth,
    /// Symmetric normalized presence/absence distance.
    SymNormalized,
}

/// Outcome of the one-pass merge, with the distance-evaluation count used by
/// the complexity assertion (at most n*k evaluations).
#[derive(Debug)]
pub struct AroOutcome {
    pub partition: ClusterPartition,
    pub distance_evaluations: usize,
}

/// One-pass approximate rank-order merge over a top-k table.
///
/// Pairs are visited in ascending (min id, max id) order; only pairs present
/// in each other's top-k lists are evaluated; the threshold comparison is
/// inclusive.
pub fn aro_cluster(table: &NeighborTable, threshold: f64, rule: MergeRule) -> AroOutcome {
    let n = table.len();
    let mut uf = UnionFind::new(n);
    let mut evals = 0usize;
    for a in 0..n {
        for &b in table.neighbors(a) {
            if b <= a || !table.mutually_listed(a, b) {
                continue;
            }
            match rule {
                MergeRule::AsymPresence => {
                    evals += 1;
                    if table.aro_asym_distance(a, b) as f64 <= threshold {
                        uf.union(a, b);
                    } else {
                        evals += 1;
                        if table.aro_asym_distance(b, a) as f64 <= threshold {
                            uf.union(a, b);
                        }
                    }
                }
                MergeRule::AsymPresenceBoth => {
                    evals += 1;
                    if table.aro_asym_distance(a, b) as f64 <= threshold {
                        evals += 1;
                        if table.aro_asym_distance(b, a) as f64 <= threshold {
                            uf.union(a, b);
                        }
                    }
                }
                MergeRule::SymNormalized => {
                    evals += 2;
                    if table.aro_sym_distance(a, b).unwrap() <= threshold {
                        uf.union(a, b);
                    }
                }
            }
        }
    }
    debug_assert!(evals <= n * table.k());
    let partition = ClusterPartition::from_union_find(n, &mut uf);
    debug_assert!(partition.validate().is_ok());
    AroOutcome {
        partition,
        distance_evaluations: evals,
    }
}

/// Iterative rank-order agglomeration over comprehensive rankings.
///
/// Each round merges every cluster pair whose minimum cross-pair symmetric
/// distance is at or below `threshold` and whose cluster-level normalized
/// distance is below 1, then recomputes; stops when no pair merges. With
/// `normalized_gate` off, only the symmetric-distance condition applies.
pub fn rank_order_cluster(
    positions: &[Point],
    threshold: f64,
    kk: usize,
    normalized_gate: bool,
) -> ClusterPartition {
    let n = positions.len();
    let table = build_knn(positions, n - 1).expect("full table");
    let mut clusters: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    loop {
        let c = clusters.len();
        let mut uf = UnionFind::new(c);
        let mut merged_any = false;
        for i in 0..c {
            for j in (i + 1)..c {
                let mut min_sym = f64::INFINITY;
                for &a in &clusters[i] {
                    for &b in &clusters[j] {
                        min_sym = min_sym.min(table.sym_rank_order_distance(a, b).unwrap());
                    }
                }
                if min_sym > threshold {
                    continue;
                }
                if normalized_gate {
                    let dn = table
                        .cluster_normalized_distance(&clusters[i], &clusters[j], kk)
                        .unwrap();
                    if dn >= 1.0 {
                        continue;
                    }
                }
                uf.union(i, j);
                merged_any = true;
            }
        }
        if !merged_any {
            break;
        }
        let mut grouped: Vec<Vec<usize>> = vec![Vec::new(); c];
        for (ci, members) in clusters.iter().enumerate() {
            grouped[uf.find(ci)].extend_from_slice(members);
        }
        clusters = grouped.into_iter().filter(|g| !g.is_empty()).collect();
        for cluster in &mut clusters {
            cluster.sort_unstable();
        }
        clusters.sort_by_key(|c| c[0]);
    }

    let mut uf = UnionFind::new(n);
    for cluster in &clusters {
        for &m in &cluster[1..] {
            uf.union(cluster[0], m);
        }
    }
    ClusterPartition::from_union_find(n, &mut uf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use crate::rng::Rng;

    fn random_points(n: usize, seed: u64) -> Vec<Point> {
        let mut rng = Rng::new(seed);
        (0..n)
            .map(|_| Point::new(rng.next_f64() * 100.0, rng.next_f64() * 100.0))
            .collect()
    }

    fn blob(center: (f64, f64), n: usize, radius: f64, seed: u64) -> Vec<Point> {
        let mut rng = Rng::new(seed);
        (0..n)
            .map(|_| {
                Point::new(
                    center.0 + (rng.next_f64() - 0.5) * radius,
                    center.1 + (rng.next_f64() - 0.5) * radius,
                )
            })
            .collect()
    }

    #[test]
    fn union_find_basic() {
        let mut uf = UnionFind::new(3);
        uf.union(0, 1);
        assert_eq!(uf.find(0), uf.find(1));
        assert_ne!(uf.find(0), uf.find(2));
    }

    #[test]
    fn union_is_idempotent() {
        let mut a = UnionFind::new(6);
        let mut b = UnionFind::new(6);
        a.union(2, 4);
        b.union(2, 4);
        b.union(2, 4);
        for x in 0..6 {
            assert_eq!(a.find(x) == a.find(2), b.find(x) == b.find(2));
        }
    }

    #[test]
    #[should_panic(expected = "out of range")]
    fn union_find_rejects_out_of_range() {
        let mut uf = UnionFind::new(3);
        uf.find(3);
    }

    #[test]
    fn union_find_matches_bfs_connectivity() {
        let n = 60;
        let mut rng = Rng::new(77);
        let mut uf = UnionFind::new(n);
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for _ in 0..80 {
            let a = rng.gen_index(n);
            let b = rng.gen_index(n);
            if a != b {
                uf.union(a, b);
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        let expect = oracle::bfs_components(&adj);
        let got = ClusterPartition::from_union_find(n, &mut uf);
        assert_eq!(got.clusters(), &expect[..]);
    }

    #[test]
    fn aro_two_separated_blobs() {
        // k = 4 keeps every top-k list inside its own 5-point blob.
        let mut pts = blob((0.0, 0.0), 5, 2.0, 1);
        pts.extend(blob((500.0, 500.0), 5, 2.0, 2));
        let table = build_knn(&pts, 4).unwrap();
        let out = aro_cluster(&table, 1.5, MergeRule::AsymPresence);
        assert_eq!(out.partition.n_clusters(), 2);
    }

    #[test]
    fn aro_identical_structure_single_cluster() {
        // Points on a small circle: all mutually listed with shared prefixes.
        let n = 8;
        let pts: Vec<Point> = (0..n)
            .map(|i| {
                let t = i as f64 / n as f64 * std::f64::consts::TAU;
                Point::new(t.cos(), t.sin())
            })
            .collect();
        let table = build_knn(&pts, n - 1).unwrap();
        let out = aro_cluster(&table, 1.5, MergeRule::AsymPresence);
        assert_eq!(out.partition.n_clusters(), 1);
    }

    #[test]
    fn aro_matches_naive_enumeration() {
        let pts = random_points(200, 5);
        let table = build_knn(&pts, 20).unwrap();
        let out = aro_cluster(&table, 1.5, MergeRule::AsymPresence);
        let expect = oracle::aro_cluster_components(&pts, 20, 1.5);
        assert_eq!(out.partition.clusters(), &expect[..]);
    }

    #[test]
    fn aro_evaluation_count_bounded() {
        let pts = random_points(300, 8);
        let table = build_knn(&pts, 15).unwrap();
        let out = aro_cluster(&table, 1.5, MergeRule::AsymPresence);
        assert!(out.distance_evaluations <= 300 * 15);
    }

    #[test]
    fn aro_invariant_under_relabeling() {
        let pts = random_points(80, 21);
        let table = build_knn(&pts, 10).unwrap();
        let base = aro_cluster(&table, 1.5, MergeRule::AsymPresence);

        // Reverse the id order and map the partition back.
        let relabeled: Vec<Point> = pts.iter().rev().cloned().collect();
        let table2 = build_knn(&relabeled, 10).unwrap();
        let out2 = aro_cluster(&table2, 1.5, MergeRule::AsymPresence);
        let n = pts.len();
        let mut mapped: Vec<Vec<usize>> = out2
            .partition
            .clusters()
            .iter()
            .map(|c| {
                let mut m: Vec<usize> = c.iter().map(|&i| n - 1 - i).collect();
                m.sort_unstable();
                m
            })
            .collect();
        mapped.sort_by_key(|c| c[0]);
        assert_eq!(base.partition.clusters(), &mapped[..]);
    }

    #[test]
    fn aro_sym_rule_also_valid() {
        let pts = random_points(100, 33);
        let table = build_knn(&pts, 12).unwrap();
        let out = aro_cluster(&table, 1.5, MergeRule::SymNormalized);
        assert!(out.partition.validate().is_ok());
    }

    #[test]
    fn rank_order_all_close_single_cluster() {
        let pts = blob((0.0, 0.0), 12, 3.0, 9);
        let part = rank_order_cluster(&pts, 20.0, 5, false);
        assert_eq!(part.n_clusters(), 1);
    }

    #[test]
    fn rank_order_two_far_blobs() {
        // Two rings of 8 points, 1000 m apart. Within a ring, adjacent
        // members are mutual nearest neighbors (symmetric distance 0) and
        // their spacing sits below the mean 4-NN distance, so each ring
        // chains into one cluster; cross-ring symmetric distances are large.
        let ring = |cx: f64| {
            (0..8).map(move |i| {
                let t = i as f64 / 8.0 * std::f64::consts::TAU;
                Point::new(cx + t.cos(), t.sin())
            })
        };
        let pts: Vec<Point> = ring(0.0).chain(ring(1000.0)).collect();
        // Threshold below any cross-blob symmetric distance.
        let part = rank_order_cluster(&pts, 5.0, 4, true);
        assert_eq!(part.n_clusters(), 2);
        let first: Vec<usize> = (0..8).collect();
        assert_eq!(part.members(0), &first[..]);
    }

    #[test]
    fn rank_order_terminates_and_degenerates() {
        let pts = random_points(50, 12);
        // Threshold 0 with the gate on: only zero-distance mutual-nearest
        // pairs may merge; mostly singletons but always a valid partition.
        let tight = rank_order_cluster(&pts, 0.0, 5, true);
        assert!(tight.validate().is_ok());

        // Huge threshold, gate disabled: everything chains into one cluster.
        let loose = rank_order_cluster(&pts, f64::INFINITY, 5, false);
        assert_eq!(loose.n_clusters(), 1);
    }

    #[test]
    fn partition_head_management() {
        let pts = random_points(20, 2);
        let table = build_knn(&pts, 5).unwrap();
        let mut part = aro_cluster(&table, 1.5, MergeRule::AsymPresence).partition;
        let head = part.members(0)[0];
        part.set_head(0, head);
        assert_eq!(part.head(0), Some(head));
        part.clear_head(0);
        assert_eq!(part.head(0), None);
        assert!(part.validate().is_ok());
    }
}

//! Ranked nearest-neighbor tables and the rank-order distance family.
//!
//! The table stores, per node, its k nearest other nodes by Euclidean
//! distance (ties broken by ascending id). On top of it live four distance
//! measures:
//!
//! - the asymmetric rank-order distance (sum of cross-ranks over one node's
//!   neighbor prefix),
//! - its symmetric, rank-normalized form,
//! - the cluster-level normalized distance (min cross-pair distance over the
//!   mean K-nearest-neighbor distance of both clusters' members),
//! - the top-k presence/absence variants used by the one-pass approximate
//!   merge.
//!
//! A node's rank in its own list is 0 by convention, and rank 0 counts as
//! "present" for the presence/absence indicator.

use thiserror::Error;

use crate::topology::Point;

const RANK_ABSENT: u32 = u32::MAX;

/// Immutable ranked neighbor table.
#[derive(Debug, Clone)]
pub struct NeighborTable {
    k: usize,
    positions: Vec<Point>,
    /// Per node: ids of its k nearest others, ascending distance.
    lists: Vec<Vec<usize>>,
    /// Per node: distances parallel to `lists`.
    dists: Vec<Vec<f64>>,
    /// Dense n*n rank matrix; `rank_mat[a*n + b]` is the 1-based rank of b in
    /// a's list, 0 for b == a, RANK_ABSENT otherwise.
    rank_mat: Vec<u32>,
}

#[derive(Debug, Error, PartialEq)]
pub enum NeighborError {
    #[error("k must be smaller than the number of points (k = {k}, n = {n})")]
    KTooLarge { k: usize, n: usize },
    #[error("need at least 2 points (got {0})")]
    TooFewPoints(usize),
    #[error("self-distance is undefined (node {0})")]
    SelfPair(usize),
    #[error("nodes {0} and {1} are not mutually listed")]
    NotMutual(usize, usize),
    #[error("clusters must be non-empty and disjoint")]
    BadClusterPair,
}

/// Exact k-nearest-neighbor table by brute-force pairwise distances.
pub fn build_knn(positions: &[Point], k: usize) -> Result<NeighborTable, NeighborError> {
    let n = positions.len();
    if n < 2 {
        return Err(NeighborError::TooFewPoints(n));
    }
    if k >= n {
        return Err(NeighborError::KTooLarge { k, n });
    }
    let mut lists = Vec::with_capacity(n);
    let mut dists = Vec::with_capacity(n);
    let mut scratch: Vec<(f64, usize)> = Vec::with_capacity(n - 1);
    for a in 0..n {
        scratch.clear();
        for b in 0..n {
            if b != a {
                scratch.push((positions[a].distance_sq(&positions[b]), b));
            }
        }
        // Ascending distance, ties by ascending id. Squared distances order
        // identically to distances and avoid the sqrt in the hot loop.
        scratch.sort_unstable_by(|x, y| x.0.partial_cmp(&y.0).unwrap().then(x.1.cmp(&y.1)));
        lists.push(scratch[..k].iter().map(|&(_, id)| id).collect());
        dists.push(scratch[..k].iter().map(|&(d2, _)| d2.sqrt()).collect());
    }
    Ok(NeighborTable::from_lists(positions.to_vec(), k, lists, dists))
}

/// Same table via a uniform-grid candidate search. Exists for scaling
/// experiments; must produce output identical to [`build_knn`].
pub fn build_knn_grid(positions: &[Point], k: usize) -> Result<NeighborTable, NeighborError> {
    let n = positions.len();
    if n < 2 {
        return Err(NeighborError::TooFewPoints(n));
    }
    if k >= n {
        return Err(NeighborError::KTooLarge { k, n });
    }
    let (mut min_x, mut min_y) = (f64::INFINITY, f64::INFINITY);
    let (mut max_x, mut max_y) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in positions {
        min_x = min_x.min(p.x);
        min_y = min_y.min(p.y);
        max_x = max_x.max(p.x);
        max_y = max_y.max(p.y);
    }
    let span_x = (max_x - min_x).max(1e-9);
    let span_y = (max_y - min_y).max(1e-9);
    // Aim for a few points per cell.
    let cells_per_axis = ((n as f64 / 4.0).sqrt().ceil() as usize).max(1);
    let cell_w = span_x / cells_per_axis as f64;
    let cell_h = span_y / cells_per_axis as f64;
    let cell_of = |p: &Point| -> (usize, usize) {
        let cx = (((p.x - min_x) / cell_w) as usize).min(cells_per_axis - 1);
        let cy = (((p.y - min_y) / cell_h) as usize).min(cells_per_axis - 1);
        (cx, cy)
    };
    let mut grid: Vec<Vec<usize>> = vec![Vec::new(); cells_per_axis * cells_per_axis];
    for (i, p) in positions.iter().enumerate() {
        let (cx, cy) = cell_of(p);
        grid[cy * cells_per_axis + cx].push(i);
    }

    let mut lists = Vec::with_capacity(n);
    let mut dists = Vec::with_capacity(n);
    let mut cand: Vec<(f64, usize)> = Vec::new();
    let axis = cells_per_axis as isize;
    for a in 0..n {
        let (acx, acy) = cell_of(&positions[a]);
        let (acx, acy) = (acx as isize, acy as isize);
        cand.clear();
        let mut ring = 0isize;
        loop {
            // Candidate cells at exactly Chebyshev distance `ring`; cells
            // outside the grid are skipped without shifting the ring.
            for cy in (acy - ring).max(0)..=(acy + ring).min(axis - 1) {
                for cx in (acx - ring).max(0)..=(acx + ring).min(axis - 1) {
                    let on_ring = (cy - acy).abs() == ring || (cx - acx).abs() == ring;
                    if on_ring {
                        for &b in &grid[(cy * axis + cx) as usize] {
                            if b != a {
                                cand.push((positions[a].distance_sq(&positions[b]), b));
                            }
                        }
                    }
                }
            }
            // The searched block guarantees coverage of `ring` whole cells
            // in every in-bounds direction; any unseen point is farther.
            let cover = ring as f64 * cell_w.min(cell_h);
            let exhausted = acx - ring <= 0
                && acy - ring <= 0
                && acx + ring >= axis - 1
                && acy + ring >= axis - 1;
            if cand.len() >= k {
                cand.sort_unstable_by(|x, y| x.0.partial_cmp(&y.0).unwrap().then(x.1.cmp(&y.1)));
                let kth = cand[k - 1].0.sqrt();
                if kth <= cover || exhausted {
                    break;
                }
            } else if exhausted {
                cand.sort_unstable_by(|x, y| x.0.partial_cmp(&y.0).unwrap().then(x.1.cmp(&y.1)));
                break;
            }
            ring += 1;
        }
        lists.push(cand[..k].iter().map(|&(_, id)| id).collect::<Vec<_>>());
        dists.push(cand[..k].iter().map(|&(d2, _)| d2.sqrt()).collect::<Vec<_>>());
    }
    Ok(NeighborTable::from_lists(positions.to_vec(), k, lists, dists))
}

impl NeighborTable {
    fn from_lists(
        positions: Vec<Point>,
        k: usize,
        lists: Vec<Vec<usize>>,
        dists: Vec<Vec<f64>>,
    ) -> Self {
        let n = positions.len();
        let mut rank_mat = vec![RANK_ABSENT; n * n];
        for a in 0..n {
            rank_mat[a * n + a] = 0;
            for (i, &b) in lists[a].iter().enumerate() {
                rank_mat[a * n + b] = (i + 1) as u32;
            }
        }
        NeighborTable {
            k,
            positions,
            lists,
            dists,
            rank_mat,
        }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    /// Neighbor ids of `a`, ascending distance.
    pub fn neighbors(&self, a: usize) -> &[usize] {
        &self.lists[a]
    }

    /// Distances parallel to [`Self::neighbors`].
    pub fn neighbor_distances(&self, a: usize) -> &[f64] {
        &self.dists[a]
    }

    /// Debug dump: one line per node, `id: n1,n2,...` in rank order.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (a, list) in self.lists.iter().enumerate() {
            let ids: Vec<String> = list.iter().map(|b| b.to_string()).collect();
            out.push_str(&format!("{a}: {}\n", ids.join(",")));
        }
        out
    }

    /// 1-based rank of `b` in `a`'s list; `Some(0)` for `a == b`; `None` when
    /// `b` does not appear.
    pub fn rank(&self, a: usize, b: usize) -> Option<usize> {
        let r = self.rank_mat[a * self.len() + b];
        (r != RANK_ABSENT).then_some(r as usize)
    }

    /// Whether `a` and `b` each appear in the other's top-k list.
    pub fn mutually_listed(&self, a: usize, b: usize) -> bool {
        a != b && self.rank(a, b).is_some() && self.rank(b, a).is_some()
    }

    /// Asymmetric rank-order distance: the sum, over a's neighbor prefix up
    /// to b's rank, of each prefix member's rank in b's list. Requires a
    /// comprehensive table (k = n-1).
    pub fn asym_rank_order_distance(&self, a: usize, b: usize) -> u64 {
        debug_assert_eq!(self.k, self.len() - 1, "comprehensive ranking required");
        let oa_b = self.rank(a, b).expect("full table has every rank");
        let mut sum = 0u64;
        for i in 0..oa_b {
            let fa_i = self.lists[a][i];
            sum += self.rank(b, fa_i).expect("full table has every rank") as u64;
        }
        sum
    }

    /// Symmetric rank-order distance: both asymmetric distances over the
    /// smaller mutual rank.
    pub fn sym_rank_order_distance(&self, a: usize, b: usize) -> Result<f64, NeighborError> {
        if a == b {
            return Err(NeighborError::SelfPair(a));
        }
        let d_ab = self.asym_rank_order_distance(a, b);
        let d_ba = self.asym_rank_order_distance(b, a);
        let oa_b = self.rank(a, b).expect("full table has every rank");
        let ob_a = self.rank(b, a).expect("full table has every rank");
        Ok((d_ab + d_ba) as f64 / oa_b.min(ob_a) as f64)
    }

    /// Cluster-level normalized distance: minimum Euclidean cross-pair
    /// distance divided by the mean distance of every member of either
    /// cluster to its `kk` nearest neighbors.
    pub fn cluster_normalized_distance(
        &self,
        ci: &[usize],
        cj: &[usize],
        kk: usize,
    ) -> Result<f64, NeighborError> {
        if ci.is_empty() || cj.is_empty() || ci.iter().any(|a| cj.contains(a)) {
            return Err(NeighborError::BadClusterPair);
        }
        let mut min_d = f64::INFINITY;
        for &a in ci {
            for &b in cj {
                min_d = min_d.min(self.positions[a].distance(&self.positions[b]));
            }
        }
        let kk = kk.min(self.k).max(1);
        let mut phi = 0.0;
        for &a in ci.iter().chain(cj.iter()) {
            let mean_knn: f64 = self.dists[a][..kk].iter().sum::<f64>() / kk as f64;
            phi += mean_knn;
        }
        phi /= (ci.len() + cj.len()) as f64;
        Ok(min_d / phi)
    }

    /// Presence/absence distance over the top-k lists: how many of a's
    /// neighbors, up to b's rank (capped at k), are missing from b's top-k.
    /// Only meaningful when b appears in a's list.
    pub fn aro_asym_distance(&self, a: usize, b: usize) -> u64 {
        let oa_b = self
            .rank(a, b)
            .expect("pair must be evaluated only when b is in a's list");
        let upper = oa_b.min(self.k);
        let mut sum = 0u64;
        for i in 0..upper {
            let fa_i = self.lists[a][i];
            // rank(b, x) is Some(r <= k) exactly when x is b itself (rank 0)
            // or in b's top-k; either way the indicator is "present".
            if self.rank(b, fa_i).is_none() {
                sum += 1;
            }
        }
        sum
    }

    /// Symmetric presence/absence distance, defined for mutually listed pairs.
    pub fn aro_sym_distance(&self, a: usize, b: usize) -> Result<f64, NeighborError> {
        if a == b {
            return Err(NeighborError::SelfPair(a));
        }
        if !self.mutually_listed(a, b) {
            return Err(NeighborError::NotMutual(a, b));
        }
        let d_ab = self.aro_asym_distance(a, b);
        let d_ba = self.aro_asym_distance(b, a);
        let oa_b = self.rank(a, b).unwrap();
        let ob_a = self.rank(b, a).unwrap();
        Ok((d_ab + d_ba) as f64 / oa_b.min(ob_a) as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use crate::rng::Rng;
    use proptest::prelude::*;

    fn line_points() -> Vec<Point> {
        // ids a=0, b=1, c=2, d=3 at x = 0, 1, 3, 10
        [0.0, 1.0, 3.0, 10.0]
            .iter()
            .map(|&x| Point::new(x, 0.0))
            .collect()
    }

    fn random_points(n: usize, seed: u64) -> Vec<Point> {
        let mut rng = Rng::new(seed);
        (0..n)
            .map(|_| Point::new(rng.next_f64() * 100.0, rng.next_f64() * 100.0))
            .collect()
    }

    #[test]
    fn knn_collinear_example() {
        let t = build_knn(&line_points(), 3).unwrap();
        assert_eq!(t.neighbors(0), &[1, 2, 3]);
        assert_eq!(t.neighbors(1), &[0, 2, 3]);
        assert_eq!(t.neighbors(2), &[1, 0, 3]);
        assert_eq!(t.neighbors(3), &[2, 1, 0]);
    }

    #[test]
    fn knn_two_points() {
        let pts = vec![Point::new(0.0, 0.0), Point::new(1.0, 1.0)];
        let t = build_knn(&pts, 1).unwrap();
        assert_eq!(t.neighbors(0), &[1]);
        assert_eq!(t.neighbors(1), &[0]);
    }

    #[test]
    fn knn_rejects_k_too_large() {
        let pts = random_points(5, 1);
        assert!(matches!(
            build_knn(&pts, 5),
            Err(NeighborError::KTooLarge { .. })
        ));
    }

    #[test]
    fn knn_matches_oracle() {
        let pts = random_points(200, 17);
        let t = build_knn(&pts, 20).unwrap();
        let expect = oracle::knn_lists(&pts, 20);
        for a in 0..pts.len() {
            assert_eq!(t.neighbors(a), &expect[a][..], "node {a}");
        }
    }

    #[test]
    fn grid_backend_identical_to_brute_force() {
        for (n, k, seed) in [(50, 5, 3u64), (200, 20, 4), (333, 12, 5)] {
            let pts = random_points(n, seed);
            let brute = build_knn(&pts, k).unwrap();
            let grid = build_knn_grid(&pts, k).unwrap();
            for a in 0..n {
                assert_eq!(brute.neighbors(a), grid.neighbors(a), "n={n} k={k} node {a}");
            }
        }
    }

    #[test]
    fn rank_inverts_lists() {
        let pts = random_points(60, 9);
        let t = build_knn(&pts, 10).unwrap();
        for a in 0..pts.len() {
            assert_eq!(t.rank(a, a), Some(0));
            for (i, &b) in t.neighbors(a).iter().enumerate() {
                assert_eq!(t.rank(a, b), Some(i + 1));
            }
        }
    }

    #[test]
    fn asym_distance_of_nearest_neighbor_is_zero() {
        let pts = random_points(40, 11);
        let t = build_knn(&pts, pts.len() - 1).unwrap();
        for a in 0..pts.len() {
            let b = t.neighbors(a)[0];
            assert_eq!(t.asym_rank_order_distance(a, b), 0, "a = {a}");
        }
    }

    #[test]
    fn asym_distance_self_is_zero() {
        let pts = line_points();
        let t = build_knn(&pts, 3).unwrap();
        for a in 0..4 {
            assert_eq!(t.asym_rank_order_distance(a, a), 0);
        }
    }

    #[test]
    fn asym_distance_matches_oracle_on_line() {
        let pts = line_points();
        let t = build_knn(&pts, 3).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(
                    t.asym_rank_order_distance(a, b),
                    oracle::asym_rank_order(&pts, a, b),
                    "pair ({a},{b})"
                );
            }
        }
    }

    #[test]
    fn sym_distance_rejects_self() {
        let t = build_knn(&line_points(), 3).unwrap();
        assert_eq!(
            t.sym_rank_order_distance(2, 2),
            Err(NeighborError::SelfPair(2))
        );
    }

    #[test]
    fn sym_distance_symmetric_everywhere() {
        let pts = random_points(50, 13);
        let t = build_knn(&pts, pts.len() - 1).unwrap();
        for a in 0..pts.len() {
            for b in (a + 1)..pts.len() {
                let ab = t.sym_rank_order_distance(a, b).unwrap();
                let ba = t.sym_rank_order_distance(b, a).unwrap();
                assert_eq!(ab, ba);
            }
        }
    }

    #[test]
    fn sym_distance_mutual_nearest_is_zero() {
        // Two tight pairs far apart: members of each pair are mutual nearest
        // neighbors, so both asymmetric terms vanish.
        let pts = vec![
            Point::new(0.0, 0.0),
            Point::new(0.1, 0.0),
            Point::new(50.0, 50.0),
            Point::new(50.1, 50.0),
        ];
        let t = build_knn(&pts, 3).unwrap();
        assert_eq!(t.sym_rank_order_distance(0, 1).unwrap(), 0.0);
        assert_eq!(t.sym_rank_order_distance(2, 3).unwrap(), 0.0);
    }

    #[test]
    fn sym_distance_line_matches_oracle() {
        let pts = line_points();
        let t = build_knn(&pts, 3).unwrap();
        let got = t.sym_rank_order_distance(0, 3).unwrap();
        assert_eq!(got, oracle::sym_rank_order(&pts, 0, 3));
    }

    #[test]
    fn cluster_normalized_distance_cases() {
        // Two tight pairs: clusters {0,1} and {2,3}.
        let pts = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(10.0, 0.0),
            Point::new(11.0, 0.0),
        ];
        let t = build_knn(&pts, 3).unwrap();
        let d = t.cluster_normalized_distance(&[0, 1], &[2, 3], 1).unwrap();
        // Min cross distance 9; every member's 1-NN distance is 1.
        assert!((d - 9.0).abs() < 1e-12, "d = {d}");

        assert_eq!(
            t.cluster_normalized_distance(&[0, 1], &[1, 2], 1),
            Err(NeighborError::BadClusterPair)
        );
        assert_eq!(
            t.cluster_normalized_distance(&[], &[1], 1),
            Err(NeighborError::BadClusterPair)
        );
    }

    #[test]
    fn cluster_normalized_distance_matches_oracle() {
        let pts = random_points(30, 23);
        let t = build_knn(&pts, pts.len() - 1).unwrap();
        // All singleton-cluster pairs plus a few multi-member splits.
        for a in 0..10 {
            for b in (a + 1)..10 {
                let got = t.cluster_normalized_distance(&[a], &[b], 5).unwrap();
                let expect = oracle::cluster_normalized(&pts, &[a], &[b], 5);
                assert!((got - expect).abs() < 1e-12);
            }
        }
        let ci = [0, 1, 2, 3];
        let cj = [4, 5, 6];
        let got = t.cluster_normalized_distance(&ci, &cj, 7).unwrap();
        let expect = oracle::cluster_normalized(&pts, &ci, &cj, 7);
        assert!((got - expect).abs() < 1e-12);
    }

    #[test]
    fn aro_asym_line_example() {
        let t = build_knn(&line_points(), 3).unwrap();
        // b is a's rank-1 neighbor; the single shared term is b itself.
        assert_eq!(t.aro_asym_distance(0, 1), 0);
    }

    #[test]
    fn aro_asym_identical_lists_zero() {
        // Five co-clustered points: each pair shares its neighbor prefix.
        let pts = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(1.0, 1.0),
            Point::new(0.5, 0.5),
        ];
        let t = build_knn(&pts, 4).unwrap();
        for a in 0..5 {
            for b in 0..5 {
                if a != b {
                    assert_eq!(t.aro_asym_distance(a, b), 0, "pair ({a},{b})");
                }
            }
        }
    }

    #[test]
    fn separated_blobs_never_mutually_listed() {
        // Two 3-point blobs, k = 2: every top-2 list stays inside its blob.
        let pts = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(100.0, 100.0),
            Point::new(101.0, 100.0),
            Point::new(100.0, 101.0),
        ];
        let t = build_knn(&pts, 2).unwrap();
        for a in 0..3 {
            for b in 3..6 {
                assert!(!t.mutually_listed(a, b));
            }
        }
    }

    #[test]
    fn aro_sym_rejects_non_mutual() {
        let pts = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(100.0, 100.0),
            Point::new(101.0, 100.0),
            Point::new(100.0, 101.0),
        ];
        let t = build_knn(&pts, 2).unwrap();
        assert_eq!(
            t.aro_sym_distance(0, 3),
            Err(NeighborError::NotMutual(0, 3))
        );
    }

    #[test]
    fn aro_sym_matches_oracle_random_set() {
        let pts = random_points(100, 31);
        let t = build_knn(&pts, 20).unwrap();
        for a in 0..pts.len() {
            for &b in t.neighbors(a) {
                if t.mutually_listed(a, b) {
                    let got = t.aro_sym_distance(a, b).unwrap();
                    let expect = oracle::aro_sym(&pts, a, b, 20).unwrap();
                    assert_eq!(got, expect, "pair ({a},{b})");
                    let rev = t.aro_sym_distance(b, a).unwrap();
                    assert_eq!(got, rev);
                }
            }
        }
    }

    #[test]
    fn comprehensive_table_degenerates_presence_distances() {
        // With k = n-1 nothing is ever absent: every presence/absence
        // distance collapses to 0, so all mutual pairs sit at distance 0.
        let pts = random_points(30, 41);
        let t = build_knn(&pts, pts.len() - 1).unwrap();
        for a in 0..pts.len() {
            for b in 0..pts.len() {
                if a != b {
                    assert_eq!(t.aro_asym_distance(a, b), 0);
                    assert_eq!(t.aro_sym_distance(a, b).unwrap(), 0.0);
                }
            }
        }
    }

    #[test]
    fn dump_lists_each_node_in_rank_order() {
        let t = build_knn(&line_points(), 3).unwrap();
        assert_eq!(t.dump(), "0: 1,2,3\n1: 0,2,3\n2: 1,0,3\n3: 2,1,0\n");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn aro_asym_bounded(seed in 0u64..5000, n in 10usize..60, k in 3usize..9) {
            let k = k.min(n - 1);
            let pts = random_points(n, seed);
            let t = build_knn(&pts, k).unwrap();
            for a in 0..n {
                for &b in t.neighbors(a) {
                    let d = t.aro_asym_distance(a, b);
                    let bound = t.rank(a, b).unwrap().min(k) as u64;
                    prop_assert!(d <= bound);
                }
            }
        }
    }
}

//! Oracle-equivalence checks behind `wsnsim oracle`.
//!
//! The fast neighbor/clustering paths are compared against the independent
//! brute-force reimplementations on randomized instances; any disagreement
//! is a failure.

use wsnsim_core::clustering::{aro_cluster, MergeRule};
use wsnsim_core::neighbors::{build_knn, build_knn_grid};
use wsnsim_core::oracle;
use wsnsim_core::rng::Rng;
use wsnsim_core::topology::Point;

#[derive(Debug)]
pub struct OracleReport {
    pub instances: usize,
    pub mismatches: usize,
    pub lines: Vec<String>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.mismatches == 0
    }
}

fn random_points(n: usize, rng: &mut Rng) -> Vec<Point> {
    (0..n)
        .map(|_| Point::new(rng.next_f64() * 100.0, rng.next_f64() * 100.0))
        .collect()
}

/// Neighbor tables: brute force vs sort-based oracle vs grid backend, over
/// `instances` randomized (n, k) pairs.
pub fn check_knn(instances: usize, seed: u64) -> OracleReport {
    let mut rng = Rng::new(seed);
    let mut report = OracleReport {
        instances,
        mismatches: 0,
        lines: Vec::new(),
    };
    for i in 0..instances {
        let n = 20 + rng.gen_index(181); // 20..=200
        let k = 5 + rng.gen_index(16.min(n - 5)); // 5..=20, k < n
        let pts = random_points(n, &mut rng);
        let table = build_knn(&pts, k).unwrap();
        let grid = build_knn_grid(&pts, k).unwrap();
        let expect = oracle::knn_lists(&pts, k);
        let mut bad = 0usize;
        for a in 0..n {
            if table.neighbors(a) != expect[a].as_slice() {
                bad += 1;
            }
            if grid.neighbors(a) != expect[a].as_slice() {
                bad += 1;
            }
        }
        if bad > 0 {
            report.mismatches += 1;
            report
                .lines
                .push(format!("FAIL knn instance {i}: n={n} k={k} ({bad} lists differ)"));
        } else {
            report.lines.push(format!("ok   knn instance {i}: n={n} k={k}"));
        }
    }
    report
}

/// Rank-order distances and the one-pass merge vs the naive reimplementation
/// on `instances` randomized instances of `n` points.
pub fn check_rankorder(instances: usize, n: usize, seed: u64) -> OracleReport {
    let mut rng = Rng::new(seed ^ 0x5eed);
    let mut report = OracleReport {
        instances,
        mismatches: 0,
        lines: Vec::new(),
    };
    for i in 0..instances {
        let pts = random_points(n, &mut rng);
        let k = 5 + rng.gen_index(16.min(n - 5));
        let mut bad = Vec::new();

        // Comprehensive-table distances.
        let full = build_knn(&pts, n - 1).unwrap();
        for a in 0..n.min(12) {
            for b in 0..n.min(12) {
                if a == b {
                    continue;
                }
                if full.asym_rank_order_distance(a, b) != oracle::asym_rank_order(&pts, a, b) {
                    bad.push(format!("asym({a},{b})"));
                }
                let sym = full.sym_rank_order_distance(a, b).unwrap();
                if sym != oracle::sym_rank_order(&pts, a, b) {
                    bad.push(format!("sym({a},{b})"));
                }
            }
        }

        // Top-k distances and the merge itself.
        let table = build_knn(&pts, k).unwrap();
        for a in 0..n {
            for &b in table.neighbors(a) {
                if table.mutually_listed(a, b) {
                    let got = table.aro_asym_distance(a, b);
                    if Some(got) != oracle::aro_asym(&pts, a, b, k) {
                        bad.push(format!("aro_asym({a},{b})"));
                    }
                    let got_sym = table.aro_sym_distance(a, b).unwrap();
                    if Some(got_sym) != oracle::aro_sym(&pts, a, b, k) {
                        bad.push(format!("aro_sym({a},{b})"));
                    }
                }
            }
        }
        let merged = aro_cluster(&table, 1.5, MergeRule::AsymPresence);
        let expect = oracle::aro_cluster_components(&pts, k, 1.5);
        if merged.partition.clusters() != &expect[..] {
            bad.push("cluster partition".into());
        }

        if bad.is_empty() {
            report
                .lines
                .push(format!("ok   rankorder instance {i}: n={n} k={k}"));
        } else {
            report.mismatches += 1;
            report.lines.push(format!(
                "FAIL rankorder instance {i}: n={n} k={k}: {}",
                bad.join(", ")
            ));
        }
    }
    report
}

//! Per-round Lloyd clustering with residual-energy head choice.
//!
//! The sink collects id/position/energy reports, clusters the alive nodes
//! with k-means from randomly seeded centroids, and names the highest-energy
//! member of each cluster its head.

use crate::rng::Rng;
use crate::topology::{Node, Point};

use super::{MemberTarget, Protocol, ProtocolKind, RoundCtx, RoundPlan, Uplink};

pub struct KmeansWsn {
    k_clusters: usize,
    tolerance: f64,
    max_iters: usize,
    rng: Rng,
}

impl KmeansWsn {
    pub fn new(k_clusters: usize, tolerance: f64, max_iters: usize, rng: Rng) -> Self {
        KmeansWsn {
            k_clusters: k_clusters.max(1),
            tolerance,
            max_iters,
            rng,
        }
    }

    /// Lloyd iterations over the alive nodes from randomly seeded centroids.
    fn lloyd(&mut self, ctx: &RoundCtx, alive: &[usize]) -> Vec<(Point, Vec<usize>)> {
        let k = self.k_clusters.min(alive.len());
        let centroids: Vec<Point> = (0..k)
            .map(|_| {
                Point::new(
                    self.rng.next_f64() * ctx.field_width,
                    self.rng.next_f64() * ctx.field_height,
                )
            })
            .collect();
        lloyd_from(ctx.nodes, alive, centroids, self.tolerance, self.max_iters)
    }
}

/// Lloyd iterations from explicit initial centroids; returns per-cluster
/// member lists (empty clusters pruned) with their final centroids.
pub fn lloyd_from(
    nodes: &[Node],
    alive: &[usize],
    mut centroids: Vec<Point>,
    tolerance: f64,
    max_iters: usize,
) -> Vec<(Point, Vec<usize>)> {
    let k = centroids.len();
    let mut assignment = vec![0usize; alive.len()];
    for _ in 0..max_iters {
        // Assignment step, reseeding any emptied centroid at the node
        // farthest from its nearest non-empty centroid. Reseeds are capped
        // at k: with coincident node positions an empty cluster can be
        // unavoidable, and it is simply pruned at the end.
        let mut reseeds = 0usize;
        loop {
            let mut counts = vec![0usize; k];
            for (slot, &a) in alive.iter().enumerate() {
                let mut best = 0usize;
                let mut best_d = f64::INFINITY;
                for (ci, c) in centroids.iter().enumerate() {
                    let d = nodes[a].pos.distance_sq(c);
                    if d < best_d {
                        best_d = d;
                        best = ci;
                    }
                }
                assignment[slot] = best;
                counts[best] += 1;
            }
            let Some(empty) = counts.iter().position(|&c| c == 0) else {
                break;
            };
            if reseeds >= k {
                break;
            }
            reseeds += 1;
            // Ties go to the lowest id.
            let mut far = alive[0];
            let mut far_d = -1.0f64;
            for &a in alive {
                let ci = nearest_centroid(nodes[a].pos, &centroids, &counts);
                let d = nodes[a].pos.distance_sq(&centroids[ci]);
                if d > far_d {
                    far_d = d;
                    far = a;
                }
            }
            centroids[empty] = nodes[far].pos;
        }

        // Update step.
        let mut sums = vec![(0.0f64, 0.0f64, 0usize); k];
        for (slot, &a) in alive.iter().enumerate() {
            let s = &mut sums[assignment[slot]];
            s.0 += nodes[a].pos.x;
            s.1 += nodes[a].pos.y;
            s.2 += 1;
        }
        let mut max_move = 0.0f64;
        for (ci, &(sx, sy, cnt)) in sums.iter().enumerate() {
            if cnt > 0 {
                let next = Point::new(sx / cnt as f64, sy / cnt as f64);
                max_move = max_move.max(centroids[ci].distance(&next));
                centroids[ci] = next;
            }
        }
        if max_move <= tolerance {
            break;
        }
    }

    let mut clusters: Vec<(Point, Vec<usize>)> =
        centroids.iter().map(|&c| (c, Vec::new())).collect();
    for (slot, &a) in alive.iter().enumerate() {
        clusters[assignment[slot]].1.push(a);
    }
    clusters.retain(|(_, members)| !members.is_empty());
    clusters
}

/// Nearest centroid among those with members (all of them when none are
/// flagged empty); ties resolve to the lowest index.
fn nearest_centroid(pos: Point, centroids: &[Point], counts: &[usize]) -> usize {
    let mut best = usize::MAX;
    let mut best_d = f64::INFINITY;
    for (ci, c) in centroids.iter().enumerate() {
        if counts[ci] == 0 {
            continue;
        }
        let d = pos.distance_sq(c);
        if d < best_d {
            best_d = d;
            best = ci;
        }
    }
    if best == usize::MAX {
        0
    } else {
        best
    }
}

impl Protocol for KmeansWsn {
    fn kind(&self) -> ProtocolKind {
        ProtocolKind::Kmeans
    }

    fn setup(&mut self, ctx: &RoundCtx) -> RoundPlan {
        let n = ctx.nodes.len();
        let mut plan = RoundPlan::empty(n);

        // id/position/energy reports up, result broadcast down.
        let rx = ctx.radio.rx_energy(ctx.radio.ctrl_bits);
        for node in ctx.nodes.iter().filter(|nd| nd.alive) {
            plan.control[node.id] +=
                ctx.radio.tx_energy(ctx.radio.ctrl_bits, node.pos.distance(&ctx.bs)) + rx;
            plan.bs_control_senders.push(node.id);
        }

        let alive = ctx.alive_ids();
        let clusters: Vec<(Point, Vec<usize>)> = if alive.len() <= self.k_clusters {
            // Every node its own cluster and its own head.
            alive.iter().map(|&a| (ctx.nodes[a].pos, vec![a])).collect()
        } else {
            self.lloyd(ctx, &alive)
        };

        for (centroid, members) in &clusters {
            let head = pick_head(members, centroid, ctx.nodes);
            plan.ch_set.push(head);
            for &m in members {
                if m != head {
                    plan.membership[m] = MemberTarget::Ch(head);
                }
            }
        }
        plan.ch_set.sort_unstable();
        plan.uplinks = vec![Uplink::ToBs; plan.ch_set.len()];
        plan
    }
}

/// Head choice: maximum residual energy, ties by distance to the centroid,
/// then by id.
fn pick_head(members: &[usize], centroid: &Point, nodes: &[Node]) -> usize {
    let mut best = members[0];
    for &m in &members[1..] {
        let better = nodes[m].energy > nodes[best].energy
            || (nodes[m].energy == nodes[best].energy
                && (nodes[m].pos.distance_sq(centroid) < nodes[best].pos.distance_sq(centroid)
                    || (nodes[m].pos.distance_sq(centroid) == nodes[best].pos.distance_sq(centroid)
                        && m < best)));
        if better {
            best = m;
        }
    }
    best
}

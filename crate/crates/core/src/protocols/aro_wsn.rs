//! Fixed rank-order clustering with energy-gated head rotation.
//!
//! Clustering happens exactly once, before the first round, from the one-off
//! position upload. Afterwards only heads rotate: a head keeps its role
//! while its residual energy is at or above the network mean; otherwise
//! random alive members are drawn (at most cluster-size draws, max-energy
//! fallback) until one at or above the mean takes over and advertises.

use crate::clustering::{aro_cluster, ClusterPartition, MergeRule};
use crate::neighbors::build_knn;
use crate::rng::Rng;
use crate::topology::Node;

use super::{MemberTarget, Protocol, ProtocolKind, RoundCtx, RoundPlan, Uplink};

pub struct AroWsn {
    knn_k: usize,
    merge_threshold: f64,
    merge_rule: MergeRule,
    partition: Option<ClusterPartition>,
    retired: Vec<bool>,
    rng: Rng,
}

impl AroWsn {
    pub fn new(knn_k: usize, merge_threshold: f64, merge_rule: MergeRule, rng: Rng) -> Self {
        AroWsn {
            knn_k,
            merge_threshold,
            merge_rule,
            partition: None,
            retired: Vec::new(),
            rng,
        }
    }

    pub fn partition(&self) -> Option<&ClusterPartition> {
        self.partition.as_ref()
    }

    fn alive_members<'a>(&self, cluster: usize, nodes: &'a [Node]) -> Vec<usize> {
        self.partition
            .as_ref()
            .unwrap()
            .members(cluster)
            .iter()
            .copied()
            .filter(|&m| nodes[m].alive)
            .collect()
    }
}

/// Max pairwise distance among the given members.
fn diameter(members: &[usize], nodes: &[Node]) -> f64 {
    let mut d = 0.0f64;
    for (i, &a) in members.iter().enumerate() {
        for &b in &members[i + 1..] {
            d = d.max(nodes[a].pos.distance(&nodes[b].pos));
        }
    }
    d
}

impl Protocol for AroWsn {
    fn kind(&self) -> ProtocolKind {
        ProtocolKind::AroWsn
    }

    fn init(&mut self, ctx: &RoundCtx) -> Option<Vec<f64>> {
        let positions: Vec<_> = ctx.nodes.iter().map(|n| n.pos).collect();
        let k = self.knn_k.min(positions.len() - 1).max(1);
        let table = build_knn(&positions, k).expect("field has at least 2 nodes");
        let outcome = aro_cluster(&table, self.merge_threshold, self.merge_rule);
        self.retired = vec![false; outcome.partition.n_clusters()];
        self.partition = Some(outcome.partition);

        // One-off position report to the base station.
        let charges = ctx
            .nodes
            .iter()
            .map(|n| ctx.radio.tx_energy(ctx.radio.ctrl_bits, n.pos.distance(&ctx.bs)))
            .collect();
        Some(charges)
    }

    fn setup(&mut self, ctx: &RoundCtx) -> RoundPlan {
        let n = ctx.nodes.len();
        let mean = ctx.mean_alive_energy;
        let mut plan = RoundPlan::empty(n);
        let n_clusters = self.partition.as_ref().unwrap().n_clusters();

        for cluster in 0..n_clusters {
            if self.retired[cluster] {
                continue;
            }
            let alive = self.alive_members(cluster, ctx.nodes);
            if alive.is_empty() {
                self.retired[cluster] = true;
                self.partition.as_mut().unwrap().clear_head(cluster);
                continue;
            }

            let current = self.partition.as_ref().unwrap().head(cluster);
            let keep = current
                .map(|h| ctx.nodes[h].alive && ctx.nodes[h].energy >= mean)
                .unwrap_or(false);
            let head = if keep {
                current.unwrap()
            } else {
                // Bounded uniform draws with replacement, then the richest
                // member as fallback.
                let mut choice = None;
                for _ in 0..alive.len() {
                    let cand = alive[self.rng.gen_index(alive.len())];
                    if ctx.nodes[cand].energy >= mean {
                        choice = Some(cand);
                        break;
                    }
                }
                let new_head = choice.unwrap_or_else(|| {
                    *alive
                        .iter()
                        .max_by(|&&a, &&b| {
                            ctx.nodes[a]
                                .energy
                                .partial_cmp(&ctx.nodes[b].energy)
                                .unwrap()
                                .then(b.cmp(&a))
                        })
                        .unwrap()
                });
                self.partition.as_mut().unwrap().set_head(cluster, new_head);

                // New head advertises across the cluster; one control note
                // goes up to the BS.
                let diam = diameter(&alive, ctx.nodes);
                plan.control[new_head] += ctx.radio.tx_energy(ctx.radio.ctrl_bits, diam);
                let rx = ctx.radio.rx_energy(ctx.radio.ctrl_bits);
                for &m in &alive {
                    if m != new_head {
                        plan.control[m] += rx;
                    }
                }
                plan.ads_broadcast += 1;
                plan.bs_control_senders.push(new_head);
                new_head
            };

            plan.ch_set.push(head);
            for &m in &alive {
                if m != head {
                    plan.membership[m] = MemberTarget::Ch(head);
                }
            }
        }
        plan.ch_set.sort_unstable();
        plan.uplinks = vec![Uplink::ToBs; plan.ch_set.len()];
        plan
    }

    fn debug_dump(&self) -> Option<String> {
        self.partition.as_ref().map(|p| p.dump())
    }
}

#[cfg(test)]
mod tests {
    use super::super::testutil::TestWorld;
    use super::*;
    use crate::rng::{Rng, StreamId};

    fn make(world: &TestWorld, k: usize, c: f64, seed: u64) -> AroWsn {
        let mut aro = AroWsn::new(k, c, MergeRule::AsymPresence, Rng::stream(seed, StreamId::ChCandidate));
        let ctx = world.ctx(1);
        let charges = aro.init(&ctx).unwrap();
        assert_eq!(charges.len(), world.nodes.len());
        assert!(charges.iter().all(|&c| c > 0.0));
        aro
    }

    #[test]
    fn head_at_exact_mean_is_retained() {
        let mut world = TestWorld::from_positions(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)], 0.5);
        let mut aro = make(&world, 2, 1.5, 1);
        let plan1 = aro.setup(&world.ctx(1));
        assert_eq!(plan1.ads_broadcast, plan1.ch_set.len());
        let heads = plan1.ch_set.clone();
        // 0.25 is a dyadic rational: the mean of three equal 0.25 values is
        // exactly 0.25, putting every head exactly at the boundary.
        world.nodes[0].energy = 0.25;
        world.nodes[1].energy = 0.25;
        world.nodes[2].energy = 0.25;
        let plan2 = aro.setup(&world.ctx(2));
        assert_eq!(plan2.ch_set, heads);
        assert_eq!(plan2.ads_broadcast, 0);
        assert!(plan2.bs_control_senders.is_empty());
    }

    #[test]
    fn equal_energy_heads_never_churn() {
        let world = TestWorld::random(60, 13);
        let mut aro = make(&world, 6, 1.5, 13);
        let first = aro.setup(&world.ctx(1));
        for round in 2..=10 {
            let plan = aro.setup(&world.ctx(round));
            assert_eq!(plan.ch_set, first.ch_set, "round {round}");
            assert_eq!(plan.ads_broadcast, 0);
        }
    }

    #[test]
    fn singleton_cluster_node_is_permanent_head() {
        // An isolated node far from two tight blobs forms its own cluster.
        let mut positions = vec![(0.0, 0.0), (0.5, 0.0), (0.0, 0.5), (90.0, 90.0)];
        positions.extend([(10.0, 0.0), (10.5, 0.0), (10.0, 0.5)]);
        let mut world = TestWorld::from_positions(&positions, 0.5);
        let mut aro = make(&world, 2, 1.5, 7);
        let plan = aro.setup(&world.ctx(1));
        assert!(plan.ch_set.contains(&3));
        // Still head later even when poorer than the mean (it is the only
        // member, so the fallback re-selects it).
        world.nodes[3].energy = 0.01;
        let plan2 = aro.setup(&world.ctx(2));
        assert!(plan2.ch_set.contains(&3));
    }

    #[test]
    fn depleted_cluster_is_retired() {
        let mut positions = vec![(0.0, 0.0), (0.5, 0.0)];
        positions.extend([(80.0, 80.0), (80.5, 80.0)]);
        let mut world = TestWorld::from_positions(&positions, 0.5);
        let mut aro = make(&world, 1, 1.5, 3);
        let plan1 = aro.setup(&world.ctx(1));
        assert_eq!(plan1.ch_set.len(), 2);
        world.nodes[0].alive = false;
        world.nodes[0].energy = 0.0;
        world.nodes[1].alive = false;
        world.nodes[1].energy = 0.0;
        let plan2 = aro.setup(&world.ctx(2));
        assert_eq!(plan2.ch_set.len(), 1);
        let plan3 = aro.setup(&world.ctx(3));
        assert_eq!(plan3.ch_set.len(), 1);
    }

    #[test]
    fn below_mean_head_hands_over_with_advertisement() {
        let world0 = TestWorld::from_positions(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)], 0.5);
        let mut world = world0;
        let mut aro = make(&world, 3, 1.5, 21);
        let plan1 = aro.setup(&world.ctx(1));
        assert_eq!(plan1.ch_set.len(), 1);
        let old_head = plan1.ch_set[0];
        // Drain the head below the mean.
        world.nodes[old_head].energy = 0.1;
        let plan2 = aro.setup(&world.ctx(2));
        assert_eq!(plan2.ch_set.len(), 1);
        assert_ne!(plan2.ch_set[0], old_head);
        assert_eq!(plan2.ads_broadcast, 1);
        assert_eq!(plan2.bs_control_senders, plan2.ch_set);
    }

    #[test]
    fn all_below_mean_uses_max_energy_fallback() {
        // Two clusters; drain one cluster entirely below the global mean.
        let mut positions = vec![(0.0, 0.0), (0.5, 0.0), (1.0, 0.0)];
        positions.extend([(80.0, 80.0), (80.5, 80.0), (81.0, 80.0)]);
        let mut world = TestWorld::from_positions(&positions, 0.5);
        let mut aro = make(&world, 2, 1.5, 5);
        aro.setup(&world.ctx(1));
        world.nodes[0].energy = 0.10;
        world.nodes[1].energy = 0.12;
        world.nodes[2].energy = 0.11;
        let plan = aro.setup(&world.ctx(2));
        // Poor cluster's head must be its richest member, node 1.
        assert!(plan.ch_set.contains(&1));
    }
}

//! Centralized head selection at the base station.
//!
//! Every alive node uploads a position/energy report each round; the BS
//! filters out nodes below the mean residual energy, then picks `k_clusters`
//! heads from the remaining candidates by simulated annealing on the total
//! squared member-to-nearest-head distance, and broadcasts the result.

use crate::rng::Rng;
use crate::topology::Node;

use super::{nearest_head, MemberTarget, Protocol, ProtocolKind, RoundCtx, RoundPlan, Uplink};

pub struct LeachC {
    k_clusters: usize,
    proposals_per_ch: usize,
    rng: Rng,
}

impl LeachC {
    pub fn new(k_clusters: usize, proposals_per_ch: usize, rng: Rng) -> Self {
        LeachC {
            k_clusters: k_clusters.max(1),
            proposals_per_ch,
            rng,
        }
    }

    /// Squared-distance objective for a head set: sum over alive non-head
    /// nodes of squared distance to the nearest head.
    pub fn objective(ch_set: &[usize], nodes: &[Node]) -> f64 {
        nodes
            .iter()
            .filter(|n| n.alive && !ch_set.contains(&n.id))
            .map(|n| {
                ch_set
                    .iter()
                    .map(|&c| n.pos.distance_sq(&nodes[c].pos))
                    .fold(f64::INFINITY, f64::min)
            })
            .sum()
    }

    /// Annealed head selection among `candidates`. Exposed for the
    /// exhaustive-search comparison tests.
    pub fn select_heads(&mut self, ctx: &RoundCtx, candidates: &[usize], k_eff: usize) -> Vec<usize> {
        if candidates.len() <= k_eff {
            return candidates.to_vec();
        }
        let nodes = ctx.nodes;
        let alive = ctx.alive_ids();

        let mut current = self.rng.sample_distinct(candidates, k_eff);
        current.sort_unstable();
        let mut in_set = vec![false; nodes.len()];
        for &c in &current {
            in_set[c] = true;
        }

        // Nearest and second-nearest head caches over all alive nodes (the
        // head nodes keep caches too: they may leave the set later).
        let mut d1 = vec![(f64::INFINITY, usize::MAX); nodes.len()];
        let mut d2 = vec![(f64::INFINITY, usize::MAX); nodes.len()];
        let rebuild = |set: &[usize], d1: &mut Vec<(f64, usize)>, d2: &mut Vec<(f64, usize)>| {
            for &a in &alive {
                let mut best = (f64::INFINITY, usize::MAX);
                let mut second = (f64::INFINITY, usize::MAX);
                for &c in set {
                    let d = nodes[a].pos.distance_sq(&nodes[c].pos);
                    if d < best.0 {
                        second = best;
                        best = (d, c);
                    } else if d < second.0 {
                        second = (d, c);
                    }
                }
                d1[a] = best;
                d2[a] = second;
            }
        };
        rebuild(&current, &mut d1, &mut d2);

        let obj_of = |d1: &[(f64, usize)], in_set: &[bool]| -> f64 {
            alive
                .iter()
                .filter(|&&a| !in_set[a])
                .map(|&a| d1[a].0)
                .sum()
        };
        let mut cur_obj = obj_of(&d1, &in_set);
        let mut best_set = current.clone();
        let mut best_obj = cur_obj;

        let total = self.proposals_per_ch * k_eff;
        let stall_limit = (total / 5).max(2000);
        let t0 = (0.2 * cur_obj / k_eff as f64).max(1e-12);
        let alpha = (1e-4f64).powf(1.0 / total as f64);
        let mut temp = t0;
        let mut stall = 0usize;

        for _ in 0..total {
            temp *= alpha;
            let rm = current[self.rng.gen_index(k_eff)];
            let mut add = usize::MAX;
            for _ in 0..16 {
                let cand = candidates[self.rng.gen_index(candidates.len())];
                if !in_set[cand] {
                    add = cand;
                    break;
                }
            }
            if add == usize::MAX {
                continue;
            }

            // Objective of the swapped set from the caches plus one new
            // distance per node; the removed head rejoins the member sum.
            let mut new_obj = 0.0;
            for &a in &alive {
                if a == add || (in_set[a] && a != rm) {
                    continue;
                }
                let base = if d1[a].1 == rm { d2[a].0 } else { d1[a].0 };
                new_obj += base.min(nodes[a].pos.distance_sq(&nodes[add].pos));
            }

            let delta = new_obj - cur_obj;
            let accept = delta <= 0.0 || self.rng.next_f64() < (-delta / temp).exp();
            if accept {
                in_set[rm] = false;
                in_set[add] = true;
                let slot = current.iter().position(|&c| c == rm).unwrap();
                current[slot] = add;
                cur_obj = new_obj;
                // Repair caches: nodes whose top-2 involved the removed head
                // need a rescan; everyone else just merges the added head in.
                for &a in &alive {
                    if d1[a].1 == rm || d2[a].1 == rm {
                        let mut bst = (f64::INFINITY, usize::MAX);
                        let mut snd = (f64::INFINITY, usize::MAX);
                        for &c in &current {
                            let d = nodes[a].pos.distance_sq(&nodes[c].pos);
                            if d < bst.0 {
                                snd = bst;
                                bst = (d, c);
                            } else if d < snd.0 {
                                snd = (d, c);
                            }
                        }
                        d1[a] = bst;
                        d2[a] = snd;
                    } else {
                        let d = nodes[a].pos.distance_sq(&nodes[add].pos);
                        if d < d1[a].0 {
                            d2[a] = d1[a];
                            d1[a] = (d, add);
                        } else if d < d2[a].0 {
                            d2[a] = (d, add);
                        }
                    }
                }
                if cur_obj < best_obj - 1e-12 {
                    best_obj = cur_obj;
                    best_set = current.clone();
                    stall = 0;
                    continue;
                }
            }
            stall += 1;
            if stall >= stall_limit {
                break;
            }
        }
        best_set.sort_unstable();
        best_set
    }
}

impl Protocol for LeachC {
    fn kind(&self) -> ProtocolKind {
        ProtocolKind::LeachC
    }

    fn setup(&mut self, ctx: &RoundCtx) -> RoundPlan {
        let n = ctx.nodes.len();
        let mut plan = RoundPlan::empty(n);

        // Position/energy reports up, head-id broadcast down.
        let rx = ctx.radio.rx_energy(ctx.radio.ctrl_bits);
        for node in ctx.nodes.iter().filter(|nd| nd.alive) {
            plan.control[node.id] +=
                ctx.radio.tx_energy(ctx.radio.ctrl_bits, node.pos.distance(&ctx.bs)) + rx;
            plan.bs_control_senders.push(node.id);
        }

        let mean = ctx.mean_alive_energy;
        let mut candidates: Vec<usize> = ctx
            .nodes
            .iter()
            .filter(|nd| nd.alive && nd.energy >= mean)
            .map(|nd| nd.id)
            .collect();
        if candidates.is_empty() {
            // Degenerate numerics only; fall back to the richest node.
            let best = ctx
                .nodes
                .iter()
                .filter(|nd| nd.alive)
                .max_by(|a, b| a.energy.partial_cmp(&b.energy).unwrap().then(b.id.cmp(&a.id)))
                .map(|nd| nd.id);
            candidates.extend(best);
        }
        let k_eff = self.k_clusters.min(candidates.len());
        let heads = self.select_heads(ctx, &candidates, k_eff);

        plan.ch_set = heads;
        plan.uplinks = vec![Uplink::ToBs; plan.ch_set.len()];
        for node in ctx.nodes.iter().filter(|nd| nd.alive) {
            if !plan.ch_set.contains(&node.id) {
                plan.membership[node.id] =
                    MemberTarget::Ch(nearest_head(node.pos, &plan.ch_set, ctx.nodes));
            }
        }
        plan
    }
}

//! Distributed probabilistic cluster-head election.
//!
//! Each round, every eligible node draws uniform(0,1) and becomes a head if
//! the draw falls below the rotating threshold; heads advertise, everyone
//! else joins the nearest head. Eligibility (the set G) resets every
//! `ceil(1/p)` rounds so each surviving node serves exactly once per epoch.

use crate::rng::Rng;

use super::{nearest_head, MemberTarget, Protocol, ProtocolKind, RoundCtx, RoundPlan, Uplink};

/// Election threshold for a node at 0-based election round `r`. Nodes
/// outside G never elect; the threshold climbs to 1 at the end of an epoch.
pub fn leach_threshold(p: f64, r: usize, in_g: bool) -> f64 {
    debug_assert!(p > 0.0 && p < 1.0);
    if !in_g {
        return 0.0;
    }
    let epoch_len = (1.0 / p).ceil() as usize;
    let r_mod = (r % epoch_len) as f64;
    // The denominator is mathematically positive; the floor only guards
    // against rounding when 1/p is not integral.
    let denom = (1.0 - p * r_mod).max(1e-12);
    p / denom
}

pub struct Leach {
    p: f64,
    epoch_len: usize,
    in_g: Vec<bool>,
    rng: Rng,
}

impl Leach {
    pub fn new(p: f64, rng: Rng) -> Self {
        assert!(p > 0.0 && p < 1.0, "p must be in (0,1)");
        Leach {
            p,
            epoch_len: (1.0 / p).ceil() as usize,
            in_g: Vec::new(),
            rng,
        }
    }

    pub fn epoch_len(&self) -> usize {
        self.epoch_len
    }

    /// Election + cluster formation + control pricing, shared with
    /// FUZZY-LEACH (which post-processes the plan).
    pub(super) fn elect_and_form(&mut self, ctx: &RoundCtx) -> RoundPlan {
        let n = ctx.nodes.len();
        let r = ctx.round - 1; // 0-based election round
        if self.in_g.len() != n {
            self.in_g = vec![true; n];
        }
        if r % self.epoch_len == 0 {
            for node in ctx.nodes {
                self.in_g[node.id] = node.alive;
            }
        } else {
            // G never contains dead nodes.
            for node in ctx.nodes {
                if !node.alive {
                    self.in_g[node.id] = false;
                }
            }
        }

        let mut plan = RoundPlan::empty(n);
        for node in ctx.nodes.iter().filter(|nd| nd.alive) {
            let t = leach_threshold(self.p, r, self.in_g[node.id]);
            if t > 0.0 && self.rng.next_f64() < t {
                plan.ch_set.push(node.id);
                self.in_g[node.id] = false;
            }
        }
        plan.uplinks = vec![Uplink::ToBs; plan.ch_set.len()];
        plan.ads_broadcast = plan.ch_set.len();

        if plan.ch_set.is_empty() {
            for node in ctx.nodes.iter().filter(|nd| nd.alive) {
                plan.membership[node.id] = MemberTarget::DirectToBs;
            }
            return plan;
        }

        // Advertisements: each head broadcasts at worst-case range; every
        // other alive node receives every broadcast.
        let ad_tx = ctx.radio.tx_energy(ctx.radio.ctrl_bits, ctx.field_diagonal);
        let ad_rx = ctx.radio.rx_energy(ctx.radio.ctrl_bits);
        let n_ads = plan.ch_set.len() as f64;
        for node in ctx.nodes.iter().filter(|nd| nd.alive) {
            let is_ch = plan.ch_set.binary_search(&node.id).is_ok();
            if is_ch {
                plan.control[node.id] += ad_tx + (n_ads - 1.0) * ad_rx;
            } else {
                plan.control[node.id] += n_ads * ad_rx;
                plan.membership[node.id] =
                    MemberTarget::Ch(nearest_head(node.pos, &plan.ch_set, ctx.nodes));
            }
        }
        plan
    }
}

impl Protocol for Leach {
    fn kind(&self) -> ProtocolKind {
        ProtocolKind::Leach
    }

    fn setup(&mut self, ctx: &RoundCtx) -> RoundPlan {
        self.elect_and_form(ctx)
    }
}

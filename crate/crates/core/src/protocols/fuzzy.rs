//! LEACH with a fuzzy-selected superior head.
//!
//! Election and cluster formation are plain LEACH. A Mamdani inference
//! system then scores every head on residual energy and centrality (mobility
//! is pinned to zero for static nodes); the highest-chance head becomes the
//! superior, and all other heads relay their aggregates through it instead
//! of uplinking directly.

use crate::rng::Rng;

use super::{Leach, Protocol, ProtocolKind, RoundCtx, RoundPlan, Uplink};

/// Triangular membership over `[a, c]` peaking at `b`. Shoulders (`a == b`
/// or `b == c`) evaluate to 1 at the flat end.
fn tri(x: f64, a: f64, b: f64, c: f64) -> f64 {
    if x < a || x > c {
        0.0
    } else if x == b {
        1.0
    } else if x < b {
        (x - a) / (b - a)
    } else {
        (c - x) / (c - b)
    }
}

const IN_SETS: [(f64, f64, f64); 3] = [
    (0.0, 0.0, 0.5), // low
    (0.0, 0.5, 1.0), // medium
    (0.5, 1.0, 1.0), // high
];

const OUT_SETS: [(f64, f64, f64); 5] = [
    (0.0, 0.0, 0.25),   // very low
    (0.0, 0.25, 0.5),   // low
    (0.25, 0.5, 0.75),  // medium
    (0.5, 0.75, 1.0),   // high
    (0.75, 1.0, 1.0),   // very high
];

/// Output level for each (energy level, centrality level) pair; monotone in
/// both inputs.
const RULES: [[usize; 3]; 3] = [
    [0, 1, 2], // energy low
    [1, 2, 3], // energy medium
    [2, 3, 4], // energy high
];

const DEFUZZ_STEPS: usize = 200;

/// Two-input Mamdani system with min implication, max aggregation and
/// centroid defuzzification on a fixed grid.
#[derive(Debug, Clone, Copy, Default)]
pub struct Mamdani;

impl Mamdani {
    /// Chance score in [0, 1] for normalized energy and centrality.
    pub fn chance(&self, energy: f64, centrality: f64) -> f64 {
        let e = energy.clamp(0.0, 1.0);
        let c = centrality.clamp(0.0, 1.0);
        let mu_e: Vec<f64> = IN_SETS.iter().map(|&(a, b, cc)| tri(e, a, b, cc)).collect();
        let mu_c: Vec<f64> = IN_SETS.iter().map(|&(a, b, cc)| tri(c, a, b, cc)).collect();

        let mut strength = [0.0f64; 5];
        for (ei, &me) in mu_e.iter().enumerate() {
            for (ci, &mc) in mu_c.iter().enumerate() {
                let s = me.min(mc);
                let out = RULES[ei][ci];
                strength[out] = strength[out].max(s);
            }
        }

        let mut num = 0.0;
        let mut den = 0.0;
        for step in 0..=DEFUZZ_STEPS {
            let y = step as f64 / DEFUZZ_STEPS as f64;
            let mut mu = 0.0f64;
            for (oi, &(a, b, cc)) in OUT_SETS.iter().enumerate() {
                mu = mu.max(strength[oi].min(tri(y, a, b, cc)));
            }
            num += y * mu;
            den += mu;
        }
        if den == 0.0 {
            0.0
        } else {
            num / den
        }
    }
}

pub struct FuzzyLeach {
    leach: Leach,
    fis: Mamdani,
}

impl FuzzyLeach {
    pub fn new(p: f64, rng: Rng) -> Self {
        FuzzyLeach {
            leach: Leach::new(p, rng),
            fis: Mamdani,
        }
    }

    /// Normalized inputs for a head: residual energy over initial energy,
    /// and closeness of its members (1 at zero mean distance, 0 at the field
    /// diagonal). A head with no members is maximally central.
    fn descriptors(ctx: &RoundCtx, plan: &RoundPlan, head: usize) -> (f64, f64) {
        let energy = (ctx.nodes[head].energy / ctx.initial_energy).clamp(0.0, 1.0);
        let mut sum = 0.0;
        let mut count = 0usize;
        for node in ctx.nodes.iter().filter(|n| n.alive) {
            if plan.membership[node.id] == super::MemberTarget::Ch(head) {
                sum += node.pos.distance(&ctx.nodes[head].pos);
                count += 1;
            }
        }
        let mean_dist = if count == 0 { 0.0 } else { sum / count as f64 };
        let centrality = (1.0 - mean_dist / ctx.field_diagonal).clamp(0.0, 1.0);
        (energy, centrality)
    }
}

impl Protocol for FuzzyLeach {
    fn kind(&self) -> ProtocolKind {
        ProtocolKind::FuzzyLeach
    }

    fn setup(&mut self, ctx: &RoundCtx) -> RoundPlan {
        let mut plan = self.leach.elect_and_form(ctx);
        if plan.ch_set.len() < 2 {
            return plan; // a single head is trivially superior
        }
        let mut superior = plan.ch_set[0];
        let mut best = f64::NEG_INFINITY;
        for &ch in &plan.ch_set {
            let (e, c) = Self::descriptors(ctx, &plan, ch);
            let chance = self.fis.chance(e, c);
            if chance > best {
                best = chance;
                superior = ch;
            }
        }
        for (slot, &ch) in plan.ch_set.iter().enumerate() {
            plan.uplinks[slot] = if ch == superior {
                Uplink::ToBs
            } else {
                Uplink::Via(superior)
            };
        }
        plan
    }
}

//! The five clustering protocols behind one per-round contract.
//!
//! A protocol's [`setup`](Protocol::setup) runs the round's cluster/CH
//! determination and returns a [`RoundPlan`]: the cluster-head set, the
//! member-to-head assignment, per-node control-phase charges, and the
//! control messages bound for the base station. [`steady_state`] then prices
//! the data phase of that plan. The engine applies both charge vectors at
//! once at the end of the round.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::SimConfig;
use crate::radio::RadioParams;
use crate::rng::{Rng, StreamId};
use crate::topology::{Node, Point};

mod aro_wsn;
mod fuzzy;
mod kmeans;
mod leach;
mod leach_c;

pub use aro_wsn::AroWsn;
pub use fuzzy::{FuzzyLeach, Mamdani};
pub use kmeans::KmeansWsn;
pub use leach::{leach_threshold, Leach};
pub use leach_c::LeachC;

/// Protocol selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolKind {
    AroWsn,
    Leach,
    LeachC,
    Kmeans,
    FuzzyLeach,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 5] = [
        ProtocolKind::AroWsn,
        ProtocolKind::Leach,
        ProtocolKind::LeachC,
        ProtocolKind::Kmeans,
        ProtocolKind::FuzzyLeach,
    ];

    /// Lowercase identifier used in CLI arguments and CSV columns.
    pub fn slug(&self) -> &'static str {
        match self {
            ProtocolKind::AroWsn => "aro-wsn",
            ProtocolKind::Leach => "leach",
            ProtocolKind::LeachC => "leach-c",
            ProtocolKind::Kmeans => "kmeans",
            ProtocolKind::FuzzyLeach => "fuzzy-leach",
        }
    }
}

impl std::fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let label = match self {
            ProtocolKind::AroWsn => "ARO-WSN",
            ProtocolKind::Leach => "LEACH",
            ProtocolKind::LeachC => "LEACH-C",
            ProtocolKind::Kmeans => "K-MEANS",
            ProtocolKind::FuzzyLeach => "FUZZY-LEACH",
        };
        f.write_str(label)
    }
}

#[derive(Debug, Error, PartialEq)]
#[error("unknown protocol {0:?} (expected one of aro-wsn, leach, leach-c, kmeans, fuzzy-leach)")]
pub struct UnknownProtocol(pub String);

impl std::str::FromStr for ProtocolKind {
    type Err = UnknownProtocol;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "aro-wsn" | "arowsn" | "aro" => Ok(ProtocolKind::AroWsn),
            "leach" => Ok(ProtocolKind::Leach),
            "leach-c" | "leachc" => Ok(ProtocolKind::LeachC),
            "kmeans" | "k-means" => Ok(ProtocolKind::Kmeans),
            "fuzzy-leach" | "fuzzy" | "fuzzyleach" => Ok(ProtocolKind::FuzzyLeach),
            _ => Err(UnknownProtocol(s.to_string())),
        }
    }
}

/// Where a non-head node sends its data this round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MemberTarget {
    /// Send to this cluster head.
    Ch(usize),
    /// Send straight to the base station (no-head fallback).
    DirectToBs,
    /// No data role this round (cluster heads and dead nodes).
    None,
}

/// Where a cluster head sends its aggregate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Uplink {
    ToBs,
    /// Relay through another head (the FUZZY-LEACH superior hop).
    Via(usize),
}

/// Outcome of a protocol's setup phase.
#[derive(Debug, Clone)]
pub struct RoundPlan {
    /// Cluster heads for the round, ascending id.
    pub ch_set: Vec<usize>,
    /// Uplink per head, parallel to `ch_set`.
    pub uplinks: Vec<Uplink>,
    /// Data target per node id.
    pub membership: Vec<MemberTarget>,
    /// Control-phase energy charges per node id, joules.
    pub control: Vec<f64>,
    /// Advertisement broadcasts this round.
    pub ads_broadcast: usize,
    /// Senders of control messages addressed to the base station.
    pub bs_control_senders: Vec<usize>,
}

impl RoundPlan {
    pub fn empty(n: usize) -> Self {
        RoundPlan {
            ch_set: Vec::new(),
            uplinks: Vec::new(),
            membership: vec![MemberTarget::None; n],
            control: vec![0.0; n],
            ads_broadcast: 0,
            bs_control_senders: Vec::new(),
        }
    }

    /// Plan invariants: heads alive, members map to heads in the set or to
    /// the base station.
    pub fn validate(&self, nodes: &[Node]) -> Result<(), String> {
        for &ch in &self.ch_set {
            if !nodes[ch].alive {
                return Err(format!("cluster head {ch} is dead"));
            }
        }
        if self.uplinks.len() != self.ch_set.len() {
            return Err("uplinks not parallel to ch_set".into());
        }
        for (id, m) in self.membership.iter().enumerate() {
            if let MemberTarget::Ch(h) = m {
                if !self.ch_set.contains(h) {
                    return Err(format!("node {id} maps to non-head {h}"));
                }
            }
        }
        Ok(())
    }
}

/// Read-only view of the world handed to protocols each round.
pub struct RoundCtx<'a> {
    pub nodes: &'a [Node],
    pub bs: Point,
    pub radio: &'a RadioParams,
    /// 1-based round index.
    pub round: usize,
    pub field_width: f64,
    pub field_height: f64,
    pub field_diagonal: f64,
    pub initial_energy: f64,
    /// Mean residual energy over alive nodes; NaN when none are alive.
    pub mean_alive_energy: f64,
    pub alive_count: usize,
}

impl RoundCtx<'_> {
    pub fn alive_ids(&self) -> Vec<usize> {
        self.nodes
            .iter()
            .filter(|n| n.alive)
            .map(|n| n.id)
            .collect()
    }
}

/// Per-round protocol contract.
pub trait Protocol {
    fn kind(&self) -> ProtocolKind;

    /// One-time work before the first round. May return per-node energy
    /// charges (the ARO-WSN position-report upload). Default: nothing.
    fn init(&mut self, _ctx: &RoundCtx) -> Option<Vec<f64>> {
        None
    }

    /// Cluster/head determination and control-phase pricing for one round.
    fn setup(&mut self, ctx: &RoundCtx) -> RoundPlan;

    /// Inspection dump of fixed protocol structure (the ARO-WSN partition).
    fn debug_dump(&self) -> Option<String> {
        None
    }
}

/// Instantiate a protocol from configuration. All protocol randomness is
/// derived from `master_seed` via purpose streams.
pub fn make_protocol(kind: ProtocolKind, cfg: &SimConfig, master_seed: u64) -> Box<dyn Protocol> {
    let pp = &cfg.protocol;
    let k_clusters = pp.effective_k_clusters(cfg.field.n_nodes);
    match kind {
        ProtocolKind::Leach => Box::new(Leach::new(
            pp.p,
            Rng::stream(master_seed, StreamId::LeachElection),
        )),
        ProtocolKind::LeachC => Box::new(LeachC::new(
            k_clusters,
            pp.anneal_proposals_per_ch,
            Rng::stream(master_seed, StreamId::Annealing),
        )),
        ProtocolKind::Kmeans => Box::new(KmeansWsn::new(
            k_clusters,
            pp.kmeans_tolerance,
            pp.kmeans_max_iters,
            Rng::stream(master_seed, StreamId::KmeansInit),
        )),
        ProtocolKind::FuzzyLeach => Box::new(FuzzyLeach::new(
            pp.p,
            Rng::stream(master_seed, StreamId::FuzzyElection),
        )),
        ProtocolKind::AroWsn => Box::new(AroWsn::new(
            pp.knn_k,
            pp.merge_threshold,
            pp.merge_rule,
            Rng::stream(master_seed, StreamId::ChCandidate),
        )),
    }
}

/// Data-phase outcome: energy charges plus the BS-bound data messages,
/// attributed to their senders so delivery can be voided if the sender dies
/// within the round.
#[derive(Debug)]
pub struct SteadyOutcome {
    pub charges: Vec<f64>,
    /// `(sender, message_count)` pairs for data arriving at the BS.
    pub bs_msgs: Vec<(usize, u64)>,
}

/// Price the data phase of a plan: members transmit to their heads, heads
/// receive, aggregate and uplink; direct senders go straight to the BS.
/// Relayed heads hand their aggregate to the relay, which folds the received
/// aggregates into its own and delivers a single message.
pub fn steady_state(plan: &RoundPlan, nodes: &[Node], radio: &RadioParams, bs: Point) -> SteadyOutcome {
    let n = nodes.len();
    let mut charges = vec![0.0; n];
    let mut member_count = vec![0u32; n];
    let mut relayed = vec![0u32; n];
    let mut bs_msgs: Vec<(usize, u64)> = Vec::new();

    for node in nodes.iter().filter(|n| n.alive) {
        match plan.membership[node.id] {
            MemberTarget::Ch(h) => {
                charges[node.id] += radio.tx_energy(radio.msg_bits, node.pos.distance(&nodes[h].pos));
                charges[h] += radio.rx_energy(radio.msg_bits);
                member_count[h] += 1;
            }
            MemberTarget::DirectToBs => {
                charges[node.id] += radio.tx_energy(radio.msg_bits, node.pos.distance(&bs));
                bs_msgs.push((node.id, 1));
            }
            MemberTarget::None => {}
        }
    }

    // Relay hops first so received-aggregate counts exist before the uplinks.
    for (&ch, &uplink) in plan.ch_set.iter().zip(&plan.uplinks) {
        charges[ch] += radio.aggregation_energy(radio.msg_bits, member_count[ch] + 1);
        if let Uplink::Via(relay) = uplink {
            charges[ch] += radio.tx_energy(radio.msg_bits, nodes[ch].pos.distance(&nodes[relay].pos));
            charges[relay] += radio.rx_energy(radio.msg_bits);
            relayed[relay] += 1;
        }
    }
    for (&ch, &uplink) in plan.ch_set.iter().zip(&plan.uplinks) {
        if uplink == Uplink::ToBs {
            if relayed[ch] > 0 {
                charges[ch] += radio.aggregation_energy(radio.msg_bits, relayed[ch]);
            }
            charges[ch] += radio.tx_energy(radio.msg_bits, nodes[ch].pos.distance(&bs));
            bs_msgs.push((ch, 1));
        }
    }

    SteadyOutcome { charges, bs_msgs }
}

/// Nearest head by Euclidean distance; ties resolve to the lowest id
/// because `ch_set` is ascending and the comparison is strict.
pub(crate) fn nearest_head(pos: Point, ch_set: &[usize], nodes: &[Node]) -> usize {
    debug_assert!(!ch_set.is_empty());
    let mut best = ch_set[0];
    let mut best_d = pos.distance_sq(&nodes[best].pos);
    for &c in &ch_set[1..] {
        let d = pos.distance_sq(&nodes[c].pos);
        if d < best_d {
            best_d = d;
            best = c;
        }
    }
    best
}

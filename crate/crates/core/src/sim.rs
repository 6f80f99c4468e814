//! The round loop.
//!
//! One round = setup (cluster/head determination, control charges) followed
//! by steady state (data charges, BS deliveries). Charges apply at the end
//! of the round, clamped at zero; a node whose battery cannot cover its
//! pending transmissions spends everything, dies, and delivers nothing to
//! the base station that round. Dead nodes never transmit or receive again.
//!
//! Message accounting: the per-round BS counter covers data uplinks, direct
//! sends, and per-round control reports addressed to the BS. The one-off
//! pre-round position upload of the fixed-clustering path is charged as
//! energy but precedes round 1, so it is not part of the message series.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::SimConfig;
use crate::protocols::{make_protocol, steady_state, ProtocolKind, RoundCtx};
use crate::topology::{base_station_position, generate_field, FieldError, Node};

/// One CSV row: state after the round's charges were applied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: u32,
    pub alive: u32,
    pub residual_j: f64,
    pub bs_msgs_cum: u64,
    pub ads: u32,
}

/// Full outcome of one simulation run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimResult {
    pub protocol: ProtocolKind,
    pub seed: u64,
    pub records: Vec<RoundRecord>,
    /// Round of the first node death; 0 when nodes start dead or die in the
    /// pre-round setup charge.
    pub fnd: Option<u32>,
    /// Round of the last node death; unset when the run was truncated.
    pub lnd: Option<u32>,
    pub truncated: bool,
    pub initial_total_energy: f64,
    pub final_total_energy: f64,
    /// Sum of every decrement actually applied, for the conservation check.
    pub total_charged: f64,
    /// Rounds in which a planned head died and its members' data was lost.
    pub lost_rounds: u64,
    /// Fixed-structure inspection dump (the ARO-WSN cluster partition).
    pub partition_dump: Option<String>,
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("invalid configuration: {0}")]
    Config(String),
}

/// Mean residual energy over alive nodes. Callers must guarantee at least
/// one alive node.
pub fn network_mean_energy(nodes: &[Node]) -> f64 {
    let mut sum = 0.0;
    let mut count = 0usize;
    for n in nodes.iter().filter(|n| n.alive) {
        sum += n.energy;
        count += 1;
    }
    assert!(count > 0, "mean energy undefined with no alive nodes");
    sum / count as f64
}

/// Decrement energies, clamping at zero; newly dead nodes are returned.
/// Charging a dead node is an accounting error in a protocol.
pub fn apply_charges(nodes: &mut [Node], charges: &[f64]) -> (f64, Vec<usize>) {
    let mut applied = 0.0;
    let mut died = Vec::new();
    for (node, &charge) in nodes.iter_mut().zip(charges) {
        debug_assert!(charge >= 0.0);
        assert!(
            node.alive || charge == 0.0,
            "charge {charge} on dead node {}",
            node.id
        );
        if charge == 0.0 {
            continue;
        }
        let dec = charge.min(node.energy);
        node.energy -= dec;
        applied += dec;
        if node.energy <= 0.0 {
            node.energy = 0.0;
            node.alive = false;
            died.push(node.id);
        }
    }
    (applied, died)
}

/// Run one protocol on one seeded field until the last node dies or the
/// round cap is hit. Deterministic for a fixed `(config, protocol)`.
pub fn run_simulation(cfg: &SimConfig, kind: ProtocolKind) -> Result<SimResult, SimError> {
    cfg.validate().map_err(|e| SimError::Config(e.to_string()))?;
    let mut nodes = generate_field(&cfg.field)?;
    let bs = base_station_position(&cfg.field);
    let seed = cfg.field.rng_seed;
    let diagonal = cfg.field.diagonal();

    let initial_total: f64 = nodes.iter().map(|n| n.energy).sum();
    let mut result = SimResult {
        protocol: kind,
        seed,
        records: Vec::new(),
        fnd: None,
        lnd: None,
        truncated: false,
        initial_total_energy: initial_total,
        final_total_energy: initial_total,
        total_charged: 0.0,
        lost_rounds: 0,
        partition_dump: None,
    };

    let alive_now = |nodes: &[Node]| nodes.iter().filter(|n| n.alive).count();
    if alive_now(&nodes) == 0 {
        result.fnd = Some(0);
        result.lnd = Some(0);
        result.final_total_energy = 0.0;
        return Ok(result);
    }

    let mut protocol = make_protocol(kind, cfg, seed);

    // One-time pre-round work (the fixed-clustering position upload).
    {
        let ctx = make_ctx(&nodes, bs, cfg, 0, diagonal);
        if let Some(init_charges) = protocol.init(&ctx) {
            result.partition_dump = protocol.debug_dump();
            let (applied, died) = apply_charges(&mut nodes, &init_charges);
            result.total_charged += applied;
            if !died.is_empty() {
                result.fnd = Some(0);
            }
            if alive_now(&nodes) == 0 {
                result.lnd = Some(0);
                result.final_total_energy = 0.0;
                return Ok(result);
            }
        }
    }

    let mut bs_msgs_cum = 0u64;
    for round in 1..=cfg.engine.round_cap {
        let ctx = make_ctx(&nodes, bs, cfg, round, diagonal);
        let plan = protocol.setup(&ctx);
        debug_assert!(plan.validate(&nodes).is_ok());
        let steady = steady_state(&plan, &nodes, &cfg.radio, bs);

        let charges: Vec<f64> = plan
            .control
            .iter()
            .zip(&steady.charges)
            .map(|(c, s)| c + s)
            .collect();
        let (applied, died) = apply_charges(&mut nodes, &charges);
        result.total_charged += applied;

        // Deliveries: senders that died this round delivered nothing.
        bs_msgs_cum += plan
            .bs_control_senders
            .iter()
            .filter(|&&s| nodes[s].alive)
            .count() as u64;
        bs_msgs_cum += steady
            .bs_msgs
            .iter()
            .filter(|&&(s, _)| nodes[s].alive)
            .map(|&(_, m)| m)
            .sum::<u64>();
        result.lost_rounds += plan.ch_set.iter().filter(|&&c| !nodes[c].alive).count() as u64;

        let alive = alive_now(&nodes);
        result.records.push(RoundRecord {
            round: round as u32,
            alive: alive as u32,
            residual_j: nodes.iter().map(|n| n.energy).sum(),
            bs_msgs_cum,
            ads: plan.ads_broadcast as u32,
        });

        if result.fnd.is_none() && !died.is_empty() {
            result.fnd = Some(round as u32);
        }
        if alive == 0 {
            result.lnd = Some(round as u32);
            break;
        }
    }
    result.truncated = result.lnd.is_none();
    result.final_total_energy = nodes.iter().map(|n| n.energy).sum();
    Ok(result)
}

fn make_ctx<'a>(
    nodes: &'a [Node],
    bs: crate::topology::Point,
    cfg: &'a SimConfig,
    round: usize,
    diagonal: f64,
) -> RoundCtx<'a> {
    let alive_count = nodes.iter().filter(|n| n.alive).count();
    let mean = if alive_count == 0 {
        f64::NAN
    } else {
        network_mean_energy(nodes)
    };
    RoundCtx {
        nodes,
        bs,
        radio: &cfg.radio,
        round,
        field_width: cfg.field.width,
        field_height: cfg.field.height,
        field_diagonal: diagonal,
        initial_energy: cfg.field.initial_energy,
        mean_alive_energy: mean,
        alive_count,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radio::RadioParams;
    use crate::topology::Point;

    fn small_cfg(n: usize, energy: f64, seed: u64) -> SimConfig {
        let mut cfg = SimConfig::default();
        cfg.field.n_nodes = n;
        cfg.field.initial_energy = energy;
        cfg.field.rng_seed = seed;
        cfg
    }

    #[test]
    fn zero_initial_energy_means_instant_end() {
        let cfg = small_cfg(10, 0.0, 1);
        for kind in ProtocolKind::ALL {
            let r = run_simulation(&cfg, kind).unwrap();
            assert_eq!(r.fnd, Some(0));
            assert_eq!(r.lnd, Some(0));
            assert!(r.records.is_empty());
            assert_eq!(r.total_charged, 0.0);
        }
    }

    #[test]
    fn two_nodes_with_one_round_budget_die_in_round_one() {
        // Hand-compute the K-means round-1 charges for both nodes; any
        // budget strictly below the cheaper one kills both in round 1.
        let cfg = small_cfg(2, 1.0, 5);
        let nodes = generate_field(&cfg.field).unwrap();
        let bs = base_station_position(&cfg.field);
        let r = RadioParams::default();
        // k_clusters = ceil(0.05*2) = 1: one cluster, head = closer to the
        // two-node centroid, member transmits to the head.
        let centroid = Point::new(
            (nodes[0].pos.x + nodes[1].pos.x) / 2.0,
            (nodes[0].pos.y + nodes[1].pos.y) / 2.0,
        );
        let head = if nodes[0].pos.distance_sq(&centroid) <= nodes[1].pos.distance_sq(&centroid) {
            0
        } else {
            1
        };
        let member = 1 - head;
        let d_mh = nodes[member].pos.distance(&nodes[head].pos);
        let mut charge = [0.0f64; 2];
        for i in 0..2 {
            charge[i] += r.tx_energy(r.ctrl_bits, nodes[i].pos.distance(&bs)) + r.rx_energy(r.ctrl_bits);
        }
        charge[member] += r.tx_energy(r.msg_bits, d_mh);
        charge[head] += r.rx_energy(r.msg_bits)
            + r.aggregation_energy(r.msg_bits, 2)
            + r.tx_energy(r.msg_bits, nodes[head].pos.distance(&bs));

        let budget = charge[0].min(charge[1]) * 0.999;
        let mut cfg2 = cfg.clone();
        cfg2.field.initial_energy = budget;
        let res = run_simulation(&cfg2, ProtocolKind::Kmeans).unwrap();
        assert_eq!(res.fnd, Some(1));
        assert_eq!(res.lnd, Some(1));
    }

    #[test]
    fn same_config_twice_is_bit_identical() {
        let cfg = small_cfg(40, 0.01, 9);
        for kind in ProtocolKind::ALL {
            let a = run_simulation(&cfg, kind).unwrap();
            let b = run_simulation(&cfg, kind).unwrap();
            assert_eq!(a.records, b.records, "{kind}");
            assert_eq!(a.fnd, b.fnd);
            assert_eq!(a.lnd, b.lnd);
            assert_eq!(a.total_charged.to_bits(), b.total_charged.to_bits());
        }
    }

    #[test]
    fn energy_ledger_conserves_and_curves_are_monotone() {
        let cfg = small_cfg(60, 0.02, 3);
        for kind in ProtocolKind::ALL {
            let r = run_simulation(&cfg, kind).unwrap();
            let spent = r.initial_total_energy - r.final_total_energy;
            assert!(
                (spent - r.total_charged).abs() <= 1e-12 * r.initial_total_energy,
                "{kind}: spent {spent} vs charged {}",
                r.total_charged
            );
            let mut prev_alive = u32::MAX;
            let mut prev_res = f64::INFINITY;
            let mut prev_msgs = 0u64;
            for rec in &r.records {
                assert!(rec.alive <= prev_alive);
                assert!(rec.residual_j <= prev_res + 1e-15);
                assert!(rec.bs_msgs_cum >= prev_msgs);
                prev_alive = rec.alive;
                prev_res = rec.residual_j;
                prev_msgs = rec.bs_msgs_cum;
            }
            if let (Some(f), Some(l)) = (r.fnd, r.lnd) {
                assert!(f <= l, "{kind}");
            }
            assert!(!r.truncated, "{kind} should run to LND");
        }
    }

    #[test]
    fn truncated_run_has_no_lnd() {
        let mut cfg = small_cfg(30, 0.5, 4);
        cfg.engine.round_cap = 5;
        let r = run_simulation(&cfg, ProtocolKind::Leach).unwrap();
        assert!(r.truncated);
        assert_eq!(r.lnd, None);
        assert_eq!(r.records.len(), 5);
    }

    #[test]
    fn apply_charges_clamps_and_reports_deaths() {
        let mut nodes = vec![
            Node {
                id: 0,
                pos: Point::new(0.0, 0.0),
                energy: 1e-4,
                alive: true,
            },
            Node {
                id: 1,
                pos: Point::new(1.0, 1.0),
                energy: 0.5,
                alive: true,
            },
        ];
        let (applied, died) = apply_charges(&mut nodes, &[2e-4, 0.0]);
        assert_eq!(died, vec![0]);
        assert_eq!(nodes[0].energy, 0.0);
        assert!(!nodes[0].alive);
        assert!((applied - 1e-4).abs() < 1e-18);
        assert_eq!(nodes[1].energy, 0.5);
    }

    #[test]
    fn ledger_matches_sum_of_clamped_decrements() {
        let mut rng = crate::rng::Rng::new(8);
        let mut nodes: Vec<Node> = (0..500)
            .map(|id| Node {
                id,
                pos: Point::new(0.0, 0.0),
                energy: rng.next_f64() * 1e-3,
                alive: true,
            })
            .collect();
        let charges: Vec<f64> = (0..500).map(|_| rng.next_f64() * 1e-3).collect();
        let expected: f64 = nodes
            .iter()
            .zip(&charges)
            .map(|(n, &c)| c.min(n.energy))
            .sum();
        let before: f64 = nodes.iter().map(|n| n.energy).sum();
        let (applied, _) = apply_charges(&mut nodes, &charges);
        let after: f64 = nodes.iter().map(|n| n.energy).sum();
        assert!((applied - expected).abs() < 1e-15);
        assert!((before - after - applied).abs() < 1e-15);
    }

    #[test]
    #[should_panic(expected = "dead node")]
    fn charging_a_dead_node_is_an_accounting_error() {
        let mut nodes = vec![Node {
            id: 0,
            pos: Point::new(0.0, 0.0),
            energy: 0.0,
            alive: false,
        }];
        apply_charges(&mut nodes, &[1e-6]);
    }

    #[test]
    fn mean_energy_over_alive_only() {
        let mk = |id, energy: f64| Node {
            id,
            pos: Point::new(0.0, 0.0),
            energy,
            alive: energy > 0.0,
        };
        let nodes = vec![mk(0, 0.2), mk(1, 0.4)];
        assert!((network_mean_energy(&nodes) - 0.3).abs() < 1e-15);
        let nodes = vec![mk(0, 0.5), mk(1, 0.5)];
        assert_eq!(network_mean_energy(&nodes), 0.5);
        let nodes = vec![mk(0, 0.5), mk(1, 0.0)];
        assert_eq!(network_mean_energy(&nodes), 0.5);
    }
}

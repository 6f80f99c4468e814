// Scratch calibration harness (not part of the deliverable).
use wsnsim_core::clustering::{aro_cluster, MergeRule};
use wsnsim_core::neighbors::build_knn;
use wsnsim_core::protocols::ProtocolKind;
use wsnsim_core::sim::run_simulation;
use wsnsim_core::topology::generate_field;
use wsnsim_core::SimConfig;

fn cluster_stats(cfg: &SimConfig, k: usize, c: f64) {
    let nodes = generate_field(&cfg.field).unwrap();
    let pos: Vec<_> = nodes.iter().map(|n| n.pos).collect();
    let table = build_knn(&pos, k.min(pos.len() - 1)).unwrap();
    let out = aro_cluster(&table, c, MergeRule::AsymPresence);
    let mut sizes: Vec<usize> = out.partition.clusters().iter().map(|c| c.len()).collect();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    println!(
        "k={k} C={c} seed={}: {} clusters, sizes: {:?}",
        cfg.field.rng_seed,
        sizes.len(),
        &sizes[..sizes.len().min(20)]
    );
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let mode = args.get(1).map(|s| s.as_str()).unwrap_or("clusters");

    if mode == "clusters" {
        for seed in [1u64, 2, 3] {
            let mut cfg = SimConfig::default();
            cfg.field.rng_seed = seed;
            for k in [20usize, 10, 8, 6, 5, 4, 3] {
                for c in [0.5f64, 1.5] {
                    cluster_stats(&cfg, k, c);
                }
            }
            println!();
        }
        return;
    }

    if mode == "life" {
        // args: life <ctrl_bits> <knn_k> <merge_c> <n_seeds> [n_nodes]
        let ctrl: u32 = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(200);
        let knn_k: usize = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(20);
        let merge_c: f64 = args.get(4).map(|s| s.parse().unwrap()).unwrap_or(1.5);
        let n_seeds: u64 = args.get(5).map(|s| s.parse().unwrap()).unwrap_or(3);
        let n_nodes: usize = args.get(6).map(|s| s.parse().unwrap()).unwrap_or(500);
        let mut cfg = SimConfig::default();
        cfg.radio.ctrl_bits = ctrl;
        cfg.protocol.knn_k = knn_k;
        cfg.protocol.merge_threshold = merge_c;
        cfg.field.n_nodes = n_nodes;
        for kind in ProtocolKind::ALL {
            let mut fnds = Vec::new();
            let mut lnds = Vec::new();
            let mut wall = std::time::Duration::ZERO;
            for seed in 1..=n_seeds {
                let t0 = std::time::Instant::now();
                let r = run_simulation(&cfg.with_seed(seed), kind).unwrap();
                wall += t0.elapsed();
                fnds.push(r.fnd.unwrap_or(0) as f64);
                lnds.push(r.lnd.unwrap_or(cfg.engine.round_cap as u32) as f64);
            }
            let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
            println!(
                "ctrl={ctrl} k={knn_k} C={merge_c} N={n_nodes} {kind:<12} FND {:7.1}  LND {:7.1}   ({:.2?}/run)",
                mean(&fnds),
                mean(&lnds),
                wall / n_seeds as u32
            );
        }
        return;
    }

    // mode == "curve": residual energy + bs msgs at LEACH LND
    let ctrl: u32 = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(200);
    let knn_k: usize = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(20);
    let merge_c: f64 = args.get(4).map(|s| s.parse().unwrap()).unwrap_or(1.5);
    let mut cfg = SimConfig::default();
    cfg.radio.ctrl_bits = ctrl;
    cfg.protocol.knn_k = knn_k;
    cfg.protocol.merge_threshold = merge_c;
    let leach = run_simulation(&cfg.with_seed(1), ProtocolKind::Leach).unwrap();
    let lnd_l = leach.lnd.unwrap() as usize;
    for kind in ProtocolKind::ALL {
        let r = run_simulation(&cfg.with_seed(1), kind).unwrap();
        let initial = r.initial_total_energy;
        let at = |round: usize| -> f64 {
            r.records
                .get(round.saturating_sub(1).min(r.records.len().saturating_sub(1)))
                .map(|rec| rec.residual_j)
                .unwrap_or(0.0)
        };
        let msgs_at = |round: usize| -> u64 {
            r.records
                .get(round.saturating_sub(1).min(r.records.len().saturating_sub(1)))
                .map(|rec| rec.bs_msgs_cum)
                .unwrap_or(0)
        };
        println!(
            "{kind:<12} LND={:?} retained@LND_L({lnd_l})={:.1}%  msgs@500={}  msgs@LND_L={}",
            r.lnd,
            100.0 * at(lnd_l) / initial,
            msgs_at(500),
            msgs_at(lnd_l),
        );
    }
}

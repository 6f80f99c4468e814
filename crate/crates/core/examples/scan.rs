// Scratch: protocol lifetime scans (not part of the deliverable).
use wsnsim_core::protocols::ProtocolKind;
use wsnsim_core::sim::run_simulation;
use wsnsim_core::SimConfig;

fn mean(v: &[f64]) -> f64 { v.iter().sum::<f64>() / v.len() as f64 }

fn run_set(cfg: &SimConfig, kind: ProtocolKind, seeds: u64) -> (f64, f64, std::time::Duration) {
    let mut fnds = Vec::new();
    let mut lnds = Vec::new();
    let t0 = std::time::Instant::now();
    for seed in 1..=seeds {
        let r = run_simulation(&cfg.with_seed(seed), kind).unwrap();
        fnds.push(r.fnd.unwrap_or(0) as f64);
        lnds.push(r.lnd.unwrap_or(10_000) as f64);
    }
    (mean(&fnds), mean(&lnds), t0.elapsed() / seeds as u32)
}

fn main() {
    let mode = std::env::args().nth(1).unwrap_or_else(|| "aro".into());
    if mode == "aro" {
        for (k, c) in [(8usize, 0.5f64), (9, 0.5), (10, 0.5), (12, 0.5), (6, 1.5), (5, 1.5)] {
            let mut cfg = SimConfig::default();
            cfg.protocol.knn_k = k;
            cfg.protocol.merge_threshold = c;
            let (fnd, lnd, per) = run_set(&cfg, ProtocolKind::AroWsn, 10);
            println!("ARO k={k} C={c}: FND {fnd:7.1}  LND {lnd:7.1}  ({per:.2?}/run)");
        }
    } else if mode == "ctrl" {
        for ctrl in [300u32, 400, 500, 600] {
            for kind in [ProtocolKind::Leach, ProtocolKind::Kmeans, ProtocolKind::FuzzyLeach] {
                let mut cfg = SimConfig::default();
                cfg.radio.ctrl_bits = ctrl;
                let (fnd, lnd, per) = run_set(&cfg, kind, 5);
                println!("ctrl={ctrl} {kind:<12}: FND {fnd:7.1}  LND {lnd:7.1}  ({per:.2?}/run)");
            }
        }
    } else {
        // leach-c with cheaper annealing budget
        for (ctrl, props) in [(200u32, 200usize), (300, 200), (400, 200), (500, 200), (600, 200)] {
            let mut cfg = SimConfig::default();
            cfg.radio.ctrl_bits = ctrl;
            cfg.protocol.anneal_proposals_per_ch = props;
            let (fnd, lnd, per) = run_set(&cfg, ProtocolKind::LeachC, 5);
            println!("ctrl={ctrl} props={props} LEACH-C: FND {fnd:7.1}  LND {lnd:7.1}  ({per:.2?}/run)");
        }
    }
}

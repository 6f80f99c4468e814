// Scratch: dry-run of the acceptance arithmetic (not part of the deliverable).
use wsnsim_core::protocols::ProtocolKind::{self, *};
use wsnsim_core::sim::{run_simulation, SimResult};
use wsnsim_core::SimConfig;

fn mean(v: &[f64]) -> f64 { v.iter().sum::<f64>() / v.len() as f64 }

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let ctrl: u32 = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(400);
    let knn_k: usize = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(12);
    let merge_c: f64 = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(0.5);
    let seeds: u64 = args.get(4).map(|s| s.parse().unwrap()).unwrap_or(5);
    let props: usize = args.get(5).map(|s| s.parse().unwrap()).unwrap_or(200);

    let mut cfg = SimConfig::default();
    cfg.radio.ctrl_bits = ctrl;
    cfg.protocol.knn_k = knn_k;
    cfg.protocol.merge_threshold = merge_c;
    cfg.protocol.anneal_proposals_per_ch = props;

    let mut runs: std::collections::BTreeMap<ProtocolKind, Vec<SimResult>> = Default::default();
    for kind in ProtocolKind::ALL {
        for seed in 1..=seeds {
            runs.entry(kind).or_default().push(run_simulation(&cfg.with_seed(seed), kind).unwrap());
        }
    }
    let fnd = |k: ProtocolKind| mean(&runs[&k].iter().map(|r| r.fnd.unwrap() as f64).collect::<Vec<_>>());
    let lnd = |k: ProtocolKind| mean(&runs[&k].iter().map(|r| r.lnd.unwrap() as f64).collect::<Vec<_>>());

    println!("== ctrl={ctrl} k={knn_k} C={merge_c} seeds={seeds} props={props}");
    for k in ProtocolKind::ALL {
        println!("  {k:<12} FND {:7.1}  LND {:7.1}", fnd(k), lnd(k));
    }
    let (fa, fl, flc, fk, ff) = (fnd(AroWsn), fnd(Leach), fnd(LeachC), fnd(Kmeans), fnd(FuzzyLeach));
    let (la, ll, llc, lk, lf) = (lnd(AroWsn), lnd(Leach), lnd(LeachC), lnd(Kmeans), lnd(FuzzyLeach));
    println!("  FND order K>=ARO {} | ARO>=FZ {} | FZ>=L {} | L>=LC {}", fk>=fa, fa>=ff, ff>=fl, fl>=flc);
    println!("  FND pct vs L {:.2} (1.4..1.8) {} | vs LC {:.2} (1.65..2.05) {}",
        fa/fl, (1.4..=1.8).contains(&(fa/fl)), fa/flc, (1.65..=2.05).contains(&(fa/flc)));
    println!("  LND ARO>all {} | pct vs L {:.2} (1.47..1.87) {} | vs LC {:.2} (1.44..1.84) {}",
        la>ll && la>llc && la>lk && la>lf,
        la/ll, (1.47..=1.87).contains(&(la/ll)), la/llc, (1.44..=1.84).contains(&(la/llc)));

    // Criterion 5: seed-averaged residual curves; R* = first round the LEACH
    // mean residual hits zero.
    let curve = |k: ProtocolKind| -> Vec<f64> {
        let rs = &runs[&k];
        let maxlen = rs.iter().map(|r| r.records.len()).max().unwrap();
        (0..maxlen).map(|i| {
            mean(&rs.iter().map(|r| r.records.get(i).map(|rec| rec.residual_j).unwrap_or(0.0)).collect::<Vec<_>>())
        }).collect()
    };
    let initial: f64 = mean(&runs[&Leach].iter().map(|r| r.initial_total_energy).collect::<Vec<_>>());
    let lcurve = curve(Leach);
    let rstar = lcurve.iter().position(|&e| e <= 1e-12).map(|i| i + 1).unwrap_or(lcurve.len());
    let at = |k: ProtocolKind, round: usize| -> f64 {
        let c = curve(k);
        c.get(round - 1).copied().unwrap_or(0.0)
    };
    let aro_ret = at(AroWsn, rstar) / initial;
    let lc_ret = at(LeachC, rstar) / initial;
    println!("  crit5: R*={rstar}  ARO retains {:.1}% (>=40) {} | LC retains {:.1}% (<10) {}",
        100.0*aro_ret, aro_ret >= 0.40, 100.0*lc_ret, lc_ret < 0.10);

    // Criterion 6: mean cumulative BS messages, LEACH & LEACH-C vs ARO.
    let msgs = |k: ProtocolKind| -> Vec<f64> {
        let rs = &runs[&k];
        let maxlen = rs.iter().map(|r| r.records.len()).max().unwrap();
        (0..maxlen).map(|i| {
            mean(&rs.iter().map(|r| {
                let idx = i.min(r.records.len().saturating_sub(1));
                r.records.get(idx).map(|rec| rec.bs_msgs_cum as f64).unwrap_or(0.0)
            }).collect::<Vec<_>>())
        }).collect()
    };
    let (ma, ml, mlc) = (msgs(AroWsn), msgs(Leach), msgs(LeachC));
    let lnd_l_mean = ll as usize;
    let mut ok_l = true;
    let mut ok_lc = true;
    let mut first_viol = 0usize;
    for r in 1..lnd_l_mean.min(ma.len()) {
        let a = ma[(r - 1).min(ma.len() - 1)];
        if ml.get(r - 1).copied().unwrap_or(*ml.last().unwrap()) <= a { if ok_l { first_viol = r; } ok_l = false; }
        if mlc.get(r - 1).copied().unwrap_or(*mlc.last().unwrap()) <= a { if ok_lc { first_viol = r; } ok_lc = false; }
    }
    println!("  crit6: LEACH>ARO everywhere {ok_l} | LEACH-C>ARO everywhere {ok_lc} (first violation round {first_viol})");
}

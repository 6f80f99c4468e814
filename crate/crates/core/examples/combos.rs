// Scratch: cluster-shape stability across seeds (not part of the deliverable).
use wsnsim_core::clustering::{aro_cluster, MergeRule};
use wsnsim_core::neighbors::build_knn;
use wsnsim_core::topology::generate_field;
use wsnsim_core::SimConfig;

fn main() {
    for (k, c, rule, tag) in [
        (20usize, 0.5f64, MergeRule::AsymPresenceBoth, "both"),
        (20, 1.5, MergeRule::AsymPresenceBoth, "both"),
        (16, 0.5, MergeRule::AsymPresenceBoth, "both"),
        (12, 0.5, MergeRule::AsymPresenceBoth, "both"),
        (12, 0.5, MergeRule::AsymPresence, "either"),
        (14, 0.5, MergeRule::AsymPresence, "either"),
    ] {
        let mut counts = Vec::new();
        let mut maxes = Vec::new();
        let mut tiny = Vec::new();
        for seed in 1..=10u64 {
            let mut cfg = SimConfig::default();
            cfg.field.rng_seed = seed;
            let nodes = generate_field(&cfg.field).unwrap();
            let pos: Vec<_> = nodes.iter().map(|n| n.pos).collect();
            let table = build_knn(&pos, k).unwrap();
            let out = aro_cluster(&table, c, rule);
            let sizes: Vec<usize> = out.partition.clusters().iter().map(|c| c.len()).collect();
            counts.push(sizes.len());
            maxes.push(*sizes.iter().max().unwrap());
            tiny.push(sizes.iter().filter(|&&s| s <= 5).count());
        }
        println!("k={k} C={c} {tag}: counts={counts:?}\n    max={maxes:?} tiny(<=5)={tiny:?}");
    }
}

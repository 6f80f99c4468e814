//! Named experiment sweeps with multi-seed averaging.
//!
//! Each experiment mirrors one figure family of the evaluation: a sweep
//! variable, a protocol list, a seed list, per-run CSVs, an aggregate CSV
//! and SVG figure analogs. Grid points run as independent jobs on a bounded
//! worker pool (`WSNSIM_THREADS` caps it); results merge in deterministic
//! order.

use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;

use wsnsim_core::sim::{run_simulation, SimResult};
use wsnsim_core::{ProtocolKind, SimConfig};

use crate::output::{self, AggregateRow};
use crate::plot::{line_chart, Series};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentName {
    Density,
    Lifetime,
    EnergyCurve,
    BsMessages,
    InitialEnergy,
    MessageSize,
    ThresholdC,
}

impl ExperimentName {
    pub const ALL: [ExperimentName; 7] = [
        ExperimentName::Density,
        ExperimentName::Lifetime,
        ExperimentName::EnergyCurve,
        ExperimentName::BsMessages,
        ExperimentName::InitialEnergy,
        ExperimentName::MessageSize,
        ExperimentName::ThresholdC,
    ];

    pub fn slug(&self) -> &'static str {
        match self {
            ExperimentName::Density => "density",
            ExperimentName::Lifetime => "lifetime",
            ExperimentName::EnergyCurve => "energy_curve",
            ExperimentName::BsMessages => "bs_messages",
            ExperimentName::InitialEnergy => "initial_energy",
            ExperimentName::MessageSize => "message_size",
            ExperimentName::ThresholdC => "threshold_c",
        }
    }

    /// Which figures of the evaluation the experiment reproduces.
    pub fn figures(&self) -> &'static str {
        match self {
            ExperimentName::Density => "Figs 5-6 (FND/LND vs node count)",
            ExperimentName::Lifetime => "Fig 7 (alive nodes per round)",
            ExperimentName::EnergyCurve => "Fig 8 (total residual energy per round)",
            ExperimentName::BsMessages => "Fig 9 (cumulative BS messages per round)",
            ExperimentName::InitialEnergy => "Figs 10-11 (FND/LND vs initial energy)",
            ExperimentName::MessageSize => "Figs 12-13 (FND/LND vs message size)",
            ExperimentName::ThresholdC => "Fig 14 (FND vs merge threshold C, ARO-WSN only)",
        }
    }

    /// Sweep grid; the curve experiments have a single grid point.
    pub fn grid(&self, base: &SimConfig) -> Vec<f64> {
        match self {
            ExperimentName::Density => vec![100.0, 200.0, 300.0, 400.0, 500.0],
            ExperimentName::Lifetime | ExperimentName::EnergyCurve | ExperimentName::BsMessages => {
                vec![base.field.n_nodes as f64]
            }
            ExperimentName::InitialEnergy => vec![0.25, 0.5, 0.75, 1.0],
            ExperimentName::MessageSize => vec![1000.0, 2000.0, 4000.0, 8000.0],
            ExperimentName::ThresholdC => vec![0.5, 1.0, 1.5, 2.0, 2.5],
        }
    }

    pub fn default_protocols(&self) -> Vec<ProtocolKind> {
        match self {
            ExperimentName::ThresholdC => vec![ProtocolKind::AroWsn],
            _ => ProtocolKind::ALL.to_vec(),
        }
    }

    /// Apply a grid value to a base configuration.
    pub fn apply(&self, base: &SimConfig, value: f64) -> SimConfig {
        let mut cfg = base.clone();
        match self {
            ExperimentName::Density => cfg.field.n_nodes = value as usize,
            ExperimentName::InitialEnergy => cfg.field.initial_energy = value,
            ExperimentName::MessageSize => cfg.radio.msg_bits = value as u32,
            ExperimentName::ThresholdC => cfg.protocol.merge_threshold = value,
            _ => {}
        }
        cfg
    }
}

impl std::fmt::Display for ExperimentName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.slug())
    }
}

#[derive(Debug)]
pub struct UnknownExperiment(pub String);

impl std::fmt::Display for UnknownExperiment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "unknown experiment {:?} (expected one of {})",
            self.0,
            ExperimentName::ALL
                .iter()
                .map(|e| e.slug())
                .collect::<Vec<_>>()
                .join(", ")
        )
    }
}

impl std::error::Error for UnknownExperiment {}

impl FromStr for ExperimentName {
    type Err = UnknownExperiment;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.to_ascii_lowercase().replace('-', "_");
        ExperimentName::ALL
            .iter()
            .find(|e| e.slug() == norm)
            .copied()
            .ok_or_else(|| UnknownExperiment(s.to_string()))
    }
}

/// Fully resolved experiment description.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub name: ExperimentName,
    pub base_config: SimConfig,
    pub protocols: Vec<ProtocolKind>,
    pub seeds: Vec<u64>,
    pub out_dir: PathBuf,
    /// Write per-run CSVs and manifests (on for the CLI; tests may skip).
    pub write_runs: bool,
}

impl ExperimentSpec {
    pub fn new(
        name: ExperimentName,
        base_config: SimConfig,
        n_seeds: usize,
        base_seed: u64,
        out_dir: PathBuf,
    ) -> Self {
        ExperimentSpec {
            name,
            base_config,
            protocols: name.default_protocols(),
            seeds: (0..n_seeds as u64).map(|i| base_seed + i).collect(),
            out_dir,
            write_runs: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            bail!("experiment needs at least one seed");
        }
        if self.protocols.is_empty() {
            bail!("experiment needs at least one protocol");
        }
        Ok(())
    }
}

/// Aggregate outcome plus where the files went.
#[derive(Debug)]
pub struct ExperimentOutcome {
    pub dir: PathBuf,
    pub rows: Vec<AggregateRow>,
}

struct JobResult {
    protocol: ProtocolKind,
    grid_value: f64,
    result: SimResult,
    wall_ms: f64,
    cfg: SimConfig,
}

/// Run the experiment: sweep x protocols x seeds, write artifacts, return
/// the aggregate table.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutcome> {
    spec.validate()?;
    output::probe_writable(&spec.out_dir)?;
    let dir = output::experiment_dir(&spec.out_dir, spec.name.slug())?;

    let grid = spec.name.grid(&spec.base_config);
    let mut jobs: Vec<(ProtocolKind, f64, u64)> = Vec::new();
    for &protocol in &spec.protocols {
        for &g in &grid {
            for &seed in &spec.seeds {
                jobs.push((protocol, g, seed));
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count())
        .build()
        .context("cannot build worker pool")?;
    let mut results: Vec<JobResult> = pool.install(|| {
        jobs.par_iter()
            .map(|&(protocol, g, seed)| {
                let cfg = spec.name.apply(&spec.base_config, g).with_seed(seed);
                let t0 = Instant::now();
                let result = run_simulation(&cfg, protocol)
                    .map_err(|e| anyhow::anyhow!("{protocol} at {g}: {e}"))?;
                Ok(JobResult {
                    protocol,
                    grid_value: g,
                    result,
                    wall_ms: t0.elapsed().as_secs_f64() * 1e3,
                    cfg,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    results.sort_by(|a, b| {
        (a.protocol, a.grid_value, a.result.seed)
            .partial_cmp(&(b.protocol, b.grid_value, b.result.seed))
            .unwrap()
    });

    if spec.write_runs {
        for jr in &results {
            let run_dir = dir.join("runs").join(format!(
                "{}-g{}-s{}",
                jr.protocol.slug(),
                jr.grid_value,
                jr.result.seed
            ));
            output::write_run(&run_dir, &jr.cfg, &jr.result, jr.wall_ms)?;
        }
    }

    let rows = aggregate(spec, &grid, &results);
    std::fs::write(dir.join("aggregate.csv"), output::aggregate_csv(&rows))?;
    write_figures(spec, &dir, &grid, &results, &rows)?;
    Ok(ExperimentOutcome { dir, rows })
}

fn worker_count() -> usize {
    std::env::var("WSNSIM_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .unwrap_or(0) // 0 = rayon default (available parallelism)
}

fn aggregate(spec: &ExperimentSpec, grid: &[f64], results: &[JobResult]) -> Vec<AggregateRow> {
    let mut rows = Vec::new();
    for &protocol in &spec.protocols {
        for &g in grid {
            let cap = spec.base_config.engine.round_cap as f64;
            let fnds: Vec<f64> = results
                .iter()
                .filter(|r| r.protocol == protocol && r.grid_value == g)
                .map(|r| r.result.fnd.map(f64::from).unwrap_or(cap))
                .collect();
            let lnds: Vec<f64> = results
                .iter()
                .filter(|r| r.protocol == protocol && r.grid_value == g)
                .map(|r| r.result.lnd.map(f64::from).unwrap_or(cap))
                .collect();
            let (fnd_mean, fnd_std) = output::mean_std(&fnds);
            let (lnd_mean, lnd_std) = output::mean_std(&lnds);
            rows.push(AggregateRow {
                protocol: protocol.slug().to_string(),
                grid_value: g,
                fnd_mean,
                fnd_std,
                lnd_mean,
                lnd_std,
                seeds: fnds.len(),
            });
        }
    }
    rows
}

/// Seed-averaged per-round curve of one quantity; runs shorter than the
/// longest contribute their terminal value (zero alive/energy, final
/// cumulative message count).
fn mean_curve(
    runs: &[&SimResult],
    f: impl Fn(&wsnsim_core::sim::RoundRecord) -> f64,
    hold_last: bool,
) -> Vec<(f64, f64)> {
    let maxlen = runs.iter().map(|r| r.records.len()).max().unwrap_or(0);
    (0..maxlen)
        .map(|i| {
            let mut sum = 0.0;
            for r in runs {
                sum += match r.records.get(i) {
                    Some(rec) => f(rec),
                    None if hold_last && !r.records.is_empty() => f(r.records.last().unwrap()),
                    None => 0.0,
                };
            }
            ((i + 1) as f64, sum / runs.len() as f64)
        })
        .collect()
}

fn curve_series(
    spec: &ExperimentSpec,
    results: &[JobResult],
    f: impl Fn(&wsnsim_core::sim::RoundRecord) -> f64 + Copy,
    hold_last: bool,
) -> Vec<Series> {
    spec.protocols
        .iter()
        .map(|&p| {
            let runs: Vec<&SimResult> = results
                .iter()
                .filter(|r| r.protocol == p)
                .map(|r| &r.result)
                .collect();
            Series {
                label: p.to_string(),
                points: mean_curve(&runs, f, hold_last),
            }
        })
        .collect()
}

fn sweep_series(
    spec: &ExperimentSpec,
    rows: &[AggregateRow],
    pick: impl Fn(&AggregateRow) -> f64,
) -> Vec<Series> {
    spec.protocols
        .iter()
        .map(|&p| Series {
            label: p.to_string(),
            points: rows
                .iter()
                .filter(|r| r.protocol == p.slug())
                .map(|r| (r.grid_value, pick(r)))
                .collect(),
        })
        .collect()
}

fn write_figures(
    spec: &ExperimentSpec,
    dir: &Path,
    _grid: &[f64],
    results: &[JobResult],
    rows: &[AggregateRow],
) -> Result<()> {
    let save = |name: &str, svg: String| -> Result<()> {
        std::fs::write(dir.join(name), svg).context("cannot write figure")?;
        Ok(())
    };
    match spec.name {
        ExperimentName::Density => {
            save(
                "fnd_vs_nodes.svg",
                line_chart(
                    "First node death vs node count",
                    "nodes",
                    "FND round",
                    &sweep_series(spec, rows, |r| r.fnd_mean),
                )?,
            )?;
            save(
                "lnd_vs_nodes.svg",
                line_chart(
                    "Last node death vs node count",
                    "nodes",
                    "LND round",
                    &sweep_series(spec, rows, |r| r.lnd_mean),
                )?,
            )?;
        }
        ExperimentName::Lifetime => {
            save(
                "alive_vs_round.svg",
                line_chart(
                    "Alive nodes over time",
                    "round",
                    "alive nodes",
                    &curve_series(spec, results, |r| r.alive as f64, false),
                )?,
            )?;
        }
        ExperimentName::EnergyCurve => {
            save(
                "residual_vs_round.svg",
                line_chart(
                    "Total residual energy over time",
                    "round",
                    "residual energy (J)",
                    &curve_series(spec, results, |r| r.residual_j, false),
                )?,
            )?;
        }
        ExperimentName::BsMessages => {
            save(
                "bs_msgs_vs_round.svg",
                line_chart(
                    "Messages received at the base station",
                    "round",
                    "cumulative messages",
                    &curve_series(spec, results, |r| r.bs_msgs_cum as f64, true),
                )?,
            )?;
        }
        ExperimentName::InitialEnergy => {
            save(
                "fnd_vs_energy.svg",
                line_chart(
                    "First node death vs initial energy",
                    "initial energy (J)",
                    "FND round",
                    &sweep_series(spec, rows, |r| r.fnd_mean),
                )?,
            )?;
            save(
                "lnd_vs_energy.svg",
                line_chart(
                    "Last node death vs initial energy",
                    "initial energy (J)",
                    "LND round",
                    &sweep_series(spec, rows, |r| r.lnd_mean),
                )?,
            )?;
        }
        ExperimentName::MessageSize => {
            save(
                "fnd_vs_bits.svg",
                line_chart(
                    "First node death vs message size",
                    "message size (bits)",
                    "FND round",
                    &sweep_series(spec, rows, |r| r.fnd_mean),
                )?,
            )?;
            save(
                "lnd_vs_bits.svg",
                line_chart(
                    "Last node death vs message size",
                    "message size (bits)",
                    "LND round",
                    &sweep_series(spec, rows, |r| r.lnd_mean),
                )?,
            )?;
        }
        ExperimentName::ThresholdC => {
            save(
                "fnd_vs_c.svg",
                line_chart(
                    "First node death vs merge threshold",
                    "merge threshold C",
                    "FND round",
                    &sweep_series(spec, rows, |r| r.fnd_mean),
                )?,
            )?;
        }
    }
    // Curve experiments also dump the averaged curves for re-plotting.
    if matches!(
        spec.name,
        ExperimentName::Lifetime | ExperimentName::EnergyCurve | ExperimentName::BsMessages
    ) {
        let mut csv = String::from("round");
        let series = [
            curve_series(spec, results, |r| r.alive as f64, false),
            curve_series(spec, results, |r| r.residual_j, false),
            curve_series(spec, results, |r| r.bs_msgs_cum as f64, true),
        ];
        for p in &spec.protocols {
            for quantity in ["alive", "residual_j", "bs_msgs"] {
                csv.push_str(&format!(",{}_{quantity}", p.slug()));
            }
        }
        csv.push('\n');
        let maxlen = series[0].iter().map(|s| s.points.len()).max().unwrap_or(0);
        for i in 0..maxlen {
            csv.push_str(&format!("{}", i + 1));
            for (pi, _) in spec.protocols.iter().enumerate() {
                for q in &series {
                    let v = q[pi].points.get(i).map(|&(_, y)| y).unwrap_or(0.0);
                    csv.push_str(&format!(",{v}"));
                }
            }
            csv.push('\n');
        }
        std::fs::write(dir.join("curves.csv"), csv)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_cfg() -> SimConfig {
        let mut cfg = SimConfig::default();
        cfg.field.n_nodes = 30;
        cfg.field.initial_energy = 0.02;
        cfg
    }

    #[test]
    fn experiment_names_round_trip() {
        for name in ExperimentName::ALL {
            assert_eq!(ExperimentName::from_str(name.slug()).unwrap(), name);
        }
        assert!(ExperimentName::from_str("figure_15").is_err());
    }

    #[test]
    fn aggregate_has_expected_shape() {
        let tmp = tempfile::tempdir().unwrap();
        let mut spec = ExperimentSpec::new(
            ExperimentName::ThresholdC,
            tiny_cfg(),
            3,
            1,
            tmp.path().to_path_buf(),
        );
        spec.write_runs = false;
        let out = run_experiment(&spec).unwrap();
        // 5 grid points x 1 protocol.
        assert_eq!(out.rows.len(), 5);
        assert!(out.rows.iter().all(|r| r.seeds == 3));
        assert!(out.dir.join("aggregate.csv").exists());
        assert!(out.dir.join("fnd_vs_c.svg").exists());
    }

    #[test]
    fn single_seed_single_point_equals_sim_result() {
        let tmp = tempfile::tempdir().unwrap();
        let mut spec = ExperimentSpec::new(
            ExperimentName::Lifetime,
            tiny_cfg(),
            1,
            7,
            tmp.path().to_path_buf(),
        );
        spec.protocols = vec![ProtocolKind::Leach];
        spec.write_runs = false;
        let out = run_experiment(&spec).unwrap();
        let direct = run_simulation(&tiny_cfg().with_seed(7), ProtocolKind::Leach).unwrap();
        assert_eq!(out.rows.len(), 1);
        let row = &out.rows[0];
        assert_eq!(row.fnd_mean, direct.fnd.unwrap() as f64);
        assert_eq!(row.lnd_mean, direct.lnd.unwrap() as f64);
        assert_eq!(row.fnd_std, 0.0);
        assert_eq!(row.seeds, 1);
    }

    #[test]
    fn reaggregation_from_run_csvs_reproduces_summary() {
        let tmp = tempfile::tempdir().unwrap();
        let mut spec = ExperimentSpec::new(
            ExperimentName::Lifetime,
            tiny_cfg(),
            2,
            3,
            tmp.path().to_path_buf(),
        );
        spec.protocols = vec![ProtocolKind::Kmeans];
        let out = run_experiment(&spec).unwrap();

        // Recompute FND/LND from the stored per-round CSVs.
        let mut fnds = Vec::new();
        let mut lnds = Vec::new();
        for seed in [3u64, 4] {
            let path = out
                .dir
                .join("runs")
                .join(format!("kmeans-g30-s{seed}"))
                .join("rounds.csv");
            let text = std::fs::read_to_string(path).unwrap();
            let mut prev_alive = 30u32;
            let mut fnd = None;
            let mut lnd = None;
            for line in text.lines().skip(1) {
                let mut it = line.split(',');
                let round: u32 = it.next().unwrap().parse().unwrap();
                let alive: u32 = it.next().unwrap().parse().unwrap();
                if fnd.is_none() && alive < prev_alive {
                    fnd = Some(round);
                }
                if alive == 0 && lnd.is_none() {
                    lnd = Some(round);
                }
                prev_alive = alive;
            }
            fnds.push(fnd.unwrap() as f64);
            lnds.push(lnd.unwrap() as f64);
        }
        let (fnd_mean, _) = output::mean_std(&fnds);
        let (lnd_mean, _) = output::mean_std(&lnds);
        assert_eq!(out.rows[0].fnd_mean, fnd_mean);
        assert_eq!(out.rows[0].lnd_mean, lnd_mean);
    }
}

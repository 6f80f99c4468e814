//! File outputs: per-round CSVs, run manifests, aggregate CSVs.
//!
//! Experiment outputs land in a timestamped directory with a stable `latest`
//! symlink beside it for scripting. CSV and SVG bytes are pure functions of
//! the simulation inputs; manifests additionally carry wall-clock timings.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::Serialize;

use wsnsim_core::sim::SimResult;
use wsnsim_core::SimConfig;

/// Fixed per-round CSV header.
pub const ROUND_CSV_HEADER: &str = "round,alive,residual_j,bs_msgs_cum,ads";
/// Fixed aggregate CSV header.
pub const AGGREGATE_CSV_HEADER: &str =
    "protocol,grid_value,fnd_mean,fnd_std,lnd_mean,lnd_std,seeds";

/// Serialize the per-round records.
pub fn round_csv(result: &SimResult) -> String {
    let mut out = String::with_capacity(result.records.len() * 32 + 64);
    out.push_str(ROUND_CSV_HEADER);
    out.push('\n');
    for r in &result.records {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.round, r.alive, r.residual_j, r.bs_msgs_cum, r.ads
        ));
    }
    out
}

/// The run manifest: config echo plus outcome summary.
#[derive(Debug, Serialize)]
pub struct RunManifest<'a> {
    pub protocol: &'a str,
    pub seed: u64,
    pub config: &'a SimConfig,
    pub fnd: Option<u32>,
    pub lnd: Option<u32>,
    pub truncated: bool,
    pub rounds: usize,
    pub initial_total_energy: f64,
    pub final_total_energy: f64,
    pub total_charged: f64,
    pub lost_rounds: u64,
    pub wall_ms: f64,
    /// Accounting rules this artifact fixes where the source material is
    /// silent; echoed so every manifest is self-describing.
    pub accounting: AccountingNotes,
}

#[derive(Debug, Serialize)]
pub struct AccountingNotes {
    pub mean_energy_over: &'static str,
    pub bs_message_rule: &'static str,
    pub death_rule: &'static str,
}

impl Default for AccountingNotes {
    fn default() -> Self {
        AccountingNotes {
            mean_energy_over: "alive nodes only",
            bs_message_rule: "data uplinks + direct sends + per-round control reports; \
                              pre-round setup uploads excluded; senders dying in-round deliver nothing",
            death_rule: "charges clamp at zero; a node short of energy spends everything and dies",
        }
    }
}

pub fn write_run(dir: &Path, cfg: &SimConfig, result: &SimResult, wall_ms: f64) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    fs::write(dir.join("rounds.csv"), round_csv(result))?;
    if let Some(dump) = &result.partition_dump {
        fs::write(dir.join("partition.txt"), dump)?;
    }
    let manifest = RunManifest {
        protocol: result.protocol.slug(),
        seed: result.seed,
        config: cfg,
        fnd: result.fnd,
        lnd: result.lnd,
        truncated: result.truncated,
        rounds: result.records.len(),
        initial_total_energy: result.initial_total_energy,
        final_total_energy: result.final_total_energy,
        total_charged: result.total_charged,
        lost_rounds: result.lost_rounds,
        wall_ms,
        accounting: AccountingNotes::default(),
    };
    let json = serde_json::to_string_pretty(&manifest)?;
    fs::write(dir.join("manifest.json"), json)?;
    Ok(())
}

/// One aggregate row: seed statistics for a (protocol, grid point) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub protocol: String,
    pub grid_value: f64,
    pub fnd_mean: f64,
    pub fnd_std: f64,
    pub lnd_mean: f64,
    pub lnd_std: f64,
    pub seeds: usize,
}

pub fn aggregate_csv(rows: &[AggregateRow]) -> String {
    let mut out = String::new();
    out.push_str(AGGREGATE_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.protocol, r.grid_value, r.fnd_mean, r.fnd_std, r.lnd_mean, r.lnd_std, r.seeds
        ));
    }
    out
}

/// Sample mean and standard deviation (n-1 denominator; 0 for n < 2).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Create `<base>/<name>/<timestamp>/` and refresh `<base>/<name>/latest`.
pub fn experiment_dir(base: &Path, name: &str) -> Result<PathBuf> {
    let stamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| format!("{}", d.as_millis()))
        .unwrap_or_else(|_| "0".into());
    let dir = base.join(name).join(&stamp);
    fs::create_dir_all(&dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))?;
    let latest = base.join(name).join("latest");
    let _ = fs::remove_file(&latest);
    #[cfg(unix)]
    let _ = std::os::unix::fs::symlink(&stamp, &latest);
    Ok(dir)
}

/// Probe that `base` is writable before spending simulation time.
pub fn probe_writable(base: &Path) -> Result<()> {
    fs::create_dir_all(base).with_context(|| format!("cannot create {}", base.display()))?;
    let probe = base.join(".wsnsim-write-probe");
    let mut f =
        fs::File::create(&probe).with_context(|| format!("cannot write in {}", base.display()))?;
    f.write_all(b"ok")?;
    drop(f);
    let _ = fs::remove_file(&probe);
    Ok(())
}

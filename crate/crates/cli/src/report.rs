//! On-disk run artifacts: manifests, reports, and CSV helpers.
//!
//! CSV files here are plain comma-separated text with a header row and no
//! quoting; every data row carries the run id and config hash.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use emcomm::game::EpochRecord;
use emcomm::imitation::{Algorithm, Role};

/// Per-expert entry in the pool report, ascending topsim order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExpertReportEntry {
    pub index: usize,
    pub seed: u64,
    pub topsim: Option<f64>,
    pub converged: bool,
    pub best_epoch: usize,
    pub validation_acc_attr: f64,
    pub validation_acc_obj: f64,
    pub generalization_acc_attr: f64,
    pub generalization_acc_obj: f64,
    pub zero_shot_acc_attr: f64,
    pub zero_shot_acc_obj: f64,
    pub dir: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExpertReport {
    pub config_hash: String,
    pub setup_hash: String,
    pub experts: Vec<ExpertReportEntry>,
}

impl ExpertReport {
    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading expert report {}", path.display()))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Manifest of one imitation run; the resolved configuration is echoed in
/// full so the run is replayable.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ImitationManifest {
    pub run_id: String,
    pub config_hash: String,
    pub setup_hash: String,
    pub role: Role,
    pub algorithm: Algorithm,
    pub k: usize,
    pub lambda: f64,
    pub seed: u64,
    pub epochs: usize,
    pub sol_cutoff: usize,
    /// Indices into the expert report, ascending topsim.
    pub expert_indices: Vec<usize>,
    pub resolved_config: serde_json::Value,
}

impl ImitationManifest {
    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading manifest {}", path.display()))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Per-expert outcome of one imitation run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ImitationSummaryEntry {
    pub expert_index: usize,
    pub topsim: Option<f64>,
    /// First epoch reaching 99% validation accuracy, if any.
    pub sample_complexity_t: Option<usize>,
    /// Mean validation accuracy over the first `sol_cutoff` epochs.
    pub speed_of_learning_sol: f64,
    pub final_accuracy: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ImitationSummary {
    pub run_id: String,
    pub config_hash: String,
    pub setup_hash: String,
    pub seed: u64,
    pub entries: Vec<ImitationSummaryEntry>,
}

impl ImitationSummary {
    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading summary {}", path.display()))?;
        Ok(serde_json::from_str(&text)?)
    }
}

pub fn format_f64(x: f64) -> String {
    format!("{x:.6}")
}

/// Game-side per-epoch log.
pub fn write_game_csv(
    path: &Path,
    run_id: &str,
    config_hash: &str,
    records: &[EpochRecord],
) -> Result<()> {
    let mut out = String::from(
        "run_id,epoch,split,receiver_loss,sender_entropy,acc_attr,acc_obj,config_hash\n",
    );
    for r in records {
        out.push_str(&format!(
            "{run_id},{},validation,{},{},{},{},{config_hash}\n",
            r.epoch,
            format_f64(r.receiver_loss),
            format_f64(r.sender_entropy),
            format_f64(r.acc_attr),
            format_f64(r.acc_obj),
        ));
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Imitation accuracy curves: one row per (epoch, expert) plus sampled
/// training rows for REINFORCE runs.
pub fn write_curves_csv(
    path: &Path,
    run_id: &str,
    config_hash: &str,
    expert_indices: &[usize],
    curve: &emcomm::imitation::AccuracyCurve,
) -> Result<()> {
    let mut out = String::from("run_id,epoch,expert_id,split,accuracy,config_hash\n");
    for (e, row) in curve.validation.iter().enumerate() {
        for (pos, acc) in row.iter().enumerate() {
            out.push_str(&format!(
                "{run_id},{},{},validation,{},{config_hash}\n",
                e + 1,
                expert_indices[pos],
                format_f64(*acc),
            ));
        }
    }
    for (e, acc) in curve.training_sampled.iter().enumerate() {
        out.push_str(&format!(
            "{run_id},{},-1,train_sampled,{},{config_hash}\n",
            e + 1,
            format_f64(*acc),
        ));
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// A loaded CSV table with header-based column lookup.
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading csv {}", path.display()))?;
        let mut lines = text.lines();
        let header: Vec<String> = lines
            .next()
            .with_context(|| format!("{} is empty", path.display()))?
            .split(',')
            .map(str::to_string)
            .collect();
        let rows = lines
            .map(|l| l.split(',').map(str::to_string).collect())
            .collect();
        Ok(Self { header, rows })
    }

    /// Column index by name; the error names the missing column.
    pub fn col(&self, name: &str) -> Result<usize> {
        self.header
            .iter()
            .position(|h| h == name)
            .with_context(|| format!("missing column `{name}` (header: {})", self.header.join(",")))
    }

    pub fn f64(&self, row: &[String], col: usize) -> Result<f64> {
        Ok(row[col].parse::<f64>()?)
    }
}

/// Standard output layout under the run root.
pub struct OutLayout {
    pub root: PathBuf,
}

impl OutLayout {
    pub fn new(root: PathBuf) -> Self {
        Self { root }
    }

    pub fn split_manifest(&self) -> PathBuf {
        self.root.join("data").join("split.json")
    }

    pub fn experts_dir(&self) -> PathBuf {
        self.root.join("experts")
    }

    pub fn expert_report(&self) -> PathBuf {
        self.experts_dir().join("report.json")
    }

    pub fn expert_dir(&self, index: usize) -> PathBuf {
        self.experts_dir().join(format!("expert_{index:02}"))
    }

    pub fn imitation_dir(&self, run_id: &str) -> PathBuf {
        self.root.join("imitation").join(run_id)
    }

    pub fn imitation_runs(&self) -> Result<Vec<PathBuf>> {
        let dir = self.root.join("imitation");
        if !dir.exists() {
            bail!("no imitation runs under {}", dir.display());
        }
        let mut runs: Vec<PathBuf> = std::fs::read_dir(&dir)?
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| p.join("manifest.json").exists())
            .collect();
        runs.sort();
        Ok(runs)
    }

    pub fn analysis_dir(&self) -> PathBuf {
        self.root.join("analysis")
    }

    pub fn plots_dir(&self) -> PathBuf {
        self.root.join("plots")
    }
}

/// Wrapper around the split manifest that also pins the setup hash.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SplitFile {
    pub setup_hash: String,
    pub manifest: emcomm::data::SplitManifest,
}

impl SplitFile {
    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string(self)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| {
            format!(
                "reading split manifest {} (run `emcomm gen-data` first)",
                path.display()
            )
        })?;
        Ok(serde_json::from_str(&text)?)
    }
}

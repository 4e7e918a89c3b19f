use std::path::Path;

use gridcoh::formulation::TighteningSummary;
use gridcoh::solver::{BoundsChoice, ModelSize, SolverChoice};
use gridcoh::{DesignMode, LineStatus, MetricPreset, SolveStats};
use serde::{Deserialize, Serialize};

use crate::commands::CliError;

pub const RESULT_SCHEMA: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
pub struct ProblemEcho {
    pub network: String,
    pub network_name: Option<String>,
    pub n_buses: usize,
    pub n_lines: usize,
    pub reference: usize,
    pub mode: DesignMode,
    pub budget: usize,
    pub metric: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SelectedLine {
    pub index: usize,
    pub from: usize,
    pub to: usize,
    pub susceptance: f64,
    pub status: LineStatus,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BoundsEcho {
    pub choice: BoundsChoice,
    pub tighten: bool,
    /// Sum of the `X` interval widths over unordered pairs.
    pub total_width: f64,
    pub tightening: Option<TighteningSummary>,
}

/// Design outcome written by `gridcoh design --out`.
#[derive(Debug, Serialize, Deserialize)]
pub struct ResultFile {
    pub schema: u32,
    pub tool_version: String,
    pub problem: ProblemEcho,
    pub solver: SolverChoice,
    pub selected: Vec<SelectedLine>,
    /// `trace(W~ L~^-1)` of the selected topology.
    pub objective: f64,
    /// Squared H2 norm, present when damping is uniform.
    pub h2_squared: Option<f64>,
    pub bounds: BoundsEcho,
    pub model: ModelSize,
    pub stats: SolveStats,
}

impl ResultFile {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        let file: Self = serde_json::from_str(&text)
            .map_err(|e| CliError::Input(format!("malformed result file {}: {e}", path.display())))?;
        if file.schema != RESULT_SCHEMA {
            return Err(CliError::Input(format!(
                "unsupported result schema {} (expected {RESULT_SCHEMA})",
                file.schema
            )));
        }
        Ok(file)
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self).expect("result files serialize");
        std::fs::write(path, text + "\n")
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
    }
}

pub fn metric_label(preset: Option<MetricPreset>) -> String {
    preset.map_or_else(|| "file weights".to_string(), |p| p.to_string())
}

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::MachineParams;
use crate::error::{Error, Result};
use crate::netgraph::{build_laplacian, remove_row_col};
use crate::network::PowerNetwork;

/// Named `(W, S)` choices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricPreset {
    /// Frequency excursions: `W = 0`, `S = I`.
    Frequency,
    /// Transient line losses: `W = L`, `S = 0`.
    Losses,
    /// Angle dispersion around the grid average: `W = I - 11^T/(N+1)`, `S = 0`.
    Coherence,
}

impl MetricPreset {
    pub const ALL: [MetricPreset; 3] = [Self::Frequency, Self::Losses, Self::Coherence];
}

impl FromStr for MetricPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "frequency" => Ok(Self::Frequency),
            "losses" => Ok(Self::Losses),
            "coherence" => Ok(Self::Coherence),
            _ => Err(Error::UnknownPreset(s.to_string())),
        }
    }
}

impl fmt::Display for MetricPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Frequency => "frequency",
            Self::Losses => "losses",
            Self::Coherence => "coherence",
        })
    }
}

/// Performance weights: the coherence-graph Laplacian `W` on angles and the
/// diagonal `S` on frequencies.
#[derive(Clone, Debug, PartialEq)]
pub struct CoherenceSpec {
    w: DMatrix<f64>,
    s: DVector<f64>,
}

impl CoherenceSpec {
    pub fn new(w: DMatrix<f64>, s: DVector<f64>) -> Result<Self> {
        let n = s.len();
        if w.nrows() != n || w.ncols() != n {
            return Err(Error::Dimension(format!(
                "W is {}x{} but S has {n} entries",
                w.nrows(),
                w.ncols()
            )));
        }
        let scale = w.amax().max(1.0);
        for i in 0..n {
            let row_sum: f64 = w.row(i).sum();
            if row_sum.abs() > 1e-9 * scale {
                return Err(Error::InvalidNetwork(format!(
                    "coherence Laplacian row {i} sums to {row_sum}"
                )));
            }
            for j in 0..n {
                if (w[(i, j)] - w[(j, i)]).abs() > 1e-12 * scale {
                    return Err(Error::InvalidNetwork("coherence Laplacian is not symmetric".into()));
                }
                if i != j && w[(i, j)] > 1e-12 * scale {
                    return Err(Error::InvalidNetwork(format!(
                        "coherence weight between {i} and {j} is negative"
                    )));
                }
            }
        }
        if s.iter().any(|&x| !x.is_finite() || x < 0.0) {
            return Err(Error::InvalidNetwork("frequency weights must be nonnegative".into()));
        }
        if w.amax() == 0.0 && s.amax() == 0.0 {
            return Err(Error::InvalidNetwork("W and S are both zero".into()));
        }
        Ok(Self { w, s })
    }

    /// Builds `W` from pairwise weights `w_ij >= 0`.
    pub fn from_weights(n: usize, weights: &[(usize, usize, f64)], s: Vec<f64>) -> Result<Self> {
        let mut w = DMatrix::zeros(n, n);
        for &(i, j, wij) in weights {
            if i >= n || j >= n || i == j || wij.is_nan() || wij < 0.0 {
                return Err(Error::InvalidNetwork(format!(
                    "invalid coherence weight ({i}, {j}, {wij})"
                )));
            }
            w[(i, i)] += wij;
            w[(j, j)] += wij;
            w[(i, j)] -= wij;
            w[(j, i)] -= wij;
        }
        Self::new(w, DVector::from_vec(s))
    }

    pub fn n_buses(&self) -> usize {
        self.s.len()
    }

    pub fn w(&self) -> &DMatrix<f64> {
        &self.w
    }

    pub fn s(&self) -> &DVector<f64> {
        &self.s
    }

    pub fn reduced_w(&self, reference: usize) -> DMatrix<f64> {
        remove_row_col(&self.w, reference)
    }

    /// `trace(S M^-1)`, the topology-independent part of the metric.
    pub fn trace_s_minv(&self, params: &MachineParams) -> f64 {
        self.s
            .iter()
            .zip(params.inertia())
            .map(|(s, m)| s / m)
            .sum()
    }
}

/// Preset weights for `network`. The losses preset uses the Laplacian of
/// every line in the network, existing or candidate.
pub fn preset_spec(kind: MetricPreset, network: &PowerNetwork) -> CoherenceSpec {
    let n = network.n_buses();
    let (w, s) = match kind {
        MetricPreset::Frequency => (DMatrix::zeros(n, n), DVector::from_element(n, 1.0)),
        MetricPreset::Losses => (
            build_laplacian(network.lines(), n, network.reference())
                .full()
                .clone(),
            DVector::zeros(n),
        ),
        MetricPreset::Coherence => (
            DMatrix::identity(n, n) - DMatrix::from_element(n, n, 1.0 / n as f64),
            DVector::zeros(n),
        ),
    };
    CoherenceSpec { w, s }
}

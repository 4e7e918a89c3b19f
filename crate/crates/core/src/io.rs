//! Versioned JSON network files.
//!
//! ```json
//! {
//!   "schema": 1,
//!   "name": "path",
//!   "defaults": { "inertia": 1.0, "damping": 1.0 },
//!   "buses": [
//!     { "id": 0, "is_reference": true },
//!     { "id": 1 },
//!     { "id": 2, "inertia": 2.0 }
//!   ],
//!   "lines": [
//!     { "from": 0, "to": 1, "susceptance": 1.0, "status": "existing" },
//!     { "from": 1, "to": 2, "susceptance": 1.0, "status": "candidate" }
//!   ],
//!   "metric": { "preset": "coherence" }
//! }
//! ```
//!
//! A metric may instead list explicit weights, which define `W` as the
//! Laplacian of the weighted pairs, and the frequency weights `s`:
//! `{ "weights": [{ "from": 0, "to": 2, "weight": 1.0 }], "s": [0, 0, 1] }`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dynamics::{preset_spec, CoherenceSpec, MetricPreset};
use crate::error::{Error, Result};
use crate::network::{Bus, Line, PowerNetwork};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Defaults {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inertia: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub damping: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BusEntry {
    pub id: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inertia: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub damping: Option<f64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub is_reference: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightEntry {
    pub from: usize,
    pub to: usize,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum MetricEntry {
    Preset {
        preset: MetricPreset,
    },
    Weights {
        weights: Vec<WeightEntry>,
        #[serde(default)]
        s: Vec<f64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    pub schema: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default)]
    pub defaults: Defaults,
    pub buses: Vec<BusEntry>,
    pub lines: Vec<Line>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<MetricEntry>,
}

impl NetworkFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: Self = serde_json::from_str(text)
            .map_err(|e| Error::InvalidNetwork(format!("malformed network file: {e}")))?;
        if file.schema != SCHEMA_VERSION {
            return Err(Error::InvalidNetwork(format!(
                "unsupported schema version {} (expected {SCHEMA_VERSION})",
                file.schema
            )));
        }
        Ok(file)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidNetwork(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("network files always serialize")
    }

    /// File describing `network` with every bus's machine data spelled out.
    pub fn from_network(name: Option<String>, network: &PowerNetwork, metric: Option<MetricEntry>) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            name,
            defaults: Defaults::default(),
            buses: network
                .buses()
                .iter()
                .map(|b| BusEntry {
                    id: b.id,
                    inertia: Some(b.inertia),
                    damping: Some(b.damping),
                    is_reference: b.id == network.reference(),
                })
                .collect(),
            lines: network.lines().to_vec(),
            metric,
        }
    }

    pub fn network(&self) -> Result<PowerNetwork> {
        let refs: Vec<usize> = self.buses.iter().filter(|b| b.is_reference).map(|b| b.id).collect();
        if refs.len() != 1 {
            return Err(Error::InvalidNetwork(format!(
                "exactly one bus must be marked as reference, found {}",
                refs.len()
            )));
        }
        let mut buses = Vec::with_capacity(self.buses.len());
        for b in &self.buses {
            let inertia = b.inertia.or(self.defaults.inertia).ok_or_else(|| {
                Error::InvalidNetwork(format!("bus {} has no inertia and no default", b.id))
            })?;
            let damping = b.damping.or(self.defaults.damping).ok_or_else(|| {
                Error::InvalidNetwork(format!("bus {} has no damping and no default", b.id))
            })?;
            buses.push(Bus { id: b.id, inertia, damping });
        }
        buses.sort_by_key(|b| b.id);
        PowerNetwork::new(buses, self.lines.clone(), refs[0])
    }

    /// The metric named in the file, if any.
    pub fn metric_spec(&self, network: &PowerNetwork) -> Result<Option<CoherenceSpec>> {
        match &self.metric {
            None => Ok(None),
            Some(m) => metric_spec(m, network).map(Some),
        }
    }
}

pub fn metric_spec(metric: &MetricEntry, network: &PowerNetwork) -> Result<CoherenceSpec> {
    let n = network.n_buses();
    match metric {
        MetricEntry::Preset { preset } => Ok(preset_spec(*preset, network)),
        MetricEntry::Weights { weights, s } => {
            let s = if s.is_empty() { vec![0.0; n] } else { s.clone() };
            let pairs: Vec<_> = weights.iter().map(|w| (w.from, w.to, w.weight)).collect();
            CoherenceSpec::from_weights(n, &pairs, s)
        }
    }
}

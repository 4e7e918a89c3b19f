use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::dynamics::MachineParams;
use crate::error::{Error, Result};

/// A bus with its aggregate machine data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bus {
    pub id: usize,
    pub inertia: f64,
    pub damping: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LineStatus {
    Existing,
    Candidate,
}

/// An undirected line with its per-unit susceptance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub from: usize,
    pub to: usize,
    pub susceptance: f64,
    pub status: LineStatus,
}

impl Line {
    pub fn new(from: usize, to: usize, susceptance: f64, status: LineStatus) -> Self {
        Self {
            from,
            to,
            susceptance,
            status,
        }
    }

    pub fn existing(from: usize, to: usize, susceptance: f64) -> Self {
        Self::new(from, to, susceptance, LineStatus::Existing)
    }

    pub fn candidate(from: usize, to: usize, susceptance: f64) -> Self {
        Self::new(from, to, susceptance, LineStatus::Candidate)
    }

    /// Inverse susceptance, the reactance-like weight used by the radial bounds.
    pub fn reactance(&self) -> f64 {
        1.0 / self.susceptance
    }

    pub fn touches(&self, bus: usize) -> bool {
        self.from == bus || self.to == bus
    }

    pub fn key(&self) -> (usize, usize) {
        (self.from.min(self.to), self.from.max(self.to))
    }
}

/// A grid: its buses and lines, with one bus designated as reference.
///
/// Buses are indexed `0..n`; the bus at position `i` has id `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerNetwork {
    buses: Vec<Bus>,
    lines: Vec<Line>,
    reference: usize,
}

impl PowerNetwork {
    pub fn new(buses: Vec<Bus>, lines: Vec<Line>, reference: usize) -> Result<Self> {
        if buses.is_empty() {
            return Err(Error::InvalidNetwork("network has no buses".into()));
        }
        for (pos, bus) in buses.iter().enumerate() {
            if bus.id != pos {
                return Err(Error::InvalidNetwork(format!(
                    "bus ids must be contiguous from 0; found id {} at position {pos}",
                    bus.id
                )));
            }
            if !bus.inertia.is_finite() || bus.inertia <= 0.0 {
                return Err(Error::ZeroInertia(bus.id));
            }
            if !bus.damping.is_finite() || bus.damping <= 0.0 {
                return Err(Error::InvalidNetwork(format!(
                    "bus {} has nonpositive damping {}",
                    bus.id, bus.damping
                )));
            }
        }
        let n = buses.len();
        if reference >= n {
            return Err(Error::InvalidNetwork(format!(
                "reference bus {reference} out of range"
            )));
        }
        let mut seen = HashSet::new();
        for line in &lines {
            if line.from >= n || line.to >= n {
                return Err(Error::InvalidNetwork(format!(
                    "line ({}, {}) references an unknown bus",
                    line.from, line.to
                )));
            }
            if line.from == line.to {
                return Err(Error::InvalidNetwork(format!(
                    "line ({}, {}) is a self-loop",
                    line.from, line.to
                )));
            }
            if !line.susceptance.is_finite() || line.susceptance <= 0.0 {
                return Err(Error::InvalidNetwork(format!(
                    "line ({}, {}) has nonpositive susceptance {}",
                    line.from, line.to, line.susceptance
                )));
            }
            if !seen.insert(line.key()) {
                return Err(Error::InvalidNetwork(format!(
                    "duplicate line ({}, {})",
                    line.from, line.to
                )));
            }
        }
        Ok(Self {
            buses,
            lines,
            reference,
        })
    }

    /// Network whose buses all share the same inertia and damping.
    pub fn uniform(n: usize, inertia: f64, damping: f64, lines: Vec<Line>) -> Result<Self> {
        let buses = (0..n)
            .map(|id| Bus {
                id,
                inertia,
                damping,
            })
            .collect();
        Self::new(buses, lines, 0)
    }

    pub fn n_buses(&self) -> usize {
        self.buses.len()
    }

    pub fn buses(&self) -> &[Bus] {
        &self.buses
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn reference(&self) -> usize {
        self.reference
    }

    pub fn existing_lines(&self) -> impl Iterator<Item = &Line> {
        self.lines
            .iter()
            .filter(|l| l.status == LineStatus::Existing)
    }

    pub fn existing_indices(&self) -> Vec<usize> {
        self.lines
            .iter()
            .enumerate()
            .filter(|(_, l)| l.status == LineStatus::Existing)
            .map(|(m, _)| m)
            .collect()
    }

    pub fn machine_params(&self) -> MachineParams {
        MachineParams::new(
            self.buses.iter().map(|b| b.inertia).collect(),
            self.buses.iter().map(|b| b.damping).collect(),
        )
    }

    /// Same buses with a different line list.
    pub fn with_lines(&self, lines: Vec<Line>) -> Result<Self> {
        Self::new(self.buses.clone(), lines, self.reference)
    }

    /// Network restricted to the given line indices, all marked existing.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let mut lines = Vec::with_capacity(indices.len());
        for &m in indices {
            let line = self.lines.get(m).ok_or_else(|| {
                Error::InvalidNetwork(format!("line index {m} out of range"))
            })?;
            lines.push(Line::existing(line.from, line.to, line.susceptance));
        }
        self.with_lines(lines)
    }
}

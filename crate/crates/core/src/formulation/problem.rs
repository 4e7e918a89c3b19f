use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dynamics::{CoherenceSpec, MachineParams};
use crate::error::{Error, Result};
use crate::netgraph::{is_connected, EdgeIncidence, Graph, ReducedIndex};
use crate::network::{Line, PowerNetwork};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DesignMode {
    /// Extend a connected existing network with candidate lines.
    Augment,
    /// Pick a spanning tree from the candidate lines.
    Radial,
}

/// Select `E` from the candidate lines with `|E| <= budget`, `E` connected,
/// minimizing `trace(W~ L~(E)^-1)`.
#[derive(Clone, Debug)]
pub struct DesignProblem {
    n_buses: usize,
    candidates: Vec<Line>,
    fixed: Vec<usize>,
    budget: usize,
    mode: DesignMode,
    reference: usize,
    spec: CoherenceSpec,
    params: MachineParams,
}

impl DesignProblem {
    /// Augmentation of the network's existing lines with its candidate
    /// lines. `budget` counts all lines, existing included.
    pub fn augment(network: &PowerNetwork, spec: CoherenceSpec, budget: usize) -> Result<Self> {
        let n = network.n_buses();
        let fixed = network.existing_indices();
        if !is_connected(network.existing_lines(), n) {
            return Err(Error::Assumption(
                "existing network is disconnected; augmentation bounds need a connected base \
                 (use radial design instead)"
                    .into(),
            ));
        }
        if budget + 1 < n {
            return Err(Error::Assumption(format!(
                "budget {budget} is below the {} lines any connected topology needs",
                n - 1
            )));
        }
        if budget < fixed.len() {
            return Err(Error::Assumption(format!(
                "budget {budget} is smaller than the {} existing lines",
                fixed.len()
            )));
        }
        Self::build(network, spec, fixed, budget, DesignMode::Augment, network.reference())
    }

    /// Augmentation by at most `extra` candidate lines.
    pub fn augment_by(network: &PowerNetwork, spec: CoherenceSpec, extra: usize) -> Result<Self> {
        let existing = network.existing_indices().len();
        Self::augment(network, spec, existing + extra)
    }

    /// Radial design over all lines of the network. The reference must touch
    /// exactly one candidate line; if the network's reference does not, the
    /// lowest-numbered bus that does is used.
    pub fn radial(network: &PowerNetwork, spec: CoherenceSpec) -> Result<Self> {
        let n = network.n_buses();
        let g = Graph::unit(n, &network.lines().iter().map(Line::key).collect::<Vec<_>>());
        if !g.is_connected() {
            return Err(Error::Disconnected);
        }
        let reference = if g.degree(network.reference()) == 1 {
            network.reference()
        } else {
            (0..n).find(|&v| g.degree(v) == 1).ok_or_else(|| {
                Error::Assumption(
                    "radial design needs a reference bus incident to exactly one candidate line"
                        .into(),
                )
            })?
        };
        Self::build(network, spec, Vec::new(), n - 1, DesignMode::Radial, reference)
    }

    fn build(
        network: &PowerNetwork,
        spec: CoherenceSpec,
        fixed: Vec<usize>,
        budget: usize,
        mode: DesignMode,
        reference: usize,
    ) -> Result<Self> {
        if spec.n_buses() != network.n_buses() {
            return Err(Error::Dimension("metric size differs from the network".into()));
        }
        if network.n_buses() < 2 {
            return Err(Error::InvalidNetwork("design needs at least two buses".into()));
        }
        Ok(Self {
            n_buses: network.n_buses(),
            candidates: network.lines().to_vec(),
            fixed,
            budget,
            mode,
            reference,
            spec,
            params: network.machine_params(),
        })
    }

    pub fn n_buses(&self) -> usize {
        self.n_buses
    }

    pub fn candidates(&self) -> &[Line] {
        &self.candidates
    }

    /// Candidate indices forced into every design (existing lines when augmenting).
    pub fn fixed(&self) -> &[usize] {
        &self.fixed
    }

    pub fn free_edges(&self) -> Vec<usize> {
        (0..self.candidates.len())
            .filter(|m| !self.fixed.contains(m))
            .collect()
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn mode(&self) -> DesignMode {
        self.mode
    }

    pub fn reference(&self) -> usize {
        self.reference
    }

    pub fn spec(&self) -> &CoherenceSpec {
        &self.spec
    }

    pub fn params(&self) -> &MachineParams {
        &self.params
    }

    pub fn index(&self) -> ReducedIndex {
        ReducedIndex::new(self.n_buses, self.reference)
    }

    pub fn incidence(&self) -> EdgeIncidence {
        EdgeIncidence::new(&self.candidates, self.n_buses, self.reference)
    }

    pub fn reduced_w(&self) -> DMatrix<f64> {
        self.spec.reduced_w(self.reference)
    }

    /// Candidate graph with inverse-susceptance weights.
    pub fn inverse_graph(&self) -> Graph {
        Graph::inverse_weighted(self.n_buses, &self.candidates)
    }

    /// Full selection vector with only the fixed lines switched on.
    pub fn base_selection(&self) -> Vec<bool> {
        let mut z = vec![false; self.candidates.len()];
        for &m in &self.fixed {
            z[m] = true;
        }
        z
    }
}

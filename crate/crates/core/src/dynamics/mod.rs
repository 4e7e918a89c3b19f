//! Linearized swing dynamics and the H2 generalized-coherence metric.
//!
//! The metric is available through three independent routes: the closed
//! form [`h2_squared_closed_form`], the observability Gramian
//! [`h2_squared_gramian`] and impulse simulation [`impulse_energy_sum`].

mod gramian;
mod metric;
mod simulate;
mod spec;
mod statespace;

pub use gramian::{h2_squared_gramian, solve_gramian, solve_lyapunov, Gramian};
pub use metric::{h2_squared_closed_form, psd_sqrt, topology_term, H2Breakdown};
pub use simulate::{impulse_energy_sum, simulate_impulse, SimulationOptions, Trajectory};
pub use spec::{preset_spec, CoherenceSpec, MetricPreset};
pub use statespace::{assemble_state_space, StateSpace};

use crate::error::{Error, Result};

/// Per-bus inertia `M_i` and damping `D_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct MachineParams {
    inertia: Vec<f64>,
    damping: Vec<f64>,
}

impl MachineParams {
    pub fn new(inertia: Vec<f64>, damping: Vec<f64>) -> Self {
        assert_eq!(inertia.len(), damping.len());
        Self { inertia, damping }
    }

    pub fn uniform(n: usize, inertia: f64, damping: f64) -> Self {
        Self::new(vec![inertia; n], vec![damping; n])
    }

    pub fn n_buses(&self) -> usize {
        self.inertia.len()
    }

    pub fn inertia(&self) -> &[f64] {
        &self.inertia
    }

    pub fn damping(&self) -> &[f64] {
        &self.damping
    }

    /// Rejects buses without inertia; they would need Kron reduction.
    pub fn check_inertia(&self) -> Result<()> {
        match self.inertia.iter().position(|&m| !(m > 0.0 && m.is_finite())) {
            Some(bus) => Err(Error::ZeroInertia(bus)),
            None => Ok(()),
        }
    }

    /// The common damping value when all buses share it (to 1e-12 relative).
    pub fn uniform_damping(&self) -> Option<f64> {
        let d = *self.damping.first()?;
        self.damping
            .iter()
            .all(|&x| (x - d).abs() <= 1e-12 * d.abs())
            .then_some(d)
    }
}

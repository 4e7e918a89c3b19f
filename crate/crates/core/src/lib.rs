//! Generalized network-coherence metrics and exact topology design for
//! power grids.
//!
//! The crate is organized bottom-up:
//!
//! - [`netgraph`]: Laplacians and incidence vectors, plus the graph
//!   algorithms behind the variable bounds.
//! - [`dynamics`]: swing-equation state space and the H2 coherence metric.
//!   The metric has a closed form; the Gramian and impulse simulation serve
//!   as cross-checks.
//! - [`formulation`]: design problems, McCormick variable bounds and the
//!   exact MILP model.
//! - [`solver`]: LP-based branch-and-bound with a brute-force oracle.
//! - [`io`]: the versioned JSON network format.

pub mod cases;
pub mod dynamics;
mod error;
pub mod formulation;
pub mod io;
pub mod netgraph;
mod network;
pub mod solver;

pub use error::{Error, Result};
pub use network::{Bus, Line, LineStatus, PowerNetwork};

pub use dynamics::{CoherenceSpec, MachineParams, MetricPreset};
pub use formulation::{DesignMode, DesignProblem, MilpModel, VariableBounds};
pub use solver::{DesignSolution, SolveStats};

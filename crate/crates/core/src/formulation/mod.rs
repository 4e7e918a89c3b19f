//! Exact MILP reformulation of the topology design problem and the bounds
//! on its continuous variables.

mod bounds;
mod milp;
mod problem;
mod tighten;

pub use bounds::{
    bounds_augment, bounds_radial, loose_bounds, radial_constants, RadialConstants, VariableBounds,
    LOOSE_UPPER,
};
pub use milp::{build_milp, build_milp_tightened, MilpModel, Row, Sense, VarKind};
pub use problem::{DesignMode, DesignProblem};
pub use tighten::{cutset_report, tighten_bounds, Tightening, TighteningSummary};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("graph not connected")]
    Disconnected,

    #[error("bus {0} cannot reach the reference bus")]
    Unreachable(usize),

    #[error("singular reduced Laplacian: the selected topology is disconnected")]
    SingularLaplacian,

    #[error("not radial: {0}")]
    NotRadial(String),

    #[error("Kron reduction unsupported: bus {0} has zero inertia")]
    ZeroInertia(usize),

    #[error("assumption violated: {0}")]
    Assumption(String),

    #[error("unknown metric preset `{0}` (expected frequency, losses or coherence)")]
    UnknownPreset(String),

    #[error("infeasible bounds on X[{i},{j}]: lower {lower} exceeds upper {upper}")]
    InfeasibleBounds {
        i: usize,
        j: usize,
        lower: f64,
        upper: f64,
    },

    #[error("no connected topology within budget")]
    NoFeasibleTopology,

    #[error("brute force limited to {limit} free candidate edges, got {count}")]
    GuardExceeded { count: usize, limit: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

pub type Result<T> = std::result::Result<T, Error>;

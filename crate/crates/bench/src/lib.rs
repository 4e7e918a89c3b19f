//! Deterministic inputs shared by the criterion benches.

use gridcoh::cases::{ieee39, ieee39_north, ieee39_with_candidates};
use gridcoh::dynamics::{assemble_state_space, preset_spec, StateSpace};
use gridcoh::netgraph::{build_laplacian, LaplacianMatrix};
use gridcoh::{DesignProblem, MetricPreset, PowerNetwork};

/// Radial design over the 15-bus northern IEEE-39 subnetwork.
pub fn north_radial() -> DesignProblem {
    let net = ieee39_north();
    let spec = preset_spec(MetricPreset::Coherence, &net);
    DesignProblem::radial(&net, spec).expect("north subnetwork admits a radial design")
}

/// IEEE-39 with ten candidates, adding `extra` of them.
pub fn ieee39_augment(extra: usize) -> DesignProblem {
    let net = ieee39_with_candidates();
    let spec = preset_spec(MetricPreset::Coherence, &net);
    DesignProblem::augment_by(&net, spec, extra).expect("candidate set is large enough")
}

/// Laplacian of the lines in service.
pub fn in_service_laplacian(net: &PowerNetwork) -> LaplacianMatrix {
    build_laplacian(net.existing_lines(), net.n_buses(), net.reference())
}

/// State space of the base IEEE-39 case under the coherence metric.
pub fn ieee39_state_space() -> StateSpace {
    let net = ieee39();
    let spec = preset_spec(MetricPreset::Coherence, &net);
    assemble_state_space(&in_service_laplacian(&net), &net.machine_params(), &spec)
        .expect("base case has positive inertia")
}

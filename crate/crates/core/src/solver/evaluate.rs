use nalgebra::DMatrix;

use crate::dynamics::topology_term;
use crate::error::{Error, Result};
use crate::netgraph::EdgeIncidence;

#[derive(Clone, Debug, PartialEq)]
pub struct TopologyEvaluation {
    /// `trace(W~ L~(z)^-1)`.
    pub objective: f64,
    /// `L~(z)^-1` over the reduced rows.
    pub x: DMatrix<f64>,
}

/// Evaluates a line selection by Cholesky factorization of its reduced
/// Laplacian. Selections that leave a bus isolated give
/// [`Error::Disconnected`].
pub fn evaluate_topology(
    incidence: &EdgeIncidence,
    w_reduced: &DMatrix<f64>,
    z: &[bool],
) -> Result<TopologyEvaluation> {
    if z.len() != incidence.len() {
        return Err(Error::Dimension(format!(
            "selection has {} entries for {} lines",
            z.len(),
            incidence.len()
        )));
    }
    if !incidence.selection_connected(z) {
        return Err(Error::Disconnected);
    }
    let l = incidence.assemble(z);
    let objective = topology_term(w_reduced, &l)?;
    let x = l.cholesky().ok_or(Error::SingularLaplacian)?.inverse();
    Ok(TopologyEvaluation { objective, x })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{preset_spec, MetricPreset};
    use crate::network::{Line, PowerNetwork};
    use approx::assert_relative_eq;

    fn triangle() -> PowerNetwork {
        PowerNetwork::uniform(
            3,
            1.0,
            1.0,
            vec![
                Line::candidate(0, 1, 1.0),
                Line::candidate(1, 2, 1.0),
                Line::candidate(0, 2, 1.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn path_and_triangle_coherence() {
        let net = triangle();
        let inc = EdgeIncidence::new(net.lines(), 3, 0);
        let w = preset_spec(MetricPreset::Coherence, &net).reduced_w(0);
        let path = evaluate_topology(&inc, &w, &[true, true, false]).unwrap();
        assert_relative_eq!(path.objective, 4.0 / 3.0, max_relative = 1e-12);
        let full = evaluate_topology(&inc, &w, &[true, true, true]).unwrap();
        assert_relative_eq!(full.objective, 2.0 / 3.0, max_relative = 1e-12);
        assert_relative_eq!((&w * &full.x).trace(), full.objective, max_relative = 1e-12);
    }

    #[test]
    fn isolated_bus_is_disconnected() {
        let net = triangle();
        let inc = EdgeIncidence::new(net.lines(), 3, 0);
        let w = preset_spec(MetricPreset::Coherence, &net).reduced_w(0);
        assert!(matches!(
            evaluate_topology(&inc, &w, &[true, false, false]),
            Err(Error::Disconnected)
        ));
    }
}

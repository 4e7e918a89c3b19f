use nalgebra::DMatrix;
use serde::Serialize;

use super::{CoherenceSpec, MachineParams};
use crate::error::{Error, Result};
use crate::netgraph::{LaplacianMatrix, UnionFind};

/// Symmetric PSD square root by eigendecomposition. Eigenvalues within
/// `1e-12` (relative to the largest magnitude) of zero are set to zero.
pub fn psd_sqrt(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = m.nrows();
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let eig = m.clone().symmetric_eigen();
    let scale = eig.eigenvalues.amax().max(1.0);
    let mut roots = eig.eigenvalues.clone();
    for r in roots.iter_mut() {
        if *r < -1e-12 * scale {
            return Err(Error::Numerical(format!(
                "matrix is not positive semidefinite (eigenvalue {r})"
            )));
        }
        *r = if *r <= 1e-12 * scale { 0.0 } else { r.sqrt() };
    }
    let v = &eig.eigenvectors;
    Ok(v * DMatrix::from_diagonal(&roots) * v.transpose())
}

fn structurally_connected(l: &DMatrix<f64>) -> bool {
    let n = l.nrows();
    let mut uf = UnionFind::new(n);
    for i in 0..n {
        for j in (i + 1)..n {
            if l[(i, j)] != 0.0 {
                uf.union(i, j);
            }
        }
    }
    uf.components() <= 1
}

/// `trace(W~ L~^-1)` via a Cholesky factorization of the reduced Laplacian.
pub fn topology_term(w_reduced: &DMatrix<f64>, l_reduced: &DMatrix<f64>) -> Result<f64> {
    if l_reduced.nrows() == 0 {
        return Ok(0.0);
    }
    let chol = l_reduced
        .clone()
        .cholesky()
        .ok_or(Error::SingularLaplacian)?;
    Ok(chol.solve(w_reduced).trace())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct H2Breakdown {
    /// `trace(W~ L~^-1)`, the part that depends on the topology.
    pub topology_term: f64,
    /// `trace(S M^-1)`.
    pub inertia_term: f64,
    pub damping: f64,
    /// `(topology_term + inertia_term) / (2 d)`.
    pub total: f64,
}

/// Squared H2 norm under uniform damping.
pub fn h2_squared_closed_form(
    spec: &CoherenceSpec,
    l: &LaplacianMatrix,
    params: &MachineParams,
) -> Result<H2Breakdown> {
    if spec.n_buses() != l.n_buses() || params.n_buses() != l.n_buses() {
        return Err(Error::Dimension("metric, Laplacian and machine data disagree".into()));
    }
    params.check_inertia()?;
    let damping = params.uniform_damping().ok_or_else(|| {
        Error::Assumption("closed-form metric requires identical damping on all buses".into())
    })?;
    if !structurally_connected(l.full()) {
        return Err(Error::SingularLaplacian);
    }
    let topology_term = topology_term(&spec.reduced_w(l.reference()), &l.reduced())?;
    let inertia_term = spec.trace_s_minv(params);
    Ok(H2Breakdown {
        topology_term,
        inertia_term,
        damping,
        total: (topology_term + inertia_term) / (2.0 * damping),
    })
}

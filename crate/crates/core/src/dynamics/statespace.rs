use nalgebra::DMatrix;

use super::{psd_sqrt, CoherenceSpec, MachineParams};
use crate::error::{Error, Result};
use crate::netgraph::LaplacianMatrix;

/// `x' = A x + B u`, `y = C x` with state `x = [theta; omega]`.
#[derive(Clone, Debug)]
pub struct StateSpace {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    laplacian: DMatrix<f64>,
}

impl StateSpace {
    pub fn n_buses(&self) -> usize {
        self.laplacian.nrows()
    }

    pub fn laplacian(&self) -> &DMatrix<f64> {
        &self.laplacian
    }
}

pub fn assemble_state_space(
    l: &LaplacianMatrix,
    params: &MachineParams,
    spec: &CoherenceSpec,
) -> Result<StateSpace> {
    let n = l.n_buses();
    if params.n_buses() != n || spec.n_buses() != n {
        return Err(Error::Dimension(format!(
            "Laplacian has {n} buses, machine data {}, metric {}",
            params.n_buses(),
            spec.n_buses()
        )));
    }
    params.check_inertia()?;

    let mut a = DMatrix::zeros(2 * n, 2 * n);
    let mut b = DMatrix::zeros(2 * n, n);
    for i in 0..n {
        let m = params.inertia()[i];
        a[(i, n + i)] = 1.0;
        for j in 0..n {
            a[(n + i, j)] = -l.full()[(i, j)] / m;
        }
        a[(n + i, n + i)] = -params.damping()[i] / m;
        b[(n + i, i)] = 1.0 / m;
    }

    let mut c = DMatrix::zeros(2 * n, 2 * n);
    c.view_mut((0, 0), (n, n)).copy_from(&psd_sqrt(spec.w())?);
    for i in 0..n {
        c[(n + i, n + i)] = spec.s()[i].sqrt();
    }
    Ok(StateSpace {
        a,
        b,
        c,
        laplacian: l.full().clone(),
    })
}

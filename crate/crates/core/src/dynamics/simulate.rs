use std::io::{self, Write};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::StateSpace;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimulationOptions {
    /// Simulated time span in seconds.
    pub horizon: f64,
    /// Fixed RK4 step in seconds.
    pub dt: f64,
    /// Keep every `stride`-th step in the trajectory (first and last always kept).
    pub stride: usize,
}

impl Default for SimulationOptions {
    fn default() -> Self {
        Self {
            horizon: 400.0,
            dt: 0.01,
            stride: 1,
        }
    }
}

/// Sampled impulse response for one disturbed bus.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub bus: usize,
    pub times: Vec<f64>,
    pub theta: Vec<Vec<f64>>,
    pub omega: Vec<Vec<f64>>,
    /// Angle dispersion around the grid average.
    pub coherence: Vec<f64>,
    /// `||y(t)||^2`.
    pub loss: Vec<f64>,
    /// Accumulated output energy up to each sample.
    pub energy: Vec<f64>,
    /// Share of the total energy accumulated over the last 10% of the horizon.
    pub tail_fraction: f64,
    /// Largest `|omega_i|` per bus over every integration step, sampled or not.
    pub peak_omega: Vec<f64>,
}

impl Trajectory {
    pub fn output_energy(&self) -> f64 {
        self.energy.last().copied().unwrap_or(0.0)
    }

    /// Largest `|omega_i(t)|` over the run, optionally skipping one bus.
    pub fn peak_abs_omega(&self, exclude: Option<usize>) -> f64 {
        self.peak_omega
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != exclude)
            .map(|(_, w)| *w)
            .fold(0.0, f64::max)
    }

    /// CSV with header `t,theta_0..,omega_0..,fc,f`, nine significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let n = self.theta.first().map_or(0, Vec::len);
        let mut header = vec!["t".to_string()];
        header.extend((0..n).map(|i| format!("theta_{i}")));
        header.extend((0..n).map(|i| format!("omega_{i}")));
        header.push("fc".into());
        header.push("f".into());
        writeln!(out, "{}", header.join(","))?;
        for k in 0..self.times.len() {
            let mut row = Vec::with_capacity(2 * n + 3);
            row.push(self.times[k]);
            row.extend_from_slice(&self.theta[k]);
            row.extend_from_slice(&self.omega[k]);
            row.push(self.coherence[k]);
            row.push(self.loss[k]);
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.8e}")).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

struct Integrator<'a> {
    a: &'a DMatrix<f64>,
    c: &'a DMatrix<f64>,
    y: DVector<f64>,
}

impl Integrator<'_> {
    fn output_power(&mut self, x: &DVector<f64>) -> f64 {
        self.c.mul_to(x, &mut self.y);
        self.y.norm_squared()
    }
}

fn dispersion(theta: &[f64]) -> f64 {
    let mean = theta.iter().sum::<f64>() / theta.len() as f64;
    theta.iter().map(|t| (t - mean).powi(2)).sum()
}

/// Runs the free response from `x0` with classical RK4, integrating the
/// output power alongside the state. `sample` sees `(step, t, x, energy)`.
fn integrate(
    ss: &StateSpace,
    x0: DVector<f64>,
    opts: &SimulationOptions,
    mut sample: impl FnMut(usize, f64, &DVector<f64>, f64),
) -> Result<(f64, f64)> {
    if opts.dt.is_nan() || opts.dt <= 0.0 || opts.horizon.is_nan() || opts.horizon <= 0.0 {
        return Err(Error::Numerical("dt and horizon must be positive".into()));
    }
    let steps = (opts.horizon / opts.dt).round().max(1.0) as usize;
    let tail_start = steps - steps / 10;
    let dim = x0.len();
    let mut integ = Integrator {
        a: &ss.a,
        c: &ss.c,
        y: DVector::zeros(ss.c.nrows()),
    };
    let limit = 1e6 * x0.norm().max(1e-300);

    let mut x = x0;
    let mut energy = 0.0;
    let mut tail_energy_start = 0.0;
    let (mut k1, mut k2, mut k3, mut k4) = (
        DVector::zeros(dim),
        DVector::zeros(dim),
        DVector::zeros(dim),
        DVector::zeros(dim),
    );
    let mut tmp = DVector::zeros(dim);
    let h = opts.dt;
    sample(0, 0.0, &x, 0.0);
    for step in 1..=steps {
        if step - 1 == tail_start {
            tail_energy_start = energy;
        }
        integ.a.mul_to(&x, &mut k1);
        let p1 = integ.output_power(&x);

        tmp.copy_from(&x);
        tmp.axpy(0.5 * h, &k1, 1.0);
        integ.a.mul_to(&tmp, &mut k2);
        let p2 = integ.output_power(&tmp);

        tmp.copy_from(&x);
        tmp.axpy(0.5 * h, &k2, 1.0);
        integ.a.mul_to(&tmp, &mut k3);
        let p3 = integ.output_power(&tmp);

        tmp.copy_from(&x);
        tmp.axpy(h, &k3, 1.0);
        integ.a.mul_to(&tmp, &mut k4);
        let p4 = integ.output_power(&tmp);

        x.axpy(h / 6.0, &k1, 1.0);
        x.axpy(h / 3.0, &k2, 1.0);
        x.axpy(h / 3.0, &k3, 1.0);
        x.axpy(h / 6.0, &k4, 1.0);
        energy += h / 6.0 * (p1 + 2.0 * p2 + 2.0 * p3 + p4);

        let norm = x.norm();
        if !norm.is_finite() || !energy.is_finite() || norm > limit {
            return Err(Error::Numerical(format!(
                "integration diverged at t = {:.3} s; reduce dt below {}",
                step as f64 * h,
                h
            )));
        }
        sample(step, step as f64 * h, &x, energy);
    }
    let tail = if energy > 0.0 {
        (energy - tail_energy_start) / energy
    } else {
        0.0
    };
    Ok((energy, tail))
}

fn impulse_state(ss: &StateSpace, bus: usize) -> Result<DVector<f64>> {
    if bus >= ss.n_buses() {
        return Err(Error::InvalidNetwork(format!("impulse bus {bus} out of range")));
    }
    Ok(ss.b.column(bus).into_owned())
}

/// Response to `u = e_bus * delta(t)`, i.e. the free response from `B e_bus`.
pub fn simulate_impulse(ss: &StateSpace, bus: usize, opts: &SimulationOptions) -> Result<Trajectory> {
    let n = ss.n_buses();
    let x0 = impulse_state(ss, bus)?;
    let stride = opts.stride.max(1);
    let steps = (opts.horizon / opts.dt).round().max(1.0) as usize;
    let mut traj = Trajectory {
        bus,
        times: Vec::new(),
        theta: Vec::new(),
        omega: Vec::new(),
        coherence: Vec::new(),
        loss: Vec::new(),
        energy: Vec::new(),
        tail_fraction: 0.0,
        peak_omega: vec![0.0; n],
    };
    let mut y = DVector::zeros(ss.c.nrows());
    let (_, tail) = integrate(ss, x0, opts, |step, t, x, e| {
        for (peak, w) in traj.peak_omega.iter_mut().zip(x.rows(n, n).iter()) {
            *peak = peak.max(w.abs());
        }
        if step % stride != 0 && step != steps {
            return;
        }
        let theta: Vec<f64> = x.rows(0, n).iter().copied().collect();
        let omega: Vec<f64> = x.rows(n, n).iter().copied().collect();
        ss.c.mul_to(x, &mut y);
        traj.times.push(t);
        traj.coherence.push(dispersion(&theta));
        traj.loss.push(y.norm_squared());
        traj.theta.push(theta);
        traj.omega.push(omega);
        traj.energy.push(e);
    })?;
    traj.tail_fraction = tail;
    Ok(traj)
}

/// Sum over every bus of the impulse-response output energy, which
/// approximates the squared H2 norm. Buses run in parallel; the sum is
/// taken in bus order.
pub fn impulse_energy_sum(ss: &StateSpace, opts: &SimulationOptions) -> Result<f64> {
    let per_bus: Vec<Result<f64>> = (0..ss.n_buses())
        .into_par_iter()
        .map(|bus| {
            let x0 = impulse_state(ss, bus)?;
            integrate(ss, x0, opts, |_, _, _, _| {}).map(|(e, _)| e)
        })
        .collect();
    per_bus.into_iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{assemble_state_space, preset_spec, CoherenceSpec, MachineParams, MetricPreset};
    use crate::netgraph::build_laplacian;
    use crate::network::{Line, PowerNetwork};

    fn path_system() -> StateSpace {
        let lines = vec![Line::existing(0, 1, 1.0), Line::existing(1, 2, 1.0)];
        let net = PowerNetwork::uniform(3, 1.0, 0.025, lines.clone()).unwrap();
        let l = build_laplacian(&lines, 3, 0);
        assemble_state_space(&l, &net.machine_params(), &preset_spec(MetricPreset::Coherence, &net))
            .unwrap()
    }

    #[test]
    fn impulse_sum_converges_to_closed_form() {
        let ss = path_system();
        let sum = impulse_energy_sum(&ss, &SimulationOptions::default()).unwrap();
        let exact = 80.0 / 3.0;
        assert!((sum - exact).abs() / exact < 0.01, "{sum}");
    }

    #[test]
    fn single_bus_energy_is_analytic() {
        let (m, d, s0) = (2.0, 0.5, 3.0);
        let l = build_laplacian(std::iter::empty(), 1, 0);
        let params = MachineParams::new(vec![m], vec![d]);
        let spec = CoherenceSpec::new(DMatrix::zeros(1, 1), DVector::from_vec(vec![s0])).unwrap();
        let ss = assemble_state_space(&l, &params, &spec).unwrap();
        let traj = simulate_impulse(&ss, 0, &SimulationOptions::default()).unwrap();
        let exact = s0 / (2.0 * m * d);
        assert!((traj.output_energy() - exact).abs() / exact < 1e-6);
    }

    #[test]
    fn trajectory_invariants() {
        let ss = path_system();
        let opts = SimulationOptions {
            horizon: 50.0,
            dt: 0.01,
            stride: 10,
        };
        let traj = simulate_impulse(&ss, 2, &opts).unwrap();
        assert_eq!(traj.times.len(), 501);
        assert!(traj.times.windows(2).all(|w| w[1] > w[0]));
        assert!(traj.coherence.iter().all(|&v| v >= 0.0));
        assert!(traj.loss.iter().all(|&v| v >= 0.0));
        assert!(traj.energy.windows(2).all(|w| w[1] >= w[0]));
        assert_eq!(traj.peak_abs_omega(None), 1.0);
        assert!(traj.peak_abs_omega(Some(2)) < 1.0);
    }

    #[test]
    fn divergence_is_reported() {
        let ss = path_system();
        let opts = SimulationOptions {
            horizon: 100.0,
            dt: 3.0,
            stride: 1,
        };
        assert!(matches!(simulate_impulse(&ss, 1, &opts), Err(Error::Numerical(_))));
    }

    #[test]
    fn csv_layout() {
        let ss = path_system();
        let opts = SimulationOptions {
            horizon: 0.02,
            dt: 0.01,
            stride: 1,
        };
        let traj = simulate_impulse(&ss, 0, &opts).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t,theta_0,theta_1,theta_2,omega_0,omega_1,omega_2,fc,f"
        );
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first.len(), 9);
        assert_eq!(first[4], "1.00000000e0");
    }
}

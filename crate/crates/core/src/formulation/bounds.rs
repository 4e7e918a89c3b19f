use nalgebra::DMatrix;
use serde::Serialize;

use super::problem::{DesignMode, DesignProblem};
use crate::error::{Error, Result};
use crate::netgraph::{build_laplacian, max_spanning_tree_weight, shortest_path_weights};

/// Upper bound used when no structural bound is available.
pub const LOOSE_UPPER: f64 = 10.0;

/// Box bounds on the entries of `X = L~^-1`, stored as symmetric matrices
/// over the reduced rows.
#[derive(Clone, Debug, PartialEq)]
pub struct VariableBounds {
    lower: DMatrix<f64>,
    upper: DMatrix<f64>,
}

impl VariableBounds {
    pub fn uniform(dim: usize, lower: f64, upper: f64) -> Self {
        let upper = if lower > upper && lower - upper <= 1e-12 * lower.abs().max(1.0) {
            lower
        } else {
            upper
        };
        Self {
            lower: DMatrix::from_element(dim, dim, lower),
            upper: DMatrix::from_element(dim, dim, upper),
        }
    }

    pub fn from_matrices(lower: DMatrix<f64>, upper: DMatrix<f64>) -> Result<Self> {
        if lower.shape() != upper.shape() || !lower.is_square() {
            return Err(Error::Dimension("bound matrices must be square and equal in size".into()));
        }
        let b = Self { lower, upper };
        for i in 0..b.dim() {
            for j in 0..b.dim() {
                if b.lower[(i, j)] != b.lower[(j, i)] || b.upper[(i, j)] != b.upper[(j, i)] {
                    return Err(Error::Dimension("bound matrices must be symmetric".into()));
                }
            }
        }
        Ok(b)
    }

    pub fn dim(&self) -> usize {
        self.lower.nrows()
    }

    pub fn lower(&self, i: usize, j: usize) -> f64 {
        self.lower[(i, j)]
    }

    pub fn upper(&self, i: usize, j: usize) -> f64 {
        self.upper[(i, j)]
    }

    pub fn lower_matrix(&self) -> &DMatrix<f64> {
        &self.lower
    }

    pub fn upper_matrix(&self) -> &DMatrix<f64> {
        &self.upper
    }

    /// Sets both bounds of `(i, j)`. Intervals that cross by rounding error
    /// only (relative `1e-12`) collapse to the lower bound.
    pub fn set(&mut self, i: usize, j: usize, lower: f64, upper: f64) {
        self.lower[(i, j)] = lower;
        self.lower[(j, i)] = lower;
        self.upper[(i, j)] = upper;
        self.upper[(j, i)] = upper;
        self.close_rounding_gap(i, j);
    }

    /// Raises the lower bound of `(i, j)` to at least `value`.
    pub fn raise_lower(&mut self, i: usize, j: usize, value: f64) {
        let v = self.lower[(i, j)].max(value);
        self.lower[(i, j)] = v;
        self.lower[(j, i)] = v;
        self.close_rounding_gap(i, j);
    }

    fn close_rounding_gap(&mut self, i: usize, j: usize) {
        let (lo, hi) = (self.lower[(i, j)], self.upper[(i, j)]);
        if lo > hi && lo - hi <= 1e-12 * lo.abs().max(1.0) {
            self.upper[(i, j)] = lo;
            self.upper[(j, i)] = lo;
        }
    }

    /// First pair (in row-major upper-triangular order) whose interval is
    /// empty, or a non-finite bound.
    pub fn check(&self) -> Result<()> {
        for i in 0..self.dim() {
            for j in i..self.dim() {
                let (lo, hi) = (self.lower[(i, j)], self.upper[(i, j)]);
                if !lo.is_finite() || !hi.is_finite() || lo > hi || lo < 0.0 {
                    return Err(Error::InfeasibleBounds { i, j, lower: lo, upper: hi });
                }
            }
        }
        Ok(())
    }

    /// Entries of `x` outside the bounds by more than `tol`, as
    /// `(i, j, value)` with `i <= j`.
    pub fn violations(&self, x: &DMatrix<f64>, tol: f64) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for i in 0..self.dim() {
            for j in i..self.dim() {
                let v = x[(i, j)];
                if v < self.lower[(i, j)] - tol || v > self.upper[(i, j)] + tol {
                    out.push((i, j, v));
                }
            }
        }
        out
    }

    /// Sum of interval widths over unordered pairs.
    pub fn total_width(&self) -> f64 {
        let mut w = 0.0;
        for i in 0..self.dim() {
            for j in i..self.dim() {
                w += self.upper[(i, j)] - self.lower[(i, j)];
            }
        }
        w
    }
}

/// Bounds from the existing network: any augmentation can only lower the
/// entries of `L~_e^-1`.
pub fn bounds_augment(problem: &DesignProblem) -> Result<VariableBounds> {
    if problem.mode() != DesignMode::Augment {
        return Err(Error::Assumption("augmentation bounds need an augmentation problem".into()));
    }
    let n = problem.n_buses();
    let existing = problem.fixed().iter().map(|&m| &problem.candidates()[m]);
    let lap = build_laplacian(existing, n, problem.reference());
    let inv = lap
        .reduced()
        .cholesky()
        .ok_or_else(|| {
            Error::Assumption(
                "existing network is disconnected; augmentation bounds need a connected base \
                 (use radial design instead)"
                    .into(),
            )
        })?
        .inverse();
    let dim = n - 1;
    let mut b = VariableBounds::uniform(dim, 0.0, 0.0);
    for i in 0..dim {
        for j in i..dim {
            let hi = if i == j {
                inv[(i, i)]
            } else {
                0.5 * (inv[(i, i)] + inv[(j, j)])
            };
            b.set(i, j, 0.0, hi);
        }
    }
    Ok(b)
}

/// Graph constants behind the radial bounds, all in inverse-susceptance
/// units.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadialConstants {
    /// Weight of a maximum spanning tree.
    pub f: f64,
    /// Shortest-path weight from each bus to the reference.
    pub h: Vec<f64>,
    /// Weight of the single line at the reference.
    pub x0: f64,
    /// Smallest line weight.
    pub x_min: f64,
}

pub fn radial_constants(problem: &DesignProblem) -> Result<RadialConstants> {
    let g = problem.inverse_graph();
    let r = problem.reference();
    let at_ref: Vec<f64> = g
        .edges()
        .iter()
        .filter(|e| e.u == r || e.v == r)
        .map(|e| e.weight)
        .collect();
    if at_ref.len() != 1 {
        return Err(Error::Assumption(format!(
            "radial bounds need the reference bus {r} to touch exactly one candidate line, found {}",
            at_ref.len()
        )));
    }
    let x_min = g
        .edges()
        .iter()
        .map(|e| e.weight)
        .fold(f64::INFINITY, f64::min);
    Ok(RadialConstants {
        f: max_spanning_tree_weight(&g)?,
        h: shortest_path_weights(&g, r)?,
        x0: at_ref[0],
        x_min,
    })
}

/// Path-length bounds valid for every spanning tree of the candidate graph.
pub fn bounds_radial(problem: &DesignProblem) -> Result<VariableBounds> {
    if problem.mode() != DesignMode::Radial {
        return Err(Error::Assumption("radial bounds need a radial design problem".into()));
    }
    let c = radial_constants(problem)?;
    let idx = problem.index();
    let dim = idx.dim();
    let mut b = VariableBounds::uniform(dim, c.x0, c.f - c.x_min);
    for i in 0..dim {
        b.set(i, i, c.h[idx.bus(i)], c.f);
    }
    Ok(b)
}

pub fn loose_bounds(problem: &DesignProblem) -> VariableBounds {
    VariableBounds::uniform(problem.n_buses() - 1, 0.0, LOOSE_UPPER)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{preset_spec, MetricPreset};
    use crate::network::{Line, PowerNetwork};
    use approx::assert_relative_eq;

    fn net(lines: Vec<Line>, n: usize) -> PowerNetwork {
        PowerNetwork::uniform(n, 1.0, 1.0, lines).unwrap()
    }

    pub(crate) fn four_node() -> PowerNetwork {
        net(
            vec![
                Line::candidate(0, 1, 1.0),
                Line::candidate(1, 2, 2.0),
                Line::candidate(1, 3, 0.5),
                Line::candidate(2, 3, 1.0),
            ],
            4,
        )
    }

    #[test]
    fn augment_path() {
        let n = net(vec![Line::existing(0, 1, 1.0), Line::existing(1, 2, 1.0)], 3);
        let spec = preset_spec(MetricPreset::Coherence, &n);
        let p = DesignProblem::augment(&n, spec, 2).unwrap();
        let b = bounds_augment(&p).unwrap();
        assert_relative_eq!(b.upper(0, 0), 1.0, epsilon = 1e-12);
        assert_relative_eq!(b.upper(1, 1), 2.0, epsilon = 1e-12);
        assert_relative_eq!(b.upper(0, 1), 1.5, epsilon = 1e-12);
        assert_eq!(b.lower_matrix().max(), 0.0);
    }

    #[test]
    fn augment_star() {
        let n = net(
            vec![
                Line::existing(0, 1, 1.0),
                Line::existing(0, 2, 1.0),
                Line::existing(0, 3, 1.0),
                Line::candidate(1, 2, 1.0),
            ],
            4,
        );
        let spec = preset_spec(MetricPreset::Coherence, &n);
        let p = DesignProblem::augment_by(&n, spec, 1).unwrap();
        let b = bounds_augment(&p).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_relative_eq!(b.upper(i, j), 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn augment_needs_connected_base() {
        let n = net(vec![Line::existing(0, 1, 1.0), Line::candidate(1, 2, 1.0)], 3);
        let spec = preset_spec(MetricPreset::Coherence, &n);
        let err = DesignProblem::augment(&n, spec, 2).unwrap_err();
        assert!(err.to_string().contains("radial"));
    }

    #[test]
    fn radial_four_node() {
        let n = four_node();
        let spec = preset_spec(MetricPreset::Coherence, &n);
        let p = DesignProblem::radial(&n, spec).unwrap();
        let c = radial_constants(&p).unwrap();
        assert_relative_eq!(c.f, 4.0);
        assert_relative_eq!(c.x0, 1.0);
        assert_relative_eq!(c.x_min, 0.5);
        let b = bounds_radial(&p).unwrap();
        assert_eq!((b.lower(0, 0), b.upper(0, 0)), (1.0, 4.0));
        assert_eq!((b.lower(1, 1), b.upper(1, 1)), (1.5, 4.0));
        assert_eq!((b.lower(2, 2), b.upper(2, 2)), (2.5, 4.0));
        assert_eq!((b.lower(0, 2), b.upper(0, 2)), (1.0, 3.5));
        assert_eq!((b.lower(1, 2), b.upper(2, 1)), (1.0, 3.5));
        b.check().unwrap();
    }

    #[test]
    fn radial_tree_contains_exact_inverse() {
        let lines = vec![
            Line::candidate(0, 1, 2.0),
            Line::candidate(1, 2, 0.5),
            Line::candidate(1, 3, 1.0),
            Line::candidate(3, 4, 4.0),
        ];
        let n = net(lines.clone(), 5);
        let spec = preset_spec(MetricPreset::Coherence, &n);
        let p = DesignProblem::radial(&n, spec).unwrap();
        let b = bounds_radial(&p).unwrap();
        let x = crate::netgraph::radial_inverse_by_paths(5, &lines, 0).unwrap();
        assert!(b.violations(&x, 1e-12).is_empty());
    }

    #[test]
    fn line_graph_attains_f() {
        let lines = vec![
            Line::candidate(0, 1, 1.0),
            Line::candidate(1, 2, 2.0),
            Line::candidate(2, 3, 4.0),
        ];
        let n = net(lines.clone(), 4);
        let spec = preset_spec(MetricPreset::Coherence, &n);
        let p = DesignProblem::radial(&n, spec).unwrap();
        let b = bounds_radial(&p).unwrap();
        let x = crate::netgraph::radial_inverse_by_paths(4, &lines, 0).unwrap();
        assert_relative_eq!(x[(2, 2)], b.upper(2, 2), epsilon = 1e-12);
    }

    #[test]
    fn radial_picks_degree_one_reference() {
        let n = net(
            vec![
                Line::candidate(0, 1, 1.0),
                Line::candidate(0, 2, 1.0),
                Line::candidate(1, 2, 1.0),
                Line::candidate(2, 3, 1.0),
            ],
            4,
        );
        let spec = preset_spec(MetricPreset::Coherence, &n);
        assert_eq!(DesignProblem::radial(&n, spec).unwrap().reference(), 3);
        let tri = net(
            vec![
                Line::candidate(0, 1, 1.0),
                Line::candidate(0, 2, 1.0),
                Line::candidate(1, 2, 1.0),
            ],
            3,
        );
        let spec = preset_spec(MetricPreset::Coherence, &tri);
        assert!(matches!(
            DesignProblem::radial(&tri, spec),
            Err(Error::Assumption(_))
        ));
    }

    #[test]
    fn check_reports_crossing() {
        let mut b = VariableBounds::uniform(2, 0.0, 1.0);
        b.raise_lower(0, 1, 2.0);
        assert!(matches!(b.check(), Err(Error::InfeasibleBounds { i: 0, j: 1, .. })));
    }
}

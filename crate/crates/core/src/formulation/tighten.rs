use serde::{Deserialize, Serialize};

use super::bounds::{radial_constants, VariableBounds};
use super::problem::{DesignMode, DesignProblem};
use crate::error::Result;
use crate::netgraph::{enumerate_critical_edges, CutsetReport, Graph};
use crate::network::Line;

/// Bounds plus the combinatorial cuts derived from the candidate graph.
#[derive(Clone, Debug, PartialEq)]
pub struct Tightening {
    pub bounds: VariableBounds,
    /// Candidate lines every feasible design must contain.
    pub fixed_on: Vec<usize>,
    /// Pairs `(a, b)` of free lines with `z_a + z_b >= 1`.
    pub pair_rows: Vec<(usize, usize)>,
    pub summary: TighteningSummary,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TighteningSummary {
    pub critical_edges: usize,
    pub fixed_edges: usize,
    pub pair_rows: usize,
    pub raised_lower_bounds: usize,
}

/// Size-one and size-two cutsets of the candidate graph.
pub fn cutset_report(problem: &DesignProblem) -> Result<CutsetReport> {
    let keys: Vec<_> = problem.candidates().iter().map(Line::key).collect();
    enumerate_critical_edges(&Graph::unit(problem.n_buses(), &keys))
}

/// Applies the cutset structure to `bounds`. Critical lines are fixed on and
/// pair rows are emitted in both modes. In radial mode every bus beyond a
/// critical line sits at least as far from the reference as the line's far
/// endpoint, which raises the corresponding lower bounds.
pub fn tighten_bounds(
    problem: &DesignProblem,
    bounds: &VariableBounds,
    report: &CutsetReport,
) -> Result<Tightening> {
    let mut out = bounds.clone();
    let mut raised = 0;
    if problem.mode() == DesignMode::Radial {
        let h = radial_constants(problem)?.h;
        let idx = problem.index();
        for crit in &report.critical {
            let (_, far, _, far_side) = crit.split_for(problem.reference());
            let j = idx.reduced(far).expect("far endpoint is never the reference");
            for &k in far_side {
                let k = idx.reduced(k).expect("far side excludes the reference");
                if out.lower(k, j) < h[far] {
                    out.raise_lower(k, j, h[far]);
                    raised += 1;
                }
            }
        }
    }
    let fixed_on: Vec<usize> = report
        .critical_edges()
        .into_iter()
        .filter(|m| !problem.fixed().contains(m))
        .collect();
    let pair_rows: Vec<(usize, usize)> = report
        .pairs
        .iter()
        .copied()
        .filter(|(a, b)| !problem.fixed().contains(a) && !problem.fixed().contains(b))
        .collect();
    let summary = TighteningSummary {
        critical_edges: report.critical.len(),
        fixed_edges: fixed_on.len(),
        pair_rows: pair_rows.len(),
        raised_lower_bounds: raised,
    };
    Ok(Tightening { bounds: out, fixed_on, pair_rows, summary })
}

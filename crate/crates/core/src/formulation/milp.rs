use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{self, Write};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::bounds::VariableBounds;
use super::problem::DesignProblem;
use super::tighten::Tightening;
use crate::error::{Error, Result};
use crate::netgraph::ReducedIndex;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

/// A linear row `sum(coeff * var) sense rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub name: String,
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Row {
    pub fn activity(&self, point: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(v, c)| c * point[v]).sum()
    }

    /// Amount by which `point` violates the row (zero when satisfied).
    pub fn violation(&self, point: &[f64]) -> f64 {
        let a = self.activity(point);
        match self.sense {
            Sense::Le => (a - self.rhs).max(0.0),
            Sense::Ge => (self.rhs - a).max(0.0),
            Sense::Eq => (a - self.rhs).abs(),
        }
    }
}

/// Role of a model variable. Bus ids, not reduced rows, are stored.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarKind {
    Select { edge: usize },
    X { i: usize, j: usize },
    Y { edge: usize, i: usize, j: usize },
}

/// Mixed-integer linear model of the design problem. Binary variables come
/// first, one per free candidate line in increasing line order, followed by
/// the `X` entries and the product variables `y = z * X`.
#[derive(Clone, Debug)]
pub struct MilpModel {
    index: ReducedIndex,
    n_candidates: usize,
    kinds: Vec<VarKind>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    objective: Vec<f64>,
    rows: Vec<Row>,
    binary_edges: Vec<usize>,
    fixed_edges: Vec<usize>,
    x_offset: usize,
    y_vars: BTreeMap<(usize, usize, usize), usize>,
    free_budget: i64,
}

pub fn build_milp(problem: &DesignProblem, bounds: &VariableBounds) -> Result<MilpModel> {
    build(problem, bounds, &[], &[])
}

pub fn build_milp_tightened(problem: &DesignProblem, t: &Tightening) -> Result<MilpModel> {
    build(problem, &t.bounds, &t.fixed_on, &t.pair_rows)
}

fn x_offset_of(dim: usize, i: usize, j: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    a * dim - a * a.saturating_sub(1) / 2 + b - a
}

fn build(
    problem: &DesignProblem,
    bounds: &VariableBounds,
    extra_fixed: &[usize],
    pairs: &[(usize, usize)],
) -> Result<MilpModel> {
    let index = problem.index();
    let dim = index.dim();
    if bounds.dim() != dim {
        return Err(Error::Dimension(format!(
            "bounds cover {} rows, problem has {dim}",
            bounds.dim()
        )));
    }
    bounds.check()?;
    let inc = problem.incidence();
    let n_cand = problem.candidates().len();

    let mut fixed_edges: Vec<usize> = problem.fixed().to_vec();
    fixed_edges.extend(extra_fixed.iter().copied());
    fixed_edges.sort_unstable();
    fixed_edges.dedup();
    let binary_edges: Vec<usize> = (0..n_cand).filter(|m| fixed_edges.binary_search(m).is_err()).collect();

    let mut kinds = Vec::new();
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for &m in &binary_edges {
        kinds.push(VarKind::Select { edge: m });
        lower.push(0.0);
        upper.push(1.0);
    }
    let x_offset = kinds.len();
    for i in 0..dim {
        for j in i..dim {
            kinds.push(VarKind::X { i: index.bus(i), j: index.bus(j) });
            lower.push(bounds.lower(i, j));
            upper.push(bounds.upper(i, j));
        }
    }
    debug_assert_eq!(x_offset + dim * (dim + 1) / 2, kinds.len());
    let x_var = |i: usize, j: usize| x_offset + x_offset_of(dim, i, j);

    let mut y_vars = BTreeMap::new();
    for &m in &binary_edges {
        for &(k, _) in inc.reduced_nonzeros(m) {
            for j in 0..dim {
                let key = (m, k.min(j), k.max(j));
                if let std::collections::btree_map::Entry::Vacant(e) = y_vars.entry(key) {
                    e.insert(kinds.len());
                    kinds.push(VarKind::Y { edge: m, i: index.bus(k), j: index.bus(j) });
                    lower.push(bounds.lower(k, j).min(0.0));
                    upper.push(bounds.upper(k, j).max(0.0));
                }
            }
        }
    }

    let w = problem.reduced_w();
    let mut objective = vec![0.0; kinds.len()];
    for i in 0..dim {
        for j in i..dim {
            objective[x_var(i, j)] = if i == j { w[(i, i)] } else { w[(i, j)] + w[(j, i)] };
        }
    }

    let binary_pos: BTreeMap<usize, usize> =
        binary_edges.iter().enumerate().map(|(p, &m)| (m, p)).collect();
    let mut rows = Vec::new();

    // L~(z) X = I after substituting z_m X by y_m.
    let mut touching: Vec<Vec<usize>> = vec![Vec::new(); dim];
    for m in 0..n_cand {
        for &(r, _) in inc.reduced_nonzeros(m) {
            touching[r].push(m);
        }
    }
    for i in 0..dim {
        for j in 0..dim {
            let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
            for &m in &touching[i] {
                let nz = inc.reduced_nonzeros(m);
                let si = nz.iter().find(|&&(r, _)| r == i).map(|&(_, s)| s).unwrap_or(0.0);
                let b = inc.susceptance(m);
                let free = binary_pos.contains_key(&m);
                for &(k, sk) in nz {
                    let var = if free {
                        y_vars[&(m, k.min(j), k.max(j))]
                    } else {
                        x_var(k, j)
                    };
                    *acc.entry(var).or_insert(0.0) += b * si * sk;
                }
            }
            let coeffs: Vec<(usize, f64)> = acc.into_iter().filter(|&(_, c)| c != 0.0).collect();
            rows.push(Row {
                name: format!("eq_{}_{}", index.bus(i), index.bus(j)),
                coeffs,
                sense: Sense::Eq,
                rhs: if i == j { 1.0 } else { 0.0 },
            });
        }
    }

    for (&(m, a, b), &y) in &y_vars {
        let z = binary_pos[&m];
        let x = x_var(a, b);
        let (lo, hi) = (bounds.lower(a, b), bounds.upper(a, b));
        let tag = format!("{}_{}_{}", m, index.bus(a), index.bus(b));
        rows.push(Row {
            name: format!("mca_{tag}"),
            coeffs: vec![(y, 1.0), (z, -lo)],
            sense: Sense::Ge,
            rhs: 0.0,
        });
        rows.push(Row {
            name: format!("mcb_{tag}"),
            coeffs: vec![(y, 1.0), (x, -1.0), (z, -hi)],
            sense: Sense::Ge,
            rhs: -hi,
        });
        rows.push(Row {
            name: format!("mcc_{tag}"),
            coeffs: vec![(y, 1.0), (z, -hi)],
            sense: Sense::Le,
            rhs: 0.0,
        });
        rows.push(Row {
            name: format!("mcd_{tag}"),
            coeffs: vec![(y, 1.0), (x, -1.0), (z, -lo)],
            sense: Sense::Le,
            rhs: -lo,
        });
    }

    let free_budget = problem.budget() as i64 - fixed_edges.len() as i64;
    rows.push(Row {
        name: "budget".into(),
        coeffs: (0..binary_edges.len()).map(|p| (p, 1.0)).collect(),
        sense: Sense::Le,
        rhs: free_budget as f64,
    });
    for &(a, b) in pairs {
        if let (Some(&pa), Some(&pb)) = (binary_pos.get(&a), binary_pos.get(&b)) {
            rows.push(Row {
                name: format!("cut_{a}_{b}"),
                coeffs: vec![(pa, 1.0), (pb, 1.0)],
                sense: Sense::Ge,
                rhs: 1.0,
            });
        }
    }

    Ok(MilpModel {
        index,
        n_candidates: n_cand,
        kinds,
        lower,
        upper,
        objective,
        rows,
        binary_edges,
        fixed_edges,
        x_offset,
        y_vars,
        free_budget,
    })
}

impl MilpModel {
    pub fn n_vars(&self) -> usize {
        self.kinds.len()
    }

    pub fn n_binaries(&self) -> usize {
        self.binary_edges.len()
    }

    pub fn n_y(&self) -> usize {
        self.y_vars.len()
    }

    pub fn n_candidates(&self) -> usize {
        self.n_candidates
    }

    /// Candidate line behind each binary variable.
    pub fn binary_edges(&self) -> &[usize] {
        &self.binary_edges
    }

    /// Candidate lines switched on in every solution of the model.
    pub fn fixed_edges(&self) -> &[usize] {
        &self.fixed_edges
    }

    /// Right-hand side of the budget row.
    pub fn free_budget(&self) -> i64 {
        self.free_budget
    }

    pub fn kinds(&self) -> &[VarKind] {
        &self.kinds
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn index(&self) -> ReducedIndex {
        self.index
    }

    /// Variable holding `X` at reduced rows `(i, j)`.
    pub fn x_var(&self, i: usize, j: usize) -> usize {
        self.x_offset + x_offset_of(self.index.dim(), i, j)
    }

    /// Variable holding `z_m X_kj` at reduced rows, if the model has one.
    pub fn y_var(&self, edge: usize, k: usize, j: usize) -> Option<usize> {
        self.y_vars.get(&(edge, k.min(j), k.max(j))).copied()
    }

    pub fn var_name(&self, var: usize) -> String {
        match self.kinds[var] {
            VarKind::Select { edge } => format!("z_{edge}"),
            VarKind::X { i, j } => format!("X_{i}_{j}"),
            VarKind::Y { edge, i, j } => format!("y_{edge}_{i}_{j}"),
        }
    }

    pub fn objective_value(&self, point: &[f64]) -> f64 {
        self.objective.iter().zip(point).map(|(c, x)| c * x).sum()
    }

    /// Largest row or bound violation of `point`.
    pub fn max_violation(&self, point: &[f64]) -> f64 {
        let rows = self.rows.iter().map(|r| r.violation(point)).fold(0.0, f64::max);
        let bnds = point
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&x, (&lo, &hi))| (lo - x).max(x - hi).max(0.0))
            .fold(0.0, f64::max);
        rows.max(bnds)
    }

    /// Symmetric `X` read from a model point, over reduced rows.
    pub fn x_matrix(&self, point: &[f64]) -> DMatrix<f64> {
        let dim = self.index.dim();
        DMatrix::from_fn(dim, dim, |i, j| point[self.x_var(i, j)])
    }

    /// Selection of all candidate lines encoded by the binary part of `point`
    /// (rounded), with fixed lines switched on.
    pub fn selection(&self, binaries: &[bool]) -> Vec<bool> {
        let mut z = vec![false; self.n_candidates];
        for &m in &self.fixed_edges {
            z[m] = true;
        }
        for (&m, &on) in self.binary_edges.iter().zip(binaries) {
            z[m] = on;
        }
        z
    }

    /// The model point for a full candidate selection `z`:
    /// `X = L~(z)^-1` and `y = z X`. `None` when `z` drops a fixed line or
    /// leaves the grid disconnected.
    pub fn point_for(&self, problem: &DesignProblem, z: &[bool]) -> Option<Vec<f64>> {
        if z.len() != self.n_candidates || self.fixed_edges.iter().any(|&m| !z[m]) {
            return None;
        }
        let inc = problem.incidence();
        if !inc.selection_connected(z) {
            return None;
        }
        let x = inc.assemble(z).cholesky()?.inverse();
        Some(self.point_with(z, &x))
    }

    /// The model point for selection `z` with `X` given over reduced rows.
    pub fn point_with(&self, z: &[bool], x: &DMatrix<f64>) -> Vec<f64> {
        let mut point = vec![0.0; self.n_vars()];
        for (p, &m) in self.binary_edges.iter().enumerate() {
            point[p] = if z[m] { 1.0 } else { 0.0 };
        }
        let dim = self.index.dim();
        for i in 0..dim {
            for j in i..dim {
                point[self.x_var(i, j)] = 0.5 * (x[(i, j)] + x[(j, i)]);
            }
        }
        for (&(m, a, b), &y) in &self.y_vars {
            point[y] = if z[m] { point[self.x_var(a, b)] } else { 0.0 };
        }
        point
    }

    /// Whether selection `z` with `X = L~(z)^-1` satisfies every row and
    /// bound within `tol`, scaled by the magnitude of `X`.
    pub fn admits(&self, z: &[bool], x: &DMatrix<f64>, tol: f64) -> bool {
        if self.fixed_edges.iter().any(|&m| !z[m]) {
            return false;
        }
        let point = self.point_with(z, x);
        self.max_violation(&point) <= tol * (1.0 + x.amax())
    }

    /// Writes the model in CPLEX LP text format.
    pub fn write_lp<W: Write>(&self, mut out: W) -> io::Result<()> {
        let mut s = String::new();
        s.push_str("\\ topology design model\nMinimize\n obj:");
        let terms: Vec<(usize, f64)> = self
            .objective
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0.0)
            .map(|(v, &c)| (v, c))
            .collect();
        if terms.is_empty() {
            self.push_terms(&mut s, &[(self.x_offset.min(self.n_vars() - 1), 0.0)]);
        } else {
            self.push_terms(&mut s, &terms);
        }
        s.push_str("\nSubject To\n");
        for row in &self.rows {
            let _ = write!(s, " {}:", row.name);
            self.push_terms(&mut s, &row.coeffs);
            let op = match row.sense {
                Sense::Le => "<=",
                Sense::Ge => ">=",
                Sense::Eq => "=",
            };
            let _ = writeln!(s, " {op} {}", row.rhs);
        }
        s.push_str("Bounds\n");
        for v in 0..self.n_vars() {
            let _ = writeln!(s, " {} <= {} <= {}", self.lower[v], self.var_name(v), self.upper[v]);
        }
        if !self.binary_edges.is_empty() {
            s.push_str("Binaries\n");
            for p in 0..self.binary_edges.len() {
                let _ = writeln!(s, " {}", self.var_name(p));
            }
        }
        s.push_str("End\n");
        out.write_all(s.as_bytes())
    }

    fn push_terms(&self, s: &mut String, terms: &[(usize, f64)]) {
        for (n, &(v, c)) in terms.iter().enumerate() {
            if n > 0 && n % 8 == 0 {
                s.push_str("\n   ");
            }
            let sign = if c < 0.0 { '-' } else { '+' };
            let _ = write!(s, " {sign} {} {}", c.abs(), self.var_name(v));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{preset_spec, MetricPreset};
    use crate::formulation::{bounds_augment, bounds_radial, loose_bounds};
    use crate::network::{Line, PowerNetwork};

    fn four_node_radial() -> DesignProblem {
        let n = PowerNetwork::uniform(
            4,
            1.0,
            1.0,
            vec![
                Line::candidate(0, 1, 1.0),
                Line::candidate(1, 2, 2.0),
                Line::candidate(1, 3, 0.5),
                Line::candidate(2, 3, 1.0),
            ],
        )
        .unwrap();
        DesignProblem::radial(&n, preset_spec(MetricPreset::Coherence, &n)).unwrap()
    }

    fn all_selections(n: usize) -> impl Iterator<Item = Vec<bool>> {
        (0u32..1 << n).map(move |mask| (0..n).map(|b| mask >> b & 1 == 1).collect())
    }

    #[test]
    fn x_offsets_are_dense() {
        for dim in 1..6 {
            let mut seen = Vec::new();
            for i in 0..dim {
                for j in i..dim {
                    seen.push(x_offset_of(dim, i, j));
                    assert_eq!(x_offset_of(dim, i, j), x_offset_of(dim, j, i));
                }
            }
            let expect: Vec<usize> = (0..dim * (dim + 1) / 2).collect();
            assert_eq!(seen, expect);
        }
    }

    #[test]
    fn y_count_follows_endpoint_sparsity() {
        let p = four_node_radial();
        let m = build_milp(&p, &bounds_radial(&p).unwrap()).unwrap();
        assert!(m.n_y() <= 4 * 2 * 3);
        assert_eq!(m.n_binaries(), 4);
        // line (0,1) touches one reduced row, the others two.
        assert_eq!(m.n_y(), 3 + 3 * (2 * 3 - 1));
        let mcc = m.rows().iter().filter(|r| r.name.starts_with("mc")).count();
        assert_eq!(mcc, 4 * m.n_y());
    }

    #[test]
    fn connected_selections_satisfy_all_rows() {
        let p = four_node_radial();
        let m = build_milp(&p, &loose_bounds(&p)).unwrap();
        let mut feasible = 0;
        for z in all_selections(4) {
            let Some(point) = m.point_for(&p, &z) else { continue };
            let rows_ok = m.rows().iter().filter(|r| r.name != "budget").all(|r| r.violation(&point) < 1e-9);
            assert!(rows_ok, "{z:?}");
            feasible += 1;
        }
        assert_eq!(feasible, 4);
    }

    #[test]
    fn trees_satisfy_tight_radial_bounds() {
        let p = four_node_radial();
        let m = build_milp(&p, &bounds_radial(&p).unwrap()).unwrap();
        for z in all_selections(4).filter(|z| z.iter().filter(|&&b| b).count() == 3) {
            if let Some(point) = m.point_for(&p, &z) {
                assert!(m.max_violation(&point) < 1e-9, "{z:?}");
            }
        }
    }

    #[test]
    fn off_lines_force_zero_products() {
        let p = four_node_radial();
        let m = build_milp(&p, &bounds_radial(&p).unwrap()).unwrap();
        let z = [true, true, true, false];
        let point = m.point_for(&p, &z).unwrap();
        let y = m.y_var(3, 1, 2).unwrap();
        assert_eq!(point[y], 0.0);
        let mut bumped = point.clone();
        bumped[y] = 1e-3;
        assert!(m.max_violation(&bumped) > 1e-4);
    }

    #[test]
    fn fixed_lines_are_folded() {
        let n = PowerNetwork::uniform(
            3,
            1.0,
            1.0,
            vec![
                Line::existing(0, 1, 1.0),
                Line::existing(1, 2, 1.0),
                Line::candidate(0, 2, 1.0),
            ],
        )
        .unwrap();
        let p = DesignProblem::augment(&n, preset_spec(MetricPreset::Coherence, &n), 3).unwrap();
        let m = build_milp(&p, &bounds_augment(&p).unwrap()).unwrap();
        assert_eq!(m.binary_edges(), &[2]);
        assert_eq!(m.fixed_edges(), &[0, 1]);
        assert_eq!(m.free_budget(), 1);
        for z in [[true, true, false], [true, true, true]] {
            let point = m.point_for(&p, &z).unwrap();
            assert!(m.max_violation(&point) < 1e-9);
        }
        assert!(m.point_for(&p, &[false, true, true]).is_none());
    }

    #[test]
    fn crossing_bounds_are_rejected() {
        let p = four_node_radial();
        let mut b = bounds_radial(&p).unwrap();
        b.raise_lower(0, 1, 100.0);
        assert!(matches!(build_milp(&p, &b), Err(Error::InfeasibleBounds { .. })));
    }

    #[test]
    fn lp_export_has_all_sections() {
        let p = four_node_radial();
        let m = build_milp(&p, &bounds_radial(&p).unwrap()).unwrap();
        let mut buf = Vec::new();
        m.write_lp(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        for section in ["Minimize", "Subject To", "Bounds", "Binaries", "End"] {
            assert!(text.contains(section), "{section}");
        }
        assert!(text.contains("z_0") && text.contains("X_1_1") && text.contains("y_1_1_"));
        let mut again = Vec::new();
        m.write_lp(&mut again).unwrap();
        assert_eq!(text.as_bytes(), &again[..]);
    }
}

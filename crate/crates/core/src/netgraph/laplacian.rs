use nalgebra::{DMatrix, DVector};

use crate::network::Line;

/// Maps bus ids to rows of the reduced matrices, which drop the reference
/// bus and keep the remaining buses in increasing id order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReducedIndex {
    n: usize,
    reference: usize,
}

impl ReducedIndex {
    pub fn new(n: usize, reference: usize) -> Self {
        assert!(reference < n, "reference bus out of range");
        Self { n, reference }
    }

    pub fn n_buses(&self) -> usize {
        self.n
    }

    pub fn reference(&self) -> usize {
        self.reference
    }

    /// Dimension of the reduced matrices.
    pub fn dim(&self) -> usize {
        self.n - 1
    }

    pub fn reduced(&self, bus: usize) -> Option<usize> {
        match bus.cmp(&self.reference) {
            std::cmp::Ordering::Less => Some(bus),
            std::cmp::Ordering::Equal => None,
            std::cmp::Ordering::Greater => Some(bus - 1),
        }
    }

    pub fn bus(&self, row: usize) -> usize {
        if row < self.reference {
            row
        } else {
            row + 1
        }
    }
}

/// Copy of `m` with row and column `k` deleted.
pub fn remove_row_col(m: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    m.clone().remove_row(k).remove_column(k)
}

/// Susceptance Laplacian of a set of lines.
#[derive(Clone, Debug, PartialEq)]
pub struct LaplacianMatrix {
    full: DMatrix<f64>,
    reference: usize,
}

impl LaplacianMatrix {
    pub fn full(&self) -> &DMatrix<f64> {
        &self.full
    }

    pub fn n_buses(&self) -> usize {
        self.full.nrows()
    }

    pub fn reference(&self) -> usize {
        self.reference
    }

    pub fn index(&self) -> ReducedIndex {
        ReducedIndex::new(self.n_buses(), self.reference)
    }

    /// Laplacian with the reference row and column removed.
    pub fn reduced(&self) -> DMatrix<f64> {
        remove_row_col(&self.full, self.reference)
    }
}

pub fn build_laplacian<'a>(
    lines: impl IntoIterator<Item = &'a Line>,
    n: usize,
    reference: usize,
) -> LaplacianMatrix {
    let mut full = DMatrix::zeros(n, n);
    for l in lines {
        let b = l.susceptance;
        full[(l.from, l.from)] += b;
        full[(l.to, l.to)] += b;
        full[(l.from, l.to)] -= b;
        full[(l.to, l.from)] -= b;
    }
    LaplacianMatrix { full, reference }
}

#[derive(Clone, Debug)]
struct IncidenceColumn {
    from: usize,
    to: usize,
    susceptance: f64,
    reduced: Vec<(usize, f64)>,
}

/// Signed incidence vectors `a_m` (+1 at `from`, -1 at `to`) of a candidate
/// line list, together with their reduced versions.
#[derive(Clone, Debug)]
pub struct EdgeIncidence {
    index: ReducedIndex,
    columns: Vec<IncidenceColumn>,
}

impl EdgeIncidence {
    pub fn new(lines: &[Line], n: usize, reference: usize) -> Self {
        let index = ReducedIndex::new(n, reference);
        let columns = lines
            .iter()
            .map(|l| {
                let mut reduced = Vec::with_capacity(2);
                if let Some(r) = index.reduced(l.from) {
                    reduced.push((r, 1.0));
                }
                if let Some(r) = index.reduced(l.to) {
                    reduced.push((r, -1.0));
                }
                IncidenceColumn {
                    from: l.from,
                    to: l.to,
                    susceptance: l.susceptance,
                    reduced,
                }
            })
            .collect();
        Self { index, columns }
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn index(&self) -> ReducedIndex {
        self.index
    }

    pub fn endpoints(&self, m: usize) -> (usize, usize) {
        (self.columns[m].from, self.columns[m].to)
    }

    /// Whether the lines with `z[m]` set connect every bus.
    pub fn selection_connected(&self, z: &[bool]) -> bool {
        let mut uf = super::UnionFind::new(self.index.n_buses());
        for (col, _) in self.columns.iter().zip(z).filter(|(_, &on)| on) {
            uf.union(col.from, col.to);
        }
        uf.components() <= 1
    }

    pub fn susceptance(&self, m: usize) -> f64 {
        self.columns[m].susceptance
    }

    /// Nonzeros of the reduced vector as `(row, sign)`.
    pub fn reduced_nonzeros(&self, m: usize) -> &[(usize, f64)] {
        &self.columns[m].reduced
    }

    pub fn full_vector(&self, m: usize) -> DVector<f64> {
        let c = &self.columns[m];
        let mut a = DVector::zeros(self.index.n_buses());
        a[c.from] = 1.0;
        a[c.to] = -1.0;
        a
    }

    pub fn reduced_vector(&self, m: usize) -> DVector<f64> {
        let mut a = DVector::zeros(self.index.dim());
        for &(r, s) in &self.columns[m].reduced {
            a[r] = s;
        }
        a
    }

    /// Reduced Laplacian `sum_m z_m b_m a_m a_m^T` of the selected lines.
    pub fn assemble(&self, z: &[bool]) -> DMatrix<f64> {
        assert_eq!(z.len(), self.columns.len());
        let dim = self.index.dim();
        let mut l = DMatrix::zeros(dim, dim);
        for (c, _) in self.columns.iter().zip(z).filter(|(_, &on)| on) {
            for &(r, s) in &c.reduced {
                for &(q, t) in &c.reduced {
                    l[(r, q)] += c.susceptance * s * t;
                }
            }
        }
        l
    }
}

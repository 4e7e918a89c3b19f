use nalgebra::{DMatrix, DVector};

use super::StateSpace;
use crate::error::{Error, Result};
use crate::netgraph::UnionFind;

/// Solves `A^T Q + Q A = -R` for symmetric `R` by vectorizing the upper
/// triangle of `Q` into a dense linear system.
pub fn solve_lyapunov(a: &DMatrix<f64>, r: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let m = a.nrows();
    let idx = |p: usize, q: usize| {
        let (p, q) = if p <= q { (p, q) } else { (q, p) };
        p * m - p * (p + 1) / 2 + q
    };
    let unknowns = m * (m + 1) / 2;
    let mut sys = DMatrix::zeros(unknowns, unknowns);
    let mut rhs = DVector::zeros(unknowns);
    for p in 0..m {
        for q in p..m {
            let row = idx(p, q);
            rhs[row] = -r[(p, q)];
            // (A^T Q)_pq = sum_k A_kp Q_kq ; (Q A)_pq = sum_k Q_pk A_kq
            for k in 0..m {
                sys[(row, idx(k, q))] += a[(k, p)];
                sys[(row, idx(p, k))] += a[(k, q)];
            }
        }
    }
    let sol = sys
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical("Lyapunov system is singular".into()))?;
    let mut out = DMatrix::zeros(m, m);
    for p in 0..m {
        for q in p..m {
            out[(p, q)] = sol[idx(p, q)];
            out[(q, p)] = sol[idx(p, q)];
        }
    }
    Ok(out)
}

/// Observability Gramian of the swing system, with blocks
/// `Q = [[Q1, Q0], [Q0^T, Q2]]` over `(theta, omega)`.
#[derive(Clone, Debug)]
pub struct Gramian {
    q: DMatrix<f64>,
    n: usize,
    residual: f64,
}

impl Gramian {
    pub fn q(&self) -> &DMatrix<f64> {
        &self.q
    }

    pub fn q1(&self) -> DMatrix<f64> {
        self.q.view((0, 0), (self.n, self.n)).into_owned()
    }

    pub fn q0(&self) -> DMatrix<f64> {
        self.q.view((0, self.n), (self.n, self.n)).into_owned()
    }

    pub fn q2(&self) -> DMatrix<f64> {
        self.q.view((self.n, self.n), (self.n, self.n)).into_owned()
    }

    /// `||A^T Q + Q A + C^T C||_F / ||C^T C||_F` on the deflated subspace.
    pub fn residual(&self) -> f64 {
        self.residual
    }
}

/// Computes the Gramian after deflating the uniform angle-shift mode.
///
/// `A` has a zero eigenvalue along `[1; 0]`. In the coordinates
/// `(theta_i - theta_0 for i >= 1, omega)` that mode drops out, leaving a
/// Hurwitz system whenever the grid is connected. The returned `Q` is
/// lifted back to the full state and satisfies the full Lyapunov equation.
pub fn solve_gramian(ss: &StateSpace) -> Result<Gramian> {
    let n = ss.n_buses();
    let dim = 2 * n;
    let shift = DVector::from_fn(dim, |k, _| if k < n { 1.0 } else { 0.0 });
    let scale = ss.c.amax().max(1.0);
    if (&ss.c * &shift).amax() > 1e-9 * scale {
        return Err(Error::Assumption(
            "angle-shift mode is observable: W must annihilate the all-ones vector".into(),
        ));
    }
    let mut uf = UnionFind::new(n);
    for i in 0..n {
        for j in (i + 1)..n {
            if ss.laplacian()[(i, j)] != 0.0 {
                uf.union(i, j);
            }
        }
    }
    if uf.components() > 1 {
        return Err(Error::SingularLaplacian);
    }

    // reduce: xi = T x drops theta_0 and subtracts it from the other angles;
    // embed: x = E xi selects coordinates 1..dim
    let m = dim - 1;
    let mut t = DMatrix::zeros(m, dim);
    for k in 0..m {
        t[(k, k + 1)] = 1.0;
        if k + 1 < n {
            t[(k, 0)] = -1.0;
        }
    }
    let e = DMatrix::from_fn(dim, m, |r, c| if r == c + 1 { 1.0 } else { 0.0 });

    let a22 = &t * &ss.a * &e;
    let c2 = &ss.c * &e;
    let ctc = c2.transpose() * &c2;
    let q22 = solve_lyapunov(&a22, &ctc)?;

    let res = a22.transpose() * &q22 + &q22 * &a22 + &ctc;
    let denom = ctc.norm();
    let residual = if denom > 0.0 { res.norm() / denom } else { res.norm() };

    let q = t.transpose() * q22 * &t;
    Ok(Gramian { q, n, residual })
}

/// `trace(B^T Q B)`.
pub fn h2_squared_gramian(ss: &StateSpace) -> Result<f64> {
    let g = solve_gramian(ss)?;
    Ok((ss.b.transpose() * g.q() * &ss.b).trace())
}

//! Sparse symmetric positive definite systems: CSR storage and
//! preconditioned conjugate gradients with an incomplete Cholesky
//! preconditioner.

use crate::par;

/// Square matrix in compressed sparse row form with sorted column indices.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl CsrMatrix {
    /// Zero matrix with the given (unsorted, possibly repeated) row patterns.
    pub fn from_pattern(rows: Vec<Vec<usize>>) -> Self {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_unstable();
            row.dedup();
            col_idx.extend(row);
            row_ptr.push(col_idx.len());
        }
        let nnz = col_idx.len();
        Self { n, row_ptr, col_idx, values: vec![0.0; nnz] }
    }

    /// Storage slot of entry `(row, col)`, if present in the pattern.
    pub fn slot(&self, row: usize, col: usize) -> Option<usize> {
        let cols = &self.col_idx[self.row_ptr[row]..self.row_ptr[row + 1]];
        cols.binary_search(&col).ok().map(|k| self.row_ptr[row] + k)
    }

    pub fn clear(&mut self) {
        self.values.iter_mut().for_each(|v| *v = 0.0);
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.slot(i, i).map_or(0.0, |s| self.values[s])).collect()
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        par::fill_indexed(y, |i| {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            acc
        });
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.n).all(|i| {
            (self.row_ptr[i]..self.row_ptr[i + 1]).all(|k| {
                let j = self.col_idx[k];
                match self.slot(j, i) {
                    Some(s) => (self.values[k] - self.values[s]).abs() <= tol * self.values[k].abs().max(1.0),
                    None => self.values[k] == 0.0,
                }
            })
        })
    }
}

#[derive(Debug, Clone)]
pub enum Preconditioner {
    Jacobi(Vec<f64>),
    /// Lower factor `L` with `A ~ L L^T`, same pattern as the lower triangle of `A`.
    IncompleteCholesky(CsrMatrix),
}

impl Preconditioner {
    /// IC(0), falling back to Jacobi when a pivot is not positive.
    pub fn incomplete_cholesky(a: &CsrMatrix) -> Self {
        match ic0(a) {
            Some(l) => Preconditioner::IncompleteCholesky(l),
            None => Self::jacobi(a),
        }
    }

    pub fn jacobi(a: &CsrMatrix) -> Self {
        Preconditioner::Jacobi(a.diagonal().into_iter().map(|d| if d > 0.0 { 1.0 / d } else { 1.0 }).collect())
    }

    fn apply(&self, r: &[f64], z: &mut [f64]) {
        match self {
            Preconditioner::Jacobi(inv) => par::fill_indexed(z, |i| inv[i] * r[i]),
            Preconditioner::IncompleteCholesky(l) => {
                let n = l.n;
                // forward: L y = r, diagonal is the last entry of each row
                for i in 0..n {
                    let (start, end) = (l.row_ptr[i], l.row_ptr[i + 1]);
                    let mut acc = r[i];
                    for k in start..end - 1 {
                        acc -= l.values[k] * z[l.col_idx[k]];
                    }
                    z[i] = acc / l.values[end - 1];
                }
                // backward: L^T x = y, column-oriented sweep over the rows of L
                for i in (0..n).rev() {
                    let (start, end) = (l.row_ptr[i], l.row_ptr[i + 1]);
                    z[i] /= l.values[end - 1];
                    let xi = z[i];
                    for k in start..end - 1 {
                        z[l.col_idx[k]] -= l.values[k] * xi;
                    }
                }
            }
        }
    }
}

fn ic0(a: &CsrMatrix) -> Option<CsrMatrix> {
    let n = a.n;
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut col_idx = Vec::new();
    let mut values = Vec::new();
    row_ptr.push(0);
    for i in 0..n {
        for k in a.row_ptr[i]..a.row_ptr[i + 1] {
            if a.col_idx[k] <= i {
                col_idx.push(a.col_idx[k]);
                values.push(a.values[k]);
            }
        }
        if col_idx.last() != Some(&i) {
            return None;
        }
        row_ptr.push(col_idx.len());
    }
    let mut l = CsrMatrix { n, row_ptr, col_idx, values };
    for i in 0..n {
        let (start, end) = (l.row_ptr[i], l.row_ptr[i + 1]);
        for p in start..end {
            let k = l.col_idx[p];
            // sparse dot of rows i and k over columns < k
            let mut acc = l.values[p];
            let (mut a_ptr, mut b_ptr) = (start, l.row_ptr[k]);
            let b_end = l.row_ptr[k + 1] - 1;
            while a_ptr < p && b_ptr < b_end {
                let (ca, cb) = (l.col_idx[a_ptr], l.col_idx[b_ptr]);
                if ca == cb {
                    acc -= l.values[a_ptr] * l.values[b_ptr];
                    a_ptr += 1;
                    b_ptr += 1;
                } else if ca < cb {
                    a_ptr += 1;
                } else {
                    b_ptr += 1;
                }
            }
            if k == i {
                if !(acc > 0.0) {
                    return None;
                }
                l.values[p] = acc.sqrt();
            } else {
                l.values[p] = acc / l.values[l.row_ptr[k + 1] - 1];
            }
        }
    }
    Some(l)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PcgOutcome {
    pub iterations: usize,
    /// `|b - A x| / |b|`
    pub relative_residual: f64,
    pub converged: bool,
}

/// Preconditioned conjugate gradients, starting from the contents of `x`.
pub fn pcg(
    a: &CsrMatrix,
    b: &[f64],
    x: &mut [f64],
    precond: &Preconditioner,
    rel_tol: f64,
    max_iter: usize,
) -> PcgOutcome {
    let n = a.n;
    let b_norm = par::dot(b, b).sqrt();
    if b_norm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return PcgOutcome { iterations: 0, relative_residual: 0.0, converged: true };
    }
    let mut ax = vec![0.0; n];
    a.matvec(x, &mut ax);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(bi, axi)| bi - axi).collect();
    let mut z = vec![0.0; n];
    precond.apply(&r, &mut z);
    let mut p = z.clone();
    let mut rz = par::dot(&r, &z);
    let mut ap = vec![0.0; n];
    let mut rel = par::dot(&r, &r).sqrt() / b_norm;
    for it in 0..max_iter {
        if rel <= rel_tol {
            return PcgOutcome { iterations: it, relative_residual: rel, converged: true };
        }
        a.matvec(&p, &mut ap);
        let pap = par::dot(&p, &ap);
        if !(pap > 0.0) {
            return PcgOutcome { iterations: it, relative_residual: rel, converged: false };
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        rel = par::dot(&r, &r).sqrt() / b_norm;
        precond.apply(&r, &mut z);
        let rz_new = par::dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    PcgOutcome { iterations: max_iter, relative_residual: rel, converged: rel <= rel_tol }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// 2D five-point Laplacian on an m x m grid with Dirichlet boundary.
    fn laplacian(m: usize) -> CsrMatrix {
        let id = |i: usize, j: usize| i * m + j;
        let mut rows = Vec::new();
        for i in 0..m {
            for j in 0..m {
                let mut row = vec![id(i, j)];
                if i > 0 {
                    row.push(id(i - 1, j));
                }
                if i + 1 < m {
                    row.push(id(i + 1, j));
                }
                if j > 0 {
                    row.push(id(i, j - 1));
                }
                if j + 1 < m {
                    row.push(id(i, j + 1));
                }
                rows.push(row);
            }
        }
        let mut a = CsrMatrix::from_pattern(rows);
        for i in 0..a.n {
            for k in a.row_ptr[i]..a.row_ptr[i + 1] {
                a.values[k] = if a.col_idx[k] == i { 4.0 } else { -1.0 };
            }
        }
        a
    }

    #[test]
    fn pcg_solves_laplacian_with_both_preconditioners() {
        let a = laplacian(30);
        assert!(a.is_symmetric(0.0));
        let x_true: Vec<f64> = (0..a.n).map(|i| ((i * 7 % 13) as f64).sin()).collect();
        let mut b = vec![0.0; a.n];
        a.matvec(&x_true, &mut b);
        for pre in [Preconditioner::jacobi(&a), Preconditioner::incomplete_cholesky(&a)] {
            let mut x = vec![0.0; a.n];
            let out = pcg(&a, &b, &mut x, &pre, 1e-12, 1000);
            assert!(out.converged, "{out:?}");
            let err = x.iter().zip(&x_true).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(err < 1e-9);
        }
    }

    #[test]
    fn incomplete_cholesky_reduces_iterations() {
        let a = laplacian(40);
        let b = vec![1.0; a.n];
        let mut x1 = vec![0.0; a.n];
        let mut x2 = vec![0.0; a.n];
        let j = pcg(&a, &b, &mut x1, &Preconditioner::jacobi(&a), 1e-10, 2000);
        let ic = pcg(&a, &b, &mut x2, &Preconditioner::incomplete_cholesky(&a), 1e-10, 2000);
        assert!(matches!(Preconditioner::incomplete_cholesky(&a), Preconditioner::IncompleteCholesky(_)));
        assert!(ic.iterations < j.iterations);
    }

    #[test]
    fn zero_rhs_gives_zero_solution() {
        let a = laplacian(5);
        let mut x = vec![3.0; a.n];
        let out = pcg(&a, &vec![0.0; a.n], &mut x, &Preconditioner::jacobi(&a), 1e-12, 10);
        assert!(out.converged && x.iter().all(|&v| v == 0.0));
    }
}

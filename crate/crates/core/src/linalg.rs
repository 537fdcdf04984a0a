//! Thin helpers over nalgebra for small dense complex matrices.

use nalgebra::{DMatrix, DVector};

use crate::poly::C64;

pub fn matrix(rows: &[Vec<C64>], ncols: usize) -> DMatrix<C64> {
    DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j])
}

/// Eigenvalues of a square complex matrix via the complex Schur form.
pub fn eigenvalues(m: DMatrix<C64>) -> Option<Vec<C64>> {
    let n = m.nrows();
    if n == 0 {
        return Some(Vec::new());
    }
    let schur = nalgebra::Schur::try_new(m, 1e-15, 10_000)?;
    schur.eigenvalues().map(|v| v.iter().copied().collect())
}

/// Singular value decomposition of the matrix whose rows are `rows`.
#[derive(Clone, Debug)]
pub struct SvdSplit {
    /// Singular values in descending order, padded with zeros to `ncols`.
    pub singular_values: Vec<f64>,
    /// Right singular vectors in the same order; `rows * v_k = sigma_k u_k`.
    pub right_vectors: Vec<Vec<C64>>,
}

impl SvdSplit {
    pub fn new(rows: &[Vec<C64>], ncols: usize) -> SvdSplit {
        // Pad to at least a square matrix so the full right basis is returned.
        let nr = rows.len().max(ncols);
        let m = DMatrix::from_fn(nr, ncols, |i, j| if i < rows.len() { rows[i][j] } else { C64::new(0.0, 0.0) });
        let svd = m.svd(false, true);
        let vt = svd.v_t.expect("v_t requested");
        let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
        idx.sort_by(|&a, &b| svd.singular_values[b].partial_cmp(&svd.singular_values[a]).unwrap().then(a.cmp(&b)));
        let singular_values = idx.iter().map(|&k| svd.singular_values[k]).collect();
        // Rows of V^H are conj(v_k)^T.
        let right_vectors = idx.iter().map(|&k| (0..ncols).map(|j| vt[(k, j)].conj()).collect()).collect();
        SvdSplit { singular_values, right_vectors }
    }

    /// Numerical rank at relative tolerance `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        let smax = self.singular_values.first().copied().unwrap_or(0.0);
        if smax == 0.0 {
            return 0;
        }
        self.singular_values.iter().filter(|&&s| s > tol * smax).count()
    }

    /// Basis of the row space (conjugated right vectors with nonzero sigma).
    pub fn row_space(&self, rank: usize) -> Vec<Vec<C64>> {
        self.right_vectors[..rank].iter().map(|v| v.iter().map(|c| c.conj()).collect()).collect()
    }

    /// Vectors `f` with `rows * f = 0`.
    pub fn null_space(&self, rank: usize) -> Vec<Vec<C64>> {
        self.right_vectors[rank..].to_vec()
    }
}

/// Solves a square system by LU; `None` when singular.
pub fn solve(a: &DMatrix<C64>, b: &[C64]) -> Option<Vec<C64>> {
    let lu = a.clone().lu();
    lu.solve(&DVector::from_column_slice(b)).map(|x| x.iter().copied().collect())
}

/// Minimum-norm least squares solution of `a x = b`.
pub fn lstsq(a: &DMatrix<C64>, b: &[C64], rcond: f64) -> Vec<C64> {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let eps = rcond * smax.max(f64::MIN_POSITIVE);
    let x = svd.solve(&DVector::from_column_slice(b), eps).expect("u and v_t computed");
    x.iter().copied().collect()
}

/// Ratio of smallest to largest singular value.
pub fn inverse_condition(a: &DMatrix<C64>) -> f64 {
    let s = a.clone().singular_values();
    let max = s.iter().cloned().fold(0.0, f64::max);
    let min = s.iter().cloned().fold(f64::INFINITY, f64::min);
    if max == 0.0 {
        0.0
    } else {
        min / max
    }
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

pub fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Hermitian inner product `sum conj(a_i) b_i`.
pub fn hdot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn axpy(alpha: C64, x: &[C64], y: &[C64]) -> Vec<C64> {
    x.iter().zip(y).map(|(a, b)| alpha * a + b).collect()
}

pub fn scaled(v: &[C64], s: C64) -> Vec<C64> {
    v.iter().map(|c| c * s).collect()
}

pub fn unit(v: &[C64]) -> Vec<C64> {
    let n = norm(v);
    v.iter().map(|c| c / n).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn companion_eigenvalues() {
        // t^2 - 3t + 2
        let m = DMatrix::from_row_slice(2, 2, &[c(0.0), c(-2.0), c(1.0), c(3.0)]);
        let mut ev: Vec<f64> = eigenvalues(m).unwrap().iter().map(|z| z.re).collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((ev[0] - 1.0).abs() < 1e-12 && (ev[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn null_space_is_annihilated() {
        let rows = vec![vec![c(1.0), C64::new(0.0, 2.0), c(0.0), c(1.0)]];
        let s = SvdSplit::new(&rows, 4);
        assert_eq!(s.rank(1e-12), 1);
        let ns = s.null_space(1);
        assert_eq!(ns.len(), 3);
        for v in ns {
            assert!(dot(&rows[0], &v).norm() < 1e-12);
        }
    }
}

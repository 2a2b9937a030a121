//! Dense real matrices: arithmetic, Kronecker products, vectorization,
//! factorizations, and spectral-radius estimation.
//!
//! Everything here is plain row-major `f64` storage. The problem sizes in
//! this crate are tiny (state dimensions of a few, augmented matrices of a
//! few dozen rows), so dense O(n^3) routines are the right tool.

use crate::error::{Error, Result};
use crate::tol;
use serde::{Deserialize, Serialize};

/// Dense real matrix, row-major storage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix needs {} entries, got {}",
                rows,
                cols,
                rows * cols,
                entries.len()
            )));
        }
        if entries.iter().any(|e| !e.is_finite()) {
            return Err(Error::NonFinite("matrix entries"));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    /// Column vector from a slice.
    pub fn column(v: &[f64]) -> Self {
        Self { rows: v.len(), cols: 1, entries: v.to_vec() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e * s).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.check_same_shape(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, entries })
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.check_same_shape(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, entries })
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a_ik = self[(i, k)];
                if a_ik == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a_ik * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch(format!(
                "cannot apply {}x{} to vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), v)).collect())
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|e| e * e).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0f64, |m, e| m.max(e.abs()))
    }

    fn check_same_shape(&self, other: &Matrix) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.entries[i * self.cols + j]
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, e| m.max(e.abs()))
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let mut out = Matrix::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    for ia in 0..a.rows() {
        for ja in 0..a.cols() {
            let s = a[(ia, ja)];
            if s == 0.0 {
                continue;
            }
            for ib in 0..b.rows() {
                for jb in 0..b.cols() {
                    out[(ia * b.rows() + ib, ja * b.cols() + jb)] = s * b[(ib, jb)];
                }
            }
        }
    }
    out
}

/// Kronecker product of two vectors, `u ⊗ x` (stacks `u[i] * x`).
pub fn kron_vec(u: &[f64], x: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(u.len() * x.len());
    for ui in u {
        for xj in x {
            out.push(ui * xj);
        }
    }
    out
}

/// Column-stacking vectorization.
pub fn vectorize(a: &Matrix) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.rows() * a.cols());
    for j in 0..a.cols() {
        for i in 0..a.rows() {
            out.push(a[(i, j)]);
        }
    }
    out
}

/// Inverse of [`vectorize`]: reshape a column-stacked vector back to `rows x cols`.
pub fn unvectorize(v: &[f64], rows: usize, cols: usize) -> Result<Matrix> {
    if v.len() != rows * cols {
        return Err(Error::DimensionMismatch(format!(
            "cannot reshape length-{} vector to {}x{}",
            v.len(),
            rows,
            cols
        )));
    }
    let mut out = Matrix::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            out[(i, j)] = v[j * rows + i];
        }
    }
    Ok(out)
}

/// Spectral-radius estimate via Gelfand's formula with repeated squaring.
///
/// Computes `‖a^(2^k)‖^(1/2^k)` with per-step renormalization, using the
/// Frobenius norm (equivalent to the 2-norm up to a `√dim` factor that the
/// `1/2^k` root kills off geometrically). `max_squarings` caps `k`; the
/// estimate is accepted once `2^k >= 64` and successive estimates agree to
/// `tol` relative, giving `|estimate − ρ| <= tol·max(1, ρ)` on the matrices
/// this crate produces.
pub fn spectral_radius(a: &Matrix, max_squarings: usize, tol: f64) -> Result<f64> {
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    if a.rows() == 0 {
        return Ok(0.0);
    }
    let norm0 = a.frobenius_norm();
    if norm0 == 0.0 {
        return Ok(0.0);
    }
    // log_estimate accumulates Σ 2^{-i} ln ν_i, which telescopes to
    // ln ‖a^(2^k)‖ / 2^k.
    let mut log_estimate = norm0.ln();
    let mut power = a.scale(1.0 / norm0);
    let mut estimate = log_estimate.exp();
    for step in 1..=max_squarings {
        power = power.matmul(&power)?;
        let nu = power.frobenius_norm();
        if nu == 0.0 {
            // Nilpotent: every eigenvalue is zero.
            return Ok(0.0);
        }
        log_estimate += nu.ln() / (1u64 << step.min(62)) as f64;
        power = power.scale(1.0 / nu);
        let next = log_estimate.exp();
        if (1usize << step.min(62)) >= 64 && (next - estimate).abs() <= tol * next.max(1.0) / 4.0 {
            return Ok(next);
        }
        estimate = next;
    }
    Ok(estimate)
}

/// Convenience wrapper with the crate's default squaring budget and tolerance.
pub fn spectral_radius_default(a: &Matrix) -> Result<f64> {
    spectral_radius(a, 48, tol::SPECTRAL)
}

/// Solve `a x = b` by LU decomposition with partial pivoting.
pub fn lu_solve(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    let n = a.rows();
    if b.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "rhs length {} for {}x{} system",
            b.len(),
            n,
            n
        )));
    }
    let mut lu = a.clone();
    let mut x = b.to_vec();
    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_val = lu[(col, col)].abs();
        for r in col + 1..n {
            let v = lu[(r, col)].abs();
            if v > pivot_val {
                pivot_val = v;
                pivot_row = r;
            }
        }
        if pivot_val < 1e-14 {
            return Err(Error::SingularGram);
        }
        if pivot_row != col {
            for j in 0..n {
                let tmp = lu[(col, j)];
                lu[(col, j)] = lu[(pivot_row, j)];
                lu[(pivot_row, j)] = tmp;
            }
            x.swap(col, pivot_row);
        }
        for r in col + 1..n {
            let factor = lu[(r, col)] / lu[(col, col)];
            if factor == 0.0 {
                continue;
            }
            for j in col..n {
                lu[(r, j)] -= factor * lu[(col, j)];
            }
            x[r] -= factor * x[col];
        }
    }
    for col in (0..n).rev() {
        x[col] /= lu[(col, col)];
        for r in 0..col {
            let f = lu[(r, col)];
            x[r] -= f * x[col];
        }
    }
    Ok(x)
}

/// Cholesky factor `L` (lower triangular) of a symmetric positive-definite matrix.
pub fn cholesky(a: &Matrix) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    let n = a.rows();
    let mut l = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[(i, j)];
            for k in 0..j {
                sum -= l[(i, k)] * l[(j, k)];
            }
            if i == j {
                if sum <= 0.0 {
                    return Err(Error::NotPositiveDefinite);
                }
                l[(i, j)] = sum.sqrt();
            } else {
                l[(i, j)] = sum / l[(j, j)];
            }
        }
    }
    Ok(l)
}

/// Solve `a x = b` for symmetric positive-definite `a` via Cholesky.
pub fn cholesky_solve(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    let l = cholesky(a)?;
    let n = a.rows();
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            let f = l[(i, k)];
            y[i] -= f * y[k];
        }
        y[i] /= l[(i, i)];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            y[i] -= l[(k, i)] * y[k];
        }
        y[i] /= l[(i, i)];
    }
    Ok(y)
}

/// Eigenvalues of a symmetric matrix by the cyclic Jacobi method, ascending.
pub fn symmetric_eigenvalues(a: &Matrix) -> Result<Vec<f64>> {
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    let n = a.rows();
    let mut m = a.clone();
    for sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += m[(i, j)] * m[(i, j)];
            }
        }
        if off.sqrt() < 1e-13 * (1.0 + m.frobenius_norm()) {
            break;
        }
        debug_assert!(sweep < 99, "Jacobi sweep budget exhausted");
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
    eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(eig)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mat(rows: usize, cols: usize, e: &[f64]) -> Matrix {
        Matrix::new(rows, cols, e.to_vec()).unwrap()
    }

    #[test]
    fn kron_scalar_times_vector() {
        let a = mat(1, 1, &[2.0]);
        let b = mat(2, 1, &[1.0, -1.0]);
        let k = kron(&a, &b);
        assert_eq!(k.entries(), &[2.0, -2.0]);
    }

    #[test]
    fn kron_identity_times_identity() {
        let k = kron(&Matrix::identity(2), &Matrix::identity(2));
        assert_eq!(k, Matrix::identity(4));
    }

    #[test]
    fn vectorize_column_stacks() {
        // [[1,3],[2,4]] column-stacks to [1,2,3,4].
        let a = mat(2, 2, &[1.0, 3.0, 2.0, 4.0]);
        assert_eq!(vectorize(&a), vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(vectorize(&Matrix::zeros(2, 2)), vec![0.0; 4]);
    }

    #[test]
    fn spectral_radius_diagonal() {
        let a = Matrix::diagonal(&[0.9, 0.3]);
        let rho = spectral_radius(&a, 48, 1e-6).unwrap();
        assert!((rho - 0.9).abs() < 1e-4, "rho = {rho}");
    }

    #[test]
    fn spectral_radius_zero_matrix() {
        assert_eq!(spectral_radius(&Matrix::zeros(3, 3), 48, 1e-6).unwrap(), 0.0);
    }

    #[test]
    fn spectral_radius_rotation() {
        // Eigenvalues ±i, both of modulus 1.
        let a = mat(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let rho = spectral_radius(&a, 48, 1e-6).unwrap();
        assert!((rho - 1.0).abs() < 1e-4, "rho = {rho}");
    }

    #[test]
    fn spectral_radius_rejects_non_square() {
        assert!(spectral_radius(&Matrix::zeros(2, 3), 48, 1e-6).is_err());
    }

    #[test]
    fn lu_solve_small_system() {
        let a = mat(2, 2, &[2.0, 1.0, 1.0, 3.0]);
        let x = lu_solve(&a, &[5.0, 10.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12);
        assert!((x[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn cholesky_solve_matches_lu() {
        let a = mat(3, 3, &[4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0]);
        let b = [1.0, 2.0, 3.0];
        let x1 = cholesky_solve(&a, &b).unwrap();
        let x2 = lu_solve(&a, &b).unwrap();
        for (u, v) in x1.iter().zip(&x2) {
            assert!((u - v).abs() < 1e-10);
        }
    }

    #[test]
    fn jacobi_eigenvalues_known_matrix() {
        // Eigenvalues of [[2,1],[1,2]] are 1 and 3.
        let a = mat(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let eig = symmetric_eigenvalues(&a).unwrap();
        assert!((eig[0] - 1.0).abs() < 1e-10);
        assert!((eig[1] - 3.0).abs() < 1e-10);
    }

    #[test]
    fn matrix_rejects_non_finite() {
        assert!(Matrix::new(1, 2, vec![1.0, f64::NAN]).is_err());
        assert!(Matrix::new(1, 2, vec![1.0]).is_err());
    }

    fn small_entries(len: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-5.0..5.0f64, len)
    }

    proptest! {
        #[test]
        fn kron_is_bilinear(a in small_entries(4), b in small_entries(6), c in small_entries(6)) {
            let a = mat(2, 2, &a);
            let b = mat(2, 3, &b);
            let c = mat(2, 3, &c);
            let lhs = kron(&a, &b.add(&c).unwrap());
            let rhs = kron(&a, &b).add(&kron(&a, &c)).unwrap();
            let diff = lhs.sub(&rhs).unwrap().max_abs();
            prop_assert!(diff <= 1e-12, "diff = {diff}");
        }

        #[test]
        fn vec_kron_identity(m in small_entries(9), x in small_entries(9), n in small_entries(9)) {
            // vec(M X N) == (N' ⊗ M) vec(X)
            let m = mat(3, 3, &m);
            let x = mat(3, 3, &x);
            let n = mat(3, 3, &n);
            let lhs = vectorize(&m.matmul(&x).unwrap().matmul(&n).unwrap());
            let rhs = kron(&n.transpose(), &m).matvec(&vectorize(&x)).unwrap();
            for (u, v) in lhs.iter().zip(&rhs) {
                prop_assert!((u - v).abs() <= 1e-10, "lhs {u} vs rhs {v}");
            }
        }

        #[test]
        fn vectorize_round_trips(v in small_entries(9)) {
            let m = mat(3, 3, &v);
            let back = unvectorize(&vectorize(&m), 3, 3).unwrap();
            prop_assert_eq!(m, back);
        }

        #[test]
        fn spectral_radius_triangular_is_max_diag(
            d in prop::collection::vec(-1.5..1.5f64, 3),
            low in prop::collection::vec(-2.0..2.0f64, 3),
        ) {
            let mut a = Matrix::diagonal(&d);
            a[(1, 0)] = low[0];
            a[(2, 0)] = low[1];
            a[(2, 1)] = low[2];
            let expect = d.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let rho = spectral_radius(&a, 48, 1e-5).unwrap();
            prop_assert!((rho - expect).abs() <= 1e-4 * expect.max(1.0),
                "rho {rho} vs max diag {expect}");
        }
    }
}

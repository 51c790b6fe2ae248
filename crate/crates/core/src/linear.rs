//! Linear functions f(X) = Tr(A^T X) on O(n): gradients, criticality, the
//! Grassmannian parametrization of the trace function's critical locus via
//! (-1)-eigenspaces, Hessian forms, and the per-degree index identity
//! between SO(n) Betti numbers and shifted Grassmannian Betti numbers.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::comb::{choose2, grassmannian_betti, so_betti, DegreeComparison};
use crate::error::{Error, Result};
use crate::matrix::{Matrix, OrthogonalPoint};
use crate::quadratic::QuadraticForm;

/// Eigenvalues of a numerically symmetric orthogonal matrix must sit within
/// this distance of +-1; the slack absorbs symmetrization error.
pub const EIGENVALUE_PM1_TOL: f64 = 1e-6;

/// Orthonormality tolerance on Grassmann basis columns.
pub const GRASSMANN_BASIS_TOL: f64 = 1e-10;

/// f(X) = Tr(A^T X) for an arbitrary real square A.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinearProblem {
    a: Matrix,
}

impl LinearProblem {
    pub fn new(a: Matrix) -> Result<LinearProblem> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "linear problem needs a square matrix, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        Ok(LinearProblem { a })
    }

    /// The trace function: A = I.
    pub fn trace(n: usize) -> LinearProblem {
        LinearProblem {
            a: Matrix::identity(n),
        }
    }

    /// The lower-right-entry function: A = Diag(0,...,0,1).
    pub fn corner_entry(n: usize) -> LinearProblem {
        let mut a = Matrix::zeros(n, n);
        if n > 0 {
            a.set(n - 1, n - 1, 1.0);
        }
        LinearProblem { a }
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    fn check_dim(&self, x: &OrthogonalPoint) -> Result<()> {
        if x.dim() != self.n() {
            return Err(Error::DimensionMismatch(format!(
                "point has size {}, problem has size {}",
                x.dim(),
                self.n()
            )));
        }
        Ok(())
    }
}

/// A linear subspace of R^n given by an orthonormal basis matrix (n x k).
#[derive(Clone, Debug, Serialize)]
pub struct GrassmannPoint {
    n: usize,
    basis: Matrix,
}

impl GrassmannPoint {
    pub fn new(basis: Matrix) -> Result<GrassmannPoint> {
        let (n, k) = (basis.rows(), basis.cols());
        if k > n {
            return Err(Error::DimensionMismatch(format!(
                "basis has more columns ({k}) than rows ({n})"
            )));
        }
        let gram = &basis.transpose() * &basis;
        let residual = gram.max_abs_diff(&Matrix::identity(k));
        if residual > GRASSMANN_BASIS_TOL {
            return Err(Error::NotOrthogonal {
                residual,
                tol: GRASSMANN_BASIS_TOL,
            });
        }
        Ok(GrassmannPoint { n, basis })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Dimension of the subspace.
    pub fn k(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    /// The orthogonal projector onto the subspace; basis-independent, so the
    /// canonical representation for comparisons.
    pub fn projector(&self) -> Matrix {
        &self.basis * &self.basis.transpose()
    }
}

/// f(X) = Tr(A^T X).
pub fn linear_value(prob: &LinearProblem, x: &OrthogonalPoint) -> Result<f64> {
    prob.check_dim(x)?;
    Ok((&prob.a.transpose() * x.matrix()).trace())
}

/// Riemannian gradient (A - X A^T X)/2; tangent at X.
pub fn linear_gradient(prob: &LinearProblem, x: &OrthogonalPoint) -> Result<Matrix> {
    prob.check_dim(x)?;
    let xm = x.matrix();
    Ok((&prob.a - &(&(xm * &prob.a.transpose()) * xm)).scale(0.5))
}

/// Max-abs of X A^T - A X^T; zero exactly at critical points.
pub fn linear_critical_residual(prob: &LinearProblem, x: &OrthogonalPoint) -> Result<f64> {
    prob.check_dim(x)?;
    let xm = x.matrix();
    let xat = xm * &prob.a.transpose();
    Ok(xat.symmetry_defect())
}

pub fn is_critical_linear(prob: &LinearProblem, x: &OrthogonalPoint, tol: f64) -> Result<bool> {
    Ok(linear_critical_residual(prob, x)? <= tol)
}

/// The (-1)-eigenspace of a symmetric orthogonal matrix (a critical point of
/// the trace function). Errors when X is not symmetric within `tol` or has
/// an eigenvalue away from +-1.
pub fn grassmannian_of_critical(x: &OrthogonalPoint, tol: f64) -> Result<GrassmannPoint> {
    let residual = x.matrix().symmetry_defect();
    if residual > tol {
        return Err(Error::NotCritical { residual, tol });
    }
    let n = x.dim();
    let (values, vectors) = x.matrix().symmetric_eigen_sorted();
    for &v in &values {
        if (v - 1.0).abs() > EIGENVALUE_PM1_TOL && (v + 1.0).abs() > EIGENVALUE_PM1_TOL {
            return Err(Error::Validation(format!(
                "eigenvalue {v} of a symmetric orthogonal matrix is not near +-1"
            )));
        }
    }
    let k = values.iter().filter(|&&v| v < 0.0).count();
    // Ascending order puts the (-1)-cluster first.
    let basis = vectors.block(0, 0, n, k).orthonormalize_columns();
    GrassmannPoint::new(basis)
}

/// The symmetric orthogonal involution with the given (-1)-eigenspace:
/// X = I - 2 P. Inverse of [`grassmannian_of_critical`].
pub fn critical_of_subspace(l: &GrassmannPoint) -> Result<OrthogonalPoint> {
    let p = l.projector();
    OrthogonalPoint::new(&Matrix::identity(l.n()) - &p.scale(2.0))
}

/// Raw Hessian pairing Tr(A^T X E1 E2) of two standard basis elements.
pub fn hessian_entry_linear(
    prob: &LinearProblem,
    x: &OrthogonalPoint,
    e1: crate::matrix::SkewIndex,
    e2: crate::matrix::SkewIndex,
) -> Result<f64> {
    prob.check_dim(x)?;
    let n = prob.n();
    let m1 = crate::matrix::skew_basis(e1, n)?;
    let m2 = crate::matrix::skew_basis(e2, n)?;
    Ok((&(&(&prob.a.transpose() * x.matrix()) * &m1) * &m2).trace())
}

/// Hessian of f(X) = Tr(A^T X) at X as a quadratic form on so(n):
/// H(E, N) = Tr(A^T X E N), symmetrized with the defect recorded.
pub fn hessian_form_linear(prob: &LinearProblem, x: &OrthogonalPoint) -> Result<QuadraticForm> {
    prob.check_dim(x)?;
    let n = prob.n();
    let indices = crate::matrix::SkewIndex::all(n);
    let d = indices.len();
    let atx = &prob.a.transpose() * x.matrix();
    let mut raw = Matrix::zeros(d, d);
    for (row, &e1) in indices.iter().enumerate() {
        let left = &atx * &crate::matrix::skew_basis(e1, n)?;
        for (col, &e2) in indices.iter().enumerate() {
            raw.set(row, col, (&left * &crate::matrix::skew_basis(e2, n)?).trace());
        }
    }
    QuadraticForm::from_raw(n, raw)
}

/// Per-degree check of b_i(n) = sum_k c_{i - iota(2k)}(2k, n) with
/// iota(2k) = C(n-2k, 2): the index-shifted Grassmannian Betti numbers of
/// the even-dimensional critical components sum to the SO(n) Betti numbers.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MorseReport {
    pub n: usize,
    pub rows: Vec<DegreeComparison>,
    pub all_equal: bool,
}

pub fn morse_inequality_report(n: usize) -> MorseReport {
    let max_degree = choose2(n) as usize;
    let mut rows = Vec::with_capacity(max_degree + 1);
    let mut all_equal = true;
    for i in 0..=max_degree {
        let lhs = so_betti(i as i64, n);
        let mut rhs = BigUint::ZERO;
        for k in 0..=(n / 2) {
            let shift = choose2(n - 2 * k) as i64;
            rhs += grassmannian_betti(i as i64 - shift, 2 * k, n);
        }
        let equal = lhs == rhs;
        all_equal &= equal;
        rows.push(DegreeComparison {
            degree: i,
            lhs,
            rhs,
            equal,
        });
    }
    MorseReport { n, rows, all_equal }
}

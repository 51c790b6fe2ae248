//! The quadratic trace function f(X) = Tr(A X B X^T) on O(n) for diagonal
//! A, B built from eigenvalue spectra: values, gradients, criticality tests,
//! construction and decomposition of the critical locus, Hessian forms and
//! index/nullity counting.
//!
//! A critical point decomposes into blocks X[i,j] = Q[i,j] R[i,j]^T indexed
//! by the (i, j) cells of a perfect filling of the margin table; the block
//! widths are the filling entries. The decomposition is unique up to the
//! right action of the product of O(eps_ij).

use serde::{Deserialize, Serialize};

use crate::comb::{choose2, Margins, PerfectFilling};
use crate::error::{Error, Result};
use crate::matrix::{commutator, Matrix, OrthogonalPoint, SignedPermutation, SkewIndex};

// ---------------------------------------------------------------------------
// Spectra
// ---------------------------------------------------------------------------

/// Eigenvalues with multiplicities, strictly increasing. The expansion
/// Diag(a_1 I_{m_1}, ..., a_s I_{m_s}) is the diagonal matrix the trace
/// function is built from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpectrumRepr", into = "SpectrumRepr")]
pub struct Spectrum {
    values: Vec<f64>,
    mults: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct SpectrumRepr {
    values: Vec<f64>,
    mults: Vec<usize>,
}

impl TryFrom<SpectrumRepr> for Spectrum {
    type Error = Error;
    fn try_from(repr: SpectrumRepr) -> Result<Spectrum> {
        Spectrum::new(repr.values, repr.mults)
    }
}

impl From<Spectrum> for SpectrumRepr {
    fn from(s: Spectrum) -> SpectrumRepr {
        SpectrumRepr {
            values: s.values,
            mults: s.mults,
        }
    }
}

impl Spectrum {
    pub fn new(values: Vec<f64>, mults: Vec<usize>) -> Result<Spectrum> {
        if values.is_empty() || values.len() != mults.len() {
            return Err(Error::InvalidArgument(
                "spectrum needs matching nonempty values and multiplicities".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(
                "spectrum values must be strictly increasing".into(),
            ));
        }
        if mults.contains(&0) {
            return Err(Error::InvalidArgument(
                "multiplicities must be positive".into(),
            ));
        }
        Ok(Spectrum { values, mults })
    }

    /// Spectrum with all multiplicities 1.
    pub fn distinct(values: Vec<f64>) -> Result<Spectrum> {
        let mults = vec![1; values.len()];
        Spectrum::new(values, mults)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mults(&self) -> &[usize] {
        &self.mults
    }

    /// Total dimension (sum of multiplicities).
    pub fn dim(&self) -> usize {
        self.mults.iter().sum()
    }

    /// The n diagonal entries in block order.
    pub fn expanded(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim());
        for (v, &m) in self.values.iter().zip(&self.mults) {
            out.extend(std::iter::repeat_n(*v, m));
        }
        out
    }

    pub fn matrix(&self) -> Matrix {
        Matrix::diagonal(&self.expanded())
    }
}

/// A pair of spectra of equal total dimension defining f(X) = Tr(A X B X^T).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProblemRepr", into = "ProblemRepr")]
pub struct QuadraticProblem {
    a: Spectrum,
    b: Spectrum,
}

#[derive(Serialize, Deserialize)]
struct ProblemRepr {
    a: Spectrum,
    b: Spectrum,
}

impl TryFrom<ProblemRepr> for QuadraticProblem {
    type Error = Error;
    fn try_from(repr: ProblemRepr) -> Result<QuadraticProblem> {
        QuadraticProblem::new(repr.a, repr.b)
    }
}

impl From<QuadraticProblem> for ProblemRepr {
    fn from(p: QuadraticProblem) -> ProblemRepr {
        ProblemRepr { a: p.a, b: p.b }
    }
}

impl QuadraticProblem {
    pub fn new(a: Spectrum, b: Spectrum) -> Result<QuadraticProblem> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch(format!(
                "spectra dimensions differ: {} != {}",
                a.dim(),
                b.dim()
            )));
        }
        Ok(QuadraticProblem { a, b })
    }

    pub fn n(&self) -> usize {
        self.a.dim()
    }

    pub fn a(&self) -> &Spectrum {
        &self.a
    }

    pub fn b(&self) -> &Spectrum {
        &self.b
    }

    /// Row margins from the A-multiplicities, column margins from the
    /// B-multiplicities.
    pub fn margins(&self) -> Margins {
        Margins::new(self.a.mults.clone(), self.b.mults.clone())
            .expect("spectra dimensions already checked")
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

// ---------------------------------------------------------------------------
// Value, gradient, criticality
// ---------------------------------------------------------------------------

/// f(X) = Tr(A X B X^T).
pub fn f_value(prob: &QuadraticProblem, x: &OrthogonalPoint) -> Result<f64> {
    prob.check_dim(x)?;
    let n = prob.n();
    let a = prob.a.expanded();
    let b = prob.b.expanded();
    let xm = x.matrix();
    // Tr(A X B X^T) = sum_{p,q} a_p b_q X_pq^2 for diagonal A, B.
    let mut total = 0.0;
    for p in 0..n {
        for q in 0..n {
            let v = xm.get(p, q);
            total += a[p] * b[q] * v * v;
        }
    }
    Ok(total)
}

/// Riemannian gradient (A X B X^T - X B X^T A) X; tangent at X.
pub fn f_gradient(prob: &QuadraticProblem, x: &OrthogonalPoint) -> Result<Matrix> {
    prob.check_dim(x)?;
    let a = prob.a.matrix();
    let b = prob.b.matrix();
    let xm = x.matrix();
    let s = &(xm * &b) * &xm.transpose();
    let k = &(&a * &s) - &(&s * &a);
    Ok(&k * xm)
}

/// Max-abs asymmetry of A X B X^T; zero exactly at critical points.
pub fn critical_residual(prob: &QuadraticProblem, x: &OrthogonalPoint) -> Result<f64> {
    prob.check_dim(x)?;
    let a = prob.a.matrix();
    let b = prob.b.matrix();
    let xm = x.matrix();
    let axbxt = &(&(&a * xm) * &b) * &xm.transpose();
    Ok(axbxt.symmetry_defect())
}

pub fn is_critical_quadratic(
    prob: &QuadraticProblem,
    x: &OrthogonalPoint,
    tol: f64,
) -> Result<bool> {
    Ok(critical_residual(prob, x)? <= tol)
}

// ---------------------------------------------------------------------------
// Critical-point construction and decomposition
// ---------------------------------------------------------------------------

/// Block data (Q, R, eps) producing a critical point: Q[i] in O(m_i) split
/// into column blocks of widths eps_i1..eps_it, R[j] in O(n_j) split into
/// column blocks of widths eps_1j..eps_sj.
#[derive(Clone, Debug)]
pub struct CriticalDecomposition {
    filling: PerfectFilling,
    q: Vec<OrthogonalPoint>,
    r: Vec<OrthogonalPoint>,
}

impl CriticalDecomposition {
    pub fn new(
        filling: PerfectFilling,
        q: Vec<OrthogonalPoint>,
        r: Vec<OrthogonalPoint>,
    ) -> Result<CriticalDecomposition> {
        let margins = filling.margins();
        if q.len() != margins.s() || r.len() != margins.t() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} Q factors and {} R factors, got {} and {}",
                margins.s(),
                margins.t(),
                q.len(),
                r.len()
            )));
        }
        for (i, qi) in q.iter().enumerate() {
            if qi.dim() != margins.row_margins()[i] {
                return Err(Error::DimensionMismatch(format!(
                    "Q[{i}] must be {0}x{0}",
                    margins.row_margins()[i]
                )));
            }
        }
        for (j, rj) in r.iter().enumerate() {
            if rj.dim() != margins.col_margins()[j] {
                return Err(Error::DimensionMismatch(format!(
                    "R[{j}] must be {0}x{0}",
                    margins.col_margins()[j]
                )));
            }
        }
        Ok(CriticalDecomposition { filling, q, r })
    }

    pub fn filling(&self) -> &PerfectFilling {
        &self.filling
    }

    pub fn q(&self) -> &[OrthogonalPoint] {
        &self.q
    }

    pub fn r(&self) -> &[OrthogonalPoint] {
        &self.r
    }

    /// Column block Q[i,j] of Q[i], size m_i x eps_ij (0-based block indices).
    pub fn q_block(&self, i: usize, j: usize) -> Matrix {
        let offset: usize = (0..j).map(|l| self.filling.entry(i, l)).sum();
        let width = self.filling.entry(i, j);
        let m_i = self.q[i].dim();
        self.q[i].matrix().block(0, offset, m_i, width)
    }

    /// Column block R[i,j] of R[j], size n_j x eps_ij (0-based block indices).
    pub fn r_block(&self, i: usize, j: usize) -> Matrix {
        let offset: usize = (0..i).map(|k| self.filling.entry(k, j)).sum();
        let width = self.filling.entry(i, j);
        let n_j = self.r[j].dim();
        self.r[j].matrix().block(0, offset, n_j, width)
    }

    /// Right action of the block isotropy group: each Q[i,j] and R[i,j] is
    /// multiplied by u[i][j] in O(eps_ij). Leaves the constructed critical
    /// point unchanged.
    pub fn right_block_action(&self, u: &[Vec<Matrix>]) -> Result<CriticalDecomposition> {
        let margins = self.filling.margins().clone();
        let (s, t) = (margins.s(), margins.t());
        if u.len() != s || u.iter().any(|row| row.len() != t) {
            return Err(Error::DimensionMismatch("action must be s x t blocks".into()));
        }
        for i in 0..s {
            for j in 0..t {
                let e = self.filling.entry(i, j);
                if u[i][j].rows() != e || u[i][j].cols() != e {
                    return Err(Error::DimensionMismatch(format!(
                        "action block ({i},{j}) must be {e}x{e}"
                    )));
                }
            }
        }
        let mut q_new = Vec::with_capacity(s);
        for i in 0..s {
            let m_i = margins.row_margins()[i];
            let mut mat = Matrix::zeros(m_i, m_i);
            let mut offset = 0;
            for j in 0..t {
                let block = &self.q_block(i, j) * &u[i][j];
                mat.set_block(0, offset, &block);
                offset += self.filling.entry(i, j);
            }
            q_new.push(OrthogonalPoint::new(mat)?);
        }
        let mut r_new = Vec::with_capacity(t);
        for j in 0..t {
            let n_j = margins.col_margins()[j];
            let mut mat = Matrix::zeros(n_j, n_j);
            let mut offset = 0;
            for i in 0..s {
                let block = &self.r_block(i, j) * &u[i][j];
                mat.set_block(0, offset, &block);
                offset += self.filling.entry(i, j);
            }
            r_new.push(OrthogonalPoint::new(mat)?);
        }
        CriticalDecomposition::new(self.filling.clone(), q_new, r_new)
    }
}

/// Assembles the critical point with blocks X[i,j] = Q[i,j] R[i,j]^T.
pub fn construct_critical(
    prob: &QuadraticProblem,
    dec: &CriticalDecomposition,
) -> Result<OrthogonalPoint> {
    if dec.filling.margins() != &prob.margins() {
        return Err(Error::InvalidArgument(
            "decomposition margins do not match the problem spectra".into(),
        ));
    }
    let margins = prob.margins();
    let n = prob.n();
    let row_off = margins.row_offsets();
    let col_off = margins.col_offsets();
    let mut x = Matrix::zeros(n, n);
    for i in 0..margins.s() {
        for j in 0..margins.t() {
            let block = &dec.q_block(i, j) * &dec.r_block(i, j).transpose();
            x.set_block(row_off[i], col_off[j], &block);
        }
    }
    OrthogonalPoint::new(x)
}

/// Recovers a decomposition from a critical point: eigendecomposes the
/// diagonal blocks of H = X B X^T, clusters eigenvalues against the B-values
/// and reads off the filling from the eigenspace dimensions. An eigenvalue
/// farther than a quarter of the minimal B-gap from every B-value is an
/// error, not a silent guess.
pub fn decompose_critical(
    prob: &QuadraticProblem,
    x: &OrthogonalPoint,
    tol: f64,
) -> Result<CriticalDecomposition> {
    prob.check_dim(x)?;
    let residual = critical_residual(prob, x)?;
    if residual > tol {
        return Err(Error::NotCritical { residual, tol });
    }

    let margins = prob.margins();
    let (s, t) = (margins.s(), margins.t());
    let row_off = margins.row_offsets();
    let col_off = margins.col_offsets();
    let b_values = prob.b.values();
    let cluster_tol = if t >= 2 {
        let min_gap = b_values
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min);
        min_gap / 4.0
    } else {
        1e-6 * (1.0 + b_values[0].abs())
    };

    let xm = x.matrix();
    let b = prob.b.matrix();
    let h = &(xm * &b) * &xm.transpose();

    // Per row block: cluster the eigenvalues of H_i and collect per-cluster
    // orthonormal bases Q[i,j].
    let mut eps = vec![vec![0usize; t]; s];
    let mut q_blocks: Vec<Vec<Matrix>> = Vec::with_capacity(s);
    for i in 0..s {
        let m_i = margins.row_margins()[i];
        let h_i = h.block(row_off[i], row_off[i], m_i, m_i);
        let (values, vectors) = h_i.symmetric_eigen_sorted();
        let mut clusters: Vec<Vec<usize>> = vec![Vec::new(); t];
        for (k, &lambda) in values.iter().enumerate() {
            let (mut best_j, mut best_d) = (0usize, f64::INFINITY);
            for (j, &bj) in b_values.iter().enumerate() {
                let d = (lambda - bj).abs();
                if d < best_d {
                    best_d = d;
                    best_j = j;
                }
            }
            if best_d >= cluster_tol {
                return Err(Error::EigenvalueCluster {
                    value: lambda,
                    block: i,
                });
            }
            clusters[best_j].push(k);
        }
        let mut row_blocks = Vec::with_capacity(t);
        for (j, members) in clusters.iter().enumerate() {
            eps[i][j] = members.len();
            let mut basis = Matrix::zeros(m_i, members.len());
            for (col, &k) in members.iter().enumerate() {
                for r in 0..m_i {
                    basis.set(r, col, vectors.get(r, k));
                }
            }
            // Eigenvectors within a numerically clustered eigenvalue may
            // lose orthogonality; re-orthonormalize per cluster.
            row_blocks.push(basis.orthonormalize_columns());
        }
        q_blocks.push(row_blocks);
    }

    let filling = PerfectFilling::new(eps, margins.clone()).map_err(|e| {
        Error::Validation(format!(
            "eigenvalue clustering produced inconsistent block dimensions: {e}"
        ))
    })?;

    let mut q = Vec::with_capacity(s);
    for (i, row_blocks) in q_blocks.iter().enumerate() {
        let m_i = margins.row_margins()[i];
        let mut mat = Matrix::zeros(m_i, m_i);
        let mut offset = 0;
        for block in row_blocks {
            mat.set_block(0, offset, block);
            offset += block.cols();
        }
        q.push(OrthogonalPoint::new(mat)?);
    }

    // R[i,j] = X[i,j]^T Q[i,j]; the unique solution of X[i,j] = Q R^T given
    // the orthonormal columns of Q[i,j].
    let mut r = Vec::with_capacity(t);
    for j in 0..t {
        let n_j = margins.col_margins()[j];
        let mut mat = Matrix::zeros(n_j, n_j);
        let mut offset = 0;
        for (i, row_blocks) in q_blocks.iter().enumerate() {
            let x_ij = xm.block(row_off[i], col_off[j], margins.row_margins()[i], n_j);
            let r_ij = &x_ij.transpose() * &row_blocks[j];
            mat.set_block(0, offset, &r_ij);
            offset += r_ij.cols();
        }
        r.push(OrthogonalPoint::new(mat)?);
    }

    CriticalDecomposition::new(filling, q, r)
}

// ---------------------------------------------------------------------------
// Hessian form
// ---------------------------------------------------------------------------

/// A quadratic form on so(n) in the standard basis E(p,q), ordered
/// lexicographically: a symmetric C(n,2) x C(n,2) matrix together with the
/// asymmetry defect of the raw assembly (zero at critical points up to
/// roundoff).
#[derive(Clone, Debug, Serialize)]
pub struct QuadraticForm {
    n: usize,
    mat: Matrix,
    asym_defect: f64,
}

impl QuadraticForm {
    /// Symmetrizes a raw assembly and records its asymmetry defect.
    pub fn from_raw(n: usize, raw: Matrix) -> Result<QuadraticForm> {
        let d = choose2(n) as usize;
        if raw.rows() != d || raw.cols() != d {
            return Err(Error::DimensionMismatch(format!(
                "form for so({n}) must be {d}x{d}"
            )));
        }
        let asym_defect = raw.symmetry_defect();
        let mat = (&raw + &raw.transpose()).scale(0.5);
        Ok(QuadraticForm {
            n,
            mat,
            asym_defect,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// C(n, 2), the dimension of so(n).
    pub fn dim(&self) -> usize {
        choose2(self.n) as usize
    }

    pub fn matrix(&self) -> &Matrix {
        &self.mat
    }

    pub fn asym_defect(&self) -> f64 {
        self.asym_defect
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.mat.symmetric_eigen_sorted().0
    }

    /// Diagonal entries in the standard basis order.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|k| self.mat.get(k, k)).collect()
    }

    /// Max-abs off-diagonal entry.
    pub fn off_diagonal_max(&self) -> f64 {
        let d = self.dim();
        let mut m = 0.0f64;
        for a in 0..d {
            for b in 0..d {
                if a != b {
                    m = m.max(self.mat.get(a, b).abs());
                }
            }
        }
        m
    }

    /// The vector H . e where e are the standard-basis coefficients of a
    /// skew matrix.
    pub fn apply(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        let d = self.dim();
        if coeffs.len() != d {
            return Err(Error::DimensionMismatch(format!(
                "expected {d} coefficients, got {}",
                coeffs.len()
            )));
        }
        Ok((0..d)
            .map(|a| (0..d).map(|b| self.mat.get(a, b) * coeffs[b]).sum())
            .collect())
    }
}

/// Standard-basis coefficients of a skew matrix: the coefficient of E(p,q)
/// is the (q,p) entry.
pub fn skew_coefficients(e: &Matrix) -> Vec<f64> {
    let n = e.rows();
    SkewIndex::all(n)
        .iter()
        .map(|idx| e.get(idx.q() - 1, idx.p() - 1))
        .collect()
}

/// Raw Hessian pairing Tr(A X [E1, [E2, B]] X^T) of two standard basis
/// elements. Bilinear for every X; symmetric in its arguments only when X is
/// critical.
pub fn hessian_entry_quadratic(
    prob: &QuadraticProblem,
    x: &OrthogonalPoint,
    e1: SkewIndex,
    e2: SkewIndex,
) -> Result<f64> {
    prob.check_dim(x)?;
    let n = prob.n();
    let a = prob.a.matrix();
    let b = prob.b.matrix();
    let xm = x.matrix();
    let inner = commutator(&crate::matrix::skew_basis(e2, n)?, &b)?;
    let outer = commutator(&crate::matrix::skew_basis(e1, n)?, &inner)?;
    Ok((&(&a * &(xm * &outer)) * &xm.transpose()).trace())
}

/// Hessian of f at X as a quadratic form on so(n), assembled entry-wise from
/// the nested-commutator formula.
pub fn hessian_form_quadratic(
    prob: &QuadraticProblem,
    x: &OrthogonalPoint,
) -> Result<QuadraticForm> {
    prob.check_dim(x)?;
    let n = prob.n();
    let indices = SkewIndex::all(n);
    let d = indices.len();
    let a = prob.a.matrix();
    let b = prob.b.matrix();
    let xm = x.matrix();
    let xt = xm.transpose();
    let mut raw = Matrix::zeros(d, d);
    for (col, &e2) in indices.iter().enumerate() {
        let inner = commutator(&crate::matrix::skew_basis(e2, n)?, &b)?;
        for (row, &e1) in indices.iter().enumerate() {
            let outer = commutator(&crate::matrix::skew_basis(e1, n)?, &inner)?;
            raw.set(row, col, (&(&a * &(xm * &outer)) * &xt).trace());
        }
    }
    QuadraticForm::from_raw(n, raw)
}

/// Alternate Hessian assembly from the derivative of the first variation:
/// H(E, N) = Tr(A M [N,B] X^T + A X [N,B] M^T) with M = X E. Used as a
/// cross-check of the nested-commutator route.
pub fn hessian_form_quadratic_first_variation(
    prob: &QuadraticProblem,
    x: &OrthogonalPoint,
) -> Result<QuadraticForm> {
    prob.check_dim(x)?;
    let n = prob.n();
    let indices = SkewIndex::all(n);
    let d = indices.len();
    let a = prob.a.matrix();
    let b = prob.b.matrix();
    let xm = x.matrix();
    let xt = xm.transpose();
    let mut raw = Matrix::zeros(d, d);
    for (col, &nidx) in indices.iter().enumerate() {
        let bracket = commutator(&crate::matrix::skew_basis(nidx, n)?, &b)?;
        for (row, &eidx) in indices.iter().enumerate() {
            let m = xm * &crate::matrix::skew_basis(eidx, n)?;
            let term1 = (&(&a * &(&m * &bracket)) * &xt).trace();
            let term2 = (&(&a * &(xm * &bracket)) * &m.transpose()).trace();
            raw.set(row, col, term1 + term2);
        }
    }
    QuadraticForm::from_raw(n, raw)
}

/// Eigenvalue counts of a symmetric form: (index, nullity) with eigenvalues
/// below -zero_tol negative and within +-zero_tol null.
pub fn index_nullity(form: &QuadraticForm, zero_tol: f64) -> (usize, usize) {
    let eig = form.eigenvalues();
    let index = eig.iter().filter(|&&v| v < -zero_tol).count();
    let nullity = eig.iter().filter(|&&v| v.abs() <= zero_tol).count();
    (index, nullity)
}

/// Default relative nullity tolerance: zero_tol = 1e-7 x spectral radius.
pub const DEFAULT_NULLITY_REL_TOL: f64 = 1e-7;

/// [`index_nullity`] with zero_tol scaled by the spectral radius of the
/// form. A radius at roundoff scale means the exact form is zero (the whole
/// critical component is flat), so everything counts as null; this assumes
/// problem data of magnitude well above 1e-10.
pub fn index_nullity_relative(form: &QuadraticForm, rel_tol: f64) -> (usize, usize) {
    let eig = form.eigenvalues();
    let radius = eig.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if radius <= 1e3 * eig.len().max(1) as f64 * f64::EPSILON {
        return (0, eig.len());
    }
    index_nullity(form, rel_tol * radius)
}

/// Closed-form Hessian diagonal at a signed permutation matrix, in the
/// standard basis order: H(p,q) = 2 (B_pp - B_qq)(A_{s(q)s(q)} - A_{s(p)s(p)}).
/// Depends only on the permutation, not on the signs.
pub fn spm_hessian_diagonal(prob: &QuadraticProblem, sp: &SignedPermutation) -> Result<Vec<f64>> {
    if sp.n() != prob.n() {
        return Err(Error::DimensionMismatch(format!(
            "signed permutation has size {}, problem has size {}",
            sp.n(),
            prob.n()
        )));
    }
    let a = prob.a.expanded();
    let b = prob.b.expanded();
    Ok(SkewIndex::all(prob.n())
        .iter()
        .map(|idx| {
            let (p, q) = (idx.p(), idx.q());
            2.0 * (b[p - 1] - b[q - 1]) * (a[sp.sigma(q) - 1] - a[sp.sigma(p) - 1])
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Morse-Bott tangency criteria
// ---------------------------------------------------------------------------

/// The seven checkable equivalent conditions for a tangent vector M at a
/// critical point X to be tangent to the critical locus (equivalently, in
/// the Hessian kernel). All must agree for valid inputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BottCriteria {
    /// A M B X^T + A X B M^T is symmetric.
    pub symmetric_amb: bool,
    /// M B X^T + X B M^T is block diagonal along the A-multiplicities.
    pub block_diagonal_w: bool,
    /// A (M B X^T + X B M^T) equals (M B X^T + X B M^T) A.
    pub commutes_a: bool,
    /// B X^T A M + B M^T A X equals X^T A M B + M^T A X B.
    pub commutes_b: bool,
    /// B X^T A M + B M^T A X is symmetric.
    pub symmetric_bxt: bool,
    /// X^T A M + M^T A X is block diagonal along the B-multiplicities.
    pub block_diagonal_u: bool,
    /// M lies in the kernel of the Hessian form.
    pub hessian_kernel: bool,
}

impl BottCriteria {
    pub fn as_array(&self) -> [bool; 7] {
        [
            self.symmetric_amb,
            self.block_diagonal_w,
            self.commutes_a,
            self.commutes_b,
            self.symmetric_bxt,
            self.block_diagonal_u,
            self.hessian_kernel,
        ]
    }

    pub fn all_agree(&self) -> bool {
        let a = self.as_array();
        a.iter().all(|&v| v == a[0])
    }

    pub fn all_true(&self) -> bool {
        self.as_array().iter().all(|&v| v)
    }
}

/// Max-abs entry of the off-block-diagonal part of a square matrix, blocks
/// sized by `mults`.
fn off_block_diagonal_max(m: &Matrix, mults: &[usize]) -> f64 {
    let offsets: Vec<usize> = {
        let mut out = Vec::with_capacity(mults.len());
        let mut acc = 0;
        for &v in mults {
            out.push(acc);
            acc += v;
        }
        out
    };
    let block_of = |p: usize| -> usize {
        let mut i = 0;
        for (k, &off) in offsets.iter().enumerate() {
            if p >= off {
                i = k;
            }
        }
        i
    };
    let mut worst = 0.0f64;
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            if block_of(r) != block_of(c) {
                worst = worst.max(m.get(r, c).abs());
            }
        }
    }
    worst
}

/// Evaluates the seven tangency criteria at tolerance `tol`. Errors when M
/// is not tangent at X.
pub fn tangent_criteria_bott(
    prob: &QuadraticProblem,
    x: &OrthogonalPoint,
    m: &Matrix,
    tol: f64,
) -> Result<BottCriteria> {
    prob.check_dim(x)?;
    let tangency = crate::matrix::tangency_residual(x, m)?;
    if tangency > 1e-6 * (1.0 + m.max_abs()) {
        return Err(Error::NotTangent(tangency));
    }
    let a = prob.a.matrix();
    let b = prob.b.matrix();
    let xm = x.matrix();
    let xt = xm.transpose();
    let mt = m.transpose();

    // W = M B X^T + X B M^T is symmetric by construction; the criteria ask
    // whether it is block diagonal, equivalently whether it commutes with A.
    let w = &(&(m * &b) * &xt) + &(&(xm * &b) * &mt);
    let aw = &a * &w;
    let symmetric_amb = aw.symmetry_defect() <= tol;
    let block_diagonal_w = off_block_diagonal_max(&w, prob.a.mults()) <= tol;
    let commutes_a = (&aw - &(&w * &a)).max_abs() <= tol;

    // V = X^T A M + M^T A X, the B-side analogue.
    let v = &(&(&xt * &a) * m) + &(&(&mt * &a) * xm);
    let bv = &b * &v;
    let commutes_b = (&bv - &(&v * &b)).max_abs() <= tol;
    let symmetric_bxt = bv.symmetry_defect() <= tol;
    let block_diagonal_u = off_block_diagonal_max(&v, prob.b.mults()) <= tol;

    let form = hessian_form_quadratic(prob, x)?;
    let e = {
        let raw = &xt * m;
        (&raw - &raw.transpose()).scale(0.5)
    };
    let image = form.apply(&skew_coefficients(&e))?;
    let hessian_kernel = image.iter().fold(0.0f64, |acc, v| acc.max(v.abs())) <= tol;

    Ok(BottCriteria {
        symmetric_amb,
        block_diagonal_w,
        commutes_a,
        commutes_b,
        symmetric_bxt,
        block_diagonal_u,
        hessian_kernel,
    })
}

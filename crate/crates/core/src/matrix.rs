//! Dense real matrices and orthogonal-group geometry.
//!
//! Conventions: matrix entry accessors are 0-based like the rest of the Rust
//! ecosystem, while the group-theoretic data that mirrors standard notation
//! ([`SkewIndex`], permutation images, subset elements) is 1-based. The
//! standard basis of so(n) is the set of matrices E(p,q), 1 <= p < q <= n,
//! with -1 at (p,q) and +1 at (q,p), ordered lexicographically in (p,q).

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default max-abs tolerance on `X^T X - I` accepted at [`OrthogonalPoint`]
/// construction. Well above QR roundoff, well below flow drift of interest.
pub const DEFAULT_ORTHO_TOL: f64 = 1e-9;

// ---------------------------------------------------------------------------
// Matrix
// ---------------------------------------------------------------------------

/// Dense real matrix with row-major JSON encoding
/// `{"rows": r, "cols": c, "entries": [...]}`.
///
/// Empty matrices (0 rows or 0 columns) are legal values; they arise as
/// zero-width blocks in critical-point decompositions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct Matrix {
    data: DMatrix<f64>,
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl TryFrom<MatrixRepr> for Matrix {
    type Error = Error;

    fn try_from(repr: MatrixRepr) -> Result<Matrix> {
        Matrix::from_rows(repr.rows, repr.cols, repr.entries)
    }
}

impl From<Matrix> for MatrixRepr {
    fn from(m: Matrix) -> MatrixRepr {
        MatrixRepr {
            rows: m.rows(),
            cols: m.cols(),
            entries: m.entries_row_major(),
        }
    }
}

impl Matrix {
    /// Builds a matrix from row-major entries. Rejects entry-count mismatches
    /// and non-finite values.
    pub fn from_rows(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Matrix> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Matrix {
            data: DMatrix::from_row_slice(rows, cols, &entries),
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix {
            data: DMatrix::zeros(rows, cols),
        }
    }

    pub fn identity(n: usize) -> Matrix {
        Matrix {
            data: DMatrix::identity(n, n),
        }
    }

    /// Square diagonal matrix from the given diagonal values.
    pub fn diagonal(values: &[f64]) -> Matrix {
        let n = values.len();
        Matrix {
            data: DMatrix::from_fn(n, n, |i, j| if i == j { values[i] } else { 0.0 }),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Matrix {
        Matrix {
            data: DMatrix::from_fn(rows, cols, f),
        }
    }

    pub(crate) fn from_na(data: DMatrix<f64>) -> Matrix {
        Matrix { data }
    }

    pub(crate) fn na(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.rows() == 0 || self.cols() == 0
    }

    /// Entry at 0-based position (r, c).
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[(r, c)]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[(r, c)] = v;
    }

    pub fn entries_row_major(&self) -> Vec<f64> {
        let (r, c) = (self.rows(), self.cols());
        let mut out = Vec::with_capacity(r * c);
        for i in 0..r {
            for j in 0..c {
                out.push(self.data[(i, j)]);
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        Matrix {
            data: self.data.transpose(),
        }
    }

    /// Trace; panics on non-square input.
    pub fn trace(&self) -> f64 {
        assert!(self.is_square(), "trace of a non-square matrix");
        self.data.trace()
    }

    pub fn determinant(&self) -> f64 {
        assert!(self.is_square(), "determinant of a non-square matrix");
        self.data.clone().determinant()
    }

    pub fn scale(&self, c: f64) -> Matrix {
        Matrix {
            data: &self.data * c,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!(self.rows(), other.rows());
        assert_eq!(self.cols(), other.cols());
        (&self.data - &other.data)
            .iter()
            .fold(0.0, |acc: f64, v| acc.max(v.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.norm()
    }

    /// Max-abs of `M - M^T`; panics on non-square input.
    pub fn symmetry_defect(&self) -> f64 {
        assert!(self.is_square());
        let mut d = 0.0f64;
        for i in 0..self.rows() {
            for j in (i + 1)..self.cols() {
                d = d.max((self.data[(i, j)] - self.data[(j, i)]).abs());
            }
        }
        d
    }

    /// Copy of the 0-based block starting at (r0, c0) with shape (nr, nc).
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Matrix {
        Matrix {
            data: self.data.view((r0, c0), (nr, nc)).into_owned(),
        }
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Matrix) {
        self.data
            .view_mut((r0, c0), (block.rows(), block.cols()))
            .copy_from(&block.data);
    }

    /// Eigendecomposition of a symmetric matrix: eigenvalues ascending with
    /// matching eigenvector columns. The input is symmetrized first so tiny
    /// asymmetries do not leak into the factorization.
    pub fn symmetric_eigen_sorted(&self) -> (Vec<f64>, Matrix) {
        assert!(self.is_square());
        let n = self.rows();
        if n == 0 {
            return (Vec::new(), Matrix::zeros(0, 0));
        }
        let sym = (&self.data + self.data.transpose()) * 0.5;
        let eig = sym.symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
        (values, Matrix { data: vectors })
    }

    /// Orthonormal basis of the column space via thin QR (requires
    /// `cols <= rows` and full column rank for a meaningful result).
    pub fn orthonormalize_columns(&self) -> Matrix {
        if self.cols() == 0 {
            return Matrix::zeros(self.rows(), 0);
        }
        let qr = self.data.clone().qr();
        Matrix { data: qr.q() }
    }

    /// Matrix exponential (Pade scaling and squaring).
    pub fn expm(&self) -> Matrix {
        assert!(self.is_square());
        Matrix {
            data: self.data.exp(),
        }
    }
}

impl std::ops::Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        Matrix {
            data: &self.data + &rhs.data,
        }
    }
}

impl std::ops::Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        Matrix {
            data: &self.data - &rhs.data,
        }
    }
}

impl std::ops::Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        Matrix {
            data: &self.data * &rhs.data,
        }
    }
}

impl std::ops::Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        Matrix { data: -&self.data }
    }
}

// ---------------------------------------------------------------------------
// OrthogonalPoint
// ---------------------------------------------------------------------------

/// A square matrix certified orthogonal at construction:
/// `max_abs(X^T X - I) <= tol`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthogonalPoint {
    mat: Matrix,
    ortho_residual: f64,
}

impl OrthogonalPoint {
    /// Certifies with [`DEFAULT_ORTHO_TOL`].
    pub fn new(mat: Matrix) -> Result<OrthogonalPoint> {
        Self::with_tolerance(mat, DEFAULT_ORTHO_TOL)
    }

    pub fn with_tolerance(mat: Matrix, tol: f64) -> Result<OrthogonalPoint> {
        if !mat.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "orthogonal point must be square, got {}x{}",
                mat.rows(),
                mat.cols()
            )));
        }
        let residual = ortho_residual(&mat);
        if residual > tol {
            return Err(Error::NotOrthogonal { residual, tol });
        }
        Ok(OrthogonalPoint {
            mat,
            ortho_residual: residual,
        })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.mat
    }

    pub fn into_matrix(self) -> Matrix {
        self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn ortho_residual(&self) -> f64 {
        self.ortho_residual
    }

    pub fn det(&self) -> f64 {
        self.mat.determinant()
    }
}

/// `max_abs(X^T X - I)` for a square matrix.
pub fn ortho_residual(mat: &Matrix) -> f64 {
    let n = mat.rows();
    let gram = &mat.transpose() * mat;
    let mut r = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            r = r.max((gram.get(i, j) - target).abs());
        }
    }
    r
}

// ---------------------------------------------------------------------------
// Standard basis of so(n)
// ---------------------------------------------------------------------------

/// Index (p, q) with 1 <= p < q <= n of a standard basis element of so(n).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SkewIndex {
    p: usize,
    q: usize,
}

impl SkewIndex {
    pub fn new(p: usize, q: usize) -> Result<SkewIndex> {
        if p == 0 || p >= q {
            return Err(Error::InvalidArgument(format!(
                "skew index needs 1 <= p < q, got ({p}, {q})"
            )));
        }
        Ok(SkewIndex { p, q })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// All indices for so(n) in the lexicographic order (1,2), (1,3), ...,
    /// (n-1,n). This is the basis order of Hessian forms.
    pub fn all(n: usize) -> Vec<SkewIndex> {
        let mut out = Vec::with_capacity(n * (n.saturating_sub(1)) / 2);
        for p in 1..=n {
            for q in (p + 1)..=n {
                out.push(SkewIndex { p, q });
            }
        }
        out
    }

    /// Position in the lexicographic order of [`SkewIndex::all`].
    pub fn position(&self, n: usize) -> usize {
        (self.p - 1) * (2 * n - self.p) / 2 + (self.q - self.p - 1)
    }
}

/// E(p,q): -1 at (p,q), +1 at (q,p), zero elsewhere (1-based).
pub fn skew_basis(idx: SkewIndex, n: usize) -> Result<Matrix> {
    if idx.q() > n {
        return Err(Error::InvalidArgument(format!(
            "skew index ({}, {}) out of range for n = {n}",
            idx.p(),
            idx.q()
        )));
    }
    let mut m = Matrix::zeros(n, n);
    m.set(idx.p() - 1, idx.q() - 1, -1.0);
    m.set(idx.q() - 1, idx.p() - 1, 1.0);
    Ok(m)
}

/// F(p,q) = F(q,p): +1 at (p,q) and (q,p), zero elsewhere (1-based).
pub fn sym_basis(p: usize, q: usize, n: usize) -> Result<Matrix> {
    if p == q {
        return Err(Error::InvalidArgument(
            "symmetric basis element needs p != q".into(),
        ));
    }
    if p == 0 || q == 0 || p > n || q > n {
        return Err(Error::InvalidArgument(format!(
            "indices ({p}, {q}) out of range for n = {n}"
        )));
    }
    let mut m = Matrix::zeros(n, n);
    m.set(p - 1, q - 1, 1.0);
    m.set(q - 1, p - 1, 1.0);
    Ok(m)
}

// ---------------------------------------------------------------------------
// Signed permutations
// ---------------------------------------------------------------------------

/// A sign vector together with a permutation sigma of {1,...,n}; realizes the
/// matrix S P_sigma where S is the diagonal sign matrix and the p-th column
/// of P_sigma is e_{sigma(p)}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SignedPermutationRepr")]
pub struct SignedPermutation {
    signs: Vec<i8>,
    perm: Vec<usize>,
}

#[derive(Deserialize)]
struct SignedPermutationRepr {
    signs: Vec<i8>,
    perm: Vec<usize>,
}

impl TryFrom<SignedPermutationRepr> for SignedPermutation {
    type Error = Error;
    fn try_from(repr: SignedPermutationRepr) -> Result<SignedPermutation> {
        SignedPermutation::new(repr.signs, repr.perm)
    }
}

impl SignedPermutation {
    /// `perm[p-1]` is sigma(p), 1-based; `signs[u-1]` is the (u,u) entry of S.
    pub fn new(signs: Vec<i8>, perm: Vec<usize>) -> Result<SignedPermutation> {
        let n = perm.len();
        if signs.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "expected {n} signs, got {}",
                signs.len()
            )));
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidArgument("signs must be +1 or -1".into()));
        }
        let mut seen = vec![false; n];
        for &v in &perm {
            if v == 0 || v > n || seen[v - 1] {
                return Err(Error::InvalidArgument(format!(
                    "permutation images must form a bijection of 1..={n}"
                )));
            }
            seen[v - 1] = true;
        }
        Ok(SignedPermutation { signs, perm })
    }

    pub fn identity(n: usize) -> SignedPermutation {
        SignedPermutation {
            signs: vec![1; n],
            perm: (1..=n).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    /// sigma(p), 1-based.
    pub fn sigma(&self, p: usize) -> usize {
        self.perm[p - 1]
    }

    /// Diagonal entry of the sign matrix at row u, 1-based.
    pub fn sign_at(&self, u: usize) -> i8 {
        self.signs[u - 1]
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }
}

/// The matrix S P_sigma. Exactly orthogonal (integer arithmetic).
pub fn spm_matrix(sp: &SignedPermutation) -> OrthogonalPoint {
    let n = sp.n();
    let mut m = Matrix::zeros(n, n);
    for p in 1..=n {
        let u = sp.sigma(p);
        m.set(u - 1, p - 1, sp.sign_at(u) as f64);
    }
    OrthogonalPoint {
        mat: m,
        ortho_residual: 0.0,
    }
}

/// Rounds X to the nearest signed permutation matrix (per-column argmax) and
/// reports the max-abs distance. Errors when the argmax rows collide.
pub fn nearest_spm(x: &OrthogonalPoint) -> Result<(SignedPermutation, f64)> {
    let n = x.dim();
    let m = x.matrix();
    let mut perm = vec![0usize; n];
    let mut signs = vec![1i8; n];
    for p in 0..n {
        let (mut best_row, mut best_val) = (0usize, -1.0f64);
        for r in 0..n {
            let v = m.get(r, p).abs();
            if v > best_val {
                best_val = v;
                best_row = r;
            }
        }
        perm[p] = best_row + 1;
        signs[best_row] = if m.get(best_row, p) >= 0.0 { 1 } else { -1 };
    }
    let sp = SignedPermutation::new(signs, perm)
        .map_err(|_| Error::InvalidArgument("matrix is not near a signed permutation".into()))?;
    let dist = m.max_abs_diff(spm_matrix(&sp).matrix());
    Ok((sp, dist))
}

// ---------------------------------------------------------------------------
// Commutators and tangency
// ---------------------------------------------------------------------------

/// [U, V] = UV - VU.
pub fn commutator(u: &Matrix, v: &Matrix) -> Result<Matrix> {
    if !u.is_square() || u.rows() != v.rows() || !v.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "commutator needs equal square matrices, got {}x{} and {}x{}",
            u.rows(),
            u.cols(),
            v.rows(),
            v.cols()
        )));
    }
    Ok(&(u * v) - &(v * u))
}

/// True iff `max_abs(M X^T + X M^T) <= tol`, i.e. M lies in the tangent
/// space of O(n) at X.
pub fn is_tangent(x: &OrthogonalPoint, m: &Matrix, tol: f64) -> Result<bool> {
    Ok(tangency_residual(x, m)? <= tol)
}

/// `max_abs(M X^T + X M^T)`.
pub fn tangency_residual(x: &OrthogonalPoint, m: &Matrix) -> Result<f64> {
    if m.rows() != x.dim() || m.cols() != x.dim() {
        return Err(Error::DimensionMismatch(format!(
            "tangent vector must be {0}x{0}, got {1}x{2}",
            x.dim(),
            m.rows(),
            m.cols()
        )));
    }
    let xm = x.matrix();
    let s = &(m * &xm.transpose()) + &(xm * &m.transpose());
    Ok(s.max_abs())
}

// ---------------------------------------------------------------------------
// Sampling and projection
// ---------------------------------------------------------------------------

/// Gaussian matrix with iid standard normal entries.
pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> Matrix {
    let mut m = Matrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            let v: f64 = StandardNormal.sample(rng);
            m.set(i, j, v);
        }
    }
    m
}

/// Random element of so(n): antisymmetrized Gaussian.
pub fn random_skew(n: usize, rng: &mut impl Rng) -> Matrix {
    let g = gaussian_matrix(n, n, rng);
    (&g - &g.transpose()).scale(0.5)
}

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// R-diagonal sign convention. With `special`, the last column is negated
/// when needed to land in SO(n).
pub fn haar_orthogonal(n: usize, rng: &mut impl Rng, special: bool) -> OrthogonalPoint {
    if n == 0 {
        return OrthogonalPoint {
            mat: Matrix::zeros(0, 0),
            ortho_residual: 0.0,
        };
    }
    let g = gaussian_matrix(n, n, rng);
    let qr = g.na().clone().qr();
    let (q, r) = (qr.q(), qr.r());
    let mut m = Matrix::from_na(q);
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for i in 0..n {
                m.set(i, j, -m.get(i, j));
            }
        }
    }
    if special && m.determinant() < 0.0 {
        for i in 0..n {
            m.set(i, n - 1, -m.get(i, n - 1));
        }
    }
    let residual = ortho_residual(&m);
    OrthogonalPoint {
        mat: m,
        ortho_residual: residual,
    }
}

/// Seeded Haar sample; deterministic given the seed.
pub fn random_orthogonal(n: usize, seed: u64, special: bool) -> OrthogonalPoint {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    haar_orthogonal(n, &mut rng, special)
}

/// Polar factor of a nonsingular square matrix: the nearest orthogonal
/// matrix in Frobenius norm, computed from the symmetric eigendecomposition
/// of X^T X.
pub fn project_orthogonal(x: &Matrix) -> Result<OrthogonalPoint> {
    if !x.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "polar projection needs a square matrix, got {}x{}",
            x.rows(),
            x.cols()
        )));
    }
    let n = x.rows();
    if n == 0 {
        return Ok(OrthogonalPoint {
            mat: Matrix::zeros(0, 0),
            ortho_residual: 0.0,
        });
    }
    let gram = &x.transpose() * x;
    let (values, vectors) = gram.symmetric_eigen_sorted();
    let max = values[n - 1];
    if max <= 0.0 || values[0] <= 1e-14 * max {
        return Err(Error::Singular);
    }
    let inv_sqrt = Matrix::diagonal(&values.iter().map(|v| 1.0 / v.sqrt()).collect::<Vec<_>>());
    let gram_inv_sqrt = &(&vectors * &inv_sqrt) * &vectors.transpose();
    OrthogonalPoint::new(x * &gram_inv_sqrt)
}

impl std::ops::Mul<&Matrix> for &OrthogonalPoint {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.matrix() * rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_unit(p: usize, n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        m.set(p - 1, p - 1, 1.0);
        m
    }

    fn perms(n: usize) -> Vec<Vec<usize>> {
        crate::comb::permutations(n)
    }

    #[test]
    fn skew_basis_examples() {
        let e = skew_basis(SkewIndex::new(1, 2).unwrap(), 2).unwrap();
        assert_eq!(e.entries_row_major(), vec![0.0, -1.0, 1.0, 0.0]);

        let e13 = skew_basis(SkewIndex::new(1, 3).unwrap(), 3).unwrap();
        let nonzero: Vec<(usize, usize, f64)> = (0..3)
            .flat_map(|i| (0..3).map(move |j| (i, j)))
            .filter(|&(i, j)| e13.get(i, j) != 0.0)
            .map(|(i, j)| (i, j, e13.get(i, j)))
            .collect();
        assert_eq!(nonzero, vec![(0, 2, -1.0), (2, 0, 1.0)]);

        for n in 2..=5 {
            for idx in SkewIndex::all(n) {
                let e = skew_basis(idx, n).unwrap();
                assert_eq!((&e + &e.transpose()).max_abs(), 0.0);
            }
        }

        assert!(skew_basis(SkewIndex::new(2, 5).unwrap(), 4).is_err());
        assert!(SkewIndex::new(3, 2).is_err());
    }

    #[test]
    fn skew_basis_is_linearly_independent() {
        // Gram matrix of the standard basis under <M,N> = Tr(M^T N) is 2I.
        for n in 2..=5 {
            let basis: Vec<Matrix> = SkewIndex::all(n)
                .into_iter()
                .map(|idx| skew_basis(idx, n).unwrap())
                .collect();
            assert_eq!(basis.len(), n * (n - 1) / 2);
            for (a, ma) in basis.iter().enumerate() {
                for (b, mb) in basis.iter().enumerate() {
                    let g = (&ma.transpose() * mb).trace();
                    assert_eq!(g, if a == b { 2.0 } else { 0.0 });
                }
            }
        }
    }

    #[test]
    fn skew_index_positions_follow_lex_order() {
        for n in 2..=7 {
            for (k, idx) in SkewIndex::all(n).iter().enumerate() {
                assert_eq!(idx.position(n), k);
            }
        }
    }

    #[test]
    fn sym_basis_examples() {
        let f = sym_basis(1, 2, 2).unwrap();
        assert_eq!(f.entries_row_major(), vec![0.0, 1.0, 1.0, 0.0]);
        for n in 2..=4 {
            for p in 1..=n {
                for q in 1..=n {
                    if p != q {
                        assert_eq!(sym_basis(p, q, n).unwrap(), sym_basis(q, p, n).unwrap());
                    }
                }
            }
        }
        assert!(sym_basis(2, 2, 3).is_err());

        // [E(1,2), F(1,2)] = 2 D(2) - 2 D(1) in n = 2.
        let e = skew_basis(SkewIndex::new(1, 2).unwrap(), 2).unwrap();
        let f = sym_basis(1, 2, 2).unwrap();
        let c = commutator(&e, &f).unwrap();
        assert_eq!(c.entries_row_major(), vec![-2.0, 0.0, 0.0, 2.0]);
    }

    #[test]
    fn commutator_examples() {
        let u = Matrix::from_rows(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(commutator(&u, &u).unwrap().max_abs(), 0.0);

        // [E(p,q), B] = (B_pp - B_qq) F(p,q) for diagonal B.
        let b = Matrix::diagonal(&[3.0, -1.0, 7.0, 2.0]);
        for idx in SkewIndex::all(4) {
            let e = skew_basis(idx, 4).unwrap();
            let lhs = commutator(&e, &b).unwrap();
            let coeff = b.get(idx.p() - 1, idx.p() - 1) - b.get(idx.q() - 1, idx.q() - 1);
            let rhs = sym_basis(idx.p(), idx.q(), 4).unwrap().scale(coeff);
            assert!(lhs.max_abs_diff(&rhs) == 0.0);
        }

        // Disjoint index pairs commute.
        let e12 = skew_basis(SkewIndex::new(1, 2).unwrap(), 4).unwrap();
        let f34 = sym_basis(3, 4, 4).unwrap();
        assert_eq!(commutator(&e12, &f34).unwrap().max_abs(), 0.0);

        let small = Matrix::identity(3);
        assert!(commutator(&e12, &small).is_err());
    }

    #[test]
    fn skew_sym_commutator_all_cases_n5() {
        // [E(p,q), F(u,v)] case table, checked against direct multiplication.
        let n = 5;
        for idx in SkewIndex::all(n) {
            let (p, q) = (idx.p(), idx.q());
            let e = skew_basis(idx, n).unwrap();
            for u in 1..=n {
                for v in 1..=n {
                    if u == v {
                        continue;
                    }
                    let f = sym_basis(u, v, n).unwrap();
                    let direct = commutator(&e, &f).unwrap();
                    let expected = if p == u && q == v || p == v && q == u {
                        &diag_unit(q, n).scale(2.0) - &diag_unit(p, n).scale(2.0)
                    } else if p == u {
                        sym_basis(q, v, n).unwrap()
                    } else if p == v {
                        sym_basis(q, u, n).unwrap()
                    } else if q == v {
                        sym_basis(p, u, n).unwrap().scale(-1.0)
                    } else if q == u {
                        sym_basis(p, v, n).unwrap().scale(-1.0)
                    } else {
                        Matrix::zeros(n, n)
                    };
                    assert_eq!(
                        direct.max_abs_diff(&expected),
                        0.0,
                        "case (p,q)=({p},{q}) (u,v)=({u},{v})"
                    );
                }
            }
        }
    }

    #[test]
    fn spm_examples() {
        let id = SignedPermutation::identity(2);
        assert_eq!(spm_matrix(&id).matrix(), &Matrix::identity(2));

        let flipped = SignedPermutation::new(vec![-1, 1], vec![1, 2]).unwrap();
        assert_eq!(spm_matrix(&flipped).det(), -1.0);

        assert!(SignedPermutation::new(vec![1, 1], vec![1, 1]).is_err());
        assert!(SignedPermutation::new(vec![1, 0], vec![1, 2]).is_err());
    }

    #[test]
    fn spm_gram_is_exactly_identity() {
        let sp = SignedPermutation::new(vec![1, -1, -1, 1], vec![3, 1, 4, 2]).unwrap();
        let x = spm_matrix(&sp);
        let gram = &x.matrix().transpose() * x.matrix();
        assert_eq!(gram, Matrix::identity(4));
        assert_eq!(x.ortho_residual(), 0.0);
    }

    #[test]
    fn permutation_conjugation_formulas() {
        // P_sigma D(p) P_sigma^T = D(sigma(p)), all sigma in S_4.
        // P_sigma F(p,q) P_sigma^T = F(sigma(p), sigma(q)), all sigma in S_4.
        let n = 4;
        for perm in perms(n) {
            let sp = SignedPermutation::new(vec![1; n], perm.clone()).unwrap();
            let p_sigma = spm_matrix(&sp);
            let pm = p_sigma.matrix();
            for p in 1..=n {
                let lhs = &(pm * &diag_unit(p, n)) * &pm.transpose();
                assert_eq!(lhs.max_abs_diff(&diag_unit(perm[p - 1], n)), 0.0);
            }
            for p in 1..=n {
                for q in 1..=n {
                    if p == q {
                        continue;
                    }
                    let lhs = &(pm * &sym_basis(p, q, n).unwrap()) * &pm.transpose();
                    let rhs = sym_basis(perm[p - 1], perm[q - 1], n).unwrap();
                    assert_eq!(lhs.max_abs_diff(&rhs), 0.0);
                }
            }
        }
    }

    #[test]
    fn tangency_examples() {
        let id = OrthogonalPoint::new(Matrix::identity(3)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let skew = random_skew(3, &mut rng);
        assert!(is_tangent(&id, &skew, 1e-12).unwrap());

        let f = sym_basis(1, 2, 3).unwrap();
        assert!(!is_tangent(&id, &f, 1e-12).unwrap());

        let x = random_orthogonal(5, 11, false);
        for idx in SkewIndex::all(5) {
            let e = skew_basis(idx, 5).unwrap();
            let m = x.matrix() * &e;
            assert!(is_tangent(&x, &m, 1e-12).unwrap());
        }

        assert!(is_tangent(&id, &Matrix::zeros(2, 2), 1e-12).is_err());
    }

    #[test]
    fn haar_sampling_contract() {
        for n in 1..=6 {
            let x = random_orthogonal(n, 3 * n as u64, false);
            assert!(x.ortho_residual() <= 1e-12);
        }
        for seed in 0..20 {
            let x = random_orthogonal(4, seed, true);
            assert!((x.det() - 1.0).abs() <= 1e-10);
        }
        let a = random_orthogonal(5, 99, false);
        let b = random_orthogonal(5, 99, false);
        assert_eq!(a.matrix(), b.matrix());
    }

    #[test]
    fn polar_projection_examples() {
        let x = random_orthogonal(4, 5, false);
        let p = project_orthogonal(x.matrix()).unwrap();
        assert!(p.matrix().max_abs_diff(x.matrix()) <= 1e-12);

        let p = project_orthogonal(&Matrix::identity(3).scale(2.0)).unwrap();
        assert!(p.matrix().max_abs_diff(&Matrix::identity(3)) <= 1e-14);

        assert!(project_orthogonal(&Matrix::zeros(3, 3)).is_err());
    }

    #[test]
    fn polar_projection_matches_newton_oracle() {
        // Oracle: Newton iteration Y <- (Y + Y^{-T})/2 converges to the polar
        // factor; independent of the eigendecomposition route.
        let x = &Matrix::identity(4) + &sym_basis(1, 2, 4).unwrap().scale(1e-6);
        let projected = project_orthogonal(&x).unwrap();
        assert!(projected.matrix().max_abs_diff(&Matrix::identity(4)) <= 1e-9);

        let mut y = x.clone();
        for _ in 0..40 {
            let inv_t = Matrix::from_na(y.na().clone().try_inverse().unwrap()).transpose();
            y = (&y + &inv_t).scale(0.5);
        }
        assert!(projected.matrix().max_abs_diff(&y) <= 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let g = &random_orthogonal(4, 77, false).into_matrix()
            + &gaussian_matrix(4, 4, &mut rng).scale(0.05);
        let projected = project_orthogonal(&g).unwrap();
        let mut y = g.clone();
        for _ in 0..60 {
            let inv_t = Matrix::from_na(y.na().clone().try_inverse().unwrap()).transpose();
            y = (&y + &inv_t).scale(0.5);
        }
        assert!(projected.matrix().max_abs_diff(&y) <= 1e-10);
    }

    #[test]
    fn nearest_spm_recovers_perturbed_spm() {
        let sp = SignedPermutation::new(vec![-1, 1, 1, -1], vec![2, 4, 1, 3]).unwrap();
        let x = spm_matrix(&sp);
        let (found, dist) = nearest_spm(&x).unwrap();
        assert_eq!(found, sp);
        assert_eq!(dist, 0.0);
    }

    #[test]
    fn matrix_json_schema() {
        let m = Matrix::from_rows(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(text, r#"{"rows":2,"cols":3,"entries":[1.0,2.0,3.0,4.0,5.0,6.0]}"#);
        let back: Matrix = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);

        let bad: std::result::Result<Matrix, _> =
            serde_json::from_str(r#"{"rows":2,"cols":2,"entries":[1.0,2.0,3.0]}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn empty_matrices_are_legal() {
        let a = Matrix::zeros(3, 0);
        let b = Matrix::zeros(0, 2);
        let prod = &a * &b;
        assert_eq!((prod.rows(), prod.cols()), (3, 2));
        assert_eq!(prod.max_abs(), 0.0);
        let o = OrthogonalPoint::new(Matrix::zeros(0, 0)).unwrap();
        assert_eq!(o.dim(), 0);
    }

    #[test]
    fn rejects_non_finite_entries() {
        assert!(Matrix::from_rows(1, 2, vec![1.0, f64::NAN]).is_err());
        assert!(Matrix::from_rows(1, 1, vec![f64::INFINITY]).is_err());
    }
}

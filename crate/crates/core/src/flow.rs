//! Numerical gradient flow on O(n) with a Lie-Euler update: each step moves
//! along a geodesic X exp(h E) with E the skew representative of the
//! gradient, so the manifold is preserved to roundoff and monotonicity of f
//! along the flow is meaningful.
//!
//! For the corner-entry function f(X) = X_nn on SO(n), the forward and
//! backward limits of the flow have closed forms; this module implements
//! them together with the reflection identity relating the two limit maps
//! through the rightmost column.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linear::{linear_gradient, linear_value, LinearProblem};
use crate::matrix::{haar_orthogonal, project_orthogonal, Matrix, OrthogonalPoint};
use crate::quadratic::{f_gradient, f_value, QuadraticProblem};

/// Level-set membership tolerance on |X_nn| for the source/target maps.
pub const LEVEL_SET_TOL: f64 = 1e-9;

// ---------------------------------------------------------------------------
// Objectives and parameters
// ---------------------------------------------------------------------------

/// The function being flowed: a quadratic trace problem or a linear one.
#[derive(Clone, Debug)]
pub enum TraceObjective {
    Quadratic(QuadraticProblem),
    Linear(LinearProblem),
}

impl TraceObjective {
    /// f(X) = Tr(X).
    pub fn trace(n: usize) -> TraceObjective {
        TraceObjective::Linear(LinearProblem::trace(n))
    }

    /// f(X) = X_nn.
    pub fn corner_entry(n: usize) -> TraceObjective {
        TraceObjective::Linear(LinearProblem::corner_entry(n))
    }

    pub fn n(&self) -> usize {
        match self {
            TraceObjective::Quadratic(p) => p.n(),
            TraceObjective::Linear(p) => p.n(),
        }
    }

    pub fn value(&self, x: &OrthogonalPoint) -> Result<f64> {
        match self {
            TraceObjective::Quadratic(p) => f_value(p, x),
            TraceObjective::Linear(p) => linear_value(p, x),
        }
    }

    pub fn gradient(&self, x: &OrthogonalPoint) -> Result<Matrix> {
        match self {
            TraceObjective::Quadratic(p) => f_gradient(p, x),
            TraceObjective::Linear(p) => linear_gradient(p, x),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowDirection {
    Forward,
    Backward,
}

impl FlowDirection {
    fn sign(self) -> f64 {
        match self {
            FlowDirection::Forward => 1.0,
            FlowDirection::Backward => -1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct FlowParams {
    /// Initial (and maximal) step size.
    pub step: f64,
    /// Stopping threshold on the max-abs entry of the gradient.
    pub grad_tol: f64,
    pub max_steps: usize,
    /// Polar reprojection cadence, in accepted steps.
    pub reproject_every: usize,
}

impl Default for FlowParams {
    fn default() -> FlowParams {
        FlowParams {
            step: 0.1,
            grad_tol: 1e-10,
            max_steps: 1_000_000,
            reproject_every: 100,
        }
    }
}

impl FlowParams {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.step) || !positive(self.grad_tol) {
            return Err(Error::InvalidArgument(
                "flow step and gradient tolerance must be positive".into(),
            ));
        }
        if self.max_steps == 0 || self.reproject_every == 0 {
            return Err(Error::InvalidArgument(
                "max_steps and reproject_every must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Integration record. `values` holds f after every accepted step;
/// `points` holds the initial point, the state at every reprojection
/// checkpoint, and the final state.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub points: Vec<OrthogonalPoint>,
    pub values: Vec<f64>,
    pub converged: bool,
    pub limit: Option<OrthogonalPoint>,
    pub steps: usize,
    pub final_grad_norm: f64,
}

/// Integrates dX/dtau = +-grad f(X) from X0 via X <- X exp(+-h X^T grad f),
/// halving the step whenever monotonicity of f would be violated and
/// reprojecting to the manifold on a fixed cadence. Converged means the
/// max-abs gradient entry dropped below `grad_tol`; exceeding `max_steps`
/// is reported as `converged = false`, not an error.
pub fn flow(
    obj: &TraceObjective,
    x0: &OrthogonalPoint,
    params: &FlowParams,
    direction: FlowDirection,
) -> Result<Trajectory> {
    params.validate()?;
    if x0.dim() != obj.n() {
        return Err(Error::DimensionMismatch(format!(
            "start point has size {}, objective has size {}",
            x0.dim(),
            obj.n()
        )));
    }
    let sign = direction.sign();
    let mut x = x0.clone();
    let mut fx = obj.value(&x)?;
    let mut points = vec![x.clone()];
    let mut values = vec![fx];
    let mut h = params.step;
    let mut steps = 0usize;
    let mut converged = false;
    let mut final_grad_norm;

    loop {
        let g = obj.gradient(&x)?;
        final_grad_norm = g.max_abs();
        if final_grad_norm <= params.grad_tol {
            converged = true;
            break;
        }
        if steps >= params.max_steps {
            break;
        }

        let e = {
            let raw = &x.matrix().transpose() * &g;
            (&raw - &raw.transpose()).scale(0.5)
        };

        let mut htry = h;
        let mut accepted = None;
        let mut first_try = true;
        while htry >= 1e-15 {
            let cand_mat = x.matrix() * &e.scale(sign * htry).expm();
            let cand = OrthogonalPoint::with_tolerance(cand_mat, 1e-8)?;
            let fc = obj.value(&cand)?;
            if sign * (fc - fx) >= -1e-12 * (1.0 + fx.abs()) {
                accepted = Some((cand, fc));
                break;
            }
            htry *= 0.5;
            first_try = false;
        }
        let Some((cand, fc)) = accepted else {
            // Step size collapsed without progress; report non-convergence.
            break;
        };
        x = cand;
        fx = fc;
        h = if first_try {
            (h * 2.0).min(params.step)
        } else {
            htry
        };
        steps += 1;
        if steps.is_multiple_of(params.reproject_every) {
            x = project_orthogonal(x.matrix())?;
            fx = obj.value(&x)?;
            points.push(x.clone());
        }
        values.push(fx);
    }

    if points.last().map(|p| p.matrix()) != Some(x.matrix()) {
        points.push(x.clone());
    }
    let limit = converged.then(|| x.clone());
    Ok(Trajectory {
        points,
        values,
        converged,
        limit,
        steps,
        final_grad_norm,
    })
}

/// The geodesic point X exp(t E) for a skew direction E.
pub fn geodesic_point(x: &OrthogonalPoint, e: &Matrix, t: f64) -> Result<OrthogonalPoint> {
    if e.rows() != x.dim() || e.cols() != x.dim() {
        return Err(Error::DimensionMismatch(
            "geodesic direction must match the point size".into(),
        ));
    }
    OrthogonalPoint::with_tolerance(x.matrix() * &e.scale(t).expm(), 1e-6)
}

// ---------------------------------------------------------------------------
// The corner-entry function
// ---------------------------------------------------------------------------

/// Explicit gradient of f(X) = X_nn: entries -X_in X_nj / 2 with the (n,n)
/// entry (1 - X_nn^2)/2. Agrees with the general linear gradient formula.
pub fn fnn_gradient(x: &OrthogonalPoint) -> Result<Matrix> {
    let n = x.dim();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "corner-entry gradient needs n >= 2".into(),
        ));
    }
    let m = x.matrix();
    let mut g = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            g.set(i, j, -0.5 * m.get(i, n - 1) * m.get(n - 1, j));
        }
    }
    g.set(n - 1, n - 1, 0.5 * (1.0 - m.get(n - 1, n - 1).powi(2)));
    Ok(g)
}

fn reflection_diag(d: usize) -> Matrix {
    let mut vals = vec![1.0; d];
    if d > 0 {
        vals[0] = -1.0;
    }
    Matrix::diagonal(&vals)
}

/// Embeds Q in SO(n-1) into the minimum locus {X_nn = -1}: JQ + (-1) block.
pub fn min_locus_embed(q: &Matrix) -> Result<Matrix> {
    embed(q, -1.0, true)
}

/// Embeds Q in SO(n-1) into the maximum locus {X_nn = +1}: Q + (+1) block.
pub fn max_locus_embed(q: &Matrix) -> Result<Matrix> {
    embed(q, 1.0, false)
}

fn embed(q: &Matrix, corner: f64, twist: bool) -> Result<Matrix> {
    if !q.is_square() {
        return Err(Error::DimensionMismatch("embed needs a square matrix".into()));
    }
    let d = q.rows();
    let top = if twist { &reflection_diag(d) * q } else { q.clone() };
    let mut out = Matrix::zeros(d + 1, d + 1);
    out.set_block(0, 0, &top);
    out.set(d, d, corner);
    Ok(out)
}

/// Reads Q in SO(n-1) off a point of the minimum locus (X_nn near -1).
pub fn min_locus_restrict(x: &Matrix) -> Result<Matrix> {
    restrict(x, -1.0, true)
}

/// Reads Q in SO(n-1) off a point of the maximum locus (X_nn near +1).
pub fn max_locus_restrict(x: &Matrix) -> Result<Matrix> {
    restrict(x, 1.0, false)
}

fn restrict(x: &Matrix, corner: f64, twist: bool) -> Result<Matrix> {
    if !x.is_square() || x.rows() < 2 {
        return Err(Error::DimensionMismatch(
            "restriction needs a square matrix of size >= 2".into(),
        ));
    }
    let n = x.rows();
    if (x.get(n - 1, n - 1) - corner).abs() > 1e-6 {
        return Err(Error::Validation(format!(
            "corner entry {} is not near {corner}",
            x.get(n - 1, n - 1)
        )));
    }
    let top = x.block(0, 0, n - 1, n - 1);
    Ok(if twist {
        &reflection_diag(n - 1) * &top
    } else {
        top
    })
}

/// Rotation in SO(d) sending a unit vector to e_1, built by a Householder
/// reflection with the determinant fixed by negating the last row.
pub fn rotation_to_first_axis(w: &[f64]) -> Result<Matrix> {
    let d = w.len();
    let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm <= 1e-12 {
        return Err(Error::InvalidArgument(
            "cannot align the zero vector".into(),
        ));
    }
    let mut u: Vec<f64> = w.iter().map(|v| v / norm).collect();
    u[0] -= 1.0;
    let unorm2 = u.iter().map(|v| v * v).sum::<f64>();
    if unorm2 <= 1e-24 {
        return Ok(Matrix::identity(d));
    }
    if d == 1 {
        // SO(1) is trivial; only w = +1 can be aligned.
        return Err(Error::Validation(
            "no rotation of a one-point sphere moves -1 to +1".into(),
        ));
    }
    let mut g = Matrix::from_fn(d, d, |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        delta - 2.0 * u[i] * u[j] / unorm2
    });
    for j in 0..d {
        g.set(d - 1, j, -g.get(d - 1, j));
    }
    Ok(g)
}

/// Shared block extraction behind the source and target maps: rotates the
/// rightmost column to e_1, reads the blocks (V, v) and assembles
/// [-v; V] together with the aligning rotation.
fn aligned_core(x: &OrthogonalPoint) -> Result<(Matrix, Matrix)> {
    let n = x.dim();
    if n < 3 {
        return Err(Error::InvalidArgument(
            "source/target maps need n >= 3".into(),
        ));
    }
    let m = x.matrix();
    if m.get(n - 1, n - 1).abs() > LEVEL_SET_TOL {
        return Err(Error::Validation(format!(
            "corner entry {} is not on the zero level set",
            m.get(n - 1, n - 1)
        )));
    }
    let w: Vec<f64> = (0..n - 1).map(|i| m.get(i, n - 1)).collect();
    let g = rotation_to_first_axis(&w)?;
    let mut rot = Matrix::identity(n);
    rot.set_block(0, 0, &g);
    let aligned = &rot * m;
    let v = aligned.block(n - 1, 0, 1, n - 1);
    let big_v = aligned.block(1, 0, n - 2, n - 1);
    let mut core = Matrix::zeros(n - 1, n - 1);
    for j in 0..n - 1 {
        core.set(0, j, -v.get(0, j));
    }
    core.set_block(1, 0, &big_v);
    Ok((core, g))
}

/// Backward-limit (source) map of the corner-entry flow on the zero level
/// set, as an element of SO(n-1) under the minimum-locus identification:
/// J g^T J [-v; V] for the aligning rotation g.
pub fn fnn_source(x: &OrthogonalPoint) -> Result<Matrix> {
    let (core, g) = aligned_core(x)?;
    let j = reflection_diag(g.rows());
    Ok(&(&(&j * &g.transpose()) * &j) * &core)
}

/// Forward-limit (target) map of the corner-entry flow on the zero level
/// set, as an element of SO(n-1) under the maximum-locus identification:
/// g^T [-v; V].
pub fn fnn_target(x: &OrthogonalPoint) -> Result<Matrix> {
    let (core, g) = aligned_core(x)?;
    Ok(&g.transpose() * &core)
}

/// r(L) = J (I - 2 w w^T) for a unit spanning vector w of the line L;
/// well defined (sign-invariant) on lines, lands in SO(n-1).
pub fn reflection_r(w: &[f64]) -> Result<Matrix> {
    let d = w.len();
    let norm2 = w.iter().map(|v| v * v).sum::<f64>();
    if norm2 <= 1e-24 {
        return Err(Error::InvalidArgument(
            "reflection needs a nonzero vector".into(),
        ));
    }
    let refl = Matrix::from_fn(d, d, |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        delta - 2.0 * w[i] * w[j] / norm2
    });
    Ok(&reflection_diag(d) * &refl)
}

/// Max-abs difference between s(X) t(X)^{-1} and the reflection r at the
/// line spanned by the rightmost column of X (excepting the corner entry).
pub fn prop_main_deviation(x: &OrthogonalPoint) -> Result<f64> {
    let s = fnn_source(x)?;
    let t = fnn_target(x)?;
    let st_inv = &s * &t.transpose();
    let n = x.dim();
    let w: Vec<f64> = (0..n - 1).map(|i| x.matrix().get(i, n - 1)).collect();
    let r = reflection_r(&w)?;
    Ok(st_inv.max_abs_diff(&r))
}

/// True iff the source/target reflection identity holds at X within tol.
pub fn check_prop_main(x: &OrthogonalPoint, tol: f64) -> Result<bool> {
    Ok(prop_main_deviation(x)? <= tol)
}

/// Haar sample of SO(n) rotated into the zero level set {X_nn = 0} by a
/// Givens rotation of the last two rows.
pub fn sample_level_set(n: usize, rng: &mut impl Rng) -> Result<OrthogonalPoint> {
    if n < 2 {
        return Err(Error::InvalidArgument("level set needs n >= 2".into()));
    }
    let x = haar_orthogonal(n, rng, true);
    let m = x.matrix();
    let a = m.get(n - 2, n - 1);
    let b = m.get(n - 1, n - 1);
    let r = (a * a + b * b).sqrt();
    if r <= 1e-15 {
        return Ok(x);
    }
    let (c, s) = (a / r, -b / r);
    let mut rot = Matrix::identity(n);
    rot.set(n - 2, n - 2, c);
    rot.set(n - 2, n - 1, -s);
    rot.set(n - 1, n - 2, s);
    rot.set(n - 1, n - 1, c);
    OrthogonalPoint::new(&rot * m)
}

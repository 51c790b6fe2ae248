//! Finite-difference oracles for the analytic gradients and Hessians: the
//! derivative of f along the geodesic t -> X exp(tE) must match central
//! differences, and the Hessian diagonal must match a 5-point second
//! difference. These checks are independent of the formula routes used by
//! the library.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use orthomorse::comb::compositions;
use orthomorse::flow::{geodesic_point, TraceObjective};
use orthomorse::linear::{hessian_entry_linear, linear_gradient, LinearProblem};
use orthomorse::matrix::{gaussian_matrix, haar_orthogonal, skew_basis, SkewIndex};
use orthomorse::quadratic::{
    construct_critical, f_gradient, hessian_entry_quadratic, CriticalDecomposition,
    QuadraticProblem, Spectrum,
};

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

fn random_problem(n: usize, rng: &mut ChaCha8Rng) -> QuadraticProblem {
    let comps = compositions(n);
    let pick = |rng: &mut ChaCha8Rng| {
        let mults = comps[rng.random_range(0..comps.len())].clone();
        let values: Vec<f64> = (0..mults.len())
            .map(|i| i as f64 + rng.random_range(0.1..0.9))
            .collect();
        Spectrum::new(values, mults).unwrap()
    };
    QuadraticProblem::new(pick(rng), pick(rng)).unwrap()
}

fn directional(obj: &TraceObjective, x: &orthomorse::OrthogonalPoint, e: &orthomorse::Matrix, h: f64) -> f64 {
    let fp = obj.value(&geodesic_point(x, e, h).unwrap()).unwrap();
    let fm = obj.value(&geodesic_point(x, e, -h).unwrap()).unwrap();
    (fp - fm) / (2.0 * h)
}

fn second_directional(
    obj: &TraceObjective,
    x: &orthomorse::OrthogonalPoint,
    e: &orthomorse::Matrix,
    h: f64,
) -> f64 {
    let f = |t: f64| obj.value(&geodesic_point(x, e, t).unwrap()).unwrap();
    (-f(2.0 * h) + 16.0 * f(h) - 30.0 * f(0.0) + 16.0 * f(-h) - f(-2.0 * h)) / (12.0 * h * h)
}

#[test]
fn quadratic_gradient_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let h = 1e-5;
    for n in 2..=5usize {
        for _ in 0..5 {
            let prob = random_problem(n, &mut rng);
            let obj = TraceObjective::Quadratic(prob.clone());
            let x = haar_orthogonal(n, &mut rng, false);
            let g = f_gradient(&prob, &x).unwrap();
            for idx in SkewIndex::all(n) {
                let e = skew_basis(idx, n).unwrap();
                let analytic = (&g.transpose() * &(x.matrix() * &e)).trace();
                let numeric = directional(&obj, &x, &e, h);
                assert!(
                    rel_close(analytic, numeric, 1e-6),
                    "n={n} idx=({},{}) analytic={analytic} numeric={numeric}",
                    idx.p(),
                    idx.q()
                );
            }
        }
    }
}

#[test]
fn linear_gradient_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let h = 1e-5;
    for n in 2..=5usize {
        for _ in 0..5 {
            let prob = LinearProblem::new(gaussian_matrix(n, n, &mut rng)).unwrap();
            let obj = TraceObjective::Linear(prob.clone());
            let x = haar_orthogonal(n, &mut rng, false);
            let g = linear_gradient(&prob, &x).unwrap();
            for idx in SkewIndex::all(n) {
                let e = skew_basis(idx, n).unwrap();
                let analytic = (&g.transpose() * &(x.matrix() * &e)).trace();
                let numeric = directional(&obj, &x, &e, h);
                assert!(
                    rel_close(analytic, numeric, 1e-6),
                    "n={n} analytic={analytic} numeric={numeric}"
                );
            }
        }
    }
}

#[test]
fn quadratic_hessian_diagonal_matches_second_differences_at_critical_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    let h = 1e-3;
    for n in 2..=4usize {
        for _ in 0..3 {
            let prob = random_problem(n, &mut rng);
            let obj = TraceObjective::Quadratic(prob.clone());
            let margins = prob.margins();
            let fillings = orthomorse::comb::enumerate_fillings(&margins);
            let filling = fillings[rng.random_range(0..fillings.len())].clone();
            let q = margins
                .row_margins()
                .iter()
                .map(|&m| haar_orthogonal(m, &mut rng, false))
                .collect();
            let r = margins
                .col_margins()
                .iter()
                .map(|&nn| haar_orthogonal(nn, &mut rng, false))
                .collect();
            let dec = CriticalDecomposition::new(filling, q, r).unwrap();
            let x = construct_critical(&prob, &dec).unwrap();
            for idx in SkewIndex::all(n) {
                let e = skew_basis(idx, n).unwrap();
                let analytic = hessian_entry_quadratic(&prob, &x, idx, idx).unwrap();
                let numeric = second_directional(&obj, &x, &e, h);
                assert!(
                    rel_close(analytic, numeric, 1e-5),
                    "n={n} analytic={analytic} numeric={numeric}"
                );
            }
        }
    }
}

#[test]
fn quadratic_hessian_diagonal_matches_second_differences_anywhere() {
    // The diagonal pairing equals the second geodesic derivative at every X,
    // critical or not; the nested-commutator formula is exact pointwise.
    let mut rng = ChaCha8Rng::seed_from_u64(109);
    let h = 1e-3;
    for n in 2..=5usize {
        let prob = random_problem(n, &mut rng);
        let obj = TraceObjective::Quadratic(prob.clone());
        let x = haar_orthogonal(n, &mut rng, false);
        for idx in SkewIndex::all(n) {
            let e = skew_basis(idx, n).unwrap();
            let analytic = hessian_entry_quadratic(&prob, &x, idx, idx).unwrap();
            let numeric = second_directional(&obj, &x, &e, h);
            assert!(rel_close(analytic, numeric, 1e-5));
        }
    }
}

#[test]
fn linear_hessian_diagonal_matches_second_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(113);
    let h = 1e-3;
    for n in 2..=5usize {
        let prob = LinearProblem::new(gaussian_matrix(n, n, &mut rng)).unwrap();
        let obj = TraceObjective::Linear(prob.clone());
        let x = haar_orthogonal(n, &mut rng, false);
        for idx in SkewIndex::all(n) {
            let e = skew_basis(idx, n).unwrap();
            let analytic = hessian_entry_linear(&prob, &x, idx, idx).unwrap();
            let numeric = second_directional(&obj, &x, &e, h);
            assert!(
                rel_close(analytic, numeric, 1e-5),
                "n={n} analytic={analytic} numeric={numeric}"
            );
        }
    }
}

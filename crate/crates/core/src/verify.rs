//! Desk-scale property suite behind the `verify` CLI subcommand: one check
//! per documented module property, each reporting pass/fail with a short
//! diagnostic. Sample counts are sized to finish in seconds; the acceptance
//! test suite runs the larger batteries.

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::comb::{
    all_signed_permutations, choose2, component_dimension, enumerate_fillings, filling_index,
    filling_of_spm, grassmannian_betti, group_betti_c, inversion_stat, morse_counting_polynomial,
    permutations, poincare_so, so_betti, Margins, PerfectFilling,
};
use crate::error::Result;
use crate::flow::{
    flow, fnn_source, fnn_target, max_locus_restrict, min_locus_restrict, check_prop_main,
    geodesic_point, sample_level_set, FlowDirection, FlowParams, TraceObjective,
};
use crate::linear::{
    critical_of_subspace, hessian_form_linear, is_critical_linear, linear_gradient, GrassmannPoint,
    LinearProblem,
};
use crate::matrix::{
    commutator, haar_orthogonal, is_tangent, random_skew, skew_basis, spm_matrix, sym_basis,
    Matrix, OrthogonalPoint, SignedPermutation, SkewIndex,
};
use crate::polynomial::IntPolynomial;
use crate::quadratic::{
    construct_critical, critical_residual, decompose_critical, f_gradient,
    hessian_entry_quadratic, hessian_form_quadratic, index_nullity_relative,
    tangent_criteria_bott, CriticalDecomposition, QuadraticProblem, Spectrum,
    DEFAULT_NULLITY_REL_TOL,
};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PropertyCheck {
    pub module: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(
    module: &'static str,
    name: &'static str,
    body: impl FnOnce() -> std::result::Result<String, String>,
) -> PropertyCheck {
    match body() {
        Ok(detail) => PropertyCheck {
            module,
            name,
            passed: true,
            detail,
        },
        Err(detail) => PropertyCheck {
            module,
            name,
            passed: false,
            detail,
        },
    }
}

fn lift<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

/// Runs every module property at desk scale. Deterministic given the seed.
pub fn run_all(seed: u64) -> Vec<PropertyCheck> {
    let mut out = Vec::new();
    out.extend(matrix_properties(seed));
    out.extend(comb_properties());
    out.extend(quadratic_properties(seed));
    out.extend(linear_properties(seed));
    out.extend(flow_properties(seed));
    out
}

// ---------------------------------------------------------------------------
// matrix-core
// ---------------------------------------------------------------------------

fn matrix_properties(seed: u64) -> Vec<PropertyCheck> {
    vec![
        check("matrix-core", "skew basis independent and skew", || {
            for n in 2..=5usize {
                let basis: Vec<Matrix> = SkewIndex::all(n)
                    .into_iter()
                    .map(|i| skew_basis(i, n).unwrap())
                    .collect();
                if basis.len() != choose2(n) as usize {
                    return Err(format!("wrong basis count for n={n}"));
                }
                for (a, ma) in basis.iter().enumerate() {
                    if (&ma.transpose() + ma).max_abs() != 0.0 {
                        return Err(format!("basis element {a} not skew for n={n}"));
                    }
                    for (b, mb) in basis.iter().enumerate() {
                        let g = (&ma.transpose() * mb).trace();
                        let expected = if a == b { 2.0 } else { 0.0 };
                        if g != expected {
                            return Err(format!("Gram defect at ({a},{b}) for n={n}"));
                        }
                    }
                }
            }
            Ok("Gram matrix 2I for n <= 5".into())
        }),
        check("matrix-core", "skew/sym commutator case table (n=5)", || {
            let n = 5;
            let diag_unit = |p: usize| {
                let mut m = Matrix::zeros(n, n);
                m.set(p - 1, p - 1, 1.0);
                m
            };
            for idx in SkewIndex::all(n) {
                let (p, q) = (idx.p(), idx.q());
                let e = skew_basis(idx, n).unwrap();
                for u in 1..=n {
                    for v in 1..=n {
                        if u == v {
                            continue;
                        }
                        let f = sym_basis(u, v, n).unwrap();
                        let direct = lift(commutator(&e, &f))?;
                        let expected = if (p == u && q == v) || (p == v && q == u) {
                            &diag_unit(q).scale(2.0) - &diag_unit(p).scale(2.0)
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
                        if direct.max_abs_diff(&expected) != 0.0 {
                            return Err(format!("case (p,q)=({p},{q}), (u,v)=({u},{v})"));
                        }
                    }
                }
            }
            Ok("all index patterns exact".into())
        }),
        check("matrix-core", "permutation conjugation of F(p,q) (S_4)", || {
            let n = 4;
            for perm in permutations(n) {
                let sp = SignedPermutation::new(vec![1; n], perm.clone()).unwrap();
                let pm = spm_matrix(&sp);
                for p in 1..=n {
                    for q in 1..=n {
                        if p == q {
                            continue;
                        }
                        let lhs = &(pm.matrix() * &sym_basis(p, q, n).unwrap())
                            * &pm.matrix().transpose();
                        let rhs = sym_basis(perm[p - 1], perm[q - 1], n).unwrap();
                        if lhs.max_abs_diff(&rhs) != 0.0 {
                            return Err(format!("sigma={perm:?}, (p,q)=({p},{q})"));
                        }
                    }
                }
            }
            Ok("exact over S_4".into())
        }),
        check("matrix-core", "signed permutations exactly orthogonal", || {
            for sp in all_signed_permutations(3) {
                let x = spm_matrix(&sp);
                let gram = &x.matrix().transpose() * x.matrix();
                if gram != Matrix::identity(3) {
                    return Err(format!("Gram defect for {sp:?}"));
                }
            }
            Ok("X^T X = I exactly for all 48 SPMs of size 3".into())
        }),
        check("matrix-core", "translated basis is tangent", || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x11);
            for n in 2..=5usize {
                for _ in 0..10 {
                    let x = haar_orthogonal(n, &mut rng, false);
                    for idx in SkewIndex::all(n) {
                        let m = x.matrix() * &skew_basis(idx, n).unwrap();
                        if !lift(is_tangent(&x, &m, 1e-12))? {
                            return Err(format!("X E not tangent at n={n}"));
                        }
                    }
                }
            }
            Ok("X E(p,q) tangent for all sampled X, n <= 5".into())
        }),
    ]
}

// ---------------------------------------------------------------------------
// combinatorics
// ---------------------------------------------------------------------------

fn comb_properties() -> Vec<PropertyCheck> {
    vec![
        check("combinatorics", "all-ones margins give n! fillings", || {
            for n in 1..=6usize {
                let count = enumerate_fillings(&Margins::all_ones(n).unwrap()).len();
                let factorial: usize = (1..=n).product();
                if count != factorial {
                    return Err(format!("n={n}: {count} != {factorial}"));
                }
            }
            Ok("counts match n! for n <= 6".into())
        }),
        check("combinatorics", "fillings satisfy margins exactly", || {
            let margins = Margins::new(vec![3, 1, 2], vec![2, 2, 2]).unwrap();
            let fillings = enumerate_fillings(&margins);
            for f in &fillings {
                PerfectFilling::new(f.rows().to_vec(), margins.clone())
                    .map_err(|e| e.to_string())?;
            }
            Ok(format!("{} fillings revalidated", fillings.len()))
        }),
        check("combinatorics", "SPM filling index = inversion statistic", || {
            let n = 4;
            let margins = Margins::all_ones(n).unwrap();
            for perm in permutations(n) {
                let sp = SignedPermutation::new(vec![1; n], perm.clone()).unwrap();
                let f = lift(filling_of_spm(&sp, &margins))?;
                if filling_index(&f) != lift(inversion_stat(&perm, n))? {
                    return Err(format!("mismatch at sigma={perm:?}"));
                }
            }
            Ok("agree over S_4".into())
        }),
        check("combinatorics", "cardinality partition of sdeg counts", || {
            // sum_k t^{C(k,2)} sum_i c_i(k,n) t^i = sum_i c_i(n) t^i.
            for n in 1..=10usize {
                let max_deg = choose2(n) as usize;
                let mut lhs = IntPolynomial::zero();
                for k in 0..=n {
                    let coeffs: Vec<BigUint> = (0..=max_deg)
                        .map(|i| grassmannian_betti(i as i64, k, n))
                        .collect();
                    lhs = lhs.add(&IntPolynomial::from_coeffs(coeffs).shifted(choose2(k) as usize));
                }
                let rhs = IntPolynomial::from_coeffs(
                    (0..=max_deg).map(|i| group_betti_c(i as i64, n)).collect(),
                );
                if lhs != rhs {
                    return Err(format!("partition identity fails at n={n}"));
                }
            }
            Ok("identity holds for n <= 10".into())
        }),
        check("combinatorics", "Betti recursions", || {
            for n in 2..=12usize {
                for i in 0..=choose2(n) as i64 {
                    let b = so_betti(i, n);
                    let b_rec = so_betti(i, n - 1) + so_betti(i + 1 - n as i64, n - 1);
                    if b != b_rec {
                        return Err(format!("b recursion fails at n={n}, i={i}"));
                    }
                    let c = group_betti_c(i, n);
                    let c_rec = group_betti_c(i, n - 1) + group_betti_c(i + 1 - n as i64, n - 1);
                    if c != c_rec {
                        return Err(format!("c recursion fails at n={n}, i={i}"));
                    }
                }
            }
            Ok("both recursions hold for n <= 12".into())
        }),
        check("combinatorics", "doubled SO(n) Betti equals O(n) Betti", || {
            for n in 1..=12usize {
                for i in 0..=choose2(n) as i64 {
                    if so_betti(i, n) * 2u32 != group_betti_c(i, n) {
                        return Err(format!("2 b_i(n) != c_i(n) at n={n}, i={i}"));
                    }
                }
            }
            Ok("exact for n <= 12".into())
        }),
        check("combinatorics", "Morse counting dominates the Poincare polynomial", || {
            for n in 1..=5usize {
                let counting = morse_counting_polynomial(n);
                let poincare2 = poincare_so(n).add(&poincare_so(n));
                if !counting.dominates(&poincare2) {
                    return Err(format!("domination fails at n={n}"));
                }
            }
            Ok("coefficientwise domination for n <= 5".into())
        }),
    ]
}

// ---------------------------------------------------------------------------
// quadratic-trace
// ---------------------------------------------------------------------------

use crate::comb::compositions;

fn spectrum_with_mults(mults: &[usize]) -> Spectrum {
    let values: Vec<f64> = (1..=mults.len()).map(|v| v as f64).collect();
    Spectrum::new(values, mults.to_vec()).unwrap()
}

fn random_problem(n: usize, rng: &mut ChaCha8Rng) -> QuadraticProblem {
    use rand::Rng;
    let comps = compositions(n);
    let a = spectrum_with_mults(&comps[rng.random_range(0..comps.len())]);
    let b = spectrum_with_mults(&comps[rng.random_range(0..comps.len())]);
    QuadraticProblem::new(a, b).unwrap()
}

fn random_decomposition(
    prob: &QuadraticProblem,
    filling: &PerfectFilling,
    rng: &mut ChaCha8Rng,
) -> CriticalDecomposition {
    let margins = prob.margins();
    let q = margins
        .row_margins()
        .iter()
        .map(|&m| haar_orthogonal(m, rng, false))
        .collect();
    let r = margins
        .col_margins()
        .iter()
        .map(|&n| haar_orthogonal(n, rng, false))
        .collect();
    CriticalDecomposition::new(filling.clone(), q, r).unwrap()
}

fn quadratic_properties(seed: u64) -> Vec<PropertyCheck> {
    vec![
        check("quadratic-trace", "gradient is tangent", || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x21);
            let mut checked = 0;
            for n in 2..=6usize {
                let prob = random_problem(n, &mut rng);
                for _ in 0..200 {
                    let x = haar_orthogonal(n, &mut rng, false);
                    let g = lift(f_gradient(&prob, &x))?;
                    if !lift(is_tangent(&x, &g, 1e-9))? {
                        return Err(format!("gradient not tangent at n={n}"));
                    }
                    checked += 1;
                }
            }
            Ok(format!("{checked} random points, n <= 6"))
        }),
        check("quadratic-trace", "gradient matches central differences", || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x22);
            let h = 1e-5;
            for n in 2..=5usize {
                let prob = random_problem(n, &mut rng);
                let obj = TraceObjective::Quadratic(prob.clone());
                for _ in 0..5 {
                    let x = haar_orthogonal(n, &mut rng, false);
                    let g = lift(f_gradient(&prob, &x))?;
                    for idx in SkewIndex::all(n) {
                        let e = skew_basis(idx, n).unwrap();
                        let fp = lift(obj.value(&lift(geodesic_point(&x, &e, h))?))?;
                        let fm = lift(obj.value(&lift(geodesic_point(&x, &e, -h))?))?;
                        let numeric = (fp - fm) / (2.0 * h);
                        let analytic = (&g.transpose() * &(x.matrix() * &e)).trace();
                        if (numeric - analytic).abs() > 1e-6 * analytic.abs().max(1.0) {
                            return Err(format!(
                                "n={n} ({},{}) numeric={numeric} analytic={analytic}",
                                idx.p(),
                                idx.q()
                            ));
                        }
                    }
                }
            }
            Ok("1e-6 relative agreement, n <= 5".into())
        }),
        check("quadratic-trace", "constructed points are critical", || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x23);
            for n in 2..=4usize {
                for _ in 0..5 {
                    let prob = random_problem(n, &mut rng);
                    let fillings = enumerate_fillings(&prob.margins());
                    for f in fillings {
                        let dec = random_decomposition(&prob, &f, &mut rng);
                        let x = lift(construct_critical(&prob, &dec))?;
                        if lift(critical_residual(&prob, &x))? > 1e-10 {
                            return Err(format!("residual above 1e-10 at n={n}"));
                        }
                    }
                }
            }
            Ok("all constructed points pass at 1e-10".into())
        }),
        check("quadratic-trace", "construct/decompose round trip", || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x24);
            let mut count = 0;
            for n in 2..=4usize {
                for _ in 0..4 {
                    let prob = random_problem(n, &mut rng);
                    for f in enumerate_fillings(&prob.margins()) {
                        let dec = random_decomposition(&prob, &f, &mut rng);
                        let x = lift(construct_critical(&prob, &dec))?;
                        let rec = lift(decompose_critical(&prob, &x, 1e-8))?;
                        if rec.filling() != &f {
                            return Err(format!("filling changed at n={n}"));
                        }
                        let x2 = lift(construct_critical(&prob, &rec))?;
                        if x.matrix().max_abs_diff(x2.matrix()) > 1e-8 {
                            return Err(format!("round trip above 1e-8 at n={n}"));
                        }
                        count += 1;
                    }
                }
            }
            Ok(format!("{count} round trips exact to 1e-8"))
        }),
        check("quadratic-trace", "SPM index/nullity matches the filling", || {
            for n in 1..=4usize {
                for am in compositions(n) {
                    for bm in compositions(n) {
                        let prob = QuadraticProblem::new(
                            spectrum_with_mults(&am),
                            spectrum_with_mults(&bm),
                        )
                        .unwrap();
                        let margins = prob.margins();
                        let sps: Vec<SignedPermutation> = if n <= 3 {
                            all_signed_permutations(n)
                        } else {
                            permutations(n)
                                .into_iter()
                                .map(|p| SignedPermutation::new(vec![1; n], p).unwrap())
                                .collect()
                        };
                        for sp in sps {
                            let x = spm_matrix(&sp);
                            let form = lift(hessian_form_quadratic(&prob, &x))?;
                            let (index, nullity) =
                                index_nullity_relative(&form, DEFAULT_NULLITY_REL_TOL);
                            let f = lift(filling_of_spm(&sp, &margins))?;
                            if index as u64 != filling_index(&f)
                                || nullity as u64 != component_dimension(&f)
                            {
                                return Err(format!(
                                    "mismatch at n={n}, margins ({am:?},{bm:?})"
                                ));
                            }
                        }
                    }
                }
            }
            Ok("all margin pairs, n <= 4 (signs exhaustive for n <= 3)".into())
        }),
        check("quadratic-trace", "tangency criteria agree", || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x26);
            let mut pairs = 0;
            while pairs < 500 {
                use rand::Rng;
                let n = rng.random_range(2..=5usize);
                let prob = random_problem(n, &mut rng);
                let fillings = enumerate_fillings(&prob.margins());
                let f = &fillings[rng.random_range(0..fillings.len())];
                let dec = random_decomposition(&prob, f, &mut rng);
                let x = lift(construct_critical(&prob, &dec))?;
                let m = x.matrix() * &random_skew(n, &mut rng);
                let crit = lift(tangent_criteria_bott(&prob, &x, &m, 1e-7))?;
                if !crit.all_agree() {
                    return Err(format!("criteria disagree at n={n}: {crit:?}"));
                }
                pairs += 1;
            }
            Ok("500 random (X, M) pairs".into())
        }),
        check("quadratic-trace", "Hessian symmetry defects", || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x27);
            for n in 2..=4usize {
                let prob = random_problem(n, &mut rng);
                for f in enumerate_fillings(&prob.margins()) {
                    let dec = random_decomposition(&prob, &f, &mut rng);
                    let x = lift(construct_critical(&prob, &dec))?;
                    let form = lift(hessian_form_quadratic(&prob, &x))?;
                    if form.asym_defect() > 1e-9 {
                        return Err(format!("defect {} at critical point", form.asym_defect()));
                    }
                }
                // Off the critical locus the defect is the gradient pairing
                // with the bracket direction.
                let x = haar_orthogonal(n, &mut rng, false);
                let indices = SkewIndex::all(n);
                for &e in &indices {
                    for &nn in &indices {
                        let lhs = lift(hessian_entry_quadratic(&prob, &x, e, nn))?
                            - lift(hessian_entry_quadratic(&prob, &x, nn, e))?;
                        let bracket = lift(commutator(
                            &skew_basis(e, n).unwrap(),
                            &skew_basis(nn, n).unwrap(),
                        ))?;
                        let rhs = (&(&prob.a().matrix()
                            * &(x.matrix()
                                * &lift(commutator(&bracket, &prob.b().matrix()))?))
                            * &x.matrix().transpose())
                            .trace();
                        if (lhs - rhs).abs() > 1e-8 {
                            return Err(format!("defect identity fails at n={n}"));
                        }
                    }
                }
            }
            Ok("defect <= 1e-9 at critical points; pairing identity off them".into())
        }),
    ]
}

// ---------------------------------------------------------------------------
// linear-trace
// ---------------------------------------------------------------------------

fn linear_properties(seed: u64) -> Vec<PropertyCheck> {
    vec![
        check("linear-trace", "gradient is tangent", || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x31);
            for n in 2..=6usize {
                let a = crate::matrix::gaussian_matrix(n, n, &mut rng);
                let prob = LinearProblem::new(a).unwrap();
                for _ in 0..50 {
                    let x = haar_orthogonal(n, &mut rng, false);
                    let g = lift(linear_gradient(&prob, &x))?;
                    if !lift(is_tangent(&x, &g, 1e-10))? {
                        return Err(format!("gradient not tangent at n={n}"));
                    }
                }
            }
            Ok("random A and X, n <= 6".into())
        }),
        check("linear-trace", "Hessian kernel = critical component dimension", || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x32);
            for n in 2..=5usize {
                let prob = LinearProblem::trace(n);
                for k in 0..=n {
                    let q = haar_orthogonal(n, &mut rng, false);
                    let basis = q.matrix().block(0, 0, n, k);
                    let x = lift(critical_of_subspace(&GrassmannPoint::new(basis).unwrap()))?;
                    let form = lift(hessian_form_linear(&prob, &x))?;
                    let (_, nullity) = index_nullity_relative(&form, DEFAULT_NULLITY_REL_TOL);
                    if nullity != k * (n - k) {
                        return Err(format!("nullity {nullity} != {} at n={n}, k={k}", k * (n - k)));
                    }
                }
            }
            Ok("nullity k(n-k) for n <= 5, all k".into())
        }),
        check("linear-trace", "index at reflections", || {
            for n in 1..=6usize {
                let prob = LinearProblem::trace(n);
                for k in 0..=n {
                    let diag: Vec<f64> =
                        (0..n).map(|i| if i < k { -1.0 } else { 1.0 }).collect();
                    let x = OrthogonalPoint::new(Matrix::diagonal(&diag)).unwrap();
                    let form = lift(hessian_form_linear(&prob, &x))?;
                    let (index, _) = index_nullity_relative(&form, DEFAULT_NULLITY_REL_TOL);
                    if index as u64 != choose2(n - k) {
                        return Err(format!("index {index} != C({},2) at n={n}", n - k));
                    }
                }
            }
            Ok("index C(n-k,2) exact for n <= 6".into())
        }),
        check("linear-trace", "reflection through a subspace is basis independent", || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x34);
            for n in 2..=5usize {
                for k in 1..n {
                    let q = haar_orthogonal(n, &mut rng, false);
                    let basis = q.matrix().block(0, 0, n, k);
                    let rot = haar_orthogonal(k, &mut rng, false);
                    let x1 = lift(critical_of_subspace(&GrassmannPoint::new(basis.clone()).unwrap()))?;
                    let x2 = lift(critical_of_subspace(
                        &GrassmannPoint::new(&basis * rot.matrix()).unwrap(),
                    ))?;
                    if x1.matrix().max_abs_diff(x2.matrix()) > 1e-12 {
                        return Err(format!("basis dependence at n={n}, k={k}"));
                    }
                }
            }
            Ok("projector dependence only".into())
        }),
        check("linear-trace", "distinct singular spectrum makes critical points nondegenerate", || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x35);
            let params = FlowParams::default();
            for n in 2..=4usize {
                // Diagonal A with distinct positive entries has A A^T with n
                // distinct eigenvalues.
                let diag: Vec<f64> = (0..n).map(|i| 1.0 + i as f64 + 0.1).collect();
                let prob = LinearProblem::new(Matrix::diagonal(&diag)).unwrap();
                let obj = TraceObjective::Linear(prob.clone());
                for _ in 0..3 {
                    let x0 = haar_orthogonal(n, &mut rng, false);
                    let traj = lift(flow(&obj, &x0, &params, FlowDirection::Forward))?;
                    if !traj.converged {
                        return Err(format!("flow failed to converge at n={n}"));
                    }
                    let limit = traj.limit.unwrap();
                    if !lift(is_critical_linear(&prob, &limit, 1e-7))? {
                        return Err("limit not critical".into());
                    }
                    let form = lift(hessian_form_linear(&prob, &limit))?;
                    let (_, nullity) = index_nullity_relative(&form, DEFAULT_NULLITY_REL_TOL);
                    if nullity != 0 {
                        return Err(format!("nullity {nullity} at a Morse critical point"));
                    }
                }
            }
            Ok("flow-found critical points have nullity 0, n <= 4".into())
        }),
    ]
}

// ---------------------------------------------------------------------------
// flow
// ---------------------------------------------------------------------------

fn flow_properties(seed: u64) -> Vec<PropertyCheck> {
    vec![
        check("flow", "values monotone and limits critical", || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x41);
            let params = FlowParams::default();
            for n in 3..=4usize {
                let values: Vec<f64> = (1..=n).map(|v| v as f64).collect();
                let obj = TraceObjective::Quadratic(
                    QuadraticProblem::new(
                        Spectrum::distinct(values.clone()).unwrap(),
                        Spectrum::distinct(values).unwrap(),
                    )
                    .unwrap(),
                );
                for _ in 0..5 {
                    let x0 = haar_orthogonal(n, &mut rng, false);
                    let traj = lift(flow(&obj, &x0, &params, FlowDirection::Forward))?;
                    for w in traj.values.windows(2) {
                        if w[1] < w[0] - 1e-12 * (1.0 + w[0].abs()) {
                            return Err(format!("monotonicity violated at n={n}"));
                        }
                    }
                    if !traj.converged || traj.final_grad_norm > params.grad_tol {
                        return Err(format!("no convergence at n={n}"));
                    }
                    for p in &traj.points {
                        if p.ortho_residual() > 1e-8 {
                            return Err(format!("drift {} at n={n}", p.ortho_residual()));
                        }
                    }
                }
            }
            Ok("monotone, convergent, drift <= 1e-8".into())
        }),
        check("flow", "corner-entry limits match closed forms", || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x42);
            let params = FlowParams::default();
            for n in 4..=6usize {
                let obj = TraceObjective::corner_entry(n);
                for _ in 0..5 {
                    let x = lift(sample_level_set(n, &mut rng))?;
                    let fwd = lift(flow(&obj, &x, &params, FlowDirection::Forward))?;
                    let bwd = lift(flow(&obj, &x, &params, FlowDirection::Backward))?;
                    if !fwd.converged || !bwd.converged {
                        return Err(format!("no convergence at n={n}"));
                    }
                    let t_reached =
                        lift(max_locus_restrict(fwd.limit.as_ref().unwrap().matrix()))?;
                    let s_reached =
                        lift(min_locus_restrict(bwd.limit.as_ref().unwrap().matrix()))?;
                    if t_reached.max_abs_diff(&lift(fnn_target(&x))?) > 1e-5 {
                        return Err(format!("target mismatch at n={n}"));
                    }
                    if s_reached.max_abs_diff(&lift(fnn_source(&x))?) > 1e-5 {
                        return Err(format!("source mismatch at n={n}"));
                    }
                }
            }
            Ok("source/target within 1e-5 of flow limits, n <= 6".into())
        }),
        check("flow", "quadratic limits classify by filling index", || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x43);
            let params = FlowParams::default();
            for n in 3..=4usize {
                let values: Vec<f64> = (1..=n).map(|v| v as f64).collect();
                let prob = QuadraticProblem::new(
                    Spectrum::distinct(values.clone()).unwrap(),
                    Spectrum::distinct(values).unwrap(),
                )
                .unwrap();
                let obj = TraceObjective::Quadratic(prob.clone());
                for _ in 0..10 {
                    let x0 = haar_orthogonal(n, &mut rng, false);
                    let traj = lift(flow(&obj, &x0, &params, FlowDirection::Forward))?;
                    if !traj.converged {
                        return Err(format!("no convergence at n={n}"));
                    }
                    let limit = traj.limit.unwrap();
                    let dec = lift(decompose_critical(&prob, &limit, 1e-6))?;
                    let form = lift(hessian_form_quadratic(&prob, &limit))?;
                    let (index, _) = index_nullity_relative(&form, DEFAULT_NULLITY_REL_TOL);
                    if index as u64 != filling_index(dec.filling()) {
                        return Err(format!("index mismatch at n={n}"));
                    }
                }
            }
            Ok("Hessian index equals filling index at reached limits".into())
        }),
        check("flow", "reflection identity on the level set", || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x44);
            for n in 4..=6usize {
                for _ in 0..100 {
                    let x = lift(sample_level_set(n, &mut rng))?;
                    if !lift(check_prop_main(&x, 1e-9))? {
                        return Err(format!("identity fails at n={n}"));
                    }
                }
            }
            Ok("300 Monte-Carlo samples at 1e-9".into())
        }),
        check("flow", "value example: constant objective stalls nowhere", || {
            // Scalar quadratic spectra give a constant f; the start is
            // already critical, so the flow converges in zero steps.
            let prob = QuadraticProblem::new(
                Spectrum::new(vec![2.0], vec![3]).unwrap(),
                Spectrum::new(vec![1.0], vec![3]).unwrap(),
            )
            .unwrap();
            let obj = TraceObjective::Quadratic(prob);
            let x0 = crate::matrix::random_orthogonal(3, 7, false);
            let traj = lift(flow(&obj, &x0, &FlowParams::default(), FlowDirection::Forward))?;
            if !traj.converged || traj.steps != 0 {
                return Err("constant objective did not converge immediately".into());
            }
            Ok(format!("converged in {} steps", traj.steps))
        }),
    ]
}

//! Command-line interface: machine-readable access to the filling
//! enumeration, Betti-number identities, critical-locus analysis, gradient
//! flows, the level-set reflection identity, and the property suite.
//!
//! Exit codes: 0 success, 1 parse/usage errors, 2 numerical-validation
//! failures (non-orthogonal input, failed eigenvalue clustering, failed
//! property checks).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use orthomorse::comb::{
    choose2, component_dimension, enumerate_fillings, filling_index, frankel_report,
    group_betti_c, so_betti, IotaConvention, Margins, PerfectFilling,
};
use orthomorse::error::Error as CoreError;
use orthomorse::flow::{
    check_prop_main, flow, prop_main_deviation, sample_level_set, FlowDirection, FlowParams,
    TraceObjective,
};
use orthomorse::linear::{
    grassmannian_of_critical, hessian_form_linear, linear_critical_residual, linear_gradient,
    linear_value, morse_inequality_report, LinearProblem,
};
use orthomorse::matrix::{spm_matrix, Matrix, OrthogonalPoint};
use orthomorse::quadratic::{
    construct_critical, critical_residual, decompose_critical, hessian_form_quadratic,
    index_nullity_relative, spm_hessian_diagonal, QuadraticProblem, DEFAULT_NULLITY_REL_TOL,
};

#[derive(Parser)]
#[command(
    name = "orthomorse",
    version,
    about = "Critical loci, Hessian indices, gradient flows and mod-2 Betti \
             combinatorics of trace functions on orthogonal groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum IotaArg {
    /// iota(k) = C(k, 2)
    K,
    /// iota(k) = C(n - k, 2)
    Complement,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FlowKind {
    /// f(X) = X_nn on SO(n)
    Nn,
    /// f(X) = Tr(X)
    Trace,
    /// f(X) = Tr(A X B X^T) from a spectra file
    Quad,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate perfect fillings of a margin table with the Hessian index
    /// and critical-component dimension of each
    Fillings {
        /// JSON file {"m": [...], "n": [...]}
        #[arg(long)]
        margins: PathBuf,
    },
    /// Mod-2 Betti numbers of SO(n) and O(n) as CSV rows (i, b_i, c_i,
    /// frankel_ok)
    Betti {
        #[arg(long)]
        n: usize,
    },
    /// Per-degree report of the identity 2 b_i(n) = sum_k c_{i-iota(k)}(k,n)
    Frankel {
        #[arg(long)]
        n: usize,
        /// Degree-shift convention for iota(k)
        #[arg(long, value_enum, default_value_t = IotaArg::K)]
        iota: IotaArg,
    },
    /// Critical-locus analysis of the quadratic trace function
    Critical {
        /// JSON file {"a": {"values": [...], "mults": [...]}, "b": {...}}
        #[arg(long)]
        spectra: PathBuf,
        /// Analyze every signed permutation matrix (n <= 6)
        #[arg(long)]
        all_spms: bool,
        /// Decompose the orthogonal matrix in this JSON file
        #[arg(long)]
        decompose: Option<PathBuf>,
        /// Criticality tolerance for decomposition
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Linear trace-function diagnostics
    Linear {
        /// JSON matrix file for A; identity when omitted (requires --n)
        #[arg(long)]
        a: Option<PathBuf>,
        /// Problem size when --a is omitted
        #[arg(long)]
        n: Option<usize>,
        /// Analyze the orthogonal matrix in this JSON file
        #[arg(long)]
        x: Option<PathBuf>,
        /// Analyze the reflection -I_k + I_{n-k} on the Grassmann component k
        #[arg(long)]
        grassmann: Option<usize>,
        /// Include the per-degree index identity report for this size
        #[arg(long)]
        morse_report: Option<usize>,
        /// Criticality tolerance
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Batch gradient flows from Haar-random starts, with limit
    /// classification
    Flow {
        #[arg(long, value_enum)]
        f: FlowKind,
        /// Spectra file, required for --f quad
        #[arg(long)]
        spectra: Option<PathBuf>,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        /// Number of trajectories
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 0.1)]
        step: f64,
        #[arg(long, default_value_t = 1e-10)]
        grad_tol: f64,
        #[arg(long, default_value_t = 1_000_000)]
        max_steps: usize,
        #[arg(long, default_value_t = 100)]
        reproject_every: usize,
    },
    /// Monte-Carlo check of the source/target reflection identity on the
    /// zero level set of X_nn
    PropMain {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Run the full desk-scale property suite; exit 0 only if every
    /// property passes
    Verify {
        #[arg(long)]
        seed: u64,
    },
}

enum CliError {
    Usage(String),
    Numerical(String),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> CliError {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError::Usage(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> CliError {
        CliError::Usage(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    // Usage errors exit with 1; clap's default of 2 is reserved for
    // numerical-validation failures here.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("numerical validation failed: {msg}");
            ExitCode::from(2)
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn emit_json<T: Serialize>(value: &T) -> CliResult<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn load_orthogonal(path: &Path) -> CliResult<OrthogonalPoint> {
    let m: Matrix = read_json(path)?;
    Ok(OrthogonalPoint::new(m)?)
}

#[derive(serde::Deserialize)]
struct RawSpectrum {
    values: Vec<f64>,
    mults: Vec<usize>,
}

#[derive(serde::Deserialize)]
struct RawSpectra {
    a: RawSpectrum,
    b: RawSpectrum,
}

/// The ascending reordering applied to one raw spectrum: entry k is the
/// 1-based original position now sitting at sorted position k.
#[derive(Serialize)]
struct SpectraSortInfo {
    a: Vec<usize>,
    b: Vec<usize>,
}

fn sort_spectrum(raw: RawSpectrum) -> CliResult<(orthomorse::quadratic::Spectrum, Vec<usize>)> {
    if raw.values.len() != raw.mults.len() {
        return Err(CliError::Usage(
            "spectrum values and mults must have the same length".into(),
        ));
    }
    let mut order: Vec<usize> = (0..raw.values.len()).collect();
    order.sort_by(|&x, &y| raw.values[x].total_cmp(&raw.values[y]));
    let values: Vec<f64> = order.iter().map(|&k| raw.values[k]).collect();
    let mults: Vec<usize> = order.iter().map(|&k| raw.mults[k]).collect();
    let spectrum = orthomorse::quadratic::Spectrum::new(values, mults)?;
    Ok((spectrum, order.iter().map(|&k| k + 1).collect()))
}

/// Loads a spectra file, sorting each spectrum into the ascending
/// convention the index formulas assume and recording the applied
/// reordering.
fn load_problem(path: &Path) -> CliResult<(QuadraticProblem, SpectraSortInfo)> {
    let raw: RawSpectra = read_json(path)?;
    let (a, a_order) = sort_spectrum(raw.a)?;
    let (b, b_order) = sort_spectrum(raw.b)?;
    Ok((
        QuadraticProblem::new(a, b)?,
        SpectraSortInfo {
            a: a_order,
            b: b_order,
        },
    ))
}

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Fillings { margins } => cmd_fillings(&margins),
        Command::Betti { n } => cmd_betti(n),
        Command::Frankel { n, iota } => cmd_frankel(n, iota),
        Command::Critical {
            spectra,
            all_spms,
            decompose,
            tol,
        } => cmd_critical(&spectra, all_spms, decompose.as_deref(), tol),
        Command::Linear {
            a,
            n,
            x,
            grassmann,
            morse_report,
            tol,
        } => cmd_linear(a.as_deref(), n, x.as_deref(), grassmann, morse_report, tol),
        Command::Flow {
            f,
            spectra,
            n,
            seed,
            count,
            step,
            grad_tol,
            max_steps,
            reproject_every,
        } => {
            let params = FlowParams {
                step,
                grad_tol,
                max_steps,
                reproject_every,
            };
            cmd_flow(f, spectra.as_deref(), n, seed, count, params)
        }
        Command::PropMain {
            n,
            samples,
            seed,
            tol,
        } => cmd_prop_main(n, samples, seed, tol),
        Command::Verify { seed } => cmd_verify(seed),
    }
}

// ---------------------------------------------------------------------------
// fillings / betti / frankel
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct FillingRow {
    eps: Vec<Vec<usize>>,
    index: u64,
    dimension: u64,
}

fn filling_row(f: &PerfectFilling) -> FillingRow {
    FillingRow {
        eps: f.rows().to_vec(),
        index: filling_index(f),
        dimension: component_dimension(f),
    }
}

fn cmd_fillings(margins_path: &Path) -> CliResult<()> {
    let margins: Margins = read_json(margins_path)?;
    let rows: Vec<FillingRow> = enumerate_fillings(&margins).iter().map(filling_row).collect();
    emit_json(&rows)
}

fn cmd_betti(n: usize) -> CliResult<()> {
    if n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    println!("i,b_i,c_i,frankel_ok");
    for i in 0..=choose2(n) as i64 {
        let b = so_betti(i, n);
        let c = group_betti_c(i, n);
        let ok = b.clone() * 2u32 == c;
        println!("{i},{b},{c},{ok}");
    }
    Ok(())
}

fn cmd_frankel(n: usize, iota: IotaArg) -> CliResult<()> {
    if n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let convention = match iota {
        IotaArg::K => IotaConvention::KChoose2,
        IotaArg::Complement => IotaConvention::ComplementChoose2,
    };
    emit_json(&frankel_report(n, convention))
}

// ---------------------------------------------------------------------------
// critical
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct SpmDiagnostics {
    signs: Vec<i8>,
    perm: Vec<usize>,
    filling: Vec<Vec<usize>>,
    filling_index: u64,
    component_dimension: u64,
    hessian_diagonal: Vec<f64>,
    hessian_index: usize,
    hessian_nullity: usize,
    diagonal_matches_form: bool,
    index_matches_filling: bool,
    nullity_matches_dimension: bool,
}

#[derive(Serialize)]
struct DecomposeDiagnostics {
    filling: Vec<Vec<usize>>,
    filling_index: u64,
    component_dimension: u64,
    critical_residual: f64,
    roundtrip_residual: f64,
    hessian_index: usize,
    hessian_nullity: usize,
}

#[derive(Serialize)]
struct CriticalReport {
    n: usize,
    margins: Margins,
    spectra_sort: SpectraSortInfo,
    fillings: Vec<FillingRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    spms: Option<Vec<SpmDiagnostics>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    decomposition: Option<DecomposeDiagnostics>,
}

fn cmd_critical(
    spectra_path: &Path,
    all_spms: bool,
    decompose_path: Option<&Path>,
    tol: f64,
) -> CliResult<()> {
    let (prob, spectra_sort) = load_problem(spectra_path)?;
    let margins = prob.margins();
    let n = prob.n();
    let fillings: Vec<FillingRow> = enumerate_fillings(&margins).iter().map(filling_row).collect();

    let spms = if all_spms {
        if n > 6 {
            return Err(CliError::Usage(format!(
                "--all-spms enumerates 2^n n! matrices; refusing for n = {n} > 6"
            )));
        }
        let mut out = Vec::new();
        for sp in orthomorse::comb::all_signed_permutations(n) {
            let x = spm_matrix(&sp);
            let filling = orthomorse::comb::filling_of_spm(&sp, &margins)?;
            let form = hessian_form_quadratic(&prob, &x)?;
            let (hessian_index, hessian_nullity) =
                index_nullity_relative(&form, DEFAULT_NULLITY_REL_TOL);
            let diag = spm_hessian_diagonal(&prob, &sp)?;
            let diagonal_matches_form = diag
                .iter()
                .enumerate()
                .all(|(k, &v)| (form.matrix().get(k, k) - v).abs() <= 1e-10);
            let fi = filling_index(&filling);
            let cd = component_dimension(&filling);
            out.push(SpmDiagnostics {
                signs: sp.signs().to_vec(),
                perm: sp.perm().to_vec(),
                filling: filling.rows().to_vec(),
                filling_index: fi,
                component_dimension: cd,
                hessian_diagonal: diag,
                hessian_index,
                hessian_nullity,
                diagonal_matches_form,
                index_matches_filling: hessian_index as u64 == fi,
                nullity_matches_dimension: hessian_nullity as u64 == cd,
            });
        }
        Some(out)
    } else {
        None
    };

    let decomposition = match decompose_path {
        Some(path) => {
            let x = load_orthogonal(path)?;
            let dec = decompose_critical(&prob, &x, tol)?;
            let rebuilt = construct_critical(&prob, &dec)?;
            let form = hessian_form_quadratic(&prob, &x)?;
            let (hessian_index, hessian_nullity) =
                index_nullity_relative(&form, DEFAULT_NULLITY_REL_TOL);
            Some(DecomposeDiagnostics {
                filling: dec.filling().rows().to_vec(),
                filling_index: filling_index(dec.filling()),
                component_dimension: component_dimension(dec.filling()),
                critical_residual: critical_residual(&prob, &x)?,
                roundtrip_residual: x.matrix().max_abs_diff(rebuilt.matrix()),
                hessian_index,
                hessian_nullity,
            })
        }
        None => None,
    };

    emit_json(&CriticalReport {
        n,
        margins,
        spectra_sort,
        fillings,
        spms,
        decomposition,
    })
}

// ---------------------------------------------------------------------------
// linear
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct PointDiagnostics {
    value: f64,
    gradient_max_abs: f64,
    critical_residual: f64,
    critical: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    hessian_index: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hessian_nullity: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hessian_asym_defect: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    grassmann_k: Option<usize>,
}

#[derive(Serialize)]
struct LinearReport {
    n: usize,
    identity_objective: bool,
    singular_spectrum: Vec<f64>,
    morse_criterion_distinct: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    point: Option<PointDiagnostics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    morse_report: Option<orthomorse::linear::MorseReport>,
}

fn cmd_linear(
    a_path: Option<&Path>,
    n_flag: Option<usize>,
    x_path: Option<&Path>,
    grassmann: Option<usize>,
    morse_report: Option<usize>,
    tol: f64,
) -> CliResult<()> {
    let prob = match (a_path, n_flag) {
        (Some(path), _) => LinearProblem::new(read_json::<Matrix>(path)?)?,
        (None, Some(n)) => LinearProblem::trace(n),
        (None, None) => {
            return Err(CliError::Usage(
                "provide --a with a matrix file or --n for the trace function".into(),
            ))
        }
    };
    let n = prob.n();
    if let Some(flag) = n_flag {
        if flag != n {
            return Err(CliError::Usage(format!(
                "--n {flag} conflicts with the {n}x{n} matrix in --a"
            )));
        }
    }
    if x_path.is_some() && grassmann.is_some() {
        return Err(CliError::Usage(
            "--x and --grassmann are mutually exclusive".into(),
        ));
    }

    let identity_objective = prob.a().max_abs_diff(&Matrix::identity(n)) == 0.0;
    // f is Morse iff A A^T has n distinct eigenvalues.
    let singular_spectrum = (prob.a() * &prob.a().transpose()).symmetric_eigen_sorted().0;
    let scale = singular_spectrum
        .iter()
        .fold(1.0f64, |acc, v| acc.max(v.abs()));
    let morse_criterion_distinct = singular_spectrum
        .windows(2)
        .all(|w| (w[1] - w[0]).abs() > 1e-8 * scale);

    let point_of = |x: OrthogonalPoint| -> CliResult<PointDiagnostics> {
        let value = linear_value(&prob, &x)?;
        let gradient_max_abs = linear_gradient(&prob, &x)?.max_abs();
        let residual = linear_critical_residual(&prob, &x)?;
        let critical = residual <= tol;
        let (mut hessian_index, mut hessian_nullity, mut defect) = (None, None, None);
        let mut grassmann_k = None;
        if critical {
            let form = hessian_form_linear(&prob, &x)?;
            let (i, k) = index_nullity_relative(&form, DEFAULT_NULLITY_REL_TOL);
            hessian_index = Some(i);
            hessian_nullity = Some(k);
            defect = Some(form.asym_defect());
            if identity_objective {
                grassmann_k = Some(grassmannian_of_critical(&x, tol)?.k());
            }
        }
        Ok(PointDiagnostics {
            value,
            gradient_max_abs,
            critical_residual: residual,
            critical,
            hessian_index,
            hessian_nullity,
            hessian_asym_defect: defect,
            grassmann_k,
        })
    };

    let point = if let Some(path) = x_path {
        Some(point_of(load_orthogonal(path)?)?)
    } else if let Some(k) = grassmann {
        if k > n {
            return Err(CliError::Usage(format!("--grassmann {k} exceeds n = {n}")));
        }
        let diag: Vec<f64> = (0..n).map(|i| if i < k { -1.0 } else { 1.0 }).collect();
        Some(point_of(OrthogonalPoint::new(Matrix::diagonal(&diag))?)?)
    } else {
        None
    };

    let morse_report = morse_report.map(morse_inequality_report);

    emit_json(&LinearReport {
        n,
        identity_objective,
        singular_spectrum,
        morse_criterion_distinct,
        point,
        morse_report,
    })
}

// ---------------------------------------------------------------------------
// flow
// ---------------------------------------------------------------------------

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum LimitClassification {
    Corner {
        corner_entry: f64,
        locus: String,
    },
    Grassmannian {
        k: usize,
    },
    Filling {
        eps: Vec<Vec<usize>>,
        index: u64,
        dimension: u64,
    },
    Unclassified {
        reason: String,
    },
}

#[derive(Serialize)]
struct TrajectoryReport {
    trajectory: usize,
    converged: bool,
    steps: usize,
    final_grad_norm: f64,
    value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    hessian_index: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    classification: Option<LimitClassification>,
    #[serde(skip_serializing_if = "Option::is_none")]
    limit: Option<Matrix>,
}

#[derive(Serialize)]
struct FlowReport {
    objective: String,
    n: usize,
    seed: u64,
    count: usize,
    params: FlowParams,
    trajectories: Vec<TrajectoryReport>,
}

fn classify_limit(
    kind: FlowKind,
    quad: Option<&QuadraticProblem>,
    limit: &OrthogonalPoint,
) -> (Option<LimitClassification>, Option<usize>) {
    let n = limit.dim();
    match kind {
        FlowKind::Nn => {
            let corner = limit.matrix().get(n - 1, n - 1);
            let locus = if (corner - 1.0).abs() <= 1e-6 {
                "max".to_string()
            } else if (corner + 1.0).abs() <= 1e-6 {
                "min".to_string()
            } else {
                "unresolved".to_string()
            };
            (
                Some(LimitClassification::Corner {
                    corner_entry: corner,
                    locus,
                }),
                None,
            )
        }
        FlowKind::Trace => match grassmannian_of_critical(limit, 1e-6) {
            Ok(g) => (Some(LimitClassification::Grassmannian { k: g.k() }), None),
            Err(e) => (
                Some(LimitClassification::Unclassified {
                    reason: e.to_string(),
                }),
                None,
            ),
        },
        FlowKind::Quad => {
            let prob = quad.expect("quadratic objective carries its problem");
            match decompose_critical(prob, limit, 1e-6) {
                Ok(dec) => {
                    let index = hessian_form_quadratic(prob, limit)
                        .map(|form| index_nullity_relative(&form, DEFAULT_NULLITY_REL_TOL).0)
                        .ok();
                    (
                        Some(LimitClassification::Filling {
                            eps: dec.filling().rows().to_vec(),
                            index: filling_index(dec.filling()),
                            dimension: component_dimension(dec.filling()),
                        }),
                        index,
                    )
                }
                Err(e) => (
                    Some(LimitClassification::Unclassified {
                        reason: e.to_string(),
                    }),
                    None,
                ),
            }
        }
    }
}

fn cmd_flow(
    kind: FlowKind,
    spectra_path: Option<&Path>,
    n: usize,
    seed: u64,
    count: usize,
    params: FlowParams,
) -> CliResult<()> {
    use rand::SeedableRng;
    if spectra_path.is_some() && !matches!(kind, FlowKind::Quad) {
        return Err(CliError::Usage(
            "--spectra is only meaningful with --f quad".into(),
        ));
    }
    let (objective, quad, label) = match kind {
        FlowKind::Nn => (TraceObjective::corner_entry(n), None, "nn"),
        FlowKind::Trace => (TraceObjective::trace(n), None, "trace"),
        FlowKind::Quad => {
            let path = spectra_path
                .ok_or_else(|| CliError::Usage("--f quad requires --spectra".into()))?;
            let (prob, _sort) = load_problem(path)?;
            if prob.n() != n {
                return Err(CliError::Usage(format!(
                    "--n {n} conflicts with spectra of total dimension {}",
                    prob.n()
                )));
            }
            (TraceObjective::Quadratic(prob.clone()), Some(prob), "quad")
        }
    };

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut trajectories = Vec::with_capacity(count);
    for t in 0..count {
        let x0 = orthomorse::matrix::haar_orthogonal(n, &mut rng, true);
        let traj = flow(&objective, &x0, &params, FlowDirection::Forward)?;
        let value = *traj
            .values
            .last()
            .expect("trajectory has at least one value");
        let (classification, hessian_index) = match &traj.limit {
            Some(limit) => classify_limit(kind, quad.as_ref(), limit),
            None => (None, None),
        };
        trajectories.push(TrajectoryReport {
            trajectory: t,
            converged: traj.converged,
            steps: traj.steps,
            final_grad_norm: traj.final_grad_norm,
            value,
            hessian_index,
            classification,
            limit: traj.limit.map(|l| l.into_matrix()),
        });
    }

    emit_json(&FlowReport {
        objective: label.to_string(),
        n,
        seed,
        count,
        params,
        trajectories,
    })
}

// ---------------------------------------------------------------------------
// prop-main / verify
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct PropMainReport {
    n: usize,
    samples: usize,
    seed: u64,
    tol: f64,
    passes: usize,
    failures: usize,
    max_deviation: f64,
}

fn cmd_prop_main(n: usize, samples: usize, seed: u64, tol: f64) -> CliResult<()> {
    use rand::SeedableRng;
    if n < 3 {
        return Err(CliError::Usage(
            "the source/target maps need --n of at least 3".into(),
        ));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut passes = 0;
    let mut failures = 0;
    let mut max_deviation = 0.0f64;
    for _ in 0..samples {
        let x = sample_level_set(n, &mut rng)?;
        let deviation = prop_main_deviation(&x)?;
        max_deviation = max_deviation.max(deviation);
        if check_prop_main(&x, tol)? {
            passes += 1;
        } else {
            failures += 1;
        }
    }
    emit_json(&PropMainReport {
        n,
        samples,
        seed,
        tol,
        passes,
        failures,
        max_deviation,
    })?;
    if failures > 0 {
        return Err(CliError::Numerical(format!(
            "{failures} of {samples} samples violate the reflection identity"
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct VerifyReport {
    seed: u64,
    checks: Vec<orthomorse::verify::PropertyCheck>,
    passed: usize,
    failed: usize,
    all_passed: bool,
}

fn cmd_verify(seed: u64) -> CliResult<()> {
    let checks = orthomorse::verify::run_all(seed);
    let passed = checks.iter().filter(|c| c.passed).count();
    let failed = checks.len() - passed;
    for c in &checks {
        eprintln!(
            "{} [{}] {} - {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.module,
            c.name,
            c.detail
        );
    }
    emit_json(&VerifyReport {
        seed,
        checks,
        passed,
        failed,
        all_passed: failed == 0,
    })?;
    if failed > 0 {
        return Err(CliError::Numerical(format!(
            "{failed} property checks failed"
        )));
    }
    Ok(())
}

//! Uncertainty functionals, parallelism, geodesic distance on the orbit,
//! and the geometric quantum speed limit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::herm::{self, DensityOperator, Observable};
use crate::mat::{self, CMatrix};
use crate::dynamics::Trajectory;
use crate::orbit::{self, TangentVector};

/// Which orbit metric to use for distances and speed limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricChoice {
    Kks,
    Submersion,
}

impl std::fmt::Display for MetricChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MetricChoice::Kks => write!(f, "kks"),
            MetricChoice::Submersion => write!(f, "submersion"),
        }
    }
}

/// Global calibration factor λ(metric) applied to the raw metric, fixed by
/// requiring ℏ²·g(X_H, X_H) = ΔH² for parallel Hamiltonians on rank-one
/// orbits (the Mandelstam–Tamm anchor). On those orbits both calibrated
/// metrics reduce to the Fubini–Study metric.
pub fn metric_calibration(choice: MetricChoice, hbar: f64) -> f64 {
    match choice {
        MetricChoice::Kks => 1.0 / (2.0 * hbar),
        MetricChoice::Submersion => 0.5,
    }
}

/// Raw submersion metric evaluated on orbit tangents: the squared Frobenius
/// norm of the horizontal body velocity A with X = [A, D] in the eigenbasis.
fn submersion_metric_tangent(x: &TangentVector, y: &TangentVector) -> f64 {
    let xp = x.in_eigenbasis();
    let yp = y.in_eigenbasis();
    let spectrum = x.base().spectrum();
    let p = spectrum.expanded();
    let labels = mat::block_labels(spectrum.multiplicities());
    let n = p.len();
    let mut acc = 0.0;
    for j in 0..n {
        for k in 0..n {
            if labels[j] != labels[k] {
                let gap = p[j] - p[k];
                acc += (xp[(j, k)] * yp[(j, k)].conj()).re / (gap * gap);
            }
        }
    }
    acc
}

/// Calibrated squared speed of a tangent vector under the chosen metric.
pub fn calibrated_metric(
    x: &TangentVector,
    y: &TangentVector,
    choice: MetricChoice,
    hbar: f64,
) -> Result<f64> {
    let lambda = metric_calibration(choice, hbar);
    match choice {
        MetricChoice::Kks => Ok(lambda * orbit::kks_metric(x, y, hbar)?),
        MetricChoice::Submersion => Ok(lambda * submersion_metric_tangent(x, y)),
    }
}

/// Energy dispersion ΔH(ρ) = √(Tr(Ĥ²ρ) − Tr(Ĥρ)²).
pub fn uncertainty(rho: &DensityOperator, h: &Observable, hbar_unused: Option<()>) -> Result<f64> {
    let _ = hbar_unused;
    if rho.dim() != h.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), got: h.dim() });
    }
    let h2 = Observable::new(h.matrix() * h.matrix())?;
    let r = herm::expectation(rho, &h2)? - herm::expectation(rho, h)?.powi(2);
    if r < -1e-12 {
        return Err(Error::NegativeRadicand { value: r });
    }
    Ok(r.max(0.0).sqrt())
}

/// Average energy H(ρ) = Tr(Ĥρ); alias of the expectation function.
pub fn average_energy(rho: &DensityOperator, h: &Observable) -> Result<f64> {
    herm::expectation(rho, h)
}

/// Parallelism diagnosis of a Hamiltonian at ρ.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ParallelCheck {
    pub parallel: bool,
    /// Largest Frobenius norm among the diagonal eigenblocks of Ĥ.
    pub residual: f64,
}

/// Ĥ is parallel at ρ iff its lift is horizontal over every fiber point,
/// equivalently iff every diagonal block of Ĥ in the ρ-eigenbasis vanishes.
pub fn is_parallel(rho: &DensityOperator, h: &Observable, tol: f64) -> Result<ParallelCheck> {
    if rho.dim() != h.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), got: h.dim() });
    }
    let hp = rho.to_eigenbasis(h.matrix());
    let mut residual = 0.0f64;
    for range in mat::block_ranges(rho.spectrum().multiplicities()) {
        let len = range.end - range.start;
        let block = hp.view((range.start, range.start), (len, len)).into_owned();
        residual = residual.max(mat::frob_norm(&block));
    }
    Ok(ParallelCheck { parallel: residual <= tol, residual })
}

/// Both sides of ℏ²g(X_H, X_H) ≥ ΔH² under the calibrated metric.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MetricUncertaintyCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    /// |lhs − rhs| when Ĥ is parallel at ρ (the equality case), else None.
    pub parallel_gap: Option<f64>,
}

pub fn metric_uncertainty_check(
    rho: &DensityOperator,
    h: &Observable,
    choice: MetricChoice,
    hbar: f64,
) -> Result<MetricUncertaintyCheck> {
    let x = orbit::hamiltonian_tangent(rho, h, hbar)?;
    let lhs = hbar * hbar * calibrated_metric(&x, &x, choice, hbar)?;
    let delta = uncertainty(rho, h, None)?;
    let rhs = delta * delta;
    let parallel = is_parallel(rho, h, 1e-10)?;
    Ok(MetricUncertaintyCheck {
        lhs,
        rhs,
        holds: lhs >= rhs - 1e-9,
        parallel_gap: parallel.parallel.then(|| (lhs - rhs).abs()),
    })
}

/// Options for the geodesic distance search.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GeodesicOptions {
    /// Multi-start count for the fiber optimization.
    pub starts: usize,
    pub max_iters: usize,
    pub grad_tol: f64,
    /// Segment count of the discretized path (KKS route).
    pub path_points: usize,
    pub seed: u64,
}

impl Default for GeodesicOptions {
    fn default() -> Self {
        GeodesicOptions { starts: 8, max_iters: 200, grad_tol: 1e-10, path_points: 50, seed: 7 }
    }
}

/// Distance value together with a convergence flag; non-convergence is
/// reported, never hidden.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DistanceResult {
    pub value: f64,
    pub converged: bool,
}

fn check_isospectral(rho0: &DensityOperator, rho1: &DensityOperator) -> Result<()> {
    let gap = rho0.spectrum().distance(rho1.spectrum());
    if gap > 1e-9 {
        return Err(Error::NotIsospectral { gap });
    }
    Ok(())
}

/// Minimal bi-invariant length of a horizontal path over the fiber:
/// min over V ∈ U(σ) of ‖log(ψ₀†ψ₁V)‖_F, by Riemannian gradient descent on
/// U(σ) with multi-start. Returns (raw length, best log, converged).
fn fiber_min_log(
    rho0: &DensityOperator,
    rho1: &DensityOperator,
    opts: &GeodesicOptions,
) -> (f64, CMatrix, bool) {
    let sigma = rho0.spectrum().clone();
    let mult = sigma.multiplicities().to_vec();
    let n = sigma.dim();
    let w0 = rho0.eigenbasis().adjoint() * rho1.eigenbasis();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let mut best_obj = f64::INFINITY;
    let mut best_log = CMatrix::zeros(n, n);
    let mut best_converged = false;

    for start in 0..opts.starts.max(1) {
        let mut v = if start == 0 {
            mat::identity(n)
        } else {
            use rand::Rng;
            let raw = herm::random_lie_element(n, rng.gen(), rng.gen_range(0.3..2.0));
            mat::expm_skew_hermitian(&mat::block_diagonal_part(raw.matrix(), &mult))
        };
        let mut omega = mat::unitary_log(&(&w0 * &v));
        let mut obj = mat::frob_norm(&omega).powi(2);
        let mut converged = false;
        for _ in 0..opts.max_iters {
            let grad = mat::block_diagonal_part(&omega, &mult);
            let gnorm2 = mat::frob_norm(&grad).powi(2);
            if gnorm2.sqrt() < opts.grad_tol {
                converged = true;
                break;
            }
            // Armijo backtracking along V·exp(−t·grad); df/dt = −2‖grad‖²
            let mut t = 1.0;
            let mut accepted = false;
            for _ in 0..40 {
                let v_try = &v * mat::expm_skew_hermitian(&grad.map(|z| z * -t));
                let omega_try = mat::unitary_log(&(&w0 * &v_try));
                let obj_try = mat::frob_norm(&omega_try).powi(2);
                if obj_try <= obj - 0.2 * t * gnorm2 {
                    v = v_try;
                    omega = omega_try;
                    obj = obj_try;
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        if obj < best_obj {
            best_obj = obj;
            best_log = omega;
            best_converged = converged;
        } else if (obj - best_obj).abs() < 1e-12 && converged {
            best_converged = true;
        }
    }
    (best_obj.sqrt(), best_log, best_converged)
}

/// Discretized-path energy relaxation under the calibrated KKS metric.
fn kks_path_distance(
    rho0: &DensityOperator,
    rho1: &DensityOperator,
    hbar: f64,
    opts: &GeodesicOptions,
) -> Result<DistanceResult> {
    let segments = opts.path_points.max(4);
    // initial path: the horizontal geodesic found by the fiber optimization
    let (_, omega, _) = fiber_min_log(rho0, rho1, opts);
    let d = rho0.spectrum().diagonal_matrix();
    let psi0 = rho0.eigenbasis();
    let mut points: Vec<DensityOperator> = (0..=segments)
        .map(|m| {
            let s = m as f64 / segments as f64;
            let q = psi0 * mat::expm_skew_hermitian(&omega.map(|z| z * s));
            DensityOperator::from_parts(
                mat::hermitian_part(&(&q * &d * q.adjoint())),
                rho0.spectrum().expanded(),
                q,
                rho0.spectrum().clone(),
            )
        })
        .collect();
    // keep exact endpoints
    points[0] = rho0.clone();
    *points.last_mut().unwrap() = rho1.clone();

    // secant energy symmetrized over the endpoints, second-order accurate
    let seg_energy = |a: &DensityOperator, b: &DensityOperator| -> Result<f64> {
        let xa = TangentVector::project(a.clone(), &(b.matrix() - a.matrix()));
        let xb = TangentVector::project(b.clone(), &(b.matrix() - a.matrix()));
        Ok(0.5
            * (calibrated_metric(&xa, &xa, MetricChoice::Kks, hbar)?
                + calibrated_metric(&xb, &xb, MetricChoice::Kks, hbar)?))
    };
    let total_energy = |pts: &[DensityOperator]| -> Result<f64> {
        let mut e = 0.0;
        for m in 0..pts.len() - 1 {
            e += seg_energy(&pts[m], &pts[m + 1])?;
        }
        Ok(e)
    };

    // skew conjugation directions spanning the orbit tangent at a point
    let directions = |p: &DensityOperator| -> Vec<CMatrix> {
        let labels = mat::block_labels(p.spectrum().multiplicities());
        let n = p.dim();
        let mut out = Vec::new();
        for j in 0..n {
            for k in (j + 1)..n {
                if labels[j] != labels[k] {
                    let mut re = CMatrix::zeros(n, n);
                    re[(j, k)] = mat::ONE_C;
                    re[(k, j)] = -mat::ONE_C;
                    let mut im = CMatrix::zeros(n, n);
                    im[(j, k)] = mat::I_C;
                    im[(k, j)] = mat::I_C;
                    out.push(p.from_eigenbasis(&re));
                    out.push(p.from_eigenbasis(&im));
                }
            }
        }
        out
    };
    let moved = |p: &DensityOperator, dir: &CMatrix, amount: f64| -> DensityOperator {
        let q = mat::expm_skew_hermitian(&dir.map(|z| z * amount));
        DensityOperator::from_parts(
            mat::hermitian_part(&(&q * p.matrix() * q.adjoint())),
            p.eigenvalues().to_vec(),
            &q * p.eigenbasis(),
            p.spectrum().clone(),
        )
    };

    let mut energy = total_energy(&points)?;
    let mut converged = false;
    let sweeps = opts.max_iters.min(80);
    for _ in 0..sweeps {
        for m in 1..segments {
            let dirs = directions(&points[m]);
            let local = |p: &DensityOperator| -> Result<f64> {
                Ok(seg_energy(&points[m - 1], p)? + seg_energy(p, &points[m + 1])?)
            };
            let f0 = local(&points[m])?;
            // finite-difference gradient over the conjugation directions
            let eps = 1e-5;
            let mut grad = Vec::with_capacity(dirs.len());
            for dir in &dirs {
                let fp = local(&moved(&points[m], dir, eps))?;
                let fm = local(&moved(&points[m], dir, -eps))?;
                grad.push((fp - fm) / (2.0 * eps));
            }
            let gnorm2: f64 = grad.iter().map(|g| g * g).sum();
            if gnorm2 < 1e-24 {
                continue;
            }
            // line search along the negative gradient direction
            let dir_combined = dirs
                .iter()
                .zip(&grad)
                .fold(CMatrix::zeros(points[m].dim(), points[m].dim()), |acc, (d, g)| {
                    acc + d.map(|z| z * -g)
                });
            let mut t = 0.5;
            for _ in 0..25 {
                let cand = moved(&points[m], &dir_combined, t);
                if local(&cand)? < f0 - 0.1 * t * gnorm2 {
                    points[m] = cand;
                    break;
                }
                t *= 0.5;
            }
        }
        let new_energy = total_energy(&points)?;
        if energy - new_energy < 1e-12 * energy.max(1e-30) {
            converged = true;
            break;
        }
        energy = new_energy;
    }

    let mut length = 0.0;
    for m in 0..segments {
        length += seg_energy(&points[m], &points[m + 1])?.sqrt();
    }
    Ok(DistanceResult { value: length, converged })
}

/// Geodesic distance between isospectral density operators under the chosen
/// calibrated metric. Deterministic for a fixed `opts.seed`.
pub fn geodesic_distance(
    rho0: &DensityOperator,
    rho1: &DensityOperator,
    choice: MetricChoice,
    hbar: f64,
    opts: &GeodesicOptions,
) -> Result<DistanceResult> {
    if rho0.dim() != rho1.dim() {
        return Err(Error::DimensionMismatch { expected: rho0.dim(), got: rho1.dim() });
    }
    check_isospectral(rho0, rho1)?;
    match choice {
        MetricChoice::Submersion => {
            let (raw, _, converged) = fiber_min_log(rho0, rho1, opts);
            let lambda = metric_calibration(MetricChoice::Submersion, hbar);
            Ok(DistanceResult { value: lambda.sqrt() * raw, converged })
        }
        MetricChoice::Kks => {
            // when every off-block eigenvalue gap is 1 (rank-one spectra) the
            // calibrated KKS and submersion metrics agree entrywise, so the
            // exact fiber optimization applies
            let p = rho0.spectrum().expanded();
            let labels = mat::block_labels(rho0.spectrum().multiplicities());
            let unit_gaps = p.iter().enumerate().all(|(j, pj)| {
                p.iter()
                    .enumerate()
                    .all(|(k, pk)| labels[j] == labels[k] || ((pj - pk).abs() - 1.0).abs() < 1e-12)
            });
            if unit_gaps {
                let (raw, _, converged) = fiber_min_log(rho0, rho1, opts);
                let lambda = metric_calibration(MetricChoice::Submersion, hbar);
                return Ok(DistanceResult { value: lambda.sqrt() * raw, converged });
            }
            kks_path_distance(rho0, rho1, hbar, opts)
        }
    }
}

/// Trapezoidal quadrature of ∫ ΔH(ρ(t)) dt along a trajectory.
pub fn integrated_uncertainty(traj: &Trajectory) -> Result<f64> {
    let mut acc = 0.0;
    let mut prev: Option<f64> = None;
    for (i, state) in traj.states.iter().enumerate() {
        let h = traj.generator.at(traj.times[i]);
        let dh = uncertainty(state, &h, None)?;
        if let Some(p) = prev {
            acc += 0.5 * (p + dh) * (traj.times[i] - traj.times[i - 1]);
        }
        prev = Some(dh);
    }
    Ok(acc)
}

/// Both sides of the distance inequality D(ρ₀,ρ₁) ≤ (1/ℏ)∫ΔH dt.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub converged: bool,
}

pub fn distance_bound_check(traj: &Trajectory, choice: MetricChoice) -> Result<BoundCheck> {
    let dist = geodesic_distance(
        traj.initial(),
        traj.r#final(),
        choice,
        traj.hbar,
        &GeodesicOptions::default(),
    )?;
    let rhs = integrated_uncertainty(traj)? / traj.hbar;
    Ok(BoundCheck { lhs: dist.value, rhs, holds: dist.value <= rhs + 1e-6, converged: dist.converged })
}

/// Quantum-speed-limit summary of a trajectory.
///
/// The bound is reported in the internally consistent direction
/// τ ≥ ℏ·D(ρ₀,ρ₁)/ΔE, so `saturation_ratio` = bound/τ lies in [0, 1] up to
/// tolerance, with 1 attained by geodesic drives.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct QslReport {
    pub tau_actual: f64,
    /// Time-averaged energy dispersion ΔE = (1/τ)∫ΔH dt.
    pub delta_e: f64,
    pub distance: f64,
    /// ℏ·distance/ΔE, the speed-limit time.
    pub bound: f64,
    pub saturation_ratio: f64,
    pub metric_choice: MetricChoice,
    pub converged: bool,
}

pub fn qsl_report(traj: &Trajectory, choice: MetricChoice) -> Result<QslReport> {
    if traj.states.len() < 2 {
        return Err(Error::EmptyInput("trajectory needs at least two points"));
    }
    let tau = traj.duration();
    let delta_e = integrated_uncertainty(traj)? / tau;
    let endpoint_gap = traj.initial().distance_to(traj.r#final());
    if delta_e < 1e-12 {
        if endpoint_gap < 1e-10 {
            return Ok(QslReport {
                tau_actual: tau,
                delta_e,
                distance: 0.0,
                bound: 0.0,
                saturation_ratio: 0.0,
                metric_choice: choice,
                converged: true,
            });
        }
        return Err(Error::ZeroDispersion);
    }
    let dist = geodesic_distance(
        traj.initial(),
        traj.r#final(),
        choice,
        traj.hbar,
        &GeodesicOptions::default(),
    )?;
    let bound = traj.hbar * dist.value / delta_e;
    Ok(QslReport {
        tau_actual: tau,
        delta_e,
        distance: dist.value,
        bound,
        saturation_ratio: bound / tau,
        metric_choice: choice,
        converged: dist.converged,
    })
}

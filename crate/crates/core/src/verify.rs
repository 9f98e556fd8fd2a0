//! Self-check suite: runs the library's invariant families on randomized
//! inputs of a given dimension and reports one residual per family.

use serde::Serialize;

use crate::connection::{self, StabilizerElement};
use crate::dynamics::{evolve, lift_field, uniform_grid, Generator};
use crate::herm::{self, DensityOperator, Spectrum, UnitaryFrame};
use crate::mat;
use crate::orbit::{self, TangentVector};
use crate::qsl::{self, GeodesicOptions, MetricChoice};
use crate::Result;

#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
}

impl SuiteResult {
    fn new(name: &str, residual: f64, tol: f64) -> Self {
        SuiteResult { name: name.to_string(), residual, tol, pass: residual <= tol }
    }
}

fn spectrum_for(n: usize, seed: u64) -> Spectrum {
    // distinct nondegenerate values plus one degeneracy when n allows it
    let mut values: Vec<f64> = (0..n).map(|i| (n - i) as f64 + 0.1 * ((seed % 7) as f64)).collect();
    let mut mult = vec![1usize; n];
    if n >= 3 {
        values.truncate(n - 1);
        mult.truncate(n - 1);
        mult[0] = 2;
    }
    let total: f64 = values.iter().zip(&mult).map(|(v, m)| v * *m as f64).sum();
    let values: Vec<f64> = values.iter().map(|v| v / total).collect();
    Spectrum::new(&values, &mult).unwrap()
}

/// Runs every invariant family for dimension `n`, deterministic in `seed`.
pub fn run_suite(n: usize, seed: u64) -> Result<Vec<SuiteResult>> {
    let hbar = 1.0;
    let sigma = spectrum_for(n, seed);
    let psi = haar_frame(n, seed);
    let rho = DensityOperator::from_frame(&psi, &sigma)?;
    let h = herm::random_observable(n, seed.wrapping_add(11), 1.0);
    let mut out = Vec::new();

    // spectral reconstruction: eigenbasis·diag·eigenbasis† = ρ
    let rebuilt = rho.eigenbasis() * sigma.diagonal_matrix() * rho.eigenbasis().adjoint();
    out.push(SuiteResult::new(
        "spectral-reconstruction",
        mat::frob_norm(&(rebuilt - rho.matrix())),
        1e-12,
    ));

    // exponential map lands in the unitary group
    let k = herm::random_lie_element(n, seed.wrapping_add(31), 3.0);
    let u = mat::expm_skew_hermitian(k.matrix());
    out.push(SuiteResult::new("exponential-unitarity", mat::unitarity_residual(&u), 1e-12));

    // principal log round trip
    let w = haar_frame(n, seed.wrapping_add(37)).matrix().clone();
    let log_w = mat::unitary_log(&w);
    out.push(SuiteResult::new(
        "unitary-log-roundtrip",
        mat::frob_norm(&(mat::expm_skew_hermitian(&log_w) - &w)),
        1e-9,
    ));

    // symplectic form: antisymmetry and Hamiltonian pairing
    let x = orbit::random_tangent(&rho, seed.wrapping_add(41));
    let y = orbit::random_tangent(&rho, seed.wrapping_add(43));
    let anti = (orbit::omega_tangent(&x, &y, hbar)? + orbit::omega_tangent(&y, &x, hbar)?).abs();
    out.push(SuiteResult::new("symplectic-antisymmetry", anti, 1e-10));
    let (lhs, rhs) = orbit::hamiltonian_pairing_check(&rho, &h, &x, hbar)?;
    out.push(SuiteResult::new("hamiltonian-pairing", (lhs - rhs).abs(), 1e-9));

    // complex structure squares to minus identity on tangents
    let jjx = orbit::complex_structure(&orbit::complex_structure(&x));
    out.push(SuiteResult::new(
        "complex-structure-square",
        mat::frob_norm(&(jjx.matrix() + x.matrix())),
        1e-10,
    ));

    // metric positivity and J-invariance
    let gx = orbit::kks_metric(&x, &x, hbar)?;
    out.push(SuiteResult::new("metric-positivity", if gx > 1e-12 { 0.0 } else { 1.0 }, 0.5));
    let jx = orbit::complex_structure(&x);
    let jy = orbit::complex_structure(&y);
    out.push(SuiteResult::new(
        "metric-j-invariance",
        (orbit::kks_metric(&jx, &jy, hbar)? - orbit::kks_metric(&x, &y, hbar)?).abs(),
        1e-9,
    ));

    // unitary equivariance of the symplectic form
    let v = haar_frame(n, seed.wrapping_add(47));
    let rho_v = DensityOperator::from_matrix(v.matrix() * rho.matrix() * v.matrix().adjoint())?;
    let push = |t: &TangentVector| {
        TangentVector::project(rho_v.clone(), &(v.matrix() * t.matrix() * v.matrix().adjoint()))
    };
    out.push(SuiteResult::new(
        "symplectic-equivariance",
        (orbit::omega_tangent(&push(&x), &push(&y), hbar)? - orbit::omega_tangent(&x, &y, hbar)?)
            .abs(),
        1e-9,
    ));

    // evolution: isospectrality and energy conservation
    let traj = evolve(
        &rho,
        &Generator::TimeIndependent(h.clone()),
        &uniform_grid(1.0, 200),
        hbar,
        true,
    )?;
    let spec_drift = traj
        .states
        .iter()
        .map(|s| {
            s.eigenvalues()
                .iter()
                .zip(rho.eigenvalues())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max)
        })
        .fold(0.0f64, f64::max);
    out.push(SuiteResult::new("evolution-isospectrality", spec_drift, 1e-9));
    let e0 = herm::expectation(&rho, &h)?;
    let e_drift = traj
        .states
        .iter()
        .map(|s| (herm::expectation(s, &h).unwrap() - e0).abs())
        .fold(0.0f64, f64::max);
    out.push(SuiteResult::new("evolution-energy-conservation", e_drift, 1e-9));

    // momentum map vanishes on the horizontal part of any lifted field
    let lifted = lift_field(&psi, &h, hbar)?;
    let a = connection::mechanical_connection(&psi, &lifted, &sigma)?;
    let horizontal = &lifted - psi.matrix() * a.matrix();
    let probe = StabilizerElement::project(
        herm::random_lie_element(n, seed.wrapping_add(51), 1.0).matrix(),
        &sigma,
    );
    let hor = connection::momentum_map(&psi, &horizontal, &probe)?.abs();
    out.push(SuiteResult::new("momentum-horizontality", hor, 1e-10));

    // connection reproduces vertical generators
    let xi = StabilizerElement::project(herm::random_lie_element(n, seed.wrapping_add(53), 1.0).matrix(), &sigma);
    let vertical = psi.matrix() * xi.matrix();
    let reproduced = connection::mechanical_connection(&psi, &vertical, &sigma)?;
    out.push(SuiteResult::new(
        "connection-reproducing",
        mat::frob_norm(&(reproduced.matrix() - xi.matrix())),
        1e-10,
    ));

    // horizontal lift: fiber projection and horizontality along a trajectory
    let lift = connection::horizontal_lift(&traj, &psi)?;
    let mut proj_res = 0.0f64;
    for (frame, state) in lift.frames.iter().zip(&traj.states) {
        let d = sigma.diagonal_matrix();
        proj_res = proj_res.max(mat::frob_norm(
            &(frame.matrix() * d * frame.matrix().adjoint() - state.matrix()),
        ));
    }
    out.push(SuiteResult::new("lift-projects-to-trajectory", proj_res, 1e-8));
    out.push(SuiteResult::new("lift-horizontality", lift.max_horizontality_residual, 2e-3));

    // metric uncertainty relation holds on rank-one orbits
    let pure = Spectrum::new(&[1.0, 0.0], &[1, n - 1]).unwrap();
    let rho_pure = DensityOperator::from_frame(&psi, &pure)?;
    let mt = qsl::metric_uncertainty_check(&rho_pure, &h, MetricChoice::Kks, hbar)?;
    out.push(SuiteResult::new("rank-one-speed-identity", (mt.lhs - mt.rhs).abs(), 1e-8));

    // distance: symmetry and triangle inequality on a random triple
    let opts = GeodesicOptions { seed: seed.wrapping_add(3), ..GeodesicOptions::default() };
    let r1 = DensityOperator::from_frame(&haar_frame(n, seed.wrapping_add(61)), &sigma)?;
    let r2 = DensityOperator::from_frame(&haar_frame(n, seed.wrapping_add(67)), &sigma)?;
    let d01 = qsl::geodesic_distance(&rho, &r1, MetricChoice::Submersion, hbar, &opts)?.value;
    let d10 = qsl::geodesic_distance(&r1, &rho, MetricChoice::Submersion, hbar, &opts)?.value;
    let d12 = qsl::geodesic_distance(&r1, &r2, MetricChoice::Submersion, hbar, &opts)?.value;
    let d02 = qsl::geodesic_distance(&rho, &r2, MetricChoice::Submersion, hbar, &opts)?.value;
    out.push(SuiteResult::new("distance-symmetry", (d01 - d10).abs(), 1e-6));
    out.push(SuiteResult::new("distance-triangle", (d02 - d01 - d12).max(0.0), 1e-6));

    // speed-limit bound along the evolved trajectory; the bound is a
    // KKS-metric statement
    let bound = qsl::distance_bound_check(&traj, MetricChoice::Kks)?;
    out.push(SuiteResult::new(
        "distance-action-bound",
        (bound.lhs - bound.rhs).max(0.0),
        1e-6,
    ));

    Ok(out)
}

fn haar_frame(n: usize, seed: u64) -> UnitaryFrame {
    herm::haar_unitary(n, seed)
}

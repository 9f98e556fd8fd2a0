//! Task dispatch over the library.

use dsigma::connection::geometric_phase;
use dsigma::dynamics::{evolve, uniform_grid, Generator, Trajectory};
use dsigma::orbit;
use dsigma::qsl::{self, GeodesicOptions};
use dsigma::{haar_unitary, DensityOperator, Observable, UnitaryFrame};
use serde_json::json;

use crate::config::{ExperimentConfig, Task, ValidationError};
use crate::record::{RunRecord, SuiteRow};

#[derive(Debug)]
pub enum AppError {
    /// Bad configuration; exit code 1.
    Validation(String),
    /// Library failure during computation; exit code 2.
    Numerical(String),
}

impl std::fmt::Display for AppError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AppError::Validation(m) => write!(f, "validation error: {m}"),
            AppError::Numerical(m) => write!(f, "numerical error: {m}"),
        }
    }
}

impl From<ValidationError> for AppError {
    fn from(e: ValidationError) -> Self {
        AppError::Validation(e.to_string())
    }
}

fn numerical(task: &str) -> impl Fn(dsigma::Error) -> AppError + '_ {
    move |e| AppError::Numerical(format!("task {task}: {e}"))
}

pub fn run(config: &ExperimentConfig) -> Result<RunRecord, AppError> {
    let outputs;
    let mut series_columns = None;
    let mut series = None;
    let mut tolerance_report = Vec::new();

    match config.task {
        Task::Evolve => {
            let (traj, h) = evolve_from_config(config)?;
            let (cols, rows) = series_from_trajectory(&traj, &h).map_err(numerical("evolve"))?;
            outputs = json!({
                "duration": traj.duration(),
                "steps": traj.times.len() - 1,
                "energy": dsigma::herm::expectation(traj.initial(), &h).map_err(numerical("evolve"))?,
            });
            series_columns = Some(cols);
            series = Some(rows);
        }
        Task::Phase => {
            let (traj, _) = evolve_from_config(config)?;
            let psi0 = UnitaryFrame::new(traj.initial().eigenbasis().clone())
                .map_err(numerical("phase"))?;
            let hol = geometric_phase(&traj, &psi0).map_err(numerical("phase"))?;
            outputs = json!({
                "phase": hol.phase,
                "stabilizer_residual": hol.stabilizer_residual,
                "loop_gap": traj.loop_gap(),
            });
        }
        Task::Qsl => {
            let (traj, _) = evolve_from_config(config)?;
            let report = qsl::qsl_report(&traj, config.metric).map_err(numerical("qsl"))?;
            outputs = serde_json::to_value(report).expect("report serializes");
        }
        Task::Distance => {
            let rho0 = config.build_initial_state()?;
            let rho1 = rotated_state(&rho0, config.seed);
            let opts = GeodesicOptions { seed: config.seed, ..GeodesicOptions::default() };
            let d = qsl::geodesic_distance(&rho0, &rho1, config.metric, config.hbar, &opts)
                .map_err(numerical("distance"))?;
            outputs = json!({ "distance": d.value, "converged": d.converged });
        }
        Task::OrbitInfo => {
            let rho = config.build_initial_state()?;
            let sigma = rho.spectrum();
            let basis = orbit::tangent_basis(&rho);
            let gram_condition = gram_condition(&basis, config).map_err(numerical("orbit-info"))?;
            outputs = json!({
                "dimension": orbit::orbit_dimension(sigma),
                "stabilizer_blocks": sigma.multiplicities(),
                "tangent_basis_size": basis.len(),
                "gram_condition": gram_condition,
            });
        }
        Task::Verify => {
            let rows = dsigma::verify::run_suite(config.n, config.seed)
                .map_err(numerical("verify"))?;
            let failures = rows.iter().filter(|r| !r.pass).count();
            outputs = json!({ "suites": rows.len(), "failures": failures });
            tolerance_report = rows
                .into_iter()
                .map(|r| SuiteRow { name: r.name, residual: r.residual, tol: r.tol, pass: r.pass })
                .collect();
        }
    }

    Ok(RunRecord {
        config: config.clone(),
        library_version: env!("CARGO_PKG_VERSION").to_string(),
        outputs,
        series_columns,
        series,
        tolerance_report,
        wall_time_s: 0.0,
    })
}

fn evolve_from_config(config: &ExperimentConfig) -> Result<(Trajectory, Observable), AppError> {
    let rho0 = config.build_initial_state()?;
    let h = config.build_hamiltonian()?;
    let time = config.build_time()?;
    let grid = uniform_grid(time.t_final, time.steps);
    let traj = evolve(&rho0, &Generator::TimeIndependent(h.clone()), &grid, config.hbar, true)
        .map_err(numerical("evolve"))?;
    Ok((traj, h))
}

fn series_from_trajectory(
    traj: &Trajectory,
    h: &Observable,
) -> dsigma::Result<(Vec<String>, Vec<Vec<f64>>)> {
    let n = traj.initial().dim();
    let mut cols = vec!["t".to_string()];
    for i in 0..n {
        for j in 0..n {
            cols.push(format!("re_rho_{i}_{j}"));
            cols.push(format!("im_rho_{i}_{j}"));
        }
    }
    cols.push("energy".to_string());
    cols.push("delta_h".to_string());

    let mut rows = Vec::with_capacity(traj.states.len());
    for (t, state) in traj.times.iter().zip(&traj.states) {
        let mut row = vec![*t];
        for i in 0..n {
            for j in 0..n {
                row.push(state.matrix()[(i, j)].re);
                row.push(state.matrix()[(i, j)].im);
            }
        }
        row.push(dsigma::herm::expectation(state, h)?);
        row.push(qsl::uncertainty(state, h, None)?);
        rows.push(row);
    }
    Ok((cols, rows))
}

fn rotated_state(rho0: &DensityOperator, seed: u64) -> DensityOperator {
    let u = haar_unitary(rho0.dim(), seed);
    DensityOperator::from_frame(
        &UnitaryFrame::new(u.matrix() * rho0.eigenbasis()).expect("product of unitaries"),
        rho0.spectrum(),
    )
    .expect("isospectral rotation")
}

fn gram_condition(
    basis: &[dsigma::TangentVector],
    config: &ExperimentConfig,
) -> dsigma::Result<Option<f64>> {
    if basis.is_empty() {
        return Ok(None);
    }
    let d = basis.len();
    let mut gram = nalgebra::DMatrix::<f64>::zeros(d, d);
    for a in 0..d {
        for b in 0..d {
            gram[(a, b)] =
                qsl::calibrated_metric(&basis[a], &basis[b], config.metric, config.hbar)?;
        }
    }
    let eigs = gram.symmetric_eigen().eigenvalues;
    let max = eigs.iter().cloned().fold(f64::MIN, f64::max);
    let min = eigs.iter().cloned().fold(f64::MAX, f64::min);
    Ok(Some(if min > 0.0 { max / min } else { f64::INFINITY }))
}

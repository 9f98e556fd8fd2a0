//! Unitary (von Neumann) evolution on D(σ) by propagator conjugation, and
//! the gauge-invariant lift of Hamiltonian vector fields to U(n).

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::herm::{DensityOperator, Observable, UnitaryFrame};
use crate::mat::{self, CMatrix};
use crate::orbit::{self, TangentVector};

/// Generating Hamiltonian of a trajectory, constant or time-dependent.
#[derive(Clone)]
pub enum Generator {
    TimeIndependent(Observable),
    TimeDependent(Arc<dyn Fn(f64) -> Observable + Send + Sync>),
}

impl Generator {
    pub fn at(&self, t: f64) -> Observable {
        match self {
            Generator::TimeIndependent(h) => h.clone(),
            Generator::TimeDependent(f) => f(t),
        }
    }
}

impl std::fmt::Debug for Generator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Generator::TimeIndependent(_) => write!(f, "Generator::TimeIndependent"),
            Generator::TimeDependent(_) => write!(f, "Generator::TimeDependent"),
        }
    }
}

/// Time-sampled curve of density operators with the generating Hamiltonian.
///
/// Every state is obtained by conjugating ρ₀ with an accumulated unitary
/// propagator, so the spectrum is constant up to floating point. The
/// skew-Hermitian step generators K_m (with exp(K_m) the step propagator)
/// are kept for the horizontal-lift gauge integration.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityOperator>,
    pub frames: Option<Vec<UnitaryFrame>>,
    pub step_generators: Vec<CMatrix>,
    pub generator: Generator,
    pub hbar: f64,
}

impl Trajectory {
    pub fn duration(&self) -> f64 {
        self.times[self.times.len() - 1] - self.times[0]
    }

    pub fn initial(&self) -> &DensityOperator {
        &self.states[0]
    }

    pub fn r#final(&self) -> &DensityOperator {
        &self.states[self.states.len() - 1]
    }

    /// Frobenius gap between endpoint and start state.
    pub fn loop_gap(&self) -> f64 {
        self.initial().distance_to(self.r#final())
    }
}

/// Hamiltonian vector field X_Ĥ(ρ) = (1/iℏ)[Ĥ, ρ] as a tangent vector at ρ.
pub fn hamiltonian_vector_field(
    rho: &DensityOperator,
    h: &Observable,
    hbar: f64,
) -> Result<TangentVector> {
    orbit::hamiltonian_tangent(rho, h, hbar)
}

/// Integrate the von Neumann flow over the given time grid.
///
/// Each step conjugates by the unitary exp(−iĤ(t_mid)Δt/ℏ); midpoint sampling
/// makes the scheme second order for time-dependent Hamiltonians.
pub fn evolve(
    rho0: &DensityOperator,
    generator: &Generator,
    grid: &[f64],
    hbar: f64,
    with_frames: bool,
) -> Result<Trajectory> {
    if grid.len() < 2 {
        return Err(Error::EmptyInput("time grid needs at least two points"));
    }
    for i in 1..grid.len() {
        if grid[i] <= grid[i - 1] {
            return Err(Error::NonIncreasingGrid { index: i });
        }
    }
    let n = rho0.dim();
    let mut u = mat::identity(n);
    let mut states = Vec::with_capacity(grid.len());
    let mut frames = if with_frames { Some(vec![UnitaryFrame::identity(n)]) } else { None };
    let mut step_generators = Vec::with_capacity(grid.len() - 1);
    states.push(rho0.clone());

    for m in 0..grid.len() - 1 {
        let dt = grid[m + 1] - grid[m];
        let t_mid = grid[m] + 0.5 * dt;
        let h = generator.at(t_mid);
        if h.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: h.dim() });
        }
        let k = h.matrix().map(|z| z * (-mat::I_C) * dt / hbar);
        let p = mat::expm_skew_hermitian(&k);
        u = &p * u;
        let matrix = &u * rho0.matrix() * u.adjoint();
        let eigenbasis = &u * rho0.eigenbasis();
        states.push(DensityOperator::from_parts(
            mat::hermitian_part(&matrix),
            rho0.eigenvalues().to_vec(),
            eigenbasis,
            rho0.spectrum().clone(),
        ));
        if let Some(fr) = frames.as_mut() {
            fr.push(UnitaryFrame::new(u.clone())?);
        }
        step_generators.push(k);
    }

    Ok(Trajectory {
        times: grid.to_vec(),
        states,
        frames,
        step_generators,
        generator: generator.clone(),
        hbar,
    })
}

/// Uniform time grid with `steps` intervals over [0, t_final].
pub fn uniform_grid(t_final: f64, steps: usize) -> Vec<f64> {
    (0..=steps).map(|i| t_final * i as f64 / steps as f64).collect()
}

/// Gauge-invariant lift X_Ĥ(ψ) = (1/iℏ)Ĥψ of the Hamiltonian vector field.
pub fn lift_field(psi: &UnitaryFrame, h: &Observable, hbar: f64) -> Result<CMatrix> {
    if psi.dim() != h.dim() {
        return Err(Error::DimensionMismatch { expected: psi.dim(), got: h.dim() });
    }
    Ok(h.matrix().map(|z| z * (-mat::I_C) / hbar) * psi.matrix())
}

//! Principal-bundle machinery over D(σ): momentum map, locked inertia,
//! mechanical connection, horizontal lifts, holonomy, and geometric phase.


use crate::error::{Error, Result};
use crate::herm::{Spectrum, UnitaryFrame};
use crate::mat::{self, CMatrix};
use crate::dynamics::Trajectory;
use crate::orbit::TRACE_FORM_C;

/// Block-diagonal skew-Hermitian element of 𝔲(σ) = 𝔲(n₁)⊕…⊕𝔲(n_k).
#[derive(Debug, Clone)]
pub struct StabilizerElement {
    matrix: CMatrix,
    spectrum: Spectrum,
}

impl StabilizerElement {
    pub fn new(matrix: CMatrix, spectrum: &Spectrum) -> Result<Self> {
        let norm = mat::frob_norm(&matrix);
        let skew = mat::skew_hermitian_residual(&matrix);
        if skew > 1e-12 * norm.max(1.0) {
            return Err(Error::NotSkewHermitian { residual: skew / norm.max(1.0) });
        }
        let off = mat::off_block_part(&matrix, spectrum.multiplicities());
        let res = mat::frob_norm(&off);
        if res > 1e-12 * norm.max(1.0) {
            return Err(Error::NotTangent { residual: res });
        }
        Ok(StabilizerElement { matrix, spectrum: spectrum.clone() })
    }

    pub fn zero(spectrum: &Spectrum) -> Self {
        let n = spectrum.dim();
        StabilizerElement { matrix: CMatrix::zeros(n, n), spectrum: spectrum.clone() }
    }

    /// Project an arbitrary skew-Hermitian matrix onto 𝔲(σ).
    pub fn project(matrix: &CMatrix, spectrum: &Spectrum) -> Self {
        let block = mat::block_diagonal_part(&mat::skew_part(matrix), spectrum.multiplicities());
        StabilizerElement { matrix: block, spectrum: spectrum.clone() }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn norm(&self) -> f64 {
        mat::frob_norm(&self.matrix)
    }
}

fn check_tangent_at(psi: &UnitaryFrame, x: &CMatrix) -> Result<CMatrix> {
    if psi.dim() != x.nrows() {
        return Err(Error::DimensionMismatch { expected: psi.dim(), got: x.nrows() });
    }
    let body = psi.matrix().adjoint() * x;
    let res = mat::skew_hermitian_residual(&body);
    let norm = mat::frob_norm(&body);
    if res > 1e-8 * norm.max(1.0) {
        return Err(Error::NotTangent { residual: res });
    }
    Ok(body)
}

/// Positive-definite bi-invariant pairing used by the connection:
/// ⟨A, B⟩ = c·Re Tr(A†B), which equals −c·Re Tr(AB) on skew-Hermitian input.
fn pairing(a: &CMatrix, b: &CMatrix) -> f64 {
    TRACE_FORM_C * mat::trace(&(a.adjoint() * b)).re
}

/// Metric momentum map 𝕁_ψ(X)(ξ) = B(X, ξ̂(ψ)) with ξ̂(ψ) = ψξ the
/// infinitesimal right action of the stabilizer.
pub fn momentum_map(psi: &UnitaryFrame, x: &CMatrix, xi: &StabilizerElement) -> Result<f64> {
    if psi.dim() != xi.matrix().nrows() {
        return Err(Error::DimensionMismatch { expected: psi.dim(), got: xi.matrix().nrows() });
    }
    check_tangent_at(psi, x)?;
    let xi_hat = psi.matrix() * xi.matrix();
    Ok(pairing(x, &xi_hat))
}

/// Locked inertia tensor 𝕀_ψ(ξ, η) = B(ξ̂(ψ), η̂(ψ)); by bi-invariance this
/// equals B(ξ, η) and is independent of ψ.
pub fn locked_inertia(
    psi: &UnitaryFrame,
    xi: &StabilizerElement,
    eta: &StabilizerElement,
) -> Result<f64> {
    let n = psi.dim();
    if xi.matrix().nrows() != n || eta.matrix().nrows() != n {
        return Err(Error::DimensionMismatch { expected: n, got: xi.matrix().nrows() });
    }
    let xi_hat = psi.matrix() * xi.matrix();
    let eta_hat = psi.matrix() * eta.matrix();
    Ok(pairing(&xi_hat, &eta_hat))
}

/// Mechanical connection 𝒜_ψ = 𝕀⁻¹𝕁: for the bi-invariant pairing this is the
/// block-diagonal part of ψ†X.
pub fn mechanical_connection(
    psi: &UnitaryFrame,
    x: &CMatrix,
    sigma: &Spectrum,
) -> Result<StabilizerElement> {
    let body = check_tangent_at(psi, x)?;
    Ok(StabilizerElement::project(&body, sigma))
}

/// Horizontal lift of a trajectory through ψ₀.
#[derive(Debug, Clone)]
pub struct HorizontalLift {
    /// Lifted frames ψ(t_m), one per grid point.
    pub frames: Vec<UnitaryFrame>,
    /// Gauge corrections V(t_m) ∈ U(σ), one per grid point.
    pub gauge: Vec<CMatrix>,
    /// max over grid midpoints of ‖𝒜(ψ̇)‖ with a finite-difference ψ̇.
    pub max_horizontality_residual: f64,
    /// max over grid of ‖π(ψ(t)) − ρ(t)‖_F.
    pub max_projection_residual: f64,
}

/// Integrate the gauge equation V̇ = −𝒜(·)V along a trajectory with frames,
/// producing frames ψ(t) = U(t)ψ₀V(t) with horizontal velocity.
///
/// Each step uses the stabilizer exponential of the connection evaluated at
/// the step midpoint, so V stays exactly in U(σ).
pub fn horizontal_lift(traj: &Trajectory, psi0: &UnitaryFrame) -> Result<HorizontalLift> {
    let frames = traj.frames.as_ref().ok_or(Error::MissingFrames)?;
    let rho0 = traj.initial();
    let sigma = rho0.spectrum().clone();
    let n = sigma.dim();
    if psi0.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: psi0.dim() });
    }
    let d = sigma.diagonal_matrix();
    let projected = psi0.matrix() * &d * psi0.matrix().adjoint();
    let fiber_res = mat::frob_norm(&(projected - rho0.matrix()));
    if fiber_res > 1e-8 {
        return Err(Error::FiberMismatch { residual: fiber_res });
    }

    let mult = sigma.multiplicities().to_vec();
    let steps = traj.step_generators.len();
    let mut v = mat::identity(n);
    let mut gauge = vec![v.clone()];
    let mut lifted = vec![UnitaryFrame::new(frames[0].matrix() * psi0.matrix())?];
    let mut max_hor = 0.0f64;
    let mut max_proj = 0.0f64;

    for m in 0..steps {
        let dt = traj.times[m + 1] - traj.times[m];
        let k = &traj.step_generators[m];
        let u_m = frames[m].matrix();
        let half = mat::expm_skew_hermitian(&k.map(|z| z * 0.5));
        let u_mid = &half * u_m;
        // body velocity at the midpoint: M = ψ₀† U_mid† (K/Δt) U_mid ψ₀
        let body = psi0.matrix().adjoint()
            * u_mid.adjoint()
            * k.map(|z| z / dt)
            * &u_mid
            * psi0.matrix();
        let g = mat::block_diagonal_part(&body, &mult);
        let v_half = mat::expm_skew_hermitian(&g.map(|z| z * (-0.5 * dt))) * &v;
        let v_next = mat::expm_skew_hermitian(&g.map(|z| z * -dt)) * &v;

        let psi_prev = lifted[m].matrix().clone();
        let psi_next = frames[m + 1].matrix() * psi0.matrix() * &v_next;
        let psi_mid = &u_mid * psi0.matrix() * &v_half;
        let fd = (&psi_next - &psi_prev).map(|z| z / dt);
        let res = mat::frob_norm(&mat::block_diagonal_part(
            &(psi_mid.adjoint() * fd),
            &mult,
        ));
        max_hor = max_hor.max(res);

        let proj = &psi_next * &d * psi_next.adjoint();
        max_proj = max_proj.max(mat::frob_norm(&(proj - traj.states[m + 1].matrix())));

        lifted.push(UnitaryFrame::new(psi_next)?);
        gauge.push(v_next.clone());
        v = v_next;
    }

    Ok(HorizontalLift {
        frames: lifted,
        gauge,
        max_horizontality_residual: max_hor,
        max_projection_residual: max_proj,
    })
}

/// Parallel transport endpoint, stabilizer-valued holonomy, and geometric phase
/// of a loop.
#[derive(Debug, Clone)]
pub struct HolonomyResult {
    /// Endpoint Π[ρ] of the horizontal lift.
    pub transport: UnitaryFrame,
    /// ψ₀†·Π[ρ] ∈ U(σ) for loops.
    pub holonomy: CMatrix,
    /// arg Tr(D·Hol) in (−π, π], the spectrum-weighted holonomy phase.
    pub phase: f64,
    /// Off-block leakage of the holonomy out of U(σ) (diagnostic).
    pub stabilizer_residual: f64,
}

/// Geometric phase of a closed trajectory through ψ₀.
///
/// The holonomy is ψ₀†ψ(τ) ∈ U(σ); the phase weights its diagonal blocks by
/// the spectrum, arg Σ_b p_b Tr(Hol_bb), which is exactly invariant under
/// replacing ψ₀ by ψ₀V with V ∈ U(σ).
pub fn geometric_phase(traj: &Trajectory, psi0: &UnitaryFrame) -> Result<HolonomyResult> {
    let gap = traj.loop_gap();
    if gap > 1e-8 {
        return Err(Error::NotALoop { gap });
    }
    let lift = horizontal_lift(traj, psi0)?;
    let transport = lift.frames.last().unwrap().clone();
    let holonomy = psi0.matrix().adjoint() * transport.matrix();
    let sigma = traj.initial().spectrum();
    let stabilizer_residual =
        mat::frob_norm(&mat::off_block_part(&holonomy, sigma.multiplicities()));
    let weighted = mat::trace(&(sigma.diagonal_matrix() * &holonomy));
    let phase = weighted.im.atan2(weighted.re);
    Ok(HolonomyResult { transport, holonomy, phase, stabilizer_residual })
}

/// Wrap an angle difference into (−π, π].
pub fn wrap_angle(a: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut x = a % two_pi;
    if x <= -std::f64::consts::PI {
        x += two_pi;
    } else if x > std::f64::consts::PI {
        x -= two_pi;
    }
    x
}

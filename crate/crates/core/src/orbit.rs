//! Geometry of the orbit D(σ): reductive splitting, trace-form pairing,
//! KKS symplectic form, almost complex structure, compatible metrics,
//! and the orbit dimension.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::herm::{DensityOperator, LieAlgebraElement, Observable, Spectrum, UnitaryFrame};
use crate::mat::{self, CMatrix};

/// Default proportionality constant of the trace form B(X,Y) = c·Tr(XY).
pub const TRACE_FORM_C: f64 = 0.5;

/// Tangent vector to D(σ) at a base point: a Hermitian matrix whose
/// diagonal blocks vanish in the eigenbasis of the base point.
#[derive(Debug, Clone)]
pub struct TangentVector {
    base: DensityOperator,
    matrix: CMatrix,
}

impl TangentVector {
    /// Validate an ambient Hermitian matrix as a tangent vector at `base`.
    pub fn new(base: DensityOperator, matrix: CMatrix) -> Result<Self> {
        let norm = mat::frob_norm(&matrix);
        let herm = mat::hermitian_residual(&matrix);
        if herm > 1e-12 * norm.max(1.0) {
            return Err(Error::NotHermitian { residual: herm / norm.max(1.0) });
        }
        let in_basis = base.to_eigenbasis(&matrix);
        let block = mat::block_diagonal_part(&in_basis, base.spectrum().multiplicities());
        let res = mat::frob_norm(&block);
        if res > 1e-10 * norm.max(1e-30) {
            return Err(Error::NotTangent { residual: res });
        }
        Ok(TangentVector { base, matrix })
    }

    /// Project an ambient Hermitian matrix onto the tangent space at `base`
    /// by dropping the diagonal blocks in the eigenbasis.
    pub fn project(base: DensityOperator, matrix: &CMatrix) -> Self {
        let herm = mat::hermitian_part(matrix);
        let in_basis = base.to_eigenbasis(&herm);
        let off = mat::off_block_part(&in_basis, base.spectrum().multiplicities());
        let ambient = base.from_eigenbasis(&off);
        TangentVector { base, matrix: mat::hermitian_part(&ambient) }
    }

    pub fn base(&self) -> &DensityOperator {
        &self.base
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn in_eigenbasis(&self) -> CMatrix {
        self.base.to_eigenbasis(&self.matrix)
    }

    pub fn norm(&self) -> f64 {
        mat::frob_norm(&self.matrix)
    }

    fn check_same_base(&self, other: &TangentVector) -> Result<()> {
        let res = self.base.distance_to(other.base());
        if res > 1e-9 {
            return Err(Error::BasePointMismatch { residual: res });
        }
        Ok(())
    }
}

/// Decomposition of a Lie algebra element into vertical (block-diagonal in the
/// base eigenbasis) and horizontal (off-block) parts.
#[derive(Debug, Clone)]
pub struct BundleSplit {
    pub frame: UnitaryFrame,
    pub vertical: LieAlgebraElement,
    pub horizontal: LieAlgebraElement,
}

/// Trace-form pairing B(X,Y) = c·Re Tr(XY) with the default constant.
pub fn killing_pairing(x: &LieAlgebraElement, y: &LieAlgebraElement) -> Result<f64> {
    killing_pairing_c(x, y, TRACE_FORM_C)
}

pub fn killing_pairing_c(x: &LieAlgebraElement, y: &LieAlgebraElement, c: f64) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch { expected: x.dim(), got: y.dim() });
    }
    Ok(c * mat::trace(&(x.matrix() * y.matrix())).re)
}

/// Split A ∈ 𝔲(n) into its vertical (𝔥) and horizontal (𝔪) parts relative to
/// the eigenblock structure of ρ.
pub fn reductive_split(a: &LieAlgebraElement, rho: &DensityOperator) -> Result<BundleSplit> {
    if a.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), got: a.dim() });
    }
    let in_basis = rho.to_eigenbasis(a.matrix());
    let mult = rho.spectrum().multiplicities();
    let vert = rho.from_eigenbasis(&mat::block_diagonal_part(&in_basis, mult));
    let hor = rho.from_eigenbasis(&mat::off_block_part(&in_basis, mult));
    Ok(BundleSplit {
        frame: UnitaryFrame::new(rho.eigenbasis().clone())?,
        vertical: LieAlgebraElement::new(mat::skew_part(&vert))?,
        horizontal: LieAlgebraElement::new(mat::skew_part(&hor))?,
    })
}

/// KKS symplectic form on Hamiltonian vector fields:
/// ω_ρ(X_Â, X_B̂) = (1/iℏ)·Tr(ρ[Â,B̂]).
pub fn kks_form(rho: &DensityOperator, a: &Observable, b: &Observable, hbar: f64) -> Result<f64> {
    if a.dim() != rho.dim() || b.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), got: a.dim().max(b.dim()) });
    }
    let comm = mat::commutator(a.matrix(), b.matrix());
    let t = mat::trace(&(rho.matrix() * comm));
    // (1/iℏ)·t = (−i/ℏ)·t; for Hermitian inputs t is purely imaginary
    let val = -mat::I_C * t / Complex64::new(hbar, 0.0);
    let scale = 1.0 + mat::frob_norm(a.matrix()) * mat::frob_norm(b.matrix());
    if val.im.abs() > 1e-10 * scale {
        return Err(Error::NonNegligibleImaginaryPart { imag: val.im });
    }
    Ok(val.re)
}

/// Hamiltonian vector field of the expectation function of Â, as a tangent
/// vector at ρ: X_Â(ρ) = (1/iℏ)[Â, ρ].
pub fn hamiltonian_tangent(rho: &DensityOperator, a: &Observable, hbar: f64) -> Result<TangentVector> {
    if a.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), got: a.dim() });
    }
    let x = mat::commutator(a.matrix(), rho.matrix()).map(|z| z * (-mat::I_C) / hbar);
    // off-block by construction; project to clean rounding
    Ok(TangentVector::project(rho.clone(), &x))
}

/// Symplectic form evaluated on two tangent vectors at the same base point.
///
/// In the base eigenbasis, ω(X,Y) = −iℏ Σ X_{jk} Y_{kj} / (p_j − p_k) over
/// off-block index pairs, which agrees with `kks_form` on Hamiltonian fields.
pub fn omega_tangent(x: &TangentVector, y: &TangentVector, hbar: f64) -> Result<f64> {
    x.check_same_base(y)?;
    let xp = x.in_eigenbasis();
    let yp = y.in_eigenbasis();
    let spectrum = x.base().spectrum();
    let p = spectrum.expanded();
    let labels = mat::block_labels(spectrum.multiplicities());
    let n = p.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..n {
        for k in 0..n {
            if labels[j] != labels[k] {
                acc += xp[(j, k)] * yp[(k, j)] / (p[j] - p[k]);
            }
        }
    }
    let val = -mat::I_C * Complex64::new(hbar, 0.0) * acc;
    let scale = 1.0 + x.norm() * y.norm();
    if val.im.abs() > 1e-9 * scale {
        return Err(Error::NonNegligibleImaginaryPart { imag: val.im });
    }
    Ok(val.re)
}

/// Both sides of the defining identity dA(X) = ω(X_Â, X) of the Hamiltonian
/// vector field, computed independently.
pub fn hamiltonian_pairing_check(
    rho: &DensityOperator,
    a: &Observable,
    x: &TangentVector,
    hbar: f64,
) -> Result<(f64, f64)> {
    if a.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), got: a.dim() });
    }
    let lhs = mat::trace(&(x.matrix() * a.matrix())).re;
    let xa = hamiltonian_tangent(rho, a, hbar)?;
    let rhs = omega_tangent(&xa, x, hbar)?;
    Ok((lhs, rhs))
}

/// Almost complex structure J: entrywise (JX)_{jk} = −i·sgn(p_j − p_k)·X_{jk}
/// in the base eigenbasis. Satisfies J∘J = −Id and makes g = ω(·, J·)
/// positive definite.
pub fn complex_structure(x: &TangentVector) -> TangentVector {
    let xp = x.in_eigenbasis();
    let spectrum = x.base().spectrum();
    let p = spectrum.expanded();
    let labels = mat::block_labels(spectrum.multiplicities());
    let n = p.len();
    let mut out = CMatrix::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            if labels[j] != labels[k] {
                let sign = if p[j] > p[k] { 1.0 } else { -1.0 };
                out[(j, k)] = -mat::I_C * sign * xp[(j, k)];
            }
        }
    }
    let ambient = x.base().from_eigenbasis(&out);
    TangentVector {
        base: x.base().clone(),
        matrix: mat::hermitian_part(&ambient),
    }
}

/// KKS metric g(X,Y) = ω(X, JY).
pub fn kks_metric(x: &TangentVector, y: &TangentVector, hbar: f64) -> Result<f64> {
    x.check_same_base(y)?;
    omega_tangent(x, &complex_structure(y), hbar)
}

/// Hermitian product h(X,Y) = g(X,Y) + i·ω̃(X,Y), returned as the pair
/// (g, ω̃). The symplectic component carries the opposite orientation of the
/// KKS form, ω̃ = −ω; with that orientation h is complex-linear under J,
/// h(JX,Y) = i·h(X,Y).
pub fn hermitian_product(x: &TangentVector, y: &TangentVector, hbar: f64) -> Result<(f64, f64)> {
    Ok((kks_metric(x, y, hbar)?, -omega_tangent(x, y, hbar)?))
}

/// Submersion (normal) metric on body-frame tangents at ψ: the Frobenius
/// inner product of the horizontal (off-block) parts. With this normalization
/// the basis elements (1/√2)(e^{ij} − e^{ji}) and (i/√2)(e^{ij} + e^{ji})
/// are orthonormal.
pub fn submersion_metric(
    _psi: &UnitaryFrame,
    a: &LieAlgebraElement,
    b: &LieAlgebraElement,
    sigma: &Spectrum,
) -> Result<f64> {
    let n = sigma.dim();
    if a.dim() != n || b.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: a.dim().max(b.dim()) });
    }
    let mult = sigma.multiplicities();
    let ha = mat::off_block_part(a.matrix(), mult);
    let hb = mat::off_block_part(b.matrix(), mult);
    Ok(mat::trace(&(ha.adjoint() * hb)).re)
}

/// Real dimension of the orbit D(σ): n² − Σ n_i².
pub fn orbit_dimension(sigma: &Spectrum) -> usize {
    let n = sigma.dim();
    n * n - sigma.multiplicities().iter().map(|m| m * m).sum::<usize>()
}

/// Real basis of the tangent space at ρ: for each off-block pair (j,k), j<k,
/// the Hermitian matrices e_{jk}+e_{kj} and i(e_{jk}−e_{kj}) in the eigenbasis,
/// mapped back to ambient coordinates.
pub fn tangent_basis(rho: &DensityOperator) -> Vec<TangentVector> {
    let spectrum = rho.spectrum();
    let labels = mat::block_labels(spectrum.multiplicities());
    let n = rho.dim();
    let mut out = Vec::new();
    for j in 0..n {
        for k in (j + 1)..n {
            if labels[j] != labels[k] {
                let mut re = CMatrix::zeros(n, n);
                re[(j, k)] = mat::ONE_C;
                re[(k, j)] = mat::ONE_C;
                let mut im = CMatrix::zeros(n, n);
                im[(j, k)] = mat::I_C;
                im[(k, j)] = -mat::I_C;
                for m in [re, im] {
                    let ambient = rho.from_eigenbasis(&m);
                    out.push(TangentVector {
                        base: rho.clone(),
                        matrix: mat::hermitian_part(&ambient),
                    });
                }
            }
        }
    }
    out
}

/// Random tangent vector at ρ (projection of a random Hermitian matrix).
pub fn random_tangent(rho: &DensityOperator, seed: u64) -> TangentVector {
    let h = crate::herm::random_observable(rho.dim(), seed, 1.0);
    TangentVector::project(rho.clone(), h.matrix())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::herm::{haar_unitary, random_lie_element, random_observable};

    fn qubit_rho(p: f64) -> DensityOperator {
        let s = Spectrum::new(&[p, 1.0 - p], &[1, 1]).unwrap();
        DensityOperator::from_frame(&UnitaryFrame::identity(2), &s).unwrap()
    }

    #[test]
    fn killing_pairing_examples() {
        let x = LieAlgebraElement::new(CMatrix::from_row_slice(2, 2, &[
            mat::I_C, mat::ZERO_C,
            mat::ZERO_C, -mat::I_C,
        ]))
        .unwrap();
        // Tr(XX) = −2, so with c = 1/2 the pairing is −1
        assert!((killing_pairing(&x, &x).unwrap() + 1.0).abs() < 1e-14);
        let zero = LieAlgebraElement::zero(2);
        assert_eq!(killing_pairing(&x, &zero).unwrap(), 0.0);
    }

    #[test]
    fn killing_pairing_ad_invariance() {
        for seed in 0..10 {
            let x = random_lie_element(3, seed, 1.0);
            let y = random_lie_element(3, seed + 100, 1.0);
            let u = haar_unitary(3, seed + 200);
            let ad = |m: &CMatrix| u.matrix() * m * u.matrix().adjoint();
            let xa = LieAlgebraElement::new(mat::skew_part(&ad(x.matrix()))).unwrap();
            let ya = LieAlgebraElement::new(mat::skew_part(&ad(y.matrix()))).unwrap();
            let lhs = killing_pairing(&xa, &ya).unwrap();
            let rhs = killing_pairing(&x, &y).unwrap();
            assert!((lhs - rhs).abs() < 1e-10);
        }
    }

    #[test]
    fn reductive_split_examples() {
        let rho = qubit_rho(0.7);
        let diag = LieAlgebraElement::new(CMatrix::from_row_slice(2, 2, &[
            mat::I_C, mat::ZERO_C,
            mat::ZERO_C, mat::I_C * 2.0,
        ]))
        .unwrap();
        let split = reductive_split(&diag, &rho).unwrap();
        assert!(mat::frob_norm(split.horizontal.matrix()) < 1e-12);
        assert!(mat::frob_norm(&(split.vertical.matrix() - diag.matrix())) < 1e-12);

        let off = LieAlgebraElement::new(CMatrix::from_row_slice(2, 2, &[
            mat::ZERO_C, mat::ONE_C,
            -mat::ONE_C, mat::ZERO_C,
        ]))
        .unwrap();
        let split = reductive_split(&off, &rho).unwrap();
        assert!(mat::frob_norm(split.vertical.matrix()) < 1e-12);

        // maximally mixed: one block, everything vertical
        let mixed = qubit_rho(0.5);
        let any = random_lie_element(2, 3, 1.0);
        let split = reductive_split(&any, &mixed).unwrap();
        assert!(mat::frob_norm(split.horizontal.matrix()) < 1e-12);
    }

    #[test]
    fn reductive_split_reconstructs_and_is_b_orthogonal() {
        for seed in 0..10 {
            let s = Spectrum::new(&[0.5, 0.25], &[1, 2]).unwrap();
            let rho = DensityOperator::from_frame(&haar_unitary(3, seed), &s).unwrap();
            let a = random_lie_element(3, seed + 50, 1.0);
            let split = reductive_split(&a, &rho).unwrap();
            let sum = split.vertical.matrix() + split.horizontal.matrix();
            assert!(mat::frob_norm(&(sum - a.matrix())) < 1e-12 * mat::frob_norm(a.matrix()).max(1.0));
            let b = killing_pairing(&split.vertical, &split.horizontal).unwrap();
            let norm2 = mat::frob_norm(a.matrix()).powi(2);
            assert!(b.abs() <= 1e-10 * norm2.max(1.0));
        }
    }

    #[test]
    fn kks_form_qubit_example() {
        let rho = qubit_rho(0.7);
        let val = kks_form(&rho, &Observable::pauli_x(), &Observable::pauli_y(), 1.0).unwrap();
        assert!((val - 0.8).abs() < 1e-12, "got {val}");
        // antisymmetry: ω(A, A) = 0
        let a = random_observable(2, 1, 1.0);
        assert!(kks_form(&rho, &a, &a, 1.0).unwrap().abs() < 1e-12);
        // σ_z commutes with diag(0.7, 0.3): zero against everything
        let z = Observable::pauli_z();
        let b = random_observable(2, 2, 1.0);
        assert!(kks_form(&rho, &z, &b, 1.0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn omega_tangent_matches_kks_form() {
        for seed in 0..10 {
            let s = Spectrum::new(&[0.5, 0.3, 0.2], &[1, 1, 1]).unwrap();
            let rho = DensityOperator::from_frame(&haar_unitary(3, seed), &s).unwrap();
            let a = random_observable(3, seed + 10, 1.0);
            let b = random_observable(3, seed + 20, 1.0);
            let xa = hamiltonian_tangent(&rho, &a, 1.0).unwrap();
            let xb = hamiltonian_tangent(&rho, &b, 1.0).unwrap();
            let direct = kks_form(&rho, &a, &b, 1.0).unwrap();
            let via_tangent = omega_tangent(&xa, &xb, 1.0).unwrap();
            assert!((direct - via_tangent).abs() < 1e-9 * (1.0 + direct.abs()));
        }
    }

    #[test]
    fn pairing_identity_holds() {
        let rho = qubit_rho(0.7);
        for seed in 0..10 {
            let a = random_observable(2, seed, 1.0);
            let b = random_observable(2, seed + 30, 1.0);
            let x = hamiltonian_tangent(&rho, &b, 1.0).unwrap();
            let (lhs, rhs) = hamiltonian_pairing_check(&rho, &a, &x, 1.0).unwrap();
            assert!((lhs - rhs).abs() < 1e-10 * (1.0 + lhs.abs()), "{lhs} vs {rhs}");
        }
        // central generator: identity observable gives zero on both sides
        let id = Observable::new(mat::identity(2)).unwrap();
        let x = random_tangent(&rho, 5);
        let (lhs, rhs) = hamiltonian_pairing_check(&rho, &id, &x, 1.0).unwrap();
        assert!(lhs.abs() < 1e-12 && rhs.abs() < 1e-12);
    }

    #[test]
    fn complex_structure_squares_to_minus_identity() {
        for seed in 0..10 {
            let s = Spectrum::new(&[0.5, 0.3, 0.2], &[1, 1, 1]).unwrap();
            let rho = DensityOperator::from_frame(&haar_unitary(3, seed), &s).unwrap();
            let x = random_tangent(&rho, seed + 40);
            let jjx = complex_structure(&complex_structure(&x));
            let res = mat::frob_norm(&(jjx.matrix() + x.matrix()));
            assert!(res < 1e-12 * x.norm().max(1.0));
        }
    }

    #[test]
    fn complex_structure_maps_sigma_x_to_sigma_y() {
        let rho = qubit_rho(0.7);
        let x = TangentVector::new(rho.clone(), Observable::pauli_x().matrix().clone()).unwrap();
        let jx = complex_structure(&x);
        let res = mat::frob_norm(&(jx.matrix() - Observable::pauli_y().matrix()));
        assert!(res < 1e-12, "JX differs from σ_y by {res}");
    }

    #[test]
    fn metric_symmetric_and_positive() {
        for seed in 0..20 {
            let s = Spectrum::new(&[0.5, 0.3, 0.2], &[1, 1, 1]).unwrap();
            let rho = DensityOperator::from_frame(&haar_unitary(3, seed), &s).unwrap();
            let x = random_tangent(&rho, seed + 60);
            let y = random_tangent(&rho, seed + 80);
            let gxy = kks_metric(&x, &y, 1.0).unwrap();
            let gyx = kks_metric(&y, &x, 1.0).unwrap();
            assert!((gxy - gyx).abs() < 1e-10 * (1.0 + gxy.abs()));
            let gxx = kks_metric(&x, &x, 1.0).unwrap();
            assert!(gxx > 0.0, "g(X,X) = {gxx} not positive");
            // J-invariance
            let jx = complex_structure(&x);
            let jy = complex_structure(&y);
            let gjj = kks_metric(&jx, &jy, 1.0).unwrap();
            assert!((gjj - gxy).abs() < 1e-10 * (1.0 + gxy.abs()));
        }
    }

    #[test]
    fn hermitian_product_compatibility() {
        let rho = qubit_rho(0.7);
        for seed in 0..10 {
            let x = random_tangent(&rho, seed);
            // h(X,X) has zero imaginary part
            let (_, w) = hermitian_product(&x, &x, 1.0).unwrap();
            assert!(w.abs() < 1e-12);
            // h(JX, X) = i·h(X,X): real part 0, imaginary part g(X,X)
            let jx = complex_structure(&x);
            let (g_jx_x, w_jx_x) = hermitian_product(&jx, &x, 1.0).unwrap();
            let (gxx, _) = hermitian_product(&x, &x, 1.0).unwrap();
            assert!(g_jx_x.abs() < 1e-9 * (1.0 + gxx));
            assert!((w_jx_x - gxx).abs() < 1e-9 * (1.0 + gxx));
        }
    }

    #[test]
    fn maximally_mixed_has_no_tangents() {
        let rho = qubit_rho(0.5);
        assert!(tangent_basis(&rho).is_empty());
        assert_eq!(orbit_dimension(rho.spectrum()), 0);
        let x = random_tangent(&rho, 1);
        assert!(x.norm() < 1e-14);
    }

    #[test]
    fn submersion_metric_orthonormal_basis() {
        // (1/√2)(e^{ij} − e^{ji}) and (i/√2)(e^{ij} + e^{ji}) are orthonormal
        let n = 3;
        let sigma = Spectrum::new(&[0.5, 0.3, 0.2], &[1, 1, 1]).unwrap();
        let psi = UnitaryFrame::identity(n);
        let inv_sqrt2 = 1.0 / 2f64.sqrt();
        let mut basis = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let mut re = CMatrix::zeros(n, n);
                re[(i, j)] = mat::ONE_C * inv_sqrt2;
                re[(j, i)] = -mat::ONE_C * inv_sqrt2;
                let mut im = CMatrix::zeros(n, n);
                im[(i, j)] = mat::I_C * inv_sqrt2;
                im[(j, i)] = mat::I_C * inv_sqrt2;
                basis.push(LieAlgebraElement::new(re).unwrap());
                basis.push(LieAlgebraElement::new(im).unwrap());
            }
        }
        for (a, ea) in basis.iter().enumerate() {
            for (b, eb) in basis.iter().enumerate() {
                let v = submersion_metric(&psi, ea, eb, &sigma).unwrap();
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((v - expect).abs() < 1e-12, "({a},{b}) -> {v}");
            }
        }
    }

    #[test]
    fn submersion_metric_kills_vertical_and_is_fiber_invariant() {
        let sigma = Spectrum::new(&[0.5, 0.25], &[1, 2]).unwrap();
        let psi = haar_unitary(3, 7);
        // vertical element: block-diagonal
        let vert_raw = mat::block_diagonal_part(random_lie_element(3, 11, 1.0).matrix(), sigma.multiplicities());
        let vert = LieAlgebraElement::new(vert_raw).unwrap();
        for seed in 0..5 {
            let b = random_lie_element(3, seed + 500, 1.0);
            assert!(submersion_metric(&psi, &vert, &b, &sigma).unwrap().abs() < 1e-12);
        }
        // fiber invariance: conjugating body coordinates by V ∈ U(σ)
        for seed in 0..5 {
            let a = random_lie_element(3, seed + 600, 1.0);
            let b = random_lie_element(3, seed + 700, 1.0);
            let xi_raw = mat::block_diagonal_part(random_lie_element(3, seed + 800, 1.0).matrix(), sigma.multiplicities());
            let v = mat::expm_skew_hermitian(&xi_raw);
            let conj = |m: &CMatrix| v.adjoint() * m * &v;
            let a2 = LieAlgebraElement::new(mat::skew_part(&conj(a.matrix()))).unwrap();
            let b2 = LieAlgebraElement::new(mat::skew_part(&conj(b.matrix()))).unwrap();
            let v1 = submersion_metric(&psi, &a, &b, &sigma).unwrap();
            let v2 = submersion_metric(&psi, &a2, &b2, &sigma).unwrap();
            assert!((v1 - v2).abs() < 1e-10 * (1.0 + v1.abs()));
        }
    }

    #[test]
    fn orbit_dimension_formula() {
        let pure = Spectrum::new(&[1.0, 0.0], &[1, 1]).unwrap();
        assert_eq!(orbit_dimension(&pure), 2); // dim CP¹
        let distinct3 = Spectrum::new(&[0.5, 0.3, 0.2], &[1, 1, 1]).unwrap();
        assert_eq!(orbit_dimension(&distinct3), 6);
        let mixed = Spectrum::new(&[0.25], &[4]).unwrap();
        assert_eq!(orbit_dimension(&mixed), 0);
    }

    #[test]
    fn horizontal_space_is_ad_invariant_under_stabilizer() {
        // Ad(U(σ))𝔪 ⊂ 𝔪
        let sigma = Spectrum::new(&[0.5, 0.25], &[1, 2]).unwrap();
        let rho = DensityOperator::from_frame(&UnitaryFrame::identity(3), &sigma).unwrap();
        for seed in 0..10 {
            let a = random_lie_element(3, seed, 1.0);
            let hor = reductive_split(&a, &rho).unwrap().horizontal;
            let xi_raw = mat::block_diagonal_part(random_lie_element(3, seed + 900, 1.0).matrix(), sigma.multiplicities());
            let v = mat::expm_skew_hermitian(&xi_raw);
            let conj = &v * hor.matrix() * v.adjoint();
            let residual = mat::frob_norm(&mat::block_diagonal_part(&conj, sigma.multiplicities()));
            assert!(residual < 1e-10 * mat::frob_norm(hor.matrix()).max(1.0));
        }
    }

    #[test]
    fn unitary_equivariance_of_omega_and_metric() {
        for seed in 0..10 {
            let s = Spectrum::new(&[0.5, 0.3, 0.2], &[1, 1, 1]).unwrap();
            let rho = DensityOperator::from_frame(&haar_unitary(3, seed), &s).unwrap();
            let a = random_observable(3, seed + 10, 1.0);
            let b = random_observable(3, seed + 20, 1.0);
            let w = haar_unitary(3, seed + 30);
            let push = |m: &CMatrix| w.matrix() * m * w.matrix().adjoint();
            let rho_w = DensityOperator::from_matrix(push(rho.matrix())).unwrap();
            let aw = Observable::new(mat::hermitian_part(&push(a.matrix()))).unwrap();
            let bw = Observable::new(mat::hermitian_part(&push(b.matrix()))).unwrap();
            let w1 = kks_form(&rho, &a, &b, 1.0).unwrap();
            let w2 = kks_form(&rho_w, &aw, &bw, 1.0).unwrap();
            assert!((w1 - w2).abs() < 1e-10 * (1.0 + w1.abs()));

            let xa = hamiltonian_tangent(&rho, &a, 1.0).unwrap();
            let xb = hamiltonian_tangent(&rho, &b, 1.0).unwrap();
            let xaw = hamiltonian_tangent(&rho_w, &aw, 1.0).unwrap();
            let xbw = hamiltonian_tangent(&rho_w, &bw, 1.0).unwrap();
            let g1 = kks_metric(&xa, &xb, 1.0).unwrap();
            let g2 = kks_metric(&xaw, &xbw, 1.0).unwrap();
            assert!((g1 - g2).abs() < 1e-10 * (1.0 + g1.abs()));
        }
    }
}

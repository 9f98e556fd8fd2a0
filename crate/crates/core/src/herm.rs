//! Core operator types: spectra, density operators, unitary frames,
//! observables, Lie algebra elements, and seeded random sampling.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::mat::{self, CMatrix};

/// Tolerance below which two eigenvalues are treated as one degenerate block.
pub const SPECTRUM_MERGE_TOL: f64 = 1e-9;

/// Eigenvalue multiset of a density operator: distinct values descending,
/// with multiplicities. Defines the orbit D(σ) and the stabilizer U(σ).
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Spectrum {
    values: Vec<f64>,
    multiplicities: Vec<usize>,
}

impl Spectrum {
    /// Validate and build a spectrum. Values are sorted descending and entries
    /// equal within `SPECTRUM_MERGE_TOL` are merged into a single block
    /// (weighted average, which preserves the trace).
    pub fn new(values: &[f64], multiplicities: &[usize]) -> Result<Self> {
        Self::with_merge_tol(values, multiplicities, SPECTRUM_MERGE_TOL)
    }

    pub fn with_merge_tol(values: &[f64], multiplicities: &[usize], merge_tol: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput("spectrum values"));
        }
        if values.len() != multiplicities.len() {
            return Err(Error::LengthMismatch(values.len(), multiplicities.len()));
        }
        for (i, &m) in multiplicities.iter().enumerate() {
            if m == 0 {
                return Err(Error::NonPositiveMultiplicity(i));
            }
        }
        for (i, &v) in values.iter().enumerate() {
            if v < -1e-12 {
                return Err(Error::NegativeEigenvalue { index: i, value: v });
            }
        }
        let sum: f64 = values
            .iter()
            .zip(multiplicities)
            .map(|(v, &m)| v * m as f64)
            .sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::TraceNotOne { sum });
        }

        let mut pairs: Vec<(f64, usize)> = values
            .iter()
            .map(|&v| v.max(0.0))
            .zip(multiplicities.iter().copied())
            .collect();
        pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());

        // merge near-equal values; representative is the multiplicity-weighted mean
        let mut merged: Vec<(f64, usize)> = Vec::new();
        for (v, m) in pairs {
            match merged.last_mut() {
                Some((mv, mm)) if (*mv - v).abs() <= merge_tol => {
                    let total = *mm + m;
                    *mv = (*mv * *mm as f64 + v * m as f64) / total as f64;
                    *mm = total;
                }
                _ => merged.push((v, m)),
            }
        }
        Ok(Spectrum {
            values: merged.iter().map(|&(v, _)| v.max(0.0)).collect(),
            multiplicities: merged.iter().map(|&(_, m)| m).collect(),
        })
    }

    /// Build from a full eigenvalue list (one entry per dimension), e.g. the
    /// output of an eigensolver. Values are renormalized to unit sum to absorb
    /// solver rounding.
    pub fn from_eigenvalues(eigvals: &[f64]) -> Result<Self> {
        let sum: f64 = eigvals.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::TraceNotOne { sum });
        }
        let normalized: Vec<f64> = eigvals.iter().map(|v| v / sum).collect();
        let mult = vec![1usize; normalized.len()];
        Self::new(&normalized, &mult)
    }

    /// Distinct block values, descending.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    /// Number of distinct blocks k.
    pub fn num_blocks(&self) -> usize {
        self.values.len()
    }

    /// Total dimension n = Σ n_i.
    pub fn dim(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    /// Eigenvalues expanded with multiplicities, descending (length n).
    pub fn expanded(&self) -> Vec<f64> {
        self.values
            .iter()
            .zip(&self.multiplicities)
            .flat_map(|(&v, &m)| std::iter::repeat_n(v, m))
            .collect()
    }

    /// diag(p_1, …, p_1, p_2, …) as a complex matrix.
    pub fn diagonal_matrix(&self) -> CMatrix {
        let exp = self.expanded();
        CMatrix::from_fn(exp.len(), exp.len(), |i, j| {
            if i == j {
                Complex64::new(exp[i], 0.0)
            } else {
                mat::ZERO_C
            }
        })
    }

    /// Largest gap between the two expanded eigenvalue multisets.
    pub fn distance(&self, other: &Spectrum) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        self.expanded()
            .iter()
            .zip(other.expanded())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Hermitian, positive semidefinite, unit-trace matrix together with its
/// eigendecomposition (eigenvalues descending) and merged block spectrum.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    matrix: CMatrix,
    eigenvalues: Vec<f64>,
    eigenbasis: CMatrix,
    spectrum: Spectrum,
}

impl DensityOperator {
    pub fn from_matrix(m: CMatrix) -> Result<Self> {
        let norm = mat::frob_norm(&m);
        let herm_res = mat::hermitian_residual(&m);
        if herm_res > 1e-12 * norm.max(1.0) {
            return Err(Error::NotHermitian { residual: herm_res / norm.max(1.0) });
        }
        let tr = mat::trace(&m);
        if (tr.re - 1.0).abs() > 1e-12 || tr.im.abs() > 1e-12 {
            return Err(Error::TraceNotOne { sum: tr.re });
        }
        let (eigenvalues, eigenbasis) = mat::hermitian_eigen_desc(&m);
        if let Some((i, &v)) = eigenvalues
            .iter()
            .enumerate()
            .find(|(_, &v)| v < -1e-12)
        {
            return Err(Error::NegativeEigenvalue { index: i, value: v });
        }
        let spectrum = Spectrum::from_eigenvalues(&eigenvalues)?;
        Ok(DensityOperator { matrix: m, eigenvalues, eigenbasis, spectrum })
    }

    /// ψ D ψ† for a unitary frame ψ and spectrum σ. The eigendecomposition is
    /// taken from the inputs, so the result is isospectral to σ by construction.
    pub fn from_frame(frame: &UnitaryFrame, spectrum: &Spectrum) -> Result<Self> {
        let n = spectrum.dim();
        if frame.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: frame.dim() });
        }
        let d = spectrum.diagonal_matrix();
        let matrix = frame.matrix() * &d * frame.matrix().adjoint();
        Ok(DensityOperator {
            matrix,
            eigenvalues: spectrum.expanded(),
            eigenbasis: frame.matrix().clone(),
            spectrum: spectrum.clone(),
        })
    }

    /// Assemble from a known eigendecomposition without re-diagonalizing.
    /// Used by the propagator integrator, where isospectrality is structural.
    pub(crate) fn from_parts(
        matrix: CMatrix,
        eigenvalues: Vec<f64>,
        eigenbasis: CMatrix,
        spectrum: Spectrum,
    ) -> Self {
        DensityOperator { matrix, eigenvalues, eigenbasis, spectrum }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Eigenvalues descending (length n, unmerged).
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Unitary whose columns are eigenvectors, ordered to match `eigenvalues`.
    pub fn eigenbasis(&self) -> &CMatrix {
        &self.eigenbasis
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    /// Coordinates of an ambient matrix in the eigenbasis: U† M U.
    pub fn to_eigenbasis(&self, m: &CMatrix) -> CMatrix {
        self.eigenbasis.adjoint() * m * &self.eigenbasis
    }

    /// Inverse of `to_eigenbasis`: U M U†.
    pub fn from_eigenbasis(&self, m: &CMatrix) -> CMatrix {
        &self.eigenbasis * m * self.eigenbasis.adjoint()
    }

    /// Frobenius distance to another state.
    pub fn distance_to(&self, other: &DensityOperator) -> f64 {
        mat::frob_norm(&(&self.matrix - &other.matrix))
    }
}

/// Element ψ of U(n); a point in the bundle total space, π(ψ) = ψ D ψ†.
#[derive(Debug, Clone)]
pub struct UnitaryFrame {
    matrix: CMatrix,
}

impl UnitaryFrame {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let res = mat::unitarity_residual(&matrix);
        if res > 1e-10 {
            return Err(Error::NotUnitary { residual: res });
        }
        Ok(UnitaryFrame { matrix })
    }

    pub fn identity(n: usize) -> Self {
        UnitaryFrame { matrix: mat::identity(n) }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Hermitian operator (Hamiltonian or general observable).
#[derive(Debug, Clone)]
pub struct Observable {
    matrix: CMatrix,
}

impl Observable {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let norm = mat::frob_norm(&matrix);
        let res = mat::hermitian_residual(&matrix);
        if res > 1e-12 * norm.max(1.0) {
            return Err(Error::NotHermitian { residual: res / norm.max(1.0) });
        }
        Ok(Observable { matrix })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn pauli_x() -> Self {
        Observable {
            matrix: CMatrix::from_row_slice(2, 2, &[
                mat::ZERO_C, mat::ONE_C,
                mat::ONE_C, mat::ZERO_C,
            ]),
        }
    }

    pub fn pauli_y() -> Self {
        Observable {
            matrix: CMatrix::from_row_slice(2, 2, &[
                mat::ZERO_C, -mat::I_C,
                mat::I_C, mat::ZERO_C,
            ]),
        }
    }

    pub fn pauli_z() -> Self {
        Observable {
            matrix: CMatrix::from_row_slice(2, 2, &[
                mat::ONE_C, mat::ZERO_C,
                mat::ZERO_C, -mat::ONE_C,
            ]),
        }
    }
}

/// Skew-Hermitian element of 𝔲(n).
#[derive(Debug, Clone)]
pub struct LieAlgebraElement {
    matrix: CMatrix,
}

impl LieAlgebraElement {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let norm = mat::frob_norm(&matrix);
        let res = mat::skew_hermitian_residual(&matrix);
        if res > 1e-12 * norm.max(1.0) {
            return Err(Error::NotSkewHermitian { residual: res / norm.max(1.0) });
        }
        Ok(LieAlgebraElement { matrix })
    }

    pub fn zero(n: usize) -> Self {
        LieAlgebraElement { matrix: CMatrix::zeros(n, n) }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

fn complex_gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im)
}

/// Haar-random unitary: QR of a complex Gaussian matrix with the R diagonal
/// phases absorbed into Q.
pub fn haar_unitary(n: usize, seed: u64) -> UnitaryFrame {
    assert!(n >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z = CMatrix::from_fn(n, n, |_, _| complex_gaussian(&mut rng));
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { mat::ONE_C };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    UnitaryFrame { matrix: q }
}

/// GUE-style random Hermitian matrix: (Z + Z†)/2 with independent complex
/// Gaussian entries, multiplied by `scale`.
pub fn random_observable(n: usize, seed: u64, scale: f64) -> Observable {
    assert!(n >= 1 && scale > 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z = CMatrix::from_fn(n, n, |_, _| complex_gaussian(&mut rng));
    let h = mat::hermitian_part(&z).map(|v| v * scale);
    Observable { matrix: h }
}

/// Random skew-Hermitian matrix with Gaussian entries (test and sampling aid).
pub fn random_lie_element(n: usize, seed: u64, scale: f64) -> LieAlgebraElement {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z = CMatrix::from_fn(n, n, |_, _| complex_gaussian(&mut rng));
    LieAlgebraElement { matrix: mat::skew_part(&z).map(|v| v * scale) }
}

/// Tr(ρ Â), checked to be real up to rounding.
pub fn expectation(rho: &DensityOperator, obs: &Observable) -> Result<f64> {
    if rho.dim() != obs.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), got: obs.dim() });
    }
    let t = mat::trace(&(rho.matrix() * obs.matrix()));
    let scale = 1.0 + mat::frob_norm(obs.matrix());
    if t.im.abs() > 1e-12 * scale {
        return Err(Error::NonNegligibleImaginaryPart { imag: t.im });
    }
    Ok(t.re)
}

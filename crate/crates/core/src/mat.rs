//! Dense complex matrix helpers shared across the library.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO_C: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE_C: Complex64 = Complex64::new(1.0, 0.0);
pub const I_C: Complex64 = Complex64::new(0.0, 1.0);

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn frob_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn hermitian_residual(m: &CMatrix) -> f64 {
    frob_norm(&(m - m.adjoint()))
}

pub fn skew_hermitian_residual(m: &CMatrix) -> f64 {
    frob_norm(&(m + m.adjoint()))
}

pub fn unitarity_residual(m: &CMatrix) -> f64 {
    let n = m.nrows();
    frob_norm(&(m.adjoint() * m - identity(n)))
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Complex trace of a matrix.
pub fn trace(m: &CMatrix) -> Complex64 {
    let mut t = ZERO_C;
    for i in 0..m.nrows().min(m.ncols()) {
        t += m[(i, i)];
    }
    t
}

/// Symmetrize to the nearest Hermitian matrix, (M + M†)/2.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).map(|z| z * 0.5)
}

/// (M − M†)/2, the skew-Hermitian part.
pub fn skew_part(m: &CMatrix) -> CMatrix {
    (m - m.adjoint()).map(|z| z * 0.5)
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending.
///
/// Returns (eigenvalues, eigenvectors as columns). The input is symmetrized
/// first so tiny Hermiticity violations do not leak into complex eigenvalues.
pub fn hermitian_eigen_desc(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let h = hermitian_part(m);
    let se = h.symmetric_eigen();
    let n = se.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[b].partial_cmp(&se.eigenvalues[a]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vecs = CMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vecs.set_column(col, &se.eigenvectors.column(i).into_owned());
    }
    (vals, vecs)
}

/// exp(K) for skew-Hermitian K, via the Hermitian eigendecomposition of iK.
///
/// The result is unitary to machine precision for any norm of K.
pub fn expm_skew_hermitian(k: &CMatrix) -> CMatrix {
    let n = k.nrows();
    let h = k.map(|z| I_C * z); // iK is Hermitian
    let (vals, vecs) = hermitian_eigen_desc(&h);
    let mut d = CMatrix::zeros(n, n);
    for j in 0..n {
        // exp(K) = V exp(-i λ_j) V†
        d[(j, j)] = Complex64::from_polar(1.0, -vals[j]);
    }
    &vecs * d * vecs.adjoint()
}

/// Eigendecomposition of a unitary matrix W = V diag(λ) V† with |λ_j| = 1.
///
/// W is normal with commuting Hermitian real part A = (W+W†)/2 and imaginary
/// part B = (W−W†)/2i. Diagonalize A, then refine each degenerate A-eigenspace
/// by diagonalizing B restricted to it; since cos θ and sin θ jointly determine
/// a point on the unit circle, two levels fully split the spectrum.
pub fn unitary_eigen(w: &CMatrix) -> (Vec<Complex64>, CMatrix) {
    let n = w.nrows();
    let a = hermitian_part(w);
    let b = skew_part(w).map(|z| z * -I_C); // (W − W†)/(2i), Hermitian
    let (avals, mut vecs) = hermitian_eigen_desc(&a);

    // refine clusters of equal cos θ
    let cluster_tol = 1e-8;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (avals[end] - avals[start]).abs() < cluster_tol {
            end += 1;
        }
        if end - start > 1 {
            let q = vecs.columns(start, end - start).into_owned();
            let b_sub = q.adjoint() * &b * &q;
            let (_, v_sub) = hermitian_eigen_desc(&b_sub);
            let refined = &q * v_sub;
            for (off, col) in (start..end).enumerate() {
                vecs.set_column(col, &refined.column(off).into_owned());
            }
        }
        start = end;
    }

    let mut lambdas = Vec::with_capacity(n);
    for j in 0..n {
        let v = vecs.column(j);
        let lam = (v.adjoint() * w * v)[(0, 0)];
        lambdas.push(lam / lam.norm());
    }
    (lambdas, vecs)
}

/// Principal logarithm of a unitary matrix: skew-Hermitian Ω with exp(Ω) = W,
/// eigenvalue arguments in (−π, π].
pub fn unitary_log(w: &CMatrix) -> CMatrix {
    let n = w.nrows();
    let (lambdas, vecs) = unitary_eigen(w);
    let mut d = CMatrix::zeros(n, n);
    for j in 0..n {
        d[(j, j)] = I_C * lambdas[j].arg();
    }
    let log = &vecs * d * vecs.adjoint();
    skew_part(&log) // clean up rounding; log is skew-Hermitian in exact arithmetic
}

/// Index ranges of the diagonal blocks defined by a multiplicity list.
pub fn block_ranges(multiplicities: &[usize]) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::with_capacity(multiplicities.len());
    let mut at = 0;
    for &m in multiplicities {
        out.push(at..at + m);
        at += m;
    }
    out
}

/// Block index of each matrix row/column under the multiplicity structure.
pub fn block_labels(multiplicities: &[usize]) -> Vec<usize> {
    let mut out = Vec::new();
    for (b, &m) in multiplicities.iter().enumerate() {
        out.extend(std::iter::repeat_n(b, m));
    }
    out
}

/// Keep only the diagonal blocks of `m` (zero elsewhere).
pub fn block_diagonal_part(m: &CMatrix, multiplicities: &[usize]) -> CMatrix {
    let labels = block_labels(multiplicities);
    let mut out = CMatrix::zeros(m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if labels[i] == labels[j] {
                out[(i, j)] = m[(i, j)];
            }
        }
    }
    out
}

/// Zero out the diagonal blocks of `m`, keeping the off-block complement.
pub fn off_block_part(m: &CMatrix, multiplicities: &[usize]) -> CMatrix {
    m - block_diagonal_part(m, multiplicities)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_chacha::ChaCha8Rng;
    use rand::SeedableRng;

    fn random_matrix(n: usize, seed: u64) -> CMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        CMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    #[test]
    fn expm_skew_is_unitary_for_large_norm() {
        for seed in 0..5 {
            let m = random_matrix(4, seed);
            let mut k = skew_part(&m);
            let scale = 10.0 / frob_norm(&k);
            k *= Complex64::new(scale, 0.0);
            let e = expm_skew_hermitian(&k);
            assert!(unitarity_residual(&e) <= 1e-12, "residual {}", unitarity_residual(&e));
        }
    }

    #[test]
    fn unitary_log_round_trip() {
        for seed in 0..8 {
            let m = random_matrix(3, seed);
            let k = skew_part(&m);
            let w = expm_skew_hermitian(&k);
            let log = unitary_log(&w);
            let back = expm_skew_hermitian(&log);
            assert!(frob_norm(&(back - w)) < 1e-10);
        }
    }

    #[test]
    fn unitary_log_handles_degenerate_eigenvalues() {
        // block-diagonal rotation with a repeated eigenvalue pair
        let w = expm_skew_hermitian(&CMatrix::from_row_slice(
            3,
            3,
            &[
                ZERO_C,
                Complex64::new(0.3, 0.0),
                ZERO_C,
                Complex64::new(-0.3, 0.0),
                ZERO_C,
                ZERO_C,
                ZERO_C,
                ZERO_C,
                ZERO_C,
            ],
        ));
        let log = unitary_log(&w);
        assert!(frob_norm(&(expm_skew_hermitian(&log) - &w)) < 1e-10);
        // identity: all eigenvalues coincide
        let log_id = unitary_log(&identity(4));
        assert!(frob_norm(&log_id) < 1e-12);
    }

    #[test]
    fn block_parts_reconstruct() {
        let m = random_matrix(5, 7);
        let mult = [2, 1, 2];
        let sum = block_diagonal_part(&m, &mult) + off_block_part(&m, &mult);
        assert!(frob_norm(&(sum - m)) < 1e-14);
    }
}

//! Dense complex matrices and the few bipartite operations everything else
//! is built on.
//!
//! Bipartite basis states `|i j⟩` of a `d × d` system use the composite
//! index `i * d + j` throughout the crate.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

pub const TOL_HERM: f64 = 1e-10;
pub const TOL_TRACE: f64 = 1e-10;
pub const TOL_PSD: f64 = 1e-9;

/// Largest supported local dimension (`d² = 1024` dense rows).
pub const MAX_LOCAL_DIM: usize = 32;

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `e^{iθ}`
#[inline]
pub fn phase(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

/// Composite index of `|i j⟩`.
#[inline]
pub fn idx(d: usize, i: usize, j: usize) -> usize {
    i * d + j
}

/// A Hermitian, unit-trace, positive semidefinite `d² × d²` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    local_dim: usize,
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, trace and positivity with the crate tolerances.
    pub fn new(local_dim: usize, mat: ComplexMatrix) -> Result<Self> {
        check_local_dim(local_dim)?;
        let n = local_dim * local_dim;
        if mat.nrows() != n || mat.ncols() != n {
            return Err(Error::Shape(format!(
                "expected {n}x{n} for d={local_dim}, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        check_finite(&mat)?;
        let herm = hermiticity_residual(&mat);
        if herm > TOL_HERM {
            return Err(Error::NotHermitian(herm));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > TOL_TRACE || tr.im.abs() > TOL_TRACE {
            return Err(Error::InvalidTrace(tr.re));
        }
        let min = hermitian_eigenvalues(&mat)[0];
        if min < -TOL_PSD {
            return Err(Error::NotPsd(min));
        }
        Ok(Self { local_dim, mat })
    }

    /// `|ψ⟩⟨ψ|` for a normalized vector of length `d²`.
    pub fn from_pure(local_dim: usize, psi: &ComplexVector) -> Result<Self> {
        Self::new(local_dim, psi * psi.adjoint())
    }

    pub fn maximally_mixed(local_dim: usize) -> Result<Self> {
        check_local_dim(local_dim)?;
        let n = local_dim * local_dim;
        Self::new(local_dim, ComplexMatrix::identity(n, n) / cr(n as f64))
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> Complex64 {
        let d = self.local_dim;
        self.mat[(idx(d, i, j), idx(d, k, l))]
    }

    pub fn partial_transpose(&self) -> ComplexMatrix {
        partial_transpose_matrix(&self.mat, self.local_dim).expect("validated shape")
    }

    pub fn realign(&self) -> ComplexMatrix {
        realign_matrix(&self.mat, self.local_dim).expect("validated shape")
    }

    pub fn to_json(&self) -> DensityMatrixJson {
        let n = self.mat.nrows();
        DensityMatrixJson {
            d: self.local_dim,
            re: (0..n).map(|r| (0..n).map(|c| self.mat[(r, c)].re).collect()).collect(),
            im: (0..n).map(|r| (0..n).map(|c| self.mat[(r, c)].im).collect()).collect(),
        }
    }

    pub fn from_json(json: &DensityMatrixJson) -> Result<Self> {
        check_local_dim(json.d)?;
        let n = json.d * json.d;
        if json.re.len() != n || json.im.len() != n {
            return Err(Error::Shape(format!("expected {n} rows in re/im")));
        }
        let mut mat = ComplexMatrix::zeros(n, n);
        for r in 0..n {
            if json.re[r].len() != n || json.im[r].len() != n {
                return Err(Error::Shape(format!("row {r} must have {n} entries")));
            }
            for col in 0..n {
                mat[(r, col)] = c(json.re[r][col], json.im[r][col]);
            }
        }
        Self::new(json.d, mat)
    }
}

/// Wire form `{ "d": int, "re": [[...]], "im": [[...]] }` with `d² × d²` arrays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrixJson {
    pub d: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

pub(crate) fn check_local_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::Dimension(d));
    }
    if d > MAX_LOCAL_DIM {
        return Err(Error::Domain(format!(
            "local dimension {d} exceeds the supported maximum {MAX_LOCAL_DIM}"
        )));
    }
    Ok(())
}

fn check_finite(m: &ComplexMatrix) -> Result<()> {
    for r in 0..m.nrows() {
        for col in 0..m.ncols() {
            let z = m[(r, col)];
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite(r, col));
            }
        }
    }
    Ok(())
}

fn check_bipartite_square(m: &ComplexMatrix, d: usize) -> Result<()> {
    let n = d * d;
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::Shape(format!(
            "expected {n}x{n} for d={d}, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// Transpose on the second factor: entry `(ij, kl)` of the result is entry
/// `(il, kj)` of `m`.
pub fn partial_transpose_matrix(m: &ComplexMatrix, d: usize) -> Result<ComplexMatrix> {
    check_bipartite_square(m, d)?;
    Ok(ComplexMatrix::from_fn(d * d, d * d, |row, col| {
        let (i, j) = (row / d, row % d);
        let (k, l) = (col / d, col % d);
        m[(idx(d, i, l), idx(d, k, j))]
    }))
}

/// Realignment `R(ϱ) = Σ ϱ_{ij,kl} |ik⟩⟨jl|`: entry `(ik, jl)` of the result
/// is entry `(ij, kl)` of `m`.
pub fn realign_matrix(m: &ComplexMatrix, d: usize) -> Result<ComplexMatrix> {
    check_bipartite_square(m, d)?;
    Ok(ComplexMatrix::from_fn(d * d, d * d, |row, col| {
        let (i, k) = (row / d, row % d);
        let (j, l) = (col / d, col % d);
        m[(idx(d, i, j), idx(d, k, l))]
    }))
}

/// Sum of singular values.
pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    singular_values(m).iter().sum()
}

pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    m.clone().singular_values().iter().copied().collect()
}

/// Largest entrywise deviation `|m - m†|`.
pub fn hermiticity_residual(m: &ComplexMatrix) -> f64 {
    if m.nrows() != m.ncols() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for r in 0..n {
        for col in r..n {
            worst = worst.max((m[(r, col)] - m[(col, r)].conj()).norm());
        }
    }
    worst
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let herm = (m + m.adjoint()) * cr(0.5);
    let mut ev: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eig_hermitian(m: &ComplexMatrix) -> Result<f64> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::Shape(format!(
            "expected a non-empty square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    check_finite(m)?;
    let herm = hermiticity_residual(m);
    if herm > TOL_HERM {
        return Err(Error::NotHermitian(herm));
    }
    Ok(hermitian_eigenvalues(m)[0])
}

/// Eigenvector of the largest eigenvalue of a Hermitian matrix.
pub fn top_eigenvector(m: &ComplexMatrix) -> (f64, ComplexVector) {
    let herm = (m + m.adjoint()) * cr(0.5);
    let eig = herm.symmetric_eigen();
    let (best, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    (eig.eigenvalues[best], eig.eigenvectors.column(best).into_owned())
}

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "max_abs_diff shape mismatch");
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// `|φ+_d⟩ = d^{-1/2} Σ_j |jj⟩`.
pub fn phi_plus_vector(d: usize) -> ComplexVector {
    let amp = cr(1.0 / (d as f64).sqrt());
    ComplexVector::from_fn(d * d, |r, _| if r / d == r % d { amp } else { cr(0.0) })
}

/// Computational basis ket `|i j⟩`.
pub fn basis_ket(d: usize, i: usize, j: usize) -> ComplexVector {
    let mut v = ComplexVector::zeros(d * d);
    v[idx(d, i, j)] = cr(1.0);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    fn phi_plus(d: usize) -> DensityMatrix {
        DensityMatrix::from_pure(d, &phi_plus_vector(d)).unwrap()
    }

    #[test]
    fn partial_transpose_of_phi_plus_has_min_eigenvalue_minus_one_third() {
        let pt = phi_plus(3).partial_transpose();
        // PT(|φ+⟩⟨φ+|) = SWAP / d, spectrum {±1/3}
        let min = min_eig_hermitian(&pt).unwrap();
        assert!((min + 1.0 / 3.0).abs() < 1e-12, "{min}");
    }

    #[test]
    fn product_state_stays_psd_under_partial_transpose() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let local = |rng: &mut ChaCha8Rng| {
            let a = random_matrix(rng, 3);
            let p = &a * a.adjoint();
            let t = p.trace();
            p / t
        };
        let ra = local(&mut rng);
        let rb = local(&mut rng);
        let rho = DensityMatrix::new(3, kron(&ra, &rb)).unwrap();
        let pt = rho.partial_transpose();
        assert!(max_abs_diff(&pt, &kron(&ra, &rb.transpose())) < 1e-14);
        assert!(min_eig_hermitian(&pt).unwrap() > -TOL_PSD);
    }

    #[test]
    fn partial_transpose_and_realign_are_involutions() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in 2..=4 {
            let m = random_matrix(&mut rng, d * d);
            let pt = partial_transpose_matrix(&m, d).unwrap();
            assert_eq!(partial_transpose_matrix(&pt, d).unwrap(), m);
            let r = realign_matrix(&m, d).unwrap();
            assert_eq!(realign_matrix(&r, d).unwrap(), m);
        }
    }

    #[test]
    fn realign_trace_norms() {
        let mixed = DensityMatrix::maximally_mixed(3).unwrap();
        assert!((trace_norm(&mixed.realign()) - 1.0 / 3.0).abs() < 1e-12);
        for d in 2..=5 {
            assert!((trace_norm(&phi_plus(d).realign()) - d as f64).abs() < 1e-10);
        }
    }

    #[test]
    fn trace_norm_basic_cases() {
        assert!((trace_norm(&ComplexMatrix::identity(5, 5)) - 5.0).abs() < 1e-12);
        let v = ComplexVector::from_vec(vec![c(1.0, 2.0), c(0.0, -1.0), cr(3.0)]);
        let w = ComplexVector::from_vec(vec![cr(0.5), c(0.5, 0.5)]);
        let rank1 = &v * w.adjoint();
        assert!((trace_norm(&rank1) - v.norm() * w.norm()).abs() < 1e-12);
    }

    #[test]
    fn trace_norm_of_hermitian_matches_eigenvalue_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [2, 5, 9, 16] {
            let a = random_matrix(&mut rng, n);
            let h = &a + a.adjoint();
            let oracle: f64 = hermitian_eigenvalues(&h).iter().map(|e| e.abs()).sum();
            assert!((trace_norm(&h) - oracle).abs() < 1e-10);
            assert!(trace_norm(&a) >= a.trace().norm() - 1e-12);
        }
    }

    #[test]
    fn min_eig_of_diagonal() {
        let m = ComplexMatrix::from_diagonal(&ComplexVector::from_vec(vec![cr(0.8), cr(0.2)]));
        assert!((min_eig_hermitian(&m).unwrap() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn min_eig_rejects_non_hermitian() {
        let mut m = ComplexMatrix::identity(2, 2);
        m[(0, 1)] = cr(1.0);
        assert!(matches!(min_eig_hermitian(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn density_matrix_validation_errors() {
        assert!(matches!(
            DensityMatrix::new(2, ComplexMatrix::identity(3, 3)),
            Err(Error::Shape(_))
        ));
        assert!(matches!(
            DensityMatrix::new(2, ComplexMatrix::identity(4, 4)),
            Err(Error::InvalidTrace(_))
        ));
        let mut m = ComplexMatrix::zeros(4, 4);
        m[(0, 0)] = cr(1.5);
        m[(1, 1)] = cr(-0.5);
        assert!(matches!(DensityMatrix::new(2, m), Err(Error::NotPsd(_))));
        assert!(matches!(DensityMatrix::maximally_mixed(1), Err(Error::Dimension(1))));
        let mut nan = ComplexMatrix::identity(4, 4) / cr(4.0);
        nan[(2, 3)] = cr(f64::NAN);
        assert!(matches!(DensityMatrix::new(2, nan), Err(Error::NonFinite(2, 3))));
    }

    #[test]
    fn shape_errors_for_bipartite_ops() {
        let m = ComplexMatrix::identity(6, 6);
        assert!(partial_transpose_matrix(&m, 2).is_err());
        assert!(realign_matrix(&m, 3).is_err());
    }

    #[test]
    fn json_round_trip() {
        let rho = phi_plus(2);
        let back = DensityMatrix::from_json(&rho.to_json()).unwrap();
        assert_eq!(back, rho);
    }
}

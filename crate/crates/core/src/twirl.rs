//! The twirling channel onto the symmetric family and the symmetry
//! generators it averages over.
//!
//! Averaging over local phases `U ⊗ Ū` kills every matrix element except
//! the diagonal and the `|kk⟩⟨jj|` block; averaging over simultaneous cyclic
//! shifts then collapses each orbit to its mean. Both averages are done in
//! closed form.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::family::FamilyState;
use crate::qmat::{check_local_dim, cr, idx, kron, max_abs_diff, phase, ComplexMatrix, DensityMatrix};

/// Default seed for the random phase tuples of invariance checks.
pub const DEFAULT_SEED: u64 = 42;

/// Closed-form twirl of `sigma`:
///
/// * `x_{m+1} = (1/d) Σ_k σ_{(k,k⊕m),(k,k⊕m)}`
/// * `y_m = (1/2d) Σ_k (σ_{kk,(k⊖m)(k⊖m)} + conj σ_{(k⊖m)(k⊖m),kk})`
pub fn twirl_to_family(sigma: &DensityMatrix) -> Result<FamilyState> {
    let s = twirl_matrix(sigma.matrix(), sigma.local_dim())?;
    s.ensure_valid()?;
    Ok(s)
}

/// Orbit projection of a raw `d² × d²` matrix. The result is conjugate
/// symmetric by construction but is not checked for positivity.
pub fn twirl_matrix(m: &ComplexMatrix, d: usize) -> Result<FamilyState> {
    check_local_dim(d)?;
    if m.nrows() != d * d || m.ncols() != d * d {
        return Err(Error::Shape(format!("expected {0}x{0}, got {1}x{2}", d * d, m.nrows(), m.ncols())));
    }
    let df = d as f64;
    let x: Vec<f64> = (0..d)
        .map(|j| (0..d).map(|k| m[(idx(d, k, (k + j) % d), idx(d, k, (k + j) % d))].re).sum::<f64>() / df)
        .collect();
    let y: Vec<Complex64> = (1..d)
        .map(|j| {
            let mut acc = cr(0.0);
            for k in 0..d {
                let l = (k + d - j) % d;
                acc += m[(idx(d, k, k), idx(d, l, l))] + m[(idx(d, l, l), idx(d, k, k))].conj();
            }
            acc / (2.0 * df)
        })
        .collect();
    // enforce exact conjugate symmetry for the half-index of even d
    let mut y = y;
    for j in 1..d {
        if 2 * j == d {
            y[j - 1] = cr(y[j - 1].re);
        } else if j < d - j {
            let v = (y[j - 1] + y[d - j - 1].conj()) / 2.0;
            y[j - 1] = v;
            y[d - j - 1] = v.conj();
        }
    }
    FamilyState::new(d, x, y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    CyclicShift,
    PhaseRotation,
}

impl GeneratorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GeneratorKind::CyclicShift => "CYCLIC_SHIFT",
            GeneratorKind::PhaseRotation => "PHASE_ROTATION",
        }
    }
}

/// A symmetry `U ⊗ V` of the family.
#[derive(Debug, Clone, PartialEq)]
pub enum SymmetryGenerator {
    /// `U = V = X^n`, `n ∈ 1..d`.
    CyclicShift { d: usize, n: usize },
    /// `U = diag(e^{2πiφ_1}, …, e^{2πiφ_{d−1}}, e^{−2πiΣφ})`, `V = Ū`.
    PhaseRotation { d: usize, phases: Vec<f64> },
}

impl SymmetryGenerator {
    pub fn cyclic_shift(d: usize, n: usize) -> Result<Self> {
        check_local_dim(d)?;
        if !(1..d).contains(&n) {
            return Err(Error::Domain(format!("shift must be in 1..{d}, got {n}")));
        }
        Ok(Self::CyclicShift { d, n })
    }

    pub fn phase_rotation(d: usize, phases: Vec<f64>) -> Result<Self> {
        check_local_dim(d)?;
        if phases.len() != d - 1 {
            return Err(Error::Shape(format!("need {} phases, got {}", d - 1, phases.len())));
        }
        if phases.iter().any(|p| !p.is_finite()) {
            return Err(Error::Domain("non-finite phase".into()));
        }
        Ok(Self::PhaseRotation { d, phases })
    }

    pub fn kind(&self) -> GeneratorKind {
        match self {
            Self::CyclicShift { .. } => GeneratorKind::CyclicShift,
            Self::PhaseRotation { .. } => GeneratorKind::PhaseRotation,
        }
    }

    pub fn d(&self) -> usize {
        match self {
            Self::CyclicShift { d, .. } | Self::PhaseRotation { d, .. } => *d,
        }
    }

    /// The local factors `(U, V)`.
    pub fn local_factors(&self) -> (ComplexMatrix, ComplexMatrix) {
        match self {
            Self::CyclicShift { d, n } => {
                let (d, n) = (*d, *n);
                let u = ComplexMatrix::from_fn(d, d, |r, c| if r == (c + n) % d { cr(1.0) } else { cr(0.0) });
                (u.clone(), u)
            }
            Self::PhaseRotation { d, phases } => {
                let tau = 2.0 * std::f64::consts::PI;
                let last = -phases.iter().sum::<f64>();
                let angle = |i: usize| if i + 1 < *d { phases[i] } else { last };
                let u = ComplexMatrix::from_fn(*d, *d, |r, c| if r == c { phase(tau * angle(r)) } else { cr(0.0) });
                let v = u.map(|z| z.conj());
                (u, v)
            }
        }
    }
}

/// `U ⊗ V` as a dense `d² × d²` unitary.
pub fn generator_matrix(g: &SymmetryGenerator) -> ComplexMatrix {
    let (u, v) = g.local_factors();
    kron(&u, &v)
}

/// All cyclic shifts followed by `samples` random phase rotations drawn
/// uniformly from `[0, 1)^{d−1}`.
pub fn sample_generators(d: usize, samples: usize, seed: u64) -> Result<Vec<SymmetryGenerator>> {
    check_local_dim(d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<SymmetryGenerator> = (1..d).map(|n| SymmetryGenerator::CyclicShift { d, n }).collect();
    for _ in 0..samples {
        let phases = (0..d - 1).map(|_| rng.random::<f64>()).collect();
        out.push(SymmetryGenerator::PhaseRotation { d, phases });
    }
    Ok(out)
}

/// `max_g ‖g ρ g† − ρ‖_max` over the generators of [`sample_generators`].
pub fn invariance_residual_matrix(m: &ComplexMatrix, d: usize, samples: usize, seed: u64) -> Result<f64> {
    if m.nrows() != d * d || m.ncols() != d * d {
        return Err(Error::Shape(format!("expected {0}x{0}, got {1}x{2}", d * d, m.nrows(), m.ncols())));
    }
    let mut worst: f64 = 0.0;
    for g in sample_generators(d, samples, seed)? {
        let u = generator_matrix(&g);
        let conj = &u * m * u.adjoint();
        worst = worst.max(max_abs_diff(&conj, m));
    }
    Ok(worst)
}

pub fn invariance_residual(s: &FamilyState, samples: usize, seed: u64) -> Result<f64> {
    s.ensure_valid()?;
    invariance_residual_matrix(&s.to_matrix(), s.d(), samples, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{random_family_state, reference_states};
    use crate::qmat::{basis_ket, phi_plus_vector};

    #[test]
    fn twirl_of_phi_plus_is_bell_vertex() {
        for d in 2..=6 {
            let rho = DensityMatrix::from_pure(d, &phi_plus_vector(d)).unwrap();
            let s = twirl_to_family(&rho).unwrap();
            let df = d as f64;
            assert!((s.x(1) - 1.0 / df).abs() < 1e-15);
            assert!(s.xs()[1..].iter().all(|v| v.abs() < 1e-15));
            assert!(s.ys().iter().all(|y| (y - cr(1.0 / df)).norm() < 1e-15));
        }
    }

    #[test]
    fn twirl_of_01_projector_is_rho_1() {
        let rho = DensityMatrix::from_pure(3, &basis_ket(3, 0, 1)).unwrap();
        let s = twirl_to_family(&rho).unwrap();
        assert_eq!(s.xs(), &[0.0, 1.0 / 3.0, 0.0]);
        assert!(s.ys().iter().all(|y| y.norm() == 0.0));
        assert_eq!(s, reference_states(3).unwrap().rho_l[0].to_family());
    }

    #[test]
    fn twirl_fixes_family_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in 2..=5 {
            for _ in 0..10 {
                let s = random_family_state(d, &mut rng).unwrap();
                let t = twirl_to_family(&s.to_density_matrix().unwrap()).unwrap();
                assert!(max_abs_diff(&t.to_matrix(), &s.to_matrix()) < 1e-15);
            }
        }
    }

    #[test]
    fn generator_examples() {
        let g = SymmetryGenerator::cyclic_shift(3, 1).unwrap();
        let (u, v) = g.local_factors();
        assert_eq!(u, v);
        assert_eq!(u[(1, 0)], cr(1.0));
        assert_eq!(u[(2, 1)], cr(1.0));
        assert_eq!(u[(0, 2)], cr(1.0));
        assert_eq!(g.kind().as_str(), "CYCLIC_SHIFT");

        let id = generator_matrix(&SymmetryGenerator::phase_rotation(3, vec![0.0, 0.0]).unwrap());
        assert!(max_abs_diff(&id, &ComplexMatrix::identity(9, 9)) < 1e-15);

        let g = SymmetryGenerator::phase_rotation(3, vec![0.3, -0.1]).unwrap();
        let (u, v) = g.local_factors();
        let tau = 2.0 * std::f64::consts::PI;
        assert!((u[(2, 2)] - phase(-tau * 0.2)).norm() < 1e-15);
        assert!((v[(0, 0)] - phase(-tau * 0.3)).norm() < 1e-15);
        let m = generator_matrix(&g);
        assert!(max_abs_diff(&(&m * m.adjoint()), &ComplexMatrix::identity(9, 9)) < 1e-14);

        assert!(SymmetryGenerator::cyclic_shift(3, 0).is_err());
        assert!(SymmetryGenerator::phase_rotation(3, vec![0.1]).is_err());
    }

    #[test]
    fn residuals() {
        let s = reference_states(4).unwrap().rho_0;
        assert!(invariance_residual(&s, 20, DEFAULT_SEED).unwrap() < 1e-14);
        let p = DensityMatrix::from_pure(3, &basis_ket(3, 0, 1)).unwrap();
        assert!(invariance_residual_matrix(p.matrix(), 3, 5, DEFAULT_SEED).unwrap() > 0.1);
    }

    #[test]
    fn seeded_generators_repeat() {
        assert_eq!(sample_generators(3, 4, 1).unwrap(), sample_generators(3, 4, 1).unwrap());
        assert_ne!(sample_generators(3, 4, 1).unwrap(), sample_generators(3, 4, 2).unwrap());
    }
}

//! Weyl–Heisenberg operators, the Weyl-shifted Bell basis and the Bloch
//! coefficients of facet states.
//!
//! Displacements use `D_{jk} = Z^j X^k e^{−iπjk/d}` for every `d`. Only the
//! moduli of Bloch coefficients enter the realignment value, so the choice of
//! half phase for even `d` does not affect any result here.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::family::FacetState;
use crate::qmat::{check_local_dim, cr, idx, phase, ComplexMatrix, ComplexVector};

/// `Z|j⟩ = ω^j |j⟩`
pub fn weyl_z(d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |r, c| if r == c { omega_pow(d, r) } else { cr(0.0) })
}

/// `X|j⟩ = |j ⊕ 1⟩`
pub fn weyl_x(d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |r, c| if r == (c + 1) % d { cr(1.0) } else { cr(0.0) })
}

/// `ω^n` with `ω = e^{2πi/d}`, reducing `n` mod `d` first.
pub fn omega_pow(d: usize, n: usize) -> Complex64 {
    phase(2.0 * PI * (n % d) as f64 / d as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeylOp {
    pub d: usize,
    pub j: usize,
    pub k: usize,
    pub matrix: ComplexMatrix,
}

impl WeylOp {
    pub fn new(d: usize, j: usize, k: usize) -> Self {
        let (j, k) = (j % d, k % d);
        // (Z^j X^k)|m⟩ = ω^{j(m+k)} |m+k⟩
        let half = phase(-PI * (j * k) as f64 / d as f64);
        let matrix = ComplexMatrix::from_fn(d, d, |r, c| {
            if r == (c + k) % d {
                omega_pow(d, j * r) * half
            } else {
                cr(0.0)
            }
        });
        Self { d, j, k, matrix }
    }
}

/// `|φ_{kl}⟩ = (Z^k ⊗ X^l)|φ+⟩ = d^{-1/2} Σ_j ω^{jk} |j, j⊕l⟩`
pub fn bell_state(d: usize, k: usize, l: usize) -> ComplexVector {
    let mut v = ComplexVector::zeros(d * d);
    let amp = 1.0 / (d as f64).sqrt();
    for j in 0..d {
        v[idx(d, j, (j + l) % d)] = omega_pow(d, j * k) * amp;
    }
    v
}

/// All `d²` Bell states, ordered `k`-major: entry `k * d + l` is `|φ_{kl}⟩`.
pub fn bell_basis(d: usize) -> Result<Vec<ComplexVector>> {
    check_local_dim(d)?;
    Ok((0..d).flat_map(|k| (0..d).map(move |l| bell_state(d, k, l))).collect())
}

/// Coefficients `c_{ab}` of `Σ_{ab} c_{ab} D_{ab} ⊗ D*_{ab}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochCoeffs {
    pub d: usize,
    /// Row-major `d × d`, entry `a * d + b`.
    pub c: Vec<Complex64>,
}

impl BlochCoeffs {
    pub fn get(&self, a: usize, b: usize) -> Complex64 {
        self.c[a * self.d + b]
    }

    /// Dense `Σ c_{ab} D_{ab} ⊗ D*_{ab}`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = self.d;
        let mut out = ComplexMatrix::zeros(d * d, d * d);
        for a in 0..d {
            for b in 0..d {
                let coeff = self.get(a, b);
                if coeff.norm() == 0.0 {
                    continue;
                }
                let op = WeylOp::new(d, a, b).matrix;
                out += op.kronecker(&op.map(|z| z.conj())) * coeff;
            }
        }
        out
    }
}

/// Bloch coefficients of a facet state: `x_1/d` on every `b ≠ 0` and
/// `(1/d) Σ_l x_{l+1} ω^{al}` on the `b = 0` column.
pub fn bloch_coeffs(s: &FacetState) -> Result<BlochCoeffs> {
    s.ensure_valid()?;
    let d = s.d();
    let df = d as f64;
    let mut c = vec![cr(s.x(1) / df); d * d];
    for a in 0..d {
        let col: Complex64 = (0..d).map(|l| omega_pow(d, a * l) * s.x(l + 1)).sum();
        c[a * d] = col / df;
    }
    Ok(BlochCoeffs { d, c })
}

/// Realignment trace norm of a facet state from its Bloch coefficients,
/// `d Σ |c_{ab}|`. The operators `D_{ab}/√d` are orthonormal on both sides
/// so the coefficients `d·c_{ab}` are the operator Schmidt coefficients up
/// to phase.
pub fn ccnr_via_bloch(s: &FacetState) -> Result<f64> {
    let coeffs = bloch_coeffs(s)?;
    Ok(s.d() as f64 * coeffs.c.iter().map(|z| z.norm()).sum::<f64>())
}

/// Hilbert–Schmidt projection of an arbitrary `d² × d²` matrix onto the
/// diagonal Weyl products: `c_{ab} = Tr[(D_{ab} ⊗ D*_{ab})† m] / d²`.
pub fn project_bloch_diagonal(m: &ComplexMatrix, d: usize) -> Result<BlochCoeffs> {
    if m.nrows() != d * d || m.ncols() != d * d {
        return Err(Error::Shape(format!("expected {0}x{0}", d * d)));
    }
    let norm = (d * d) as f64;
    let mut c = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            let op = WeylOp::new(d, a, b).matrix;
            let g = op.kronecker(&op.map(|z| z.conj()));
            c.push((g.adjoint() * m).trace() / norm);
        }
    }
    Ok(BlochCoeffs { d, c })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{random_facet_state, reference_states};
    use crate::qmat::{max_abs_diff, phi_plus_vector, realign_matrix, trace_norm};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn x_shifts_cyclically() {
        let x = weyl_x(3);
        assert_eq!(x[(0, 2)], cr(1.0));
        assert_eq!(x.column(2).iter().filter(|z| z.norm() > 0.0).count(), 1);
    }

    #[test]
    fn z_is_diagonal_roots_of_unity() {
        let z = weyl_z(3);
        let w = phase(2.0 * PI / 3.0);
        assert!((z[(0, 0)] - cr(1.0)).norm() < 1e-15);
        assert!((z[(1, 1)] - w).norm() < 1e-15);
        assert!((z[(2, 2)] - w * w).norm() < 1e-15);
    }

    #[test]
    fn commutation_rule() {
        for d in 2..=6 {
            let z = weyl_z(d);
            let x = weyl_x(d);
            for j in 0..d {
                for k in 0..d {
                    let zj = z.pow(j as u32);
                    let xk = x.pow(k as u32);
                    let lhs = &xk * &zj;
                    let rhs = &zj * &xk * omega_pow(d, (d * d - j * k % d) % d);
                    assert!(max_abs_diff(&lhs, &rhs) < 1e-12);
                    let op = WeylOp::new(d, j, k);
                    let expected = &zj * &xk * phase(-PI * (j * k) as f64 / d as f64);
                    assert!(max_abs_diff(&op.matrix, &expected) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn displacements_are_unitary_and_orthogonal() {
        for d in 2..=5 {
            let ops: Vec<_> = (0..d).flat_map(|j| (0..d).map(move |k| WeylOp::new(d, j, k))).collect();
            let id = ComplexMatrix::identity(d, d);
            for a in &ops {
                assert!(max_abs_diff(&(&a.matrix * a.matrix.adjoint()), &id) < 1e-12);
                for b in &ops {
                    let ip = (a.matrix.adjoint() * &b.matrix).trace();
                    let want = if a.j == b.j && a.k == b.k { d as f64 } else { 0.0 };
                    assert!((ip - cr(want)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn bell_basis_is_orthonormal_and_starts_at_phi_plus() {
        for d in 2..=5 {
            let basis = bell_basis(d).unwrap();
            assert!((&basis[0] - phi_plus_vector(d)).norm() < 1e-15);
            let zx = weyl_z(d).kronecker(&weyl_x(d));
            for (n, v) in basis.iter().enumerate() {
                for (m, w) in basis.iter().enumerate() {
                    let ip = v.dotc(w);
                    let want = if n == m { 1.0 } else { 0.0 };
                    assert!((ip - cr(want)).norm() < 1e-12);
                }
            }
            // φ_{11} = (Z ⊗ X)|φ+⟩
            assert!((&zx * phi_plus_vector(d) - &basis[d + 1]).norm() < 1e-12);
        }
    }

    #[test]
    fn bell_averages_give_rho_l() {
        for d in 2..=5 {
            let refs = reference_states(d).unwrap();
            for l in 1..d {
                let mut avg = ComplexMatrix::zeros(d * d, d * d);
                for k in 0..d {
                    let v = bell_state(d, k, l);
                    avg += &v * v.adjoint() / cr(d as f64);
                }
                let target = refs.rho_l[l - 1].to_density_matrix().unwrap();
                assert!(max_abs_diff(&avg, target.matrix()) < 1e-12);
            }
            // ϱ_0 from its Bell-basis definition
            let mut rho0 = ComplexMatrix::zeros(d * d, d * d);
            for k in 1..d {
                let v = bell_state(d, k, 0);
                rho0 += &v * v.adjoint() / cr((d - 1) as f64);
            }
            assert!(max_abs_diff(&rho0, &refs.rho_0.to_matrix()) < 1e-12);
        }
    }

    #[test]
    fn bell_projector_bloch_expansion() {
        let d = 3;
        for k in 0..d {
            for l in 0..d {
                let v = bell_state(d, k, l);
                let proj = &v * v.adjoint();
                let c: Vec<Complex64> = (0..d)
                    .flat_map(|a| (0..d).map(move |b| omega_pow(d, a * l + b * k) / cr((d * d) as f64)))
                    .collect();
                let rebuilt = BlochCoeffs { d, c }.reconstruct();
                assert!(max_abs_diff(&rebuilt, &proj) < 1e-12);
            }
        }
    }

    #[test]
    fn phi_plus_and_rho_l_coefficients() {
        for d in 2..=5 {
            let refs = reference_states(d).unwrap();
            let c = bloch_coeffs(&refs.phi_plus).unwrap();
            assert!(c.c.iter().all(|z| (z - cr(1.0 / (d * d) as f64)).norm() < 1e-15));
            for l in 1..d {
                // ϱ_l enters the facet with weight d·x_{l+1} = 1
                let c = bloch_coeffs(&refs.rho_l[l - 1]).unwrap();
                for a in 0..d {
                    for b in 0..d {
                        let want = if b == 0 { omega_pow(d, a * l) / cr((d * d) as f64) } else { cr(0.0) };
                        assert!((c.get(a, b) - want).norm() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn reconstruction_and_realignment_match_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for d in 2..=6 {
            for _ in 0..20 {
                let s = random_facet_state(d, &mut rng).unwrap();
                let rho = s.to_density_matrix().unwrap();
                let coeffs = bloch_coeffs(&s).unwrap();
                assert!(max_abs_diff(&coeffs.reconstruct(), rho.matrix()) < 1e-10);
                let projected = project_bloch_diagonal(rho.matrix(), d).unwrap();
                for (p, q) in projected.c.iter().zip(&coeffs.c) {
                    assert!((p - q).norm() < 1e-12);
                }
                let dense = trace_norm(&realign_matrix(rho.matrix(), d).unwrap());
                assert!((ccnr_via_bloch(&s).unwrap() - dense).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn ccnr_normalization_fixed_by_phi_plus() {
        for d in 2..=6 {
            let refs = reference_states(d).unwrap();
            assert!((ccnr_via_bloch(&refs.phi_plus).unwrap() - d as f64).abs() < 1e-12);
            assert!((ccnr_via_bloch(&refs.rho_sep).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn invalid_state_is_rejected() {
        let bad = FacetState::new(3, vec![0.5, 0.5, 0.5]).unwrap();
        assert!(bloch_coeffs(&bad).is_err());
        assert!(ccnr_via_bloch(&bad).is_err());
    }
}

//! Linear entropy of pure states and its minimum over the pure states that
//! twirl onto a given facet point.
//!
//! Every pure state with amplitudes `ψ_{jj} = √x_1` and
//! `ψ_{j,j⊕k} = √(d·x_{k+1}) ξ_{k,j}`, where each `ξ_k` is a unit vector,
//! twirls to the facet state `x`. `Ẽ_lin(x)` is the smallest linear entropy
//! in that set; real `ξ` already attain it.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::criteria::TIE_TOL;
use crate::error::{Error, Result};
use crate::family::FacetState;
use crate::qmat::cr;
use crate::schmidt::PureState;

pub const DEFAULT_RESTARTS: usize = 32;
pub const DEFAULT_SEED: u64 = 42;

/// `Σ_{jklm} |ψ_{jk}ψ_{lm} − ψ_{jm}ψ_{lk}|²`.
pub fn e_lin_pure(p: &PureState) -> f64 {
    let d = p.d();
    let psi = p.coeffs();
    let mut total = 0.0;
    for j in 0..d {
        for k in 0..d {
            for l in 0..d {
                for m in 0..d {
                    total += (psi[(j, k)] * psi[(l, m)] - psi[(j, m)] * psi[(l, k)]).norm_sqr();
                }
            }
        }
    }
    total
}

/// `2(1 − Tr ϱ_A²)` from the reduced state.
pub fn e_lin_from_purity(p: &PureState) -> f64 {
    let psi = p.coeffs();
    let rho_a = psi * psi.adjoint();
    let purity: f64 = rho_a.iter().map(|z| z.norm_sqr()).sum();
    2.0 * (1.0 - purity)
}

/// A facet point together with real unit vectors `ξ_1..ξ_{d−1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FacetPureParams {
    s: FacetState,
    xi: Vec<Vec<f64>>,
}

impl FacetPureParams {
    pub fn new(s: FacetState, xi: Vec<Vec<f64>>) -> Result<Self> {
        s.ensure_valid()?;
        let d = s.d();
        if xi.len() != d - 1 || xi.iter().any(|v| v.len() != d) {
            return Err(Error::Shape(format!("xi must be {}x{d}", d - 1)));
        }
        for (k, v) in xi.iter().enumerate() {
            let n: f64 = v.iter().map(|a| a * a).sum();
            if (n - 1.0).abs() > 1e-12 {
                return Err(Error::Domain(format!("xi_{} has squared norm {n}, expected 1", k + 1)));
            }
        }
        Ok(Self { s, xi })
    }

    /// All `ξ_{k,j} = 1/√d`: the circulant state with all signs positive.
    pub fn uniform(s: FacetState) -> Result<Self> {
        let d = s.d();
        Self::new(s, vec![vec![1.0 / (d as f64).sqrt(); d]; d - 1])
    }

    pub fn facet(&self) -> &FacetState {
        &self.s
    }

    pub fn xi(&self) -> &[Vec<f64>] {
        &self.xi
    }

    pub fn pure_state(&self) -> PureState {
        let psi = coefficient_matrix(&self.s, &self.xi);
        let norm = psi.norm();
        PureState::new(psi.map(|v| cr(v / norm))).expect("normalized by construction")
    }
}

fn orbit_scales(s: &FacetState) -> Vec<f64> {
    let d = s.d() as f64;
    s.xs().iter().map(|&x| (d * x.max(0.0)).sqrt()).collect()
}

fn coefficient_matrix(s: &FacetState, xi: &[Vec<f64>]) -> DMatrix<f64> {
    let d = s.d();
    let c = orbit_scales(s);
    let diag = s.x(1).max(0.0).sqrt();
    DMatrix::from_fn(d, d, |j, col| {
        let k = (col + d - j) % d;
        if k == 0 { diag } else { c[k] * xi[k - 1][j] }
    })
}

/// Linear entropy `2N² − 2‖ψψᵀ‖²_F` of a real, possibly unnormalized
/// coefficient matrix together with its gradient `8Nψ − 8ψψᵀψ`.
fn e_lin_real_with_grad(psi: &DMatrix<f64>) -> (f64, DMatrix<f64>) {
    let n = psi.norm_squared();
    let rho = psi * psi.transpose();
    let value = 2.0 * n * n - 2.0 * rho.norm_squared();
    let grad = psi * (8.0 * n) - (&rho * psi) * 8.0;
    (value, grad)
}

/// Unit vector from hyperspherical angles:
/// `ξ_0 = cos θ_0`, `ξ_i = sin θ_0 … sin θ_{i−1} cos θ_i`, last entry all sines.
fn sphere_point(theta: &[f64]) -> Vec<f64> {
    let n = theta.len() + 1;
    let mut out = vec![0.0; n];
    let mut prod = 1.0;
    for i in 0..n {
        out[i] = if i + 1 < n { prod * theta[i].cos() } else { prod };
        if i + 1 < n {
            prod *= theta[i].sin();
        }
    }
    out
}

/// `∂ξ_i/∂θ_a`, row `i`, column `a`.
fn sphere_jacobian(theta: &[f64]) -> DMatrix<f64> {
    let m = theta.len();
    let n = m + 1;
    DMatrix::from_fn(n, m, |i, a| {
        if a > i {
            return 0.0;
        }
        let mut v = 1.0;
        for (b, t) in theta.iter().enumerate().take(i) {
            v *= if b == a { t.cos() } else { t.sin() };
        }
        if i + 1 < n {
            v *= if a == i { -theta[i].sin() } else { theta[i].cos() };
        }
        v
    })
}

fn angles_to_xi(d: usize, theta: &[f64]) -> Vec<Vec<f64>> {
    (0..d - 1).map(|k| sphere_point(&theta[k * (d - 1)..(k + 1) * (d - 1)])).collect()
}

/// Objective and gradient in angle space.
fn objective(s: &FacetState, theta: &[f64]) -> (f64, Vec<f64>) {
    let d = s.d();
    let xi = angles_to_xi(d, theta);
    let psi = coefficient_matrix(s, &xi);
    let (value, grad_psi) = e_lin_real_with_grad(&psi);
    let c = orbit_scales(s);
    let mut grad = vec![0.0; theta.len()];
    for k in 1..d {
        let block = &theta[(k - 1) * (d - 1)..k * (d - 1)];
        let jac = sphere_jacobian(block);
        // ∂E/∂ξ_{k,j} = c_k · G_{j, j⊕k}
        let g_xi: Vec<f64> = (0..d).map(|j| c[k] * grad_psi[(j, (j + k) % d)]).collect();
        for a in 0..d - 1 {
            grad[(k - 1) * (d - 1) + a] = (0..d).map(|j| g_xi[j] * jac[(j, a)]).sum();
        }
    }
    (value, grad)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElinResult {
    pub value: f64,
    /// Minimizing `ξ`, one unit vector per off-diagonal orbit.
    pub xi: Vec<Vec<f64>>,
    pub restarts: usize,
    pub seed: u64,
}

/// `Ẽ_lin(x)`: multistart BFGS over real `ξ` in hyperspherical angles.
///
/// The first start is the uniform `ξ`; later ones are drawn from a single
/// seeded stream, so the starts for `r` restarts are a prefix of those for
/// `r + 1` and the reported minimum never increases with `restarts`.
pub fn e_lin_tilde(s: &FacetState, restarts: usize, seed: u64) -> Result<ElinResult> {
    s.ensure_valid()?;
    let d = s.d();
    let n = (d - 1) * (d - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // angles of the uniform unit vector 1/√d
    let uniform: Vec<f64> = (0..d - 1).flat_map(|_| uniform_angles(d)).collect();

    let mut best: Option<(f64, Vec<f64>)> = None;
    for r in 0..restarts.max(1) {
        let start: Vec<f64> = if r == 0 {
            uniform.clone()
        } else {
            (0..n).map(|_| rng.random::<f64>() * PI).collect()
        };
        let (value, theta) = bfgs(|t| objective(s, t), start);
        if best.as_ref().is_none_or(|(v, _)| value < *v) {
            best = Some((value, theta));
        }
    }
    let (value, theta) = best.expect("at least one start");
    Ok(ElinResult { value: value.max(0.0), xi: angles_to_xi(d, &theta), restarts, seed })
}

fn uniform_angles(d: usize) -> Vec<f64> {
    // ξ_i = 1/√d for all i: cos θ_i = 1/√(d − i) after dividing out the sines
    (0..d - 1).map(|i| (1.0 / ((d - i) as f64).sqrt()).acos()).collect()
}

/// BFGS with Armijo backtracking. Returns the final value and point.
fn bfgs(f: impl Fn(&[f64]) -> (f64, Vec<f64>), start: Vec<f64>) -> (f64, Vec<f64>) {
    const MAX_ITERS: usize = 400;
    let n = start.len();
    let mut x = DVector::from_vec(start);
    let (mut fx, g) = f(x.as_slice());
    let mut g = DVector::from_vec(g);
    let mut h = DMatrix::<f64>::identity(n, n);
    for _ in 0..MAX_ITERS {
        if g.norm() < 1e-13 || fx < 1e-16 {
            break;
        }
        let mut p = -(&h * &g);
        if p.dot(&g) >= 0.0 {
            h = DMatrix::identity(n, n);
            p = -g.clone();
        }
        let slope = p.dot(&g);
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let xn = &x + &p * step;
            let (fn_, gn) = f(xn.as_slice());
            if fn_ <= fx + 1e-4 * step * slope {
                accepted = Some((xn, fn_, DVector::from_vec(gn)));
                break;
            }
            step *= 0.5;
        }
        let Some((xn, fn_, gn)) = accepted else {
            break;
        };
        let sk = &xn - &x;
        let yk = &gn - &g;
        let sy = sk.dot(&yk);
        if sy > 1e-300 {
            let rho = 1.0 / sy;
            let ident = DMatrix::<f64>::identity(n, n);
            let left = &ident - (&sk * yk.transpose()) * rho;
            let right = &ident - (&yk * sk.transpose()) * rho;
            h = &left * &h * &right + (&sk * sk.transpose()) * rho;
        }
        let done = (fx - fn_).abs() <= 1e-16 * fx.abs().max(1e-300) && sk.norm() < 1e-14;
        x = xn;
        fx = fn_;
        g = gn;
        if done {
            break;
        }
    }
    (fx, x.as_slice().to_vec())
}

/// `x_1 ≤ x_k` for every `k ≥ 2`, within the tie tolerance.
pub fn zero_set_test(s: &FacetState) -> bool {
    let x1 = s.x(1);
    s.xs()[1..].iter().all(|&xk| x1 <= xk + TIE_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{reference_states, FacetCoordsD3};
    use crate::qmat::{basis_ket, phi_plus_vector};

    fn d3(z: f64, rbar: f64) -> FacetState {
        FacetCoordsD3::new(z, rbar).unwrap().to_facet()
    }

    #[test]
    fn pure_state_examples() {
        let prod = PureState::from_vector(3, &basis_ket(3, 0, 0)).unwrap();
        assert_eq!(e_lin_pure(&prod), 0.0);
        let phi = PureState::from_vector(3, &phi_plus_vector(3)).unwrap();
        assert!((e_lin_pure(&phi) - 4.0 / 3.0).abs() < 1e-14);
        assert!((e_lin_from_purity(&phi) - 4.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn sphere_parametrization() {
        let theta = [0.3, 1.1, 2.0];
        let p = sphere_point(&theta);
        assert!((p.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-15);
        let jac = sphere_jacobian(&theta);
        for a in 0..3 {
            let mut t = theta;
            t[a] += 1e-7;
            let q = sphere_point(&t);
            for i in 0..4 {
                assert!(((q[i] - p[i]) / 1e-7 - jac[(i, a)]).abs() < 1e-6);
            }
        }
        let u = sphere_point(&uniform_angles(4));
        assert!(u.iter().all(|v| (v - 0.5).abs() < 1e-15));
    }

    #[test]
    fn gradient_matches_finite_differences() {
        for d in 3..=5 {
            let s = reference_states(d).unwrap().rho_l[0].clone();
            let s = FacetState::new(d, s.xs().iter().map(|v| 0.5 * v + 0.5 / (d * d) as f64).collect()).unwrap();
            let n = (d - 1) * (d - 1);
            let theta: Vec<f64> = (0..n).map(|i| 0.2 + 0.37 * i as f64).collect();
            let (_, g) = objective(&s, &theta);
            for a in 0..n {
                let h = 1e-6;
                let mut tp = theta.clone();
                tp[a] += h;
                let mut tm = theta.clone();
                tm[a] -= h;
                let fd = (objective(&s, &tp).0 - objective(&s, &tm).0) / (2.0 * h);
                assert!((fd - g[a]).abs() < 1e-7, "d={d} a={a}: {fd} vs {}", g[a]);
            }
        }
    }

    #[test]
    fn rho_sep_minimum_is_zero_at_uniform_xi() {
        let s = reference_states(3).unwrap().rho_sep;
        let r = e_lin_tilde(&s, 4, DEFAULT_SEED).unwrap();
        assert!(r.value < 1e-14);
        let u = FacetPureParams::uniform(s).unwrap();
        assert!(e_lin_pure(&u.pure_state()) < 1e-15);
    }

    #[test]
    fn interior_point_of_phi_plus_side_is_positive() {
        let r = e_lin_tilde(&d3(0.9, 0.0), 16, DEFAULT_SEED).unwrap();
        assert!(r.value > 1e-3, "{r:?}");
    }

    #[test]
    fn more_restarts_never_raise_the_minimum() {
        let s = d3(0.5, 0.3);
        let mut last = f64::INFINITY;
        for r in [1, 2, 4, 8, 16] {
            let v = e_lin_tilde(&s, r, 7).unwrap().value;
            assert!(v <= last);
            last = v;
        }
    }

    #[test]
    fn zero_set_examples() {
        let refs = reference_states(3).unwrap();
        assert!(zero_set_test(&refs.rho_sep));
        assert!(!zero_set_test(&refs.phi_plus));
    }

    #[test]
    fn params_validation() {
        let s = reference_states(3).unwrap().rho_sep;
        assert!(FacetPureParams::new(s.clone(), vec![vec![1.0, 0.0, 0.0]; 1]).is_err());
        assert!(FacetPureParams::new(s.clone(), vec![vec![1.0, 1.0, 0.0]; 2]).is_err());
        let p = FacetPureParams::new(s, vec![vec![1.0, 0.0, 0.0], vec![0.0, 0.6, 0.8]]).unwrap();
        let e = e_lin_pure(&p.pure_state());
        assert!((e - e_lin_from_purity(&p.pure_state())).abs() < 1e-12);
    }
}

//! Independent numerical cross-checks: an explicit separable decomposition of
//! `ϱ_sep`, a Gilbert-type distance to the separable set and convex-hull
//! membership by linear programming.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::family::reference_states;
use crate::qmat::{check_local_dim, cr, idx, max_abs_diff, phase, ComplexMatrix, ComplexVector, DensityMatrix};

/// Rebuilds `ϱ_sep` as the uniform mixture of `|φ⟩⟨φ| ⊗ |φ̄⟩⟨φ̄|` over
/// `|φ_{b,ω}⟩ = d^{-1/2} Σ_k (−1)^{b_k} e^{iωk} |k⟩`, all sign patterns
/// `b ∈ {0,1}^d` and the phase grid `ω_n = 2πn/n_phases`. Returns the largest
/// entrywise deviation from `ϱ_sep`.
///
/// The grid reproduces the continuous phase average exactly once
/// `n_phases > 2(d−1)`.
pub fn rho_sep_decomposition_check(d: usize, n_phases: usize) -> Result<f64> {
    check_local_dim(d)?;
    if d > 12 {
        return Err(Error::Domain(format!("d = {d} too large for the 2^d sign average")));
    }
    if n_phases == 0 {
        return Err(Error::Domain("need at least one phase sample".into()));
    }
    let n = d * d;
    let amp = 1.0 / (d as f64).sqrt();
    let mut acc = ComplexMatrix::zeros(n, n);
    for b in 0..1usize << d {
        for t in 0..n_phases {
            let omega = 2.0 * PI * t as f64 / n_phases as f64;
            let phi: Vec<Complex64> = (0..d)
                .map(|k| {
                    let sign = if b >> k & 1 == 1 { -amp } else { amp };
                    phase(omega * k as f64) * sign
                })
                .collect();
            let v = ComplexVector::from_fn(n, |r, _| phi[r / d] * phi[r % d].conj());
            acc += &v * v.adjoint();
        }
    }
    acc /= cr(((1usize << d) * n_phases) as f64);
    let target = reference_states(d)?.rho_sep.to_family().to_matrix();
    Ok(max_abs_diff(&acc, &target))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GilbertReport {
    /// Hilbert–Schmidt distance from the input to the separable
    /// approximation found; an upper bound on the true distance.
    pub distance: f64,
    /// Iteration budget.
    pub iters: usize,
    /// Iterations actually run before the distance fell below the stop value.
    pub iters_used: usize,
    pub seed: u64,
    /// Product states with nonzero weight in the final approximation.
    pub atoms: usize,
}

const MAX_ATOMS: usize = 400;
const PRODUCT_RESTARTS: usize = 3;
const ALTERNATIONS: usize = 12;
const CORRECTIVE_STEPS: usize = 200;
const POWER_STEPS: usize = 8;

/// Upper bound on the Hilbert–Schmidt distance from `rho` to the separable
/// states after `iters` iterations.
///
/// Fully-corrective Frank–Wolfe: each iteration searches for the product
/// state `|ab⟩` maximizing `⟨ab|ρ − σ|ab⟩` by alternating power updates from
/// seeded random starts, adds it to the active set and re-optimizes the
/// mixture weights with pairwise steps. The distance never increases with
/// `iters`.
pub fn gilbert_distance(rho: &DensityMatrix, iters: usize, seed: u64) -> GilbertReport {
    gilbert_distance_until(rho, iters, seed, 1e-12)
}

/// As [`gilbert_distance`], but stops as soon as the bound drops below
/// `stop_below`. Because the bound is monotone, any threshold test at or
/// above `stop_below` gives the same answer as running the full budget.
pub fn gilbert_distance_until(rho: &DensityMatrix, iters: usize, seed: u64, stop_below: f64) -> GilbertReport {
    let d = rho.local_dim();
    let target = rho.matrix();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let first = best_product(target, d, &mut rng);
    let mut set = ActiveSet {
        overlap: vec![expect(target, &first)],
        atoms: vec![first],
        gram: vec![vec![1.0]],
        w: vec![1.0],
        gw: vec![1.0],
    };
    let mut approx = mixture(&set.atoms, &set.w, d * d);
    let mut best = hs_distance(target, &approx);
    let mut used = 0;

    while used < iters && best >= stop_below {
        used += 1;
        let residual = target - &approx;
        let v = best_product(&residual, d, &mut rng);
        let b = expect(target, &v);
        set.push(v, b);
        set.pairwise_steps(CORRECTIVE_STEPS);
        set.prune();
        approx = mixture(&set.atoms, &set.w, d * d);
        best = best.min(hs_distance(target, &approx));
    }
    GilbertReport { distance: best, iters, iters_used: used, seed, atoms: set.atoms.len() }
}

/// Mixture of product states with the quadratic model
/// `‖ρ − Σ w_i A_i‖² = wᵀGw − 2bᵀw + const`.
struct ActiveSet {
    atoms: Vec<ComplexVector>,
    /// `|⟨v_i|v_j⟩|²`
    gram: Vec<Vec<f64>>,
    /// `⟨v_i|ρ|v_i⟩`
    overlap: Vec<f64>,
    w: Vec<f64>,
    /// `G w`, kept in sync with `w`
    gw: Vec<f64>,
}

impl ActiveSet {
    fn push(&mut self, v: ComplexVector, b: f64) {
        let mut row: Vec<f64> = self.atoms.iter().map(|a| a.dotc(&v).norm_sqr()).collect();
        let gw_new: f64 = row.iter().zip(&self.w).map(|(g, w)| g * w).sum();
        for (g, &r) in self.gram.iter_mut().zip(&row) {
            g.push(r);
        }
        row.push(1.0);
        self.gram.push(row);
        self.overlap.push(b);
        self.atoms.push(v);
        self.w.push(0.0);
        self.gw.push(gw_new);
    }

    /// Pairwise Frank–Wolfe steps on the weights over the simplex.
    fn pairwise_steps(&mut self, steps: usize) {
        let m = self.w.len();
        for _ in 0..steps {
            let grad = |i: usize| self.gw[i] - self.overlap[i];
            let s = (0..m).min_by(|&i, &j| grad(i).total_cmp(&grad(j))).expect("non-empty");
            let Some(v) = (0..m).filter(|&i| self.w[i] > 0.0).max_by(|&i, &j| grad(i).total_cmp(&grad(j))) else {
                return;
            };
            let gap = grad(v) - grad(s);
            if s == v || gap <= 1e-18 {
                return;
            }
            let curv = self.gram[s][s] + self.gram[v][v] - 2.0 * self.gram[s][v];
            let gamma = if curv > 0.0 { (gap / curv).min(self.w[v]) } else { self.w[v] };
            self.w[s] += gamma;
            self.w[v] -= gamma;
            for (i, gwi) in self.gw.iter_mut().enumerate() {
                *gwi += gamma * (self.gram[i][s] - self.gram[i][v]);
            }
        }
    }

    /// Drops zero weights once they pile up, and the lightest atoms when the
    /// set is full.
    fn prune(&mut self) {
        let m = self.w.len();
        let zeros = self.w.iter().filter(|&&w| w <= 1e-15).count();
        if zeros * 4 < m && m <= MAX_ATOMS {
            return;
        }
        let mut keep: Vec<usize> = (0..m).filter(|&i| self.w[i] > 1e-15).collect();
        if keep.len() > MAX_ATOMS {
            keep.sort_by(|&a, &b| self.w[b].total_cmp(&self.w[a]));
            keep.truncate(MAX_ATOMS);
            keep.sort_unstable();
        }
        self.atoms = keep.iter().map(|&i| self.atoms[i].clone()).collect();
        self.gram = keep.iter().map(|&i| keep.iter().map(|&j| self.gram[i][j]).collect()).collect();
        self.overlap = keep.iter().map(|&i| self.overlap[i]).collect();
        self.w = keep.iter().map(|&i| self.w[i]).collect();
        let total: f64 = self.w.iter().sum();
        self.w.iter_mut().for_each(|v| *v /= total);
        self.gw = self.gram.iter().map(|row| row.iter().zip(&self.w).map(|(g, w)| g * w).sum()).collect();
    }
}

fn expect(m: &ComplexMatrix, v: &ComplexVector) -> f64 {
    v.dotc(&(m * v)).re
}

fn hs_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a - b).norm()
}

fn mixture(atoms: &[ComplexVector], w: &[f64], n: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    for (v, &wi) in atoms.iter().zip(w) {
        if wi > 0.0 {
            m.gerc(cr(wi), v, v, cr(1.0));
        }
    }
    m
}

/// Approximate maximizer of `⟨ab|H|ab⟩` over unit product vectors.
fn best_product(h: &ComplexMatrix, d: usize, rng: &mut ChaCha8Rng) -> ComplexVector {
    let mut best: Option<(f64, ComplexVector)> = None;
    for _ in 0..PRODUCT_RESTARTS {
        let mut a = random_unit(d, rng);
        let mut b = random_unit(d, rng);
        let mut value = f64::NEG_INFINITY;
        for _ in 0..ALTERNATIONS {
            // ⟨b|H|b⟩ acting on the first factor, then ⟨a|H|a⟩ on the second
            let ha = ComplexMatrix::from_fn(d, d, |i, k| {
                let mut s = cr(0.0);
                for j in 0..d {
                    for l in 0..d {
                        s += b[j].conj() * h[(idx(d, i, j), idx(d, k, l))] * b[l];
                    }
                }
                s
            });
            a = power_steps(&ha, a);
            let hb = ComplexMatrix::from_fn(d, d, |j, l| {
                let mut s = cr(0.0);
                for i in 0..d {
                    for k in 0..d {
                        s += a[i].conj() * h[(idx(d, i, j), idx(d, k, l))] * a[k];
                    }
                }
                s
            });
            b = power_steps(&hb, b);
            let val = b.dotc(&(&hb * &b)).re;
            let done = val <= value + 1e-15;
            value = value.max(val);
            if done {
                break;
            }
        }
        if best.as_ref().is_none_or(|(v, _)| value > *v) {
            best = Some((value, a.kronecker(&b)));
        }
    }
    let v = best.expect("at least one restart").1;
    let norm = v.norm();
    v / cr(norm)
}

/// A few shifted power iterations toward the top eigenvector of a small
/// Hermitian matrix; each step cannot lower the Rayleigh quotient.
fn power_steps(m: &ComplexMatrix, mut v: ComplexVector) -> ComplexVector {
    let shift = cr(m.norm());
    for _ in 0..POWER_STEPS {
        let next = m * &v + &v * shift;
        let norm = next.norm();
        if norm == 0.0 {
            break;
        }
        v = next / cr(norm);
    }
    v
}

fn random_unit(d: usize, rng: &mut ChaCha8Rng) -> ComplexVector {
    let v = ComplexVector::from_fn(d, |_, _| {
        Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    });
    let norm = v.norm();
    v / cr(norm)
}

/// True when `point` is a convex combination of `generators`, up to an L1
/// residual of `tol`.
pub fn hull_membership(point: &[f64], generators: &[Vec<f64>], tol: f64) -> Result<bool> {
    let n = point.len();
    if generators.is_empty() {
        return Err(Error::Shape("no generators".into()));
    }
    if let Some(g) = generators.iter().find(|g| g.len() != n) {
        return Err(Error::Shape(format!("generator has {} coordinates, point has {n}", g.len())));
    }
    let mut rows: Vec<Vec<f64>> = (0..n).map(|i| generators.iter().map(|g| g[i]).collect()).collect();
    rows.push(vec![1.0; generators.len()]);
    let mut rhs = point.to_vec();
    rhs.push(1.0);
    Ok(phase_one(&rows, &rhs) <= tol)
}

/// Minimum of `Σ|A λ − b|` over `λ ≥ 0`, via the phase-one simplex method
/// with Bland's rule. Zero exactly when `A λ = b, λ ≥ 0` is feasible.
pub fn phase_one(a: &[Vec<f64>], b: &[f64]) -> f64 {
    const EPS: f64 = 1e-12;
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let width = n + m + 1;
    let mut t: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
    for i in 0..m {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        let mut row = vec![0.0; width];
        for j in 0..n {
            row[j] = sign * a[i][j];
        }
        row[n + i] = 1.0;
        row[width - 1] = sign * b[i];
        t.push(row);
    }
    // reduced costs of the phase-one objective Σ artificials
    let mut cost = vec![0.0; width];
    for row in &t {
        for j in 0..n {
            cost[j] -= row[j];
        }
        cost[width - 1] -= row[width - 1];
    }
    t.push(cost);
    let mut basis: Vec<usize> = (n..n + m).collect();

    let max_pivots = 50 * (n + m) + 1000;
    for _ in 0..max_pivots {
        let Some(col) = (0..n + m).find(|&j| t[m][j] < -EPS) else {
            break;
        };
        let mut pivot: Option<(usize, f64)> = None;
        for i in 0..m {
            if t[i][col] > EPS {
                let ratio = t[i][width - 1] / t[i][col];
                let better = match pivot {
                    None => true,
                    Some((p, r)) => ratio < r - EPS || (ratio <= r + EPS && basis[i] < basis[p]),
                };
                if better {
                    pivot = Some((i, ratio));
                }
            }
        }
        let Some((p, _)) = pivot else {
            break;
        };
        let pv = t[p][col];
        t[p].iter_mut().for_each(|v| *v /= pv);
        let prow = t[p].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != p {
                let f = row[col];
                if f != 0.0 {
                    row.iter_mut().zip(&prow).for_each(|(v, pv)| *v -= f * pv);
                }
            }
        }
        basis[p] = col;
    }
    (-t[m][width - 1]).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{reference_states, FacetCoordsD3};
    use crate::qmat::phi_plus_vector;

    #[test]
    fn decomposition_reconstructs_rho_sep() {
        for d in 2..=6 {
            let r = rho_sep_decomposition_check(d, 4 * d).unwrap();
            assert!(r < 1e-12, "d={d}: {r}");
            assert!(rho_sep_decomposition_check(d, 2).unwrap() > 1e-3);
        }
    }

    #[test]
    fn decomposition_threshold_is_sharp() {
        // the grid is exact once n_phases > 2(d−1)
        for d in 3..=5 {
            assert!(rho_sep_decomposition_check(d, 2 * d - 1).unwrap() < 1e-12);
            assert!(rho_sep_decomposition_check(d, 2 * d - 2).unwrap() > 1e-3);
        }
    }

    #[test]
    fn gilbert_separates_phi_plus_from_rho_sep() {
        let sep = reference_states(3).unwrap().rho_sep.to_density_matrix().unwrap();
        let r = gilbert_distance(&sep, 2000, 42);
        assert!(r.distance < 1e-3, "{r:?}");
        let phi = DensityMatrix::from_pure(3, &phi_plus_vector(3)).unwrap();
        let r = gilbert_distance(&phi, 2000, 42);
        assert!(r.distance > 0.1, "{r:?}");
    }

    #[test]
    fn gilbert_is_monotone_and_seeded() {
        let s = FacetCoordsD3::new(0.25, 0.2).unwrap().to_facet().to_density_matrix().unwrap();
        let a = gilbert_distance(&s, 50, 3).distance;
        let b = gilbert_distance(&s, 400, 3).distance;
        assert!(b <= a);
        assert_eq!(gilbert_distance(&s, 50, 3), gilbert_distance(&s, 50, 3));
    }

    #[test]
    fn gilbert_stalls_on_bound_entangled_point() {
        let s = crate::family::facet_cross_section_d4(0.15, 0.7).unwrap();
        let rho = s.to_density_matrix().unwrap();
        let r = gilbert_distance(&rho, 600, 42);
        assert!(r.distance > 1e-4, "{r:?}");
    }

    #[test]
    fn hull_membership_basics() {
        let d = 3;
        let refs = reference_states(d).unwrap();
        let gens: Vec<Vec<f64>> = std::iter::once(refs.rho_sep.xs().to_vec())
            .chain(refs.rho_l.iter().map(|s| s.xs().to_vec()))
            .collect();
        assert!(hull_membership(refs.rho_sep.xs(), &gens, 1e-12).unwrap());
        assert!(!hull_membership(refs.phi_plus.xs(), &gens, 1e-12).unwrap());
        let mix: Vec<f64> = (0..d).map(|k| 0.2 * gens[0][k] + 0.5 * gens[1][k] + 0.3 * gens[2][k]).collect();
        assert!(hull_membership(&mix, &gens, 1e-12).unwrap());
        assert!(hull_membership(&[1.0], &[vec![1.0, 2.0]], 1e-12).is_err());
    }

    #[test]
    fn phase_one_detects_infeasible_system() {
        // λ1 + λ2 = 1, λ1 − λ2 = 3 needs λ2 = −1
        assert!(phase_one(&[vec![1.0, 1.0], vec![1.0, -1.0]], &[1.0, 3.0]) > 0.5);
        assert!(phase_one(&[vec![1.0, 1.0], vec![1.0, -1.0]], &[1.0, 0.5]) < 1e-15);
    }
}

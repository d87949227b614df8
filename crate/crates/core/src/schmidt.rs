//! Schmidt ranks of pure states and Schmidt-number windows for facet states.
//!
//! Lower bounds come from the fidelity witness: `⟨φ+|ϱ|φ+⟩ = d·x_1` exceeds
//! `(K−1)/d` only if the Schmidt number is at least `K`. Upper bounds come
//! from circulant pure states: a pure state whose coefficient matrix is
//! circulant twirls onto the facet, and on the surface
//! `√x_1 = Σ_{k≥2} √x_k` one circulant eigenvalue vanishes, so its Schmidt
//! rank is at most `d − 1`. Every facet state in the convex hull of that
//! surface, the diagonal states and the separable polytope therefore has
//! Schmidt number at most `d − 1`.

use num_complex::Complex64;
use serde::Serialize;

use crate::criteria::{classify_facet, Verdict, TIE_TOL};
use crate::error::{Error, Result};
use crate::family::{reference_states, FacetState};
use crate::oracle::hull_membership;
use crate::qmat::{check_local_dim, cr, singular_values, ComplexMatrix, ComplexVector};

/// Singular values above this count toward the Schmidt rank.
pub const RANK_TOL: f64 = 1e-9;
/// L1 residual accepted by the hull test.
pub const HULL_TOL: f64 = 1e-11;

/// A bipartite pure state given by its coefficient matrix `ψ_{jk} = ⟨jk|ψ⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    d: usize,
    coeffs: ComplexMatrix,
}

impl PureState {
    pub fn new(coeffs: ComplexMatrix) -> Result<Self> {
        let d = coeffs.nrows();
        check_local_dim(d)?;
        if coeffs.ncols() != d {
            return Err(Error::Shape(format!("coefficient matrix must be square, got {d}x{}", coeffs.ncols())));
        }
        let norm: f64 = coeffs.iter().map(|z| z.norm_sqr()).sum();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("pure state must be normalized, got norm² {norm}")));
        }
        Ok(Self { d, coeffs })
    }

    /// From a ket in the `|jk⟩ ↦ j·d + k` basis.
    pub fn from_vector(d: usize, v: &ComplexVector) -> Result<Self> {
        if v.len() != d * d {
            return Err(Error::Shape(format!("expected {} amplitudes, got {}", d * d, v.len())));
        }
        Self::new(ComplexMatrix::from_fn(d, d, |j, k| v[j * d + k]))
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn coeffs(&self) -> &ComplexMatrix {
        &self.coeffs
    }

    pub fn to_vector(&self) -> ComplexVector {
        let d = self.d;
        ComplexVector::from_fn(d * d, |r, _| self.coeffs[(r / d, r % d)])
    }
}

/// Number of singular values of the coefficient matrix above `tol`.
pub fn schmidt_rank(p: &PureState, tol: f64) -> usize {
    singular_values(p.coeffs()).into_iter().filter(|&s| s > tol).count()
}

/// Largest `K` with `(K−1)/d − d·x_1 < 0` beyond the tie tolerance, or 1.
pub fn witness_lower_bound(s: &FacetState) -> Result<usize> {
    s.ensure_valid()?;
    let d = s.d();
    let df = d as f64;
    let fidelity = df * s.x(1);
    Ok((2..=d).rev().find(|&k| (k - 1) as f64 / df - fidelity < -TIE_TOL).unwrap_or(1))
}

/// Pure state with circulant coefficients `ψ_{j,j⊕k} = sign_k √x_{k+1}`
/// (`sign_0 = +1`). It twirls back to `s` exactly.
pub fn circulant_pure_state(s: &FacetState, signs: &[f64]) -> Result<PureState> {
    s.ensure_valid()?;
    let d = s.d();
    if signs.len() != d - 1 {
        return Err(Error::Shape(format!("need {} signs, got {}", d - 1, signs.len())));
    }
    if signs.iter().any(|&v| v != 1.0 && v != -1.0) {
        return Err(Error::Domain("signs must be +1 or -1".into()));
    }
    let first: Vec<f64> = (0..d)
        .map(|k| {
            let amp = s.xs()[k].max(0.0).sqrt();
            if k == 0 { amp } else { signs[k - 1] * amp }
        })
        .collect();
    let coeffs = ComplexMatrix::from_fn(d, d, |j, c| cr(first[(c + d - j) % d]));
    // renormalize away the rounding of the square roots
    let norm = coeffs.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
    PureState::new(coeffs / cr(norm))
}

/// `x_1` on the surface `√x_1 = Σ_{k≥2} √x_k`, given `x_3..x_d` and with
/// `x_2` eliminated through the normalization:
/// `x_1 = (S + T·√(2S − T²))/2`, `S = 1/d − Σ x_tail`, `T = Σ √x_tail`.
pub fn surface_x1(d: usize, x_tail: &[f64]) -> Result<f64> {
    check_local_dim(d)?;
    if x_tail.len() != d - 2 {
        return Err(Error::Shape(format!("need {} tail entries x_3..x_d, got {}", d - 2, x_tail.len())));
    }
    if x_tail.iter().any(|&v| !v.is_finite() || v < 0.0) {
        return Err(Error::Domain("tail entries must be finite and nonnegative".into()));
    }
    let s = 1.0 / d as f64 - x_tail.iter().sum::<f64>();
    let t: f64 = x_tail.iter().map(|v| v.sqrt()).sum();
    if s < t * t - TIE_TOL {
        return Err(Error::Domain(format!("infeasible tail: need S >= T^2, got S={s}, T^2={}", t * t)));
    }
    let root = (2.0 * s - t * t).max(0.0).sqrt();
    Ok((s + t * root) / 2.0)
}

/// The full facet state on the surface for a given tail `x_3..x_d`.
pub fn surface_state(d: usize, x_tail: &[f64]) -> Result<FacetState> {
    let x1 = surface_x1(d, x_tail)?;
    let x2 = (x1.sqrt() - x_tail.iter().map(|v| v.sqrt()).sum::<f64>()).max(0.0).powi(2);
    let mut x = vec![x1, x2];
    x.extend_from_slice(x_tail);
    FacetState::new(d, x)
}

/// Both branches `x_1 = (1 − 3x_2 ± √3·√(2x_2 − 9x_2²))/6` of the `d = 3`
/// rank-deficiency curve, for `x_2 ∈ [0, 2/9]`.
pub fn curve_yb(x2: f64) -> Result<(f64, f64)> {
    if !(0.0..=2.0 / 9.0 + TIE_TOL).contains(&x2) {
        return Err(Error::Domain(format!("x2 = {x2} outside [0, 2/9]")));
    }
    let root = 3f64.sqrt() * (2.0 * x2 - 9.0 * x2 * x2).max(0.0).sqrt();
    let plus = 1.0 - 3.0 * x2 + root;
    // product of the roots is (1 − 6x_2)², so the minus branch has no cancellation
    let minus = (1.0 - 6.0 * x2).powi(2) / plus;
    Ok((plus / 6.0, minus / 6.0))
}

/// Surface points from a grid on the weight simplex: `w_k = n_k/m` with
/// `Σ_{k≥2} n_k = m`, `x_k = w_k² x_1`, `x_1 = 1/(d(1 + Σ w_k²))`.
pub fn surface_points(d: usize, m: usize) -> Result<Vec<FacetState>> {
    check_local_dim(d)?;
    if m == 0 {
        return Err(Error::Domain("need at least one subdivision".into()));
    }
    let mut out = Vec::new();
    let mut parts = vec![0usize; d - 1];
    compositions(m, 0, &mut parts, &mut |n| {
        let w: Vec<f64> = n.iter().map(|&v| v as f64 / m as f64).collect();
        let x1 = 1.0 / (d as f64 * (1.0 + w.iter().map(|v| v * v).sum::<f64>()));
        let mut x = vec![x1];
        x.extend(w.iter().map(|v| v * v * x1));
        out.push(FacetState::new(d, x).expect("surface point is normalized"));
    });
    Ok(out)
}

fn compositions(left: usize, pos: usize, parts: &mut [usize], emit: &mut impl FnMut(&[usize])) {
    if pos + 1 == parts.len() {
        parts[pos] = left;
        emit(parts);
        return;
    }
    for v in 0..=left {
        parts[pos] = v;
        compositions(left - v, pos + 1, parts, emit);
    }
}

/// Simplex subdivisions per tail dimension: 64 while the grid stays small,
/// fewer in higher dimension so the surface sample stays in the thousands.
pub fn default_subdivisions(d: usize) -> usize {
    match d {
        0..=4 => 64,
        5 => 16,
        6 => 8,
        _ => 4,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SchmidtBounds {
    pub lower: usize,
    pub upper: usize,
    pub lower_source: String,
    pub upper_source: String,
}

/// Precomputed hull generators for repeated Schmidt-number bounds at one `d`.
#[derive(Debug, Clone)]
pub struct SchmidtBoundsEngine {
    d: usize,
    generators: Vec<Vec<f64>>,
}

impl SchmidtBoundsEngine {
    pub fn new(d: usize, subdivisions: usize) -> Result<Self> {
        let refs = reference_states(d)?;
        let mut generators: Vec<Vec<f64>> = vec![refs.rho_sep.xs().to_vec()];
        generators.extend(refs.rho_l.iter().map(|s| s.xs().to_vec()));
        generators.extend(surface_points(d, subdivisions)?.iter().map(|s| s.xs().to_vec()));
        Ok(Self { d, generators })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn generator_count(&self) -> usize {
        self.generators.len()
    }

    /// True when `s` is inside the sampled hull of Schmidt-number-`(d−1)`
    /// generators.
    pub fn in_rank_deficient_hull(&self, s: &FacetState) -> Result<bool> {
        if s.d() != self.d {
            return Err(Error::Shape(format!("engine built for d={}, state has d={}", self.d, s.d())));
        }
        hull_membership(s.xs(), &self.generators, HULL_TOL)
    }

    pub fn bounds(&self, s: &FacetState) -> Result<SchmidtBounds> {
        let lower = witness_lower_bound(s)?;
        let d = self.d;
        let lower_source = if lower > 1 { "fidelity witness" } else { "trivial" }.to_string();
        if classify_facet(s)?.verdict == Verdict::Separable {
            return Ok(SchmidtBounds { lower, upper: 1, lower_source, upper_source: "separable polytope".into() });
        }
        let (upper, upper_source) = if d > 2 && self.in_rank_deficient_hull(s)? {
            (d - 1, "hull of rank-deficient circulant surface")
        } else {
            (d, "trivial")
        };
        Ok(SchmidtBounds { lower, upper, lower_source, upper_source: upper_source.into() })
    }
}

/// Schmidt-number window for a facet state with the default surface grid.
pub fn schmidt_bounds(s: &FacetState) -> Result<SchmidtBounds> {
    SchmidtBoundsEngine::new(s.d(), default_subdivisions(s.d()))?.bounds(s)
}

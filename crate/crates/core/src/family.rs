//! The cyclic- and phase-symmetric family of `d × d` states.
//!
//! A member is fixed by `d` diagonal orbit weights and `d − 1` off-diagonal
//! orbit values:
//!
//! * `ϱ_{kj,kj} = x_{(j−k mod d)+1}`
//! * `ϱ_{kk,jj} = y_{(k−j mod d)}` for `k ≠ j`
//!
//! The public accessors [`FamilyState::x`] and [`FamilyState::y`] are 1-based
//! to match these labels. The backing vectors are 0-based, so `x(1)` is
//! `xs()[0]` and `y(1)` is `ys()[0]`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmat::{self, c, check_local_dim, cr, idx, ComplexMatrix, DensityMatrix, TOL_HERM, TOL_PSD, TOL_TRACE};

/// Conjugate-symmetric `y` built from its first half: `y_{d−k} = conj(y_k)`.
fn conj_symmetric_y(d: usize, mut f: impl FnMut(usize) -> Complex64) -> Vec<Complex64> {
    let mut y = vec![cr(0.0); d - 1];
    for k in 1..=d / 2 {
        let v = f(k);
        if 2 * k == d {
            y[k - 1] = cr(v.re);
        } else {
            y[k - 1] = v;
            y[d - k - 1] = v.conj();
        }
    }
    y
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    ConjugateSymmetry { k: usize, residual: f64 },
    Normalization { total: f64 },
    NegativeWeight { k: usize, value: f64 },
    NegativeEigenvalue { j: usize, value: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ConjugateSymmetry { k, residual } => {
                write!(f, "y_{k} != conj(y_(d-{k})) (residual {residual:e})")
            }
            Violation::Normalization { total } => write!(f, "d*sum(x) = {total} != 1"),
            Violation::NegativeWeight { k, value } => write!(f, "x_{k} = {value} < 0"),
            Violation::NegativeEigenvalue { j, value } => {
                write!(f, "circulant eigenvalue lambda_{j} = {value:e} < 0")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// Circulant-block eigenvalues `λ_0 .. λ_{d−1}`.
    pub eigenvalues: Vec<f64>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn into_result(self) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidState(self.violations.iter().map(|v| v.to_string()).collect()))
        }
    }
}

fn check_weights(d: usize, x: &[f64], out: &mut Vec<Violation>) {
    let total = d as f64 * x.iter().sum::<f64>();
    if (total - 1.0).abs() > TOL_TRACE {
        out.push(Violation::Normalization { total });
    }
    for (k, &v) in x.iter().enumerate() {
        if v < -TOL_PSD {
            out.push(Violation::NegativeWeight { k: k + 1, value: v });
        }
    }
}

/// A member of the symmetric family.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyState {
    d: usize,
    x: Vec<f64>,
    y: Vec<Complex64>,
}

impl FamilyState {
    /// `x` holds `x_1..x_d`, `y` holds `y_1..y_{d−1}`. Rejects wrong lengths,
    /// non-finite values and `y` that is not conjugate symmetric.
    pub fn new(d: usize, x: Vec<f64>, y: Vec<Complex64>) -> Result<Self> {
        check_local_dim(d)?;
        if x.len() != d {
            return Err(Error::Shape(format!("x needs {d} entries, got {}", x.len())));
        }
        if y.len() != d - 1 {
            return Err(Error::Shape(format!("y needs {} entries, got {}", d - 1, y.len())));
        }
        if x.iter().any(|v| !v.is_finite()) || y.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Domain("non-finite parameter".into()));
        }
        for k in 1..d {
            let residual = (y[k - 1] - y[d - k - 1].conj()).norm();
            if residual > TOL_HERM {
                return Err(Error::InvalidState(vec![
                    Violation::ConjugateSymmetry { k, residual }.to_string()
                ]));
            }
        }
        Ok(Self { d, x, y })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// `x_k`, `k ∈ 1..=d`.
    pub fn x(&self, k: usize) -> f64 {
        self.x[k - 1]
    }

    /// `y_k`, `k ∈ 0..d`, with the convention `y_0 = x_1`.
    pub fn y(&self, k: usize) -> Complex64 {
        if k == 0 {
            cr(self.x[0])
        } else {
            self.y[k - 1]
        }
    }

    pub fn xs(&self) -> &[f64] {
        &self.x
    }

    pub fn ys(&self) -> &[Complex64] {
        &self.y
    }

    /// `λ_j = x_1 + Σ_k ω^{jk} y_k` for `j = 0..d−1`.
    pub fn circulant_eigenvalues(&self) -> Vec<f64> {
        let d = self.d;
        (0..d)
            .map(|j| {
                let mut s = cr(self.x[0]);
                for k in 1..d {
                    s += qmat::phase(2.0 * PI * ((j * k) % d) as f64 / d as f64) * self.y[k - 1];
                }
                s.re
            })
            .collect()
    }

    pub fn validate(&self) -> ValidationReport {
        let d = self.d;
        let mut violations = Vec::new();
        for k in 1..d {
            let residual = (self.y[k - 1] - self.y[d - k - 1].conj()).norm();
            if residual > TOL_HERM {
                violations.push(Violation::ConjugateSymmetry { k, residual });
            }
        }
        check_weights(d, &self.x, &mut violations);
        let eigenvalues = self.circulant_eigenvalues();
        for (j, &v) in eigenvalues.iter().enumerate() {
            if v < -TOL_PSD {
                violations.push(Violation::NegativeEigenvalue { j, value: v });
            }
        }
        ValidationReport { violations, eigenvalues }
    }

    pub fn ensure_valid(&self) -> Result<()> {
        self.validate().into_result()
    }

    /// True when every `y_k` equals `x_1` within `tol`.
    pub fn is_facet(&self, tol: f64) -> bool {
        self.y.iter().all(|v| (v - cr(self.x[0])).norm() <= tol)
    }

    pub fn to_facet(&self, tol: f64) -> Option<FacetState> {
        self.is_facet(tol).then(|| FacetState { d: self.d, x: self.x.clone() })
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        let d = self.d;
        let mut m = ComplexMatrix::zeros(d * d, d * d);
        for k in 0..d {
            for j in 0..d {
                m[(idx(d, k, j), idx(d, k, j))] = cr(self.x[(j + d - k) % d]);
                if k != j {
                    m[(idx(d, k, k), idx(d, j, j))] = self.y[(k + d - j) % d - 1];
                }
            }
        }
        m
    }

    pub fn to_density_matrix(&self) -> Result<DensityMatrix> {
        self.ensure_valid()?;
        DensityMatrix::new(self.d, self.to_matrix())
    }

    /// Reads the orbit entries of `rho`. Fails on the first entry that breaks
    /// the orbit pattern by more than `tol`.
    pub fn from_density_matrix(rho: &DensityMatrix, tol: f64) -> Result<Self> {
        let d = rho.local_dim();
        let m = rho.matrix();
        let n = d * d;
        let offending = |row: usize, col: usize, value: Complex64, expected: Complex64| Error::NotInFamily {
            row,
            col,
            value: format!("{value}"),
            expected: format!("{expected}"),
        };
        let x: Vec<f64> = (0..d).map(|m_| m[(idx(d, 0, m_), idx(d, 0, m_))].re).collect();
        let y = conj_symmetric_y(d, |k| m[(idx(d, k, k), idx(d, 0, 0))]);
        let mut expected = ComplexMatrix::zeros(n, n);
        for k in 0..d {
            for j in 0..d {
                expected[(idx(d, k, j), idx(d, k, j))] = cr(x[(j + d - k) % d]);
                if k != j {
                    expected[(idx(d, k, k), idx(d, j, j))] = y[(k + d - j) % d - 1];
                }
            }
        }
        for row in 0..n {
            for col in 0..n {
                if (m[(row, col)] - expected[(row, col)]).norm() > tol {
                    return Err(offending(row, col, m[(row, col)], expected[(row, col)]));
                }
            }
        }
        Self::new(d, x, y)
    }

    /// `Σ w_i s_i`; all states must share `d`.
    pub fn combination(terms: &[(f64, &FamilyState)]) -> Result<Self> {
        let first = terms.first().ok_or_else(|| Error::Domain("empty combination".into()))?;
        let d = first.1.d;
        let mut x = vec![0.0; d];
        let mut y = vec![cr(0.0); d - 1];
        for (w, s) in terms {
            if s.d != d {
                return Err(Error::Shape("mixed local dimensions".into()));
            }
            x.iter_mut().zip(&s.x).for_each(|(a, b)| *a += w * b);
            y.iter_mut().zip(&s.y).for_each(|(a, b)| *a += cr(*w) * b);
        }
        Self::new(d, x, y)
    }

    pub fn to_json(&self) -> FamilyStateJson {
        FamilyStateJson {
            d: self.d,
            x: self.x.clone(),
            y_re: self.y.iter().map(|v| v.re).collect(),
            y_im: self.y.iter().map(|v| v.im).collect(),
        }
    }
}

/// Member of the facet spanned by `|φ+⟩` and the diagonal states `ϱ_l`:
/// every `y_k = x_1`.
#[derive(Debug, Clone, PartialEq)]
pub struct FacetState {
    d: usize,
    x: Vec<f64>,
}

impl FacetState {
    pub fn new(d: usize, x: Vec<f64>) -> Result<Self> {
        check_local_dim(d)?;
        if x.len() != d {
            return Err(Error::Shape(format!("x needs {d} entries, got {}", x.len())));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite parameter".into()));
        }
        Ok(Self { d, x })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// `x_k`, `k ∈ 1..=d`.
    pub fn x(&self, k: usize) -> f64 {
        self.x[k - 1]
    }

    pub fn xs(&self) -> &[f64] {
        &self.x
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        check_weights(self.d, &self.x, &mut out);
        out
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidState(v.iter().map(|v| v.to_string()).collect()))
        }
    }

    pub fn to_family(&self) -> FamilyState {
        FamilyState {
            d: self.d,
            x: self.x.clone(),
            y: vec![cr(self.x[0]); self.d - 1],
        }
    }

    pub fn to_density_matrix(&self) -> Result<DensityMatrix> {
        self.ensure_valid()?;
        self.to_family().to_density_matrix()
    }

    pub fn to_json(&self) -> FacetStateJson {
        FacetStateJson { d: self.d, x: self.x.clone() }
    }
}

/// Fidelity-style coordinates of the `d = 3` facet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FacetCoordsD3 {
    pub z: f64,
    pub rbar: f64,
}

impl FacetCoordsD3 {
    pub fn new(z: f64, rbar: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&z) || !(-1.0..=1.0).contains(&rbar) {
            return Err(Error::Domain(format!("need z in [0,1], rbar in [-1,1]; got z={z}, rbar={rbar}")));
        }
        Ok(Self { z, rbar })
    }

    pub fn to_x(self) -> [f64; 3] {
        let Self { z, rbar } = self;
        [z / 3.0, (1.0 - z) * (1.0 + rbar) / 6.0, (1.0 - z) * (1.0 - rbar) / 6.0]
    }

    pub fn to_facet(self) -> FacetState {
        FacetState { d: 3, x: self.to_x().to_vec() }
    }
}

/// `d = 4` cross-section `x_1 = z/4`, `x_3 = (1−z)/16`,
/// `x_{2,4} = (3/16)(1−z)(1±r̄)/2`.
pub fn facet_cross_section_d4(z: f64, rbar: f64) -> Result<FacetState> {
    if !(0.0..=1.0).contains(&z) || !(-1.0..=1.0).contains(&rbar) {
        return Err(Error::Domain(format!("need z in [0,1], rbar in [-1,1]; got z={z}, rbar={rbar}")));
    }
    let d = 4.0;
    let side = 3.0 / (4.0 * d) * (1.0 - z);
    FacetState::new(
        4,
        vec![z / d, side * (1.0 + rbar) / 2.0, (1.0 - z) / (4.0 * d), side * (1.0 - rbar) / 2.0],
    )
}

/// The two-parameter `(z, r̄)` cross-section used for `d = 3` and `d = 4`.
pub fn facet_from_fidelity_coords(d: usize, z: f64, rbar: f64) -> Result<FacetState> {
    match d {
        3 => Ok(FacetCoordsD3::new(z, rbar)?.to_facet()),
        4 => facet_cross_section_d4(z, rbar),
        _ => Err(Error::Domain(format!("(z, rbar) coordinates are defined for d = 3 and d = 4, not d = {d}"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexKind {
    /// Single circulant eigenvalue `λ_j = 1`.
    Circulant(usize),
    /// `x_k = 1/d`, everything else zero (`k ∈ 2..=d`).
    Diagonal(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub kind: VertexKind,
    pub state: FamilyState,
}

/// The `2d − 1` extremal states: `d` circulant vertices (in `j` order)
/// followed by `d − 1` diagonal ones (in `k` order).
pub fn vertices(d: usize) -> Result<Vec<Vertex>> {
    check_local_dim(d)?;
    let inv = 1.0 / d as f64;
    let mut out = Vec::with_capacity(2 * d - 1);
    for j in 0..d {
        let mut x = vec![0.0; d];
        x[0] = inv;
        let y = conj_symmetric_y(d, |k| qmat::phase(-2.0 * PI * ((j * k) % d) as f64 / d as f64) * inv);
        out.push(Vertex { kind: VertexKind::Circulant(j), state: FamilyState::new(d, x, y)? });
    }
    for k in 2..=d {
        let mut x = vec![0.0; d];
        x[k - 1] = inv;
        out.push(Vertex { kind: VertexKind::Diagonal(k), state: FamilyState::new(d, x, vec![cr(0.0); d - 1])? });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceStates {
    pub phi_plus: FacetState,
    /// `ϱ_l` for `l = 1..d−1` (index `l − 1`).
    pub rho_l: Vec<FacetState>,
    pub rho_sep: FacetState,
    /// `(1/(d−1)) Σ_{k≥1} |φ_{k0}⟩⟨φ_{k0}|`.
    pub rho_0: FamilyState,
    /// Uniform mixture of the `ϱ_l`.
    pub rho_1: FamilyState,
}

pub fn reference_states(d: usize) -> Result<ReferenceStates> {
    check_local_dim(d)?;
    let df = d as f64;
    let unit = |k: usize| {
        let mut x = vec![0.0; d];
        x[k] = 1.0 / df;
        FacetState { d, x }
    };
    let mut rho_0_x = vec![0.0; d];
    rho_0_x[0] = 1.0 / df;
    let mut rho_1_x = vec![1.0 / (df * (df - 1.0)); d];
    rho_1_x[0] = 0.0;
    Ok(ReferenceStates {
        phi_plus: unit(0),
        rho_l: (1..d).map(unit).collect(),
        rho_sep: FacetState { d, x: vec![1.0 / (df * df); d] },
        rho_0: FamilyState::new(d, rho_0_x, vec![cr(-1.0 / (df * (df - 1.0))); d - 1])?,
        rho_1: FamilyState::new(d, rho_1_x, vec![cr(0.0); d - 1])?,
    })
}

fn dirichlet<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|v| v / s).collect()
}

/// Uniformly weighted random convex combination of the vertices.
pub fn random_family_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<FamilyState> {
    let verts = vertices(d)?;
    let w = dirichlet(rng, verts.len());
    let terms: Vec<(f64, &FamilyState)> = w.iter().copied().zip(verts.iter().map(|v| &v.state)).collect();
    let mut s = FamilyState::combination(&terms)?;
    // exact normalization after the weighted sum
    let total = d as f64 * s.x.iter().sum::<f64>();
    s.x.iter_mut().for_each(|v| *v /= total);
    s.y.iter_mut().for_each(|v| *v /= total);
    Ok(s)
}

/// Uniform random point of the facet simplex.
pub fn random_facet_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<FacetState> {
    check_local_dim(d)?;
    let x = dirichlet(rng, d).into_iter().map(|w| w / d as f64).collect();
    FacetState::new(d, x)
}

/// `{ "d", "x", "y_re", "y_im" }`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyStateJson {
    pub d: usize,
    pub x: Vec<f64>,
    pub y_re: Vec<f64>,
    pub y_im: Vec<f64>,
}

impl FamilyStateJson {
    pub fn to_state(&self) -> Result<FamilyState> {
        if self.y_re.len() != self.y_im.len() {
            return Err(Error::Shape("y_re and y_im differ in length".into()));
        }
        let y = self.y_re.iter().zip(&self.y_im).map(|(&re, &im)| c(re, im)).collect();
        FamilyState::new(self.d, self.x.clone(), y)
    }
}

/// `{ "d", "x" }`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FacetStateJson {
    pub d: usize,
    pub x: Vec<f64>,
}

impl FacetStateJson {
    pub fn to_state(&self) -> Result<FacetState> {
        FacetState::new(self.d, self.x.clone())
    }
}

/// Either state schema; a document with `y_re`/`y_im` is a family state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateJson {
    Family(FamilyStateJson),
    Facet(FacetStateJson),
}

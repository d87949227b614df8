//! Closed-form PPT and realignment criteria for the family, and the exact
//! classification of the facet.
//!
//! After reordering the basis the partial transpose of a family state is
//! block diagonal with `2 × 2` blocks, which gives the PPT condition
//! `√(x_{i+1} x_{d+1−i}) ≥ |y_i|`. The realigned matrix splits the same way
//! into a circulant block built from `x` plus a diagonal carrying the `y`.
//!
//! On the facet (`y_k = x_1`) a state is separable exactly when
//! `x_1 ≤ x_k` for every `k ≥ 2`, i.e. when it lies in the polytope spanned
//! by `ϱ_sep` and the diagonal states `ϱ_l`.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{FacetState, FamilyState};
use crate::qmat::{min_eig_hermitian, trace_norm, DensityMatrix, TOL_PSD};
use crate::weyl::omega_pow;

/// Equalities within this band resolve toward the non-entangled side.
pub const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Separable,
    BoundEntangled,
    NptEntangled,
    /// Entangled, but the PPT test could not be resolved numerically.
    EntangledUnknownPpt,
    Unknown,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Separable => "SEPARABLE",
            Verdict::BoundEntangled => "BOUND_ENTANGLED",
            Verdict::NptEntangled => "NPT_ENTANGLED",
            Verdict::EntangledUnknownPpt => "ENTANGLED_UNKNOWN_PPT",
            Verdict::Unknown => "UNKNOWN",
        }
    }

    pub fn is_entangled(self) -> bool {
        matches!(
            self,
            Verdict::BoundEntangled | Verdict::NptEntangled | Verdict::EntangledUnknownPpt
        )
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub d: usize,
    pub x: Vec<f64>,
    pub verdict: Verdict,
    pub ppt: bool,
    pub ccnr_value: f64,
    /// `√(x_{i+1} x_{d+1−i}) − |y_i|` for `i = 1..d−1`.
    pub ppt_margins: Vec<f64>,
    pub notes: Vec<String>,
}

impl ClassificationReport {
    pub fn min_ppt_margin(&self) -> f64 {
        self.ppt_margins.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn csv_header(d: usize) -> String {
        let mut cols = vec!["d".to_string()];
        cols.extend((1..=d).map(|k| format!("x{k}")));
        cols.extend(["verdict", "ppt", "ccnr", "min_ppt_margin"].map(String::from));
        cols.join(",")
    }

    /// `d, x..., verdict, ppt, ccnr_value, min ppt margin`
    pub fn to_csv_row(&self) -> String {
        let mut cols = vec![self.d.to_string()];
        cols.extend(self.x.iter().map(|v| format_float(*v)));
        cols.push(self.verdict.to_string());
        cols.push(self.ppt.to_string());
        cols.push(format_float(self.ccnr_value));
        cols.push(format_float(self.min_ppt_margin()));
        cols.join(",")
    }
}

/// Shortest representation that round-trips, so CSV output is byte-stable.
/// Negative zero prints as `0.0`.
pub fn format_float(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:?}")
}

fn facet_margins(x: &[f64]) -> Vec<f64> {
    let d = x.len();
    (1..d)
        .map(|i| (x[i].max(0.0) * x[d - i].max(0.0)).sqrt() - x[0])
        .collect()
}

/// PPT test from the `2 × 2` blocks of the partial transpose. Returns the
/// verdict and the margins `√(x_{i+1} x_{d+1−i}) − |y_i|`.
pub fn ppt_analytic(s: &FamilyState) -> Result<(bool, Vec<f64>)> {
    s.ensure_valid()?;
    let d = s.d();
    let margins: Vec<f64> = (1..d)
        .map(|i| (s.x(i + 1).max(0.0) * s.x(d + 1 - i).max(0.0)).sqrt() - s.y(i).norm())
        .collect();
    let ppt = margins.iter().all(|&m| m >= -TIE_TOL);
    Ok((ppt, margins))
}

/// `d Σ_j |y_j| + Σ_j |Σ_k x_{k+1} ω^{kj}|`, the trace norm of the realigned
/// matrix.
pub fn ccnr_analytic(s: &FamilyState) -> Result<f64> {
    s.ensure_valid()?;
    Ok(ccnr_value(s.d(), s.xs(), s.ys().iter().map(|y| y.norm()).sum()))
}

fn ccnr_value(d: usize, x: &[f64], sum_abs_y: f64) -> f64 {
    let circulant: f64 = (0..d)
        .map(|j| {
            (0..d)
                .map(|k| omega_pow(d, k * j) * x[k])
                .sum::<num_complex::Complex64>()
                .norm()
        })
        .sum();
    d as f64 * sum_abs_y + circulant
}

/// Complete classification of a facet state.
pub fn classify_facet(s: &FacetState) -> Result<ClassificationReport> {
    s.ensure_valid()?;
    let d = s.d();
    let x = s.xs();
    let x1 = x[0];
    let mut notes = Vec::new();

    let ppt_margins = facet_margins(x);
    let ppt = ppt_margins.iter().all(|&m| m >= -TIE_TOL);
    if ppt_margins.iter().any(|m| m.abs() <= TIE_TOL) {
        notes.push("PPT margin within tie tolerance; resolved as PPT".to_string());
    }
    let ccnr = ccnr_value(d, x, (d - 1) as f64 * x1.abs());

    let gaps: Vec<f64> = x[1..].iter().map(|&xk| xk - x1).collect();
    let separable = gaps.iter().all(|&g| g >= -TIE_TOL);
    if separable && gaps.iter().any(|g| g.abs() <= TIE_TOL) {
        notes.push("x_1 = min x_k within tie tolerance; on the separable polytope boundary".to_string());
    }

    let verdict = if separable {
        notes.push("in the polytope spanned by rho_sep and the diagonal states".to_string());
        Verdict::Separable
    } else if ppt {
        notes.push("x_1 > min x_k: outside the separable polytope, PPT".to_string());
        Verdict::BoundEntangled
    } else {
        notes.push("x_1 > min x_k: outside the separable polytope, NPT".to_string());
        Verdict::NptEntangled
    };
    if ccnr > 1.0 + TIE_TOL {
        notes.push("realignment criterion detects entanglement".to_string());
    } else if verdict.is_entangled() {
        notes.push("realignment criterion does not detect this entangled state".to_string());
    }

    Ok(ClassificationReport { d, x: x.to_vec(), verdict, ppt, ccnr_value: ccnr, ppt_margins, notes })
}

/// Classification of a general family state. Separability is only asserted
/// on the facet; elsewhere undecided states are reported as `UNKNOWN`.
pub fn classify_general(s: &FamilyState) -> Result<ClassificationReport> {
    s.ensure_valid()?;
    if let Some(facet) = s.to_facet(TIE_TOL) {
        let mut report = classify_facet(&facet)?;
        report.notes.insert(0, "facet state: exact classification".to_string());
        return Ok(report);
    }
    let d = s.d();
    let (ppt, ppt_margins) = ppt_analytic(s)?;
    let ccnr = ccnr_analytic(s)?;
    let ccnr_detects = ccnr > 1.0 + TIE_TOL;
    let mut notes = vec!["off-facet state: PPT and realignment criteria only".to_string()];
    let verdict = match (ccnr_detects, ppt) {
        (_, false) => {
            notes.push("negative partial transpose".to_string());
            Verdict::NptEntangled
        }
        (true, true) => {
            notes.push("PPT and detected by the realignment criterion".to_string());
            Verdict::BoundEntangled
        }
        (false, true) => {
            notes.push("PPT and not detected by the realignment criterion".to_string());
            Verdict::Unknown
        }
    };
    Ok(ClassificationReport { d, x: s.xs().to_vec(), verdict, ppt, ccnr_value: ccnr, ppt_margins, notes })
}

/// Numerical PPT and realignment tests on an arbitrary dense state.
pub fn classify_dense(rho: &DensityMatrix) -> Result<ClassificationReport> {
    let d = rho.local_dim();
    let min_pt = min_eig_hermitian(&rho.partial_transpose())?;
    let ccnr = trace_norm(&rho.realign());
    let ccnr_detects = ccnr > 1.0 + TOL_PSD;
    let mut notes = vec![format!("dense test: min eigenvalue of partial transpose {min_pt:e}")];
    let ppt = min_pt >= -TOL_PSD;
    let verdict = if min_pt < -TOL_PSD {
        Verdict::NptEntangled
    } else if ccnr_detects && min_pt < 0.0 {
        notes.push("partial transpose eigenvalue inside the solver noise band".to_string());
        Verdict::EntangledUnknownPpt
    } else if ccnr_detects {
        Verdict::BoundEntangled
    } else {
        Verdict::Unknown
    };
    let x = (0..d).map(|m| rho.get(0, m, 0, m).re).collect();
    Ok(ClassificationReport { d, x, verdict, ppt, ccnr_value: ccnr, ppt_margins: vec![min_pt], notes })
}

/// `β_+` for the PPT band at given `x_1 ≤ 1/d²`.
pub fn beta_plus(d: usize, x1: f64) -> Result<f64> {
    let df = d as f64;
    if d < 4 {
        return Err(Error::Domain(format!("the PPT band needs d >= 4, got {d}")));
    }
    if !(0.0..=1.0 / (df * df) + TIE_TOL).contains(&x1) {
        return Err(Error::Domain(format!("x1 = {x1} outside [0, 1/d^2]")));
    }
    let c = (1.0 / df - df * x1).max(0.0);
    if c == 0.0 {
        return Ok(0.0);
    }
    // −c/2 + √(c²/4 + c·x1), rationalized to avoid cancellation
    Ok(c * x1 / (c / 2.0 + (c * c / 4.0 + c * x1).sqrt()))
}

/// Facet states `x_k = x_1` except `x_l = x_1 − β` and
/// `x_{d+2−l} = 1/d − (d−1)x_1 + β`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandState {
    pub d: usize,
    pub x1: f64,
    pub l: usize,
    pub beta: f64,
}

impl BandState {
    pub fn new(d: usize, x1: f64, l: usize, beta: f64) -> Result<Self> {
        let df = d as f64;
        if d < 4 || !(2..=d / 2).contains(&l) {
            return Err(Error::Domain(format!("need d >= 4 and l in 2..={}, got d={d}, l={l}", d / 2)));
        }
        if !(0.0..=1.0 / (df * df) + TIE_TOL).contains(&x1) {
            return Err(Error::Domain(format!("x1 = {x1} outside [0, 1/d^2]")));
        }
        if !(0.0..=x1).contains(&beta) {
            return Err(Error::Domain(format!("beta = {beta} outside [0, x1]")));
        }
        Ok(Self { d, x1, l, beta })
    }

    pub fn to_facet(&self) -> FacetState {
        let d = self.d;
        let mut x = vec![self.x1; d];
        x[self.l - 1] = self.x1 - self.beta;
        x[d + 1 - self.l] = 1.0 / d as f64 - (d - 1) as f64 * self.x1 + self.beta;
        FacetState::new(d, x).expect("band parameters checked in new")
    }

    /// Index `i` of the PPT condition that couples `x_l` and `x_{d+2−l}`.
    pub fn touched_margin_index(&self) -> usize {
        self.l - 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandCheck {
    pub entangled: bool,
    pub ccnr_value: f64,
    /// `ccnr_value − 1`
    pub margin: f64,
}

/// Realignment check for a band state; entangled for every `β ∈ (0, x_1]`.
pub fn band_is_entangled(b: &BandState) -> Result<BandCheck> {
    let ccnr = ccnr_analytic(&b.to_facet().to_family())?;
    Ok(BandCheck { entangled: ccnr > 1.0 + TIE_TOL, ccnr_value: ccnr, margin: ccnr - 1.0 })
}

//! Turning command-line flags and JSON files into states.

use std::io::Read;
use std::path::Path;

use axisym::family::{facet_from_fidelity_coords, StateJson};
use axisym::qmat::{c, DensityMatrix, DensityMatrixJson};
use axisym::{FacetState, FamilyState};
use clap::Args;
use serde::de::DeserializeOwned;

use crate::error::{CliError, CliResult};

/// Flags that describe one family or facet state.
#[derive(Debug, Clone, Default, Args)]
pub struct StateArgs {
    /// Local dimension
    #[arg(long)]
    pub d: Option<usize>,
    /// Diagonal orbit weights x_1..x_d, comma separated (fractions like 1/80 allowed)
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    /// Real parts of y_1..y_{d-1}; omit for a facet state (y_k = x_1)
    #[arg(long, allow_hyphen_values = true)]
    pub y: Option<String>,
    /// Imaginary parts of y_1..y_{d-1} (default all zero)
    #[arg(long, allow_hyphen_values = true, requires = "y")]
    pub y_im: Option<String>,
    /// Treat the state as a facet state; rejects --y
    #[arg(long, conflicts_with_all = ["y", "y_im"])]
    pub facet: bool,
    /// Fidelity coordinate z in [0, 1] (d = 3 or d = 4 facet cross-section)
    #[arg(long, requires = "rbar", conflicts_with = "x")]
    pub z: Option<f64>,
    /// Coordinate rbar in [-1, 1], paired with --z
    #[arg(long, requires = "z", allow_hyphen_values = true)]
    pub rbar: Option<f64>,
    /// FamilyState or FacetState JSON file ("-" for stdin)
    #[arg(long, conflicts_with_all = ["x", "y", "y_im", "z", "rbar"])]
    pub json: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum State {
    Family(FamilyState),
    Facet(FacetState),
}

impl State {
    pub fn d(&self) -> usize {
        match self {
            State::Family(s) => s.d(),
            State::Facet(s) => s.d(),
        }
    }

    /// The facet form, if the state lies on the facet.
    pub fn facet(&self) -> Option<FacetState> {
        match self {
            State::Facet(s) => Some(s.clone()),
            State::Family(s) => s.to_facet(axisym::criteria::TIE_TOL),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub state: State,
    pub notes: Vec<String>,
}

/// Comma-separated reals; each entry may be a fraction `p/q`.
pub fn parse_list(text: &str) -> CliResult<Vec<f64>> {
    text.split(',').map(|t| parse_number(t.trim())).collect()
}

fn parse_number(t: &str) -> CliResult<f64> {
    let bad = || CliError::Input(format!("not a number: {t:?}"));
    let v = match t.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|_| bad())?;
            let q: f64 = q.trim().parse().map_err(|_| bad())?;
            p / q
        }
        None => t.parse().map_err(|_| bad())?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

pub fn read_text(path: &str) -> CliResult<String> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| CliError::io(Path::new("<stdin>"), e))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| CliError::io(Path::new(path), e))
    }
}

pub fn read_json<T: DeserializeOwned>(path: &str) -> CliResult<T> {
    Ok(serde_json::from_str(&read_text(path)?)?)
}

pub fn read_density_matrix(path: &str) -> CliResult<DensityMatrix> {
    let json: DensityMatrixJson = read_json(path)?;
    Ok(DensityMatrix::from_json(&json)?)
}

fn check_d(flag: Option<usize>, actual: usize) -> CliResult<()> {
    match flag {
        Some(d) if d != actual => Err(CliError::Input(format!("--d {d} does not match the state's d = {actual}"))),
        _ => Ok(()),
    }
}

/// Builds the state; inline `--x` input whose trace is off by at most
/// `renorm_tol` is rescaled and a note records it.
pub fn resolve_state(args: &StateArgs, renorm_tol: f64) -> CliResult<Resolved> {
    let mut notes = Vec::new();
    if let Some(path) = &args.json {
        let state = match read_json::<StateJson>(path)? {
            StateJson::Family(j) => State::Family(j.to_state()?),
            StateJson::Facet(j) => State::Facet(j.to_state()?),
        };
        let state = match state {
            State::Family(s) if args.facet => {
                State::Facet(s.to_facet(axisym::criteria::TIE_TOL).ok_or_else(|| {
                    CliError::Input("--facet given but the JSON state is not on the facet".into())
                })?)
            }
            other => other,
        };
        check_d(args.d, state.d())?;
        return Ok(Resolved { state, notes });
    }
    let d = args.d.ok_or_else(|| CliError::Input("--d is required with --x or --z/--rbar".into()))?;
    if let (Some(z), Some(rbar)) = (args.z, args.rbar) {
        return Ok(Resolved { state: State::Facet(facet_from_fidelity_coords(d, z, rbar)?), notes });
    }
    let x_text = args.x.as_ref().ok_or_else(|| CliError::Input("give one of --x, --z/--rbar or --json".into()))?;
    let mut x = parse_list(x_text)?;
    if x.len() != d {
        return Err(CliError::Input(format!("--x has {} entries, expected d = {d}", x.len())));
    }
    let mut y = match &args.y {
        Some(re) => {
            let re = parse_list(re)?;
            let im = match &args.y_im {
                Some(t) => parse_list(t)?,
                None => vec![0.0; re.len()],
            };
            if re.len() != d - 1 || im.len() != d - 1 {
                return Err(CliError::Input(format!("--y and --y-im need d - 1 = {} entries", d - 1)));
            }
            Some(re.iter().zip(&im).map(|(&a, &b)| c(a, b)).collect::<Vec<_>>())
        }
        None => None,
    };

    let trace = d as f64 * x.iter().sum::<f64>();
    let deviation = trace - 1.0;
    if deviation.abs() > renorm_tol {
        return Err(CliError::Input(format!(
            "d * sum(x) = {trace} differs from 1 by more than {renorm_tol:e}"
        )));
    }
    if deviation != 0.0 {
        x.iter_mut().for_each(|v| *v /= trace);
        if let Some(y) = y.as_mut() {
            y.iter_mut().for_each(|v| *v /= trace);
        }
        notes.push(format!("input rescaled by 1/{trace} to unit trace"));
    }

    let state = match y {
        Some(y) => State::Family(FamilyState::new(d, x, y)?),
        None => {
            if !args.facet {
                notes.push("no --y given; treated as a facet state (y_k = x_1)".into());
            }
            State::Facet(FacetState::new(d, x)?)
        }
    };
    Ok(Resolved { state, notes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inline(d: usize, x: &str) -> StateArgs {
        StateArgs { d: Some(d), x: Some(x.into()), ..Default::default() }
    }

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_list("1/80, 0.5,-2").unwrap(), vec![1.0 / 80.0, 0.5, -2.0]);
        assert!(parse_list("1,,2").is_err());
        assert!(parse_list("1/0").is_err());
        assert!(parse_list("nan").is_err());
    }

    #[test]
    fn small_trace_error_is_rescaled_with_a_note() {
        let r = resolve_state(&inline(3, "0.111111,0.111111,0.111111"), 1e-4).unwrap();
        let State::Facet(s) = &r.state else { panic!("expected facet") };
        assert!((s.xs().iter().sum::<f64>() - 1.0 / 3.0).abs() < 1e-15);
        assert!(r.notes.iter().any(|n| n.contains("rescaled")));
    }

    #[test]
    fn large_trace_error_is_rejected() {
        assert!(matches!(resolve_state(&inline(3, "0.2,0.2,0.2"), 1e-4), Err(CliError::Input(_))));
    }

    #[test]
    fn y_makes_a_family_state() {
        let mut a = inline(3, "1/3,0,0");
        a.y = Some("1/3,1/3".into());
        let r = resolve_state(&a, 1e-4).unwrap();
        assert!(matches!(r.state, State::Family(_)));
        assert!(r.notes.is_empty());
        assert!(r.state.facet().is_some());
    }

    #[test]
    fn coordinates_and_errors() {
        let a = StateArgs { d: Some(3), z: Some(1.0), rbar: Some(0.0), ..Default::default() };
        let r = resolve_state(&a, 1e-4).unwrap();
        assert_eq!(r.state.facet().unwrap().xs(), &[1.0 / 3.0, 0.0, 0.0]);
        assert!(resolve_state(&StateArgs { d: Some(3), ..Default::default() }, 1e-4).is_err());
        assert!(resolve_state(&inline(4, "0.25,0,0"), 1e-4).is_err());
        assert!(resolve_state(&StateArgs { x: Some("1".into()), ..Default::default() }, 1e-4).is_err());
    }
}

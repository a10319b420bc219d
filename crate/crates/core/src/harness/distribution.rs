use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{resolve, SCHEMA};
use crate::error::{Error, Result};
use crate::linalg::{DensityState, Operator, C64};
use crate::observables::{born_distribution, canonical_pvm, pullback_povm, Distribution};

/// A frame state on `L²(X)`.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Localized(usize),
    InvariantPure,
    MaximallyMixed,
    /// JSON density matrix in the operator format.
    File(PathBuf),
}

impl FromStr for StateSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(x) = s.strip_prefix("localized:").or_else(|| s.strip_prefix("localised:")) {
            return x
                .parse()
                .map(StateSpec::Localized)
                .map_err(|_| Error::config("state", format!("`{x}` is not a point index")));
        }
        Ok(match s {
            "invariant-pure" => StateSpec::InvariantPure,
            "maximally-mixed" => StateSpec::MaximallyMixed,
            path => StateSpec::File(PathBuf::from(path)),
        })
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateSpec::Localized(x) => write!(f, "localized:{x}"),
            StateSpec::InvariantPure => f.write_str("invariant-pure"),
            StateSpec::MaximallyMixed => f.write_str("maximally-mixed"),
            StateSpec::File(p) => write!(f, "{}", p.display()),
        }
    }
}

impl StateSpec {
    pub fn build(&self, n: usize) -> Result<DensityState> {
        match self {
            StateSpec::Localized(x) if *x < n => Ok(DensityState::basis(n, *x)),
            StateSpec::Localized(x) => Err(Error::config("state", format!("point {x} is outside 0..{n}"))),
            StateSpec::InvariantPure => DensityState::pure(&nalgebra::DVector::from_element(n, C64::new(1.0, 0.0))),
            StateSpec::MaximallyMixed => Ok(DensityState::maximally_mixed(n)),
            StateSpec::File(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    Error::config(
                        "state",
                        format!("`{}`: not a builtin state and unreadable: {e}", path.display()),
                    )
                })?;
                let op: Operator = serde_json::from_str(&text)
                    .map_err(|e| Error::config("state", format!("{}: {e}", path.display())))?;
                op.require_dim(n)?;
                DensityState::new(op)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Probability {
    pub outcome: String,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionReport {
    pub schema: String,
    pub group: String,
    pub base_point: usize,
    pub state: String,
    /// Canonical PVM on `X`.
    pub over_x: Vec<Probability>,
    /// Pulled-back POVM on `G`.
    pub over_g: Vec<Probability>,
}

fn labelled(d: &Distribution) -> Vec<Probability> {
    d.probabilities
        .iter()
        .enumerate()
        .map(|(i, &p)| Probability {
            outcome: d.outcome_space.label(i).to_string(),
            probability: p,
        })
        .collect()
}

/// Born distributions of a frame state against the canonical PVM and the
/// pulled-back POVM at `base`.
pub fn distribution_command(group: &str, base: Option<usize>, state: &StateSpec) -> Result<DistributionReport> {
    let space = resolve(group)?;
    let frame = canonical_pvm(&space.frame_action).map_err(|e| Error::config("group", e.to_string()))?;
    let n = space.frame_action.n_points();
    let base = base.unwrap_or(space.default_base);
    if base >= n {
        return Err(Error::config("base_point", format!("{base} is outside 0..{n}")));
    }
    let rho = state.build(n)?;
    let over_x = born_distribution(frame.observable(), &rho)?;
    let pulled = pullback_povm(&frame, base)?;
    let over_g = born_distribution(pulled.observable(), &rho)?;
    Ok(DistributionReport {
        schema: SCHEMA.to_string(),
        group: space.name,
        base_point: base,
        state: state.to_string(),
        over_x: labelled(&over_x),
        over_g: labelled(&over_g),
    })
}

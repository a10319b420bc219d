//! Builtin homogeneous spaces and group-file loading.

use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GroupAction, GroupSpec};
use crate::linalg::Operator;
use crate::representations::{GroupRef, RepKind, RepSpec, UnitaryRep};

pub const BUILTIN_NAMES: [&str; 4] = ["z4", "s3", "s4", "d4"];

/// A group with its defining permutation action, the action carried by the
/// frame, and a default system representation.
#[derive(Debug, Clone)]
pub struct Space {
    pub name: String,
    pub spec: GroupSpec,
    pub group: Arc<FiniteGroup>,
    pub defining: GroupAction,
    pub frame_action: GroupAction,
    pub default_rep: RepSpec,
    pub default_base: usize,
}

fn rotation() -> Operator {
    Operator::from_real_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).expect("2x2")
}

fn builtin_parts(name: &str) -> Option<(GroupSpec, bool, RepSpec)> {
    let tensor = RepSpec {
        group: None,
        kind: RepKind::TensorFactor,
        factor_dim: Some(2),
        generator_matrices: None,
    };
    let explicit = |mats: Vec<Operator>| RepSpec {
        group: None,
        kind: RepKind::Explicit,
        factor_dim: None,
        generator_matrices: Some(mats),
    };
    let spec = |symbols, generators| GroupSpec { symbols, generators };
    Some(match name {
        "z4" => (spec(4, vec![vec![1, 2, 3, 0]]), true, explicit(vec![rotation()])),
        "s3" => (spec(3, vec![vec![1, 0, 2], vec![1, 2, 0]]), false, tensor),
        "s4" => (spec(4, vec![vec![1, 0, 2, 3], vec![1, 2, 3, 0]]), false, tensor),
        "d4" => (
            spec(4, vec![vec![1, 2, 3, 0], vec![0, 3, 2, 1]]),
            false,
            explicit(vec![rotation(), Operator::diagonal(&[1.0, -1.0])]),
        ),
        _ => return None,
    })
}

/// `z4` acts on itself; `s3`, `s4` and `d4` act on their defining points.
pub fn builtin(name: &str) -> Result<Space> {
    let (spec, regular, default_rep) =
        builtin_parts(name).ok_or_else(|| Error::config("group", format!("unknown builtin `{name}`")))?;
    let (group, defining) = spec.build()?;
    let frame_action = if regular {
        GroupAction::left_regular(&group)
    } else {
        defining.clone()
    };
    let default_base = if regular { 0 } else { frame_action.n_points() - 1 };
    Ok(Space {
        name: name.to_string(),
        spec,
        group,
        defining,
        frame_action,
        default_rep,
        default_base,
    })
}

/// Reads a group file; the frame carries the defining action and the system
/// the permutation representation unless overridden.
pub fn load_group_file(path: &Path) -> Result<Space> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::config("group", format!("{}: {e}", path.display())))?;
    let spec: GroupSpec =
        serde_json::from_str(&text).map_err(|e| Error::config("group", format!("{}: {e}", path.display())))?;
    from_spec(path.display().to_string(), spec).map_err(|e| Error::config("group", format!("{}: {e}", path.display())))
}

fn from_spec(name: String, spec: GroupSpec) -> Result<Space> {
    let (group, defining) = spec.build()?;
    Ok(Space {
        name,
        spec,
        group,
        frame_action: defining.clone(),
        defining,
        default_rep: RepSpec {
            group: None,
            kind: RepKind::Permutation,
            factor_dim: None,
            generator_matrices: None,
        },
        default_base: 0,
    })
}

/// A builtin name, or else a path to a group file.
pub fn resolve(group: &str) -> Result<Space> {
    if BUILTIN_NAMES.contains(&group) {
        return builtin(group);
    }
    let path = Path::new(group);
    if !path.exists() {
        return Err(Error::config(
            "group",
            format!(
                "`{group}` is neither a builtin ({}) nor an existing file",
                BUILTIN_NAMES.join(", ")
            ),
        ));
    }
    load_group_file(path)
}

impl Space {
    /// Builds `rep` (or the default) and checks any group it names against
    /// this space.
    pub fn system_rep(&self, rep: Option<&RepSpec>) -> Result<UnitaryRep> {
        let rep = rep.unwrap_or(&self.default_rep);
        match &rep.group {
            None => {}
            Some(GroupRef::Name(n)) if *n == self.name => {}
            Some(GroupRef::Spec(s)) if *s == self.spec => {}
            Some(other) => {
                return Err(Error::config(
                    "system_rep.group",
                    format!("representation is for {other:?}, not `{}`", self.name),
                ))
            }
        }
        rep.build(&self.defining)
    }
}

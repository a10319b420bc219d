//! Unitary representations and invariant-vector analysis.

use std::sync::Arc;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GroupAction, GroupSpec, Subgroup};
use crate::linalg::{self, check_dim, check_unitary, Operator, C64};
use crate::EPS;

/// Groups up to this order have every product checked on construction.
pub const EXHAUSTIVE_ORDER: usize = 48;

const SAMPLED_PAIRS: usize = 2048;

/// `g ↦ U(g)` for every element of a finite group.
#[derive(Debug, Clone)]
pub struct UnitaryRep {
    group: Arc<FiniteGroup>,
    dim: usize,
    matrices: Vec<Operator>,
}

impl UnitaryRep {
    /// Validates unitarity, `U(e) = I` and `U(gh) = U(g)U(h)`.
    pub fn from_matrices(group: Arc<FiniteGroup>, matrices: Vec<Operator>) -> Result<Self> {
        if matrices.len() != group.order() {
            return Err(Error::NotARepresentation(format!(
                "{} matrices for a group of order {}",
                matrices.len(),
                group.order()
            )));
        }
        let dim = matrices[0].dim();
        let rep = UnitaryRep { group, dim, matrices };
        rep.validate()?;
        Ok(rep)
    }

    fn validate(&self) -> Result<()> {
        for (g, m) in self.matrices.iter().enumerate() {
            m.require_dim(self.dim)?;
            let c = check_unitary(m);
            if !c.holds {
                return Err(Error::NotARepresentation(format!(
                    "U({g}) is not unitary (deviation {:e})",
                    c.deviation
                )));
            }
        }
        if self.matrices[0].max_abs_diff(&Operator::identity(self.dim)) > EPS {
            return Err(Error::NotARepresentation("U(e) ≠ I".into()));
        }
        let dev = self.homomorphism_deviation();
        if dev > EPS {
            return Err(Error::NotARepresentation(format!(
                "U(gh) ≠ U(g)U(h) (deviation {dev:e})"
            )));
        }
        Ok(())
    }

    /// `max ‖U(gh) − U(g)U(h)‖` in max-abs entries, over all pairs for small
    /// groups and a fixed-seed sample otherwise.
    pub fn homomorphism_deviation(&self) -> f64 {
        let n = self.group.order();
        let dev = |a: usize, b: usize| {
            self.matrices[self.group.mul(a, b)].max_abs_diff(&(&self.matrices[a] * &self.matrices[b]))
        };
        if n <= EXHAUSTIVE_ORDER {
            (0..n)
                .flat_map(|a| (0..n).map(move |b| (a, b)))
                .map(|(a, b)| dev(a, b))
                .fold(0.0, f64::max)
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            (0..SAMPLED_PAIRS)
                .map(|_| dev(rng.random_range(0..n), rng.random_range(0..n)))
                .fold(0.0, f64::max)
        }
    }

    pub fn trivial(group: &Arc<FiniteGroup>, dim: usize) -> Self {
        UnitaryRep {
            group: Arc::clone(group),
            dim,
            matrices: vec![Operator::identity(dim); group.order()],
        }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self, g: usize) -> &Operator {
        &self.matrices[g]
    }

    pub fn matrices(&self) -> &[Operator] {
        &self.matrices
    }

    /// `U(g) A U(g)*`.
    pub fn conjugate(&self, g: usize, a: &Operator) -> Operator {
        a.conjugated_by(&self.matrices[g])
    }

    /// The diagonal representation `g ↦ U(g) ⊗ V(g)`.
    pub fn tensor_with(&self, other: &UnitaryRep) -> Result<UnitaryRep> {
        if *self.group != *other.group {
            return Err(Error::NotARepresentation("representations of different groups".into()));
        }
        let matrices = self
            .matrices
            .iter()
            .zip(&other.matrices)
            .map(|(a, b)| linalg::tensor(a, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(UnitaryRep {
            group: Arc::clone(&self.group),
            dim: self.dim * other.dim,
            matrices,
        })
    }

    /// `max_g ‖U(g) A U(g)* − A‖` in operator norm.
    pub fn invariance_residual(&self, a: &Operator) -> f64 {
        self.group
            .elements()
            .map(|g| self.conjugate(g, a).distance(a))
            .fold(0.0, f64::max)
    }

    /// `max_s ‖U(s) A U(s)* − A‖` over the generators only. Zero exactly when
    /// `A` is invariant, at a fraction of the cost of
    /// [`invariance_residual`](Self::invariance_residual).
    pub fn generator_residual(&self, a: &Operator) -> f64 {
        self.group
            .generators()
            .iter()
            .map(|&s| self.conjugate(s, a).distance(a))
            .fold(0.0, f64::max)
    }
}

/// `(g·f)(x) = f(g⁻¹·x)` on `L²(X)`, so `U(g)δ_x = δ_{g·x}`.
pub fn permutation_representation(action: &GroupAction) -> UnitaryRep {
    let n = action.n_points();
    let matrices = action
        .group()
        .elements()
        .map(|g| {
            Operator::from_fn(n, |row, col| {
                if action.act(g, col) == row {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            })
        })
        .collect();
    UnitaryRep {
        group: Arc::clone(action.group()),
        dim: n,
        matrices,
    }
}

/// Left regular representation on `L²(G)`.
pub fn regular_representation(group: &Arc<FiniteGroup>) -> UnitaryRep {
    permutation_representation(&GroupAction::left_regular(group))
}

/// `G ⊂ S_n` permuting the factors of `H^{⊗n}` with `dim H = factor_dim`.
///
/// The matrix of `σ` sends `e_{i₁}⊗…⊗e_{iₙ}` to the basis vector whose factor
/// at position `σ(k)` is `e_{i_k}`, so conjugation sends `A₁⊗…⊗Aₙ` to
/// `A_{σ⁻¹(1)}⊗…⊗A_{σ⁻¹(n)}`.
pub fn tensor_factor_representation(action: &GroupAction, factor_dim: usize) -> Result<UnitaryRep> {
    let n = action.n_points();
    let group = action.group();
    if factor_dim == 0 {
        return Err(Error::NotARepresentation("factor dimension must be positive".into()));
    }
    if let Some(g) = group
        .elements()
        .skip(1)
        .find(|&g| (0..n).all(|x| action.act(g, x) == x))
    {
        return Err(Error::NotARepresentation(format!(
            "action is not faithful: element {g} acts trivially"
        )));
    }
    let dim = u32::try_from(n)
        .ok()
        .and_then(|n| factor_dim.checked_pow(n))
        .ok_or(Error::DimensionOverflow {
            dim: usize::MAX,
            cap: linalg::dimension_cap(),
        })?;
    check_dim(dim)?;

    let digits = |mut idx: usize| {
        let mut d = vec![0; n];
        for k in (0..n).rev() {
            d[k] = idx % factor_dim;
            idx /= factor_dim;
        }
        d
    };
    let matrices = group
        .elements()
        .map(|g| {
            let mut m = nalgebra::DMatrix::zeros(dim, dim);
            for col in 0..dim {
                let src = digits(col);
                let mut dst = vec![0; n];
                for (k, &i) in src.iter().enumerate() {
                    dst[action.act(g, k)] = i;
                }
                let row = dst.iter().fold(0, |acc, &i| acc * factor_dim + i);
                m[(row, col)] = C64::new(1.0, 0.0);
            }
            Operator::new(m).expect("permutation matrix")
        })
        .collect();
    Ok(UnitaryRep {
        group: Arc::clone(group),
        dim,
        matrices,
    })
}

/// Extends per-generator matrices over the whole group. Starting from
/// `U(e) = I`, each element `w` in discovery order is extended by
/// `U(s·w) = U(s)U(w)` for every generator `s`; the result is then checked
/// against the Cayley table.
pub fn explicit_representation(group: &Arc<FiniteGroup>, generator_matrices: &[Operator]) -> Result<UnitaryRep> {
    let gens = group.generators();
    if gens.len() != generator_matrices.len() {
        return Err(Error::NotARepresentation(format!(
            "{} generator matrices for {} generators",
            generator_matrices.len(),
            gens.len()
        )));
    }
    let dim = generator_matrices.first().map(Operator::dim).unwrap_or(1);
    for m in generator_matrices {
        m.require_dim(dim)?;
    }
    let mut matrices: Vec<Option<Operator>> = vec![None; group.order()];
    matrices[0] = Some(Operator::identity(dim));
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(w) = queue.pop_front() {
        for (&s, m) in gens.iter().zip(generator_matrices) {
            let t = group.mul(s, w);
            if matrices[t].is_none() {
                matrices[t] = Some(m * matrices[w].as_ref().unwrap());
                queue.push_back(t);
            }
        }
    }
    let matrices = matrices
        .into_iter()
        .enumerate()
        .map(|(g, m)| {
            m.ok_or_else(|| Error::NotARepresentation(format!("element {g} not reached from the generators")))
        })
        .collect::<Result<Vec<_>>>()?;
    for (k, (&s, m)) in gens.iter().zip(generator_matrices).enumerate() {
        if matrices[s].max_abs_diff(m) > EPS {
            return Err(Error::NotARepresentation(format!(
                "generator {k} matrix is inconsistent with the group relations"
            )));
        }
    }
    UnitaryRep::from_matrices(Arc::clone(group), matrices)
}

#[derive(Debug, Clone)]
pub struct InvariantSubspaceReport {
    pub fixed_dim: usize,
    pub fixed_basis: Vec<DVector<C64>>,
}

/// The fixed subspace of `rep`, as the range of `(1/|G|) Σ_g U(g)`.
pub fn invariant_vectors(rep: &UnitaryRep) -> InvariantSubspaceReport {
    let avg = Operator::sum(rep.dim(), rep.matrices()).scale(1.0 / rep.group().order() as f64);
    // the averaging projector is Hermitian up to rounding
    let (values, vectors) = linalg::hermitian_eigen(&avg.hermitian_part()).unwrap();
    let fixed_basis: Vec<DVector<C64>> = values
        .iter()
        .enumerate()
        .take_while(|(_, &v)| v > 0.5)
        .map(|(c, _)| {
            let mut v = vectors.column(c).into_owned();
            linalg::fix_phase(&mut v);
            v
        })
        .collect();
    InvariantSubspaceReport {
        fixed_dim: fixed_basis.len(),
        fixed_basis,
    }
}

#[derive(Debug, Clone)]
pub struct InvariantStateVerdict {
    pub invariant: bool,
    /// `g ↦ λ(g)` with `U(g)φ = λ(g)φ`, present when `invariant`.
    pub character: Option<Vec<C64>>,
    /// `max_g ‖U(g)φ − ⟨φ,U(g)φ⟩φ‖`.
    pub deviation: f64,
}

/// Decides whether the unit vector `φ` spans a one-dimensional
/// subrepresentation, i.e. whether `P_φ` is invariant.
pub fn check_invariant_pure_state(rep: &UnitaryRep, phi: &DVector<C64>) -> Result<InvariantStateVerdict> {
    if phi.len() != rep.dim() {
        return Err(Error::DimensionMismatch {
            expected: rep.dim(),
            found: phi.len(),
        });
    }
    let norm = phi.norm();
    if (norm - 1.0).abs() > EPS {
        return Err(Error::NotNormalised(norm));
    }
    let mut deviation: f64 = 0.0;
    let mut lambda = Vec::with_capacity(rep.group().order());
    for g in rep.group().elements() {
        let image = rep.matrix(g).apply(phi);
        let l = phi.dotc(&image);
        deviation = deviation.max((image - phi * l).norm());
        lambda.push(l);
    }
    if deviation > EPS {
        return Ok(InvariantStateVerdict {
            invariant: false,
            character: None,
            deviation,
        });
    }
    let group = rep.group();
    let is_character = lambda.iter().all(|l| (l.norm() - 1.0).abs() <= EPS)
        && group.elements().all(|a| {
            group
                .elements()
                .all(|b| (lambda[group.mul(a, b)] - lambda[a] * lambda[b]).norm() <= EPS)
        });
    Ok(InvariantStateVerdict {
        invariant: is_character,
        character: is_character.then_some(lambda),
        deviation,
    })
}

/// `max_{h∈H} ‖U(h) A U(h)* − A‖` in operator norm.
pub fn subgroup_invariance_deviation(rep: &UnitaryRep, sub: &Subgroup, a: &Operator) -> Result<f64> {
    a.require_dim(rep.dim())?;
    Ok(sub
        .members()
        .iter()
        .map(|&h| rep.conjugate(h, a).distance(a))
        .fold(0.0, f64::max))
}

/// The first `‖U(h) A U(h)* − A‖ > tol` over `H`, if any. The Frobenius
/// norm bounds the operator norm, so most members skip the SVD.
pub fn first_invariance_violation(rep: &UnitaryRep, sub: &Subgroup, a: &Operator, tol: f64) -> Result<Option<f64>> {
    a.require_dim(rep.dim())?;
    for &h in sub.members() {
        let diff = &rep.conjugate(h, a) - a;
        if diff.matrix().norm() <= tol {
            continue;
        }
        let dev = linalg::operator_norm(&diff);
        if dev > tol {
            return Ok(Some(dev));
        }
    }
    Ok(None)
}

/// Whether `A` lies in `B(H_S)^H`.
pub fn restricted_invariance_check(rep: &UnitaryRep, sub: &Subgroup, a: &Operator) -> Result<bool> {
    Ok(first_invariance_violation(rep, sub, a, EPS)?.is_none())
}

/// A group given by name (a builtin) or inline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupRef {
    Name(String),
    Spec(GroupSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepKind {
    Permutation,
    Regular,
    TensorFactor,
    Explicit,
}

/// Representation spec file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupRef>,
    pub kind: RepKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factor_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator_matrices: Option<Vec<Operator>>,
}

impl RepSpec {
    /// Builds over a group with its defining permutation action.
    pub fn build(&self, defining: &GroupAction) -> Result<UnitaryRep> {
        let group = defining.group();
        match self.kind {
            RepKind::Permutation => Ok(permutation_representation(defining)),
            RepKind::Regular => Ok(regular_representation(group)),
            RepKind::TensorFactor => {
                let d = self
                    .factor_dim
                    .ok_or_else(|| Error::config("factor_dim", "required for kind tensor_factor"))?;
                tensor_factor_representation(defining, d)
            }
            RepKind::Explicit => {
                let mats = self
                    .generator_matrices
                    .as_ref()
                    .ok_or_else(|| Error::config("generator_matrices", "required for kind explicit"))?;
                explicit_representation(group, mats)
            }
        }
    }
}

//! Covariant PVMs and POVMs, their Born distributions and localisation
//! properties, and the rank-1 POVM on `G` obtained by pulling the canonical
//! PVM back along `g ↦ g·x`.

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{GroupAction, Subgroup};
use crate::linalg::{
    self, born_probability_unchecked, check_effect, check_projection, operator_norm, DensityState, Operator, C64,
};
use crate::representations::{permutation_representation, UnitaryRep};
use crate::EPS;

/// Which value space an observable's outcomes live in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OutcomeSpace {
    /// Points of the homogeneous space `X`.
    #[serde(rename = "X")]
    Points,
    /// Elements of the group `G`.
    #[serde(rename = "G")]
    Elements,
}

impl OutcomeSpace {
    pub fn label(self, i: usize) -> Outcome {
        match self {
            OutcomeSpace::Points => Outcome::Point(i),
            OutcomeSpace::Elements => Outcome::Element(i),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Point(usize),
    Element(usize),
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Outcome::Point(x) => write!(f, "x{x}"),
            Outcome::Element(g) => write!(f, "g{g}"),
        }
    }
}

/// A finite POVM; `sharp` is set when it is in fact a PVM.
#[derive(Debug, Clone)]
pub struct Observable {
    space: OutcomeSpace,
    effects: Vec<Operator>,
    sharp: bool,
}

impl Observable {
    pub fn new(space: OutcomeSpace, effects: Vec<Operator>) -> Result<Self> {
        let first = effects
            .first()
            .ok_or_else(|| Error::NotAnObservable("no outcomes".into()))?;
        let dim = first.dim();
        for (i, e) in effects.iter().enumerate() {
            e.require_dim(dim)?;
            let c = check_effect(e);
            if !c.holds {
                return Err(Error::NotAnObservable(format!(
                    "effect {} is not positive and below I (deviation {:e})",
                    space.label(i),
                    c.deviation
                )));
            }
        }
        let total = Operator::sum(dim, &effects);
        let dev = total.max_abs_diff(&Operator::identity(dim));
        if dev > EPS {
            return Err(Error::NotAnObservable(format!("effects sum to I only within {dev:e}")));
        }
        let sharp = effects.iter().all(|e| check_projection(e).holds)
            && effects
                .iter()
                .enumerate()
                .all(|(i, a)| effects[i + 1..].iter().all(|b| (a * b).is_zero()));
        Ok(Observable { space, effects, sharp })
    }

    /// Re-runs the construction checks.
    pub fn revalidate(&self) -> Result<()> {
        Observable::new(self.space, self.effects.clone()).map(|_| ())
    }

    pub fn outcome_space(&self) -> OutcomeSpace {
        self.space
    }

    pub fn effects(&self) -> &[Operator] {
        &self.effects
    }

    pub fn effect(&self, i: usize) -> &Operator {
        &self.effects[i]
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.effects[0].dim()
    }

    pub fn is_sharp(&self) -> bool {
        self.sharp
    }

    fn check_outcome(&self, i: usize) -> Result<()> {
        if i < self.effects.len() {
            Ok(())
        } else {
            Err(Error::PointOutOfRange {
                point: i,
                n_points: self.effects.len(),
            })
        }
    }
}

/// An observable together with a representation it is covariant under:
/// `U(g) E(x) U(g)* = E(g·x)`.
#[derive(Debug, Clone)]
pub struct CovariantFrame {
    observable: Observable,
    rep: UnitaryRep,
    action: GroupAction,
}

impl CovariantFrame {
    pub fn new(observable: Observable, rep: UnitaryRep, action: GroupAction) -> Result<Self> {
        if action.n_points() != observable.len() {
            return Err(Error::DimensionMismatch {
                expected: action.n_points(),
                found: observable.len(),
            });
        }
        rep.matrix(0).require_dim(observable.dim())?;
        if **rep.group() != **action.group() {
            return Err(Error::NotARepresentation("rep and action use different groups".into()));
        }
        let frame = CovariantFrame {
            observable,
            rep,
            action,
        };
        let dev = frame.covariance_deviation();
        if dev > EPS {
            return Err(Error::NotCovariant(dev));
        }
        Ok(frame)
    }

    /// `max_{g,x} ‖U(g)E(x)U(g)* − E(g·x)‖` in max-abs entries.
    pub fn covariance_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for g in self.action.group().elements() {
            for x in 0..self.observable.len() {
                let moved = self.rep.conjugate(g, self.observable.effect(x));
                dev = dev.max(moved.max_abs_diff(self.observable.effect(self.action.act(g, x))));
            }
        }
        dev
    }

    pub fn observable(&self) -> &Observable {
        &self.observable
    }

    pub fn rep(&self) -> &UnitaryRep {
        &self.rep
    }

    pub fn action(&self) -> &GroupAction {
        &self.action
    }

    /// Whether this is the canonical PVM `x ↦ P_x` on `L²(X)`.
    pub fn is_canonical_pvm(&self) -> bool {
        let n = self.action.n_points();
        self.observable.outcome_space() == OutcomeSpace::Points
            && self.observable.dim() == n
            && (0..n).all(|x| self.observable.effect(x).max_abs_diff(&Operator::matrix_unit(n, x, x)) <= EPS)
    }
}

/// `x ↦ P_x` on `L²(X)` with the permutation representation.
pub fn canonical_pvm(action: &GroupAction) -> Result<CovariantFrame> {
    action.require_transitive()?;
    let n = action.n_points();
    let effects = (0..n).map(|x| Operator::matrix_unit(n, x, x)).collect();
    let observable = Observable::new(OutcomeSpace::Points, effects)?;
    CovariantFrame::new(observable, permutation_representation(action), action.clone())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Distribution {
    pub outcome_space: OutcomeSpace,
    pub probabilities: Vec<f64>,
}

/// `x ↦ tr[E(x) ρ]`.
pub fn born_distribution(obs: &Observable, state: &DensityState) -> Result<Distribution> {
    state.op().require_dim(obs.dim())?;
    let probabilities = obs
        .effects()
        .iter()
        .map(|e| born_probability_unchecked(e, state))
        .collect::<Result<Vec<_>>>()?;
    let total: f64 = probabilities.iter().sum();
    if (total - 1.0).abs() > EPS {
        return Err(Error::NotAnObservable(format!("probabilities sum to {total}")));
    }
    Ok(Distribution {
        outcome_space: obs.outcome_space(),
        probabilities,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct EffectNorm {
    pub outcome: usize,
    pub norm: f64,
    pub is_one: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct NormOneReport {
    pub entries: Vec<EffectNorm>,
    pub holds: bool,
}

/// `‖E(x)‖` for every nonzero effect; the property holds when all are 1.
pub fn norm_one_check(obs: &Observable) -> NormOneReport {
    let entries: Vec<EffectNorm> = obs
        .effects()
        .iter()
        .enumerate()
        .filter(|(_, e)| !e.is_zero())
        .map(|(outcome, e)| {
            let norm = operator_norm(e);
            EffectNorm {
                outcome,
                norm,
                is_one: (norm - 1.0).abs() <= EPS,
            }
        })
        .collect();
    let holds = entries.iter().all(|e| e.is_one);
    NormOneReport { entries, holds }
}

/// A pure state with `tr[E(x) ρ] = 1`, if one exists: the projection onto the
/// dominant eigenvector when the dominant eigenvalue is 1.
pub fn localising_state(obs: &Observable, outcome: usize) -> Result<Option<DensityState>> {
    obs.check_outcome(outcome)?;
    let effect = obs.effect(outcome);
    if effect.is_zero() {
        return Err(Error::ZeroEffect(outcome));
    }
    let (value, vector) = linalg::top_eigenvector(effect)?;
    if (value - 1.0).abs() > EPS {
        return Ok(None);
    }
    DensityState::pure(&vector).map(Some)
}

/// Three routes to localisability of one nonzero effect, which must agree.
#[derive(Debug, Clone, Serialize)]
pub struct LocalisationVerdict {
    pub outcome: usize,
    pub norm: f64,
    pub norm_one: bool,
    /// Some state, possibly mixed, reaches probability 1.
    pub state_exists: bool,
    /// A pure state reaches probability 1.
    pub pure_state_exists: bool,
}

impl LocalisationVerdict {
    pub fn agrees(&self) -> bool {
        self.norm_one == self.state_exists && self.state_exists == self.pure_state_exists
    }
}

/// Per nonzero effect: the norm-1 test, a mixed localising state built from
/// the whole eigenvalue-1 eigenspace, and a pure one from
/// [`localising_state`]. Candidate states are only accepted after their Born
/// probability is recomputed.
pub fn localisation_equivalence(obs: &Observable) -> Result<Vec<LocalisationVerdict>> {
    let mut out = Vec::new();
    for (outcome, effect) in obs.effects().iter().enumerate() {
        if effect.is_zero() {
            continue;
        }
        let norm = operator_norm(effect);
        let (values, vectors) = linalg::hermitian_eigen(effect)?;
        let top: Vec<usize> = (0..values.len()).filter(|&i| (values[i] - 1.0).abs() <= EPS).collect();
        let state_exists = if top.is_empty() {
            false
        } else {
            let proj = Operator::sum(
                effect.dim(),
                &top.iter()
                    .map(|&i| Operator::ket_bra(&vectors.column(i).into_owned()))
                    .collect::<Vec<_>>(),
            );
            let mixed = DensityState::new(proj.scale(1.0 / top.len() as f64))?;
            (linalg::born_probability(effect, &mixed)? - 1.0).abs() <= EPS
        };
        let pure_state_exists = match localising_state(obs, outcome)? {
            Some(rho) => {
                (rho.purity() - 1.0).abs() <= EPS && (linalg::born_probability(effect, &rho)? - 1.0).abs() <= EPS
            }
            None => false,
        };
        out.push(LocalisationVerdict {
            outcome,
            norm,
            norm_one: (norm - 1.0).abs() <= EPS,
            state_exists,
            pure_state_exists,
        });
    }
    Ok(out)
}

/// `g ↦ E_g = (1/|H|) P_{g·x}` with `H = G_x`, covariant under `U_R` for the
/// left action of `G` on itself.
pub fn pullback_povm(frame: &CovariantFrame, base_x: usize) -> Result<CovariantFrame> {
    if !frame.is_canonical_pvm() {
        return Err(Error::NotCanonicalFrame);
    }
    let action = frame.action();
    let h = action.stabiliser(base_x)?;
    let n = action.n_points();
    let scale = 1.0 / h.order() as f64;
    let effects = action
        .group()
        .elements()
        .map(|g| Operator::matrix_unit(n, action.act(g, base_x), action.act(g, base_x)).scale(scale))
        .collect();
    let observable = Observable::new(OutcomeSpace::Elements, effects)?;
    CovariantFrame::new(
        observable,
        frame.rep().clone(),
        GroupAction::left_regular(action.group()),
    )
}

/// The orbit `|gH⟩ = U_R(g)|eH⟩` of `|eH⟩ = δ_x`.
#[derive(Debug, Clone)]
pub struct CoherentSystem {
    pub base_vector: DVector<C64>,
    pub vectors: Vec<DVector<C64>>,
    pub stabiliser_of_base: Subgroup,
    /// `max_g ‖E_g − (1/|H|)|v_g⟩⟨v_g|‖` with `v_g` extracted from `E_g`.
    pub factorisation_deviation: f64,
    /// `max_g ‖v_g − |gH⟩‖` between extracted and constructed vectors.
    pub vector_deviation: f64,
    /// All `|gH⟩`, `g ≠ g′`, pairwise orthogonal.
    pub ideal: bool,
    /// Every `|gH⟩` has trivial stabiliser.
    pub complete: bool,
}

impl CoherentSystem {
    pub fn classification(&self) -> &'static str {
        match (self.ideal, self.complete) {
            (true, true) => "ideal and complete",
            (false, false) => "incomplete",
            (true, false) => "ideal but not complete",
            (false, true) => "complete but not ideal",
        }
    }

    /// `⟨gH|g′H⟩`.
    pub fn overlap(&self, g: usize, h: usize) -> C64 {
        self.vectors[g].dotc(&self.vectors[h])
    }

    /// `Σ_g |gH⟩⟨gH|`.
    pub fn frame_operator(&self) -> Operator {
        let dim = self.base_vector.len();
        Operator::sum(dim, &self.vectors.iter().map(Operator::ket_bra).collect::<Vec<_>>())
    }
}

pub fn coherent_system(frame: &CovariantFrame, base_x: usize) -> Result<CoherentSystem> {
    let pulled = pullback_povm(frame, base_x)?;
    let action = frame.action();
    let rep = frame.rep();
    let n = action.n_points();
    let h = action.stabiliser(base_x)?;
    let mut base_vector = DVector::zeros(n);
    base_vector[base_x] = C64::new(1.0, 0.0);
    let vectors: Vec<DVector<C64>> = action
        .group()
        .elements()
        .map(|g| rep.matrix(g).apply(&base_vector))
        .collect();

    let scale = 1.0 / h.order() as f64;
    let mut factorisation_deviation: f64 = 0.0;
    let mut vector_deviation: f64 = 0.0;
    for (g, v) in vectors.iter().enumerate() {
        let effect = pulled.observable().effect(g);
        let (value, mut extracted) = linalg::top_eigenvector(effect)?;
        linalg::fix_phase(&mut extracted);
        let rebuilt = Operator::ket_bra(&extracted).scale(scale);
        factorisation_deviation = factorisation_deviation
            .max(effect.max_abs_diff(&rebuilt))
            .max((value - scale).abs());
        vector_deviation = vector_deviation.max((extracted - v).norm());
    }

    let order = vectors.len();
    let ideal = (0..order).all(|a| (a + 1..order).all(|b| vectors[a].dotc(&vectors[b]).norm() <= EPS));
    let complete = vectors.iter().all(|v| {
        action
            .group()
            .elements()
            .filter(|&k| (rep.matrix(k).apply(v) - v).norm() <= EPS)
            .count()
            == 1
    });
    Ok(CoherentSystem {
        base_vector,
        vectors,
        stabiliser_of_base: h,
        factorisation_deviation,
        vector_deviation,
        ideal,
        complete,
    })
}

/// The six characterisations of a principal frame, each computed by its
/// own route.
#[derive(Debug, Clone, Serialize)]
pub struct SixWayReport {
    pub stabiliser_order: usize,
    pub h_trivial: bool,
    pub sharp: bool,
    pub norm_one: bool,
    pub localisable: bool,
    pub pure_localisable: bool,
    pub ideal: bool,
    pub complete: bool,
    pub effect_norms: Vec<f64>,
}

impl SixWayReport {
    pub fn verdicts(&self) -> [bool; 7] {
        [
            self.h_trivial,
            self.sharp,
            self.norm_one,
            self.localisable,
            self.pure_localisable,
            self.ideal,
            self.complete,
        ]
    }

    pub fn all_agree(&self) -> bool {
        let v = self.verdicts();
        v.iter().all(|&b| b == v[0])
    }

    pub fn principal(&self) -> bool {
        self.h_trivial
    }

    /// Largest `|‖E_g‖ − 1/|H||`.
    pub fn norm_deviation(&self) -> f64 {
        let expected = 1.0 / self.stabiliser_order as f64;
        self.effect_norms
            .iter()
            .map(|n| (n - expected).abs())
            .fold(0.0, f64::max)
    }
}

pub fn six_way_equivalence(frame: &CovariantFrame, base_x: usize) -> Result<SixWayReport> {
    let pulled = pullback_povm(frame, base_x)?;
    let obs = pulled.observable();
    let h = frame.action().stabiliser(base_x)?;
    let norms = norm_one_check(obs);
    let localisation = localisation_equivalence(obs)?;
    let coherent = coherent_system(frame, base_x)?;
    Ok(SixWayReport {
        stabiliser_order: h.order(),
        h_trivial: h.is_trivial(),
        sharp: obs.is_sharp(),
        norm_one: norms.holds,
        localisable: localisation.iter().all(|v| v.state_exists),
        pure_localisable: localisation.iter().all(|v| v.pure_state_exists),
        ideal: coherent.ideal,
        complete: coherent.complete,
        effect_norms: norms.entries.iter().map(|e| e.norm).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::build_group_from_generators;
    use std::sync::Arc;

    fn s3() -> GroupAction {
        build_group_from_generators(&[vec![1, 0, 2], vec![1, 2, 0]], 3)
            .unwrap()
            .1
    }

    fn z4_regular() -> GroupAction {
        let (g, _) = build_group_from_generators(&[vec![1, 2, 3, 0]], 4).unwrap();
        GroupAction::left_regular(&g)
    }

    fn trivial_point() -> GroupAction {
        GroupAction::on_point(&Arc::new(crate::group::FiniteGroup::trivial()))
    }

    #[test]
    fn canonical_pvm_examples() {
        let frame = canonical_pvm(&s3()).unwrap();
        let obs = frame.observable();
        assert_eq!(obs.len(), 3);
        assert!(obs.is_sharp());
        assert!(Operator::sum(3, obs.effects()).max_abs_diff(&Operator::identity(3)) < 1e-15);
        assert!(frame.covariance_deviation() < 1e-15);

        let single = canonical_pvm(&trivial_point()).unwrap();
        assert_eq!(single.observable().effects(), &[Operator::identity(1)]);

        let z4 = canonical_pvm(&z4_regular()).unwrap();
        assert_eq!(z4.observable().len(), 4);
        assert!(z4.observable().is_sharp());
    }

    #[test]
    fn canonical_pvm_requires_transitivity() {
        let (z2, _) = build_group_from_generators(&[vec![1, 0]], 2).unwrap();
        let act = GroupAction::new(z2, vec![vec![0, 1, 2], vec![1, 0, 2]]).unwrap();
        assert!(matches!(
            canonical_pvm(&act),
            Err(Error::NotTransitive { orbit: 2, n_points: 3 })
        ));
    }

    #[test]
    fn observable_validation() {
        let half = Operator::identity(2).scale(0.5);
        assert!(Observable::new(OutcomeSpace::Points, vec![half.clone()]).is_err());
        let obs = Observable::new(OutcomeSpace::Points, vec![half.clone(), half]).unwrap();
        assert!(!obs.is_sharp());
        assert!(obs.revalidate().is_ok());
        let neg = Operator::diagonal(&[2.0, -1.0]);
        assert!(Observable::new(OutcomeSpace::Points, vec![neg, Operator::diagonal(&[-1.0, 2.0])]).is_err());
        // zero effects are allowed
        let obs = Observable::new(OutcomeSpace::Points, vec![Operator::identity(2), Operator::zeros(2)]).unwrap();
        assert!(obs.is_sharp());
        assert!(norm_one_check(&obs).holds);
        assert_eq!(norm_one_check(&obs).entries.len(), 1);
        assert_eq!(localising_state(&obs, 1).unwrap_err(), Error::ZeroEffect(1));
    }

    #[test]
    fn non_covariant_frame_rejected() {
        let action = s3();
        let rep = permutation_representation(&action);
        let obs = Observable::new(
            OutcomeSpace::Points,
            vec![
                Operator::diagonal(&[1.0, 0.0, 0.0]),
                Operator::diagonal(&[0.0, 1.0, 1.0]),
                Operator::zeros(3),
            ],
        )
        .unwrap();
        assert!(matches!(
            CovariantFrame::new(obs, rep, action),
            Err(Error::NotCovariant(_))
        ));
    }

    #[test]
    fn born_distribution_examples() {
        let frame = canonical_pvm(&s3()).unwrap();
        let obs = frame.observable();
        let d = born_distribution(obs, &DensityState::basis(3, 1)).unwrap();
        assert_eq!(d.probabilities, vec![0.0, 1.0, 0.0]);
        assert_eq!(d.outcome_space, OutcomeSpace::Points);

        let one = DVector::from_element(3, C64::new(1.0, 0.0));
        let d = born_distribution(obs, &DensityState::pure(&one).unwrap()).unwrap();
        assert!(d.probabilities.iter().all(|p| (p - 1.0 / 3.0).abs() < 1e-12));
        let d = born_distribution(obs, &DensityState::maximally_mixed(3)).unwrap();
        assert!(d.probabilities.iter().all(|p| (p - 1.0 / 3.0).abs() < 1e-12));
        assert!(born_distribution(obs, &DensityState::maximally_mixed(2)).is_err());
    }

    #[test]
    fn invariant_state_gives_orbit_constant_distribution() {
        let frame = canonical_pvm(&s3()).unwrap();
        let pulled = pullback_povm(&frame, 2).unwrap();
        let rho = DensityState::maximally_mixed(3);
        let d = born_distribution(pulled.observable(), &rho).unwrap();
        assert_eq!(d.outcome_space, OutcomeSpace::Elements);
        assert!(d.probabilities.iter().all(|p| (p - 1.0 / 6.0).abs() < 1e-12));
    }

    #[test]
    fn norm_one_examples() {
        let frame = canonical_pvm(&s3()).unwrap();
        assert!(norm_one_check(frame.observable()).holds);
        let pulled = pullback_povm(&frame, 2).unwrap();
        let r = norm_one_check(pulled.observable());
        assert!(!r.holds);
        assert_eq!(r.entries.len(), 6);
        assert!(r.entries.iter().all(|e| (e.norm - 0.5).abs() < 1e-12));

        let z4 = canonical_pvm(&z4_regular()).unwrap();
        assert!(norm_one_check(pullback_povm(&z4, 0).unwrap().observable()).holds);
    }

    #[test]
    fn localising_state_examples() {
        let frame = canonical_pvm(&s3()).unwrap();
        let rho = localising_state(frame.observable(), 1).unwrap().unwrap();
        assert!(rho.op().max_abs_diff(&Operator::matrix_unit(3, 1, 1)) < 1e-12);

        let pulled = pullback_povm(&frame, 2).unwrap();
        assert!(localising_state(pulled.observable(), 0).unwrap().is_none());

        let trivial = Observable::new(OutcomeSpace::Points, vec![Operator::identity(3)]).unwrap();
        let rho = localising_state(&trivial, 0).unwrap().unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-12);
        assert!(localising_state(&trivial, 1).is_err());
    }

    #[test]
    fn pullback_examples() {
        let z4 = canonical_pvm(&z4_regular()).unwrap();
        let pulled = pullback_povm(&z4, 0).unwrap();
        assert!(pulled.observable().is_sharp());
        for (g, e) in pulled.observable().effects().iter().enumerate() {
            assert_eq!(e, z4.observable().effect(g));
        }

        let action = s3();
        let frame = canonical_pvm(&action).unwrap();
        let pulled = pullback_povm(&frame, 2).unwrap();
        let obs = pulled.observable();
        assert_eq!(obs.len(), 6);
        let cosets = crate::group::left_cosets(action.group(), &action.stabiliser(2).unwrap()).unwrap();
        for a in 0..6 {
            let e = obs.effect(a);
            assert!(check_projection(&e.scale(2.0)).holds);
            assert!((e.scale(2.0).trace().re - 1.0).abs() < 1e-12);
            for b in 0..6 {
                let same_effect = e.max_abs_diff(obs.effect(b)) < 1e-12;
                assert_eq!(same_effect, cosets.coset_of(a) == cosets.coset_of(b));
            }
        }
        assert!(Operator::sum(3, obs.effects()).max_abs_diff(&Operator::identity(3)) < 1e-12);
        assert!(pulled.covariance_deviation() < 1e-12);
        assert!(pullback_povm(&frame, 3).is_err());
        assert!(matches!(pullback_povm(&pulled, 0), Err(Error::NotCanonicalFrame)));
    }

    #[test]
    fn coherent_system_examples() {
        let z4 = canonical_pvm(&z4_regular()).unwrap();
        let cs = coherent_system(&z4, 0).unwrap();
        assert!(cs.ideal && cs.complete);
        assert_eq!(cs.classification(), "ideal and complete");

        let action = s3();
        let frame = canonical_pvm(&action).unwrap();
        let cs = coherent_system(&frame, 2).unwrap();
        assert!(!cs.ideal && !cs.complete);
        assert_eq!(cs.classification(), "incomplete");
        assert!(cs.factorisation_deviation < 1e-12);
        assert!(cs.vector_deviation < 1e-12);
        let h = action.stabiliser(2).unwrap();
        let g = action.group();
        for a in g.elements() {
            for b in g.elements() {
                let expected = if h.contains(g.mul(g.inv(a), b)) { 1.0 } else { 0.0 };
                assert!((cs.overlap(a, b) - C64::new(expected, 0.0)).norm() < 1e-12);
            }
        }
        assert!(cs.frame_operator().max_abs_diff(&Operator::identity(3).scale(2.0)) < 1e-12);

        let single = canonical_pvm(&trivial_point()).unwrap();
        let cs = coherent_system(&single, 0).unwrap();
        assert_eq!(cs.vectors.len(), 1);
        assert!(cs.ideal && cs.complete);
    }

    #[test]
    fn six_way_on_small_spaces() {
        let z4 = canonical_pvm(&z4_regular()).unwrap();
        let r = six_way_equivalence(&z4, 0).unwrap();
        assert!(r.all_agree() && r.principal());

        let s3 = canonical_pvm(&s3()).unwrap();
        let r = six_way_equivalence(&s3, 2).unwrap();
        assert!(r.all_agree() && !r.principal());
        assert!(r.norm_deviation() < 1e-12);
    }

    #[test]
    fn localisation_routes_agree_on_unsharp_effects() {
        // E_x = ½P_x + ⅙I on S₃: norm 2/3, never localisable
        let action = s3();
        let effects: Vec<Operator> = (0..3)
            .map(|x| &Operator::matrix_unit(3, x, x).scale(0.5) + &Operator::identity(3).scale(1.0 / 6.0))
            .collect();
        let obs = Observable::new(OutcomeSpace::Points, effects).unwrap();
        let frame = CovariantFrame::new(obs, permutation_representation(&action), action).unwrap();
        for v in localisation_equivalence(frame.observable()).unwrap() {
            assert!(v.agrees());
            assert!(!v.norm_one);
            assert!((v.norm - 2.0 / 3.0).abs() < 1e-12);
        }
        // an effect with a two-dimensional eigenvalue-1 eigenspace
        let obs = Observable::new(
            OutcomeSpace::Points,
            vec![
                Operator::diagonal(&[1.0, 1.0, 0.0]),
                Operator::diagonal(&[0.0, 0.0, 1.0]),
            ],
        )
        .unwrap();
        assert!(localisation_equivalence(&obs)
            .unwrap()
            .iter()
            .all(|v| v.agrees() && v.norm_one));
    }
}

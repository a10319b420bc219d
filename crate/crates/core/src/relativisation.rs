//! Relativisation and restriction.
//!
//! For a base point `x` with stabiliser `H = G_x`, the relativisation map
//! sends an `H`-invariant system operator `A` to the `G`-invariant joint
//! operator `Σ_{gH} U_S(g) A U_S(g)* ⊗ P_{g·x}` on `H_S ⊗ L²(X)`. The
//! restriction map `Γ_ω` contracts the frame factor of a joint operator
//! against a frame state `ω`.
//!
//! Random test operators are drawn from a single [`SampleRng`]: each complex
//! Gaussian matrix consumes its entries in row-major order, real part before
//! imaginary part, and is then Hermitised.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{left_cosets, CosetDecomposition, Subgroup};
use crate::linalg::{self, operator_norm, DensityState, Operator, C64};
use crate::observables::{pullback_povm, CovariantFrame, OutcomeSpace};
use crate::representations::{first_invariance_violation, UnitaryRep};
use crate::EPS;

pub type SampleRng = ChaCha8Rng;

/// A system representation coupled to a covariant frame on `X` at a base
/// point.
#[derive(Debug, Clone)]
pub struct RelativisationContext {
    system_rep: UnitaryRep,
    frame: CovariantFrame,
    base_x: usize,
    cosets: CosetDecomposition,
    joint_rep: UnitaryRep,
}

impl RelativisationContext {
    pub fn new(system_rep: UnitaryRep, frame: CovariantFrame, base_x: usize) -> Result<Self> {
        if **system_rep.group() != **frame.action().group() {
            return Err(Error::NotARepresentation(
                "system representation and frame use different groups".into(),
            ));
        }
        if frame.observable().outcome_space() != OutcomeSpace::Points {
            return Err(Error::NotAnObservable(
                "frame observable must have outcomes in X".into(),
            ));
        }
        frame.action().require_transitive()?;
        let h = frame.action().stabiliser(base_x)?;
        let cosets = left_cosets(frame.action().group(), &h)?;
        let joint_rep = system_rep.tensor_with(frame.rep())?;
        Ok(RelativisationContext {
            system_rep,
            frame,
            base_x,
            cosets,
            joint_rep,
        })
    }

    /// The same system and frame at another base point.
    pub fn rebased(&self, base_x: usize) -> Result<Self> {
        let h = self.frame.action().stabiliser(base_x)?;
        Ok(RelativisationContext {
            system_rep: self.system_rep.clone(),
            frame: self.frame.clone(),
            base_x,
            cosets: left_cosets(self.frame.action().group(), &h)?,
            joint_rep: self.joint_rep.clone(),
        })
    }

    pub fn system_rep(&self) -> &UnitaryRep {
        &self.system_rep
    }

    pub fn frame(&self) -> &CovariantFrame {
        &self.frame
    }

    pub fn base_x(&self) -> usize {
        self.base_x
    }

    pub fn stabiliser(&self) -> &Subgroup {
        self.cosets.subgroup()
    }

    pub fn cosets(&self) -> &CosetDecomposition {
        &self.cosets
    }

    /// `U_S ⊗ U_R`.
    pub fn joint_rep(&self) -> &UnitaryRep {
        &self.joint_rep
    }

    pub fn system_dim(&self) -> usize {
        self.system_rep.dim()
    }

    pub fn frame_dim(&self) -> usize {
        self.frame.observable().dim()
    }

    pub fn n_points(&self) -> usize {
        self.frame.action().n_points()
    }

    fn require_invariant(&self, a: &Operator) -> Result<()> {
        match first_invariance_violation(&self.system_rep, self.stabiliser(), a, EPS)? {
            Some(dev) => Err(Error::NotStabiliserInvariant(dev)),
            None => Ok(()),
        }
    }

    /// One element from each coset, chosen uniformly.
    pub fn random_transversal(&self, rng: &mut SampleRng) -> Vec<usize> {
        (0..self.cosets.len())
            .map(|c| {
                let members = self.cosets.members(c);
                members[rng.random_range(0..members.len())]
            })
            .collect()
    }
}

/// A joint operator on `H_S ⊗ H_R` with its `G`-invariance residual, measured
/// on the generators of `G`.
#[derive(Debug, Clone)]
pub struct RelativeObservableResult {
    pub operator: Operator,
    pub invariance_residual: f64,
}

impl RelativeObservableResult {
    fn new(ctx: &RelativisationContext, operator: Operator) -> Self {
        let invariance_residual = ctx.joint_rep.generator_residual(&operator);
        RelativeObservableResult {
            operator,
            invariance_residual,
        }
    }
}

fn coset_sum(ctx: &RelativisationContext, a: &Operator, representatives: &[usize]) -> Result<Operator> {
    let action = ctx.frame.action();
    let effects = ctx.frame.observable();
    let dim = ctx.system_dim() * ctx.frame_dim();
    linalg::check_dim(dim)?;
    let mut acc = Operator::zeros(dim);
    for &g in representatives {
        let moved = ctx.system_rep.conjugate(g, a);
        let effect = effects.effect(action.act(g, ctx.base_x));
        acc = &acc + &linalg::tensor(&moved, effect)?;
    }
    Ok(acc)
}

/// `¥_x(A) = Σ_{gH ∈ G/H} U_S(g) A U_S(g)* ⊗ P_{g·x}` over the
/// lowest-index coset representatives.
pub fn yen_x(ctx: &RelativisationContext, a: &Operator) -> Result<RelativeObservableResult> {
    yen_x_with_transversal(ctx, a, ctx.cosets.representatives())
}

/// [`yen_x`] without the residual, for composing maps in bulk.
pub fn yen_x_operator(ctx: &RelativisationContext, a: &Operator) -> Result<Operator> {
    if !ctx.frame.is_canonical_pvm() {
        return Err(Error::NotCanonicalFrame);
    }
    relativise(ctx, a, ctx.cosets.representatives())
}

/// [`yen_x`] summed over a caller-chosen transversal.
pub fn yen_x_with_transversal(
    ctx: &RelativisationContext,
    a: &Operator,
    representatives: &[usize],
) -> Result<RelativeObservableResult> {
    if !ctx.frame.is_canonical_pvm() {
        return Err(Error::NotCanonicalFrame);
    }
    yen_general_with_transversal(ctx, a, representatives)
}

/// `¥^E_x(A) = Σ_{gH} U_S(g) A U_S(g)* ⊗ E_{g·x}` for the context's covariant
/// frame observable `E`, which need not be sharp.
pub fn yen_general(ctx: &RelativisationContext, a: &Operator) -> Result<RelativeObservableResult> {
    yen_general_with_transversal(ctx, a, ctx.cosets.representatives())
}

fn yen_general_with_transversal(
    ctx: &RelativisationContext,
    a: &Operator,
    representatives: &[usize],
) -> Result<RelativeObservableResult> {
    let t = relativise(ctx, a, representatives)?;
    Ok(RelativeObservableResult::new(ctx, t))
}

fn relativise(ctx: &RelativisationContext, a: &Operator, representatives: &[usize]) -> Result<Operator> {
    a.require_dim(ctx.system_dim())?;
    if representatives.len() != ctx.cosets.len()
        || representatives
            .iter()
            .enumerate()
            .any(|(c, &g)| g >= ctx.system_rep.group().order() || ctx.cosets.coset_of(g) != c)
    {
        return Err(Error::NotASubgroup("not a transversal of G/H in coset order".into()));
    }
    ctx.require_invariant(a)?;
    coset_sum(ctx, a, representatives)
}

/// `¥^E(A) = Σ_{g∈G} U_S(g) A U_S(g)* ⊗ E_g` against the pulled-back POVM
/// `E_g = (1/|H|) P_{g·x}`. Any `A` is accepted.
#[allow(non_snake_case)]
pub fn yen_E_on_G(ctx: &RelativisationContext, a: &Operator) -> Result<RelativeObservableResult> {
    a.require_dim(ctx.system_dim())?;
    let pulled = pullback_povm(&ctx.frame, ctx.base_x)?;
    let dim = ctx.system_dim() * ctx.frame_dim();
    linalg::check_dim(dim)?;
    let mut acc = Operator::zeros(dim);
    for g in ctx.system_rep.group().elements() {
        let moved = ctx.system_rep.conjugate(g, a);
        acc = &acc + &linalg::tensor(&moved, pulled.observable().effect(g))?;
    }
    Ok(RelativeObservableResult::new(ctx, acc))
}

/// `Γ_ω(T)`: the partial contraction of `T` on `H_S ⊗ H_R` against the
/// frame state `ω`, so that `Γ_ω(A ⊗ B) = tr(ωB) A`.
pub fn gamma_restrict(omega: &DensityState, t: &Operator) -> Result<Operator> {
    let r = omega.dim();
    if !t.dim().is_multiple_of(r) {
        return Err(Error::DimensionMismatch {
            expected: r * (t.dim() / r).max(1),
            found: t.dim(),
        });
    }
    let s = t.dim() / r;
    let w = omega.op();
    Ok(Operator::from_fn(s, |i, j| {
        let mut acc = C64::new(0.0, 0.0);
        for y in 0..r {
            for z in 0..r {
                acc += t.get(i * r + y, j * r + z) * w.get(z, y);
            }
        }
        acc
    }))
}

/// `(1/|G|) Σ_g U(g) A U(g)*`.
pub fn g_twirl(rep: &UnitaryRep, a: &Operator) -> Result<Operator> {
    h_twirl(rep, &rep.group().whole(), a)
}

/// `(1/|H|) Σ_{h∈H} U(h) A U(h)*`.
pub fn h_twirl(rep: &UnitaryRep, sub: &Subgroup, a: &Operator) -> Result<Operator> {
    a.require_dim(rep.dim())?;
    if **sub.parent() != **rep.group() {
        return Err(Error::NotASubgroup("subgroup of a different group".into()));
    }
    let terms: Vec<Operator> = sub.members().iter().map(|&h| rep.conjugate(h, a)).collect();
    Ok(Operator::sum(rep.dim(), &terms).scale(1.0 / sub.order() as f64))
}

/// A complex Gaussian matrix, Hermitised.
pub fn random_hermitian(dim: usize, rng: &mut SampleRng) -> Operator {
    random_complex(dim, rng).hermitian_part()
}

pub fn random_complex(dim: usize, rng: &mut SampleRng) -> Operator {
    let mut entries = Vec::with_capacity(dim * dim);
    for _ in 0..dim * dim {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        entries.push(C64::new(re, im));
    }
    Operator::from_fn(dim, |i, j| entries[i * dim + j])
}

/// `samples` Hermitian operators in `B(H_S)^H`, via Gaussian draw then
/// H-twirl.
pub fn invariant_samples(ctx: &RelativisationContext, samples: usize, rng: &mut SampleRng) -> Vec<Operator> {
    (0..samples)
        .map(|_| {
            let a = random_hermitian(ctx.system_dim(), rng);
            h_twirl(&ctx.system_rep, ctx.stabiliser(), &a).expect("dimensions match")
        })
        .collect()
}

/// One identity measured over a batch of samples.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct IdentityDeviation {
    pub samples: usize,
    pub max_deviation: f64,
}

impl IdentityDeviation {
    fn over(values: impl IntoIterator<Item = f64>) -> Self {
        let mut samples = 0;
        let mut max_deviation: f64 = 0.0;
        for v in values {
            samples += 1;
            max_deviation = max_deviation.max(v);
        }
        IdentityDeviation { samples, max_deviation }
    }
}

/// `¥_x` as a unital injective *-homomorphism into the invariants.
#[derive(Debug, Clone, Serialize)]
pub struct HomomorphismReport {
    pub multiplicative: IdentityDeviation,
    pub adjoint: IdentityDeviation,
    pub unit: IdentityDeviation,
    pub isometry: IdentityDeviation,
    pub invariance: IdentityDeviation,
    pub transversal_independence: IdentityDeviation,
}

pub fn verify_homomorphism(
    ctx: &RelativisationContext,
    samples: &[Operator],
    rng: &mut SampleRng,
) -> Result<HomomorphismReport> {
    let images = samples.iter().map(|a| yen_x(ctx, a)).collect::<Result<Vec<_>>>()?;
    let k = samples.len();
    let mut multiplicative = Vec::with_capacity(k);
    let mut adjoint = Vec::with_capacity(k);
    for i in 0..k {
        let j = (i + 1) % k;
        let product = &samples[i] * &samples[j];
        let image = yen_x(ctx, &product)?;
        multiplicative.push(image.operator.distance(&(&images[i].operator * &images[j].operator)));
        let star = yen_x(ctx, &product.adjoint())?;
        adjoint.push(star.operator.distance(&image.operator.adjoint()));
    }
    let unit = yen_x(ctx, &Operator::identity(ctx.system_dim()))?;
    let unit_dev = unit
        .operator
        .distance(&Operator::identity(ctx.system_dim() * ctx.frame_dim()));
    let isometry = samples
        .iter()
        .zip(&images)
        .map(|(a, t)| (operator_norm(a) - operator_norm(&t.operator)).abs());
    let invariance = images.iter().map(|t| t.invariance_residual);
    let mut transversal = Vec::with_capacity(k);
    for (a, t) in samples.iter().zip(&images) {
        let reps = ctx.random_transversal(rng);
        let other = yen_x_with_transversal(ctx, a, &reps)?;
        transversal.push(other.operator.distance(&t.operator));
    }
    Ok(HomomorphismReport {
        multiplicative: IdentityDeviation::over(multiplicative),
        adjoint: IdentityDeviation::over(adjoint),
        unit: IdentityDeviation::over([unit_dev, unit.invariance_residual]),
        isometry: IdentityDeviation::over(isometry),
        invariance: IdentityDeviation::over(invariance),
        transversal_independence: IdentityDeviation::over(transversal),
    })
}

/// The four restriction identities.
#[derive(Debug, Clone, Serialize)]
pub struct RestrictionReport {
    /// `Γ_{P_x} ∘ ¥_x = id`.
    pub localised_identity: IdentityDeviation,
    /// `Γ_{P_{g·x}} ∘ ¥_x = Ad U_S(g)` for every `g`.
    pub translated: IdentityDeviation,
    /// `Γ_{P_{g·x}} ∘ ¥_{g·x} ∘ Ad U_S(g) = Γ_{P_{g·x}} ∘ ¥_x`.
    pub commuting_square: IdentityDeviation,
    /// `Γ_{I/n} ∘ ¥_x = Γ_{P_𝟙} ∘ ¥_x = G-twirl`.
    pub invariant_state_twirl: IdentityDeviation,
}

pub fn verify_restriction(ctx: &RelativisationContext, samples: &[Operator]) -> Result<RestrictionReport> {
    let action = ctx.frame.action();
    let n = ctx.n_points();
    let x = ctx.base_x;
    let group = ctx.system_rep.group();
    let localised = DensityState::basis(n, x);
    let mixed = DensityState::maximally_mixed(n);
    let constant = DensityState::pure(&nalgebra::DVector::from_element(n, C64::new(1.0, 0.0)))?;

    let mut item1 = Vec::new();
    let mut item2 = Vec::new();
    let mut item3 = Vec::new();
    let mut item4 = Vec::new();
    let rebased = (0..n).map(|y| ctx.rebased(y)).collect::<Result<Vec<_>>>()?;
    for a in samples {
        let t = yen_x_operator(ctx, a)?;
        item1.push(gamma_restrict(&localised, &t)?.distance(a));
        for g in group.elements() {
            let gx = action.act(g, x);
            let at_gx = DensityState::basis(n, gx);
            let restricted = gamma_restrict(&at_gx, &t)?;
            let moved = ctx.system_rep.conjugate(g, a);
            item2.push(restricted.distance(&moved));
            let other = yen_x_operator(&rebased[gx], &moved)?;
            item3.push(gamma_restrict(&at_gx, &other)?.distance(&restricted));
        }
        let twirl = g_twirl(&ctx.system_rep, a)?;
        item4.push(gamma_restrict(&mixed, &t)?.distance(&twirl));
        item4.push(gamma_restrict(&constant, &t)?.distance(&twirl));
    }
    Ok(RestrictionReport {
        localised_identity: IdentityDeviation::over(item1),
        translated: IdentityDeviation::over(item2),
        commuting_square: IdentityDeviation::over(item3),
        invariant_state_twirl: IdentityDeviation::over(item4),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FactorisationReport {
    /// `‖¥^E(A) − ¥_x(av_H(A))‖`.
    pub factorisation: IdentityDeviation,
    /// `‖Γ_{P_x}(¥^E(A)) − av_H(A)‖`: restriction only ever sees the H-twirl.
    pub forced_average: IdentityDeviation,
}

/// Checks the factorisation of `¥^E` on unrestricted operators.
pub fn verify_factorisation(ctx: &RelativisationContext, samples: &[Operator]) -> Result<FactorisationReport> {
    let localised = DensityState::basis(ctx.n_points(), ctx.base_x);
    let mut fact = Vec::new();
    let mut forced = Vec::new();
    for a in samples {
        let averaged = h_twirl(&ctx.system_rep, ctx.stabiliser(), a)?;
        let via_e = yen_E_on_G(ctx, a)?.operator;
        let via_x = yen_x(ctx, &averaged)?.operator;
        fact.push(via_e.distance(&via_x));
        let restricted_e = gamma_restrict(&localised, &via_e)?;
        forced.push(
            restricted_e
                .distance(&gamma_restrict(&localised, &via_x)?)
                .max(restricted_e.distance(&averaged)),
        );
    }
    Ok(FactorisationReport {
        factorisation: IdentityDeviation::over(fact),
        forced_average: IdentityDeviation::over(forced),
    })
}

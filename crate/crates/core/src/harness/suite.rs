use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::example::{tensor_factor_identities, Oracle};
use super::{max_of, resolve, stream, Metadata, Space, SuiteReport, Verdict};
use crate::error::{Error, Result};
use crate::linalg::{born_probability, DensityState, Operator, C64};
use crate::observables::{
    born_distribution, canonical_pvm, coherent_system, localisation_equivalence, pullback_povm, six_way_equivalence,
    CovariantFrame, Observable, OutcomeSpace,
};
use crate::relativisation::{
    invariant_samples, random_complex, verify_factorisation, verify_homomorphism, verify_restriction,
    RelativisationContext,
};
use crate::representations::{invariant_vectors, permutation_representation, RepKind, RepSpec};

/// Checks run by [`run_suite`], always in declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckId {
    Stabiliser,
    InvariantVectors,
    UniformDistribution,
    ResolutionOfIdentity,
    Localisation,
    SixWay,
    Homomorphism,
    Restriction,
    Factorisation,
    TensorFactor,
}

impl CheckId {
    pub const ALL: [CheckId; 10] = [
        CheckId::Stabiliser,
        CheckId::InvariantVectors,
        CheckId::UniformDistribution,
        CheckId::ResolutionOfIdentity,
        CheckId::Localisation,
        CheckId::SixWay,
        CheckId::Homomorphism,
        CheckId::Restriction,
        CheckId::Factorisation,
        CheckId::TensorFactor,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckId::Stabiliser => "stabiliser",
            CheckId::InvariantVectors => "invariant-vectors",
            CheckId::UniformDistribution => "uniform-distribution",
            CheckId::ResolutionOfIdentity => "resolution-of-identity",
            CheckId::Localisation => "localisation",
            CheckId::SixWay => "six-way",
            CheckId::Homomorphism => "homomorphism",
            CheckId::Restriction => "restriction",
            CheckId::Factorisation => "factorisation",
            CheckId::TensorFactor => "tensor-factor",
        }
    }

    pub fn anchor(self) -> &'static str {
        match self {
            CheckId::Stabiliser => "G_{g·x} = g G_x g⁻¹ and |G| = |X|·|G_x|",
            CheckId::InvariantVectors => "L²(X)^G = C·𝟙",
            CheckId::UniformDistribution => "tr[P_y P_𝟙] = tr[P_y I/n] = 1/n",
            CheckId::ResolutionOfIdentity => "Σ_g |gH⟩⟨gH| = |H|·I",
            CheckId::Localisation => "‖E_i‖ = 1 ⇔ ∃ω tr[ωE_i] = 1 ⇔ ∃ pure ω tr[ωE_i] = 1",
            CheckId::SixWay => {
                "H = {e} ⇔ E sharp ⇔ ‖E_g‖ = 1 ⇔ E localisable ⇔ E pure-localisable ⇔ {|gH⟩} ideal and complete"
            }
            CheckId::Homomorphism => {
                "¥_x(AB) = ¥_x(A)¥_x(B), ¥_x(A*) = ¥_x(A)*, ¥_x(I) = I⊗I, ‖¥_x(A)‖ = ‖A‖, ¥_x(A) ∈ B(H_S⊗L²(X))^G"
            }
            CheckId::Restriction => {
                "Γ_{P_x}∘¥_x = id; Γ_{P_{g·x}}∘¥_x = Ad U_S(g); Γ_{P_{g·x}}∘¥_{g·x}∘Ad U_S(g) = Γ_{P_{g·x}}∘¥_x; Γ_{I/n}∘¥_x = Γ_{P_𝟙}∘¥_x = G-twirl"
            }
            CheckId::Factorisation => "¥^E = ¥_x ∘ av_H",
            CheckId::TensorFactor => {
                "¥_x(A_1⊗…⊗A_n) = Σ_{gH} A_{g⁻¹(1)}⊗…⊗A_{g⁻¹(n)} ⊗ P_{g·x}; Γ_{P_y}∘¥_x permutes the factors"
            }
        }
    }

    fn stream(self) -> u64 {
        self as u64 + 1
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CheckId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CheckId::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::config("checks", format!("unknown check `{s}`")))
    }
}

fn default_tolerance() -> f64 {
    1e-9
}

fn default_samples() -> usize {
    16
}

/// Suite configuration. An empty `checks` list means every applicable
/// check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub group: String,
    #[serde(default)]
    pub base_point: Option<usize>,
    #[serde(default)]
    pub system_rep: Option<RepSpec>,
    #[serde(default)]
    pub checks: Vec<CheckId>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
}

impl SuiteConfig {
    pub fn new(group: impl Into<String>) -> Self {
        SuiteConfig {
            group: group.into(),
            base_point: None,
            system_rep: None,
            checks: Vec::new(),
            tolerance: default_tolerance(),
            samples: default_samples(),
            seed: 0,
        }
    }
}

struct Resolved {
    space: Space,
    rep_spec: RepSpec,
    ctx: RelativisationContext,
    checks: Vec<CheckId>,
}

fn resolve_config(config: &SuiteConfig) -> Result<Resolved> {
    if !(config.tolerance > 0.0 && config.tolerance.is_finite()) {
        return Err(Error::config(
            "tolerance",
            format!("must be positive and finite, got {}", config.tolerance),
        ));
    }
    if config.samples == 0 {
        return Err(Error::config("samples", "must be at least 1"));
    }
    let space = resolve(&config.group)?;
    let rep_spec = config.system_rep.clone().unwrap_or_else(|| space.default_rep.clone());
    let rep = space.system_rep(Some(&rep_spec)).map_err(|e| match e {
        Error::Config { .. } => e,
        other => Error::config("system_rep", other.to_string()),
    })?;
    let base = config.base_point.unwrap_or(space.default_base);
    if base >= space.frame_action.n_points() {
        return Err(Error::config(
            "base_point",
            format!(
                "{base} is not a point of the {}-point space",
                space.frame_action.n_points()
            ),
        ));
    }
    let frame = canonical_pvm(&space.frame_action).map_err(|e| Error::config("group", e.to_string()))?;
    let ctx = RelativisationContext::new(rep, frame, base)?;

    let tensor_factor = rep_spec.kind == RepKind::TensorFactor;
    let checks = if config.checks.is_empty() {
        CheckId::ALL
            .into_iter()
            .filter(|&c| c != CheckId::TensorFactor || tensor_factor)
            .collect()
    } else {
        let mut checks = config.checks.clone();
        checks.sort();
        if let Some(w) = checks.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::config("checks", format!("`{}` requested twice", w[0])));
        }
        if checks.contains(&CheckId::TensorFactor) && !tensor_factor {
            return Err(Error::config(
                "checks",
                "tensor-factor needs a tensor_factor system representation",
            ));
        }
        checks
    };
    Ok(Resolved {
        space,
        rep_spec,
        ctx,
        checks,
    })
}

/// Validates `config`, then runs the requested checks in [`CheckId::ALL`]
/// order. Configuration problems surface as `Error::Config` before any
/// check runs.
pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    let resolved = resolve_config(config)?;
    let space = &resolved.space;
    let parameters = json!({
        "group": space.name,
        "symbols": space.spec.symbols,
        "generators": space.spec.generators,
        "frame_points": space.frame_action.n_points(),
        "base_point": resolved.ctx.base_x(),
        "system_rep": resolved.rep_spec,
        "system_dim": resolved.ctx.system_dim(),
        "checks": resolved.checks,
    });
    let metadata = Metadata::new("verify", config.seed, config.tolerance, config.samples, parameters);
    let shares_samples = resolved
        .checks
        .iter()
        .any(|c| matches!(c, CheckId::Homomorphism | CheckId::Restriction));
    let invariant = if shares_samples {
        invariant_samples(&resolved.ctx, config.samples, &mut stream(config.seed, 0))
    } else {
        Vec::new()
    };
    let runner = Runner {
        config,
        resolved: &resolved,
        invariant,
    };
    let mut timed = Vec::with_capacity(resolved.checks.len());
    for &check in &resolved.checks {
        let start = Instant::now();
        let verdict = runner.run(check)?;
        timed.push((verdict, start.elapsed()));
    }
    Ok(SuiteReport::new(metadata, timed))
}

struct Runner<'a> {
    config: &'a SuiteConfig,
    resolved: &'a Resolved,
    /// Shared by the homomorphism and restriction checks.
    invariant: Vec<Operator>,
}

pub(super) fn verdict(
    id: &str,
    anchor: &str,
    samples: usize,
    max_deviation: f64,
    tolerance: f64,
    holds: bool,
    detail: serde_json::Value,
) -> Verdict {
    Verdict {
        id: id.to_string(),
        anchor: anchor.to_string(),
        samples,
        max_deviation,
        pass: holds && max_deviation < tolerance,
        detail,
    }
}

pub(super) fn six_way_verdict(id: &str, anchor: &str, frame: &CovariantFrame, x: usize, tol: f64) -> Result<Verdict> {
    let r = six_way_equivalence(frame, x)?;
    let classification = if r.principal() { "principal" } else { "non-principal" };
    Ok(verdict(
        id,
        anchor,
        r.effect_norms.len(),
        r.norm_deviation(),
        tol,
        r.all_agree(),
        json!({
            "classification": classification,
            "stabiliser_order": r.stabiliser_order,
            "expected_effect_norm": 1.0 / r.stabiliser_order as f64,
            "effect_norm_max": r.effect_norms.iter().copied().fold(0.0, f64::max),
            "effect_norm_min": r.effect_norms.iter().copied().fold(f64::INFINITY, f64::min),
            "verdicts": {
                "stabiliser_trivial": r.h_trivial,
                "sharp": r.sharp,
                "norm_one": r.norm_one,
                "localisable": r.localisable,
                "pure_localisable": r.pure_localisable,
                "ideal": r.ideal,
                "complete": r.complete,
            },
        }),
    ))
}

fn indicator(holds: bool) -> f64 {
    if holds {
        0.0
    } else {
        1.0
    }
}

/// `E_y = ½P_y + I/(2n)`, a covariant unsharp observable on any transitive
/// space.
fn smeared_frame(frame: &CovariantFrame) -> Result<Observable> {
    let n = frame.observable().dim();
    let blur = Operator::identity(n).scale(0.5 / n as f64);
    let effects = frame
        .observable()
        .effects()
        .iter()
        .map(|p| &p.scale(0.5) + &blur)
        .collect();
    Observable::new(OutcomeSpace::Points, effects)
}

impl Runner<'_> {
    fn ctx(&self) -> &RelativisationContext {
        &self.resolved.ctx
    }

    fn tol(&self) -> f64 {
        self.config.tolerance
    }

    fn run(&self, check: CheckId) -> Result<Verdict> {
        let (id, anchor) = (check.as_str(), check.anchor());
        let tol = self.tol();
        let ctx = self.ctx();
        let action = ctx.frame().action();
        let x = ctx.base_x();
        let n = ctx.n_points();
        let h = ctx.stabiliser();
        Ok(match check {
            CheckId::Stabiliser => {
                let group = action.group();
                let conjugate = (0..n).all(|y| {
                    let g = action.transporter(x, y).expect("transitive");
                    let moved = h.conjugate_by(g).expect("element of the group");
                    action
                        .stabiliser(y)
                        .map(|s| s.members() == moved.members())
                        .unwrap_or(false)
                });
                let counted = group.order() == n * h.order();
                verdict(
                    id,
                    anchor,
                    n,
                    indicator(conjugate && counted),
                    tol,
                    true,
                    json!({
                        "group_order": group.order(),
                        "orbit_size": n,
                        "stabiliser_order": h.order(),
                        "conjugate_stabilisers": conjugate,
                    }),
                )
            }
            CheckId::InvariantVectors => {
                let report = invariant_vectors(&permutation_representation(action));
                let dev = if report.fixed_dim == 1 {
                    let f = &report.fixed_basis[0];
                    let overlap: C64 = f.iter().sum::<C64>() / (n as f64).sqrt();
                    (1.0 - overlap.norm()).abs()
                } else {
                    1.0
                };
                verdict(
                    id,
                    anchor,
                    1,
                    dev,
                    tol,
                    report.fixed_dim == 1,
                    json!({ "fixed_dim": report.fixed_dim }),
                )
            }
            CheckId::UniformDistribution => {
                let constant = DensityState::pure(&nalgebra::DVector::from_element(n, C64::new(1.0, 0.0)))?;
                let mixed = DensityState::maximally_mixed(n);
                let obs = ctx.frame().observable();
                let pure = born_distribution(obs, &constant)?;
                let flat = born_distribution(obs, &mixed)?;
                let mut dev = max_of(pure.probabilities.iter().map(|p| (p - 1.0 / n as f64).abs()));
                dev = dev.max(max_of(
                    pure.probabilities
                        .iter()
                        .zip(&flat.probabilities)
                        .map(|(p, q)| (p - q).abs()),
                ));
                let pulled = pullback_povm(ctx.frame(), x)?;
                let on_g = born_distribution(pulled.observable(), &constant)?;
                let order = action.group().order() as f64;
                dev = dev.max(max_of(on_g.probabilities.iter().map(|p| (p - 1.0 / order).abs())));
                verdict(
                    id,
                    anchor,
                    2,
                    dev,
                    tol,
                    true,
                    json!({ "points": n, "elements": action.group().order() }),
                )
            }
            CheckId::ResolutionOfIdentity => {
                let coherent = coherent_system(ctx.frame(), x)?;
                let expected = Operator::identity(n).scale(h.order() as f64);
                let dev = coherent.frame_operator().distance(&expected);
                verdict(
                    id,
                    anchor,
                    action.group().order(),
                    dev,
                    tol,
                    true,
                    json!({ "stabiliser_order": h.order() }),
                )
            }
            CheckId::Localisation => {
                let pulled = pullback_povm(ctx.frame(), x)?;
                let smeared = smeared_frame(ctx.frame())?;
                let mut detail = Vec::new();
                let mut agree = true;
                let mut effects = 0;
                for (name, obs) in [
                    ("P", ctx.frame().observable()),
                    ("E", pulled.observable()),
                    ("smeared", &smeared),
                ] {
                    let verdicts = localisation_equivalence(obs)?;
                    // a constructed localising state must actually localise
                    for v in &verdicts {
                        if let Some(state) = crate::observables::localising_state(obs, v.outcome)? {
                            agree &= (born_probability(obs.effect(v.outcome), &state)? - 1.0).abs() < tol;
                        }
                    }
                    let all = verdicts.iter().all(|v| v.agrees());
                    agree &= all;
                    effects += verdicts.len();
                    detail.push(json!({
                        "observable": name,
                        "effects": verdicts.len(),
                        "norm_one": verdicts.iter().filter(|v| v.norm_one).count(),
                        "agree": all,
                    }));
                }
                verdict(id, anchor, effects, indicator(agree), tol, agree, json!(detail))
            }
            CheckId::SixWay => six_way_verdict(id, anchor, ctx.frame(), x, tol)?,
            CheckId::Homomorphism => {
                let samples = &self.invariant;
                let r = verify_homomorphism(ctx, samples, &mut stream(self.config.seed, check.stream()))?;
                let parts = [
                    &r.multiplicative,
                    &r.adjoint,
                    &r.unit,
                    &r.isometry,
                    &r.invariance,
                    &r.transversal_independence,
                ];
                verdict(
                    id,
                    anchor,
                    samples.len(),
                    max_of(parts.iter().map(|d| d.max_deviation)),
                    tol,
                    true,
                    json!(r),
                )
            }
            CheckId::Restriction => {
                let samples = &self.invariant;
                let r = verify_restriction(ctx, samples)?;
                let parts = [
                    &r.localised_identity,
                    &r.translated,
                    &r.commuting_square,
                    &r.invariant_state_twirl,
                ];
                verdict(
                    id,
                    anchor,
                    samples.len(),
                    max_of(parts.iter().map(|d| d.max_deviation)),
                    tol,
                    true,
                    json!(r),
                )
            }
            CheckId::Factorisation => {
                let mut rng = stream(self.config.seed, check.stream());
                let samples: Vec<Operator> = (0..self.config.samples)
                    .map(|_| random_complex(ctx.system_dim(), &mut rng))
                    .collect();
                let r = verify_factorisation(ctx, &samples)?;
                let dev = r.factorisation.max_deviation.max(r.forced_average.max_deviation);
                verdict(id, anchor, samples.len(), dev, tol, true, json!(r))
            }
            CheckId::TensorFactor => {
                let d = self.resolved.rep_spec.factor_dim.expect("validated");
                let oracle = Oracle::from_group(&self.resolved.space.defining, action, x);
                let mut rng = stream(self.config.seed, check.stream());
                let r = tensor_factor_identities(ctx, &oracle, d, self.config.samples, &mut rng)?;
                verdict(
                    id,
                    anchor,
                    self.config.samples,
                    r.max_deviation(),
                    tol,
                    r.rejection_holds,
                    json!(r),
                )
            }
        })
    }
}

//! The symmetric group `S_n` on `n` points with `U_S` permuting the factors
//! of `H^{⊗n}`. The stabiliser of a point is `S_{n−1}`, so for `n ≥ 3` the
//! space is not principal.

use std::time::Instant;

use itertools::Itertools;
use serde::Serialize;
use serde_json::json;

use super::suite::{six_way_verdict, verdict};
use super::{stream, Metadata, SuiteReport, Verdict};
use crate::error::{Error, Result};
use crate::group::{build_group_from_generators, GroupAction};
use crate::linalg::{self, operator_norm, tensor, tensor_all, DensityState, Operator};
use crate::observables::canonical_pvm;
use crate::relativisation::{
    gamma_restrict, h_twirl, invariant_samples, random_complex, yen_x, yen_x_operator, RelativisationContext, SampleRng,
};
use crate::representations::{
    invariant_vectors, permutation_representation, subgroup_invariance_deviation, tensor_factor_representation,
};

/// `A_{σ⁻¹(1)} ⊗ … ⊗ A_{σ⁻¹(n)}`: factor `k` lands at position `perm[k]`.
pub fn permuted_tensor(factors: &[Operator], perm: &[usize]) -> Result<Operator> {
    if factors.len() != perm.len() {
        return Err(Error::DimensionMismatch {
            expected: factors.len(),
            found: perm.len(),
        });
    }
    crate::group::check_permutation(perm)?;
    let mut placed = factors.to_vec();
    for (k, &p) in perm.iter().enumerate() {
        placed[p] = factors[k].clone();
    }
    tensor_all(&placed)
}

/// Pairs `(factor permutation of g, g·x)` over all `g ∈ G`, from which
/// `¥_x ∘ av_H` on simple tensors is summed directly.
pub(super) struct Oracle {
    terms: Vec<(Vec<usize>, usize)>,
    base: usize,
    stabiliser_order: usize,
}

impl Oracle {
    pub(super) fn from_group(defining: &GroupAction, frame: &GroupAction, x: usize) -> Self {
        let terms = defining
            .group()
            .elements()
            .map(|g| (defining.permutation(g).to_vec(), frame.act(g, x)))
            .collect();
        Self::new(terms, x)
    }

    /// Every permutation of `0..n`, enumerated without the group machinery.
    fn symmetric(n: usize, x: usize) -> Self {
        let terms = (0..n).permutations(n).map(|p| {
            let y = p[x];
            (p, y)
        });
        Self::new(terms.collect(), x)
    }

    fn new(terms: Vec<(Vec<usize>, usize)>, x: usize) -> Self {
        let stabiliser_order = terms.iter().filter(|(_, y)| *y == x).count();
        Oracle {
            terms,
            base: x,
            stabiliser_order,
        }
    }

    fn scale(&self) -> f64 {
        1.0 / self.stabiliser_order as f64
    }

    /// `(1/|H|) Σ_g π_g(A_1⊗…⊗A_n) ⊗ P_{g·x}`.
    fn relativised(&self, factors: &[Operator], n_points: usize) -> Result<Operator> {
        let d: usize = factors.iter().map(Operator::dim).product();
        let mut acc = Operator::zeros(d * n_points);
        for (perm, y) in &self.terms {
            let term = tensor(
                &permuted_tensor(factors, perm)?,
                &Operator::matrix_unit(n_points, *y, *y),
            )?;
            acc = &acc + &term;
        }
        Ok(acc.scale(self.scale()))
    }

    /// `(1/|H|) Σ_{g·x = y} π_g(A_1⊗…⊗A_n)`.
    fn restricted(&self, factors: &[Operator], y: usize) -> Result<Operator> {
        let d: usize = factors.iter().map(Operator::dim).product();
        let mut acc = Operator::zeros(d);
        for (perm, _) in self.terms.iter().filter(|(_, z)| *z == y) {
            acc = &acc + &permuted_tensor(factors, perm)?;
        }
        Ok(acc.scale(self.scale()))
    }
}

#[derive(Debug, Clone, Serialize)]
pub(super) struct TensorFactorReport {
    pub yen_oracle_deviation: f64,
    pub restriction_oracle_deviation: f64,
    pub rejection_holds: bool,
    pub rejected: usize,
}

impl TensorFactorReport {
    pub(super) fn max_deviation(&self) -> f64 {
        self.yen_oracle_deviation.max(self.restriction_oracle_deviation)
    }
}

/// On `samples` random simple tensors: `¥_x(av_H(A))` against the oracle
/// sum entrywise, `Γ_{P_y}` of it against the permuted products, and
/// rejection of the raw tensor whenever `H` moves the factors.
pub(super) fn tensor_factor_identities(
    ctx: &RelativisationContext,
    oracle: &Oracle,
    factor_dim: usize,
    samples: usize,
    rng: &mut SampleRng,
) -> Result<TensorFactorReport> {
    let n_factors = oracle.terms[0].0.len();
    let n = ctx.n_points();
    let h_moves_factors = oracle
        .terms
        .iter()
        .filter(|(_, y)| *y == oracle.base)
        .any(|(perm, _)| perm.iter().enumerate().any(|(k, &p)| p != k));
    let mut yen_dev: f64 = 0.0;
    let mut res_dev: f64 = 0.0;
    let mut rejected = 0;
    for _ in 0..samples {
        let factors: Vec<Operator> = (0..n_factors).map(|_| random_complex(factor_dim, rng)).collect();
        let raw = tensor_all(&factors)?;
        match yen_x(ctx, &raw) {
            Err(Error::NotStabiliserInvariant(_)) => rejected += 1,
            Err(e) => return Err(e),
            Ok(_) => {}
        }
        let averaged = h_twirl(ctx.system_rep(), ctx.stabiliser(), &raw)?;
        let t = yen_x_operator(ctx, &averaged)?;
        yen_dev = yen_dev.max(t.max_abs_diff(&oracle.relativised(&factors, n)?));
        for y in 0..n {
            let restricted = gamma_restrict(&DensityState::basis(n, y), &t)?;
            res_dev = res_dev.max(restricted.max_abs_diff(&oracle.restricted(&factors, y)?));
        }
    }
    let rejection_holds = if h_moves_factors {
        rejected == samples
    } else {
        rejected == 0
    };
    Ok(TensorFactorReport {
        yen_oracle_deviation: yen_dev,
        restriction_oracle_deviation: res_dev,
        rejection_holds,
        rejected,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExampleConfig {
    pub n: usize,
    pub factor_dim: usize,
    pub samples: usize,
    pub seed: u64,
    pub tolerance: f64,
}

impl Default for ExampleConfig {
    fn default() -> Self {
        ExampleConfig {
            n: 3,
            factor_dim: 2,
            samples: 16,
            seed: 0,
            tolerance: 1e-9,
        }
    }
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// `S_n` generated by `(0 1)` and the `n`-cycle.
fn symmetric_group(n: usize) -> Result<GroupAction> {
    let generators = if n == 1 {
        vec![vec![0]]
    } else {
        let mut t: Vec<usize> = (0..n).collect();
        t.swap(0, 1);
        vec![t, (0..n).map(|i| (i + 1) % n).collect()]
    };
    Ok(build_group_from_generators(&generators, n)?.1)
}

/// Runs the `S_n` example at base point `n − 1`.
pub fn example_sn(config: &ExampleConfig) -> Result<SuiteReport> {
    let &ExampleConfig {
        n,
        factor_dim: d,
        samples,
        seed,
        tolerance: tol,
    } = config;
    if n == 0 {
        return Err(Error::config("n", "must be at least 1"));
    }
    if d == 0 {
        return Err(Error::config("dim", "must be at least 1"));
    }
    if samples == 0 {
        return Err(Error::config("samples", "must be at least 1"));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::config("tolerance", "must be positive and finite"));
    }
    let cap = linalg::dimension_cap();
    let total = u32::try_from(n)
        .ok()
        .and_then(|e| d.checked_pow(e))
        .and_then(|p| p.checked_mul(n))
        .unwrap_or(usize::MAX);
    if total > cap {
        return Err(Error::DimensionOverflow { dim: total, cap });
    }

    let action = symmetric_group(n)?;
    let rep = tensor_factor_representation(&action, d)?;
    let x = n - 1;
    let ctx = RelativisationContext::new(rep, canonical_pvm(&action)?, x)?;
    let h = ctx.stabiliser().clone();

    let parameters =
        json!({ "n": n, "factor_dim": d, "base_point": x, "system_dim": ctx.system_dim(), "joint_dim": total });
    let metadata = Metadata::new("example-sn", seed, tol, samples, parameters);

    let mut timed: Vec<(Verdict, std::time::Duration)> = Vec::new();
    let mut record = |f: &mut dyn FnMut() -> Result<Verdict>| -> Result<()> {
        let start = Instant::now();
        let v = f()?;
        timed.push((v, start.elapsed()));
        Ok(())
    };

    record(&mut || {
        let dev = (h.order() as f64 - factorial(n - 1) as f64).abs()
            + (action.group().order() as f64 - factorial(n) as f64).abs();
        Ok(verdict(
            "stabiliser-order",
            "|G_x| = (n−1)!, |S_n| = n!",
            1,
            dev,
            tol,
            true,
            json!({ "stabiliser_order": h.order(), "group_order": action.group().order() }),
        ))
    })?;

    record(&mut || {
        let report = invariant_vectors(&permutation_representation(&action));
        let dev = if report.fixed_dim == 1 {
            let s: crate::linalg::C64 = report.fixed_basis[0].iter().sum();
            (1.0 - s.norm() / (n as f64).sqrt()).abs()
        } else {
            1.0
        };
        Ok(verdict(
            "invariant-vectors",
            "L²(X)^{S_n} = C·𝟙, so P_𝟙 is the unique invariant pure state",
            1,
            dev,
            tol,
            report.fixed_dim == 1,
            json!({ "fixed_dim": report.fixed_dim }),
        ))
    })?;

    // B^{⊗(n−1)} ⊗ C is S_{n−1}-invariant and its image is explicit
    let mut rng = stream(seed, 101);
    let invariant_tensors: Vec<(Operator, Operator)> = (0..samples)
        .map(|_| (random_complex(d, &mut rng), random_complex(d, &mut rng)))
        .collect();
    let with_c_at = |b: &Operator, c: &Operator, i: usize| -> Result<Operator> {
        let factors: Vec<Operator> = (0..n).map(|k| if k == i { c.clone() } else { b.clone() }).collect();
        tensor_all(&factors)
    };
    let oracle = Oracle::symmetric(n, x);
    let identities = tensor_factor_identities(&ctx, &oracle, d, samples, &mut stream(seed, 102))?;

    record(&mut || {
        let mut dev: f64 = 0.0;
        for (b, c) in &invariant_tensors {
            let t = yen_x_operator(&ctx, &with_c_at(b, c, x)?)?;
            let mut expected = Operator::zeros(t.dim());
            for i in 0..n {
                expected = &expected + &tensor(&with_c_at(b, c, i)?, &Operator::matrix_unit(n, i, i))?;
            }
            dev = dev.max(t.max_abs_diff(&expected));
        }
        dev = dev.max(identities.yen_oracle_deviation);
        Ok(verdict(
            "yen-simple-tensors",
            "¥_n(A_1⊗…⊗A_n) = Σ_{σ∈S_n/S_{n−1}} A_{σ⁻¹(1)}⊗…⊗A_{σ⁻¹(n)} ⊗ P_{σ(n)}",
            2 * samples,
            dev,
            tol,
            true,
            json!({ "invariant_products": samples, "twirled_products": samples }),
        ))
    })?;

    record(&mut || {
        let mut dev: f64 = 0.0;
        for (b, c) in &invariant_tensors {
            let t = yen_x_operator(&ctx, &with_c_at(b, c, x)?)?;
            for i in 0..n {
                let restricted = gamma_restrict(&DensityState::basis(n, i), &t)?;
                dev = dev.max(restricted.max_abs_diff(&with_c_at(b, c, i)?));
            }
        }
        dev = dev.max(identities.restriction_oracle_deviation);
        Ok(verdict(
            "restriction-permuted-products",
            "Γ_{P_i}∘¥_n(A_1⊗…⊗A_n) = A_{σ⁻¹(1)}⊗…⊗A_{σ⁻¹(n)} with σ(n) = i",
            2 * samples,
            dev,
            tol,
            true,
            serde_json::Value::Null,
        ))
    })?;

    record(&mut || {
        let r = round_trips(&ctx, samples, &mut stream(seed, 103))?;
        let dev = r.norm.max(r.inverse).max(r.composition).max(r.invariance);
        Ok(verdict(
            "restriction-isomorphisms",
            "Γ_{P_i}∘¥_j: B(H^{⊗n})^{G_j} → B(H^{⊗n})^{G_i} isometric, Γ_{P_j}∘¥_i∘Γ_{P_i}∘¥_j = id, Γ_{P_k}∘¥_i∘Γ_{P_i}∘¥_j = Γ_{P_k}∘¥_j",
            samples * n,
            dev,
            tol,
            true,
            json!(r),
        ))
    })?;

    record(&mut || {
        let mut accepted = true;
        for (b, c) in &invariant_tensors {
            accepted &= yen_x(&ctx, &with_c_at(b, c, x)?).is_ok();
        }
        Ok(verdict(
            "non-invariant-rejection",
            "¥_n is defined exactly on B(H^{⊗n})^{S_{n−1}}",
            2 * samples,
            0.0,
            tol,
            accepted && identities.rejection_holds,
            json!({ "invariant_accepted": accepted, "non_invariant_rejected": identities.rejected }),
        ))
    })?;

    record(&mut || six_way_verdict("six-way", super::CheckId::SixWay.anchor(), ctx.frame(), x, tol))?;

    Ok(SuiteReport::new(metadata, timed))
}

#[derive(Debug, Clone, Serialize)]
struct RoundTrips {
    norm: f64,
    inverse: f64,
    composition: f64,
    invariance: f64,
}

/// `M_ij = Γ_{P_i}∘¥_j` on `G_j`-invariant samples for every `i, j`.
fn round_trips(ctx: &RelativisationContext, samples: usize, rng: &mut SampleRng) -> Result<RoundTrips> {
    let n = ctx.n_points();
    let contexts = (0..n).map(|j| ctx.rebased(j)).collect::<Result<Vec<_>>>()?;
    let m = |i: usize, j: usize, a: &Operator| -> Result<Operator> {
        gamma_restrict(&DensityState::basis(n, i), &yen_x_operator(&contexts[j], a)?)
    };
    let mut r = RoundTrips {
        norm: 0.0,
        inverse: 0.0,
        composition: 0.0,
        invariance: 0.0,
    };
    for (j, cj) in contexts.iter().enumerate() {
        for a in invariant_samples(cj, samples, rng) {
            for (i, ci) in contexts.iter().enumerate() {
                let image = m(i, j, &a)?;
                r.norm = r.norm.max((operator_norm(&image) - operator_norm(&a)).abs());
                r.invariance = r.invariance.max(subgroup_invariance_deviation(
                    ctx.system_rep(),
                    ci.stabiliser(),
                    &image,
                )?);
                r.inverse = r.inverse.max(m(j, i, &image)?.distance(&a));
                for k in 0..n {
                    r.composition = r.composition.max(m(k, i, &image)?.distance(&m(k, j, &a)?));
                }
            }
        }
    }
    Ok(r)
}

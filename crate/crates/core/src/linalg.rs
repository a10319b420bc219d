//! Dense complex operator kernel.
//!
//! [`Operator`] wraps a square `nalgebra` matrix of `Complex64`. Tensor
//! products use the row-major block convention, so entry
//! `(i·dim_b + k, j·dim_b + l)` of `A ⊗ B` is `A[i][j]·B[k][l]`.

use std::ops::{Add, Mul, Sub};
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::EPS;

pub type C64 = Complex64;

pub const DEFAULT_DIM_CAP: usize = 4096;

/// Largest dimension any single operator may have. Reads `QRF_DIM_CAP` once.
pub fn dimension_cap() -> usize {
    static CAP: OnceLock<usize> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var("QRF_DIM_CAP")
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .filter(|&c| c > 0)
            .unwrap_or(DEFAULT_DIM_CAP)
    })
}

pub fn check_dim(dim: usize) -> Result<()> {
    let cap = dimension_cap();
    if dim > cap {
        Err(Error::DimensionOverflow { dim, cap })
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Operator(DMatrix<C64>);

impl Operator {
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Operator(m))
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Operator(DMatrix::from_fn(dim, dim, f))
    }

    /// Builds from row-major rows of complex entries.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: rows.iter().map(Vec::len).find(|&l| l != n).unwrap_or(0),
            });
        }
        Operator::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Operator::from_rows(&rows)
    }

    pub fn identity(dim: usize) -> Self {
        Operator(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Operator(DMatrix::zeros(dim, dim))
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Operator::from_fn(n, |i, j| {
            if i == j {
                C64::new(diag[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// Matrix unit `|i⟩⟨j|`.
    pub fn matrix_unit(dim: usize, i: usize, j: usize) -> Self {
        let mut m = DMatrix::zeros(dim, dim);
        m[(i, j)] = C64::new(1.0, 0.0);
        Operator(m)
    }

    /// `|v⟩⟨v|`.
    pub fn ket_bra(v: &DVector<C64>) -> Self {
        Operator(v * v.adjoint())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn adjoint(&self) -> Self {
        Operator(self.0.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn scale(&self, s: f64) -> Self {
        Operator(&self.0 * C64::new(s, 0.0))
    }

    pub fn scale_complex(&self, s: C64) -> Self {
        Operator(&self.0 * s)
    }

    /// `U A U*`.
    pub fn conjugated_by(&self, u: &Operator) -> Self {
        Operator(&u.0 * &self.0 * u.0.adjoint())
    }

    pub fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        &self.0 * v
    }

    pub fn require_dim(&self, expected: usize) -> Result<()> {
        if self.dim() == expected {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected,
                found: self.dim(),
            })
        }
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Operator-norm distance `‖self − other‖`.
    pub fn distance(&self, other: &Operator) -> f64 {
        operator_norm(&(self - other))
    }

    pub fn hermitian_deviation(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_deviation() <= EPS
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|z| z.norm() <= EPS)
    }

    pub fn hermitian_part(&self) -> Self {
        Operator((&self.0 + self.0.adjoint()) * C64::new(0.5, 0.0))
    }

    pub fn sum<'a>(dim: usize, ops: impl IntoIterator<Item = &'a Operator>) -> Self {
        let mut acc = DMatrix::zeros(dim, dim);
        for op in ops {
            acc += &op.0;
        }
        Operator(acc)
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        Operator(&self.0 + &rhs.0)
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        Operator(&self.0 - &rhs.0)
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        Operator(&self.0 * &rhs.0)
    }
}

/// Kronecker product `A ⊗ B`.
pub fn tensor(a: &Operator, b: &Operator) -> Result<Operator> {
    let dim = a.dim().checked_mul(b.dim()).ok_or(Error::DimensionOverflow {
        dim: usize::MAX,
        cap: dimension_cap(),
    })?;
    check_dim(dim)?;
    Ok(Operator(a.0.kronecker(&b.0)))
}

pub fn tensor_all(ops: &[Operator]) -> Result<Operator> {
    let mut iter = ops.iter();
    let first = iter
        .next()
        .ok_or(Error::DimensionMismatch { expected: 1, found: 0 })?
        .clone();
    iter.try_fold(first, |acc, op| tensor(&acc, op))
}

/// Largest singular value.
pub fn operator_norm(a: &Operator) -> f64 {
    a.0.clone().singular_values().iter().copied().fold(0.0, f64::max)
}

/// A yes/no verdict together with the measured deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Check {
    pub holds: bool,
    pub deviation: f64,
}

impl Check {
    fn at(deviation: f64) -> Self {
        Check {
            holds: deviation <= EPS,
            deviation,
        }
    }
}

/// `A² = A` and `A* = A`, deviation in max-abs entries.
pub fn check_projection(a: &Operator) -> Check {
    Check::at(a.max_abs_diff(&(a * a)).max(a.hermitian_deviation()))
}

/// `A* A = I`, deviation in max-abs entries.
pub fn check_unitary(a: &Operator) -> Check {
    Check::at((&a.adjoint() * a).max_abs_diff(&Operator::identity(a.dim())))
}

/// Hermitian with no eigenvalue below `−ε`.
pub fn check_positive(a: &Operator) -> Check {
    let herm = a.hermitian_deviation();
    if herm > EPS {
        return Check {
            holds: false,
            deviation: herm,
        };
    }
    let min = hermitian_eigenvalues(&a.hermitian_part())
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    Check::at(herm.max(-min).max(0.0))
}

pub fn is_projection(a: &Operator) -> bool {
    check_projection(a).holds
}

pub fn is_unitary(a: &Operator) -> bool {
    check_unitary(a).holds
}

pub fn is_positive(a: &Operator) -> bool {
    check_positive(a).holds
}

/// `0 ≤ A ≤ I`.
pub fn check_effect(a: &Operator) -> Check {
    let herm = a.hermitian_deviation();
    if herm > EPS {
        return Check {
            holds: false,
            deviation: herm,
        };
    }
    let eig = hermitian_eigenvalues(&a.hermitian_part());
    let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let max = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Check::at(herm.max(-min).max(max - 1.0).max(0.0))
}

fn hermitian_eigenvalues(a: &Operator) -> Vec<f64> {
    SymmetricEigen::new(a.0.clone()).eigenvalues.iter().copied().collect()
}

/// Eigendecomposition of a Hermitian operator, eigenvalues in descending
/// order with the matching orthonormal eigenvectors as columns.
pub fn hermitian_eigen(a: &Operator) -> Result<(Vec<f64>, DMatrix<C64>)> {
    let dev = a.hermitian_deviation();
    if dev > EPS {
        return Err(Error::NotHermitian(dev));
    }
    let eig = SymmetricEigen::new(a.hermitian_part().0);
    let mut order: Vec<usize> = (0..a.dim()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(a.dim(), a.dim(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Rotates `v` so that its first non-negligible component is real positive.
pub fn fix_phase(v: &mut DVector<C64>) {
    if let Some(z) = v.iter().find(|z| z.norm() > EPS).copied() {
        let phase = z.conj() / z.norm();
        for c in v.iter_mut() {
            *c *= phase;
        }
    }
}

/// Dominant eigenpair of a Hermitian operator, phase-fixed.
pub fn top_eigenvector(a: &Operator) -> Result<(f64, DVector<C64>)> {
    let (values, vectors) = hermitian_eigen(a)?;
    let mut v = vectors.column(0).into_owned();
    fix_phase(&mut v);
    Ok((values[0], v))
}

/// A positive unit-trace operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState(Operator);

impl DensityState {
    pub fn new(op: Operator) -> Result<Self> {
        let tr = op.trace();
        if (tr.re - 1.0).abs() > EPS || tr.im.abs() > EPS {
            return Err(Error::NotAState(format!("trace is {tr}")));
        }
        let pos = check_positive(&op);
        if !pos.holds {
            return Err(Error::NotAState(format!(
                "not positive semidefinite (deviation {:e})",
                pos.deviation
            )));
        }
        Ok(DensityState(op))
    }

    /// Pure state `|v⟩⟨v|/‖v‖²`.
    pub fn pure(v: &DVector<C64>) -> Result<Self> {
        let n = v.norm();
        if n <= EPS {
            return Err(Error::NotAState("zero vector".into()));
        }
        DensityState::new(Operator::ket_bra(&(v / C64::new(n, 0.0))))
    }

    /// `|i⟩⟨i|`.
    pub fn basis(dim: usize, i: usize) -> Self {
        DensityState(Operator::matrix_unit(dim, i, i))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityState(Operator::identity(dim).scale(1.0 / dim as f64))
    }

    pub fn op(&self) -> &Operator {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// `tr ρ²`, equal to 1 exactly for pure states.
    pub fn purity(&self) -> f64 {
        (&self.0 * &self.0).trace().re
    }
}

/// An orthogonal projection.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection(Operator);

impl Projection {
    pub fn new(op: Operator) -> Result<Self> {
        let c = check_projection(&op);
        if c.holds {
            Ok(Projection(op))
        } else {
            Err(Error::NotAnObservable(format!(
                "not a projection (deviation {:e})",
                c.deviation
            )))
        }
    }

    pub fn op(&self) -> &Operator {
        &self.0
    }

    pub fn into_op(self) -> Operator {
        self.0
    }
}

/// `tr[E ρ]` for an effect `0 ≤ E ≤ I`; the effect is validated.
pub fn born_probability(effect: &Operator, state: &DensityState) -> Result<f64> {
    let c = check_effect(effect);
    if !c.holds {
        return Err(Error::NotAnEffect(c.deviation));
    }
    born_probability_unchecked(effect, state)
}

/// `tr[E ρ]` without revalidating the effect.
pub fn born_probability_unchecked(effect: &Operator, state: &DensityState) -> Result<f64> {
    effect.require_dim(state.dim())?;
    let tr = trace_of_product(effect, state.op());
    if tr.im.abs() > EPS {
        return Err(Error::NotAnEffect(tr.im.abs()));
    }
    Ok(tr.re.clamp(0.0, 1.0))
}

/// `tr[A B]` without forming the product.
pub fn trace_of_product(a: &Operator, b: &Operator) -> C64 {
    let n = a.dim();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a.0[(i, k)] * b.0[(k, i)];
        }
    }
    acc
}

/// Nested `[re, im]` rows.
impl Serialize for Operator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = (0..self.dim())
            .map(|i| {
                (0..self.dim())
                    .map(|j| [self.0[(i, j)].re, self.0[(i, j)].im])
                    .collect()
            })
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Operator {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        let rows: Vec<Vec<C64>> = rows
            .into_iter()
            .map(|r| r.into_iter().map(|[re, im]| C64::new(re, im)).collect())
            .collect();
        Operator::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn random_op(dim: usize, rng: &mut ChaCha8Rng) -> Operator {
        Operator::from_fn(dim, |_, _| {
            C64::new(StandardNormal.sample(&mut *rng), StandardNormal.sample(&mut *rng))
        })
    }

    fn pauli_x() -> Operator {
        Operator::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
    }

    #[test]
    fn tensor_examples() {
        assert_eq!(
            tensor(&Operator::identity(2), &Operator::identity(3)).unwrap(),
            Operator::identity(6)
        );
        let a = Operator::diagonal(&[1.0, 0.0]);
        let b = Operator::diagonal(&[0.0, 1.0]);
        assert_eq!(tensor(&a, &b).unwrap(), Operator::diagonal(&[0.0, 1.0, 0.0, 0.0]));
    }

    #[test]
    fn tensor_block_convention() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_op(2, &mut rng);
        let b = random_op(3, &mut rng);
        let t = tensor(&a, &b).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..3 {
                    for l in 0..3 {
                        assert_eq!(t.get(i * 3 + k, j * 3 + l), a.get(i, j) * b.get(k, l));
                    }
                }
            }
        }
    }

    #[test]
    fn tensor_mixed_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let [a, b, cc, d] = std::array::from_fn(|_| random_op(2, &mut rng));
        let lhs = &tensor(&a, &b).unwrap() * &tensor(&cc, &d).unwrap();
        let rhs = tensor(&(&a * &cc), &(&b * &d)).unwrap();
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn tensor_overflow() {
        let a = Operator::identity(64);
        let b = Operator::identity(128);
        assert!(matches!(
            tensor(&a, &b),
            Err(Error::DimensionOverflow { dim: 8192, .. })
        ));
    }

    #[test]
    fn born_examples() {
        let rho = DensityState::new(Operator::diagonal(&[0.25, 0.75])).unwrap();
        assert!((born_probability(&Operator::identity(2), &rho).unwrap() - 1.0).abs() < 1e-12);
        let px = Operator::matrix_unit(3, 1, 1);
        assert!((born_probability(&px, &DensityState::basis(3, 1)).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(born_probability(&px, &DensityState::basis(3, 2)).unwrap(), 0.0);
    }

    #[test]
    fn born_errors() {
        let rho = DensityState::maximally_mixed(2);
        assert!(matches!(
            born_probability(&Operator::identity(3), &rho),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            born_probability(&Operator::identity(2).scale(2.0), &rho),
            Err(Error::NotAnEffect(_))
        ));
        assert!(matches!(born_probability(&pauli_x(), &rho), Err(Error::NotAnEffect(_))));
    }

    #[test]
    fn density_state_validation() {
        assert!(DensityState::new(Operator::identity(2)).is_err());
        assert!(DensityState::new(Operator::diagonal(&[1.5, -0.5])).is_err());
        let s = DensityState::pure(&DVector::from_vec(vec![c(1.0), c(1.0)])).unwrap();
        assert!((s.purity() - 1.0).abs() < 1e-12);
        assert!((DensityState::maximally_mixed(4).purity() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn norm_examples() {
        assert!((operator_norm(&Operator::identity(3)) - 1.0).abs() < 1e-12);
        let p = Operator::matrix_unit(3, 0, 0);
        assert!((operator_norm(&p.scale(0.5)) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn norm_matches_eigen_route_on_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..8 {
            let h = random_op(4, &mut rng).hermitian_part();
            let (values, _) = hermitian_eigen(&h).unwrap();
            let max_abs = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
            assert!((operator_norm(&h) - max_abs).abs() < 1e-10);
        }
    }

    #[test]
    fn predicate_examples() {
        let id = Operator::identity(2);
        assert!(is_projection(&id) && is_unitary(&id) && is_positive(&id));
        let half = id.scale(0.5);
        assert!(!is_projection(&half));
        assert!(!is_unitary(&half));
        assert!(is_positive(&half));
        let x = pauli_x();
        assert!(!is_projection(&x));
        assert!(is_unitary(&x));
        assert!(!is_positive(&x));
        assert!((check_positive(&x).deviation - 1.0).abs() < 1e-12);
        assert!((check_projection(&half).deviation - 0.25).abs() < 1e-12);
    }

    #[test]
    fn top_eigenvector_examples() {
        let px = Operator::matrix_unit(3, 1, 1);
        let (l, v) = top_eigenvector(&px).unwrap();
        assert!((l - 1.0).abs() < 1e-12);
        assert!((v[1] - c(1.0)).norm() < 1e-12);

        let scaled = Operator::matrix_unit(3, 2, 2).scale(0.5);
        assert!((top_eigenvector(&scaled).unwrap().0 - 0.5).abs() < 1e-12);

        let d = Operator::diagonal(&[3.0, 1.0]);
        let (l, v) = top_eigenvector(&d).unwrap();
        assert!((l - 3.0).abs() < 1e-12);
        assert!((v[0] - c(1.0)).norm() < 1e-12 && v[1].norm() < 1e-12);

        let not_herm = Operator::matrix_unit(2, 0, 1);
        assert!(matches!(top_eigenvector(&not_herm), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn top_eigenvector_residual_and_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..8 {
            let h = random_op(5, &mut rng).hermitian_part();
            let (l, v) = top_eigenvector(&h).unwrap();
            let residual = (h.apply(&v) - &v * c(l)).norm();
            assert!(residual < 1e-9, "residual {residual}");
            let first = v.iter().find(|z| z.norm() > EPS).unwrap();
            assert!(first.im.abs() < 1e-12 && first.re > 0.0);
        }
    }

    #[test]
    fn non_square_and_non_finite_rejected() {
        assert!(Operator::new(DMatrix::zeros(2, 3)).is_err());
        assert!(Operator::from_real_rows(&[vec![f64::NAN]]).is_err());
        assert!(Operator::from_real_rows(&[vec![1.0, 0.0], vec![1.0]]).is_err());
    }

    #[test]
    fn json_encoding() {
        let op = Operator::from_rows(&[vec![c(1.0), C64::new(0.0, -2.0)], vec![C64::new(0.5, 0.25), c(0.0)]]).unwrap();
        let s = serde_json::to_string(&op).unwrap();
        assert_eq!(s, "[[[1.0,0.0],[0.0,-2.0]],[[0.5,0.25],[0.0,0.0]]]");
        assert_eq!(serde_json::from_str::<Operator>(&s).unwrap(), op);
        assert!(serde_json::from_str::<Operator>("[[[1.0,0.0]],[[0.0,0.0]]]").is_err());
    }
}

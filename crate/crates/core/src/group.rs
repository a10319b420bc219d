//! Finite groups as Cayley tables, with subgroup, coset, stabiliser and
//! action machinery.
//!
//! Elements are canonical indices `0..order`; index 0 is always the identity.
//! Groups generated from permutations order their elements by breadth-first
//! discovery: starting from the identity, each discovered element `w` is
//! extended by `s·w` for every generator `s` in listed order. Permutations are
//! image arrays (`p[i]` is the image of `i`) and compose right-to-left, so
//! `(a·b)[i] = a[b[i]]` and the defining action is a left action.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the size of a generated group (`|S₇|` fits twice over).
pub const DEFAULT_CLOSURE_CAP: usize = 10080;

/// Orders up to this are checked exhaustively; larger tables are sampled.
pub const EXHAUSTIVE_ORDER: usize = 64;

const SAMPLED_TRIPLES: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    cayley: Vec<u32>,
    inverse: Vec<usize>,
    generators: Vec<usize>,
}

impl FiniteGroup {
    /// Builds a group from a full multiplication table, where
    /// `table[a][b]` is the index of `a·b`. Index 0 must be the identity.
    pub fn from_cayley(table: Vec<Vec<usize>>) -> Result<Self> {
        let order = table.len();
        if order == 0 {
            return Err(Error::NotAGroup("empty table".into()));
        }
        let mut cayley = Vec::with_capacity(order * order);
        for (a, row) in table.iter().enumerate() {
            if row.len() != order {
                return Err(Error::NotAGroup(format!(
                    "row {a} has {} entries, expected {order}",
                    row.len()
                )));
            }
            check_permutation(row)
                .map_err(|_| Error::NotAGroup(format!("row {a} is not a permutation of 0..{order}")))?;
            cayley.extend(row.iter().map(|&c| c as u32));
        }
        let mut group = FiniteGroup {
            order,
            cayley,
            inverse: vec![0; order],
            generators: Vec::new(),
        };
        for g in 0..order {
            if group.mul(0, g) != g || group.mul(g, 0) != g {
                return Err(Error::NotAGroup(format!("index 0 is not a two-sided identity at {g}")));
            }
        }
        for g in 0..order {
            // rows are permutations, so a right inverse exists and is unique
            let h = (0..order).find(|&h| group.mul(g, h) == 0).unwrap();
            if group.mul(h, g) != 0 {
                return Err(Error::NotAGroup(format!("element {g} has no two-sided inverse")));
            }
            group.inverse[g] = h;
        }
        group.check_associativity()?;
        group.generators = (0..order).collect();
        Ok(group)
    }

    fn check_associativity(&self) -> Result<()> {
        let n = self.order;
        let check = |a: usize, b: usize, c: usize| {
            if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                Err(Error::NotAGroup(format!("associativity fails at ({a}, {b}, {c})")))
            } else {
                Ok(())
            }
        };
        if n <= EXHAUSTIVE_ORDER {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        check(a, b, c)?;
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            for _ in 0..SAMPLED_TRIPLES {
                check(rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n))?;
            }
        }
        Ok(())
    }

    pub fn trivial() -> Self {
        FiniteGroup {
            order: 1,
            cayley: vec![0],
            inverse: vec![0],
            generators: Vec::new(),
        }
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn identity(&self) -> usize {
        0
    }

    /// Index of `a·b`.
    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.cayley[a * self.order + b] as usize
    }

    #[inline]
    pub fn inv(&self, g: usize) -> usize {
        self.inverse[g]
    }

    /// `g h g⁻¹`.
    #[inline]
    pub fn conjugate(&self, g: usize, h: usize) -> usize {
        self.mul(self.mul(g, h), self.inv(g))
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    /// Element indices of the generating set this group was built from. For
    /// groups built from a raw Cayley table every element is listed.
    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn check_element(&self, g: usize) -> Result<()> {
        if g < self.order {
            Ok(())
        } else {
            Err(Error::ElementOutOfRange {
                element: g,
                order: self.order,
            })
        }
    }

    /// The whole group as a subgroup of itself.
    pub fn whole(self: &Arc<Self>) -> Subgroup {
        Subgroup {
            parent: Arc::clone(self),
            members: (0..self.order).collect(),
        }
    }

    pub fn trivial_subgroup(self: &Arc<Self>) -> Subgroup {
        Subgroup {
            parent: Arc::clone(self),
            members: vec![0],
        }
    }
}

/// Checks that `p` is a bijection of `0..p.len()`.
pub fn check_permutation(p: &[usize]) -> Result<()> {
    let mut seen = vec![false; p.len()];
    for (i, &img) in p.iter().enumerate() {
        if img >= p.len() {
            return Err(Error::NotAPermutation(format!(
                "image {img} of {i} is out of range 0..{}",
                p.len()
            )));
        }
        if std::mem::replace(&mut seen[img], true) {
            return Err(Error::NotAPermutation(format!("image {img} appears twice")));
        }
    }
    Ok(())
}

fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&i| a[i]).collect()
}

/// Closes `generators` (permutations of `symbols` points) under composition
/// with the default cap.
pub fn build_group_from_generators(
    generators: &[Vec<usize>],
    symbols: usize,
) -> Result<(Arc<FiniteGroup>, GroupAction)> {
    build_group_from_generators_capped(generators, symbols, DEFAULT_CLOSURE_CAP)
}

pub fn build_group_from_generators_capped(
    generators: &[Vec<usize>],
    symbols: usize,
    cap: usize,
) -> Result<(Arc<FiniteGroup>, GroupAction)> {
    if symbols == 0 {
        return Err(Error::NotAPermutation("permutations need at least one symbol".into()));
    }
    for (k, g) in generators.iter().enumerate() {
        if g.len() != symbols {
            return Err(Error::NotAPermutation(format!(
                "generator {k} has {} images, expected {symbols}",
                g.len()
            )));
        }
        check_permutation(g).map_err(|e| Error::NotAPermutation(format!("generator {k}: {e}")))?;
    }

    let identity: Vec<usize> = (0..symbols).collect();
    let mut elements = vec![identity.clone()];
    let mut index: HashMap<Vec<usize>, usize> = HashMap::from([(identity, 0)]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(w) = queue.pop_front() {
        for s in generators {
            let candidate = compose(s, &elements[w]);
            if !index.contains_key(&candidate) {
                if elements.len() == cap {
                    return Err(Error::ClosureTooLarge { cap });
                }
                index.insert(candidate.clone(), elements.len());
                queue.push_back(elements.len());
                elements.push(candidate);
            }
        }
    }

    let order = elements.len();
    let mut cayley = Vec::with_capacity(order * order);
    for a in &elements {
        for b in &elements {
            cayley.push(index[&compose(a, b)] as u32);
        }
    }
    let inverse = elements
        .iter()
        .map(|p| {
            let mut inv = vec![0; symbols];
            for (i, &img) in p.iter().enumerate() {
                inv[img] = i;
            }
            index[&inv]
        })
        .collect();
    let group = Arc::new(FiniteGroup {
        order,
        cayley,
        inverse,
        generators: generators.iter().map(|g| index[g]).collect(),
    });
    let table = elements.concat();
    let action = GroupAction {
        group: Arc::clone(&group),
        n_points: symbols,
        table,
    };
    Ok((group, action))
}

/// A left action `G × X → X` on the points `0..n_points`.
#[derive(Debug, Clone)]
pub struct GroupAction {
    group: Arc<FiniteGroup>,
    n_points: usize,
    table: Vec<usize>,
}

impl GroupAction {
    /// `table[g][x]` is `g·x`. The identity and compatibility laws are checked.
    pub fn new(group: Arc<FiniteGroup>, table: Vec<Vec<usize>>) -> Result<Self> {
        if table.len() != group.order() {
            return Err(Error::NotAnAction(format!(
                "table has {} rows for a group of order {}",
                table.len(),
                group.order()
            )));
        }
        let n_points = table[0].len();
        if n_points == 0 {
            return Err(Error::NotAnAction("empty point set".into()));
        }
        for (g, row) in table.iter().enumerate() {
            if row.len() != n_points {
                return Err(Error::NotAnAction(format!("row {g} has the wrong length")));
            }
            check_permutation(row).map_err(|e| Error::NotAnAction(format!("row {g}: {e}")))?;
        }
        let action = GroupAction {
            group,
            n_points,
            table: table.concat(),
        };
        for x in 0..n_points {
            if action.act(0, x) != x {
                return Err(Error::NotAnAction(format!("identity moves point {x}")));
            }
        }
        let g = &action.group;
        for a in g.elements() {
            for b in g.elements() {
                let ab = g.mul(a, b);
                for x in 0..n_points {
                    if action.act(ab, x) != action.act(a, action.act(b, x)) {
                        return Err(Error::NotAnAction(format!("(g h)·x ≠ g·(h·x) at g={a}, h={b}, x={x}")));
                    }
                }
            }
        }
        Ok(action)
    }

    /// `G` acting on itself by left multiplication.
    pub fn left_regular(group: &Arc<FiniteGroup>) -> Self {
        let n = group.order();
        let table = (0..n)
            .flat_map(|g| (0..n).map(move |x| (g, x)))
            .map(|(g, x)| group.mul(g, x))
            .collect();
        GroupAction {
            group: Arc::clone(group),
            n_points: n,
            table,
        }
    }

    /// The action of `group` on a single point.
    pub fn on_point(group: &Arc<FiniteGroup>) -> Self {
        GroupAction {
            group: Arc::clone(group),
            n_points: 1,
            table: vec![0; group.order()],
        }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    #[inline]
    pub fn n_points(&self) -> usize {
        self.n_points
    }

    /// `g·x`.
    #[inline]
    pub fn act(&self, g: usize, x: usize) -> usize {
        self.table[g * self.n_points + x]
    }

    /// The permutation of points induced by `g`.
    pub fn permutation(&self, g: usize) -> &[usize] {
        &self.table[g * self.n_points..(g + 1) * self.n_points]
    }

    pub fn check_point(&self, x: usize) -> Result<()> {
        if x < self.n_points {
            Ok(())
        } else {
            Err(Error::PointOutOfRange {
                point: x,
                n_points: self.n_points,
            })
        }
    }

    pub fn orbit(&self, x: usize) -> Result<BTreeSet<usize>> {
        self.check_point(x)?;
        Ok(self.group.elements().map(|g| self.act(g, x)).collect())
    }

    pub fn is_transitive(&self) -> bool {
        self.orbit(0).map(|o| o.len() == self.n_points).unwrap_or(false)
    }

    pub fn require_transitive(&self) -> Result<()> {
        let orbit = self.orbit(0)?.len();
        if orbit == self.n_points {
            Ok(())
        } else {
            Err(Error::NotTransitive {
                orbit,
                n_points: self.n_points,
            })
        }
    }

    /// `G_x = { g | g·x = x }`.
    pub fn stabiliser(&self, x: usize) -> Result<Subgroup> {
        self.check_point(x)?;
        Ok(Subgroup {
            parent: Arc::clone(&self.group),
            members: self.group.elements().filter(|&g| self.act(g, x) == x).collect(),
        })
    }

    /// Some `g` with `g·from = to`, the lowest-index one.
    pub fn transporter(&self, from: usize, to: usize) -> Option<usize> {
        self.group.elements().find(|&g| self.act(g, from) == to)
    }
}

/// A subgroup, stored as the sorted list of its member indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgroup {
    parent: Arc<FiniteGroup>,
    members: Vec<usize>,
}

impl Subgroup {
    pub fn new(parent: Arc<FiniteGroup>, mut members: Vec<usize>) -> Result<Self> {
        members.sort_unstable();
        members.dedup();
        for &m in &members {
            parent.check_element(m)?;
        }
        if members.first() != Some(&0) {
            return Err(Error::NotASubgroup("identity missing".into()));
        }
        let mut is_member = vec![false; parent.order()];
        for &m in &members {
            is_member[m] = true;
        }
        for &a in &members {
            if !is_member[parent.inv(a)] {
                return Err(Error::NotASubgroup(format!("inverse of {a} missing")));
            }
            for &b in &members {
                if !is_member[parent.mul(a, b)] {
                    return Err(Error::NotASubgroup(format!("not closed: {a}·{b}")));
                }
            }
        }
        debug_assert_eq!(parent.order() % members.len(), 0);
        Ok(Subgroup { parent, members })
    }

    pub fn parent(&self) -> &Arc<FiniteGroup> {
        &self.parent
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.members.len() == 1
    }

    pub fn contains(&self, g: usize) -> bool {
        self.members.binary_search(&g).is_ok()
    }

    /// `g H g⁻¹`.
    pub fn conjugate_by(&self, g: usize) -> Result<Subgroup> {
        self.parent.check_element(g)?;
        let mut members: Vec<usize> = self.members.iter().map(|&h| self.parent.conjugate(g, h)).collect();
        members.sort_unstable();
        Ok(Subgroup {
            parent: Arc::clone(&self.parent),
            members,
        })
    }

    pub fn is_normal(&self) -> bool {
        self.parent
            .elements()
            .all(|g| self.conjugate_by(g).map(|c| c == *self).unwrap_or(false))
    }
}

/// Free-function form of [`Subgroup::conjugate_by`].
pub fn conjugate_subgroup(sub: &Subgroup, g: usize) -> Result<Subgroup> {
    sub.conjugate_by(g)
}

/// Left cosets `gH`, each represented by its lowest-index member.
#[derive(Debug, Clone)]
pub struct CosetDecomposition {
    subgroup: Subgroup,
    representatives: Vec<usize>,
    coset_of: Vec<usize>,
}

impl CosetDecomposition {
    pub fn subgroup(&self) -> &Subgroup {
        &self.subgroup
    }

    pub fn representatives(&self) -> &[usize] {
        &self.representatives
    }

    pub fn len(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representatives.is_empty()
    }

    /// Index of the coset containing `g`.
    pub fn coset_of(&self, g: usize) -> usize {
        self.coset_of[g]
    }

    /// Members of coset `c`, in increasing index order.
    pub fn members(&self, c: usize) -> Vec<usize> {
        let rep = self.representatives[c];
        let g = self.subgroup.parent();
        let mut out: Vec<usize> = self.subgroup.members().iter().map(|&h| g.mul(rep, h)).collect();
        out.sort_unstable();
        out
    }
}

pub fn left_cosets(group: &Arc<FiniteGroup>, sub: &Subgroup) -> Result<CosetDecomposition> {
    if **sub.parent() != **group {
        return Err(Error::NotASubgroup("subgroup belongs to a different group".into()));
    }
    const UNASSIGNED: usize = usize::MAX;
    let mut coset_of = vec![UNASSIGNED; group.order()];
    let mut representatives = Vec::with_capacity(group.order() / sub.order());
    for g in group.elements() {
        if coset_of[g] != UNASSIGNED {
            continue;
        }
        let c = representatives.len();
        representatives.push(g);
        for &h in sub.members() {
            coset_of[group.mul(g, h)] = c;
        }
    }
    Ok(CosetDecomposition {
        subgroup: sub.clone(),
        representatives,
        coset_of,
    })
}

/// Group spec file: `{ "symbols": m, "generators": [[image array], ...] }`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub symbols: usize,
    pub generators: Vec<Vec<usize>>,
}

impl GroupSpec {
    pub fn build(&self) -> Result<(Arc<FiniteGroup>, GroupAction)> {
        build_group_from_generators(&self.generators, self.symbols)
    }
}

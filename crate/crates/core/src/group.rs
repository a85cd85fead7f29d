//! Group objects in finite sets, their actions, equivariant maps, and the
//! action induced on a pullback of equivariant maps.

use std::sync::Arc;

use thiserror::Error;

use crate::atom::Atom;
use crate::finset::{
    compose, mediate_pullback, product, product_of_maps, pullback, terminal, FinError, FinMap,
    FinSet, PullbackCert,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("multiplication is not associative at ({0}, {1}, {2})")]
    NotAssociative(Atom, Atom, Atom),
    #[error("multiplication table has no two-sided unit")]
    NoUnit,
    #[error("element {0} has no inverse")]
    NoInverse(Atom),
    #[error("malformed multiplication table: {0}")]
    Malformed(String),
}

/// A group object: a carrier with multiplication `G×G → G`, unit `T → G` and
/// inverse `G → G`, certified at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinGroup {
    carrier: FinSet,
    mul: FinMap,
    unit: FinMap,
    inv: FinMap,
}

/// Certifies a Cayley table (`table[a][b]` = index of `a·b`, rows and columns
/// in the carrier's canonical order) and synthesizes unit and inverses.
pub fn check_group(carrier: &FinSet, table: &[Vec<usize>]) -> Result<FinGroup, GroupError> {
    let n = carrier.len();
    if table.len() != n || table.iter().any(|r| r.len() != n) {
        return Err(GroupError::Malformed(format!("expected a {n}×{n} table")));
    }
    if let Some(&bad) = table.iter().flatten().find(|&&c| c >= n) {
        return Err(GroupError::Malformed(format!("entry {bad} out of range")));
    }
    let m = |a: usize, b: usize| table[a][b];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if m(m(a, b), c) != m(a, m(b, c)) {
                    let at = |i: usize| carrier.atom(i).clone();
                    return Err(GroupError::NotAssociative(at(a), at(b), at(c)));
                }
            }
        }
    }
    let e = (0..n)
        .find(|&e| (0..n).all(|a| m(e, a) == a && m(a, e) == a))
        .ok_or(GroupError::NoUnit)?;
    let mut inv = Vec::with_capacity(n);
    for a in 0..n {
        let b = (0..n)
            .find(|&b| m(a, b) == e && m(b, a) == e)
            .ok_or_else(|| GroupError::NoInverse(carrier.atom(a).clone()))?;
        inv.push(b);
    }
    let sq = product(carrier, carrier);
    let flat: Vec<usize> = table.iter().flatten().copied().collect();
    Ok(FinGroup {
        carrier: carrier.clone(),
        mul: FinMap::from_table_unchecked(sq.apex, carrier.clone(), flat),
        unit: FinMap::from_table_unchecked(terminal(), carrier.clone(), vec![e]),
        inv: FinMap::from_table_unchecked(carrier.clone(), carrier.clone(), inv),
    })
}

impl FinGroup {
    /// `Z/n` on `{0, …, n-1}`.
    pub fn cyclic(n: usize) -> FinGroup {
        let table: Vec<Vec<usize>> = (0..n)
            .map(|a| (0..n).map(|b| (a + b) % n).collect())
            .collect();
        check_group(&FinSet::range(n), &table).expect("cyclic table is a group")
    }

    /// `Z/2 × Z/2` on `{0,1,2,3}` with xor.
    pub fn klein() -> FinGroup {
        let table: Vec<Vec<usize>> = (0..4).map(|a| (0..4).map(|b| a ^ b).collect()).collect();
        check_group(&FinSet::range(4), &table).expect("klein table is a group")
    }

    /// The symmetric group on three letters, elements numbered by the
    /// lexicographic order of the permutations of `[0,1,2]`.
    pub fn symmetric3() -> FinGroup {
        let perms: [[usize; 3]; 6] = [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        let idx = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
        let table: Vec<Vec<usize>> = perms
            .iter()
            .map(|a| {
                perms
                    .iter()
                    .map(|b| idx([a[b[0]], a[b[1]], a[b[2]]]))
                    .collect()
            })
            .collect();
        check_group(&FinSet::range(6), &table).expect("S3 table is a group")
    }

    pub fn carrier(&self) -> &FinSet {
        &self.carrier
    }

    pub fn order(&self) -> usize {
        self.carrier.len()
    }

    pub fn mul_map(&self) -> &FinMap {
        &self.mul
    }

    pub fn unit_map(&self) -> &FinMap {
        &self.unit
    }

    pub fn inv_map(&self) -> &FinMap {
        &self.inv
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul.at(a * self.order() + b)
    }

    pub fn unit(&self) -> usize {
        self.unit.at(0)
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv.at(a)
    }

    pub fn table(&self) -> Vec<Vec<usize>> {
        let n = self.order();
        (0..n)
            .map(|a| (0..n).map(|b| self.mul(a, b)).collect())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActionError {
    #[error("action is not compatible with multiplication at g={0}, h={1}, x={2}")]
    AssocFail(Atom, Atom, Atom),
    #[error("unit does not act trivially on {0}")]
    UnitFail(Atom),
    #[error("map is not equivariant at g={0}, x={1}")]
    EquivarianceFail(Atom, Atom),
    #[error("actions are by different groups")]
    GroupMismatch,
    #[error("map or action has the wrong source or target")]
    Shape,
    #[error(transparent)]
    Fin(#[from] FinError),
}

/// An action `G × X → X`, certified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GAction {
    group: Arc<FinGroup>,
    space: FinSet,
    act: FinMap,
}

pub fn check_action(
    group: &Arc<FinGroup>,
    space: &FinSet,
    act: &FinMap,
) -> Result<GAction, ActionError> {
    let gx = product(group.carrier(), space);
    if *act.src() != gx.apex || act.dst() != space {
        return Err(ActionError::Shape);
    }
    let n = space.len();
    let a = |g: usize, x: usize| act.at(g * n + x);
    let at_g = |i: usize| group.carrier().atom(i).clone();
    for g in 0..group.order() {
        for h in 0..group.order() {
            for x in 0..n {
                if a(g, a(h, x)) != a(group.mul(g, h), x) {
                    return Err(ActionError::AssocFail(
                        at_g(g),
                        at_g(h),
                        space.atom(x).clone(),
                    ));
                }
            }
        }
    }
    let e = group.unit();
    for x in 0..n {
        if a(e, x) != x {
            return Err(ActionError::UnitFail(space.atom(x).clone()));
        }
    }
    Ok(GAction {
        group: Arc::clone(group),
        space: space.clone(),
        act: act.clone(),
    })
}

impl GAction {
    /// Builds and certifies an action from `table[g][x]` = index of `g·x`.
    pub fn from_table(
        group: &Arc<FinGroup>,
        space: &FinSet,
        table: &[Vec<usize>],
    ) -> Result<GAction, ActionError> {
        if table.len() != group.order() || table.iter().any(|r| r.len() != space.len()) {
            return Err(ActionError::Shape);
        }
        let gx = product(group.carrier(), space);
        let act = FinMap::from_table(gx.apex, space.clone(), table.concat())?;
        check_action(group, space, &act)
    }

    pub fn trivial(group: &Arc<FinGroup>, space: &FinSet) -> GAction {
        let gx = product(group.carrier(), space);
        GAction {
            group: Arc::clone(group),
            space: space.clone(),
            act: gx.proj2,
        }
    }

    /// Left multiplication of `G` on its own carrier.
    pub fn regular(group: &Arc<FinGroup>) -> GAction {
        GAction {
            group: Arc::clone(group),
            space: group.carrier().clone(),
            act: group.mul_map().clone(),
        }
    }

    pub fn group(&self) -> &Arc<FinGroup> {
        &self.group
    }

    pub fn space(&self) -> &FinSet {
        &self.space
    }

    pub fn act_map(&self) -> &FinMap {
        &self.act
    }

    /// Index of `g·x`.
    pub fn act(&self, g: usize, x: usize) -> usize {
        self.act.at(g * self.space.len() + x)
    }

    pub fn is_trivial(&self) -> bool {
        (0..self.group.order()).all(|g| (0..self.space.len()).all(|x| self.act(g, x) == x))
    }

    /// Orbits as sorted index lists, ordered by least member.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let n = self.space.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for x in 0..n {
            if seen[x] {
                continue;
            }
            let mut orbit: Vec<usize> = (0..self.group.order()).map(|g| self.act(g, x)).collect();
            orbit.sort_unstable();
            orbit.dedup();
            for &y in &orbit {
                seen[y] = true;
            }
            out.push(orbit);
        }
        out
    }

    /// Group elements fixing `x`.
    pub fn stabilizer(&self, x: usize) -> Vec<usize> {
        (0..self.group.order())
            .filter(|&g| self.act(g, x) == x)
            .collect()
    }

    /// Free: only the unit fixes any point.
    pub fn is_free(&self) -> bool {
        (0..self.space.len()).all(|x| self.stabilizer(x).len() == 1)
    }

    /// The same action on a sub-`G`-set (a union of orbits), given by
    /// increasing indices.
    pub fn restrict_to(&self, indices: &[usize]) -> GAction {
        let space = self.space.restrict_to(indices);
        let mut pos = vec![usize::MAX; self.space.len()];
        for (k, &i) in indices.iter().enumerate() {
            pos[i] = k;
        }
        let gx = product(self.group.carrier(), &space);
        let mut table = Vec::with_capacity(gx.apex.len());
        for g in 0..self.group.order() {
            for &i in indices {
                let j = pos[self.act(g, i)];
                assert!(
                    j != usize::MAX,
                    "restriction is not closed under the action"
                );
                table.push(j);
            }
        }
        GAction {
            group: Arc::clone(&self.group),
            space: space.clone(),
            act: FinMap::from_table_unchecked(gx.apex, space, table),
        }
    }
}

/// `θ(g, (h, u)) = (g·h, u)` on `G × U`.
pub fn product_action(group: &Arc<FinGroup>, base: &FinSet) -> GAction {
    let gu = product(group.carrier(), base);
    let ggu = product(group.carrier(), &gu.apex);
    let n = base.len();
    let mut table = Vec::with_capacity(ggu.apex.len());
    for g in 0..group.order() {
        for h in 0..group.order() {
            for u in 0..n {
                table.push(gu.index(group.mul(g, h), u));
            }
        }
    }
    GAction {
        group: Arc::clone(group),
        space: gu.apex.clone(),
        act: FinMap::from_table_unchecked(ggu.apex, gu.apex, table),
    }
}

/// A map commuting with the actions on its source and target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivariantMap {
    map: FinMap,
    src: GAction,
    dst: GAction,
}

pub fn check_equivariant(
    f: &FinMap,
    a: &GAction,
    b: &GAction,
) -> Result<EquivariantMap, ActionError> {
    if a.group != b.group {
        return Err(ActionError::GroupMismatch);
    }
    if f.src() != a.space() || f.dst() != b.space() {
        return Err(ActionError::Shape);
    }
    for g in 0..a.group.order() {
        for x in 0..a.space.len() {
            if f.at(a.act(g, x)) != b.act(g, f.at(x)) {
                return Err(ActionError::EquivarianceFail(
                    a.group.carrier().atom(g).clone(),
                    a.space.atom(x).clone(),
                ));
            }
        }
    }
    Ok(EquivariantMap {
        map: f.clone(),
        src: a.clone(),
        dst: b.clone(),
    })
}

impl EquivariantMap {
    pub fn map(&self) -> &FinMap {
        &self.map
    }

    pub fn src(&self) -> &GAction {
        &self.src
    }

    pub fn dst(&self) -> &GAction {
        &self.dst
    }
}

/// The pullback of two equivariant maps with its induced action.
#[derive(Debug, Clone)]
pub struct PullbackAction {
    pub cert: PullbackCert,
    pub action: GAction,
}

/// The action `ψ` on `P ×_Y Z`: the map out of `G × (P ×_Y Z)` induced by
/// the pullback from `p ∘ (id × proj_P)` and `z ∘ (id × proj_Z)`.
pub fn pullback_action(
    f: &EquivariantMap,
    g: &EquivariantMap,
) -> Result<PullbackAction, ActionError> {
    if f.dst != g.dst {
        return Err(ActionError::Shape);
    }
    let group = f.src.group();
    let cert = pullback(&f.map, &g.map)?;
    let id_g = FinMap::identity(group.carrier());
    let u = compose(f.src.act_map(), &product_of_maps(&id_g, &cert.proj1))?;
    let v = compose(g.src.act_map(), &product_of_maps(&id_g, &cert.proj2))?;
    let psi = mediate_pullback(&cert, &u, &v)?;
    let action = check_action(group, &cert.apex, &psi)?;
    Ok(PullbackAction { cert, action })
}

/// Searches an equivariant bijection `h: A → B` with `pb ∘ h = pa`.
///
/// `Ok(None)` means no such bijection exists. The search assigns whole
/// orbits: an equivariant map is determined by the images of orbit
/// representatives, and a representative may only go to a point with the
/// same stabilizer.
pub fn gset_isomorphism_over(
    a: &GAction,
    b: &GAction,
    pa: &FinMap,
    pb: &FinMap,
) -> Result<Option<FinMap>, ActionError> {
    if a.group != b.group {
        return Err(ActionError::GroupMismatch);
    }
    if pa.src() != a.space() || pb.src() != b.space() || pa.dst() != pb.dst() {
        return Err(ActionError::Shape);
    }
    if a.space.len() != b.space.len() {
        return Ok(None);
    }
    let reps: Vec<usize> = a.orbits().iter().map(|o| o[0]).collect();
    let stab_b: Vec<Vec<usize>> = (0..b.space.len()).map(|y| b.stabilizer(y)).collect();
    let mut search = IsoSearch {
        a,
        b,
        pa,
        pb,
        reps: &reps,
        stab_b: &stab_b,
        h: vec![usize::MAX; a.space.len()],
        used: vec![false; b.space.len()],
    };
    if !search.run(0) {
        return Ok(None);
    }
    let h = FinMap::from_table_unchecked(a.space.clone(), b.space.clone(), search.h);
    debug_assert!(h.is_bijective());
    debug_assert!(check_equivariant(&h, a, b).is_ok());
    Ok(Some(h))
}

struct IsoSearch<'a> {
    a: &'a GAction,
    b: &'a GAction,
    pa: &'a FinMap,
    pb: &'a FinMap,
    reps: &'a [usize],
    stab_b: &'a [Vec<usize>],
    h: Vec<usize>,
    used: Vec<bool>,
}

impl IsoSearch<'_> {
    fn run(&mut self, k: usize) -> bool {
        let Some(&r) = self.reps.get(k) else {
            return true;
        };
        let stab_r = self.a.stabilizer(r);
        let order = self.a.group.order();
        for y in 0..self.b.space.len() {
            if self.used[y] || self.pb.at(y) != self.pa.at(r) || self.stab_b[y] != stab_r {
                continue;
            }
            let ok = (0..order).all(|g| {
                let (x, z) = (self.a.act(g, r), self.b.act(g, y));
                self.pa.at(x) == self.pb.at(z)
            });
            if !ok {
                continue;
            }
            let mut assigned = Vec::new();
            for g in 0..order {
                let (x, z) = (self.a.act(g, r), self.b.act(g, y));
                if self.h[x] == usize::MAX {
                    self.h[x] = z;
                    self.used[z] = true;
                    assigned.push(x);
                }
            }
            if self.run(k + 1) {
                return true;
            }
            for x in assigned {
                self.used[self.h[x]] = false;
                self.h[x] = usize::MAX;
            }
        }
        false
    }
}

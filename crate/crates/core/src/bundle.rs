//! Principal `G`-bundles: equivariant maps to a base with trivial action
//! that become `G × U_i → U_i` after pullback along every leg of a cover.

use std::sync::Arc;

use thiserror::Error;

use crate::atom::Atom;
use crate::finset::{
    compose, mediate_pullback, product, pullback, FinError, FinMap, FinSet, PullbackCert,
};
use crate::group::{
    check_equivariant, gset_isomorphism_over, product_action, pullback_action, ActionError,
    EquivariantMap, FinGroup, GAction, PullbackAction,
};
use crate::site::CoveringFamily;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BundleError {
    #[error("cover is not a canonical cover of the base")]
    CoverNotInTopology,
    #[error("bundles live over different bases")]
    BaseMismatch,
    #[error("bundles have different structure groups")]
    GroupMismatch,
    #[error("map has the wrong source or target")]
    Shape,
    #[error("projection triangle fails at {0}")]
    TriangleFail(Atom),
    #[error("map is not equivariant at g={0}, p={1}")]
    EquivarianceFail(Atom, Atom),
    #[error("base carries a non-trivial action")]
    BaseNotTrivial,
    #[error("enumeration exceeds the configured bound ({0})")]
    BoundExceeded(usize),
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error(transparent)]
    Fin(#[from] FinError),
}

/// An equivariant iso `φ_i: P ×_X U_i → G × U_i` over `U_i`.
#[derive(Debug, Clone)]
pub struct LocalTrivialization {
    pub restricted: PullbackAction,
    pub phi: FinMap,
}

#[derive(Debug, Clone)]
pub struct Trivialization {
    pub cover: CoveringFamily,
    pub locals: Vec<LocalTrivialization>,
}

/// The leg of the cover for which no equivariant iso exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NotTrivial {
    pub leg: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TorsorFailure {
    WrongSize { expected: usize, found: usize },
    NotFree { point: Atom, element: Atom },
}

/// Why a projection is not a principal bundle, with the offending fiber.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NotBundle {
    pub fiber: Atom,
    pub failure: TorsorFailure,
}

impl std::fmt::Display for NotBundle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.failure {
            TorsorFailure::WrongSize { expected, found } => write!(
                f,
                "fiber over {} has {found} points, expected {expected}",
                self.fiber
            ),
            TorsorFailure::NotFree { point, element } => write!(
                f,
                "fiber over {} is not free: {element} fixes {point}",
                self.fiber
            ),
        }
    }
}

#[derive(Debug)]
struct BundleInner {
    proj: EquivariantMap,
    trivialization: Trivialization,
}

/// A certified principal bundle. Cloning is cheap.
#[derive(Debug, Clone)]
pub struct Bundle(Arc<BundleInner>);

impl PartialEq for Bundle {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.proj == other.0.proj
    }
}

impl Eq for Bundle {}

/// Wraps `proj: total → base` as an equivariant map to the base with the
/// trivial action.
pub fn equivariant_projection(
    total: &GAction,
    proj: &FinMap,
) -> Result<EquivariantMap, BundleError> {
    let base = GAction::trivial(total.group(), proj.dst());
    match check_equivariant(proj, total, &base) {
        Ok(e) => Ok(e),
        Err(ActionError::EquivarianceFail(g, p)) => Err(BundleError::EquivarianceFail(g, p)),
        Err(e) => Err(e.into()),
    }
}

fn trivial_equivariant(group: &Arc<FinGroup>, f: &FinMap) -> EquivariantMap {
    check_equivariant(
        f,
        &GAction::trivial(group, f.src()),
        &GAction::trivial(group, f.dst()),
    )
    .expect("every map is equivariant for trivial actions")
}

/// Searches a local trivialization of `proj` over every leg of `cover`.
pub fn is_locally_trivial(
    proj: &EquivariantMap,
    cover: &CoveringFamily,
) -> Result<Result<Trivialization, NotTrivial>, BundleError> {
    if cover.target() != proj.map().dst() {
        return Err(BundleError::BaseMismatch);
    }
    if !proj.dst().is_trivial() {
        return Err(BundleError::BaseNotTrivial);
    }
    if !cover.is_jointly_surjective() {
        return Err(BundleError::CoverNotInTopology);
    }
    let group = proj.src().group();
    let mut locals = Vec::with_capacity(cover.len());
    for (leg, f) in cover.legs().iter().enumerate() {
        let restricted = pullback_action(proj, &trivial_equivariant(group, f))?;
        let model = product_action(group, f.src());
        let over_model = product(group.carrier(), f.src()).proj2;
        match gset_isomorphism_over(
            &restricted.action,
            &model,
            &restricted.cert.proj2,
            &over_model,
        )? {
            Some(phi) => locals.push(LocalTrivialization { restricted, phi }),
            None => return Ok(Err(NotTrivial { leg })),
        }
    }
    Ok(Ok(Trivialization {
        cover: cover.clone(),
        locals,
    }))
}

/// Fiberwise torsor check: every fiber has `|G|` points and is free.
pub fn torsor_check(proj: &EquivariantMap) -> Result<(), NotBundle> {
    let total = proj.src();
    let group = total.group();
    let map = proj.map();
    for (y, fiber) in map.fibers().into_iter().enumerate() {
        let fiber_atom = map.dst().atom(y).clone();
        if fiber.len() != group.order() {
            return Err(NotBundle {
                fiber: fiber_atom,
                failure: TorsorFailure::WrongSize {
                    expected: group.order(),
                    found: fiber.len(),
                },
            });
        }
        for &p in &fiber {
            if let Some(g) = (0..group.order()).find(|&g| g != group.unit() && total.act(g, p) == p)
            {
                return Err(NotBundle {
                    fiber: fiber_atom,
                    failure: TorsorFailure::NotFree {
                        point: total.space().atom(p).clone(),
                        element: group.carrier().atom(g).clone(),
                    },
                });
            }
        }
    }
    Ok(())
}

/// Certifies `proj` as a principal bundle using the point cover of its base.
pub fn is_principal_bundle(proj: &EquivariantMap) -> Result<Bundle, NotBundle> {
    let fast = torsor_check(proj);
    let cover = CoveringFamily::points(proj.map().dst());
    let via_cover = is_locally_trivial(proj, &cover).expect("the point cover is canonical");
    assert_eq!(
        fast.is_ok(),
        via_cover.is_ok(),
        "torsor check disagrees with local triviality"
    );
    fast?;
    let trivialization = via_cover.expect("agreed above");
    Ok(Bundle(Arc::new(BundleInner {
        proj: proj.clone(),
        trivialization,
    })))
}

impl Bundle {
    /// `G × X → X`.
    pub fn trivial(group: &Arc<FinGroup>, base: &FinSet) -> Bundle {
        let total = product_action(group, base);
        let proj = product(group.carrier(), base).proj2;
        let eq = equivariant_projection(&total, &proj).expect("projection is equivariant");
        is_principal_bundle(&eq).expect("product bundle is principal")
    }

    /// Certifies with an explicitly supplied cover instead of the point cover.
    pub fn with_cover(
        proj: &EquivariantMap,
        cover: &CoveringFamily,
    ) -> Result<Result<Bundle, NotTrivial>, BundleError> {
        Ok(is_locally_trivial(proj, cover)?.map(|trivialization| {
            Bundle(Arc::new(BundleInner {
                proj: proj.clone(),
                trivialization,
            }))
        }))
    }

    pub fn group(&self) -> &Arc<FinGroup> {
        self.0.proj.src().group()
    }

    pub fn base(&self) -> &FinSet {
        self.0.proj.map().dst()
    }

    pub fn total(&self) -> &GAction {
        self.0.proj.src()
    }

    pub fn total_space(&self) -> &FinSet {
        self.0.proj.src().space()
    }

    pub fn proj(&self) -> &FinMap {
        self.0.proj.map()
    }

    pub fn proj_equivariant(&self) -> &EquivariantMap {
        &self.0.proj
    }

    pub fn trivialization(&self) -> &Trivialization {
        &self.0.trivialization
    }
}

/// `f*P = P ×_Y Z` together with the pullback square it came from.
#[derive(Debug, Clone)]
pub struct BundlePullback {
    pub bundle: Bundle,
    pub cert: PullbackCert,
}

/// Pulls a bundle back along `f: Z → Y`, transporting its trivialization
/// along the pulled-back cover `{ f*g_i : V_i ×_Y Z → Z }`.
pub fn pullback_bundle(bundle: &Bundle, f: &FinMap) -> Result<BundlePullback, BundleError> {
    if f.dst() != bundle.base() {
        return Err(BundleError::BaseMismatch);
    }
    let group = bundle.group();
    let pb = pullback_action(bundle.proj_equivariant(), &trivial_equivariant(group, f))?;
    let proj = equivariant_projection(&pb.action, &pb.cert.proj2)?;

    let old = bundle.trivialization();
    let mut legs = Vec::with_capacity(old.cover.len());
    let mut cover_certs = Vec::with_capacity(old.cover.len());
    for g in old.cover.legs() {
        let c = pullback(g, f)?;
        legs.push(c.proj2.clone());
        cover_certs.push(c);
    }
    let cover = CoveringFamily::new(f.src().clone(), legs).expect("legs land in Z");

    let mut locals = Vec::with_capacity(cover.len());
    for ((leg, c), local) in cover.legs().iter().zip(&cover_certs).zip(&old.locals) {
        let restricted = pullback_action(&proj, &trivial_equivariant(group, leg))?;
        let r = &restricted.cert;
        // (p,z),(v,z) ↦ (p,v) ∈ P ×_Y V_i, then through φ_i to pick g
        let to_p = compose(&pb.cert.proj1, &r.proj1)?;
        let to_v = compose(&c.proj1, &r.proj2)?;
        let k = mediate_pullback(&local.restricted.cert, &to_p, &to_v)?;
        let old_model = product(group.carrier(), &local.restricted.cert.g.src().clone());
        let g_part = compose(&old_model.proj1, &compose(&local.phi, &k)?)?;
        let new_model = product(group.carrier(), leg.src());
        let phi = new_model.pair(&g_part, &r.proj2)?;
        debug_assert!(phi.is_bijective());
        debug_assert!(check_equivariant(
            &phi,
            &restricted.action,
            &product_action(group, leg.src())
        )
        .is_ok());
        debug_assert_eq!(compose(&new_model.proj2, &phi)?, r.proj2);
        locals.push(LocalTrivialization { restricted, phi });
    }
    Ok(BundlePullback {
        bundle: Bundle(Arc::new(BundleInner {
            proj,
            trivialization: Trivialization { cover, locals },
        })),
        cert: pb.cert,
    })
}

/// Re-verifies a stored trivialization: every `φ_i` is an equivariant
/// bijection over its leg onto the product model.
pub fn verify_trivialization(bundle: &Bundle) -> bool {
    let group = bundle.group();
    let t = bundle.trivialization();
    if !t.cover.is_jointly_surjective() || t.cover.target() != bundle.base() {
        return false;
    }
    t.cover.legs().iter().zip(&t.locals).all(|(leg, local)| {
        let model = product_action(group, leg.src());
        let over = product(group.carrier(), leg.src()).proj2;
        local.restricted.cert.f == *bundle.proj()
            && local.restricted.cert.g == *leg
            && local.phi.is_bijective()
            && check_equivariant(&local.phi, &local.restricted.action, &model).is_ok()
            && compose(&over, &local.phi).as_ref() == Ok(&local.restricted.cert.proj2)
    })
}

/// A map of total spaces commuting with the actions and the projections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundleMorphism {
    pub src: Bundle,
    pub dst: Bundle,
    pub map: FinMap,
}

pub fn check_bundle_morphism(
    src: &Bundle,
    dst: &Bundle,
    m: &FinMap,
) -> Result<BundleMorphism, BundleError> {
    if src.group() != dst.group() {
        return Err(BundleError::GroupMismatch);
    }
    if src.base() != dst.base() {
        return Err(BundleError::BaseMismatch);
    }
    if m.src() != src.total_space() || m.dst() != dst.total_space() {
        return Err(BundleError::Shape);
    }
    for p in 0..m.src().len() {
        if dst.proj().at(m.at(p)) != src.proj().at(p) {
            return Err(BundleError::TriangleFail(m.src().atom(p).clone()));
        }
    }
    match check_equivariant(m, src.total(), dst.total()) {
        Ok(_) => {}
        Err(ActionError::EquivarianceFail(g, p)) => {
            return Err(BundleError::EquivarianceFail(g, p))
        }
        Err(e) => return Err(e.into()),
    }
    Ok(BundleMorphism {
        src: src.clone(),
        dst: dst.clone(),
        map: m.clone(),
    })
}

/// Every bundle morphism `src → dst`. Enumerates images of orbit
/// representatives within the matching fiber; `bound` caps the number of
/// candidate assignments.
pub fn enumerate_bundle_morphisms(
    src: &Bundle,
    dst: &Bundle,
    bound: usize,
) -> Result<Vec<BundleMorphism>, BundleError> {
    if src.group() != dst.group() {
        return Err(BundleError::GroupMismatch);
    }
    if src.base() != dst.base() {
        return Err(BundleError::BaseMismatch);
    }
    let reps: Vec<usize> = src.total().orbits().iter().map(|o| o[0]).collect();
    let dst_fibers = dst.proj().fibers();
    let choices: Vec<&Vec<usize>> = reps
        .iter()
        .map(|&r| &dst_fibers[src.proj().at(r)])
        .collect();
    let total = choices
        .iter()
        .fold(1usize, |acc, c| acc.saturating_mul(c.len()));
    if total > bound {
        return Err(BundleError::BoundExceeded(bound));
    }
    let mut out = Vec::new();
    if total == 0 {
        return Ok(out);
    }
    let group = src.group();
    let mut digits = vec![0usize; reps.len()];
    loop {
        let mut table = vec![usize::MAX; src.total_space().len()];
        let mut consistent = true;
        'reps: for (k, &r) in reps.iter().enumerate() {
            let y = choices[k][digits[k]];
            for g in 0..group.order() {
                let (x, z) = (src.total().act(g, r), dst.total().act(g, y));
                if table[x] == usize::MAX {
                    table[x] = z;
                } else if table[x] != z {
                    consistent = false;
                    break 'reps;
                }
            }
        }
        if consistent {
            let m = FinMap::from_table_unchecked(
                src.total_space().clone(),
                dst.total_space().clone(),
                table,
            );
            if let Ok(bm) = check_bundle_morphism(src, dst, &m) {
                out.push(bm);
            }
        }
        let mut k = digits.len();
        let mut carry = true;
        while carry && k > 0 {
            k -= 1;
            digits[k] += 1;
            if digits[k] == choices[k].len() {
                digits[k] = 0;
            } else {
                carry = false;
            }
        }
        if carry {
            break;
        }
    }
    Ok(out)
}

/// Every principal bundle over `base` with total space `G × base` as a set,
/// one per choice of torsor structure on each fiber. Up to isomorphism this
/// lists every principal bundle over `base`.
pub fn enumerate_principal_bundles(
    group: &Arc<FinGroup>,
    base: &FinSet,
    bound: usize,
) -> Result<Vec<Bundle>, BundleError> {
    let n = group.order();
    let structures = fiber_torsor_structures(group);
    let count = (0..base.len()).fold(1usize, |acc, _| acc.saturating_mul(structures.len()));
    if count > bound {
        return Err(BundleError::BoundExceeded(bound));
    }
    let gy = product(group.carrier(), base);
    let mut out = Vec::with_capacity(count);
    let mut digits = vec![0usize; base.len()];
    loop {
        // atom (h, y) sits at index h·|Y| + y
        let ggy = product(group.carrier(), &gy.apex);
        let mut table = Vec::with_capacity(ggy.apex.len());
        for g in 0..n {
            for h in 0..n {
                for (y, &d) in digits.iter().enumerate() {
                    let mul = &structures[d];
                    table.push(gy.index(mul[g][h], y));
                }
            }
        }
        let act = FinMap::from_table_unchecked(ggy.apex, gy.apex.clone(), table);
        let total = crate::group::check_action(group, &gy.apex, &act)?;
        let proj = equivariant_projection(&total, &gy.proj2)?;
        out.push(is_principal_bundle(&proj).expect("torsor structures give principal bundles"));
        if !crate::site::advance_digits(&mut digits, structures.len()) {
            break;
        }
    }
    Ok(out)
}

/// Distinct simply transitive actions of `G` on its own carrier, as
/// `table[g][h]` = index of `g·h`: transport of left multiplication along
/// every bijection `G → G`, deduplicated.
fn fiber_torsor_structures(group: &Arc<FinGroup>) -> Vec<Vec<Vec<usize>>> {
    let n = group.order();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut seen = std::collections::BTreeSet::new();
    loop {
        let mut inv = vec![0; n];
        for (i, &p) in perm.iter().enumerate() {
            inv[p] = i;
        }
        let table: Vec<Vec<usize>> = (0..n)
            .map(|g| (0..n).map(|h| perm[group.mul(g, inv[h])]).collect())
            .collect();
        seen.insert(table);
        if !next_permutation(&mut perm) {
            break;
        }
    }
    seen.into_iter().collect()
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

//! The quotient prestack `[X/G]`.
//!
//! Over `Y` the fiber category has objects `(P, α)`, a principal bundle
//! `P → Y` with an equivariant `α: P → X`, and morphisms the bundle maps
//! commuting with the `α`s. Restriction along `f: Z → Y` is pullback. The
//! coherence cells `ι_Y` and `ε_{f,g}` are computed as canonical isos
//! between pullbacks of the same cospan, mediated in both directions.

use std::sync::Arc;

use thiserror::Error;

use crate::atom::Atom;
use crate::bundle::{
    check_bundle_morphism, enumerate_bundle_morphisms, enumerate_principal_bundles,
    pullback_bundle, Bundle, BundleError,
};
use crate::finset::{
    bang, compose, mediate_pullback, terminal, FinError, FinMap, FinSet, PullbackCert,
};
use crate::group::{
    check_equivariant, gset_isomorphism_over, ActionError, EquivariantMap, FinGroup, GAction,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StackError {
    #[error("α is not equivariant at g={0}, p={1}")]
    EquivarianceFail(Atom, Atom),
    #[error("α triangle fails at {0}")]
    AlphaTriangleFail(Atom),
    #[error("objects belong to different quotient stacks or bases")]
    Mismatch,
    #[error("coherence component for object {object} is not an isomorphism")]
    NotIso { object: usize },
    #[error("naturality square fails for sampled morphism {morphism}")]
    NaturalityFail { morphism: usize },
    #[error("associativity coherence fails for object {object}")]
    AssociativityFail { object: usize },
    #[error("unit coherence fails for object {object}")]
    UnitFail { object: usize },
    #[error("enumeration exceeds the configured bound ({0})")]
    BoundExceeded(usize),
    #[error(transparent)]
    Bundle(#[from] BundleError),
    #[error(transparent)]
    Fin(#[from] FinError),
}

impl From<ActionError> for StackError {
    fn from(e: ActionError) -> Self {
        match e {
            ActionError::EquivarianceFail(g, p) => StackError::EquivarianceFail(g, p),
            e => StackError::Bundle(e.into()),
        }
    }
}

/// `[X/G]`, fixed by the group and its action on `X`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientStack {
    x: GAction,
}

impl QuotientStack {
    pub fn new(x: GAction) -> Self {
        QuotientStack { x }
    }

    /// `BG = [T/G]`.
    pub fn classifying(group: &Arc<FinGroup>) -> Self {
        QuotientStack {
            x: GAction::trivial(group, &terminal()),
        }
    }

    pub fn group(&self) -> &Arc<FinGroup> {
        self.x.group()
    }

    pub fn x_action(&self) -> &GAction {
        &self.x
    }
}

#[derive(Debug)]
struct QSObjectInner {
    bundle: Bundle,
    alpha: EquivariantMap,
}

/// An object `(P, α)` of `[X/G](Y)`. Cloning is cheap.
#[derive(Debug, Clone)]
pub struct QSObject(Arc<QSObjectInner>);

impl PartialEq for QSObject {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.bundle == other.0.bundle && self.0.alpha == other.0.alpha)
    }
}

impl Eq for QSObject {}

impl QSObject {
    pub fn bundle(&self) -> &Bundle {
        &self.0.bundle
    }

    pub fn alpha(&self) -> &FinMap {
        self.0.alpha.map()
    }

    pub fn x_action(&self) -> &GAction {
        self.0.alpha.dst()
    }

    pub fn base(&self) -> &FinSet {
        self.0.bundle.base()
    }

    pub fn total_space(&self) -> &FinSet {
        self.0.bundle.total_space()
    }
}

pub fn check_qs_object(
    stack: &QuotientStack,
    bundle: &Bundle,
    alpha: &FinMap,
) -> Result<QSObject, StackError> {
    if bundle.group() != stack.group() {
        return Err(StackError::Mismatch);
    }
    let alpha = check_equivariant(alpha, bundle.total(), &stack.x)?;
    Ok(QSObject(Arc::new(QSObjectInner {
        bundle: bundle.clone(),
        alpha,
    })))
}

/// A morphism of `[X/G](Y)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSMorphism {
    pub src: QSObject,
    pub dst: QSObject,
    pub map: FinMap,
}

pub fn check_qs_morphism(
    src: &QSObject,
    dst: &QSObject,
    m: &FinMap,
) -> Result<QSMorphism, StackError> {
    if src.x_action() != dst.x_action() {
        return Err(StackError::Mismatch);
    }
    check_bundle_morphism(src.bundle(), dst.bundle(), m)?;
    for p in 0..m.src().len() {
        if dst.alpha().at(m.at(p)) != src.alpha().at(p) {
            return Err(StackError::AlphaTriangleFail(m.src().atom(p).clone()));
        }
    }
    Ok(QSMorphism {
        src: src.clone(),
        dst: dst.clone(),
        map: m.clone(),
    })
}

impl QSMorphism {
    pub fn identity(obj: &QSObject) -> QSMorphism {
        QSMorphism {
            src: obj.clone(),
            dst: obj.clone(),
            map: FinMap::identity(obj.total_space()),
        }
    }

    pub fn is_iso(&self) -> bool {
        self.map.is_bijective()
    }

    pub fn then(&self, next: &QSMorphism) -> Result<QSMorphism, StackError> {
        if self.dst != next.src {
            return Err(StackError::Mismatch);
        }
        Ok(QSMorphism {
            src: self.src.clone(),
            dst: next.dst.clone(),
            map: compose(&next.map, &self.map)?,
        })
    }

    pub fn inverse(&self) -> Option<QSMorphism> {
        self.map.inverse().map(|map| QSMorphism {
            src: self.dst.clone(),
            dst: self.src.clone(),
            map,
        })
    }
}

/// `f*(P, α)` with the pullback square of `π_P` along `f`.
#[derive(Debug, Clone)]
pub struct Restriction {
    pub object: QSObject,
    pub cert: PullbackCert,
}

/// `(P ×_Y Z, α ∘ π_P*f)`.
pub fn restrict(obj: &QSObject, f: &FinMap) -> Result<Restriction, StackError> {
    let pb = pullback_bundle(obj.bundle(), f)?;
    let alpha = compose(obj.alpha(), &pb.cert.proj1)?;
    let alpha = check_equivariant(&alpha, pb.bundle.total(), obj.x_action())?;
    Ok(Restriction {
        object: QSObject(Arc::new(QSObjectInner {
            bundle: pb.bundle,
            alpha,
        })),
        cert: pb.cert,
    })
}

/// `f*φ`, the map `P ×_Y Z → Q ×_Y Z` induced by `φ ∘ π_P*f` and `f*π_P`.
pub fn restrict_morphism(m: &QSMorphism, f: &FinMap) -> Result<QSMorphism, StackError> {
    let src = restrict(&m.src, f)?;
    let dst = restrict(&m.dst, f)?;
    restrict_morphism_between(m, &src, &dst)
}

pub(crate) fn restrict_morphism_between(
    m: &QSMorphism,
    src: &Restriction,
    dst: &Restriction,
) -> Result<QSMorphism, StackError> {
    let u = compose(&m.map, &src.cert.proj1)?;
    let map = mediate_pullback(&dst.cert, &u, &src.cert.proj2)?;
    check_qs_morphism(&src.object, &dst.object, &map)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellKind {
    Iota,
    Epsilon,
}

/// Components of `ι_Y` or `ε_{f,g}` on a sample of objects, each an iso,
/// together with the number of naturality squares verified.
#[derive(Debug, Clone)]
pub struct CoherenceCell {
    pub kind: CellKind,
    pub components: Vec<QSMorphism>,
    pub naturality_squares: usize,
}

/// Objects over a common base and morphisms between them, by index.
#[derive(Debug, Clone, Default)]
pub struct FiberSample {
    pub objects: Vec<QSObject>,
    pub morphisms: Vec<(usize, usize, QSMorphism)>,
}

/// `ι` component `P ×_Y Y → P`, with its inverse mediated from `(id_P, π_P)`.
pub fn iota_component(obj: &QSObject) -> Result<QSMorphism, StackError> {
    let r = restrict(obj, &FinMap::identity(obj.base()))?;
    let forward = r.cert.proj1.clone();
    let back = mediate_pullback(
        &r.cert,
        &FinMap::identity(obj.total_space()),
        obj.bundle().proj(),
    )?;
    if !compose(&back, &forward)?.is_identity() || !compose(&forward, &back)?.is_identity() {
        return Err(StackError::NotIso { object: 0 });
    }
    check_qs_morphism(&r.object, obj, &forward)
}

/// `ε_{f,g}` component `P ×_Y W → (P ×_Y Z) ×_Z W` for `f: Z → Y`,
/// `g: W → Z`, and its mediated inverse.
pub fn epsilon_component(obj: &QSObject, f: &FinMap, g: &FinMap) -> Result<QSMorphism, StackError> {
    let fg = compose(f, g)?;
    let whole = restrict(obj, &fg)?;
    let first = restrict(obj, f)?;
    let second = restrict(&first.object, g)?;
    // (p, w) ↦ ((p, g(w)), w)
    let inner = mediate_pullback(
        &first.cert,
        &whole.cert.proj1,
        &compose(g, &whole.cert.proj2)?,
    )?;
    let forward = mediate_pullback(&second.cert, &inner, &whole.cert.proj2)?;
    // ((p, z), w) ↦ (p, w)
    let to_p = compose(&first.cert.proj1, &second.cert.proj1)?;
    let back = mediate_pullback(&whole.cert, &to_p, &second.cert.proj2)?;
    if !compose(&back, &forward)?.is_identity() || !compose(&forward, &back)?.is_identity() {
        return Err(StackError::NotIso { object: 0 });
    }
    check_qs_morphism(&whole.object, &second.object, &forward)
}

fn renumber(e: StackError, object: usize) -> StackError {
    match e {
        StackError::NotIso { .. } => StackError::NotIso { object },
        e => e,
    }
}

pub fn coherence_iota(base: &FinSet, sample: &FiberSample) -> Result<CoherenceCell, StackError> {
    if sample.objects.iter().any(|o| o.base() != base) {
        return Err(StackError::Mismatch);
    }
    let components = sample
        .objects
        .iter()
        .enumerate()
        .map(|(k, o)| iota_component(o).map_err(|e| renumber(e, k)))
        .collect::<Result<Vec<_>, _>>()?;
    let id = FinMap::identity(base);
    for (k, (a, b, m)) in sample.morphisms.iter().enumerate() {
        let left = restrict_morphism(m, &id)?.then(&components[*b])?;
        let right = components[*a].then(m)?;
        if left.map != right.map {
            return Err(StackError::NaturalityFail { morphism: k });
        }
    }
    Ok(CoherenceCell {
        kind: CellKind::Iota,
        components,
        naturality_squares: sample.morphisms.len(),
    })
}

pub fn coherence_epsilon(
    f: &FinMap,
    g: &FinMap,
    sample: &FiberSample,
) -> Result<CoherenceCell, StackError> {
    if sample.objects.iter().any(|o| o.base() != f.dst()) {
        return Err(StackError::Mismatch);
    }
    let components = sample
        .objects
        .iter()
        .enumerate()
        .map(|(k, o)| epsilon_component(o, f, g).map_err(|e| renumber(e, k)))
        .collect::<Result<Vec<_>, _>>()?;
    let fg = compose(f, g)?;
    for (k, (a, b, m)) in sample.morphisms.iter().enumerate() {
        let left = restrict_morphism(m, &fg)?.then(&components[*b])?;
        let right = components[*a].then(&restrict_morphism(&restrict_morphism(m, f)?, g)?)?;
        if left.map != right.map {
            return Err(StackError::NaturalityFail { morphism: k });
        }
    }
    Ok(CoherenceCell {
        kind: CellKind::Epsilon,
        components,
        naturality_squares: sample.morphisms.len(),
    })
}

/// For `f: Z → Y`, `g: W → Z`, `h: V → W`, the two composites of ε-cells
/// `(fgh)* P → h* g* f* P` agree:
/// `h*(ε_{f,g}) ∘ ε_{fg,h} = ε_{g,h}(f*P) ∘ ε_{f,gh}`.
pub fn check_associativity(
    obj: &QSObject,
    f: &FinMap,
    g: &FinMap,
    h: &FinMap,
) -> Result<(), StackError> {
    let fg = compose(f, g)?;
    let gh = compose(g, h)?;
    let route_a = epsilon_component(obj, &fg, h)?
        .then(&restrict_morphism(&epsilon_component(obj, f, g)?, h)?)?;
    let f_star = restrict(obj, f)?.object;
    let route_b = epsilon_component(obj, f, &gh)?.then(&epsilon_component(&f_star, g, h)?)?;
    if route_a.src != route_b.src || route_a.dst != route_b.dst || route_a.map != route_b.map {
        return Err(StackError::AssociativityFail { object: 0 });
    }
    Ok(())
}

/// `f*(ι_P) ∘ ε_{id,f} = id` and `ι_{f*P} ∘ ε_{f,id} = id` for `f: Z → Y`.
pub fn check_unit_coherence(obj: &QSObject, f: &FinMap) -> Result<(), StackError> {
    let id_y = FinMap::identity(obj.base());
    let left =
        epsilon_component(obj, &id_y, f)?.then(&restrict_morphism(&iota_component(obj)?, f)?)?;
    let f_star = restrict(obj, f)?.object;
    let id_z = FinMap::identity(f.src());
    let right = epsilon_component(obj, f, &id_z)?.then(&iota_component(&f_star)?)?;
    if !left.map.is_identity() || !right.map.is_identity() {
        return Err(StackError::UnitFail { object: 0 });
    }
    Ok(())
}

/// Every equivariant `α: P → X`; a free orbit may send its representative
/// anywhere.
pub fn enumerate_alphas(
    bundle: &Bundle,
    x: &GAction,
    bound: usize,
) -> Result<Vec<FinMap>, StackError> {
    let total = bundle.total();
    let orbits = total.orbits();
    let count = orbits
        .iter()
        .fold(1usize, |acc, _| acc.saturating_mul(x.space().len()));
    if count > bound {
        return Err(StackError::BoundExceeded(bound));
    }
    let mut out = Vec::new();
    if count == 0 {
        return Ok(out);
    }
    let reps: Vec<usize> = orbits.iter().map(|o| o[0]).collect();
    let mut digits = vec![0usize; reps.len()];
    loop {
        let mut table = vec![usize::MAX; total.space().len()];
        let mut ok = true;
        for (&r, &xv) in reps.iter().zip(&digits) {
            for g in 0..total.group().order() {
                let (p, y) = (total.act(g, r), x.act(g, xv));
                if table[p] == usize::MAX {
                    table[p] = y;
                } else if table[p] != y {
                    ok = false;
                }
            }
        }
        if ok {
            out.push(FinMap::from_table_unchecked(
                total.space().clone(),
                x.space().clone(),
                table,
            ));
        }
        if !crate::site::advance_digits(&mut digits, x.space().len()) {
            break;
        }
    }
    Ok(out)
}

/// Every object of `[X/G](Y)` up to relabelling of total spaces.
pub fn enumerate_objects(
    stack: &QuotientStack,
    base: &FinSet,
    bound: usize,
) -> Result<Vec<QSObject>, StackError> {
    let mut out = Vec::new();
    for b in enumerate_principal_bundles(stack.group(), base, bound)? {
        for alpha in enumerate_alphas(&b, &stack.x, bound)? {
            out.push(check_qs_object(stack, &b, &alpha)?);
            if out.len() > bound {
                return Err(StackError::BoundExceeded(bound));
            }
        }
    }
    Ok(out)
}

pub fn enumerate_qs_morphisms(
    src: &QSObject,
    dst: &QSObject,
    bound: usize,
) -> Result<Vec<QSMorphism>, StackError> {
    Ok(
        enumerate_bundle_morphisms(src.bundle(), dst.bundle(), bound)?
            .into_iter()
            .filter_map(|bm| check_qs_morphism(src, dst, &bm.map).ok())
            .collect(),
    )
}

/// Searches an iso of `[X/G](Y)` between two objects.
pub fn find_qs_iso(a: &QSObject, b: &QSObject) -> Result<Option<QSMorphism>, StackError> {
    if a.base() != b.base() || a.x_action() != b.x_action() {
        return Err(StackError::Mismatch);
    }
    // an iso over Y × X respects both the projection and α
    let over = crate::finset::product(a.base(), a.x_action().space());
    let pa = over.pair(a.bundle().proj(), a.alpha())?;
    let pb = over.pair(b.bundle().proj(), b.alpha())?;
    match gset_isomorphism_over(a.bundle().total(), b.bundle().total(), &pa, &pb)? {
        Some(h) => Ok(Some(check_qs_morphism(a, b, &h)?)),
        None => Ok(None),
    }
}

/// Comparison of `[T/G](Y)` with `Bun_G(Y)` on exhaustively enumerated
/// objects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassifyingReport {
    pub bundles: usize,
    pub stack_objects: usize,
    /// Each bundle admits exactly one `α`, the map to the point.
    pub alpha_forced: bool,
    pub bundle_iso_classes: usize,
    pub stack_iso_classes: usize,
    pub trivial_aut_bundle: usize,
    pub trivial_aut_stack: usize,
    /// Hom-sets agree pairwise.
    pub hom_sets_equal: bool,
    pub pairs_compared: usize,
}

impl ClassifyingReport {
    pub fn is_equivalence(&self) -> bool {
        self.alpha_forced
            && self.bundles == self.stack_objects
            && self.bundle_iso_classes == self.stack_iso_classes
            && self.trivial_aut_bundle == self.trivial_aut_stack
            && self.hom_sets_equal
    }
}

fn count_classes<T>(
    items: &[T],
    mut iso: impl FnMut(&T, &T) -> Result<bool, StackError>,
) -> Result<usize, StackError> {
    let mut reps: Vec<&T> = Vec::new();
    for it in items {
        let mut found = false;
        for r in &reps {
            if iso(r, it)? {
                found = true;
                break;
            }
        }
        if !found {
            reps.push(it);
        }
    }
    Ok(reps.len())
}

pub fn classifying_fiber_equiv(
    group: &Arc<FinGroup>,
    base: &FinSet,
    bound: usize,
) -> Result<ClassifyingReport, StackError> {
    let stack = QuotientStack::classifying(group);
    let bundles = enumerate_principal_bundles(group, base, bound)?;
    let mut objects = Vec::with_capacity(bundles.len());
    let mut alpha_forced = true;
    for b in &bundles {
        let alphas = enumerate_alphas(b, stack.x_action(), bound)?;
        alpha_forced &= alphas.len() == 1 && alphas[0] == bang(b.total_space());
        for a in alphas {
            objects.push(check_qs_object(&stack, b, &a)?);
        }
    }
    if bundles.len().saturating_mul(bundles.len()) > bound {
        return Err(StackError::BoundExceeded(bound));
    }
    let mut hom_sets_equal = objects.len() == bundles.len();
    let mut pairs = 0;
    if hom_sets_equal {
        for (i, bi) in bundles.iter().enumerate() {
            for (j, bj) in bundles.iter().enumerate() {
                let bun: Vec<FinMap> = enumerate_bundle_morphisms(bi, bj, bound)?
                    .into_iter()
                    .map(|m| m.map)
                    .collect();
                let qs: Vec<FinMap> = enumerate_qs_morphisms(&objects[i], &objects[j], bound)?
                    .into_iter()
                    .map(|m| m.map)
                    .collect();
                hom_sets_equal &= bun == qs;
                pairs += 1;
            }
        }
    }
    let bundle_iso_classes = count_classes(&bundles, |a, b| {
        Ok(gset_isomorphism_over(a.total(), b.total(), a.proj(), b.proj())?.is_some())
    })?;
    let stack_iso_classes = count_classes(&objects, |a, b| Ok(find_qs_iso(a, b)?.is_some()))?;
    let trivial = Bundle::trivial(group, base);
    let trivial_obj = check_qs_object(&stack, &trivial, &bang(trivial.total_space()))?;
    Ok(ClassifyingReport {
        bundles: bundles.len(),
        stack_objects: objects.len(),
        alpha_forced,
        bundle_iso_classes,
        stack_iso_classes,
        trivial_aut_bundle: enumerate_bundle_morphisms(&trivial, &trivial, bound)?.len(),
        trivial_aut_stack: enumerate_qs_morphisms(&trivial_obj, &trivial_obj, bound)?.len(),
        hom_sets_equal,
        pairs_compared: pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finset::all_maps;

    fn z(n: usize) -> Arc<FinGroup> {
        Arc::new(FinGroup::cyclic(n))
    }

    fn trivial_object(stack: &QuotientStack, base: &FinSet) -> QSObject {
        let b = Bundle::trivial(stack.group(), base);
        let alpha = enumerate_alphas(&b, stack.x_action(), 1 << 10)
            .unwrap()
            .remove(0);
        check_qs_object(stack, &b, &alpha).unwrap()
    }

    #[test]
    fn qs_object_examples() {
        let g = z(2);
        let bg = QuotientStack::classifying(&g);
        let b = Bundle::trivial(&g, &FinSet::range(2));
        assert!(check_qs_object(&bg, &b, &bang(b.total_space())).is_ok());

        // X = G with left multiplication; G × T → G is (g,*) ↦ g
        let xg = QuotientStack::new(GAction::regular(&g));
        let bt = Bundle::trivial(&g, &terminal());
        let alpha = crate::finset::product(g.carrier(), &terminal()).proj1;
        assert!(check_qs_object(&xg, &bt, &alpha).is_ok());

        // constant to 0, but 1 moves 0
        let c = FinMap::constant(bt.total_space(), g.carrier(), 0);
        assert!(matches!(
            check_qs_object(&xg, &bt, &c),
            Err(StackError::EquivarianceFail(..))
        ));
    }

    #[test]
    fn restrict_examples() {
        let g = z(2);
        let bg = QuotientStack::classifying(&g);
        let y = FinSet::range(2);
        let obj = trivial_object(&bg, &y);
        let r = restrict(&obj, &FinMap::identity(&y)).unwrap();
        assert!(find_qs_iso(&r.object, &obj).unwrap().is_some());

        let e = FinMap::from_table(FinSet::empty(), y.clone(), vec![]).unwrap();
        assert!(restrict(&obj, &e).unwrap().object.total_space().is_empty());

        let pt = FinMap::constant(&terminal(), &y, 1);
        let r = restrict(&obj, &pt).unwrap();
        assert_eq!(r.object.total_space().len(), 2);
        assert_eq!(r.object.base(), &terminal());
    }

    #[test]
    fn restrict_morphism_examples() {
        let g = z(2);
        let bg = QuotientStack::classifying(&g);
        let y = FinSet::range(2);
        let obj = trivial_object(&bg, &y);
        let id = QSMorphism::identity(&obj);
        let f = FinMap::from_table(FinSet::range(3), y.clone(), vec![0, 1, 1]).unwrap();
        assert!(restrict_morphism(&id, &f).unwrap().map.is_identity());

        let auts = enumerate_qs_morphisms(&obj, &obj, 1 << 10).unwrap();
        assert_eq!(auts.len(), 4);
        for a in &auts {
            for b in &auts {
                let ab = a.then(b).unwrap();
                let lhs = restrict_morphism(&ab, &f).unwrap();
                let rhs = restrict_morphism(a, &f)
                    .unwrap()
                    .then(&restrict_morphism(b, &f).unwrap())
                    .unwrap();
                assert_eq!(lhs.map, rhs.map);
            }
        }

        // along the identity the restriction is conjugate to m by ι
        let iota = iota_component(&obj).unwrap();
        for m in &auts {
            let r = restrict_morphism(m, &FinMap::identity(&y)).unwrap();
            let conj = iota
                .then(m)
                .unwrap()
                .then(&iota.inverse().unwrap())
                .unwrap();
            assert_eq!(r.map, conj.map);
        }
    }

    #[test]
    fn iota_examples() {
        let g = z(3);
        let bg = QuotientStack::classifying(&g);
        let t = terminal();
        let obj = trivial_object(&bg, &t);
        let cell = coherence_iota(
            &t,
            &FiberSample {
                objects: vec![obj.clone()],
                morphisms: vec![],
            },
        )
        .unwrap();
        let c = &cell.components[0];
        // ((g,*),*) ↦ (g,*)
        for (i, a) in c.map.src().atoms().iter().enumerate() {
            assert_eq!(a.as_pair().unwrap().0, c.map.dst().atom(c.map.at(i)));
        }
        let morphisms = enumerate_qs_morphisms(&obj, &obj, 100)
            .unwrap()
            .into_iter()
            .map(|m| (0, 0, m))
            .collect();
        let cell = coherence_iota(
            &t,
            &FiberSample {
                objects: vec![obj],
                morphisms,
            },
        )
        .unwrap();
        assert!(cell.components.iter().all(QSMorphism::is_iso));
        assert_eq!(cell.naturality_squares, 3);

        let empty = coherence_iota(&t, &FiberSample::default()).unwrap();
        assert!(empty.components.is_empty());
    }

    #[test]
    fn epsilon_examples() {
        let g = z(2);
        let bg = QuotientStack::classifying(&g);
        let y = FinSet::range(2);
        let obj = trivial_object(&bg, &y);
        let id = FinMap::identity(&y);
        let e = epsilon_component(&obj, &id, &id).unwrap();
        assert!(e.is_iso());

        let f = FinMap::from_table(FinSet::range(3), y.clone(), vec![1, 0, 1]).unwrap();
        let gmap = FinMap::from_table(FinSet::range(2), FinSet::range(3), vec![2, 2]).unwrap();
        let morphisms: Vec<_> = enumerate_qs_morphisms(&obj, &obj, 100)
            .unwrap()
            .into_iter()
            .map(|m| (0, 0, m))
            .collect();
        let cell = coherence_epsilon(
            &f,
            &gmap,
            &FiberSample {
                objects: vec![obj.clone()],
                morphisms,
            },
        )
        .unwrap();
        assert_eq!(cell.naturality_squares, 4);
        assert!(cell.components[0].is_iso());

        let h = FinMap::from_table(FinSet::range(1), FinSet::range(2), vec![1]).unwrap();
        check_associativity(&obj, &f, &gmap, &h).unwrap();
        check_unit_coherence(&obj, &f).unwrap();
    }

    #[test]
    fn classifying_examples() {
        let r = classifying_fiber_equiv(&z(2), &terminal(), 1 << 12).unwrap();
        assert!(r.is_equivalence());
        assert_eq!((r.bundle_iso_classes, r.trivial_aut_bundle), (1, 2));

        let r = classifying_fiber_equiv(&z(1), &FinSet::range(2), 1 << 12).unwrap();
        assert!(r.is_equivalence());
        assert_eq!((r.bundles, r.trivial_aut_stack), (1, 1));

        let r = classifying_fiber_equiv(&z(2), &FinSet::range(2), 1 << 12).unwrap();
        assert!(r.is_equivalence());
        // |G|^|Y|
        assert_eq!((r.trivial_aut_bundle, r.trivial_aut_stack), (4, 4));
    }

    #[test]
    fn alpha_enumeration_matches_brute_force() {
        let g = z(2);
        let x =
            GAction::from_table(&g, &FinSet::range(3), &[vec![0, 1, 2], vec![1, 0, 2]]).unwrap();
        let b = Bundle::trivial(&g, &FinSet::range(2));
        let fast = enumerate_alphas(&b, &x, 1 << 10).unwrap();
        let brute: Vec<FinMap> = all_maps(b.total_space(), x.space())
            .filter(|m| check_equivariant(m, b.total(), &x).is_ok())
            .collect();
        assert_eq!(fast.len(), brute.len());
        assert!(fast.iter().all(|m| brute.contains(m)));
    }
}

//! Descent data for `[X/G]` on covering families, gluing of morphisms and
//! objects, and the three stack conditions checked over a corpus.
//!
//! A datum over `{ f_i: U_i → Y }` carries objects `W_i` over `U_i` and isos
//! `φ_ij: pr1*W_i → pr2*W_j` over `U_ij = U_i ×_Y U_j` for every ordered
//! pair, including `i = j`. Gluing realizes the colimit of the overlap
//! diagram as the Čech coequalizer `∐ pr1*W_i ⇉ ∐ W_i`.

use thiserror::Error;

use crate::atom::Atom;
use crate::bundle::{equivariant_projection, is_principal_bundle, BundleError, NotBundle};
use crate::finset::{
    coequalizer, compose, coproduct, mediate_coequalizer, mediate_pullback, pullback, FinError,
    FinMap, FinSet, PullbackCert,
};
use crate::group::GAction;
use crate::site::CoveringFamily;
use crate::stack::{
    check_qs_morphism, check_qs_object, epsilon_component, find_qs_iso, restrict,
    restrict_morphism_between, QSMorphism, QSObject, QuotientStack, Restriction, StackError,
};

/// The two composites around a triple overlap disagree.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cocycle fails on legs ({i},{j},{k}) at {point}")]
pub struct CocycleFailure {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    /// `((a, b), c)` in `U_i ×_Y U_j ×_Y U_k`.
    pub point: Atom,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DescentError {
    #[error("malformed descent input: {0}")]
    Malformed(String),
    #[error("overlap map ({0},{1}) is not an isomorphism")]
    NotIso(usize, usize),
    #[error("gluing requires the cocycle condition: {0}")]
    CocycleRequired(CocycleFailure),
    #[error("cover is not a covering family of the canonical topology")]
    CoverNotCanonical,
    #[error("local morphisms {0} and {1} disagree on their overlap")]
    OverlapMismatch(usize, usize),
    #[error("glued morphism does not restrict to local {0}")]
    RestrictionMismatch(usize),
    #[error("group action does not descend to the quotient")]
    ActionNotInduced,
    #[error("glued map is not a principal bundle: {0}")]
    NotBundle(NotBundle),
    #[error("comparison map for leg {0} is not an isomorphism")]
    ComparisonNotIso(usize),
    #[error("comparison isos fail the overlap square on ({0},{1})")]
    CompatibilityFail(usize, usize),
    #[error(transparent)]
    Stack(#[from] StackError),
    #[error(transparent)]
    Fin(#[from] FinError),
}

impl From<BundleError> for DescentError {
    fn from(e: BundleError) -> Self {
        DescentError::Stack(e.into())
    }
}

/// `φ_ij` with the overlap it lives on.
#[derive(Debug, Clone)]
pub struct Overlap {
    /// `U_i ×_Y U_j`.
    pub cert: PullbackCert,
    /// `pr1*W_i`.
    pub src: Restriction,
    /// `pr2*W_j`.
    pub dst: Restriction,
    pub phi: QSMorphism,
}

#[derive(Debug, Clone)]
pub struct DescentDatum {
    stack: QuotientStack,
    cover: CoveringFamily,
    objects: Vec<QSObject>,
    overlaps: Vec<Vec<Overlap>>,
}

type Skeleton = Vec<Vec<(PullbackCert, Restriction, Restriction)>>;

fn skeleton(
    stack: &QuotientStack,
    cover: &CoveringFamily,
    objects: &[QSObject],
) -> Result<Skeleton, DescentError> {
    if objects.len() != cover.len() {
        return Err(DescentError::Malformed(format!(
            "{} objects for {} legs",
            objects.len(),
            cover.len()
        )));
    }
    for (i, (o, leg)) in objects.iter().zip(cover.legs()).enumerate() {
        if o.base() != leg.src() {
            return Err(DescentError::Malformed(format!(
                "object {i} is not over leg {i}"
            )));
        }
        if o.x_action() != stack.x_action() {
            return Err(DescentError::Malformed(format!(
                "object {i} maps to a different G-set"
            )));
        }
    }
    let mut out = Vec::with_capacity(cover.len());
    for (i, fi) in cover.legs().iter().enumerate() {
        let mut row = Vec::with_capacity(cover.len());
        for (j, fj) in cover.legs().iter().enumerate() {
            let cert = pullback(fi, fj)?;
            let src = restrict(&objects[i], &cert.proj1)?;
            let dst = restrict(&objects[j], &cert.proj2)?;
            row.push((cert, src, dst));
        }
        out.push(row);
    }
    Ok(out)
}

impl DescentDatum {
    /// Validates `phis[i][j]: pr1*W_i → pr2*W_j` as isos of the fiber
    /// category over `U_ij`.
    pub fn new(
        stack: &QuotientStack,
        cover: &CoveringFamily,
        objects: Vec<QSObject>,
        phis: Vec<Vec<FinMap>>,
    ) -> Result<Self, DescentError> {
        let sk = skeleton(stack, cover, &objects)?;
        if phis.len() != cover.len() || phis.iter().any(|r| r.len() != cover.len()) {
            return Err(DescentError::Malformed(
                "overlap maps must form a square table".into(),
            ));
        }
        let overlaps = sk
            .into_iter()
            .zip(phis)
            .enumerate()
            .map(|(i, (row, prow))| {
                row.into_iter()
                    .zip(prow)
                    .enumerate()
                    .map(|(j, ((cert, src, dst), m))| {
                        let phi = check_qs_morphism(&src.object, &dst.object, &m)?;
                        if !phi.is_iso() {
                            return Err(DescentError::NotIso(i, j));
                        }
                        Ok(Overlap {
                            cert,
                            src,
                            dst,
                            phi,
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(DescentDatum {
            stack: stack.clone(),
            cover: cover.clone(),
            objects,
            overlaps,
        })
    }

    /// Builds the overlap maps fiberwise: `phi(i, j, a, b, p)` sends `p` in
    /// the fiber of `W_i` over `a` to a point of `W_j` over `b`, for every
    /// `(a, b)` in `U_ij`.
    pub fn from_fibers<F>(
        stack: &QuotientStack,
        cover: &CoveringFamily,
        objects: Vec<QSObject>,
        mut phi: F,
    ) -> Result<Self, DescentError>
    where
        F: FnMut(usize, usize, usize, usize, usize) -> usize,
    {
        let sk = skeleton(stack, cover, &objects)?;
        let mut phis = Vec::with_capacity(cover.len());
        for (i, row) in sk.iter().enumerate() {
            let mut prow = Vec::with_capacity(cover.len());
            for (j, (cert, src, dst)) in row.iter().enumerate() {
                let mut table = Vec::with_capacity(src.object.total_space().len());
                for e in 0..src.object.total_space().len() {
                    let (p, k) = (src.cert.proj1.at(e), src.cert.proj2.at(e));
                    let (a, b) = (cert.proj1.at(k), cert.proj2.at(k));
                    let q = phi(i, j, a, b, p);
                    let target = (q < objects[j].total_space().len())
                        .then(|| dst.cert.index(q, k))
                        .flatten()
                        .ok_or_else(|| {
                            DescentError::Malformed(format!("overlap ({i},{j}) leaves the fiber"))
                        })?;
                    table.push(target);
                }
                prow.push(FinMap::from_table(
                    src.object.total_space().clone(),
                    dst.object.total_space().clone(),
                    table,
                )?);
            }
            phis.push(prow);
        }
        DescentDatum::new(stack, cover, objects, phis)
    }

    pub fn stack(&self) -> &QuotientStack {
        &self.stack
    }

    pub fn cover(&self) -> &CoveringFamily {
        &self.cover
    }

    pub fn objects(&self) -> &[QSObject] {
        &self.objects
    }

    pub fn overlap(&self, i: usize, j: usize) -> &Overlap {
        &self.overlaps[i][j]
    }

    /// `φ_ij` at `(a, b)` applied to `p ∈ W_i` over `a`.
    pub fn phi_at(&self, i: usize, j: usize, a: usize, b: usize, p: usize) -> Option<usize> {
        let ov = &self.overlaps[i][j];
        let k = ov.cert.index(a, b)?;
        let e = ov.src.cert.index(p, k)?;
        Some(ov.dst.cert.proj1.at(ov.phi.map.at(e)))
    }

    /// The datum pulled back along `t: Z → Y` onto the cover
    /// `{ U_i ×_Y Z → Z }`.
    pub fn pull_back_along(&self, t: &FinMap) -> Result<DescentDatum, DescentError> {
        if t.dst() != self.cover.target() {
            return Err(DescentError::Malformed(
                "pullback map has the wrong target".into(),
            ));
        }
        let certs = self
            .cover
            .legs()
            .iter()
            .map(|f| pullback(f, t))
            .collect::<Result<Vec<_>, _>>()?;
        let cover = CoveringFamily::new(
            t.src().clone(),
            certs.iter().map(|c| c.proj2.clone()).collect(),
        )
        .expect("legs land in the source of t");
        let restricted = self
            .objects
            .iter()
            .zip(&certs)
            .map(|(o, c)| restrict(o, &c.proj1))
            .collect::<Result<Vec<_>, _>>()?;
        let objects = restricted.iter().map(|r| r.object.clone()).collect();
        DescentDatum::from_fibers(&self.stack, &cover, objects, |i, j, a, b, p| {
            let (ai, bj) = (certs[i].proj1.at(a), certs[j].proj1.at(b));
            let p0 = restricted[i].cert.proj1.at(p);
            let q0 = self.phi_at(i, j, ai, bj, p0).expect("overlap point");
            restricted[j].cert.index(q0, b).unwrap_or(usize::MAX)
        })
    }
}

/// The datum induced by a global object: `W_i = f_i*P` and
/// `φ_ij = ε_{f_j,pr2} ∘ ε_{f_i,pr1}^{-1}`.
pub fn restrict_to_datum(
    obj: &QSObject,
    cover: &CoveringFamily,
) -> Result<DescentDatum, DescentError> {
    if cover.target() != obj.base() {
        return Err(DescentError::Stack(StackError::Bundle(
            BundleError::BaseMismatch,
        )));
    }
    let stack = QuotientStack::new(obj.x_action().clone());
    let objects: Vec<QSObject> = cover
        .legs()
        .iter()
        .map(|f| Ok(restrict(obj, f)?.object))
        .collect::<Result<_, StackError>>()?;
    let mut phis = Vec::with_capacity(cover.len());
    for fi in cover.legs() {
        let mut row = Vec::with_capacity(cover.len());
        for fj in cover.legs() {
            let cert = pullback(fi, fj)?;
            let ei = epsilon_component(obj, fi, &cert.proj1)?;
            let ej = epsilon_component(obj, fj, &cert.proj2)?;
            row.push(ei.inverse().expect("ε is an iso").then(&ej)?.map);
        }
        phis.push(row);
    }
    DescentDatum::new(&stack, cover, objects, phis)
}

/// `φ_jk ∘ φ_ij = φ_ik` on every point of every triple overlap.
pub fn check_cocycle(d: &DescentDatum) -> Result<(), CocycleFailure> {
    let legs = d.cover.legs();
    let fibers: Vec<Vec<Vec<usize>>> = d
        .objects
        .iter()
        .map(|o| o.bundle().proj().fibers())
        .collect();
    for (i, fi) in legs.iter().enumerate() {
        for (j, fj) in legs.iter().enumerate() {
            for (k, fk) in legs.iter().enumerate() {
                for (a, over_a) in fibers[i].iter().enumerate() {
                    let y = fi.at(a);
                    for b in fj.fiber(y) {
                        for c in fk.fiber(y) {
                            for &p in over_a {
                                let q = d.phi_at(i, j, a, b, p).expect("overlap point");
                                let lhs = d.phi_at(j, k, b, c, q).expect("overlap point");
                                let rhs = d.phi_at(i, k, a, c, p).expect("overlap point");
                                if lhs != rhs {
                                    let point = Atom::pair(
                                        Atom::pair(
                                            fi.src().atom(a).clone(),
                                            fj.src().atom(b).clone(),
                                        ),
                                        fk.src().atom(c).clone(),
                                    );
                                    return Err(CocycleFailure { i, j, k, point });
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

fn require_canonical(cover: &CoveringFamily) -> Result<(), DescentError> {
    if cover.is_jointly_surjective() {
        Ok(())
    } else {
        Err(DescentError::CoverNotCanonical)
    }
}

/// Glues `locals[i]: f_i*x → f_i*y` into `η: x → y`. The coproduct map
/// `δ = ∐ π_y*f_i ∘ φ_i` coequalizes the kernel pair of
/// `∐ π_x*f_i: ∐ f_i*x → x`, whose coequalizer is `x` itself.
pub fn glue_morphisms(
    cover: &CoveringFamily,
    x: &QSObject,
    y: &QSObject,
    locals: &[QSMorphism],
) -> Result<QSMorphism, DescentError> {
    if cover.target() != x.base() || cover.target() != y.base() || locals.len() != cover.len() {
        return Err(DescentError::Malformed(
            "local morphisms do not match the cover".into(),
        ));
    }
    require_canonical(cover)?;
    let rx = cover
        .legs()
        .iter()
        .map(|f| restrict(x, f))
        .collect::<Result<Vec<_>, _>>()?;
    let ry = cover
        .legs()
        .iter()
        .map(|f| restrict(y, f))
        .collect::<Result<Vec<_>, _>>()?;
    for (i, m) in locals.iter().enumerate() {
        if m.src != rx[i].object || m.dst != ry[i].object {
            return Err(DescentError::Malformed(format!(
                "local morphism {i} is not over leg {i}"
            )));
        }
    }
    // φ_i(p, a) and φ_j(p, b) have the same P-component for (a, b) in U_ij
    let image = |i: usize, p: usize, a: usize| {
        ry[i].cert.proj1.at(locals[i]
            .map
            .at(rx[i].cert.index(p, a).expect("p over f_i(a)")))
    };
    let fibers = x.bundle().proj().fibers();
    for (i, fi) in cover.legs().iter().enumerate() {
        for (j, fj) in cover.legs().iter().enumerate() {
            for a in 0..fi.src().len() {
                for b in fj.fiber(fi.at(a)) {
                    if fibers[fi.at(a)]
                        .iter()
                        .any(|&p| image(i, p, a) != image(j, p, b))
                    {
                        return Err(DescentError::OverlapMismatch(i, j));
                    }
                }
            }
        }
    }
    let parts: Vec<FinSet> = rx.iter().map(|r| r.object.total_space().clone()).collect();
    let cp = coproduct(&parts);
    let sigma = cp.copair_into(
        x.total_space(),
        &rx.iter().map(|r| r.cert.proj1.clone()).collect::<Vec<_>>(),
    )?;
    let delta_parts = locals
        .iter()
        .zip(&ry)
        .map(|(m, r)| compose(&r.cert.proj1, &m.map))
        .collect::<Result<Vec<_>, _>>()?;
    let delta = cp.copair_into(y.total_space(), &delta_parts)?;
    let kernel = pullback(&sigma, &sigma)?;
    let cq = coequalizer(&kernel.proj1, &kernel.proj2)?;
    let comparison = mediate_coequalizer(&cq, &sigma)?;
    let inv = comparison
        .inverse()
        .ok_or(DescentError::CoverNotCanonical)?;
    let eta = compose(&mediate_coequalizer(&cq, &delta)?, &inv)?;
    let eta = check_qs_morphism(x, y, &eta)?;
    for (i, m) in locals.iter().enumerate() {
        if restrict_morphism_between(&eta, &rx[i], &ry[i])?.map != m.map {
            return Err(DescentError::RestrictionMismatch(i));
        }
    }
    Ok(eta)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Uniqueness {
    Equal,
    /// Restrictions along `leg` differ at `point` of `f_leg*P`.
    Differ {
        leg: usize,
        point: Atom,
    },
}

/// Compares two morphisms through their restrictions to the legs.
pub fn check_uniqueness(
    cover: &CoveringFamily,
    m1: &QSMorphism,
    m2: &QSMorphism,
) -> Result<Uniqueness, DescentError> {
    if m1.src != m2.src || m1.dst != m2.dst || cover.target() != m1.src.base() {
        return Err(DescentError::Malformed(
            "morphisms must be parallel over the cover target".into(),
        ));
    }
    require_canonical(cover)?;
    for (leg, f) in cover.legs().iter().enumerate() {
        let src = restrict(&m1.src, f)?;
        let dst = restrict(&m1.dst, f)?;
        let r1 = restrict_morphism_between(m1, &src, &dst)?;
        let r2 = restrict_morphism_between(m2, &src, &dst)?;
        if let Some(e) = (0..r1.map.src().len()).find(|&e| r1.map.at(e) != r2.map.at(e)) {
            return Ok(Uniqueness::Differ {
                leg,
                point: r1.map.src().atom(e).clone(),
            });
        }
    }
    Ok(Uniqueness::Equal)
}

/// A glued object with its comparison isos `ψ_i: f_i*W → W_i`.
#[derive(Debug, Clone)]
pub struct GluingResult {
    pub glued: QSObject,
    pub comparisons: Vec<QSMorphism>,
}

/// Glues a datum satisfying the cocycle condition over a canonical cover.
pub fn glue_object(d: &DescentDatum) -> Result<GluingResult, DescentError> {
    require_canonical(&d.cover)?;
    check_cocycle(d).map_err(DescentError::CocycleRequired)?;
    let group = d.stack.group();
    let parts: Vec<FinSet> = d.objects.iter().map(|o| o.total_space().clone()).collect();
    let cp = coproduct(&parts);

    // ∐ pr1*W_i ⇉ ∐ W_i, one leg through φ_ij
    let rel_parts: Vec<FinSet> = d
        .overlaps
        .iter()
        .flatten()
        .map(|ov| ov.src.object.total_space().clone())
        .collect();
    let rel = coproduct(&rel_parts).apex;
    let mut left = Vec::with_capacity(rel.len());
    let mut right = Vec::with_capacity(rel.len());
    for (i, row) in d.overlaps.iter().enumerate() {
        for (j, ov) in row.iter().enumerate() {
            for e in 0..ov.src.object.total_space().len() {
                left.push(cp.offset(i) + ov.src.cert.proj1.at(e));
                right.push(cp.offset(j) + ov.dst.cert.proj1.at(ov.phi.map.at(e)));
            }
        }
    }
    let g1 = FinMap::from_table(rel.clone(), cp.apex.clone(), left)?;
    let g2 = FinMap::from_table(rel, cp.apex.clone(), right)?;
    let cq = coequalizer(&g1, &g2)?;
    let w = cq.quotient.clone();

    let mut table = vec![vec![usize::MAX; w.len()]; group.order()];
    for s in 0..cp.apex.len() {
        let (i, p) = cp.locate(s);
        let class = cq.proj.at(s);
        for (g, row) in table.iter_mut().enumerate() {
            let image = cq
                .proj
                .at(cp.offset(i) + d.objects[i].bundle().total().act(g, p));
            if row[class] != usize::MAX && row[class] != image {
                return Err(DescentError::ActionNotInduced);
            }
            row[class] = image;
        }
    }
    let w_action =
        GAction::from_table(group, &w, &table).map_err(|_| DescentError::ActionNotInduced)?;

    let to_base = d
        .objects
        .iter()
        .zip(d.cover.legs())
        .map(|(o, f)| compose(f, o.bundle().proj()))
        .collect::<Result<Vec<_>, _>>()?;
    let pi = mediate_coequalizer(&cq, &cp.copair_into(d.cover.target(), &to_base)?)?;
    let alphas: Vec<FinMap> = d.objects.iter().map(|o| o.alpha().clone()).collect();
    let alpha = mediate_coequalizer(&cq, &cp.copair_into(d.stack.x_action().space(), &alphas)?)?;
    let proj = equivariant_projection(&w_action, &pi)?;
    let bundle = is_principal_bundle(&proj).map_err(DescentError::NotBundle)?;
    let glued = check_qs_object(&d.stack, &bundle, &alpha)?;

    let mut restricted = Vec::with_capacity(d.cover.len());
    let mut comparisons = Vec::with_capacity(d.cover.len());
    for (i, f) in d.cover.legs().iter().enumerate() {
        let r = restrict(&glued, f)?;
        let sigma = compose(&cq.proj, &cp.injections[i])?;
        let theta = mediate_pullback(&r.cert, &sigma, d.objects[i].bundle().proj())?;
        let psi = theta.inverse().ok_or(DescentError::ComparisonNotIso(i))?;
        comparisons.push(check_qs_morphism(&r.object, &d.objects[i], &psi)?);
        restricted.push(r);
    }

    // φ_ij(ψ_i(w, a)) = ψ_j(w, b) over every (a, b) in U_ij
    let psi_at = |i: usize, w: usize, a: usize| {
        comparisons[i]
            .map
            .at(restricted[i].cert.index(w, a).expect("w over f_i(a)"))
    };
    let fibers = glued.bundle().proj().fibers();
    for (i, fi) in d.cover.legs().iter().enumerate() {
        for (j, fj) in d.cover.legs().iter().enumerate() {
            for a in 0..fi.src().len() {
                for b in fj.fiber(fi.at(a)) {
                    for &wp in &fibers[fi.at(a)] {
                        if d.phi_at(i, j, a, b, psi_at(i, wp, a)) != Some(psi_at(j, wp, b)) {
                            return Err(DescentError::CompatibilityFail(i, j));
                        }
                    }
                }
            }
        }
    }
    Ok(GluingResult { glued, comparisons })
}

/// Local morphisms to glue; `expected` is the global morphism they came
/// from, if any.
#[derive(Debug, Clone)]
pub struct MorphismCase {
    pub cover: CoveringFamily,
    pub x: QSObject,
    pub y: QSObject,
    pub locals: Vec<QSMorphism>,
    pub expected: Option<QSMorphism>,
}

#[derive(Debug, Clone)]
pub struct UniquenessCase {
    pub cover: CoveringFamily,
    pub m1: QSMorphism,
    pub m2: QSMorphism,
}

/// Inputs for the three stack conditions.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    /// Global objects with covers; their induced data must glue back.
    pub round_trips: Vec<(QSObject, CoveringFamily)>,
    pub data: Vec<DescentDatum>,
    pub morphisms: Vec<MorphismCase>,
    pub uniqueness: Vec<UniquenessCase>,
}

impl Corpus {
    pub fn extend(&mut self, other: Corpus) {
        self.round_trips.extend(other.round_trips);
        self.data.extend(other.data);
        self.morphisms.extend(other.morphisms);
        self.uniqueness.extend(other.uniqueness);
    }

    pub fn len(&self) -> usize {
        self.round_trips.len() + self.data.len() + self.morphisms.len() + self.uniqueness.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Tally {
    pub checked: usize,
    pub passed: usize,
    pub counterexamples: Vec<String>,
}

impl Tally {
    fn record(&mut self, outcome: Result<(), String>) {
        self.checked += 1;
        match outcome {
            Ok(()) => self.passed += 1,
            Err(w) => self.counterexamples.push(w),
        }
    }

    pub fn all_pass(&self) -> bool {
        self.passed == self.checked
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StackReport {
    pub effectiveness: Tally,
    pub gluing: Tally,
    pub uniqueness: Tally,
    /// Inputs failing a precondition, reported rather than counted.
    pub rejected: Vec<String>,
}

impl StackReport {
    pub fn all_pass(&self) -> bool {
        self.effectiveness.all_pass() && self.gluing.all_pass() && self.uniqueness.all_pass()
    }

    pub fn merge(&mut self, other: StackReport) {
        for (a, b) in [
            (&mut self.effectiveness, other.effectiveness),
            (&mut self.gluing, other.gluing),
            (&mut self.uniqueness, other.uniqueness),
        ] {
            a.checked += b.checked;
            a.passed += b.passed;
            a.counterexamples.extend(b.counterexamples);
        }
        self.rejected.extend(other.rejected);
    }
}

/// Runs effectiveness, gluing of morphisms, and uniqueness of gluings over
/// the corpus.
pub fn verify_stack(stack: &QuotientStack, corpus: &Corpus) -> StackReport {
    let mut report = StackReport::default();
    for (n, (obj, cover)) in corpus.round_trips.iter().enumerate() {
        if obj.x_action() != stack.x_action() {
            report
                .rejected
                .push(format!("round trip {n}: object of another stack"));
            continue;
        }
        let outcome = restrict_to_datum(obj, cover)
            .and_then(|d| glue_object(&d))
            .map_err(|e| e.to_string())
            .and_then(|g| match find_qs_iso(&g.glued, obj) {
                Ok(Some(_)) => Ok(()),
                Ok(None) => Err("glued object is not isomorphic to the original".into()),
                Err(e) => Err(e.to_string()),
            });
        report
            .effectiveness
            .record(outcome.map_err(|w| format!("round trip {n}: {w}")));
    }
    for (n, d) in corpus.data.iter().enumerate() {
        if d.stack() != stack {
            report
                .rejected
                .push(format!("datum {n}: datum of another stack"));
            continue;
        }
        if !d.cover().is_jointly_surjective() {
            report
                .rejected
                .push(format!("datum {n}: {}", DescentError::CoverNotCanonical));
            continue;
        }
        if let Err(c) = check_cocycle(d) {
            report.rejected.push(format!("datum {n}: {c}"));
            continue;
        }
        let outcome = glue_object(d)
            .map(|_| ())
            .map_err(|e| format!("datum {n}: {e}"));
        report.effectiveness.record(outcome);
    }
    for (n, case) in corpus.morphisms.iter().enumerate() {
        match glue_morphisms(&case.cover, &case.x, &case.y, &case.locals) {
            Err(
                e @ (DescentError::OverlapMismatch(..)
                | DescentError::CoverNotCanonical
                | DescentError::Malformed(_)),
            ) => {
                report.rejected.push(format!("morphism case {n}: {e}"));
            }
            Err(e) => report.gluing.record(Err(format!("morphism case {n}: {e}"))),
            Ok(eta) => {
                let ok = case.expected.as_ref().is_none_or(|m| m.map == eta.map);
                report.gluing.record(if ok {
                    Ok(())
                } else {
                    Err(format!(
                        "morphism case {n}: glued map differs from its source"
                    ))
                });
            }
        }
    }
    for (n, case) in corpus.uniqueness.iter().enumerate() {
        match check_uniqueness(&case.cover, &case.m1, &case.m2) {
            Err(e) => report.rejected.push(format!("uniqueness case {n}: {e}")),
            Ok(Uniqueness::Equal) if case.m1.map != case.m2.map => report.uniqueness.record(Err(
                format!("uniqueness case {n}: equal restrictions, different morphisms"),
            )),
            Ok(_) => report.uniqueness.record(Ok(())),
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::Bundle;
    use crate::finset::{bang, terminal};
    use crate::group::FinGroup;
    use crate::stack::enumerate_qs_morphisms;
    use std::sync::Arc;

    fn z(n: usize) -> Arc<FinGroup> {
        Arc::new(FinGroup::cyclic(n))
    }

    fn bg_trivial(g: &Arc<FinGroup>, base: &FinSet) -> (QuotientStack, QSObject) {
        let stack = QuotientStack::classifying(g);
        let b = Bundle::trivial(g, base);
        let obj = check_qs_object(&stack, &b, &bang(b.total_space())).unwrap();
        (stack, obj)
    }

    fn two_leg_overlapping() -> CoveringFamily {
        // U_0 = {0,1} ↪ Y, U_1 = {1,2} ↪ Y, overlapping at 1
        let y = FinSet::range(3);
        CoveringFamily::new(
            y.clone(),
            vec![
                FinMap::from_table(FinSet::range(2), y.clone(), vec![0, 1]).unwrap(),
                FinMap::from_table(FinSet::range(2), y, vec![1, 2]).unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn restrict_to_datum_examples() {
        let (_, obj) = bg_trivial(&z(2), &FinSet::range(2));
        let d = restrict_to_datum(&obj, &CoveringFamily::identity(obj.base())).unwrap();
        assert_eq!(d.objects().len(), 1);
        assert!(d.overlap(0, 0).phi.is_iso());
        check_cocycle(&d).unwrap();

        let d = restrict_to_datum(&obj, &CoveringFamily::points(obj.base())).unwrap();
        assert_eq!(d.objects().len(), 2);
        assert!(d.overlap(0, 1).cert.apex.is_empty());
        assert!(d.overlap(0, 1).phi.map.src().is_empty());
        check_cocycle(&d).unwrap();

        let (_, obj) = bg_trivial(&z(3), &FinSet::range(3));
        let d = restrict_to_datum(&obj, &two_leg_overlapping()).unwrap();
        check_cocycle(&d).unwrap();
    }

    #[test]
    fn twisted_overlap_breaks_cocycle() {
        let (stack, obj) = bg_trivial(&FinGroup::symmetric3().into(), &FinSet::range(3));
        let cover = two_leg_overlapping();
        let d = restrict_to_datum(&obj, &cover).unwrap();
        let group = stack.group().clone();
        // reroute φ_01 through right multiplication by a non-central element,
        // which is still equivariant but disagrees with φ_10^{-1}
        let g0 = 1;
        let total = d.objects()[1].bundle().total().clone();
        let twist = |q: usize| -> usize {
            // q = ((h, y), u) in (G × Y) ×_Y U_1; send to ((h·g0, y), u)
            let (inner, u) = total
                .space()
                .atom(q)
                .as_pair()
                .map(|(a, b)| (a.clone(), b.clone()))
                .unwrap();
            let (h, y) = inner
                .as_pair()
                .map(|(a, b)| (a.clone(), b.clone()))
                .unwrap();
            let hi = group.carrier().index_of(&h).unwrap();
            let target = Atom::pair(
                Atom::pair(group.carrier().atom(group.mul(hi, g0)).clone(), y),
                u,
            );
            total.space().index_of(&target).unwrap()
        };
        let bad =
            DescentDatum::from_fibers(&stack, &cover, d.objects().to_vec(), |i, j, a, b, p| {
                let q = d.phi_at(i, j, a, b, p).unwrap();
                if (i, j) == (0, 1) {
                    twist(q)
                } else {
                    q
                }
            })
            .unwrap();
        let err = check_cocycle(&bad).unwrap_err();
        assert!([(0, 0, 1), (0, 1, 0), (0, 1, 1), (1, 0, 1)].contains(&(err.i, err.j, err.k)));
        assert!(matches!(
            glue_object(&bad),
            Err(DescentError::CocycleRequired(_))
        ));
    }

    #[test]
    fn glue_morphisms_examples() {
        let g = z(2);
        let (_, obj) = bg_trivial(&g, &FinSet::range(2));
        let cover = CoveringFamily::points(obj.base());
        for m in enumerate_qs_morphisms(&obj, &obj, 100).unwrap() {
            let locals: Vec<QSMorphism> = cover
                .legs()
                .iter()
                .map(|f| crate::stack::restrict_morphism(&m, f).unwrap())
                .collect();
            let eta = glue_morphisms(&cover, &obj, &obj, &locals).unwrap();
            assert_eq!(eta.map, m.map);
        }

        // per-point gauge maps (g_0, g_1) glue to the map acting by g_y over y
        let fiber_obj = restrict(&obj, &cover.legs()[0]).unwrap().object;
        let fiber_auts = enumerate_qs_morphisms(&fiber_obj, &fiber_obj, 100).unwrap();
        assert_eq!(fiber_auts.len(), 2);
        let fiber1 = restrict(&obj, &cover.legs()[1]).unwrap().object;
        let fiber1_auts = enumerate_qs_morphisms(&fiber1, &fiber1, 100).unwrap();
        for l0 in &fiber_auts {
            for l1 in &fiber1_auts {
                let eta = glue_morphisms(&cover, &obj, &obj, &[l0.clone(), l1.clone()]).unwrap();
                for (y, l) in [(0usize, l0), (1, l1)] {
                    let moved = l.map.at(0) != 0;
                    for p in obj.bundle().proj().fiber(y) {
                        assert_eq!(eta.map.at(p) != p, moved);
                    }
                }
            }
        }

        let (_, obj3) = bg_trivial(&g, &FinSet::range(3));
        let cover = two_leg_overlapping();
        let r0 = restrict(&obj3, &cover.legs()[0]).unwrap().object;
        let r1 = restrict(&obj3, &cover.legs()[1]).unwrap().object;
        let a0 = enumerate_qs_morphisms(&r0, &r0, 100).unwrap();
        let a1 = enumerate_qs_morphisms(&r1, &r1, 100).unwrap();
        let id0 = a0.iter().find(|m| m.map.is_identity()).unwrap();
        // a local moving the fiber over the shared point on one leg only
        let shared = Atom::pair(Atom::pair(0.into(), 1.into()), 0.into());
        let twisted = a1
            .iter()
            .find(|m| {
                let e = m.map.src().index_of(&shared).unwrap();
                m.map.at(e) != e
            })
            .unwrap();
        assert!(matches!(
            glue_morphisms(&cover, &obj3, &obj3, &[id0.clone(), twisted.clone()]),
            Err(DescentError::OverlapMismatch(..))
        ));
    }

    #[test]
    fn uniqueness_examples() {
        let (_, obj) = bg_trivial(&z(2), &FinSet::range(2));
        let cover = CoveringFamily::points(obj.base());
        let auts = enumerate_qs_morphisms(&obj, &obj, 100).unwrap();
        for a in &auts {
            for b in &auts {
                let u = check_uniqueness(&cover, a, b).unwrap();
                assert_eq!(u == Uniqueness::Equal, a.map == b.map);
            }
        }
        let half = CoveringFamily::new(obj.base().clone(), vec![cover.legs()[0].clone()]).unwrap();
        assert!(matches!(
            check_uniqueness(&half, &auts[0], &auts[1]),
            Err(DescentError::CoverNotCanonical)
        ));
    }

    #[test]
    fn glue_object_examples() {
        let g = z(2);
        let (stack, obj) = bg_trivial(&g, &FinSet::range(2));
        for cover in [
            CoveringFamily::points(obj.base()),
            CoveringFamily::identity(obj.base()),
        ] {
            let d = restrict_to_datum(&obj, &cover).unwrap();
            let r = glue_object(&d).unwrap();
            assert!(find_qs_iso(&r.glued, &obj).unwrap().is_some());
            assert!(r.comparisons.iter().all(QSMorphism::is_iso));
        }

        // disjoint point cover with a torsor over each point: W = coproduct
        let (_, pt) = bg_trivial(&g, &terminal());
        let cover = CoveringFamily::points(&FinSet::range(2));
        let d = DescentDatum::from_fibers(&stack, &cover, vec![pt.clone(), pt], |_, _, _, _, p| p)
            .unwrap();
        let r = glue_object(&d).unwrap();
        assert_eq!(r.glued.total_space().len(), 4);
        assert!(find_qs_iso(&r.glued, &obj).unwrap().is_some());

        let (_, obj3) = bg_trivial(&z(3), &FinSet::range(3));
        let d = restrict_to_datum(&obj3, &two_leg_overlapping()).unwrap();
        let r = glue_object(&d).unwrap();
        assert_eq!(r.glued.total_space().len(), 9);
        assert!(find_qs_iso(&r.glued, &obj3).unwrap().is_some());
    }

    #[test]
    fn gluing_commutes_with_restriction() {
        let (_, obj) = bg_trivial(&z(3), &FinSet::range(3));
        let d = restrict_to_datum(&obj, &two_leg_overlapping()).unwrap();
        let glued = glue_object(&d).unwrap().glued;
        let t = FinMap::from_table(FinSet::range(4), FinSet::range(3), vec![2, 1, 1, 0]).unwrap();
        let left = restrict(&glued, &t).unwrap().object;
        let right = glue_object(&d.pull_back_along(&t).unwrap()).unwrap().glued;
        assert!(find_qs_iso(&left, &right).unwrap().is_some());
    }

    #[test]
    fn verify_stack_rejects_without_failing() {
        let g = z(2);
        let (stack, _) = bg_trivial(&g, &FinSet::range(2));
        let (_, pt) = bg_trivial(&g, &terminal());
        let cover = CoveringFamily::points(&FinSet::range(1));
        // φ_00 a non-identity automorphism violates the cocycle
        let bad =
            DescentDatum::from_fibers(&stack, &cover, vec![pt.clone()], |_, _, _, _, p| 1 - p)
                .unwrap();
        let good = DescentDatum::from_fibers(&stack, &cover, vec![pt], |_, _, _, _, p| p).unwrap();
        let corpus = Corpus {
            data: vec![bad, good],
            ..Corpus::default()
        };
        let report = verify_stack(&stack, &corpus);
        assert!(report.all_pass());
        assert_eq!(report.effectiveness.checked, 1);
        assert_eq!(report.rejected.len(), 1);
    }
}

//! Covering families, generated sieves and the canonical topology on
//! finite sets.
//!
//! A family is a canonical cover when the copairing of its legs is a
//! universal effective epimorphism. Checks here run the categorical route
//! (kernel pairs, coequalizers, base change) and cross-check it against the
//! closed form for finite sets, joint surjectivity.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::finset::{
    all_maps, coequalizer, compose, coproduct, count_maps, mediate_coequalizer, pullback, terminal,
    CoequalizerCert, DiagramArrow, FinError, FinMap, FinSet, PullbackCert,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SiteError {
    #[error("map does not land in the covered object")]
    TargetMismatch,
    #[error("enumeration exceeds the configured bound ({0})")]
    BoundExceeded(usize),
    #[error(transparent)]
    Fin(#[from] FinError),
}

/// Finitely many maps into a common target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoveringFamily {
    target: FinSet,
    legs: Vec<FinMap>,
}

impl CoveringFamily {
    pub fn new(target: FinSet, legs: Vec<FinMap>) -> Result<Self, SiteError> {
        if legs.iter().any(|l| *l.dst() != target) {
            return Err(SiteError::TargetMismatch);
        }
        Ok(CoveringFamily { target, legs })
    }

    /// `{ y: T → Y }`, one leg per point of `Y`.
    pub fn points(target: &FinSet) -> Self {
        let t = terminal();
        let legs = (0..target.len())
            .map(|y| FinMap::constant(&t, target, y))
            .collect();
        CoveringFamily {
            target: target.clone(),
            legs,
        }
    }

    pub fn identity(target: &FinSet) -> Self {
        CoveringFamily {
            target: target.clone(),
            legs: vec![FinMap::identity(target)],
        }
    }

    pub fn target(&self) -> &FinSet {
        &self.target
    }

    pub fn legs(&self) -> &[FinMap] {
        &self.legs
    }

    pub fn len(&self) -> usize {
        self.legs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.legs.is_empty()
    }

    /// Closed form of canonical covering for finite sets.
    pub fn is_jointly_surjective(&self) -> bool {
        let mut hit = vec![false; self.target.len()];
        for l in &self.legs {
            for &j in l.table() {
                hit[j] = true;
            }
        }
        hit.into_iter().all(|h| h)
    }

    /// The copairing `∐ f_i : ∐ U_i → Y`.
    pub fn copairing(&self) -> FinMap {
        let parts: Vec<FinSet> = self.legs.iter().map(|l| l.src().clone()).collect();
        coproduct(&parts)
            .copair_into(&self.target, &self.legs)
            .expect("legs share the target")
    }

    /// Pairwise overlaps `U_i ×_Y U_j`, indexed `[i][j]`.
    pub fn overlaps(&self) -> Vec<Vec<PullbackCert>> {
        self.legs
            .iter()
            .map(|fi| {
                self.legs
                    .iter()
                    .map(|fj| pullback(fi, fj).expect("legs share the target"))
                    .collect()
            })
            .collect()
    }

    /// The family `{ t*f_i : U_i ×_Y Z → Z }` pulled back along `t: Z → Y`.
    pub fn pull_back_along(&self, t: &FinMap) -> Result<CoveringFamily, SiteError> {
        if *t.dst() != self.target {
            return Err(SiteError::TargetMismatch);
        }
        let legs = self
            .legs
            .iter()
            .map(|f| Ok(pullback(f, t)?.proj2))
            .collect::<Result<Vec<_>, FinError>>()?;
        Ok(CoveringFamily {
            target: t.src().clone(),
            legs,
        })
    }
}

/// The sieve generated by a family, represented by its generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedSieve {
    pub generators: CoveringFamily,
}

/// `g = f_leg ∘ h`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub leg: usize,
    pub h: FinMap,
}

impl GeneratedSieve {
    pub fn new(generators: CoveringFamily) -> Self {
        GeneratedSieve { generators }
    }

    pub fn target(&self) -> &FinSet {
        self.generators.target()
    }
}

/// Decides membership of `g` in the sieve and returns a factorization
/// through the first generator whose image contains `im(g)`.
pub fn sieve_member(
    sieve: &GeneratedSieve,
    g: &FinMap,
) -> Result<Option<Factorization>, SiteError> {
    if g.dst() != sieve.target() {
        return Err(SiteError::TargetMismatch);
    }
    for (leg, f) in sieve.generators.legs().iter().enumerate() {
        let fibers = f.fibers();
        if g.table().iter().all(|&y| !fibers[y].is_empty()) {
            let table = g.table().iter().map(|&y| fibers[y][0]).collect();
            let h = FinMap::from_table(g.src().clone(), f.src().clone(), table)?;
            debug_assert_eq!(compose(f, &h).as_ref(), Ok(g));
            return Ok(Some(Factorization { leg, h }));
        }
    }
    Ok(None)
}

/// Whether `f` is the coequalizer of its kernel pair.
pub fn is_effective_epi(f: &FinMap) -> bool {
    let kp = pullback(f, f).expect("kernel pair of a map with itself");
    let cq = coequalizer(&kp.proj1, &kp.proj2).expect("kernel pair projections are parallel");
    let comparison = mediate_coequalizer(&cq, f).expect("f coequalizes its kernel pair");
    let effective = comparison.is_bijective();
    assert_eq!(
        effective,
        f.is_surjective(),
        "effective epi ≠ surjection for {f:?}"
    );
    effective
}

/// Effective epi, and stays so after base change along every map from a
/// set of size ≤ 3 plus `sample_budget` random maps from larger sets.
pub fn is_universal_effective_epi(f: &FinMap, sample_budget: usize, seed: u64) -> bool {
    let verdict = universal_effective_epi_inner(f, sample_budget, seed);
    assert_eq!(
        verdict,
        f.is_surjective(),
        "universal effective epi ≠ surjection for {f:?}"
    );
    verdict
}

fn universal_effective_epi_inner(f: &FinMap, sample_budget: usize, seed: u64) -> bool {
    if !is_effective_epi(f) {
        return false;
    }
    let y = f.dst();
    let stable_along = |t: &FinMap| {
        let pb = pullback(f, t).expect("base change shares the target");
        is_effective_epi(&pb.proj2)
    };
    for k in 0..=3 {
        if !all_maps(&FinSet::range(k), y).all(|t| stable_along(&t)) {
            return false;
        }
    }
    if y.is_empty() {
        return true;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..sample_budget).all(|_| {
        let n = rng.gen_range(4..=6);
        let table = (0..n).map(|_| rng.gen_range(0..y.len())).collect();
        let t = FinMap::from_table(FinSet::range(n), y.clone(), table).expect("in range");
        stable_along(&t)
    })
}

/// Membership in the canonical topology: `∐ f_i` is a universal effective
/// epimorphism.
pub fn is_canonical_cover(family: &CoveringFamily, sample_budget: usize, seed: u64) -> bool {
    let verdict = is_universal_effective_epi(&family.copairing(), sample_budget, seed);
    assert_eq!(verdict, family.is_jointly_surjective());
    verdict
}

/// The Čech realization of a family: `∐ U_i ×_Y U_j ⇉ ∐ U_i`, its
/// coequalizer, and the comparison map to the target.
#[derive(Debug, Clone)]
pub struct CechRealization {
    pub coequalizer: CoequalizerCert,
    pub comparison: FinMap,
}

pub fn cech_realization(family: &CoveringFamily) -> CechRealization {
    let legs = family.legs();
    let parts: Vec<FinSet> = legs.iter().map(|l| l.src().clone()).collect();
    let base = coproduct(&parts);
    let overlaps = family.overlaps();
    let mut rel_parts = Vec::new();
    let mut left = Vec::new();
    let mut right = Vec::new();
    for (i, row) in overlaps.iter().enumerate() {
        for (j, pb) in row.iter().enumerate() {
            rel_parts.push(pb.apex.clone());
            left.extend(pb.proj1.table().iter().map(|&a| base.offset(i) + a));
            right.extend(pb.proj2.table().iter().map(|&b| base.offset(j) + b));
        }
    }
    let rel = coproduct(&rel_parts).apex;
    let g1 = FinMap::from_table(rel.clone(), base.apex.clone(), left).expect("in range");
    let g2 = FinMap::from_table(rel, base.apex.clone(), right).expect("in range");
    let cq = coequalizer(&g1, &g2).expect("parallel pair");
    let comparison = mediate_coequalizer(&cq, &family.copairing()).expect("legs agree on overlaps");
    CechRealization {
        coequalizer: cq,
        comparison,
    }
}

/// Whether the target is the colimit of the sieve's domains, evaluated on
/// the Čech diagram of the generators.
pub fn is_colim_sieve(sieve: &GeneratedSieve) -> bool {
    cech_realization(&sieve.generators)
        .comparison
        .is_bijective()
}

/// Colimit of the full subcategory of `C/Y` on the given members, with its
/// comparison map to `Y`. Arrows are every map over `Y` between member
/// domains; `bound` caps the number of candidate maps examined per pair.
pub fn slice_colimit(
    target: &FinSet,
    members: &[FinMap],
    bound: usize,
) -> Result<(FinSet, FinMap), SiteError> {
    if members.iter().any(|m| m.dst() != target) {
        return Err(SiteError::TargetMismatch);
    }
    let objects: Vec<FinSet> = members.iter().map(|m| m.src().clone()).collect();
    let mut arrows = Vec::new();
    for (a, ma) in members.iter().enumerate() {
        for (b, mb) in members.iter().enumerate() {
            let fibers = mb.fibers();
            let choices: Vec<&Vec<usize>> = ma.table().iter().map(|&y| &fibers[y]).collect();
            let total = choices
                .iter()
                .fold(1usize, |acc, c| acc.saturating_mul(c.len()));
            if total > bound {
                return Err(SiteError::BoundExceeded(bound));
            }
            if total == 0 {
                continue;
            }
            let mut digits = vec![0usize; choices.len()];
            loop {
                let table = digits.iter().zip(&choices).map(|(&d, c)| c[d]).collect();
                arrows.push(DiagramArrow {
                    src: a,
                    dst: b,
                    map: FinMap::from_table(objects[a].clone(), objects[b].clone(), table)?,
                });
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
        }
    }
    let colim = crate::finset::colimit_of_diagram(&objects, &arrows)?;
    // every arrow lies over Y, so the members form a cocone into Y
    let mut table = vec![usize::MAX; colim.apex.len()];
    for (m, leg) in colim.cocone.iter().zip(members) {
        for (x, &q) in m.table().iter().enumerate() {
            table[q] = leg.at(x);
        }
    }
    let comparison = FinMap::from_table(colim.apex.clone(), target.clone(), table)?;
    Ok((colim.apex, comparison))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SheafBounds {
    /// Cap on matching families and on candidate gluings enumerated.
    pub exhaustive: usize,
    /// Cap on `|Y| + Σ|U_i|` for the constructive route.
    pub constructive: usize,
}

impl Default for SheafBounds {
    fn default() -> Self {
        SheafBounds {
            exhaustive: 4096,
            constructive: 100_000,
        }
    }
}

/// Whether the representable presheaf `Hom(-, A)` satisfies the sheaf
/// condition for the family: every matching family glues uniquely.
pub fn check_sheaf_condition(
    family: &CoveringFamily,
    a: &FinSet,
    bounds: SheafBounds,
) -> Result<bool, SiteError> {
    let n_a = a.len();
    let families = family.legs().iter().fold(1usize, |acc, l| {
        acc.saturating_mul(count_maps(l.src().len(), n_a))
    });
    let gluings = count_maps(family.target().len(), n_a);
    if families <= bounds.exhaustive && gluings <= bounds.exhaustive {
        return Ok(sheaf_exhaustive(family, n_a));
    }
    let size = family.target().len() + family.legs().iter().map(|l| l.src().len()).sum::<usize>();
    if size <= bounds.constructive {
        return Ok(sheaf_constructive(family, n_a));
    }
    Err(SiteError::BoundExceeded(bounds.constructive))
}

fn sheaf_exhaustive(family: &CoveringFamily, n_a: usize) -> bool {
    let legs = family.legs();
    let overlaps = family.overlaps();
    let sizes: Vec<usize> = legs.iter().map(|l| l.src().len()).collect();
    let y = family.target().len();
    // one mixed-radix counter over all leg values at once
    let total: usize = sizes.iter().sum();
    if n_a == 0 && total > 0 {
        return true;
    }
    let offsets: Vec<usize> = sizes
        .iter()
        .scan(0, |acc, &s| {
            let o = *acc;
            *acc += s;
            Some(o)
        })
        .collect();
    let mut vals = vec![0usize; total];
    loop {
        let matching = overlaps.iter().enumerate().all(|(i, row)| {
            row.iter().enumerate().all(|(j, pb)| {
                pb.proj1
                    .table()
                    .iter()
                    .zip(pb.proj2.table())
                    .all(|(&p, &q)| vals[offsets[i] + p] == vals[offsets[j] + q])
            })
        });
        if matching {
            let mut glue = vec![0usize; y];
            let mut count = 0;
            if y == 0 || n_a > 0 {
                loop {
                    let ok = legs.iter().enumerate().all(|(i, l)| {
                        l.table()
                            .iter()
                            .enumerate()
                            .all(|(x, &t)| glue[t] == vals[offsets[i] + x])
                    });
                    if ok {
                        count += 1;
                    }
                    if !advance(&mut glue, n_a) {
                        break;
                    }
                }
            }
            if count != 1 {
                return false;
            }
        }
        if !advance(&mut vals, n_a) {
            return true;
        }
    }
}

/// Mixed-radix increment with a single radix; false once it wraps around.
pub(crate) fn advance_digits(digits: &mut [usize], radix: usize) -> bool {
    advance(digits, radix)
}

fn advance(digits: &mut [usize], radix: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < radix {
            return true;
        }
        *d = 0;
    }
    false
}

fn sheaf_constructive(family: &CoveringFamily, n_a: usize) -> bool {
    let cech = cech_realization(family);
    // a matching family is a map out of the Čech quotient; defining s on the
    // images is well-defined iff the comparison is injective and total iff
    // it is surjective
    let well_defined = cech.comparison.is_injective();
    let total = cech.comparison.is_surjective();
    let any_leg_points = family.legs().iter().any(|l| !l.src().is_empty());
    match n_a {
        0 => any_leg_points || family.target().is_empty(),
        1 => true,
        _ => well_defined && total,
    }
}

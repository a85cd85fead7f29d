//! Random and exhaustive instances: groups, G-sets, equivariant maps,
//! bundles, objects of `[X/G]`, canonical covers, and stack corpora.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::bundle::{equivariant_projection, is_principal_bundle, Bundle};
use crate::descent::{restrict_to_datum, Corpus, DescentDatum, MorphismCase, UniquenessCase};
use crate::finset::{product, FinMap, FinSet};
use crate::group::{check_equivariant, EquivariantMap, FinGroup, GAction};
use crate::site::{advance_digits, CoveringFamily};
use crate::stack::{
    check_qs_object, enumerate_objects, enumerate_qs_morphisms, restrict, restrict_morphism,
    QSMorphism, QSObject, QuotientStack, StackError,
};

/// The groups of order ≤ 6 up to iso, smallest first.
pub fn small_groups() -> Vec<Arc<FinGroup>> {
    vec![
        FinGroup::cyclic(1),
        FinGroup::cyclic(2),
        FinGroup::cyclic(3),
        FinGroup::cyclic(4),
        FinGroup::klein(),
        FinGroup::cyclic(5),
        FinGroup::cyclic(6),
        FinGroup::symmetric3(),
    ]
    .into_iter()
    .map(Arc::new)
    .collect()
}

pub fn random_group<R: Rng>(rng: &mut R, orders: &[usize]) -> Arc<FinGroup> {
    let pool: Vec<_> = small_groups()
        .into_iter()
        .filter(|g| orders.contains(&g.order()))
        .collect();
    pool.choose(rng)
        .expect("no group of the requested orders")
        .clone()
}

/// All subgroups, by brute force over subsets containing the unit.
pub fn subgroups(group: &FinGroup) -> Vec<Vec<usize>> {
    let n = group.order();
    assert!(n <= 16, "subgroup search is exponential");
    (0u32..1 << n)
        .filter(|mask| mask & (1 << group.unit()) != 0)
        .map(|mask| (0..n).filter(|&i| mask & (1 << i) != 0).collect::<Vec<_>>())
        .filter(|h| {
            h.iter()
                .all(|&a| h.iter().all(|&b| h.contains(&group.mul(a, b))))
        })
        .collect()
}

/// A random G-set with at most `max_size` points, built as a disjoint union
/// of coset spaces `G/H`. Empty only if `max_size` is zero.
pub fn random_gset<R: Rng>(rng: &mut R, group: &Arc<FinGroup>, max_size: usize) -> GAction {
    let subs = subgroups(group);
    let n = group.order();
    // orbits as lists of cosets, each coset a sorted list of elements
    let mut orbits: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut size = 0;
    let mut tries = 0;
    while tries < 8 {
        tries += 1;
        let h = subs.choose(rng).expect("the trivial subgroup exists");
        let index = n / h.len();
        if size + index > max_size {
            continue;
        }
        let mut cosets: Vec<Vec<usize>> = Vec::new();
        for a in 0..n {
            let mut c: Vec<usize> = h.iter().map(|&x| group.mul(a, x)).collect();
            c.sort_unstable();
            if !cosets.contains(&c) {
                cosets.push(c);
            }
        }
        size += index;
        orbits.push(cosets);
        if rng.gen_bool(0.4) {
            break;
        }
    }
    if orbits.is_empty() && max_size > 0 {
        orbits.push(vec![(0..n).collect()]);
    }
    let mut offsets = Vec::with_capacity(orbits.len());
    let mut acc = 0;
    for o in &orbits {
        offsets.push(acc);
        acc += o.len();
    }
    let space = FinSet::range(acc);
    let table: Vec<Vec<usize>> = (0..n)
        .map(|g| {
            let mut row = Vec::with_capacity(acc);
            for (o, cosets) in orbits.iter().enumerate() {
                for c in cosets {
                    let mut moved: Vec<usize> = c.iter().map(|&x| group.mul(g, x)).collect();
                    moved.sort_unstable();
                    row.push(
                        offsets[o]
                            + cosets
                                .iter()
                                .position(|d| *d == moved)
                                .expect("cosets are permuted"),
                    );
                }
            }
            row
        })
        .collect();
    GAction::from_table(group, &space, &table).expect("coset action")
}

pub fn random_map<R: Rng>(rng: &mut R, src: &FinSet, dst: &FinSet) -> Option<FinMap> {
    if dst.is_empty() && !src.is_empty() {
        return None;
    }
    let table = (0..src.len())
        .map(|_| rng.gen_range(0..dst.len()))
        .collect();
    Some(FinMap::from_table(src.clone(), dst.clone(), table).expect("in range"))
}

/// A random equivariant map: each orbit representative goes to a point
/// whose stabilizer contains the representative's.
pub fn random_equivariant<R: Rng>(rng: &mut R, a: &GAction, b: &GAction) -> Option<EquivariantMap> {
    let mut table = vec![usize::MAX; a.space().len()];
    for orbit in a.orbits() {
        let rep = orbit[0];
        let stab = a.stabilizer(rep);
        let candidates: Vec<usize> = (0..b.space().len())
            .filter(|&y| stab.iter().all(|&g| b.act(g, y) == y))
            .collect();
        let &y = candidates.choose(rng)?;
        for g in 0..a.group().order() {
            table[a.act(g, rep)] = b.act(g, y);
        }
    }
    let f = FinMap::from_table(a.space().clone(), b.space().clone(), table)
        .expect("every orbit assigned");
    Some(check_equivariant(&f, a, b).expect("stabilizer condition makes the extension equivariant"))
}

/// A random principal bundle on `G × Y` with an independent torsor
/// structure on each fiber.
pub fn random_bundle<R: Rng>(rng: &mut R, group: &Arc<FinGroup>, base: &FinSet) -> Bundle {
    let n = group.order();
    let prod = product(group.carrier(), base);
    // fiber over y is { (h, y) }, labelled through a random bijection σ_y
    let sigmas: Vec<Vec<usize>> = (0..base.len())
        .map(|_| {
            let mut s: Vec<usize> = (0..n).collect();
            s.shuffle(rng);
            s
        })
        .collect();
    let mut table = vec![vec![0; prod.apex.len()]; n];
    for (y, sigma) in sigmas.iter().enumerate() {
        let mut inv = vec![0; n];
        for (h, &s) in sigma.iter().enumerate() {
            inv[s] = h;
        }
        for (g, row) in table.iter_mut().enumerate() {
            for s in 0..n {
                // g · σ(h) = σ(g h)
                row[prod.index(s, y)] = prod.index(sigma[group.mul(g, inv[s])], y);
            }
        }
    }
    let total = GAction::from_table(group, &prod.apex, &table).expect("transported regular action");
    let proj = equivariant_projection(&total, &prod.proj2).expect("fibers are preserved");
    is_principal_bundle(&proj).expect("every fiber is a torsor")
}

/// A random `α` on a bundle: each free orbit sends its first point
/// anywhere in `X`.
pub fn random_alpha<R: Rng>(rng: &mut R, bundle: &Bundle, x: &GAction) -> Option<FinMap> {
    random_equivariant(rng, bundle.total(), x).map(|e| e.map().clone())
}

pub fn random_object<R: Rng>(
    rng: &mut R,
    stack: &QuotientStack,
    base: &FinSet,
) -> Option<QSObject> {
    let b = random_bundle(rng, stack.group(), base);
    let alpha = random_alpha(rng, &b, stack.x_action())?;
    Some(check_qs_object(stack, &b, &alpha).expect("random α is equivariant"))
}

/// A random jointly surjective family of at most `max_legs` legs; points
/// missed by the random legs are appended to random legs.
pub fn random_canonical_cover<R: Rng>(
    rng: &mut R,
    base: &FinSet,
    max_legs: usize,
    max_leg_size: usize,
) -> CoveringFamily {
    let legs = rng.gen_range(1..=max_legs.max(1));
    let mut tables: Vec<Vec<usize>> = (0..legs)
        .map(|_| {
            if base.is_empty() {
                return Vec::new();
            }
            let k = rng.gen_range(0..=max_leg_size);
            (0..k).map(|_| rng.gen_range(0..base.len())).collect()
        })
        .collect();
    for y in 0..base.len() {
        if !tables.iter().any(|t| t.contains(&y)) {
            let i = rng.gen_range(0..legs);
            tables[i].push(y);
        }
    }
    let legs = tables
        .into_iter()
        .map(|t| FinMap::from_table(FinSet::range(t.len()), base.clone(), t).expect("in range"))
        .collect();
    CoveringFamily::new(base.clone(), legs).expect("legs land in the base")
}

/// The datum of `obj` conjugated by a random automorphism of each `W_i`.
pub fn twisted_datum<R: Rng>(
    rng: &mut R,
    obj: &QSObject,
    cover: &CoveringFamily,
    bound: usize,
) -> Result<DescentDatum, StackError> {
    let d = restrict_to_datum(obj, cover).map_err(|e| match e {
        crate::descent::DescentError::Stack(s) => s,
        e => panic!("induced datum is well-formed: {e}"),
    })?;
    let mut twists = Vec::with_capacity(cover.len());
    for w in d.objects() {
        let auts = enumerate_qs_morphisms(w, w, bound)?;
        let h = auts
            .choose(rng)
            .expect("identity is an automorphism")
            .map
            .clone();
        let inv = h.inverse().expect("automorphism");
        twists.push((h, inv));
    }
    Ok(
        DescentDatum::from_fibers(d.stack(), cover, d.objects().to_vec(), |i, j, a, b, p| {
            let q = d
                .phi_at(i, j, a, b, twists[i].1.at(p))
                .expect("overlap point");
            twists[j].0.at(q)
        })
        .expect("conjugated datum is well-formed"),
    )
}

/// One random instance: a stack, a base, an object with a canonical cover,
/// a twisted datum, a morphism to glue, and a uniqueness pair.
#[derive(Debug, Clone)]
pub struct RandomInstance {
    pub stack: QuotientStack,
    pub corpus: Corpus,
}

#[derive(Debug, Clone, Copy)]
pub struct InstanceShape {
    pub orders: &'static [usize],
    pub max_x: usize,
    pub max_base: usize,
    pub max_legs: usize,
    pub max_leg_size: usize,
}

impl Default for InstanceShape {
    fn default() -> Self {
        InstanceShape {
            orders: &[1, 2, 3, 4],
            max_x: 4,
            max_base: 4,
            max_legs: 3,
            max_leg_size: 3,
        }
    }
}

pub fn random_instance<R: Rng>(
    rng: &mut R,
    shape: InstanceShape,
) -> Result<RandomInstance, StackError> {
    let group = random_group(rng, shape.orders);
    let x = random_gset(rng, &group, shape.max_x.max(group.order()));
    let stack = QuotientStack::new(x);
    Ok(RandomInstance {
        corpus: random_corpus_for(rng, &stack, shape)?,
        stack,
    })
}

/// One random entry of each corpus kind for a fixed stack, whose `X` must
/// be nonempty. `shape.orders` and `shape.max_x` are ignored.
pub fn random_corpus_for<R: Rng>(
    rng: &mut R,
    stack: &QuotientStack,
    shape: InstanceShape,
) -> Result<Corpus, StackError> {
    const BOUND: usize = 1 << 16;
    let base = FinSet::range(rng.gen_range(1..=shape.max_base.max(1)));
    let obj = random_object(rng, stack, &base).expect("X is nonempty");
    let cover = random_canonical_cover(rng, &base, shape.max_legs, shape.max_leg_size);
    let datum = twisted_datum(rng, &obj, &cover, BOUND)?;

    let other = random_object(rng, stack, &base).expect("X is nonempty");
    let mut homs = enumerate_qs_morphisms(&obj, &other, BOUND)?;
    let target = if homs.is_empty() {
        homs = enumerate_qs_morphisms(&obj, &obj, BOUND)?;
        obj.clone()
    } else {
        other
    };
    let m = homs.choose(rng).expect("identity exists").clone();
    let locals = cover
        .legs()
        .iter()
        .map(|f| restrict_morphism(&m, f))
        .collect::<Result<Vec<_>, _>>()?;
    let m2 = homs.choose(rng).expect("nonempty").clone();
    Ok(Corpus {
        round_trips: vec![(obj.clone(), cover.clone())],
        data: vec![datum],
        morphisms: vec![MorphismCase {
            cover: cover.clone(),
            x: obj.clone(),
            y: target,
            locals,
            expected: Some(m.clone()),
        }],
        uniqueness: vec![UniquenessCase { cover, m1: m, m2 }],
    })
}

/// Every input over bases `{0..n}`, `n ≤ max_base`, with point covers: all
/// global objects, all data built from fiber objects and overlap
/// automorphisms, all tuples of local morphisms between restrictions of
/// global objects, and all pairs of parallel global morphisms.
pub fn exhaustive_corpus(
    stack: &QuotientStack,
    max_base: usize,
    bound: usize,
) -> Result<Corpus, StackError> {
    let mut corpus = Corpus::default();
    let point_objects = enumerate_objects(stack, &crate::finset::terminal(), bound)?;
    for n in 0..=max_base {
        let base = FinSet::range(n);
        let cover = CoveringFamily::points(&base);
        let globals = enumerate_objects(stack, &base, bound)?;
        for obj in &globals {
            corpus.round_trips.push((obj.clone(), cover.clone()));
            corpus
                .round_trips
                .push((obj.clone(), CoveringFamily::identity(&base)));
        }
        push_point_data(&mut corpus, stack, &cover, &point_objects, bound)?;
        for x in &globals {
            for y in &globals {
                let choices = cover
                    .legs()
                    .iter()
                    .map(|f| {
                        enumerate_qs_morphisms(
                            &restrict(x, f)?.object,
                            &restrict(y, f)?.object,
                            bound,
                        )
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                for_each_choice(&choices, bound, |locals: Vec<QSMorphism>| {
                    corpus.morphisms.push(MorphismCase {
                        cover: cover.clone(),
                        x: x.clone(),
                        y: y.clone(),
                        locals,
                        expected: None,
                    });
                })?;
                let globals_xy = enumerate_qs_morphisms(x, y, bound)?;
                for m1 in &globals_xy {
                    for m2 in &globals_xy {
                        corpus.uniqueness.push(UniquenessCase {
                            cover: cover.clone(),
                            m1: m1.clone(),
                            m2: m2.clone(),
                        });
                    }
                }
            }
        }
        if corpus.len() > bound {
            return Err(StackError::BoundExceeded(bound));
        }
    }
    Ok(corpus)
}

/// On a point cover only the diagonal overlaps `U_i ×_Y U_i ≅ T` are
/// nonempty; every choice of automorphism there yields a datum, valid or not.
fn push_point_data(
    corpus: &mut Corpus,
    stack: &QuotientStack,
    cover: &CoveringFamily,
    point_objects: &[QSObject],
    bound: usize,
) -> Result<(), StackError> {
    let n = cover.len();
    let mut pick = vec![0usize; n];
    if point_objects.is_empty() && n > 0 {
        return Ok(());
    }
    loop {
        let objects: Vec<QSObject> = pick.iter().map(|&k| point_objects[k].clone()).collect();
        let auts = objects
            .iter()
            .map(|o| enumerate_qs_morphisms(o, o, bound))
            .collect::<Result<Vec<_>, _>>()?;
        for_each_choice(&auts, bound, |diag: Vec<QSMorphism>| {
            let d = DescentDatum::from_fibers(stack, cover, objects.clone(), |i, _, _, _, p| {
                diag[i].map.at(p)
            })
            .expect("distinct points do not overlap, so only diagonal maps are needed");
            corpus.data.push(d);
        })?;
        if !advance_digits(&mut pick, point_objects.len()) {
            break;
        }
    }
    Ok(())
}

fn for_each_choice<T: Clone>(
    choices: &[Vec<T>],
    bound: usize,
    mut f: impl FnMut(Vec<T>),
) -> Result<(), StackError> {
    let total = choices
        .iter()
        .fold(1usize, |acc, c| acc.saturating_mul(c.len()));
    if total > bound {
        return Err(StackError::BoundExceeded(bound));
    }
    if total == 0 {
        return Ok(());
    }
    let radix: Vec<usize> = choices.iter().map(Vec::len).collect();
    let mut digits = vec![0usize; choices.len()];
    loop {
        f(digits
            .iter()
            .zip(choices)
            .map(|(&d, c)| c[d].clone())
            .collect());
        let mut k = 0;
        loop {
            if k == digits.len() {
                return Ok(());
            }
            digits[k] += 1;
            if digits[k] < radix[k] {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descent::verify_stack;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn subgroup_counts() {
        let counts: Vec<usize> = small_groups().iter().map(|g| subgroups(g).len()).collect();
        // Z1, Z2, Z3, Z4, V4, Z5, Z6, S3
        assert_eq!(counts, vec![1, 2, 2, 3, 5, 2, 4, 6]);
    }

    #[test]
    fn random_gsets_are_actions() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let g = random_group(&mut rng, &[1, 2, 3, 4, 6]);
            let x = random_gset(&mut rng, &g, 6);
            assert!(!x.space().is_empty() && x.space().len() <= 6);
        }
    }

    #[test]
    fn random_bundles_are_principal() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let g = random_group(&mut rng, &[2, 3, 4]);
            let b = random_bundle(&mut rng, &g, &FinSet::range(3));
            assert!(crate::bundle::verify_trivialization(&b));
        }
    }

    #[test]
    fn exhaustive_classifying_corpus() {
        let g = Arc::new(FinGroup::cyclic(2));
        let stack = QuotientStack::classifying(&g);
        let corpus = exhaustive_corpus(&stack, 2, 1 << 16).unwrap();
        let report = verify_stack(&stack, &corpus);
        assert!(report.all_pass(), "{report:?}");
        // data over 0, 1, 2 points: 1 + 2 + 4, of which 1 + 1 + 1 are valid
        assert_eq!(corpus.data.len(), 7);
        assert_eq!(report.rejected.len(), 4);
    }

    #[test]
    fn random_instances_pass() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let inst = random_instance(&mut rng, InstanceShape::default()).unwrap();
            let report = verify_stack(&inst.stack, &inst.corpus);
            assert!(report.all_pass(), "{report:?}");
            assert!(report.rejected.is_empty(), "{:?}", report.rejected);
        }
    }
}

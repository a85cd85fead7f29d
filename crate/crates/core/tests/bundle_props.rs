use std::sync::Arc;

use descent_core::bundle::{
    enumerate_bundle_morphisms, enumerate_principal_bundles, equivariant_projection,
    is_locally_trivial, is_principal_bundle, pullback_bundle, torsor_check, verify_trivialization,
};
use descent_core::corpus::{random_bundle, random_group, random_map, small_groups, subgroups};
use descent_core::finset::{all_maps, compose, morphism_predicates};
use descent_core::group::{check_equivariant, gset_isomorphism_over};
use descent_core::{Bundle, CoveringFamily, FinGroup, FinMap, FinSet, GAction};
use itertools::Itertools;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The disjoint union of the coset spaces `G/H` for the listed subgroups,
/// with the orbit index of each point.
fn coset_union(group: &Arc<FinGroup>, subs: &[&Vec<usize>]) -> (GAction, Vec<usize>) {
    let n = group.order();
    let mut cosets: Vec<Vec<usize>> = Vec::new();
    let mut orbit_of = Vec::new();
    for (o, h) in subs.iter().enumerate() {
        for a in 0..n {
            let mut c: Vec<usize> = h.iter().map(|&x| group.mul(a, x)).collect();
            c.sort_unstable();
            // cosets of different orbits are kept apart by the orbit index
            if !cosets
                .iter()
                .zip(&orbit_of)
                .any(|(d, &p)| *d == c && p == o)
            {
                cosets.push(c);
                orbit_of.push(o);
            }
        }
    }
    let table: Vec<Vec<usize>> = (0..n)
        .map(|g| {
            (0..cosets.len())
                .map(|k| {
                    let mut moved: Vec<usize> =
                        cosets[k].iter().map(|&x| group.mul(g, x)).collect();
                    moved.sort_unstable();
                    (0..cosets.len())
                        .find(|&j| orbit_of[j] == orbit_of[k] && cosets[j] == moved)
                        .expect("cosets are permuted")
                })
                .collect()
        })
        .collect();
    let space = FinSet::range(cosets.len());
    (
        GAction::from_table(group, &space, &table).unwrap(),
        orbit_of,
    )
}

/// Every G-set of at most `cap` points up to iso, as coset unions.
fn gsets_up_to(group: &Arc<FinGroup>, cap: usize) -> Vec<(GAction, Vec<usize>)> {
    let subs = subgroups(group);
    let index = |h: &Vec<usize>| group.order() / h.len();
    let mut out = Vec::new();
    for k in 0..=cap {
        for choice in subs.iter().combinations_with_replacement(k) {
            if choice.iter().map(|h| index(h)).sum::<usize>() <= cap {
                out.push(coset_union(group, &choice));
            }
        }
    }
    out
}

#[test]
fn torsor_check_agrees_with_local_triviality() {
    let mut bundles = 0;
    let mut others = 0;
    for group in small_groups().into_iter().filter(|g| g.order() <= 3) {
        for n in 0..=3 {
            let base = FinSet::range(n);
            let covers = [
                CoveringFamily::points(&base),
                CoveringFamily::identity(&base),
            ];
            for (total, orbit_of) in gsets_up_to(&group, group.order() * n) {
                let orbits = orbit_of.iter().max().map_or(0, |m| m + 1);
                for labels in all_maps(&FinSet::range(orbits), &base) {
                    let table = orbit_of.iter().map(|&o| labels.at(o)).collect();
                    let proj =
                        FinMap::from_table(total.space().clone(), base.clone(), table).unwrap();
                    let proj = equivariant_projection(&total, &proj).unwrap();
                    let fiberwise = torsor_check(&proj).is_ok();
                    for cover in &covers {
                        assert_eq!(
                            is_locally_trivial(&proj, cover).unwrap().is_ok(),
                            fiberwise,
                            "{proj:?}"
                        );
                    }
                    if fiberwise {
                        bundles += 1;
                    } else {
                        others += 1;
                    }
                }
            }
        }
    }
    assert!(bundles > 0 && others > bundles);
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

#[test]
fn every_bundle_is_trivial() {
    for group in small_groups().into_iter().filter(|g| g.order() <= 4) {
        for n in 0..=3 {
            let base = FinSet::range(n);
            let all = enumerate_principal_bundles(&group, &base, 1 << 16).unwrap();
            // a torsor structure on a |G|-set is a bijection up to the |G| translations
            assert_eq!(all.len(), factorial(group.order() - 1).pow(n as u32));
            let trivial = Bundle::trivial(&group, &base);
            for b in &all {
                let h = gset_isomorphism_over(b.total(), trivial.total(), b.proj(), trivial.proj())
                    .unwrap()
                    .expect("iso to the trivial bundle");
                assert!(h.is_bijective());
                assert!(check_equivariant(&h, b.total(), trivial.total()).is_ok());
                assert_eq!(&compose(trivial.proj(), &h).unwrap(), b.proj());
            }
        }
    }
}

#[test]
fn every_bundle_morphism_is_an_iso() {
    let mut seen = 0;
    for group in small_groups().into_iter().filter(|g| g.order() <= 4) {
        for n in 0..=2 {
            if group.order() == 4 && n == 2 {
                continue;
            }
            let base = FinSet::range(n);
            let all = enumerate_principal_bundles(&group, &base, 1 << 16).unwrap();
            for (a, b) in all.iter().cartesian_product(&all) {
                let morphisms = enumerate_bundle_morphisms(a, b, 1 << 16).unwrap();
                // |G| choices on each fiber, all of them bundle maps
                assert_eq!(morphisms.len(), group.order().pow(n as u32));
                for m in morphisms {
                    let p = morphism_predicates(&m.map);
                    assert!(p.mono && p.epi && p.iso);
                    seen += 1;
                }
            }
        }
    }
    assert!(seen > 400);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(250))]

    #[test]
    fn pulled_back_bundles_are_principal(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let group = random_group(&mut rng, &[1, 2, 3, 4]);
        let base = FinSet::range(rng.gen_range(0..=4));
        let bundle = random_bundle(&mut rng, &group, &base);
        prop_assert!(verify_trivialization(&bundle));
        let z = FinSet::range(rng.gen_range(0..=4));
        prop_assume!(!base.is_empty() || z.is_empty());
        let f = random_map(&mut rng, &z, &base).unwrap();
        let pb = pullback_bundle(&bundle, &f).unwrap();
        prop_assert!(is_principal_bundle(pb.bundle.proj_equivariant()).is_ok());
        prop_assert!(verify_trivialization(&pb.bundle));
        prop_assert_eq!(pb.bundle.total_space().len(), group.order() * z.len());
    }
}

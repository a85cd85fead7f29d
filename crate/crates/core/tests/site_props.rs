use descent_core::corpus::random_map;
use descent_core::finset::{all_maps, compose};
use descent_core::site::{
    cech_realization, check_sheaf_condition, is_canonical_cover, is_colim_sieve, sieve_member,
    slice_colimit, GeneratedSieve, SheafBounds,
};
use descent_core::{CoveringFamily, FinMap, FinSet};
use itertools::Itertools;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every family over `{0..n}` for `n ≤ 3` with at most three legs, each
/// of size at most two.
fn small_families() -> Vec<CoveringFamily> {
    let mut out = Vec::new();
    for n in 0..=3 {
        let y = FinSet::range(n);
        let legs: Vec<FinMap> = (0..=2)
            .flat_map(|s| all_maps(&FinSet::range(s), &y).collect::<Vec<_>>())
            .collect();
        for k in 0..=3 {
            for choice in (0..k).map(|_| legs.iter()).multi_cartesian_product() {
                out.push(
                    CoveringFamily::new(y.clone(), choice.into_iter().cloned().collect()).unwrap(),
                );
            }
        }
    }
    out
}

fn surjective_oracle(family: &CoveringFamily) -> bool {
    (0..family.target().len()).all(|y| family.legs().iter().any(|l| l.table().contains(&y)))
}

fn random_family(rng: &mut ChaCha8Rng) -> CoveringFamily {
    let y = FinSet::range(rng.gen_range(0..=6));
    let legs = (0..rng.gen_range(0..=4))
        .filter_map(|_| {
            let u = FinSet::range(rng.gen_range(0..=4));
            random_map(rng, &u, &y)
        })
        .collect();
    CoveringFamily::new(y, legs).unwrap()
}

#[test]
fn canonical_covers_are_the_jointly_surjective_families() {
    let families = small_families();
    // 1 + n + n² candidate legs over n points, up to three of them
    assert_eq!(families.len(), 4 + 40 + 400 + 2380);
    let canonical = families
        .iter()
        .filter(|f| {
            let verdict = is_canonical_cover(f, 8, 1);
            assert_eq!(verdict, surjective_oracle(f), "{f:?}");
            verdict
        })
        .count();
    assert!(canonical > 0 && canonical < families.len());
}

#[test]
fn representables_are_sheaves_for_small_canonical_covers() {
    for f in small_families().iter().filter(|f| surjective_oracle(f)) {
        for a in 0..=3 {
            let ok = check_sheaf_condition(f, &FinSet::range(a), SheafBounds::default()).unwrap();
            assert!(ok, "{f:?} against {a} points");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn larger_families_agree_with_surjectivity(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_family(&mut rng);
        prop_assert_eq!(is_canonical_cover(&f, 20, seed), surjective_oracle(&f));
    }

    #[test]
    fn canonical_covers_are_colim_sieves_stable_under_pullback(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_family(&mut rng);
        prop_assume!(surjective_oracle(&f));
        let sieve = GeneratedSieve::new(f.clone());
        prop_assert!(is_colim_sieve(&sieve));
        for _ in 0..5 {
            let z = FinSet::range(rng.gen_range(0..=5));
            let Some(t) = random_map(&mut rng, &z, f.target()) else { continue };
            let pulled = f.pull_back_along(&t).unwrap();
            prop_assert!(is_canonical_cover(&pulled, 10, seed));
            prop_assert!(is_colim_sieve(&GeneratedSieve::new(pulled)));
        }
    }

    #[test]
    fn non_covers_are_not_colim_sieves(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_family(&mut rng);
        prop_assume!(!surjective_oracle(&f));
        prop_assert!(!is_colim_sieve(&GeneratedSieve::new(f)));
    }

    /// The colimit over a finite piece of the sieve holding the legs, their
    /// overlaps and sampled further members equals the Čech colimit.
    #[test]
    fn sieve_colimit_matches_cech(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_family(&mut rng);
        prop_assume!(f.target().len() <= 4 && f.legs().iter().all(|l| l.src().len() <= 3));
        let sieve = GeneratedSieve::new(f.clone());
        let mut members: Vec<FinMap> = f.legs().to_vec();
        for row in f.overlaps() {
            for pb in row {
                members.push(compose(&pb.f, &pb.proj1).unwrap());
            }
        }
        for _ in 0..2 {
            if f.is_empty() {
                break;
            }
            let leg = &f.legs()[rng.gen_range(0..f.len())];
            let u = FinSet::range(rng.gen_range(0..=2));
            let Some(h) = random_map(&mut rng, &u, leg.src()) else { continue };
            let m = compose(leg, &h).unwrap();
            prop_assert!(sieve_member(&sieve, &m).unwrap().is_some());
            members.push(m);
        }
        let cech = cech_realization(&f);
        let Ok((apex, comparison)) = slice_colimit(f.target(), &members, 1 << 12) else {
            return Ok(());
        };
        prop_assert_eq!(apex.len(), cech.coequalizer.quotient.len());
        prop_assert_eq!(comparison.is_bijective(), cech.comparison.is_bijective());
        let image: Vec<usize> = (0..comparison.dst().len()).filter(|y| comparison.table().contains(y)).collect();
        let cech_image: Vec<usize> = (0..cech.comparison.dst().len())
            .filter(|y| cech.comparison.table().contains(y))
            .collect();
        prop_assert_eq!(image, cech_image);
    }
}

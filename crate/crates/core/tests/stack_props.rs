use descent_core::corpus::{random_group, random_gset, random_map, random_object};
use descent_core::finset::compose;
use descent_core::stack::{
    check_associativity, check_unit_coherence, coherence_epsilon, coherence_iota,
    enumerate_qs_morphisms, epsilon_component, iota_component, restrict, restrict_morphism,
    FiberSample,
};
use descent_core::{FinMap, FinSet, QSMorphism, QuotientStack};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BOUND: usize = 1 << 14;

fn random_stack(rng: &mut ChaCha8Rng) -> QuotientStack {
    let group = random_group(rng, &[1, 2, 3, 4]);
    QuotientStack::new(random_gset(rng, &group, 4))
}

/// A map into `dst` from a random set of at most `max` points.
fn random_into(rng: &mut ChaCha8Rng, dst: &FinSet, max: usize) -> FinMap {
    let lo = usize::from(dst.is_empty());
    let n = if dst.is_empty() {
        0
    } else {
        rng.gen_range(lo..=max)
    };
    random_map(rng, &FinSet::range(n), dst).expect("empty source or nonempty target")
}

/// Objects over one base and up to a dozen morphisms between them.
fn random_sample(rng: &mut ChaCha8Rng, stack: &QuotientStack, base: &FinSet) -> FiberSample {
    let objects: Vec<_> = (0..3)
        .map(|_| random_object(rng, stack, base).expect("X is nonempty"))
        .collect();
    let mut morphisms = Vec::new();
    for (a, x) in objects.iter().enumerate() {
        for (b, y) in objects.iter().enumerate() {
            for m in enumerate_qs_morphisms(x, y, BOUND).unwrap() {
                morphisms.push((a, b, m));
            }
        }
    }
    let morphisms = morphisms.choose_multiple(rng, 12).cloned().collect();
    FiberSample { objects, morphisms }
}

fn same(a: &QSMorphism, b: &QSMorphism) -> bool {
    a.src == b.src && a.dst == b.dst && a.map == b.map
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn restriction_preserves_identities_and_composition(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let stack = random_stack(&mut rng);
        let base = FinSet::range(rng.gen_range(0..=3));
        let sample = random_sample(&mut rng, &stack, &base);
        let f = random_into(&mut rng, &base, 3);
        for obj in &sample.objects {
            let restricted = restrict(obj, &f).unwrap().object;
            let id = restrict_morphism(&QSMorphism::identity(obj), &f).unwrap();
            prop_assert!(same(&id, &QSMorphism::identity(&restricted)));
        }
        for (_, b, m1) in &sample.morphisms {
            for (c, _, m2) in &sample.morphisms {
                if b != c {
                    continue;
                }
                let whole = restrict_morphism(&m1.then(m2).unwrap(), &f).unwrap();
                let parts = restrict_morphism(m1, &f)
                    .unwrap()
                    .then(&restrict_morphism(m2, &f).unwrap())
                    .unwrap();
                prop_assert!(same(&whole, &parts));
            }
        }
    }
}

/// Naturality of `ε_{f,g}` recomputed from restriction alone:
/// `ε_dst ∘ (fg)*(m) = g*(f*(m)) ∘ ε_src`.
fn epsilon_square_commutes(m: &QSMorphism, f: &FinMap, g: &FinMap) -> bool {
    let fg = compose(f, g).unwrap();
    let left = restrict_morphism(m, &fg)
        .unwrap()
        .then(&epsilon_component(&m.dst, f, g).unwrap())
        .unwrap();
    let right = epsilon_component(&m.src, f, g)
        .unwrap()
        .then(&restrict_morphism(&restrict_morphism(m, f).unwrap(), g).unwrap())
        .unwrap();
    same(&left, &right)
}

#[test]
fn coherence_cells_are_natural_isos() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut iota_squares, mut epsilon_squares) = (0, 0);
    for _ in 0..40 {
        let stack = random_stack(&mut rng);
        let base = FinSet::range(rng.gen_range(1..=3));
        let sample = random_sample(&mut rng, &stack, &base);
        let iota = coherence_iota(&base, &sample).unwrap();
        assert!(iota.components.iter().all(QSMorphism::is_iso));
        for (obj, c) in sample.objects.iter().zip(&iota.components) {
            assert!(same(c, &iota_component(obj).unwrap()));
        }
        iota_squares += iota.naturality_squares;

        let f = random_into(&mut rng, &base, 3);
        let g = random_into(&mut rng, f.src(), 3);
        let eps = coherence_epsilon(&f, &g, &sample).unwrap();
        assert!(eps.components.iter().all(QSMorphism::is_iso));
        assert!(eps.components.iter().all(|c| c.inverse().is_some()));
        epsilon_squares += eps.naturality_squares;
        for (_, _, m) in &sample.morphisms {
            assert!(epsilon_square_commutes(m, &f, &g));
        }
    }
    assert!(iota_squares >= 100, "{iota_squares}");
    assert!(epsilon_squares >= 100, "{epsilon_squares}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn restriction_is_associative_and_unital_up_to_coherence(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let stack = random_stack(&mut rng);
        let base = FinSet::range(rng.gen_range(0..=3));
        let obj = random_object(&mut rng, &stack, &base).expect("X is nonempty");
        let f = random_into(&mut rng, &base, 3);
        let g = random_into(&mut rng, f.src(), 3);
        let h = random_into(&mut rng, g.src(), 3);
        prop_assert!(check_associativity(&obj, &f, &g, &h).is_ok());
        prop_assert!(check_unit_coherence(&obj, &f).is_ok());
    }
}

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

use m0n_core::chow::{generic_orbit_class, orbit_class_of_type};
use m0n_core::configurations::set_partitions;
use m0n_core::configurations::{cross_ratio, in_orbit_closure, orbit_form, type_of};
use m0n_core::hilbert::{generic_orbit_hilbert, tree_hilbert};
use m0n_core::json::{
    chow_from_json, chow_to_json, decorated_tree_to_json, signature_from_json, signature_to_json,
    tree_from_json, tree_to_json,
};
use m0n_core::label::range_labels;
use m0n_core::operads::{p_project, signature_of};
use m0n_core::sampling::{random_generic_configuration, random_mobius, rng};
use m0n_core::trees::enumerate_stable_trees;
use m0n_core::{Configuration, Label, LabelSet};

fn random_tree(seed: u64, n: usize) -> m0n_core::trees::StableTree {
    let trees = enumerate_stable_trees(n).unwrap();
    trees.choose(&mut rng(seed)).unwrap().clone()
}

fn random_keep(seed: u64, labels: &LabelSet) -> LabelSet {
    let mut r = rng(seed ^ 0x5eed);
    let mut v: Vec<_> = labels.iter().copied().collect();
    v.shuffle(&mut r);
    let k = r.gen_range(3..=v.len());
    v.into_iter().take(k).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cross_ratio_is_mobius_invariant(seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = random_generic_configuration(&mut r, 4);
        let g = random_mobius(&mut r);
        prop_assert_eq!(cross_ratio(&x).unwrap(), cross_ratio(&g.apply_all(&x)).unwrap());
    }

    #[test]
    fn orbit_form_and_type_are_invariant(seed in any::<u64>(), n in 4usize..=6) {
        let mut r = rng(seed);
        let x = random_generic_configuration(&mut r, n);
        let g = random_mobius(&mut r);
        let gx = g.apply_all(&x);
        prop_assert_eq!(type_of(&x), type_of(&gx));
        prop_assert!(in_orbit_closure(&x, &gx).unwrap());
        let x4 = x.project(&[0, 1, 2, 3]);
        prop_assert_eq!(orbit_form(&x4).unwrap(), orbit_form(&g.apply_all(&x4)).unwrap());
    }

    #[test]
    fn single_collision_is_not_a_limit(seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = random_generic_configuration(&mut r, 5);
        let mut pts = x.points().to_vec();
        pts[4] = pts[3].clone();
        let z = Configuration::new(pts);
        prop_assert!(!in_orbit_closure(&x, &z).unwrap());
    }

    #[test]
    fn stabilization_commutes_with_forgetting_decoration(seed in any::<u64>(), n in 4usize..=7) {
        let t = random_tree(seed, n);
        let d = t.random_decoration(&mut rng(seed));
        let keep = random_keep(seed, &t.markings());
        let s = d.stabilize(&keep).unwrap();
        prop_assert_eq!(s.tree(), t.stabilize(&keep).unwrap());
        prop_assert!(s.stabilize(&keep).unwrap().same_point(&s));
    }

    #[test]
    fn signatures_commute_with_projection(seed in any::<u64>(), n in 4usize..=7) {
        let t = random_tree(seed, n);
        let d = t.random_decoration(&mut rng(seed));
        let keep = random_keep(seed, &t.markings());
        let lhs = signature_of(&d.stabilize(&keep).unwrap()).unwrap();
        let rhs = p_project(&signature_of(&d).unwrap(), &keep).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn tree_invariants_are_constant(seed in any::<u64>(), n in 3usize..=7) {
        let t = random_tree(seed, n);
        prop_assert_eq!(tree_hilbert(&t).unwrap(), generic_orbit_hilbert(n).unwrap());
    }

    #[test]
    fn json_round_trips(seed in any::<u64>(), n in 4usize..=7) {
        let t = random_tree(seed, n);
        prop_assert_eq!(tree_from_json(&tree_to_json(&t)).unwrap().tree(), t.clone());
        let d = t.random_decoration(&mut rng(seed));
        let back = tree_from_json(&decorated_tree_to_json(&d)).unwrap();
        prop_assert_eq!(back.tree(), t);
        let sig = signature_of(&d).unwrap();
        prop_assert_eq!(signature_from_json(&signature_to_json(&sig)).unwrap(), sig);
        let parts = set_partitions(&range_labels(n));
        let p = parts.iter().filter(|p| p.num_parts() >= 3).nth((seed % 7) as usize).unwrap();
        let c = orbit_class_of_type(p).unwrap();
        prop_assert_eq!(chow_from_json(&chow_to_json(&c)).unwrap(), c);
    }

    #[test]
    fn generic_class_is_symmetric(seed in any::<u64>(), n in 3usize..=7) {
        let beta = generic_orbit_class(n).unwrap();
        let mut perm: Vec<Label> = beta.vars().iter().copied().collect();
        perm.shuffle(&mut rng(seed));
        let permuted = beta.relabel(|l| perm[l.0 as usize - 1]);
        prop_assert_eq!(permuted, beta);
    }
}

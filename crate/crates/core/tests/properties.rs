mod common;

use common::{ls, psi_oracle, random_redundancy_tree};
use m0n_core::forest::{eval_redundancy_tree, eval_redundancy_tree_by, prune, sign_of, to_redundancy, to_weighted};
use m0n_core::model::canonicalize_cut;
use m0n_core::oracle::sun_like_value;
use m0n_core::tree::monomial_to_tree_with_pivot;
use m0n_core::{
    classify, eval, eval_tree, monomial_to_tree, oracle_eval, parse_monomial, random_proper_tree, render_monomial,
    tree_to_monomial, Classification, Cut, LabelSet, LoadedTree, Monomial, TreeEdge,
};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn part_from_mask(mask: u32, n: u32) -> LabelSet {
    (1..=n).filter(|&l| mask & (1 << (l - 1)) != 0).collect()
}

/// A cut from an arbitrary mask, or `None` when a side is too small.
fn cut_from_mask(mask: u32, n: u32) -> Option<Cut> {
    let part = part_from_mask(mask & ((1 << n) - 1), n);
    Cut::from_part(part, n).ok()
}

fn tree_strategy(max_n: u32) -> impl Strategy<Value = LoadedTree> {
    (3..=max_n, any::<u64>()).prop_map(|(n, seed)| random_proper_tree(n, seed))
}

fn permuted(t: &LoadedTree, seed: u64) -> LoadedTree {
    let n = t.ambient_n();
    let mut perm: Vec<u32> = (1..=n).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let labels = t.all_labels().iter().map(|h| h.iter().map(|l| perm[l as usize - 1]).collect()).collect();
    LoadedTree::new(n, labels, t.edges().to_vec()).unwrap()
}

#[test]
fn non_crossing_iff_nested_parts_exhaustive() {
    for n in 4..=8 {
        let cuts = common::all_cuts(n);
        for a in &cuts {
            for b in &cuts {
                let nested = a.parts().iter().any(|p| b.parts().iter().any(|q| p.is_subset(q)));
                assert_eq!(!a.crosses(b).unwrap(), nested, "{a:?} {b:?}");
            }
        }
    }
}

#[test]
fn clever_trees_have_value_one_by_psi_classes() {
    for n in 4..=7 {
        for set in common::compatible_sets(n, n as usize - 3).iter().take(200) {
            let m = Monomial::from_factors(n, set.iter().map(|c| (c.clone(), 1))).unwrap();
            let t = monomial_to_tree(&m).unwrap();
            assert_eq!(psi_oracle(&t), BigInt::from(1));
        }
    }
}

#[test]
fn psi_oracle_matches_hand_values() {
    let t = monomial_to_tree(&parse_monomial(common::EXAMPLE).unwrap()).unwrap();
    assert_eq!(psi_oracle(&t), BigInt::from(2));
    assert_eq!(psi_oracle(&common::minus_32_tree()), BigInt::from(-32));
    let t = monomial_to_tree(&parse_monomial("n=6; d(1,2,3|4,5,6)^3").unwrap()).unwrap();
    assert_eq!(psi_oracle(&t), BigInt::from(2));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn crossing_is_symmetric_and_matches_four_intersections(n in 4u32..=12, a in any::<u32>(), b in any::<u32>()) {
        if let (Some(x), Some(y)) = (cut_from_mask(a, n), cut_from_mask(b, n)) {
            let four = x.parts().iter().all(|p| y.parts().iter().all(|q| p.intersects(q)));
            prop_assert_eq!(x.crosses(&y).unwrap(), four);
            prop_assert_eq!(x.crosses(&y).unwrap(), y.crosses(&x).unwrap());
            prop_assert!(!x.crosses(&x).unwrap());
        }
    }

    #[test]
    fn canonicalize_is_idempotent(n in 4u32..=12, a in any::<u32>()) {
        if let Some(c) = cut_from_mask(a, n) {
            let swapped = canonicalize_cut(c.second().clone(), c.first().clone(), n).unwrap();
            prop_assert_eq!(&swapped, &c);
            prop_assert!(c.first().contains(1));
            let again = canonicalize_cut(c.first().clone(), c.second().clone(), n).unwrap();
            prop_assert_eq!(again, c);
        }
    }

    #[test]
    fn render_parse_round_trip(n in 4u32..=12, masks in prop::collection::vec((any::<u32>(), 1u32..=4), 0..6)) {
        let factors: Vec<(Cut, u32)> = masks.iter().filter_map(|&(m, e)| cut_from_mask(m, n).map(|c| (c, e))).collect();
        let m = Monomial::from_factors(n, factors).unwrap();
        let text = render_monomial(&m);
        let back = parse_monomial(&text).unwrap();
        prop_assert_eq!(&back, &m);
        prop_assert_eq!(render_monomial(&back), text);
    }

    #[test]
    fn tree_monomial_bijection(t in tree_strategy(14)) {
        let m = tree_to_monomial(&t).unwrap();
        prop_assert!(matches!(classify(&m), Classification::Clever | Classification::TreeMonomial));
        let back = monomial_to_tree(&m).unwrap();
        prop_assert!(back.is_isomorphic(&t));
        prop_assert_eq!(tree_to_monomial(&back).unwrap(), m);
    }

    #[test]
    fn pivot_choice_does_not_change_tree(t in tree_strategy(14)) {
        let m = tree_to_monomial(&t).unwrap();
        let base = monomial_to_tree(&m).unwrap();
        for (pivot, _) in m.factors() {
            prop_assert!(monomial_to_tree_with_pivot(&m, pivot).unwrap().is_isomorphic(&base));
        }
    }

    #[test]
    fn forest_and_oracle_match_psi_classes(t in tree_strategy(11)) {
        let psi = psi_oracle(&t);
        prop_assert_eq!(eval_tree(&t).unwrap(), psi.clone());
        prop_assert_eq!(oracle_eval(&t).unwrap(), psi);
    }

    #[test]
    fn eval_of_monomial_equals_eval_of_tree(t in tree_strategy(14)) {
        let m = tree_to_monomial(&t).unwrap();
        prop_assert_eq!(eval(&m).unwrap(), eval_tree(&t).unwrap());
    }

    #[test]
    fn value_is_invariant_under_relabeling(t in tree_strategy(14), seed in any::<u64>()) {
        prop_assert_eq!(eval_tree(&permuted(&t, seed)).unwrap(), eval_tree(&t).unwrap());
    }

    #[test]
    fn weight_identity_and_sign_law(t in tree_strategy(16)) {
        let wt = to_weighted(&t);
        prop_assert_eq!(wt.vertex_weight_sum(), wt.edge_weight_sum());
        let v = eval_tree(&t).unwrap();
        let s = sign_of(&wt).unwrap();
        if !v.is_zero() {
            prop_assert_eq!(v.is_positive(), s == 1);
        }
    }

    #[test]
    fn leaf_order_does_not_matter(k in 1usize..25, w in 0u64..6, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rt = random_redundancy_tree(&mut rng, k, w);
        let base = eval_redundancy_tree(&rt);
        for _ in 0..10 {
            let v = eval_redundancy_tree_by(&rt, |leaves| rng.gen_range(0..leaves.len()));
            prop_assert_eq!(&v, &base);
        }
    }

    #[test]
    fn pruning_never_changes_value(t in tree_strategy(14)) {
        let rt = to_redundancy(&to_weighted(&t));
        let direct = eval_redundancy_tree(&rt);
        let forest = prune(&rt);
        let product = forest.trees.iter().map(eval_redundancy_tree).product::<num_bigint::BigUint>();
        prop_assert_eq!(direct, product);
    }

    #[test]
    fn sun_like_is_multinomial(mults in prop::collection::vec(1u64..5, 2..6)) {
        // star whose leaves carry 2 labels each; the centre takes the rest
        let k = mults.len();
        let total: u64 = mults.iter().sum();
        prop_assume!(total + 3 >= 2 * k as u64);
        let center = (total + 3) as usize - 2 * k;
        let n = (center + 2 * k) as u32;
        let mut labels = vec![(1..=center as u32).collect::<LabelSet>()];
        let mut edges = Vec::new();
        for (i, &m) in mults.iter().enumerate() {
            let first = (center + 2 * i) as u32 + 1;
            labels.push(ls(&[first, first + 1]));
            edges.push(TreeEdge::new(0, i + 1, m));
        }
        let t = LoadedTree::new(n, labels, edges).unwrap();
        prop_assert_eq!(BigInt::from(sun_like_value(&t).unwrap()), psi_oracle(&t).abs());
    }
}

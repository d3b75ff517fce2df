mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use bratteli::groups::{small_group_catalog, FiniteGroup, GroupElement};
use bratteli::labelling::{
    apply_cohomology, check_cohomologous, check_loops_lift, coboundary_labelling, skew_product, CohomologyVerdict,
    Labelling,
};
use bratteli::substitution::{factor_closure, toeplitz_window_check, Substitution};
use bratteli::tripling::triple_diagram;
use bratteli::{Path, Step};
use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in all_permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

#[test]
fn symmetric_tables_match_permutation_composition() {
    for n in 1..=4 {
        let perms = all_permutations(n);
        let g = FiniteGroup::from_permutations(&perms, None).unwrap();
        let sym = FiniteGroup::symmetric(n).unwrap();
        assert_eq!(g.order(), sym.order());
        for a in 0..perms.len() {
            for b in 0..perms.len() {
                let c = compose(&perms[a], &perms[b]);
                assert_eq!(perms[g.op(GroupElement(a), GroupElement(b)).0], c);
            }
        }
        // The symmetric table is isomorphic to the composition table via element names.
        let s3 = sym.names().len();
        assert_eq!(s3, perms.len());
    }
}

#[test]
fn catalog_groups_are_groups() {
    for g in small_group_catalog() {
        let id = g.identity();
        for a in g.elements() {
            assert_eq!(g.op(a, g.inv(a)), id);
            for b in g.elements() {
                for c in g.elements() {
                    assert_eq!(g.op(g.op(a, b), c), g.op(a, g.op(b, c)));
                }
            }
        }
    }
}

#[test]
fn path_counts_and_enumeration_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..60 {
        let depth = rng.gen_range(1..=4);
        let o = random_diagram(&mut rng, depth, 3, 3);
        let d = o.diagram();
        for m in 1..=depth {
            for v in 0..d.level_size(m) {
                let oracle = brute_force_paths(&o, 0, m, v);
                assert_eq!(d.path_count(0, m, v), oracle.len() as u128);
                assert_eq!(d.heights(m)[v], oracle.len() as u128);
                let listed: BTreeSet<Path> = d.enumerate_paths(0, m, v).unwrap().into_iter().collect();
                assert_eq!(listed, oracle.iter().cloned().collect());
                for (i, p) in oracle.iter().enumerate() {
                    assert_eq!(o.floor_rank(p), i as u128);
                }
            }
        }
    }
}

#[test]
fn skew_products_lift_paths_by_the_label_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let catalog: Vec<_> = small_group_catalog().into_iter().map(Arc::new).collect();
    for _ in 0..40 {
        let o = random_diagram(&mut rng, 3, 3, 2);
        let d = o.diagram();
        let g = catalog[rng.gen_range(0..catalog.len())].clone();
        let k = g.order();
        let lam = Labelling::from_fn(d, g.clone(), |_, _| GroupElement(rng.gen_range(0..k))).unwrap();
        let skew = skew_product(&o, &lam).unwrap();
        let up = skew.total.diagram();
        for n in 1..=3 {
            assert_eq!(up.level_size(n), d.level_size(n) * k);
            assert_eq!(up.edges(n).len(), d.edges(n).len() * k);
        }
        assert!(skew.projection.check_unique_path_lifting(up, d, 3).holds());
        for v in 0..d.level_size(3) {
            for p in brute_force_paths(&o, 1, 3, v) {
                for h in g.elements() {
                    let lift = skew.projection.lift_path(up, d, &p, skew.vertex_index(v, h)).unwrap();
                    let src = up.path_source(&lift).unwrap();
                    let expected = d.path_source(&p).unwrap() * k + g.op(h, lam.path_label(&p)).0;
                    assert_eq!(src, expected);
                }
            }
        }
        for a in g.elements() {
            let gamma = skew.apply_action(a);
            assert_eq!(gamma.then(&skew.projection), skew.projection.clone().then(&d.identity_morphism()));
        }
    }
}

#[test]
fn telescoping_preserves_path_labels() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let g = s3();
    for _ in 0..20 {
        let o = random_diagram(&mut rng, 4, 2, 2);
        let d = o.diagram();
        let lam = Labelling::from_fn(d, g.clone(), |_, _| GroupElement(rng.gen_range(0..6))).unwrap();
        let t = d.telescope(&[0, 2, 4]).unwrap();
        let tl = lam.telescope(&t).unwrap();
        for v in 0..d.level_size(4) {
            assert_eq!(t.diagram.path_count(0, 2, v), d.path_count(0, 4, v));
            for p in t.diagram.enumerate_paths(0, 2, v).unwrap() {
                let original: Vec<usize> = p
                    .edges
                    .iter()
                    .enumerate()
                    .flat_map(|(j, &e)| t.paths[j + 1][e].edges.clone())
                    .collect();
                assert_eq!(tl.path_label(&p), lam.path_label(&Path::new(0, original)));
            }
        }
    }
}

#[test]
fn cohomologous_labellings_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let catalog: Vec<_> = small_group_catalog().into_iter().map(Arc::new).collect();
    for _ in 0..30 {
        let o = random_diagram(&mut rng, 4, 3, 2);
        let d = o.diagram();
        let g = catalog[rng.gen_range(1..catalog.len())].clone();
        let k = g.order();
        let beta: Vec<Vec<GroupElement>> = (0..=4)
            .map(|n| (0..d.level_size(n)).map(|_| GroupElement(rng.gen_range(0..k))).collect())
            .collect();
        let lam = Labelling::from_fn(d, g.clone(), |_, _| GroupElement(rng.gen_range(0..k))).unwrap();
        // μ(e) = β(r)⁻¹ λ(e) β(s)
        let mu = Labelling::from_fn(d, g.clone(), |n, e| {
            let edge = d.edge(n, e);
            g.op(g.op(g.inv(beta[n][edge.range]), lam.label(n, e)), beta[n - 1][edge.source])
        })
        .unwrap();
        assert!(matches!(
            check_cohomologous(d, &lam, &mu, Some(&beta), 4).unwrap(),
            CohomologyVerdict::Verified { .. }
        ));
        assert!(matches!(
            check_cohomologous(d, &lam, &mu, None, 4).unwrap(),
            CohomologyVerdict::Verified { .. }
        ));
        let phi = apply_cohomology(d, &lam, &mu, &beta, 4).unwrap();
        let bl = skew_product(&o, &lam).unwrap();
        let bm = skew_product(&o, &mu).unwrap();
        phi.check(bl.total.diagram(), bm.total.diagram(), 4).unwrap();
        assert!(phi.is_bijective(bl.total.diagram(), bm.total.diagram(), 4));
        assert_eq!(
            check_loops_lift(&o, &lam, 4).unwrap().holds(),
            check_loops_lift(&o, &mu, 4).unwrap().holds()
        );

        let cob = coboundary_labelling(d, g.clone(), &beta).unwrap();
        let trivial = Labelling::trivial(d, g.clone());
        match check_cohomologous(d, &trivial, &cob, None, 4).unwrap() {
            CohomologyVerdict::Verified { beta: found, .. } => {
                for (n, level) in found.iter().enumerate().skip(1) {
                    for (v, &b) in level.iter().enumerate() {
                        for e in d.incoming(n, v) {
                            let s = d.edge(n, *e).source;
                            assert_eq!(g.op(b, cob.label(n, *e)), g.op(trivial.label(n, *e), found[n - 1][s]));
                        }
                    }
                }
            }
            other => panic!("coboundary not recognised: {other:?}"),
        }
    }
}

/// Consecutive triples of the level-`n` word under each level-`top` tower.
fn word_triples(o: &bratteli::OrderedBratteliDiagram, n: usize, top: usize) -> BTreeSet<[usize; 3]> {
    let d = o.diagram();
    let mut out = BTreeSet::new();
    for y in 0..d.level_size(top) {
        let word: Vec<usize> = brute_force_paths(o, n, top, y)
            .iter()
            .map(|p| d.path_source(p).unwrap())
            .collect();
        out.extend(word.windows(3).map(|w| [w[0], w[1], w[2]]));
    }
    out
}

#[test]
fn finite_tripling_matches_tower_words() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let mut built = 0;
    for _ in 0..60 {
        let o = random_diagram(&mut rng, 4, 3, 4);
        let t = match triple_diagram(&o, 4) {
            Ok(t) => t,
            Err(e) => {
                assert!(e.to_string().contains("has no vertices"), "{e}");
                continue;
            }
        };
        built += 1;
        assert!(t.diagram.diagram().validate().is_valid());
        assert!(t.projection.check_unique_path_lifting(t.diagram.diagram(), o.diagram(), 3).holds());
        let witnessed = word_triples(&o, 3, 4);
        let kept: BTreeSet<[usize; 3]> = t.triples[3].iter().copied().collect();
        assert_eq!(kept, witnessed);
        for n in 1..3 {
            let all: BTreeSet<[usize; 3]> = (n + 1..=4).flat_map(|top| word_triples(&o, n, top)).collect();
            assert!(t.triples[n].iter().all(|x| all.contains(x)));
        }
    }
    assert!(built >= 20, "{built}");
}

#[test]
fn factor_closure_matches_iterated_words() {
    let subs = [
        Substitution::from_rules(&["X -> X X Y", "Y -> X Y Y"]).unwrap(),
        Substitution::from_rules(&["a -> a b", "b -> a"]).unwrap(),
        Substitution::from_rules(&["a -> a b c", "b -> c a", "c -> b"]).unwrap(),
    ];
    for s in subs {
        let (f2, f3) = factor_closure(&s);
        let mut w2 = BTreeSet::new();
        let mut w3 = BTreeSet::new();
        for a in 0..s.len() {
            let mut word = vec![a];
            for _ in 0..8 {
                word = s.apply(&word);
                w2.extend(word.windows(2).map(|x| [x[0], x[1]]));
                w3.extend(word.windows(3).map(|x| [x[0], x[1], x[2]]));
            }
        }
        assert_eq!(f2, w2);
        assert_eq!(f3, w3);
    }
}

#[test]
fn successors_follow_sorted_enumeration_on_stationary_blocks() {
    let sigma = xxy();
    let o = bratteli::substitution::diagram_from_substitution(&sigma);
    for m in 2..=5 {
        for v in 0..2 {
            let paths = brute_force_paths(&o, 1, m, v);
            for w in paths.windows(2) {
                assert_eq!(o.successor_path(&w[0]).unwrap(), Step::Next(w[1].clone()));
            }
        }
    }
}

fn naive_periods(seq: &[u8], bound: usize) -> Vec<Option<usize>> {
    (0..seq.len())
        .map(|m| {
            (1..=bound).find(|&p| {
                let mut i = m % p;
                while i < seq.len() {
                    if seq[i] != seq[m] {
                        return false;
                    }
                    i += p;
                }
                true
            })
        })
        .collect()
}

proptest! {
    #[test]
    fn toeplitz_periods_match_naive(seq in proptest::collection::vec(0u8..3, 24..80), bound in 1usize..12) {
        let r = toeplitz_window_check(&seq, bound).unwrap();
        prop_assert_eq!(r.periods, naive_periods(&seq, bound));
    }

    #[test]
    fn odometer_relation_is_symmetric(gi in 0usize..14, a in 0usize..8, b in 0usize..8) {
        let catalog = small_group_catalog();
        let g = &catalog[gi];
        let (s, t) = (GroupElement(a % g.order()), GroupElement(b % g.order()));
        prop_assert_eq!(g.check_odometer_relation(s, t), g.check_odometer_relation(t, s));
    }

    #[test]
    fn words_fold_left_to_right(gi in 0usize..14, word in proptest::collection::vec(0usize..8, 0..10)) {
        let catalog = small_group_catalog();
        let g = &catalog[gi];
        let word: Vec<GroupElement> = word.into_iter().map(|x| GroupElement(x % g.order())).collect();
        let expected = word.iter().fold(g.identity(), |acc, &x| g.op(acc, x));
        prop_assert_eq!(g.evaluate_word(&word).unwrap(), expected);
    }

    #[test]
    fn random_diagrams_validate(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let o = random_diagram(&mut rng, 3, 4, 4);
        prop_assert!(o.diagram().validate().is_valid());
        let truncated = o.diagram().truncate(2).unwrap();
        prop_assert_eq!(truncated.declared_depth(), 2);
    }
}

use num_traits::{Signed, Zero};
use posigraph::certificates::{
    find_stable_involution, odd_edge_certificate, random_linear_triangle_free, tensorize, grid_classifier,
};
use posigraph::decomposition::{decompose_seeded, induced_sym, reconstruct, rescale_odd};
use posigraph::density::{density_bip, density_sym, SymStepFunction};
use posigraph::homomorphism::{
    automorphisms, count_endomorphisms, count_homs, enumerate_homs, is_homomorphism, odd_edges,
    weighted_hom_sum, VertexMap,
};
use posigraph::oracle;
use posigraph::rational::{int, Rational};
use posigraph::structures::io::{parse, serialize};
use posigraph::structures::{box_product, grid, levi, Hypergraph, WeightedHypergraph};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small random instance: uniformity, vertex count and edge count drawn
/// from the given ranges.
fn small(seed: u64, r: usize, max_n: usize, max_m: usize) -> Hypergraph {
    let mut g = rng(seed);
    let n = rand::Rng::gen_range(&mut g, r..=max_n.max(r));
    let m = rand::Rng::gen_range(&mut g, 1..=max_m);
    oracle::random_hypergraph(&mut g, r, n, m)
}

fn permutation(seed: u64, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(&mut rng(seed));
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hom_counts_match_oracle(seed in any::<u64>(), r in 2usize..=3) {
        let h = small(seed, r, 4, 3);
        let g = small(seed ^ 1, r, 4, 4);
        prop_assume!(oracle::map_count(g.n_vertices(), h.n_vertices()).unwrap() <= 1_000_000);
        let oracle_count = oracle::count_homs(&h, &g);
        prop_assert_eq!(count_homs(&h, &g).unwrap(), oracle_count);
        prop_assert_eq!(enumerate_homs(&h, &g).unwrap().len() as u128, oracle_count);
    }

    #[test]
    fn unit_weights_count_homomorphisms(seed in any::<u64>(), r in 2usize..=3) {
        let h = small(seed, r, 4, 3);
        let multi = small(seed ^ 2, r, 5, 5);
        // Parallel target edges add their weights, so compare on simple targets.
        let g = Hypergraph::new(r, multi.n_vertices(), multi.edge_multiset().into_keys().collect()).unwrap();
        let t = WeightedHypergraph::uniform(g.clone(), int(1));
        let sum = weighted_hom_sum(&h, &t).unwrap();
        prop_assert_eq!(sum.value, Rational::from_integer(count_homs(&h, &g).unwrap().into()));
    }

    #[test]
    fn weighted_sum_matches_oracle(seed in any::<u64>(), r in 2usize..=3) {
        let h = small(seed, r, 4, 3);
        let t = oracle::random_weighted(&mut rng(seed ^ 3), r, 4, 4);
        prop_assert_eq!(weighted_hom_sum(&h, &t).unwrap().value, oracle::weighted_hom_sum(&h, &t));
    }

    #[test]
    fn weighted_sum_bridges_to_density(seed in any::<u64>(), r in 2usize..=3) {
        let h = small(seed, r, 4, 3);
        let t = oracle::random_weighted(&mut rng(seed ^ 4), r, 4, 3);
        let sum = weighted_hom_sum(&h, &t).unwrap().value;
        let d = density_sym(&h, &tensorize(&t)).unwrap();
        let scale = Rational::from_integer(num_traits::pow(4.into(), h.n_vertices()));
        prop_assert_eq!(d * scale, sum);
    }

    #[test]
    fn density_sym_matches_oracle(seed in any::<u64>(), r in 2usize..=3, parts in 1usize..=3) {
        let h = small(seed, r, 4, 3);
        let f = oracle::random_sym(&mut rng(seed ^ 5), r, parts);
        prop_assert_eq!(density_sym(&h, &f).unwrap(), oracle::density_sym(&h, &f));
    }

    #[test]
    fn density_bip_matches_oracle(seed in any::<u64>(), rows in 1usize..=3, cols in 1usize..=3) {
        let h = small(seed, 3, 5, 2);
        let b = levi(&h);
        let f = oracle::random_bip(&mut rng(seed ^ 6), rows, cols);
        prop_assert_eq!(density_bip(&b, &f).unwrap(), oracle::density_bip(&b, &f));
    }

    #[test]
    fn relabeling_and_part_permutation(seed in any::<u64>(), r in 2usize..=3, parts in 1usize..=3) {
        let h = small(seed, r, 5, 4);
        let f = oracle::random_sym(&mut rng(seed ^ 7), r, parts);
        let base = density_sym(&h, &f).unwrap();
        let relabeled = h.relabel(&permutation(seed, h.n_vertices())).unwrap();
        prop_assert_eq!(&density_sym(&relabeled, &f).unwrap(), &base);
        let permuted = f.permute_parts(&permutation(seed ^ 8, parts)).unwrap();
        prop_assert_eq!(density_sym(&h, &permuted).unwrap(), base);
    }

    #[test]
    fn disjoint_unions_multiply(seed in any::<u64>(), r in 2usize..=3) {
        let a = small(seed, r, 4, 2);
        let b = small(seed ^ 9, r, 4, 2);
        let f = oracle::random_sym(&mut rng(seed ^ 10), r, 2);
        let union = a.disjoint_union(&b).unwrap();
        prop_assert_eq!(
            density_sym(&union, &f).unwrap(),
            density_sym(&a, &f).unwrap() * density_sym(&b, &f).unwrap()
        );
        let g = small(seed ^ 11, r, 4, 3);
        prop_assert_eq!(
            count_homs(&union, &g).unwrap(),
            count_homs(&a, &g).unwrap() * count_homs(&b, &g).unwrap()
        );
    }

    #[test]
    fn rank_one_even_degrees_are_nonnegative(seed in any::<u64>(), parts in 1usize..=4) {
        let mut g = rng(seed);
        let v: Vec<Rational> = (0..parts).map(|_| oracle::random_rational(&mut g, 5, 3)).collect();
        let f = SymStepFunction::from_fn(3, parts, |idx| idx.iter().map(|&i| v[i].clone()).product()).unwrap();
        for h in [grid(3).unwrap(), Hypergraph::new(3, 3, vec![vec![0, 1, 2], vec![0, 1, 2]]).unwrap()] {
            let expected: Rational = h
                .degrees()
                .iter()
                .map(|&d| v.iter().map(|x| num_traits::pow(x.clone(), d)).sum::<Rational>() / Rational::from_integer(parts.into()))
                .product();
            let d = density_sym(&h, &f).unwrap();
            prop_assert_eq!(&d, &expected);
            prop_assert!(!d.is_negative());
        }
    }

    #[test]
    fn homomorphisms_compose(seed in any::<u64>()) {
        let h = small(seed, 2, 4, 3);
        let g = small(seed ^ 12, 2, 4, 4);
        let k = small(seed ^ 13, 2, 4, 5);
        let first = enumerate_homs(&h, &g).unwrap();
        let second = enumerate_homs(&g, &k).unwrap();
        for p in first.iter().take(6) {
            for s in second.iter().take(6) {
                let c = p.then(s).unwrap();
                prop_assert!(is_homomorphism(&h, &k, c.image()));
            }
        }
    }

    #[test]
    fn odd_edge_sum_is_minus_endomorphisms(seed in any::<u64>()) {
        let h = small(seed, 3, 5, 3);
        let has_odd = odd_edges(&h).iter().any(|&b| b);
        match odd_edge_certificate(&h).unwrap() {
            Some(cert) => {
                prop_assert!(has_odd);
                prop_assert_eq!(cert.sum.clone(), -Rational::from_integer(count_endomorphisms(&h).into()));
                prop_assert!(cert.density.is_negative());
                cert.verify().unwrap();
            }
            None => prop_assert!(!has_odd),
        }
    }

    #[test]
    fn serialization_round_trip(seed in any::<u64>(), r in 1usize..=5, n in 5usize..=30, m in 0usize..=12) {
        let h = oracle::random_hypergraph(&mut rng(seed), r, n, m);
        prop_assert_eq!(parse(&serialize(&h)).unwrap().graph, h);
        let f = oracle::random_sym(&mut rng(seed), r.min(3), 2);
        prop_assert_eq!(SymStepFunction::parse(&f.to_json()).unwrap(), f);
    }

    #[test]
    fn box_product_sizes(seed in any::<u64>(), r in 2usize..=3) {
        let a = small(seed, r, 5, 4);
        let b = small(seed ^ 14, r, 5, 4);
        let p = box_product(&a, &b).unwrap().graph;
        prop_assert_eq!(p.n_vertices(), a.n_vertices() * b.n_vertices());
        prop_assert_eq!(p.n_edges(), b.n_vertices() * a.n_edges() + a.n_vertices() * b.n_edges());
        prop_assert_eq!(levi(&a).edges().len(), r * a.n_edges());
    }

    #[test]
    fn forward_transfer_identity(seed in any::<u64>(), rows in 1usize..=3, cols in 1usize..=3) {
        let h = small(seed, 3, 5, 2);
        let f = oracle::random_bip(&mut rng(seed ^ 15), rows, cols);
        let a = induced_sym(&f, 3).unwrap();
        prop_assert_eq!(density_bip(&levi(&h), &f).unwrap(), density_sym(&h, &a).unwrap());
    }

    #[test]
    fn decomposition_round_trip(seed in any::<u64>(), n in 1usize..=3) {
        let a = oracle::random_sym(&mut rng(seed), 3, n);
        let d = decompose_seeded(&a, seed).unwrap();
        prop_assert_eq!(&reconstruct(&d), &a);
        let again = decompose_seeded(&reconstruct(&d), seed).unwrap();
        prop_assert_eq!(reconstruct(&again), a.clone());
        let rescaled = rescale_odd(&d, 128).unwrap();
        let h = small(seed, 3, 4, 2);
        let enclosure = posigraph::density::density_bip_interval(&levi(&h), &rescaled.to_bip());
        prop_assert!(enclosure.contains(&density_sym(&h, &a).unwrap()));
    }
}

#[test]
fn automorphisms_form_a_group() {
    for h in [grid(3).unwrap(), posigraph::structures::fano(), posigraph::structures::cycle(5).unwrap()] {
        let auts = automorphisms(&h);
        let set: std::collections::BTreeSet<VertexMap> = auts.iter().cloned().collect();
        assert!(set.contains(&VertexMap::identity(h.n_vertices())));
        for a in &auts {
            assert!(set.contains(&a.inverse().unwrap()));
            for b in &auts {
                assert!(set.contains(&a.then(b).unwrap()));
            }
        }
    }
}

#[test]
fn involution_soundness_on_random_steps() {
    let graphs = [
        posigraph::structures::cycle(4).unwrap(),
        posigraph::structures::double(&grid(3).unwrap()),
    ];
    for h in graphs {
        assert!(find_stable_involution(&h).is_some());
        let mut g = rng(99);
        for parts in 1..=3 {
            for _ in 0..10 {
                let f = oracle::random_sym(&mut g, h.r(), parts);
                assert!(!density_sym(&h, &f).unwrap().is_negative());
            }
        }
    }
}

#[test]
fn classifier_has_no_violations_on_random_inputs() {
    for seed in 0..6 {
        let g = random_linear_triangle_free(3, 10, seed).unwrap();
        let stats = grid_classifier(&g, 3).unwrap();
        assert!(stats.violations.is_empty());
        assert_eq!(stats.total, stats.single_edge + stats.iso_to_grid + stats.contains_triangle);
        assert!(!stats.total.is_zero() || g.n_edges() == 0);
    }
}

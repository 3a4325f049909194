use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wlcc_core::acceptance::{irredundant_instances, random_colored_graph};
use wlcc_core::census::shrikhande_rook_pair;
use wlcc_core::generators::{
    cyclic_pls, example_two_triangles, fano, pls_to_config, skew_config, t16, PartialLinearSpace, SimpleGraph,
};
use wlcc_core::irredundant::{decide_separable_irredundant, saa_order_log2, scac_order_log2_all_f4};
use wlcc_core::oracle::{
    closure_oracle, enumerate_strict_algebraic_automorphisms, enumerate_strict_combinatorial_automorphisms,
    graph_iso, separable_oracle_irredundant,
};
use wlcc_core::structure::dcc;
use wlcc_core::{CoherentConfiguration, ColoredSquareMatrix, Error, Precondition, Rainbow};

fn config(d: &PartialLinearSpace) -> CoherentConfiguration {
    pls_to_config(d, &BTreeMap::new()).unwrap()
}

fn induced_maps(c: &CoherentConfiguration) -> BTreeSet<Vec<usize>> {
    enumerate_strict_combinatorial_automorphisms(c).unwrap().into_iter().map(|(_, m)| m).collect()
}

fn algebraic_maps(c: &CoherentConfiguration) -> BTreeSet<Vec<usize>> {
    enumerate_strict_algebraic_automorphisms(c).unwrap().into_iter().map(|a| a.class_map).collect()
}

fn assert_iso(g: &ColoredSquareMatrix, h: &ColoredSquareMatrix, phi: &[usize]) {
    for u in 0..g.n() {
        for v in 0..g.n() {
            assert_eq!(g.get(u, v), h.get(phi[u], phi[v]));
        }
    }
}

#[test]
fn closure_oracle_bounds() {
    let big = ColoredSquareMatrix::from_fn(17, |u, v| (u != v) as u32);
    let r = Rainbow::new(big).unwrap();
    assert!(matches!(closure_oracle(&r), Err(Error::Precondition(Precondition::SizeTooLarge(17)))));
}

#[test]
fn closure_oracle_refines_a_path() {
    // path 0 - 1 - 2 with one vertex color: ends and middle separate
    let g = ColoredSquareMatrix::from_rows(&[vec![0, 1, 2], vec![1, 0, 1], vec![2, 1, 0]]);
    let out = closure_oracle(&Rainbow::new(g).unwrap()).unwrap();
    assert_eq!(out.get(0, 0), out.get(2, 2));
    assert_ne!(out.get(0, 0), out.get(1, 1));
}

#[test]
fn algebraic_count_is_two_to_saa() {
    for c in [t16(), example_two_triangles()] {
        let all = enumerate_strict_algebraic_automorphisms(&c).unwrap();
        assert_eq!(all.len(), 1 << saa_order_log2(&c).unwrap());
        assert!(all.iter().any(|a| a.switched.is_empty() && a.class_map == (0..c.num_classes()).collect::<Vec<_>>()));
    }
}

#[test]
fn single_switch_inside_triangle_is_not_algebraic() {
    let c = example_two_triangles();
    let h = dcc(&c).unwrap();
    let triangles: Vec<&Vec<usize>> = h.hyperedges.iter().filter(|m| m.len() == 3).collect();
    assert_eq!(triangles.len(), 2);
    let all = enumerate_strict_algebraic_automorphisms(&c).unwrap();
    for t in triangles {
        let edges: BTreeSet<(usize, usize)> = [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])].into();
        for a in &all {
            let inside = a.switched.iter().filter(|e| edges.contains(e)).count();
            assert!(inside == 0 || inside == 2);
        }
    }
}

#[test]
fn combinatorial_count_is_four_to_the_fibers() {
    for c in [t16(), example_two_triangles(), config(&fano())] {
        let all = enumerate_strict_combinatorial_automorphisms(&c).unwrap();
        assert_eq!(all.len(), 1 << (2 * c.num_fibers()));
    }
}

#[test]
fn quotient_of_induced_maps() {
    for c in [t16(), example_two_triangles(), skew_config(&SimpleGraph::complete_bipartite(3, 3)).unwrap()] {
        let scac = scac_order_log2_all_f4(&c).unwrap();
        assert_eq!(induced_maps(&c).len(), 1 << (2 * c.num_fibers() - scac));
    }
}

#[test]
fn oracle_verdicts() {
    assert!(!separable_oracle_irredundant(&t16()).unwrap());
    assert!(separable_oracle_irredundant(&skew_config(&SimpleGraph::cycle(5)).unwrap()).unwrap());
    assert!(separable_oracle_irredundant(&example_two_triangles()).unwrap());
}

#[test]
fn oracle_bounds() {
    match enumerate_strict_algebraic_automorphisms(&config(&fano())) {
        Err(Error::Precondition(Precondition::TooManyInterspaces(21))) => {}
        other => panic!("unexpected {other:?}"),
    }
    match enumerate_strict_combinatorial_automorphisms(&config(&cyclic_pls(10).unwrap())) {
        Err(Error::Precondition(Precondition::TooManyFibers(10))) => {}
        other => panic!("unexpected {other:?}"),
    }
    let redundant = CoherentConfiguration::from_matrix(&ColoredSquareMatrix::from_rows(&[vec![0, 2], vec![3, 1]])).unwrap();
    assert!(matches!(
        enumerate_strict_algebraic_automorphisms(&redundant),
        Err(Error::Precondition(Precondition::NotIrredundant(_)))
    ));
}

#[test]
fn shrikhande_and_rook_are_not_isomorphic() {
    let p = shrikhande_rook_pair();
    assert!(graph_iso(&p.shrikhande, &p.rook, true).unwrap().is_none());
    assert!(graph_iso(&p.shrikhande, &p.rook, false).unwrap().is_none());
    let phi = graph_iso(&p.rook, &p.rook, true).unwrap().unwrap();
    assert_iso(&p.rook, &p.rook, phi.forward());
}

#[test]
fn iso_bounds_and_sizes() {
    let a = ColoredSquareMatrix::from_fn(41, |u, v| (u != v) as u32);
    assert!(graph_iso(&a, &a, true).is_err());
    let b = ColoredSquareMatrix::from_fn(3, |u, v| (u != v) as u32);
    let c = ColoredSquareMatrix::from_fn(4, |u, v| (u != v) as u32);
    assert!(graph_iso(&b, &c, true).unwrap().is_none());
}

#[test]
fn ignoring_vertex_colors_allows_swapping_them() {
    let g = ColoredSquareMatrix::from_rows(&[vec![0, 2, 2], vec![2, 1, 3], vec![2, 3, 1]]);
    let h = ColoredSquareMatrix::from_rows(&[vec![1, 2, 3], vec![2, 0, 2], vec![3, 2, 1]]);
    assert!(graph_iso(&g, &h, false).unwrap().is_some());
    let g2 = ColoredSquareMatrix::from_rows(&[vec![0, 2, 2], vec![2, 1, 3], vec![2, 3, 1]]);
    let h2 = ColoredSquareMatrix::from_rows(&[vec![1, 2, 2], vec![2, 0, 3], vec![2, 3, 0]]);
    assert!(graph_iso(&g2, &h2, true).unwrap().is_none());
    assert!(graph_iso(&g2, &h2, false).unwrap().is_some());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn relabeled_graphs_are_isomorphic(seed in any::<u64>(), n in 1usize..=24, perm in any::<u64>()) {
        let g = random_colored_graph(&mut ChaCha8Rng::seed_from_u64(seed), n, 4, 2);
        let mut p: Vec<usize> = (0..n).collect();
        p.shuffle(&mut ChaCha8Rng::seed_from_u64(perm));
        let h = g.permute(&p);
        let phi = graph_iso(&g, &h, true).unwrap();
        prop_assert!(phi.is_some());
        assert_iso(&g, &h, phi.unwrap().forward());
    }

    #[test]
    fn induced_maps_are_algebraic(seed in any::<u64>()) {
        for c in irredundant_instances(seed, 3).iter().rev().take(8) {
            let alg = algebraic_maps(c);
            let ind = induced_maps(c);
            prop_assert!(ind.is_subset(&alg));
            prop_assert_eq!(alg.len(), 1 << saa_order_log2(c).unwrap());
            prop_assert_eq!(alg == ind, decide_separable_irredundant(c).unwrap().is_separable());
        }
    }
}

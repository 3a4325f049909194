use std::collections::BTreeMap;

use wlcc_core::generators::{
    cyclic_pls, example_mixed, example_two_triangles, fano, mobius_kantor, pappus, pls_to_config, skew_config, t16,
    PartialLinearSpace, SimpleGraph,
};
use wlcc_core::gf2::{gf2_solve, Gf2Solution};
use wlcc_core::irredundant::{
    build_companion, decide_separable_irredundant, rhs_for_generator, saa_order_log2, scac_order_log2_all_f4,
    switch_system,
};
use wlcc_core::oracle::{
    enumerate_strict_algebraic_automorphisms, enumerate_strict_combinatorial_automorphisms,
    is_strict_algebraic_automorphism,
};
use wlcc_core::structure::{dcc, fiber_graph};
use wlcc_core::CoherentConfiguration;

fn config(d: &PartialLinearSpace) -> CoherentConfiguration {
    pls_to_config(d, &BTreeMap::new()).unwrap()
}

fn log2_exact(n: usize) -> usize {
    assert!(n.is_power_of_two(), "{n} is not a power of two");
    n.trailing_zeros() as usize
}

/// Combinatorial automorphisms that fix every class.
fn identity_inducing_count(c: &CoherentConfiguration) -> usize {
    enumerate_strict_combinatorial_automorphisms(c)
        .unwrap()
        .into_iter()
        .filter(|(_, m)| m.iter().enumerate().all(|(i, &j)| i == j))
        .count()
}

#[test]
fn saa_of_t16_matches_enumeration() {
    let c = t16();
    assert_eq!(saa_order_log2(&c).unwrap(), 6);
    assert_eq!(log2_exact(enumerate_strict_algebraic_automorphisms(&c).unwrap().len()), 6);
}

#[test]
fn saa_of_fano_counts_two_per_line() {
    assert_eq!(saa_order_log2(&config(&fano())).unwrap(), 14);
}

#[test]
fn saa_of_two_triangles_matches_enumeration() {
    let c = example_two_triangles();
    assert_eq!(saa_order_log2(&c).unwrap(), 10);
    assert_eq!(log2_exact(enumerate_strict_algebraic_automorphisms(&c).unwrap().len()), 10);
}

#[test]
fn t16_companion_is_six_regular() {
    let comp = build_companion(&t16()).unwrap();
    let g = &comp.graph;
    assert_eq!(g.n(), 16);
    let edge = comp_edge_color(g);
    for u in 0..16 {
        assert_eq!((0..16).filter(|&v| v != u && g.get(u, v) == edge).count(), 6);
    }
    assert_eq!(comp.registry.len(), 6);
}

#[test]
fn skew_companion_has_eight_edges_per_fiber_edge() {
    for g in [SimpleGraph::petersen(), SimpleGraph::cycle(6), SimpleGraph::complete_bipartite(3, 3)] {
        let c = skew_config(&g).unwrap();
        let comp = build_companion(&c).unwrap();
        let m = &comp.graph;
        let edge_color = comp_edge_color(m);
        let edges = (0..m.n()).flat_map(|u| (u + 1..m.n()).map(move |v| (u, v))).filter(|&(u, v)| m.get(u, v) == edge_color).count();
        assert_eq!(edges, 8 * g.edges.len());
        for (u, v) in (0..m.n()).flat_map(|u| (0..m.n()).map(move |v| (u, v))) {
            if u != v {
                assert_eq!(m.get(u, v) == edge_color, m.get(v, u) == edge_color);
            }
        }
        assert_eq!(build_companion(&c).unwrap(), comp);
    }
}

fn comp_edge_color(m: &wlcc_core::ColoredSquareMatrix) -> u32 {
    (0..m.n()).flat_map(|u| (0..m.n()).map(move |v| (u, v))).filter(|&(u, v)| u != v).map(|(u, v)| m.get(u, v)).max().unwrap()
}

#[test]
fn companion_rejects_redundant_input() {
    let c = wlcc_core::closure::closure_of_graph(&wlcc_core::ColoredSquareMatrix::from_rows(&[vec![0, 1], vec![1, 0]]))
        .unwrap()
        .config;
    assert!(build_companion(&c).is_err());
}

#[test]
fn fano_system_shape() {
    let sys = switch_system(&config(&fano())).unwrap();
    assert_eq!(sys.variables.len(), 21);
    assert_eq!(sys.parity_rows.len(), 7);
    assert_eq!(sys.edge_rows.len(), 21);
}

#[test]
fn degree_two_fibers_have_no_parity_rows() {
    for g in [SimpleGraph::path(5), SimpleGraph::cycle(7)] {
        let sys = switch_system(&skew_config(&g).unwrap()).unwrap();
        assert!(sys.parity_rows.is_empty());
        assert_eq!(sys.edge_rows.len(), g.edges.len());
    }
}

#[test]
fn t16_system_shape() {
    let sys = switch_system(&t16()).unwrap();
    assert_eq!(sys.variables.len(), 12);
    assert_eq!(sys.parity_rows.len(), 4);
    assert_eq!(sys.edge_rows.len(), 6);
}

#[test]
fn generator_rhs_weights() {
    let c = example_two_triangles();
    let h = dcc(&c).unwrap();
    for (hi, members) in h.hyperedges.iter().enumerate() {
        let mut total = vec![false; fiber_graph(&c).edges.len()];
        for &x in members {
            let rhs = rhs_for_generator(&c, x, hi).unwrap();
            let weight = rhs.iter().filter(|&&b| b).count();
            assert_eq!(weight, members.len() - 1);
            for (t, b) in total.iter_mut().zip(rhs) {
                *t ^= b;
            }
        }
        assert!(total.iter().all(|&b| !b));
    }
    let outside = (0..c.num_fibers()).find(|x| !h.hyperedges[0].contains(x)).unwrap();
    assert!(rhs_for_generator(&c, outside, 0).is_err());
}

#[test]
fn gf2_examples() {
    let rows = vec![vec![true, true, false], vec![false, true, true]];
    match gf2_solve(&rows, 3, &[true, false]).unwrap() {
        Gf2Solution::Solvable(x) => {
            assert!(x[0] ^ x[1]);
            assert!(!(x[1] ^ x[2]));
        }
        Gf2Solution::Unsolvable => panic!("consistent system"),
    }
    let dependent = vec![vec![true, true], vec![true, true]];
    assert_eq!(gf2_solve(&dependent, 2, &[true, false]).unwrap(), Gf2Solution::Unsolvable);
    assert!(gf2_solve(&rows, 2, &[true, false]).is_err());
}

#[test]
fn verdicts_on_named_instances() {
    assert!(!decide_separable_irredundant(&t16()).unwrap().is_separable());
    assert!(decide_separable_irredundant(&skew_config(&SimpleGraph::path(4)).unwrap()).unwrap().is_separable());
    for n in (7..=21).step_by(7) {
        assert!(!decide_separable_irredundant(&config(&cyclic_pls(n).unwrap())).unwrap().is_separable(), "n = {n}");
    }
    assert!(decide_separable_irredundant(&config(&mobius_kantor())).unwrap().is_separable());
}

#[test]
fn scac_values() {
    assert_eq!(scac_order_log2_all_f4(&config(&mobius_kantor())).unwrap(), 0);
    assert!(scac_order_log2_all_f4(&config(&fano())).unwrap() >= 1);
    let mixed = example_mixed();
    assert_eq!(scac_order_log2_all_f4(&mixed).unwrap(), log2_exact(identity_inducing_count(&mixed)));
    assert!(scac_order_log2_all_f4(&skew_config(&SimpleGraph::path(3)).unwrap()).is_err());
}

#[test]
fn scac_matches_enumeration_on_small_all_f4_instances() {
    for c in [t16(), skew_config(&SimpleGraph::complete_bipartite(3, 3)).unwrap()] {
        assert_eq!(scac_order_log2_all_f4(&c).unwrap(), log2_exact(identity_inducing_count(&c)));
    }
}

#[test]
fn switches_inside_a_triangle_come_in_pairs() {
    for d in [fano(), pappus()] {
        let c = config(&d);
        let h = dcc(&c).unwrap();
        for members in h.hyperedges.iter().filter(|m| m.len() == 3) {
            let edges = [(members[0], members[1]), (members[0], members[2]), (members[1], members[2])];
            for mask in 0u32..8 {
                let s: Vec<(usize, usize)> = (0..3).filter(|i| mask >> i & 1 == 1).map(|i| edges[i]).collect();
                let valid = is_strict_algebraic_automorphism(&c, &s).unwrap();
                assert_eq!(valid, s.len().is_multiple_of(2), "{s:?}");
            }
        }
    }
}

#[test]
fn cubic_skew_configurations_have_parity_obstruction() {
    for g in [SimpleGraph::complete(4), SimpleGraph::complete_bipartite(3, 3), SimpleGraph::petersen()] {
        let sys = switch_system(&skew_config(&g).unwrap()).unwrap();
        let m = sys.edge_rows.len();
        for e in 0..m {
            let mut rhs = vec![false; m];
            rhs[e] = true;
            assert!(!sys.solve(&rhs).unwrap().is_solvable());
            let f = (e + 1) % m;
            rhs[f] = true;
            assert!(sys.solve(&rhs).unwrap().is_solvable());
        }
    }
}

#[test]
fn group_order_accounting() {
    let mut instances = vec![config(&fano()), config(&mobius_kantor()), config(&pappus()), example_mixed(), t16()];
    for n in 9..=15 {
        instances.push(config(&cyclic_pls(n).unwrap()));
    }
    for g in [SimpleGraph::petersen(), SimpleGraph::complete_bipartite(3, 3), SimpleGraph::generalized_petersen(8, 3)] {
        instances.push(skew_config(&g).unwrap());
    }
    for c in &instances {
        let saa = saa_order_log2(c).unwrap();
        let scac = scac_order_log2_all_f4(c).unwrap();
        let induced = 2 * c.num_fibers() - scac;
        assert!(induced <= saa);
        assert_eq!(saa == induced, decide_separable_irredundant(c).unwrap().is_separable());
    }
}

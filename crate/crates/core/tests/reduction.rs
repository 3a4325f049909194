use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wlcc_core::acceptance::{irredundant_instances, random_colored_graph, random_small_graph};
use wlcc_core::census::shrikhande_rook_pair;
use wlcc_core::closure::{closure_of_graph, wl2_equivalent};
use wlcc_core::generators::{fano, mobius_kantor, pls_to_config, skew_config, t16, SimpleGraph};
use wlcc_core::irredundant::decide_separable_irredundant;
use wlcc_core::oracle::{graph_iso, separable_oracle_irredundant};
use wlcc_core::reduction::{
    cut_c8_pair, cut_matching, cut_two_fiber, decide_amenable, decide_separable, decide_separable_traced,
    reduce_to_irredundant, replay_trace, Amenability, BaseCase, Separability, TraceStep,
};
use wlcc_core::structure::{check_irredundant, classify_interspace, fiber_graph, InterspaceTag};
use wlcc_core::{CoherentConfiguration, ColoredSquareMatrix, Error, Precondition};

fn close(g: &ColoredSquareMatrix) -> CoherentConfiguration {
    closure_of_graph(g).unwrap().config
}

fn precondition(r: wlcc_core::Result<CoherentConfiguration>) -> Precondition {
    match r {
        Err(Error::Precondition(p)) => p,
        other => panic!("expected a precondition error, got {other:?}"),
    }
}

/// Fibers of 4 points `4i..4i+3`; consecutive fibers joined by `x ↦ x + 4`.
fn matching_chain(fibers: usize) -> CoherentConfiguration {
    close(&ColoredSquareMatrix::from_fn(4 * fibers, |u, v| {
        if u == v {
            (u / 4) as u32
        } else if u / 4 == v / 4 {
            fibers as u32
        } else if u % 4 == v % 4 && u.abs_diff(v) == 4 {
            fibers as u32 + 1
        } else {
            fibers as u32 + 2
        }
    }))
}

/// `c` plus a 2-point fiber whose points see the two parts of the matching
/// `{a, b}` (and its complement) in fiber `x`.
fn attach_pendant(c: &CoherentConfiguration, x: usize, b: usize) -> ColoredSquareMatrix {
    let n = c.n();
    let k = c.num_classes() as u32;
    let fx = c.fiber(x).to_vec();
    let a = fx[0];
    let near = |p: usize, u: usize| (u == a || u == b) == (p == n);
    ColoredSquareMatrix::from_fn(n + 2, |u, v| match (u >= n, v >= n) {
        (false, false) => c.class_of(u, v) as u32,
        (true, true) => if u == v { k } else { k + 1 },
        (true, false) | (false, true) => {
            let (p, q) = if u >= n { (u, v) } else { (v, u) };
            if !fx.contains(&q) {
                k + 2
            } else if near(p, q) {
                k + 3
            } else {
                k + 4
            }
        }
    })
    .rerank()
}

/// `X = 0..4` and `Y = 4..8` on the 8-cycle `x_i y_i x_{i+1}`; `Z = 8..12` joined to `Y`
/// by 2K₂,₂ along the antipodal pairs of `Y`.
fn c8_with_tail() -> CoherentConfiguration {
    close(&ColoredSquareMatrix::from_fn(12, |u, v| {
        let (a, b) = (u.min(v), u.max(v));
        if u == v {
            (u / 4) as u32
        } else if a / 4 == b / 4 {
            3
        } else if a < 4 && b < 8 {
            let y = b - 4;
            if y == a || (y + 1) % 4 == a { 4 } else { 5 }
        } else if a >= 4 && b >= 8 {
            if (a % 2 == 0) == (b < 10) { 6 } else { 7 }
        } else {
            8
        }
    }))
}

fn c8_pair() -> CoherentConfiguration {
    let c = c8_with_tail();
    c.restrict(&[0, 1]).unwrap()
}

#[test]
fn four_k11_cut_leaves_one_cell() {
    let c = matching_chain(2);
    assert_eq!(classify_interspace(&c, 0, 1).unwrap().tag, InterspaceTag::FourK11);
    let cut = cut_matching(&c, 0, 1).unwrap();
    assert_eq!(cut.num_fibers(), 1);
    assert_eq!(cut.n(), 4);
    assert_eq!(precondition(cut_matching(&c, 0, 0)), Precondition::SameFiber);
}

#[test]
fn matching_chain_reduces_to_single_fiber() {
    let c = matching_chain(4);
    let cut = cut_matching(&c, 0, 1).unwrap();
    for x in 0..3 {
        for y in x + 1..3 {
            assert_eq!(
                classify_interspace(&cut, x, y).unwrap().tag,
                classify_interspace(&c, x + 1, y + 1).unwrap().tag
            );
        }
    }
    let red = reduce_to_irredundant(&c).unwrap();
    assert!(red.components.is_empty());
    let cuts = red.trace.iter().filter(|s| matches!(s, TraceStep::CutMatching { .. })).count();
    assert_eq!(cuts, 3);
    assert_eq!(red.trace.last(), Some(&TraceStep::BaseCaseSeparable(BaseCase::SingleFiber)));
}

#[test]
fn non_matching_interspace_cannot_be_cut() {
    assert_eq!(precondition(cut_matching(&t16(), 0, 1)), Precondition::NoMatchingInInterspace);
}

#[test]
fn two_fiber_cut_on_t16_core() {
    let core = t16().restrict(&[0, 1, 2]).unwrap();
    // matching with mask 3 at fiber 0 is no longer determined by a neighbour
    let c = close(&attach_pendant(&core, 0, 3));
    assert_eq!(c.n(), 14);
    let two = (0..c.num_fibers()).find(|&x| c.fiber(x).len() == 2).unwrap();
    assert_eq!(classify_interspace(&c, 0, two).unwrap().tag, InterspaceTag::TwoK12);
    let cut = cut_two_fiber(&c, two).unwrap();
    assert!(cut.matrix().same_partition(core.matrix()));
    assert_eq!(precondition(cut_two_fiber(&c, 0)), Precondition::NotTwoPointFiber);
    let red = reduce_to_irredundant(&c).unwrap();
    assert_eq!(red.trace[0], TraceStep::CutTwoFiber { fiber: 12 });
    assert_eq!(red.components.len(), 1);
    assert_eq!(red.components[0].points, (0..12).collect::<Vec<_>>());
}

#[test]
fn two_fiber_cut_preconditions() {
    let with_matching = close(&attach_pendant(&matching_chain(2), 0, 1));
    let two = (0..with_matching.num_fibers()).find(|&x| with_matching.fiber(x).len() == 2).unwrap();
    let p = precondition(cut_two_fiber(&with_matching, two));
    assert_eq!(p, Precondition::MatchingInterspacePresent);
    assert_eq!(p.to_string(), "matching interspace present");

    let split = close(&ColoredSquareMatrix::from_fn(6, |u, v| if u == v { (u / 4) as u32 } else { 2 }));
    let p = precondition(cut_two_fiber(&split, 1));
    assert_eq!(p, Precondition::Decomposable);
    assert_eq!(p.to_string(), "decomposable");
}

#[test]
fn c8_pair_cut_leaves_one_cell() {
    let c = c8_with_tail();
    assert_eq!(c.num_fibers(), 3);
    assert_eq!(classify_interspace(&c, 0, 1).unwrap().tag, InterspaceTag::C8);
    assert_eq!(classify_interspace(&c, 1, 2).unwrap().tag, InterspaceTag::TwoK22);
    let cut = cut_c8_pair(&c, 0, 1).unwrap();
    assert_eq!(cut.num_fibers(), 1);
    let fg = fiber_graph(&cut);
    assert!(fg.edges.is_empty());
    assert_eq!(precondition(cut_c8_pair(&c, 1, 2)), Precondition::NotC8);
    let red = reduce_to_irredundant(&c).unwrap();
    assert_eq!(red.trace, vec![TraceStep::CutC8Pair { x: 0, y: 4 }, TraceStep::BaseCaseSeparable(BaseCase::SingleFiber)]);
}

#[test]
fn two_fiber_c8_is_a_base_case() {
    let c = c8_pair();
    let p = precondition(cut_c8_pair(&c, 0, 1));
    assert_eq!(p, Precondition::NeedsThreeFibers);
    assert_eq!(p.to_string(), "needs >= 3 fibers");
    let red = reduce_to_irredundant(&c).unwrap();
    assert_eq!(red.trace, vec![TraceStep::BaseCaseSeparable(BaseCase::TwoFiberC8)]);
}

#[test]
fn small_configurations_are_separable() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..150 {
        let c = close(&random_small_graph(&mut rng, 15));
        let red = reduce_to_irredundant(&c).unwrap();
        for comp in &red.components {
            assert!(check_irredundant(&comp.config).is_ok());
            assert!(decide_separable_irredundant(&comp.config).unwrap().is_separable());
        }
        assert!(decide_separable(&c).unwrap().is_separable());
    }
}

#[test]
fn t16_is_handed_off_unchanged() {
    let red = reduce_to_irredundant(&t16()).unwrap();
    assert_eq!(red.trace, vec![TraceStep::IrredundantHandoff { component: 0 }]);
    assert_eq!(red.components[0].config, t16());
}

#[test]
fn pendant_two_fibers_are_cut_from_t16() {
    let base = t16();
    let once = close(&attach_pendant(&base, 0, 1));
    let twice = close(&attach_pendant(&once, 1, 6));
    assert_eq!(twice.n(), 20);
    let red = reduce_to_irredundant(&twice).unwrap();
    assert_eq!(red.components.len(), 1);
    assert_eq!(red.components[0].points, (0..16).collect::<Vec<_>>());
    assert!(red.components[0].config.matrix().same_partition(base.matrix()));
    let cuts: Vec<_> = red.trace.iter().filter(|s| matches!(s, TraceStep::CutTwoFiber { .. })).collect();
    assert_eq!(cuts, vec![&TraceStep::CutTwoFiber { fiber: 16 }, &TraceStep::CutTwoFiber { fiber: 18 }]);
    assert!(!decide_separable(&twice).unwrap().is_separable());
}

#[test]
fn trace_display() {
    assert_eq!(TraceStep::CutMatching { fiber: 0, partner: 4 }.to_string(), "cut-matching 0 4");
    assert_eq!(TraceStep::SplitComponents { parts: 2 }.to_string(), "split 2");
    assert_eq!(TraceStep::IrredundantHandoff { component: 1 }.to_string(), "irredundant 1");
    assert_eq!(TraceStep::BaseCaseSeparable(BaseCase::TwoFiberC8).to_string(), "base two fibers with C8");
}

#[test]
fn named_separability_verdicts() {
    let config = |d| pls_to_config(&d, &BTreeMap::new()).unwrap();
    assert!(!decide_separable(&t16()).unwrap().is_separable());
    assert!(decide_separable(&config(mobius_kantor())).unwrap().is_separable());
    assert!(!decide_separable(&config(fano())).unwrap().is_separable());
}

#[test]
fn witness_generator_is_a_class_permutation() {
    let Separability::NonSeparable(w) = decide_separable(&t16()).unwrap() else { panic!("t16 is not separable") };
    let k = w.component.config.num_classes();
    let mut seen = vec![false; k];
    for &z in &w.generator {
        assert!(!seen[z]);
        seen[z] = true;
    }
    assert_ne!(w.generator, (0..k).collect::<Vec<_>>());
    let c = &w.component.config;
    for t in 0..k {
        for r in 0..k {
            for s in 0..k {
                assert_eq!(c.p(t, r, s), c.p(w.generator[t], w.generator[r], w.generator[s]));
            }
        }
    }
}

#[test]
fn disconnected_configuration_is_split() {
    let c = close(&ColoredSquareMatrix::from_fn(8, |u, v| if u == v { (u / 4) as u32 } else { 2 }));
    let red = reduce_to_irredundant(&c).unwrap();
    assert_eq!(red.trace[0], TraceStep::SplitComponents { parts: 2 });
    assert!(red.components.is_empty());
}

#[test]
fn large_fibers_are_rejected() {
    let c = close(&ColoredSquareMatrix::from_fn(5, |u, v| (u != v) as u32));
    assert!(matches!(reduce_to_irredundant(&c), Err(Error::FiberTooLarge(5))));
}

#[test]
fn small_graphs_are_amenable() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..60 {
        let g = random_small_graph(&mut rng, 15);
        assert!(decide_amenable(&g).unwrap().is_amenable());
    }
}

#[test]
fn shrikhande_companion_is_the_rook_graph() {
    let p = shrikhande_rook_pair();
    let Amenability::NonAmenable(h) = decide_amenable(&p.shrikhande).unwrap() else { panic!("expected a companion") };
    assert!(wl2_equivalent(&p.shrikhande, &h).unwrap().is_some());
    assert!(graph_iso(&p.shrikhande, &h, true).unwrap().is_none());
    assert!(graph_iso(&h, &p.rook, true).unwrap().is_some());
}

#[test]
fn companion_of_skew_petersen_is_equivalent_and_distinct() {
    let c = skew_config(&SimpleGraph::petersen()).unwrap();
    let Amenability::NonAmenable(h) = decide_amenable(c.matrix()).unwrap() else { panic!("expected a companion") };
    assert!(wl2_equivalent(c.matrix(), &h).unwrap().is_some());
    assert!(graph_iso(c.matrix(), &h, true).unwrap().is_none());
}

#[test]
fn amenability_rejects_large_multiplicity() {
    let g = ColoredSquareMatrix::from_fn(5, |u, v| (u != v) as u32);
    match decide_amenable(&g) {
        Err(Error::Precondition(Precondition::ColorMultiplicity(5))) => {}
        other => panic!("unexpected {other:?}"),
    }
    let bad = ColoredSquareMatrix::from_rows(&[vec![0, 0], vec![0, 0]]);
    assert!(matches!(decide_amenable(&bad), Err(Error::InvalidColoring(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn multiplicity_three_is_amenable(seed in any::<u64>(), n in 1usize..=30, palette in 1usize..4) {
        let g = random_colored_graph(&mut ChaCha8Rng::seed_from_u64(seed), n, 3, palette);
        prop_assert!(decide_amenable(&g).unwrap().is_amenable());
    }

    #[test]
    fn traces_are_deterministic_and_replay(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = close(&random_small_graph(&mut rng, 20));
        let a = reduce_to_irredundant(&c).unwrap();
        let b = reduce_to_irredundant(&c).unwrap();
        prop_assert_eq!(&a.trace, &b.trace);
        let replayed = replay_trace(&c, &a.trace).unwrap();
        let points: Vec<Vec<usize>> = a.components.iter().map(|r| r.points.clone()).collect();
        prop_assert_eq!(replayed, points);
    }

    #[test]
    fn cuts_preserve_separability(seed in any::<u64>(), pick in any::<usize>(), partner in 1usize..4) {
        let instances = irredundant_instances(seed, 4);
        let base = &instances[pick % instances.len()];
        prop_assume!(base.num_fibers() <= 3);
        let x = pick % base.num_fibers();
        let b = base.fiber(x)[partner];
        prop_assume!(base.meta(base.class_of(base.fiber(x)[0], b)).valency == 1);
        let c = close(&attach_pendant(base, x, b));
        let (verdict, red) = decide_separable_traced(&c).unwrap();
        let mut all = true;
        for comp in &red.components {
            let fast = decide_separable_irredundant(&comp.config).unwrap().is_separable();
            prop_assert_eq!(fast, separable_oracle_irredundant(&comp.config).unwrap());
            all &= fast;
        }
        prop_assert_eq!(verdict.is_separable(), all);
        prop_assert_eq!(verdict.is_separable(), decide_separable(base).unwrap().is_separable());
    }
}
